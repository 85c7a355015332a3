fn main() {
    std::process::exit(dwqst::cli::main_with_args(std::env::args_os()));
}

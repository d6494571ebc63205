fn main() {
    std::process::exit(cvlearn::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(codnopt::cli::main_with_args(std::env::args_os()));
}

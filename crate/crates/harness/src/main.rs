fn main() {
    std::process::exit(mrpoisson::cli::main_with_args(std::env::args_os()));
}

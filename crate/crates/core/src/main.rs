fn main() {
    std::process::exit(bottomwell::cli::main_with_args(std::env::args_os()));
}

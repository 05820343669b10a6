fn main() {
    std::process::exit(nlgreen::cli::main_with_args(std::env::args_os()));
}

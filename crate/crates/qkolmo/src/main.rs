fn main() {
    std::process::exit(qkolmo::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(giant_atoms::cli::main_with_args(std::env::args_os()));
}

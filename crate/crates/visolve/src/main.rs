fn main() {
    std::process::exit(visolve::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(nse::cli::main_with_args(std::env::args_os()));
}

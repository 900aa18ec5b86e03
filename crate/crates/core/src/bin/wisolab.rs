fn main() {
    std::process::exit(wisolab::cli::main_with_args(std::env::args_os()));
}

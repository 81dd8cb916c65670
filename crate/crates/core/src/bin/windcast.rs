fn main() {
    std::process::exit(windcast::cli::main_with_args(std::env::args_os()));
}

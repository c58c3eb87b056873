fn main() {
    std::process::exit(mixent::cli::main_with_args(std::env::args_os()));
}

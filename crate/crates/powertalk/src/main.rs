fn main() {
    std::process::exit(powertalk::cli::main_with_args(std::env::args_os()));
}

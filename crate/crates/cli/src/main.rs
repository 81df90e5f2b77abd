fn main() {
    std::process::exit(ultraslow_cli::main_with_args(std::env::args_os()));
}

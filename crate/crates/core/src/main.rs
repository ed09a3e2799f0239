fn main() {
    std::process::exit(morse_susy::cli::run(std::env::args_os()))
}

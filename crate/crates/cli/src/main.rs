fn main() {
    std::process::exit(rezeta_cli::run(std::env::args_os()));
}

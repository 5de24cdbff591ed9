fn main() {
    std::process::exit(orbitope_cli::run(std::env::args_os()));
}

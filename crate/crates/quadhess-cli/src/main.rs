fn main() {
    std::process::exit(quadhess_cli::run(std::env::args_os()));
}

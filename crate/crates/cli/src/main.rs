fn main() {
    std::process::exit(ultrametra_cli::run(std::env::args_os()));
}

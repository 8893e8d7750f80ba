fn main() {
    std::process::exit(contgibbs::cli::run(std::env::args_os()));
}

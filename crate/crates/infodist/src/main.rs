fn main() {
    std::process::exit(infodist::cli::run(std::env::args_os()));
}

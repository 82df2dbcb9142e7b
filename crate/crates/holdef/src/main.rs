fn main() {
    std::process::exit(holdef::cli::run(std::env::args().skip(1)));
}

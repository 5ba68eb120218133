fn main() {
    std::process::exit(wright_stability::cli::run(std::env::args_os()));
}

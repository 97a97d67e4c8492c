fn main() {
    std::process::exit(rkindex::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(wmc::cli::run(std::env::args_os()));
}

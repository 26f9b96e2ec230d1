fn main() {
    std::process::exit(lowlying::cli::run(std::env::args_os()));
}

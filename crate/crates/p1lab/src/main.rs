fn main() {
    std::process::exit(p1lab::cli::run(std::env::args_os()));
}

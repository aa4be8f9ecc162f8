fn main() {
    std::process::exit(qgd::cli::run(std::env::args_os()));
}

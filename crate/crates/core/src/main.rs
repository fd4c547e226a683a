fn main() {
    std::process::exit(halfder_core::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(gltop::cli::run(std::env::args_os()));
}

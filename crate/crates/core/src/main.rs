fn main() {
    std::process::exit(apgaps::cli::run(std::env::args_os().collect()));
}

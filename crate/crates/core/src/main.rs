fn main() {
    std::process::exit(pa_seed::cli::run(std::env::args_os()));
}

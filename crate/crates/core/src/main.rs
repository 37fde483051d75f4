fn main() {
    std::process::exit(horizon_sde::cli::run(std::env::args_os()));
}

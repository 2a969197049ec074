fn main() {
    std::process::exit(sigma_race_cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(wedgesim::cli::run_cli(std::env::args()));
}

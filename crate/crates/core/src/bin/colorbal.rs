fn main() {
    std::process::exit(colorbal::cli::run_cli(std::env::args_os()));
}

fn main() {
    std::process::exit(fgs_cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(mmconc::cli::run_from(std::env::args_os()));
}

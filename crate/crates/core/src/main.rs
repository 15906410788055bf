fn main() {
    std::process::exit(mpemba_qsim::cli::run_from(std::env::args_os()));
}

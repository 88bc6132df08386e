fn main() {
    std::process::exit(qspline::cli::cli_main(std::env::args_os()));
}

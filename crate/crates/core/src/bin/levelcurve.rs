fn main() {
    std::process::exit(levelcurve::cli::main_with(std::env::args_os()));
}

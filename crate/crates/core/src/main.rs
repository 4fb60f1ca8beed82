fn main() {
    std::process::exit(mero_wright::cli::run(std::env::args_os()));
}

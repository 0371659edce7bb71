fn main() {
    std::process::exit(bls::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(sigma_etale::cli::run(std::env::args_os()));
}

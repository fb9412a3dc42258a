fn main() {
    std::process::exit(tangent_recon::cli::run(std::env::args_os()));
}

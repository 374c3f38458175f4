fn main() {
    std::process::exit(vlasov_spectral::io::run_cli(std::env::args_os()));
}

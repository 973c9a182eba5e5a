fn main() {
    std::process::exit(kie_leakage::cli::run(std::env::args_os()));
}

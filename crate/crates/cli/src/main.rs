fn main() {
    std::process::exit(hpcs_cli::run(std::env::args_os()));
}

fn main() {
    let code = icap_cli::run(std::env::args_os());
    std::process::exit(code);
}

fn main() {
    let code = eharvest::cli::run(std::env::args_os());
    std::process::exit(code);
}

fn main() {
    let code = ehm::run(std::env::args_os());
    std::process::exit(code);
}

fn main() {
    let code = pitkit::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}

fn main() {
    std::process::exit(rigidcert::cli::run(std::env::args_os()));
}

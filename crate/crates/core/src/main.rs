fn main() {
    std::process::exit(qhyper::cli::main_from_args(std::env::args_os()));
}

fn main() {
    std::process::exit(weak_em::cli::main_with_args(std::env::args_os()));
}

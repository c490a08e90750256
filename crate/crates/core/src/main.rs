fn main() {
    std::process::exit(margulis::cli::main_with_args(std::env::args_os()));
}

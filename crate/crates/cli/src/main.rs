fn main() {
    std::process::exit(postsel_cli::main_with_args(std::env::args_os()));
}

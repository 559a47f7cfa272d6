fn main() {
    std::process::exit(zhutrace::cli::main_with_args(std::env::args_os()));
}

fn main() -> std::process::ExitCode {
    chaolab::cli::main_with_args(std::env::args_os())
}

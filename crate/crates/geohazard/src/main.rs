fn main() -> std::process::ExitCode {
    geohazard::cli::main()
}

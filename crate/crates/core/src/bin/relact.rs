fn main() -> std::process::ExitCode {
    relact::cli::main()
}

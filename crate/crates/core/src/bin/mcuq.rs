fn main() -> std::process::ExitCode {
    mcu_qft::cli::main()
}

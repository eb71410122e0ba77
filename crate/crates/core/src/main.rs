fn main() -> std::process::ExitCode { toric_cohom::cli::main() }

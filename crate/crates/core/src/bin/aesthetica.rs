use std::process::ExitCode;

fn main() -> ExitCode {
    aesthetica::cli::main()
}

use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = polynorm_cli::run(
        std::env::args_os(),
        std::env::var_os(polynorm_cli::ROOT_VAR),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}

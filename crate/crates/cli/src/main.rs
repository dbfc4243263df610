use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = dml_cli::run_styled(std::env::args_os(), dml_cli::color_enabled());
    let stream_ok = if result.exit_code == 0 {
        std::io::stdout().write_all(result.report.as_bytes())
    } else {
        std::io::stderr().write_all(result.report.as_bytes())
    };
    if stream_ok.is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(result.exit_code as u8)
}

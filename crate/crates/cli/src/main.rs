use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, report) = gm_cli::run_command(std::env::args_os().skip(1));
    if code == 2 {
        eprint!("{report}");
    } else {
        print!("{report}");
    }
    ExitCode::from(code as u8)
}

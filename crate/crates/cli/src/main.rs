use std::process::ExitCode;

use flopcheck::config::DIGITS_ENV;

fn main() -> ExitCode {
    let out = flopcheck::run_from(std::env::args_os(), std::env::var(DIGITS_ENV).ok());
    if let Some(rep) = &out.report {
        println!("{}", serde_json::to_string_pretty(&rep.to_json()).expect("report serializes"));
        for c in rep.failures() {
            eprintln!("FAIL {}{}", c.name, c.detail.as_ref().map(|d| format!(": {d}")).unwrap_or_default());
        }
    }
    if let Some(m) = &out.message {
        if out.code == 0 {
            print!("{m}");
        } else {
            eprintln!("{m}");
        }
    }
    ExitCode::from(out.code as u8)
}

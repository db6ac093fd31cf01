use std::process::ExitCode;

use koehler_core::acceptance::{invariants, report_line, run_all};

fn main() -> ExitCode {
    let outcomes: Vec<_> = run_all().into_iter().chain(invariants()).collect();
    for o in &outcomes {
        println!("{}", report_line(o));
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id.as_str()).collect();
    println!("\n{} of {} passed", outcomes.len() - failed.len(), outcomes.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {failed:?}");
        ExitCode::FAILURE
    }
}

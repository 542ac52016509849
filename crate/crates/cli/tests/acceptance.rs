//! Runs every acceptance criterion under the default profile and prints one
//! line per criterion; exits non-zero if any fails.

use std::process::ExitCode;

use widthlab_cli::verify::{run_profile, Profile};

fn main() -> ExitCode {
    let profile = Profile::named("default").expect("default profile exists");
    println!("\nacceptance ({} criteria)", profile.criteria.len());
    let report = run_profile(&profile);
    let failed = report.outcomes.iter().filter(|o| !o.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed\n",
        report.outcomes.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

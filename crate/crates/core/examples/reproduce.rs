//! Runs the reproduction battery and prints one line per claim.

use qhyper::cli::reproduce::run_claims;

fn main() {
    let results = run_claims(None);
    for r in &results {
        println!("{} {:<28} {:?}", if r.pass { "PASS" } else { "FAIL" }, r.id, r.computed);
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    std::process::exit(i32::from(failed > 0));
}

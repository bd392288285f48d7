//! Checks a few generated instances of each law.

use mallterm::lawcheck::{sweep, Law, Verdict, DEFAULT_MAX_FORMULA};

fn main() {
    for law in Law::ALL {
        let reports = sweep(law, 0, 20, DEFAULT_MAX_FORMULA);
        let pass = reports.iter().filter(|r| r.verdict == Verdict::Pass).count();
        let skip = reports.iter().filter(|r| r.verdict == Verdict::Skip).count();
        println!("{law}: {pass} pass, {skip} skip, {} fail", reports.len() - pass - skip);
    }
}

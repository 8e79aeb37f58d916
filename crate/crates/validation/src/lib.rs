//! Verdict lines for the acceptance suite in `tests/acceptance.rs`.

use std::fmt;
use std::time::Duration;

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {} [{}]: {} ({}; {:.2} s)",
            self.id,
            self.title,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

impl Verdict {
    /// Prints the verdict line and panics on failure.
    pub fn report(self) {
        println!("{self}");
        assert!(self.pass, "{self}");
    }
}

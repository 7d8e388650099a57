//! Verdict reporting for the acceptance suite.
//!
//! Each criterion collects named checks and prints one verdict line, plus
//! its check and note lines, straight to the process stderr, outside the
//! test harness capture.

use std::fmt::Write as _;
use std::io::Write as _;
use std::time::Instant;

pub struct Verdict {
    id: u8,
    title: &'static str,
    checks: Vec<(String, bool)>,
    notes: Vec<String>,
    started: Instant,
}

impl Verdict {
    pub fn new(id: u8, title: &'static str) -> Self {
        Verdict { id, title, checks: Vec::new(), notes: Vec::new(), started: Instant::now() }
    }

    pub fn check(&mut self, label: impl Into<String>, ok: bool) -> bool {
        self.checks.push((label.into(), ok));
        ok
    }

    /// Extra measured context, printed under the verdict line.
    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn line(&self) -> String {
        let mut line = format!(
            "criterion {:>2} {} {} ({:.1}s)",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.started.elapsed().as_secs_f64()
        );
        for (label, ok) in &self.checks {
            let _ = write!(line, "\n    [{}] {label}", if *ok { "ok" } else { "FAIL" });
        }
        for note in &self.notes {
            let _ = write!(line, "\n    note: {note}");
        }
        line
    }

    /// Print the verdict and fail the calling test if any check failed.
    pub fn finish(self) {
        let line = self.line();
        let mut err = std::io::stderr().lock();
        let _ = writeln!(err, "{line}");
        let _ = err.flush();
        assert!(self.passed(), "criterion {} failed: {}", self.id, self.title);
    }
}

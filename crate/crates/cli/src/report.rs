use std::fmt::Write as _;

use nilgen_core::format::{serialize_document, Document};
use nilgen_core::fp_linalg::FVector;

/// Certificates printed per report; the total is always reported.
pub const MAX_CERTIFICATES: usize = 16;

/// The key=value block written to standard output by every command.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub command: String,
    pub seed: u64,
    pub trials: u64,
    pub passes: u64,
    pub failures: u64,
    pub fields: Vec<(String, String)>,
    /// Total number of counterexamples found; at most
    /// [`MAX_CERTIFICATES`] of them are kept in `certificates`.
    pub certificates_total: usize,
    pub certificates: Vec<Document>,
    /// Check commands exit 1 exactly when `failures > 0`.
    pub check: bool,
}

impl RunReport {
    pub fn new(command: String, seed: u64, check: bool) -> Self {
        RunReport {
            command,
            seed,
            check,
            ..Default::default()
        }
    }

    pub fn field(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn certify(&mut self, doc: Document) {
        self.certificates_total += 1;
        if self.certificates.len() < MAX_CERTIFICATES {
            self.certificates.push(doc);
        }
    }

    pub fn status(&self) -> i32 {
        i32::from(self.check && self.failures > 0)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command={}", self.command);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "trials={}", self.trials);
        let _ = writeln!(s, "passes={}", self.passes);
        let _ = writeln!(s, "failures={}", self.failures);
        for (k, v) in &self.fields {
            let _ = writeln!(s, "{k}={v}");
        }
        let _ = writeln!(s, "certificates={}", self.certificates_total);
        for (i, doc) in self.certificates.iter().enumerate() {
            let _ = writeln!(s, "begin certificate {i}");
            s.push_str(&serialize_document(doc));
            let _ = writeln!(s, "end certificate {i}");
        }
        let _ = writeln!(s, "status={}", self.status());
        s
    }
}

/// Space-free rendering of a vector for report values.
pub fn coords(v: &FVector) -> String {
    let parts: Vec<String> = v.coords().iter().map(u32::to_string).collect();
    parts.join(",")
}

pub fn coord_list(vs: &[FVector]) -> String {
    let parts: Vec<String> = vs.iter().map(|v| format!("[{}]", coords(v))).collect();
    parts.join(";")
}

/// Pulls every `begin certificate`/`end certificate` block out of a
/// rendered report.
pub fn extract_certificates(report: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current: Option<String> = None;
    for line in report.lines() {
        if line.starts_with("begin certificate ") {
            current = Some(String::new());
        } else if line.starts_with("end certificate ") {
            out.extend(current.take());
        } else if let Some(cur) = current.as_mut() {
            cur.push_str(line);
            cur.push('\n');
        }
    }
    out
}

//! Verification reports: named checks with expected and observed values,
//! rendered as plain text and CSV.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub title: String,
    /// SHA-256 of the rows CSV the checks ran on, if any.
    pub fingerprint: Option<String>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(title: impl Into<String>) -> Self {
        VerificationReport {
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn with_fingerprint(mut self, fingerprint: String) -> Self {
        self.fingerprint = Some(fingerprint);
        self
    }

    pub fn check(
        &mut self,
        name: impl Into<String>,
        expected: impl ToString,
        observed: impl ToString,
        pass: bool,
    ) -> &mut Self {
        self.checks.push(Check {
            name: name.into(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            pass,
        });
        self
    }

    /// A check that passes when both sides render identically.
    pub fn expect_eq(
        &mut self,
        name: impl Into<String>,
        expected: impl ToString,
        observed: impl ToString,
    ) -> &mut Self {
        let (e, o) = (expected.to_string(), observed.to_string());
        let pass = e == o;
        self.check(name, e, o, pass)
    }

    /// Appends another report's checks, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}{}", c.name);
            self.checks.push(c);
        }
        if self.fingerprint.is_none() {
            self.fingerprint = other.fingerprint;
        }
    }

    pub fn passed_count(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn failed_count(&self) -> usize {
        self.checks.len() - self.passed_count()
    }

    pub fn passed(&self) -> bool {
        self.failed_count() == 0
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.title);
        if let Some(f) = &self.fingerprint {
            out.push_str(&format!("rows sha256: {f}\n"));
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let mark = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "[{mark}] {:width$}  expected {}  observed {}\n",
                c.name, c.expected, c.observed
            ));
        }
        out.push_str(&format!(
            "{} checks, {} passed, {} failed\n",
            self.checks.len(),
            self.passed_count(),
            self.failed_count()
        ));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check", "expected", "observed", "pass"])
            .expect("writing to memory");
        for c in &self.checks {
            w.write_record([&c.name, &c.expected, &c.observed, &c.pass.to_string()])
                .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("UTF-8 fields")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_and_counts() {
        let mut r = VerificationReport::new("demo").with_fingerprint("ab".into());
        r.expect_eq("cost", 450, 450)
            .expect_eq("cover", "{1,2}", "{1,3}");
        assert_eq!((r.passed_count(), r.failed_count()), (1, 1));
        assert!(!r.passed());
        let text = r.to_text();
        assert!(text.contains("[PASS] cost"));
        assert!(text.contains("[FAIL] cover"));
        assert!(text.ends_with("2 checks, 1 passed, 1 failed\n"));
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.contains("cover,\"{1,2}\",\"{1,3}\",false"));
    }
}

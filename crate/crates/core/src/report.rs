//! Structured outcome of a verification run, serializable to the JSON report schema.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::exact::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    /// false when the verdict rests on floating-point output
    pub exact: bool,
    pub detail: String,
}

/// A value where our exact recomputation disagrees with a printed one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub name: String,
    pub printed: String,
    pub computed: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub class: Option<String>,
    pub n: Option<usize>,
    pub verdicts: Vec<Verdict>,
    /// block label → eigenvalue ("num/den") → multiplicity
    pub spectra: BTreeMap<String, BTreeMap<String, usize>>,
    pub control_sums: BTreeMap<String, String>,
    pub mismatches: Vec<Mismatch>,
    pub timing_ms: Option<u64>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report { command: command.into(), ..Default::default() }
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict { name: name.into(), pass, exact: true, detail: detail.into() });
    }

    pub fn check_float(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict { name: name.into(), pass, exact: false, detail: detail.into() });
    }

    /// Exact equality check that records both sides.
    pub fn check_eq<T: PartialEq + std::fmt::Debug>(&mut self, name: &str, computed: T, expected: T) {
        let pass = computed == expected;
        self.check(name, pass, format!("computed {computed:?}, expected {expected:?}"));
    }

    pub fn mismatch(&mut self, name: impl Into<String>, printed: impl Into<String>, computed: impl Into<String>) {
        self.mismatches.push(Mismatch { name: name.into(), printed: printed.into(), computed: computed.into() });
    }

    pub fn control(&mut self, name: impl Into<String>, v: &Rational) {
        self.control_sums.insert(name.into(), format_rational(v));
    }

    pub fn spectrum(&mut self, label: impl Into<String>, eig: &BTreeMap<Rational, usize>) {
        self.spectra
            .insert(label.into(), eig.iter().map(|(k, v)| (format_rational(k), *v)).collect());
    }

    pub fn merge(&mut self, other: Report) {
        self.verdicts.extend(other.verdicts);
        self.spectra.extend(other.spectra);
        self.control_sums.extend(other.control_sums);
        self.mismatches.extend(other.mismatches);
    }

    /// Merges with every verdict, spectrum, control and mismatch name prefixed.
    pub fn merge_prefixed(&mut self, other: Report, prefix: &str) {
        let p = |s: String| format!("{prefix}{s}");
        self.verdicts.extend(other.verdicts.into_iter().map(|v| Verdict { name: p(v.name), ..v }));
        self.spectra.extend(other.spectra.into_iter().map(|(k, v)| (p(k), v)));
        self.control_sums.extend(other.control_sums.into_iter().map(|(k, v)| (p(k), v)));
        self.mismatches.extend(other.mismatches.into_iter().map(|m| Mismatch { name: p(m.name), ..m }));
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn failed(&self) -> Vec<&Verdict> {
        self.verdicts.iter().filter(|v| !v.pass).collect()
    }

    /// 0 all pass, 2 a verdict failed, 3 only printed-value mismatches.
    pub fn exit_code(&self) -> i32 {
        if !self.all_pass() {
            2
        } else if !self.mismatches.is_empty() {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        if let Some(c) = &self.class {
            out.push_str(&format!("class:   {c}\n"));
        }
        if let Some(n) = self.n {
            out.push_str(&format!("n:       {n}\n"));
        }
        out.push_str("\nverdicts\n");
        for v in &self.verdicts {
            let tag = if v.pass { "PASS" } else { "FAIL" };
            let kind = if v.exact { "exact" } else { "float" };
            out.push_str(&format!("  [{tag}] ({kind}) {}: {}\n", v.name, v.detail));
        }
        if !self.control_sums.is_empty() {
            out.push_str("\ncontrol sums\n");
            for (k, v) in &self.control_sums {
                out.push_str(&format!("  {k:<28} {v}\n"));
            }
        }
        if !self.spectra.is_empty() {
            out.push_str("\nspectra\n");
            for (k, m) in &self.spectra {
                let body: Vec<String> = m.iter().map(|(e, c)| format!("{e}^{c}")).collect();
                out.push_str(&format!("  {k:<20} {}\n", body.join(" ")));
            }
        }
        if !self.mismatches.is_empty() {
            out.push_str("\nprinted-value mismatches\n");
            for m in &self.mismatches {
                out.push_str(&format!("  {}: printed {}, computed {}\n", m.name, m.printed, m.computed));
            }
        }
        if let Some(t) = self.timing_ms {
            out.push_str(&format!("\ntiming: {t} ms\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_exit_codes() {
        let mut r = Report::new("fixture hankel3");
        r.check("S_matches_printed", true, "entrywise");
        r.control("trace_2S", &crate::exact::int(600));
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.exit_code(), 0);
        r.mismatch("total", "14", "15");
        assert_eq!(r.exit_code(), 3);
        r.check("psd", false, "witness");
        assert_eq!(r.exit_code(), 2);
    }
}

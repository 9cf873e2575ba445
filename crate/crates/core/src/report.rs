//! Check records shared by every verification routine.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

/// Every anchor a check record may carry.
pub const ANCHORS: &[&str] = &[
    "even-lattice",
    "indef-pairing",
    "spin",
    "maximality",
    "rational-family",
    "lattice-recognition",
    "twococycle",
    "shift-def",
    "shift-commut",
    "unitarity",
    "coboundary",
    "heisenberg",
    "sugawara",
    "virasoro",
    "adjoint",
    "smeared-field",
    "energy-bound",
    "parity",
    "def-E",
    "comm-E",
    "decomp-Y",
    "def-wightman",
    "fourier-grid",
    "primary+",
    "primary-",
    "comm-Y",
    "H_Q",
    "shift-field",
    "simple-shift",
    "field-comm",
    "fieldstar",
    "comm-c-z",
    "L-shift",
    "character",
    "classification",
    "fusion",
    "braidingNdim",
    "tensorator",
    "braided-functor",
    "nu-phase",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One verified identity. A failing record always carries a witness.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: String,
    pub anchor: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub witness: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(id: impl Into<String>, anchor: &'static str) -> Self {
        debug_assert!(ANCHORS.contains(&anchor), "unknown anchor {anchor}");
        Check {
            id: id.into(),
            anchor,
            status: Status::Pass,
            witness: BTreeMap::new(),
            note: None,
        }
    }

    pub fn pass(id: impl Into<String>, anchor: &'static str) -> Self {
        Self::new(id, anchor)
    }

    pub fn fail(id: impl Into<String>, anchor: &'static str, witness: Witness) -> Self {
        let mut c = Self::new(id, anchor);
        c.status = Status::Fail;
        c.witness = witness.0;
        c
    }

    pub fn skipped(id: impl Into<String>, anchor: &'static str, why: impl Into<String>) -> Self {
        let mut c = Self::new(id, anchor);
        c.status = Status::Skipped;
        c.note = Some(why.into());
        c
    }

    /// Pass when `witness` is `None`, fail with it otherwise.
    pub fn from_witness(id: impl Into<String>, anchor: &'static str, witness: Option<Witness>) -> Self {
        match witness {
            None => Self::pass(id, anchor),
            Some(w) => Self::fail(id, anchor, w),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Builder for witness maps.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Witness(pub BTreeMap<String, String>);

impl Witness {
    pub fn new() -> Self {
        Witness::default()
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    pub fn coords(self, key: &str, v: &[i64]) -> Self {
        self.with(key, format_coords(v))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

pub fn format_coords(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

/// Ordered collection of checks for one suite.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub name: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report { name: name.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn find(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}]", self.name)?;
        for c in &self.checks {
            let s = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skip",
            };
            write!(f, "  {s:4} {} ({})", c.id, c.anchor)?;
            for (k, v) in &c.witness {
                write!(f, " {k}={v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

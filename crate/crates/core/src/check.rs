//! Verification records shared by the oracle, spectral and canonical-path
//! checks.

use serde::Serialize;

/// Relative tolerance for oracle equalities.
pub const REL_TOL: f64 = 1e-10;
/// Absolute floor below which differences are treated as zero.
pub const ABS_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Relation {
    /// `lhs == rhs` within `max(rel * max(|lhs|, |rhs|), abs)`.
    Equal { rel: f64, abs: f64 },
    /// `lhs <= rhs` (with `rel` slack relative to `rhs` for rounding).
    AtMost { rel: f64 },
    /// `lhs >= rhs` (with `rel` slack relative to `rhs` for rounding).
    AtLeast { rel: f64 },
}

impl Relation {
    pub fn equal() -> Self {
        Relation::Equal {
            rel: REL_TOL,
            abs: ABS_FLOOR,
        }
    }

    pub fn holds(&self, lhs: f64, rhs: f64) -> bool {
        if !(lhs.is_finite() && rhs.is_finite()) {
            return false;
        }
        match *self {
            Relation::Equal { rel, abs } => {
                (lhs - rhs).abs() <= (rel * lhs.abs().max(rhs.abs())).max(abs)
            }
            Relation::AtMost { rel } => lhs <= rhs + rel * rhs.abs(),
            Relation::AtLeast { rel } => lhs >= rhs - rel * rhs.abs(),
        }
    }
}

/// One checked identity or inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, relation: Relation) -> Self {
        Check {
            name: name.into(),
            lhs,
            rhs,
            relation,
            pass: relation.holds(lhs, rhs),
            witness: None,
        }
    }

    pub fn equal(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::new(name, lhs, rhs, Relation::equal())
    }

    pub fn at_most(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::new(name, lhs, rhs, Relation::AtMost { rel: 1e-12 })
    }

    pub fn at_least(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::new(name, lhs, rhs, Relation::AtLeast { rel: 1e-12 })
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }
}

/// A list of checks; passes iff every check passes.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Relation::equal().holds(1.0, 1.0 + 1e-12));
        assert!(!Relation::equal().holds(1.0, 1.0 + 1e-8));
        assert!(Relation::equal().holds(0.0, 1e-15));
        assert!(!Relation::equal().holds(f64::NAN, f64::NAN));
        assert!(Check::at_most("le", 1.0, 2.0).pass);
        assert!(!Check::at_most("le", 2.0, 1.0).pass);
        assert!(Check::at_least("ge", 2.0, 1.0).pass);
    }
}

//! Ternary verdicts with re-checkable witnesses.

use serde::Serialize;

use crate::region::Region;
use crate::space::FiniteSpace;
use crate::value::Value;

/// One region of a witness, with the value the checked function gave it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessItem {
    pub role: String,
    pub region: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    #[serde(skip)]
    pub cells: Region,
}

/// A concrete counterexample or supporting family.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Witness {
    pub reason: String,
    pub items: Vec<WitnessItem>,
}

impl Witness {
    pub fn new(reason: impl Into<String>) -> Self {
        Witness {
            reason: reason.into(),
            items: Vec::new(),
        }
    }

    pub fn item(
        mut self,
        space: &FiniteSpace,
        role: impl Into<String>,
        region: Region,
        value: Option<Value>,
    ) -> Self {
        self.items.push(WitnessItem {
            role: role.into(),
            region: space.format_region(region),
            value,
            cells: region,
        });
        self
    }

    /// Regions carrying `role`, in order.
    pub fn regions(&self, role: &str) -> Vec<Region> {
        self.items
            .iter()
            .filter(|i| i.role == role)
            .map(|i| i.cells)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "verdict")]
pub enum Verdict {
    Pass {
        #[serde(skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
    Fail {
        witness: Witness,
    },
    Unknown {
        reason: String,
    },
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict::Pass { note: None }
    }

    pub fn pass_with(note: impl Into<String>) -> Self {
        Verdict::Pass {
            note: Some(note.into()),
        }
    }

    pub fn fail(witness: Witness) -> Self {
        Verdict::Fail { witness }
    }

    pub fn unknown(reason: impl Into<String>) -> Self {
        Verdict::Unknown {
            reason: reason.into(),
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Fail { witness } => Some(witness),
            _ => None,
        }
    }

    /// Short label: `pass`, `fail` or `unknown`.
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass { .. } => "pass",
            Verdict::Fail { .. } => "fail",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

/// A named verdict inside a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

impl Check {
    pub fn new(name: impl Into<String>, verdict: Verdict) -> Self {
        Check {
            name: name.into(),
            verdict,
        }
    }
}

/// Worst verdict of a list: any fail beats any unknown beats pass.
pub fn overall<'a, I: IntoIterator<Item = &'a Verdict>>(verdicts: I) -> &'static str {
    let mut out = "pass";
    for v in verdicts {
        match v {
            Verdict::Fail { .. } => return "fail",
            Verdict::Unknown { .. } => out = "unknown",
            Verdict::Pass { .. } => {}
        }
    }
    out
}

/// Work allowance for one exhaustive check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Budget {
    /// Default allowance when neither a flag nor `TOPOMEASURE_BUDGET` is set.
    pub const DEFAULT: Budget = Budget(20_000_000);

    pub fn from_env() -> Budget {
        std::env::var("TOPOMEASURE_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .map(Budget)
            .unwrap_or(Budget::DEFAULT)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}

/// Decrementing counter shared by the inner loops of one check.
#[derive(Debug)]
pub struct Meter {
    left: u64,
}

impl Meter {
    pub fn new(b: Budget) -> Self {
        Meter { left: b.0 }
    }

    /// Spends `n` units; false once the allowance is gone.
    pub fn spend(&mut self, n: u64) -> bool {
        if self.left < n {
            self.left = 0;
            false
        } else {
            self.left -= n;
            true
        }
    }

    pub fn exhausted(&self) -> bool {
        self.left == 0
    }
}

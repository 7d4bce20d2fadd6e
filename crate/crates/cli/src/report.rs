//! The JSON report. Top-level keys are fixed: `version`, `poly`, `input`,
//! `metrics`, then the optional `tables`, `outcome`, `survey`, `count` and
//! `search` blocks, present only for the commands that fill them.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;
use sha2::{Digest, Sha256};

use sbox_forge::construct::{RepairOutcome, SearchReport};
use sbox_forge::metrics::{DDTable, Summary, WalshTable};
use sbox_forge::powermap::ExponentClass;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub version: &'static str,
    /// field polynomial as lowercase hex, null where no field is involved
    pub poly: Option<String>,
    pub input: Option<InputDigest>,
    pub metrics: Option<Metrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tables: Option<Tables>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<Outcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub survey: Option<SurveyBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<CountBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchBlock>,
}

impl Report {
    pub fn new(poly: Option<u32>) -> Report {
        Report {
            version: env!("CARGO_PKG_VERSION"),
            poly: poly.map(|p| format!("{p:#x}")),
            input: None,
            metrics: None,
            tables: None,
            outcome: None,
            survey: None,
            count: None,
            search: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    /// file path, or the canonical parameter string for generated S-boxes
    pub source: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of_bytes(source: impl Into<String>, bytes: &[u8]) -> InputDigest {
        InputDigest {
            source: source.into(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }

    pub fn of_params(params: String) -> InputDigest {
        let sha256 = hex::encode(Sha256::digest(params.as_bytes()));
        InputDigest {
            source: params,
            sha256,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Metrics {
    pub du: u32,
    pub nl: u32,
    pub degree: u32,
    pub bijective: Option<bool>,
    pub image_size: usize,
    pub fixed_points: usize,
}

impl From<Summary> for Metrics {
    fn from(s: Summary) -> Metrics {
        Metrics {
            du: s.du,
            nl: s.nl,
            degree: s.degree,
            bijective: s.bijective,
            image_size: s.image_size,
            fixed_points: s.fixed_points,
        }
    }
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct Tables {
    /// ddt[a][b]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ddt: Option<Vec<Vec<u32>>>,
    /// walsh[b][a]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walsh: Option<Vec<Vec<i32>>>,
}

impl Tables {
    pub fn from_parts(ddt: Option<&DDTable>, walsh: Option<&WalshTable>) -> Tables {
        Tables {
            ddt: ddt.map(|t| t.rows().map(<[u32]>::to_vec).collect()),
            walsh: walsh.map(|t| t.rows().map(<[i32]>::to_vec).collect()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BaseBlock {
    pub d: u64,
    pub i: u32,
    pub alpha: u16,
    pub beta: u16,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReassignmentEntry {
    pub input: u32,
    pub old: u32,
    pub new: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub strategy: &'static str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proposals: Option<usize>,
    pub base: Option<BaseBlock>,
    pub base_image_size: usize,
    pub reassignments: Vec<ReassignmentEntry>,
}

impl From<&RepairOutcome> for Outcome {
    fn from(o: &RepairOutcome) -> Outcome {
        Outcome {
            strategy: o.strategy.name,
            seed: o.strategy.seed,
            budget: o.strategy.budget,
            proposals: o.strategy.proposals,
            base: o.base.as_ref().map(|p| BaseBlock {
                d: p.d,
                i: p.i,
                alpha: p.alpha.value(),
                beta: p.beta.value(),
                degenerate: p.is_degenerate(),
            }),
            base_image_size: o.base_image_size,
            reassignments: o
                .reassignments
                .iter()
                .map(|r| ReassignmentEntry {
                    input: r.input,
                    old: r.old,
                    new: r.new,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassEntry {
    pub representative: u64,
    pub members: Vec<u64>,
    pub q: u64,
    pub du: u32,
    pub nl: u32,
    pub bijective: bool,
}

impl From<&ExponentClass> for ClassEntry {
    fn from(c: &ExponentClass) -> ClassEntry {
        ClassEntry {
            representative: c.representative,
            members: c.members.clone(),
            q: c.q,
            du: c.du,
            nl: c.nl,
            bijective: c.bijective,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SurveyBlock {
    pub n: u32,
    pub du_max: Option<u32>,
    pub nl_min: Option<u32>,
    /// "any", "bijective" or "non-bijective"
    pub bijectivity: &'static str,
    pub exponents: usize,
    pub classes: Vec<ClassEntry>,
}

/// Exact integers as decimal strings, with three-digit scientific approximations.
#[derive(Debug, Clone, Serialize)]
pub struct CountBlock {
    pub n: u32,
    pub m: u32,
    pub bf: String,
    pub bt: String,
    pub bp: String,
    pub mu: String,
    pub n_mu: String,
    pub approx: BTreeMap<&'static str, String>,
}

/// Three significant digits, e.g. "3.23e616"; small values are printed exactly.
pub fn scientific(v: &BigUint) -> String {
    let digits = v.to_string();
    if digits.len() <= 3 {
        return digits;
    }
    let lead: u32 = digits[..4].parse().expect("decimal digits");
    let mut mantissa = (lead + 5) / 10;
    let mut exp = digits.len() - 1;
    if mantissa >= 1000 {
        mantissa /= 10;
        exp += 1;
    }
    format!("{}.{:02}e{}", mantissa / 100, mantissa % 100, exp)
}

#[derive(Debug, Clone, Serialize)]
pub struct RankedEntry {
    pub rank: usize,
    pub alpha: u16,
    pub beta: u16,
    pub du: u32,
    pub nl: u32,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TargetBlock {
    pub du: u32,
    pub nl: u32,
    /// candidates with du <= target du and nl >= target nl
    pub count: usize,
    pub met: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchBlock {
    pub n: u32,
    pub d: u64,
    pub i: u32,
    pub strategy: &'static str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    pub candidates: usize,
    /// image size of the unrepaired binomial -> count, over β != 0
    pub binomial_image_sizes: BTreeMap<String, usize>,
    pub best: Option<RankedEntry>,
    pub ties_at_best: usize,
    /// up to the first 64 tied pairs in rank order
    pub tied_pairs: Vec<[u16; 2]>,
    pub target: TargetBlock,
    pub strong: TargetBlock,
    pub top: Vec<RankedEntry>,
    pub watched: Vec<RankedEntry>,
}

pub const MAX_LISTED_TIES: usize = 64;

pub fn ranked_entry(rank: usize, o: &RepairOutcome) -> RankedEntry {
    let p = o.base.as_ref().expect("search outcomes carry their parameters");
    RankedEntry {
        rank,
        alpha: p.alpha.value(),
        beta: p.beta.value(),
        du: o.du,
        nl: o.nl,
        degenerate: p.is_degenerate(),
    }
}

pub fn target_block(report: &SearchReport, du: u32, nl: u32) -> TargetBlock {
    let count = report.meeting(du, nl).count();
    TargetBlock {
        du,
        nl,
        count,
        met: count > 0,
    }
}

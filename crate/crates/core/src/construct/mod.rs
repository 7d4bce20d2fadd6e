//! Bijective S-boxes from non-bijective power maps.
//!
//! The pipeline lifts x^d to the binomial α·x^d + β·x^(2^i), which keeps the
//! differential uniformity and nonlinearity of x^d while enlarging the image,
//! then repairs the remaining collisions by reassigning surplus preimages to
//! the missing output values.

mod repair;
mod search;

pub use repair::{repair, Reassignment, RepairOutcome, RepairStrategy, StrategyId, DEFAULT_ANNEAL_BUDGET};
pub use search::{coefficient_search, SearchReport};

use crate::boolfn::VectorialFunction;
use crate::error::{Error, Result};
use crate::gf2n::{FieldElement, FieldSpec};
use crate::metrics;

/// Parameters of α·x^d + β·x^(2^i) over a fixed field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinomialParams {
    pub alpha: FieldElement,
    pub beta: FieldElement,
    pub d: u64,
    pub i: u32,
    pub spec: FieldSpec,
}

impl BinomialParams {
    pub fn new(
        spec: &FieldSpec,
        d: u64,
        i: u32,
        alpha: FieldElement,
        beta: FieldElement,
    ) -> Result<BinomialParams> {
        if alpha.is_zero() {
            return Err(Error::InvalidBinomial(
                "alpha = 0 leaves only the linear term, which has nonlinearity 0".into(),
            ));
        }
        if !spec.contains(alpha) || !spec.contains(beta) {
            return Err(Error::InvalidBinomial(format!(
                "coefficients must be below 2^{}",
                spec.n()
            )));
        }
        if i >= spec.n() {
            return Err(Error::InvalidBinomial(format!(
                "linear exponent index i = {i} must be below n = {}",
                spec.n()
            )));
        }
        Ok(BinomialParams {
            alpha,
            beta,
            d,
            i,
            spec: spec.clone(),
        })
    }

    /// β = 0: the lift is just a scaled power map.
    pub fn is_degenerate(&self) -> bool {
        self.beta.is_zero()
    }

    /// The exponent 2^i of the linear term.
    pub fn linear_exponent(&self) -> u64 {
        1u64 << self.i
    }
}

/// Lookup table of x -> α·x^d + β·x^(2^i).
pub fn binomial_table(p: &BinomialParams) -> VectorialFunction {
    let spec = &p.spec;
    let lin = p.linear_exponent();
    let table = (0..spec.size() as u16)
        .map(|x| {
            spec.mul_raw(p.alpha.value(), spec.pow_raw(x, p.d))
                ^ spec.mul_raw(p.beta.value(), spec.pow_raw(x, lin))
        })
        .collect();
    VectorialFunction::new(spec.n(), spec.n(), table).expect("field values fit n bits")
}

/// Metrics of x^d next to those of its binomial lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvarianceCheck {
    pub du_base: u32,
    pub nl_base: u32,
    pub du_binomial: u32,
    pub nl_binomial: u32,
}

impl InvarianceCheck {
    pub fn holds(&self) -> bool {
        self.du_base == self.du_binomial && self.nl_base == self.nl_binomial
    }
}

pub fn check_binomial_invariance(p: &BinomialParams) -> InvarianceCheck {
    let base = crate::powermap::power_function(&p.spec, p.d);
    let lifted = binomial_table(p);
    InvarianceCheck {
        du_base: metrics::differential_uniformity(&base),
        nl_base: metrics::nonlinearity(&base),
        du_binomial: metrics::differential_uniformity(&lifted),
        nl_binomial: metrics::nonlinearity(&lifted),
    }
}

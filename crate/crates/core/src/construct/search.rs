use std::cmp::Reverse;
use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{binomial_table, repair, BinomialParams, RepairOutcome, RepairStrategy};
use crate::error::{Error, Result};
use crate::gf2n::{FieldElement, FieldSpec};

/// Ranked results of repairing every binomial α·x^d + β·x^(2^i), α != 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    /// sorted by (du, -nl, α, β)
    pub ranked: Vec<RepairOutcome>,
    /// image size of the unrepaired binomial -> number of (α, β) with β != 0
    pub binomial_image_sizes: BTreeMap<usize, usize>,
}

impl SearchReport {
    pub fn best(&self) -> Option<&RepairOutcome> {
        self.ranked.first()
    }

    /// All outcomes sharing the best (du, nl).
    pub fn ties_at_best(&self) -> &[RepairOutcome] {
        let Some(best) = self.best() else {
            return &[];
        };
        let k = self
            .ranked
            .iter()
            .take_while(|o| (o.du, o.nl) == (best.du, best.nl))
            .count();
        &self.ranked[..k]
    }

    /// Outcomes with du <= du_max and nl >= nl_min.
    pub fn meeting(&self, du_max: u32, nl_min: u32) -> impl Iterator<Item = &RepairOutcome> {
        self.ranked
            .iter()
            .filter(move |o| o.du <= du_max && o.nl >= nl_min)
    }
}

/// Seed for one candidate, independent of evaluation order.
fn candidate_seed(seed: u64, alpha: u16, beta: u16) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ ((alpha as u64) << 16 | beta as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Repairs the binomial lift for every α != 0 and every β (β = 0 kept,
/// flagged degenerate via [`BinomialParams::is_degenerate`]).
///
/// The result depends only on the arguments, not on the thread count.
pub fn coefficient_search(
    d: u64,
    i: u32,
    spec: &FieldSpec,
    strategy: RepairStrategy,
    seed: u64,
) -> Result<SearchReport> {
    if i >= spec.n() {
        return Err(Error::InvalidBinomial(format!(
            "linear exponent index i = {i} must be below n = {}",
            spec.n()
        )));
    }
    let size = spec.size() as u16;
    let per_alpha: Vec<Vec<(usize, RepairOutcome)>> = (1..size)
        .into_par_iter()
        .map(|alpha| {
            (0..size)
                .map(|beta| {
                    let p = BinomialParams::new(spec, d, i, FieldElement(alpha), FieldElement(beta))?;
                    let table = binomial_table(&p);
                    let cseed = candidate_seed(seed, alpha, beta);
                    let mut out = match repair(&table, strategy, cseed) {
                        Err(Error::AlreadyBijective) => RepairOutcome::unchanged(table, strategy, cseed),
                        other => other?,
                    };
                    let image = out.base_image_size;
                    out.base = Some(p);
                    Ok((image, out))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut binomial_image_sizes = BTreeMap::new();
    let mut ranked = Vec::with_capacity(per_alpha.iter().map(Vec::len).sum());
    for (image, out) in per_alpha.into_iter().flatten() {
        if !out.base.as_ref().is_some_and(BinomialParams::is_degenerate) {
            *binomial_image_sizes.entry(image).or_insert(0) += 1;
        }
        ranked.push(out);
    }
    ranked.sort_by_key(|o| {
        let p = o.base.as_ref().expect("search outcomes carry their parameters");
        (o.du, Reverse(o.nl), p.alpha, p.beta)
    });
    Ok(SearchReport {
        ranked,
        binomial_image_sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::is_bijective;

    #[test]
    fn toy_search_is_exhaustive_and_bijective() {
        let spec = FieldSpec::new(4, 0x13).unwrap();
        for strategy in [RepairStrategy::Greedy, RepairStrategy::anneal()] {
            let report = coefficient_search(3, 2, &spec, strategy, 5).unwrap();
            assert_eq!(report.ranked.len(), 15 * 16);
            for o in &report.ranked {
                assert_eq!(is_bijective(&o.sbox), Ok(true));
            }
            let keys: Vec<_> = report
                .ranked
                .iter()
                .map(|o| (o.du, Reverse(o.nl)))
                .collect();
            assert!(keys.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(report.binomial_image_sizes.values().sum::<usize>(), 15 * 15);
            assert!(!report.ties_at_best().is_empty());
        }
    }

    #[test]
    fn search_is_deterministic() {
        let spec = FieldSpec::new(5, 0x25).unwrap();
        let a = coefficient_search(3, 1, &spec, RepairStrategy::anneal(), 9).unwrap();
        let b = coefficient_search(3, 1, &spec, RepairStrategy::anneal(), 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_linear_index() {
        let spec = FieldSpec::new(4, 0x13).unwrap();
        assert!(coefficient_search(3, 4, &spec, RepairStrategy::Greedy, 0).is_err());
    }
}

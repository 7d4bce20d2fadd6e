//! Power functions x -> x^d over GF(2^n): cyclotomic cosets, the Gold and
//! Kasami families, and a (DU, NL) survey over all exponents.
//!
//! Because (a·y)^d = a^d·y^d, every DDT row a != 0 of a power map is a
//! relabelling of row 1, and the Walsh rows fall into gcd(2^n-1, d) orbits
//! under output scaling by d-th powers. The survey uses both shortcuts;
//! [`power_profile_generic`] is the plain route used to check them.

use rayon::prelude::*;

use crate::boolfn::{parity, VectorialFunction};
use crate::error::{Error, Result};
use crate::gf2n::FieldSpec;
use crate::metrics;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Orbit of d under doubling mod 2^n - 1, starting at d.
pub fn cyclotomic_coset(d: u64, n: u32) -> Vec<u64> {
    let order = (1u64 << n) - 1;
    let start = d % order;
    let mut out = vec![start];
    let mut cur = (start * 2) % order;
    while cur != start {
        out.push(cur);
        cur = (cur * 2) % order;
    }
    out
}

/// All cyclotomic cosets partitioning {1, ..., 2^n - 2}, ordered by smallest member.
pub fn all_cosets(n: u32) -> Vec<Vec<u64>> {
    let order = (1u64 << n) - 1;
    let mut seen = vec![false; order as usize];
    let mut out = Vec::new();
    for d in 1..order {
        if seen[d as usize] {
            continue;
        }
        let coset = cyclotomic_coset(d, n);
        for &e in &coset {
            seen[e as usize] = true;
        }
        out.push(coset);
    }
    out
}

/// Gold exponents 2^i + 1 with 1 <= i < n and gcd(i, n) = 1, ascending and distinct.
pub fn gold_exponents(n: u32) -> Vec<u64> {
    let order = (1u64 << n) - 1;
    let mut out: Vec<u64> = (1..n)
        .filter(|&i| gcd(i as u64, n as u64) == 1)
        .map(|i| ((1u64 << i) + 1) % order)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Kasami exponents 2^(2i) - 2^i + 1 mod 2^n - 1 with 1 <= i < n and gcd(i, n) = 1.
pub fn kasami_exponents(n: u32) -> Vec<u64> {
    let order = (1u64 << n) - 1;
    let mut out: Vec<u64> = (1..n)
        .filter(|&i| gcd(i as u64, n as u64) == 1)
        .map(|i| ((1u64 << (2 * i)) - (1u64 << i) + 1) % order)
        .filter(|&d| d != 0)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn power_function(spec: &FieldSpec, d: u64) -> VectorialFunction {
    VectorialFunction::new(spec.n(), spec.n(), spec.power_table(d))
        .expect("power table has 2^n entries below 2^n")
}

/// (DU, NL) of x^d from the full DDT and every Walsh row.
pub fn power_profile_generic(spec: &FieldSpec, d: u64) -> (u32, u32) {
    let f = power_function(spec, d);
    (
        metrics::differential_uniformity(&f),
        metrics::nonlinearity(&f),
    )
}

/// Nonzero output masks, one from each orbit of b -> (y -> b·(c y)) with c a d-th power.
fn walsh_orbit_representatives(spec: &FieldSpec, q: u64) -> Vec<u32> {
    let n = spec.n();
    let size = spec.size();
    let order = spec.order() as u64;
    // subgroup of d-th powers = subgroup generated by g^q
    let h_gen = spec.antilog(q as u32);
    let basis: Vec<u16> = (0..n).map(|j| 1u16 << j).collect();
    let mut seen = vec![false; size];
    let mut reps = Vec::new();
    for b in 1..size as u32 {
        if seen[b as usize] {
            continue;
        }
        reps.push(b);
        let mut c = 1u16;
        for _ in 0..order / q {
            let image = basis.iter().enumerate().fold(0u32, |acc, (j, &e)| {
                acc | parity(b & spec.mul_raw(c, e) as u32) << j
            });
            seen[image as usize] = true;
            c = spec.mul_raw(c, h_gen.value());
        }
    }
    reps
}

/// (DU, NL) of x^d using the power-map symmetries: DDT row 1 only, and one
/// Walsh row per orbit of component masks.
pub fn power_profile(spec: &FieldSpec, d: u64) -> (u32, u32) {
    let f = power_function(spec, d);
    let t = f.table();
    let mut row = vec![0u32; spec.size()];
    for x in 0..t.len() {
        row[(t[x] ^ t[x ^ 1]) as usize] += 1;
    }
    let du = row.into_iter().max().unwrap_or(0);

    let q = gcd(spec.order() as u64, d);
    let max_abs = walsh_orbit_representatives(spec, q)
        .into_iter()
        .map(|b| {
            metrics::walsh_row(&f, b)
                .iter()
                .map(|v| v.unsigned_abs())
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0);
    let nl = (1u32 << (spec.n() - 1)).saturating_sub(max_abs / 2);
    (du, nl)
}

/// A cyclotomic coset of exponents together with the shared profile of its power maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentClass {
    /// smallest member
    pub representative: u64,
    /// members ascending
    pub members: Vec<u64>,
    pub q: u64,
    pub du: u32,
    pub nl: u32,
    pub bijective: bool,
}

impl ExponentClass {
    pub fn new(spec: &FieldSpec, d: u64) -> ExponentClass {
        let mut members = cyclotomic_coset(d, spec.n());
        members.sort_unstable();
        let representative = members[0];
        let q = gcd(spec.order() as u64, representative);
        let (du, nl) = power_profile(spec, representative);
        ExponentClass {
            representative,
            members,
            q,
            du,
            nl,
            bijective: q == 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Bijectivity {
    #[default]
    Any,
    BijectiveOnly,
    NonBijectiveOnly,
}

impl Bijectivity {
    fn admits(self, bijective: bool) -> bool {
        match self {
            Bijectivity::Any => true,
            Bijectivity::BijectiveOnly => bijective,
            Bijectivity::NonBijectiveOnly => !bijective,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurveyFilter {
    pub du_max: u32,
    pub nl_min: u32,
    pub bijectivity: Bijectivity,
}

impl SurveyFilter {
    /// Admits every coset.
    pub fn all() -> SurveyFilter {
        SurveyFilter {
            du_max: u32::MAX,
            nl_min: 0,
            bijectivity: Bijectivity::Any,
        }
    }
}

/// One [`ExponentClass`] per coset of {1, ..., 2^n - 2} passing `filter`,
/// sorted by (du, -nl, representative).
pub fn survey(n: u32, spec: &FieldSpec, filter: SurveyFilter) -> Result<Vec<ExponentClass>> {
    if spec.n() != n {
        return Err(Error::FieldMismatch { field: spec.n(), n });
    }
    let mut out: Vec<ExponentClass> = all_cosets(n)
        .into_par_iter()
        .map(|coset| ExponentClass::new(spec, coset[0]))
        .filter(|c| {
            c.du <= filter.du_max && c.nl >= filter.nl_min && filter.bijectivity.admits(c.bijective)
        })
        .collect();
    out.sort_by_key(|c| (c.du, std::cmp::Reverse(c.nl), c.representative));
    Ok(out)
}

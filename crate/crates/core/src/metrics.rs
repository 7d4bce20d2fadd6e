//! Differential and linear profiles of vectorial Boolean functions.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::boolfn::{parity, VectorialFunction};
use crate::error::{Error, Result};

/// Largest n + m for which full DDT or Walsh tables are materialized (2^24 cells).
pub const MAX_TABLE_BITS: u32 = 24;

/// Below this input width the streaming metrics stay sequential.
const PAR_THRESHOLD: u32 = 10;

/// In-place fast Walsh-Hadamard transform; `values.len()` must be a power of two.
pub fn fwht(values: &mut [i32]) {
    let len = values.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for i in block..block + h {
                let u = values[i];
                let v = values[i + h];
                values[i] = u + v;
                values[i + h] = u - v;
            }
        }
        h <<= 1;
    }
}

/// Walsh spectrum of the component b·F: entry a is Σ_x (-1)^(b·F(x) + a·x).
pub fn walsh_row(f: &VectorialFunction, b: u32) -> Vec<i32> {
    let mut row: Vec<i32> = f
        .table()
        .iter()
        .map(|&y| 1 - 2 * parity(b & y as u32) as i32)
        .collect();
    fwht(&mut row);
    row
}

fn check_table_size(f: &VectorialFunction) -> Result<()> {
    if f.n() + f.m() > MAX_TABLE_BITS {
        return Err(Error::TooLarge(f.n() + f.m(), MAX_TABLE_BITS));
    }
    Ok(())
}

/// Differential distribution table, `counts[a][b] = |{x : F(x+a) + F(x) = b}|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DDTable {
    n: u32,
    m: u32,
    counts: Vec<u32>,
}

impl DDTable {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn get(&self, a: u32, b: u32) -> u32 {
        self.counts[((a as usize) << self.m) | b as usize]
    }

    pub fn row(&self, a: u32) -> &[u32] {
        let w = 1usize << self.m;
        &self.counts[a as usize * w..(a as usize + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.counts.chunks(1 << self.m)
    }

    /// Largest entry over a != 0.
    pub fn differential_uniformity(&self) -> u32 {
        self.counts[1 << self.m..].iter().copied().max().unwrap_or(0)
    }
}

fn ddt_row_into(f: &VectorialFunction, a: u32, row: &mut [u32]) {
    row.fill(0);
    let t = f.table();
    for x in 0..t.len() {
        let d = t[x] ^ t[x ^ a as usize];
        row[d as usize] += 1;
    }
}

pub fn ddt(f: &VectorialFunction) -> Result<DDTable> {
    check_table_size(f)?;
    let w = 1usize << f.m();
    let mut counts = vec![0u32; f.len() * w];
    counts
        .par_chunks_mut(w)
        .with_min_len(64)
        .enumerate()
        .for_each(|(a, row)| ddt_row_into(f, a as u32, row));
    Ok(DDTable {
        n: f.n(),
        m: f.m(),
        counts,
    })
}

/// max over a != 0 and all b of the DDT entry, without materializing the table.
pub fn differential_uniformity(f: &VectorialFunction) -> u32 {
    let w = 1usize << f.m();
    let row_max = |a: u32, buf: &mut Vec<u32>| {
        ddt_row_into(f, a, buf);
        buf.iter().copied().max().unwrap_or(0)
    };
    let rows = 1..f.len() as u32;
    if f.n() < PAR_THRESHOLD {
        let mut buf = vec![0u32; w];
        rows.map(|a| row_max(a, &mut buf)).max().unwrap_or(0)
    } else {
        rows.into_par_iter()
            .map_init(|| vec![0u32; w], |buf, a| row_max(a, buf))
            .max()
            .unwrap_or(0)
    }
}

/// Walsh spectra of all components, `values[b][a]`. Row b = 0 is the
/// transform of the all-ones sequence and is ignored by the metrics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalshTable {
    n: u32,
    m: u32,
    values: Vec<i32>,
}

impl WalshTable {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn get(&self, b: u32, a: u32) -> i32 {
        self.values[((b as usize) << self.n) | a as usize]
    }

    pub fn row(&self, b: u32) -> &[i32] {
        let w = 1usize << self.n;
        &self.values[b as usize * w..(b as usize + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i32]> {
        self.values.chunks(1 << self.n)
    }

    /// max |W[b][a]| over b != 0.
    pub fn max_abs(&self) -> u32 {
        self.values[1 << self.n..]
            .iter()
            .map(|v| v.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn nonlinearity(&self) -> u32 {
        (1u32 << (self.n - 1)).saturating_sub(self.max_abs() / 2)
    }
}

pub fn walsh(f: &VectorialFunction) -> Result<WalshTable> {
    check_table_size(f)?;
    let w = f.len();
    let mut values = vec![0i32; w << f.m()];
    values
        .par_chunks_mut(w)
        .with_min_len(64)
        .enumerate()
        .for_each(|(b, row)| {
            for (x, slot) in row.iter_mut().enumerate() {
                *slot = 1 - 2 * parity(b as u32 & f.table()[x] as u32) as i32;
            }
            fwht(row);
        });
    Ok(WalshTable {
        n: f.n(),
        m: f.m(),
        values,
    })
}

/// max |walsh| over nonzero components, streamed row by row.
pub fn max_abs_walsh(f: &VectorialFunction) -> u32 {
    let rows = 1..1u32 << f.m();
    let row_max = |b: u32| {
        walsh_row(f, b)
            .iter()
            .map(|v| v.unsigned_abs())
            .max()
            .unwrap_or(0)
    };
    if f.n() < PAR_THRESHOLD {
        rows.map(row_max).max().unwrap_or(0)
    } else {
        rows.into_par_iter().map(row_max).max().unwrap_or(0)
    }
}

/// 2^(n-1) - max|W|/2, the minimum distance from a nonzero component to an affine function.
pub fn nonlinearity(f: &VectorialFunction) -> u32 {
    if f.n() == 0 {
        return 0;
    }
    (1u32 << (f.n() - 1)).saturating_sub(max_abs_walsh(f) / 2)
}

/// Upper bound on the nonlinearity of an n-variable Boolean function, or of
/// a balanced one when `balanced` is set.
///
/// Unbalanced: 2^(n-1) - 2^(floor(n/2)-1). Balanced, n even: that minus 2.
/// Balanced, n odd: the largest even integer not above the unbalanced value.
pub fn nl_upper_bounds(n: u32, balanced: bool) -> Result<u64> {
    if balanced && n < 3 {
        return Err(Error::BoundUndefined(n));
    }
    if n < 2 {
        return Err(Error::BoundUndefined(n));
    }
    if n > 62 {
        return Err(Error::TooLarge(n, 62));
    }
    let base = (1u64 << (n - 1)) - (1u64 << (n / 2 - 1));
    Ok(match (balanced, n.is_multiple_of(2)) {
        (false, _) => base,
        (true, true) => base - 2,
        (true, false) => base & !1,
    })
}

/// True iff F is a permutation of F_2^n.
pub fn is_bijective(f: &VectorialFunction) -> Result<bool> {
    if f.n() != f.m() {
        return Err(Error::NotSquare { n: f.n(), m: f.m() });
    }
    let mut seen = vec![false; 1 << f.m()];
    for &y in f.table() {
        if std::mem::replace(&mut seen[y as usize], true) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Image and preimage structure of a function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibreProfile {
    pub image_size: usize,
    /// fibre size k -> number of image points with exactly k preimages
    pub multiplicity_histogram: BTreeMap<u32, u32>,
    /// (input, output) for every preimage other than the smallest one of its output
    pub excess: Vec<(u32, u32)>,
}

impl FibreProfile {
    /// Profile of F restricted to `inputs`. Inputs are visited in the given
    /// order, so pass them ascending to make the smallest preimage canonical.
    pub fn of_inputs(f: &VectorialFunction, inputs: impl IntoIterator<Item = u32>) -> FibreProfile {
        let mut fibre = vec![0u32; 1 << f.m()];
        let mut excess = Vec::new();
        for x in inputs {
            let y = f.eval(x);
            if fibre[y as usize] > 0 {
                excess.push((x, y));
            }
            fibre[y as usize] += 1;
        }
        let mut multiplicity_histogram = BTreeMap::new();
        for &k in fibre.iter().filter(|&&k| k > 0) {
            *multiplicity_histogram.entry(k).or_insert(0) += 1;
        }
        FibreProfile {
            image_size: multiplicity_histogram.values().map(|&c| c as usize).sum(),
            multiplicity_histogram,
            excess,
        }
    }

    /// The single fibre size if every image point has the same number of preimages.
    pub fn uniform_multiplicity(&self) -> Option<u32> {
        let mut keys = self.multiplicity_histogram.keys();
        match (keys.next(), keys.next()) {
            (Some(&k), None) => Some(k),
            _ => None,
        }
    }
}

pub fn fibre_profile(f: &VectorialFunction) -> FibreProfile {
    FibreProfile::of_inputs(f, 0..f.len() as u32)
}

/// The headline numbers reported for an S-box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Summary {
    pub du: u32,
    pub nl: u32,
    pub degree: u32,
    /// `None` when n != m
    pub bijective: Option<bool>,
    pub image_size: usize,
    pub fixed_points: usize,
}

pub fn summarize(f: &VectorialFunction) -> Summary {
    Summary {
        du: differential_uniformity(f),
        nl: nonlinearity(f),
        degree: f.algebraic_degree(),
        bijective: is_bijective(f).ok(),
        image_size: fibre_profile(f).image_size,
        fixed_points: f.fixed_points(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_ddt() {
        let id = VectorialFunction::identity(3);
        let t = ddt(&id).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                assert_eq!(t.get(a, b), if a == b { 8 } else { 0 });
            }
        }
        assert_eq!(t.differential_uniformity(), 8);
        assert_eq!(differential_uniformity(&id), 8);
        assert_eq!(nonlinearity(&id), 0);
    }

    #[test]
    fn constant_walsh_rows() {
        let zero = VectorialFunction::from_fn(3, 3, |_| 0).unwrap();
        let w = walsh(&zero).unwrap();
        for b in 1..8 {
            assert_eq!(w.row(b), &[8, 0, 0, 0, 0, 0, 0, 0]);
        }
        assert_eq!(w.nonlinearity(), 0);
    }

    #[test]
    fn bent_component() {
        // x1x2 + x3x4 is bent on 4 variables
        let f = VectorialFunction::from_fn(4, 1, |x| {
            (x >> 3 & x >> 2 & 1) ^ (x >> 1 & x & 1)
        })
        .unwrap();
        let row = walsh_row(&f, 1);
        assert!(row.iter().all(|v| v.abs() == 4));
        assert_eq!(nonlinearity(&f), 6);
        assert_eq!(nl_upper_bounds(4, false).unwrap(), 6);
    }

    #[test]
    fn bounds() {
        assert_eq!(nl_upper_bounds(4, true).unwrap(), 4);
        assert_eq!(nl_upper_bounds(8, true).unwrap(), 118);
        assert_eq!(nl_upper_bounds(8, false).unwrap(), 120);
        assert_eq!(nl_upper_bounds(3, true).unwrap(), 2);
        assert_eq!(nl_upper_bounds(5, true).unwrap(), 14);
        assert_eq!(nl_upper_bounds(2, true), Err(Error::BoundUndefined(2)));
    }

    #[test]
    fn bijectivity() {
        assert!(is_bijective(&VectorialFunction::identity(4)).unwrap());
        let f = VectorialFunction::from_fn(2, 2, |x| x & 1).unwrap();
        assert!(!is_bijective(&f).unwrap());
        let g = VectorialFunction::from_fn(3, 2, |x| x & 3).unwrap();
        assert_eq!(is_bijective(&g), Err(Error::NotSquare { n: 3, m: 2 }));
    }

    #[test]
    fn fibres() {
        let id = VectorialFunction::identity(4);
        let p = fibre_profile(&id);
        assert_eq!(p.image_size, 16);
        assert_eq!(p.uniform_multiplicity(), Some(1));
        assert!(p.excess.is_empty());

        let f = VectorialFunction::new(2, 2, vec![3, 1, 3, 3]).unwrap();
        let p = fibre_profile(&f);
        assert_eq!(p.image_size, 2);
        assert_eq!(p.excess, vec![(2, 3), (3, 3)]);
        assert_eq!(
            p.multiplicity_histogram,
            BTreeMap::from([(1, 1), (3, 1)])
        );
    }

    #[test]
    fn fwht_matches_definition() {
        let f = VectorialFunction::from_fn(5, 5, |x| ((x * 7 + 3) % 32) ^ (x >> 2)).unwrap();
        for b in [1u32, 6, 31] {
            let row = walsh_row(&f, b);
            for a in 0..32u32 {
                let direct: i32 = (0..32u32)
                    .map(|x| if parity(b & f.eval(x) ^ a & x) == 0 { 1 } else { -1 })
                    .sum();
                assert_eq!(row[a as usize], direct);
            }
        }
    }

    #[test]
    fn refuses_oversized_tables() {
        let f = VectorialFunction::from_fn(13, 12, |x| x & 0xFFF).unwrap();
        assert!(matches!(ddt(&f), Err(Error::TooLarge(25, 24))));
        assert!(walsh(&f).is_err());
    }
}

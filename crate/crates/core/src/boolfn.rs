//! Boolean functions and vectorial Boolean functions (S-boxes) as lookup tables.
//!
//! An input vector (x1, ..., xn) is the integer whose most significant bit
//! (bit n-1) is x1. Metrics do not depend on this, but ANF rendering and file
//! formats do.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest supported input or output width.
pub const MAX_BITS: u32 = 16;

#[inline]
pub(crate) fn parity(v: u32) -> u32 {
    v.count_ones() & 1
}

/// In-place binary Möbius transform. It is its own inverse.
fn moebius(values: &mut [u8]) {
    let len = values.len();
    let mut step = 1;
    while step < len {
        for block in (0..len).step_by(2 * step) {
            for x in block..block + step {
                values[x + step] ^= values[x];
            }
        }
        step <<= 1;
    }
}

/// Truth table of f: F_2^n -> F_2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: u32,
    bits: Vec<u8>,
}

impl TruthTable {
    pub fn new(n: u32, bits: Vec<u8>) -> Result<TruthTable> {
        if n > MAX_BITS {
            return Err(Error::TooLarge(n, MAX_BITS));
        }
        if bits.len() != 1 << n {
            return Err(Error::TableLength { len: bits.len(), n });
        }
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::ValueOutOfRange {
                value: b as u32,
                bits: 1,
            });
        }
        Ok(TruthTable { n, bits })
    }

    pub fn from_fn(n: u32, f: impl Fn(u32) -> bool) -> TruthTable {
        assert!(n <= MAX_BITS);
        TruthTable {
            n,
            bits: (0..1u32 << n).map(|x| f(x) as u8).collect(),
        }
    }

    pub fn zero(n: u32) -> TruthTable {
        TruthTable::from_fn(n, |_| false)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn get(&self, x: u32) -> bool {
        self.bits[x as usize] == 1
    }

    /// Size of the support.
    pub fn weight(&self) -> u32 {
        self.bits.iter().map(|&b| b as u32).sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.n > 0 && self.weight() == 1 << (self.n - 1)
    }

    /// Hamming distance to `other`; panics if the arities differ.
    pub fn distance(&self, other: &TruthTable) -> u32 {
        assert_eq!(self.n, other.n);
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count() as u32
    }

    pub fn anf(&self) -> AnfForm {
        let mut coeffs = self.bits.clone();
        moebius(&mut coeffs);
        AnfForm { n: self.n, coeffs }
    }

    /// Largest monomial weight in the ANF; 0 for the zero function.
    pub fn algebraic_degree(&self) -> u32 {
        self.anf().degree()
    }

    pub fn is_affine(&self) -> bool {
        self.algebraic_degree() <= 1
    }
}

/// Algebraic normal form: `coeffs[alpha]` is the coefficient of the monomial
/// whose variables are the set bits of `alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnfForm {
    n: u32,
    coeffs: Vec<u8>,
}

impl AnfForm {
    pub fn new(n: u32, coeffs: Vec<u8>) -> Result<AnfForm> {
        // same shape constraints as a truth table
        let t = TruthTable::new(n, coeffs)?;
        Ok(AnfForm {
            n: t.n,
            coeffs: t.bits,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn degree(&self) -> u32 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 1)
            .map(|(alpha, _)| alpha.count_ones())
            .max()
            .unwrap_or(0)
    }

    pub fn truth_table(&self) -> TruthTable {
        let mut bits = self.coeffs.clone();
        moebius(&mut bits);
        TruthTable { n: self.n, bits }
    }
}

impl fmt::Display for AnfForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (alpha, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if alpha == 0 {
                terms.push("1".to_string());
                continue;
            }
            let vars: Vec<String> = (1..=self.n)
                .filter(|&j| alpha >> (self.n - j) & 1 == 1)
                .map(|j| format!("x{j}"))
                .collect();
            terms.push(vars.join("*"));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", terms.join(" + "))
    }
}

/// Lookup table of F: F_2^n -> F_2^m.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorialFunction {
    n: u32,
    m: u32,
    table: Vec<u16>,
}

impl VectorialFunction {
    pub fn new(n: u32, m: u32, table: Vec<u16>) -> Result<VectorialFunction> {
        if n > MAX_BITS {
            return Err(Error::TooLarge(n, MAX_BITS));
        }
        if m == 0 || m > MAX_BITS {
            return Err(Error::TooLarge(m, MAX_BITS));
        }
        if table.len() != 1 << n {
            return Err(Error::TableLength {
                len: table.len(),
                n,
            });
        }
        if let Some(&v) = table.iter().find(|&&v| (v as u32) >> m != 0) {
            return Err(Error::ValueOutOfRange {
                value: v as u32,
                bits: m,
            });
        }
        Ok(VectorialFunction { n, m, table })
    }

    pub fn from_fn(n: u32, m: u32, f: impl Fn(u32) -> u32) -> Result<VectorialFunction> {
        let table = (0..1u32 << n).map(|x| f(x) as u16).collect();
        VectorialFunction::new(n, m, table)
    }

    pub fn identity(n: u32) -> VectorialFunction {
        VectorialFunction::from_fn(n, n, |x| x).expect("identity is well-formed")
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn table(&self) -> &[u16] {
        &self.table
    }

    pub fn into_table(self) -> Vec<u16> {
        self.table
    }

    #[inline]
    pub fn eval(&self, x: u32) -> u32 {
        self.table[x as usize] as u32
    }

    /// Number of inputs, 2^n.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// The component b·F, x -> parity(b & F(x)).
    pub fn component(&self, b: u32) -> Result<TruthTable> {
        if b == 0 {
            return Err(Error::ZeroComponentMask);
        }
        if b >> self.m != 0 {
            return Err(Error::ValueOutOfRange {
                value: b,
                bits: self.m,
            });
        }
        Ok(TruthTable {
            n: self.n,
            bits: self
                .table
                .iter()
                .map(|&y| parity(b & y as u32) as u8)
                .collect(),
        })
    }

    /// Coordinate function f_i for i in 1..=m, with f_1 the most significant output bit.
    pub fn coordinate(&self, i: u32) -> TruthTable {
        assert!((1..=self.m).contains(&i));
        self.component(1 << (self.m - i)).expect("nonzero mask")
    }

    /// Maximum algebraic degree over the m coordinate functions.
    pub fn algebraic_degree(&self) -> u32 {
        (1..=self.m)
            .map(|i| self.coordinate(i).algebraic_degree())
            .max()
            .unwrap_or(0)
    }

    /// True iff every coordinate function has degree at most 1. Components
    /// are sums of coordinates, so this covers all of them.
    pub fn is_affine(&self) -> bool {
        (1..=self.m).all(|i| self.coordinate(i).is_affine())
    }

    /// Number of x with F(x) = x.
    pub fn fixed_points(&self) -> usize {
        self.table
            .iter()
            .enumerate()
            .filter(|(x, &y)| *x == y as usize)
            .count()
    }
}

fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

/// Exact bounds (mu(n), n*mu(n)) on the number of non-affine n-variable
/// Boolean permutations, mu(n) = (2^n)! - ((2^(n-1))!)^2 * (2^(n+1) - 2).
pub fn nonaffine_permutation_bounds(n: u32) -> (BigUint, BigUint) {
    assert!(n >= 1, "n must be positive");
    let full = factorial(1u64 << n);
    let half = factorial(1u64 << (n - 1));
    let balanced_affine = BigUint::from((1u64 << (n + 1)) - 2);
    let sub = &half * &half * balanced_affine;
    let mu = if full > sub {
        full - sub
    } else {
        BigUint::zero()
    };
    let upper = &mu * BigUint::from(n);
    (mu, upper)
}

/// Sizes of the classes of (n, m) functions, n-variable transformations and
/// n-variable permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSizes {
    pub bf: BigUint,
    pub bt: BigUint,
    pub bp: BigUint,
}

pub fn class_sizes(n: u32, m: u32) -> ClassSizes {
    assert!(n >= 1 && m >= 1, "n and m must be positive");
    let two = BigUint::from(2u32);
    let cells = 1usize << n;
    ClassSizes {
        bf: two.pow((m as usize * cells) as u32),
        bt: two.pow((n as usize * cells) as u32),
        bp: factorial(1u64 << n),
    }
}

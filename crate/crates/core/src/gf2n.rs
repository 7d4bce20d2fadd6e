//! Arithmetic in GF(2^n), 2 <= n <= 16.
//!
//! Elements are polynomial residues stored as bit vectors (bit i is the
//! coefficient of x^i). Multiplication and powering go through discrete-log
//! tables built from the smallest primitive element of the configured
//! polynomial.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field dimension.
pub const MAX_N: u32 = 16;

/// The AES polynomial x^8 + x^4 + x^3 + x + 1.
pub const AES_POLY: u32 = 0x11B;

/// An element of GF(2^n), valid only relative to the [`FieldSpec`] it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u16 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl From<u16> for FieldElement {
    fn from(v: u16) -> Self {
        FieldElement(v)
    }
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;

    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl fmt::LowerHex for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

struct Tables {
    /// log[0] is unused.
    log: Vec<u32>,
    /// exp has length 2 * order so that sums of two logs index it directly.
    exp: Vec<u16>,
    generator: u16,
}

/// Dimension and defining polynomial of GF(2^n), with precomputed log/antilog tables.
///
/// Cloning is cheap; the tables are shared.
#[derive(Clone)]
pub struct FieldSpec {
    n: u32,
    poly: u32,
    tables: Arc<Tables>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("n", &self.n)
            .field("poly", &format_args!("{:#x}", self.poly))
            .field("generator", &self.tables.generator)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.poly == other.poly
    }
}

impl Eq for FieldSpec {}

impl FieldSpec {
    /// Validates `poly` as an irreducible polynomial of degree `n` and builds the tables.
    pub fn new(n: u32, poly: u32) -> Result<FieldSpec> {
        if !(2..=MAX_N).contains(&n) {
            return Err(Error::DimensionOutOfRange(n));
        }
        if poly >> n != 1 {
            return Err(Error::DegreeMismatch { n, poly });
        }
        if !is_irreducible(poly) {
            return Err(Error::Reducible(poly));
        }

        let order = (1u32 << n) - 1;
        let generator = smallest_primitive(n, poly);

        let mut log = vec![0u32; 1 << n];
        let mut exp = vec![0u16; 2 * order as usize];
        let mut acc = 1u32;
        for k in 0..order {
            exp[k as usize] = acc as u16;
            exp[(k + order) as usize] = acc as u16;
            log[acc as usize] = k;
            acc = clmul_reduce(acc, generator as u32, poly);
        }
        debug_assert_eq!(acc, 1);

        Ok(FieldSpec {
            n,
            poly,
            tables: Arc::new(Tables {
                log,
                exp,
                generator,
            }),
        })
    }

    /// GF(2^n) under [`default_poly`].
    pub fn with_default_poly(n: u32) -> Result<FieldSpec> {
        if !(2..=MAX_N).contains(&n) {
            return Err(Error::DimensionOutOfRange(n));
        }
        FieldSpec::new(n, default_poly(n))
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Number of field elements, 2^n.
    #[inline]
    pub fn size(&self) -> usize {
        1 << self.n
    }

    /// Order of the multiplicative group, 2^n - 1.
    #[inline]
    pub fn order(&self) -> u32 {
        (1 << self.n) - 1
    }

    /// The primitive element the log tables are built on.
    pub fn generator(&self) -> FieldElement {
        FieldElement(self.tables.generator)
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        (a.0 as u32) < (1 << self.n)
    }

    /// Element from an integer, rejecting values outside [0, 2^n).
    pub fn element(&self, v: u32) -> Result<FieldElement> {
        if v >> self.n != 0 {
            return Err(Error::ValueOutOfRange {
                value: v,
                bits: self.n,
            });
        }
        Ok(FieldElement(v as u16))
    }

    /// Iterates over all 2^n elements in integer order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.size()).map(|v| FieldElement(v as u16))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.mul_raw(a.0, b.0))
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = &*self.tables;
        t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
    }

    /// x^d with 0^0 = 1 and 0^d = 0 for d > 0.
    #[inline]
    pub fn pow(&self, x: FieldElement, d: u64) -> FieldElement {
        FieldElement(self.pow_raw(x.0, d))
    }

    #[inline]
    pub(crate) fn pow_raw(&self, x: u16, d: u64) -> u16 {
        if d == 0 {
            return 1;
        }
        if x == 0 {
            return 0;
        }
        let t = &*self.tables;
        let order = self.order() as u64;
        let e = (t.log[x as usize] as u64 * (d % order)) % order;
        t.exp[e as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, x: FieldElement) -> Option<FieldElement> {
        if x.is_zero() {
            return None;
        }
        let t = &*self.tables;
        let l = t.log[x.0 as usize];
        Some(FieldElement(t.exp[((self.order() - l) % self.order()) as usize]))
    }

    /// Discrete log base [`generator`](Self::generator); `None` for zero.
    pub fn log(&self, x: FieldElement) -> Option<u32> {
        (!x.is_zero()).then(|| self.tables.log[x.0 as usize])
    }

    /// generator^k.
    pub fn antilog(&self, k: u32) -> FieldElement {
        FieldElement(self.tables.exp[(k % self.order()) as usize])
    }

    /// Lookup table of x -> x^d over the whole field.
    pub fn power_table(&self, d: u64) -> Vec<u16> {
        (0..self.size() as u16).map(|x| self.pow_raw(x, d)).collect()
    }
}

/// Carry-less product of `a` and `b` reduced modulo `poly`.
///
/// Used for table construction, before log tables exist.
pub fn clmul_reduce(a: u32, b: u32, poly: u32) -> u32 {
    let n = 31 - poly.leading_zeros();
    let mut a = a;
    let mut b = b;
    let mut acc = 0u32;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> n & 1 == 1 {
            a ^= poly;
        }
    }
    acc
}

fn poly_degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Irreducibility over GF(2) by trial division with every polynomial of degree 1..=deg/2.
pub fn is_irreducible(poly: u32) -> bool {
    let deg = poly_degree(poly);
    if deg < 1 {
        return false;
    }
    for divisor in 2u32..(1 << (deg / 2 + 1)) {
        if poly_rem(poly, divisor) == 0 {
            return false;
        }
    }
    true
}

/// Default polynomial for GF(2^n): the numerically smallest irreducible of degree n.
///
/// For n = 8 this is the AES polynomial 0x11B.
pub fn default_poly(n: u32) -> u32 {
    ((1u32 << n)..(1u32 << (n + 1)))
        .find(|&p| is_irreducible(p))
        .expect("irreducible polynomials exist in every degree")
}

fn prime_factors(mut m: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

fn slow_pow(mut base: u32, mut e: u32, poly: u32) -> u32 {
    let mut acc = 1u32;
    while e > 0 {
        if e & 1 == 1 {
            acc = clmul_reduce(acc, base, poly);
        }
        base = clmul_reduce(base, base, poly);
        e >>= 1;
    }
    acc
}

fn smallest_primitive(n: u32, poly: u32) -> u16 {
    let order = (1u32 << n) - 1;
    let factors = prime_factors(order);
    // GF(4) and friends: order 3 is prime, but the loop below handles it too.
    (2u32..(1 << n))
        .find(|&g| factors.iter().all(|&p| slow_pow(g, order / p, poly) != 1))
        .map(|g| g as u16)
        .unwrap_or(1)
}

//! Turning a non-bijective S-box into a permutation.
//!
//! For every output value hit k > 1 times, the smallest preimage keeps its
//! value and the other k - 1 preimages ("excess" inputs) are reassigned to
//! the output values missing from the image, each used exactly once.
//!
//! Both strategies keep the DDT and the full Walsh table up to date
//! incrementally. Changing F(x) from u to v moves 2 counts in every DDT row
//! a != 0, and shifts W[b][a] by -2·(-1)^(b·u)·(-1)^(a·x) in exactly the rows
//! b with b·(u + v) = 1. That row set is the only thing that depends on v.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::BinomialParams;
use crate::boolfn::{parity, VectorialFunction};
use crate::error::{Error, Result};
use crate::metrics::{self, fwht};

/// Proposal budget of the hill climber when none is given.
pub const DEFAULT_ANNEAL_BUDGET: usize = 10_000;

/// Repair keeps 2^n x 2^n tables in memory.
const MAX_REPAIR_N: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepairStrategy {
    /// Assign excess inputs in ascending order, each to the unused value that
    /// minimizes (largest touched DDT cell, largest |Walsh| value, number of
    /// Walsh cells at that value, value).
    Greedy,
    /// Greedy, then hill-climb by swapping the values of two reassigned
    /// inputs in a seeded order, accepting strict improvements of
    /// (DU, max |Walsh|, #DDT cells at DU, #Walsh cells at max). Stops after
    /// `budget` proposals or after a full sweep of all swaps without an
    /// accepted move, whichever comes first.
    Anneal { budget: usize },
}

impl RepairStrategy {
    pub fn anneal() -> RepairStrategy {
        RepairStrategy::Anneal {
            budget: DEFAULT_ANNEAL_BUDGET,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RepairStrategy::Greedy => "greedy",
            RepairStrategy::Anneal { .. } => "anneal",
        }
    }
}

impl fmt::Display for RepairStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RepairStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(RepairStrategy::Greedy),
            "anneal" => Ok(RepairStrategy::anneal()),
            other => Err(format!("unknown repair strategy '{other}' (expected greedy or anneal)")),
        }
    }
}

/// Which strategy produced an outcome, and with what randomness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyId {
    pub name: &'static str,
    pub seed: u64,
    /// proposal budget, anneal only
    pub budget: Option<usize>,
    /// proposals actually evaluated, anneal only
    pub proposals: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reassignment {
    pub input: u32,
    pub old: u32,
    pub new: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairOutcome {
    /// always a permutation
    pub sbox: VectorialFunction,
    /// set when the base came from a binomial lift
    pub base: Option<BinomialParams>,
    pub base_image_size: usize,
    /// ascending by input
    pub reassignments: Vec<Reassignment>,
    pub du: u32,
    pub nl: u32,
    pub strategy: StrategyId,
}

impl RepairOutcome {
    /// Outcome for a base that is already a permutation: no reassignments.
    pub fn unchanged(sbox: VectorialFunction, strategy: RepairStrategy, seed: u64) -> RepairOutcome {
        let (budget, proposals) = match strategy {
            RepairStrategy::Greedy => (None, None),
            RepairStrategy::Anneal { budget } => (Some(budget), Some(0)),
        };
        RepairOutcome {
            du: metrics::differential_uniformity(&sbox),
            nl: metrics::nonlinearity(&sbox),
            base_image_size: sbox.len(),
            sbox,
            base: None,
            reassignments: Vec::new(),
            strategy: StrategyId {
                name: strategy.name(),
                seed,
                budget,
                proposals,
            },
        }
    }
}

/// Incrementally maintained DDT and Walsh table of a mutable lookup table.
struct RepairState {
    n: u32,
    size: usize,
    table: Vec<u16>,
    /// DDT, row-major in a
    ddt: Vec<u16>,
    /// number of cells in rows a != 0 holding each count
    ddt_hist: Vec<u32>,
    ddt_top: usize,
    /// Walsh table, row-major in b
    walsh: Vec<i16>,
    row_max: Vec<u16>,
    row_cnt: Vec<u16>,
}

#[inline]
fn sign(v: u32) -> i16 {
    1 - 2 * parity(v) as i16
}

fn row_stats(row: &[i16]) -> (u16, u16) {
    let max = row.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    (max, count_at(row, max))
}

impl RepairState {
    fn new(n: u32, table: Vec<u16>) -> RepairState {
        let size = 1usize << n;
        let mut ddt = vec![0u16; size * size];
        for a in 0..size {
            let row = &mut ddt[a * size..(a + 1) * size];
            for x in 0..size {
                row[(table[x] ^ table[x ^ a]) as usize] += 1;
            }
        }
        let mut ddt_hist = vec![0u32; size + 1];
        for &c in &ddt[size..] {
            ddt_hist[c as usize] += 1;
        }
        let ddt_top = ddt_hist.iter().rposition(|&h| h > 0).unwrap_or(0);

        let mut walsh = vec![0i16; size * size];
        let mut row_max = vec![0u16; size];
        let mut row_cnt = vec![0u16; size];
        let mut buf = vec![0i32; size];
        for b in 0..size {
            for (x, slot) in buf.iter_mut().enumerate() {
                *slot = sign(b as u32 & table[x] as u32) as i32;
            }
            fwht(&mut buf);
            let row = &mut walsh[b * size..(b + 1) * size];
            for (dst, &src) in row.iter_mut().zip(&buf) {
                *dst = src as i16;
            }
            (row_max[b], row_cnt[b]) = row_stats(row);
        }

        RepairState {
            n,
            size,
            table,
            ddt,
            ddt_hist,
            ddt_top,
            walsh,
            row_max,
            row_cnt,
        }
    }

    #[inline]
    fn bump(&mut self, cell: usize, up: bool) {
        let c = self.ddt[cell] as usize;
        self.ddt_hist[c] -= 1;
        let c = if up { c + 2 } else { c - 2 };
        self.ddt_hist[c] += 1;
        self.ddt[cell] = c as u16;
        if c > self.ddt_top {
            self.ddt_top = c;
        }
    }

    /// Sets F(x) = v, updating the DDT only.
    fn set_ddt(&mut self, x: usize, v: u16) {
        let u = self.table[x];
        if u == v {
            return;
        }
        let size = self.size;
        for a in 1..size {
            let w = self.table[x ^ a];
            self.bump(a * size + (u ^ w) as usize, false);
            self.bump(a * size + (v ^ w) as usize, true);
        }
        self.table[x] = v;
    }

    /// (DU, number of cells equal to DU) over rows a != 0.
    fn ddt_key(&mut self) -> (u32, u32) {
        while self.ddt_top > 0 && self.ddt_hist[self.ddt_top] == 0 {
            self.ddt_top -= 1;
        }
        (self.ddt_top as u32, self.ddt_hist[self.ddt_top])
    }

    /// (max |W|, number of cells at it) over rows b != 0.
    fn walsh_key(&self) -> (u32, u32) {
        fold_rows(self.row_max[1..].iter().zip(&self.row_cnt[1..]).map(|(&m, &c)| (m, c)))
    }

    fn nonlinearity(&self) -> u32 {
        (1u32 << (self.n - 1)).saturating_sub(self.walsh_key().0 / 2)
    }
}

fn fold_rows(rows: impl Iterator<Item = (u16, u16)>) -> (u32, u32) {
    let mut max = 0u32;
    let mut cnt = 0u32;
    for (m, c) in rows {
        let m = m as u32;
        if m > max {
            max = m;
            cnt = c as u32;
        } else if m == max {
            cnt += c as u32;
        }
    }
    (max, cnt)
}

/// Outputs of `table` that never occur, ascending.
fn missing_values(table: &[u16], size: usize) -> Vec<u16> {
    let mut hit = vec![false; size];
    for &y in table {
        hit[y as usize] = true;
    }
    (0..size as u16).filter(|&y| !hit[y as usize]).collect()
}

/// `dst = row + delta`, returning max |dst|.
#[inline]
fn shifted_max(dst: &mut [i16], row: &[i16], delta: &[i16]) -> u16 {
    let mut m = 0u16;
    for ((o, &w), &d) in dst.iter_mut().zip(row).zip(delta) {
        let v = w + d;
        *o = v;
        m = m.max(v.unsigned_abs());
    }
    m
}

#[inline]
fn count_at(row: &[i16], max: u16) -> u16 {
    row.iter().filter(|v| v.unsigned_abs() == max).count() as u16
}

#[inline]
fn toggles(b: usize, flip: u16) -> bool {
    parity(b as u32 & flip as u32) == 1
}

fn greedy(state: &mut RepairState, excess: &[u32], missing: &[u16]) -> Vec<Reassignment> {
    const UNKNOWN: u16 = u16::MAX;
    let size = state.size;
    let mut used = vec![false; missing.len()];
    let mut out = Vec::with_capacity(excess.len());
    let mut neighbours = vec![0u16; size];
    // every Walsh row as it would be if toggled by the current reassignment
    let mut toggled = vec![0i16; size * size];
    let mut toggled_max = vec![0u16; size];
    let mut toggled_cnt = vec![UNKNOWN; size];
    let mut plus = vec![0i16; size];
    let mut minus = vec![0i16; size];

    for &x in excess {
        let x = x as usize;
        let u = state.table[x];
        for (a, slot) in neighbours.iter_mut().enumerate() {
            *slot = state.table[x ^ a];
        }
        for a in 0..size {
            let s = sign((a & x) as u32);
            plus[a] = 2 * s;
            minus[a] = -2 * s;
        }
        for b in 1..size {
            let delta = if sign(b as u32 & u as u32) > 0 { &minus } else { &plus };
            toggled_max[b] = shifted_max(
                &mut toggled[b * size..(b + 1) * size],
                &state.walsh[b * size..(b + 1) * size],
                delta,
            );
            toggled_cnt[b] = UNKNOWN;
        }

        let mut best: Option<((u32, u32, u32, u16), usize)> = None;
        for (k, &v) in missing.iter().enumerate() {
            if used[k] {
                continue;
            }
            let mut local = 0u16;
            for (a, &w) in neighbours.iter().enumerate().skip(1) {
                local = local.max(state.ddt[a * size + (v ^ w) as usize]);
            }
            let local = local as u32 + 2;
            if best.is_some_and(|(bk, _)| local > bk.0) {
                continue;
            }
            let flip = u ^ v;
            let wmax = (1..size)
                .map(|b| if toggles(b, flip) { toggled_max[b] } else { state.row_max[b] })
                .max()
                .unwrap_or(0);
            if best.is_some_and(|(bk, _)| (local, wmax as u32) > (bk.0, bk.1)) {
                continue;
            }
            let mut wcnt = 0u32;
            for b in 1..size {
                if toggles(b, flip) {
                    if toggled_max[b] == wmax {
                        if toggled_cnt[b] == UNKNOWN {
                            toggled_cnt[b] = count_at(&toggled[b * size..(b + 1) * size], wmax);
                        }
                        wcnt += toggled_cnt[b] as u32;
                    }
                } else if state.row_max[b] == wmax {
                    wcnt += state.row_cnt[b] as u32;
                }
            }
            let key = (local, wmax as u32, wcnt, v);
            if best.is_none_or(|(bk, _)| key < bk) {
                best = Some((key, k));
            }
        }
        let (_, k) = best.expect("as many missing values as excess inputs");
        assert!(!used[k], "greedy reused output value {}", missing[k]);
        used[k] = true;
        let v = missing[k];

        let flip = u ^ v;
        for b in (1..size).filter(|&b| toggles(b, flip)) {
            let row = &mut state.walsh[b * size..(b + 1) * size];
            row.copy_from_slice(&toggled[b * size..(b + 1) * size]);
            state.row_max[b] = toggled_max[b];
            state.row_cnt[b] = count_at(row, toggled_max[b]);
        }
        state.set_ddt(x, v);
        out.push(Reassignment {
            input: x as u32,
            old: u as u32,
            new: v as u32,
        });
    }
    out
}

/// Effect of a swap on the DDT key, computed without applying it.
enum SwapDdt {
    /// some cell would exceed the current DU
    Worse,
    /// DU unchanged; carries the new number of cells at DU
    Same(u32),
    /// every cell at DU would drop
    Lower,
}

/// Classifies swapping F(x1) = v1 and F(x2) = v2 against the current DDT key.
fn swap_ddt_effect(state: &RepairState, x1: usize, x2: usize, du: u32, at_du: u32) -> SwapDdt {
    let size = state.size;
    let t = &state.table;
    let (v1, v2) = (t[x1], t[x2]);
    let du = du as u16;
    let mut count = at_du as i64;
    for a in 1..size {
        if a == x1 ^ x2 {
            // the pair {x1, x2} keeps its difference
            continue;
        }
        let (w1, w2) = (t[x1 ^ a], t[x2 ^ a]);
        if w1 == w2 {
            continue;
        }
        // pair {x1, x1^a} moves from v1^w1 to v2^w1, pair {x2, x2^a} from
        // v2^w2 to v1^w2; the two moves share both cells or neither
        let row = &state.ddt[a * size..(a + 1) * size];
        let step = if v1 ^ v2 == w1 ^ w2 { 4 } else { 2 };
        let (in1, in2) = (row[(v2 ^ w1) as usize], row[(v1 ^ w2) as usize]);
        if in1 + step > du || in2 + step > du {
            return SwapDdt::Worse;
        }
        let ins = (in1 + step == du) as i64 + (in2 + step == du) as i64;
        let outs = (row[(v1 ^ w1) as usize] == du) as i64 + (row[(v2 ^ w2) as usize] == du) as i64;
        if step == 4 {
            count += ins / 2 - outs / 2;
        } else {
            count += ins - outs;
        }
    }
    if count > 0 {
        SwapDdt::Same(count as u32)
    } else {
        SwapDdt::Lower
    }
}

/// Hill climb over swaps of reassigned values. Returns the number of proposals evaluated.
fn anneal(state: &mut RepairState, inputs: &[u32], budget: usize, seed: u64) -> usize {
    let size = state.size;
    let half = size / 2;
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for (i, &x1) in inputs.iter().enumerate() {
        for &x2 in &inputs[i + 1..] {
            pairs.push((x1, x2));
        }
    }
    if pairs.is_empty() {
        return 0;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ddt_key = state.ddt_key();
    let mut walsh_key = state.walsh_key();
    let mut scratch = vec![0i16; half * size];
    let mut scratch_rows = vec![0usize; half];
    let mut scratch_max = vec![0u16; half];
    let mut plus = vec![0i16; size];
    let mut minus = vec![0i16; size];
    let mut proposals = 0;

    'sweeps: loop {
        pairs.shuffle(&mut rng);
        let mut moved = false;
        for &(x1, x2) in &pairs {
            if proposals == budget {
                break 'sweeps;
            }
            proposals += 1;
            let (x1, x2) = (x1 as usize, x2 as usize);
            let effect = swap_ddt_effect(state, x1, x2, ddt_key.0, ddt_key.1);
            let ceiling = match effect {
                SwapDdt::Worse => continue,
                SwapDdt::Lower => u16::MAX,
                SwapDdt::Same(c) if c > ddt_key.1 => walsh_key.0 as u16 - 1,
                SwapDdt::Same(_) => walsh_key.0 as u16,
            };
            let v1 = state.table[x1];
            let v2 = state.table[x2];

            // W[b][a] moves by (s_b(v2) - s_b(v1)) * (s_a(x1) - s_a(x2)).
            for a in 0..size {
                let d = sign((a & x1) as u32) - sign((a & x2) as u32);
                plus[a] = 2 * d;
                minus[a] = -2 * d;
            }
            let flip = v1 ^ v2;
            let mut t = 0;
            let mut wmax = 0u16;
            let mut over = false;
            for b in 1..size {
                if !toggles(b, flip) {
                    wmax = wmax.max(state.row_max[b]);
                    continue;
                }
                let delta = if sign(b as u32 & v1 as u32) > 0 { &minus } else { &plus };
                let m = shifted_max(
                    &mut scratch[t * size..(t + 1) * size],
                    &state.walsh[b * size..(b + 1) * size],
                    delta,
                );
                scratch_rows[t] = b;
                scratch_max[t] = m;
                wmax = wmax.max(m);
                t += 1;
                if m > ceiling {
                    over = true;
                    break;
                }
            }

            let wmax = wmax as u32;
            let accept = match effect {
                _ if over => false,
                SwapDdt::Worse => unreachable!(),
                SwapDdt::Lower => true,
                SwapDdt::Same(c) => match (wmax, c).cmp(&(walsh_key.0, ddt_key.1)) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => false,
                    std::cmp::Ordering::Equal => {
                        let mut wcnt = 0u32;
                        for b in (1..size).filter(|&b| !toggles(b, flip)) {
                            if state.row_max[b] as u32 == wmax {
                                wcnt += state.row_cnt[b] as u32;
                            }
                        }
                        for k in 0..t {
                            if scratch_max[k] as u32 == wmax {
                                wcnt +=
                                    count_at(&scratch[k * size..(k + 1) * size], wmax as u16) as u32;
                            }
                        }
                        wcnt < walsh_key.1
                    }
                },
            };
            if accept {
                for k in 0..t {
                    let b = scratch_rows[k];
                    let row = &mut state.walsh[b * size..(b + 1) * size];
                    row.copy_from_slice(&scratch[k * size..(k + 1) * size]);
                    state.row_max[b] = scratch_max[k];
                    state.row_cnt[b] = count_at(row, scratch_max[k]);
                }
                state.set_ddt(x1, v2);
                state.set_ddt(x2, v1);
                let new_ddt = state.ddt_key();
                debug_assert!(match effect {
                    SwapDdt::Same(c) => new_ddt == (ddt_key.0, c),
                    _ => new_ddt.0 < ddt_key.0,
                });
                ddt_key = new_ddt;
                walsh_key = state.walsh_key();
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    proposals
}

/// Repairs `base` into a permutation. `seed` only matters for [`RepairStrategy::Anneal`].
pub fn repair(base: &VectorialFunction, strategy: RepairStrategy, seed: u64) -> Result<RepairOutcome> {
    let (n, m) = (base.n(), base.m());
    if n != m {
        return Err(Error::NotSquare { n, m });
    }
    if n > MAX_REPAIR_N {
        return Err(Error::TooLarge(n, MAX_REPAIR_N));
    }
    let profile = metrics::fibre_profile(base);
    if profile.excess.is_empty() {
        return Err(Error::AlreadyBijective);
    }
    let size = base.len();
    let missing = missing_values(base.table(), size);
    debug_assert_eq!(missing.len(), profile.excess.len());
    let excess: Vec<u32> = profile.excess.iter().map(|&(x, _)| x).collect();

    let mut state = RepairState::new(n, base.table().to_vec());
    let mut reassignments = greedy(&mut state, &excess, &missing);

    let (budget, proposals) = match strategy {
        RepairStrategy::Greedy => (None, None),
        RepairStrategy::Anneal { budget } => {
            let used = anneal(&mut state, &excess, budget, seed);
            for r in &mut reassignments {
                r.new = state.table[r.input as usize] as u32;
            }
            (Some(budget), Some(used))
        }
    };

    let du = state.ddt_key().0;
    let nl = state.nonlinearity();
    let sbox = VectorialFunction::new(n, n, state.table).expect("values stay below 2^n");
    debug_assert_eq!(metrics::is_bijective(&sbox), Ok(true));
    debug_assert_eq!(du, metrics::differential_uniformity(&sbox));
    debug_assert_eq!(nl, metrics::nonlinearity(&sbox));

    Ok(RepairOutcome {
        sbox,
        base: None,
        base_image_size: profile.image_size,
        reassignments,
        du,
        nl,
        strategy: StrategyId {
            name: strategy.name(),
            seed,
            budget,
            proposals,
        },
    })
}

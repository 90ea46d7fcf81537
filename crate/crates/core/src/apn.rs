//! APN tests: naive differential uniformity on the truth table, and the
//! projective-line criterion through kernels of the Delta_u systems.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::biproj::{delta_coeffs, BiprojectivePair, ProjPoint};
use crate::error::{Error, Result};
use crate::field::{FieldElement as Fe, ProductElement};
use crate::gf2::rank_u64;

/// Largest n = 2m for which full truth tables are materialized.
pub const MAX_TABLE_N: u32 = 24;

const MAGIC: &[u8; 4] = b"BPTT";
const VERSION: u8 = 1;

/// Values of a map F_2^n -> F_2^n. Entry `x << m | y` holds `f << m | g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    pub n: u32,
    pub poly: u64,
    pub values: Vec<u32>,
}

impl TruthTable {
    pub fn new(n: u32, poly: u64, values: Vec<u32>) -> Result<Self> {
        if n == 0 || n > MAX_TABLE_N || n % 2 == 1 {
            return Err(Error::TooLarge(format!("truth tables need even 0 < n <= {MAX_TABLE_N}, got {n}")));
        }
        if values.len() != 1usize << n {
            return Err(Error::Domain(format!("expected {} values, got {}", 1usize << n, values.len())));
        }
        if let Some(v) = values.iter().find(|&&v| v >> n != 0) {
            return Err(Error::Domain(format!("value {v:#x} wider than {n} bits")));
        }
        Ok(TruthTable { n, poly, values })
    }

    pub fn m(&self) -> u32 {
        self.n / 2
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Binary form: "BPTT", version, n, m, reserved, poly (u64 LE), then the
    /// values little-endian in ceil(n/8) bytes each.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let io = |e: std::io::Error| Error::Io(e.to_string());
        let width = self.n.div_ceil(8) as usize;
        let mut buf = Vec::with_capacity(16 + width * self.values.len());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&[VERSION, self.n as u8, self.m() as u8, 0]);
        buf.extend_from_slice(&self.poly.to_le_bytes());
        for &v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes()[..width]);
        }
        w.write_all(&buf).map_err(io)
    }

    pub fn read_from(mut r: impl Read) -> Result<TruthTable> {
        let io = |e: std::io::Error| Error::Io(e.to_string());
        let mut head = [0u8; 16];
        r.read_exact(&mut head).map_err(io)?;
        if &head[..4] != MAGIC {
            return Err(Error::Parse("bad magic".into()));
        }
        if head[4] != VERSION {
            return Err(Error::Parse(format!("unsupported version {}", head[4])));
        }
        let n = head[5] as u32;
        if head[6] as u32 * 2 != n {
            return Err(Error::Parse("header n and m disagree".into()));
        }
        if n == 0 || n > MAX_TABLE_N || n % 2 == 1 {
            return Err(Error::TooLarge(format!("n = {n}")));
        }
        let poly = u64::from_le_bytes(head[8..16].try_into().unwrap());
        let width = n.div_ceil(8) as usize;
        let mut body = vec![0u8; width << n];
        r.read_exact(&mut body).map_err(io)?;
        let values = body
            .chunks_exact(width)
            .map(|c| {
                let mut b = [0u8; 4];
                b[..width].copy_from_slice(c);
                u32::from_le_bytes(b)
            })
            .collect();
        TruthTable::new(n, poly, values)
    }
}

/// Full evaluation table of a pair.
pub fn to_truth_table(pair: &BiprojectivePair) -> Result<TruthTable> {
    let m = pair.m();
    let n = 2 * m;
    if n > MAX_TABLE_N {
        return Err(Error::TooLarge(format!("n = {n} exceeds {MAX_TABLE_N}")));
    }
    let values = (0..1usize << n)
        .into_par_iter()
        .map(|i| pair.evaluate(ProductElement::from_index(i, m)).index(m) as u32)
        .collect();
    TruthTable::new(n, pair.ctx.poly(), values)
}

/// delta -> number of (a != 0, b) with exactly delta solutions of F(x) + F(x + a) = b.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DifferentialSpectrum(pub BTreeMap<u32, u64>);

impl DifferentialSpectrum {
    pub fn uniformity(&self) -> u32 {
        self.0.keys().copied().max().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }
}

/// Differential uniformity by counting every output difference.
pub fn apn_naive(table: &TruthTable) -> (bool, DifferentialSpectrum) {
    let size = table.len();
    let vals = &table.values;
    let spectrum = (1..size)
        .into_par_iter()
        .fold(
            || (vec![0u32; size], BTreeMap::new()),
            |(mut counts, mut hist): (Vec<u32>, BTreeMap<u32, u64>), a| {
                counts.iter_mut().for_each(|c| *c = 0);
                for x in 0..size {
                    counts[(vals[x] ^ vals[x ^ a]) as usize] += 1;
                }
                for &c in &counts {
                    *hist.entry(c).or_insert(0) += 1;
                }
                (counts, hist)
            },
        )
        .map(|(_, h)| h)
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    let spec = DifferentialSpectrum(spectrum);
    (spec.uniformity() <= 2, spec)
}

/// Precomputed Frobenius images of the basis, so each point of the
/// projective line costs a handful of multiplications and one rank.
struct DeltaKernels<'a> {
    pair: &'a BiprojectivePair,
    basis: Vec<Fe>,
    fq: Vec<Fe>,
    gq: Vec<Fe>,
}

impl<'a> DeltaKernels<'a> {
    fn new(pair: &'a BiprojectivePair) -> Self {
        let ctx = &pair.ctx;
        let basis: Vec<Fe> = (0..pair.m()).map(|i| Fe(1 << i)).collect();
        let fq = basis.iter().map(|&e| ctx.frobenius(e, pair.k as i64)).collect();
        let gq = basis.iter().map(|&e| ctx.frobenius(e, pair.l as i64)).collect();
        DeltaKernels { pair, basis, fq, gq }
    }

    fn kernel_dim(&self, u: ProjPoint) -> usize {
        let ctx = &*self.pair.ctx;
        let m = self.pair.m() as usize;
        let fc = delta_coeffs(ctx, self.pair.k, &self.pair.c0, u);
        let gc = delta_coeffs(ctx, self.pair.l, &self.pair.c1, u);
        let mut cols = [0u64; 64];
        for i in 0..m {
            let e = self.basis[i];
            // y = e_i is basis vector i, x = e_i is basis vector m + i
            let fy = ctx.mul(fc[2], self.fq[i]) + ctx.mul(fc[3], e);
            let gy = ctx.mul(gc[2], self.gq[i]) + ctx.mul(gc[3], e);
            let fx = ctx.mul(fc[0], self.fq[i]) + ctx.mul(fc[1], e);
            let gx = ctx.mul(gc[0], self.gq[i]) + ctx.mul(gc[1], e);
            cols[i] = fy.0 as u64 | ((gy.0 as u64) << m);
            cols[m + i] = fx.0 as u64 | ((gx.0 as u64) << m);
        }
        2 * m - rank_u64(&cols[..2 * m])
    }
}

/// Points u of the projective line whose stacked Delta_u system does not
/// have a one-dimensional kernel.
pub fn projective_failures(pair: &BiprojectivePair) -> Vec<ProjPoint> {
    let dk = DeltaKernels::new(pair);
    ProjPoint::all(&pair.ctx).filter(|&u| dk.kernel_dim(u) != 1).collect()
}

/// APN through the projective-line criterion: every Delta_u kernel has dimension 1.
pub fn apn_projective(pair: &BiprojectivePair) -> bool {
    let dk = DeltaKernels::new(pair);
    ProjPoint::all(&pair.ctx).all(|u| dk.kernel_dim(u) == 1)
}

/// Kernel dimension per point, in the order of `ProjPoint::all`.
pub fn kernel_profile(pair: &BiprojectivePair) -> Vec<usize> {
    let dk = DeltaKernels::new(pair);
    ProjPoint::all(&pair.ctx).map(|u| dk.kernel_dim(u)).collect()
}

/// Naive verdict only, stopping at the first difference hit more than twice.
pub fn apn_naive_verdict(table: &TruthTable) -> bool {
    let size = table.len();
    let vals = &table.values;
    (1..size).into_par_iter().all(|a| {
        let mut seen = vec![0u8; size];
        for x in 0..size {
            let d = (vals[x] ^ vals[x ^ a]) as usize;
            seen[d] += 1;
            if seen[d] > 2 {
                return false;
            }
        }
        true
    })
}

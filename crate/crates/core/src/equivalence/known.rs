//! Explicit witnesses between members of the same family.
//!
//! Each function returns gamma together with the orientation it satisfies,
//! always stated as is_graph_equiv(first, second, gamma).

use std::sync::Arc;

use crate::equivalence::el::{Block, BlockMap, ELMap};
use crate::error::{Error, Result};
use crate::family::FamilyParams;
use crate::field::{FieldCtx, FieldElement as Fe};

const I: Fe = Fe::ONE;

/// is_graph_equiv(F1 at m - k, F1 at k, gamma).
pub fn f1_conjugate(m: u32, k: u32) -> ELMap {
    let kb = m - k;
    ELMap {
        m: BlockMap([Block::Zero, Block::mono(I, kb), Block::mono(I, kb), Block::Zero]),
        n: BlockMap::zero(),
        l: BlockMap::diag(Block::identity(), Block::mono(I, k)),
    }
}

/// is_graph_equiv(F2 at k, F2 at m - k, gamma).
pub fn f2_conjugate(m: u32, k: u32) -> ELMap {
    let rb = (m - (3 * k) % m) % m;
    ELMap {
        m: BlockMap([Block::identity(), Block::identity(), Block::Zero, Block::identity()]),
        n: BlockMap::zero(),
        l: BlockMap::diag(Block::mono(I, m - k), Block::mono(I, rb)),
    }
}

fn f4_parts(params: &FamilyParams) -> Result<(u32, Fe, Fe)> {
    match *params {
        FamilyParams::F4 { k, b, a } => Ok((k, b, a)),
        _ => Err(Error::Domain("expected F4 parameters".into())),
    }
}

/// For F = F4(k, B, a): the parameters F' = F4(m - k, B, B^{Q+1}/a) with
/// Q = 2^{m/2}, and gamma with is_graph_equiv(F', F, gamma).
pub fn f4_conjugate(ctx: &FieldCtx, params: &FamilyParams) -> Result<(FamilyParams, ELMap)> {
    let (k, b, a) = f4_parts(params)?;
    let m = ctx.m();
    let half = m / 2;
    let bq = ctx.frobenius(b, half as i64);
    let a2 = ctx.div(ctx.mul(bq, b), a)?;
    let l4 = ctx.div(a, b)?;
    let gamma = ELMap {
        m: BlockMap::diag(Block::mono(I, m - k), Block::mono(I, m - k)),
        n: BlockMap::zero(),
        l: BlockMap::diag(Block::identity(), Block::mono(l4, half)),
    };
    Ok((FamilyParams::F4 { k: m - k, b, a: a2 }, gamma))
}

/// Moves F4 instances onto a fixed non-cube B0.
pub struct F4Normalizer {
    ctx: Arc<FieldCtx>,
    pub k: u32,
    pub b0: Fe,
    /// some rho with rho^{q+1} = v, indexed by v; zero where none exists
    roots: Vec<Fe>,
}

impl F4Normalizer {
    pub fn new(ctx: &Arc<FieldCtx>, k: u32, b0: Fe) -> Result<Self> {
        if b0.is_zero() || ctx.is_cube(b0)? {
            return Err(Error::Domain("B0 must be a non-cube".into()));
        }
        let q1 = (1u64 << k) + 1;
        let mut roots = vec![Fe::ZERO; ctx.size() as usize];
        for rho in ctx.nonzero() {
            let v = ctx.pow(rho, q1);
            if roots[v.0 as usize].is_zero() {
                roots[v.0 as usize] = rho;
            }
        }
        Ok(F4Normalizer { ctx: ctx.clone(), k, b0, roots })
    }

    /// For F = F4(k, B, a): the value a0 and gamma with
    /// is_graph_equiv(F4(k, B0, a0), F, gamma).
    pub fn normalize(&self, params: &FamilyParams) -> Result<(Fe, ELMap)> {
        let ctx = &*self.ctx;
        let (k, b, a) = f4_parts(params)?;
        if k != self.k {
            return Err(Error::Domain(format!("normalizer built for k = {}, got k = {k}", self.k)));
        }
        let m = ctx.m();
        let r = 1u64 << ((k + m / 2) % m);
        for t in 0..2u32 {
            let target = ctx.div(b, ctx.frobenius(self.b0, t as i64))?;
            let rho = self.roots[target.0 as usize];
            if rho.is_zero() {
                continue;
            }
            let ratio = ctx.mul(ctx.div(a, b)?, ctx.div(rho, ctx.pow(rho, r))?);
            let a0 = ctx.mul(self.b0, ctx.frobenius(ratio, -(t as i64)));
            let gamma = ELMap {
                m: BlockMap::diag(Block::mono(rho, t), Block::mono(I, t)),
                n: BlockMap::zero(),
                l: BlockMap::diag(Block::mono(target, t), Block::mono(ctx.pow(rho, r), t)),
            };
            return Ok((a0, gamma));
        }
        Err(Error::Domain("B is a cube".into()))
    }
}

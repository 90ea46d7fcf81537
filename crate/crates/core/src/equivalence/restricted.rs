//! Search for EL equivalences whose M and L blocks are monomials.
//!
//! M has blocks c_i x^{2^t}. Each output component of G o M is paired with
//! one component of F through a monomial L block d x^{2^{t + s}}, where the
//! shift s is 0 when the exponents agree and k_g when they are negatives of
//! each other. Comparing the four coefficients of each component gives, for a
//! fixed first column (c1, c3) of M, an F_2-linear system in (c2, c4, d1, d2)
//! plus one quadratic check. The first column is scanned projectively since
//! solutions are closed under scaling M by a nonzero constant.

use serde::Serialize;

use crate::biproj::{eval_form, BiprojectivePair, Coeffs};
use crate::equivalence::el::{quadratic_check, Block, BlockMap, ELMap};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement as Fe, ProductElement};
use crate::gf2::solve_columns;

/// Largest m the coefficient solver handles (6m equation bits in a u128).
pub const MAX_SOLVER_M: u32 = 21;

/// Kernel dimension above which a solution space is not enumerated.
const MAX_KERNEL_DIM: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Justification {
    /// No pairing of the exponents is possible.
    ExponentFilter,
    /// Exponents pair up but the coefficient equations have no solution.
    CoefficientObstruction,
}

impl Justification {
    pub fn name(self) -> &'static str {
        match self {
            Justification::ExponentFilter => "exponent-filter",
            Justification::CoefficientObstruction => "coefficient-obstruction",
        }
    }
}

/// A solution of the coefficient equations with its assembled map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub t: u32,
    pub anti: bool,
    pub shifts: [u32; 2],
    pub c: Coeffs,
    pub d: [Fe; 2],
    pub gamma: ELMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RestrictedOutcome {
    Equivalent(Box<Witness>),
    NotFound(Justification),
}

impl RestrictedOutcome {
    pub fn witness(&self) -> Option<&ELMap> {
        match self {
            RestrictedOutcome::Equivalent(w) => Some(&w.gamma),
            RestrictedOutcome::NotFound(_) => None,
        }
    }
}

/// Exponent conditions on the first argument: k, l != m/2 and k != +-l mod m.
pub fn check_preconditions(f: &BiprojectivePair) -> Result<()> {
    let m = f.m();
    let (k, l) = (f.k, f.l);
    if m % 2 == 0 && (k == m / 2 || l == m / 2) {
        return Err(Error::PreconditionViolated(format!("an exponent equals m/2 (k = {k}, l = {l}, m = {m})")));
    }
    if k == l || (k + l) % m == 0 {
        return Err(Error::PreconditionViolated(format!("k = +-l mod m (k = {k}, l = {l}, m = {m})")));
    }
    Ok(())
}

/// Which parts of the search space to visit.
#[derive(Clone, Debug)]
pub struct SearchSpace {
    pub ts: Vec<u32>,
    pub allow_anti: bool,
    pub shift_zero_only: bool,
    pub first_only: bool,
}

impl SearchSpace {
    pub fn full(m: u32) -> Self {
        SearchSpace { ts: (0..m).collect(), allow_anti: true, shift_zero_only: false, first_only: true }
    }

    /// Maps commuting with the Z subgroup: t = 0, diagonal L, no shift.
    pub fn centralizer() -> Self {
        SearchSpace { ts: vec![0], allow_anti: false, shift_zero_only: true, first_only: false }
    }
}

struct Component {
    g: Coeffs,
    kg: u32,
    target: Coeffs,
    off: usize,
}

fn shifts_for(m: u32, kf: u32, kg: u32) -> Vec<u32> {
    let mut out = Vec::new();
    if kf == kg {
        out.push(0);
    }
    if (kf + kg) % m == 0 && !out.contains(&kg) {
        out.push(kg);
    }
    out
}

/// (a, b, c, d) -> (a, c, b, d) with every entry raised to 2^s; identity for s = 0.
fn shifted_form(ctx: &FieldCtx, c: &Coeffs, s: u32) -> Coeffs {
    if s == 0 {
        *c
    } else {
        let fr = |v: Fe| ctx.frobenius(v, s as i64);
        [fr(c[0]), fr(c[2]), fr(c[1]), fr(c[3])]
    }
}

#[inline]
fn put(v: Fe, off: usize) -> u128 {
    (v.0 as u128) << off
}

/// Branch/shift combinations compatible with the exponents, in search order.
fn combinations(f: &BiprojectivePair, g: &BiprojectivePair, space: &SearchSpace) -> Vec<(bool, [u32; 2])> {
    let m = f.m();
    let fk = [f.k, f.l];
    let gk = [g.k, g.l];
    let mut out = Vec::new();
    for anti in [false, true] {
        if anti && !space.allow_anti {
            continue;
        }
        let s0 = shifts_for(m, fk[anti as usize], gk[0]);
        let s1 = shifts_for(m, fk[1 - anti as usize], gk[1]);
        for &a in &s0 {
            for &b in &s1 {
                if space.shift_zero_only && (a != 0 || b != 0) {
                    continue;
                }
                out.push((anti, [a, b]));
            }
        }
    }
    out
}

/// Every solution in the given part of the search space (or the first one).
pub fn restricted_solutions(f: &BiprojectivePair, g: &BiprojectivePair, space: &SearchSpace) -> Result<Vec<Witness>> {
    if f.ctx != g.ctx {
        return Err(Error::ContextMismatch);
    }
    let ctx = &*f.ctx;
    let m = ctx.m();
    if m > MAX_SOLVER_M {
        return Err(Error::UnsupportedM(format!("the coefficient solver handles m <= {MAX_SOLVER_M}")));
    }
    let mu = m as usize;
    let combos = combinations(f, g, space);
    let basis: Vec<Fe> = (0..m).map(|i| Fe(1 << i)).collect();
    let mut found = Vec::new();
    for &t in &space.ts {
        let ft = f.frobenius_twist(t as i64);
        let fcs = [ft.c0, ft.c1];
        for &(anti, shifts) in &combos {
            let mut comps = Vec::with_capacity(2);
            let mut off = 0usize;
            for i in 0..2 {
                let j = if anti { 1 - i } else { i };
                let kg = [g.k, g.l][i];
                let target = shifted_form(ctx, &fcs[j], shifts[i]);
                comps.push(Component { g: [g.c0, g.c1][i], kg, target, off });
                off += if kg == 0 { mu } else { 3 * mu };
            }
            let frob_basis: Vec<Vec<Fe>> =
                comps.iter().map(|c| basis.iter().map(|&e| ctx.frobenius(e, c.kg as i64)).collect()).collect();
            let firsts = ctx.elements().map(|c3| (Fe::ONE, c3)).chain(std::iter::once((Fe::ZERO, Fe::ONE)));
            for (c1, c3) in firsts {
                // unknown bits: d2 | d1 | c4 | c2, low to high
                let mut cols = vec![0u128; 4 * mu];
                let mut rhs = 0u128;
                for (ci, comp) in comps.iter().enumerate() {
                    let [a, b, c, d] = comp.g;
                    let o = comp.off;
                    let dvar = if ci == 0 { mu } else { 0 };
                    if comp.kg == 0 {
                        let bc = b + c;
                        let tb = comp.target[1] + comp.target[2];
                        for (bit, &e) in basis.iter().enumerate() {
                            cols[3 * mu + bit] ^= put(ctx.mul(bc, ctx.mul(c3, e)), o);
                            cols[2 * mu + bit] ^= put(ctx.mul(bc, ctx.mul(c1, e)), o);
                            cols[dvar + bit] ^= put(ctx.mul(tb, e), o);
                        }
                    } else {
                        let c1q = ctx.frobenius(c1, comp.kg as i64);
                        let c3q = ctx.frobenius(c3, comp.kg as i64);
                        let c2_e2 = ctx.mul(a, c1q) + ctx.mul(c, c3q);
                        let c2_e3 = ctx.mul(a, c1) + ctx.mul(b, c3);
                        let c4_e2 = ctx.mul(b, c1q) + ctx.mul(d, c3q);
                        let c4_e3 = ctx.mul(c, c1) + ctx.mul(d, c3);
                        for (bit, &e) in basis.iter().enumerate() {
                            let eq = frob_basis[ci][bit];
                            cols[3 * mu + bit] ^= put(ctx.mul(c2_e2, e), o + mu) | put(ctx.mul(c2_e3, eq), o + 2 * mu);
                            cols[2 * mu + bit] ^= put(ctx.mul(c4_e2, e), o + mu) | put(ctx.mul(c4_e3, eq), o + 2 * mu);
                            cols[dvar + bit] ^= put(ctx.mul(comp.target[0], e), o)
                                | put(ctx.mul(comp.target[1], e), o + mu)
                                | put(ctx.mul(comp.target[2], e), o + 2 * mu);
                        }
                        rhs |= put(eval_form(ctx, comp.kg, &comp.g, c1, c3), o);
                    }
                }
                let Some(sol) = solve_columns(&cols, rhs) else { continue };
                if sol.dim() > MAX_KERNEL_DIM {
                    return Err(Error::SearchFailed(format!("solution space of dimension {} is too large", sol.dim())));
                }
                let mask = (1u128 << mu) - 1;
                for z in sol.enumerate() {
                    let part = |i: usize| Fe(((z >> (i * mu)) & mask) as u32);
                    let (d2, d1, c4, c2) = (part(0), part(1), part(2), part(3));
                    if d1.is_zero() || d2.is_zero() || (ctx.mul(c1, c4) + ctx.mul(c2, c3)).is_zero() {
                        continue;
                    }
                    let ds = [d1, d2];
                    let quartic_ok = comps.iter().zip(ds).all(|(comp, di)| {
                        comp.kg == 0 || eval_form(ctx, comp.kg, &comp.g, c2, c4) == ctx.mul(di, comp.target[3])
                    });
                    if !quartic_ok {
                        continue;
                    }
                    let c = [c1, c2, c3, c4];
                    let gamma = assemble(f, g, t, anti, shifts, c, ds);
                    if !quadratic_check(f, g, &gamma) {
                        debug_assert!(false, "coefficient solution failed verification");
                        continue;
                    }
                    found.push(Witness { t, anti, shifts, c, d: ds, gamma });
                    if space.first_only {
                        return Ok(found);
                    }
                }
            }
        }
    }
    Ok(found)
}

/// Builds gamma from a solution, with N read off the basis vectors.
pub(crate) fn assemble(f: &BiprojectivePair, g: &BiprojectivePair, t: u32, anti: bool, shifts: [u32; 2], c: Coeffs, d: [Fe; 2]) -> ELMap {
    let ctx = &*f.ctx;
    let m = ctx.m();
    let mm = BlockMap::monomials(c, t);
    let b0 = Block::mono(d[0], (t + shifts[0]) % m);
    let b1 = Block::mono(d[1], (t + shifts[1]) % m);
    let l = if anti { BlockMap::anti(b0, b1) } else { BlockMap::diag(b0, b1) };
    let cols: Vec<u64> = (0..2 * m)
        .map(|j| {
            let u = ProductElement::from_index(1usize << j, m);
            let lhs = g.evaluate(mm.apply(ctx, u));
            let rhs = l.apply(ctx, f.evaluate(u));
            lhs.add(rhs).index(m) as u64
        })
        .collect();
    let n = if cols.iter().all(|&c| c == 0) { BlockMap::zero() } else { BlockMap::from_columns(ctx, &cols) };
    ELMap { m: mm, n, l }
}

/// Whether any branch pairs the exponents of F with those of G.
pub fn exponents_compatible(f: &BiprojectivePair, g: &BiprojectivePair) -> bool {
    !combinations(f, g, &SearchSpace::full(f.m())).is_empty()
}

/// Searches the whole monomial space without checking preconditions.
pub fn search_equivalence(f: &BiprojectivePair, g: &BiprojectivePair) -> Result<RestrictedOutcome> {
    if !exponents_compatible(f, g) {
        return Ok(RestrictedOutcome::NotFound(Justification::ExponentFilter));
    }
    let mut sols = restricted_solutions(f, g, &SearchSpace::full(f.m()))?;
    Ok(match sols.pop() {
        Some(w) => RestrictedOutcome::Equivalent(Box::new(w)),
        None => RestrictedOutcome::NotFound(Justification::CoefficientObstruction),
    })
}

/// The restricted search, refusing pairs whose first argument violates the
/// exponent preconditions of the reduction.
pub fn restricted_equiv(f: &BiprojectivePair, g: &BiprojectivePair) -> Result<RestrictedOutcome> {
    check_preconditions(f)?;
    search_equivalence(f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::el::is_graph_equiv;
    use crate::family::{make_family, FamilyParams};
    use crate::field::FieldCtx;

    #[test]
    fn self_equivalence_is_identity() {
        let ctx = FieldCtx::new(5).unwrap();
        let f = make_family(&ctx, FamilyParams::F1 { k: 1 }).unwrap().pair;
        let out = restricted_equiv(&f, &f).unwrap();
        let w = match out {
            RestrictedOutcome::Equivalent(w) => w,
            _ => panic!("no witness"),
        };
        assert_eq!(w.gamma, ELMap::identity());
    }

    #[test]
    fn f1_exponent_filter() {
        let ctx = FieldCtx::new(5).unwrap();
        let f = make_family(&ctx, FamilyParams::F1 { k: 1 }).unwrap().pair;
        let c = crate::family::first_instance(&ctx, crate::family::FamilyTag::Carlet).unwrap().pair;
        assert_eq!(restricted_equiv(&f, &c).unwrap(), RestrictedOutcome::NotFound(Justification::ExponentFilter));
        // q and its conjugate are equivalent
        let h = make_family(&ctx, FamilyParams::F1 { k: 4 }).unwrap().pair;
        let out = restricted_equiv(&f, &h).unwrap();
        assert!(is_graph_equiv(&f, &h, out.witness().unwrap()).unwrap());
    }

    #[test]
    fn preconditions() {
        let ctx = FieldCtx::new(5).unwrap();
        let gold = make_family(&ctx, FamilyParams::Gold { k: 1, a: Fe::ZERO }).unwrap().pair;
        assert!(matches!(restricted_equiv(&gold, &gold), Err(Error::PreconditionViolated(_))));
        let ctx4 = FieldCtx::new(4).unwrap();
        let t = BiprojectivePair::new(ctx4, 1, 2, [Fe(1); 4], [Fe(1); 4]).unwrap();
        assert!(check_preconditions(&t).is_err());
    }
}

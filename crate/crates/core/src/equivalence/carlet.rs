//! Carlet-type pairs [xy, (1, b, c, d)_q]: orbit merging under the
//! projective action, and the link to Zhou-Pott pairs for even m.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use crate::biproj::{substitute, BiprojectivePair, Coeffs};
use crate::equivalence::el::{is_graph_equiv, Block, BlockMap, ELMap};
use crate::equivalence::gaction::{det, mat_mul};
use crate::equivalence::restricted::{search_equivalence, RestrictedOutcome};
use crate::error::{Error, Result};
use crate::family::{make_family, FamilyInstance, FamilyParams};
use crate::field::{FieldCtx, FieldElement as Fe};

const I: Fe = Fe::ONE;
const O: Fe = Fe::ZERO;

/// (1, b, c, d) obtained from p o C by scaling the leading coefficient to 1.
pub fn normalized_substitute(ctx: &FieldCtx, k: u32, p: &Coeffs, c: &Coeffs) -> Result<Coeffs> {
    let s = substitute(ctx, k, p, c);
    let lead = ctx.inv(s[0]).map_err(|_| Error::Domain("substituted form has a vanishing leading coefficient".into()))?;
    Ok(s.map(|v| ctx.mul(lead, v)))
}

/// EL map gamma with is_graph_equiv(Carlet(p), Carlet(base), gamma), where
/// p is base o C normalised; returns p together with gamma.
pub fn orbit_witness(ctx: &FieldCtx, k: u32, base: &Coeffs, c: &Coeffs) -> Result<(Coeffs, ELMap)> {
    let dt = det(ctx, c);
    if dt.is_zero() {
        return Err(Error::Domain("singular matrix".into()));
    }
    let s = substitute(ctx, k, base, c);
    let lead_inv = ctx.inv(s[0]).map_err(|_| Error::Domain("base polynomial has a root".into()))?;
    let p = s.map(|v| ctx.mul(lead_inv, v));
    let [c1, c2, c3, c4] = *c;
    let gamma = ELMap {
        m: BlockMap::monomials(*c, 0),
        n: BlockMap([Block::mono(ctx.mul(c1, c3), 1), Block::mono(ctx.mul(c2, c4), 1), Block::Zero, Block::Zero]),
        l: BlockMap::diag(Block::mono(dt, 0), Block::mono(s[0], 0)),
    };
    Ok((p, gamma))
}

/// One orbit: the base polynomial's index and, for each member index, the
/// matrix carrying the base onto it.
#[derive(Clone, Debug)]
pub struct CarletOrbit {
    pub base: usize,
    pub members: Vec<(usize, Coeffs)>,
}

/// Partitions normalised rootless forms (1, b, c, d)_q into orbits of the
/// projective action. `forms` must all have leading coefficient 1; orbits are
/// traversed in full even where they leave the supplied list.
pub fn carlet_orbits(ctx: &FieldCtx, k: u32, forms: &[Coeffs]) -> Result<Vec<CarletOrbit>> {
    let g = ctx.generator();
    let gens: [Coeffs; 3] = [[I, I, O, I], [I, O, I, I], [g, O, O, I]];
    let index: HashMap<Coeffs, usize> = forms.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut seen: HashSet<Coeffs> = HashSet::new();
    let mut out = Vec::new();
    for (start, &base) in forms.iter().enumerate() {
        if !seen.insert(base) {
            continue;
        }
        let ident = [I, O, O, I];
        let mut members = vec![(start, ident)];
        let mut queue = VecDeque::from([(base, ident)]);
        while let Some((p, cp)) = queue.pop_front() {
            for gen in &gens {
                let q = normalized_substitute(ctx, k, &p, gen)?;
                if seen.insert(q) {
                    let ct = mat_mul(ctx, &cp, gen);
                    if let Some(&j) = index.get(&q) {
                        members.push((j, ct));
                    }
                    queue.push_back((q, ct));
                }
            }
        }
        out.push(CarletOrbit { base: start, members });
    }
    Ok(out)
}

/// Least non-cube of the field, or None when every element is a cube.
pub fn least_noncube(ctx: &FieldCtx) -> Option<Fe> {
    ctx.nonzero().find(|&u| !ctx.is_cube(u).unwrap_or(true))
}

/// For even m: a Zhou-Pott pair (k, j = 0, d = least non-cube) and an EL map
/// gamma with is_graph_equiv(zp, carlet, gamma).
pub fn carlet_to_zp(carlet: &FamilyInstance) -> Result<(FamilyInstance, ELMap)> {
    let ctx: &Arc<FieldCtx> = &carlet.pair.ctx;
    let FamilyParams::Carlet { k, .. } = carlet.params else {
        return Err(Error::Domain("expected a Carlet instance".into()));
    };
    if ctx.m() % 2 == 1 {
        return Err(Error::UnsupportedM("the Zhou-Pott link needs even m".into()));
    }
    let u = least_noncube(ctx).ok_or_else(|| Error::SearchFailed("no non-cube in the field".into()))?;
    let zp = make_family(ctx, FamilyParams::ZhouPott { k, j: 0, d: u })?;
    match search_equivalence(&zp.pair, &carlet.pair)? {
        RestrictedOutcome::Equivalent(w) if is_graph_equiv(&zp.pair, &carlet.pair, &w.gamma)? => Ok((zp, w.gamma)),
        _ => Err(Error::SearchFailed(format!("no monomial map from {} to {}", zp.params, carlet.params))),
    }
}

/// Carlet pair of the normalised form p.
pub fn carlet_pair(ctx: &Arc<FieldCtx>, k: u32, p: &Coeffs) -> Result<BiprojectivePair> {
    BiprojectivePair::new(ctx.clone(), 0, k, [O, I, O, O], *p)
}

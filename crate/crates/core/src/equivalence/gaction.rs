//! The group M^x x GL(2, M) acting on q-projective polynomials by
//! f -> a f(c1 x + c2 y, c3 x + c4 y).

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;

use crate::biproj::{substitute, Coeffs, ProjectivePolynomial};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement as Fe};

/// Largest m for which GL(2, M) is enumerated.
pub const MAX_ORBIT_M: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GGroupElement {
    pub a: Fe,
    /// [c1, c2, c3, c4]: (x, y) -> (c1 x + c2 y, c3 x + c4 y)
    pub mat: Coeffs,
}

pub fn det(ctx: &FieldCtx, c: &Coeffs) -> Fe {
    ctx.mul(c[0], c[3]) + ctx.mul(c[1], c[2])
}

/// Product of 2x2 matrices, row-major.
pub fn mat_mul(ctx: &FieldCtx, a: &Coeffs, b: &Coeffs) -> Coeffs {
    [
        ctx.mul(a[0], b[0]) + ctx.mul(a[1], b[2]),
        ctx.mul(a[0], b[1]) + ctx.mul(a[1], b[3]),
        ctx.mul(a[2], b[0]) + ctx.mul(a[3], b[2]),
        ctx.mul(a[2], b[1]) + ctx.mul(a[3], b[3]),
    ]
}

pub fn mat_inv(ctx: &FieldCtx, c: &Coeffs) -> Result<Coeffs> {
    let di = ctx.inv(det(ctx, c)).map_err(|_| Error::Domain("singular matrix".into()))?;
    Ok([ctx.mul(di, c[3]), ctx.mul(di, c[1]), ctx.mul(di, c[2]), ctx.mul(di, c[0])])
}

impl GGroupElement {
    pub fn new(ctx: &FieldCtx, a: Fe, mat: Coeffs) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::Domain("the scalar must be nonzero".into()));
        }
        if det(ctx, &mat).is_zero() {
            return Err(Error::Domain("singular matrix".into()));
        }
        Ok(GGroupElement { a, mat })
    }

    pub fn identity() -> Self {
        GGroupElement { a: Fe::ONE, mat: [Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ONE] }
    }

    /// The element acting as `self` after `other`.
    pub fn compose(&self, ctx: &FieldCtx, other: &GGroupElement) -> GGroupElement {
        GGroupElement { a: ctx.mul(self.a, other.a), mat: mat_mul(ctx, &other.mat, &self.mat) }
    }

    pub fn act(&self, ctx: &FieldCtx, k: u32, p: &Coeffs) -> Coeffs {
        substitute(ctx, k, p, &self.mat).map(|v| ctx.mul(self.a, v))
    }
}

pub fn g_action(g: &GGroupElement, f: &ProjectivePolynomial) -> Result<ProjectivePolynomial> {
    let ctx = &f.ctx;
    if g.a.is_zero() || det(ctx, &g.mat).is_zero() {
        return Err(Error::Domain("group element is not invertible".into()));
    }
    Ok(ProjectivePolynomial { ctx: ctx.clone(), k: f.k, p: g.act(ctx, f.k, &f.p) })
}

/// |GL(2, 2^m)|
pub fn gl2_order(m: u32) -> u64 {
    let s = 1u64 << m;
    (s * s - 1) * (s * s - s)
}

/// |M^x x GL(2, M)|
pub fn group_order(m: u32) -> u64 {
    ((1u64 << m) - 1) * gl2_order(m)
}

/// Orbit and stabilizer sizes by running over GL(2, M): (a, C) fixes f iff
/// f o C = a^{-1} f, so each matrix contributes at most one stabilizer element.
pub fn orbit_and_stabilizer(f: &ProjectivePolynomial) -> Result<(u64, u64)> {
    let ctx = &*f.ctx;
    let m = ctx.m();
    if m > MAX_ORBIT_M {
        return Err(Error::TooLarge(format!("orbit enumeration needs m <= {MAX_ORBIT_M}")));
    }
    if f.p[0].is_zero() || !f.rootless_check()? {
        return Err(Error::Domain("orbit computation needs a rootless polynomial with p1 != 0".into()));
    }
    let p = f.p;
    let p0_inv = ctx.inv_nonzero(p[0]);
    let size = ctx.size() as u32;
    let stab: u64 = (1..size * size)
        .into_par_iter()
        .map(|col| {
            let (c1, c3) = (Fe(col / size), Fe(col % size));
            let mut n = 0u64;
            for c2 in ctx.elements() {
                for c4 in ctx.elements() {
                    let mat = [c1, c2, c3, c4];
                    if det(ctx, &mat).is_zero() {
                        continue;
                    }
                    let s = substitute(ctx, f.k, &p, &mat);
                    let lam = ctx.mul(s[0], p0_inv);
                    if !lam.is_zero() && (0..4).all(|i| s[i] == ctx.mul(lam, p[i])) {
                        n += 1;
                    }
                }
            }
            n
        })
        .sum();
    Ok((group_order(m) / stab, stab))
}

/// Generators of the group: a primitive scalar, two elementary matrices,
/// and diag(primitive, 1).
pub fn generators(ctx: &FieldCtx) -> Vec<GGroupElement> {
    let (o, i, g) = (Fe::ZERO, Fe::ONE, ctx.generator());
    vec![
        GGroupElement { a: g, mat: [i, o, o, i] },
        GGroupElement { a: i, mat: [i, i, o, i] },
        GGroupElement { a: i, mat: [i, o, i, i] },
        GGroupElement { a: i, mat: [g, o, o, i] },
    ]
}

/// Orbit size by breadth-first search over the generators.
pub fn orbit_bfs(f: &ProjectivePolynomial) -> usize {
    let ctx = &*f.ctx;
    let gens = generators(ctx);
    let mut seen: HashSet<Coeffs> = HashSet::from([f.p]);
    let mut queue = VecDeque::from([f.p]);
    while let Some(p) = queue.pop_front() {
        for g in &gens {
            let q = g.act(ctx, f.k, &p);
            if seen.insert(q) {
                queue.push_back(q);
            }
        }
    }
    seen.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biproj::eval_form;
    use crate::field::FieldCtx;

    fn smallest_rootless(ctx: &std::sync::Arc<FieldCtx>, k: u32, shape: [Option<Fe>; 4]) -> ProjectivePolynomial {
        let u = ctx
            .elements()
            .find(|&u| {
                let p = shape.map(|c| c.unwrap_or(u));
                crate::biproj::is_rootless(ctx, k, &p)
            })
            .unwrap();
        ProjectivePolynomial::new(ctx.clone(), k, shape.map(|c| c.unwrap_or(u))).unwrap()
    }

    #[test]
    fn m3_orbit_is_everything() {
        let ctx = FieldCtx::new(3).unwrap();
        let f = smallest_rootless(&ctx, 1, [Some(Fe(1)), Some(Fe(0)), Some(Fe(1)), None]);
        assert_eq!(orbit_and_stabilizer(&f).unwrap(), (1176, 21));
        assert_eq!(orbit_bfs(&f), 1176);
    }

    #[test]
    fn m4_noncube_stabilizer() {
        let ctx = FieldCtx::new(4).unwrap();
        let u = ctx.nonzero().find(|&u| !ctx.is_cube(u).unwrap()).unwrap();
        let f = ProjectivePolynomial::new(ctx.clone(), 1, [Fe(1), Fe(0), Fe(0), u]).unwrap();
        let (orbit, stab) = orbit_and_stabilizer(&f).unwrap();
        assert_eq!(stab, 45);
        assert_eq!(orbit as usize, orbit_bfs(&f));
    }

    #[test]
    fn action_matches_pointwise_and_composes() {
        let ctx = FieldCtx::new(3).unwrap();
        let f = ProjectivePolynomial::new(ctx.clone(), 1, [Fe(3), Fe(5), Fe(1), Fe(6)]).unwrap();
        let g = GGroupElement::new(&ctx, Fe(2), [Fe(1), Fe(3), Fe(4), Fe(6)]).unwrap();
        let h = GGroupElement::new(&ctx, Fe(6), [Fe(0), Fe(1), Fe(5), Fe(2)]).unwrap();
        let gf = g_action(&g, &f).unwrap();
        for x in ctx.elements() {
            for y in ctx.elements() {
                let [c1, c2, c3, c4] = g.mat;
                let direct = ctx.mul(g.a, f.eval(ctx.mul(c1, x) + ctx.mul(c2, y), ctx.mul(c3, x) + ctx.mul(c4, y)));
                assert_eq!(eval_form(&ctx, 1, &gf.p, x, y), direct);
            }
        }
        let lhs = g_action(&g.compose(&ctx, &h), &f).unwrap();
        let rhs = g_action(&g, &g_action(&h, &f).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(g_action(&GGroupElement::identity(), &f).unwrap(), f);
        assert!(GGroupElement::new(&ctx, Fe(1), [Fe(1), Fe(1), Fe(1), Fe(1)]).is_err());
    }

    #[test]
    fn rejects_polynomials_with_roots() {
        let ctx = FieldCtx::new(3).unwrap();
        let f = ProjectivePolynomial::new(ctx, 1, [Fe(1), Fe(0), Fe(0), Fe(1)]).unwrap();
        assert!(orbit_and_stabilizer(&f).is_err());
    }
}

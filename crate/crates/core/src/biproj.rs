//! Biprojective polynomial pairs F(x, y) = [f(x, y), g(x, y)] with
//! f = (a0, b0, c0, d0)_q and g = (a1, b1, c1, d1)_r, i.e.
//! a x^{q+1} + b x^q y + c x y^q + d y^{q+1}.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{parse_hex_u64, FieldCtx, FieldElement as Fe, ProductElement};
use crate::gf2::rank_u64;

pub type Coeffs = [Fe; 4];

/// Evaluates (a, b, c, d)_{2^k} at (x, y).
#[inline]
pub fn eval_form(ctx: &FieldCtx, k: u32, c: &Coeffs, x: Fe, y: Fe) -> Fe {
    let xq = ctx.frobenius(x, k as i64);
    let yq = ctx.frobenius(y, k as i64);
    ctx.mul(xq, ctx.mul(c[0], x) + ctx.mul(c[1], y)) + ctx.mul(yq, ctx.mul(c[2], x) + ctx.mul(c[3], y))
}

/// Coefficients of f(c1 x + c2 y, c3 x + c4 y) for f = (p1, p2, p3, p4)_{2^k}.
pub fn substitute(ctx: &FieldCtx, k: u32, p: &Coeffs, mat: &Coeffs) -> Coeffs {
    let [c1, c2, c3, c4] = *mat;
    let fr = |v: Fe| ctx.frobenius(v, k as i64);
    let (c1q, c2q, c3q, c4q) = (fr(c1), fr(c2), fr(c3), fr(c4));
    let mul = |a: Fe, b: Fe| ctx.mul(a, b);
    let n1 = eval_form(ctx, k, p, c1, c3);
    let n4 = eval_form(ctx, k, p, c2, c4);
    let n2 = mul(p[0], mul(c1q, c2)) + mul(p[1], mul(c1q, c4)) + mul(p[2], mul(c3q, c2)) + mul(p[3], mul(c3q, c4));
    let n3 = mul(p[0], mul(c1, c2q)) + mul(p[1], mul(c3, c2q)) + mul(p[2], mul(c1, c4q)) + mul(p[3], mul(c3, c4q));
    [n1, n2, n3, n4]
}

/// Every coefficient raised to 2^s.
pub fn frobenius_coeffs(ctx: &FieldCtx, c: &Coeffs, s: i64) -> Coeffs {
    [ctx.frobenius(c[0], s), ctx.frobenius(c[1], s), ctx.frobenius(c[2], s), ctx.frobenius(c[3], s)]
}

/// A point of the projective line over the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjPoint {
    Finite(Fe),
    Infinity,
}

impl ProjPoint {
    /// The 2^m + 1 points: 0, 1, ..., 2^m - 1, then infinity.
    pub fn all(ctx: &FieldCtx) -> impl Iterator<Item = ProjPoint> + '_ {
        ctx.elements().map(ProjPoint::Finite).chain(std::iter::once(ProjPoint::Infinity))
    }
}

/// A (q, r)-biprojective polynomial pair over GF(2^m).
#[derive(Clone)]
pub struct BiprojectivePair {
    pub ctx: Arc<FieldCtx>,
    pub k: u32,
    pub l: u32,
    pub c0: Coeffs,
    pub c1: Coeffs,
}

impl PartialEq for BiprojectivePair {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.k == other.k && self.l == other.l && self.c0 == other.c0 && self.c1 == other.c1
    }
}

impl Eq for BiprojectivePair {}

impl fmt::Debug for BiprojectivePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for BiprojectivePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl BiprojectivePair {
    pub fn new(ctx: Arc<FieldCtx>, k: u32, l: u32, c0: Coeffs, c1: Coeffs) -> Result<Self> {
        let m = ctx.m();
        if k >= m || l >= m {
            return Err(Error::Domain(format!("exponents must lie in [0, {m}), got k = {k}, l = {l}")));
        }
        if let Some(bad) = c0.iter().chain(c1.iter()).find(|c| !ctx.contains(**c)) {
            return Err(Error::Domain(format!("coefficient {bad:?} is not a field element")));
        }
        Ok(BiprojectivePair { ctx, k, l, c0, c1 })
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.ctx.m()
    }

    #[inline]
    pub fn f(&self, x: Fe, y: Fe) -> Fe {
        eval_form(&self.ctx, self.k, &self.c0, x, y)
    }

    #[inline]
    pub fn g(&self, x: Fe, y: Fe) -> Fe {
        eval_form(&self.ctx, self.l, &self.c1, x, y)
    }

    #[inline]
    pub fn evaluate(&self, p: ProductElement) -> ProductElement {
        ProductElement::new(self.f(p.x, p.y), self.g(p.x, p.y))
    }

    /// Evaluation by truth-table index, returning the packed output index.
    #[inline]
    pub fn eval_index(&self, idx: usize) -> usize {
        let m = self.m();
        self.evaluate(ProductElement::from_index(idx, m)).index(m)
    }

    /// The pair with every coefficient raised to 2^t, i.e. F^{2^t} read as
    /// a pair in the variables x^{2^t}, y^{2^t}.
    pub fn frobenius_twist(&self, t: i64) -> BiprojectivePair {
        BiprojectivePair {
            ctx: self.ctx.clone(),
            k: self.k,
            l: self.l,
            c0: frobenius_coeffs(&self.ctx, &self.c0, t),
            c1: frobenius_coeffs(&self.ctx, &self.c1, t),
        }
    }

    /// Exchanges the two output components.
    pub fn swapped(&self) -> BiprojectivePair {
        BiprojectivePair { ctx: self.ctx.clone(), k: self.l, l: self.k, c0: self.c1, c1: self.c0 }
    }

    pub fn first_form(&self) -> ProjectivePolynomial {
        ProjectivePolynomial { ctx: self.ctx.clone(), k: self.k, p: self.c0 }
    }

    pub fn second_form(&self) -> ProjectivePolynomial {
        ProjectivePolynomial { ctx: self.ctx.clone(), k: self.l, p: self.c1 }
    }

    /// `m=<m> k=<k> l=<l> c0=<4 hex> c1=<4 hex> poly=<hex>`
    pub fn to_text(&self) -> String {
        let hx = |c: &Coeffs| c.iter().map(|v| format!("{:x}", v.0)).collect::<Vec<_>>().join(",");
        format!(
            "m={} k={} l={} c0={} c1={} poly={:#x}",
            self.m(),
            self.k,
            self.l,
            hx(&self.c0),
            hx(&self.c1),
            self.ctx.poly()
        )
    }

    /// Parses the canonical text form. Coefficient lists are comma separated.
    pub fn from_text(text: &str) -> Result<BiprojectivePair> {
        let mut m = None;
        let mut k = None;
        let mut l = None;
        let mut c0 = None;
        let mut c1 = None;
        let mut poly = None;
        let coeffs = |s: &str| -> Result<Coeffs> {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != 4 {
                return Err(Error::Parse(format!("expected 4 coefficients, got {s:?}")));
            }
            let mut out = [Fe::ZERO; 4];
            for (o, p) in out.iter_mut().zip(parts) {
                let v = parse_hex_u64(p)?;
                *o = Fe(u32::try_from(v).map_err(|_| Error::Parse(format!("coefficient {p} too large")))?);
            }
            Ok(out)
        };
        let int = |s: &str| s.parse::<u32>().map_err(|_| Error::Parse(format!("bad integer {s:?}")));
        for tok in text.split_whitespace() {
            let (key, val) = tok.split_once('=').ok_or_else(|| Error::Parse(format!("bad token {tok:?}")))?;
            match key {
                "m" => m = Some(int(val)?),
                "k" => k = Some(int(val)?),
                "l" => l = Some(int(val)?),
                "c0" => c0 = Some(coeffs(val)?),
                "c1" => c1 = Some(coeffs(val)?),
                "poly" => poly = Some(parse_hex_u64(val)?),
                _ => return Err(Error::Parse(format!("unknown key {key:?}"))),
            }
        }
        let missing = |name: &str| Error::Parse(format!("missing field {name}"));
        let m = m.ok_or_else(|| missing("m"))?;
        let ctx = match poly {
            Some(p) => FieldCtx::with_poly(m, p)?,
            None => FieldCtx::new(m)?,
        };
        BiprojectivePair::new(
            ctx,
            k.ok_or_else(|| missing("k"))?,
            l.ok_or_else(|| missing("l"))?,
            c0.ok_or_else(|| missing("c0"))?,
            c1.ok_or_else(|| missing("c1"))?,
        )
    }

    /// Builds the two linearized maps Delta_u for the f and g components.
    pub fn delta_system(&self, u: ProjPoint) -> DeltaSystem {
        let ctx = &*self.ctx;
        let m = ctx.m();
        let fcoef = delta_coeffs(ctx, self.k, &self.c0, u);
        let gcoef = delta_coeffs(ctx, self.l, &self.c1, u);
        let mut f_images = Vec::with_capacity(2 * m as usize);
        let mut g_images = Vec::with_capacity(2 * m as usize);
        for j in 0..2 * m {
            let p = ProductElement::from_index(1usize << j, m);
            f_images.push(eval_delta(ctx, self.k, &fcoef, p.x, p.y).0);
            g_images.push(eval_delta(ctx, self.l, &gcoef, p.x, p.y).0);
        }
        DeltaSystem { u, m, f_coeffs: fcoef, g_coeffs: gcoef, f_images, g_images }
    }
}

/// Coefficients (A, B, C, D) of  A x^q + B x + C y^q + D y  for Delta_u.
pub fn delta_coeffs(ctx: &FieldCtx, k: u32, c: &Coeffs, u: ProjPoint) -> Coeffs {
    let [a, b, cc, d] = *c;
    match u {
        ProjPoint::Infinity => [a, a, cc, b],
        ProjPoint::Finite(u) if u.is_zero() => [b, cc, d, d],
        ProjPoint::Finite(u) => {
            let uq = ctx.frobenius(u, k as i64);
            [ctx.mul(a, u) + b, ctx.mul(a, uq) + cc, ctx.mul(cc, u) + d, ctx.mul(b, uq) + d]
        }
    }
}

#[inline]
fn eval_delta(ctx: &FieldCtx, k: u32, c: &Coeffs, x: Fe, y: Fe) -> Fe {
    ctx.mul(c[0], ctx.frobenius(x, k as i64))
        + ctx.mul(c[1], x)
        + ctx.mul(c[2], ctx.frobenius(y, k as i64))
        + ctx.mul(c[3], y)
}

/// The pair of F_2-linear maps M x M -> M attached to a point u, stored as
/// images of the 2m basis vectors (basis vector j is truth-table index 2^j).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSystem {
    pub u: ProjPoint,
    pub m: u32,
    pub f_coeffs: Coeffs,
    pub g_coeffs: Coeffs,
    pub f_images: Vec<u32>,
    pub g_images: Vec<u32>,
}

impl DeltaSystem {
    /// Applies both maps through their matrices.
    pub fn apply(&self, p: ProductElement) -> (Fe, Fe) {
        let idx = p.index(self.m);
        let mut f = 0u32;
        let mut g = 0u32;
        for j in 0..(2 * self.m) as usize {
            if (idx >> j) & 1 == 1 {
                f ^= self.f_images[j];
                g ^= self.g_images[j];
            }
        }
        (Fe(f), Fe(g))
    }

    /// Direct evaluation of the defining formulas.
    pub fn evaluate_direct(&self, ctx: &FieldCtx, k: u32, l: u32, p: ProductElement) -> (Fe, Fe) {
        (eval_delta(ctx, k, &self.f_coeffs, p.x, p.y), eval_delta(ctx, l, &self.g_coeffs, p.x, p.y))
    }

    /// Nullity of the stacked map (x, y) -> (Delta f, Delta g).
    pub fn kernel_dim(&self) -> usize {
        let cols: Vec<u64> = self
            .f_images
            .iter()
            .zip(&self.g_images)
            .map(|(&f, &g)| f as u64 | ((g as u64) << self.m))
            .collect();
        cols.len() - rank_u64(&cols)
    }
}

/// A q-projective polynomial p1 x^{q+1} + p2 x^q y + p3 x y^q + p4 y^{q+1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectivePolynomial {
    pub ctx: Arc<FieldCtx>,
    pub k: u32,
    pub p: Coeffs,
}

impl ProjectivePolynomial {
    pub fn new(ctx: Arc<FieldCtx>, k: u32, p: Coeffs) -> Result<Self> {
        if k >= ctx.m() {
            return Err(Error::Domain(format!("exponent {k} out of range")));
        }
        if p.iter().any(|c| !ctx.contains(*c)) {
            return Err(Error::Domain("coefficient out of range".into()));
        }
        Ok(ProjectivePolynomial { ctx, k, p })
    }

    #[inline]
    pub fn eval(&self, x: Fe, y: Fe) -> Fe {
        eval_form(&self.ctx, self.k, &self.p, x, y)
    }

    /// Whether f(x, 1) has no root in the field. Needs p1 != 0.
    pub fn rootless_check(&self) -> Result<bool> {
        if self.p[0].is_zero() {
            return Err(Error::Domain("rootless check needs a nonzero leading coefficient".into()));
        }
        Ok(is_rootless(&self.ctx, self.k, &self.p))
    }
}

/// f(x, 1) != 0 for every x.
pub fn is_rootless(ctx: &FieldCtx, k: u32, p: &Coeffs) -> bool {
    ctx.elements().all(|x| !eval_form(ctx, k, p, x, Fe::ONE).is_zero())
}

/// Number of (p1, p2, p3, p4) with p1 != 0 whose f(x, 1) has no root.
///
/// For fixed (p1, p2, p3) the values p4 that leave f(x, 1) rootless are
/// exactly those outside the image of x -> p1 x^{q+1} + p2 x^q + p3 x.
pub fn rootless_count(ctx: &FieldCtx, k: u32) -> u64 {
    use rayon::prelude::*;
    let size = ctx.size() as usize;
    let xq: Vec<Fe> = ctx.elements().map(|x| ctx.frobenius(x, k as i64)).collect();
    let xq1: Vec<Fe> = ctx.elements().map(|x| ctx.mul(x, xq[x.0 as usize])).collect();
    (1..size as u32)
        .into_par_iter()
        .map(|p1| {
            let p1 = Fe(p1);
            let mut seen = vec![0u32; size];
            let mut stamp = 0u32;
            let mut total = 0u64;
            let lead: Vec<Fe> = xq1.iter().map(|&v| ctx.mul(p1, v)).collect();
            for p2 in ctx.elements() {
                let t2: Vec<Fe> = (0..size).map(|x| lead[x] + ctx.mul(p2, xq[x])).collect();
                for p3 in ctx.elements() {
                    stamp += 1;
                    let mut image = 0u64;
                    for x in 0..size {
                        let v = (t2[x] + ctx.mul(p3, Fe(x as u32))).0 as usize;
                        if seen[v] != stamp {
                            seen[v] = stamp;
                            image += 1;
                        }
                    }
                    total += size as u64 - image;
                }
            }
            total
        })
        .sum()
}

/// The closed-form count (2^m + 1) 2^m (2^m - 1)^2 / 3.
pub fn rootless_formula(m: u32) -> u64 {
    let s = 1u64 << m;
    (s + 1) * s * (s - 1) * (s - 1) / 3
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_pair(ctx: &Arc<FieldCtx>, rng: &mut impl Rng) -> BiprojectivePair {
        let m = ctx.m();
        let mut c = || Fe(rng.gen_range(0..ctx.size() as u32));
        let c0 = [c(), c(), c(), c()];
        let c1 = [c(), c(), c(), c()];
        BiprojectivePair::new(ctx.clone(), rng.gen_range(0..m), rng.gen_range(0..m), c0, c1).unwrap()
    }

    fn monomial_oracle(f: &BiprojectivePair, x: Fe, y: Fe) -> (Fe, Fe) {
        // each of the 8 monomials through plain powering
        let ctx = &f.ctx;
        let term = |c: Fe, ex: u64, ey: u64| ctx.mul(c, ctx.mul(ctx.pow(x, ex), ctx.pow(y, ey)));
        let form = |k: u32, c: &Coeffs| {
            let q = 1u64 << k;
            term(c[0], q + 1, 0) + term(c[1], q, 1) + term(c[2], 1, q) + term(c[3], 0, q + 1)
        };
        (form(f.k, &f.c0), form(f.l, &f.c1))
    }

    #[test]
    fn evaluate_basics() {
        let ctx = FieldCtx::new(5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let f = random_pair(&ctx, &mut rng);
        assert_eq!(f.evaluate(ProductElement::ZERO), ProductElement::ZERO);
        let mono = BiprojectivePair::new(
            ctx.clone(),
            1,
            3,
            [Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ZERO],
            [Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ONE],
        )
        .unwrap();
        for x in ctx.elements() {
            let y = Fe((x.0 * 7 + 3) & 31);
            let v = mono.evaluate(ProductElement::new(x, y));
            assert_eq!(v.x, ctx.pow(x, 3));
            assert_eq!(v.y, ctx.pow(y, 9));
        }
        for _ in 0..1000 {
            let f = random_pair(&ctx, &mut rng);
            let x = Fe(rng.gen_range(0..32));
            let y = Fe(rng.gen_range(0..32));
            let v = f.evaluate(ProductElement::new(x, y));
            assert_eq!((v.x, v.y), monomial_oracle(&f, x, y));
        }
    }

    #[test]
    fn bidegree_identity_samples() {
        let ctx = FieldCtx::new(6).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..300 {
            let f = random_pair(&ctx, &mut rng);
            let t = Fe(rng.gen_range(1..64));
            let x = Fe(rng.gen_range(0..64));
            let y = Fe(rng.gen_range(0..64));
            let lhs = f.evaluate(ProductElement::new(ctx.mul(t, x), ctx.mul(t, y)));
            let rhs = f.evaluate(ProductElement::new(x, y));
            assert_eq!(lhs.x, ctx.mul(ctx.pow(t, (1 << f.k) + 1), rhs.x));
            assert_eq!(lhs.y, ctx.mul(ctx.pow(t, (1 << f.l) + 1), rhs.y));
        }
    }

    #[test]
    fn delta_special_points() {
        let ctx = FieldCtx::new(4).unwrap();
        let c = [Fe(3), Fe(5), Fe(7), Fe(11)];
        assert_eq!(delta_coeffs(&ctx, 1, &c, ProjPoint::Finite(Fe::ZERO)), [Fe(5), Fe(7), Fe(11), Fe(11)]);
        assert_eq!(delta_coeffs(&ctx, 1, &c, ProjPoint::Infinity), [Fe(3), Fe(3), Fe(7), Fe(5)]);
    }

    #[test]
    fn delta_is_the_difference_operator() {
        // F(x + u s, y + s) + F(x, y) + F(u s, s) is the bilinear part; at the
        // direction (u, 1) its zero set in (x, y) is the kernel of Delta_u
        let ctx = FieldCtx::new(4).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let f = random_pair(&ctx, &mut rng);
            for u in ProjPoint::all(&ctx) {
                let dir = match u {
                    ProjPoint::Finite(u) => ProductElement::new(u, Fe::ONE),
                    ProjPoint::Infinity => ProductElement::new(Fe::ONE, Fe::ZERO),
                };
                let ds = f.delta_system(u);
                let base = f.evaluate(dir);
                for idx in 0..256 {
                    let p = ProductElement::from_index(idx, 4);
                    let bil = f.evaluate(p.add(dir)).add(f.evaluate(p)).add(base);
                    let (df, dg) = ds.apply(p);
                    assert_eq!(bil.x.is_zero(), df.is_zero());
                    assert_eq!(bil.y.is_zero(), dg.is_zero());
                }
            }
        }
    }

    #[test]
    fn delta_matrix_matches_formula_m5() {
        let ctx = FieldCtx::new(5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let f = random_pair(&ctx, &mut rng);
            let u = ProjPoint::Finite(Fe(rng.gen_range(1..32)));
            let ds = f.delta_system(u);
            for idx in 0..1024 {
                let p = ProductElement::from_index(idx, 5);
                assert_eq!(ds.apply(p), ds.evaluate_direct(&ctx, f.k, f.l, p));
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let ctx = FieldCtx::new(6).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let f = random_pair(&ctx, &mut rng);
            let t = f.to_text();
            assert!(t.starts_with("m=6 "));
            assert_eq!(BiprojectivePair::from_text(&t).unwrap(), f);
        }
        assert!(BiprojectivePair::from_text("m=3 k=1 l=1 c0=1,0,0 c1=0,0,0,1").is_err());
        assert!(BiprojectivePair::from_text("m=3 k=5 l=1 c0=1,0,0,0 c1=0,0,0,1").is_err());
    }

    #[test]
    fn rootless_examples() {
        let ctx = FieldCtx::new(4).unwrap();
        let u = ctx.generator();
        let f = ProjectivePolynomial::new(ctx.clone(), 1, [Fe::ONE, Fe::ZERO, Fe::ZERO, u]).unwrap();
        assert!(f.rootless_check().unwrap());
        let g = ProjectivePolynomial::new(ctx.clone(), 1, [Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ONE]).unwrap();
        assert!(!g.rootless_check().unwrap());
        let h = ProjectivePolynomial::new(ctx, 1, [Fe::ZERO, Fe::ONE, Fe::ZERO, Fe::ONE]).unwrap();
        assert!(h.rootless_check().is_err());
    }

    #[test]
    fn rootless_count_m3_matches_scan() {
        let ctx = FieldCtx::new(3).unwrap();
        let mut brute = 0u64;
        for p1 in ctx.nonzero() {
            for p2 in ctx.elements() {
                for p3 in ctx.elements() {
                    for p4 in ctx.elements() {
                        if is_rootless(&ctx, 1, &[p1, p2, p3, p4]) {
                            brute += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(brute, 1176);
        assert_eq!(rootless_count(&ctx, 1), 1176);
        assert_eq!(rootless_formula(3), 1176);
    }

    #[test]
    fn substitute_matches_pointwise() {
        let ctx = FieldCtx::new(3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let p = [Fe(rng.gen_range(0..8)), Fe(rng.gen_range(0..8)), Fe(rng.gen_range(0..8)), Fe(rng.gen_range(0..8))];
            let mat = [Fe(rng.gen_range(0..8)), Fe(rng.gen_range(0..8)), Fe(rng.gen_range(0..8)), Fe(rng.gen_range(0..8))];
            let k = rng.gen_range(0..3);
            let s = substitute(&ctx, k, &p, &mat);
            for x in ctx.elements() {
                for y in ctx.elements() {
                    let lhs = eval_form(&ctx, k, &s, x, y);
                    let rhs = eval_form(&ctx, k, &p, ctx.mul(mat[0], x) + ctx.mul(mat[1], y), ctx.mul(mat[2], x) + ctx.mul(mat[3], y));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

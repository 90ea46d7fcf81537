//! EL maps (u, v) -> (M u, N u + L v) on (M x M)^2 and graph transport.

use std::fmt;
use std::sync::Arc;

use crate::biproj::BiprojectivePair;
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement as Fe, ProductElement};
use crate::gf2::{rank_u64, BitMatrix};

/// An F_2-linear map M -> M.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    Zero,
    /// x -> c x^{2^t}
    Monomial { c: Fe, t: u32 },
    /// x -> sum c_i x^{2^{t_i}}
    Linearized(Vec<(Fe, u32)>),
}

impl Block {
    pub fn mono(c: Fe, t: u32) -> Block {
        if c.is_zero() {
            Block::Zero
        } else {
            Block::Monomial { c, t }
        }
    }

    pub fn identity() -> Block {
        Block::Monomial { c: Fe::ONE, t: 0 }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Block::Zero => true,
            Block::Monomial { c, .. } => c.is_zero(),
            Block::Linearized(terms) => terms.iter().all(|(c, _)| c.is_zero()),
        }
    }

    /// Nonzero (coefficient, Frobenius power) terms.
    pub fn terms(&self) -> Vec<(Fe, u32)> {
        match self {
            Block::Zero => vec![],
            Block::Monomial { c, t } => vec![(*c, *t)].into_iter().filter(|(c, _)| !c.is_zero()).collect(),
            Block::Linearized(terms) => terms.iter().copied().filter(|(c, _)| !c.is_zero()).collect(),
        }
    }

    #[inline]
    pub fn eval(&self, ctx: &FieldCtx, x: Fe) -> Fe {
        match self {
            Block::Zero => Fe::ZERO,
            Block::Monomial { c, t } => ctx.mul(*c, ctx.frobenius(x, *t as i64)),
            Block::Linearized(terms) => {
                terms.iter().fold(Fe::ZERO, |acc, &(c, t)| acc + ctx.mul(c, ctx.frobenius(x, t as i64)))
            }
        }
    }

    /// The block with images `images[i]` of the basis elements x^i, as a
    /// linearized polynomial (solves the Moore system over the field).
    pub fn from_images(ctx: &FieldCtx, images: &[Fe]) -> Block {
        let m = ctx.m() as usize;
        assert_eq!(images.len(), m);
        if images.iter().all(|v| v.is_zero()) {
            return Block::Zero;
        }
        // rows i: sum_s a_s e_i^{2^s} = images[i]
        let mut rows: Vec<Vec<Fe>> = (0..m)
            .map(|i| {
                let e = Fe(1 << i);
                let mut r: Vec<Fe> = (0..m).map(|s| ctx.frobenius(e, s as i64)).collect();
                r.push(images[i]);
                r
            })
            .collect();
        for col in 0..m {
            let piv = (col..m).find(|&r| !rows[r][col].is_zero()).expect("Moore matrix of a basis is invertible");
            rows.swap(col, piv);
            let inv = ctx.inv_nonzero(rows[col][col]);
            for v in rows[col].iter_mut() {
                *v = ctx.mul(*v, inv);
            }
            for r in 0..m {
                if r != col && !rows[r][col].is_zero() {
                    let f = rows[r][col];
                    for j in col..=m {
                        let sub = ctx.mul(f, rows[col][j]);
                        rows[r][j] = rows[r][j] + sub;
                    }
                }
            }
        }
        let terms: Vec<(Fe, u32)> =
            (0..m).filter(|&s| !rows[s][m].is_zero()).map(|s| (rows[s][m], s as u32)).collect();
        match terms.as_slice() {
            [] => Block::Zero,
            [(c, t)] => Block::Monomial { c: *c, t: *t },
            _ => Block::Linearized(terms),
        }
    }
}

/// A linear map on M x M given by blocks [B1, B2; B3, B4]:
/// (x, y) -> (B1 x + B2 y, B3 x + B4 y).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMap(pub [Block; 4]);

impl BlockMap {
    pub fn zero() -> BlockMap {
        BlockMap([Block::Zero, Block::Zero, Block::Zero, Block::Zero])
    }

    pub fn identity() -> BlockMap {
        BlockMap([Block::identity(), Block::Zero, Block::Zero, Block::identity()])
    }

    pub fn diag(a: Block, b: Block) -> BlockMap {
        BlockMap([a, Block::Zero, Block::Zero, b])
    }

    pub fn anti(a: Block, b: Block) -> BlockMap {
        BlockMap([Block::Zero, a, b, Block::Zero])
    }

    /// Every block the monomial c_i x^{2^t}.
    pub fn monomials(c: [Fe; 4], t: u32) -> BlockMap {
        BlockMap(c.map(|c| Block::mono(c, t)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Block::is_zero)
    }

    #[inline]
    pub fn apply(&self, ctx: &FieldCtx, p: ProductElement) -> ProductElement {
        let b = &self.0;
        ProductElement::new(b[0].eval(ctx, p.x) + b[1].eval(ctx, p.y), b[2].eval(ctx, p.x) + b[3].eval(ctx, p.y))
    }

    /// Images of the 2m basis vectors (basis vector j is index 2^j).
    pub fn columns(&self, ctx: &FieldCtx) -> Vec<u64> {
        let m = ctx.m();
        (0..2 * m)
            .map(|j| self.apply(ctx, ProductElement::from_index(1usize << j, m)).index(m) as u64)
            .collect()
    }

    pub fn from_columns(ctx: &FieldCtx, cols: &[u64]) -> BlockMap {
        let m = ctx.m() as usize;
        let mask = (1u64 << m) - 1;
        let hi = |c: u64| Fe((c >> m) as u32);
        let lo = |c: u64| Fe((c & mask) as u32);
        let xs: Vec<u64> = cols[m..2 * m].to_vec();
        let ys: Vec<u64> = cols[..m].to_vec();
        BlockMap([
            Block::from_images(ctx, &xs.iter().map(|&c| hi(c)).collect::<Vec<_>>()),
            Block::from_images(ctx, &ys.iter().map(|&c| hi(c)).collect::<Vec<_>>()),
            Block::from_images(ctx, &xs.iter().map(|&c| lo(c)).collect::<Vec<_>>()),
            Block::from_images(ctx, &ys.iter().map(|&c| lo(c)).collect::<Vec<_>>()),
        ])
    }

    pub fn matrix(&self, ctx: &FieldCtx) -> BitMatrix {
        BitMatrix::from_columns(2 * ctx.m() as usize, &self.columns(ctx))
    }

    pub fn is_invertible(&self, ctx: &FieldCtx) -> bool {
        rank_u64(&self.columns(ctx)) == 2 * ctx.m() as usize
    }
}

fn matrix_columns(mat: &BitMatrix) -> Vec<u64> {
    (0..mat.cols())
        .map(|c| (0..mat.rows()).fold(0u64, |acc, r| acc | ((mat.get(r, c) as u64) << r)))
        .collect()
}

/// gamma(u, v) = (M u, N u + L v). Maps the graph of F onto the graph of G
/// exactly when G(M u) = L F(u) + N u for every u.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ELMap {
    pub m: BlockMap,
    pub n: BlockMap,
    pub l: BlockMap,
}

const BLOCK_NAMES: [&str; 3] = ["M", "N", "L"];

impl ELMap {
    pub fn identity() -> ELMap {
        ELMap { m: BlockMap::identity(), n: BlockMap::zero(), l: BlockMap::identity() }
    }

    /// diag(m_a, m_a, m_{a^{q+1}}, m_{a^{r+1}}) for a (q, r) pair.
    pub fn z_element(pair: &BiprojectivePair, a: Fe) -> Result<ELMap> {
        if a.is_zero() {
            return Err(Error::Domain("the scaling element must be nonzero".into()));
        }
        let ctx = &pair.ctx;
        let aq = ctx.pow(a, (1u64 << pair.k) + 1);
        let ar = ctx.pow(a, (1u64 << pair.l) + 1);
        Ok(ELMap {
            m: BlockMap::diag(Block::mono(a, 0), Block::mono(a, 0)),
            n: BlockMap::zero(),
            l: BlockMap::diag(Block::mono(aq, 0), Block::mono(ar, 0)),
        })
    }

    #[inline]
    pub fn apply(&self, ctx: &FieldCtx, u: ProductElement, v: ProductElement) -> (ProductElement, ProductElement) {
        (self.m.apply(ctx, u), self.n.apply(ctx, u).add(self.l.apply(ctx, v)))
    }

    pub fn check_invertible(&self, ctx: &FieldCtx) -> Result<()> {
        if !self.m.is_invertible(ctx) {
            return Err(Error::NonInvertible("M is singular".into()));
        }
        if !self.l.is_invertible(ctx) {
            return Err(Error::NonInvertible("L is singular".into()));
        }
        Ok(())
    }

    /// gamma^{-1} = (M^{-1}, L^{-1} N M^{-1}, L^{-1}).
    pub fn inverse(&self, ctx: &FieldCtx) -> Result<ELMap> {
        let mi = self.m.matrix(ctx).inverse().ok_or_else(|| Error::NonInvertible("M is singular".into()))?;
        let li = self.l.matrix(ctx).inverse().ok_or_else(|| Error::NonInvertible("L is singular".into()))?;
        let ni = li.mul(&self.n.matrix(ctx)).mul(&mi);
        Ok(ELMap {
            m: BlockMap::from_columns(ctx, &matrix_columns(&mi)),
            n: BlockMap::from_columns(ctx, &matrix_columns(&ni)),
            l: BlockMap::from_columns(ctx, &matrix_columns(&li)),
        })
    }

    /// self after other: u -> self(other(u)).
    pub fn compose(&self, ctx: &FieldCtx, other: &ELMap) -> ELMap {
        let m = self.m.matrix(ctx).mul(&other.m.matrix(ctx));
        let l = self.l.matrix(ctx).mul(&other.l.matrix(ctx));
        // N'' u = N_s M_o u + L_s N_o u
        let n1 = self.n.matrix(ctx).mul(&other.m.matrix(ctx));
        let n2 = self.l.matrix(ctx).mul(&other.n.matrix(ctx));
        let n: Vec<u64> = matrix_columns(&n1).iter().zip(matrix_columns(&n2)).map(|(a, b)| a ^ b).collect();
        ELMap {
            m: BlockMap::from_columns(ctx, &matrix_columns(&m)),
            n: BlockMap::from_columns(ctx, &n),
            l: BlockMap::from_columns(ctx, &matrix_columns(&l)),
        }
    }

    /// One `(block, c_hex, t)` line per nonzero term, e.g. `(M1, 0x1, 0)`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, map) in BLOCK_NAMES.iter().zip([&self.m, &self.n, &self.l]) {
            for (i, b) in map.0.iter().enumerate() {
                for (c, t) in b.terms() {
                    out.push_str(&format!("({name}{}, {:#x}, {t})\n", i + 1, c.0));
                }
            }
        }
        out
    }

    pub fn from_text(ctx: &FieldCtx, text: &str) -> Result<ELMap> {
        let mut terms: [[Vec<(Fe, u32)>; 4]; 3] = Default::default();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let inner = line
                .strip_prefix('(')
                .and_then(|l| l.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("bad term {line:?}")))?;
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if parts.len() != 3 || parts[0].len() != 2 {
                return Err(Error::Parse(format!("bad term {line:?}")));
            }
            let which = BLOCK_NAMES
                .iter()
                .position(|n| parts[0].starts_with(n))
                .ok_or_else(|| Error::Parse(format!("bad block {:?}", parts[0])))?;
            let idx: usize = parts[0][1..].parse().map_err(|_| Error::Parse(format!("bad block {:?}", parts[0])))?;
            if !(1..=4).contains(&idx) {
                return Err(Error::Parse(format!("bad block {:?}", parts[0])));
            }
            let c = crate::field::parse_hex_u64(parts[1])?;
            let c = ctx.element(u32::try_from(c).map_err(|_| Error::Parse("coefficient too large".into()))?)?;
            let t: u32 = parts[2].parse().map_err(|_| Error::Parse(format!("bad exponent {:?}", parts[2])))?;
            if t >= ctx.m() {
                return Err(Error::Parse(format!("Frobenius power {t} out of range")));
            }
            terms[which][idx - 1].push((c, t));
        }
        let build = |ts: &[Vec<(Fe, u32)>; 4]| {
            BlockMap(std::array::from_fn(|i| match ts[i].as_slice() {
                [] => Block::Zero,
                [(c, t)] => Block::mono(*c, *t),
                many => Block::Linearized(many.to_vec()),
            }))
        };
        Ok(ELMap { m: build(&terms[0]), n: build(&terms[1]), l: build(&terms[2]) })
    }
}

impl fmt::Display for ELMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Graph {(u, F(u))} as sorted codes `u << 2m | F(u)`.
pub fn graph_set(pair: &BiprojectivePair) -> Vec<u64> {
    let m = pair.m();
    let n = 2 * m;
    let mut g: Vec<u64> = (0..1usize << n).map(|i| ((i as u64) << n) | pair.eval_index(i) as u64).collect();
    g.sort_unstable();
    g
}

/// Image of a graph set under gamma, sorted.
pub fn apply_el(ctx: &FieldCtx, gamma: &ELMap, graph: &[u64]) -> Result<Vec<u64>> {
    gamma.check_invertible(ctx)?;
    let m = ctx.m();
    let n = 2 * m;
    let mask = (1u64 << n) - 1;
    let mut out: Vec<u64> = graph
        .iter()
        .map(|&code| {
            let u = ProductElement::from_index((code >> n) as usize, m);
            let v = ProductElement::from_index((code & mask) as usize, m);
            let (a, b) = gamma.apply(ctx, u, v);
            ((a.index(m) as u64) << n) | b.index(m) as u64
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

fn same_field(f: &BiprojectivePair, g: &BiprojectivePair) -> Result<Arc<FieldCtx>> {
    if f.ctx != g.ctx {
        return Err(Error::ContextMismatch);
    }
    Ok(f.ctx.clone())
}

/// G(M u) = L F(u) + N u at every u.
pub fn is_graph_equiv(f: &BiprojectivePair, g: &BiprojectivePair, gamma: &ELMap) -> Result<bool> {
    let ctx = same_field(f, g)?;
    gamma.check_invertible(&ctx)?;
    let m = ctx.m();
    Ok((0..1usize << (2 * m)).all(|i| {
        let u = ProductElement::from_index(i, m);
        let (a, b) = gamma.apply(&ctx, u, f.evaluate(u));
        g.evaluate(a) == b
    }))
}

/// The same test through the sets: gamma(graph F) == graph G.
pub fn is_graph_equiv_by_sets(f: &BiprojectivePair, g: &BiprojectivePair, gamma: &ELMap) -> Result<bool> {
    let ctx = same_field(f, g)?;
    Ok(apply_el(&ctx, gamma, &graph_set(f))? == graph_set(g))
}

/// Exact test for quadratic F, G: D = G o M + L o F + N has degree at most
/// two, so it vanishes identically iff it vanishes at 0, at every basis
/// vector and at every sum of two basis vectors.
pub fn quadratic_check(f: &BiprojectivePair, g: &BiprojectivePair, gamma: &ELMap) -> bool {
    let ctx = &*f.ctx;
    let m = ctx.m();
    let d = |i: usize| {
        let u = ProductElement::from_index(i, m);
        let (a, b) = gamma.apply(ctx, u, f.evaluate(u));
        g.evaluate(a) == b
    };
    let n = 2 * m as usize;
    d(0) && (0..n).all(|i| d(1 << i) && (i + 1..n).all(|j| d((1 << i) | (1 << j))))
}

/// Whether the Z element for `a` is a graph automorphism of the pair.
pub fn z_subgroup_member(pair: &BiprojectivePair, a: Fe) -> Result<bool> {
    is_graph_equiv(pair, pair, &ELMap::z_element(pair, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_block(ctx: &FieldCtx, rng: &mut impl Rng) -> Block {
        let m = ctx.m();
        match rng.gen_range(0..3) {
            0 => Block::Zero,
            1 => Block::mono(Fe(rng.gen_range(1..ctx.size() as u32)), rng.gen_range(0..m)),
            _ => Block::Linearized((0..3).map(|_| (Fe(rng.gen_range(0..ctx.size() as u32)), rng.gen_range(0..m))).collect()),
        }
    }

    fn rand_invertible(ctx: &FieldCtx, rng: &mut impl Rng) -> BlockMap {
        loop {
            let b = BlockMap(std::array::from_fn(|_| rand_block(ctx, rng)));
            if b.is_invertible(ctx) {
                return b;
            }
        }
    }

    fn sample_pair(ctx: &Arc<FieldCtx>) -> BiprojectivePair {
        BiprojectivePair::new(ctx.clone(), 1, 2, [Fe(1), Fe(0), Fe(1), Fe(1)], [Fe(1), Fe(1), Fe(0), Fe(1)]).unwrap()
    }

    #[test]
    fn block_from_images_round_trip() {
        let ctx = FieldCtx::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let b = rand_block(&ctx, &mut rng);
            let images: Vec<Fe> = (0..5).map(|i| b.eval(&ctx, Fe(1 << i))).collect();
            let back = Block::from_images(&ctx, &images);
            for x in ctx.elements() {
                assert_eq!(back.eval(&ctx, x), b.eval(&ctx, x));
            }
        }
        let images: Vec<Fe> = (0..5).map(|i| ctx.mul(Fe(7), ctx.frobenius(Fe(1 << i), 3))).collect();
        assert_eq!(Block::from_images(&ctx, &images), Block::Monomial { c: Fe(7), t: 3 });
    }

    #[test]
    fn identity_and_linear_shift() {
        let ctx = FieldCtx::new(3).unwrap();
        let f = sample_pair(&ctx);
        let id = ELMap::identity();
        assert!(is_graph_equiv(&f, &f, &id).unwrap());
        assert_eq!(apply_el(&ctx, &id, &graph_set(&f)).unwrap(), graph_set(&f));
        // N adds a linear term: the image is the graph of F + N
        let gamma = ELMap { n: BlockMap::diag(Block::mono(Fe(3), 1), Block::Zero), ..ELMap::identity() };
        let img = apply_el(&ctx, &gamma, &graph_set(&f)).unwrap();
        let m = ctx.m();
        let mut want: Vec<u64> = (0..64usize)
            .map(|i| {
                let u = ProductElement::from_index(i, m);
                let v = f.evaluate(u).add(gamma.n.apply(&ctx, u));
                ((i as u64) << 6) | v.index(m) as u64
            })
            .collect();
        want.sort_unstable();
        assert_eq!(img, want);
    }

    #[test]
    fn inverse_restores_graph() {
        let ctx = FieldCtx::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = BiprojectivePair::new(ctx.clone(), 1, 3, [Fe(1), Fe(2), Fe(3), Fe(4)], [Fe(5), Fe(0), Fe(1), Fe(9)]).unwrap();
        let graph = graph_set(&f);
        for _ in 0..5 {
            let gamma = ELMap { m: rand_invertible(&ctx, &mut rng), n: BlockMap(std::array::from_fn(|_| rand_block(&ctx, &mut rng))), l: rand_invertible(&ctx, &mut rng) };
            let inv = gamma.inverse(&ctx).unwrap();
            let img = apply_el(&ctx, &gamma, &graph).unwrap();
            assert_eq!(apply_el(&ctx, &inv, &img).unwrap(), graph);
            let both = inv.compose(&ctx, &gamma);
            assert_eq!(apply_el(&ctx, &both, &graph).unwrap(), graph);
        }
        let singular = ELMap { m: BlockMap::zero(), ..ELMap::identity() };
        assert!(matches!(apply_el(&ctx, &singular, &graph), Err(Error::NonInvertible(_))));
    }

    #[test]
    fn z_elements_are_automorphisms() {
        let ctx = FieldCtx::new(4).unwrap();
        let f = BiprojectivePair::new(ctx.clone(), 1, 3, [Fe(1), Fe(2), Fe(3), Fe(4)], [Fe(5), Fe(0), Fe(1), Fe(9)]).unwrap();
        for a in ctx.nonzero() {
            assert!(z_subgroup_member(&f, a).unwrap());
        }
        assert!(z_subgroup_member(&f, Fe::ZERO).is_err());
    }

    #[test]
    fn text_round_trip_and_pointwise_vs_sets() {
        let ctx = FieldCtx::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = BiprojectivePair::new(ctx.clone(), 1, 3, [Fe(1), Fe(2), Fe(3), Fe(4)], [Fe(5), Fe(0), Fe(1), Fe(9)]).unwrap();
        for _ in 0..5 {
            let gamma = ELMap { m: rand_invertible(&ctx, &mut rng), n: BlockMap::zero(), l: rand_invertible(&ctx, &mut rng) };
            let back = ELMap::from_text(&ctx, &gamma.to_text()).unwrap();
            for i in 0..256 {
                let u = ProductElement::from_index(i, 4);
                assert_eq!(back.apply(&ctx, u, u), gamma.apply(&ctx, u, u));
            }
            assert_eq!(
                is_graph_equiv(&f, &f, &gamma).unwrap(),
                is_graph_equiv_by_sets(&f, &f, &gamma).unwrap()
            );
            assert_eq!(is_graph_equiv(&f, &f, &gamma).unwrap(), quadratic_check(&f, &f, &gamma));
        }
        assert_eq!(ELMap::identity().to_text(), "(M1, 0x1, 0)\n(M4, 0x1, 0)\n(L1, 0x1, 0)\n(L4, 0x1, 0)\n");
        assert!(ELMap::from_text(&ctx, "(Q1, 0x1, 0)").is_err());
    }
}

//! Centralizer of the Z subgroup inside the EL automorphisms of a pair.
//!
//! Its elements have M = (c_i x), diagonal L = (d_1 x, d_2 x), and N = 0
//! except for components with exponent 0. They are found by the coefficient
//! solver with t = 0; scaling by a nonzero constant is the Z subgroup itself,
//! so the index over Z is the number of solutions with normalised first column.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::biproj::{BiprojectivePair, Coeffs};
use crate::equivalence::el::ELMap;
use crate::equivalence::restricted::{restricted_solutions, SearchSpace};
use crate::error::Result;
use crate::field::{FieldCtx, FieldElement as Fe};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CentralizerClass {
    /// scalar matrices
    Z,
    /// diag(c, w c) with w a primitive cube root of unity
    ZOmega(Fe),
    /// c1 = c2 = c3, c4 = 0
    A,
    /// c1 = 0, c2 = c3 = c4
    B,
    Other,
}

impl fmt::Display for CentralizerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CentralizerClass::Z => f.write_str("Z"),
            CentralizerClass::ZOmega(w) => write!(f, "Z_omega({:#x})", w.0),
            CentralizerClass::A => f.write_str("A"),
            CentralizerClass::B => f.write_str("B"),
            CentralizerClass::Other => f.write_str("other"),
        }
    }
}

impl Serialize for CentralizerClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Classifies a matrix up to scaling.
pub fn classify_matrix(ctx: &FieldCtx, c: &Coeffs) -> CentralizerClass {
    let [c1, c2, c3, c4] = *c;
    if c2.is_zero() && c3.is_zero() && !c1.is_zero() {
        if c1 == c4 {
            return CentralizerClass::Z;
        }
        let w = ctx.mul(c4, ctx.inv_nonzero(c1));
        if w != Fe::ONE && ctx.pow(w, 3) == Fe::ONE {
            return CentralizerClass::ZOmega(w);
        }
    }
    if !c1.is_zero() && c1 == c2 && c2 == c3 && c4.is_zero() {
        return CentralizerClass::A;
    }
    if c1.is_zero() && !c2.is_zero() && c2 == c3 && c3 == c4 {
        return CentralizerClass::B;
    }
    CentralizerClass::Other
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralizerElement {
    pub c: Coeffs,
    pub d: [Fe; 2],
    pub class: CentralizerClass,
    #[serde(skip)]
    pub gamma: ELMap,
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralizerReport {
    pub m: u32,
    /// |C_F| / (2^m - 1)
    pub index: usize,
    pub order: u64,
    pub elements: Vec<CentralizerElement>,
    pub class_counts: BTreeMap<String, usize>,
    /// least prime dividing 2^m - 1 but no 2^i - 1 with i < m
    pub primitive_prime: Option<u64>,
    /// the primitive prime exists and does not divide the index
    pub condition_c: bool,
}

impl CentralizerReport {
    pub fn classes(&self) -> Vec<CentralizerClass> {
        self.elements.iter().map(|e| e.class).collect()
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Least 2-primitive prime divisor of 2^m - 1, if one exists.
pub fn primitive_prime(m: u32) -> Option<u64> {
    if m < 2 || m > 63 {
        return None;
    }
    prime_factors((1u64 << m) - 1).into_iter().find(|&p| (1..m).all(|i| ((1u64 << i) - 1) % p != 0))
}

pub fn centralizer_search(pair: &BiprojectivePair) -> Result<CentralizerReport> {
    let ctx = &*pair.ctx;
    let sols = restricted_solutions(pair, pair, &SearchSpace::centralizer())?;
    let elements: Vec<CentralizerElement> = sols
        .into_iter()
        .map(|w| CentralizerElement { c: w.c, d: w.d, class: classify_matrix(ctx, &w.c), gamma: w.gamma })
        .collect();
    let mut class_counts = BTreeMap::new();
    for e in &elements {
        *class_counts.entry(e.class.to_string()).or_insert(0) += 1;
    }
    let index = elements.len();
    let p = primitive_prime(ctx.m());
    Ok(CentralizerReport {
        m: ctx.m(),
        index,
        order: index as u64 * ctx.order(),
        elements,
        class_counts,
        primitive_prime: p,
        condition_c: matches!(p, Some(p) if index as u64 % p != 0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::el::is_graph_equiv;
    use crate::equivalence::restricted::assemble;
    use crate::field::FieldCtx;

    #[test]
    fn primitive_primes() {
        assert_eq!(primitive_prime(3), Some(7));
        assert_eq!(primitive_prime(4), Some(5));
        assert_eq!(primitive_prime(5), Some(31));
        assert_eq!(primitive_prime(6), None);
        assert_eq!(primitive_prime(10), Some(11));
        assert_eq!(primitive_prime(1), None);
    }

    fn brute_force_index(pair: &BiprojectivePair) -> usize {
        let ctx = &pair.ctx;
        let firsts: Vec<(Fe, Fe)> = ctx.elements().map(|c3| (Fe::ONE, c3)).chain([(Fe::ZERO, Fe::ONE)]).collect();
        let mut count = 0;
        for (c1, c3) in firsts {
            for c2 in ctx.elements() {
                for c4 in ctx.elements() {
                    if (ctx.mul(c1, c4) + ctx.mul(c2, c3)).is_zero() {
                        continue;
                    }
                    for d1 in ctx.nonzero() {
                        for d2 in ctx.nonzero() {
                            let g = assemble(pair, pair, 0, false, [0, 0], [c1, c2, c3, c4], [d1, d2]);
                            if is_graph_equiv(pair, pair, &g).unwrap() {
                                count += 1;
                            }
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn solver_matches_brute_force_at_m3() {
        let ctx = FieldCtx::new(3).unwrap();
        let pairs = [
            crate::family::first_instance(&ctx, crate::family::FamilyTag::Taniguchi).unwrap().pair,
            BiprojectivePair::new(ctx.clone(), 1, 2, [Fe(1), Fe(0), Fe(1), Fe(3)], [Fe(0), Fe(0), Fe(1), Fe(0)]).unwrap(),
            crate::family::first_instance(&ctx, crate::family::FamilyTag::Carlet).unwrap().pair,
        ];
        for p in pairs {
            let rep = centralizer_search(&p).unwrap();
            assert_eq!(rep.index, brute_force_index(&p), "{p}");
            for e in &rep.elements {
                assert!(is_graph_equiv(&p, &p, &e.gamma).unwrap());
            }
        }
    }

    #[test]
    fn classify_shapes() {
        let ctx = FieldCtx::new(6).unwrap();
        let w = ctx.pow(ctx.generator(), 21);
        assert_eq!(classify_matrix(&ctx, &[Fe(5), Fe(0), Fe(0), Fe(5)]), CentralizerClass::Z);
        assert_eq!(classify_matrix(&ctx, &[Fe(1), Fe(0), Fe(0), w]), CentralizerClass::ZOmega(w));
        assert_eq!(classify_matrix(&ctx, &[Fe(3), Fe(3), Fe(3), Fe(0)]), CentralizerClass::A);
        assert_eq!(classify_matrix(&ctx, &[Fe(0), Fe(3), Fe(3), Fe(3)]), CentralizerClass::B);
        assert_eq!(classify_matrix(&ctx, &[Fe(1), Fe(2), Fe(0), Fe(1)]), CentralizerClass::Other);
    }
}

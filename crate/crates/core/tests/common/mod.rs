//! Property suites shared by the standalone property tests and the acceptance run.

#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use biproj_apn::apn::TruthTable;
use biproj_apn::biproj::{eval_form, is_rootless, BiprojectivePair, Coeffs};
use biproj_apn::equivalence::gaction::{det, g_action, GGroupElement};
use biproj_apn::walsh::parseval_sums;
use biproj_apn::{FieldCtx, FieldElement as Fe, ProjectivePolynomial};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const CASES: u32 = 10_000;

const MAX_M: u32 = 12;

fn ctx(m: u32) -> Arc<FieldCtx> {
    static CTXS: OnceLock<Vec<Arc<FieldCtx>>> = OnceLock::new();
    CTXS.get_or_init(|| (1..=MAX_M).map(|m| FieldCtx::new(m).unwrap()).collect())[m as usize - 1].clone()
}

fn runner() -> TestRunner {
    TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() })
}

fn el(ctx: &FieldCtx, raw: u32) -> Fe {
    Fe(raw & (ctx.size() as u32 - 1))
}

fn check(cond: bool, what: &str) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

pub fn field_axioms() -> Result<(), String> {
    runner()
        .run(&(1..=MAX_M, any::<[u32; 3]>(), 0i64..40), |(m, raw, i)| {
            let f = ctx(m);
            let [a, b, c] = raw.map(|r| el(&f, r));
            check(f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c), "mul associative")?;
            check(f.mul(a, b) == f.mul(b, a), "mul commutative")?;
            check(f.mul(a, b + c) == f.mul(a, b) + f.mul(a, c), "distributive")?;
            check(f.mul(a, Fe::ONE) == a && a + a == Fe::ZERO, "identities")?;
            if !a.is_zero() {
                check(f.mul(a, f.inv(a).unwrap()) == Fe::ONE, "inverse")?;
                check(f.pow(a, f.order()) == Fe::ONE, "Lagrange")?;
            } else {
                check(f.inv(a).is_err(), "zero has no inverse")?;
            }
            check(f.frobenius(f.mul(a, b), i) == f.mul(f.frobenius(a, i), f.frobenius(b, i)), "frobenius multiplicative")?;
            check(f.frobenius(a + b, i) == f.frobenius(a, i) + f.frobenius(b, i), "frobenius additive")?;
            check(f.frobenius(f.frobenius(a, i), -i) == a, "frobenius inverse")?;
            check(f.square(a) == f.frobenius(a, 1), "square")
        })
        .map_err(|e| e.to_string())
}

/// F(s x, s y) = (s^{q+1} f(x, y), s^{r+1} g(x, y)).
pub fn bidegree_identity() -> Result<(), String> {
    runner()
        .run(&(2..=10u32, any::<[u32; 13]>()), |(m, raw)| {
            let f = ctx(m);
            let k = raw[0] % m;
            let l = raw[1] % m;
            let c: Vec<Fe> = raw[2..10].iter().map(|&r| el(&f, r)).collect();
            let pair = BiprojectivePair::new(f.clone(), k, l, [c[0], c[1], c[2], c[3]], [c[4], c[5], c[6], c[7]]).unwrap();
            let (x, y, s) = (el(&f, raw[10]), el(&f, raw[11]), el(&f, raw[12]));
            let sx = f.mul(s, x);
            let sy = f.mul(s, y);
            let sq = f.pow(s, (1u64 << k) + 1);
            let sr = f.pow(s, (1u64 << l) + 1);
            check(pair.f(sx, sy) == f.mul(sq, pair.f(x, y)), "first component bidegree")?;
            check(pair.g(sx, sy) == f.mul(sr, pair.g(x, y)), "second component bidegree")
        })
        .map_err(|e| e.to_string())
}

fn group_element(f: &FieldCtx, raw: &[u32]) -> Option<GGroupElement> {
    let a = el(f, raw[0]);
    let mat: Coeffs = [el(f, raw[1]), el(f, raw[2]), el(f, raw[3]), el(f, raw[4])];
    (!a.is_zero() && !det(f, &mat).is_zero()).then_some(GGroupElement { a, mat })
}

fn projectively_rootless(f: &FieldCtx, k: u32, p: &Coeffs) -> bool {
    !p[0].is_zero() && is_rootless(f, k, p)
}

/// Action laws: identity, compatibility with composition, pointwise
/// meaning, and preservation of rootlessness.
pub fn g_action_laws() -> Result<(), String> {
    runner()
        .run(&(2..=6u32, 1u32..6, any::<[u32; 16]>()), |(m, k, raw)| {
            let f = ctx(m);
            let k = k % m;
            let p: Coeffs = [el(&f, raw[0]), el(&f, raw[1]), el(&f, raw[2]), el(&f, raw[3])];
            let poly = ProjectivePolynomial::new(f.clone(), k, p).unwrap();
            let (Some(g), Some(h)) = (group_element(&f, &raw[4..9]), group_element(&f, &raw[9..14])) else {
                return Ok(());
            };
            check(g_action(&GGroupElement::identity(), &poly).unwrap() == poly, "identity acts trivially")?;
            let lhs = g_action(&g.compose(&f, &h), &poly).unwrap();
            let rhs = g_action(&g, &g_action(&h, &poly).unwrap()).unwrap();
            check(lhs == rhs, "compatibility")?;
            let gp = g_action(&g, &poly).unwrap();
            let (x, y) = (el(&f, raw[14]), el(&f, raw[15]));
            let [c1, c2, c3, c4] = g.mat;
            let direct = f.mul(g.a, poly.eval(f.mul(c1, x) + f.mul(c2, y), f.mul(c3, x) + f.mul(c4, y)));
            check(eval_form(&f, k, &gp.p, x, y) == direct, "pointwise meaning")?;
            check(
                projectively_rootless(&f, k, &p) == projectively_rootless(&f, k, &gp.p),
                "rootlessness preserved",
            )
        })
        .map_err(|e| e.to_string())
}

/// Every component of an arbitrary function satisfies Parseval.
pub fn parseval() -> Result<(), String> {
    runner()
        .run(&(1..=3u32, proptest::collection::vec(any::<u32>(), 64)), |(half, raw)| {
            let n = 2 * half;
            let mask = (1u32 << n) - 1;
            let values: Vec<u32> = raw[..1 << n].iter().map(|v| v & mask).collect();
            let table = TruthTable::new(n, 0, values).unwrap();
            let want = 1i128 << (2 * n);
            check(parseval_sums(&table).iter().all(|&s| s == want), "sum of squares is 2^{2n}")
        })
        .map_err(|e| e.to_string())
}

//! Walsh coefficients, extended Walsh spectra and image profiles.
//!
//! The inner product on M x M is Tr(u1 v1 + u2 v2). Since Tr(b v) is linear
//! in v, it equals parity(v & w(b)) for a mask w(b) with bit i = Tr(b e_i).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::apn::TruthTable;
use crate::error::{Error, Result};
use crate::field::{FieldCtx, ProductElement};

/// Largest n for the full spectrum (2^n transforms of size 2^n).
pub const MAX_SPECTRUM_N: u32 = 14;

/// Bit i is Tr(b * x^i).
pub fn trace_mask_of(ctx: &FieldCtx, b: crate::field::FieldElement) -> u32 {
    (0..ctx.m()).fold(0, |acc, i| acc | (ctx.abs_trace(ctx.mul(b, crate::field::FieldElement(1 << i))) << i))
}

/// Packed mask for the pairing with (b1, b2).
pub fn pairing_mask(ctx: &FieldCtx, b: ProductElement) -> u32 {
    (trace_mask_of(ctx, b.x) << ctx.m()) | trace_mask_of(ctx, b.y)
}

/// W_F(b, a) by direct summation.
pub fn walsh_coefficient(ctx: &FieldCtx, table: &TruthTable, b: ProductElement, a: ProductElement) -> i64 {
    let wb = pairing_mask(ctx, b);
    let wa = pairing_mask(ctx, a);
    table
        .values
        .iter()
        .enumerate()
        .map(|(x, &v)| if ((v & wb) ^ (x as u32 & wa)).count_ones() % 2 == 0 { 1 } else { -1 })
        .sum()
}

/// In-place fast Walsh-Hadamard transform.
pub fn fwht(v: &mut [i64]) {
    let mut h = 1;
    while h < v.len() {
        for chunk in v.chunks_mut(2 * h) {
            let (lo, hi) = chunk.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*a + *b, *a - *b);
                *a = s;
                *b = d;
            }
        }
        h *= 2;
    }
}

/// The transform of the component with packed output mask `w`: entry at
/// packed input mask `u` is sum_x (-1)^{parity(F(x) & w) + parity(x & u)}.
pub fn component_transform(table: &TruthTable, w: u32) -> Vec<i64> {
    let mut v: Vec<i64> = table.values.iter().map(|&y| if (y & w).count_ones() % 2 == 0 { 1 } else { -1 }).collect();
    fwht(&mut v);
    v
}

/// |W| -> multiplicity over b != 0 and all a.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WalshSpectrum {
    pub n: u32,
    pub values: BTreeMap<u64, u64>,
}

#[derive(Serialize)]
struct SpectrumEntry {
    abs_w: u64,
    count: u64,
}

#[derive(Serialize)]
struct SpectrumJson {
    n: u32,
    values: Vec<SpectrumEntry>,
    classical: bool,
}

impl WalshSpectrum {
    pub fn total(&self) -> u64 {
        self.values.values().sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = SpectrumJson {
            n: self.n,
            values: self.values.iter().map(|(&abs_w, &count)| SpectrumEntry { abs_w, count }).collect(),
            classical: is_classical(self),
        };
        serde_json::to_value(doc).expect("spectrum serializes")
    }
}

/// Extended Walsh spectrum. Every nonzero component mask corresponds to
/// exactly one b != 0, so iterating masks is iterating b.
pub fn extended_walsh_spectrum(table: &TruthTable) -> Result<WalshSpectrum> {
    let n = table.n;
    if n > MAX_SPECTRUM_N {
        return Err(Error::TooLarge(format!("spectrum needs n <= {MAX_SPECTRUM_N}, got {n}")));
    }
    let values = (1u32..1 << n)
        .into_par_iter()
        .fold(BTreeMap::new, |mut hist: BTreeMap<u64, u64>, w| {
            for c in component_transform(table, w) {
                *hist.entry(c.unsigned_abs()).or_insert(0) += 1;
            }
            hist
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    Ok(WalshSpectrum { n, values })
}

/// Sum of squares of the transform for each nonzero component mask; all
/// equal 2^{2n} by Parseval.
pub fn parseval_sums(table: &TruthTable) -> Vec<i128> {
    (1u32..1 << table.n)
        .into_par_iter()
        .map(|w| component_transform(table, w).iter().map(|&c| (c as i128) * (c as i128)).sum())
        .collect()
}

/// The classical multiplicities for {0, 2^{n/2}, 2^{(n+2)/2}}.
pub fn classical_triple(n: u32) -> [(u64, u64); 3] {
    let s = 1u64 << n;
    [
        (0, (s - 1) * (s >> 2)),
        (1 << (n / 2), 2 * (s - 1) * s / 3),
        (1 << (n / 2 + 1), (s - 1) * (s >> 2) / 3),
    ]
}

pub fn is_classical(spec: &WalshSpectrum) -> bool {
    if spec.n % 2 == 1 || spec.n < 2 {
        return false;
    }
    let want: BTreeMap<u64, u64> = classical_triple(spec.n).into_iter().collect();
    spec.values == want
}

/// Preimage counts of a table.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ImageProfile {
    /// preimage count -> number of image values with that count
    pub histogram: BTreeMap<u64, u64>,
    pub zero_preimages: u64,
}

pub fn image_profile(table: &TruthTable) -> ImageProfile {
    let mut counts = vec![0u64; table.len()];
    for &v in &table.values {
        counts[v as usize] += 1;
    }
    let mut histogram = BTreeMap::new();
    for &c in counts.iter().filter(|&&c| c > 0) {
        *histogram.entry(c).or_insert(0) += 1;
    }
    ImageProfile { histogram, zero_preimages: counts[0] }
}

/// F(0) = 0 has the single preimage 0 and every nonzero value in the image
/// has exactly three preimages.
pub fn three_to_one_check(table: &TruthTable) -> bool {
    let prof = image_profile(table);
    table.values[0] == 0
        && prof.zero_preimages == 1
        && prof.histogram.iter().all(|(&c, _)| c == 3 || c == 1)
        && prof.histogram.get(&1) == Some(&1)
}

/// F(0) = 0 and every nonzero image value has at least three preimages.
pub fn at_least_three_preimages(table: &TruthTable) -> bool {
    let mut counts = vec![0u64; table.len()];
    for &v in &table.values {
        counts[v as usize] += 1;
    }
    table.values[0] == 0 && counts.iter().skip(1).all(|&c| c == 0 || c >= 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apn::to_truth_table;
    use crate::biproj::BiprojectivePair;
    use crate::field::FieldElement as Fe;

    const O: Fe = Fe::ZERO;
    const I: Fe = Fe::ONE;

    fn gold3() -> (std::sync::Arc<FieldCtx>, TruthTable) {
        let ctx = FieldCtx::new(3).unwrap();
        let pair = BiprojectivePair::new(ctx.clone(), 1, 1, [O, I, I, O], [I, O, I, I]).unwrap();
        let t = to_truth_table(&pair).unwrap();
        (ctx, t)
    }

    #[test]
    fn fast_transform_matches_direct_sum() {
        let (ctx, t) = gold3();
        let m = ctx.m();
        for bi in 1..64usize {
            let b = ProductElement::from_index(bi, m);
            let fast = component_transform(&t, pairing_mask(&ctx, b));
            for ai in 0..64usize {
                let a = ProductElement::from_index(ai, m);
                let wa = pairing_mask(&ctx, a);
                assert_eq!(fast[wa as usize], walsh_coefficient(&ctx, &t, b, a));
            }
        }
    }

    #[test]
    fn gold_spectrum_and_classical() {
        let (_, t) = gold3();
        let spec = extended_walsh_spectrum(&t).unwrap();
        assert_eq!(spec.values, BTreeMap::from([(0, 1008), (8, 2688), (16, 336)]));
        assert!(is_classical(&spec));
        assert_eq!(spec.total(), 63 * 64);
        assert!(parseval_sums(&t).iter().all(|&s| s == 1 << 12));
        let js = spec.to_json();
        assert_eq!(js["classical"], true);
        assert_eq!(js["values"][1]["abs_w"], 8);
    }

    #[test]
    fn zero_function() {
        let t = TruthTable::new(6, 0xb, vec![0; 64]).unwrap();
        let spec = extended_walsh_spectrum(&t).unwrap();
        assert!(!is_classical(&spec));
        assert!(!three_to_one_check(&t));
        let (ctx, _) = gold3();
        assert_eq!(walsh_coefficient(&ctx, &t, ProductElement::new(I, O), ProductElement::ZERO), 64);
    }

    #[test]
    fn classical_triple_sums() {
        for n in [2u32, 4, 6, 8, 10, 12] {
            let s = 1u64 << n;
            let t = classical_triple(n);
            assert_eq!(t.iter().map(|x| x.1).sum::<u64>(), (s - 1) * s);
            assert_eq!(t.iter().map(|x| x.1 * x.0 * x.0).sum::<u64>(), (s - 1) * s * s);
        }
    }
}

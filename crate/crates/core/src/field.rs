//! Arithmetic in GF(2^m) in a polynomial basis, plus the product space
//! GF(2^m) x GF(2^m) on which biprojective pairs live.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest extension degree supported.
pub const MAX_M: u32 = 32;

/// Largest degree that gets log/antilog tables.
pub const TABLE_MAX_M: u32 = 16;

/// Lexicographically least irreducible polynomial of degree m, indexed by m.
/// Bit i is the coefficient of x^i.
pub const DEFAULT_POLYS: [u64; 33] = [
    0, 0x2, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11b, 0x203, 0x409, 0x805, 0x1009, 0x201b,
    0x4021, 0x8003, 0x1002b, 0x20009, 0x40009, 0x80027, 0x100009, 0x200005, 0x400003,
    0x800021, 0x100001b, 0x2000009, 0x400001b, 0x8000027, 0x10000003, 0x20000005, 0x40000003,
    0x80000009, 0x10000008d,
];

/// An element of GF(2^m): its coefficient vector in the polynomial basis.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;
    #[inline]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl std::ops::AddAssign for FieldElement {
    #[inline]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

/// A point (x, y) of GF(2^m) x GF(2^m).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct ProductElement {
    pub x: FieldElement,
    pub y: FieldElement,
}

impl ProductElement {
    pub const ZERO: ProductElement = ProductElement { x: FieldElement::ZERO, y: FieldElement::ZERO };

    #[inline]
    pub fn new(x: FieldElement, y: FieldElement) -> Self {
        ProductElement { x, y }
    }

    /// Truth-table index `x_bits * 2^m + y_bits`.
    #[inline]
    pub fn index(self, m: u32) -> usize {
        ((self.x.0 as usize) << m) | self.y.0 as usize
    }

    #[inline]
    pub fn from_index(index: usize, m: u32) -> Self {
        let mask = (1usize << m) - 1;
        ProductElement {
            x: FieldElement((index >> m) as u32),
            y: FieldElement((index & mask) as u32),
        }
    }

    #[inline]
    pub fn add(self, other: ProductElement) -> ProductElement {
        ProductElement { x: self.x + other.x, y: self.y + other.y }
    }
}

/// gcd values of the form gcd(2^e +- 1, 2^m - 1) used to validate the F4 family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GcdExponentFacts {
    pub m: u32,
    pub k: u32,
    /// l = k + m/2, so r = 2^l.
    pub l: u32,
    pub q_plus_1: u64,
    pub r_minus_1: u64,
    pub q2_minus_1: u64,
    pub q_minus_1: u64,
    pub r_plus_1: u64,
    /// gcd(q + 1, Q - 1) with Q = 2^{m/2}.
    pub q_plus_1_subfield: u64,
}

/// Carry-less product of two polynomials over F_2 whose product fits in 64 bits.
#[inline]
pub(crate) fn clmul(a: u64, b: u64) -> u64 {
    let mut r = 0u64;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 != 0 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
    }
    r
}

#[inline]
fn degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn poly_mod(mut a: u64, p: u64) -> u64 {
    let dp = degree(p);
    while a != 0 && degree(a) >= dp {
        a ^= p << (degree(a) - dp);
    }
    a
}

fn poly_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = poly_mod(a, b);
        a = b;
        b = r;
    }
    a
}

fn poly_mulmod(a: u64, b: u64, p: u64) -> u64 {
    // operands have degree < deg p <= 32, so the product fits in 64 bits
    poly_mod(clmul(a, b), p)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test: p of degree m is irreducible iff x^{2^m} = x mod p and
/// gcd(x^{2^{m/s}} - x, p) = 1 for every prime s dividing m.
pub fn is_irreducible(p: u64) -> bool {
    let m = degree(p);
    if m < 1 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let m = m as u32;
    let x = 2u64;
    let frob = |d: u32| {
        let mut t = x;
        for _ in 0..d {
            t = poly_mulmod(t, t, p);
        }
        t
    };
    if frob(m) != x {
        return false;
    }
    prime_factors(m as u64)
        .into_iter()
        .all(|s| poly_gcd(p, frob(m / s as u32) ^ x) == 1)
}

/// Least irreducible polynomial of degree m, by exhaustive search.
pub fn least_irreducible(m: u32) -> u64 {
    let mut p = 1u64 << m;
    while !is_irreducible(p) {
        p += 1;
    }
    p
}

/// Integer gcd.
pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    prime_factors(n).into_iter().fold(n, |acc, p| acc / p * (p - 1))
}

/// gcd(2^a - 1, 2^b - 1) = 2^gcd(a,b) - 1, for a, b >= 1.
fn gcd_pow2_minus(a: u32, b: u32) -> u64 {
    (1u64 << gcd_u64(a as u64, b as u64)) - 1
}

/// gcd(2^a + 1, 2^b - 1): 1 when b / gcd(a,b) is odd, else 2^gcd(a,b) + 1.
fn gcd_pow2_plus(a: u32, b: u32) -> u64 {
    let g = gcd_u64(a as u64, b as u64) as u32;
    if (b / g) % 2 == 1 {
        1
    } else {
        (1u64 << g) + 1
    }
}

/// Exponent reduction for gcds against 2^m - 1: 2^e = 2^{e mod m} there.
fn red(e: u32, m: u32) -> u32 {
    let r = e % m;
    if r == 0 {
        m
    } else {
        r
    }
}

/// The gcd facts for the F4 exponents q = 2^k, r = 2^{k + m/2}.
pub fn gcd_exponent_facts(m: u32, k: u32) -> Result<GcdExponentFacts> {
    if m % 4 != 2 {
        return Err(Error::Domain(format!("gcd facts need m = 2 mod 4, got m = {m}")));
    }
    if k == 0 || gcd_u64(k as u64, m as u64) != 1 {
        return Err(Error::Domain(format!("gcd facts need gcd(k, m) = 1, got k = {k}, m = {m}")));
    }
    let half = m / 2;
    let l = (k + half) % m;
    Ok(GcdExponentFacts {
        m,
        k,
        l,
        q_plus_1: gcd_pow2_plus(red(k, m), m),
        r_minus_1: gcd_pow2_minus(red(l, m), m),
        q2_minus_1: gcd_pow2_minus(red(2 * k, m), m),
        q_minus_1: gcd_pow2_minus(red(k, m), m),
        r_plus_1: gcd_pow2_plus(red(l, m), m),
        q_plus_1_subfield: gcd_pow2_plus(red(k, half), half),
    })
}

/// Arithmetic context for GF(2^m). Immutable once built.
pub struct FieldCtx {
    m: u32,
    poly: u64,
    mask: u32,
    order: u64,
    generator: FieldElement,
    trace_mask: u32,
    log: Vec<u32>,
    exp: Vec<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("m", &self.m)
            .field("poly", &format_args!("{:#x}", self.poly))
            .field("tables", &!self.log.is_empty())
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.poly == other.poly
    }
}

impl Eq for FieldCtx {}

impl FieldCtx {
    /// Context with the default defining polynomial for `m`.
    pub fn new(m: u32) -> Result<Arc<FieldCtx>> {
        if m == 0 || m > MAX_M {
            return Err(Error::Domain(format!("extension degree must be in 1..={MAX_M}, got {m}")));
        }
        Self::with_poly(m, DEFAULT_POLYS[m as usize])
    }

    /// Context for an explicit defining polynomial (bit mask with bit m set).
    pub fn with_poly(m: u32, poly: u64) -> Result<Arc<FieldCtx>> {
        if m == 0 || m > MAX_M {
            return Err(Error::Domain(format!("extension degree must be in 1..={MAX_M}, got {m}")));
        }
        if degree(poly) != m as i32 {
            return Err(Error::Domain(format!("polynomial {poly:#x} does not have degree {m}")));
        }
        if !is_irreducible(poly) {
            return Err(Error::Domain(format!("polynomial {poly:#x} is reducible")));
        }
        let mask = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
        let order = (1u64 << m) - 1;
        let mut ctx = FieldCtx {
            m,
            poly,
            mask,
            order,
            generator: FieldElement::ONE,
            trace_mask: 0,
            log: Vec::new(),
            exp: Vec::new(),
        };
        ctx.generator = ctx.find_generator();
        if m <= TABLE_MAX_M {
            ctx.build_tables();
        }
        ctx.trace_mask = (0..m)
            .filter(|&i| ctx.trace_slow(FieldElement(1 << i)))
            .fold(0u32, |acc, i| acc | (1 << i));
        Ok(Arc::new(ctx))
    }

    /// Context from a config override map (m -> polynomial), falling back to
    /// the default table.
    pub fn from_config(m: u32, config: &FieldConfig) -> Result<Arc<FieldCtx>> {
        match config.polys.get(&m) {
            Some(&p) => Self::with_poly(m, p),
            None => Self::new(m),
        }
    }

    fn find_generator(&self) -> FieldElement {
        if self.m == 1 {
            return FieldElement::ONE;
        }
        let factors = prime_factors(self.order);
        (2..=self.mask)
            .map(FieldElement)
            .find(|&g| factors.iter().all(|&p| self.pow_slow(g, self.order / p) != FieldElement::ONE))
            .expect("multiplicative group is cyclic")
    }

    fn build_tables(&mut self) {
        let n = self.order as usize;
        let mut log = vec![0u32; n + 1];
        let mut exp = vec![0u32; 2 * n];
        let mut cur = FieldElement::ONE;
        for i in 0..n {
            exp[i] = cur.0;
            exp[i + n] = cur.0;
            log[cur.0 as usize] = i as u32;
            cur = self.mul_slow(cur, self.generator);
        }
        self.log = log;
        self.exp = exp;
    }

    #[inline]
    fn mul_slow(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let prod = clmul(a.0 as u64, b.0 as u64);
        FieldElement(self.reduce(prod))
    }

    #[inline]
    fn reduce(&self, mut v: u64) -> u32 {
        let m = self.m as i32;
        while v >> self.m != 0 {
            let d = degree(v);
            v ^= self.poly << (d - m);
        }
        v as u32
    }

    fn pow_slow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    fn trace_slow(&self, a: FieldElement) -> bool {
        let mut t = a;
        let mut acc = FieldElement::ZERO;
        for _ in 0..self.m {
            acc += t;
            t = self.mul_slow(t, t);
        }
        debug_assert!(acc.0 <= 1);
        acc.0 == 1
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn poly(&self) -> u64 {
        self.poly
    }

    /// Number of field elements, 2^m.
    #[inline]
    pub fn size(&self) -> u64 {
        1u64 << self.m
    }

    /// Order of the multiplicative group, 2^m - 1.
    #[inline]
    pub fn order(&self) -> u64 {
        self.order
    }

    #[inline]
    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    #[inline]
    pub fn has_tables(&self) -> bool {
        !self.log.is_empty()
    }

    /// All elements in increasing bit order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.size()).map(|v| FieldElement(v as u32))
    }

    /// All nonzero elements in increasing bit order.
    pub fn nonzero(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (1..self.size()).map(|v| FieldElement(v as u32))
    }

    #[inline]
    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 & !self.mask == 0
    }

    /// Builds an element, rejecting out-of-range bits.
    pub fn element(&self, bits: u32) -> Result<FieldElement> {
        let a = FieldElement(bits);
        if self.contains(a) {
            Ok(a)
        } else {
            Err(Error::Domain(format!("{bits:#x} is not an element of GF(2^{})", self.m)))
        }
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.log.is_empty() {
            return self.mul_slow(a, b);
        }
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let i = self.log[a.0 as usize] + self.log[b.0 as usize];
        FieldElement(self.exp[i as usize])
    }

    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        if self.log.is_empty() {
            return self.pow_slow(a, e);
        }
        let l = self.log[a.0 as usize] as u64;
        let i = ((l as u128 * e as u128) % self.order as u128) as usize;
        FieldElement(self.exp[i])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.inv_nonzero(a))
    }

    /// Inverse of a nonzero element; 0 maps to 0.
    #[inline]
    pub fn inv_nonzero(&self, a: FieldElement) -> FieldElement {
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        if self.log.is_empty() {
            return self.pow_slow(a, self.order - 1);
        }
        let l = self.log[a.0 as usize] as u64;
        FieldElement(self.exp[((self.order - l) % self.order) as usize])
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^{2^k}, with k taken mod m.
    #[inline]
    pub fn frobenius(&self, a: FieldElement, k: i64) -> FieldElement {
        let k = k.rem_euclid(self.m as i64) as u32;
        if k == 0 || a.0 == 0 {
            return a;
        }
        if self.log.is_empty() {
            let mut t = a;
            for _ in 0..k {
                t = self.mul_slow(t, t);
            }
            return t;
        }
        let l = self.log[a.0 as usize] as u64;
        let i = ((l << k) % self.order) as usize;
        FieldElement(self.exp[i])
    }

    /// Absolute trace to F_2.
    #[inline]
    pub fn abs_trace(&self, a: FieldElement) -> u32 {
        (a.0 & self.trace_mask).count_ones() & 1
    }

    /// Bit mask t with Tr(a) = parity(a & t).
    #[inline]
    pub fn trace_mask(&self) -> u32 {
        self.trace_mask
    }

    /// Whether a nonzero element is a cube. Every nonzero element is a cube
    /// when 3 does not divide 2^m - 1.
    pub fn is_cube(&self, a: FieldElement) -> Result<bool> {
        if a.0 == 0 {
            return Err(Error::Domain("is_cube is undefined at 0".into()));
        }
        if self.order % 3 != 0 {
            return Ok(true);
        }
        Ok(self.pow(a, self.order / 3) == FieldElement::ONE)
    }

    /// Whether a lies in the subfield GF(2^d); d must divide m.
    pub fn in_subfield(&self, a: FieldElement, d: u32) -> bool {
        self.frobenius(a, d as i64) == a
    }

    /// Writes nonzero x as c * g with c in GF(2^{m/2})^x and g^{Q+1} = 1,
    /// Q = 2^{m/2}; requires m = 2 mod 4.
    pub fn unit_decompose(&self, x: FieldElement) -> Result<(FieldElement, FieldElement)> {
        if self.m % 4 != 2 {
            return Err(Error::Domain(format!("unit decomposition needs m = 2 mod 4, got {}", self.m)));
        }
        if x.0 == 0 {
            return Err(Error::Domain("unit decomposition of 0".into()));
        }
        // x^{Q+1} = c^{Q+1} g^{Q+1} = c^2, so c is the square root of the norm
        let q = 1u64 << (self.m / 2);
        let norm = self.pow(x, q + 1);
        let c = self.frobenius(norm, self.m as i64 - 1);
        let g = self.mul(x, self.inv_nonzero(c));
        Ok((c, g))
    }
}

/// Defining-polynomial overrides read from a config file.
///
/// The file is TOML with a single `[polynomials]` table whose keys are
/// extension degrees and whose values are hex strings:
///
/// ```toml
/// [polynomials]
/// 6 = "0x5b"
/// 10 = "0x409"
/// ```
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FieldConfig {
    pub polys: BTreeMap<u32, u64>,
}

#[derive(Deserialize)]
struct RawConfig {
    #[serde(default)]
    polynomials: BTreeMap<String, String>,
}

impl FieldConfig {
    pub fn parse(text: &str) -> Result<FieldConfig> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut polys = BTreeMap::new();
        for (k, v) in raw.polynomials {
            let m: u32 = k.trim().parse().map_err(|_| Error::Parse(format!("bad degree key {k:?}")))?;
            let p = parse_hex_u64(&v)?;
            if degree(p) != m as i32 {
                return Err(Error::Parse(format!("polynomial {v} has wrong degree for m = {m}")));
            }
            if !is_irreducible(p) {
                return Err(Error::Parse(format!("polynomial {v} is reducible")));
            }
            polys.insert(m, p);
        }
        Ok(FieldConfig { polys })
    }

    pub fn load(path: &Path) -> Result<FieldConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
        Self::parse(&text)
    }
}

pub(crate) fn parse_hex_u64(s: &str) -> Result<u64> {
    let t = s.trim();
    let t = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
    u64::from_str_radix(t, 16).map_err(|_| Error::Parse(format!("bad hex value {s:?}")))
}

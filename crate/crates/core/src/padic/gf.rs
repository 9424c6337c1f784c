//! Finite fields `F_{p^k}` in a polynomial basis, and polynomials over them.
//!
//! These are the residue fields of the unramified rings in [`super::ring`].
//! Field elements are coefficient vectors of length `k` in the basis
//! `1, t, ..., t^{k-1}` where `t` is a root of the registry modulus.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::factor;

/// Residue-field element: coordinates in the polynomial basis.
pub type Fq = Vec<u64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueField {
    p: u64,
    degree: usize,
    /// Monic modulus, coefficients low to high, length `degree + 1`.
    modulus: Vec<u64>,
}

impl ResidueField {
    /// Returns the registry field of order `p^degree`.
    pub fn get(p: u64, degree: usize) -> Arc<ResidueField> {
        static REGISTRY: OnceLock<Mutex<HashMap<(u64, usize), Arc<ResidueField>>>> =
            OnceLock::new();
        let reg = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(f) = reg.lock().unwrap().get(&(p, degree)) {
            return f.clone();
        }
        let field = Arc::new(ResidueField::with_modulus(p, find_irreducible(p, degree)));
        reg.lock()
            .unwrap()
            .entry((p, degree))
            .or_insert(field)
            .clone()
    }

    /// Prime field `F_p` (modulus `t`).
    pub fn prime(p: u64) -> ResidueField {
        ResidueField::with_modulus(p, vec![0, 1])
    }

    /// Field with an explicit monic modulus; irreducibility is the caller's
    /// responsibility.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> ResidueField {
        assert!(
            (2..(1 << 31)).contains(&p),
            "residue characteristic out of range"
        );
        assert!(
            modulus.len() >= 2 && *modulus.last().unwrap() == 1,
            "modulus must be monic"
        );
        ResidueField {
            p,
            degree: modulus.len() - 1,
            modulus,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// `p^degree`.
    pub fn order(&self) -> BigUint {
        num_traits::pow(BigUint::from(self.p), self.degree)
    }

    pub fn zero(&self) -> Fq {
        vec![0; self.degree]
    }

    pub fn one(&self) -> Fq {
        self.from_u64(1)
    }

    pub fn from_u64(&self, c: u64) -> Fq {
        let mut v = self.zero();
        v[0] = c % self.p;
        v
    }

    pub fn from_i64(&self, c: i64) -> Fq {
        self.from_u64(c.rem_euclid(self.p as i64) as u64)
    }

    /// The generator `t` (for degree 1 this is the constant `0`).
    pub fn generator(&self) -> Fq {
        if self.degree == 1 {
            self.from_u64(self.p - self.modulus[0] % self.p)
        } else {
            let mut v = self.zero();
            v[1] = 1;
            v
        }
    }

    pub fn is_zero(&self, a: &Fq) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &Fq, b: &Fq) -> Fq {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x + self.p - y) % self.p)
            .collect()
    }

    pub fn neg(&self, a: &Fq) -> Fq {
        a.iter().map(|&x| (self.p - x) % self.p).collect()
    }

    pub fn scale(&self, a: &Fq, c: u64) -> Fq {
        a.iter().map(|&x| x * (c % self.p) % self.p).collect()
    }

    pub fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        let k = self.degree;
        let p = self.p;
        if k == 1 {
            return vec![a[0] * b[0] % p];
        }
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        self.reduce(prod)
    }

    fn reduce(&self, mut prod: Vec<u64>) -> Fq {
        let k = self.degree;
        let p = self.p;
        for i in (k..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..k {
                let m = self.modulus[j];
                if m != 0 {
                    prod[i - k + j] = (prod[i - k + j] + (p - c) * m) % p;
                }
            }
        }
        prod.truncate(k);
        prod.resize(k, 0);
        prod
    }

    pub fn pow(&self, a: &Fq, e: &BigUint) -> Fq {
        let mut r = self.one();
        for i in (0..e.bits()).rev() {
            r = self.mul(&r, &r);
            if e.bit(i) {
                r = self.mul(&r, a);
            }
        }
        r
    }

    pub fn pow_u64(&self, a: &Fq, e: u64) -> Fq {
        self.pow(a, &BigUint::from(e))
    }

    /// `a^p`.
    pub fn frobenius(&self, a: &Fq) -> Fq {
        self.pow_u64(a, self.p)
    }

    pub fn inv(&self, a: &Fq) -> Option<Fq> {
        if self.is_zero(a) {
            return None;
        }
        let e = self.order() - BigUint::from(2u32);
        Some(self.pow(a, &e))
    }

    /// Every element, in lexicographic order of coordinates (for brute force).
    pub fn elements(&self) -> impl Iterator<Item = Fq> + '_ {
        let total = self.p.pow(self.degree as u32);
        (0..total).map(move |mut idx| {
            let mut v = self.zero();
            for c in v.iter_mut() {
                *c = idx % self.p;
                idx /= self.p;
            }
            v
        })
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> Fq {
        (0..self.degree).map(|_| rng.gen_range(0..self.p)).collect()
    }

    /// Smallest `e >= 1` with `a^{p^e} = a`: the degree of the subfield
    /// generated by `a`.
    pub fn element_degree(&self, a: &Fq) -> usize {
        let mut b = self.frobenius(a);
        let mut e = 1;
        while &b != a {
            b = self.frobenius(&b);
            e += 1;
        }
        e
    }
}

/// Polynomial over a residue field, coefficients low to high, no trailing
/// zeros (the zero polynomial is empty).
pub type FqPoly = Vec<Fq>;

pub fn poly_trim(f: &ResidueField, mut a: FqPoly) -> FqPoly {
    while a.last().is_some_and(|c| f.is_zero(c)) {
        a.pop();
    }
    a
}

pub fn poly_degree(a: &FqPoly) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn poly_add(f: &ResidueField, a: &FqPoly, b: &FqPoly) -> FqPoly {
    let n = a.len().max(b.len());
    let z = f.zero();
    let out = (0..n)
        .map(|i| f.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    poly_trim(f, out)
}

pub fn poly_sub(f: &ResidueField, a: &FqPoly, b: &FqPoly) -> FqPoly {
    let n = a.len().max(b.len());
    let z = f.zero();
    let out = (0..n)
        .map(|i| f.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    poly_trim(f, out)
}

pub fn poly_mul(f: &ResidueField, a: &FqPoly, b: &FqPoly) -> FqPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    poly_trim(f, out)
}

/// Division with remainder by a nonzero polynomial.
pub fn poly_divrem(f: &ResidueField, a: &FqPoly, b: &FqPoly) -> (FqPoly, FqPoly) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = f.inv(b.last().unwrap()).unwrap();
    let db = b.len() - 1;
    let mut q = vec![f.zero(); r.len() - db];
    for i in (db..r.len()).rev() {
        let c = f.mul(&r[i], &lead_inv);
        if f.is_zero(&c) {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            let idx = i - db + j;
            r[idx] = f.sub(&r[idx], &f.mul(&c, bj));
        }
        q[i - db] = c;
    }
    r.truncate(db);
    (poly_trim(f, q), poly_trim(f, r))
}

pub fn poly_rem(f: &ResidueField, a: &FqPoly, b: &FqPoly) -> FqPoly {
    poly_divrem(f, a, b).1
}

pub fn poly_monic(f: &ResidueField, a: &FqPoly) -> FqPoly {
    match a.last() {
        None => Vec::new(),
        Some(l) => {
            let inv = f.inv(l).unwrap();
            a.iter().map(|c| f.mul(c, &inv)).collect()
        }
    }
}

/// Monic gcd (zero if both inputs vanish).
pub fn poly_gcd(f: &ResidueField, a: &FqPoly, b: &FqPoly) -> FqPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let r = poly_rem(f, &x, &y);
        x = y;
        y = r;
    }
    poly_monic(f, &x)
}

pub fn poly_eval(f: &ResidueField, a: &FqPoly, x: &Fq) -> Fq {
    let mut acc = f.zero();
    for c in a.iter().rev() {
        acc = f.add(&f.mul(&acc, x), c);
    }
    acc
}

pub fn poly_derivative(f: &ResidueField, a: &FqPoly) -> FqPoly {
    let out = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| f.scale(c, i as u64))
        .collect();
    poly_trim(f, out)
}

/// `base^e mod m`.
pub fn poly_powmod(f: &ResidueField, base: &FqPoly, e: &BigUint, m: &FqPoly) -> FqPoly {
    let mut r = poly_rem(f, &vec![f.one()], m);
    let b = poly_rem(f, base, m);
    for i in (0..e.bits()).rev() {
        r = poly_rem(f, &poly_mul(f, &r, &r), m);
        if e.bit(i) {
            r = poly_rem(f, &poly_mul(f, &r, &b), m);
        }
    }
    r
}

fn x_poly(f: &ResidueField) -> FqPoly {
    vec![f.zero(), f.one()]
}

/// Distinct roots of `a` in the field, sorted lexicographically.
///
/// Takes `gcd(a, X^q - X)` and splits it with Cantor–Zassenhaus (trace
/// splitting in characteristic 2). The splitting randomness is a fixed-seed
/// stream, so the output is deterministic.
pub fn poly_roots(f: &ResidueField, a: &FqPoly) -> Vec<Fq> {
    let a = poly_trim(f, a.clone());
    let Some(deg) = poly_degree(&a) else {
        panic!("roots of the zero polynomial requested");
    };
    if deg == 0 {
        return Vec::new();
    }
    let a = poly_monic(f, &a);
    let xq = poly_powmod(f, &x_poly(f), &f.order(), &a);
    let split = poly_gcd(f, &a, &poly_sub(f, &xq, &x_poly(f)));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut roots = Vec::new();
    split_linear(f, split, &mut rng, &mut roots);
    roots.sort();
    roots
}

fn split_linear(f: &ResidueField, g: FqPoly, rng: &mut ChaCha8Rng, out: &mut Vec<Fq>) {
    match g.len() {
        0 | 1 => return,
        2 => {
            // monic X + c
            out.push(f.neg(&g[0]));
            return;
        }
        _ => {}
    }
    loop {
        let a = f.random(rng);
        let lin = vec![a.clone(), f.one()];
        let h = if f.p() == 2 {
            // absolute trace of a*X
            let ax = vec![f.zero(), a];
            let mut t = poly_rem(f, &ax, &g);
            let mut acc = t.clone();
            for _ in 1..f.degree() {
                t = poly_rem(f, &poly_mul(f, &t, &t), &g);
                acc = poly_add(f, &acc, &t);
            }
            acc
        } else {
            let e = (f.order() - BigUint::one()) >> 1;
            let r = poly_powmod(f, &lin, &e, &g);
            poly_sub(f, &r, &vec![f.one()])
        };
        let d = poly_gcd(f, &g, &h);
        if d.len() > 1 && d.len() < g.len() {
            let (q, _) = poly_divrem(f, &g, &d);
            let q = poly_monic(f, &q);
            split_linear(f, d, rng, out);
            split_linear(f, q, rng, out);
            return;
        }
    }
}

/// Rabin's irreducibility test over `F_p`.
pub fn is_irreducible_fp(p: u64, m: &[u64]) -> bool {
    let fp = ResidueField::prime(p);
    let m: FqPoly = poly_trim(&fp, m.iter().map(|&c| vec![c % p]).collect());
    let Some(k) = poly_degree(&m) else {
        return false;
    };
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let x = x_poly(&fp);
    let pb = BigUint::from(p);
    // x^{p^i} mod m for i = 0..=k
    let mut pows = vec![poly_rem(&fp, &x, &m)];
    for i in 0..k {
        let next = poly_powmod(&fp, &pows[i], &pb, &m);
        pows.push(next);
    }
    if !poly_sub(&fp, &pows[k], &pows[0]).is_empty() {
        return false;
    }
    for (r, _) in factor(k as u64) {
        let e = k / r as usize;
        let g = poly_gcd(&fp, &m, &poly_sub(&fp, &pows[e], &x));
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Deterministic monic irreducible of the given degree: the first in the
/// enumeration `c_0 + c_1 p + ... + c_{k-1} p^{k-1} = 0, 1, 2, ...` (with
/// `t` itself for degree one).
pub fn find_irreducible(p: u64, degree: usize) -> Vec<u64> {
    assert!(degree >= 1);
    if degree == 1 {
        return vec![0, 1];
    }
    let mut idx: u128 = 0;
    loop {
        let mut m = Vec::with_capacity(degree + 1);
        let mut rest = idx;
        for _ in 0..degree {
            m.push((rest % p as u128) as u64);
            rest /= p as u128;
        }
        m.push(1);
        if m[0] != 0 && is_irreducible_fp(p, &m) {
            return m;
        }
        idx += 1;
    }
}

/// Image of the generator of `src` in `dst` under the registry embedding
/// (the smallest root of `src`'s modulus). Requires `src.degree | dst.degree`.
pub fn generator_image(src: &ResidueField, dst: &ResidueField) -> Option<Fq> {
    if src.p() != dst.p() || !dst.degree().is_multiple_of(src.degree()) {
        return None;
    }
    let m: FqPoly = src.modulus().iter().map(|&c| dst.from_u64(c)).collect();
    poly_roots(dst, &m).into_iter().next()
}

/// Images of the basis `1, t, ..., t^{k-1}` of `src` inside `dst`.
pub fn embedding_basis(src: &ResidueField, dst: &ResidueField) -> Option<Vec<Fq>> {
    let g = generator_image(src, dst)?;
    let mut out = vec![dst.one()];
    for i in 1..src.degree() {
        out.push(dst.mul(&out[i - 1], &g));
    }
    Some(out)
}

pub fn embed(dst: &ResidueField, basis: &[Fq], a: &Fq) -> Fq {
    let mut acc = dst.zero();
    for (c, b) in a.iter().zip(basis) {
        if *c != 0 {
            acc = dst.add(&acc, &dst.scale(b, *c));
        }
    }
    acc
}

//! Hilbert class polynomials with exact integer coefficients.
//!
//! `H_d(X) = prod_Q (X - j(tau_Q))` over reduced primitive forms, evaluated
//! in fixed point and rounded. The working precision is planned from
//! `log2 |j(tau_Q)| ~ pi sqrt|d| / (a ln 2)`; any coefficient farther than
//! `1/4` from an integer is a hard failure.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::bigfloat::{Complex, Fixed};
use super::forms::{reduced_forms, Discriminant, QuadraticForm};
use super::jfunc::{j_from_q, q_at_form};
use crate::error::{Error, Result};
use crate::padic::IntegerPolynomial;

pub const DEFAULT_MAX_ABS_D: u64 = 50_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertClassPolynomial {
    disc: Discriminant,
    poly: IntegerPolynomial,
}

impl HilbertClassPolynomial {
    pub fn discriminant(&self) -> &Discriminant {
        &self.disc
    }

    pub fn poly(&self) -> &IntegerPolynomial {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    /// Sum of the coefficients modulo `2^64`, as stored in cache files.
    pub fn checksum(&self) -> u64 {
        checksum(self.poly.coeffs())
    }
}

fn checksum(coeffs: &[BigInt]) -> u64 {
    let m = BigInt::from(1u128 << 64);
    let s: BigInt = coeffs.iter().sum();
    let r = ((s % &m) + &m) % &m;
    r.to_u64().unwrap()
}

#[derive(Clone, Debug)]
pub struct HilbertOptions {
    pub max_abs_d: u64,
    pub cache_dir: Option<PathBuf>,
}

impl Default for HilbertOptions {
    fn default() -> Self {
        HilbertOptions {
            max_abs_d: DEFAULT_MAX_ABS_D,
            cache_dir: None,
        }
    }
}

fn memory_cache() -> &'static Mutex<HashMap<i64, Arc<HilbertClassPolynomial>>> {
    static CACHE: OnceLock<Mutex<HashMap<i64, Arc<HilbertClassPolynomial>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn disk_lock() -> &'static Mutex<()> {
    static LOCK: OnceLock<Mutex<()>> = OnceLock::new();
    LOCK.get_or_init(|| Mutex::new(()))
}

pub fn hilbert_class_poly(d: &Discriminant) -> Result<Arc<HilbertClassPolynomial>> {
    hilbert_class_poly_with(d, &HilbertOptions::default())
}

pub fn hilbert_class_poly_with(
    d: &Discriminant,
    opts: &HilbertOptions,
) -> Result<Arc<HilbertClassPolynomial>> {
    if d.abs() > opts.max_abs_d {
        return Err(Error::Resource(format!(
            "|d| = {} exceeds the cap {}",
            d.abs(),
            opts.max_abs_d
        )));
    }
    if let Some(h) = memory_cache().lock().unwrap().get(&d.value()) {
        return Ok(h.clone());
    }
    if let Some(dir) = &opts.cache_dir {
        if let Some(h) = read_cache(dir, d)? {
            let h = Arc::new(h);
            memory_cache().lock().unwrap().insert(d.value(), h.clone());
            return Ok(h);
        }
    }
    let h = Arc::new(compute(d)?);
    if let Some(dir) = &opts.cache_dir {
        write_cache(dir, &h)?;
    }
    memory_cache().lock().unwrap().insert(d.value(), h.clone());
    Ok(h)
}

pub fn cache_path(dir: &Path, d: &Discriminant) -> PathBuf {
    dir.join(format!("hcp_{}.txt", d.abs()))
}

/// Serialized cache format: `d h`, the `h + 1` coefficients from the
/// constant term up, then the checksum.
pub fn to_cache_text(h: &HilbertClassPolynomial) -> String {
    let mut s = format!("{} {}\n", h.disc.value(), h.degree());
    for c in h.poly.coeffs() {
        s.push_str(&c.to_string());
        s.push('\n');
    }
    s.push_str(&h.checksum().to_string());
    s.push('\n');
    s
}

/// Parses a cache file; `None` if it is malformed or fails its checksum.
pub fn parse_cache_text(d: &Discriminant, text: &str) -> Option<HilbertClassPolynomial> {
    let mut lines = text.lines();
    let mut head = lines.next()?.split_whitespace();
    let dv: i64 = head.next()?.parse().ok()?;
    let h: usize = head.next()?.parse().ok()?;
    if dv != d.value() {
        return None;
    }
    let coeffs: Vec<BigInt> = (0..=h)
        .map(|_| lines.next().and_then(|l| l.trim().parse().ok()))
        .collect::<Option<_>>()?;
    let sum: u64 = lines.next()?.trim().parse().ok()?;
    if checksum(&coeffs) != sum || !coeffs[h].to_string().eq("1") {
        return None;
    }
    Some(HilbertClassPolynomial {
        disc: *d,
        poly: IntegerPolynomial::new(coeffs),
    })
}

fn read_cache(dir: &Path, d: &Discriminant) -> Result<Option<HilbertClassPolynomial>> {
    let _guard = disk_lock().lock().unwrap();
    let path = cache_path(dir, d);
    match fs::read_to_string(&path) {
        Ok(text) => Ok(parse_cache_text(d, &text)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn write_cache(dir: &Path, h: &HilbertClassPolynomial) -> Result<()> {
    let _guard = disk_lock().lock().unwrap();
    fs::create_dir_all(dir)?;
    let path = cache_path(dir, &h.disc);
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, to_cache_text(h))?;
    fs::rename(tmp, path)?;
    Ok(())
}

/// `log2 |1/q|` at the form's CM point.
fn log2_inv_q(f: &QuadraticForm, d: i64) -> f64 {
    std::f64::consts::PI * (d.unsigned_abs() as f64).sqrt() / (f.a as f64) / std::f64::consts::LN_2
}

/// Working fractional bits: coefficient size plus the loss in `j = 1/q`.
pub fn planned_bits(d: i64) -> u32 {
    let forms = reduced_forms(d);
    let size: f64 = forms.iter().map(|f| log2_inv_q(f, d) + 12.0).sum();
    let lmax = forms.iter().map(|f| log2_inv_q(f, d)).fold(0.0, f64::max);
    let h = forms.len() as f64;
    (size + 2.0 * lmax + 2.0 * (h + 1.0).log2() + 64.0).ceil() as u32
}

fn compute(d: &Discriminant) -> Result<HilbertClassPolynomial> {
    let dv = d.value();
    let forms = reduced_forms(dv);
    let bits = planned_bits(dv);
    // forms with b < 0 are conjugate to (a, -b, c); evaluate the rest
    let reps: Vec<QuadraticForm> = forms.iter().filter(|f| f.b >= 0).copied().collect();
    let values: Vec<Complex> = reps
        .par_iter()
        .map(|f| j_from_q(&q_at_form(f.a, f.b, dv, bits)))
        .collect();
    let mut poly = vec![Fixed::one(bits)];
    for (f, j) in reps.iter().zip(&values) {
        let ambiguous = f.b == 0 || f.b == f.a || f.a == f.c;
        if ambiguous {
            // real root
            poly = mul_poly(&poly, &[-&j.re, Fixed::one(bits)]);
        } else {
            let tr = j.re.mul_int(&BigInt::from(-2));
            poly = mul_poly(&poly, &[j.norm_sqr(), tr, Fixed::one(bits)]);
        }
    }
    let mut coeffs = Vec::with_capacity(poly.len());
    for (i, c) in poly.iter().enumerate() {
        let (n, err) = c.round();
        if err > 0.25 {
            return Err(Error::PrecisionFailure(format!(
                "coefficient {i} of H_{dv} is {err:.3} from an integer at {bits} bits"
            )));
        }
        coeffs.push(n);
    }
    let poly = IntegerPolynomial::new(coeffs);
    if poly.degree() != Some(forms.len()) || !poly.is_monic() {
        return Err(Error::PrecisionFailure(format!(
            "H_{dv} lost its leading term"
        )));
    }
    Ok(HilbertClassPolynomial { disc: *d, poly })
}

fn mul_poly(a: &[Fixed], b: &[Fixed]) -> Vec<Fixed> {
    let bits = a[0].bits;
    let mut out = vec![Fixed::zero(bits); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    out
}

/// Clears the in-memory polynomial cache (used by tests of the disk cache).
pub fn clear_memory_cache() {
    memory_cache().lock().unwrap().clear();
}

/// Whether `H_d` is already held in memory.
pub fn is_memoized(d: &Discriminant) -> bool {
    memory_cache().lock().unwrap().contains_key(&d.value())
}

impl HilbertClassPolynomial {
    /// Builds a record from known coefficients (constant term first).
    pub fn from_coefficients(d: &Discriminant, coeffs: Vec<BigInt>) -> Result<Self> {
        let poly = IntegerPolynomial::new(coeffs);
        if !poly.is_monic() || poly.coeffs().iter().all(|c| c.is_zero()) {
            return Err(Error::Domain("class polynomial must be monic".into()));
        }
        Ok(HilbertClassPolynomial { disc: *d, poly })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(d: i64) -> Arc<HilbertClassPolynomial> {
        hilbert_class_poly(&Discriminant::new(d).unwrap()).unwrap()
    }

    #[test]
    fn small_discriminants() {
        assert_eq!(h(-3).poly(), &IntegerPolynomial::from_i64(&[0, 1]));
        assert_eq!(h(-4).poly(), &IntegerPolynomial::from_i64(&[-1728, 1]));
        assert_eq!(h(-7).poly(), &IntegerPolynomial::from_i64(&[3375, 1]));
        assert_eq!(h(-8).poly(), &IntegerPolynomial::from_i64(&[-8000, 1]));
        assert_eq!(h(-11).poly(), &IntegerPolynomial::from_i64(&[32768, 1]));
        assert_eq!(h(-12).poly(), &IntegerPolynomial::from_i64(&[-54000, 1]));
        assert_eq!(
            h(-163).poly(),
            &IntegerPolynomial::from_i64(&[262537412640768000, 1])
        );
    }

    #[test]
    fn h_minus_15_and_23() {
        // X^2 + 191025 X - 121287375
        assert_eq!(
            h(-15).poly(),
            &IntegerPolynomial::from_i64(&[-121287375, 191025, 1])
        );
        // X^3 + 3491750 X^2 - 5151296875 X + 12771880859375
        assert_eq!(
            h(-23).poly(),
            &IntegerPolynomial::from_i64(&[12771880859375, -5151296875, 3491750, 1])
        );
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d = Discriminant::new(-47).unwrap();
        let opts = HilbertOptions {
            cache_dir: Some(dir.path().to_path_buf()),
            ..Default::default()
        };
        let a = hilbert_class_poly_with(&d, &opts).unwrap();
        let text = fs::read_to_string(cache_path(dir.path(), &d)).unwrap();
        assert_eq!(parse_cache_text(&d, &text).unwrap(), *a);
        // a corrupted checksum is rejected
        let bad = text.replacen('\n', "\n1", 2);
        assert!(parse_cache_text(&d, &bad).is_none());
    }

    #[test]
    fn cap_is_enforced() {
        let opts = HilbertOptions {
            max_abs_d: 100,
            cache_dir: None,
        };
        let e = hilbert_class_poly_with(&Discriminant::new(-103).unwrap(), &opts).unwrap_err();
        assert!(matches!(e, Error::Resource(_)));
    }
}

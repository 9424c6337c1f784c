//! Imaginary quadratic discriminants, binary quadratic forms and class groups.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{isqrt, kronecker};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Discriminant {
    value: i64,
    fundamental: bool,
    conductor: u64,
}

impl Discriminant {
    pub fn new(d: i64) -> Result<Discriminant> {
        if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
            return Err(Error::Domain(format!("{d} is not a negative discriminant")));
        }
        // d = d0 f^2 with d0 fundamental: the largest such f
        let mut best = 1u64;
        let n = d.unsigned_abs();
        let mut g = 1u64;
        while g * g <= n {
            if n.is_multiple_of(g * g) {
                let q = d / (g * g) as i64;
                if matches!(q.rem_euclid(4), 0 | 1) {
                    best = g;
                }
            }
            g += 1;
        }
        Ok(Discriminant {
            value: d,
            fundamental: best == 1,
            conductor: best,
        })
    }

    pub fn value(&self) -> i64 {
        self.value
    }

    pub fn abs(&self) -> u64 {
        self.value.unsigned_abs()
    }

    pub fn is_fundamental(&self) -> bool {
        self.fundamental
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn fundamental_part(&self) -> i64 {
        self.value / (self.conductor * self.conductor) as i64
    }

    /// Number of units of the order: 6, 4 or 2.
    pub fn units(&self) -> u64 {
        match self.value {
            -3 => 6,
            -4 => 4,
            _ => 2,
        }
    }

    pub fn kronecker(&self, n: u64) -> i32 {
        kronecker(self.value, n)
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// `a x^2 + b x y + c y^2` with `a > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadraticForm {
    pub fn new(a: i64, b: i64, c: i64) -> QuadraticForm {
        QuadraticForm { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// The form `(1, d mod 2, ...)`.
    pub fn principal(d: i64) -> QuadraticForm {
        let b = d.rem_euclid(2);
        QuadraticForm::new(1, b, (b * b - d) / 4)
    }

    pub fn is_reduced(&self) -> bool {
        let QuadraticForm { a, b, c } = *self;
        b.abs() <= a && a <= c && !(b < 0 && (b.abs() == a || a == c))
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    pub fn reduce(&self) -> QuadraticForm {
        let QuadraticForm {
            mut a,
            mut b,
            mut c,
        } = *self;
        assert!(
            a > 0 && self.discriminant() < 0,
            "reduction needs a positive definite form"
        );
        loop {
            // normalize b into (-a, a]
            if b > a || b <= -a {
                let two_a = 2 * a;
                let k = Integer::div_floor(&(a - b), &two_a);
                let nb = b + two_a * k;
                c = ((nb as i128 * nb as i128 - self.discriminant() as i128) / (4 * a as i128))
                    as i64;
                b = nb;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            return QuadraticForm { a, b, c };
        }
    }

    pub fn inverse(&self) -> QuadraticForm {
        QuadraticForm::new(self.a, -self.b, self.c).reduce()
    }

    /// Dirichlet composition, reduced.
    pub fn compose(&self, other: &QuadraticForm) -> QuadraticForm {
        let d = self.discriminant();
        assert_eq!(
            d,
            other.discriminant(),
            "composition needs equal discriminants"
        );
        let (f1, f2) = if self.a > other.a {
            (other, self)
        } else {
            (self, other)
        };
        let (a1, b1) = (f1.a as i128, f1.b as i128);
        let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
        let s = (b1 + b2) / 2;
        let n = b2 - s;
        let (dd, y1) = if a2 % a1 == 0 {
            (a1, 0i128)
        } else {
            let e = a2.extended_gcd(&a1);
            (e.gcd, e.x)
        };
        let (d1, x2, y2) = if s % dd == 0 {
            (dd, 0i128, -1i128)
        } else {
            let e = s.extended_gcd(&dd);
            (e.gcd, e.x, -e.y)
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
        let b3 = b2 + 2 * v2 * r;
        let a3 = v1 * v2;
        let shrink = |x: i128| -> i64 { x.try_into().expect("form coefficients overflow i64") };
        // pre-reduce b3 modulo 2 a3 to keep c3 small
        let two_a = 2 * a3;
        let k = Integer::div_floor(&(a3 - b3), &two_a);
        let b3 = b3 + two_a * k;
        let c3 = (b3 * b3 - d as i128) / (4 * a3);
        QuadraticForm::new(shrink(a3), shrink(b3), shrink(c3)).reduce()
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// Number of `(x, y)` in `Z^2` with `Q(x, y) = m` (positive definite).
    pub fn representations(&self, m: u64) -> u64 {
        if m == 0 {
            return 1;
        }
        let d = self.discriminant().unsigned_abs() as u128;
        let a = self.a as i128;
        let b = self.b as i128;
        let m = m as i128;
        // 4a Q = (2ax + by)^2 + |d| y^2
        let ymax = isqrt(((4 * a * m) as u128 / d) as u64) as i128;
        let mut count = 0u64;
        for y in -ymax..=ymax {
            let disc = 4 * a * m - d as i128 * y * y;
            if disc < 0 {
                continue;
            }
            let s = isqrt(disc as u64) as i128;
            if s * s != disc {
                continue;
            }
            // 2a x = -b y +- s
            let roots: &[i128] = if s == 0 { &[0] } else { &[1, -1] };
            for sign in roots {
                let num = -b * y + sign * s;
                if num.rem_euclid(2 * a) == 0 {
                    count += 1;
                }
            }
        }
        count
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Reduced primitive forms of a discriminant with their composition law.
#[derive(Clone, Debug)]
pub struct ClassGroup {
    disc: Discriminant,
    forms: Vec<QuadraticForm>,
    index: HashMap<QuadraticForm, usize>,
    table: Vec<Vec<usize>>,
}

/// Reduced primitive forms of discriminant `d`, sorted.
pub fn reduced_forms(d: i64) -> Vec<QuadraticForm> {
    let n = d.unsigned_abs();
    let amax = isqrt(n / 3);
    let mut out = Vec::new();
    for a in 1..=amax as i64 {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = QuadraticForm::new(a, b, num / (4 * a));
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
    }
    out.sort();
    out
}

pub fn class_group(d: &Discriminant) -> ClassGroup {
    let forms = reduced_forms(d.value());
    let index: HashMap<_, _> = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let table = forms
        .iter()
        .map(|f| forms.iter().map(|g| index[&f.compose(g)]).collect())
        .collect();
    ClassGroup {
        disc: *d,
        forms,
        index,
        table,
    }
}

impl ClassGroup {
    pub fn discriminant(&self) -> &Discriminant {
        &self.disc
    }

    pub fn class_number(&self) -> usize {
        self.forms.len()
    }

    pub fn forms(&self) -> &[QuadraticForm] {
        &self.forms
    }

    pub fn identity(&self) -> usize {
        self.index[&QuadraticForm::principal(self.disc.value())]
    }

    pub fn index_of(&self, f: &QuadraticForm) -> Option<usize> {
        self.index.get(&f.reduce()).copied()
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn inv(&self, i: usize) -> usize {
        self.index[&self.forms[i].inverse()]
    }

    pub fn square(&self, i: usize) -> usize {
        self.mul(i, i)
    }

    pub fn order(&self, i: usize) -> usize {
        let e = self.identity();
        let mut x = i;
        let mut k = 1;
        while x != e {
            x = self.mul(x, i);
            k += 1;
        }
        k
    }

    pub fn elements_of_order_two(&self) -> Vec<usize> {
        (0..self.class_number())
            .filter(|&i| self.order(i) == 2)
            .collect()
    }

    /// Class of a prime ideal above the rational prime `l` (split or
    /// ramified), `None` when `l` is inert.
    pub fn prime_class(&self, l: u64) -> Option<usize> {
        let d = self.disc.value();
        if kronecker(d, l) == -1 {
            return None;
        }
        let l = l as i64;
        (0..2 * l)
            .find(|b| (b * b - d).rem_euclid(4 * l) == 0)
            .map(|b| {
                self.index_of(&QuadraticForm::new(l, b, (b * b - d) / (4 * l)))
                    .unwrap()
            })
    }
}

/// Number of integral ideals of norm `m` in the class with index `class`.
///
/// Counts all representations of `m` by a form of the class and divides by
/// the unit count. A form and its inverse represent every integer equally
/// often, so the class/inverse-class convention does not affect the value.
pub fn representation_count(group: &ClassGroup, class: usize, m: u64) -> Result<u64> {
    if !group.disc.is_fundamental() {
        return Err(Error::Precondition(format!(
            "ideal counts need a fundamental discriminant, got {}",
            group.disc
        )));
    }
    let r = group.forms[class].representations(m);
    let w = group.disc.units();
    debug_assert_eq!(r % w, 0);
    Ok(r / w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminants() {
        assert!(Discriminant::new(-3).unwrap().is_fundamental());
        assert!(Discriminant::new(-4).unwrap().is_fundamental());
        assert!(Discriminant::new(-8).unwrap().is_fundamental());
        let d = Discriminant::new(-12).unwrap();
        assert!(!d.is_fundamental());
        assert_eq!(d.conductor(), 2);
        assert_eq!(d.fundamental_part(), -3);
        assert_eq!(Discriminant::new(-16).unwrap().conductor(), 2);
        assert_eq!(Discriminant::new(-99).unwrap().conductor(), 3);
        assert!(Discriminant::new(-5).is_err());
        assert!(Discriminant::new(7).is_err());
    }

    #[test]
    fn known_class_numbers() {
        for (d, h) in [
            (-3, 1),
            (-4, 1),
            (-7, 1),
            (-11, 1),
            (-23, 3),
            (-47, 5),
            (-71, 7),
            (-163, 1),
            (-503, 21),
            (-59, 3),
            (-12, 1),
            (-20, 2),
            (-56, 4),
        ] {
            let g = class_group(&Discriminant::new(d).unwrap());
            assert_eq!(g.class_number(), h, "h({d})");
        }
    }

    #[test]
    fn composition_axioms() {
        let g = class_group(&Discriminant::new(-3299).unwrap());
        let h = g.class_number();
        let e = g.identity();
        for i in 0..h {
            assert_eq!(g.mul(i, e), i);
            assert_eq!(g.mul(i, g.inv(i)), e);
            for j in 0..h {
                assert_eq!(g.mul(i, j), g.mul(j, i));
            }
        }
        for i in 0..h.min(8) {
            for j in 0..h.min(8) {
                for k in 0..h.min(8) {
                    assert_eq!(g.mul(g.mul(i, j), k), g.mul(i, g.mul(j, k)));
                }
            }
        }
    }

    #[test]
    fn representation_examples() {
        let g = class_group(&Discriminant::new(-11).unwrap());
        let e = g.identity();
        assert_eq!(representation_count(&g, e, 1).unwrap(), 1);
        assert_eq!(representation_count(&g, e, 2).unwrap(), 0);
        assert_eq!(representation_count(&g, e, 3).unwrap(), 2);
        let g3 = class_group(&Discriminant::new(-3).unwrap());
        assert_eq!(representation_count(&g3, 0, 1).unwrap(), 1);
        assert_eq!(representation_count(&g3, 0, 3).unwrap(), 1);
        assert_eq!(representation_count(&g3, 0, 7).unwrap(), 2);
    }
}

//! Arithmetic and dense linear algebra over the prime field of order 2^61 - 1.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use rand::Rng;
use serde::{Deserialize, Serialize};

/// The Mersenne prime 2^61 - 1.
pub const MODULUS: u64 = (1 << 61) - 1;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fp(u64);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    pub fn new(x: u64) -> Fp {
        Fp(x % MODULUS)
    }

    pub fn from_i64(x: i64) -> Fp {
        let r = x.rem_euclid(MODULUS as i64);
        Fp(r as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Fp {
        Fp(rng.gen_range(0..MODULUS))
    }

    pub fn pow(self, mut e: u64) -> Fp {
        let (mut base, mut acc) = (self, Fp::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self) -> Fp {
        assert!(!self.is_zero(), "zero has no inverse");
        self.pow(MODULUS - 2)
    }
}

fn reduce(x: u128) -> u64 {
    let mut s = (x & MODULUS as u128) as u64 + (x >> 61) as u64;
    while s >= MODULUS {
        s -= MODULUS;
    }
    s
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        let s = self.0 + o.0;
        Fp(if s >= MODULUS { s - MODULUS } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        Fp(if self.0 >= o.0 { self.0 - o.0 } else { self.0 + MODULUS - o.0 })
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp::ZERO - self
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        Fp(reduce(self.0 as u128 * o.0 as u128))
    }
}

impl AddAssign for Fp {
    fn add_assign(&mut self, o: Fp) {
        *self = *self + o;
    }
}

impl SubAssign for Fp {
    fn sub_assign(&mut self, o: Fp) {
        *self = *self - o;
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Fp>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv();
        for x in m[r].iter_mut() {
            *x = *x * inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in c..cols {
                    let t = m[r][j] * f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Fp>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// A basis of `{x : A x = 0}` where `A` has `cols` columns.
pub fn nullspace(a: &[Vec<Fp>], cols: usize) -> Vec<Vec<Fp>> {
    let mut m = a.to_vec();
    let pivots = rref(&mut m);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = vec![Fp::ZERO; cols];
            x[f] = Fp::ONE;
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -m[r][f];
            }
            x
        })
        .collect()
}

/// Coefficients `c` with `sum c_i basis[i] = target`, if `target` lies in the
/// span. Unique when the basis rows are independent.
pub fn express(basis: &[Vec<Fp>], target: &[Fp]) -> Option<Vec<Fp>> {
    let k = basis.len();
    // Columns are the basis vectors followed by the target.
    let mut m: Vec<Vec<Fp>> = (0..target.len())
        .map(|j| {
            let mut row: Vec<Fp> = basis.iter().map(|b| b[j]).collect();
            row.push(target[j]);
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut c = vec![Fp::ZERO; k];
    for (r, &p) in pivots.iter().enumerate() {
        c[p] = m[r][k];
    }
    Some(c)
}

/// Incrementally maintained row space.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: Vec<(usize, Vec<Fp>)>,
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut [Fp]) {
        for (p, row) in &self.rows {
            let f = v[*p];
            if !f.is_zero() {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x -= y * f;
                }
            }
        }
    }

    pub fn contains(&self, v: &[Fp]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| x.is_zero())
    }

    /// Adds `v` and reports whether it was independent of the rows so far.
    pub fn insert(&mut self, v: &[Fp]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].inv();
        for x in w.iter_mut() {
            *x = *x * inv;
        }
        for (_, row) in self.rows.iter_mut() {
            let f = row[p];
            if !f.is_zero() {
                for (x, &y) in row.iter_mut().zip(&w) {
                    *x -= y * f;
                }
            }
        }
        self.rows.push((p, w));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> Vec<Fp> {
        xs.iter().map(|&x| Fp::from_i64(x)).collect()
    }

    #[test]
    fn arithmetic() {
        let a = Fp::new(MODULUS - 1);
        assert_eq!(a + Fp::ONE, Fp::ZERO);
        assert_eq!(-Fp::ONE, a);
        assert_eq!(a * a, Fp::ONE);
        assert_eq!(Fp::from_i64(-3) + Fp::new(3), Fp::ZERO);
        assert_eq!(Fp::new(12345).inv() * Fp::new(12345), Fp::ONE);
    }

    #[test]
    fn rank_and_nullspace() {
        let m = vec![v(&[1, 2, 3]), v(&[2, 4, 6]), v(&[0, 1, 1])];
        assert_eq!(rank(&m), 2);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 1);
        for row in &m {
            let dot = row.iter().zip(&ns[0]).fold(Fp::ZERO, |a, (&x, &y)| a + x * y);
            assert!(dot.is_zero());
        }
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn express_in_span() {
        let b = vec![v(&[1, 0, 1]), v(&[0, 1, 1])];
        assert_eq!(express(&b, &v(&[2, 3, 5])), Some(v(&[2, 3])));
        assert_eq!(express(&b, &v(&[0, 0, 1])), None);
    }

    #[test]
    fn echelon_matches_batch_rank() {
        let rows = vec![v(&[1, 2, 3]), v(&[2, 4, 6]), v(&[0, 1, 1]), v(&[1, 3, 4])];
        let mut e = Echelon::new();
        let flags: Vec<bool> = rows.iter().map(|r| e.insert(r)).collect();
        assert_eq!(flags, vec![true, false, true, false]);
        assert_eq!(e.rank(), rank(&rows));
        assert!(e.contains(&v(&[3, 7, 10])));
    }

    proptest! {
        #[test]
        fn field_axioms(a in 0..MODULUS, b in 0..MODULUS, c in 0..MODULUS) {
            let (a, b, c) = (Fp::new(a), Fp::new(b), Fp::new(c));
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!((a - b) + b, a);
            if !a.is_zero() {
                prop_assert_eq!(a * a.inv(), Fp::ONE);
            }
        }
    }
}

//! Scalar abstraction shared by the exact and floating code paths.
//!
//! [`Ring`] is enough for Schur functions in time variables and for
//! determinants (division-free expansion by default). [`Field`] adds division
//! and a magnitude, which the bialternant and the quadrature-fed engines need.
//! Exact rationals get fraction-free elimination; `f64` and `Complex64` get
//! partial pivoting.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    /// Determinant of a square matrix given as rows.
    fn det(m: &[Vec<Self>]) -> Self {
        det_by_minors(m)
    }
}

pub trait Field: Ring + Div<Output = Self> {
    /// Absolute value as `f64`, used for pivoting and error estimates.
    fn magnitude(&self) -> f64;

    fn is_exact() -> bool;

    fn from_f64(x: f64) -> Self;

    fn to_complex(&self) -> Complex64;
}

/// Laplace expansion with memoised minors, `O(n 2^n)` ring operations and no
/// division.
pub fn det_by_minors<R: Ring>(m: &[Vec<R>]) -> R {
    let n = m.len();
    if n == 0 {
        return R::one();
    }
    assert!(n <= 20, "determinant too large for minor expansion");
    // memo[mask] = det of rows (n - popcount(mask) ..) against columns in mask
    let full = (1usize << n) - 1;
    let mut memo: Vec<Option<R>> = vec![None; 1 << n];
    memo[0] = Some(R::one());
    for mask in 1..=full {
        let k = mask.count_ones() as usize;
        let row = n - k;
        let mut acc = R::zero();
        let mut sign_pos = true;
        for col in 0..n {
            if mask & (1 << col) == 0 {
                continue;
            }
            let sub = memo[mask ^ (1 << col)].as_ref().unwrap();
            let term = m[row][col].clone() * sub.clone();
            acc = if sign_pos { acc + term } else { acc - term };
            sign_pos = !sign_pos;
        }
        memo[mask] = Some(acc);
    }
    memo[full].take().unwrap()
}

/// Sign of a permutation given as an image vector.
pub fn permutation_sign(p: &[usize]) -> i64 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut len = 0;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

impl Ring for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn det(m: &[Vec<Self>]) -> Self {
        bareiss(m)
    }
}

impl Field for BigRational {
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn is_exact() -> bool {
        true
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

/// Fraction-free elimination: rows are cleared to integers, eliminated with
/// exact Bareiss divisions, and the row scalings divided back out.
fn bareiss(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    if n == 0 {
        return BigRational::one();
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale *= &l;
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigRational::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    BigRational::new(sign * &a[n - 1][n - 1], scale)
}

macro_rules! pivoted_det {
    ($t:ty, $abs:expr) => {
        fn det(m: &[Vec<Self>]) -> Self {
            let n = m.len();
            let mut a: Vec<Vec<$t>> = m.to_vec();
            let mut det = <$t>::one();
            for k in 0..n {
                let p = (k..n)
                    .max_by(|&i, &j| $abs(&a[i][k]).partial_cmp(&$abs(&a[j][k])).unwrap())
                    .unwrap();
                if $abs(&a[p][k]) == 0.0 {
                    return <$t>::zero();
                }
                if p != k {
                    a.swap(p, k);
                    det = -det;
                }
                let piv = a[k][k];
                det *= piv;
                for i in k + 1..n {
                    let f = a[i][k] / piv;
                    for j in k + 1..n {
                        let v = a[k][j];
                        a[i][j] -= f * v;
                    }
                }
            }
            det
        }
    };
}

impl Ring for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    pivoted_det!(f64, |x: &f64| x.abs());
}

impl Field for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_exact() -> bool {
        false
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
}

impl Ring for Complex64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    pivoted_det!(Complex64, |x: &Complex64| x.norm());
}

impl Field for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_exact() -> bool {
        false
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
}

/// Shorthand for an exact rational from a numerator and denominator.
pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::from_ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_paths_agree_exactly() {
        let m: Vec<Vec<BigRational>> = vec![
            vec![q(1, 2), q(3, 1), q(-2, 3)],
            vec![q(0, 1), q(5, 7), q(1, 1)],
            vec![q(4, 1), q(-1, 3), q(2, 5)],
        ];
        assert_eq!(bareiss(&m), det_by_minors(&m));
        let sing = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]];
        assert!(bareiss(&sing).is_zero());
        // zero leading pivot forces a swap
        let swap = vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]];
        assert_eq!(bareiss(&swap), q(-1, 1));
    }

    #[test]
    fn float_det_matches_expansion() {
        let m = vec![vec![2.0, -1.0, 0.5], vec![0.3, 4.0, 1.0], vec![1.5, 0.0, -2.0]];
        let a = <f64 as Ring>::det(&m);
        let b = det_by_minors(&m);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn permutation_signs() {
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        let total: i64 = perms.iter().map(|p| permutation_sign(p)).sum();
        assert_eq!(total, 0);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
    }
}

//! Schur functions in time variables and in finite variable sets.
//!
//! Everything here is generic over [`Ring`] or [`Field`], so the same code
//! runs on exact rationals, formal polynomials and complex floats.
//!
//! Truncation convention: a series truncated at `d` keeps the terms whose
//! partitions each have weight at most `d` (one bound per partition slot).

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::Partition;
use crate::scalar::{Field, Ring};

/// Finitely supported sequence `(t_1, t_2, …)`. Absent entries read as zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TimeSequence<S> {
    coeffs: Vec<S>,
}

impl<S: Ring> Default for TimeSequence<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Ring> TimeSequence<S> {
    pub fn zero() -> Self {
        TimeSequence { coeffs: Vec::new() }
    }

    /// `coeffs[0]` is `t_1`.
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        TimeSequence { coeffs }
    }

    /// A sequence with a single nonzero entry `t_k = value`.
    pub fn single(k: usize, value: S) -> Self {
        assert!(k >= 1);
        let mut coeffs = vec![S::zero(); k];
        coeffs[k - 1] = value;
        Self::new(coeffs)
    }

    /// `t_k`, or zero outside the support.
    pub fn get(&self, k: usize) -> S {
        if k == 0 {
            return S::zero();
        }
        self.coeffs.get(k - 1).cloned().unwrap_or_else(S::zero)
    }

    /// Largest `k` with `t_k ≠ 0`, or 0 for the zero sequence.
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn neg(&self) -> Self {
        TimeSequence {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    /// `t_k ↦ c^k t_k`.
    pub fn scale_homogeneous(&self, c: &S) -> Self {
        let mut pow = S::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|t| {
                pow = pow.clone() * c.clone();
                t.clone() * pow.clone()
            })
            .collect();
        Self::new(coeffs)
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> TimeSequence<T> {
        TimeSequence::new(self.coeffs.iter().map(f).collect())
    }

    /// `V(x, t) = Σ t_k x^k`.
    pub fn potential(&self, x: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = (acc + c.clone()) * x.clone();
        }
        acc
    }
}

/// `s_0 … s_max` of the sequence, from `k s_k = Σ_j j t_j s_{k-j}`.
pub fn elementary_schurs<S: Ring>(t: &TimeSequence<S>, max: usize) -> Vec<S> {
    let mut s = Vec::with_capacity(max + 1);
    s.push(S::one());
    for k in 1..=max {
        let mut acc = S::zero();
        for j in 1..=k.min(t.degree()) {
            let tj = t.get(j);
            if tj.is_zero() {
                continue;
            }
            acc = acc + S::from_i64(j as i64) * tj * s[k - j].clone();
        }
        s.push(acc * S::from_ratio(1, k as i64));
    }
    s
}

/// `s_k(t)`, the coefficient of `x^k` in `exp(Σ t_m x^m)`; zero for `k < 0`.
pub fn elementary_schur<S: Ring>(k: i64, t: &TimeSequence<S>) -> S {
    if k < 0 {
        return S::zero();
    }
    elementary_schurs(t, k as usize).pop().unwrap()
}

/// Evaluates many `s_λ(t)` against one sequence, caching the elementary
/// functions.
#[derive(Clone, Debug)]
pub struct SchurTimes<S> {
    elem: Vec<S>,
}

impl<S: Ring> SchurTimes<S> {
    pub fn new(t: &TimeSequence<S>, max_weight: usize) -> Self {
        SchurTimes {
            elem: elementary_schurs(t, max_weight),
        }
    }

    fn h(&self, k: i64) -> S {
        if k < 0 {
            return S::zero();
        }
        match self.elem.get(k as usize) {
            Some(v) => v.clone(),
            None => panic!(
                "SchurTimes built for weight {} but asked for s_{k}",
                self.elem.len() - 1
            ),
        }
    }

    /// Jacobi–Trudy: `det(s_{λ_i - i + j})`.
    pub fn eval(&self, lambda: &Partition) -> S {
        let l = lambda.len();
        if l == 0 {
            return S::one();
        }
        let m: Vec<Vec<S>> = (0..l)
            .map(|i| {
                (0..l)
                    .map(|j| self.h(lambda.part(i) as i64 - i as i64 + j as i64))
                    .collect()
            })
            .collect();
        S::det(&m)
    }
}

/// `s_λ(t)` by the Jacobi–Trudy determinant.
pub fn schur_in_times<S: Ring>(lambda: &Partition, t: &TimeSequence<S>) -> S {
    SchurTimes::new(t, lambda.part(0) + lambda.len()).eval(lambda)
}

/// `[x]_k = (1/k) Σ_a x_a^k` for `k = 1..=d`, or the same with `x_a^{-1}`.
pub fn power_sum_times<S: Field>(x: &[S], d: usize, inverse: bool) -> Result<TimeSequence<S>> {
    let vars: Vec<S> = if inverse {
        if x.iter().any(|v| v.is_zero()) {
            return Err(Error::ZeroVariableForInverse);
        }
        x.iter().map(|v| S::one() / v.clone()).collect()
    } else {
        x.to_vec()
    };
    let mut powers = vars.clone();
    let mut coeffs = Vec::with_capacity(d);
    for k in 1..=d {
        let sum = powers.iter().cloned().fold(S::zero(), |a, b| a + b);
        coeffs.push(sum * S::from_ratio(1, k as i64));
        for (p, v) in powers.iter_mut().zip(&vars) {
            *p = p.clone() * v.clone();
        }
    }
    Ok(TimeSequence::new(coeffs))
}

/// `Δ_N(x) = Π_{i<j} (x_i - x_j)`.
pub fn vandermonde<S: Ring>(x: &[S]) -> S {
    let mut acc = S::one();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            acc = acc * (x[i].clone() - x[j].clone());
        }
    }
    acc
}

/// Relative separation below which floating variables count as repeated.
pub const SEPARATION: f64 = 1e-10;

fn check_distinct<S: Field>(x: &[S]) -> Result<()> {
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let gap = (x[i].clone() - x[j].clone()).magnitude();
            let coincide = if S::is_exact() {
                gap == 0.0 && x[i] == x[j]
            } else {
                gap <= SEPARATION * x[i].magnitude().max(x[j].magnitude()).max(1.0)
            };
            if coincide {
                return Err(Error::RepeatedVariable(i, j));
            }
        }
    }
    Ok(())
}

/// `det(x_i^{λ_j - j + N}) / Δ_N(x)`.
pub fn schur_bialternant<S: Field>(lambda: &Partition, x: &[S]) -> Result<S> {
    let n = x.len();
    let h = lambda.shifted_labels(n)?;
    check_distinct(x)?;
    let m: Vec<Vec<S>> = x
        .iter()
        .map(|xi| h.iter().map(|&e| xi.pow(e as u32)).collect())
        .collect();
    Ok(S::det(&m) / vandermonde(x))
}

/// Both sides of the truncated Cauchy–Littlewood identity:
/// `Σ_{|λ|≤d} s_λ(t) s_λ(t')` and `exp(Σ k t_k t'_k)` cut at weight `d`.
pub fn cauchy_truncated<S: Ring>(t: &TimeSequence<S>, tp: &TimeSequence<S>, d: usize) -> (S, S) {
    let a = SchurTimes::new(t, d);
    let b = SchurTimes::new(tp, d);
    let lhs = crate::partitions::enumerate(d, d)
        .map(|l| a.eval(&l) * b.eval(&l))
        .fold(S::zero(), |x, y| x + y);
    // exp(Σ u_k) with u_k = k t_k t'_k of weight k: the weight-n part is s_n(u)
    let deg = t.degree().min(tp.degree());
    let u = TimeSequence::new(
        (1..=deg)
            .map(|k| S::from_i64(k as i64) * t.get(k) * tp.get(k))
            .collect(),
    );
    let rhs = elementary_schurs(&u, d).into_iter().fold(S::zero(), |x, y| x + y);
    (lhs, rhs)
}

/// Checks `s_λ(t) = (-1)^{|λ|} s_{λ^tr}(-t)`.
pub fn transpose_sign_check<S: Ring>(lambda: &Partition, t: &TimeSequence<S>) -> bool {
    let lhs = schur_in_times(lambda, t);
    let rhs = schur_in_times(&lambda.conjugate(), &t.neg());
    if lambda.weight().is_multiple_of(2) {
        lhs == rhs
    } else {
        lhs == -rhs
    }
}

/// `r_λ(N) = Π_{(i,j)∈λ} r(N + j - i)`; `r` returns `None` at a pole.
pub fn content_product<S: Ring>(lambda: &Partition, n: i64, r: &dyn Fn(i64) -> Option<S>) -> Result<S> {
    let mut acc = S::one();
    for (i, j) in lambda.cells() {
        let c = n + j as i64 - i as i64;
        acc = acc * r(c).ok_or(Error::SingularContent(c))?;
    }
    Ok(acc)
}

/// `dim` of the `GL(N)` irreducible labelled by λ, by the hook-content formula.
pub fn gl_dimension(lambda: &Partition, n: usize) -> Result<BigRational> {
    if lambda.len() > n {
        return Err(Error::LengthExceedsN {
            length: lambda.len(),
            n,
        });
    }
    let mut acc = BigRational::one();
    for (i, j) in lambda.cells() {
        acc *= BigRational::from_ratio(n as i64 + j as i64 - i as i64, lambda.hook(i, j) as i64);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Littlewood–Richardson

type LrTable = HashMap<(Partition, Partition), Arc<BTreeMap<Partition, u64>>>;

fn lr_memo() -> &'static Mutex<LrTable> {
    static MEMO: OnceLock<Mutex<LrTable>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `s_λ s_μ = Σ_α c^α_{λμ} s_α`, counted as Littlewood–Richardson tableaux:
/// the rows of μ are added as horizontal strips labelled `1, 2, …`, keeping
/// the reverse reading word a lattice word. Results are memoised.
pub fn lr_expand(lambda: &Partition, mu: &Partition) -> Arc<BTreeMap<Partition, u64>> {
    // the product is symmetric; expand with the shorter strip list
    let (a, b) = if (mu.len(), mu) <= (lambda.len(), lambda) {
        (lambda, mu)
    } else {
        (mu, lambda)
    };
    let key = (a.clone(), b.clone());
    if let Some(hit) = lr_memo().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let mut out = BTreeMap::new();
    // counts[r][i] = number of label r+1 in row i
    let mut counts: Vec<Vec<usize>> = Vec::new();
    add_strips(a.parts().to_vec(), b.parts(), 0, &mut counts, &mut out);
    let out = Arc::new(out);
    lr_memo().lock().unwrap().insert(key, out.clone());
    out
}

fn add_strips(
    shape: Vec<usize>,
    mu: &[usize],
    r: usize,
    counts: &mut Vec<Vec<usize>>,
    out: &mut BTreeMap<Partition, u64>,
) {
    if r == mu.len() {
        *out.entry(Partition::new(shape)).or_insert(0) += 1;
        return;
    }
    let rows = shape.len() + 1;
    let mut added = vec![0usize; rows];
    strip_rows(&shape, mu[r], 0, &mut added, &mut |added| {
        // lattice check against label r (zero-based r-1)
        if r > 0 {
            let prev = &counts[r - 1];
            let (mut cur, mut before) = (0usize, 0usize);
            for (i, &a) in added.iter().enumerate() {
                cur += a;
                if cur > before {
                    return;
                }
                before += prev.get(i).copied().unwrap_or(0);
            }
        }
        let mut next = shape.clone();
        next.push(0);
        for (i, &a) in added.iter().enumerate() {
            next[i] += a;
        }
        while next.last() == Some(&0) {
            next.pop();
        }
        counts.push(added.to_vec());
        add_strips(next, mu, r + 1, counts, out);
        counts.pop();
    });
}

/// Enumerates horizontal strips of size `left` on `shape`, row by row.
fn strip_rows(shape: &[usize], left: usize, row: usize, added: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if row == added.len() {
        if left == 0 {
            f(added);
        }
        return;
    }
    let cur = shape.get(row).copied().unwrap_or(0);
    let cap = if row == 0 { left } else { shape[row - 1] - cur };
    for a in (0..=cap.min(left)).rev() {
        added[row] = a;
        strip_rows(shape, left - a, row + 1, added, f);
    }
    added[row] = 0;
}

/// `c^α_{λμ}`.
pub fn lr_coefficient(lambda: &Partition, mu: &Partition, alpha: &Partition) -> u64 {
    if alpha.weight() != lambda.weight() + mu.weight() {
        return 0;
    }
    lr_expand(lambda, mu).get(alpha).copied().unwrap_or(0)
}

/// `s_λ s_μ` as an arity-1 series.
pub fn schur_product(lambda: &Partition, mu: &Partition) -> SchurSeries<BigRational> {
    let w = lambda.weight() + mu.weight();
    let mut series = SchurSeries::new(1, w);
    for (alpha, &c) in lr_expand(lambda, mu).iter() {
        series.add(vec![alpha.clone()], BigRational::from_integer(c.into()));
    }
    series
}

// ---------------------------------------------------------------------------
// Series container

/// Sparse map from partition tuples to coefficients. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurSeries<S> {
    arity: usize,
    truncation: usize,
    terms: BTreeMap<Vec<Partition>, S>,
}

impl<S: Ring> SchurSeries<S> {
    pub fn new(arity: usize, truncation: usize) -> Self {
        assert!(matches!(arity, 1 | 2 | 4), "series arity must be 1, 2 or 4");
        SchurSeries {
            arity,
            truncation,
            terms: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn add(&mut self, key: Vec<Partition>, c: S) {
        assert_eq!(key.len(), self.arity);
        assert!(
            key.iter().all(|p| p.weight() <= self.truncation),
            "term beyond truncation"
        );
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&key) {
            Some(v) => v.clone() + c,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    pub fn get(&self, key: &[Partition]) -> S {
        self.terms.get(key).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Partition>, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<S: Ring + crate::report::ScalarText> SchurSeries<S> {
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(k, v)| {
                serde_json::json!({
                    "partitions": k.iter().map(|p| p.parts().to_vec()).collect::<Vec<_>>(),
                    "coefficient": v.to_json(),
                })
            })
            .collect();
        serde_json::json!({ "arity": self.arity, "truncation": self.truncation, "terms": terms })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut header: Vec<String> = (1..=self.arity).map(|i| format!("p{i}")).collect();
        header.extend(S::csv_header().iter().map(|s| s.to_string()));
        out.push_str(&header.join(","));
        out.push('\n');
        for (k, v) in &self.terms {
            let mut row: Vec<String> = k.iter().map(|p| p.to_string()).collect();
            row.extend(v.csv_fields());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

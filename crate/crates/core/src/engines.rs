//! Evaluators for `Z_N(t, n, m, t̄) = ∫ Δ_N(x) Δ_N(y) Π_i x_i^n y_i^m dμ_t(x_i, y_i)`.
//!
//! * [`direct_z`]: tensor quadrature of the `2N`-fold integral (N ≤ 2).
//! * [`permutation_z`]: the double permutation sum over bimoments.
//! * [`andreief_z`]: `N! det(B_{n+i, m+j})`.
//! * [`double_series_z`]: `N! Σ g_{λμ} s_λ s_μ` in one of four variants.
//! * [`quadruple_series_z`]: the four-Schur expansion over a circle window.
//!
//! Coefficient determinants, with `h_i = λ_i - i + N`,
//! `c = (-1)^{N(N-1)/2}` and `h̄_i = N - 1 - h_i`:
//!
//! | variant | series in | window deformed by | `g_{λμ}` |
//! |---|---|---|---|
//! | `++` | `t1, t2` | `t̄1, t̄2` | `det B_{n+h_i, m+h'_j}` |
//! | `--` | `t̄1, t̄2` | `t1, t2` | `det B_{n+h̄_i, m+h̄'_j}` |
//! | `+-` | `t1, t̄2` | `t̄1, t2` | `c det B_{n+h_i, m+h̄'_j}` |
//! | `-+` | `t̄1, t2` | `t1, t̄2` | `c det B_{n+h̄_i, m+h'_j}` |
//!
//! The determinant helpers are generic over [`Ring`], so the same code runs
//! on complex floats, exact rationals and formal polynomials.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::Variant;
use crate::measures::{
    bimoment_window, BimomentWindow, DeformationParams, ExactWindow, MeasureSpec, Provenance, QuadratureSpec,
    RSequence, Rect,
};
use crate::partitions::{enumerate, Partition};
use crate::scalar::{permutation_sign, permutations, Ring};
use crate::schur::{content_product, lr_expand, schur_bialternant, vandermonde, SchurSeries, SchurTimes, TimeSequence};

/// Exact part of a rational-mode result: `value = (prefactor)^power · rational`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactZ {
    pub prefactor: String,
    pub power: i64,
    pub rational: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZResult {
    pub engine: String,
    #[serde(rename = "N")]
    pub size: i64,
    pub n: i64,
    pub m: i64,
    pub value: Complex64,
    pub deformation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactZ>,
}

impl ZResult {
    fn new(engine: &str, size: i64, deform: &DeformationParams, value: Complex64) -> Self {
        ZResult {
            engine: engine.into(),
            size,
            n: deform.n,
            m: deform.m,
            value,
            deformation: deform.fingerprint(),
            truncation: None,
            error_estimate: None,
            exact: None,
        }
    }

    /// `|a - b| / max(|a|, |b|)`.
    pub fn relative_difference(&self, other: &ZResult) -> f64 {
        relative_difference(self.value, other.value)
    }
}

pub fn relative_difference(a: Complex64, b: Complex64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

fn factorial<S: Ring>(n: usize) -> S {
    (1..=n as i64).fold(S::one(), |a, k| a * S::from_i64(k))
}

/// `Z_N` for `N ≤ 0`: 1 at `N = 0`, 0 below.
fn trivial_size(size: i64) -> Option<Complex64> {
    match size {
        0 => Some(Complex64::new(1.0, 0.0)),
        s if s < 0 => Some(Complex64::zero()),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// determinant engines over an entry accessor

/// `Σ_{σ,τ} sgn σ sgn τ Π_i B_{n+N-1-σ(i), m+N-1-τ(i)}`.
pub fn permutation_sum<S: Ring>(size: usize, n: i64, m: i64, b: &dyn Fn(i64, i64) -> Result<S>) -> Result<S> {
    if size > 6 {
        return Err(Error::BoundExceeded(format!(
            "permutation expansion needs N ≤ 6, got {size}"
        )));
    }
    let top = size as i64 - 1;
    let mut entries = vec![vec![S::zero(); size]; size];
    for (a, row) in entries.iter_mut().enumerate() {
        for (c, e) in row.iter_mut().enumerate() {
            *e = b(n + top - a as i64, m + top - c as i64)?;
        }
    }
    let perms = permutations(size);
    let mut acc = S::zero();
    for s in &perms {
        let ss = permutation_sign(s);
        for t in &perms {
            let mut term = S::from_i64(ss * permutation_sign(t));
            for i in 0..size {
                term = term * entries[s[i]][t[i]].clone();
            }
            acc = acc + term;
        }
    }
    Ok(acc)
}

/// `N! det(B_{n+i, m+j})_{i,j<N}`.
pub fn andreief_det<S: Ring>(size: usize, n: i64, m: i64, b: &dyn Fn(i64, i64) -> Result<S>) -> Result<S> {
    let mut rows = Vec::with_capacity(size);
    for i in 0..size as i64 {
        rows.push((0..size as i64).map(|j| b(n + i, m + j)).collect::<Result<Vec<S>>>()?);
    }
    Ok(factorial::<S>(size) * S::det(&rows))
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Row and column indices of the coefficient determinant for `variant`.
pub fn coefficient_indices(
    variant: Variant,
    lambda: &Partition,
    mu: &Partition,
    size: usize,
    n: i64,
    m: i64,
) -> Result<(Vec<i64>, Vec<i64>, i64)> {
    let h = lambda.shifted_labels(size)?;
    let hp = mu.shifted_labels(size)?;
    let top = size as i64 - 1;
    let plus = |labels: &[i64], shift: i64| labels.iter().map(|x| shift + x).collect::<Vec<_>>();
    let minus = |labels: &[i64], shift: i64| labels.iter().map(|x| shift + top - x).collect::<Vec<_>>();
    let c = sign(size as i64 * (size as i64 - 1) / 2);
    Ok(match variant {
        Variant::PlusPlus => (plus(&h, n), plus(&hp, m), 1),
        Variant::MinusMinus => (minus(&h, n), minus(&hp, m), 1),
        Variant::PlusMinus => (plus(&h, n), minus(&hp, m), c),
        Variant::MinusPlus => (minus(&h, n), plus(&hp, m), c),
    })
}

/// `g^{variant}_{λμ}(N, n, m)` from an entry accessor.
pub fn coefficient_det<S: Ring>(
    variant: Variant,
    lambda: &Partition,
    mu: &Partition,
    size: usize,
    n: i64,
    m: i64,
    b: &dyn Fn(i64, i64) -> Result<S>,
) -> Result<S> {
    let (rows, cols, c) = coefficient_indices(variant, lambda, mu, size, n, m)?;
    let mut mat = Vec::with_capacity(size);
    for &i in &rows {
        mat.push(cols.iter().map(|&k| b(i, k)).collect::<Result<Vec<S>>>()?);
    }
    Ok(S::from_i64(c) * S::det(&mat))
}

fn window_entry(w: &BimomentWindow) -> impl Fn(i64, i64) -> Result<Complex64> + '_ {
    move |i, k| w.get(i, k)
}

pub fn g_pp(lambda: &Partition, mu: &Partition, size: usize, n: i64, m: i64, w: &BimomentWindow) -> Result<Complex64> {
    coefficient_det(Variant::PlusPlus, lambda, mu, size, n, m, &window_entry(w))
}

pub fn g_mm(lambda: &Partition, mu: &Partition, size: usize, n: i64, m: i64, w: &BimomentWindow) -> Result<Complex64> {
    coefficient_det(Variant::MinusMinus, lambda, mu, size, n, m, &window_entry(w))
}

pub fn g_pm(lambda: &Partition, mu: &Partition, size: usize, n: i64, m: i64, w: &BimomentWindow) -> Result<Complex64> {
    coefficient_det(Variant::PlusMinus, lambda, mu, size, n, m, &window_entry(w))
}

pub fn g_mp(lambda: &Partition, mu: &Partition, size: usize, n: i64, m: i64, w: &BimomentWindow) -> Result<Complex64> {
    coefficient_det(Variant::MinusPlus, lambda, mu, size, n, m, &window_entry(w))
}

// ---------------------------------------------------------------------------
// Z engines

/// Tensor quadrature of the defining integral, certified by point doubling.
pub fn direct_z(spec: &MeasureSpec, deform: &DeformationParams, size: i64, quad: &QuadratureSpec) -> Result<ZResult> {
    if let Some(v) = trivial_size(size) {
        return Ok(ZResult::new("direct", size, deform, v));
    }
    if size > 2 {
        return Err(Error::NUnsupported(size));
    }
    spec.validate(deform)?;
    let (n, m) = (deform.n, deform.m);
    if !spec.allows_negative_indices() && (n < 0 || m < 0) {
        return Err(Error::NegativeIndexUnsupported(n, m));
    }
    let eval = |points: usize| -> Result<(Complex64, f64)> {
        let g = crate::measures::node_set(spec, deform, points)?;
        let f: Vec<Complex64> = (0..g.len())
            .map(|a| g.w[a] * g.x[a].powi(n as i32) * g.y[a].powi(m as i32))
            .collect();
        if size == 1 {
            let s: Complex64 = f.iter().sum();
            let abs: f64 = f.iter().map(|z| z.norm()).sum();
            return Ok((s, abs));
        }
        let rows: Vec<(Complex64, f64)> = (0..g.len())
            .into_par_iter()
            .map(|a| {
                let mut s = Complex64::zero();
                let mut abs = 0.0;
                for b in 0..g.len() {
                    let t = f[a] * f[b] * (g.x[a] - g.x[b]) * (g.y[a] - g.y[b]);
                    s += t;
                    abs += t.norm();
                }
                (s, abs)
            })
            .collect();
        Ok(rows
            .into_iter()
            .fold((Complex64::zero(), 0.0), |(s, a), (t, b)| (s + t, a + b)))
    };
    let noise = 1e3 * f64::EPSILON;
    let mut points = quad.points.max(4);
    let (mut prev, _) = eval(points)?;
    let mut change = f64::INFINITY;
    while points * 2 <= quad.max_points && (size == 1 || points * 2 <= 128) {
        points *= 2;
        let (cur, abs) = eval(points)?;
        change = (cur - prev).norm() / (cur.norm() + noise * abs / quad.tol).max(f64::MIN_POSITIVE);
        if change <= quad.tol {
            let mut r = ZResult::new("direct", size, deform, cur);
            r.error_estimate = Some((cur - prev).norm() / cur.norm().max(f64::MIN_POSITIVE));
            return Ok(r);
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged { points, change })
}

fn block(size: i64, n: i64, m: i64) -> Rect {
    Rect::new(n, n + size.max(1) - 1, m, m + size.max(1) - 1)
}

pub fn permutation_z(w: &BimomentWindow, size: i64, n: i64, m: i64) -> Result<ZResult> {
    let deform = DeformationParams {
        n,
        m,
        ..w.deformation.clone()
    };
    if let Some(v) = trivial_size(size) {
        return Ok(ZResult::new("permutation", size, &deform, v));
    }
    w.require(&block(size, n, m))?;
    let v = permutation_sum(size as usize, n, m, &window_entry(w))?;
    let mut r = ZResult::new("permutation", size, &deform, v);
    r.error_estimate = Some(w.error_estimate());
    Ok(r)
}

pub fn andreief_z(w: &BimomentWindow, size: i64, n: i64, m: i64) -> Result<ZResult> {
    let deform = DeformationParams {
        n,
        m,
        ..w.deformation.clone()
    };
    if let Some(v) = trivial_size(size) {
        return Ok(ZResult::new("andreief", size, &deform, v));
    }
    w.require(&block(size, n, m))?;
    let v = andreief_det(size as usize, n, m, &window_entry(w))?;
    let mut r = ZResult::new("andreief", size, &deform, v);
    r.error_estimate = Some(w.error_estimate());
    Ok(r)
}

/// Exact determinant engines over `prefactor × rational` bimoments.
pub fn exact_z(engine: &str, w: &ExactWindow, size: i64, n: i64, m: i64) -> Result<ZResult> {
    let deform = DeformationParams {
        n,
        m,
        ..Default::default()
    };
    if let Some(v) = trivial_size(size) {
        return Ok(ZResult::new(engine, size, &deform, v));
    }
    let acc = |i, k| w.get(i, k);
    let q: BigRational = match engine {
        "permutation" => permutation_sum(size as usize, n, m, &acc)?,
        "andreief" => andreief_det(size as usize, n, m, &acc)?,
        other => return Err(Error::Config(format!("engine {other} has no exact mode"))),
    };
    let value = w.prefactor.value.powi(size as i32) * q.to_f64().unwrap_or(f64::NAN);
    let mut r = ZResult::new(engine, size, &deform, Complex64::new(value, 0.0));
    r.error_estimate = Some(0.0);
    r.exact = Some(ExactZ {
        prefactor: w.prefactor.symbol.clone(),
        power: size,
        rational: q.to_string(),
    });
    Ok(r)
}

/// Convenience: certified window for the `N × N` block, then [`andreief_z`].
pub fn andreief_for(
    spec: &MeasureSpec,
    deform: &DeformationParams,
    size: i64,
    quad: &QuadratureSpec,
) -> Result<ZResult> {
    if trivial_size(size).is_some() {
        return andreief_z(&empty_window(spec, deform), size, deform.n, deform.m);
    }
    let w = bimoment_window(spec, block(size, deform.n, deform.m), deform, quad)?;
    andreief_z(&w, size, deform.n, deform.m)
}

fn empty_window(spec: &MeasureSpec, deform: &DeformationParams) -> BimomentWindow {
    BimomentWindow {
        rect: Rect::new(0, 0, 0, 0),
        values: vec![vec![Complex64::zero()]],
        measure: spec.clone(),
        deformation: deform.times_only(),
        provenance: Provenance::Analytic,
    }
}

// ---------------------------------------------------------------------------
// series engines

/// Series coefficients keyed by partition tuples, plus the window they came from.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    pub series: SchurSeries<Complex64>,
    pub window_rect: Rect,
    pub window_provenance: Provenance,
}

/// Slot sequences and window deformation of a variant: which of
/// `[t1, t2, t̄1, t̄2]` go to the series and which deform the window.
fn variant_slots(
    variant: Variant,
    d: &DeformationParams,
) -> (TimeSequence<Complex64>, TimeSequence<Complex64>, DeformationParams) {
    match variant {
        Variant::PlusPlus => (d.t1.clone(), d.t2.clone(), d.select([false, false, true, true])),
        Variant::MinusMinus => (d.tbar1.clone(), d.tbar2.clone(), d.select([true, true, false, false])),
        Variant::PlusMinus => (d.t1.clone(), d.tbar2.clone(), d.select([false, true, true, false])),
        Variant::MinusPlus => (d.tbar1.clone(), d.t2.clone(), d.select([true, false, false, true])),
    }
}

/// Partitions with `|λ| ≤ d`, `ℓ ≤ N`, or just `∅` when the sequence is zero.
fn slot_partitions(t: &TimeSequence<Complex64>, d: usize, size: usize) -> Vec<Partition> {
    if t.is_zero() {
        vec![Partition::empty()]
    } else {
        enumerate(d, size).collect()
    }
}

/// Index range `[lo, hi]` covering every determinant entry of a variant side.
fn side_range(plus: bool, shift: i64, size: i64, d: i64) -> (i64, i64) {
    let hmax = d + size - 1;
    if plus {
        (shift, shift + hmax)
    } else {
        (shift + size - 1 - hmax, shift + size - 1)
    }
}

#[derive(Clone, Debug)]
pub struct SeriesOptions {
    pub truncation: usize,
    /// When set, a last shell above `tol · |Z|` is an error.
    pub tol: Option<f64>,
}

/// Sums `terms` (each tagged with its shell weights) in graded order and
/// measures the outer layer `max(weights) = d`.
fn graded_sum(mut terms: Vec<(Vec<usize>, Complex64)>, d: usize) -> (Complex64, Complex64) {
    terms.sort_by_key(|(w, _)| w.iter().sum::<usize>());
    let mut total = Complex64::zero();
    let mut outer = Complex64::zero();
    for (w, v) in terms {
        total += v;
        if w.contains(&d) {
            outer += v;
        }
    }
    (total, outer)
}

fn finish_series(
    engine: String,
    size: i64,
    deform: &DeformationParams,
    total: Complex64,
    outer: Complex64,
    window_err: f64,
    opts: &SeriesOptions,
) -> Result<ZResult> {
    let rel = outer.norm() / total.norm().max(f64::MIN_POSITIVE);
    if let Some(tol) = opts.tol {
        if rel > tol {
            return Err(Error::TruncationNotConverged { last_shell: rel, tol });
        }
    }
    let mut r = ZResult::new(&engine, size, deform, total);
    r.truncation = Some(opts.truncation);
    r.error_estimate = Some(rel + window_err);
    Ok(r)
}

/// Window needed by a variant at truncation `d`.
pub fn double_series_rect(variant: Variant, size: i64, n: i64, m: i64, d: usize, deform: &DeformationParams) -> Rect {
    let (a, b, _) = variant_slots(variant, deform);
    let da = if a.is_zero() { 0 } else { d as i64 };
    let db = if b.is_zero() { 0 } else { d as i64 };
    let (p1, p2) = match variant {
        Variant::PlusPlus => (true, true),
        Variant::MinusMinus => (false, false),
        Variant::PlusMinus => (true, false),
        Variant::MinusPlus => (false, true),
    };
    let (i_lo, i_hi) = side_range(p1, n, size, da);
    let (k_lo, k_hi) = side_range(p2, m, size, db);
    Rect::new(i_lo, i_hi, k_lo, k_hi)
}

/// `N! Σ g_{λμ} s_λ(a) s_μ(b)` on a window already deformed by the
/// coefficient-side sequences.
pub fn double_series_on_window(
    variant: Variant,
    w: &BimomentWindow,
    deform: &DeformationParams,
    size: i64,
    opts: &SeriesOptions,
) -> Result<(ZResult, CoefficientTable)> {
    let engine = format!("double_series{}", variant.tag());
    let d = opts.truncation;
    let mut table = SchurSeries::new(2, d);
    if let Some(v) = trivial_size(size) {
        let r = ZResult::new(&engine, size, deform, v);
        let t = CoefficientTable {
            series: table,
            window_rect: w.rect,
            window_provenance: w.provenance.clone(),
        };
        return Ok((r, t));
    }
    let nsize = size as usize;
    let (a, b, _) = variant_slots(variant, deform);
    let sa = SchurTimes::new(&a, d);
    let sb = SchurTimes::new(&b, d);
    let la = slot_partitions(&a, d, nsize);
    let lb = slot_partitions(&b, d, nsize);
    let pairs: Vec<(&Partition, &Partition)> = la.iter().flat_map(|l| lb.iter().map(move |m| (l, m))).collect();
    let entry = window_entry(w);
    let gs: Vec<Complex64> = pairs
        .par_iter()
        .map(|(l, m)| coefficient_det(variant, l, m, nsize, deform.n, deform.m, &entry))
        .collect::<Result<_>>()?;
    let nf: Complex64 = factorial(nsize);
    let mut terms = Vec::with_capacity(pairs.len());
    for ((l, m), g) in pairs.iter().zip(gs) {
        table.add(vec![(*l).clone(), (*m).clone()], g);
        terms.push((vec![l.weight(), m.weight()], nf * g * sa.eval(l) * sb.eval(m)));
    }
    let (total, outer) = graded_sum(terms, d);
    let r = finish_series(engine, size, deform, total, outer, w.error_estimate(), opts)?;
    Ok((
        r,
        CoefficientTable {
            series: table,
            window_rect: w.rect,
            window_provenance: w.provenance.clone(),
        },
    ))
}

pub fn double_series_z(
    variant: Variant,
    spec: &MeasureSpec,
    deform: &DeformationParams,
    size: i64,
    opts: &SeriesOptions,
    quad: &QuadratureSpec,
) -> Result<(ZResult, CoefficientTable)> {
    let (_, _, wdef) = variant_slots(variant, deform);
    let rect = double_series_rect(variant, size.max(1), deform.n, deform.m, opts.truncation, deform);
    let w = bimoment_window(spec, rect, &wdef, quad)?;
    double_series_on_window(variant, &w, deform, size, opts)
}

/// `I_{λμνη} = Σ_{α,β} c^α_{λν̃} c^β_{μη̃} N! det(B_{l_i+n, l'_j+m})` with
/// `l_i = α_i - i + N - ν_1`, `l'_i = β_i - i + N - η_1`.
pub fn quadruple_i<S: Ring>(
    parts: [&Partition; 4],
    size: usize,
    n: i64,
    m: i64,
    b: &dyn Fn(i64, i64) -> Result<S>,
) -> Result<S> {
    let [lambda, mu, nu, eta] = parts;
    for p in parts {
        if p.len() > size {
            return Err(Error::LengthExceedsN {
                length: p.len(),
                n: size,
            });
        }
    }
    let left = lr_expand(lambda, &nu.tilde(size)?);
    let right = lr_expand(mu, &eta.tilde(size)?);
    let nf: S = factorial(size);
    let mut acc = S::zero();
    for (alpha, ca) in left.iter().filter(|(a, _)| a.len() <= size) {
        let l: Vec<i64> = alpha
            .shifted_labels(size)?
            .iter()
            .map(|h| h - nu.part(0) as i64 + n)
            .collect();
        for (beta, cb) in right.iter().filter(|(b, _)| b.len() <= size) {
            let lp: Vec<i64> = beta
                .shifted_labels(size)?
                .iter()
                .map(|h| h - eta.part(0) as i64 + m)
                .collect();
            let mut mat = Vec::with_capacity(size);
            for &i in &l {
                mat.push(lp.iter().map(|&k| b(i, k)).collect::<Result<Vec<S>>>()?);
            }
            acc = acc + S::from_i64((ca * cb) as i64) * nf.clone() * S::det(&mat);
        }
    }
    Ok(acc)
}

pub fn quadruple_series_rect(size: i64, n: i64, m: i64, d: usize, deform: &DeformationParams) -> Rect {
    let d = d as i64;
    let lo = |t: &TimeSequence<Complex64>| if t.is_zero() { 0 } else { d };
    let hi = |t: &TimeSequence<Complex64>, tb: &TimeSequence<Complex64>| {
        // α_1 ≤ |λ| + |ν̃| ≤ d + (N-1) d
        (if t.is_zero() { 0 } else { d }) + (if tb.is_zero() { 0 } else { (size - 1) * d })
    };
    Rect::new(
        n - lo(&deform.tbar1),
        n + size - 1 + hi(&deform.t1, &deform.tbar1),
        m - lo(&deform.tbar2),
        m + size - 1 + hi(&deform.t2, &deform.tbar2),
    )
}

/// Σ over quadruples with every weight `≤ d` of
/// `I_{λμνη} s_λ(t1) s_μ(t2) s_ν(t̄1) s_η(t̄2)` on an undeformed window.
pub fn quadruple_series_on_window(
    w: &BimomentWindow,
    deform: &DeformationParams,
    size: i64,
    opts: &SeriesOptions,
) -> Result<(ZResult, CoefficientTable)> {
    let d = opts.truncation;
    let mut table = SchurSeries::new(4, d);
    if let Some(v) = trivial_size(size) {
        let r = ZResult::new("quadruple_series", size, deform, v);
        return Ok((
            r,
            CoefficientTable {
                series: table,
                window_rect: w.rect,
                window_provenance: w.provenance.clone(),
            },
        ));
    }
    if w.deformation.has_times() {
        return Err(Error::Config("quadruple series needs an undeformed window".into()));
    }
    let nsize = size as usize;
    let seqs = [&deform.t1, &deform.t2, &deform.tbar1, &deform.tbar2];
    let evals: Vec<SchurTimes<Complex64>> = seqs.iter().map(|t| SchurTimes::new(t, d)).collect();
    let lists: Vec<Vec<Partition>> = seqs.iter().map(|t| slot_partitions(t, d, nsize)).collect();
    let mut quads = Vec::new();
    for a in &lists[0] {
        for b in &lists[1] {
            for c in &lists[2] {
                for e in &lists[3] {
                    quads.push([a, b, c, e]);
                }
            }
        }
    }
    let entry = window_entry(w);
    let is: Vec<Complex64> = quads
        .par_iter()
        .map(|q| quadruple_i(*q, nsize, deform.n, deform.m, &entry))
        .collect::<Result<_>>()?;
    let mut terms = Vec::with_capacity(quads.len());
    for (q, i) in quads.iter().zip(is) {
        let mut v = i;
        for (s, p) in evals.iter().zip(q) {
            v *= s.eval(p);
        }
        table.add(q.iter().map(|p| (*p).clone()).collect(), i);
        terms.push((q.iter().map(|p| p.weight()).collect(), v));
    }
    let (total, outer) = graded_sum(terms, d);
    let r = finish_series(
        "quadruple_series".into(),
        size,
        deform,
        total,
        outer,
        w.error_estimate(),
        opts,
    )?;
    Ok((
        r,
        CoefficientTable {
            series: table,
            window_rect: w.rect,
            window_provenance: w.provenance.clone(),
        },
    ))
}

pub fn quadruple_series_z(
    spec: &MeasureSpec,
    deform: &DeformationParams,
    size: i64,
    opts: &SeriesOptions,
    quad: &QuadratureSpec,
) -> Result<(ZResult, CoefficientTable)> {
    let rect = quadruple_series_rect(size.max(1), deform.n, deform.m, opts.truncation, deform);
    if (rect.i_lo < 0 || rect.k_lo < 0) && !spec.allows_negative_indices() {
        return Err(Error::NegativeIndexUnsupported(rect.i_lo, rect.k_lo));
    }
    let w = bimoment_window(spec, rect, &DeformationParams::none(), quad)?;
    quadruple_series_on_window(&w, deform, size, opts)
}

/// Times carrying the part of a potential `Σ_i u_i x^i / i` (as used by
/// contour measures) above degree `keep`: `t_k = -u_k / k`.
pub fn potential_times(u: &[f64], keep: usize) -> TimeSequence<Complex64> {
    TimeSequence::new(
        u.iter()
            .enumerate()
            .map(|(i, &c)| {
                if i < keep {
                    Complex64::zero()
                } else {
                    Complex64::new(-c / (i + 1) as f64, 0.0)
                }
            })
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// τ-function normalisation

/// `(1/N!) (-1)^{N(N+1)/2 + mN} c(t, t̄) Z_N`.
pub fn tau_value(z: &ZResult, deform: &DeformationParams) -> Complex64 {
    if z.size == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if z.size < 0 {
        return Complex64::zero();
    }
    let nn = z.size;
    let s = sign(nn * (nn + 1) / 2 + deform.m * nn) as f64;
    let nf: f64 = factorial::<f64>(nn as usize);
    deform.tau_factor() * z.value * (s / nf)
}

/// τ from the `++` series on a t̄-deformed window.
pub fn tau_from_series(
    spec: &MeasureSpec,
    deform: &DeformationParams,
    size: i64,
    opts: &SeriesOptions,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    let (z, _) = double_series_z(Variant::PlusPlus, spec, deform, size, opts, quad)?;
    Ok(tau_value(&z, deform))
}

/// τ from `N! det` on the fully deformed window.
pub fn tau_from_andreief(
    spec: &MeasureSpec,
    deform: &DeformationParams,
    size: i64,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    let z = andreief_for(spec, deform, size, quad)?;
    Ok(tau_value(&z, deform))
}

// ---------------------------------------------------------------------------
// planar radial reduction

/// `g_λ(n) = π^N Π_i M(λ_i - i + n + N)`.
pub fn radial_coefficient(potential: &[f64], lambda: &Partition, size: usize, n: i64) -> Result<f64> {
    let mut acc = std::f64::consts::PI.powi(size as i32);
    for h in lambda.shifted_labels(size)? {
        let j = h + n;
        if j < 0 {
            return Err(Error::NegativeIndexUnsupported(j, j));
        }
        acc *= crate::measures::radial_moment(potential, j as u32)?;
    }
    Ok(acc)
}

/// `N! Σ_{|λ|≤d, ℓ≤N} g_λ(n) s_λ(t1) s_{λ+n-m}(t2)`, where `λ+n-m` adds
/// `n - m` to each of the `N` rows. The constant `N!` is the Andréief factor
/// for the area measure `d²z`.
pub fn radial_series_z(
    potential: &[f64],
    deform: &DeformationParams,
    size: i64,
    opts: &SeriesOptions,
) -> Result<ZResult> {
    let engine = "radial_series";
    if let Some(v) = trivial_size(size) {
        return Ok(ZResult::new(engine, size, deform, v));
    }
    if !deform.tbar1.is_zero() || !deform.tbar2.is_zero() {
        return Err(Error::NegativeIndexUnsupported(-1, -1));
    }
    let (n, m) = (deform.n, deform.m);
    if n < 0 || m < 0 {
        return Err(Error::NegativeIndexUnsupported(n, m));
    }
    let nsize = size as usize;
    let d = opts.truncation;
    let shift = n - m;
    let s1 = SchurTimes::new(&deform.t1, d);
    let s2 = SchurTimes::new(&deform.t2, (d as i64 + nsize as i64 * shift.max(0)) as usize);
    let nf: f64 = factorial::<f64>(nsize);
    let mut terms = Vec::new();
    for lambda in slot_partitions(&deform.t1, d, nsize) {
        let Some(mu) = lambda.shift_parts(nsize, shift) else {
            continue;
        };
        if mu.weight() > 0 && deform.t2.is_zero() {
            continue;
        }
        let g = radial_coefficient(potential, &lambda, nsize, n)?;
        let v = s1.eval(&lambda) * s2.eval(&mu) * (g * nf);
        terms.push((vec![lambda.weight()], v));
    }
    let (total, outer) = graded_sum(terms, d);
    finish_series(engine.into(), size, deform, total, outer, 0.0, opts)
}

// ---------------------------------------------------------------------------
// character-coupling kernel

#[derive(Clone, Debug, PartialEq)]
pub struct KernelCheck {
    /// `Σ r_λ(N) s_λ(x) s_λ(y)` truncated at `d`.
    pub series: f64,
    /// `C_{N,r} det τ_r(1, x_i y_j) / (Δ(x) Δ(y))`.
    pub kernel: f64,
    pub residual: f64,
}

/// `C_{N,r} = 1 / Π_{k=1}^{N-1} Π_{j=1}^k r(j)`.
pub fn kernel_constant(r: &RSequence, size: usize) -> Result<f64> {
    let mut p = 1.0;
    for k in 1..size {
        p *= r.prefix_product(k);
    }
    if p == 0.0 {
        let j = (1..size as i64).find(|&j| r.r(j) == Some(0.0)).unwrap_or(0);
        return Err(Error::SingularContent(j));
    }
    Ok(1.0 / p)
}

pub fn coupling_kernel_check(r: &RSequence, x: &[f64], y: &[f64], d: usize) -> Result<KernelCheck> {
    let size = x.len();
    if y.len() != size {
        return Err(Error::Config("x and y must have the same length".into()));
    }
    let rf = |j: i64| r.r(j);
    let mut series = 0.0;
    for lambda in enumerate(d, size) {
        let c: f64 = content_product(&lambda, size as i64, &rf)?;
        if c == 0.0 {
            continue;
        }
        series += c * schur_bialternant(&lambda, x)? * schur_bialternant(&lambda, y)?;
    }
    let mut mat = vec![vec![0.0; size]; size];
    for i in 0..size {
        for j in 0..size {
            mat[i][j] = r.kernel(Complex64::new(x[i] * y[j], 0.0))?.re;
        }
    }
    let kernel = kernel_constant(r, size)? * f64::det(&mat) / (vandermonde(x) * vandermonde(y));
    Ok(KernelCheck {
        series,
        kernel,
        residual: (series - kernel).abs(),
    })
}

/// Terms of a coefficient table as `(key, value)` in canonical order.
pub fn table_entries(t: &CoefficientTable) -> BTreeMap<Vec<Partition>, Complex64> {
    t.series.terms().map(|(k, v)| (k.clone(), *v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::exact_window;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn small_sizes() {
        let g = MeasureSpec::gaussian(0.5);
        let d = DeformationParams::none();
        assert_eq!(direct_z(&g, &d, 0, &quad()).unwrap().value, c(1.0));
        assert_eq!(direct_z(&g, &d, -1, &quad()).unwrap().value, c(0.0));
        assert!(matches!(direct_z(&g, &d, 3, &quad()), Err(Error::NUnsupported(3))));
        let w = bimoment_window(&g, Rect::square(0, 3), &d, &quad()).unwrap();
        assert_eq!(andreief_z(&w, 0, 0, 0).unwrap().value, c(1.0));
        assert_eq!(andreief_z(&w, 1, 1, 2).unwrap().value, w.get(1, 2).unwrap());
        assert!(matches!(andreief_z(&w, 2, 3, 0), Err(Error::WindowTooSmall(..))));
    }

    #[test]
    fn gaussian_engines_agree() {
        let g = MeasureSpec::gaussian(0.5);
        let d = DeformationParams::none();
        let z1 = direct_z(&g, &d, 1, &quad()).unwrap();
        assert!(relative_difference(z1.value, c(2.0 * PI / 0.75f64.sqrt())) < 1e-12);
        let z2 = direct_z(&g, &d, 2, &quad()).unwrap();
        let closed = 8.0 * PI * PI * 0.5 / (0.75 * 0.75);
        assert!(relative_difference(z2.value, c(closed)) < 1e-10);
        let w = bimoment_window(&g, Rect::square(0, 5), &d, &quad()).unwrap();
        for size in 1..=4 {
            let p = permutation_z(&w, size, 0, 0).unwrap();
            let a = andreief_z(&w, size, 0, 0).unwrap();
            assert!(relative_difference(p.value, a.value) < 1e-13, "N={size}");
        }
        let odd = DeformationParams {
            n: 1,
            ..Default::default()
        };
        assert!(direct_z(&g, &odd, 1, &quad()).unwrap().value.norm() < 1e-12);
    }

    #[test]
    fn exact_mode() {
        let g = MeasureSpec::gaussian(0.5);
        let w = exact_window(&g, Rect::square(0, 3)).unwrap();
        let z = exact_z("andreief", &w, 2, 0, 0).unwrap();
        // Z_2 = 2 B00² (E[xy]) = 2 (2π/√(1-c²))² · 2/3
        assert_eq!(z.exact.as_ref().unwrap().rational, "4/3");
        let p = exact_z("permutation", &w, 2, 0, 0).unwrap();
        assert_eq!(p.exact, z.exact);
        assert!(relative_difference(z.value, c(8.0 * PI * PI * 0.5 / 0.5625)) < 1e-14);
    }

    #[test]
    fn coefficient_limits() {
        let g = MeasureSpec::circle(RSequence::Exponential { scale: 0.8 });
        let w = bimoment_window(&g, Rect::square(-3, 4), &DeformationParams::none(), &quad()).unwrap();
        let e = Partition::empty();
        for (n, m) in [(0, 0), (1, 1), (-1, 2)] {
            for v in Variant::ALL {
                let gv = coefficient_det(v, &e, &e, 1, n, m, &window_entry(&w)).unwrap();
                assert_eq!(gv, w.get(n, m).unwrap(), "{} ({n},{m})", v.tag());
            }
        }
        let one = Partition::new(vec![1]);
        assert_eq!(g_pp(&one, &e, 1, 0, 0, &w).unwrap(), w.get(1, 0).unwrap());
        // row swap antisymmetry of the underlying determinant
        let (rows, cols, _) =
            coefficient_indices(Variant::PlusPlus, &Partition::new(vec![2, 1]), &one, 2, 0, 0).unwrap();
        let m = |r: &[i64]| -> Vec<Vec<Complex64>> {
            r.iter()
                .map(|&i| cols.iter().map(|&k| w.get(i, k).unwrap()).collect())
                .collect()
        };
        let swapped: Vec<i64> = rows.iter().rev().cloned().collect();
        let a = Complex64::det(&m(&rows));
        let b = Complex64::det(&m(&swapped));
        assert!((a + b).norm() <= 1e-14 * a.norm().max(1e-300));
    }

    #[test]
    fn zero_times_collapse() {
        let g = MeasureSpec::circle(RSequence::Exponential { scale: 1.0 });
        let d = DeformationParams::none();
        let opts = SeriesOptions {
            truncation: 4,
            tol: None,
        };
        let a = andreief_for(&g, &d, 2, &quad()).unwrap();
        for v in Variant::ALL {
            let (z, t) = double_series_z(v, &g, &d, 2, &opts, &quad()).unwrap();
            assert_eq!(t.series.len(), 1);
            assert!(relative_difference(z.value, a.value) < 1e-14);
        }
        let (q, t) = quadruple_series_z(&g, &d, 2, &opts, &quad()).unwrap();
        assert_eq!(t.series.len(), 1);
        assert!(relative_difference(q.value, a.value) < 1e-14);
    }

    #[test]
    fn tau_factor_examples() {
        let g = MeasureSpec::gaussian(0.5);
        let d = DeformationParams::none();
        let z = andreief_for(&g, &d, 2, &quad()).unwrap();
        assert!(relative_difference(tau_value(&z, &d), -z.value / 2.0) < 1e-15);
        let z0 = andreief_for(&g, &d, 0, &quad()).unwrap();
        assert_eq!(tau_value(&z0, &d), c(1.0));
    }

    #[test]
    fn radial_small_cases() {
        let pot = [-1.0];
        assert!((radial_coefficient(&pot, &Partition::empty(), 1, 0).unwrap() - PI).abs() < 1e-15);
        let opts = SeriesOptions {
            truncation: 2,
            tol: None,
        };
        let z = radial_series_z(&pot, &DeformationParams::none(), 1, &opts).unwrap();
        assert!(relative_difference(z.value, c(PI)) < 1e-15);
        // n = 1, m = 0 with t2 = 0: nothing pairs with λ + 1
        let d = DeformationParams {
            n: 1,
            t1: TimeSequence::single(1, c(0.1)),
            ..Default::default()
        };
        assert_eq!(radial_series_z(&pot, &d, 1, &opts).unwrap().value, c(0.0));
    }

    #[test]
    fn kernel_identity() {
        let r = RSequence::Exponential { scale: 1.0 };
        let k = coupling_kernel_check(&r, &[0.4], &[0.3], 14).unwrap();
        assert!((k.kernel - (0.12f64).exp()).abs() < 1e-15);
        assert!(k.residual < 1e-14);
        let k = coupling_kernel_check(&r, &[0.3, 0.1], &[0.2, -0.1], 12).unwrap();
        assert!(k.residual < 1e-10);
    }
}

//! Measures on pairs of eigenvalues and their bimoments
//! `B_ik = ∫ x^i y^k e^{V(x,t1)+V(y,t2)+V(1/x,t̄1)+V(1/y,t̄2)} dμ(x, y)`.
//!
//! Four kinds are supported:
//!
//! | kind | weight | nodes |
//! |---|---|---|
//! | `gaussian_coupled` | `e^{-x²/2 - y²/2 + cxy + V1(x) + V2(y)}` on ℝ² | Gauss–Hermite on the rotated axes `x ± y` |
//! | `contour_polynomial` | `Σ κ_ab e^{-Σ u_i x^i/i - Σ v_i y^i/i + xy}` on `γ_a × Γ_b` | panelled Gauss–Legendre |
//! | `circle_product` | `w1(x) w2(y) τ_r(1, 1/(xy))` on the unit torus | trapezoid |
//! | `radial_planar` | `e^{𝒱(|z|²)} d²z` with `x = z`, `y = z̄` | Gauss–Laguerre × trapezoid |
//!
//! Circle integrals use `(dx/ix)(dy/iy) = dθ dφ`, counterclockwise, so with
//! `w = 1` and the exponential coupling `B_ik = (2π)² δ_ik / i!`. The planar
//! measure `d²z` is the area element.
//!
//! The shifts `x^n y^m` are never applied here: engines read them off as
//! index offsets, so one window serves every `(n, m)`.
//!
//! Quadrature results are accepted only after doubling the point count
//! changes every entry by less than the relative target.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::path::Path;
use std::sync::{Arc, RwLock};

use gauss_quad::{GaussHermite, GaussLaguerre, GaussLegendre};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schur::TimeSequence;

/// Ratio sequence `r(j)` of a content-product coupling
/// `τ_r(1, u) = 1 + Σ_k r(1)⋯r(k) u^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RSequence {
    /// `r(j) = scale / j`, so `τ_r(1, u) = e^{scale·u}`.
    Exponential { scale: f64 },
    /// `r(j) = z (shift + j) / j`, so `τ_r(1, u) = (1 - z u)^{-shift-1}`.
    Pochhammer { z: f64, shift: f64 },
}

impl RSequence {
    pub fn r(&self, j: i64) -> Option<f64> {
        if j == 0 {
            return None;
        }
        let j = j as f64;
        Some(match *self {
            RSequence::Exponential { scale } => scale / j,
            RSequence::Pochhammer { z, shift } => z * (shift + j) / j,
        })
    }

    /// Exact `r(j)` with float parameters read as their binary values.
    pub fn r_exact(&self, j: i64) -> Option<BigRational> {
        if j == 0 {
            return None;
        }
        let jq = BigRational::from_integer(j.into());
        let f = |x: f64| BigRational::from_float(x).expect("finite parameter");
        Some(match *self {
            RSequence::Exponential { scale } => f(scale) / jq,
            RSequence::Pochhammer { z, shift } => f(z) * (f(shift) + jq.clone()) / jq,
        })
    }

    /// `Π_{j=1}^k r(j)`.
    pub fn prefix_product(&self, k: usize) -> f64 {
        (1..=k as i64).map(|j| self.r(j).unwrap()).product()
    }

    /// `τ_r(1, u)`, summed until the tail is negligible.
    pub fn kernel(&self, u: Complex64) -> Result<Complex64> {
        let mut term = Complex64::one();
        let mut sum = Complex64::one();
        for j in 1..=20_000i64 {
            term *= u * self.r(j).unwrap();
            sum += term;
            if term.norm() <= 1e-18 * sum.norm().max(1e-300) && j > 8 {
                return Ok(sum);
            }
            if term.norm() == 0.0 {
                return Ok(sum);
            }
        }
        Err(Error::Divergent(format!(
            "coupling series at |u| = {} did not converge",
            u.norm()
        )))
    }
}

/// `exp(Σ plus_k x^k + Σ minus_k x^{-k})` on the unit circle.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaurentWeight {
    #[serde(default)]
    pub plus: Vec<f64>,
    #[serde(default)]
    pub minus: Vec<f64>,
}

impl LaurentWeight {
    pub fn is_trivial(&self) -> bool {
        self.plus.iter().chain(&self.minus).all(|c| *c == 0.0)
    }

    fn log(&self, x: Complex64) -> Complex64 {
        let xi = x.inv();
        let mut acc = Complex64::zero();
        for (k, c) in self.plus.iter().enumerate() {
            acc += x.powi(k as i32 + 1) * c;
        }
        for (k, c) in self.minus.iter().enumerate() {
            acc += xi.powi(k as i32 + 1) * c;
        }
        acc
    }
}

/// Integration path in the complex plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Contour {
    /// `s e^{iθ}`, `s ∈ ℝ`.
    Line { angle: f64 },
    /// `s e^{iθ}`, `s ≥ 0`.
    Ray { angle: f64 },
    /// Straight segment between two points given as `[re, im]`.
    Segment { from: [f64; 2], to: [f64; 2] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    GaussianCoupled {
        c: f64,
        /// Coefficients of `x, x², …` added to the exponent.
        #[serde(default)]
        v1: Vec<f64>,
        #[serde(default)]
        v2: Vec<f64>,
    },
    ContourPolynomial {
        /// `u_1 … u_{p+1}`; the exponent carries `-Σ u_i x^i / i`.
        u: Vec<f64>,
        v: Vec<f64>,
        gammas: Vec<Contour>,
        big_gammas: Vec<Contour>,
        /// `κ_ab`, one row per `γ_a`.
        kappa: Vec<Vec<f64>>,
    },
    CircleProduct {
        #[serde(default)]
        w1: LaurentWeight,
        #[serde(default)]
        w2: LaurentWeight,
        coupling: RSequence,
    },
    RadialPlanar {
        /// `𝒱(X) = Σ potential[k-1] X^k`.
        potential: Vec<f64>,
    },
}

impl MeasureSpec {
    pub fn gaussian(c: f64) -> Self {
        MeasureSpec::GaussianCoupled {
            c,
            v1: Vec::new(),
            v2: Vec::new(),
        }
    }

    pub fn circle(coupling: RSequence) -> Self {
        MeasureSpec::CircleProduct {
            w1: LaurentWeight::default(),
            w2: LaurentWeight::default(),
            coupling,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MeasureSpec::GaussianCoupled { .. } => "gaussian_coupled",
            MeasureSpec::ContourPolynomial { .. } => "contour_polynomial",
            MeasureSpec::CircleProduct { .. } => "circle_product",
            MeasureSpec::RadialPlanar { .. } => "radial_planar",
        }
    }

    pub fn allows_negative_indices(&self) -> bool {
        matches!(self, MeasureSpec::CircleProduct { .. })
    }

    pub fn default_scheme(&self) -> Scheme {
        match self {
            MeasureSpec::GaussianCoupled { .. } => Scheme::GaussHermite,
            MeasureSpec::ContourPolynomial { .. } => Scheme::GaussLegendreMapped,
            MeasureSpec::CircleProduct { .. } => Scheme::CircleTrapezoid,
            MeasureSpec::RadialPlanar { .. } => Scheme::RadialLaguerreAngularTrapezoid,
        }
    }

    /// Checks the measure itself and that `deform` keeps it convergent.
    pub fn validate(&self, deform: &DeformationParams) -> Result<()> {
        let tbar = !deform.tbar1.is_zero() || !deform.tbar2.is_zero();
        match self {
            MeasureSpec::GaussianCoupled { c, v1, v2 } => {
                if tbar {
                    return Err(Error::NegativeIndexUnsupported(-1, -1));
                }
                let d1 = gaussian_stabilizer(v1, *c)?;
                let d2 = gaussian_stabilizer(v2, *c)?;
                check_degree(deform.t1.degree(), d1, "x-side")?;
                check_degree(deform.t2.degree(), d2, "y-side")?;
            }
            MeasureSpec::ContourPolynomial {
                u,
                v,
                gammas,
                big_gammas,
                kappa,
            } => {
                if tbar {
                    return Err(Error::NegativeIndexUnsupported(-1, -1));
                }
                if u.is_empty() || v.is_empty() || *u.last().unwrap() == 0.0 || *v.last().unwrap() == 0.0 {
                    return Err(Error::Config(
                        "contour potentials need a nonzero leading coefficient".into(),
                    ));
                }
                if kappa.len() != gammas.len() || kappa.iter().any(|row| row.len() != big_gammas.len()) {
                    return Err(Error::Config("kappa must be a gammas × big_gammas matrix".into()));
                }
                for g in gammas {
                    contour_decay(g, u)?;
                }
                for g in big_gammas {
                    contour_decay(g, v)?;
                }
                check_degree(deform.t1.degree(), u.len(), "x-side")?;
                check_degree(deform.t2.degree(), v.len(), "y-side")?;
            }
            MeasureSpec::CircleProduct { coupling, .. } => {
                coupling.kernel(Complex64::new(1.0, 0.0))?;
                coupling.kernel(Complex64::new(-1.0, 0.0))?;
            }
            MeasureSpec::RadialPlanar { potential } => {
                if tbar {
                    return Err(Error::NegativeIndexUnsupported(-1, -1));
                }
                radial_leading(potential)?;
                check_degree(
                    deform.t1.degree().max(deform.t2.degree()),
                    2 * potential.len(),
                    "planar",
                )?;
            }
        }
        Ok(())
    }
}

fn check_degree(t_degree: usize, stabilizing: usize, side: &str) -> Result<()> {
    if t_degree >= stabilizing {
        return Err(Error::DivergentDeformation {
            degree: t_degree,
            detail: format!("{side} stabilizing degree is {stabilizing}"),
        });
    }
    Ok(())
}

/// Degree of the term that confines one axis of the gaussian weight.
fn gaussian_stabilizer(v: &[f64], c: f64) -> Result<usize> {
    if c.abs() >= 1.0 {
        return Err(Error::Divergent(format!("|c| = {} must be below 1", c.abs())));
    }
    let deg = v.iter().rposition(|x| *x != 0.0).map(|i| i + 1).unwrap_or(0);
    if deg <= 2 {
        if deg == 2 && v[1] >= 0.5 * (1.0 - c.abs()) {
            return Err(Error::Divergent("quadratic potential cancels the gaussian".into()));
        }
        return Ok(2);
    }
    if deg % 2 == 1 || v[deg - 1] >= 0.0 {
        return Err(Error::Divergent(format!("potential of degree {deg} is not confining")));
    }
    Ok(deg)
}

/// Checks `Re(u_{p+1} x^{p+1}) → +∞` along the unbounded ends of `g`.
fn contour_decay(g: &Contour, u: &[f64]) -> Result<()> {
    let p1 = u.len() as f64;
    let lead = *u.last().unwrap();
    let ok = |angle: f64| lead * (p1 * angle).cos() > 1e-9;
    let fine = match *g {
        Contour::Line { angle } => ok(angle) && ok(angle + PI),
        Contour::Ray { angle } => ok(angle),
        Contour::Segment { .. } => true,
    };
    if fine {
        Ok(())
    } else {
        Err(Error::Divergent(format!("{g:?} leaves the convergence sectors")))
    }
}

/// `(a, p)` with `𝒱 ~ -a X^p` at infinity.
fn radial_leading(potential: &[f64]) -> Result<(f64, usize)> {
    let deg = potential.iter().rposition(|x| *x != 0.0).map(|i| i + 1);
    match deg {
        Some(p) if potential[p - 1] < 0.0 => Ok((-potential[p - 1], p)),
        _ => Err(Error::Divergent("radial potential must tend to -∞".into())),
    }
}

/// Serde adapter: each time is a number or a `[re, im]` pair.
pub mod flex_times {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Real(f64),
        Pair([f64; 2]),
    }

    pub fn serialize<S: serde::Serializer>(t: &TimeSequence<Complex64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Entry> = t
            .coeffs()
            .iter()
            .map(|c| {
                if c.im == 0.0 {
                    Entry::Real(c.re)
                } else {
                    Entry::Pair([c.re, c.im])
                }
            })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<TimeSequence<Complex64>, D::Error> {
        let v: Vec<Entry> = Vec::deserialize(d)?;
        Ok(TimeSequence::new(
            v.into_iter()
                .map(|e| match e {
                    Entry::Real(x) => Complex64::new(x, 0.0),
                    Entry::Pair([a, b]) => Complex64::new(a, b),
                })
                .collect(),
        ))
    }
}

/// The four time sequences and the monomial shifts `x^n y^m`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationParams {
    #[serde(default, with = "flex_times")]
    pub t1: TimeSequence<Complex64>,
    #[serde(default, with = "flex_times")]
    pub t2: TimeSequence<Complex64>,
    #[serde(default, with = "flex_times")]
    pub tbar1: TimeSequence<Complex64>,
    #[serde(default, with = "flex_times")]
    pub tbar2: TimeSequence<Complex64>,
    #[serde(default)]
    pub n: i64,
    #[serde(default)]
    pub m: i64,
}

impl DeformationParams {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn has_times(&self) -> bool {
        !(self.t1.is_zero() && self.t2.is_zero() && self.tbar1.is_zero() && self.tbar2.is_zero())
    }

    /// The same times with `n = m = 0`; windows are keyed on this.
    pub fn times_only(&self) -> Self {
        DeformationParams {
            n: 0,
            m: 0,
            ..self.clone()
        }
    }

    /// Keeps only the listed sequences (`[t1, t2, tbar1, tbar2]`).
    pub fn select(&self, keep: [bool; 4]) -> Self {
        let pick = |on: bool, t: &TimeSequence<Complex64>| if on { t.clone() } else { TimeSequence::zero() };
        DeformationParams {
            t1: pick(keep[0], &self.t1),
            t2: pick(keep[1], &self.t2),
            tbar1: pick(keep[2], &self.tbar1),
            tbar2: pick(keep[3], &self.tbar2),
            n: self.n,
            m: self.m,
        }
    }

    /// Exponent `V(x,t1) + V(y,t2) + V(1/x,t̄1) + V(1/y,t̄2)`.
    pub fn log_weight(&self, x: Complex64, y: Complex64) -> Complex64 {
        let mut v = self.t1.potential(&x) + self.t2.potential(&y);
        if !self.tbar1.is_zero() {
            v += self.tbar1.potential(&x.inv());
        }
        if !self.tbar2.is_zero() {
            v += self.tbar2.potential(&y.inv());
        }
        v
    }

    /// `c(t, t̄) = exp(-Σ_α Σ_k k t^(α)_k t̄^(α)_k)`.
    pub fn tau_factor(&self) -> Complex64 {
        let mut s = Complex64::zero();
        for (t, tb) in [(&self.t1, &self.tbar1), (&self.t2, &self.tbar2)] {
            for k in 1..=t.degree().max(tb.degree()) {
                s += t.get(k) * tb.get(k) * k as f64;
            }
        }
        (-s).exp()
    }

    /// Stable short hash of the canonical JSON form.
    pub fn fingerprint(&self) -> String {
        let text = serde_json::to_string(self).expect("serializable");
        format!("{:016x}", fnv1a(text.as_bytes()))
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf29ce484222325u64, |h, b| {
        (h ^ *b as u64).wrapping_mul(0x100000001b3)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    GaussHermite,
    GaussLegendreMapped,
    CircleTrapezoid,
    RadialLaguerreAngularTrapezoid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Must match the measure kind when given.
    #[serde(default)]
    pub scheme: Option<Scheme>,
    /// Starting points per axis.
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
    /// Relative change allowed between successive doublings.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_points() -> usize {
    32
}
fn default_max_points() -> usize {
    1024
}
fn default_tol() -> f64 {
    1e-12
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            scheme: None,
            points: default_points(),
            max_points: default_max_points(),
            tol: default_tol(),
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(tol: f64) -> Self {
        QuadratureSpec { tol, ..Self::default() }
    }
}

/// Inclusive index rectangle `[i_lo, i_hi] × [k_lo, k_hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub i_lo: i64,
    pub i_hi: i64,
    pub k_lo: i64,
    pub k_hi: i64,
}

impl Rect {
    pub fn new(i_lo: i64, i_hi: i64, k_lo: i64, k_hi: i64) -> Self {
        assert!(i_lo <= i_hi && k_lo <= k_hi, "empty rectangle");
        Rect { i_lo, i_hi, k_lo, k_hi }
    }

    pub fn square(lo: i64, hi: i64) -> Self {
        Rect::new(lo, hi, lo, hi)
    }

    pub fn contains(&self, i: i64, k: i64) -> bool {
        (self.i_lo..=self.i_hi).contains(&i) && (self.k_lo..=self.k_hi).contains(&k)
    }

    pub fn covers(&self, other: &Rect) -> bool {
        self.contains(other.i_lo, other.k_lo) && self.contains(other.i_hi, other.k_hi)
    }

    pub fn rows(&self) -> usize {
        (self.i_hi - self.i_lo + 1) as usize
    }

    pub fn cols(&self) -> usize {
        (self.k_hi - self.k_lo + 1) as usize
    }

    /// Smallest rectangle containing both.
    pub fn union(&self, o: &Rect) -> Rect {
        Rect::new(
            self.i_lo.min(o.i_lo),
            self.i_hi.max(o.i_hi),
            self.k_lo.min(o.k_lo),
            self.k_hi.max(o.k_hi),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Quadrature { scheme: Scheme, points: usize, change: f64 },
}

/// A rectangle of (deformed) bimoments with everything needed to redo it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BimomentWindow {
    pub rect: Rect,
    /// `values[i - i_lo][k - k_lo]`.
    pub values: Vec<Vec<Complex64>>,
    pub measure: MeasureSpec,
    pub deformation: DeformationParams,
    pub provenance: Provenance,
}

impl BimomentWindow {
    pub fn get(&self, i: i64, k: i64) -> Result<Complex64> {
        if !self.rect.contains(i, k) {
            return Err(Error::WindowTooSmall(i, k));
        }
        Ok(self.values[(i - self.rect.i_lo) as usize][(k - self.rect.k_lo) as usize])
    }

    pub fn require(&self, r: &Rect) -> Result<()> {
        for (i, k) in [(r.i_lo, r.k_lo), (r.i_hi, r.k_hi)] {
            if !self.rect.contains(i, k) {
                return Err(Error::WindowTooSmall(i, k));
            }
        }
        Ok(())
    }

    /// Relative error bound carried by the entries.
    pub fn error_estimate(&self) -> f64 {
        match self.provenance {
            Provenance::Analytic => 0.0,
            Provenance::Quadrature { change, .. } => change,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<BimomentWindow> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

// ---------------------------------------------------------------------------
// closed forms

/// `E[x^i y^k]` for the unit-diagonal gaussian with correlation `c`, exactly:
/// `i! k! [a^i b^k] exp(s(a² + 2c ab + b²)/2)` with `s = 1/(1-c²)`.
pub fn gaussian_moment_exact(c: &BigRational, i: u32, k: u32) -> BigRational {
    let one = BigRational::one();
    let s = one.clone() / (one.clone() - c * c);
    let half = BigRational::new(1.into(), 2.into());
    let fact = |n: u32| (1..=n).fold(BigRational::one(), |a, j| a * BigRational::from_integer(j.into()));
    let mut acc = BigRational::zero();
    // a^{2p+q} b^{q+2r}
    for q in 0..=i.min(k) {
        if (i - q) % 2 == 1 || (k - q) % 2 == 1 {
            continue;
        }
        let (p, r) = ((i - q) / 2, (k - q) / 2);
        let term = num_traits::pow(&s * &half, p as usize) / fact(p) * num_traits::pow(&s * c, q as usize) / fact(q)
            * num_traits::pow(&s * &half, r as usize)
            / fact(r);
        acc += term;
    }
    acc * fact(i) * fact(k)
}

fn gaussian_moment_f64(c: f64, i: u32, k: u32) -> f64 {
    let s = 1.0 / (1.0 - c * c);
    let lf = |n: u32| libm::lgamma(n as f64 + 1.0);
    let mut acc = 0.0;
    for q in 0..=i.min(k) {
        if (i - q) % 2 == 1 || (k - q) % 2 == 1 {
            continue;
        }
        let (p, r) = ((i - q) / 2, (k - q) / 2);
        let lg = lf(i) + lf(k) - lf(p) - lf(q) - lf(r);
        acc += (s / 2.0).powi((p + r) as i32) * (s * c).powi(q as i32) * lg.exp();
    }
    acc
}

/// Transcendental factor of an exact window: value = `prefactor · rational`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prefactor {
    pub symbol: String,
    pub value: f64,
}

/// Bimoments known as `prefactor × exact rational`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactWindow {
    pub rect: Rect,
    pub prefactor: Prefactor,
    pub values: Vec<Vec<BigRational>>,
}

impl ExactWindow {
    pub fn get(&self, i: i64, k: i64) -> Result<BigRational> {
        if !self.rect.contains(i, k) {
            return Err(Error::WindowTooSmall(i, k));
        }
        Ok(self.values[(i - self.rect.i_lo) as usize][(k - self.rect.k_lo) as usize].clone())
    }
}

/// Exact reduced bimoments, available for the undeformed gaussian without
/// potentials and the undeformed circle with trivial weights.
pub fn exact_window(spec: &MeasureSpec, rect: Rect) -> Result<ExactWindow> {
    check_indices(spec, &rect)?;
    let build = |f: &dyn Fn(i64, i64) -> BigRational| -> Vec<Vec<BigRational>> {
        (rect.i_lo..=rect.i_hi)
            .map(|i| (rect.k_lo..=rect.k_hi).map(|k| f(i, k)).collect())
            .collect()
    };
    match spec {
        MeasureSpec::GaussianCoupled { c, v1, v2 } if v1.iter().chain(v2).all(|x| *x == 0.0) => {
            gaussian_stabilizer(&[], *c)?;
            let cq = BigRational::from_float(*c).ok_or_else(|| Error::Config("c must be finite".into()))?;
            Ok(ExactWindow {
                rect,
                prefactor: Prefactor {
                    symbol: "2π/√(1-c²)".into(),
                    value: 2.0 * PI / (1.0 - c * c).sqrt(),
                },
                values: build(&|i, k| gaussian_moment_exact(&cq, i as u32, k as u32)),
            })
        }
        MeasureSpec::CircleProduct { w1, w2, coupling } if w1.is_trivial() && w2.is_trivial() => Ok(ExactWindow {
            rect,
            prefactor: Prefactor {
                symbol: "(2π)²".into(),
                value: 4.0 * PI * PI,
            },
            values: build(&|i, k| {
                if i != k || i < 0 {
                    BigRational::zero()
                } else {
                    (1..=i).fold(BigRational::one(), |a, j| a * coupling.r_exact(j).unwrap())
                }
            }),
        }),
        _ => Err(Error::Config(format!(
            "no exact bimoments for this {} measure",
            spec.kind()
        ))),
    }
}

/// Float window from a closed form, if one applies to `spec` undeformed.
fn analytic_window(spec: &MeasureSpec, rect: Rect) -> Option<Result<Vec<Vec<Complex64>>>> {
    let grid = |f: &dyn Fn(i64, i64) -> Result<f64>| -> Result<Vec<Vec<Complex64>>> {
        (rect.i_lo..=rect.i_hi)
            .map(|i| {
                (rect.k_lo..=rect.k_hi)
                    .map(|k| f(i, k).map(|v| Complex64::new(v, 0.0)))
                    .collect()
            })
            .collect()
    };
    match spec {
        MeasureSpec::GaussianCoupled { c, v1, v2 } if v1.iter().chain(v2).all(|x| *x == 0.0) => {
            let b00 = 2.0 * PI / (1.0 - c * c).sqrt();
            Some(grid(&|i, k| Ok(b00 * gaussian_moment_f64(*c, i as u32, k as u32))))
        }
        MeasureSpec::CircleProduct { w1, w2, coupling } if w1.is_trivial() && w2.is_trivial() => Some(grid(&|i, k| {
            Ok(if i != k || i < 0 {
                0.0
            } else {
                4.0 * PI * PI * coupling.prefix_product(i as usize)
            })
        })),
        MeasureSpec::RadialPlanar { potential } if radial_monomial(potential).is_some() => Some(grid(&|i, k| {
            if i != k {
                Ok(0.0)
            } else {
                radial_moment(potential, i as u32).map(|v| PI * v)
            }
        })),
        _ => None,
    }
}

fn check_indices(spec: &MeasureSpec, rect: &Rect) -> Result<()> {
    if !spec.allows_negative_indices() && (rect.i_lo < 0 || rect.k_lo < 0) {
        return Err(Error::NegativeIndexUnsupported(rect.i_lo, rect.k_lo));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// radial moments

fn radial_monomial(potential: &[f64]) -> Option<(f64, usize)> {
    let nz: Vec<usize> = (0..potential.len()).filter(|&i| potential[i] != 0.0).collect();
    match nz.as_slice() {
        [i] if potential[*i] < 0.0 => Some((-potential[*i], i + 1)),
        _ => None,
    }
}

fn potential_at(potential: &[f64], x: f64) -> f64 {
    potential.iter().rev().fold(0.0, |acc, c| (acc + c) * x)
}

/// Scaled Gauss–Laguerre nodes `(X, ln w)` for `∫_0^∞ e^{𝒱(X)} f(X) dX`.
fn laguerre_nodes(potential: &[f64], points: usize) -> Result<Vec<(f64, f64)>> {
    let (a, p) = radial_leading(potential)?;
    let beta = if p == 1 { a } else { 1.0 };
    let rule = GaussLaguerre::new(NonZeroUsize::new(points).unwrap(), 0.0.try_into().unwrap());
    Ok(rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(u, w)| {
            let x = u / beta;
            (x, w.ln() + u - beta.ln() + potential_at(potential, x))
        })
        .collect())
}

/// `M(j) = ∫_0^∞ e^{𝒱(X)} X^j dX`: closed form for `𝒱 = -a X^p`, otherwise
/// Gauss–Laguerre with point doubling.
pub fn radial_moment(potential: &[f64], j: u32) -> Result<f64> {
    if let Some((a, p)) = radial_monomial(potential) {
        let s = (j as f64 + 1.0) / p as f64;
        return Ok((libm::lgamma(s) - s * a.ln()).exp() / p as f64);
    }
    let eval = |pts: usize| -> Result<f64> {
        Ok(laguerre_nodes(potential, pts)?
            .iter()
            .map(|&(x, lw)| (lw + j as f64 * x.ln()).exp())
            .sum())
    };
    let mut pts = 32;
    let mut prev = eval(pts)?;
    while pts < 512 {
        pts *= 2;
        let cur = eval(pts)?;
        if (cur - prev).abs() <= 1e-13 * cur.abs() {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged {
        points: pts,
        change: 0.0,
    })
}

// ---------------------------------------------------------------------------
// quadrature grids

/// Tensor node set: `B_ik ≈ Σ w x^i y^k`.
pub struct Grid {
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
    pub w: Vec<Complex64>,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    fn with_capacity(n: usize) -> Self {
        Grid {
            x: Vec::with_capacity(n),
            y: Vec::with_capacity(n),
            w: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, x: Complex64, y: Complex64, w: Complex64) {
        if w != Complex64::zero() {
            self.x.push(x);
            self.y.push(y);
            self.w.push(w);
        }
    }

    /// Entries of `rect` and their absolute sums `Σ |w x^i y^k|`, one rayon
    /// task per row; node order fixed.
    fn integrate(&self, rect: &Rect) -> Sums {
        let rows: Vec<(Vec<Complex64>, Vec<f64>)> = (rect.i_lo..=rect.i_hi)
            .into_par_iter()
            .map(|i| {
                let mut acc = vec![Complex64::zero(); rect.cols()];
                let mut abs = vec![0.0; rect.cols()];
                for n in 0..self.w.len() {
                    let base = self.w[n] * self.x[n].powi(i as i32);
                    let mut yk = self.y[n].powi(rect.k_lo as i32);
                    for (a, b) in acc.iter_mut().zip(abs.iter_mut()) {
                        let term = base * yk;
                        *a += term;
                        *b += term.norm();
                        yk *= self.y[n];
                    }
                }
                (acc, abs)
            })
            .collect();
        let (values, abs) = rows.into_iter().unzip();
        Sums { values, abs }
    }
}

struct Sums {
    values: Vec<Vec<Complex64>>,
    abs: Vec<Vec<f64>>,
}

/// Cancellation noise allowed per unit of absolute sum.
const NOISE: f64 = 1e3 * f64::EPSILON;

/// Largest `|Δ| / (|B| + NOISE·Σ|·| / tol)` over the window: at most `tol`
/// exactly when every entry moved by less than `tol |B|` plus rounding noise.
fn relative_change(prev: &Sums, cur: &Sums, tol: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for ((ra, rb), rs) in prev.values.iter().zip(&cur.values).zip(&cur.abs) {
        for ((x, y), s) in ra.iter().zip(rb).zip(rs) {
            let denom = (y.norm() + NOISE * s / tol).max(f64::MIN_POSITIVE);
            let d = (x - y).norm() / denom;
            if !d.is_finite() {
                return f64::INFINITY;
            }
            worst = worst.max(d);
        }
    }
    worst
}

/// Gauss–Hermite nodes `(u, ln w)` for the weight `e^{-a u²/2}`.
fn hermite_axis(points: usize, a: f64) -> Vec<(f64, f64)> {
    let s = (2.0 / a).sqrt();
    GaussHermite::new(NonZeroUsize::new(points).unwrap())
        .as_node_weight_pairs()
        .iter()
        .filter(|&&(_, w)| w > 0.0)
        .map(|&(u, w)| (s * u, (s * w).ln()))
        .collect()
}

const PANEL_POINTS: usize = 16;

/// Panelled Gauss–Legendre nodes `(x, dx)` along one contour. `points` is the
/// total count; the cutoff radius grows slowly with it so that doubling also
/// probes truncation of infinite contours.
fn contour_axis(g: &Contour, lead: f64, degree: usize, points: usize) -> Vec<(Complex64, Complex64)> {
    let panels = (points / PANEL_POINTS).max(1);
    let rule = GaussLegendre::new(NonZeroUsize::new(PANEL_POINTS).unwrap());
    let level = (points as f64 / 64.0).log2().max(0.0);
    let radius = (40.0 * degree as f64 / lead.abs()).powf(1.0 / degree as f64) * 1.25f64.powf(level) + 2.0;
    let (origin, dir, a, b) = match *g {
        Contour::Line { angle } => (Complex64::zero(), Complex64::from_polar(1.0, angle), -radius, radius),
        Contour::Ray { angle } => (Complex64::zero(), Complex64::from_polar(1.0, angle), 0.0, radius),
        Contour::Segment { from, to } => {
            let f = Complex64::new(from[0], from[1]);
            (f, Complex64::new(to[0], to[1]) - f, 0.0, 1.0)
        }
    };
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * PANEL_POINTS);
    for p in 0..panels {
        let (lo, hi) = (a + p as f64 * h, a + (p + 1) as f64 * h);
        for &(s, w) in rule.as_node_weight_pairs() {
            let t = 0.5 * (hi - lo) * s + 0.5 * (hi + lo);
            out.push((origin + dir * t, dir * (0.5 * (hi - lo) * w)));
        }
    }
    out
}

fn build_grid(spec: &MeasureSpec, deform: &DeformationParams, points: usize) -> Result<Grid> {
    match spec {
        MeasureSpec::GaussianCoupled { c, v1, v2 } => {
            // rotated axes u = (x+y)/√2, v = (x-y)/√2 diagonalise the coupled
            // quadratic form, so the gaussian part is carried by the weights
            let au = hermite_axis(points, 1.0 - c);
            let av = hermite_axis(points, 1.0 + c);
            let r = std::f64::consts::FRAC_1_SQRT_2;
            let mut g = Grid::with_capacity(points * points);
            for &(u, lu) in &au {
                for &(v, lv) in &av {
                    let (x, y) = (r * (u + v), r * (u - v));
                    let (xc, yc) = (Complex64::new(x, 0.0), Complex64::new(y, 0.0));
                    let e = Complex64::new(lu + lv + potential_at(v1, x) + potential_at(v2, y), 0.0)
                        + deform.log_weight(xc, yc);
                    g.push(xc, yc, e.exp());
                }
            }
            Ok(g)
        }
        MeasureSpec::ContourPolynomial {
            u,
            v,
            gammas,
            big_gammas,
            kappa,
        } => {
            let poly = |coef: &[f64], x: Complex64| {
                coef.iter().enumerate().fold(Complex64::zero(), |acc, (i, c)| {
                    acc + x.powi(i as i32 + 1) * (c / (i + 1) as f64)
                })
            };
            let xs: Vec<_> = gammas
                .iter()
                .map(|g| contour_axis(g, *u.last().unwrap(), u.len(), points))
                .collect();
            let ys: Vec<_> = big_gammas
                .iter()
                .map(|g| contour_axis(g, *v.last().unwrap(), v.len(), points))
                .collect();
            let mut g = Grid::with_capacity(points * points);
            for (a, xa) in xs.iter().enumerate() {
                for (b, yb) in ys.iter().enumerate() {
                    if kappa[a][b] == 0.0 {
                        continue;
                    }
                    for &(x, dx) in xa {
                        let ex = -poly(u, x);
                        for &(y, dy) in yb {
                            let e = ex - poly(v, y) + x * y + deform.log_weight(x, y);
                            g.push(x, y, e.exp() * dx * dy * kappa[a][b]);
                        }
                    }
                }
            }
            Ok(g)
        }
        MeasureSpec::CircleProduct { w1, w2, coupling } => {
            let h = 2.0 * PI / points as f64;
            let pts: Vec<Complex64> = (0..points).map(|a| Complex64::from_polar(1.0, a as f64 * h)).collect();
            // τ depends on θ + φ only
            let kernel: Vec<Complex64> = (0..points)
                .map(|s| coupling.kernel(pts[(points - s) % points]))
                .collect::<Result<_>>()?;
            let mut g = Grid::with_capacity(points * points);
            for (a, &x) in pts.iter().enumerate() {
                let lx = w1.log(x);
                for (b, &y) in pts.iter().enumerate() {
                    let e = lx + w2.log(y) + deform.log_weight(x, y);
                    g.push(x, y, e.exp() * kernel[(a + b) % points] * (h * h));
                }
            }
            Ok(g)
        }
        MeasureSpec::RadialPlanar { potential } => {
            // d²z = ½ dX dθ with X = |z|²
            let radial = laguerre_nodes(potential, points)?;
            let h = 2.0 * PI / points as f64;
            let mut g = Grid::with_capacity(points * points);
            for &(xr, lw) in &radial {
                let r = xr.sqrt();
                for a in 0..points {
                    let z = Complex64::from_polar(r, a as f64 * h);
                    let e = Complex64::new(lw + (0.5 * h).ln(), 0.0) + deform.log_weight(z, z.conj());
                    g.push(z, z.conj(), e.exp());
                }
            }
            Ok(g)
        }
    }
}

/// Deformed quadrature nodes at `points` per axis, after validation.
pub fn node_set(spec: &MeasureSpec, deform: &DeformationParams, points: usize) -> Result<Grid> {
    spec.validate(deform)?;
    build_grid(spec, &deform.times_only(), points)
}

/// Window values at a fixed point count, with no certification.
pub fn window_at(
    spec: &MeasureSpec,
    rect: Rect,
    deform: &DeformationParams,
    points: usize,
) -> Result<Vec<Vec<Complex64>>> {
    spec.validate(deform)?;
    check_indices(spec, &rect)?;
    Ok(build_grid(spec, &deform.times_only(), points)?.integrate(&rect).values)
}

/// Certified bimoments over `rect`.
pub fn bimoment_window(
    spec: &MeasureSpec,
    rect: Rect,
    deform: &DeformationParams,
    quad: &QuadratureSpec,
) -> Result<BimomentWindow> {
    spec.validate(deform)?;
    check_indices(spec, &rect)?;
    let scheme = spec.default_scheme();
    if let Some(s) = quad.scheme {
        if s != scheme {
            return Err(Error::Config(format!(
                "scheme {s:?} does not fit a {} measure",
                spec.kind()
            )));
        }
    }
    let deformation = deform.times_only();
    if !deformation.has_times() {
        if let Some(values) = analytic_window(spec, rect) {
            return Ok(BimomentWindow {
                rect,
                values: values?,
                measure: spec.clone(),
                deformation,
                provenance: Provenance::Analytic,
            });
        }
    }
    let mut points = quad.points.max(4);
    let mut prev = build_grid(spec, &deformation, points)?.integrate(&rect);
    let mut change = f64::INFINITY;
    while points * 2 <= quad.max_points {
        points *= 2;
        let cur = build_grid(spec, &deformation, points)?.integrate(&rect);
        change = relative_change(&prev, &cur, quad.tol);
        if !change.is_finite() {
            break;
        }
        if change <= quad.tol {
            return Ok(BimomentWindow {
                rect,
                values: cur.values,
                measure: spec.clone(),
                deformation,
                provenance: Provenance::Quadrature { scheme, points, change },
            });
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged { points, change })
}

pub fn bimoment(spec: &MeasureSpec, i: i64, k: i64, quad: &QuadratureSpec) -> Result<Complex64> {
    deformed_bimoment(spec, i, k, &DeformationParams::none(), quad)
}

pub fn deformed_bimoment(
    spec: &MeasureSpec,
    i: i64,
    k: i64,
    deform: &DeformationParams,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    bimoment_window(spec, Rect::new(i, i, k, k), deform, quad)?.get(i, k)
}

/// In-memory window store: shared reads, one writer at a time. A request is
/// served from any stored window that covers it.
#[derive(Default)]
pub struct BimomentCache {
    windows: RwLock<HashMap<String, Vec<Arc<BimomentWindow>>>>,
}

impl BimomentCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(spec: &MeasureSpec, deform: &DeformationParams, quad: &QuadratureSpec) -> String {
        serde_json::to_string(&(spec, deform.times_only(), quad)).expect("serializable")
    }

    pub fn window(
        &self,
        spec: &MeasureSpec,
        rect: Rect,
        deform: &DeformationParams,
        quad: &QuadratureSpec,
    ) -> Result<Arc<BimomentWindow>> {
        let key = Self::key(spec, deform, quad);
        if let Some(list) = self.windows.read().unwrap().get(&key) {
            if let Some(w) = list.iter().find(|w| w.rect.covers(&rect)) {
                return Ok(w.clone());
            }
        }
        let w = Arc::new(bimoment_window(spec, rect, deform, quad)?);
        self.windows.write().unwrap().entry(key).or_default().push(w.clone());
        Ok(w)
    }

    pub fn len(&self) -> usize {
        self.windows.read().unwrap().values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Exact `f64` value of a rational, for reporting.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn rel(a: Complex64, b: f64) -> f64 {
        (a - b).norm() / b.abs().max(1e-300)
    }

    #[test]
    fn gaussian_closed_forms() {
        let g = MeasureSpec::gaussian(0.5);
        let quad = QuadratureSpec::default();
        let b00 = bimoment(&g, 0, 0, &quad).unwrap();
        assert!(rel(b00, 7.255197456936871) < 1e-12);
        assert_eq!(bimoment(&g, 1, 0, &quad).unwrap(), Complex64::zero());
        let b11 = bimoment(&g, 1, 1, &quad).unwrap();
        assert!(rel(b11, 2.0 * PI * 0.5 / 0.75f64.powf(1.5)) < 1e-12);
        assert!(rel(b11, 4.836798304624581) < 1e-12);
        // exact reduced values: E[xy] = c s, E[x²] = s
        assert_eq!(gaussian_moment_exact(&q(1, 2), 1, 1), q(2, 3));
        assert_eq!(gaussian_moment_exact(&q(1, 2), 2, 0), q(4, 3));
        assert_eq!(gaussian_moment_exact(&q(1, 2), 3, 0), q(0, 1));
    }

    #[test]
    fn gaussian_quadrature_matches_closed_form() {
        for c in [0.5, -0.3, 0.8] {
            let spec = MeasureSpec::gaussian(c);
            let rect = Rect::square(0, 5);
            let exact = analytic_window(&spec, rect).unwrap().unwrap();
            let quad = QuadratureSpec::default();
            // a zero-size deformation forces the quadrature route
            let d = DeformationParams {
                t1: TimeSequence::single(1, Complex64::new(1e-300, 0.0)),
                ..Default::default()
            };
            let w = bimoment_window(&spec, rect, &d, &quad).unwrap();
            assert!(matches!(w.provenance, Provenance::Quadrature { .. }));
            for i in 0..=5 {
                for k in 0..=5 {
                    if (i + k) % 2 == 1 {
                        assert!(w.get(i, k).unwrap().norm() < 1e-10 * exact[0][0].re);
                        continue;
                    }
                    let e = exact[i as usize][k as usize].re;
                    assert!(
                        rel(w.get(i, k).unwrap(), e) < 1e-10,
                        "c={c} ({i},{k}) {} {e} {:?}",
                        w.get(i, k).unwrap(),
                        w.provenance
                    );
                }
            }
        }
    }

    #[test]
    fn gaussian_validation() {
        let g = MeasureSpec::gaussian(0.5);
        let quad = QuadratureSpec::default();
        let d = DeformationParams {
            tbar1: TimeSequence::single(1, Complex64::new(0.1, 0.0)),
            ..Default::default()
        };
        assert!(matches!(
            deformed_bimoment(&g, 0, 0, &d, &quad),
            Err(Error::NegativeIndexUnsupported(..))
        ));
        let d = DeformationParams {
            t1: TimeSequence::single(2, Complex64::new(0.1, 0.0)),
            ..Default::default()
        };
        assert!(matches!(
            deformed_bimoment(&g, 0, 0, &d, &quad),
            Err(Error::DivergentDeformation { .. })
        ));
        assert!(matches!(
            bimoment(&g, -1, 0, &quad),
            Err(Error::NegativeIndexUnsupported(..))
        ));
        // a negative quartic lets a quadratic deformation through
        let g4 = MeasureSpec::GaussianCoupled {
            c: 0.2,
            v1: vec![0.0, 0.0, 0.0, -0.1],
            v2: vec![],
        };
        let d = DeformationParams {
            t1: TimeSequence::single(2, Complex64::new(0.05, 0.0)),
            ..Default::default()
        };
        assert!(g4.validate(&d).is_ok());
    }

    #[test]
    fn deformed_series_oracle() {
        // B_00(t1 = ε) = Σ_j ε^j B_j0 / j!
        let g = MeasureSpec::gaussian(0.5);
        let eps = 0.1;
        let d = DeformationParams {
            t1: TimeSequence::single(1, Complex64::new(eps, 0.0)),
            ..Default::default()
        };
        let quad = QuadratureSpec::default();
        let direct = deformed_bimoment(&g, 0, 0, &d, &quad).unwrap();
        let col = analytic_window(&g, Rect::new(0, 30, 0, 0)).unwrap().unwrap();
        let mut series = 0.0;
        let mut f = 1.0;
        for (j, row) in col.iter().enumerate() {
            if j > 0 {
                f *= eps / j as f64;
            }
            series += f * row[0].re;
        }
        assert!(rel(direct, series) < 1e-8);
    }

    #[test]
    fn deformation_derivative() {
        // ∂B_ik/∂t1_j = B_{i+j,k}
        let g = MeasureSpec::gaussian(0.3);
        let quad = QuadratureSpec::default();
        let h = 1e-4;
        let at = |t: f64| {
            let d = DeformationParams {
                t1: TimeSequence::single(1, Complex64::new(t, 0.0)),
                ..Default::default()
            };
            deformed_bimoment(&g, 1, 1, &d, &quad).unwrap()
        };
        let fd = (at(0.1 + h) - at(0.1 - h)) / (2.0 * h);
        let d = DeformationParams {
            t1: TimeSequence::single(1, Complex64::new(0.1, 0.0)),
            ..Default::default()
        };
        let b21 = deformed_bimoment(&g, 2, 1, &d, &quad).unwrap();
        assert!((fd - b21).norm() / b21.norm() < 1e-6);
    }

    #[test]
    fn circle_exponential_kernel() {
        let spec = MeasureSpec::circle(RSequence::Exponential { scale: 1.0 });
        let rect = Rect::square(-2, 4);
        let d = DeformationParams {
            t1: TimeSequence::single(1, Complex64::new(1e-300, 0.0)),
            ..Default::default()
        };
        let w = bimoment_window(&spec, rect, &d, &QuadratureSpec::default()).unwrap();
        let fact = |n: i64| (1..=n).product::<i64>() as f64;
        for i in -2..=4 {
            for k in -2..=4 {
                let want = if i == k && i >= 0 { 4.0 * PI * PI / fact(i) } else { 0.0 };
                assert!(
                    (w.get(i, k).unwrap() - want).norm() < 1e-12 * 4.0 * PI * PI,
                    "({i},{k})"
                );
            }
        }
        let ex = exact_window(&spec, rect).unwrap();
        assert_eq!(ex.get(3, 3).unwrap(), q(1, 6));
    }

    #[test]
    fn radial_moments() {
        assert!((radial_moment(&[-1.0], 0).unwrap() - 1.0).abs() < 1e-14);
        assert!((radial_moment(&[-1.0], 3).unwrap() - 6.0).abs() < 1e-12);
        assert!((radial_moment(&[0.0, -1.0], 0).unwrap() - PI.sqrt() / 2.0).abs() < 1e-14);
        // quadrature path against the closed form of a shifted exponential
        let m = radial_moment(&[-1.0, -1e-300], 2).unwrap();
        assert!((m - 2.0).abs() < 1e-11);
        assert!(matches!(radial_moment(&[1.0], 0), Err(Error::Divergent(_))));
    }

    #[test]
    fn radial_window_quadrature() {
        let spec = MeasureSpec::RadialPlanar { potential: vec![-1.0] };
        let d = DeformationParams {
            t1: TimeSequence::single(1, Complex64::new(1e-300, 0.0)),
            ..Default::default()
        };
        let w = bimoment_window(&spec, Rect::square(0, 3), &d, &QuadratureSpec::default()).unwrap();
        for i in 0..=3i64 {
            let want = PI * (1..=i).product::<i64>() as f64;
            assert!((w.get(i, i).unwrap() - want).norm() < 1e-10 * want);
            assert!(w.get(i, (i + 1) % 4).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn contour_matches_gaussian() {
        // e^{-x² - y² + xy} on the real lines
        let spec = MeasureSpec::ContourPolynomial {
            u: vec![0.0, 2.0],
            v: vec![0.0, 2.0],
            gammas: vec![Contour::Line { angle: 0.0 }],
            big_gammas: vec![Contour::Line { angle: 0.0 }],
            kappa: vec![vec![1.0]],
        };
        let w = bimoment_window(
            &spec,
            Rect::square(0, 2),
            &DeformationParams::none(),
            &QuadratureSpec::default(),
        )
        .unwrap();
        // ∫ e^{-x² - y² + xy} = 2π/√3, and E[xy] = 1/3
        let b00 = 2.0 * PI / 3f64.sqrt();
        assert!(rel(w.get(0, 0).unwrap(), b00) < 1e-11);
        assert!(rel(w.get(1, 1).unwrap(), b00 / 3.0) < 1e-11);
    }

    #[test]
    fn window_round_trip_and_cache() {
        let spec = MeasureSpec::circle(RSequence::Exponential { scale: 0.7 });
        let d = DeformationParams {
            t1: TimeSequence::single(1, Complex64::new(0.05, 0.01)),
            ..Default::default()
        };
        let cache = BimomentCache::new();
        let w = cache
            .window(&spec, Rect::square(-1, 2), &d, &QuadratureSpec::default())
            .unwrap();
        let again = cache
            .window(&spec, Rect::square(0, 1), &d, &QuadratureSpec::default())
            .unwrap();
        assert!(Arc::ptr_eq(&w, &again));
        let text = w.to_json_string();
        let back: BimomentWindow = serde_json::from_str(&text).unwrap();
        assert_eq!(&back, w.as_ref());
    }

    #[test]
    fn flexible_times() {
        let d: DeformationParams = serde_json::from_str(r#"{"t1": [0.1, [0.0, 2.0]], "n": 1}"#).unwrap();
        assert_eq!(d.t1.get(2), Complex64::new(0.0, 2.0));
        assert_eq!(d.n, 1);
        let tf = DeformationParams {
            t1: TimeSequence::single(1, Complex64::new(0.1, 0.0)),
            tbar1: TimeSequence::single(1, Complex64::new(0.1, 0.0)),
            ..Default::default()
        };
        assert!((tf.tau_factor() - (-0.01f64).exp()).norm() < 1e-15);
    }
}

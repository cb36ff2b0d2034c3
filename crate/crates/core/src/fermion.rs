//! Finite free-fermion oracle.
//!
//! Basis states are Maya diagrams: a charge `c` plus a partition λ, with
//! occupied modes `p_i = λ_i - i + c` for `i = 1, 2, …`. The charge-0 vacuum
//! fills every mode below 0. `f_k` fills mode `k` and `f̄_k` empties it; both
//! carry the sign `(-1)^{#occupied modes above k}`, i.e. occupied modes are
//! listed in strictly decreasing order and the operator is moved to its slot.
//!
//! Amplitudes live in any [`Coefficient`] ring: exact rationals, or
//! polynomials in formal time variables. Exponentials of Hamiltonians are
//! expanded term by term; lowering flows stop on their own, raising flows are
//! cut at a weighted degree.
//!
//! Two-component fermions are embedded as `f^(α)_n = f_{2n+α-1}`, so every
//! two-component sign is inherited from the one-component convention.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::partitions::Partition;
use crate::poly::{Poly, Var};
use crate::scalar::Ring;
use crate::schur::{schur_in_times, TimeSequence};

/// Ring usable as a Fock amplitude; `truncate` drops terms above a weighted
/// degree (a no-op for plain numbers).
pub trait Coefficient: Ring {
    fn truncate(&self, max_weight: u32) -> Self;
}

impl Coefficient for BigRational {
    fn truncate(&self, _: u32) -> Self {
        self.clone()
    }
}

impl Coefficient for Poly {
    fn truncate(&self, max_weight: u32) -> Self {
        Poly::truncate(self, max_weight)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MayaState {
    charge: i64,
    shape: Partition,
}

impl MayaState {
    pub fn vacuum(charge: i64) -> Self {
        MayaState {
            charge,
            shape: Partition::empty(),
        }
    }

    pub fn new(charge: i64, shape: Partition) -> Self {
        MayaState { charge, shape }
    }

    pub fn charge(&self) -> i64 {
        self.charge
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    /// `|λ|`, the energy above the charged vacuum.
    pub fn energy(&self) -> usize {
        self.shape.weight()
    }

    /// Below this mode everything is occupied.
    fn sea_top(&self) -> i64 {
        self.charge - self.shape.len() as i64
    }

    /// Occupied modes `≥ floor`, decreasing.
    fn occupied_from(&self, floor: i64) -> Vec<i64> {
        let mut out = Vec::new();
        let mut i = 0usize;
        loop {
            let p = self.shape.part(i) as i64 - i as i64 - 1 + self.charge;
            if p < floor {
                return out;
            }
            out.push(p);
            i += 1;
        }
    }

    fn from_occupied(list: &[i64], floor: i64) -> Self {
        let charge = floor + list.len() as i64;
        let parts: Vec<usize> = list
            .iter()
            .enumerate()
            .map(|(i, &p)| (p + i as i64 + 1 - charge) as usize)
            .collect();
        MayaState {
            charge,
            shape: Partition::new(parts),
        }
    }

    pub fn is_occupied(&self, k: i64) -> bool {
        k < self.sea_top() || self.occupied_from(k).last() == Some(&k)
    }

    /// Occupied modes at or above the charge.
    pub fn added(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.occupied_from(self.charge);
        v.reverse();
        v
    }

    /// Empty modes below the charge.
    pub fn removed(&self) -> Vec<i64> {
        let occ = self.occupied_from(self.sea_top());
        (self.sea_top()..self.charge).filter(|k| !occ.contains(k)).collect()
    }

    /// `f_k |self⟩` as a signed state.
    pub fn create(&self, k: i64) -> Option<(bool, MayaState)> {
        let floor = k.min(self.sea_top());
        let mut list = self.occupied_from(floor);
        let pos = list.iter().take_while(|&&p| p > k).count();
        if list.get(pos) == Some(&k) {
            return None;
        }
        list.insert(pos, k);
        Some((pos % 2 == 1, MayaState::from_occupied(&list, floor)))
    }

    /// `f̄_k |self⟩` as a signed state.
    pub fn annihilate(&self, k: i64) -> Option<(bool, MayaState)> {
        let floor = k.min(self.sea_top());
        let mut list = self.occupied_from(floor);
        let pos = list.iter().take_while(|&&p| p > k).count();
        if list.get(pos) != Some(&k) {
            return None;
        }
        list.remove(pos);
        Some((pos % 2 == 1, MayaState::from_occupied(&list, floor)))
    }
}

/// Finite combination of basis states; zero amplitudes are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector<C> {
    terms: BTreeMap<MayaState, C>,
}

impl<C: Coefficient> FockVector<C> {
    pub fn zero() -> Self {
        FockVector { terms: BTreeMap::new() }
    }

    pub fn basis(s: MayaState) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(s, C::one());
        FockVector { terms }
    }

    /// `|0⟩`.
    pub fn vacuum() -> Self {
        Self::basis(MayaState::vacuum(0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MayaState, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, s: MayaState, c: C) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&s) {
            Some(v) => v.clone() + c,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&s);
        } else {
            self.terms.insert(s, sum);
        }
    }

    pub fn plus(mut self, other: &FockVector<C>) -> Self {
        for (s, c) in &other.terms {
            self.add_term(s.clone(), c.clone());
        }
        self
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        for (s, v) in &self.terms {
            out.add_term(s.clone(), v.clone() * c.clone());
        }
        out
    }

    /// Amplitude of a basis state.
    pub fn coefficient(&self, s: &MayaState) -> C {
        self.terms.get(s).cloned().unwrap_or_else(C::zero)
    }

    /// `⟨a|b⟩` with the basis orthonormal and real amplitudes.
    pub fn inner(&self, other: &FockVector<C>) -> C {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .terms
            .iter()
            .filter_map(|(s, c)| large.terms.get(s).map(|d| c.clone() * d.clone()))
            .fold(C::zero(), |a, b| a + b)
    }

    fn truncate(&self, max_weight: u32) -> Self {
        let mut out = Self::zero();
        for (s, c) in &self.terms {
            out.add_term(s.clone(), c.truncate(max_weight));
        }
        out
    }

    fn filter_energy(self, max_energy: Option<usize>) -> Self {
        match max_energy {
            None => self,
            Some(e) => FockVector {
                terms: self.terms.into_iter().filter(|(s, _)| s.energy() <= e).collect(),
            },
        }
    }
}

fn signed<C: Coefficient>(neg: bool, c: &C) -> C {
    if neg {
        -c.clone()
    } else {
        c.clone()
    }
}

pub fn apply_f<C: Coefficient>(k: i64, v: &FockVector<C>) -> FockVector<C> {
    let mut out = FockVector::zero();
    for (s, c) in &v.terms {
        if let Some((neg, t)) = s.create(k) {
            out.add_term(t, signed(neg, c));
        }
    }
    out
}

pub fn apply_fbar<C: Coefficient>(k: i64, v: &FockVector<C>) -> FockVector<C> {
    let mut out = FockVector::zero();
    for (s, c) in &v.terms {
        if let Some((neg, t)) = s.annihilate(k) {
            out.add_term(t, signed(neg, c));
        }
    }
    out
}

/// Bilinear `Σ_{i ∈ class} f_i f̄_{i+step}`, where `class` keeps
/// `i ≡ residue (mod 2)` when set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hopping {
    pub step: i64,
    pub parity: Option<i64>,
}

impl Hopping {
    /// One-component `H_m = Σ_i f_i f̄_{i+m}`.
    pub fn h(m: i64) -> Self {
        assert_ne!(m, 0);
        Hopping { step: m, parity: None }
    }

    /// `H^(α)_k = Σ_n f^(α)_n f̄^(α)_{n+k}` through the embedding.
    pub fn component(alpha: u8, k: i64) -> Self {
        assert!(alpha == 1 || alpha == 2);
        assert_ne!(k, 0);
        Hopping {
            step: 2 * k,
            parity: Some(alpha as i64 - 1),
        }
    }
}

pub fn apply_hopping<C: Coefficient>(op: Hopping, v: &FockVector<C>) -> FockVector<C> {
    let mut out = FockVector::zero();
    for (s, c) in &v.terms {
        let floor = s.sea_top() - op.step.abs();
        for j in s.occupied_from(floor) {
            let i = j - op.step;
            if let Some(r) = op.parity {
                if i.rem_euclid(2) != r {
                    continue;
                }
            }
            let Some((n1, mid)) = s.annihilate(j) else { continue };
            let Some((n2, fin)) = mid.create(i) else { continue };
            out.add_term(fin, signed(n1 != n2, c));
        }
    }
    out
}

/// `H_m v` for the one-component Hamiltonian.
pub fn apply_h<C: Coefficient>(m: i64, v: &FockVector<C>) -> FockVector<C> {
    apply_hopping(Hopping::h(m), v)
}

/// A linear combination `Σ c_j X_j` of hoppings, the exponent of a flow.
pub type Generator<C> = Vec<(C, Hopping)>;

/// Bounds on the expansion of `e^X v`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExpCut {
    pub max_weight: Option<u32>,
    pub max_energy: Option<usize>,
}

const MAX_EXP_ORDER: usize = 512;

/// `e^X v`, summed until the terms vanish under the cuts.
pub fn apply_exp<C: Coefficient>(x: &Generator<C>, v: &FockVector<C>, cut: ExpCut) -> Result<FockVector<C>> {
    let trunc = |w: FockVector<C>| match cut.max_weight {
        Some(m) => w.truncate(m),
        None => w,
    };
    let mut sum = v.clone();
    let mut term = v.clone();
    for j in 1..=MAX_EXP_ORDER {
        let mut next = FockVector::zero();
        for (c, op) in x {
            next = next.plus(&apply_hopping(*op, &term).scale(c));
        }
        term = trunc(next.scale(&C::from_ratio(1, j as i64))).filter_energy(cut.max_energy);
        if term.is_zero() {
            return Ok(sum);
        }
        sum = sum.plus(&term);
    }
    Err(Error::BoundExceeded(format!(
        "exponential did not terminate within {MAX_EXP_ORDER} orders"
    )))
}

/// One factor in an operator product.
#[derive(Clone, Debug)]
pub enum Op<C> {
    F(i64),
    Fbar(i64),
    Exp(Generator<C>),
}

impl<C: Clone> Op<C> {
    /// Matrix transpose in the Maya basis: `f_k ↔ f̄_k`, `H_m → H_{-m}`.
    pub fn transpose(&self) -> Op<C> {
        match self {
            Op::F(k) => Op::Fbar(*k),
            Op::Fbar(k) => Op::F(*k),
            Op::Exp(x) => Op::Exp(
                x.iter()
                    .map(|(c, h)| {
                        (
                            c.clone(),
                            Hopping {
                                step: -h.step,
                                parity: h.parity,
                            },
                        )
                    })
                    .collect(),
            ),
        }
    }
}

/// Applies a product of operators (written left to right) to a ket.
pub fn apply_ops<C: Coefficient>(ops: &[Op<C>], v: &FockVector<C>, cut: ExpCut) -> Result<FockVector<C>> {
    let mut cur = v.clone();
    for op in ops.iter().rev() {
        cur = match op {
            Op::F(k) => apply_f(*k, &cur),
            Op::Fbar(k) => apply_fbar(*k, &cur),
            Op::Exp(x) => apply_exp(x, &cur, cut)?,
        };
        if cur.is_zero() {
            break;
        }
    }
    Ok(cur)
}

/// `⟨N|v⟩`: the amplitude of the charge-`N` vacuum.
pub fn vev<C: Coefficient>(n: i64, v: &FockVector<C>) -> C {
    v.coefficient(&MayaState::vacuum(n))
}

/// `|N⟩ = f_{N-1} ⋯ f_0 |0⟩` or `f̄_N ⋯ f̄_{-1} |0⟩`.
pub fn charged_vacuum<C: Coefficient>(n: i64) -> FockVector<C> {
    let mut v = FockVector::vacuum();
    if n > 0 {
        for k in 0..n {
            v = apply_f(k, &v);
        }
    } else {
        for k in (n..0).rev() {
            v = apply_fbar(k, &v);
        }
    }
    v
}

/// One-component mode index of `f^(α)_n`.
pub fn two_component_embed(alpha: u8, n: i64) -> i64 {
    assert!(alpha == 1 || alpha == 2, "component must be 1 or 2");
    2 * n + alpha as i64 - 1
}

/// `C̄_n` for component α applied to `v`.
fn apply_cbar<C: Coefficient>(alpha: u8, n: i64, v: &FockVector<C>) -> FockVector<C> {
    let mut v = v.clone();
    if n > 0 {
        for k in 0..n {
            v = apply_f(two_component_embed(alpha, k), &v);
        }
    } else {
        for k in (n..0).rev() {
            v = apply_fbar(two_component_embed(alpha, k), &v);
        }
    }
    v
}

/// `|n1, n2⟩ = C̄_{n2} C̄_{n1} |0,0⟩`. Since `C_n^† = C̄_n`, this ket is also
/// the dual of the bra `⟨n1, n2| = ⟨0,0| C_{n1} C_{n2}`.
pub fn two_vacuum<C: Coefficient>(n1: i64, n2: i64) -> FockVector<C> {
    apply_cbar(2, n2, &apply_cbar(1, n1, &FockVector::vacuum()))
}

/// `⟨N| e^{Σ_m H_m t_m} v` for formal or numeric times; exact because each
/// `H_m` lowers the energy by `m`.
pub fn exp_h_vev<C: Coefficient>(n: i64, t: &TimeSequence<C>, v: &FockVector<C>) -> Result<C> {
    if let Some((s, _)) = v.terms().next() {
        if s.charge() != n {
            return Err(Error::ChargeMismatch {
                expected: n,
                found: s.charge(),
            });
        }
    }
    let x: Generator<C> = (1..=t.degree()).map(|m| (t.get(m), Hopping::h(m as i64))).collect();
    let out = apply_exp(&x, v, ExpCut::default())?;
    Ok(vev(n, &out))
}

/// `⟨L| Π ops |R⟩` where both vacua are given as kets and raising flows are
/// cut at `max_weight`.
pub fn sandwich<C: Coefficient>(
    left: &FockVector<C>,
    ops: &[Op<C>],
    right: &FockVector<C>,
    max_weight: u32,
) -> Result<C> {
    let cut = ExpCut {
        max_weight: Some(max_weight),
        max_energy: None,
    };
    // Flows acting directly on a vacuum blow up the state; when only the
    // right end is a flow, run the transposed product on the bra instead.
    let flow_at = |op: Option<&Op<C>>| matches!(op, Some(Op::Exp(_)));
    if flow_at(ops.last()) && !flow_at(ops.first()) {
        let transposed: Vec<Op<C>> = ops.iter().rev().map(Op::transpose).collect();
        let out = apply_ops(&transposed, left, cut)?;
        return Ok(right.inner(&out).truncate(max_weight));
    }
    let out = apply_ops(ops, right, cut)?;
    Ok(left.inner(&out).truncate(max_weight))
}

// ---------------------------------------------------------------------------
// Formal identities

/// `(t_1, …, t_d)` as formal variables of one family.
pub fn formal_times(family: u8, d: usize) -> TimeSequence<Poly> {
    TimeSequence::new((1..=d).map(|k| Poly::var(Var::new(family, k as u32))).collect())
}

fn flow(alpha: Option<u8>, sign: i64, lowering: bool, t: &TimeSequence<Poly>) -> Op<Poly> {
    let gen = (1..=t.degree())
        .map(|k| {
            let m = if lowering { k as i64 } else { -(k as i64) };
            let op = match alpha {
                None => Hopping::h(m),
                Some(a) => Hopping::component(a, m),
            };
            (t.get(k).scale(&BigRational::from_integer(sign.into())), op)
        })
        .collect();
    Op::Exp(gen)
}

fn sign_of(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Result of one formal VEV identity: the oracle value and the claimed one.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub label: String,
    pub oracle: Poly,
    pub expected: Poly,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.oracle == self.expected
    }
}

/// The four single-component identities: for `which ∈ 1..=4`,
///
/// 1. `⟨N| e^{ΣH_m t_m} f_{h_1}⋯f_{h_N}|0⟩ = s_λ(t)`
/// 2. `⟨-N| e^{ΣH_m t_m} f̄_{-h_1-1}⋯f̄_{-h_N-1}|0⟩ = s_λ(-t)`
/// 3. `⟨N| f_{N-h_1-1}⋯f_{N-h_N-1} e^{-ΣH_{-m} t̄_m}|0⟩ = (-1)^{N(N-1)/2} s_λ(t̄)`
/// 4. `⟨-N| f̄_{h_1-N}⋯f̄_{h_N-N} e^{ΣH_{-m} t̄_m}|0⟩ = (-1)^{N(N-1)/2} s_λ(t̄)`
pub fn single_component_check(which: u8, lambda: &Partition, n: usize) -> Result<IdentityCheck> {
    let h = lambda.shifted_labels(n)?;
    let ni = n as i64;
    let w = lambda.weight();
    let d = w.max(1);
    let t = formal_times(Var::T1, d);
    let tb = formal_times(Var::TB1, d);
    let c = sign_of(ni * (ni - 1) / 2);
    let (left, ops, expected): (FockVector<Poly>, Vec<Op<Poly>>, Poly) = match which {
        1 => {
            let mut ops = vec![flow(None, 1, true, &t)];
            ops.extend(h.iter().map(|&k| Op::F(k)));
            (charged_vacuum(ni), ops, schur_in_times(lambda, &t))
        }
        2 => {
            let mut ops = vec![flow(None, 1, true, &t)];
            ops.extend(h.iter().map(|&k| Op::Fbar(-k - 1)));
            (charged_vacuum(-ni), ops, schur_in_times(lambda, &t.neg()))
        }
        3 => {
            let mut ops: Vec<Op<Poly>> = h.iter().map(|&k| Op::F(ni - k - 1)).collect();
            ops.push(flow(None, -1, false, &tb));
            (
                charged_vacuum(ni),
                ops,
                schur_in_times(lambda, &tb).scale(&BigRational::from_integer(c.into())),
            )
        }
        4 => {
            let mut ops: Vec<Op<Poly>> = h.iter().map(|&k| Op::Fbar(k - ni)).collect();
            ops.push(flow(None, 1, false, &tb));
            (
                charged_vacuum(-ni),
                ops,
                schur_in_times(lambda, &tb).scale(&BigRational::from_integer(c.into())),
            )
        }
        _ => return Err(Error::Config(format!("no single-component identity {which}"))),
    };
    // one extra order above |λ| so spurious higher terms would show up
    let oracle = sandwich(&left, &ops, &FockVector::vacuum(), w as u32 + 1)?;
    Ok(IdentityCheck {
        label: format!("single{which} N={n} λ={lambda}"),
        oracle,
        expected,
    })
}

/// Which pair of time families a two-component product identity uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Variant {
    #[serde(rename = "++")]
    PlusPlus,
    #[serde(rename = "--")]
    MinusMinus,
    #[serde(rename = "+-")]
    PlusMinus,
    #[serde(rename = "-+")]
    MinusPlus,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::PlusPlus,
        Variant::MinusMinus,
        Variant::PlusMinus,
        Variant::MinusPlus,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Variant::PlusPlus => "++",
            Variant::MinusMinus => "--",
            Variant::PlusMinus => "+-",
            Variant::MinusPlus => "-+",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.tag() == s)
    }

    /// Overall sign multiplying the Schur product: `(-1)^{N(N+1)/2}` for `++`
    /// and `--`, `(-1)^N` for the mixed variants.
    pub fn prefactor(&self, n: i64) -> i64 {
        match self {
            Variant::PlusPlus | Variant::MinusMinus => sign_of(n * (n + 1) / 2),
            Variant::PlusMinus | Variant::MinusPlus => sign_of(n),
        }
    }
}

/// The two-component product VEV for `variant`, e.g. for `++`
/// `⟨N,-N| e^{H^(1)(t1) - H^(2)(t2)} f^(1)_{h_1} f̄^(2)_{-h'_1-1} ⋯ |0,0⟩`,
/// against `prefactor · s_λ(·) s_μ(·)`.
pub fn schur_product_vev(variant: Variant, n: usize, lambda: &Partition, mu: &Partition) -> Result<IdentityCheck> {
    if n > 4 || lambda.weight() > 6 || mu.weight() > 6 {
        return Err(Error::BoundExceeded(format!(
            "N={n}, |λ|={}, |μ|={}",
            lambda.weight(),
            mu.weight()
        )));
    }
    let h = lambda.shifted_labels(n)?;
    let hp = mu.shifted_labels(n)?;
    let ni = n as i64;
    let w = lambda.weight() + mu.weight();
    let d = lambda.weight().max(mu.weight()).max(1);
    let t1 = formal_times(Var::T1, d);
    let t2 = formal_times(Var::T2, d);
    let tb1 = formal_times(Var::TB1, d);
    let tb2 = formal_times(Var::TB2, d);
    let f1 = |k: i64| Op::F(two_component_embed(1, k));
    let fb2 = |k: i64| Op::Fbar(two_component_embed(2, k));
    let mut ops: Vec<Op<Poly>> = Vec::new();
    let (sl, sm) = match variant {
        Variant::PlusPlus => {
            ops.push(flow(Some(1), 1, true, &t1));
            ops.push(flow(Some(2), -1, true, &t2));
            for i in 0..n {
                ops.push(f1(h[i]));
                ops.push(fb2(-hp[i] - 1));
            }
            (schur_in_times(lambda, &t1), schur_in_times(mu, &t2))
        }
        Variant::MinusMinus => {
            for i in 0..n {
                ops.push(f1(ni - h[i] - 1));
                ops.push(fb2(hp[i] - ni));
            }
            ops.push(flow(Some(2), 1, false, &tb2));
            ops.push(flow(Some(1), -1, false, &tb1));
            (schur_in_times(lambda, &tb1), schur_in_times(mu, &tb2))
        }
        Variant::PlusMinus => {
            ops.push(flow(Some(1), 1, true, &t1));
            for i in 0..n {
                ops.push(f1(h[i]));
                ops.push(fb2(hp[i] - ni));
            }
            ops.push(flow(Some(2), 1, false, &tb2));
            (schur_in_times(lambda, &t1), schur_in_times(mu, &tb2))
        }
        Variant::MinusPlus => {
            ops.push(flow(Some(2), -1, true, &t2));
            for i in 0..n {
                ops.push(f1(ni - h[i] - 1));
                ops.push(fb2(-hp[i] - 1));
            }
            ops.push(flow(Some(1), -1, false, &tb1));
            (schur_in_times(lambda, &tb1), schur_in_times(mu, &t2))
        }
    };
    let left = two_vacuum(ni, -ni);
    let oracle = sandwich(&left, &ops, &FockVector::vacuum(), w as u32 + 1)?;
    let pref = BigRational::from_integer(variant.prefactor(ni).into());
    Ok(IdentityCheck {
        label: format!("{} N={n} λ={lambda} μ={mu}", variant.tag()),
        oracle,
        expected: (sl * sm).scale(&pref),
    })
}

/// `⟨N+n, -N-m| Π_i f^(1)(x_i) f̄^(2)(y_i) |n, -m⟩` with exact rational
/// `x`, `y`. Only component-1 modes in `[n, N+n)` and component-2 modes in
/// `[-N-m, -m)` can connect the two vacua, so the generating sums are cut
/// to those windows.
pub fn vandermonde_vev(x: &[BigRational], y: &[BigRational], n: i64, m: i64) -> Result<BigRational> {
    let nn = x.len();
    if y.len() != nn {
        return Err(Error::Config("x and y must have the same length".into()));
    }
    if nn > 5 {
        return Err(Error::BoundExceeded(format!("N = {nn} > 5")));
    }
    let ni = nn as i64;
    let right: FockVector<BigRational> = two_vacuum(n, -m);
    let left: FockVector<BigRational> = two_vacuum(ni + n, -ni - m);
    let mut cur = right;
    for i in (0..nn).rev() {
        // f̄^(2)(y) = Σ_k y^{-k-1} f̄^(2)_k
        let mut next = FockVector::zero();
        for k in (-ni - m)..(-m) {
            let coef = pow_i(&y[i], -k - 1);
            next = next.plus(&apply_fbar(two_component_embed(2, k), &cur).scale(&coef));
        }
        cur = next;
        let mut next = FockVector::zero();
        for k in n..(ni + n) {
            let coef = pow_i(&x[i], k);
            next = next.plus(&apply_f(two_component_embed(1, k), &cur).scale(&coef));
        }
        cur = next;
    }
    Ok(left.inner(&cur))
}

fn pow_i(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// Closed form `(-1)^{N(N+1)/2} Δ_N(x) Δ_N(y) Π x_i^n (-y_i)^m`.
pub fn vandermonde_closed_form(x: &[BigRational], y: &[BigRational], n: i64, m: i64) -> BigRational {
    let ni = x.len() as i64;
    let mut v = crate::schur::vandermonde(x) * crate::schur::vandermonde(y);
    for (xi, yi) in x.iter().zip(y) {
        v = v * pow_i(xi, n) * pow_i(&(-yi.clone()), m);
    }
    v * BigRational::from_integer(sign_of(ni * (ni + 1) / 2).into())
}

/// `⟨0| w_1 ⋯ w_N w̄_N ⋯ w̄_1 |0⟩` by propagation, and `det ⟨0|w_i w̄_j|0⟩`.
/// `w[i]` lists `(mode, coefficient)` pairs of `f`'s, `wbar[i]` of `f̄`'s.
pub fn wick_determinant_check(
    w: &[Vec<(i64, BigRational)>],
    wbar: &[Vec<(i64, BigRational)>],
) -> Result<(BigRational, BigRational)> {
    let n = w.len();
    if n > 6 || wbar.len() != n {
        return Err(Error::BoundExceeded(format!("N = {n}")));
    }
    let apply_comb = |comb: &[(i64, BigRational)], bar: bool, v: &FockVector<BigRational>| {
        let mut out = FockVector::zero();
        for (k, c) in comb {
            let t = if bar { apply_fbar(*k, v) } else { apply_f(*k, v) };
            out = out.plus(&t.scale(c));
        }
        out
    };
    let mut cur = FockVector::vacuum();
    for wb in wbar {
        cur = apply_comb(wb, true, &cur);
    }
    for wi in w.iter().rev() {
        cur = apply_comb(wi, false, &cur);
    }
    let lhs = vev(0, &cur);
    let m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = apply_comb(&wbar[j], true, &FockVector::vacuum());
                    vev(0, &apply_comb(&w[i], false, &v))
                })
                .collect()
        })
        .collect();
    let rhs = <BigRational as Ring>::det(&m);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use num_traits::Zero;

    type V = FockVector<BigRational>;

    #[test]
    fn vacuum_actions() {
        let vac = V::vacuum();
        assert!(apply_f(-1, &vac).is_zero());
        assert_eq!(apply_f(0, &vac), charged_vacuum(1));
        assert_eq!(charged_vacuum::<BigRational>(1), V::basis(MayaState::vacuum(1)));
        assert!(apply_fbar(0, &vac).is_zero());
    }

    #[test]
    fn generator_vevs() {
        let vac = V::vacuum();
        assert_eq!(vev(0, &apply_f(-1, &apply_fbar(-1, &vac))), q(1, 1));
        for (m, n) in [(-1, -2), (-2, -1), (0, -1), (-3, 2)] {
            assert!(vev(0, &apply_f(m, &apply_fbar(n, &vac))).is_zero());
        }
        assert!(vev(0, &apply_f(-1, &apply_f(-2, &apply_fbar(-1, &vac)))).is_zero());
    }

    #[test]
    fn hamiltonian_examples() {
        let vac = V::vacuum();
        assert!(apply_h(1, &vac).is_zero());
        assert_eq!(apply_h(1, &apply_f(1, &vac)), apply_f(0, &vac));
        let up = apply_h(-1, &vac);
        assert_eq!(up, apply_f(0, &apply_fbar(-1, &vac)));
        assert!(!up.is_zero());
    }

    #[test]
    fn maya_excitations() {
        // f_1 f̄_{-1} |0⟩: added {1}, removed {-1}, shape (2)
        let s = MayaState::new(0, Partition::new(vec![2]));
        assert_eq!(s.added(), vec![1]);
        assert_eq!(s.removed(), vec![-1]);
        assert!(s.is_occupied(-2) && !s.is_occupied(-1) && s.is_occupied(1));
    }

    #[test]
    fn embedding() {
        assert_eq!(two_component_embed(1, 0), 0);
        assert_eq!(two_component_embed(2, -1), -1);
        assert_eq!(two_component_embed(1, -1), -2);
    }

    #[test]
    fn exp_h_examples() {
        let t = formal_times(Var::T1, 2);
        let v: FockVector<Poly> = apply_f(1, &FockVector::vacuum());
        assert_eq!(exp_h_vev(1, &t, &v).unwrap(), Poly::var(Var::new(Var::T1, 1)));
        assert!(matches!(exp_h_vev(2, &t, &v), Err(Error::ChargeMismatch { .. })));
    }

    #[test]
    fn small_vandermonde() {
        let x = [q(2, 1)];
        let y = [q(3, 1)];
        assert_eq!(vandermonde_vev(&x, &y, 0, 0).unwrap(), q(-1, 1));
        let x = [q(2, 1), q(5, 1)];
        let y = [q(1, 3), q(-1, 1)];
        assert_eq!(
            vandermonde_vev(&x, &y, 0, 0).unwrap(),
            -(q(2, 1) - q(5, 1)) * (q(1, 3) - q(-1, 1))
        );
        assert_eq!(
            vandermonde_vev(&x, &y, 1, 1).unwrap(),
            vandermonde_closed_form(&x, &y, 1, 1)
        );
    }

    #[test]
    fn single_component_identities() {
        for n in 1..=3 {
            for lam in crate::partitions::enumerate(3, n) {
                for which in 1..=4 {
                    let c = single_component_check(which, &lam, n).unwrap();
                    assert!(c.holds(), "{}: {} vs {}", c.label, c.oracle, c.expected);
                }
            }
        }
    }

    #[test]
    fn product_identities() {
        for n in 1..=2 {
            for lam in crate::partitions::enumerate(2, n) {
                for mu in crate::partitions::enumerate(2, n) {
                    for v in Variant::ALL {
                        let c = schur_product_vev(v, n, &lam, &mu).unwrap();
                        assert!(c.holds(), "{}: {} vs {}", c.label, c.oracle, c.expected);
                    }
                }
            }
        }
        let c = schur_product_vev(Variant::PlusPlus, 1, &Partition::new(vec![1]), &Partition::empty()).unwrap();
        assert_eq!(c.oracle.to_string(), "-t1_1");
    }
}

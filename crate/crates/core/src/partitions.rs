//! Integer partitions.
//!
//! A [`Partition`] stores its parts in weakly decreasing order with trailing
//! zeros stripped, so equality and ordering are structural and partitions can
//! be used directly as map keys. Indexing past the stored length reads `0`.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "PartsRepr", into = "PartsRepr")]
pub struct Partition {
    parts: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PartsRepr {
    parts: Vec<usize>,
}

impl TryFrom<PartsRepr> for Partition {
    type Error = Error;
    fn try_from(r: PartsRepr) -> Result<Self> {
        Partition::try_new(r.parts)
    }
}

impl From<Partition> for PartsRepr {
    fn from(p: Partition) -> Self {
        PartsRepr { parts: p.parts }
    }
}

impl Partition {
    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// Builds a partition, panicking if `parts` is not weakly decreasing.
    /// Trailing zeros are dropped.
    pub fn new(parts: impl Into<Vec<usize>>) -> Self {
        Self::try_new(parts.into()).expect("parts must be weakly decreasing")
    }

    pub fn try_new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?}")));
        }
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Part `i` counted from zero, or 0 past the end.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let first = self.part(0);
        let parts = (0..first)
            .map(|j| self.parts.iter().take_while(|&&p| p > j).count())
            .collect();
        Partition { parts }
    }

    /// Number of diagonal nodes, i.e. the Frobenius rank.
    pub fn rank(&self) -> usize {
        self.parts.iter().enumerate().take_while(|(i, &p)| p > *i).count()
    }

    pub fn frobenius(&self) -> FrobeniusCoords {
        let k = self.rank();
        let conj = self.conjugate();
        FrobeniusCoords {
            alphas: (0..k).map(|j| self.parts[j] - j - 1).collect(),
            betas: (0..k).map(|j| conj.parts[j] - j - 1).collect(),
        }
    }

    /// Labels `h_i = λ_i - i + N` for `i = 1..N`.
    pub fn shifted_labels(&self, n: usize) -> Result<Vec<i64>> {
        if self.len() > n {
            return Err(Error::LengthExceedsN { length: self.len(), n });
        }
        Ok((0..n).map(|i| self.part(i) as i64 - i as i64 - 1 + n as i64).collect())
    }

    /// Inverse of [`shifted_labels`](Self::shifted_labels): recovers λ from a
    /// strictly decreasing label set with last entry at least 0.
    pub fn from_shifted_labels(labels: &[i64]) -> Result<Partition> {
        let n = labels.len() as i64;
        let mut parts = Vec::with_capacity(labels.len());
        for (i, &h) in labels.iter().enumerate() {
            let p = h + i as i64 + 1 - n;
            if p < 0 {
                return Err(Error::InvalidPartition(format!("labels {labels:?}")));
            }
            parts.push(p as usize);
        }
        Partition::try_new(parts)
    }

    /// `ν̃_i = ν_1 - ν_{N-i+1}`, the complement of ν inside the `N × ν_1` box
    /// read backwards.
    pub fn tilde(&self, n: usize) -> Result<Partition> {
        if self.len() > n {
            return Err(Error::LengthExceedsN { length: self.len(), n });
        }
        let top = self.part(0);
        Ok(Partition::new(
            (0..n).map(|i| top - self.part(n - 1 - i)).collect::<Vec<_>>(),
        ))
    }

    /// Adds `shift` to each of the first `n` parts, returning `None` if a part
    /// would become negative.
    pub fn shift_parts(&self, n: usize, shift: i64) -> Option<Partition> {
        if self.len() > n {
            return None;
        }
        let mut parts = Vec::with_capacity(n);
        for i in 0..n {
            let p = self.part(i) as i64 + shift;
            if p < 0 {
                return None;
            }
            parts.push(p as usize);
        }
        Partition::try_new(parts).ok()
    }

    /// Nodes `(i, j)` of the Young diagram, zero-based, row by row.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (0..p).map(move |j| (i, j)))
    }

    /// Hook length of the node `(i, j)` (zero-based).
    pub fn hook(&self, i: usize, j: usize) -> usize {
        let conj_j = self.parts.iter().take_while(|&&p| p > j).count();
        (self.parts[i] - j - 1) + (conj_j - i - 1) + 1
    }

    /// True when `self ⊆ other` as Young diagrams.
    pub fn contained_in(&self, other: &Partition) -> bool {
        self.len() <= other.len() && self.parts.iter().zip(&other.parts).all(|(a, b)| a <= b)
    }
}

/// Graded order: by weight, then lexicographically descending, matching
/// [`enumerate`].
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| other.parts.cmp(&self.parts))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Index<usize> for Partition {
    type Output = usize;
    fn index(&self, i: usize) -> &usize {
        self.parts.get(i).unwrap_or(&0)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("()");
        }
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        f.write_str(&s.join("+"))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({self})")
    }
}

impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "()" || s.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = s
            .split('+')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::InvalidPartition(s.to_string()))?;
        Partition::try_new(parts)
    }
}

impl From<Vec<usize>> for Partition {
    fn from(v: Vec<usize>) -> Self {
        Partition::new(v)
    }
}

/// Frobenius coordinates `(α_1 … α_k | β_1 … β_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrobeniusCoords {
    pub alphas: Vec<usize>,
    pub betas: Vec<usize>,
}

impl FrobeniusCoords {
    pub fn rank(&self) -> usize {
        self.alphas.len()
    }

    pub fn transpose(&self) -> FrobeniusCoords {
        FrobeniusCoords {
            alphas: self.betas.clone(),
            betas: self.alphas.clone(),
        }
    }

    pub fn to_partition(&self) -> Result<Partition> {
        let k = self.alphas.len();
        let strict = |v: &[usize]| v.windows(2).all(|w| w[0] > w[1]);
        if self.betas.len() != k || !strict(&self.alphas) || !strict(&self.betas) {
            return Err(Error::InvalidPartition(format!("{self:?}")));
        }
        let len = if k == 0 { 0 } else { self.betas[0] + 1 };
        let mut parts = vec![0usize; len];
        for (i, part) in parts.iter_mut().enumerate() {
            if i < k {
                *part = self.alphas[i] + i + 1;
            } else {
                // below the diagonal: count legs that reach row i
                *part = self.betas.iter().enumerate().filter(|(j, &b)| b + j >= i).count();
            }
        }
        Partition::try_new(parts)
    }
}

impl fmt::Display for FrobeniusCoords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "({}|{})", join(&self.alphas), join(&self.betas))
    }
}

/// All partitions of exactly `w` with at most `max_len` parts, in
/// lexicographically descending order.
pub fn partitions_of(w: usize, max_len: usize) -> Vec<Partition> {
    fn rec(rem: usize, cap: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        if slots == 0 {
            return;
        }
        for p in (1..=cap.min(rem)).rev() {
            cur.push(p);
            rec(rem - p, p, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(w, w, max_len, &mut Vec::new(), &mut out);
    out
}

/// Every partition with weight at most `max_weight` and length at most
/// `max_len`, graded by weight and lexicographically descending inside each
/// weight.
pub fn enumerate(max_weight: usize, max_len: usize) -> impl Iterator<Item = Partition> {
    (0..=max_weight).flat_map(move |w| partitions_of(w, max_len))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(Partition::empty().conjugate(), Partition::empty());
        assert_eq!(p(&[3, 1]).conjugate(), p(&[2, 1, 1]));
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(Partition::empty().frobenius().rank(), 0);
        let f = p(&[3, 1]).frobenius();
        assert_eq!((f.alphas.clone(), f.betas.clone()), (vec![2], vec![1]));
        assert_eq!(f.transpose().to_partition().unwrap(), p(&[2, 1, 1]));
        let g = p(&[1, 1, 1]).frobenius();
        assert_eq!((g.alphas, g.betas), (vec![0], vec![2]));
    }

    #[test]
    fn shifted_label_examples() {
        assert_eq!(Partition::empty().shifted_labels(3).unwrap(), vec![2, 1, 0]);
        assert_eq!(p(&[2, 1]).shifted_labels(2).unwrap(), vec![3, 1]);
        assert!(matches!(p(&[1]).shifted_labels(0), Err(Error::LengthExceedsN { .. })));
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(Partition::empty().tilde(2).unwrap(), Partition::empty());
        assert_eq!(p(&[2, 1]).tilde(2).unwrap(), p(&[1]));
        assert_eq!(p(&[3]).tilde(3).unwrap(), p(&[3, 3]));
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate(0, 5).collect::<Vec<_>>(), vec![Partition::empty()]);
        assert_eq!(
            enumerate(2, 2).collect::<Vec<_>>(),
            vec![Partition::empty(), p(&[1]), p(&[2]), p(&[1, 1])]
        );
    }

    #[test]
    fn text_form() {
        assert_eq!(p(&[3, 1]).to_string(), "3+1");
        assert_eq!(Partition::empty().to_string(), "()");
        assert_eq!("3+1".parse::<Partition>().unwrap(), p(&[3, 1]));
        assert_eq!("()".parse::<Partition>().unwrap(), Partition::empty());
        assert!("1+3".parse::<Partition>().is_err());
    }

    #[test]
    fn json_form() {
        let s = serde_json::to_string(&p(&[3, 1])).unwrap();
        assert_eq!(s, r#"{"parts":[3,1]}"#);
        let back: Partition = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p(&[3, 1]));
        assert!(serde_json::from_str::<Partition>(r#"{"parts":[1,2]}"#).is_err());
    }

    #[test]
    fn index_past_end_is_zero() {
        let l = p(&[4, 2]);
        assert_eq!((l[0], l[1], l[5]), (4, 2, 0));
    }

    #[test]
    fn hooks() {
        let l = p(&[3, 1]);
        let hooks: Vec<usize> = l.cells().map(|(i, j)| l.hook(i, j)).collect();
        assert_eq!(hooks, vec![4, 2, 1, 1]);
    }
}

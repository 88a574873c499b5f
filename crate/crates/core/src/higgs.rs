//! Diagonal Higgs data `E = L_1 ⊕ ⋯ ⊕ L_r` described by line-bundle degrees
//! and the set of nonzero off-diagonal Higgs components.
//!
//! An arrow `(i, j)` (1-based) records `Φ_{i,j} ≠ 0`, the component mapping
//! `L_j` into `L_i ⊗ Λ^{1,0}`. Vectors in this module use diagonal
//! coordinates: `v = diag(v_1, …, v_r)`, with `h_{α_{i,j}} = e_i − e_j` and
//! the invariant form `B(u, v) = 2r Tr(uv)`. Stability is tested on
//! coordinate subbundles `E_S = ⊕_{k∈S} L_k` only.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cone::{self, ConeProblem, ConeVerdict};
use crate::rational::{self, q, Rational};
use crate::rootsys::{CartanVector, Root, RootFunctional, RootSystem, RootSystemError};

pub const DEFAULT_ENUMERATION_BOUND: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HiggsError {
    #[error("rank must be at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("expected {expected} degrees, got {got}")]
    DegreeCount { expected: usize, got: usize },
    #[error("degrees must sum to zero, they sum to {0}")]
    NonzeroDegreeSum(Rational),
    #[error("arrow ({i},{j}) is out of range for rank {r}")]
    ArrowOutOfRange { i: usize, j: usize, r: usize },
    #[error("arrow ({0},{0}) is diagonal")]
    DiagonalArrow(usize),
    #[error("rank {r} exceeds the subset enumeration bound {bound}")]
    BoundExceeded { r: usize, bound: usize },
    #[error("weight vector has length {got}, expected {expected}")]
    WeightLength { expected: usize, got: usize },
    #[error("weight vector is not traceless")]
    NotTraceless,
    #[error("weight vector is inadmissible: arrow ({i},{j}) has s_i - s_j < 0")]
    Inadmissible { i: usize, j: usize },
    #[error("n must be a positive integer")]
    NonPositiveN,
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
}

/// Off-diagonal Higgs component `Φ_{i,j} ≠ 0`, 1-based.
pub type Arrow = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDatum", into = "RawDatum")]
pub struct DiagonalHiggsDatum {
    r: usize,
    degrees: Vec<Rational>,
    arrows: BTreeSet<Arrow>,
}

#[derive(Serialize, Deserialize)]
struct RawDatum {
    r: usize,
    #[serde(with = "rational::serde_qvec")]
    degrees: Vec<Rational>,
    arrows: Vec<Arrow>,
}

impl TryFrom<RawDatum> for DiagonalHiggsDatum {
    type Error = HiggsError;
    fn try_from(raw: RawDatum) -> Result<Self, HiggsError> {
        DiagonalHiggsDatum::new(raw.r, raw.degrees, raw.arrows)
    }
}

impl From<DiagonalHiggsDatum> for RawDatum {
    fn from(d: DiagonalHiggsDatum) -> Self {
        RawDatum { r: d.r, degrees: d.degrees, arrows: d.arrows.into_iter().collect() }
    }
}

impl DiagonalHiggsDatum {
    pub fn new(
        r: usize,
        degrees: Vec<Rational>,
        arrows: impl IntoIterator<Item = Arrow>,
    ) -> Result<Self, HiggsError> {
        if r < 2 {
            return Err(HiggsError::RankTooSmall(r));
        }
        if degrees.len() != r {
            return Err(HiggsError::DegreeCount { expected: r, got: degrees.len() });
        }
        let total = degrees.iter().fold(Rational::zero(), |a, b| a + b);
        if !total.is_zero() {
            return Err(HiggsError::NonzeroDegreeSum(total));
        }
        let mut set = BTreeSet::new();
        for (i, j) in arrows {
            if i == 0 || j == 0 || i > r || j > r {
                return Err(HiggsError::ArrowOutOfRange { i, j, r });
            }
            if i == j {
                return Err(HiggsError::DiagonalArrow(i));
            }
            set.insert((i, j));
        }
        Ok(DiagonalHiggsDatum { r, degrees, arrows: set })
    }

    pub fn from_ints(degrees: &[i64], arrows: &[Arrow]) -> Result<Self, HiggsError> {
        Self::new(degrees.len(), degrees.iter().map(|&m| q(m)).collect(), arrows.iter().copied())
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn degrees(&self) -> &[Rational] {
        &self.degrees
    }

    pub fn arrows(&self) -> &BTreeSet<Arrow> {
        &self.arrows
    }

    /// `deg(E_S) = Σ_{k∈S} m_k`.
    pub fn degree_of(&self, s: &SubbundleSelection) -> Rational {
        s.indices.iter().fold(Rational::zero(), |a, &k| a + &self.degrees[k - 1])
    }

    /// Weakly connected components of the arrow graph, each sorted.
    pub fn weak_components(&self) -> Vec<BTreeSet<usize>> {
        let mut parent: Vec<usize> = (0..=self.r).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(i, j) in &self.arrows {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut comps: Vec<BTreeSet<usize>> = Vec::new();
        let mut root_index = vec![usize::MAX; self.r + 1];
        for k in 1..=self.r {
            let root = find(&mut parent, k);
            if root_index[root] == usize::MAX {
                root_index[root] = comps.len();
                comps.push(BTreeSet::new());
            }
            comps[root_index[root]].insert(k);
        }
        comps
    }

    pub fn is_weakly_connected(&self) -> bool {
        self.weak_components().len() == 1
    }
}

impl fmt::Display for DiagonalHiggsDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let degs: Vec<String> = self.degrees.iter().map(rational::format_rational).collect();
        write!(f, "r={} m=({}) arrows={}", self.r, degs.join(","), format_arrows(&self.arrows))
    }
}

pub fn format_arrows(arrows: &BTreeSet<Arrow>) -> String {
    let parts: Vec<String> = arrows.iter().map(|(i, j)| format!("{i}<-{j}")).collect();
    format!("{{{}}}", parts.join(" "))
}

/// Traceless weight `s = diag(s_1, …, s_r)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(#[serde(with = "rational::serde_qvec")] pub Vec<Rational>);

impl WeightVector {
    pub fn new(s: Vec<Rational>) -> Result<Self, HiggsError> {
        if !s.iter().fold(Rational::zero(), |a, b| a + b).is_zero() {
            return Err(HiggsError::NotTraceless);
        }
        Ok(WeightVector(s))
    }

    pub fn from_ints(s: &[i64]) -> Result<Self, HiggsError> {
        Self::new(s.iter().map(|&x| q(x)).collect())
    }

    /// Traceless projection of the indicator of `S`.
    pub fn indicator(r: usize, sel: &SubbundleSelection) -> Self {
        let share = Rational::new(BigInt::from(sel.indices.len()), BigInt::from(r));
        WeightVector(
            (1..=r)
                .map(|k| if sel.indices.contains(&k) { Rational::one() - &share } else { -share.clone() })
                .collect(),
        )
    }
}

/// A coordinate subbundle `E_S`, 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SubbundleSelection {
    pub indices: BTreeSet<usize>,
}

impl SubbundleSelection {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        SubbundleSelection { indices: indices.into_iter().collect() }
    }

    /// `(i, j) ∈ A` and `j ∈ S` imply `i ∈ S`.
    pub fn is_arrow_closed(&self, d: &DiagonalHiggsDatum) -> bool {
        d.arrows.iter().all(|&(i, j)| !self.indices.contains(&j) || self.indices.contains(&i))
    }
}

impl fmt::Display for SubbundleSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// `γ^∨ = −n γ*`, stored by its values on the lattice basis `e_k − e_{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualCharacter {
    pub functional: RootFunctional,
    pub n: u64,
}

impl DualCharacter {
    pub fn of(d: &DiagonalHiggsDatum, n: u64) -> Result<Self, HiggsError> {
        if n == 0 {
            return Err(HiggsError::NonPositiveN);
        }
        let r = d.r;
        let scale = q(-(2 * r as i64)) * q(n as i64);
        let values = (0..r - 1)
            .map(|k| &scale * (&d.degrees[k] - &d.degrees[k + 1]))
            .collect();
        Ok(DualCharacter { functional: RootFunctional(values), n })
    }

    /// Whether every value on the lattice basis is an integer.
    pub fn is_integral(&self) -> bool {
        self.functional.0.iter().all(|v| v.is_integer())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitClass {
    Violates,
    Tight,
    Strict,
}

/// `γ = (m_1, …, m_r)` in diagonal coordinates.
pub fn gamma_of(d: &DiagonalHiggsDatum) -> CartanVector {
    CartanVector(d.degrees.clone())
}

/// `h_{α_{i,j}} = e_i − e_j`.
pub fn coroot_of_arrow(i: usize, j: usize, r: usize) -> Result<CartanVector, HiggsError> {
    if i == 0 || j == 0 || i > r || j > r {
        return Err(HiggsError::ArrowOutOfRange { i, j, r });
    }
    if i == j {
        return Err(HiggsError::DiagonalArrow(i));
    }
    let mut v = CartanVector::zero(r);
    v.0[i - 1] = Rational::one();
    v.0[j - 1] = -Rational::one();
    Ok(v)
}

/// `α_{i,j}(u) = u_i − u_j`.
pub fn arrow_pairing(i: usize, j: usize, u: &[Rational]) -> Rational {
    &u[i - 1] - &u[j - 1]
}

/// Generators `{e_i − e_j : (i,j) ∈ A}` with target `−γ`.
pub fn cone_problem(d: &DiagonalHiggsDatum) -> ConeProblem {
    let generators = d
        .arrows
        .iter()
        .map(|&(i, j)| coroot_of_arrow(i, j, d.r).expect("validated arrow"))
        .collect();
    ConeProblem { generators, target: gamma_of(d).neg() }
}

/// Closed (`strict = false`) or open (`strict = true`) cone condition on `−γ`.
pub fn cone_condition(d: &DiagonalHiggsDatum, strict: bool) -> ConeVerdict {
    let p = cone_problem(d);
    if strict {
        cone::open_cone_member(&p)
    } else {
        cone::closed_cone_member(&p)
    }
}

pub fn arrow_closed_subsets(d: &DiagonalHiggsDatum) -> Result<Vec<SubbundleSelection>, HiggsError> {
    arrow_closed_subsets_bounded(d, DEFAULT_ENUMERATION_BOUND)
}

/// Proper nonempty arrow-closed subsets, ordered by size then elements.
///
/// Closed sets are unions of strongly connected components that are closed
/// under reachability, so only the condensation is enumerated.
pub fn arrow_closed_subsets_bounded(
    d: &DiagonalHiggsDatum,
    bound: usize,
) -> Result<Vec<SubbundleSelection>, HiggsError> {
    let r = d.r;
    if r > bound || r > 63 {
        return Err(HiggsError::BoundExceeded { r, bound });
    }
    // reach[k]: nodes forced into S once k ∈ S (k itself included).
    let mut reach: Vec<u64> = (0..r).map(|k| 1u64 << k).collect();
    for &(i, j) in &d.arrows {
        reach[j - 1] |= 1 << (i - 1);
    }
    for mid in 0..r {
        for k in 0..r {
            if reach[k] >> mid & 1 == 1 {
                reach[k] |= reach[mid];
            }
        }
    }
    let mut comp_masks: Vec<u64> = Vec::new();
    let mut assigned = 0u64;
    for k in 0..r {
        if assigned >> k & 1 == 1 {
            continue;
        }
        let scc = (0..r)
            .filter(|&l| reach[k] >> l & 1 == 1 && reach[l] >> k & 1 == 1)
            .fold(0u64, |m, l| m | 1 << l);
        assigned |= scc;
        comp_masks.push(scc);
    }
    let comp_reach: Vec<u64> = comp_masks
        .iter()
        .map(|&m| reach[m.trailing_zeros() as usize])
        .collect();
    let full = if r == 64 { u64::MAX } else { (1u64 << r) - 1 };
    let c = comp_masks.len();
    let mut out = Vec::new();
    for pick in 1u64..(1u64 << c) {
        let mut set = 0u64;
        for (ci, &m) in comp_masks.iter().enumerate() {
            if pick >> ci & 1 == 1 {
                set |= m;
            }
        }
        if set == full {
            continue;
        }
        let closed = (0..c).all(|ci| pick >> ci & 1 == 0 || comp_reach[ci] & !set == 0);
        if closed {
            out.push(SubbundleSelection::new((0..r).filter(|&k| set >> k & 1 == 1).map(|k| k + 1)));
        }
    }
    out.sort_by(|a, b| {
        a.indices
            .len()
            .cmp(&b.indices.len())
            .then_with(|| a.indices.iter().cmp(b.indices.iter()))
    });
    Ok(out)
}

pub fn is_semistable(d: &DiagonalHiggsDatum) -> Result<bool, HiggsError> {
    Ok(arrow_closed_subsets(d)?.iter().all(|s| !d.degree_of(s).is_positive()))
}

pub fn is_stable(d: &DiagonalHiggsDatum) -> Result<bool, HiggsError> {
    Ok(arrow_closed_subsets(d)?.iter().all(|s| d.degree_of(s).is_negative()))
}

fn check_weight(d: &DiagonalHiggsDatum, s: &WeightVector) -> Result<(), HiggsError> {
    if s.0.len() != d.r {
        return Err(HiggsError::WeightLength { expected: d.r, got: s.0.len() });
    }
    Ok(())
}

/// Route (a): `γ^∨(s) = −n B(γ, s) = −2rn Σ m_k s_k`.
pub fn gamma_vee_direct(d: &DiagonalHiggsDatum, n: u64, s: &WeightVector) -> Rational {
    let pairing = rational::dot(&d.degrees, &s.0);
    q(-2 * d.r as i64) * q(n as i64) * pairing
}

/// Route (b): sort `s` decreasingly, permute the degrees alike and sum
/// `(s_j − s_{j+1}) deg(E_j)` over the jumps `J_s`.
pub fn gamma_vee_telescoping(d: &DiagonalHiggsDatum, n: u64, s: &WeightVector) -> Rational {
    let mut order: Vec<usize> = (0..d.r).collect();
    order.sort_by(|&a, &b| s.0[b].cmp(&s.0[a]));
    let mut partial = Rational::zero();
    let mut total = Rational::zero();
    for w in 0..d.r - 1 {
        partial += &d.degrees[order[w]];
        let jump = &s.0[order[w]] - &s.0[order[w + 1]];
        if jump.is_positive() {
            total += jump * &partial;
        }
    }
    q(-2 * d.r as i64) * q(n as i64) * total
}

/// `γ^∨(s)`, computed by both routes; a disagreement is a defect.
pub fn gamma_vee_eval(d: &DiagonalHiggsDatum, n: u64, s: &WeightVector) -> Result<Rational, HiggsError> {
    if n == 0 {
        return Err(HiggsError::NonPositiveN);
    }
    check_weight(d, s)?;
    let a = gamma_vee_direct(d, n, s);
    let b = gamma_vee_telescoping(d, n, s);
    assert_eq!(a, b, "telescoping identity broken for {d} at s = {:?}", s.0);
    Ok(a)
}

/// Smallest `n ≥ 1` making `n γ*` integral on `e_k − e_{k+1}`.
pub fn minimal_n(gamma: &CartanVector) -> BigInt {
    let r = gamma.dim();
    let two_r = q(2 * r as i64);
    let values: Vec<Rational> = (0..r.saturating_sub(1))
        .map(|k| &two_r * (&gamma.0[k] - &gamma.0[k + 1]))
        .collect();
    rational::lcm_of_denominators(&values)
}

pub fn minimal_n_of(d: &DiagonalHiggsDatum) -> u64 {
    let n = minimal_n(&gamma_of(d));
    u64::try_from(n).expect("minimal n fits in u64")
}

pub fn orbit_criterion(d: &DiagonalHiggsDatum, n: u64, s: &WeightVector) -> Result<OrbitClass, HiggsError> {
    check_weight(d, s)?;
    if let Some(&(i, j)) = d.arrows.iter().find(|&&(i, j)| arrow_pairing(i, j, &s.0).is_negative()) {
        return Err(HiggsError::Inadmissible { i, j });
    }
    let value = gamma_vee_eval(d, n, s)?;
    Ok(if value.is_positive() {
        OrbitClass::Strict
    } else if value.is_zero() && d.arrows.iter().all(|&(i, j)| arrow_pairing(i, j, &s.0).is_zero()) {
        OrbitClass::Tight
    } else {
        OrbitClass::Violates
    })
}

/// Sufficient test for the vanishing of the off-diagonal part of
/// `[Φ ∧ σ(Φ)]`: no difference of two distinct active roots is a root.
pub fn offdiagonal_check(active: &[Root], rs: &RootSystem) -> Result<bool, HiggsError> {
    for a in active {
        if !rs.is_root(&a.0)? {
            return Err(RootSystemError::NotARoot(a.clone()).into());
        }
    }
    for (x, a) in active.iter().enumerate() {
        for b in &active[x + 1..] {
            if a == b {
                continue;
            }
            if rs.is_root(&a.sub(b).0)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The pair of active roots whose difference is a root, if any.
pub fn offdiagonal_witness(active: &[Root], rs: &RootSystem) -> Option<(Root, Root)> {
    for (x, a) in active.iter().enumerate() {
        for b in &active[x + 1..] {
            if a != b && rs.is_root(&a.sub(b).0).unwrap_or(false) {
                return Some((a.clone(), b.clone()));
            }
        }
    }
    None
}

/// `{−α_1, …, −α_l, δ}` for an irreducible system.
pub fn cyclic_active_set(rs: &RootSystem) -> Result<Vec<Root>, HiggsError> {
    let mut set: Vec<Root> = (0..rs.rank()).map(|i| rs.simple_root(i).neg()).collect();
    set.push(rs.highest_root()?.clone());
    Ok(set)
}

/// Type `A_{r−1}` bridge: diagonal traceless vector to simple-coroot coordinates
/// (`h_k = e_k − e_{k+1}`, so the coefficient of `h_k` is `v_1 + ⋯ + v_k`).
pub fn diag_to_coroot(v: &[Rational]) -> CartanVector {
    let mut acc = Rational::zero();
    CartanVector(
        v[..v.len().saturating_sub(1)]
            .iter()
            .map(|x| {
                acc += x;
                acc.clone()
            })
            .collect(),
    )
}

pub fn coroot_to_diag(c: &CartanVector) -> Vec<Rational> {
    let l = c.dim();
    (0..=l)
        .map(|k| {
            let up = if k < l { c.0[k].clone() } else { Rational::zero() };
            let down = if k > 0 { c.0[k - 1].clone() } else { Rational::zero() };
            up - down
        })
        .collect()
}

/// The root `α_{i,j} = ε_i − ε_j` of `A_{r−1}` in simple-root coordinates.
pub fn arrow_root(i: usize, j: usize, r: usize) -> Root {
    let mut c = vec![0i64; r - 1];
    let (lo, hi, sign) = if i < j { (i, j, 1) } else { (j, i, -1) };
    for k in lo..hi {
        c[k - 1] = sign;
    }
    Root(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q_frac;
    use crate::rootsys::RootSystemSpec;

    fn datum(m: &[i64], arrows: &[Arrow]) -> DiagonalHiggsDatum {
        DiagonalHiggsDatum::from_ints(m, arrows).unwrap()
    }

    fn sel(v: &[usize]) -> SubbundleSelection {
        SubbundleSelection::new(v.iter().copied())
    }

    #[test]
    fn gamma_and_coroots() {
        assert_eq!(gamma_of(&datum(&[0, 0], &[])), CartanVector::from_ints(&[0, 0]));
        assert_eq!(gamma_of(&datum(&[1, -1], &[])), CartanVector::from_ints(&[1, -1]));
        let d = DiagonalHiggsDatum::new(3, vec![q_frac(1, 2), q_frac(1, 2), q(-1)], []).unwrap();
        assert_eq!(gamma_of(&d).0, vec![q_frac(1, 2), q_frac(1, 2), q(-1)]);
        assert_eq!(coroot_of_arrow(2, 1, 2).unwrap(), CartanVector::from_ints(&[-1, 1]));
        assert_eq!(coroot_of_arrow(1, 2, 2).unwrap(), CartanVector::from_ints(&[1, -1]));
        let h = coroot_of_arrow(1, 3, 3).unwrap();
        assert_eq!(arrow_pairing(1, 3, &h.0), q(2));
        assert!(coroot_of_arrow(1, 3, 2).is_err());
        assert!(coroot_of_arrow(2, 2, 2).is_err());
    }

    #[test]
    fn datum_validation() {
        assert!(matches!(DiagonalHiggsDatum::from_ints(&[1, 0], &[]), Err(HiggsError::NonzeroDegreeSum(_))));
        assert!(matches!(DiagonalHiggsDatum::from_ints(&[0], &[]), Err(HiggsError::RankTooSmall(1))));
        assert!(matches!(DiagonalHiggsDatum::from_ints(&[0, 0], &[(1, 1)]), Err(HiggsError::DiagonalArrow(1))));
        assert!(DiagonalHiggsDatum::from_ints(&[0, 0], &[(3, 1)]).is_err());
        let d: DiagonalHiggsDatum =
            serde_json::from_str(r#"{"r":3, "degrees":["1","0","-1"], "arrows":[[2,1],[3,2],[1,3]]}"#).unwrap();
        assert_eq!(d.arrows().len(), 3);
        assert!(serde_json::from_str::<DiagonalHiggsDatum>(r#"{"r":2,"degrees":["1","1"],"arrows":[]}"#).is_err());
    }

    #[test]
    fn cone_condition_examples() {
        let d = datum(&[1, -1], &[(2, 1)]);
        let v = cone_condition(&d, true);
        assert!(v.answer);
        assert_eq!(v.coefficients().unwrap(), &[q(1)]);

        let d = datum(&[-1, 1], &[(2, 1)]);
        assert!(!cone_condition(&d, true).answer);
        let v = cone_condition(&d, false);
        assert!(!v.answer);
        assert!(cone::verify_certificate(&cone_problem(&d), &v));
        let s = &v.separator().unwrap().functional;
        // Pairs nonnegatively with e_2 - e_1 and negatively with -γ = (1,-1).
        assert!(s[0] < s[1]);

        let cyclic = [(2, 1), (3, 2), (1, 3)];
        for m in [[0, 0, 0], [3, -1, -2], [-5, 2, 3]] {
            assert!(cone_condition(&datum(&m, &cyclic), true).answer);
        }
    }

    #[test]
    fn closed_subsets_examples() {
        assert_eq!(arrow_closed_subsets(&datum(&[1, -1], &[(2, 1)])).unwrap(), vec![sel(&[2])]);
        assert!(arrow_closed_subsets(&datum(&[0, 0, 0], &[(2, 1), (3, 2), (1, 3)])).unwrap().is_empty());
        assert_eq!(arrow_closed_subsets(&datum(&[0, 0], &[])).unwrap(), vec![sel(&[1]), sel(&[2])]);
    }

    #[test]
    fn closed_subsets_match_exhaustive_scan() {
        let arrows = [(1, 2), (3, 2), (4, 3), (3, 4)];
        let d = datum(&[0, 0, 0, 0], &arrows);
        let brute: Vec<SubbundleSelection> = (1u32..15)
            .map(|mask| sel(&(1..=4).filter(|k| mask >> (k - 1) & 1 == 1).collect::<Vec<_>>()))
            .filter(|s| s.is_arrow_closed(&d))
            .collect();
        let mut got = arrow_closed_subsets(&d).unwrap();
        let mut want = brute;
        got.sort();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn enumeration_bound() {
        let d = DiagonalHiggsDatum::new(3, vec![q(0); 3], []).unwrap();
        assert!(matches!(arrow_closed_subsets_bounded(&d, 2), Err(HiggsError::BoundExceeded { .. })));
    }

    #[test]
    fn stability_examples() {
        let d = datum(&[1, -1], &[(2, 1)]);
        assert!(is_stable(&d).unwrap() && is_semistable(&d).unwrap());
        let d = datum(&[0, 0], &[]);
        assert!(is_semistable(&d).unwrap() && !is_stable(&d).unwrap());
        let d = datum(&[2, 1, -3], &[(2, 1), (3, 2), (1, 3)]);
        assert!(is_stable(&d).unwrap());
    }

    #[test]
    fn gamma_vee_examples() {
        for m1 in -3..=3 {
            let d = datum(&[m1, -m1], &[]);
            let s = WeightVector::from_ints(&[1, -1]).unwrap();
            assert_eq!(gamma_vee_eval(&d, 1, &s).unwrap(), q(-8 * m1));
        }
        let d = datum(&[2, -1, -1], &[]);
        assert_eq!(gamma_vee_eval(&d, 3, &WeightVector::from_ints(&[0, 0, 0]).unwrap()).unwrap(), q(0));
        assert!(gamma_vee_eval(&d, 0, &WeightVector::from_ints(&[0, 0, 0]).unwrap()).is_err());
    }

    #[test]
    fn minimal_n_examples() {
        assert_eq!(minimal_n(&CartanVector::from_ints(&[1, -1])), BigInt::from(1));
        assert_eq!(minimal_n(&CartanVector::from_ints(&[0, 0])), BigInt::from(1));
        assert_eq!(minimal_n(&CartanVector(vec![q_frac(1, 8), q_frac(-1, 8)])), BigInt::from(1));
        // 2r(m_1 − m_2) = 4 · 2/16 = 1/2.
        assert_eq!(minimal_n(&CartanVector(vec![q_frac(1, 16), q_frac(-1, 16)])), BigInt::from(2));
        let d = DiagonalHiggsDatum::new(3, vec![q_frac(1, 7), q_frac(-1, 7), q(0)], []).unwrap();
        let n = minimal_n_of(&d);
        assert!(DualCharacter::of(&d, n).unwrap().is_integral());
        assert!(n == 1 || !DualCharacter::of(&d, n - 1).unwrap().is_integral());
    }

    #[test]
    fn orbit_examples() {
        let d = datum(&[1, -1], &[(2, 1)]);
        let s = WeightVector::from_ints(&[-1, 1]).unwrap();
        assert_eq!(orbit_criterion(&d, 1, &s).unwrap(), OrbitClass::Strict);
        assert_eq!(gamma_vee_eval(&d, 1, &s).unwrap(), q(8));
        assert_eq!(orbit_criterion(&d, 1, &WeightVector::from_ints(&[0, 0]).unwrap()).unwrap(), OrbitClass::Tight);
        let bad = WeightVector::from_ints(&[1, -1]).unwrap();
        assert!(matches!(orbit_criterion(&d, 1, &bad), Err(HiggsError::Inadmissible { i: 2, j: 1 })));

        let d = datum(&[-1, 1], &[(2, 1)]);
        assert_eq!(orbit_criterion(&d, 1, &s).unwrap(), OrbitClass::Violates);
        assert_eq!(gamma_vee_eval(&d, 1, &s).unwrap(), q(-8));
    }

    #[test]
    fn offdiagonal_examples() {
        let rs = RootSystem::build(&RootSystemSpec::named("A", 2)).unwrap();
        let cyclic = cyclic_active_set(&rs).unwrap();
        assert_eq!(cyclic, vec![Root(vec![-1, 0]), Root(vec![0, -1]), Root(vec![1, 1])]);
        assert!(offdiagonal_check(&cyclic, &rs).unwrap());
        let pair = [Root(vec![1, 0]), Root(vec![1, 1])];
        assert!(!offdiagonal_check(&pair, &rs).unwrap());
        assert_eq!(offdiagonal_witness(&pair, &rs), Some((Root(vec![1, 0]), Root(vec![1, 1]))));
        assert!(offdiagonal_check(&[Root(vec![1, 0])], &rs).unwrap());
        assert!(offdiagonal_check(&[Root(vec![1, -1])], &rs).is_err());
    }

    #[test]
    fn type_a_bridge() {
        let v = vec![q(2), q(-3), q(1)];
        let c = diag_to_coroot(&v);
        assert_eq!(c, CartanVector::from_ints(&[2, -1]));
        assert_eq!(coroot_to_diag(&c), v);
        assert_eq!(arrow_root(1, 3, 3), Root(vec![1, 1]));
        assert_eq!(arrow_root(3, 2, 3), Root(vec![0, -1]));
        let rs = RootSystem::build(&RootSystemSpec::named("A", 3)).unwrap();
        for i in 1..=4 {
            for j in 1..=4 {
                if i == j {
                    continue;
                }
                let root = arrow_root(i, j, 4);
                let h = rs.coroot(&root).unwrap();
                assert_eq!(coroot_to_diag(&h), coroot_of_arrow(i, j, 4).unwrap().0);
            }
        }
    }
}

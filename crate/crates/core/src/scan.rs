//! Exhaustive comparison of subset (semi)stability against cone membership
//! over small diagonal Higgs data.
//!
//! Arrow sets with the same transitive closure span the same cone and have the
//! same arrow-closed subsets, so each closure class is solved once and its
//! verdicts are counted with the class size as multiplicity.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cone::{Certificate, SeparationMode};
use crate::higgs::{self, Arrow, DiagonalHiggsDatum, OrbitClass, WeightVector};
use crate::rational::q;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanConfig {
    pub rmin: usize,
    pub rmax: usize,
    pub dmax: i64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { rmin: 2, rmax: 4, dmax: 3 }
    }
}

/// Verdicts for one (degree vector, arrow-closure class) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub r: usize,
    pub degrees: String,
    /// Transitively closed representative of the class.
    pub arrows: String,
    /// Number of raw arrow sets with this closure.
    pub multiplicity: u64,
    pub connected: bool,
    pub semistable: bool,
    pub closed_cone: bool,
    pub stable: bool,
    pub open_cone: bool,
    pub orbit_ok: bool,
    /// Disconnected graphs only: open membership forces balanced components.
    pub components_ok: bool,
    pub mismatch: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub data: u64,
    pub classes: u64,
    pub semistable_mismatches: u64,
    pub stable_mismatches: u64,
    pub disconnected_violations: u64,
    pub orbit_mismatches: u64,
}

impl ScanSummary {
    pub fn mismatches(&self) -> u64 {
        self.semistable_mismatches + self.stable_mismatches + self.disconnected_violations + self.orbit_mismatches
    }
}

/// All integer vectors in `[−dmax, dmax]^r` summing to zero, lexicographically.
pub fn degree_vectors(r: usize, dmax: i64) -> Vec<Vec<i64>> {
    fn rec(r: usize, dmax: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let sum: i64 = prefix.iter().sum();
        let left = (r - prefix.len()) as i64;
        if left == 1 {
            if (-sum).abs() <= dmax {
                prefix.push(-sum);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        for v in -dmax..=dmax {
            let rest = -(sum + v);
            if rest.abs() <= (left - 1) * dmax {
                prefix.push(v);
                rec(r, dmax, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(r, dmax, &mut Vec::new(), &mut out);
    out
}

fn off_diagonal_pairs(r: usize) -> Vec<Arrow> {
    (1..=r).flat_map(|i| (1..=r).filter(move |&j| j != i).map(move |j| (i, j))).collect()
}

fn transitive_closure(r: usize, arrows: &BTreeSet<Arrow>) -> BTreeSet<Arrow> {
    let mut m = vec![vec![false; r + 1]; r + 1];
    for &(i, j) in arrows {
        m[i][j] = true;
    }
    for k in 1..=r {
        for i in 1..=r {
            if m[i][k] {
                for j in 1..=r {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for i in 1..=r {
        for j in 1..=r {
            if i != j && m[i][j] {
                out.insert((i, j));
            }
        }
    }
    out
}

/// Closure classes of all `2^{r(r−1)}` arrow sets with their sizes.
pub fn arrow_classes(r: usize) -> BTreeMap<BTreeSet<Arrow>, u64> {
    let pairs = off_diagonal_pairs(r);
    let mut classes = BTreeMap::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let set: BTreeSet<Arrow> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        *classes.entry(transitive_closure(r, &set)).or_insert(0) += 1;
    }
    classes
}

/// Evaluates every comparison for one datum.
pub fn check_datum(d: &DiagonalHiggsDatum, multiplicity: u64) -> ScanRow {
    let subsets = higgs::arrow_closed_subsets(d).expect("scan ranks are below the enumeration bound");
    let semistable = subsets.iter().all(|s| d.degree_of(s) <= q(0));
    let stable = subsets.iter().all(|s| d.degree_of(s) < q(0));
    let closed_cone = higgs::cone_condition(d, false).answer;
    let open_verdict = higgs::cone_condition(d, true);
    let open_cone = open_verdict.answer;
    debug_assert!(
        open_cone
            || matches!(&open_verdict.certificate, Certificate::Separation(s)
                if (s.mode == SeparationMode::RefutesClosed) != closed_cone)
    );
    let components = d.weak_components();
    let connected = components.len() == 1;

    let orbit_ok = subsets.iter().all(|s| {
        let w = WeightVector::indicator(d.rank(), s);
        let class = higgs::orbit_criterion(d, 1, &w).expect("indicators of closed sets are admissible");
        class != OrbitClass::Violates
    });

    let semistable_ok = semistable == closed_cone;
    let stable_ok = !connected || stable == open_cone;
    let disconnected_ok = connected
        || !open_cone
        || (!stable
            && components
                .iter()
                .all(|c| c.iter().fold(q(0), |a, &k| a + &d.degrees()[k - 1]) == q(0)));
    let orbit_match = orbit_ok == open_cone;

    ScanRow {
        r: d.rank(),
        degrees: d
            .degrees()
            .iter()
            .map(crate::rational::format_rational)
            .collect::<Vec<_>>()
            .join(" "),
        arrows: d.arrows().iter().map(|(i, j)| format!("{i}<-{j}")).collect::<Vec<_>>().join(" "),
        multiplicity,
        connected,
        semistable,
        closed_cone,
        stable,
        open_cone,
        orbit_ok,
        components_ok: disconnected_ok,
        mismatch: !(semistable_ok && stable_ok && disconnected_ok && orbit_match),
    }
}

/// Runs the sweep, handing each row to `sink` in a deterministic order.
pub fn equivalence_scan(cfg: &ScanConfig, mut sink: impl FnMut(&ScanRow)) -> ScanSummary {
    let mut summary = ScanSummary::default();
    for r in cfg.rmin.max(2)..=cfg.rmax {
        let classes = arrow_classes(r);
        let degrees = degree_vectors(r, cfg.dmax);
        for m in &degrees {
            for (arrows, &mult) in &classes {
                let d = DiagonalHiggsDatum::from_ints(m, &arrows.iter().copied().collect::<Vec<_>>())
                    .expect("generated data are valid");
                let row = check_datum(&d, mult);
                summary.data += mult;
                summary.classes += 1;
                if row.semistable != row.closed_cone {
                    summary.semistable_mismatches += mult;
                }
                if row.connected && row.stable != row.open_cone {
                    summary.stable_mismatches += mult;
                }
                if row.orbit_ok != row.open_cone {
                    summary.orbit_mismatches += mult;
                }
                if !row.components_ok {
                    summary.disconnected_violations += mult;
                }
                sink(&row);
            }
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_vector_counts() {
        assert_eq!(degree_vectors(2, 3).len(), 7);
        assert_eq!(degree_vectors(3, 3).len(), 37);
        assert_eq!(degree_vectors(4, 3).len(), 231);
        assert!(degree_vectors(4, 3).iter().all(|v| v.iter().sum::<i64>() == 0));
    }

    #[test]
    fn closure_classes_partition_all_arrow_sets() {
        let c2 = arrow_classes(2);
        assert_eq!(c2.values().sum::<u64>(), 4);
        assert_eq!(c2.len(), 4);
        let c3 = arrow_classes(3);
        assert_eq!(c3.values().sum::<u64>(), 64);
        // Transitive relations on three labelled points (reflexive pairs dropped): 29 preorders.
        assert_eq!(c3.len(), 29);
    }

    #[test]
    fn small_sweep_has_no_mismatches() {
        let cfg = ScanConfig { rmin: 2, rmax: 3, dmax: 2 };
        let mut rows = 0;
        let s = equivalence_scan(&cfg, |_| rows += 1);
        assert_eq!(s.mismatches(), 0, "{s:?}");
        assert_eq!(s.data, 5 * 4 + 19 * 64);
        assert_eq!(rows as u64, s.classes);
    }
}

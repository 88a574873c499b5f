//! Brute-force oracles and generators shared by the integration tests.
//!
//! The cone oracle never calls the library's LP code: it enumerates linearly
//! independent generator subsets and solves the small square systems by
//! exact Gaussian elimination.

#![allow(dead_code)]

use diagmetric::rational::{q, Rational};
use diagmetric::{CartanVector, ConeProblem};
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Solves `Σ_s x_s cols[s] = v` when the columns are independent and `v`
/// lies in their span; `None` otherwise (dependent columns or `v` outside).
pub fn solve_in_span(cols: &[&Vec<Rational>], v: &[Rational]) -> Option<Vec<Rational>> {
    let rows = v.len();
    let k = cols.len();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut r: Vec<Rational> = cols.iter().map(|c| c[i].clone()).collect();
            r.push(v[i].clone());
            r
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..k {
        let Some(p) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            return None;
        };
        m.swap(pivot_row, p);
        let inv = m[pivot_row][col].recip();
        for x in m[pivot_row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..=k {
                    let delta = &f * &m[pivot_row][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|c| m[c][k].clone()).collect())
}

fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize <= max)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// `t ∈ Σ ℚ≥0 g_a` by Carathéodory enumeration.
pub fn oracle_closed(gens: &[Vec<Rational>], t: &[Rational]) -> bool {
    subsets(gens.len(), t.len()).into_iter().any(|s| {
        let cols: Vec<&Vec<Rational>> = s.iter().map(|&i| &gens[i]).collect();
        solve_in_span(&cols, t).is_some_and(|x| x.iter().all(|v| !v.is_negative()))
    })
}

/// `t ∈ Σ ℚ>0 g_a`: for every `a`, `t − ε g_a` stays in the closed cone for
/// small `ε > 0`, tested lexicographically on a common independent basis.
pub fn oracle_open(gens: &[Vec<Rational>], t: &[Rational]) -> bool {
    if gens.is_empty() {
        return t.iter().all(Zero::is_zero);
    }
    let all = subsets(gens.len(), t.len());
    gens.iter().all(|g| {
        all.iter().any(|s| {
            let cols: Vec<&Vec<Rational>> = s.iter().map(|&i| &gens[i]).collect();
            let (Some(xt), Some(xg)) = (solve_in_span(&cols, t), solve_in_span(&cols, g)) else {
                return false;
            };
            xt.iter().zip(&xg).all(|(a, b)| a.is_positive() || (a.is_zero() && !b.is_positive()))
        })
    })
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Rational> {
    (0..dim).map(|_| q(rng.gen_range(-5..=5))).collect()
}

/// A random problem whose target is, with equal odds, random, a nonnegative
/// combination with some zero weights, or a strictly positive combination.
pub fn random_cone_problem(rng: &mut ChaCha8Rng, max_dim: usize, max_gens: usize) -> ConeProblem {
    let dim = rng.gen_range(1..=max_dim);
    let k = rng.gen_range(0..=max_gens);
    let gens: Vec<Vec<Rational>> = (0..k).map(|_| random_vector(rng, dim)).collect();
    let target = match rng.gen_range(0..3) {
        0 => random_vector(rng, dim),
        mode => {
            let mut t = vec![Rational::zero(); dim];
            for g in &gens {
                let w = if mode == 1 { rng.gen_range(0..=2) } else { rng.gen_range(1..=3) };
                for (ti, gi) in t.iter_mut().zip(g) {
                    *ti += gi * q(w);
                }
            }
            t
        }
    };
    ConeProblem {
        generators: gens.into_iter().map(CartanVector).collect(),
        target: CartanVector(target),
    }
}

pub fn gens_of(p: &ConeProblem) -> Vec<Vec<Rational>> {
    p.generators.iter().map(|g| g.0.clone()).collect()
}

/// Roots of a Cartan matrix by closing the simple roots under simple
/// reflections `s_i(β) = β − ⟨β, α_i^∨⟩ α_i`, with `⟨β, α_i^∨⟩ = Σ_j A[i][j] β_j`.
pub fn reflection_closure(cartan: &[Vec<i64>]) -> std::collections::BTreeSet<Vec<i64>> {
    let l = cartan.len();
    let mut seen = std::collections::BTreeSet::new();
    let mut frontier: Vec<Vec<i64>> = (0..l)
        .map(|i| (0..l).map(|j| i64::from(i == j)).collect())
        .collect();
    while let Some(b) = frontier.pop() {
        if !seen.insert(b.clone()) {
            continue;
        }
        for i in 0..l {
            let pairing: i64 = (0..l).map(|j| cartan[i][j] * b[j]).sum();
            let mut r = b.clone();
            r[i] -= pairing;
            if !seen.contains(&r) {
                frontier.push(r);
            }
        }
    }
    seen
}

//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Solves `min cᵀx  s.t.  Ax = b, x ≥ 0` and returns primal values together
//! with dual multipliers, or a Farkas ray when the system is infeasible.

use num_traits::{One, Signed, Zero};

use crate::rational::{QMatrix, Rational};

#[derive(Debug, Clone)]
pub(crate) struct StandardLp {
    pub a: QMatrix,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub(crate) enum LpOutcome {
    /// `x` optimal; `y` satisfies `Aᵀy ≤ c` and `bᵀy = cᵀx`.
    Optimal { x: Vec<Rational>, y: Vec<Rational>, value: Rational },
    /// `Aᵀy ≤ 0` and `bᵀy > 0`.
    Infeasible { y: Vec<Rational> },
    Unbounded,
}

struct Tableau {
    /// `m` rows of `B⁻¹[A | I | b]`.
    rows: QMatrix,
    basis: Vec<usize>,
    n: usize,
    m: usize,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.n + self.m
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let inv = self.rows[r][col].recip();
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = col;
    }

    /// `yᵀ = c_Bᵀ B⁻¹`, read off the identity block.
    fn duals(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.m];
        for (i, &bv) in self.basis.iter().enumerate() {
            let cb = &cost[bv];
            if cb.is_zero() {
                continue;
            }
            for (k, yk) in y.iter_mut().enumerate() {
                *yk += cb * &self.rows[i][self.n + k];
            }
        }
        y
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        let rhs = self.rhs();
        self.basis
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (i, &bv)| acc + &cost[bv] * &self.rows[i][rhs])
    }

    /// Runs primal simplex with Bland's rule; `Err(())` when unbounded.
    fn optimize(&mut self, cost: &[Rational], may_enter: impl Fn(usize) -> bool) -> Result<(), ()> {
        let rhs = self.rhs();
        loop {
            // d_j = c_j − c_Bᵀ (B⁻¹ A)_j, read from the tableau column.
            let entering = (0..self.n + self.m).find(|&j| {
                if !may_enter(j) || self.basis.contains(&j) {
                    return false;
                }
                let mut d = cost[j].clone();
                for (i, &bv) in self.basis.iter().enumerate() {
                    if !cost[bv].is_zero() {
                        d -= &cost[bv] * &self.rows[i][j];
                    }
                }
                d.is_negative()
            });
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.m {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rows[i][rhs] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Err(());
            };
            self.pivot(r, col);
        }
    }
}

pub(crate) fn solve(lp: &StandardLp) -> LpOutcome {
    let m = lp.b.len();
    let n = lp.c.len();
    debug_assert!(lp.a.len() == m && lp.a.iter().all(|r| r.len() == n));

    let signs: Vec<bool> = lp.b.iter().map(|v| v.is_negative()).collect();
    let rows: QMatrix = (0..m)
        .map(|i| {
            let flip = signs[i];
            let mut row: Vec<Rational> = lp.a[i].iter().map(|v| if flip { -v } else { v.clone() }).collect();
            row.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
            row.push(if flip { -&lp.b[i] } else { lp.b[i].clone() });
            row
        })
        .collect();
    let mut t = Tableau { rows, basis: (n..n + m).collect(), n, m };
    let unflip = |y: Vec<Rational>| -> Vec<Rational> {
        y.into_iter().zip(&signs).map(|(v, &f)| if f { -v } else { v }).collect()
    };

    // Phase I.
    let mut phase1 = vec![Rational::zero(); n + m];
    for c in phase1[n..].iter_mut() {
        *c = Rational::one();
    }
    t.optimize(&phase1, |_| true)
        .expect("phase I objective is bounded below by zero");
    let infeasibility = t.objective(&phase1);
    if infeasibility.is_positive() {
        return LpOutcome::Infeasible { y: unflip(t.duals(&phase1)) };
    }

    // Drive zero-level artificials out where a structural pivot exists.
    for i in 0..m {
        if t.basis[i] < n {
            continue;
        }
        if let Some(j) = (0..n).find(|&j| !t.rows[i][j].is_zero() && !t.basis.contains(&j)) {
            t.pivot(i, j);
        }
    }

    // Phase II.
    let mut cost = lp.c.clone();
    cost.extend((0..m).map(|_| Rational::zero()));
    if t.optimize(&cost, |j| j < n).is_err() {
        return LpOutcome::Unbounded;
    }
    let rhs = t.rhs();
    let mut x = vec![Rational::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rows[i][rhs].clone();
        }
    }
    let value = t.objective(&cost);
    LpOutcome::Optimal { x, y: unflip(t.duals(&cost)), value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{dot, q};

    fn lp(a: Vec<Vec<i64>>, b: Vec<i64>, c: Vec<i64>) -> StandardLp {
        StandardLp {
            a: a.into_iter().map(|r| r.into_iter().map(q).collect()).collect(),
            b: b.into_iter().map(q).collect(),
            c: c.into_iter().map(q).collect(),
        }
    }

    fn column(a: &QMatrix, j: usize) -> Vec<Rational> {
        a.iter().map(|r| r[j].clone()).collect()
    }

    #[test]
    fn small_optimum_with_duals() {
        // min -x1 - x2  s.t. x1 + 2x2 + s1 = 4, 3x1 + x2 + s2 = 6.
        let p = lp(vec![vec![1, 2, 1, 0], vec![3, 1, 0, 1]], vec![4, 6], vec![-1, -1, 0, 0]);
        let LpOutcome::Optimal { x, y, value } = solve(&p) else { panic!() };
        assert_eq!(value, crate::rational::q_frac(-14, 5));
        assert_eq!(dot(&p.b, &y), value);
        for j in 0..4 {
            assert!(dot(&column(&p.a, j), &y) <= p.c[j]);
        }
        assert_eq!(x[0], crate::rational::q_frac(8, 5));
    }

    #[test]
    fn infeasible_gives_farkas_ray() {
        // x1 - x2 = -1 and x1 - x2 = 1 cannot both hold.
        let p = lp(vec![vec![1, -1], vec![1, -1]], vec![-1, 1], vec![0, 0]);
        let LpOutcome::Infeasible { y } = solve(&p) else { panic!() };
        assert!(dot(&p.b, &y) > q(0));
        for j in 0..2 {
            assert!(dot(&column(&p.a, j), &y) <= q(0));
        }
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let p = lp(vec![vec![1, 1], vec![2, 2]], vec![1, 2], vec![1, 0]);
        let LpOutcome::Optimal { x, value, .. } = solve(&p) else { panic!() };
        assert_eq!(value, q(0));
        assert_eq!(x, vec![q(0), q(1)]);
    }

    #[test]
    fn detects_unbounded() {
        let p = lp(vec![vec![1, -1]], vec![0], vec![-1, 0]);
        assert!(matches!(solve(&p), LpOutcome::Unbounded));
    }
}

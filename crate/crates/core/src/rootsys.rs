//! Finite root systems built from Cartan data.
//!
//! Coordinates are chosen so every pairing is an integer or rational dot
//! product:
//!
//! * roots live in the simple-root basis (integer coordinates),
//! * Cartan vectors live in the simple-coroot basis `h_1, …, h_l`,
//! * functionals live in the fundamental-weight basis, dual to the simple
//!   coroots, so `⟨λ, v⟩ = Σ λ_j v_j`.
//!
//! The Cartan matrix convention is `A[i][j] = α_j(h_i)`.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, dot, q, QMatrix, Rational};

/// Default cap on the reflection closure; every finite system of rank ≤ 8 is far below it.
pub const DEFAULT_CLOSURE_BOUND: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RootSystemError {
    #[error("unknown or unsupported type {letter}{rank}")]
    UnknownType { letter: String, rank: usize },
    #[error("not a Cartan matrix: {0}")]
    NotCartan(String),
    #[error("reflection closure exceeded {0} roots; the Cartan matrix is not of finite type")]
    ClosureBound(usize),
    #[error("the Cartan matrix is not of finite type: {0}")]
    NotFinite(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("{0} is not a root")]
    NotARoot(Root),
    #[error("highest root is only defined for irreducible systems ({0} components)")]
    Reducible(usize),
}

/// Input describing a root system: a named type or an explicit Cartan matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RootSystemSpec {
    Named {
        #[serde(rename = "type")]
        letter: String,
        rank: usize,
    },
    Cartan { cartan: Vec<Vec<i64>> },
}

impl RootSystemSpec {
    pub fn named(letter: &str, rank: usize) -> Self {
        RootSystemSpec::Named { letter: letter.to_owned(), rank }
    }

    pub fn cartan_matrix(&self) -> Result<Vec<Vec<i64>>, RootSystemError> {
        match self {
            RootSystemSpec::Cartan { cartan } => Ok(cartan.clone()),
            RootSystemSpec::Named { letter, rank } => named_cartan(letter, *rank),
        }
    }
}

impl fmt::Display for RootSystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootSystemSpec::Named { letter, rank } => write!(f, "{letter}{rank}"),
            RootSystemSpec::Cartan { cartan } => write!(f, "cartan{cartan:?}"),
        }
    }
}

fn named_cartan(letter: &str, n: usize) -> Result<Vec<Vec<i64>>, RootSystemError> {
    let unknown = || RootSystemError::UnknownType { letter: letter.to_owned(), rank: n };
    let mut a = vec![vec![0i64; n]; n];
    let chain = |a: &mut Vec<Vec<i64>>, len: usize| {
        for i in 0..len {
            a[i][i] = 2;
            if i + 1 < len {
                a[i][i + 1] = -1;
                a[i + 1][i] = -1;
            }
        }
    };
    match letter.to_ascii_uppercase().as_str() {
        "A" if n >= 1 => chain(&mut a, n),
        "B" if n >= 2 => {
            // α_n short.
            chain(&mut a, n);
            a[n - 1][n - 2] = -2;
        }
        "C" if n >= 2 => {
            // α_n long.
            chain(&mut a, n);
            a[n - 2][n - 1] = -2;
        }
        "D" if n >= 3 => {
            chain(&mut a, n - 1);
            a[n - 1][n - 1] = 2;
            a[n - 1][n - 3] = -1;
            a[n - 3][n - 1] = -1;
        }
        "E" if (6..=8).contains(&n) => {
            // Bourbaki labels: 1-3-4-5-6(-7(-8)), with 2 attached to 4.
            for i in 0..n {
                a[i][i] = 2;
            }
            let mut edges = vec![(1, 3), (3, 4), (4, 5), (5, 6), (2, 4)];
            if n >= 7 {
                edges.push((6, 7));
            }
            if n >= 8 {
                edges.push((7, 8));
            }
            for (i, j) in edges {
                a[i - 1][j - 1] = -1;
                a[j - 1][i - 1] = -1;
            }
        }
        "F" if n == 4 => {
            // α_1, α_2 long.
            chain(&mut a, 4);
            a[2][1] = -2;
        }
        "G" if n == 2 => {
            // α_1 short.
            a = vec![vec![2, -3], vec![-1, 2]];
        }
        _ => return Err(unknown()),
    }
    Ok(a)
}

/// A root in simple-root coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Root(pub Vec<i64>);

impl Root {
    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn neg(&self) -> Root {
        Root(self.0.iter().map(|c| -c).collect())
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&c| c >= 0) && self.0.iter().any(|&c| c > 0)
    }

    pub fn sub(&self, other: &Root) -> Root {
        Root(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    fn sort_key(&self) -> (i64, &[i64]) {
        (self.height(), &self.0)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Element of the Cartan space, in simple-coroot coordinates unless a caller
/// documents another basis (the cone code is basis-agnostic).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CartanVector(#[serde(with = "rational::serde_qvec")] pub Vec<Rational>);

impl CartanVector {
    pub fn zero(dim: usize) -> Self {
        CartanVector(vec![Rational::zero(); dim])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        CartanVector(v.iter().map(|&x| q(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &CartanVector) -> CartanVector {
        CartanVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: &Rational) -> CartanVector {
        CartanVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> CartanVector {
        CartanVector(self.0.iter().map(|a| -a).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rational::to_f64).collect()
    }
}

/// Element of the dual Cartan space in fundamental-weight coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootFunctional(#[serde(with = "rational::serde_qvec")] pub Vec<Rational>);

impl RootFunctional {
    pub fn pair(&self, v: &CartanVector) -> Rational {
        dot(&self.0, &v.0)
    }
}

/// An immutable finite root system with its invariant form and coroots.
#[derive(Debug, Clone)]
pub struct RootSystem {
    spec: RootSystemSpec,
    cartan: Vec<Vec<i64>>,
    roots: Vec<Root>,
    functionals: Vec<RootFunctional>,
    coroots: Vec<CartanVector>,
    killing: QMatrix,
    dual_form: QMatrix,
    components: usize,
}

impl RootSystem {
    pub fn build(spec: &RootSystemSpec) -> Result<Self, RootSystemError> {
        Self::build_with_bound(spec, DEFAULT_CLOSURE_BOUND)
    }

    pub fn build_with_bound(spec: &RootSystemSpec, bound: usize) -> Result<Self, RootSystemError> {
        let cartan = spec.cartan_matrix()?;
        validate_cartan(&cartan)?;
        let l = cartan.len();
        let mut roots = reflection_closure(&cartan, bound)?;
        if let Some(bad) = roots.iter().find(|r| !r.is_positive() && !r.neg().is_positive()) {
            return Err(RootSystemError::NotFinite(format!("mixed-sign root {bad}")));
        }
        roots.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));

        let functionals: Vec<RootFunctional> =
            roots.iter().map(|r| functional_of(&cartan, r)).collect();

        // B(h_j, h_k) = Σ_α α(h_j) α(h_k).
        let mut killing = vec![vec![Rational::zero(); l]; l];
        for f in &functionals {
            for j in 0..l {
                for k in 0..l {
                    killing[j][k] += &f.0[j] * &f.0[k];
                }
            }
        }
        for m in 1..=l {
            let minor: QMatrix = killing[..m].iter().map(|r| r[..m].to_vec()).collect();
            if !rational::determinant(&minor).is_positive() {
                return Err(RootSystemError::NotFinite("invariant form is not positive definite".into()));
            }
        }
        let dual_form = rational::inverse(&killing)
            .ok_or_else(|| RootSystemError::NotFinite("singular invariant form".into()))?;

        // h_α = 2 α* / B*(α, α), with α* the B-dual of α.
        let coroots = functionals
            .iter()
            .map(|f| {
                let star = rational::mat_vec(&dual_form, &f.0);
                let norm = dot(&f.0, &star);
                let k = q(2) / norm;
                CartanVector(star.into_iter().map(|x| x * &k).collect())
            })
            .collect();

        let components = count_components(&cartan);
        Ok(RootSystem {
            spec: spec.clone(),
            cartan,
            roots,
            functionals,
            coroots,
            killing,
            dual_form,
            components,
        })
    }

    pub fn spec(&self) -> &RootSystemSpec {
        &self.spec
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// All roots, ordered by height and then lexicographically.
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn positive_roots(&self) -> impl Iterator<Item = &Root> {
        self.roots.iter().filter(|r| r.is_positive())
    }

    pub fn simple_root(&self, i: usize) -> Root {
        let mut c = vec![0; self.rank()];
        c[i] = 1;
        Root(c)
    }

    /// Gram matrix of the invariant form on the simple coroots.
    pub fn killing_matrix(&self) -> &QMatrix {
        &self.killing
    }

    /// Gram matrix of the dual form on fundamental weights.
    pub fn dual_form_matrix(&self) -> &QMatrix {
        &self.dual_form
    }

    pub fn components(&self) -> usize {
        self.components
    }

    fn check_dim(&self, got: usize) -> Result<(), RootSystemError> {
        if got != self.rank() {
            return Err(RootSystemError::Dimension { expected: self.rank(), got });
        }
        Ok(())
    }

    pub fn index_of(&self, coords: &[i64]) -> Result<Option<usize>, RootSystemError> {
        self.check_dim(coords.len())?;
        let probe = Root(coords.to_vec());
        Ok(self
            .roots
            .binary_search_by(|r| r.sort_key().cmp(&probe.sort_key()))
            .ok())
    }

    pub fn is_root(&self, coords: &[i64]) -> Result<bool, RootSystemError> {
        Ok(self.index_of(coords)?.is_some())
    }

    fn require_root(&self, alpha: &Root) -> Result<usize, RootSystemError> {
        self.index_of(&alpha.0)?
            .ok_or_else(|| RootSystemError::NotARoot(alpha.clone()))
    }

    pub fn killing_cartan(&self, u: &CartanVector, v: &CartanVector) -> Result<Rational, RootSystemError> {
        self.check_dim(u.dim())?;
        self.check_dim(v.dim())?;
        Ok(dot(&u.0, &rational::mat_vec(&self.killing, &v.0)))
    }

    pub fn dual_form(&self, a: &RootFunctional, b: &RootFunctional) -> Result<Rational, RootSystemError> {
        self.check_dim(a.0.len())?;
        self.check_dim(b.0.len())?;
        Ok(dot(&a.0, &rational::mat_vec(&self.dual_form, &b.0)))
    }

    pub fn coroot(&self, alpha: &Root) -> Result<CartanVector, RootSystemError> {
        let i = self.require_root(alpha)?;
        Ok(self.coroots[i].clone())
    }

    /// The root as a functional on the Cartan space.
    pub fn functional(&self, alpha: &Root) -> Result<RootFunctional, RootSystemError> {
        let i = self.require_root(alpha)?;
        Ok(self.functionals[i].clone())
    }

    /// `α(v)` for a root α.
    pub fn evaluate(&self, alpha: &Root, v: &CartanVector) -> Result<Rational, RootSystemError> {
        self.check_dim(v.dim())?;
        Ok(self.functional(alpha)?.pair(v))
    }

    /// `B*(α, α)`.
    pub fn root_norm(&self, alpha: &Root) -> Result<Rational, RootSystemError> {
        let f = self.functional(alpha)?;
        self.dual_form(&f, &f)
    }

    /// The B-dual `λ*` of a functional: the vector with `B(λ*, v) = λ(v)`.
    pub fn dual_vector(&self, f: &RootFunctional) -> Result<CartanVector, RootSystemError> {
        self.check_dim(f.0.len())?;
        Ok(CartanVector(rational::mat_vec(&self.dual_form, &f.0)))
    }

    /// Highest root by height; irreducible systems only.
    pub fn highest_root(&self) -> Result<&Root, RootSystemError> {
        if self.components != 1 {
            return Err(RootSystemError::Reducible(self.components));
        }
        Ok(self.roots.last().expect("nonempty root system"))
    }

    pub fn roots_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&(1..=self.rank()).map(|i| format!("a{i}")).collect::<Vec<_>>().join(","));
        out.push('\n');
        for r in &self.roots {
            let line: Vec<String> = r.0.iter().map(i64::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

fn validate_cartan(a: &[Vec<i64>]) -> Result<(), RootSystemError> {
    let n = a.len();
    if n == 0 {
        return Err(RootSystemError::NotCartan("empty matrix".into()));
    }
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(RootSystemError::NotCartan(format!("row {} has length {}", i + 1, row.len())));
        }
        if row[i] != 2 {
            return Err(RootSystemError::NotCartan(format!("diagonal entry ({0},{0}) is not 2", i + 1)));
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            if row[j] > 0 {
                return Err(RootSystemError::NotCartan(format!("positive off-diagonal entry ({},{})", i + 1, j + 1)));
            }
            if (row[j] == 0) != (a[j][i] == 0) {
                return Err(RootSystemError::NotCartan(format!(
                    "entries ({},{}) and ({},{}) must vanish together",
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

fn functional_of(cartan: &[Vec<i64>], r: &Root) -> RootFunctional {
    // α(h_j) = Σ_i c_i A[j][i].
    RootFunctional(
        cartan
            .iter()
            .map(|row| q(row.iter().zip(&r.0).map(|(a, c)| a * c).sum()))
            .collect(),
    )
}

fn reflect(cartan: &[Vec<i64>], i: usize, beta: &[i64]) -> Vec<i64> {
    let pairing: i64 = cartan[i].iter().zip(beta).map(|(a, c)| a * c).sum();
    let mut out = beta.to_vec();
    out[i] -= pairing;
    out
}

fn reflection_closure(cartan: &[Vec<i64>], bound: usize) -> Result<Vec<Root>, RootSystemError> {
    let l = cartan.len();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    for i in 0..l {
        let mut e = vec![0; l];
        e[i] = 1;
        if seen.insert(e.clone()) {
            queue.push_back(e);
        }
    }
    while let Some(beta) = queue.pop_front() {
        for i in 0..l {
            let next = reflect(cartan, i, &beta);
            if seen.insert(next.clone()) {
                if seen.len() > bound {
                    return Err(RootSystemError::ClosureBound(bound));
                }
                queue.push_back(next);
            }
        }
    }
    Ok(seen.into_iter().map(Root).collect())
}

fn count_components(cartan: &[Vec<i64>]) -> usize {
    let n = cartan.len();
    let mut unvisited: BTreeSet<usize> = (0..n).collect();
    let mut count = 0;
    while let Some(&start) = unvisited.iter().next() {
        count += 1;
        let mut stack = vec![start];
        unvisited.remove(&start);
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if cartan[i][j] != 0 && unvisited.remove(&j) {
                    stack.push(j);
                }
            }
        }
    }
    count
}

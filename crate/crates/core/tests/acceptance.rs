//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use diagmetric::cone;
use diagmetric::higgs::{self, DiagonalHiggsDatum, WeightVector};
use diagmetric::rational::{q, q_frac, Rational};
use diagmetric::rootsys::{CartanVector, Root, RootSystem, RootSystemSpec};
use diagmetric::scan::{self, ScanConfig};
use diagmetric::toda::{
    assemble_problem, from_higgs_datum, sample_preset, solve, Preset, SolveOptions, SolveReport, TodaProblem,
    TorusGrid, Verdict,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RANDOM_CONE_PROBLEMS: usize = 1000;
const ORACLE_MAX_DIM: usize = 3;
const FORMULA_TRIPLES: usize = 10_000;
const SYMMETRIC_RESIDUAL: f64 = 1e-12;
const CLOSED_FORM_TOL: f64 = 1e-10;
const CONVERGED_RESIDUAL: f64 = 1e-8;
const CONVERGED_BALANCE: f64 = 1e-8;
const FD_STEP: f64 = 1e-5;
const FD_REL: f64 = 1e-6;
const HESSIAN_TOL: f64 = 1e-10;

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn named(letter: &str, rank: usize) -> RootSystem {
    RootSystem::build(&RootSystemSpec::named(letter, rank)).unwrap()
}

fn root_systems() -> Check {
    let expected = [
        ("A", 1, 2),
        ("A", 2, 6),
        ("A", 3, 12),
        ("A", 4, 20),
        ("B", 2, 8),
        ("B", 3, 18),
        ("B", 4, 32),
        ("C", 2, 8),
        ("C", 3, 18),
        ("C", 4, 32),
        ("D", 4, 24),
        ("F", 4, 48),
        ("G", 2, 12),
    ];
    for (letter, rank, count) in expected {
        let rs = named(letter, rank);
        ensure(rs.roots().len() == count, || format!("{letter}{rank}: {} roots", rs.roots().len()))?;
        for a in rs.roots() {
            let v = rs.evaluate(a, &rs.coroot(a).unwrap()).unwrap();
            ensure(v == q(2), || format!("{letter}{rank}: α(h_α) = {v} for {a}"))?;
        }
    }

    let a2 = named("A", 2);
    let closure = common::reflection_closure(a2.cartan());
    let ours: std::collections::BTreeSet<Vec<i64>> = a2.roots().iter().map(|r| r.0.clone()).collect();
    ensure(closure == ours, || format!("A2 reflection closure {closure:?}"))?;

    for l in 1..=4usize {
        let rs = named("A", l);
        let r = (l + 1) as i64;
        for i in 0..l {
            for j in 0..l {
                let mut ei = vec![0; l];
                let mut ej = vec![0; l];
                ei[i] = 1;
                ej[j] = 1;
                let trace = match i.abs_diff(j) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                };
                let b = rs.killing_cartan(&CartanVector::from_ints(&ei), &CartanVector::from_ints(&ej)).unwrap();
                ensure(b == q(2 * r * trace), || format!("A{l}: B(h{i},h{j}) = {b}"))?;
            }
        }
    }
    Ok(())
}

fn farkas_dichotomy() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    let mut compared = 0;
    for n in 0..RANDOM_CONE_PROBLEMS {
        let p = common::random_cone_problem(&mut rng, 6, 7);
        for v in [cone::closed_cone_member(&p), cone::open_cone_member(&p)] {
            let mut flipped = v.clone();
            flipped.answer = !flipped.answer;
            ensure(cone::verify_certificate(&p, &v), || format!("problem {n}: certificate rejected"))?;
            ensure(!cone::verify_certificate(&p, &flipped), || format!("problem {n}: both answers verify"))?;
        }
        if p.dim() <= ORACLE_MAX_DIM {
            let gens = common::gens_of(&p);
            let closed = cone::closed_cone_member(&p).answer;
            let open = cone::open_cone_member(&p).answer;
            ensure(closed == common::oracle_closed(&gens, &p.target.0), || format!("problem {n}: closed {p:?}"))?;
            ensure(open == common::oracle_open(&gens, &p.target.0), || format!("problem {n}: open {p:?}"))?;
            compared += 1;
        }
    }
    ensure(compared > 0, || "no problem small enough for the oracle".into())
}

fn random_triple(rng: &mut ChaCha8Rng) -> (DiagonalHiggsDatum, WeightVector, u64) {
    let r = rng.gen_range(2..=5usize);
    let mut m: Vec<Rational> = (1..r).map(|_| q_frac(rng.gen_range(-6..=6), rng.gen_range(1..=4))).collect();
    m.push(-m.iter().fold(Rational::zero(), |a, b| a + b));
    let arrows: Vec<(usize, usize)> = (1..=r)
        .flat_map(|i| (1..=r).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .filter(|_| rng.gen_bool(0.3))
        .collect();
    let mut s: Vec<Rational> = (1..r).map(|_| q(rng.gen_range(-5..=5))).collect();
    s.push(-s.iter().fold(Rational::zero(), |a, b| a + b));
    (
        DiagonalHiggsDatum::new(r, m, arrows).unwrap(),
        WeightVector::new(s).unwrap(),
        rng.gen_range(1..=12),
    )
}

fn equivalence_sweep() -> Check {
    let summary = scan::equivalence_scan(&ScanConfig { rmin: 2, rmax: 4, dmax: 3 }, |_| {});
    ensure(summary.mismatches() == 0, || format!("{summary:?}"))?;
    ensure(summary.data > 0, || "empty sweep".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xe0e0);
    for n in 0..FORMULA_TRIPLES {
        let (d, s, k) = random_triple(&mut rng);
        let a = higgs::gamma_vee_direct(&d, k, &s);
        let b = higgs::gamma_vee_telescoping(&d, k, &s);
        ensure(a == b, || format!("triple {n}: {a} vs {b} for {d}"))?;
    }
    Ok(())
}

fn cyclic_sets() -> Check {
    let systems = [("A", 1), ("A", 2), ("A", 3), ("A", 4), ("G", 2)];
    for (letter, rank) in systems {
        let rs = named(letter, rank);
        let active = higgs::cyclic_active_set(&rs).unwrap();
        ensure(active.len() == rank + 1, || format!("{letter}{rank}: {} active roots", active.len()))?;
        ensure(higgs::offdiagonal_check(&active, &rs).unwrap(), || format!("{letter}{rank}: off-diagonal check"))?;
        let gens: Vec<CartanVector> = active.iter().map(|a| rs.coroot(a).unwrap()).collect();
        ensure(cone::cone_is_full(&gens, rank), || format!("{letter}{rank}: cone not full"))?;
    }
    Ok(())
}

fn check_converged(what: &str, p: &TodaProblem, r: &SolveReport, omega: &[f64]) -> Check {
    ensure(r.verdict == Verdict::Converged, || format!("{what}: {:?} {:?}", r.verdict, r.note))?;
    let res = p.residual(omega).unwrap();
    let bal = p.mean_balance_check(omega).unwrap();
    ensure(res < CONVERGED_RESIDUAL, || format!("{what}: residual {res}"))?;
    ensure(bal < CONVERGED_BALANCE, || format!("{what}: mean balance {bal}"))
}

fn solver_exactness() -> Check {
    let a1 = named("A", 1);
    let g = TorusGrid::square(32);
    let n = g.cells();
    let p = assemble_problem(
        a1.clone(),
        vec![(Root(vec![1]), vec![1.0; n]), (Root(vec![-1]), vec![1.0; n])],
        vec![0.0; n],
        g,
    )
    .unwrap();
    let (s, r) = solve(&p, &SolveOptions::default()).unwrap();
    check_converged("symmetric", &p, &r, &s.omega)?;
    ensure(s.omega.iter().all(|&v| v == 0.0), || "symmetric: nonzero state".into())?;
    ensure(r.residual < SYMMETRIC_RESIDUAL, || format!("symmetric: residual {}", r.residual))?;

    let g = TorusGrid::square(64);
    let n = g.cells();
    let p = assemble_problem(
        a1.clone(),
        vec![(Root(vec![1]), vec![1.0; n]), (Root(vec![-1]), vec![8f64.exp(); n])],
        vec![0.0; n],
        g,
    )
    .unwrap();
    let (s, r) = solve(&p, &SolveOptions::default()).unwrap();
    check_converged("closed form", &p, &r, &s.omega)?;
    let worst = s.omega.iter().fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
    ensure(worst < CLOSED_FORM_TOL, || format!("closed form: max |u − 1| = {worst}"))?;

    let g = TorusGrid::new(24, 16, 2.0, 1.0).unwrap();
    let p = assemble_problem(
        a1,
        vec![
            (Root(vec![1]), sample_preset(&g, Preset::Sin2x, 1.0, 0.0)),
            (Root(vec![-1]), sample_preset(&g, Preset::Cosy, 0.5, 1.0)),
        ],
        sample_preset(&g, Preset::Cosxy, 2.0, 0.3),
        g,
    )
    .unwrap();
    let (s, r) = solve(&p, &SolveOptions::default()).unwrap();
    check_converged("varying", &p, &r, &s.omega)
}

/// A field with `l` components per cell, each `offset + amplitude · preset`.
fn source(g: &TorusGrid, comps: &[(f64, f64, Preset)]) -> Vec<f64> {
    let l = comps.len();
    let cols: Vec<Vec<f64>> = comps.iter().map(|&(off, amp, pre)| sample_preset(g, pre, amp, off)).collect();
    let mut out = vec![0.0; g.cells() * l];
    for cell in 0..g.cells() {
        for k in 0..l {
            out[cell * l + k] = cols[k][cell];
        }
    }
    out
}

struct Case {
    name: &'static str,
    problem: TodaProblem,
    feasible: bool,
}

fn case(name: &'static str, problem: TodaProblem, feasible: bool) -> Case {
    Case { name, problem, feasible }
}

fn dichotomy_suite() -> Vec<Case> {
    let g = TorusGrid::square(16);
    let n = g.cells();
    let one = vec![1.0; n];
    let line = sample_preset(&g, Preset::Sin2x, 1.0, 0.0);
    let bump = sample_preset(&g, Preset::Cosy, 0.5, 1.0);
    let a1 = named("A", 1);
    let a2 = named("A", 2);
    let a1p = |active: Vec<(Vec<i64>, Vec<f64>)>, f: Vec<f64>| {
        assemble_problem(a1.clone(), active.into_iter().map(|(r, c)| (Root(r), c)).collect(), f, g).unwrap()
    };
    let a2p = |active: Vec<(Vec<i64>, Vec<f64>)>, f: Vec<f64>| {
        assemble_problem(a2.clone(), active.into_iter().map(|(r, c)| (Root(r), c)).collect(), f, g).unwrap()
    };
    let f1 = |off: f64, pre: Preset| source(&g, &[(off, 1.0, pre)]);
    let f2 = |a: f64, b: f64| source(&g, &[(a, 1.0, Preset::Cosx), (b, 0.5, Preset::Cosxy)]);

    let mut cases = vec![
        case("a1 both roots, zero source", a1p(vec![(vec![1], one.clone()), (vec![-1], one.clone())], f1(0.0, Preset::Cosx)), true),
        case("a1 both roots, shifted source", a1p(vec![(vec![1], bump.clone()), (vec![-1], one.clone())], f1(-2.0, Preset::Cosxy)), true),
        case("a1 positive root, positive mean", a1p(vec![(vec![1], one.clone())], f1(0.5, Preset::Cosx)), true),
        case("a1 positive root, negative mean", a1p(vec![(vec![1], one.clone())], f1(-0.5, Preset::Cosx)), false),
        case("a1 line-vanishing coefficient, both roots", a1p(vec![(vec![1], line.clone()), (vec![-1], one.clone())], f1(0.0, Preset::Cosy)), true),
        case("a1 line-vanishing coefficient, positive mean", a1p(vec![(vec![1], line.clone())], f1(1.0, Preset::Cosy)), true),
        case("a1 line-vanishing coefficient, negative mean", a1p(vec![(vec![1], line.clone())], f1(-1.0, Preset::Cosy)), false),
        case("a1 negative root, negative mean", a1p(vec![(vec![-1], bump.clone())], f1(-0.3, Preset::Cosxy)), true),
        case("a1 negative root, positive mean", a1p(vec![(vec![-1], bump.clone())], f1(0.3, Preset::Cosxy)), false),
        case("a2 cyclic, zero mean", a2p(vec![(vec![1, 0], one.clone()), (vec![0, 1], one.clone()), (vec![-1, -1], one.clone())], f2(0.0, 0.0)), true),
        case("a2 cyclic, line-vanishing coefficient", a2p(vec![(vec![1, 0], line.clone()), (vec![0, 1], one.clone()), (vec![-1, -1], bump.clone())], f2(-1.0, 2.0)), true),
        case("a2 simple roots, positive mean", a2p(vec![(vec![1, 0], one.clone()), (vec![0, 1], bump.clone())], f2(1.0, 1.0)), true),
        case("a2 simple roots, mixed mean", a2p(vec![(vec![1, 0], one.clone()), (vec![0, 1], bump.clone())], f2(1.0, -1.0)), false),
        case("a2 one root, mean on its ray", a2p(vec![(vec![1, 0], one.clone())], f2(1.0, 0.0)), true),
        case("a2 one root, mean off its ray", a2p(vec![(vec![1, 0], one.clone())], f2(0.0, 1.0)), false),
        case("a2 positive roots, positive mean", a2p(vec![(vec![1, 0], one.clone()), (vec![0, 1], one.clone()), (vec![1, 1], line.clone())], f2(0.5, 2.0)), true),
        case("a2 negative simple roots, positive mean", a2p(vec![(vec![-1, 0], one.clone()), (vec![0, -1], one.clone())], f2(1.0, 1.0)), false),
    ];
    cases.push(case(
        "a1 line-vanishing negative coefficient",
        a1p(vec![(vec![1], one.clone()), (vec![-1], line.clone())], f1(0.7, Preset::Cosxy)),
        true,
    ));

    let datum = |degrees: &[i64], arrows: &[(usize, usize)]| DiagonalHiggsDatum::from_ints(degrees, arrows).unwrap();
    let line_first = |r: &Root| if r.0[0] != 0 { line.clone() } else { one.clone() };
    let stable = datum(&[-1, 0, 1], &[(2, 1), (3, 2), (1, 3)]);
    let unstable = datum(&[1, -1], &[(1, 2)]);
    cases.push(case("datum with cyclic arrows", from_higgs_datum(&stable, g, line_first).unwrap(), true));
    cases.push(case("datum with destabilising arrow", from_higgs_datum(&unstable, g, |_| one.clone()).unwrap(), false));
    cases
}

fn theorem_dichotomy() -> Check {
    let cases = dichotomy_suite();
    ensure(cases.len() == 20, || format!("suite has {} problems", cases.len()))?;
    ensure(cases.iter().any(|c| c.feasible) && cases.iter().any(|c| !c.feasible), || "one-sided suite".into())?;
    let forced = SolveOptions { force_iterate: true, max_iter: 30, ..SolveOptions::default() };
    for c in &cases {
        let pre = c.problem.feasibility_precheck().unwrap();
        ensure(pre.feasible() == c.feasible, || format!("{}: precheck says {}", c.name, pre.feasible()))?;
        ensure(!pre.boundary(), || format!("{}: mean source on the cone boundary", c.name))?;
        let (s, r) = solve(&c.problem, &SolveOptions::default()).unwrap();
        if c.feasible {
            check_converged(c.name, &c.problem, &r, &s.omega)?;
        } else {
            ensure(r.verdict == Verdict::Infeasible, || format!("{}: {:?}", c.name, r.verdict))?;
            ensure(r.recession_verified == Some(true), || format!("{}: recession direction", c.name))?;
            let (_, r) = solve(&c.problem, &forced).unwrap();
            ensure(r.verdict != Verdict::Converged, || format!("{}: forced run converged", c.name))?;
        }
    }

    let g = TorusGrid::square(8);
    let p = assemble_problem(
        named("A", 1),
        vec![(Root(vec![1]), vec![1.0; g.cells()])],
        sample_preset(&g, Preset::Cosx, 1.0, -0.5),
        g,
    )
    .unwrap();
    let (_, r) = solve(&p, &SolveOptions { force_iterate: true, max_iter: 25, ..SolveOptions::default() }).unwrap();
    ensure(r.verdict == Verdict::IterationLimit, || format!("forced: {:?}", r.verdict))?;
    ensure(r.iterations == 25, || format!("forced: stopped after {} ({:?})", r.iterations, r.note))?;
    ensure(r.energy_trace.windows(2).all(|w| w[1] < w[0]), || "forced: energy not monotone".into())?;
    ensure(r.residual > 0.1, || format!("forced: residual {}", r.residual))?;
    ensure(r.recession_verified == Some(true), || "forced: recession direction".into())?;
    let d = r.recession_direction.as_ref().unwrap().to_f64();
    let drift: Vec<f64> =
        r.mean_trace.last().unwrap().iter().zip(r.mean_trace.first().unwrap()).map(|(a, b)| a - b).collect();
    let along = p.bform(&drift, &d);
    ensure(along > 1.0, || format!("forced: mean drift {drift:?} against {d:?}"))
}

fn calculus_checks() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xca1c);
    let g = TorusGrid::new(8, 6, 2.0, 1.5).unwrap();
    let n = g.cells();
    let pos = |rng: &mut ChaCha8Rng| (0..n).map(|_| rng.gen_range(0.2..2.0)).collect::<Vec<f64>>();
    let active = vec![
        (Root(vec![1, 0]), pos(&mut rng)),
        (Root(vec![0, 1]), pos(&mut rng)),
        (Root(vec![-1, -1]), sample_preset(&g, Preset::Sin2y, 1.0, 0.0)),
    ];
    let f: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let p = assemble_problem(named("A", 2), active, f, g).unwrap();
    let rand_vec = |rng: &mut ChaCha8Rng| (0..p.len()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>();
    let shift = |x: &[f64], t: f64, v: &[f64]| x.iter().zip(v).map(|(a, b)| a + t * b).collect::<Vec<f64>>();
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for k in 0..20 {
        let omega = rand_vec(&mut rng);
        let v = rand_vec(&mut rng);
        let w = rand_vec(&mut rng);
        let fd = (p.energy(&shift(&omega, FD_STEP, &v)).unwrap() - p.energy(&shift(&omega, -FD_STEP, &v)).unwrap())
            / (2.0 * FD_STEP);
        let an = p.inner(&p.gradient(&omega).unwrap(), &v);
        ensure((fd - an).abs() <= FD_REL * an.abs().max(1.0), || format!("state {k}: dE {fd} vs {an}"))?;

        let gp = p.gradient(&shift(&omega, FD_STEP, &v)).unwrap();
        let gm = p.gradient(&shift(&omega, -FD_STEP, &v)).unwrap();
        let hv = p.hessian_apply(&omega, &v).unwrap();
        let err: Vec<f64> = gp.iter().zip(&gm).zip(&hv).map(|((a, b), h)| (a - b) / (2.0 * FD_STEP) - h).collect();
        ensure(max_abs(&err) <= FD_REL * max_abs(&hv).max(1.0), || format!("state {k}: Hessian error {}", max_abs(&err)))?;

        let hw = p.hessian_apply(&omega, &w).unwrap();
        let (a, b) = (p.inner(&hv, &w), p.inner(&v, &hw));
        ensure((a - b).abs() <= HESSIAN_TOL * a.abs().max(b.abs()).max(1.0), || format!("state {k}: {a} vs {b}"))?;
        let quad = p.inner(&hv, &v);
        ensure(quad >= -HESSIAN_TOL * p.inner(&v, &v), || format!("state {k}: quadratic form {quad}"))?;
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 7] = [
        ("1 root-system sanity", root_systems, Duration::from_secs(1)),
        ("2 Farkas dichotomy", farkas_dichotomy, Duration::from_secs(30)),
        ("3 equivalence sweep", equivalence_sweep, Duration::from_secs(120)),
        ("4 cyclic certification", cyclic_sets, Duration::from_secs(1)),
        ("5 solver exactness", solver_exactness, Duration::from_secs(30)),
        ("6 existence dichotomy", theorem_dichotomy, Duration::from_secs(120)),
        ("7 calculus checks", calculus_checks, Duration::from_secs(30)),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, f, budget) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|e| Err(e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panic".into())));
        let took = start.elapsed();
        let outcome = outcome.and_then(|()| ensure(took <= budget, || format!("took {took:.2?}, budget {budget:?}")));
        match outcome {
            Ok(()) => println!("PASS criterion {name} ({took:.2?})"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({took:.2?}): {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

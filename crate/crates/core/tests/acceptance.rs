mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use pbasis::basis::{decompose_over_fraction_span, is_p_basis_of_constants, structure_matrix, DecomposeVerdict};
use pbasis::derivation::jacobian_derivation;
use pbasis::expr::PolyContext;
use pbasis::freudenburg::{shift_to_coprime, verify_witness};
use pbasis::frob::{b_decompose, b_recompose, in_b, is_squarefree_and_bfree};
use pbasis::jac::{column_sets, dgcd, minor};
use pbasis::oracle::{curated_suite, enumerate_polys, equivalence_experiment, irreducible_factors_trial, ExperimentParams, ExperimentReport};
use pbasis::{KKind, MPoly, Ring};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Wall-clock limits per criterion, in seconds.
const LIMITS: [(&str, u64); 10] =
    [("A1", 1), ("A2", 60), ("A3", 300), ("A4", 300), ("A5", 120), ("A6", 120), ("A7", 30), ("A8", 30), ("A9", 60), ("A10", 60)];

/// Minimum number of condition samples per unit-dgcd tuple in A3.
const MIN_SAMPLES: usize = 50;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn var(ring: Ring, i: usize) -> MPoly {
    MPoly::var(ring, i).unwrap()
}

fn show(fs: &[MPoly]) -> String {
    let ring = fs[0].ring();
    let ctx = PolyContext::with_default_names(ring.kind(), ring.arity());
    let parts: Vec<String> = fs.iter().map(|f| ctx.print(f)).collect();
    format!("{} over {}", parts.join(", "), ring.kind().label())
}

fn a1() -> Outcome {
    let mut checked = 0;
    for p in [2, 3, 5] {
        for n in 1..=3 {
            let r = ring(p, false, n);
            let fs: Vec<MPoly> = (0..n).map(|i| var(r, i)).collect();
            if !dgcd(&fs).unwrap().is_unit() || !is_p_basis_of_constants(&fs).unwrap().is_p_basis {
                return fail(format!("identity not a p-basis: {}", show(&fs)));
            }
            for i in 0..n {
                let mut alpha = vec![0; n];
                alpha[i] = 1;
                let expected = [(alpha, MPoly::one(r))];
                match decompose_over_fraction_span(&fs[i], &fs).unwrap() {
                    DecomposeVerdict::InPolynomialSpan(c)
                        if c.len() == 1 && c.iter().zip(&expected).all(|((a, y), (b, one))| a == b && y.as_poly() == one) => {}
                    other => return fail(format!("x{} in {}: {other:?}", i + 1, show(&fs))),
                }
                checked += 1;
            }
        }
    }
    pass(format!("9 identity tuples, {checked} coordinate decompositions"))
}

/// `fs` after `f_i ← f_i + q(f_j : j ≠ i)` with a random `q` of degree at most 2.
fn elementary_step(rng: &mut ChaCha8Rng, fs: &mut [MPoly]) {
    let ring = fs[0].ring();
    let p = ring.p();
    let n = fs.len();
    let i = rng.gen_range(0..n);
    let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    let mut q = MPoly::scalar(ring, rng.gen_range(0..p) as u64);
    for (a, &j) in others.iter().enumerate() {
        q = &q + &fs[j].scale(rng.gen_range(0..p));
        for &k in &others[a..] {
            q = &q + &(&fs[j] * &fs[k]).scale(rng.gen_range(0..p));
        }
    }
    fs[i] = &fs[i] + &q;
}

fn a2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 0..100 {
        let r = ring([2, 3][k % 2], false, [2, 3][(k / 2) % 2]);
        let n = r.arity();
        let mut fs: Vec<MPoly> = (0..n).map(|i| var(r, i)).collect();
        for _ in 0..rng.gen_range(1..=3) {
            elementary_step(&mut rng, &mut fs);
        }
        let cols: Vec<usize> = (0..n).collect();
        let det = minor(&fs, &cols).unwrap();
        if det.is_zero() || !det.is_constant() {
            return fail(format!("determinant {det:?} for {}", show(&fs)));
        }
        if !dgcd(&fs).unwrap().is_unit() {
            return fail(format!("dgcd not a unit for {}", show(&fs)));
        }
        for i in 0..n {
            if !matches!(decompose_over_fraction_span(&var(r, i), &fs).unwrap(), DecomposeVerdict::InPolynomialSpan(_)) {
                return fail(format!("x{} has no polynomial coefficients over {}", i + 1, show(&fs)));
            }
        }
    }
    pass("100 tame automorphisms over F2/F3, n in {2,3}")
}

/// The random tuples behind A3, shared with A4.
fn a3_reports() -> Vec<ExperimentReport> {
    let mut out = Vec::new();
    for p in [2, 3] {
        for (n, m) in [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)] {
            let params = ExperimentParams { p, n, m, deg: 3, count: 50, seed: 7 + p as u64 * 10 + n as u64, trials: 60, ..Default::default() };
            out.extend(equivalence_experiment(&params).unwrap());
        }
    }
    out
}

fn a3(reports: &[ExperimentReport]) -> Outcome {
    let mut units = 0;
    let mut min_samples = usize::MAX;
    for r in reports.iter().filter(|r| r.dgcd_unit) {
        units += 1;
        min_samples = min_samples.min(r.cond3.samples);
        if r.cond3.samples < MIN_SAMPLES || !r.cond3.failures.is_empty() {
            return fail(format!(
                "{}: {} samples, {} failures",
                show(&r.fs),
                r.cond3.samples,
                r.cond3.failures.len()
            ));
        }
    }
    pass(format!("{} tuples, {units} with unit dgcd, min samples {min_samples}, 0 failures", reports.len()))
}

fn a4(reports: &[ExperimentReport]) -> Outcome {
    let curated = curated_suite().unwrap();
    let mut curated_found = 0;
    for (k, (label, fs)) in curated.iter().enumerate() {
        let params = ExperimentParams { trials: 20, ..Default::default() };
        let rep = pbasis::oracle::analyze_instance(k, label, fs, &params, k as u64).unwrap();
        let verified = rep.witnesses.iter().filter(|w| verify_witness(fs, w).unwrap_or(false)).count();
        if rep.exhausted || verified == 0 || rep.refutations.is_empty() {
            return fail(format!("curated {label}: {verified} verified witnesses, exhausted {}", rep.exhausted));
        }
        curated_found += 1;
    }
    let (mut random, mut found, mut exhausted) = (0, 0, 0);
    for r in reports.iter().filter(|r| !r.dgcd_unit && !r.dgcd.is_zero() && r.dgcd_factors.is_some()) {
        random += 1;
        if r.witnesses.iter().any(|w| verify_witness(&r.fs, w).unwrap_or(false)) {
            found += 1;
        } else if r.exhausted {
            exhausted += 1;
        } else {
            return fail(format!("no witness and no exhaustion flag for {}", show(&r.fs)));
        }
    }
    pass(format!("curated {curated_found}/{}, random {random}: {found} witnessed, {exhausted} exhausted", curated.len()))
}

fn a5() -> Outcome {
    let kind = KKind::prime_field(2).unwrap();
    let mut total = 0;
    let mut positive = 0;
    for f in enumerate_polys(kind, 2, 4).unwrap() {
        if f.is_zero() {
            continue;
        }
        total += 1;
        let truth = irreducible_factors_trial(&f, 4).unwrap().expect("degree 4 factors within bound 4");
        let expected = truth.iter().all(|(q, k)| *k == 1 && !in_b(q));
        let got = is_squarefree_and_bfree(&f).unwrap();
        if got != expected {
            return fail(format!("{}: got {got}, trial division says {expected}", show(&[f])));
        }
        positive += got as usize;
    }
    pass(format!("{total} nonzero polynomials, {positive} square-free and B-free"))
}

fn random_tuple(rng: &mut ChaCha8Rng) -> Vec<MPoly> {
    let r = ring(rng.gen_range(2..=3), false, rng.gen_range(1..=3));
    let m = rng.gen_range(1..=r.arity().min(2));
    (0..m).map(|_| random_poly(rng, r, 3, 3)).collect()
}

fn a6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut independent = 0;
    for _ in 0..240 {
        let fs = random_tuple(&mut rng);
        let sm = structure_matrix(fs[0].ring(), &fs).unwrap();
        let by_rank = sm.rank().unwrap() == sm.cols();
        let by_dgcd = !dgcd(&fs).unwrap().is_zero();
        if by_rank != by_dgcd {
            return fail(format!("rank says {by_rank}, dgcd says {by_dgcd}: {}", show(&fs)));
        }
        independent += by_rank as usize;
    }
    pass(format!("240 tuples, {independent} independent"))
}

fn a7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let (p, t, n) = CONFIGS[rng.gen_range(0..CONFIGS.len())];
        let r = ring(p, t, n);
        let m = rng.gen_range(1..=n);
        let fs: Vec<MPoly> = (0..m).map(|_| random_poly(&mut rng, r, 3, 3)).collect();
        let sets = column_sets(n, m);
        let cols = &sets[rng.gen_range(0..sets.len())];
        let i = rng.gen_range(0..m);
        let d = jacobian_derivation(&fs, i, cols).unwrap();
        let want = minor(&fs, cols).unwrap();
        for (j, f) in fs.iter().enumerate() {
            let got = d.apply(f).unwrap();
            if (j == i && got != want) || (j != i && !got.is_zero()) {
                return fail(format!("derivation {i} on f{} with columns {cols:?}: {}", j + 1, show(&fs)));
            }
        }
    }
    pass("200 (fs, i, cols) triples")
}

fn a8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut shared = 0;
    for _ in 0..100 {
        let s = shift_setup(&mut rng);
        shared += !s.b.gcd(&s.c).unwrap().is_unit() as usize;
        let c2 = match shift_to_coprime(&s.f, &s.b, &s.c, &s.g, s.eps) {
            Ok(c2) => c2,
            Err(e) => return fail(format!("shift failed: {e}")),
        };
        let ok = (&(&s.b * &s.f) + &c2).divisible_by(&s.g.pow(s.eps)) && s.b.gcd(&c2).unwrap().is_unit() && in_b(&(&c2 - &s.c));
        if !ok {
            return fail(format!("postconditions fail for b = {}, c = {}", show(&[s.b]), show(&[s.c])));
        }
    }
    pass(format!("100 setups, {shared} with gcd(b, c) nontrivial"))
}

fn a9() -> Outcome {
    const N: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pick = |rng: &mut ChaCha8Rng| {
        let (p, t, n) = CONFIGS[rng.gen_range(0..CONFIGS.len())];
        ring(p, t, n)
    };
    for _ in 0..N {
        let r = pick(&mut rng);
        let (a, b) = (random_poly(&mut rng, r, 3, 3), random_poly(&mut rng, r, 3, 3));
        let g = a.gcd(&b).unwrap();
        let ok = a.divisible_by(&g)
            && b.divisible_by(&g)
            && g.normalized() == g
            && (g.is_zero() || {
                let (a1, b1) = (a.exact_div(&g).unwrap().unwrap(), b.exact_div(&g).unwrap().unwrap());
                a1.gcd(&b1).unwrap().is_unit()
            });
        if !ok {
            return fail(format!("gcd contract: {}", show(&[a, b])));
        }
    }
    for _ in 0..N {
        let r = pick(&mut rng);
        let (f, g) = (random_poly(&mut rng, r, 3, 4), random_poly(&mut rng, r, 3, 4));
        for i in 0..r.arity() {
            let d = |h: &MPoly| h.partial_derivative(i).unwrap();
            if d(&(&f * &g)) != &(&f * &d(&g)) + &(&g * &d(&f)) {
                return fail(format!("Leibniz: {}", show(&[f, g])));
            }
        }
    }
    for _ in 0..N {
        let r = pick(&mut rng);
        let f = random_poly(&mut rng, r, 3, 4).pow(r.p());
        if !(0..r.arity()).all(|i| f.partial_derivative(i).unwrap().is_zero()) || !in_b(&f) {
            return fail(format!("Frobenius kill: {}", show(&[f])));
        }
    }
    for _ in 0..N {
        let r = pick(&mut rng);
        let f = random_poly(&mut rng, r, 6, 6);
        if b_recompose(&b_decompose(&f)) != f {
            return fail(format!("B round trip: {}", show(&[f])));
        }
    }
    for _ in 0..N {
        let r = pick(&mut rng);
        let f = random_poly(&mut rng, r, 4, 5);
        let ctx = PolyContext::with_default_names(r.kind(), r.arity());
        let text = ctx.print(&f);
        if ctx.parse(&text).as_ref() != Ok(&f) {
            return fail(format!("parser round trip: {text}"));
        }
    }
    pass(format!("{N} samples each of gcd, Leibniz, Frobenius, B round trip, parser"))
}

fn a10() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_pbasis"))
            .args(["verify", "--seed", "42", "--format", "record"])
            .output()
            .expect("binary runs")
    };
    let (first, second) = (run(), run());
    if !first.status.success() {
        return fail(format!("verify exited with {:?}", first.status.code()));
    }
    if first.stdout.is_empty() || first.stdout != second.stdout {
        return fail("record output differs between runs");
    }
    let lines = first.stdout.iter().filter(|&&b| b == b'\n').count();
    pass(format!("{lines} identical record lines"))
}

fn main() {
    let mut failed = Vec::new();
    let mut report = |name: &str, elapsed: Duration, outcome: Outcome| {
        let limit = LIMITS.iter().find(|(n, _)| *n == name).unwrap().1;
        let in_time = elapsed <= Duration::from_secs(limit);
        let ok = outcome.ok && in_time;
        println!(
            "{name:<4} {} {:>7.2}s (limit {limit}s)  {}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            outcome.detail
        );
        if !ok {
            failed.push(name.to_string());
        }
    };
    let timed = |f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = f();
        (start.elapsed(), o)
    };

    let (e, o) = timed(&a1);
    report("A1", e, o);
    let (e, o) = timed(&a2);
    report("A2", e, o);
    let start = Instant::now();
    let reports = a3_reports();
    let o = a3(&reports);
    report("A3", start.elapsed(), o);
    let (e, o) = timed(&|| a4(&reports));
    report("A4", e, o);
    for (name, f) in [("A5", a5 as fn() -> Outcome), ("A6", a6), ("A7", a7), ("A8", a8), ("A9", a9), ("A10", a10)] {
        let (e, o) = timed(&f);
        report(name, e, o);
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all criteria passed");
}

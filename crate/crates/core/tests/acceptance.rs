//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines appear in order. The process
//! fails if any criterion outside `EXPECTED_FAILURES` fails, or if an expected
//! failure starts passing.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng as _;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use ghdlab::bits::{hamming_distance, BitString};
use ghdlab::bounds::{
    check_joker_inequality, corruption_lower_bound, ghd_joker_certificate, partition_slack_audit, slack,
    CorruptionCertificate, Rectangle, ScanSpec,
};
use ghdlab::cube::{half_weight_counterexample, CubeSet};
use ghdlab::cubexform::{cube_inequality_margin, distance_histogram_via_transform};
use ghdlab::error::Error;
use ghdlab::fraction::Fraction;
use ghdlab::gauss::{cosh_expectation_check, kl_to_gaussian_both, mc_correlation_bound, opposing_halfspaces, GaussSet};
use ghdlab::laws::binomial_tail_b;
use ghdlab::problem::GhdParams;
use ghdlab::protocols::{
    apply_reduction, error_by_distance_profile, estimate_error, exact_error, run_seeded, sampling_error_at_distance,
    sampling_protocol, trivial_protocol, ErrorSpec, Protocol, PublicCoins, Reduced, Reduction,
};
use ghdlab::rng::{derive_seed, stream_rng};
use ghdlab::stats::binomial_pmf;
use ghdlab::streams::{
    exact_f0, ghd_to_f0_stream, kmv_f0, kmv_size_for, separating_accuracy, streaming_to_protocol,
};

/// Criterion 3 asks for a tail constant that does not exist at n ≤ 24.
const EXPECTED_FAILURES: &[usize] = &[3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn brute_histogram(a: &CubeSet, b: &CubeSet) -> Vec<u64> {
    let mut counts = vec![0u64; a.n() + 1];
    let bm = b.members();
    for x in a.members() {
        for &y in &bm {
            counts[(x ^ y).count_ones() as usize] += 1;
        }
    }
    counts
}

fn cube_kernel_exactness() -> Outcome {
    let mut rng = stream_rng(1, 0);
    let mut cases = 0;
    for n in 1..=10 {
        for _ in 0..100 {
            let a = CubeSet::random(n, rng.random_range(0.05..0.95), &mut rng).unwrap();
            let b = CubeSet::random(n, rng.random_range(0.05..0.95), &mut rng).unwrap();
            let h = distance_histogram_via_transform(&a, &b).unwrap();
            if h.counts != brute_histogram(&a, &b) {
                return outcome(false, format!("mismatch at n={n}"));
            }
            cases += 1;
        }
    }
    outcome(true, format!("{cases} random pairs, n = 1..10, transform == pair enumeration"))
}

fn counterexample_sets() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [8, 16, 24] {
        let (a, b) = half_weight_counterexample(n).unwrap();
        for rho in [0.05, 0.2, 0.5, 0.9] {
            let r = cube_inequality_margin(&a, &b, rho, 0.0).unwrap();
            let expected = (1.0 - rho * rho).powf(n as f64 / 2.0);
            let rel = (r.lhs / r.xi0 - expected).abs() / expected;
            worst = worst.max(rel);
            if rel > 1e-9 || r.margin >= 0.0 {
                return outcome(false, format!("n={n} rho={rho}: rel err {rel:e}, margin {}", r.margin));
            }
        }
    }
    outcome(true, format!("n in {{8,16,24}}, 4 values of rho: max rel err {worst:.2e}, all margins < 0"))
}

fn positive_regime() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let mut rng = stream_rng(3, 0);
    for n in [16, 20, 24] {
        let tail = match binomial_tail_b(1.0 / 8.0, n) {
            Ok(t) => t,
            Err(e) => {
                pass = false;
                notes.push(format!("n={n}: {e}"));
                continue;
            }
        };
        let rho = 4.0 * tail.b / (n as f64).sqrt();
        for i in 0..50 {
            let a = CubeSet::random(n, rng.random_range(0.87..1.0), &mut rng).unwrap();
            let b = CubeSet::random(n, rng.random_range(0.87..1.0), &mut rng).unwrap();
            let r = cube_inequality_margin(&a, &b, rho, 1.0 / 3.0).unwrap();
            if r.margin < 0.0 {
                pass = false;
                notes.push(format!("n={n} pair {i}: margin {}", r.margin));
            }
        }
        notes.push(format!("n={n}: b={} ok on 50 pairs", tail.b));
    }
    outcome(pass, notes.join("; "))
}

fn certificate_arithmetic() -> Outcome {
    let mut cert = ghd_joker_certificate(1024, 1.0, 0.0).unwrap();
    for m in [32.0, 51.2, 102.4] {
        cert.m = m;
        let b = corruption_lower_bound(&cert).unwrap();
        let err = (b.bound - (m - 96f64.log2())).abs();
        let exact = b.two_pow_beta == Fraction::new(1, 96)
            && b.slack0 == Fraction::new(1, 48)
            && b.eps_prime == Fraction::new(1, 112);
        if err > 1e-12 || !exact {
            return outcome(false, format!("m={m}: bound {} (err {err:e}), 2^beta {:?}", b.bound, b.two_pow_beta));
        }
    }
    let at = |num, den| {
        let mut c: CorruptionCertificate = cert.clone();
        c.eps = Fraction::new(num, den);
        corruption_lower_bound(&c)
    };
    let rejects = matches!(at(1, 7), Err(Error::Infeasible(_))) && matches!(at(1, 6), Err(Error::Infeasible(_)));
    let accepts = at(1, 8).is_ok() && at(142, 1000).is_ok();
    outcome(rejects && accepts, format!("bound = m - log2(96) for m in {{32, 51.2, 102.4}}; eps >= 1/7 rejected: {rejects}"))
}

/// Random disjoint family: products of cells of random row and column
/// partitions, each kept with probability 0.7.
fn random_family(n: usize, rng: &mut impl rand::Rng) -> Vec<Rectangle> {
    let side = 1u64 << n;
    let (rg, cg) = (rng.random_range(1..6), rng.random_range(1..6));
    let assign = |groups: usize, rng: &mut dyn rand::RngCore| -> Vec<Vec<u64>> {
        let mut cells = vec![Vec::new(); groups];
        for z in 0..side {
            cells[(rng.next_u32() as usize) % groups].push(z);
        }
        cells.into_iter().filter(|c| !c.is_empty()).collect()
    };
    let rows = assign(rg, rng);
    let cols = assign(cg, rng);
    let mut out = Vec::new();
    for r in &rows {
        for c in &cols {
            if rng.random_bool(0.7) || out.is_empty() {
                let rs = CubeSet::from_members(n, r.iter().copied()).unwrap();
                let cs = CubeSet::from_members(n, c.iter().copied()).unwrap();
                out.push(Rectangle::new(rs, cs).unwrap());
            }
        }
    }
    out
}

fn pair_mass(n: usize, p: f64, d: usize) -> f64 {
    let keep = (1.0 + p) / 2.0;
    0.5f64.powi(n as i32) * keep.powi((n - d) as i32) * (1.0 - keep).powi(d as i32)
}

fn joker_slack_audit() -> Outcome {
    let mut rng = stream_rng(5, 0);
    let cert = ghd_joker_certificate(6, 0.5, 3.0).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let family = random_family(6, &mut rng);
        let audit = partition_slack_audit(&cert, &family).unwrap();
        worst = worst.max((audit.summed - audit.direct).abs());
    }
    if worst > 1e-12 {
        return outcome(false, format!("partition audit disagreement {worst:e}"));
    }
    let n = 3;
    let side = 1u64 << n;
    let mut scan_gap: f64 = 0.0;
    for (b, m) in [(0.1, 2.0), (0.25, 6.0), (0.4, 1.0)] {
        let cert = ghd_joker_certificate(n, b, m).unwrap();
        let rho = 4.0 * b / (n as f64).sqrt();
        let w: Vec<f64> = (0..side * side)
            .map(|i| {
                let d = ((i / side) ^ (i % side)).count_ones() as usize;
                0.5 * pair_mass(n, rho, d) - 2.0 / 3.0 * pair_mass(n, 0.0, d) + 0.5 * pair_mass(n, -rho, d)
            })
            .collect();
        let mut oracle = f64::INFINITY;
        for rows in 1u64..(1 << side) {
            for cols in 1u64..(1 << side) {
                let mut s = 0.0;
                for x in (0..side).filter(|x| rows >> x & 1 == 1) {
                    for y in (0..side).filter(|y| cols >> y & 1 == 1) {
                        s += w[(x * side + y) as usize];
                    }
                }
                oracle = oracle.min(s + 2f64.powf(-m));
            }
        }
        let report = check_joker_inequality(&cert, &ScanSpec::exhaustive(), n, 0).unwrap();
        let witness = slack(&cert, &report.worst_rectangle).unwrap();
        scan_gap = scan_gap.max((report.min_slack - oracle).abs()).max((witness - oracle).abs());
        if report.rectangles_examined != 255 * 255 {
            return outcome(false, "exhaustive scan skipped rectangles");
        }
    }
    outcome(
        scan_gap <= 1e-15,
        format!("100 families at n=6: max |summed - direct| {worst:.1e}; n=3 scan vs double loop: {scan_gap:.1e}"),
    )
}

fn cosh_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        for j in 0..20 {
            let alpha = -4.0 + 8.0 * i as f64 / 19.0;
            let z = -10.0 + 20.0 * j as f64 / 19.0;
            worst = worst.max(cosh_expectation_check(alpha, z, 128).unwrap().relative_error);
        }
    }
    outcome(worst <= 1e-9, format!("20x20 grid over |alpha| <= 4, |z| <= 10: max rel err {worst:.2e}"))
}

fn correlation_inequality() -> Outcome {
    let trials = 1_000_000;
    let mut min_upper = f64::INFINITY;
    let mut max_opposing: f64 = 0.0;
    let mut seed = 0;
    for n in [50, 100, 200] {
        let root = (n as f64).sqrt();
        let slab = GaussSet::SymmetricSlab { a: None, t: 1.0 };
        let tilted = GaussSet::SymmetricSlab { a: Some(vec![1.0, -1.0, 0.5]), t: 0.6 };
        let halfspaces = [
            GaussSet::Halfspace { a: vec![1.0], t: 0.5 },
            GaussSet::Halfspace { a: vec![1.0], t: 1.5 },
            GaussSet::Halfspace { a: vec![1.0, 1.0], t: -0.3 },
        ];
        for eta in [0.5 / root, 1.0 / root] {
            for a in [&slab, &tilted] {
                for b in &halfspaces {
                    seed += 1;
                    let r = mc_correlation_bound(a, b, n, eta, trials, seed).unwrap();
                    min_upper = min_upper.min(r.one_sided_ratio + r.one_sided_ci95);
                }
            }
        }
        let (a, b) = opposing_halfspaces(2.0);
        seed += 1;
        let r = mc_correlation_bound(&a, &b, n, 1.0 / root, trials, seed).unwrap();
        max_opposing = max_opposing.max(r.one_sided_ratio + r.one_sided_ci95);
    }
    outcome(
        min_upper >= 0.95 && max_opposing < 0.9,
        format!("slab vs halfspace: min(ratio + ci95) {min_upper:.4}; opposing t=2: max(ratio + ci95) {max_opposing:.4}"),
    )
}

fn kl_calibration() -> Outcome {
    use rand_distr::{Distribution, Normal};
    let cases = [(0.0, 1.0, 0.0), (1.0, 1.0, 0.5), (0.0, 2.0, (4.0 - 1.0 - 4f64.ln()) / 2.0)];
    let mut pass = true;
    let mut notes = Vec::new();
    for (i, (mean, sd, exact)) in cases.into_iter().enumerate() {
        let mut rng = stream_rng(8, i as u64);
        let law = Normal::new(mean, sd).unwrap();
        let x: Vec<f64> = (0..100_000).map(|_| law.sample(&mut rng)).collect();
        let c = kl_to_gaussian_both(&x).unwrap();
        for e in [c.binned, c.spacing] {
            let ok = if exact == 0.0 { e.value <= 0.01 } else { (e.value - exact).abs() <= 0.1 * exact };
            pass &= ok && e.pinsker.passes;
        }
        notes.push(format!("N({mean},{}): binned {:.4} spacing {:.4} (exact {exact:.4})", sd * sd, c.binned.value, c.spacing.value));
    }
    outcome(pass, notes.join("; "))
}

fn worst_exact_sampling_error(params: GhdParams, k: usize) -> f64 {
    let p = sampling_protocol(params, k).unwrap();
    let lo = params.last_zero_distance().unwrap();
    let hi = params.first_one_distance().unwrap();
    sampling_error_at_distance(&p, lo).max(sampling_error_at_distance(&p, hi))
}

/// Exact worst-case error of the sampling protocol at n = 6 from the library
/// and from enumerating all pairs and all k-subsets.
fn tiny_sampling_case(t: f64, g: f64, k: usize) -> (f64, f64) {
    let params = GhdParams::new(6, t, g).unwrap();
    let exact = exact_error(&sampling_protocol(params, k).unwrap(), &ErrorSpec::WorstCasePromise).unwrap();
    assert!(exact.exact);
    let subsets: Vec<u64> = (0u64..64).filter(|s| s.count_ones() as usize == k).collect();
    let threshold = k as f64 * t / 6.0;
    let mut oracle: f64 = 0.0;
    for x in 0u64..64 {
        for y in 0u64..64 {
            let d = f64::from((x ^ y).count_ones());
            let label_one = if d <= t - g {
                false
            } else if d > t + g {
                true
            } else {
                continue;
            };
            let wrong = subsets
                .iter()
                .filter(|&&s| (f64::from(((x ^ y) & s).count_ones()) > threshold) != label_one)
                .count();
            oracle = oracle.max(wrong as f64 / subsets.len() as f64);
        }
    }
    (exact.value, oracle)
}

fn sampling_protocol_error() -> Outcome {
    let params = GhdParams::new(1000, 500.0, 100.0).unwrap();
    let stated = (18.0 * 1000f64.powi(2) / 100f64.powi(2)).ceil() as usize;
    let k = stated.min(params.n);
    let p = sampling_protocol(params, k).unwrap();
    let at_stated = estimate_error(&p, &ErrorSpec::WorstCasePromise, 10_000, 9).unwrap();
    let calibrated = (1..=params.n).find(|&k| worst_exact_sampling_error(params, k) <= 1.0 / 3.0).unwrap();
    let pc = sampling_protocol(params, calibrated).unwrap();
    let at_calibrated = estimate_error(&pc, &ErrorSpec::WorstCasePromise, 10_000, 10).unwrap();
    let mc_ok = at_stated.value - at_stated.ci95 <= 1.0 / 3.0 && at_calibrated.value - at_calibrated.ci95 <= 1.0 / 3.0;

    // The stated tiny case has zero error everywhere; a narrower gap adds one
    // where the enumeration is not trivial.
    let (exact, oracle) = tiny_sampling_case(3.0, 2.0, 4);
    let (exact_narrow, oracle_narrow) = tiny_sampling_case(3.0, 1.0, 3);
    let tiny_ok = exact == oracle && exact_narrow == oracle_narrow && oracle_narrow > 0.0;
    outcome(
        mc_ok && tiny_ok,
        format!(
            "n=1000 g=100: k=min(n, {stated})={k} error {:.4} +- {:.4}; calibrated k={calibrated} error {:.4} +- {:.4}; n=6: g=2 k=4 exact {exact} vs oracle {oracle}, g=1 k=3 exact {exact_narrow} vs oracle {oracle_narrow}",
            at_stated.value, at_stated.ci95, at_calibrated.value, at_calibrated.ci95
        ),
    )
}

fn trivial(n: usize, t: f64) -> Arc<dyn Protocol> {
    Arc::new(trivial_protocol(GhdParams::new(n, t, 0.0).unwrap()))
}

fn transformed_distance(r: &Reduced, x: &BitString, y: &BitString, seed: u64) -> usize {
    let (a, b) = r.transform_inputs(x, y, &PublicCoins::Seeded(seed)).unwrap();
    hamming_distance(&a, &b).unwrap()
}

fn reduction_toolkit() -> Outcome {
    const MAX_N: usize = 48;
    let build = |f: &dyn Fn(usize) -> Reduced| (1..=MAX_N).map(f).collect::<Vec<_>>();
    let repeat = build(&|n| apply_reduction(Reduction::Repeat { k: 3 }, trivial(3 * n, 1.5 * n as f64)).unwrap());
    let pad = build(&|n| apply_reduction(Reduction::Pad { offset: 4, filler: 3 }, trivial(n + 7, 4.0)).unwrap());
    let comp = build(&|n| apply_reduction(Reduction::Complement, trivial(n, n as f64 / 2.0)).unwrap());
    let rnd = build(&|n| apply_reduction(Reduction::RandomizeUniform, trivial(n, n as f64 / 2.0)).unwrap());
    let gis = build(&|n| apply_reduction(Reduction::GisEncode, trivial(3 * n, n as f64)).unwrap());
    let mut rng = stream_rng(10, 0);
    let mut violations = [0u64; 5];
    for i in 0..100_000u64 {
        let n = rng.random_range(1..=MAX_N);
        let x = BitString::random(n, &mut rng);
        let y = BitString::random(n, &mut rng);
        let d = hamming_distance(&x, &y).unwrap();
        let inter = x.and(&y).unwrap().weight();
        let checks = [
            transformed_distance(&repeat[n - 1], &x, &y, i) == 3 * d,
            transformed_distance(&pad[n - 1], &x, &y, i) == d + 4,
            transformed_distance(&comp[n - 1], &x, &y, i) == n - d,
            transformed_distance(&rnd[n - 1], &x, &y, i) == d,
            transformed_distance(&gis[n - 1], &x, &y, i) == 2 * n - 2 * inter && 2 * inter == x.weight() + y.weight() - d,
        ];
        for (v, ok) in violations.iter_mut().zip(checks) {
            *v += u64::from(!ok);
        }
    }
    let laws_ok = violations.iter().all(|&v| v == 0);

    // Uniformity of randomize_uniform over pairs at each distance, n = 6.
    let n = 6;
    let r = &rnd[n - 1];
    let mut min_p: f64 = 1.0;
    for d in 0..=n {
        let x = BitString::random(n, &mut rng);
        let mut y = x.clone();
        (0..d).for_each(|i| y.flip(i));
        let cells = 64 * ghdlab::stats::choose(6, d as u64) as usize;
        let draws = 50 * cells as u64;
        let mut counts = vec![0u64; 64 * 64];
        for s in 0..draws {
            let (a, b) = r.transform_inputs(&x, &y, &PublicCoins::Seeded(derive_seed(100 + d as u64, s))).unwrap();
            counts[(a.as_u64() * 64 + b.as_u64()) as usize] += 1;
        }
        let expected = draws as f64 / cells as f64;
        let mut chi2 = 0.0;
        for (i, &c) in counts.iter().enumerate() {
            let at_d = ((i as u64 / 64) ^ (i as u64 % 64)).count_ones() as usize == d;
            if !at_d && c > 0 {
                return outcome(false, format!("randomize_uniform left distance class {d}"));
            }
            if at_d {
                chi2 += (c as f64 - expected).powi(2) / expected;
            }
        }
        let p = ChiSquared::new((cells - 1) as f64).unwrap().sf(chi2);
        min_p = min_p.min(p);
    }
    outcome(
        laws_ok && min_p > 0.001,
        format!("violations [repeat, pad, complement, randomize, gis] = {violations:?} over 1e5 inputs; min chi-square p {min_p:.4}"),
    )
}

/// Largest n whose F0 identity is checked on all `4^n` pairs; see below.
const F0_EXHAUSTIVE_N: usize = 12;

fn streaming_reduction() -> Outcome {
    let mut bad = 0u64;
    let mut pairs = 0u64;
    for n in 1..=F0_EXHAUSTIVE_N {
        for xv in 0u64..1 << n {
            let x = BitString::from_u64(xv, n);
            for yv in 0u64..1 << n {
                let y = BitString::from_u64(yv, n);
                let (a, b) = ghd_to_f0_stream(&x, &y).unwrap();
                let f0 = exact_f0(&[a, b].concat());
                bad += u64::from(f0 != n + (xv ^ yv).count_ones() as usize);
                pairs += 1;
            }
        }
    }
    // Beyond the exhaustive range: random pairs up to n = 2048.
    let mut rng = stream_rng(11, 0);
    for _ in 0..100_000 {
        let n = rng.random_range(F0_EXHAUSTIVE_N + 1..=2048);
        let x = BitString::random(n, &mut rng);
        let y = BitString::random(n, &mut rng);
        let (a, b) = ghd_to_f0_stream(&x, &y).unwrap();
        bad += u64::from(exact_f0(&[a, b].concat()) != n + hamming_distance(&x, &y).unwrap());
    }

    let small = GhdParams::standard(64).unwrap();
    let mut accounting_ok = true;
    for passes in 1..=3 {
        let (proto, acc) = streaming_to_protocol(&kmv_f0(32).unwrap(), passes, small).unwrap();
        let mut rng = stream_rng(12, passes as u64);
        for seed in 0..50 {
            let x = BitString::random(64, &mut rng);
            let y = BitString::random(64, &mut rng);
            let (_, t) = run_seeded(&proto, &x, &y, seed).unwrap();
            accounting_ok &= t.total_bits == (2 * passes - 1) * acc.state_bits
                && acc.total_bits == t.total_bits
                && t.messages.len() == 2 * passes - 1;
        }
    }

    let params = GhdParams::standard(1024).unwrap();
    let eps = separating_accuracy(&params);
    let k = kmv_size_for(eps);
    let (proto, _) = streaming_to_protocol(&kmv_f0(k).unwrap(), 1, params).unwrap();
    let e = estimate_error(&proto, &ErrorSpec::WorstCasePromise, 200, 13).unwrap();
    outcome(
        bad == 0 && accounting_ok && e.value <= 1.0 / 3.0,
        format!(
            "F0 identity on all pairs n <= {F0_EXHAUSTIVE_N} ({pairs} pairs) + 1e5 random pairs: {bad} violations; (2p-1)S accounting: {accounting_ok}; n=1024 eps_F0={eps:.5} k={k}: error {:.4}",
            e.value
        ),
    )
}

fn profile_consistency() -> Outcome {
    let params = GhdParams::standard(64).unwrap();
    let p = sampling_protocol(params, 16).unwrap();
    let profile = error_by_distance_profile(&p, 20_000, 14).unwrap();
    let (mixed, mixed_ci) = profile.mix_profile(&binomial_pmf(64, 0.5)).unwrap();
    let direct = estimate_error(&p, &ErrorSpec::Xi { p: 0.0 }, 1_000_000, 15).unwrap();
    let combined = mixed_ci.hypot(direct.ci95);
    outcome(
        (mixed - direct.value).abs() <= combined,
        format!("n=64 k=16: profile mix {mixed:.5} vs direct {:.5}, |diff| {:.5} <= {combined:.5}", direct.value, (mixed - direct.value).abs()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("cube kernel exactness", cube_kernel_exactness),
        ("half-weight counterexample", counterexample_sets),
        ("cube inequality, positive regime", positive_regime),
        ("corruption bound arithmetic", certificate_arithmetic),
        ("joker slack audit", joker_slack_audit),
        ("cosh identity", cosh_identity),
        ("Gaussian correlation inequality", correlation_inequality),
        ("KL estimator calibration", kl_calibration),
        ("sampling protocol error", sampling_protocol_error),
        ("reduction toolkit", reduction_toolkit),
        ("streaming reduction", streaming_reduction),
        ("per-distance profile consistency", profile_consistency),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {id:>2} {name} [{:.1}s]: {}", start.elapsed().as_secs_f64(), o.detail);
        if o.pass == EXPECTED_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all outcomes as expected (expected failures: {EXPECTED_FAILURES:?})");
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}

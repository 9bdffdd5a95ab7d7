use std::process::ExitCode;
use std::time::{Duration, Instant};

use gmseries::beta::{BetaSpec, DEFAULT_B6_HORIZON};
use gmseries::experiments::{
    default_embedding_cases, pow2_grid, run_embedding_suite, run_remark5, run_remark6, run_theorem4_suite, Sequential,
    CRITERION_HORIZON, DEFAULT_SCAN_HORIZON,
};
use gmseries::fit::{loglog_fit, TrendPolicy};
use gmseries::lnorm::{l1_norm, partial_sum_norm, sn_f_gap, FnIntegrand, QuadratureSpec, DEFAULT_TAIL_HORIZON};
use gmseries::math::singular_distance;
use gmseries::sequences::{CoefficientSequence, SeriesKind};
use gmseries::summation::{abel_block_sum, direct_block_sum, BlockSumRequest};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use std::f64::consts::PI;

struct Outcome {
    passed: bool,
    detail: String,
}

fn report(id: u32, name: &str, took: Duration, o: &Outcome) -> bool {
    let tag = if o.passed { "PASS" } else { "FAIL" };
    println!("AC{id} {tag} {name} ({:.1}s): {}", took.as_secs_f64(), o.detail);
    o.passed
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let gens = [
        CoefficientSequence::harmonic(),
        CoefficientSequence::inv_log(2.0).unwrap(),
        CoefficientSequence::power(0.5).unwrap(),
        CoefficientSequence::remark5_cos(),
        CoefficientSequence::remark5_sin(),
        CoefficientSequence::remark6(3).unwrap(),
        CoefficientSequence::geometric(0.999).unwrap(),
    ];
    let steps = [1u64, 2, 3, 5, 7];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut worst, mut failures) = (0.0f64, 0);
    for case in 0..500 {
        let seq = &gens[case % gens.len()];
        let r = steps[(case / gens.len()) % steps.len()];
        let kind = if case % 2 == 0 { SeriesKind::Cosine } else { SeriesKind::Sine };
        let n = rng.random_range(1..=10_000u64);
        let m = rng.random_range(n..=10_000u64);
        let x = loop {
            let x = rng.random_range(-PI..PI);
            if singular_distance(x, r) > 1e-3 {
                break x;
            }
        };
        let req = BlockSumRequest::new(seq, kind, n, m, r, x);
        let d = direct_block_sum(&req).unwrap().value;
        let a = abel_block_sum(&req).unwrap().value;
        let rel = (a - d).norm() / (1.0 + d.norm());
        worst = worst.max(rel);
        if rel > 1e-10 {
            failures += 1;
        }
    }
    let t = start.elapsed();
    Outcome {
        passed: failures == 0 && t.as_secs_f64() <= 60.0,
        detail: format!("500 cases, {failures} over 1e-10, worst scaled error {worst:.2e}"),
    }
}

fn ac2() -> Outcome {
    let grid = pow2_grid(4, 12);
    let rep = run_remark6(3, &grid, &BetaSpec::b6(2.0, DEFAULT_B6_HORIZON), &BetaSpec::b5(2.0), DEFAULT_SCAN_HORIZON, &TrendPolicy::default())
        .unwrap();
    let lower = grid.iter().zip(&rep.lower_bound).all(|(&n, row)| row.block_variation >= 1.0 / (12.0 * n as f64));
    let xs: Vec<f64> = grid.iter().map(|&n| n as f64).collect();
    let slope = loglog_fit(&xs, &rep.gm.ratios).map(|f| f.slope).unwrap_or(f64::NAN);
    let (c_lo, c_hi) = rep.rbvs_top_decade_c.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), c| (lo.min(*c), hi.max(*c)));
    let rbvs_ok = rep.rbvs.verdict == gmseries::classes::Verdict::Consistent && c_hi <= 1.1 * c_lo;
    Outcome {
        passed: lower && slope >= 0.8 && rbvs_ok,
        detail: format!(
            "block variation >= 1/(12n): {lower}; GM(b6,2) ratio slope {slope:.3}; RBVS(b5,3) {:?} with top-decade C in [{c_lo:.4}, {c_hi:.4}]",
            rep.rbvs.verdict
        ),
    }
}

fn ac3() -> Outcome {
    let rep = run_remark5(SeriesKind::Cosine, 50, 5000, &[500, 5_000, 500_000], &QuadratureSpec::new(1e-6)).unwrap();
    let gap_ok = rep.gap.value >= rep.lower_bound - 1e-6;
    let incs: Vec<f64> = rep.growth.iter().filter_map(|g| g.increment).collect();
    let devs: Vec<f64> = rep.growth.iter().filter_map(|g| g.relative_deviation).collect();
    let inc_ok = incs.iter().all(|d| *d > 0.0);
    let dev_ok = devs.iter().all(|d| *d <= 0.15);
    Outcome {
        passed: gap_ok && inc_ok && dev_ok,
        detail: format!(
            "gap {:.6} vs lower bound {:.6}; increments {incs:.4?}; deviations from ln ln ln prediction {devs:.3?}",
            rep.gap.value, rep.lower_bound
        ),
    }
}

fn ac4() -> Outcome {
    let seq = CoefficientSequence::remark6(3).unwrap();
    let grid = pow2_grid(4, 9);
    let rep = run_theorem4_suite(
        &seq,
        SeriesKind::Cosine,
        3,
        &BetaSpec::b5(2.0),
        &grid,
        &QuadratureSpec::new(1e-6),
        DEFAULT_TAIL_HORIZON,
        &TrendPolicy::default(),
        &Sequential,
    )
    .unwrap();
    let values: Vec<f64> = rep.norms.iter().map(|r| r.value).collect();
    let after: Vec<f64> = grid.iter().zip(&values).filter(|(n, _)| **n >= 32).map(|(_, v)| *v).collect();
    let decreasing = after.windows(2).all(|w| w[1] < w[0]);
    Outcome {
        passed: decreasing && rep.ratio_spread < 3.0,
        detail: format!("values {:?}; ratios {:.3?}; spread {:.3}", values.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>(), rep.ratios, rep.ratio_spread),
    }
}

fn ac5() -> Outcome {
    let start = Instant::now();
    let spec = QuadratureSpec::new(1e-6);
    let gap = |seq: &CoefficientSequence, n: u64, horizon: u64| sn_f_gap(seq, SeriesKind::Cosine, n, 1, &spec, horizon).unwrap();
    let h = CoefficientSequence::harmonic();
    let (h16, h4096) = (gap(&h, 16, DEFAULT_TAIL_HORIZON), gap(&h, 4096, DEFAULT_TAIL_HORIZON));
    let l = CoefficientSequence::inv_log(2.0).unwrap();
    let (l16, l4096) = (gap(&l, 16, CRITERION_HORIZON), gap(&l, 4096, CRITERION_HORIZON));
    let hr = h4096.value / h16.value;
    let lr = l4096.value / l16.value;
    let truncated = l16.flags.iter().chain(&l4096.flags).any(|f| f.code == "excluded_mass_unbounded");
    let errors_ok = [&h16, &h4096, &l16, &l4096].iter().all(|r| r.error_estimate <= 1e-6);
    let t = start.elapsed();
    Outcome {
        passed: hr < 0.25 && lr > 0.6 && errors_ok && t.as_secs_f64() <= 600.0,
        detail: format!(
            "1/n: {:.4e} -> {:.4e} (ratio {hr:.4}); 1/ln(n+2): {:.4} -> {:.4} (ratio {lr:.4}{}); error estimates within 1e-6: {errors_ok}",
            h16.value,
            h4096.value,
            l16.value,
            l4096.value,
            if truncated { format!(", outside |x - 2kpi| < {:.1e}", l16.epsilon) } else { String::new() }
        ),
    }
}

fn ac6() -> Outcome {
    let rep = run_embedding_suite(&default_embedding_cases(), DEFAULT_SCAN_HORIZON).unwrap();
    let points: usize = rep.cases.iter().map(|c| c.chain.rows.iter().map(|r| r.links.len()).sum::<usize>() + c.chain.summary.len()).sum();
    let failing: Vec<String> =
        rep.cases.iter().filter(|c| !c.chain.all_hold).map(|c| format!("{} {}", c.sequence, c.chain.inclusion)).collect();
    Outcome {
        passed: rep.all_hold,
        detail: format!("{} cases, {points} inequalities, failing: {failing:?}", rep.cases.len()),
    }
}

fn dense(f: &dyn Fn(f64) -> f64, n: usize) -> f64 {
    let h = 2.0 * PI / n as f64;
    let mut acc = 0.0;
    let mut c = 0.0;
    for i in 0..n {
        let y = f(-PI + (i as f64 + 0.5) * h).abs() - c;
        let t = acc + y;
        c = (t - acc) - y;
        acc = t;
    }
    acc / n as f64
}

fn ac7() -> Outcome {
    let s3 = CoefficientSequence::explicit(vec![0.0, 0.0, 1.0]).unwrap();
    let single = partial_sum_norm(&s3, SeriesKind::Sine, 3, &QuadratureSpec::new(1e-10)).unwrap().value;
    let single_err = (single - 2.0 / PI).abs();

    type F = Box<dyn Fn(f64) -> f64 + Send + Sync>;
    let dirichlet = |n: u32| move |x: f64| 0.5 + (1..=n).map(|k| (k as f64 * x).cos()).sum::<f64>();
    let fejer = |n: u32| move |x: f64| (0..=n).map(|k| (1.0 - k as f64 / (n as f64 + 1.0)) * (k as f64 * x).cos() * if k == 0 { 0.5 } else { 1.0 }).sum::<f64>();
    let integrands: Vec<(&str, F)> = vec![
        ("sin x", Box::new(|x: f64| x.sin())),
        ("sin 7x", Box::new(|x: f64| (7.0 * x).sin())),
        ("cos 40x", Box::new(|x: f64| (40.0 * x).cos())),
        ("cos x - 0.3", Box::new(|x: f64| x.cos() - 0.3)),
        ("sin x + 0.5 sin 2x", Box::new(|x: f64| x.sin() + 0.5 * (2.0 * x).sin())),
        ("D_8", Box::new(dirichlet(8))),
        ("D_33", Box::new(dirichlet(33))),
        ("Fejer F_10", Box::new(fejer(10))),
        ("exp(cos x) - 1.2", Box::new(|x: f64| x.cos().exp() - 1.2)),
        ("1/(2 + cos x) - 0.6", Box::new(|x: f64| 1.0 / (2.0 + x.cos()) - 0.6)),
        ("x", Box::new(|x: f64| x)),
        ("|x| - 1", Box::new(|x: f64| x.abs() - 1.0)),
        ("x^2 - 2", Box::new(|x: f64| x * x - 2.0)),
        ("sqrt|x| - 1", Box::new(|x: f64| x.abs().sqrt() - 1.0)),
        ("ln(2 + sin x) - 0.7", Box::new(|x: f64| (2.0 + x.sin()).ln() - 0.7)),
        ("sin x cos 5x", Box::new(|x: f64| x.sin() * (5.0 * x).cos())),
        ("cos x + cos 3x/3 + cos 5x/5", Box::new(|x: f64| x.cos() + (3.0 * x).cos() / 3.0 + (5.0 * x).cos() / 5.0)),
        ("sign(sin x) sqrt|sin x|", Box::new(|x: f64| x.sin().signum() * x.sin().abs().sqrt())),
        ("cos(x + 0.4) - 0.1 sin 9x", Box::new(|x: f64| (x + 0.4).cos() - 0.1 * (9.0 * x).sin())),
        ("harmonic S_20", Box::new(|x: f64| (1..=20).map(|k| (k as f64 * x).cos() / k as f64).sum::<f64>())),
    ];
    let mut worst = (0.0f64, "");
    for (name, f) in &integrands {
        let q = l1_norm(&FnIntegrand::new(|x| f(x)), &QuadratureSpec::new(1e-9)).unwrap().value;
        let d = (q - dense(f.as_ref(), 1_000_000)).abs();
        if d > worst.0 {
            worst = (d, name);
        }
    }
    Outcome {
        passed: single_err <= 1e-8 && worst.0 <= 1e-6,
        detail: format!(
            "|single harmonic - 2/pi| = {single_err:.2e}; {} integrands, worst deviation from the 1e6-point oracle {:.2e} ({})",
            integrands.len(),
            worst.0,
            worst.1
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 7] = [
        (1, "Abel identity suite", ac1),
        (2, "Remark 6 reproduction", ac2),
        (3, "Remark 5 mechanism", ac3),
        (4, "Theorem 4 consistency", ac4),
        (5, "criterion contrast", ac5),
        (6, "embedding chains", ac6),
        (7, "norm engine oracle", ac7),
    ];
    let mut all = true;
    for (id, name, f) in criteria {
        let start = Instant::now();
        let o = f();
        all &= report(id, name, start.elapsed(), &o);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use treecut::cutting::planted_cut;
use treecut::excursion::bridge_transform;
use treecut::fragmentation::{first_span_cut_check, fragment, mass_integral};
use treecut::oracle::{exact_cut_minus_k_law, exact_spanned_edges_law, run_check, CutMode};
use treecut::samplers::{sample_cayley, sample_conditioned_gw, OffspringLaw};
use treecut::stats::{
    ks_distance, moment_check, EmpiricalDistribution, ReferenceLaw, CHI_SQUARE_ALPHA, KS_THRESHOLD,
    KS_THRESHOLD_GW, MOMENT_TOLERANCE,
};
use treecut::RngStream;

type Verdict = (bool, String);

fn exact(checks: &[(&str, usize, usize)]) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for &(name, n, k) in checks {
        match run_check(name, n, k) {
            Ok(c) => {
                ok &= c.passed();
                parts.push(format!("{name}(n={n},k={k}) tv={}", c.tv));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{name}(n={n},k={k}) error: {e}"));
            }
        }
    }
    (ok, parts.join("; "))
}

fn key() -> Verdict {
    exact(&[("key", 2, 0), ("key", 3, 0), ("key", 4, 0)])
}

fn forest() -> Verdict {
    exact(&[("forest", 1, 0), ("forest", 2, 0), ("forest", 3, 0), ("forest", 4, 0)])
}

fn reverse() -> Verdict {
    exact(&[("reverse", 3, 0)])
}

fn kcoup() -> Verdict {
    // both counts must match: M of planted cutting and M_k of ordered cutting
    let mut ok = true;
    let mut worst = [BigRational::zero(), BigRational::zero()];
    for n in 1..=5 {
        for k in 1..=2 {
            let spanned = exact_spanned_edges_law(n, k).unwrap();
            for (slot, mode) in [CutMode::Planted, CutMode::Ordered].into_iter().enumerate() {
                let tv = exact_cut_minus_k_law(n, k, mode).unwrap().tv(&spanned);
                ok &= tv.is_zero();
                if tv > worst[slot] {
                    worst[slot] = tv;
                }
            }
        }
    }
    (ok, format!("max tv planted={} ordered={}", worst[0], worst[1]))
}

fn reorder() -> Verdict {
    let mut cases = Vec::new();
    for n in 1..=4 {
        for k in 1..=2 {
            cases.push(("reorder", n, k));
        }
    }
    exact(&cases)
}

fn records() -> Verdict {
    exact(&[("records", 1, 0), ("records", 2, 0), ("records", 3, 0), ("records", 4, 0), ("records", 5, 0)])
}

fn fit(samples: Vec<f64>, law: &ReferenceLaw, ks_max: f64, moments: bool) -> Verdict {
    let emp = EmpiricalDistribution::new(samples).unwrap();
    let ks = ks_distance(&emp, law);
    let mut ok = ks < ks_max;
    let mut s = format!("{} ks={ks:.4}", law.name());
    if moments {
        for order in 1..=2 {
            let err = moment_check(&emp, law, order).unwrap();
            ok &= err < MOMENT_TOLERANCE;
            s.push_str(&format!(" m{order}_err={err:.4}"));
        }
    }
    (ok, s)
}

fn planted_chi() -> Verdict {
    let n = 10_000;
    let reps = 10_000u64;
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 1..=3usize {
        let xs: Vec<f64> = (0..reps)
            .into_par_iter()
            .map(|r| {
                let mut rng = RngStream::new(6_000 + k as u64, r);
                let t = sample_cayley(n, &mut rng).unwrap();
                let attach: Vec<usize> = (0..k).map(|_| rng.below(n)).collect();
                planted_cut(&t, &attach, &mut rng).unwrap().m() as f64 / (n as f64).sqrt()
            })
            .collect();
        let (pass, s) = fit(xs, &ReferenceLaw::chi2k(k as u32), KS_THRESHOLD, true);
        ok &= pass;
        parts.push(s);
    }
    (ok, parts.join("; "))
}

fn rayleigh_fragmentation() -> Verdict {
    let n = 1_000;
    let runs: Vec<(f64, f64)> = (0..10_000u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(7_000, r);
            let t = sample_cayley(n, &mut rng).unwrap();
            let trace = fragment(&t, 1.0, &mut rng, None).unwrap();
            let (lambda, _) = mass_integral(&trace).unwrap();
            (lambda, trace.kappa() as f64 / (n as f64).sqrt())
        })
        .collect();
    let law = ReferenceLaw::rayleigh();
    let (a, sa) = fit(runs.iter().map(|x| x.0).collect(), &law, KS_THRESHOLD, false);
    let (b, sb) = fit(runs.iter().map(|x| x.1).collect(), &law, KS_THRESHOLD, false);
    (a && b, format!("Lambda: {sa}; kappa/sqrt(n): {sb}"))
}

fn sup_gap() -> Verdict {
    let mut medians = Vec::new();
    for (j, n) in [100usize, 1_000, 10_000].into_iter().enumerate() {
        let gaps: Vec<f64> = (0..100u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = RngStream::new(8_000 + j as u64, r);
                let t = sample_cayley(n, &mut rng).unwrap();
                fragment(&t, 1.0, &mut rng, None).unwrap().sup_gap()
            })
            .collect();
        medians.push(EmpiricalDistribution::new(gaps).unwrap().median());
    }
    let ok = medians.windows(2).all(|w| w[1] < w[0]);
    (ok, format!("medians {:.4} > {:.4} > {:.4}", medians[0], medians[1], medians[2]))
}

fn gw_rayleigh() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (j, (spec, n)) in [("geom:1/2", 10_000usize), ("binary:1/2", 10_001)].into_iter().enumerate() {
        let law: OffspringLaw = spec.parse().unwrap();
        let sigma = law.sigma().unwrap();
        let xs: Vec<f64> = (0..10_000u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = RngStream::new(9_000 + j as u64, r);
                let t = sample_conditioned_gw(&law, n, &mut rng).unwrap();
                let kappa = fragment(&t, sigma, &mut rng, None).unwrap().kappa();
                kappa as f64 / (sigma * (n as f64).sqrt())
            })
            .collect();
        let (pass, s) = fit(xs, &ReferenceLaw::rayleigh(), KS_THRESHOLD_GW, false);
        ok &= pass;
        parts.push(format!("{spec} n={n} {s}"));
    }
    (ok, parts.join("; "))
}

fn span_cut() -> Verdict {
    let c = first_span_cut_check(4, 1, 11_000, 1_000_000).unwrap();
    (
        c.chi.passes(CHI_SQUARE_ALPHA),
        format!(
            "chi2={:.2} df={} p={:.4} root_first={}",
            c.chi.statistic, c.chi.df, c.chi.p_value, c.root_first
        ),
    )
}

fn excursion() -> Verdict {
    let n = 1_000;
    let violations: Vec<String> = (0..1_000u64)
        .into_par_iter()
        .filter_map(|r| {
            let mut rng = RngStream::new(12_000, r);
            let t = sample_cayley(n, &mut rng).unwrap();
            let trace = fragment(&t, 1.0, &mut rng, None).unwrap();
            let b = bridge_transform(&t, &trace).unwrap();
            if let Err(e) = b.check() {
                return Some(format!("run {r}: {e}"));
            }
            if b.excursion_count() != trace.kappa() {
                return Some(format!("run {r}: {} excursions, kappa {}", b.excursion_count(), trace.kappa()));
            }
            // piece sizes straight from the trace: mass lost at each effective cut
            let mut alive = n;
            let mut expect = Vec::new();
            for e in trace.effective_events() {
                expect.push(2 * (alive - e.alive_after - 1));
                alive = e.alive_after;
            }
            let mut got = b.excursion_lengths();
            got.sort_unstable();
            expect.sort_unstable();
            (got != expect).then(|| format!("run {r}: length multiset differs"))
        })
        .collect();
    let detail = match violations.first() {
        None => "1000 runs, 0 violations".to_string(),
        Some(v) => format!("{} violations, first: {v}", violations.len()),
    };
    (violations.is_empty(), detail)
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Verdict); 12] = [
        ("key: (T-hat, r) uniform, n=2..4, TV=0", Duration::from_secs(30), key),
        ("forest: forest law and reverse pushforward uniform, n<=4, TV=0", Duration::from_secs(30), forest),
        ("reverse: product attachment law, forests on [3], TV=0", Duration::from_secs(10), reverse),
        ("kcoup: M-k vs spanned edges, n<=5, k<=2, TV=0", Duration::from_secs(120), kcoup),
        ("reorder: ordered law = reordered planted law, n<=4, k<=2, TV=0", Duration::from_secs(120), reorder),
        ("planted cut M/sqrt(n) vs chi_k, n=1e4, 1e4 reps, KS<0.05, moments<5%", Duration::from_secs(300), planted_chi),
        ("fragmentation Lambda and kappa/sqrt(n) vs Rayleigh, n=1e3, 1e4 reps, KS<0.05", Duration::from_secs(300), rayleigh_fragmentation),
        ("sup gap median decreasing over n=1e2,1e3,1e4", Duration::from_secs(300), sup_gap),
        ("GW kappa/(sigma sqrt n) vs Rayleigh, 1e4 reps, KS<0.06", Duration::from_secs(600), gw_rayleigh),
        ("records: permutation law = dynamics law, n<=5, TV=0", Duration::from_secs(60), records),
        ("first cut in span uniform, n=4, k=1, 1e6 reps, p>1e-3", Duration::from_secs(120), span_cut),
        ("excursion invariants, 1e3 runs at n=1e3", Duration::from_secs(60), excursion),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run();
        let took = start.elapsed();
        let pass = ok && took <= *budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name} | {detail} | {:.1}s (budget {}s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

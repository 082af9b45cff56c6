//! Subcommand implementations. Vertices are printed 1-based.

use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use treecut::cutting::{ordered_cut, planted_cut, records_count};
use treecut::dynamics::{forest_to_tree, modified_dynamics, tree_to_forest};
use treecut::excursion::{attachment_marks, bridge_transform};
use treecut::fragmentation::{build_that_tree, fragment, mass_integral, FragmentationTrace};
use treecut::oracle::{run_check, CHECKS};
use treecut::samplers::{sample_cayley, sample_conditioned_gw, OffspringLaw};
use treecut::stats::{
    ks_distance, ks_two_sample, moment_check, EmpiricalDistribution, ReferenceLaw, KS_THRESHOLD,
    KS_THRESHOLD_GW, MOMENT_TOLERANCE,
};
use treecut::{OrderedForest, RngStream, RootedTree};

use crate::output::{RunInfo, Sink};
use crate::{
    Claim, Cli, Command, CutArgs, CutMode, DynamicsArgs, DynamicsEmit, ExcursionArgs, ExcursionEmit,
    FragmentArgs, FragmentEmit, Model, OracleArgs, SampleArgs, Status, VerifyArgs,
};

pub fn run(cli: &Cli, raw: &[String], argv: &[String]) -> Result<Status> {
    let run = RunInfo {
        raw: raw.to_vec(),
        argv: argv.to_vec(),
        seed: cli.global.seed,
        threads: cli.global.threads,
        out: cli.global.out.clone(),
        start: Instant::now(),
    };
    match &cli.command {
        Command::Sample(a) => sample(a, &run),
        Command::Cut(a) => cut(a, &run),
        Command::Dynamics(a) => dynamics(a, &run),
        Command::Fragment(a) => fragment_cmd(a, &run),
        Command::Excursion(a) => excursion(a, &run),
        Command::Oracle(a) => oracle(a, &run),
        Command::Verify(a) => verify(a, &run),
    }
}

/// Runs `f` for replicates `0..count` in parallel, in replicate order.
fn replicates<T, F>(seed: u64, count: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut RngStream) -> Result<T> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|r| f(r, &mut RngStream::new(seed, r)))
        .collect()
}

/// `table:FILE` reads the probabilities from a file (commas or whitespace).
fn parse_law(s: &str) -> Result<OffspringLaw> {
    if let Some(rest) = s.strip_prefix("table:") {
        let path = std::path::Path::new(rest);
        if path.is_file() {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {rest}"))?;
            let list: Vec<&str> = text
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|x| !x.is_empty())
                .collect();
            return Ok(format!("table:{}", list.join(",")).parse()?);
        }
    }
    Ok(s.parse()?)
}

enum Source {
    Cayley,
    Gw(OffspringLaw),
}

impl Source {
    fn new(law: &str, n: usize) -> Result<Self> {
        if n == 0 {
            bail!("--n must be at least 1");
        }
        if law == "cayley" {
            return Ok(Source::Cayley);
        }
        let law = parse_law(law)?;
        if !law.attainable(n) {
            bail!("a {law} tree cannot have exactly {n} vertices");
        }
        Ok(Source::Gw(law))
    }

    fn sample(&self, n: usize, rng: &mut RngStream) -> Result<RootedTree> {
        Ok(match self {
            Source::Cayley => sample_cayley(n, rng)?,
            Source::Gw(law) => sample_conditioned_gw(law, n, rng)?,
        })
    }

    fn sigma(&self) -> Result<f64> {
        Ok(match self {
            Source::Cayley => 1.0,
            Source::Gw(law) => law.sigma()?,
        })
    }
}

fn sample(a: &SampleArgs, run: &RunInfo) -> Result<Status> {
    let law = match a.model {
        Model::Cayley => "cayley",
        Model::Gw => a.law.as_str(),
    };
    let src = Source::new(law, a.n)?;
    let trees = replicates(run.seed, a.count, |_, rng| src.sample(a.n, rng))?;
    let mut out = Sink::text("treecut.trees.v1");
    for t in trees {
        out.line(t.to_line());
    }
    out.finish(run)?;
    Ok(Status::Ok)
}

fn targets(n: usize, k: usize, rng: &mut RngStream) -> Vec<usize> {
    (0..k).map(|_| rng.below(n)).collect()
}

fn cut(a: &CutArgs, run: &RunInfo) -> Result<Status> {
    if a.n == 0 {
        bail!("--n must be at least 1");
    }
    if a.mode != CutMode::Records && a.k == 0 {
        bail!("--k must be at least 1");
    }
    let k = if a.mode == CutMode::Records { 0 } else { a.k };
    let rows = replicates(run.seed, a.count, |r, rng| {
        let t = sample_cayley(a.n, rng)?;
        let (m, iso) = match a.mode {
            CutMode::Records => (records_count(&t, rng), Vec::new()),
            CutMode::Planted | CutMode::Ordered => {
                let s = targets(a.n, k, rng);
                let trace = if a.mode == CutMode::Planted {
                    planted_cut(&t, &s, rng)?
                } else {
                    ordered_cut(&t, &s, rng)?
                };
                (trace.m(), trace.isolation)
            }
        };
        let mut row = format!("{r},{},{k},{m}", a.n);
        for x in iso {
            row.push_str(&format!(",{x}"));
        }
        Ok(row)
    })?;
    let mut cols = "replicate,n,k,M".to_string();
    for i in 1..=k {
        cols.push_str(&format!(",M_{i}"));
    }
    let mut out = Sink::csv("treecut.cut.v1", &cols);
    rows.iter().for_each(|r| out.line(r));
    out.finish(run)?;
    Ok(Status::Ok)
}

fn forest_lines(f: &OrderedForest) -> Vec<String> {
    (0..f.len()).map(|i| f.tree_line(i)).collect()
}

fn dynamics(a: &DynamicsArgs, run: &RunInfo) -> Result<Status> {
    if a.n == 0 {
        bail!("--n must be at least 1");
    }
    let n = a.n;
    let runs = replicates(run.seed, a.count, |_, rng| {
        let t = sample_cayley(n, rng)?;
        let trace = modified_dynamics(&t, rng);
        Ok((t, trace))
    })?;
    let mut failed = false;
    let out = match a.emit {
        DynamicsEmit::Kappa => {
            let mut out = Sink::csv("treecut.dynamics.kappa.v1", "replicate,n,kappa");
            for (r, (_, tr)) in runs.iter().enumerate() {
                out.line(format!("{r},{n},{}", tr.kappa()));
            }
            out
        }
        DynamicsEmit::Forest => {
            let mut out = Sink::jsonl("treecut.dynamics.forest.v1");
            for (r, (_, tr)) in runs.iter().enumerate() {
                out.json(&serde_json::json!({ "replicate": r, "forest": forest_lines(&tr.forest) }))?;
            }
            out
        }
        DynamicsEmit::That => {
            let mut out = Sink::jsonl("treecut.dynamics.that.v1");
            for (r, (t, tr)) in runs.iter().enumerate() {
                out.json(&serde_json::json!({
                    "replicate": r,
                    "tree": tr.that.to_line(),
                    "root_of_t": t.root() + 1,
                    "kappa": tr.kappa(),
                }))?;
            }
            out
        }
        DynamicsEmit::Roundtrip => {
            let mut out = Sink::csv("treecut.dynamics.roundtrip.v1", "replicate,n,kappa,path_vertices,ok");
            for (r, (t, tr)) in runs.iter().enumerate() {
                let path = tr.that.path_to_root(t.root()).len();
                let f = tree_to_forest(&tr.that, t.root())?;
                let back = forest_to_tree(&f) == (tr.that.clone(), t.root());
                let text = OrderedForest::from_text(&tr.forest.to_text())? == tr.forest;
                let ok = back && text && path == tr.kappa();
                failed |= !ok;
                out.line(format!("{r},{n},{},{path},{}", tr.kappa(), ok as u8));
            }
            out
        }
    };
    out.finish(run)?;
    Ok(if failed { Status::CheckFailed } else { Status::Ok })
}

fn resolve_sigma(spec: &str, src: &Source) -> Result<f64> {
    if spec == "auto" {
        return src.sigma();
    }
    let s: f64 = spec.parse().with_context(|| format!("--sigma: `{spec}` is not a number"))?;
    if !(s > 0.0 && s.is_finite()) {
        bail!("--sigma must be positive");
    }
    Ok(s)
}

#[derive(Serialize)]
struct EventRow {
    replicate: u64,
    i: usize,
    tau: f64,
    vertex: usize,
    effective: bool,
    mu_after: f64,
    #[serde(rename = "L")]
    l: usize,
}

fn fragment_cmd(a: &FragmentArgs, run: &RunInfo) -> Result<Status> {
    let src = Source::new(&a.law, a.n)?;
    let sigma = resolve_sigma(&a.sigma, &src)?;
    if a.emit == FragmentEmit::That && a.horizon.is_some() {
        bail!("--emit that needs the run to finish; drop --horizon");
    }
    let runs: Vec<(RootedTree, FragmentationTrace)> = replicates(run.seed, a.count, |_, rng| {
        let t = src.sample(a.n, rng)?;
        let tr = fragment(&t, sigma, rng, a.horizon)?;
        Ok((t, tr))
    })?;
    let n = a.n;
    let scale = sigma * (n as f64).sqrt();
    let out = match a.emit {
        FragmentEmit::Kappa => {
            let mut out = Sink::csv(
                "treecut.fragment.kappa.v1",
                "replicate,n,sigma,kappa,kappa_scaled,lambda_inf,complete",
            );
            for (r, (_, tr)) in runs.iter().enumerate() {
                let lambda = mass_integral(tr).map(|x| x.0.to_string()).unwrap_or_default();
                out.line(format!(
                    "{r},{n},{sigma},{},{},{lambda},{}",
                    tr.kappa(),
                    tr.kappa() as f64 / scale,
                    tr.complete as u8
                ));
            }
            out
        }
        FragmentEmit::Trace => {
            let mut out = Sink::jsonl("treecut.fragment.trace.v1");
            for (r, (_, tr)) in runs.iter().enumerate() {
                for e in &tr.events {
                    out.json(&EventRow {
                        replicate: r as u64,
                        i: e.i,
                        tau: e.tau,
                        vertex: e.vertex + 1,
                        effective: e.effective,
                        mu_after: e.mu_after,
                        l: e.l,
                    })?;
                }
            }
            out
        }
        FragmentEmit::That => {
            let mut out = Sink::jsonl("treecut.fragment.that.v1");
            for (r, (t, tr)) in runs.iter().enumerate() {
                let (that, u, v) = build_that_tree(tr, t)?;
                out.json(&serde_json::json!({
                    "replicate": r,
                    "tree": that.to_line(),
                    "u": u + 1,
                    "v": v + 1,
                    "kappa": tr.kappa(),
                }))?;
            }
            out
        }
    };
    out.finish(run)?;
    Ok(Status::Ok)
}

fn excursion(a: &ExcursionArgs, run: &RunInfo) -> Result<Status> {
    let src = Source::new(&a.law, a.n)?;
    let sigma = src.sigma()?;
    let rows: Vec<Vec<String>> = replicates(run.seed, a.count, |r, rng| {
        let t = src.sample(a.n, rng)?;
        let tr = fragment(&t, sigma, rng, None)?;
        let mut rows = Vec::new();
        match a.emit {
            ExcursionEmit::Path => {
                let b = bridge_transform(&t, &tr)?;
                let mut next = 0;
                for (s, h) in b.path.heights().into_iter().enumerate() {
                    let mut boundary = false;
                    while b.boundaries.get(next) == Some(&s) {
                        boundary = true;
                        next += 1;
                    }
                    rows.push(format!("{r},{s},{h},{}", boundary as u8));
                }
            }
            ExcursionEmit::Marks => {
                for m in attachment_marks(&tr, &t)? {
                    rows.push(format!(
                        "{r},{},{},{},{},{},{}",
                        m.cut,
                        m.vertex + 1,
                        m.parent + 1,
                        m.piece,
                        m.offset,
                        m.later_mass
                    ));
                }
            }
        }
        Ok(rows)
    })?;
    let mut out = match a.emit {
        ExcursionEmit::Path => Sink::csv("treecut.excursion.path.v1", "replicate,step,height,boundary"),
        ExcursionEmit::Marks => Sink::csv(
            "treecut.excursion.marks.v1",
            "replicate,cut,vertex,parent,piece,offset,later_mass",
        ),
    };
    rows.iter().flatten().for_each(|l| out.line(l));
    out.finish(run)?;
    Ok(Status::Ok)
}

fn oracle(a: &OracleArgs, run: &RunInfo) -> Result<Status> {
    if !CHECKS.contains(&a.check.as_str()) {
        bail!("unknown check `{}`; expected one of {}", a.check, CHECKS.join(", "));
    }
    let c = run_check(&a.check, a.n, a.k)?;
    let verdict = if c.passed() { "PASS" } else { "FAIL" };
    let line = format!(
        "{verdict} check={} n={} k={} tv={} comparisons={}",
        c.name, a.n, a.k, c.tv, c.comparisons
    );
    println!("{line}");
    if run.out.is_some() {
        let mut out = Sink::csv("treecut.oracle.v1", "check,n,k,tv,comparisons,verdict");
        out.line(format!("{},{},{},{},{},{verdict}", c.name, a.n, a.k, c.tv, c.comparisons));
        out.finish(run)?;
    }
    Ok(if c.passed() { Status::Ok } else { Status::CheckFailed })
}

fn verify(a: &VerifyArgs, run: &RunInfo) -> Result<Status> {
    if a.n == 0 || a.count == 0 {
        bail!("--n and --count must be at least 1");
    }
    let n = a.n;
    let root_n = (n as f64).sqrt();
    let mut notes = Vec::new();
    let (ks, threshold, mut ok, table) = match a.claim {
        Claim::Rayleigh | Claim::Gw => {
            let src = if a.claim == Claim::Gw {
                Source::new(&a.law, n)?
            } else {
                Source::Cayley
            };
            let sigma = src.sigma()?;
            let xs = replicates(run.seed, a.count, |_, rng| {
                let t = src.sample(n, rng)?;
                Ok(fragment(&t, sigma, rng, None)?.kappa() as f64 / (sigma * root_n))
            })?;
            let emp = EmpiricalDistribution::new(xs)?;
            let law = ReferenceLaw::rayleigh();
            let threshold = if a.claim == Claim::Gw { KS_THRESHOLD_GW } else { KS_THRESHOLD };
            let ks = ks_distance(&emp, &law);
            (ks, threshold, ks < threshold, emp.cdf_table(&law))
        }
        Claim::Chik => {
            if a.k == 0 {
                bail!("--k must be at least 1");
            }
            let xs = replicates(run.seed, a.count, |_, rng| {
                let t = sample_cayley(n, rng)?;
                let s = targets(n, a.k, rng);
                Ok(planted_cut(&t, &s, rng)?.m() as f64 / root_n)
            })?;
            let emp = EmpiricalDistribution::new(xs)?;
            let law = ReferenceLaw::chi2k(a.k as u32);
            let ks = ks_distance(&emp, &law);
            let mut ok = ks < KS_THRESHOLD;
            for order in 1..=2 {
                let err = moment_check(&emp, &law, order)?;
                ok &= err < MOMENT_TOLERANCE;
                notes.push(format!("moment{order}_rel_err={err:.4}"));
            }
            (ks, KS_THRESHOLD, ok, emp.cdf_table(&law))
        }
        Claim::Kcoup => {
            if a.k == 0 {
                bail!("--k must be at least 1");
            }
            let pairs = replicates(run.seed, a.count, |_, rng| {
                let t = sample_cayley(n, rng)?;
                let s = targets(n, a.k, rng);
                let m = planted_cut(&t, &s, rng)?.m() - a.k;
                let u = sample_cayley(n, rng)?;
                let mut sel = targets(n, a.k, rng);
                sel.push(u.root());
                Ok((m as f64, u.spanned_subtree(&sel)?.edge_count() as f64))
            })?;
            let cut = EmpiricalDistribution::new(pairs.iter().map(|p| p.0).collect())?;
            let span = EmpiricalDistribution::new(pairs.iter().map(|p| p.1).collect())?;
            let ks = ks_two_sample(&cut, &span);
            let table = cut
                .samples()
                .iter()
                .enumerate()
                .map(|(i, &x)| (x, (i + 1) as f64 / cut.len() as f64, span.cdf(x)))
                .collect();
            (ks, KS_THRESHOLD, ks < KS_THRESHOLD, table)
        }
    };
    if !ks.is_finite() {
        ok = false;
    }
    let claim = format!("{:?}", a.claim).to_lowercase();
    let verdict = if ok { "PASS" } else { "FAIL" };
    let mut line = format!("claim={claim} n={n} k={} count={} ks={ks:.5} threshold={threshold}", a.k, a.count);
    for note in notes {
        line.push(' ');
        line.push_str(&note);
    }
    println!("{line} {verdict}");
    if run.out.is_some() {
        let mut out = Sink::csv("treecut.verify.cdf.v1", "sample,empirical_cdf,reference_cdf");
        for (x, e, f) in table {
            out.line(format!("{x},{e},{f}"));
        }
        out.finish(run)?;
    }
    Ok(if ok { Status::Ok } else { Status::CheckFailed })
}

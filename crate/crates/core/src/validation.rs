//! The cross-engine acceptance suite, shared by the `verify` command and the
//! acceptance test target.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closed_form::{t_chordal, t_complete, t_complete_bipartite};
use crate::error::Result;
use crate::graph::{complete, complete_bipartite, crown, cycle, path, star, subdivision, Graph, NodeOrdering};
use crate::graphon::{convergence_sweep, deterministic_reference};
use crate::mc::checks::{standard_orderings, Z_PASS};
use crate::mc::{
    classify_finiteness, det_moment_mc_check, estimate_bipartite, estimate_c6_angle_space, estimate_sequential,
    markov_factorization_test, order_independence_test, DensityEstimate, FinitenessStatus, McConfig,
};
use crate::pirational::PiRational;
use crate::sampler::{verify_general_position, SequentialSampler};
use crate::spectral::{cycle_density, zeta_form, SeriesMode, SeriesResult};
use crate::sphere::UnitVector;
use crate::stats::z_score;

/// Sample budgets for the statistical checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Scale {
    pub mc_samples: u64,
    pub markov_samples: u64,
    pub position_samples: usize,
    pub graphon_outer: u64,
    pub graphon_inner: usize,
    pub sidorenko_samples: u64,
    pub series_tol: f64,
}

impl Scale {
    /// The budgets the criteria are stated at.
    pub fn full() -> Self {
        Scale {
            mc_samples: 1_000_000,
            markov_samples: 100_000,
            position_samples: 10_000,
            graphon_outer: 100_000,
            graphon_inner: 1_000,
            sidorenko_samples: 1_000_000,
            series_tol: 1e-8,
        }
    }

    /// A fast smoke-test budget; statistical power is much lower.
    pub fn quick() -> Self {
        Scale {
            mc_samples: 50_000,
            markov_samples: 20_000,
            position_samples: 2_000,
            graphon_outer: 2_000,
            graphon_inner: 50,
            sidorenko_samples: 50_000,
            series_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    /// Non-blocking checks are reported but do not fail the suite.
    pub blocking: bool,
    pub details: Vec<String>,
    pub seconds: f64,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match (self.passed, self.blocking) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (reported)",
        };
        write!(f, "{tag} [{:>2}] {} ({:.1}s)", self.id, self.name, self.seconds)?;
        for d in &self.details {
            write!(f, "\n       {d}")?;
        }
        Ok(())
    }
}

pub const CHECK_COUNT: usize = 13;

pub fn check_name(id: usize) -> &'static str {
    match id {
        1 => "exact triangle densities",
        2 => "two-formula consistency",
        3 => "zeta-form cycle series",
        4 => "conditional triangle series",
        5 => "Monte Carlo against exact values",
        6 => "six-cycle four-way agreement",
        7 => "determinant moment oracle",
        8 => "ordering independence",
        9 => "general position of samples",
        10 => "finiteness table",
        11 => "conditional factorization",
        12 => "graphon convergence",
        13 => "Sidorenko-style lower bounds",
        _ => "unknown check",
    }
}

struct Log {
    passed: bool,
    details: Vec<String>,
}

impl Log {
    fn new() -> Self {
        Log { passed: true, details: Vec::new() }
    }

    fn record(&mut self, ok: bool, msg: String) {
        self.passed &= ok;
        self.details.push(format!("{} {msg}", if ok { "ok " } else { "BAD" }));
    }
}

/// Runs one check; internal errors count as failures.
pub fn run_check(id: usize, scale: &Scale, mc: &McConfig) -> CheckOutcome {
    let start = Instant::now();
    let mut log = Log::new();
    let mc = mc.derived(1000 + id as u64);
    let result = match id {
        1 => check_triangles(&mut log),
        2 => check_two_formulas(&mut log, scale),
        3 => check_zeta(&mut log, scale),
        4 => check_conditional(&mut log, scale),
        5 => check_mc_exact(&mut log, scale, &mc),
        6 => check_c6(&mut log, scale, &mc),
        7 => check_moments(&mut log, scale, &mc),
        8 => check_orders(&mut log, scale, &mc),
        9 => check_position(&mut log, scale, &mc),
        10 => check_finiteness(&mut log),
        11 => check_markov(&mut log, scale, &mc),
        12 => check_graphon(&mut log, scale, &mc),
        13 => check_sidorenko(&mut log, scale, &mc),
        _ => Err(crate::error::Error::domain(format!("no check with id {id}"))),
    };
    if let Err(e) = result {
        log.record(false, format!("error: {e}"));
    }
    CheckOutcome {
        id,
        name: check_name(id),
        passed: log.passed,
        blocking: id != 13,
        details: log.details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all(scale: &Scale, mc: &McConfig) -> Vec<CheckOutcome> {
    (1..=CHECK_COUNT).map(|id| run_check(id, scale, mc)).collect()
}

fn with_samples(mc: &McConfig, samples: u64, tag: u64) -> McConfig {
    McConfig { samples, ..mc.derived(tag) }
}

fn describe(e: &DensityEstimate) -> String {
    format!("{:.6} ± {:.2e} (median of means {:.6})", e.value, e.std_error, e.mom_value)
}

fn check_triangles(log: &mut Log) -> Result<()> {
    for (d, expect, float) in [(3, PiRational::new(2, 1, -1), std::f64::consts::FRAC_2_PI), (4, PiRational::new(1, 4, 1), std::f64::consts::FRAC_PI_4)] {
        let t = t_complete(3, d)?.value;
        let ok = t == expect && (t.to_f64() - float).abs() < 1e-12;
        log.record(ok, format!("t(K_3,{d}) = {t} = {:.15}", t.to_f64()));
    }
    Ok(())
}

fn check_two_formulas(log: &mut Log, scale: &Scale) -> Result<()> {
    for (r, d) in [(3, 3), (3, 4), (4, 5), (4, 6)] {
        let a = t_chordal(&complete(r)?, d)?.value;
        let b = t_complete(r, d)?.value;
        log.record(a == b, format!("K_{r}, d={d}: chordal {a}, complete {b}"));
    }
    let exact = t_complete_bipartite(2, 2, 4)?.value.to_f64();
    let s = cycle_density(4, 4, scale.series_tol)?;
    let ok = s.tail_bound <= 1e-8 && (s.value - exact).abs() <= s.tail_bound.max(4.0 * f64::EPSILON);
    log.record(ok, format!("K_{{2,2}} in d=4: {exact:.12} vs series {:.12} ± {:.1e}", s.value, s.tail_bound));
    Ok(())
}

fn overlap(a: &SeriesResult, b: &SeriesResult) -> bool {
    a.lower <= b.upper && b.lower <= a.upper
}

fn check_zeta(log: &mut Log, scale: &Scale) -> Result<()> {
    for k in [4, 6, 8] {
        let s = cycle_density(4, k, scale.series_tol)?;
        let z = zeta_form(k, scale.series_tol)?;
        log.record(
            overlap(&s, &z),
            format!("k={k}: eigenvalue series [{:.12}, {:.12}], zeta form [{:.12}, {:.12}]", s.lower, s.upper, z.lower, z.upper),
        );
        if k == 6 {
            let target = PI.powi(4) / 96.0;
            let ok = (s.value - target).abs() <= 1e-8;
            log.record(ok, format!("k=6: {:.12} vs π⁴/96 = {target:.12}", s.value));
        }
    }
    Ok(())
}

fn check_conditional(log: &mut Log, scale: &Scale) -> Result<()> {
    let s = cycle_density(4, 3, scale.series_tol)?;
    log.record(s.mode == SeriesMode::Conditional, format!("mode {:?}", s.mode));
    log.record(s.contains(PI / 4.0), format!("bracket [{:.12}, {:.12}] around π/4 = {:.12}", s.lower, s.upper, PI / 4.0));
    Ok(())
}

fn z_line(log: &mut Log, label: &str, e: &DensityEstimate, exact: f64) {
    let z = e.z_exact(exact);
    log.record(z < Z_PASS, format!("{label}: {} vs {exact:.6}, |z| = {z:.2}", describe(e)));
}

fn check_mc_exact(log: &mut Log, scale: &Scale, mc: &McConfig) -> Result<()> {
    let c4 = complete_bipartite(2, 2)?;
    let exact = PI * PI / 8.0;
    let cfg = with_samples(mc, scale.mc_samples, 0);
    z_line(log, "sequential K_{2,2}, d=4", &estimate_sequential(&c4, 4, &NodeOrdering::default_for(&c4), &cfg)?, exact);
    z_line(log, "bipartite K_{2,2}, d=4", &estimate_bipartite(&c4, 4, &with_samples(mc, scale.mc_samples, 1))?, exact);
    let k23 = complete_bipartite(2, 3)?;
    let exact = t_complete_bipartite(2, 3, 5)?.value.to_f64();
    z_line(log, "bipartite K_{2,3}, d=5", &estimate_bipartite(&k23, 5, &with_samples(mc, scale.mc_samples, 2))?, exact);
    Ok(())
}

fn check_c6(log: &mut Log, scale: &Scale, mc: &McConfig) -> Result<()> {
    let g = cycle(6)?;
    let n = scale.mc_samples;
    let s = cycle_density(3, 6, scale.series_tol)?;
    let rows = [
        ("sequential", estimate_sequential(&g, 3, &NodeOrdering::default_for(&g), &with_samples(mc, n, 0))?),
        ("bipartite", estimate_bipartite(&g, 3, &with_samples(mc, n, 1))?),
        ("angle space", estimate_c6_angle_space(&with_samples(mc, n, 2))?),
    ];
    log.details.push(format!("    spectral {:.9} ± {:.1e}", s.value, s.tail_bound));
    for (name, e) in &rows {
        log.details.push(format!("    {name} {}", describe(e)));
    }
    let mut values: Vec<(&str, f64, f64)> = rows.iter().map(|(n, e)| (*n, e.value, e.std_error)).collect();
    values.push(("spectral", s.value, s.tail_bound));
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let (a, b) = (values[i], values[j]);
            let z = z_score(a.1, a.2, b.1, b.2);
            log.record(z < Z_PASS, format!("{} vs {}: |z| = {z:.2}", a.0, b.0));
        }
    }
    Ok(())
}

fn check_moments(log: &mut Log, scale: &Scale, mc: &McConfig) -> Result<()> {
    let mut tag = 0;
    for d in 3..=5usize {
        for n in 2..d {
            for p in [-1i64, 1, 2] {
                if p < n as i64 - d as i64 {
                    continue;
                }
                let r = det_moment_mc_check(d, n, p, &with_samples(mc, scale.mc_samples, tag))?;
                tag += 1;
                log.record(
                    r.passed,
                    format!("(d,n,p)=({d},{n},{p}): {:.6} ± {:.1e} vs {:.6}, |z| = {:.2}", r.estimate, r.std_error, r.exact, r.z),
                );
            }
        }
    }
    Ok(())
}

fn check_orders(log: &mut Log, scale: &Scale, mc: &McConfig) -> Result<()> {
    for (i, (g, d, label)) in [(cycle(6)?, 3, "C_6, d=3"), (cycle(5)?, 3, "C_5, d=3"), (complete_bipartite(2, 3)?, 5, "K_{2,3}, d=5")]
        .into_iter()
        .enumerate()
    {
        let orders = standard_orderings(&g, 2, mc.seed ^ i as u64);
        let r = order_independence_test(&g, d, &orders, &with_samples(mc, scale.mc_samples, i as u64))?;
        let values: Vec<String> = r.estimates.iter().map(|e| format!("{:.5}", e.value)).collect();
        log.record(r.passed, format!("{label}: masses [{}], max |z| = {:.2}", values.join(", "), r.max_z));
    }
    Ok(())
}

fn check_position(log: &mut Log, scale: &Scale, mc: &McConfig) -> Result<()> {
    let g = cycle(5)?;
    let sampler = SequentialSampler::new(&g, 3, &NodeOrdering::default_for(&g))?;
    let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
    let (mut worst_margin, mut worst_subset) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..scale.position_samples {
        let x = sampler.sample(&mut rng)?;
        worst_margin = worst_margin.min(x.general_position_margin);
        worst_subset = worst_subset.min(verify_general_position(&x, 64, &mut rng));
    }
    let ok = worst_margin > 1e-12 && worst_subset > 1e-12;
    log.record(
        ok,
        format!("{} samples: smallest pivot {worst_margin:.3e}, smallest 3-subset determinant {worst_subset:.3e}", scale.position_samples),
    );
    Ok(())
}

fn check_finiteness(log: &mut Log) -> Result<()> {
    use FinitenessStatus::*;
    let mut expect = |g: &Graph, d: usize, label: &str, status: FinitenessStatus| {
        let v = classify_finiteness(g, d);
        log.record(v.status == status, format!("{label}, d={d}: {} ({})", v.status.as_str(), v.rule));
    };
    expect(&cycle(4)?, 3, "C_4", NotSparse);
    expect(&crown(4)?, 4, "crown(4)", InfiniteProved);
    expect(&subdivision(&complete(4)?), 5, "subdivided K_4", FiniteProved);
    expect(&crown(5)?, 4, "crown(5)", Unknown);
    expect(&crown(6)?, 4, "crown(6)", Unknown);
    expect(&crown(4)?, 5, "crown(4)", Unknown);
    let mut bad = Vec::new();
    for d in 3..=10 {
        for k in 3..=16 {
            if (d, k) != (3, 4) && classify_finiteness(&cycle(k)?, d).status != FiniteProved {
                bad.push(format!("C_{k}/d={d}"));
            }
        }
    }
    log.record(bad.is_empty(), format!("cycles C_3..C_16 in d=3..10 finite except (4,3); exceptions: {bad:?}"));
    Ok(())
}

fn check_markov(log: &mut Log, scale: &Scale, mc: &McConfig) -> Result<()> {
    let g = Graph::new(5, [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)])?;
    let r = markov_factorization_test(&g, 5, &[0], &[UnitVector::basis(5, 0)], &with_samples(mc, scale.markov_samples, 0))?;
    log.record(
        r.passed,
        format!("components {:?} and {:?}: covariance {:.3e} ± {:.1e}, |z| = {:.2}", r.first_component, r.second_component, r.covariance, r.std_error, r.z),
    );
    Ok(())
}

fn check_graphon(log: &mut Log, scale: &Scale, mc: &McConfig) -> Result<()> {
    let g = cycle(6)?;
    let r = convergence_sweep(&g, 3, &[0.5, 0.2, 0.1], scale.graphon_outer, scale.graphon_inner, mc)?;
    for row in &r.rows {
        log.details.push(format!(
            "    r={}: {:.5} ± {:.1e}, deviation {:.5}, max D·Det {:.3}",
            row.radius, row.estimate, row.std_error, row.deviation, row.max_domination
        ));
    }
    log.record(r.passed, format!("reference {:.6} ({}), margin {:.4}", r.reference.value, r.reference.source, r.margin));
    Ok(())
}

/// d-sparse bipartite graphs whose density is known or estimable.
pub fn sidorenko_graphs() -> Result<Vec<(String, Graph, usize)>> {
    Ok(vec![
        ("K_{1,2}".into(), star(2)?, 3),
        ("P_3".into(), path(3)?, 3),
        ("K_{2,2}".into(), complete_bipartite(2, 2)?, 4),
        ("K_{2,3}".into(), complete_bipartite(2, 3)?, 5),
        ("K_{3,3}".into(), complete_bipartite(3, 3)?, 6),
        ("C_6".into(), cycle(6)?, 3),
        ("C_6".into(), cycle(6)?, 4),
        ("C_8".into(), cycle(8)?, 3),
        ("subdivided K_4".into(), subdivision(&complete(4)?), 4),
        ("crown(5)".into(), crown(5)?, 5),
    ])
}

fn check_sidorenko(log: &mut Log, scale: &Scale, mc: &McConfig) -> Result<()> {
    for (i, (name, g, d)) in sidorenko_graphs()?.into_iter().enumerate() {
        let e = estimate_bipartite(&g, d, &with_samples(mc, scale.sidorenko_samples, i as u64))?;
        let ok = e.value >= 1.0 - 4.0 * e.std_error;
        let reference = match deterministic_reference(&g, d) {
            Some(r) => format!(", {} {:.6}, |z| = {:.2}", r.source, r.value, z_score(e.value, e.std_error, r.value, r.error).abs()),
            None => String::new(),
        };
        log.record(ok, format!("{name}, d={d}: {} ({}{reference})", describe(&e), e.finiteness.status.as_str()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_checks_pass() {
        let mc = McConfig::default();
        for id in [1, 2, 3, 4, 10] {
            let o = run_check(id, &Scale::quick(), &mc);
            assert!(o.passed, "{o}");
            assert!(o.blocking);
        }
    }

    #[test]
    fn unknown_id_fails() {
        let o = run_check(99, &Scale::quick(), &McConfig::default());
        assert!(!o.passed);
        assert!(o.to_string().starts_with("FAIL [99]"));
    }

    #[test]
    fn sidorenko_list_is_sparse_and_bipartite() {
        for (name, g, d) in sidorenko_graphs().unwrap() {
            assert!(crate::graph::is_d_sparse(&g, d).sparse, "{name}");
            assert!(g.bipartition().is_some(), "{name}");
        }
    }
}

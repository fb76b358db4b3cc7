//! Chunked, reproducible Monte Carlo driver.
//!
//! The sample budget is cut into fixed-size chunks. Chunk `i` draws from
//! ChaCha8 seeded with the master seed on stream `i`, so results depend only
//! on `(seed, samples, chunk_size)` and never on the worker count or on
//! scheduling. Chunk summaries are merged in chunk order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{median, Welford};

/// Fixed default seed so that bare invocations reproduce.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Number of median-of-means blocks.
pub const MOM_BLOCKS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub chunk_size: u64,
    /// Worker threads; 0 means all available cores.
    pub workers: usize,
    pub execution: Execution,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { samples: 100_000, seed: DEFAULT_SEED, chunk_size: 1 << 14, workers: 0, execution: Execution::default() }
    }
}

impl McConfig {
    pub fn with_samples(samples: u64) -> Self {
        McConfig { samples, ..Default::default() }
    }

    pub fn seeded(self, seed: u64) -> Self {
        McConfig { seed, ..self }
    }

    /// A seed for the `i`-th independent sub-experiment.
    pub fn derived(self, i: u64) -> Self {
        let mut z = self.seed ^ (i.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        McConfig { seed: z ^ (z >> 31), ..self }
    }

    pub fn effective_workers(&self) -> usize {
        match self.execution {
            Execution::Sequential => 1,
            Execution::Parallel if self.workers == 0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
            Execution::Parallel => self.workers,
        }
    }
}

/// Summary statistics of one output component.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentSummary {
    pub mean: f64,
    pub std_error: f64,
    pub median_of_means: f64,
    pub max: f64,
}

/// Merged output of a driver run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McOutput {
    pub components: Vec<ComponentSummary>,
    pub samples: u64,
    /// Samples whose first component was finite.
    pub kept: u64,
    pub excluded: u64,
    pub retries: u64,
    /// Kish effective sample size of the first component.
    pub ess: f64,
    pub max_value: f64,
    /// Per-sample values in global sample order when requested.
    #[serde(skip)]
    pub values: Option<Vec<f64>>,
}

impl McOutput {
    pub fn excluded_fraction(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.excluded as f64 / self.samples as f64
        }
    }
}

#[derive(Clone, Debug)]
struct ChunkSummary {
    totals: Vec<Welford>,
    blocks: Vec<Vec<Welford>>,
    sum: f64,
    sum_sq: f64,
    maxima: Vec<f64>,
    excluded: u64,
    retries: u64,
    values: Vec<f64>,
}

impl ChunkSummary {
    fn new(m: usize) -> Self {
        ChunkSummary {
            totals: vec![Welford::default(); m],
            blocks: vec![vec![Welford::default(); MOM_BLOCKS]; m],
            sum: 0.0,
            sum_sq: 0.0,
            maxima: vec![f64::NEG_INFINITY; m],
            excluded: 0,
            retries: 0,
            values: Vec::new(),
        }
    }

    fn merge(&mut self, o: &ChunkSummary) {
        for (a, b) in self.totals.iter_mut().zip(&o.totals) {
            a.merge(b);
        }
        for (ba, bb) in self.blocks.iter_mut().zip(&o.blocks) {
            for (a, b) in ba.iter_mut().zip(bb) {
                a.merge(b);
            }
        }
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        for (a, b) in self.maxima.iter_mut().zip(&o.maxima) {
            *a = a.max(*b);
        }
        self.excluded += o.excluded;
        self.retries += o.retries;
        self.values.extend_from_slice(&o.values);
    }
}

/// One draw's report to the driver.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DrawReport {
    pub retries: u32,
}

/// Runs `draw` once per sample. `draw` fills `out` (length `m`) and may use
/// per-chunk state built by `init`. A sample whose first component is not
/// finite is excluded from every component. With `keep_values`, the first
/// component of every sample is returned.
pub fn run<S, I, F>(cfg: &McConfig, m: usize, keep_values: bool, init: I, draw: F) -> Result<McOutput>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &mut ChaCha8Rng, &mut [f64]) -> Result<DrawReport> + Sync,
{
    if cfg.samples == 0 || cfg.chunk_size == 0 {
        return Err(Error::domain("sample count and chunk size must be positive"));
    }
    assert!(m >= 1, "at least one output component");
    let n = cfg.samples;
    let chunks = n.div_ceil(cfg.chunk_size);
    let run_chunk = |c: u64| -> Result<ChunkSummary> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(c);
        let mut state = init();
        let mut acc = ChunkSummary::new(m);
        let mut out = vec![0.0; m];
        let lo = c * cfg.chunk_size;
        let hi = (lo + cfg.chunk_size).min(n);
        for i in lo..hi {
            out.iter_mut().for_each(|x| *x = 0.0);
            let rep = draw(&mut state, &mut rng, &mut out)?;
            acc.retries += rep.retries as u64;
            if keep_values {
                acc.values.push(out[0]);
            }
            if !out[0].is_finite() || out.iter().any(|x| x.is_nan()) {
                acc.excluded += 1;
                continue;
            }
            let block = ((i as u128 * MOM_BLOCKS as u128) / n as u128) as usize;
            for (j, &x) in out.iter().enumerate() {
                acc.totals[j].push(x);
                acc.blocks[j][block].push(x);
                acc.maxima[j] = acc.maxima[j].max(x);
            }
            acc.sum += out[0];
            acc.sum_sq += out[0] * out[0];
        }
        Ok(acc)
    };
    let parts: Vec<Result<ChunkSummary>> = dispatch(cfg, chunks, &run_chunk)?;
    let mut total = ChunkSummary::new(m);
    for p in parts {
        total.merge(&p?);
    }
    let components = (0..m)
        .map(|j| {
            let mut means: Vec<f64> = total.blocks[j].iter().filter(|b| b.count > 0).map(|b| b.mean).collect();
            let mom = if means.is_empty() { f64::NAN } else { median(&mut means) };
            ComponentSummary {
                mean: total.totals[j].mean,
                std_error: total.totals[j].std_error(),
                median_of_means: mom,
                max: total.maxima[j],
            }
        })
        .collect();
    let ess = if total.sum_sq > 0.0 { total.sum * total.sum / total.sum_sq } else { total.totals[0].count as f64 };
    Ok(McOutput {
        components,
        samples: n,
        kept: total.totals[0].count,
        excluded: total.excluded,
        retries: total.retries,
        ess,
        max_value: total.maxima[0],
        values: keep_values.then_some(total.values),
    })
}

#[cfg(feature = "parallel")]
fn dispatch<T: Send>(cfg: &McConfig, chunks: u64, f: &(dyn Fn(u64) -> T + Sync)) -> Result<Vec<T>> {
    use rayon::prelude::*;
    match cfg.execution {
        Execution::Sequential => Ok((0..chunks).map(f).collect()),
        Execution::Parallel => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.effective_workers())
                .build()
                .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(|| (0..chunks).into_par_iter().map(f).collect()))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn dispatch<T: Send>(_cfg: &McConfig, chunks: u64, f: &(dyn Fn(u64) -> T + Sync)) -> Result<Vec<T>> {
    Ok((0..chunks).map(f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn uniform_mean(cfg: &McConfig) -> McOutput {
        run(cfg, 2, true, || (), |_, rng, out| {
            let u: f64 = rng.random();
            out[0] = u;
            out[1] = u * u;
            Ok(DrawReport::default())
        })
        .unwrap()
    }

    #[test]
    fn estimates_uniform_moments() {
        let out = uniform_mean(&McConfig::with_samples(200_000));
        assert!((out.components[0].mean - 0.5).abs() < 4.0 * out.components[0].std_error);
        assert!((out.components[1].mean - 1.0 / 3.0).abs() < 4.0 * out.components[1].std_error);
        assert_eq!(out.kept, 200_000);
        assert_eq!(out.values.as_ref().unwrap().len(), 200_000);
        assert!(out.ess <= out.samples as f64);
    }

    #[test]
    fn independent_of_workers_and_execution() {
        let base = McConfig { samples: 50_000, chunk_size: 1000, ..Default::default() };
        let a = uniform_mean(&McConfig { workers: 1, ..base });
        let b = uniform_mean(&McConfig { workers: 3, ..base });
        let c = uniform_mean(&McConfig { execution: Execution::Sequential, ..base });
        assert_eq!(a, b);
        assert_eq!(a, c);
        let d = uniform_mean(&base.seeded(base.seed + 1));
        assert_ne!(a.components[0].mean, d.components[0].mean);
    }

    #[test]
    fn excludes_non_finite_draws() {
        let cfg = McConfig::with_samples(10_000);
        let out = run(&cfg, 1, false, || 0u64, |k, _, out| {
            *k += 1;
            out[0] = if *k % 100 == 0 { f64::INFINITY } else { 1.0 };
            Ok(DrawReport { retries: 1 })
        })
        .unwrap();
        assert_eq!(out.excluded, 100);
        assert_eq!(out.kept, 9_900);
        assert_eq!(out.retries, 10_000);
        assert_eq!(out.components[0].mean, 1.0);
        assert!((out.excluded_fraction() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn derived_seeds_differ() {
        let c = McConfig::default();
        assert_ne!(c.derived(0).seed, c.derived(1).seed);
        assert_eq!(c.derived(5).seed, c.derived(5).seed);
    }
}

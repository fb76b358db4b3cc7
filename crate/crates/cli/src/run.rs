//! Density execution and reproducible run records.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use orthohom::closed_form::closed_form;
use orthohom::graph::io::{read_graph, to_text};
use orthohom::graph::{is_d_sparse, Graph};
use orthohom::graphon::{estimate_t_graphon, GraphonApproxConfig};
use orthohom::mc::{
    classify_finiteness, estimate_bipartite, estimate_sequential, DensityEstimate, FinitenessStatus, FinitenessVerdict,
    McConfig, Method,
};
use orthohom::spectral::cycle_density;
use orthohom::{Error, NodeOrdering, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::MethodChoice;

/// Everything needed to reproduce a result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub graph_file: Option<String>,
    pub graph_hash: Option<String>,
    pub d: Option<usize>,
    pub method: Option<String>,
    pub seed: u64,
    pub samples: u64,
    pub workers: usize,
    pub order: Option<String>,
    pub radius: Option<f64>,
    pub inner: Option<usize>,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub command_line: Vec<String>,
    pub config: RunConfig,
    pub result: serde_json::Value,
    pub timestamp: String,
    pub tool_version: String,
}

impl RunRecord {
    pub fn new(config: RunConfig, result: serde_json::Value) -> Self {
        RunRecord {
            command_line: std::env::args().collect(),
            config,
            result,
            timestamp: chrono::Utc::now().to_rfc3339(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn append(&self, path: &Path) -> Result<()> {
        let line = serde_json::to_string(self).map_err(|e| Error::Io(e.to_string()))?;
        let mut f = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        writeln!(f, "{line}").map_err(|e| Error::Io(e.to_string()))
    }
}

/// Hex SHA-256 of the canonical text form.
pub fn graph_hash(g: &Graph) -> String {
    Sha256::digest(to_text(g).as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Result of the `density` command in the persisted schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityResult {
    pub graph_file: Option<String>,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub method: Method,
    pub value: f64,
    pub std_error: f64,
    pub mom_value: f64,
    pub samples: u64,
    pub ess: Option<f64>,
    pub finiteness: FinitenessVerdict,
    pub seed: u64,
    pub workers: usize,
    pub runtime_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl DensityResult {
    /// Equality up to wall-clock fields.
    pub fn same_outcome(&self, other: &DensityResult) -> bool {
        let strip = |r: &DensityResult| DensityResult { runtime_seconds: 0.0, workers: 0, graph_file: None, ..r.clone() };
        strip(self) == strip(other)
    }
}

#[derive(Clone, Debug)]
pub struct DensityRequest {
    pub graph_file: Option<PathBuf>,
    pub d: usize,
    pub method: MethodChoice,
    pub mc: McConfig,
    pub order: String,
    pub radius: f64,
    pub inner: usize,
    pub tol: f64,
}

impl DensityRequest {
    pub fn config(&self, g: &Graph) -> RunConfig {
        RunConfig {
            command: "density".into(),
            graph_file: self.graph_file.as_ref().map(|p| p.display().to_string()),
            graph_hash: Some(graph_hash(g)),
            d: Some(self.d),
            method: Some(self.method.as_str().into()),
            seed: self.mc.seed,
            samples: self.mc.samples,
            workers: self.mc.workers,
            order: Some(self.order.clone()),
            radius: Some(self.radius),
            inner: Some(self.inner),
            tol: Some(self.tol),
        }
    }

    /// Rebuilds a request from a persisted configuration.
    pub fn from_config(c: &RunConfig) -> Result<Self> {
        let missing = |f: &str| Error::Refused(format!("record lacks field {f}"));
        let method = c.method.as_deref().and_then(MethodChoice::parse).ok_or_else(|| missing("method"))?;
        Ok(DensityRequest {
            graph_file: c.graph_file.as_ref().map(PathBuf::from),
            d: c.d.ok_or_else(|| missing("d"))?,
            method,
            mc: McConfig { samples: c.samples, seed: c.seed, workers: c.workers, ..McConfig::default() },
            order: c.order.clone().unwrap_or_else(|| "default".into()),
            radius: c.radius.unwrap_or(0.1),
            inner: c.inner.unwrap_or(1000),
            tol: c.tol.unwrap_or(1e-8),
        })
    }
}

/// Resolves `default`, `random` or a permutation file.
pub fn resolve_order(g: &Graph, spec: &str, seed: u64) -> Result<NodeOrdering> {
    match spec {
        "default" => Ok(NodeOrdering::default_for(g)),
        "random" => Ok(NodeOrdering::random(g.node_count(), &mut ChaCha8Rng::seed_from_u64(seed ^ 0x006f_7264_6572))),
        path => {
            let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
            let order = src
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| Error::InvalidOrdering(format!("bad node label {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if order.len() != g.node_count() {
                return Err(Error::InvalidOrdering(format!("{} nodes listed, graph has {}", order.len(), g.node_count())));
            }
            NodeOrdering::new(order)
        }
    }
}

fn single_cycle_length(g: &Graph) -> Option<usize> {
    let k = g.node_count();
    (k >= 3 && g.edge_count() == k && g.components().len() == 1 && (0..k).all(|v| g.degree(v) == 2)).then_some(k)
}

pub fn density(g: &Graph, req: &DensityRequest) -> Result<DensityResult> {
    let start = Instant::now();
    let d = req.d;
    if d < 3 {
        return Err(Error::Domain(format!("dimension d={d} must be at least 3")));
    }
    if let Some((a, b)) = is_d_sparse(g, d).witness {
        return Err(Error::NotSparse { d, a: a.len(), b: b.len() });
    }
    let verdict = classify_finiteness(g, d);
    let base = |method: Method, value: f64, std_error: f64| DensityResult {
        graph_file: req.graph_file.as_ref().map(|p| p.display().to_string()),
        n: g.node_count(),
        m: g.edge_count(),
        d,
        method,
        value,
        std_error,
        mom_value: value,
        samples: 0,
        ess: None,
        finiteness: verdict.clone(),
        seed: req.mc.seed,
        workers: req.mc.effective_workers(),
        runtime_seconds: 0.0,
        exact: None,
        formula: None,
        lower: None,
        upper: None,
        tail_bound: None,
        warnings: Vec::new(),
    };
    let from_estimate = |e: DensityEstimate| {
        let mut r = base(e.method, e.value, e.std_error);
        r.mom_value = e.mom_value;
        r.samples = e.samples;
        r.ess = Some(e.diagnostics.effective_sample_size);
        r.warnings = e.diagnostics.warnings;
        if e.diagnostics.invalid {
            r.warnings.push("estimate flagged invalid".into());
        }
        r
    };
    let closed = || -> Result<DensityResult> {
        let cf = closed_form(g, d)?;
        let mut r = base(Method::ClosedForm, cf.value.to_f64(), 0.0);
        r.exact = Some(cf.value.to_string());
        r.formula = Some(cf.formula_tag.as_str().into());
        Ok(r)
    };
    let spectral = || -> Result<DensityResult> {
        let k = single_cycle_length(g).ok_or_else(|| Error::Domain("the spectral method needs a single cycle".into()))?;
        let s = cycle_density(d, k, req.tol)?;
        let mut r = base(Method::Spectral, s.value, s.tail_bound);
        r.samples = s.terms as u64;
        r.lower = Some(s.lower);
        r.upper = Some(s.upper);
        r.tail_bound = Some(s.tail_bound);
        r.formula = Some(format!("{:?}", s.mode).to_lowercase());
        if !s.converged {
            r.warnings.push("series stopped before reaching the requested tolerance".into());
        }
        Ok(r)
    };
    let mc_seq = || -> Result<DensityResult> {
        let p = resolve_order(g, &req.order, req.mc.seed)?;
        Ok(from_estimate(estimate_sequential(g, d, &p, &req.mc)?))
    };
    let mc_bip = || -> Result<DensityResult> { Ok(from_estimate(estimate_bipartite(g, d, &req.mc)?)) };
    let mut result = match req.method {
        MethodChoice::Closed => closed()?,
        MethodChoice::Spectral => spectral()?,
        MethodChoice::McSeq => mc_seq()?,
        MethodChoice::McBip => mc_bip()?,
        MethodChoice::Graphon => {
            let cfg = GraphonApproxConfig::new(req.radius, req.mc.samples, req.inner)?;
            let e = estimate_t_graphon(g, d, &cfg, &req.mc)?;
            let mut r = from_estimate(e.estimate);
            r.formula = Some(format!("radius {}", req.radius));
            r
        }
        MethodChoice::Auto => match closed() {
            Ok(r) => r,
            Err(_) => match spectral() {
                Ok(r) => r,
                Err(_) if g.bipartition().is_some() => mc_bip()?,
                Err(_) => mc_seq()?,
            },
        },
    };
    if verdict.status == FinitenessStatus::InfiniteProved {
        result.warnings.push(format!("t(G,{d}) is infinite ({}); the estimate does not converge", verdict.rule));
    }
    result.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(result)
}

/// Replays every density record in a log; returns (matches, mismatches).
pub fn replay(path: &Path) -> Result<(Vec<String>, Vec<String>)> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let (mut ok, mut bad) = (Vec::new(), Vec::new());
    for (i, line) in src.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let rec: RunRecord =
            serde_json::from_str(line).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        if rec.config.command != "density" {
            continue;
        }
        let req = DensityRequest::from_config(&rec.config)?;
        let file = req.graph_file.clone().ok_or_else(|| Error::Refused("record has no graph file".into()))?;
        let g = read_graph(&file)?;
        let label = format!("line {}: {}", i + 1, file.display());
        if rec.config.graph_hash.as_deref() != Some(graph_hash(&g).as_str()) {
            bad.push(format!("{label}: graph file changed"));
            continue;
        }
        let old: DensityResult =
            serde_json::from_value(rec.result).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        let new = density(&g, &req)?;
        if new.same_outcome(&old) {
            ok.push(label);
        } else {
            bad.push(format!("{label}: {} vs recorded {}", new.value, old.value));
        }
    }
    Ok((ok, bad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use orthohom::graph::{complete, cycle};

    fn request(method: MethodChoice, d: usize) -> DensityRequest {
        DensityRequest {
            graph_file: None,
            d,
            method,
            mc: McConfig::with_samples(5000),
            order: "default".into(),
            radius: 0.3,
            inner: 20,
            tol: 1e-8,
        }
    }

    #[test]
    fn auto_prefers_exact_then_series() {
        let r = density(&complete(3).unwrap(), &request(MethodChoice::Auto, 3)).unwrap();
        assert_eq!(r.method, Method::ClosedForm);
        assert_eq!(r.exact.as_deref(), Some("2/1 · π^-1"));
        let r = density(&cycle(5).unwrap(), &request(MethodChoice::Auto, 3)).unwrap();
        assert_eq!(r.method, Method::Spectral);
        assert!(r.tail_bound.unwrap() <= 1e-8);
        let g = orthohom::graph::crown(5).unwrap();
        assert_eq!(density(&g, &request(MethodChoice::Auto, 5)).unwrap().method, Method::BipartiteDirect);
        let g = Graph::new(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 2)]).unwrap();
        assert_eq!(density(&g, &request(MethodChoice::Auto, 5)).unwrap().method, Method::SequentialImportance);
    }

    #[test]
    fn replaying_a_config_is_bit_exact() {
        let g = cycle(6).unwrap();
        for m in [MethodChoice::McSeq, MethodChoice::McBip, MethodChoice::Graphon] {
            let req = request(m, 3);
            let first = density(&g, &req).unwrap();
            let cfg: RunConfig = serde_json::from_str(&serde_json::to_string(&req.config(&g)).unwrap()).unwrap();
            let again = density(&g, &DensityRequest::from_config(&cfg).unwrap()).unwrap();
            assert!(first.same_outcome(&again), "{m:?}");
            let json = serde_json::to_value(&first).unwrap();
            let back: DensityResult = serde_json::from_value(json).unwrap();
            assert_eq!(back, first);
        }
    }

    #[test]
    fn errors_are_specific() {
        assert!(matches!(density(&cycle(4).unwrap(), &request(MethodChoice::Auto, 3)), Err(Error::NotSparse { .. })));
        assert!(density(&cycle(5).unwrap(), &request(MethodChoice::Closed, 3)).is_err());
        assert!(matches!(density(&cycle(5).unwrap(), &request(MethodChoice::McBip, 3)), Err(Error::NotBipartite)));
        assert!(density(&complete(3).unwrap(), &request(MethodChoice::Spectral, 3)).is_err());
        assert!(density(&complete(3).unwrap(), &request(MethodChoice::Spectral, 4)).is_ok());
    }

    #[test]
    fn hash_is_stable_hex() {
        let h = graph_hash(&complete(3).unwrap());
        assert_eq!(h.len(), 64);
        assert_eq!(h, graph_hash(&complete(3).unwrap()));
        assert_ne!(h, graph_hash(&cycle(4).unwrap()));
    }
}

mod args;
mod run;

use std::process::ExitCode;

use clap::Parser;
use orthohom::graph::io::read_graph;
use orthohom::graph::{is_d_sparse, Graph};
use orthohom::mc::checks::MomentReport;
use orthohom::mc::{classify_finiteness, det_moment_mc_check, McConfig};
use orthohom::sampler::SequentialSampler;
use orthohom::spectral::spectral_table;
use orthohom::validation::{run_check, Scale, CHECK_COUNT};
use orthohom::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use args::{Cli, Command, GraphArgs, McArgs, OutputFormat};
use run::{density, graph_hash, replay, resolve_order, DensityRequest, RunConfig, RunRecord};

/// Rendered output plus whether the command's checks passed.
struct Outcome {
    json: Value,
    csv: String,
    text: String,
    passed: bool,
    config: RunConfig,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(out) => {
            let body = match cli.output {
                OutputFormat::Json => serde_json::to_string_pretty(&out.json).expect("values serialize"),
                OutputFormat::Csv => out.csv.trim_end().to_string(),
                OutputFormat::Text => out.text.trim_end().to_string(),
            };
            println!("{body}");
            if let Some(path) = &cli.log {
                if let Err(e) = RunRecord::new(out.config, out.json).append(path) {
                    return fail(&e);
                }
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("{}", json!({ "error": { "kind": e.kind(), "message": e.to_string() } }));
    ExitCode::from(1)
}

fn mc_config(a: &McArgs) -> McConfig {
    McConfig { samples: a.samples, seed: a.seed, workers: a.workers, ..McConfig::default() }
}

fn load(a: &GraphArgs) -> Result<Graph> {
    read_graph(&a.graph)
}

fn base_config(command: &str, a: Option<&GraphArgs>, g: Option<&Graph>) -> RunConfig {
    RunConfig {
        command: command.into(),
        graph_file: a.map(|a| a.graph.display().to_string()),
        graph_hash: g.map(graph_hash),
        d: a.map(|a| a.dim),
        method: None,
        seed: 0,
        samples: 0,
        workers: 0,
        order: None,
        radius: None,
        inner: None,
        tol: None,
    }
}

fn csv_row(fields: &[(&str, String)]) -> String {
    let head: Vec<&str> = fields.iter().map(|f| f.0).collect();
    let row: Vec<String> =
        fields.iter().map(|f| if f.1.contains(',') { format!("\"{}\"", f.1) } else { f.1.clone() }).collect();
    format!("{}\n{}\n", head.join(","), row.join(","))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Sparsity(a) => {
            let g = load(a)?;
            let r = is_d_sparse(&g, a.dim);
            let (wa, wb) = r.witness.clone().unwrap_or_default();
            let text = match &r.witness {
                None => format!("{}-sparse: yes", a.dim),
                Some((x, y)) => format!("{}-sparse: no, K_{{{},{}}} on {x:?} and {y:?}", a.dim, x.len(), y.len()),
            };
            Ok(Outcome {
                json: json!({ "d": a.dim, "sparse": r.sparse, "witness": r.witness.as_ref().map(|(x, y)| json!({"a": x, "b": y})) }),
                csv: csv_row(&[
                    ("d", a.dim.to_string()),
                    ("sparse", r.sparse.to_string()),
                    ("witness_a", format!("{wa:?}").replace(',', " ")),
                    ("witness_b", format!("{wb:?}").replace(',', " ")),
                ]),
                text,
                passed: true,
                config: base_config("sparsity", Some(a), Some(&g)),
            })
        }
        Command::Finiteness(a) => {
            let g = load(a)?;
            let v = classify_finiteness(&g, a.dim);
            let text = if v.rule.is_empty() { v.status.as_str().to_string() } else { format!("{} / {}", v.status.as_str(), v.rule) };
            Ok(Outcome {
                json: serde_json::to_value(&v).expect("verdict serializes"),
                csv: csv_row(&[("status", v.status.as_str().into()), ("rule", v.rule.clone())]),
                text,
                passed: true,
                config: base_config("finiteness", Some(a), Some(&g)),
            })
        }
        Command::Density(a) => {
            let g = load(&a.graph)?;
            let req = DensityRequest {
                graph_file: Some(a.graph.graph.clone()),
                d: a.graph.dim,
                method: a.method,
                mc: mc_config(&a.mc),
                order: a.order.clone(),
                radius: a.radius,
                inner: a.inner,
                tol: a.tol,
            };
            let r = density(&g, &req)?;
            let mut text = match &r.exact {
                Some(exact) => format!("t(G,{}) = {exact} ≈ {:.15}\nstd_error 0 (exact, {})", r.d, r.value, r.formula.as_deref().unwrap_or("")),
                None => match r.tail_bound {
                    Some(tb) => format!(
                        "t(G,{}) ≈ {:.12} in [{:.12}, {:.12}]\ntail_bound {tb:.3e} ({} terms)",
                        r.d,
                        r.value,
                        r.lower.unwrap_or(f64::NAN),
                        r.upper.unwrap_or(f64::NAN),
                        r.samples
                    ),
                    None => format!(
                        "t(G,{}) ≈ {:.6} ± {:.2e} (median of means {:.6}, {} samples, ess {:.0})",
                        r.d,
                        r.value,
                        r.std_error,
                        r.mom_value,
                        r.samples,
                        r.ess.unwrap_or(0.0)
                    ),
                },
            };
            text.push_str(&format!("\nmethod {}\nfiniteness {} {}", r.method.as_str(), r.finiteness.status.as_str(), r.finiteness.rule));
            for w in &r.warnings {
                text.push_str(&format!("\nwarning: {w}"));
            }
            let csv = csv_row(&[
                ("graph_file", r.graph_file.clone().unwrap_or_default()),
                ("n", r.n.to_string()),
                ("m", r.m.to_string()),
                ("d", r.d.to_string()),
                ("method", r.method.as_str().into()),
                ("value", r.value.to_string()),
                ("std_error", r.std_error.to_string()),
                ("mom_value", r.mom_value.to_string()),
                ("samples", r.samples.to_string()),
                ("ess", r.ess.map(|e| e.to_string()).unwrap_or_default()),
                ("status", r.finiteness.status.as_str().into()),
                ("rule", r.finiteness.rule.clone()),
                ("seed", r.seed.to_string()),
                ("workers", r.workers.to_string()),
                ("runtime_seconds", r.runtime_seconds.to_string()),
            ]);
            Ok(Outcome {
                json: serde_json::to_value(&r).expect("result serializes"),
                csv,
                text,
                passed: true,
                config: req.config(&g),
            })
        }
        Command::Sample(a) => {
            let g = load(&a.graph)?;
            let p = resolve_order(&g, &a.order, a.seed)?;
            let sampler = SequentialSampler::new(&g, a.graph.dim, &p)?;
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let draws = (0..a.samples).map(|_| sampler.sample(&mut rng).map(|x| x.export())).collect::<Result<Vec<_>>>()?;
            let mut csv = String::from("sample,node,log_weight");
            (0..a.graph.dim).for_each(|i| csv.push_str(&format!(",x{i}")));
            csv.push('\n');
            let mut text = String::new();
            for (i, x) in draws.iter().enumerate() {
                text.push_str(&format!("sample {i}: log_weight {:.12}\n", x.log_weight));
                for (v, vec) in x.vectors.iter().enumerate() {
                    let coords: Vec<String> = vec.iter().map(|c| format!("{c:.12}")).collect();
                    csv.push_str(&format!("{i},{v},{},{}\n", x.log_weight, coords.join(",")));
                    text.push_str(&format!("  {v}: [{}]\n", coords.join(", ")));
                }
            }
            let mut config = base_config("sample", Some(&a.graph), Some(&g));
            config.seed = a.seed;
            config.samples = a.samples;
            config.order = Some(a.order.clone());
            Ok(Outcome { json: serde_json::to_value(&draws).expect("samples serialize"), csv, text, passed: true, config })
        }
        Command::SpectralTable(a) => {
            let t = spectral_table(a.dim, a.max_degree)?;
            let csv = t.to_csv();
            let mut config = base_config("spectral-table", None, None);
            config.d = Some(a.dim);
            Ok(Outcome { json: serde_json::to_value(&*t).expect("table serializes"), text: csv.clone(), csv, passed: true, config })
        }
        Command::Verify(a) => {
            let scale = if a.quick { Scale::quick() } else { Scale::full() };
            let mc = McConfig { seed: a.seed, workers: a.workers, ..McConfig::default() };
            let ids: Vec<usize> = if a.only.is_empty() { (1..=CHECK_COUNT).collect() } else { a.only.clone() };
            let outcomes: Vec<_> = ids.iter().map(|&id| run_check(id, &scale, &mc)).collect();
            let failed: Vec<usize> = outcomes.iter().filter(|o| o.blocking && !o.passed).map(|o| o.id).collect();
            let mut text: String = outcomes.iter().map(|o| format!("{o}\n")).collect();
            text.push_str(&if failed.is_empty() { "all blocking checks passed".to_string() } else { format!("failed checks: {failed:?}") });
            let mut csv = String::from("id,name,passed,blocking,seconds\n");
            for o in &outcomes {
                csv.push_str(&format!("{},{},{},{},{:.3}\n", o.id, o.name, o.passed, o.blocking, o.seconds));
            }
            let mut config = base_config("verify", None, None);
            config.seed = a.seed;
            config.workers = a.workers;
            config.method = Some(if a.quick { "quick" } else { "full" }.into());
            Ok(Outcome {
                json: json!({ "checks": outcomes, "failed": failed }),
                csv,
                text,
                passed: failed.is_empty(),
                config,
            })
        }
        Command::Moments(a) => {
            let d = a.dim;
            let ns: Vec<usize> = match a.points {
                Some(n) => vec![n],
                None => (2..d).collect(),
            };
            let ps: Vec<i64> = match a.power {
                Some(p) => vec![p],
                None => vec![-1, 1, 2],
            };
            let mc = mc_config(&a.mc);
            let mut reports: Vec<MomentReport> = Vec::new();
            let explicit = a.points.is_some() && a.power.is_some();
            for &n in &ns {
                for &p in &ps {
                    if !explicit && p < n as i64 - d as i64 {
                        continue;
                    }
                    reports.push(det_moment_mc_check(d, n, p, &mc.derived(reports.len() as u64))?);
                }
            }
            let mut csv = String::from("d,n,p,exact,estimate,std_error,mom_value,z,passed\n");
            let mut text = String::new();
            for r in &reports {
                csv.push_str(&format!("{},{},{},{},{},{},{},{},{}\n", r.d, r.n, r.p, r.exact, r.estimate, r.std_error, r.mom_value, r.z, r.passed));
                text.push_str(&format!(
                    "{} (d,n,p)=({},{},{}): {:.6} ± {:.2e} vs exact {:.6}, |z| = {:.2}\n",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.d,
                    r.n,
                    r.p,
                    r.estimate,
                    r.std_error,
                    r.exact,
                    r.z
                ));
            }
            let mut config = base_config("moments", None, None);
            config.d = Some(d);
            config.seed = a.mc.seed;
            config.samples = a.mc.samples;
            config.workers = a.mc.workers;
            Ok(Outcome {
                json: serde_json::to_value(&reports).expect("reports serialize"),
                csv,
                text,
                passed: reports.iter().all(|r| r.passed),
                config,
            })
        }
        Command::Replay(a) => {
            let (ok, bad) = replay(&a.from)?;
            let mut text = String::new();
            ok.iter().for_each(|l| text.push_str(&format!("match {l}\n")));
            bad.iter().for_each(|l| text.push_str(&format!("MISMATCH {l}\n")));
            text.push_str(&format!("{} matched, {} mismatched", ok.len(), bad.len()));
            let csv = format!("matched,mismatched\n{},{}\n", ok.len(), bad.len());
            Ok(Outcome {
                json: json!({ "matched": ok, "mismatched": bad }),
                csv,
                text,
                passed: bad.is_empty(),
                config: base_config("replay", None, None),
            })
        }
    }
}

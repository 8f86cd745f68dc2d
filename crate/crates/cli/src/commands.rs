//! Subcommand bodies.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use pathwl::bench::{
    embed_family, format_matrix, parse_manifest, sweep, time_lifting, write_csv, BenchError,
    CellStatus, Method, RunConfig, SweepReport,
};
use pathwl::complex::{cyclic_families, lift, serialize_complex};
use pathwl::network::embedding_distance;
use pathwl::refine::{distinguishes, refine_pair, wl1_refine_pair, ColorHistogram, UpdateRule};
use pathwl::{ComplexKind, HigherOrderComplex, LiftError, LiftSpec, SimpleGraph};
use serde_json::json;

use crate::config::{parse_usize_list, OutputFormat, Settings};
use crate::input::{read_graph, read_graphs};
use crate::{CliError, Command};

fn lift_error(e: LiftError) -> CliError {
    match e {
        LiftError::MemberCap { .. } => CliError::Cap(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn spec_for(kind: ComplexKind, max_dim: usize, max_ring: usize, s: &Settings) -> LiftSpec {
    let spec = match kind {
        ComplexKind::Path => LiftSpec::path(max_dim).with_boundary_mode(s.boundary_mode),
        ComplexKind::Simplex => LiftSpec::clique(max_dim),
        ComplexKind::Cell => LiftSpec::ring(max_ring),
    };
    spec.with_member_cap(s.member_cap)
}

fn run_config(
    method: Method,
    max_dim: usize,
    max_ring: usize,
    layers: usize,
    rule: UpdateRule,
    s: &Settings,
) -> RunConfig {
    let size = match method.kind() {
        Some(ComplexKind::Cell) => max_ring,
        _ => max_dim,
    };
    RunConfig {
        seeds: s.seeds.clone(),
        epsilon: s.epsilon,
        boundary_mode: s.boundary_mode,
        member_cap: s.member_cap,
        rule,
        hidden_dim: s.hidden_dim,
        embed_dim: s.embed_dim,
        ..RunConfig::new(method, size).with_layers(layers)
    }
}

fn parse_arg<T: FromStr>(name: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Usage(format!("--{name}: {e}")))
}

pub fn dispatch(command: Command, s: &Settings) -> Result<(), CliError> {
    match command {
        Command::Lift {
            input,
            kind,
            max_dim,
            max_ring,
            index,
            out,
            input_args,
        } => {
            let kind: ComplexKind = parse_arg("kind", &kind)?;
            let g = read_graph(&input, input_args.format, index)?;
            let cx = lift(&g, &spec_for(kind, max_dim, max_ring, s)).map_err(lift_error)?;
            if let Some(path) = &out {
                std::fs::write(path, serialize_complex(&cx)).map_err(|e| io_error(path, e))?;
            }
            print_counts(&cx, s.output_format);
            Ok(())
        }
        Command::Test {
            graph_a,
            graph_b,
            method,
            max_dim,
            max_ring,
            layers,
            rule,
            index_a,
            index_b,
            dump_histograms,
            input_args,
        } => {
            let method: Method = parse_arg("method", &method)?;
            let rule: UpdateRule = parse_arg("rule", &rule)?;
            let a = read_graph(&graph_a, input_args.format, index_a)?;
            let b = read_graph(&graph_b, input_args.format, index_b)?;
            let cfg = run_config(method, max_dim, max_ring, layers, rule, s);
            cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            if method.is_network() {
                test_network(&a, &b, &cfg, s.output_format)
            } else {
                test_refinement(&a, &b, &cfg, dump_histograms, s.output_format)
            }
        }
        Command::Bench {
            manifest,
            methods,
            max_dim,
            max_ring,
            layers,
            rule,
            pairwise,
            out_dir,
        } => {
            let methods = methods
                .split(',')
                .map(|m| parse_arg::<Method>("methods", m.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            let layers = parse_usize_list(&layers).map_err(CliError::Usage)?;
            let rule: UpdateRule = parse_arg("rule", &rule)?;
            let mut configs = Vec::new();
            for &m in &methods {
                let ls: &[usize] = if m.is_network() {
                    &layers
                } else {
                    &layers[..1]
                };
                for &l in ls {
                    let mut cfg = run_config(m, max_dim, max_ring, l, rule, s);
                    cfg.joint = !pairwise;
                    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
                    configs.push(cfg);
                }
            }
            bench(&manifest, &configs, &out_dir, s.output_format)
        }
        Command::Families {
            input,
            max_ring,
            index,
            input_args,
        } => {
            let g = read_graph(&input, input_args.format, index)?;
            let max_ring = max_ring.unwrap_or(g.n()).max(3);
            let spec = LiftSpec::ring(max_ring).with_member_cap(s.member_cap);
            let cx = lift(&g, &spec).map_err(lift_error)?;
            print!("{}", format_families(&cx));
            Ok(())
        }
        Command::TimeLift {
            inputs,
            kind,
            sizes,
            repeats,
            input_args,
        } => {
            let kind: ComplexKind = parse_arg("kind", &kind)?;
            let sizes = parse_usize_list(&sizes).map_err(CliError::Usage)?;
            let mut graphs = Vec::new();
            for path in &inputs {
                graphs.extend(read_graphs(path, input_args.format)?);
            }
            let mut rows = Vec::new();
            for size in sizes {
                let spec = spec_for(kind, size, size, s);
                let stats = time_lifting(&graphs, &spec, repeats).map_err(|e| match e {
                    BenchError::Lift { source, .. } => lift_error(source),
                    other => CliError::Usage(other.to_string()),
                })?;
                rows.push((size, stats));
            }
            match s.output_format {
                OutputFormat::Json => {
                    let stats: Vec<_> = rows.iter().map(|(_, st)| st).collect();
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&stats).expect("serializable")
                    );
                }
                OutputFormat::Csv => {
                    println!("kind,size,graphs,mean_ms,std_ms,members");
                    for (size, st) in &rows {
                        println!(
                            "{kind},{size},{},{:.3},{:.3},{}",
                            st.graphs,
                            st.mean_ms,
                            st.std_ms,
                            st.members.iter().sum::<usize>()
                        );
                    }
                }
                OutputFormat::Text => {
                    for (size, st) in &rows {
                        println!(
                            "{kind} size {size}: {:.3} ± {:.3} ms over {} graphs, {} members",
                            st.mean_ms,
                            st.std_ms,
                            st.graphs,
                            st.members.iter().sum::<usize>()
                        );
                    }
                }
            }
            Ok(())
        }
    }
}

fn print_counts(cx: &HigherOrderComplex, format: OutputFormat) {
    let counts = cx.counts();
    match format {
        OutputFormat::Json => println!(
            "{}",
            json!({ "kind": cx.kind().as_str(), "vertices": cx.vertex_count(), "counts": counts })
        ),
        OutputFormat::Csv => {
            println!("dim,count");
            for (p, c) in counts.iter().enumerate() {
                println!("{p},{c}");
            }
        }
        OutputFormat::Text => {
            let parts: Vec<String> = counts.iter().map(ToString::to_string).collect();
            println!("{}", parts.join(" "));
        }
    }
}

fn verdict(distinguished: bool) -> &'static str {
    if distinguished {
        "DISTINGUISHED"
    } else {
        "NOT-DISTINGUISHED"
    }
}

fn histogram_line(h: &ColorHistogram) -> String {
    let parts: Vec<String> = h.iter().map(|(c, n)| format!("{c}:{n}")).collect();
    parts.join(" ")
}

fn test_refinement(
    a: &SimpleGraph,
    b: &SimpleGraph,
    cfg: &RunConfig,
    dump: bool,
    format: OutputFormat,
) -> Result<(), CliError> {
    let (ha, hb, rounds) = match cfg.lift_spec() {
        None => wl1_refine_pair(a, b),
        Some(spec) => {
            let x = lift(a, &spec).map_err(lift_error)?;
            let y = lift(b, &spec).map_err(lift_error)?;
            refine_pair(&x, &y, cfg.rule, None).expect("same lifting kind")
        }
    };
    let d = distinguishes(&ha, &hb);
    match format {
        OutputFormat::Json => {
            let mut v = json!({ "method": cfg.label(), "verdict": verdict(d), "rounds": rounds });
            if dump {
                let hist = |h: &ColorHistogram| h.iter().collect::<Vec<_>>();
                v["histograms"] = json!([hist(&ha), hist(&hb)]);
            }
            println!("{v}");
        }
        OutputFormat::Csv => {
            println!("method,verdict,rounds");
            println!("{},{},{rounds}", cfg.label(), verdict(d));
        }
        OutputFormat::Text => {
            println!("{} rounds={rounds}", verdict(d));
            if dump {
                println!("A: {}", histogram_line(&ha));
                println!("B: {}", histogram_line(&hb));
            }
        }
    }
    Ok(())
}

fn test_network(
    a: &SimpleGraph,
    b: &SimpleGraph,
    cfg: &RunConfig,
    format: OutputFormat,
) -> Result<(), CliError> {
    let spec = cfg.lift_spec().expect("network methods lift");
    let cxs = [
        lift(a, &spec).map_err(lift_error)?,
        lift(b, &spec).map_err(lift_error)?,
    ];
    if cxs[0].max_dim() != cxs[1].max_dim() {
        return Err(CliError::Usage(
            "lifted complexes have different maximum dimensions".into(),
        ));
    }
    let mut rows = Vec::new();
    for &seed in &cfg.seeds {
        let emb = embed_family(&cxs, cfg, seed).map_err(|e| CliError::Usage(e.to_string()))?;
        let dist = embedding_distance(&emb[0], &emb[1]).expect("same embedding length");
        rows.push((seed, dist, dist >= cfg.epsilon));
    }
    let separated = rows.iter().filter(|r| r.2).count();
    let overall = separated == rows.len();
    match format {
        OutputFormat::Json => {
            let seeds: Vec<_> = rows
                .iter()
                .map(|(s, d, v)| json!({ "seed": s, "distance": d, "verdict": verdict(*v) }))
                .collect();
            println!(
                "{}",
                json!({ "method": cfg.label(), "layers": cfg.layers, "seeds": seeds, "verdict": verdict(overall) })
            );
        }
        OutputFormat::Csv => {
            println!("seed,distance,verdict");
            for (s, d, v) in &rows {
                println!("{s},{d:e},{}", verdict(*v));
            }
        }
        OutputFormat::Text => {
            for (s, d, v) in &rows {
                println!("seed {s}: {} distance={d:.6e}", verdict(*v));
            }
            println!("{} seeds={separated}/{}", verdict(overall), rows.len());
        }
    }
    Ok(())
}

fn bench(
    manifest: &Path,
    configs: &[RunConfig],
    out_dir: &Path,
    format: OutputFormat,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(manifest).map_err(|e| io_error(manifest, e))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let families = parse_manifest(&text, base).map_err(|e| CliError::Input(e.to_string()))?;
    if families.is_empty() {
        eprintln!("warning: {} lists no families", manifest.display());
    }
    let report = sweep(&families, configs);
    write_reports(&report, out_dir)?;

    let mut stdout = std::io::stdout().lock();
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut stdout, &report).expect("serializable");
            writeln!(stdout).ok();
        }
        OutputFormat::Csv => {
            write_csv(&report.reports, &mut stdout).map_err(|e| CliError::Input(e.to_string()))?
        }
        OutputFormat::Text => {
            if !report.reports.is_empty() {
                write!(stdout, "{}", format_matrix(&report.reports)).ok();
            }
        }
    }
    for r in &report.reports {
        match &r.status {
            CellStatus::Ok => {}
            CellStatus::Skipped { reason } => {
                eprintln!("skipped {} {}: {reason}", r.family, r.config.label())
            }
            CellStatus::Error { message } => {
                eprintln!("error {} {}: {message}", r.family, r.config.label())
            }
        }
    }

    let reports = &report.reports;
    if reports.is_empty() || reports.iter().any(|r| r.is_ok()) {
        return Ok(());
    }
    if reports
        .iter()
        .all(|r| matches!(r.status, CellStatus::Skipped { .. }))
    {
        Err(CliError::Cap("every cell exceeded the member cap".into()))
    } else {
        Err(CliError::Input("every cell failed".into()))
    }
}

fn write_reports(report: &SweepReport, out_dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;
    let csv_path = out_dir.join("report.csv");
    let file = std::fs::File::create(&csv_path).map_err(|e| io_error(&csv_path, e))?;
    write_csv(&report.reports, file).map_err(|e| CliError::Input(e.to_string()))?;
    let json_path = out_dir.join("report.json");
    let text = serde_json::to_string_pretty(report).expect("serializable");
    std::fs::write(&json_path, text + "\n").map_err(|e| io_error(&json_path, e))?;
    Ok(())
}

/// One `ring` line per 2-cell followed by its families from the top dimension down.
pub fn format_families(cx: &HigherOrderComplex) -> String {
    let cells = if cx.max_dim() >= 2 {
        cx.ids_of_dim(2)
    } else {
        0..0
    };
    if cells.is_empty() {
        return "no rings\n".into();
    }
    let mut out = String::new();
    for id in cells {
        let fam = cyclic_families(cx, id).expect("2-cell of a ring complex");
        let ring: Vec<String> = fam.ring.iter().map(ToString::to_string).collect();
        out.push_str(&format!("ring {}\n", ring.join(" ")));
        for p in (0..=fam.top_dim()).rev() {
            let members: Vec<String> = fam.family(p).iter().map(ToString::to_string).collect();
            out.push_str(&format!("F{p} = {{{}}}\n", members.join(", ")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_families() {
        let g = SimpleGraph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let cx = lift(&g, &LiftSpec::ring(4)).unwrap();
        let text = format_families(&cx);
        assert!(text.contains("F3 = {e0123, e0321, e1032, e2103}"), "{text}");
        let tree = lift(&SimpleGraph::path(5), &LiftSpec::ring(5)).unwrap();
        assert_eq!(format_families(&tree), "no rings\n");
    }
}

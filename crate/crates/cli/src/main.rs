//! `sts`: build, check and search Steiner triple systems from the shell.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sts_core::bounds::{bound_table, check_system};
use sts_core::dual::{dual_max_sum_formula, dual_min_sum_formula};
use sts_core::io::{parse_popularity, to_canonical_json};
use sts_core::reproduce::{run_claims, Group, Status};
use sts_core::*;

#[derive(Parser)]
#[command(
    name = "sts",
    version,
    about = "Access-balanced Steiner triple systems"
)]
struct Cli {
    /// Output format; `reproduce` defaults to text, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the output here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionArg {
    Bose,
    Skolem,
}

impl From<ConstructionArg> for Construction {
    fn from(c: ConstructionArg) -> Self {
        match c {
            ConstructionArg::Bose => Construction::Bose,
            ConstructionArg::Skolem => Construction::Skolem,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MappingArg {
    Paper,
    Identity,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Yxi,
    Natural,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Maxmin,
    Mindiff,
    Minratio,
    Maxdualmin,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Reduced,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlacementArg {
    Blocks,
    Dual,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    Fast,
    Medium,
    Long,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a system and write it as a design file.
    Generate {
        #[arg(long, value_enum)]
        construction: ConstructionArg,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "paper")]
        mapping: MappingArg,
        #[arg(long, value_enum, default_value = "yxi")]
        order: OrderArg,
    },
    /// Check that a design file holds a Steiner triple system.
    Verify { file: PathBuf },
    /// Block-sum and dual-sum statistics of a design file.
    Stats { file: PathBuf },
    /// Evaluate the bounds for n (and k, t).
    Bounds {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        t: u32,
    },
    /// Labeled design plus dual sums against their closed forms.
    Dual {
        #[arg(long, value_enum)]
        construction: ConstructionArg,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "yxi")]
        order: OrderArg,
    },
    /// Search relabelings or block labelings of a design.
    Search {
        #[arg(long)]
        design: PathBuf,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        /// Node limit; the result says whether the search finished.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, env = "STS_JOBS")]
        jobs: Option<usize>,
        /// Allow the reduced search above n = 19.
        #[arg(long)]
        allow_large: bool,
    },
    /// Use a design as a fractional repetition code placement.
    Frc {
        #[arg(long)]
        design: PathBuf,
        #[arg(long, value_enum)]
        mode: PlacementArg,
        /// JSON array of integers or "p/q" strings, one per chunk.
        #[arg(long)]
        popularity: Option<PathBuf>,
        /// Repair only this node; by default every node is repaired.
        #[arg(long)]
        fail: Option<usize>,
    },
    /// Recompute the published numbers and print a pass/fail table.
    Reproduce {
        #[arg(long, value_enum, value_delimiter = ',', default_value = "fast,medium")]
        group: Vec<GroupArg>,
        /// Also run the long group.
        #[arg(long)]
        long: bool,
        #[arg(long, env = "STS_JOBS")]
        jobs: Option<usize>,
    },
}

/// A command outcome: the document to print and whether it reports success.
struct Report {
    body: Value,
    text: Option<String>,
    ok: bool,
}

impl Report {
    fn ok(body: Value) -> Self {
        Report {
            body,
            text: None,
            ok: true,
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Congruence { .. }
            | Error::BoundParameters { .. }
            | Error::ReducedObjective
            | Error::SearchTooLarge(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn read_design(path: &Path) -> Result<DesignFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    DesignFile::from_json(&text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<Report, Failure> {
    match command {
        Command::Generate {
            construction,
            n,
            mapping,
            order,
        } => {
            let mapping = match mapping {
                MappingArg::Paper => Mapping::Paper,
                MappingArg::Identity => Mapping::Identity,
            };
            let (sts, lab) = generate_design(
                construction.into(),
                n,
                mapping,
                matches!(order, OrderArg::Yxi),
            )?;
            Ok(Report::ok(to_value(&DesignFile::from_system(
                &sts,
                Some(&lab),
            ))))
        }
        Command::Verify { file } => {
            let design = read_design(&file)?;
            let report = design.verify()?;
            let ok = report.is_ok();
            let body = json!({"n": design.n, "ok": ok, "report": to_value(&report)});
            Ok(Report {
                body,
                text: None,
                ok,
            })
        }
        Command::Stats { file } => {
            let design = read_design(&file)?;
            let sts = design.system()?;
            let lab = design.labeling()?;
            Ok(Report::ok(json!({
                "n": sts.n(),
                "blocks": sts.block_count(),
                "replication": sts.replication(),
                "sum_stats": to_value(&sts.sum_stats()),
                "dual_sum_stats": to_value(&dual_sum_stats(&sts, &lab)?),
            })))
        }
        Command::Bounds { n, k, t } => Ok(Report::ok(to_value(&bound_table(n, k, t)?))),
        Command::Dual {
            construction,
            n,
            order,
        } => {
            let construction = Construction::from(construction);
            let yxi = matches!(order, OrderArg::Yxi);
            let (sts, lab) = generate_design(construction, n, Mapping::Paper, yxi)?;
            let scheme = OrderingScheme::new(construction, yxi);
            let stats = dual_sum_stats(&sts, &lab)?;
            let f = dual_min_sum_formula(scheme, n).ok();
            let g = dual_max_sum_formula(scheme, n).ok();
            let min_matches = f.map(|f| f == stats.min_sum as i128);
            let max_matches = g.map(|g| g == stats.max_sum as i128);
            let ok = min_matches != Some(false) && max_matches != Some(false);
            let body = json!({
                "design": to_value(&DesignFile::from_system(&sts, Some(&lab))),
                "report": {
                    "scheme": scheme.name(),
                    "dual_min_sum": stats.min_sum,
                    "dual_max_sum": stats.max_sum,
                    "formula_min_sum": f.map(|v| v.to_string()),
                    "formula_max_sum": g.map(|v| v.to_string()),
                    "min_matches": min_matches,
                    "max_matches": max_matches,
                    "bounds": to_value(&check_system(&sts, Some(&lab))?),
                },
            });
            Ok(Report {
                body,
                text: None,
                ok,
            })
        }
        Command::Search {
            design,
            objective,
            mode,
            budget,
            jobs,
            allow_large,
        } => {
            let sts = read_design(&design)?.system()?;
            let objective = match objective {
                ObjectiveArg::Maxmin => Objective::MaxMinSum,
                ObjectiveArg::Mindiff => Objective::MinDifferenceSum,
                ObjectiveArg::Minratio => Objective::MinRatioSum,
                ObjectiveArg::Maxdualmin => Objective::MaxDualMinSum,
            };
            let mode = match mode {
                ModeArg::Full => SearchMode::Full,
                ModeArg::Reduced => SearchMode::Reduced,
            };
            let mut task = SearchTask::new(sts, objective, mode);
            task.budget = budget;
            task.jobs = jobs.filter(|&j| j > 0);
            task.allow_large = allow_large;
            Ok(Report::ok(to_value(&task.run()?)))
        }
        Command::Frc {
            design,
            mode,
            popularity,
            fail,
        } => {
            let design = read_design(&design)?;
            let sts = design.system()?;
            let lab = design.labeling()?;
            let mode = match mode {
                PlacementArg::Blocks => PlacementMode::Blocks,
                PlacementArg::Dual => PlacementMode::Dual,
            };
            let mut frc = placement_from_design(&sts, mode, Some(&lab))?;
            if let Some(path) = popularity {
                let text = fs::read_to_string(&path)
                    .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
                frc = frc.with_popularity(parse_popularity(&text)?)?;
            }
            let failed: Vec<usize> = match fail {
                Some(node) => vec![node],
                None => (0..frc.node_count()).collect(),
            };
            let repairs = failed
                .into_iter()
                .map(|node| simulate_repair(&frc, node))
                .collect::<Result<Vec<_>, _>>()?;
            let ok = repairs.iter().all(|r| r.exact);
            let body = json!({
                "mode": mode.to_string(),
                "chunks": frc.chunk_count(),
                "nodes": frc.node_count(),
                "repetition": frc.repetition(),
                "repair_degree": frc.repair_degree(),
                "max_pairwise_intersection": frc.max_pairwise_intersection(),
                "placement": frc.placement(),
                "balance": to_value(&balance_report(&frc)),
                "repairs": to_value(&repairs),
            });
            Ok(Report {
                body,
                text: None,
                ok,
            })
        }
        Command::Reproduce { group, long, jobs } => {
            let mut groups: Vec<Group> = group
                .into_iter()
                .map(|g| match g {
                    GroupArg::Fast => Group::Fast,
                    GroupArg::Medium => Group::Medium,
                    GroupArg::Long => Group::Long,
                })
                .collect();
            if long {
                groups.push(Group::Long);
            }
            let results = match jobs.filter(|&j| j > 0) {
                Some(j) => rayon_pool(j)?.install(|| run_claims(&groups)),
                None => run_claims(&groups),
            };
            let ok = results.iter().all(|r| r.status != Status::Fail);
            let mut text = String::new();
            for r in &results {
                text.push_str(&format!(
                    "{:<8} {:<4} {:<6} {}: {} ({} ms)\n",
                    r.id,
                    r.status.to_string(),
                    r.group.to_string(),
                    r.title,
                    r.detail,
                    r.millis
                ));
            }
            let count = |s: Status| results.iter().filter(|r| r.status == s).count();
            text.push_str(&format!(
                "{} passed, {} failed, {} skipped\n",
                count(Status::Pass),
                count(Status::Fail),
                count(Status::Skipped)
            ));
            Ok(Report {
                body: to_value(&results),
                text: Some(text),
                ok,
            })
        }
    }
}

fn rayon_pool(jobs: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Runtime(format!("thread pool: {e}")))
}

/// Flat `key: value` lines for objects, with nested values as compact JSON.
fn render_text(v: &Value) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}: {s}\n"),
                v => format!("{k}: {v}\n"),
            })
            .collect(),
        Value::Array(items) => items.iter().map(|v| format!("{v}\n")).collect(),
        v => format!("{v}\n"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default_format = match cli.command {
        Command::Reproduce { .. } => Format::Text,
        _ => Format::Json,
    };
    let format = cli.format.unwrap_or(default_format);
    match run(cli.command) {
        Ok(report) => {
            let output = match format {
                Format::Json => to_canonical_json(&report.body),
                Format::Text => report.text.unwrap_or_else(|| render_text(&report.body)),
            };
            let written = match &cli.out {
                Some(path) => {
                    fs::write(path, &output).map_err(|e| format!("{}: {e}", path.display()))
                }
                None => {
                    print!("{output}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

//! Command-line surface.
//!
//! JSON reports go to stdout, a one-line summary to stderr. Exit codes:
//! 0 all checks pass, 1 a check failed, 2 usage or parse error, 3 some
//! verdict is unknown within the budget.

use std::ffi::OsString;
use std::io::Write;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::builders::{self, BUILTINS};
use crate::demo::{self, DEMOS};
use crate::extend::{self, TopMeasure};
use crate::oracle::{self, Oracle, OracleBudget};
use crate::partition::{self, Walk};
use crate::region::Region;
use crate::report::{Budget, Verdict};
use crate::solid::{self, Model};
use crate::space::FiniteSpace;
use crate::ssf;
use crate::value::Value;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "topomeasure",
    version,
    about = "Solid-set functions and topological measures on finite face posets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Work allowance for exhaustive checks.
    #[arg(long, global = true, env = "TOPOMEASURE_BUDGET")]
    budget: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Tie-breaking seed for search order; results never depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct SpaceArg {
    /// A descriptor file, `builtin:name(params)` or a builtin name.
    #[arg(long = "space", value_name = "SPACE")]
    flag: Option<String>,
    #[arg(value_name = "SPACE", conflicts_with = "flag")]
    positional: Option<String>,
}

impl SpaceArg {
    fn get(&self) -> Result<&str, String> {
        self.flag
            .as_deref()
            .or(self.positional.as_deref())
            .ok_or_else(|| "missing --space".to_string())
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the solid-set function axioms.
    ValidateSsf {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        ssf: String,
    },
    /// Emit μ on the bounded solid sets, the labelled regions and X, or on
    /// every open and closed region with --all.
    Extend {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        ssf: String,
        #[arg(long)]
        all: bool,
    },
    /// Evaluate μ (or a raw evaluator) on one region.
    Eval {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, conflicts_with = "mu")]
        ssf: Option<String>,
        /// Raw evaluator such as `constant 1`.
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        region: String,
    },
    /// Check the topological measure axioms and classify.
    ValidateTm {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, conflicts_with = "mu")]
        ssf: Option<String>,
        #[arg(long)]
        mu: Option<String>,
    },
    /// Genus of a compact space, or of X̂ for a noncompact one.
    Genus {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, default_value_t = partition::DEFAULT_FAMILY_BOUND)]
        family_size: usize,
    },
    /// Solid partitions of a region.
    Partitions {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        region: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_parts: usize,
    },
    /// Run a worked example, or all of them.
    Demo {
        #[arg(value_name = "NAME")]
        name: String,
    },
    /// Compare the engine with the brute-force oracle.
    OracleCheck {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        ssf: Vec<String>,
    },
    /// List the builtin spaces.
    ListSpaces,
}

/// Failure before any verdict was produced.
#[derive(Debug)]
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

/// Resolves `--space`.
pub fn load_space(spec: &str) -> Result<FiniteSpace, String> {
    if let Some(b) = spec.strip_prefix("builtin:") {
        return builders::builtin(b).map_err(|e| e.to_string());
    }
    let path = std::path::Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{spec}: {e}"))?;
        return FiniteSpace::from_descriptor(&text).map_err(|e| e.to_string());
    }
    builders::builtin(spec).map_err(|e| e.to_string())
}

/// Parses a raw evaluator; only `constant <value>` is supported.
fn raw_mu(model: Arc<Model>, text: &str) -> Result<TopMeasure, String> {
    let mut words = text.split_whitespace();
    match (words.next(), words.next(), words.next()) {
        (Some("constant"), Some(v), None) => {
            let v: Value = v.parse().map_err(|e| format!("bad constant: {e}"))?;
            Ok(TopMeasure::constant(model, v))
        }
        _ => Err(format!(
            "unknown raw evaluator {text:?}, expected `constant <value>`"
        )),
    }
}

fn measure(model: &Arc<Model>, ssf: Option<&str>, mu: Option<&str>) -> Result<TopMeasure, String> {
    match (ssf, mu) {
        (Some(d), None) => {
            let l = ssf::parse_descriptor(Arc::clone(model), d).map_err(|e| e.to_string())?;
            Ok(TopMeasure::extend(Arc::new(l)))
        }
        (None, Some(m)) => raw_mu(Arc::clone(model), m),
        _ => Err("give exactly one of --ssf and --mu".to_string()),
    }
}

fn exit_for(verdict: &str) -> i32 {
    match verdict {
        "pass" => EXIT_PASS,
        "fail" => EXIT_FAIL,
        _ => EXIT_UNKNOWN,
    }
}

struct Out<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
    format: Format,
}

impl Out<'_> {
    fn json<T: Serialize>(&mut self, v: &T) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(v).map_err(std::io::Error::other)?;
        writeln!(self.stdout, "{text}")
    }

    fn csv(&mut self, header: &[&str], rows: &[Vec<String>]) -> std::io::Result<()> {
        writeln!(self.stdout, "{}", header.join(","))?;
        for r in rows {
            let cells: Vec<String> = r.iter().map(|c| csv_field(c)).collect();
            writeln!(self.stdout, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// Checks as JSON, or as `name,verdict` rows.
    fn checks<T: Serialize>(
        &mut self,
        report: &T,
        rows: Vec<(String, &Verdict)>,
    ) -> std::io::Result<()> {
        match self.format {
            Format::Json => self.json(report),
            Format::Csv => {
                let rows: Vec<Vec<String>> = rows
                    .into_iter()
                    .map(|(n, v)| vec![n, v.label().to_string()])
                    .collect();
                self.csv(&["check", "verdict"], &rows)
            }
        }
    }

    fn summary(&mut self, text: &str) {
        let _ = writeln!(self.stderr, "{text}");
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    let budget = cli.budget.map(Budget).unwrap_or(Budget::DEFAULT);
    let mut out = Out {
        stdout,
        stderr,
        format: cli.format,
    };
    match dispatch(cli.command, budget, &mut out) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            out.summary(&format!("error: {msg}"));
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command, budget: Budget, out: &mut Out) -> Result<i32, Usage> {
    match cmd {
        Command::ListSpaces => {
            let mut rows = Vec::new();
            for &(form, example) in BUILTINS {
                let s = builders::builtin(example)?;
                rows.push(json!({
                    "builtin": form,
                    "example": example,
                    "name": s.name(),
                    "cells": s.points().len(),
                    "compact": s.is_compact_space(),
                    "labels": s.labels().keys().collect::<Vec<_>>(),
                }));
            }
            match out.format {
                Format::Json => out.json(&rows)?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> = rows
                        .iter()
                        .map(|r| {
                            ["builtin", "example", "name", "cells", "compact"]
                                .iter()
                                .map(|k| match &r[*k] {
                                    serde_json::Value::String(s) => s.clone(),
                                    v => v.to_string(),
                                })
                                .collect()
                        })
                        .collect();
                    out.csv(&["builtin", "example", "name", "cells", "compact"], &rows)?
                }
            }
            Ok(EXIT_PASS)
        }
        Command::ValidateSsf { space, ssf } => {
            let model = Model::new(load_space(space.get()?)?);
            let l = ssf::parse_descriptor(Arc::clone(&model), &ssf)?;
            let r = ssf::validate_ssf(&l, budget);
            out.checks(
                &r,
                r.checks
                    .iter()
                    .map(|c| (c.name.clone(), &c.verdict))
                    .collect(),
            )?;
            out.summary(&format!("{}: {} on {}", r.overall(), r.function, r.space));
            Ok(exit_for(r.overall()))
        }
        Command::Extend { space, ssf, all } => {
            let model = Model::new(load_space(space.get()?)?);
            let l = Arc::new(ssf::parse_descriptor(Arc::clone(&model), &ssf)?);
            let mu = TopMeasure::extend(Arc::clone(&l));
            let sp = model.space();
            let regions = if all {
                let mut rs = Vec::new();
                let mut meter = crate::report::Meter::new(budget);
                let mut push = |r: Region| {
                    rs.push(r);
                    meter.spend(1)
                };
                let done = solid::for_each_up_set(sp, sp.points(), &mut push)
                    && solid::for_each_down_set(sp, sp.points(), &mut push);
                if !done {
                    return Err(Usage(format!(
                        "more open and closed sets than the budget of {}",
                        budget.0
                    )));
                }
                rs.sort_unstable();
                rs.dedup();
                rs
            } else {
                let mut rs: Vec<Region> = model.catalog().all();
                rs.extend(sp.labels().values().copied());
                rs.push(sp.points());
                rs.retain(|&r| sp.is_open(r) || sp.is_closed(r));
                rs.sort_unstable();
                rs.dedup();
                rs
            };
            let mut rows = Vec::new();
            for r in regions {
                let v = mu.value(r)?;
                rows.push((sp.format_region(r), v));
            }
            match out.format {
                Format::Json => {
                    let table: serde_json::Map<String, serde_json::Value> =
                        rows.iter().map(|(r, v)| (r.clone(), json!(v))).collect();
                    out.json(&json!({
                        "space": sp.name(),
                        "measure": mu.describe(),
                        "values": table,
                    }))?
                }
                Format::Csv => {
                    let rows: Vec<Vec<String>> = rows
                        .iter()
                        .map(|(r, v)| vec![r.clone(), v.to_string()])
                        .collect();
                    out.csv(&["region", "value"], &rows)?
                }
            }
            out.summary(&format!("{} regions", sp.name()));
            Ok(EXIT_PASS)
        }
        Command::Eval {
            space,
            ssf,
            mu,
            region,
        } => {
            let model = Model::new(load_space(space.get()?)?);
            let m = measure(&model, ssf.as_deref(), mu.as_deref())?;
            let sp = model.space();
            let r = sp.parse_region(&region)?;
            let v = m.value(r)?;
            match out.format {
                Format::Json => out.json(&json!({
                    "space": sp.name(),
                    "measure": m.describe(),
                    "region": sp.format_region(r),
                    "value": v,
                }))?,
                Format::Csv => out.csv(
                    &["region", "value"],
                    &[vec![sp.format_region(r), v.to_string()]],
                )?,
            }
            out.summary(&v.to_string());
            Ok(EXIT_PASS)
        }
        Command::ValidateTm { space, ssf, mu } => {
            let model = Model::new(load_space(space.get()?)?);
            let m = measure(&model, ssf.as_deref(), mu.as_deref())?;
            let r = extend::validate_tm(&m, budget)?;
            let rows = r
                .checks
                .iter()
                .chain(&r.properties)
                .map(|c| (c.name.clone(), &c.verdict))
                .collect();
            out.checks(&r, rows)?;
            out.summary(&format!(
                "{}: {} ({})",
                r.overall(),
                r.measure,
                r.classification
            ));
            Ok(exit_for(r.overall()))
        }
        Command::Genus { space, family_size } => {
            let sp = load_space(space.get()?)?;
            let g = if sp.is_compact_space() {
                partition::genus(&sp, family_size, budget)
            } else {
                partition::hatx_genus(&sp, budget)
            };
            match out.format {
                Format::Json => out.json(&g)?,
                Format::Csv => out.csv(
                    &["space", "genus", "exact"],
                    &[vec![
                        g.space.clone(),
                        g.genus.to_string(),
                        g.exact.to_string(),
                    ]],
                )?,
            }
            out.summary(&format!("{}: {}", g.space, g.describe()));
            Ok(if g.exact { EXIT_PASS } else { EXIT_UNKNOWN })
        }
        Command::Partitions {
            space,
            region,
            max_parts,
        } => {
            let model = Model::new(load_space(space.get()?)?);
            let sp = model.space();
            let target = match region {
                Some(r) => sp.parse_region(&r)?,
                None => sp.points(),
            };
            if target != sp.points() && !solid::is_solid(sp, target) {
                return Err(Usage(format!("{} is not solid", sp.format_region(target))));
            }
            let (parts, walk) =
                partition::enumerate_solid_partitions(&model, target, max_parts, budget);
            let complete = walk == Walk::Complete;
            match out.format {
                Format::Json => out.json(&json!({
                    "space": sp.name(),
                    "target": sp.format_region(target),
                    "max_parts": max_parts,
                    "complete": complete,
                    "partitions": parts,
                }))?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> = parts
                        .iter()
                        .enumerate()
                        .flat_map(|(i, p)| {
                            p.literals.iter().enumerate().map(move |(j, lit)| {
                                let kind = if p.closed_parts.contains(&j) {
                                    "closed"
                                } else {
                                    "open"
                                };
                                vec![i.to_string(), kind.to_string(), lit.clone()]
                            })
                        })
                        .collect();
                    out.csv(&["partition", "kind", "part"], &rows)?
                }
            }
            out.summary(&format!("{} partitions", parts.len()));
            Ok(if complete { EXIT_PASS } else { EXIT_UNKNOWN })
        }
        Command::Demo { name } => {
            let names: Vec<&str> = if name == "all" {
                DEMOS.to_vec()
            } else {
                vec![name.as_str()]
            };
            let mut reports = Vec::new();
            for n in names {
                reports.push(demo::run(n, budget)?);
            }
            let verdict = crate::report::overall(
                reports
                    .iter()
                    .map(|r| match r.verdict {
                        "pass" => Verdict::pass(),
                        "fail" => Verdict::fail(Default::default()),
                        _ => Verdict::unknown(""),
                    })
                    .collect::<Vec<_>>()
                    .iter(),
            );
            match out.format {
                Format::Json if reports.len() == 1 => out.json(&reports[0])?,
                Format::Json => out.json(&reports)?,
                Format::Csv => {
                    let mut rows = Vec::new();
                    for r in &reports {
                        for e in &r.expectations {
                            rows.push(vec![
                                r.demo.clone(),
                                e.name.clone(),
                                e.expected.to_string(),
                                e.actual.map_or_else(|| "error".into(), |v| v.to_string()),
                                if e.ok { "pass" } else { "fail" }.to_string(),
                            ]);
                        }
                        for c in &r.claims {
                            rows.push(vec![
                                r.demo.clone(),
                                c.name.clone(),
                                String::new(),
                                String::new(),
                                c.verdict.label().to_string(),
                            ]);
                        }
                    }
                    out.csv(&["demo", "item", "expected", "actual", "verdict"], &rows)?
                }
            }
            for r in &reports {
                out.summary(&format!("{}: {}", r.demo, r.verdict));
            }
            Ok(exit_for(verdict))
        }
        Command::OracleCheck { space, ssf } => {
            let model = Model::new(load_space(space.get()?)?);
            let sp = model.space();
            let o = match Oracle::new(sp, OracleBudget::default()) {
                Ok(o) => o,
                Err(e) => {
                    out.summary(&format!("refused: {e}"));
                    return Ok(EXIT_UNKNOWN);
                }
            };
            let mut runs = vec![oracle::cross_check_structure(&o)];
            let descriptors = if ssf.is_empty() {
                vec!["zero".to_string(), "measure w=@uniform".to_string()]
            } else {
                ssf
            };
            for d in &descriptors {
                let l = ssf::parse_descriptor(Arc::clone(&model), d)?;
                runs.push(oracle::cross_check_mu(&o, &l));
            }
            let ok = runs.iter().all(|a| a.ok());
            match out.format {
                Format::Json => out.json(&runs)?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> = runs
                        .iter()
                        .map(|a| {
                            vec![
                                a.subject.clone(),
                                a.compared.to_string(),
                                a.mismatches.len().to_string(),
                            ]
                        })
                        .collect();
                    out.csv(&["subject", "compared", "mismatches"], &rows)?
                }
            }
            out.summary(&format!(
                "{}: {} comparisons, {} mismatches",
                sp.name(),
                runs.iter().map(|a| a.compared).sum::<u64>(),
                runs.iter().map(|a| a.mismatches.len()).sum::<usize>()
            ));
            Ok(if ok { EXIT_PASS } else { EXIT_FAIL })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut o = Vec::new();
        let mut e = Vec::new();
        let mut argv = vec!["topomeasure"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut o, &mut e);
        (
            code,
            String::from_utf8(o).unwrap(),
            String::from_utf8(e).unwrap(),
        )
    }

    #[test]
    fn constant_one_fails_with_empty_pair() {
        let (code, out, _) = call(&[
            "validate-tm",
            "--space",
            "interval(2)",
            "--mu",
            "constant 1",
        ]);
        assert_eq!(code, EXIT_FAIL);
        let j: serde_json::Value = serde_json::from_str(&out).unwrap();
        let tm1 = j["checks"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["name"] == "tm1")
            .unwrap();
        assert_eq!(tm1["verdict"], "fail");
        let items = tm1["witness"]["items"].as_array().unwrap();
        assert!(items.iter().all(|i| i["region"] == ""));
        assert_eq!(j["classification"], extend::NOT_TM);
    }

    #[test]
    fn eval_majority_on_all() {
        let (code, out, _) = call(&[
            "eval",
            "--space",
            "sphere(3)",
            "--ssf",
            "point-majority points=q0,q1,q2",
            "--region",
            "@all",
        ]);
        assert_eq!(code, EXIT_PASS);
        let j: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(j["value"], "1");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(
            call(&[
                "eval",
                "--space",
                "torus(3)",
                "--mu",
                "constant 0",
                "--region",
                "x"
            ])
            .0,
            EXIT_USAGE
        );
        let (code, _, err) = call(&[
            "eval",
            "--space",
            "interval(2)",
            "--mu",
            "constant 0",
            "--region",
            "v0,zz",
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("zz"), "{err}");
    }

    #[test]
    fn oracle_check_passes_on_interval() {
        let (code, _, _) = call(&["oracle-check", "interval(2)", "--format", "csv"]);
        assert_eq!(code, EXIT_PASS);
    }

    #[test]
    fn genus_positional_space() {
        let (code, out, _) = call(&["genus", "circle(4)", "--format", "csv"]);
        assert_eq!(code, EXIT_PASS);
        assert!(out.contains("circle-4,1,true"), "{out}");
    }

    #[test]
    fn reports_are_byte_identical_across_runs() {
        let a = call(&["demo", "npoints"]);
        let b = call(&["demo", "npoints"]);
        assert_eq!(a.0, EXIT_PASS);
        assert_eq!(a.1, b.1);
        assert!(a.1.contains("\"1/2\""), "{}", a.1);
    }
}

//! Long-format CSV tables for plotting, one observation per row.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use ultraslow_core::WeightFunction;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    /// `relaxation_*.txt` → `t,v,kappa,lambda,mu_id`.
    Relaxation,
    /// `field.csv` → `x[,y],t,u,run` at selected times.
    FieldSlice,
    /// `harnack.csv` → `s,sw,log_ratio,bound,run`.
    Harnack,
    /// Weight files → `alpha,value,which`.
    MuCompare,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::Relaxation => "relaxation",
            PlotKind::FieldSlice => "field-slice",
            PlotKind::Harnack => "harnack",
            PlotKind::MuCompare => "mu-compare",
        }
    }
}

/// An input given as `label=path` or a bare path.
#[derive(Debug, Clone)]
pub struct Input {
    pub label: String,
    pub path: PathBuf,
}

impl Input {
    /// Without an explicit label, relaxation tables are labelled by their
    /// run directory and other inputs by their file stem.
    pub fn parse(arg: &str, kind: PlotKind) -> Self {
        if let Some((label, path)) = arg.split_once('=') {
            if !label.is_empty() && !label.contains(['/', '\\']) {
                return Self { label: label.into(), path: path.into() };
            }
        }
        let path = PathBuf::from(arg);
        let label = match kind {
            PlotKind::Relaxation | PlotKind::FieldSlice | PlotKind::Harnack => path
                .parent()
                .and_then(Path::file_name)
                .or_else(|| path.file_stem())
                .map(|s| s.to_string_lossy().into_owned()),
            PlotKind::MuCompare => path.file_stem().map(|s| s.to_string_lossy().into_owned()),
        }
        .unwrap_or_else(|| arg.to_string());
        Self { label, path }
    }

    pub fn read(&self) -> Result<String, CliError> {
        std::fs::read_to_string(&self.path)
            .map_err(|e| CliError::usage(format!("plot input {}: {e}", self.path.display())))
    }
}

fn bad(input: &Input, line: usize, what: &str) -> CliError {
    CliError::usage(format!("{}:{}: {what}", input.path.display(), line + 1))
}

fn numbers(input: &Input, line: usize, text: &str, sep: impl Fn(char) -> bool) -> Result<Vec<f64>, CliError> {
    text.split(sep)
        .filter(|c| !c.is_empty())
        .map(|c| c.trim().parse::<f64>().map_err(|_| bad(input, line, &format!("bad number {c:?}"))))
        .collect()
}

pub fn emit(kind: PlotKind, inputs: &[Input], times: Option<&[f64]>) -> Result<String, CliError> {
    if inputs.is_empty() {
        return Err(CliError::usage("plotdata needs at least one --input"));
    }
    match kind {
        PlotKind::Relaxation => relaxation(inputs),
        PlotKind::FieldSlice => field_slice(inputs, times),
        PlotKind::Harnack => harnack(inputs),
        PlotKind::MuCompare => mu_compare(inputs),
    }
}

fn relaxation(inputs: &[Input]) -> Result<String, CliError> {
    let mut out = String::from("t,v,kappa,lambda,mu_id\n");
    for input in inputs {
        let text = input.read()?;
        let mut lambda = None;
        for (i, line) in text.lines().enumerate() {
            if let Some(rest) = line.strip_prefix("# lambda = ") {
                lambda = Some(rest.trim().to_string());
                continue;
            }
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let cols = numbers(input, i, line, char::is_whitespace)?;
            if cols.len() != 3 {
                return Err(bad(input, i, "expected t v kappa"));
            }
            let lambda = lambda.as_deref().ok_or_else(|| bad(input, i, "missing lambda header"))?;
            let _ = writeln!(out, "{},{},{},{lambda},{}", cols[0], cols[1], cols[2], input.label);
        }
    }
    Ok(out)
}

fn field_slice(inputs: &[Input], times: Option<&[f64]>) -> Result<String, CliError> {
    let mut header: Option<String> = None;
    let mut out = String::new();
    for input in inputs {
        let text = input.read()?;
        let mut lines = text.lines();
        let head = lines.next().ok_or_else(|| bad(input, 0, "empty field file"))?.trim().to_string();
        let width = head.split(',').count();
        if head != "x,t,u" && head != "x,y,t,u" {
            return Err(bad(input, 0, "expected header x,t,u or x,y,t,u"));
        }
        match &header {
            None => {
                let _ = writeln!(out, "{head},run");
                header = Some(head.clone());
            }
            Some(h) if *h != head => return Err(bad(input, 0, "fields of different dimension")),
            _ => {}
        }
        let rows: Vec<Vec<f64>> = lines
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| numbers(input, i + 1, l, |c| c == ','))
            .collect::<Result<_, _>>()?;
        if rows.iter().any(|r| r.len() != width) {
            return Err(bad(input, 0, "ragged rows"));
        }
        let mut distinct: Vec<f64> = rows.iter().map(|r| r[width - 2]).collect();
        distinct.dedup();
        let chosen: Vec<f64> = match times {
            Some(ts) => ts
                .iter()
                .map(|&t| {
                    *distinct
                        .iter()
                        .min_by(|a, b| (*a - t).abs().total_cmp(&(*b - t).abs()))
                        .expect("field has at least one time")
                })
                .collect(),
            None => {
                let m = distinct.len() - 1;
                (0..=4).map(|k| distinct[k * m / 4]).collect()
            }
        };
        for r in rows.iter().filter(|r| chosen.contains(&r[width - 2])) {
            let cols: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(out, "{},{}", cols.join(","), input.label);
        }
    }
    Ok(out)
}

fn harnack(inputs: &[Input]) -> Result<String, CliError> {
    let mut out = String::from("s,sw,log_ratio,bound,run\n");
    for input in inputs {
        let text = input.read()?;
        let fitted = text
            .lines()
            .find_map(|l| l.strip_prefix("# fitted_C="))
            .and_then(|rest| rest.split_whitespace().next())
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or_else(|| bad(input, 0, "missing fitted_C summary line"))?;
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let cols = numbers(input, i, line, |c| c == ',')?;
            if cols.len() != 5 {
                return Err(bad(input, i, "expected s,sw,sup,inf,log_ratio"));
            }
            let (s, sw, log_ratio) = (cols[0], cols[1], cols[4]);
            let _ = writeln!(out, "{s:e},{sw:e},{log_ratio:e},{:e},{}", fitted * (1.0 + sw), input.label);
        }
    }
    Ok(out)
}

fn mu_compare(inputs: &[Input]) -> Result<String, CliError> {
    let mut out = String::from("alpha,value,which\n");
    for input in inputs {
        let mu = WeightFunction::parse(&input.read()?)
            .map_err(|e| CliError::usage(format!("{}: {e}", input.path.display())))?;
        for (a, v) in mu.alpha_grid().iter().zip(mu.values()) {
            let _ = writeln!(out, "{a},{v},{}", input.label);
        }
    }
    Ok(out)
}

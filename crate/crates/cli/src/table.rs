use distvote_core::distortion::{distortion_on_metric, mechanism_distortion_bound_check, Bound};
use distvote_core::forge::{
    gen_equidistant_full_info, gen_line_full_info, gen_line_ordinal, gen_ordinal_general,
    random_trial, LineKind, RandomLimits,
};
use distvote_core::mechanisms::{
    max_weight_of_domination, LineReduced, MaxWeightOfDomination, MaxWeightOfOptimal, Mechanism,
};
use distvote_core::{Error, MetricInstance};
use serde::{Deserialize, Serialize};

use crate::commands::{emit, to_csv, to_json};
use crate::error::{read, CliError};
use crate::{Cli, Format, Result, TableArgs};

/// Overrides accepted by `table --params`.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct TableParams {
    /// Random instances for the general rows.
    pub trials: usize,
    /// Random instances for the line rows.
    pub line_trials: usize,
    pub k_full_info: usize,
    pub k_ordinal: usize,
    pub lambda_full_info: usize,
    pub lambda_ordinal: usize,
    pub eps: f64,
    pub q: usize,
    pub limits: RandomLimits,
}

impl Default for TableParams {
    fn default() -> Self {
        Self {
            trials: 10_000,
            line_trials: 5_000,
            k_full_info: 5,
            k_ordinal: 4,
            lambda_full_info: 2,
            lambda_ordinal: 4,
            eps: 1e-3,
            q: 1000,
            limits: RandomLimits::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub setting: &'static str,
    pub bound: String,
    pub lower_bound_instance: String,
    pub realized: f64,
    /// Least value the lower-bound instance must reach.
    pub target: f64,
    pub mechanism: String,
    pub trials: usize,
    pub max_distortion: f64,
    pub min_slack: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

struct Row {
    setting: &'static str,
    bound_label: &'static str,
    bound: Bound,
    lower: String,
    /// (realized, target)
    realized: std::result::Result<(f64, f64), String>,
    mechanism: Box<dyn Mechanism>,
    seed: u64,
    line: bool,
}

fn realized(inst: &MetricInstance, winner: usize) -> std::result::Result<f64, String> {
    distortion_on_metric(inst, winner)
        .map(|r| r.distortion)
        .map_err(|e| e.to_string())
}

fn ordinal_lower(g: distvote_core::forge::Generated) -> std::result::Result<f64, String> {
    let out = max_weight_of_domination(g.profile.as_ref().expect("ordinal family"))
        .map_err(|e| e.to_string())?;
    if out.winner != g.bad_alternative {
        return Err(format!(
            "mwd picked {} instead of {}",
            out.winner, g.bad_alternative
        ));
    }
    realized(&g.instance, out.winner)
}

fn rows(p: &TableParams, seed: u64) -> Vec<Row> {
    let eps = p.eps;
    let kf = p.k_full_info;
    let ko = p.k_ordinal;
    vec![
        Row {
            setting: "full information, general metric",
            bound_label: "2min{m,k}-1",
            bound: Bound::FullInfo,
            lower: format!("equidistant k={kf} lambda={} eps={eps}", p.lambda_full_info),
            realized: gen_equidistant_full_info(kf, p.lambda_full_info, eps)
                .map_err(|e| e.to_string())
                .and_then(|inst| realized(&inst, 0))
                .map(|d| (d, 2.0 * kf as f64 - 1.0 - 10.0 * eps)),
            mechanism: Box::new(MaxWeightOfOptimal::default()),
            seed,
            line: false,
        },
        Row {
            setting: "full information, line",
            bound_label: "3",
            bound: Bound::Constant(3.0),
            lower: format!("line final eps={eps}"),
            realized: gen_line_full_info(LineKind::Final { eps })
                .map_err(|e| e.to_string())
                .and_then(|inst| realized(&inst, 0))
                .map(|d| (d, 3.0 - 10.0 * eps)),
            mechanism: Box::new(LineReduced(MaxWeightOfOptimal::default())),
            seed: seed ^ 3,
            line: true,
        },
        Row {
            setting: "ordinal, general metric",
            bound_label: "4min{m,k}-1",
            bound: Bound::Ordinal,
            lower: format!("ordinal general k={ko} lambda={}", p.lambda_ordinal),
            realized: gen_ordinal_general(ko, p.lambda_ordinal)
                .map_err(|e| e.to_string())
                .and_then(ordinal_lower)
                .map(|d| (d, 4.0 * ko as f64 - 1.0 - 1e-9)),
            mechanism: Box::new(MaxWeightOfDomination::default()),
            seed: seed ^ 6,
            line: false,
        },
        Row {
            setting: "ordinal, line",
            bound_label: "7",
            bound: Bound::Constant(7.0),
            lower: format!("line final eps={eps} q={}", p.q),
            realized: gen_line_ordinal(LineKind::Final { eps }, p.q)
                .map_err(|e| e.to_string())
                .and_then(ordinal_lower)
                .map(|d| (d, 7.0 - 20.0 * eps)),
            mechanism: Box::new(LineReduced(MaxWeightOfDomination::default())),
            seed: seed ^ 7,
            line: true,
        },
    ]
}

fn evaluate(row: Row, p: &TableParams) -> TableRow {
    let limits = if row.line {
        RandomLimits {
            dim_max: 1,
            ..p.limits
        }
    } else {
        p.limits
    };
    let trials = if row.line { p.line_trials } else { p.trials };
    let check = mechanism_distortion_bound_check(
        row.mechanism.as_ref(),
        |t| random_trial(row.seed, t, &limits),
        row.bound,
        trials,
    );
    let mut failure = Vec::new();
    let (realized, target) = match row.realized {
        Ok((d, t)) => {
            if d < t {
                failure.push(format!("lower-bound instance realizes {d}, needs {t}"));
            }
            (d, t)
        }
        Err(e) => {
            failure.push(format!("lower-bound instance: {e}"));
            (f64::NAN, f64::NAN)
        }
    };
    let (max_distortion, min_slack) = match check {
        Ok(r) => (r.max_distortion, r.min_slack),
        Err(Error::BoundViolation(v)) => {
            failure.push(format!(
                "trial {}: distortion {} above bound {}",
                v.trial, v.distortion, v.bound
            ));
            (v.distortion, v.bound - v.distortion)
        }
        Err(e) => {
            failure.push(e.to_string());
            (f64::NAN, f64::NAN)
        }
    };
    TableRow {
        setting: row.setting,
        bound: row.bound_label.into(),
        lower_bound_instance: row.lower,
        realized,
        target,
        mechanism: row.mechanism.name(),
        trials,
        max_distortion,
        min_slack,
        pass: failure.is_empty(),
        failure: (!failure.is_empty()).then(|| failure.join("; ")),
    }
}

pub fn table(cli: &Cli, args: &TableArgs) -> Result<()> {
    let mut p = match &args.params {
        Some(path) => serde_json::from_str::<TableParams>(&read(path)?)
            .map_err(|e| CliError::Param(format!("{}: {e}", path.display())))?,
        None => TableParams::default(),
    };
    if let Some(t) = args.trials {
        p.trials = t;
        p.line_trials = t;
    }
    if let Some(q) = args.q {
        p.q = q;
    }
    let table: Vec<TableRow> = rows(&p, cli.seed).into_iter().map(|r| evaluate(r, &p)).collect();
    let body = match cli.format {
        Format::Json => to_json(&table),
        Format::Csv => to_csv(&table)?,
        Format::Text => {
            let mut s = format!(
                "{:<34} {:<12} {:>10} {:>10} {:>10} {:>12} {:>7}  {}\n",
                "setting", "bound", "realized", "target", "trials", "min slack", "pass", "lower-bound instance"
            );
            for r in &table {
                s += &format!(
                    "{:<34} {:<12} {:>10.6} {:>10.6} {:>10} {:>12.6} {:>7}  {}\n",
                    r.setting,
                    r.bound,
                    r.realized,
                    r.target,
                    r.trials,
                    r.min_slack,
                    if r.pass { "PASS" } else { "FAIL" },
                    r.lower_bound_instance
                );
                if let Some(f) = &r.failure {
                    s += &format!("  {f}\n");
                }
            }
            s
        }
    };
    emit(args.out.as_deref(), &body)?;
    match table.iter().find(|r| !r.pass) {
        Some(r) => Err(CliError::TableFailed(format!(
            "{}: {}",
            r.setting,
            r.failure.as_deref().unwrap_or("")
        ))),
        None => Ok(()),
    }
}

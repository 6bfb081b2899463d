use std::path::Path;

use distvote_core::distortion::{
    adversarial_distortion, discrete_adversary, distortion_on_metric, DiscreteOptions,
    DistortionReport,
};
use distvote_core::forge::{Family, GeneratorParams, GeneratorSpec};
use distvote_core::io::{instance_to_json, parse_instance, profile_to_json, Instance};
use distvote_core::mechanisms::{
    centralized_veto, max_weight_of_domination_with, reduce_line_instance, Mechanism,
    MaxWeightOfDomination, MaxWeightOfOptimal, MechanismOutcome, PluralityVeto,
};
use distvote_core::{derive_profile, Precedence, TieRule, TAU_METRIC};
use serde::Serialize;

use crate::error::{read, write, CliError};
use crate::{Cli, DistortArgs, Format, GenerateArgs, MechanismName, Mode, Result, RunArgs, ValidateArgs};

/// Writes `body` to `out`, or stdout when no path is given.
pub fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(path) => write(path, body),
        None => {
            print!("{body}");
            if !body.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Param(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Param(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Shortest decimal form, `inf` for infinity.
pub fn num(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

fn load(path: &Path) -> Result<Instance> {
    Ok(parse_instance(&read(path)?)?)
}

fn tie_rule(spec: &str, inst: &Instance) -> Result<TieRule> {
    match spec {
        "recorded" => Ok(inst.tie_rule().cloned().unwrap_or_default()),
        "index" => Ok(TieRule::IndexOrder),
        other => {
            let list = other.strip_prefix("precedence:").ok_or_else(|| {
                CliError::Param(format!(
                    "unknown tie rule {other:?}; use recorded, index or precedence:<order>"
                ))
            })?;
            let order = list
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| CliError::Param(format!("bad precedence {list:?}: {e}")))?;
            if order.len() != inst.m() {
                return Err(CliError::Param(format!(
                    "precedence lists {} alternatives, instance has {}",
                    order.len(),
                    inst.m()
                )));
            }
            Ok(TieRule::Precedence {
                order: Precedence::new(order)?,
            })
        }
    }
}

fn profile(inst: &Instance, rule: &TieRule) -> Result<distvote_core::OrdinalProfile> {
    Ok(match inst {
        Instance::Metric { instance, .. } => derive_profile(instance, rule)?,
        Instance::Ordinal(p) => p.clone(),
    })
}

pub fn run_mechanism(name: MechanismName, inst: &Instance, rule: &TieRule) -> Result<MechanismOutcome> {
    let m = inst.m();
    let mwo = |rule: &TieRule| MaxWeightOfOptimal {
        precedence: Some(rule.precedence(m)),
    };
    Ok(match name {
        MechanismName::Mwo => mwo(rule).run(inst.metric()?)?,
        MechanismName::Mwd => match inst {
            Instance::Metric { instance, .. } => MaxWeightOfDomination {
                tie_rule: rule.clone(),
            }
            .run(instance)?,
            Instance::Ordinal(p) => max_weight_of_domination_with(p, &PluralityVeto, &rule.precedence(m))?,
        },
        MechanismName::Veto => centralized_veto(&profile(inst, rule)?)?,
        MechanismName::MwoLine | MechanismName::MwdLine => {
            let red = reduce_line_instance(inst.metric()?)?;
            let sub = rule.restrict(&red.kept);
            let out = if name == MechanismName::MwoLine {
                let mech = MaxWeightOfOptimal {
                    precedence: Some(sub.precedence(red.kept.len())),
                };
                mech.run(&red.instance)?
            } else {
                MaxWeightOfDomination { tie_rule: sub }.run(&red.instance)?
            };
            out.map_alternatives(&red.kept, m)
        }
    })
}

fn mechanism_label(name: MechanismName) -> &'static str {
    match name {
        MechanismName::Mwo => "mwo",
        MechanismName::Mwd => "mwd",
        MechanismName::Veto => "veto",
        MechanismName::MwoLine => "mwo-line",
        MechanismName::MwdLine => "mwd-line",
    }
}

#[derive(Serialize)]
struct GroupRow {
    group: usize,
    representative: usize,
    group_size: usize,
    winner: usize,
}

pub fn run(cli: &Cli, args: &RunArgs) -> Result<()> {
    let inst = load(&args.instance)?;
    let rule = tie_rule(&args.tie_rule, &inst)?;
    let out = run_mechanism(args.mechanism, &inst, &rule)?;
    let sizes = match &inst {
        Instance::Metric { instance, .. } => instance.grouping().sizes(),
        Instance::Ordinal(p) => p.grouping().sizes(),
    };
    let sizes = if out.representatives.len() == sizes.len() {
        sizes
    } else {
        vec![inst.n()]
    };
    let body = match cli.format {
        Format::Json => to_json(&out),
        Format::Csv => to_csv(
            &out.representatives
                .iter()
                .enumerate()
                .map(|(g, &r)| GroupRow {
                    group: g,
                    representative: r,
                    group_size: sizes[g],
                    winner: out.winner,
                })
                .collect::<Vec<_>>(),
        )?,
        Format::Text => {
            let weights: Vec<String> = out
                .rep_weights
                .iter()
                .map(|(x, w)| format!("{x}:{w}"))
                .collect();
            format!(
                "mechanism {}\nwinner {}\nrepresentatives {:?}\nweights {}\n",
                mechanism_label(args.mechanism),
                out.winner,
                out.representatives,
                weights.join(" ")
            )
        }
    };
    emit(args.out.as_deref(), &body)
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Param(format!("bad grid value {v:?}: {e}")))
        })
        .collect()
}

#[derive(Serialize)]
struct ReportRow<'a> {
    mechanism: &'a str,
    mode: &'a str,
    winner: usize,
    best_alt: usize,
    winner_welfare: f64,
    best_welfare: String,
    distortion: String,
    degenerate: bool,
}

pub fn distort(cli: &Cli, args: &DistortArgs) -> Result<()> {
    let inst = load(&args.instance)?;
    let rule = tie_rule(&args.tie_rule, &inst)?;
    let outcome = run_mechanism(args.mechanism, &inst, &rule)?;
    let w = outcome.winner;
    let report: DistortionReport = match args.mode {
        Mode::Exact => distortion_on_metric(inst.metric()?, w)?,
        Mode::Lp => adversarial_distortion(&profile(&inst, &rule)?, w)?,
        Mode::Discrete => {
            let grid = parse_grid(&args.grid)?;
            discrete_adversary(&profile(&inst, &rule)?, w, &grid, &DiscreteOptions { cap: args.cap })?
        }
    };
    let mode = match args.mode {
        Mode::Exact => "exact",
        Mode::Lp => "lp",
        Mode::Discrete => "discrete",
    };
    let body = match cli.format {
        Format::Json => to_json(&report),
        Format::Csv => to_csv(&[ReportRow {
            mechanism: mechanism_label(args.mechanism),
            mode,
            winner: report.winner,
            best_alt: report.best_alt,
            winner_welfare: report.winner_welfare,
            best_welfare: num(report.best_welfare),
            distortion: num(report.distortion),
            degenerate: report.degenerate,
        }])?,
        Format::Text => format!(
            "mechanism {} mode {mode}\nwinner {} welfare {}\nbest {} welfare {}\ndistortion {}{}\n",
            mechanism_label(args.mechanism),
            report.winner,
            num(report.winner_welfare),
            report.best_alt,
            num(report.best_welfare),
            num(report.distortion),
            if report.degenerate { " (all welfare zero)" } else { "" }
        ),
    };
    emit(args.out.as_deref(), &body)?;
    if let Some(bound) = args.assert_bound {
        if report.distortion > bound + TAU_METRIC {
            return Err(CliError::BoundExceeded(format!(
                "distortion {} exceeds asserted bound {bound}",
                num(report.distortion)
            )));
        }
    }
    Ok(())
}

fn family_from_cli(family: &str, kind: Option<&str>) -> Result<Family> {
    let kind_for = |choices: &[(&str, Family)]| -> Result<Family> {
        let k = kind.ok_or_else(|| {
            CliError::Param(format!("--family {family} needs --kind"))
        })?;
        choices
            .iter()
            .find(|(name, _)| *name == k)
            .map(|(_, f)| *f)
            .ok_or_else(|| CliError::Param(format!("unknown --kind {k:?} for --family {family}")))
    };
    match family {
        "line-full-info" => kind_for(&[
            ("chain-step", Family::LineFullInfoChain),
            ("final", Family::LineFinal3),
        ]),
        "line-ordinal" => kind_for(&[
            ("chain-step", Family::LineOrdinalChain),
            ("base-case", Family::LineOrdinalChain),
            ("final", Family::LineFinal7),
        ]),
        other => serde_json::from_value(serde_json::Value::String(other.to_string()))
            .map_err(|_| CliError::Param(format!("unknown family {other:?}"))),
    }
}

#[derive(Serialize)]
struct GenerateSummary {
    family: Family,
    n: usize,
    m: usize,
    k: usize,
    /// Distortion of the bad alternative; absent for random families.
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_ratio")]
    ratio: Option<f64>,
    bad_alternative: Option<usize>,
    q: Option<usize>,
    params: GeneratorParams,
}

mod opt_ratio {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => distvote_core::io::ratio::serialize(x, s),
            None => s.serialize_none(),
        }
    }
}

pub fn generate(cli: &Cli, args: &GenerateArgs) -> Result<()> {
    let mut spec = match &args.params {
        Some(path) => serde_json::from_str::<GeneratorSpec>(&read(path)?)
            .map_err(|e| CliError::Param(format!("{}: {e}", path.display())))?,
        None => {
            let family = args
                .family
                .as_deref()
                .ok_or_else(|| CliError::Param("--family or --params is required".into()))?;
            GeneratorSpec {
                family: family_from_cli(family, args.kind.as_deref())?,
                params: GeneratorParams::default(),
            }
        }
    };
    if args.params.is_some() && args.family.is_some() {
        spec.family = family_from_cli(args.family.as_deref().unwrap(), args.kind.as_deref())?;
    }
    let p = &mut spec.params;
    macro_rules! set {
        ($($f:ident),*) => { $( if args.$f.is_some() { p.$f = args.$f; } )* };
    }
    set!(k, m, n, lambda, ell, eps, dim, q);
    if args.kind.as_deref() == Some("base-case") {
        p.ell = None;
    }
    if matches!(spec.family, Family::RandomEuclidean | Family::RandomLine) && p.seed.is_none() {
        p.seed = Some(cli.seed);
    }
    let g = spec.generate()?;
    let random = matches!(spec.family, Family::RandomEuclidean | Family::RandomLine);
    let ratio = if random {
        None
    } else {
        Some(distortion_on_metric(&g.instance, g.bad_alternative)?.distortion)
    };
    let instance_json = instance_to_json(&g.instance, Some(&g.tie_rule));
    match &args.out {
        Some(path) => write(path, &(instance_json + "\n"))?,
        None => println!("{instance_json}"),
    }
    if let (Some(path), Some(profile)) = (&args.profile_out, &g.profile) {
        write(path, &(profile_to_json(profile) + "\n"))?;
    }
    let summary = GenerateSummary {
        family: spec.family,
        n: g.instance.n(),
        m: g.instance.m(),
        k: g.instance.k(),
        ratio,
        bad_alternative: (!random).then_some(g.bad_alternative),
        q: g.q,
        params: spec.params.clone(),
    };
    let text = match cli.format {
        Format::Json => to_json(&summary),
        Format::Csv => {
            let row = [(
                serde_json::to_value(summary.family).unwrap().as_str().unwrap().to_string(),
                summary.n,
                summary.m,
                summary.k,
                ratio.map(num).unwrap_or_default(),
            )];
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["family", "n", "m", "k", "ratio"])
                .and_then(|_| w.serialize(&row[0]))
                .map_err(|e| CliError::Param(e.to_string()))?;
            String::from_utf8(w.into_inner().map_err(|e| CliError::Param(e.to_string()))?).unwrap()
        }
        Format::Text => {
            let mut s = format!("n {} m {} k {}", summary.n, summary.m, summary.k);
            if let Some(r) = ratio {
                s += &format!(", ratio {}", num(r));
            }
            if let Some(q) = g.q {
                s += &format!(", q {q}");
            }
            s + "\n"
        }
    };
    // the instance owns stdout when no --out is given
    if args.out.is_some() {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
    Ok(())
}

#[derive(Serialize)]
struct ValidateSummary {
    valid: bool,
    kind: &'static str,
    n: usize,
    m: usize,
    k: usize,
}

pub fn validate(cli: &Cli, args: &ValidateArgs) -> Result<()> {
    let inst = load(&args.instance)?;
    let summary = ValidateSummary {
        valid: true,
        kind: match inst {
            Instance::Metric { ref instance, .. } if instance.line().is_some() => "line",
            Instance::Metric { .. } => "metric",
            Instance::Ordinal(_) => "ordinal",
        },
        n: inst.n(),
        m: inst.m(),
        k: inst.k(),
    };
    let body = match cli.format {
        Format::Json => to_json(&summary),
        Format::Csv => to_csv(&[summary])?,
        Format::Text => format!(
            "valid {} instance: n {} m {} k {}\n",
            summary.kind, summary.n, summary.m, summary.k
        ),
    };
    emit(None, &body)
}

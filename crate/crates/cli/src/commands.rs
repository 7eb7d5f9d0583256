//! Command dispatch. Every command renders its report in the requested
//! format and reports the exit status it implies.

use crate::report::{
    csv_string, exact, fixed, outcome_header, outcome_record, strings, text_table,
};
use crate::scenario::{Scenario, ScenarioError};
use persuade_lab::dictatorship::{enactment_envelope, enactment_value};
use persuade_lab::lab::{
    constrained_best_for, counterexample_report, dominance_compare, example_menu, theorem1_audit,
    AuditTable, Claim11Config, CounterexampleReport, LabContext, LabError,
};
use persuade_lab::{convex_order_compare, ConvexOrder};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_GOLDEN_MISMATCH: i32 = 2;

/// The restricted-menu example scenario shipped with the tool.
pub const COUNTEREXAMPLE_SCENARIO: &str = include_str!("../examples/counterexample.json");

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),

    #[error(transparent)]
    Lab(#[from] LabError),

    #[error("{0}")]
    Invalid(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Thresholds,
    /// `member` counts from 1.
    Dictatorship {
        member: usize,
        emit_plot: Option<PathBuf>,
    },
    Audit {
        r_grid: usize,
        samples: usize,
    },
    /// Menu entries counted from 1.
    Blackwell {
        a: usize,
        b: usize,
    },
    Constrained,
    Counterexample,
    Sweep {
        param: String,
        from: f64,
        to: f64,
        steps: usize,
        r_grid: usize,
        samples: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub stdout: String,
    pub exit_code: i32,
}

impl CommandOutput {
    fn ok(stdout: String) -> Self {
        CommandOutput {
            stdout,
            exit_code: EXIT_OK,
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn member_label(i: usize) -> String {
    format!("m{}", i + 1)
}

fn dictatorship_label(i: usize) -> String {
    format!("dictatorship(m{})", i + 1)
}

pub fn run_command(
    cmd: &Command,
    scenario: &Scenario,
    format: Format,
) -> Result<CommandOutput, CliError> {
    let ctx = LabContext::new(scenario.committee.clone(), scenario.file.grid_n);
    match cmd {
        Command::Thresholds => Ok(CommandOutput::ok(thresholds(&ctx, format))),
        Command::Dictatorship { member, emit_plot } => {
            dictatorship(scenario, &ctx, *member, emit_plot.as_ref(), format).map(CommandOutput::ok)
        }
        Command::Audit { r_grid, samples } => {
            let cfg = claim_config(scenario, *r_grid, *samples)?;
            let table = theorem1_audit(&ctx, &scenario.mechanisms, &cfg)?;
            Ok(CommandOutput::ok(audit(scenario, &table, format)))
        }
        Command::Blackwell { a, b } => blackwell(scenario, *a, *b, format).map(CommandOutput::ok),
        Command::Constrained => constrained(scenario, &ctx, format).map(CommandOutput::ok),
        Command::Counterexample => counterexample(scenario, format),
        Command::Sweep {
            param,
            from,
            to,
            steps,
            r_grid,
            samples,
        } => sweep(
            scenario, param, *from, *to, *steps, *r_grid, *samples, format,
        )
        .map(CommandOutput::ok),
    }
}

fn claim_config(
    scenario: &Scenario,
    r_grid: usize,
    samples: usize,
) -> Result<Claim11Config, CliError> {
    if r_grid < 2 {
        return Err(CliError::Invalid(format!(
            "--r-grid {r_grid} (need at least 2)"
        )));
    }
    Ok(Claim11Config {
        grid_n: r_grid,
        samples,
        seed: scenario.file.seed,
    })
}

#[derive(Serialize)]
struct ThresholdRow {
    member: usize,
    u: f64,
    q_low: f64,
    q_high: f64,
    indifference: f64,
    flat_contact: bool,
}

fn thresholds(ctx: &LabContext, format: Format) -> String {
    let rows: Vec<ThresholdRow> = ctx
        .thresholds
        .iter()
        .enumerate()
        .map(|(i, t)| ThresholdRow {
            member: i + 1,
            u: ctx.committee.members()[i].u,
            q_low: t.q_low,
            q_high: t.q_high,
            indifference: t.indifference,
            flat_contact: t.flat_contact,
        })
        .collect();
    let headers = strings(&[
        "member",
        "u",
        "q_low",
        "q_high",
        "indifference",
        "flat_contact",
    ]);
    let cells = |f: fn(f64) -> String| -> Vec<Vec<String>> {
        rows.iter()
            .map(|r| {
                vec![
                    member_label(r.member - 1),
                    f(r.u),
                    f(r.q_low),
                    f(r.q_high),
                    f(r.indifference),
                    r.flat_contact.to_string(),
                ]
            })
            .collect()
    };
    match format {
        Format::Json => json(&rows),
        Format::Csv => csv_string(&headers, &cells(exact)),
        Format::Text => {
            let mut out = text_table(&headers, &cells(fixed));
            let _ = writeln!(
                out,
                "most demanding: {} (q_hat = {})",
                member_label(ctx.q_hat_member),
                fixed(ctx.q_hat)
            );
            out
        }
    }
}

fn dictatorship(
    scenario: &Scenario,
    ctx: &LabContext,
    member: usize,
    emit_plot: Option<&PathBuf>,
    format: Format,
) -> Result<String, CliError> {
    let n = ctx.committee.len();
    if !(1..=n).contains(&member) {
        return Err(CliError::Invalid(format!(
            "--member {member} outside 1..={n}"
        )));
    }
    let i = member - 1;
    let eq = ctx.dictatorship(i);
    if let Some(path) = emit_plot {
        let grid = eq.enactment_fn.len();
        let rows: Vec<Vec<String>> = (0..grid)
            .map(|k| {
                let r = eq.enactment_fn.x(k);
                vec![
                    exact(r),
                    exact(enactment_value(&eq.thresholds, r)),
                    exact(enactment_envelope(&eq.thresholds, r)),
                ]
            })
            .collect();
        let text = csv_string(&strings(&["r", "zeta", "zeta_hat"]), &rows);
        std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    let hat = ctx.hat_dictatorship().outcome;
    let verdict = dominance_compare(&hat, &eq.outcome)?.verdict;
    Ok(match format {
        Format::Json => json(&eq),
        Format::Csv => csv_string(
            &outcome_header(&["scenario_id"], n),
            &[outcome_record(
                vec![scenario.id.clone()],
                &dictatorship_label(i),
                &eq.outcome,
                &verdict.to_string(),
            )],
        ),
        Format::Text => {
            let t = &eq.thresholds;
            let signal: Vec<String> = eq
                .lobbyist_signal
                .atoms()
                .map(|(q, w)| format!("{} w.p. {}", fixed(q), fixed(w)))
                .collect();
            let o = &eq.outcome;
            let mut out = String::new();
            let _ = writeln!(out, "{}", dictatorship_label(i));
            let _ = writeln!(
                out,
                "thresholds       {} .. {} (indifference {})",
                fixed(t.q_low),
                fixed(t.q_high),
                fixed(t.indifference)
            );
            let _ = writeln!(out, "lobbyist signal  {}", signal.join(", "));
            let _ = writeln!(
                out,
                "lobbyist payoff  {} (grid envelope {})",
                fixed(eq.lobbyist_payoff),
                fixed(eq.envelope_payoff)
            );
            let _ = writeln!(out, "P(enact | good)  {}", fixed(o.p_enact_good));
            let _ = writeln!(out, "P(enact | bad)   {}", fixed(o.p_enact_bad));
            let _ = writeln!(out, "P(enact)         {}", fixed(o.p_enact));
            let costs: Vec<String> = o.expected_cost.iter().copied().map(fixed).collect();
            let _ = writeln!(out, "expected costs   {}", costs.join(", "));
            let _ = writeln!(
                out,
                "vs {}: {verdict}",
                dictatorship_label(ctx.q_hat_member)
            );
            out
        }
    })
}

fn audit(scenario: &Scenario, table: &AuditTable, format: Format) -> String {
    let n = table.dictatorship_outcome.n_members();
    match format {
        Format::Json => json(table),
        Format::Csv => {
            let rows: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|r| {
                    outcome_record(
                        vec![scenario.id.clone()],
                        &r.mechanism,
                        &r.outcome,
                        &r.vs_outcome.verdict.to_string(),
                    )
                })
                .collect();
            csv_string(&outcome_header(&["scenario_id"], n), &rows)
        }
        Format::Text => {
            let headers = strings(&[
                "mechanism",
                "P(enact|good)",
                "P(enact|bad)",
                "P(enact)",
                "no-info check",
                "max violation",
                "verdict",
                "ok",
            ]);
            let rows: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|r| {
                    let worst = r
                        .claim
                        .per_member
                        .iter()
                        .flat_map(|m| {
                            [
                                m.max_violation_ineq1,
                                m.max_violation_ineq2,
                                m.max_violation_ineq3,
                            ]
                        })
                        .fold(0.0, f64::max);
                    vec![
                        r.mechanism.clone(),
                        fixed(r.outcome.p_enact_good),
                        fixed(r.outcome.p_enact_bad),
                        fixed(r.outcome.p_enact),
                        if r.claim.holds { "holds" } else { "fails" }.to_string(),
                        format!("{worst:.2e}"),
                        r.vs_outcome.verdict.to_string(),
                        r.ok.to_string(),
                    ]
                })
                .collect();
            let mut out = format!(
                "benchmark: {} (q_hat = {})\n",
                dictatorship_label(table.q_hat_member),
                fixed(table.q_hat)
            );
            out.push_str(&text_table(&headers, &rows));
            let _ = writeln!(out, "all rows ok: {}", table.all_ok);
            out
        }
    }
}

#[derive(Serialize)]
struct BlackwellReport {
    a: usize,
    b: usize,
    verdict: ConvexOrder,
}

fn blackwell(scenario: &Scenario, a: usize, b: usize, format: Format) -> Result<String, CliError> {
    let menu = scenario
        .menu
        .as_ref()
        .ok_or_else(|| CliError::Invalid("blackwell needs a menu in the scenario".into()))?;
    let n = menu.len();
    let pick = |k: usize| {
        menu.distributions()
            .get(k.wrapping_sub(1))
            .ok_or_else(|| CliError::Invalid(format!("menu entry {k} outside 1..={n}")))
    };
    let verdict = convex_order_compare(pick(a)?, pick(b)?).map_err(LabError::from)?;
    let report = BlackwellReport { a, b, verdict };
    Ok(match format {
        Format::Json => json(&report),
        Format::Csv => csv_string(
            &strings(&["a", "b", "verdict"]),
            &[vec![a.to_string(), b.to_string(), verdict.to_string()]],
        ),
        Format::Text => format!("menu[{a}] vs menu[{b}]: {verdict}\n"),
    })
}

fn constrained(scenario: &Scenario, ctx: &LabContext, format: Format) -> Result<String, CliError> {
    let menu = scenario
        .menu
        .as_ref()
        .ok_or_else(|| CliError::Invalid("constrained needs a menu in the scenario".into()))?;
    let n = ctx.committee.len();
    let choices = (0..n)
        .map(|j| constrained_best_for(ctx, j, menu))
        .collect::<Result<Vec<_>, _>>()?;
    let hat = &choices[ctx.q_hat_member].outcome;
    let verdicts = choices
        .iter()
        .map(|c| dominance_compare(hat, &c.outcome).map(|d| d.verdict))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match format {
        Format::Json => json(&choices),
        Format::Csv => {
            let rows: Vec<Vec<String>> = choices
                .iter()
                .zip(&verdicts)
                .map(|(c, v)| {
                    outcome_record(
                        vec![scenario.id.clone()],
                        &dictatorship_label(c.dictator),
                        &c.outcome,
                        &v.to_string(),
                    )
                })
                .collect();
            csv_string(&outcome_header(&["scenario_id"], n), &rows)
        }
        Format::Text => {
            let headers = strings(&[
                "mechanism",
                "menu entry",
                "payoff",
                "P(enact|good)",
                "P(block|bad)",
                "verdict",
            ]);
            let rows: Vec<Vec<String>> = choices
                .iter()
                .zip(&verdicts)
                .map(|(c, v)| {
                    vec![
                        dictatorship_label(c.dictator),
                        (c.chosen_index + 1).to_string(),
                        fixed(c.payoff),
                        fixed(c.outcome.p_enact_good),
                        fixed(c.outcome.p_block_bad()),
                        v.to_string(),
                    ]
                })
                .collect();
            let mut out = text_table(&headers, &rows);
            let _ = writeln!(
                out,
                "verdicts compare {} with each row",
                dictatorship_label(ctx.q_hat_member)
            );
            out
        }
    })
}

/// Re-judges every golden value against the scenario's tolerance.
pub fn apply_tolerance(report: &mut CounterexampleReport, tolerance: f64) {
    for c in &mut report.numeric {
        c.pass = (c.expected - c.actual).abs() <= tolerance;
    }
    report.all_pass = report.numeric.iter().all(|c| c.pass) && report.labels.iter().all(|c| c.pass);
}

fn counterexample(scenario: &Scenario, format: Format) -> Result<CommandOutput, CliError> {
    let menu = scenario.menu.clone().unwrap_or_else(example_menu);
    let mut report = counterexample_report(&scenario.committee, &menu, scenario.file.grid_n)?;
    apply_tolerance(&mut report, scenario.file.tolerance);
    let stdout = match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = report
                .numeric
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        exact(c.expected),
                        exact(c.actual),
                        c.pass.to_string(),
                    ]
                })
                .collect();
            rows.extend(report.labels.iter().map(|c| {
                vec![
                    c.name.clone(),
                    c.expected.clone(),
                    c.actual.clone(),
                    c.pass.to_string(),
                ]
            }));
            csv_string(&strings(&["check", "expected", "actual", "pass"]), &rows)
        }
        Format::Text => {
            let mark = |pass: bool| if pass { "PASS" } else { "FAIL" };
            let mut out = String::new();
            for c in &report.numeric {
                let _ = writeln!(
                    out,
                    "[{}] {:<46} {:.12}  (expected {:.12})",
                    mark(c.pass),
                    c.name,
                    c.actual,
                    c.expected
                );
            }
            for c in &report.labels {
                let _ = writeln!(
                    out,
                    "[{}] {:<46} {}  (expected {})",
                    mark(c.pass),
                    c.name,
                    c.actual,
                    c.expected
                );
            }
            let _ = writeln!(
                out,
                "{}",
                if report.all_pass {
                    "all golden values reproduced"
                } else {
                    "golden mismatch"
                }
            );
            out
        }
    };
    Ok(CommandOutput {
        stdout,
        exit_code: if report.all_pass {
            EXIT_OK
        } else {
            EXIT_GOLDEN_MISMATCH
        },
    })
}

#[derive(Serialize)]
struct SweepRow {
    scenario_id: String,
    param_value: f64,
    q_hat: f64,
    mechanism: String,
    p_enact_good: f64,
    p_enact_bad: f64,
    p_enact: f64,
    expected_cost: Vec<f64>,
    verdict: String,
}

/// `steps` evenly spaced values from `from` to `to`, both included.
pub fn sweep_values(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![from],
        _ => (0..steps)
            .map(|k| {
                if k == steps - 1 {
                    to
                } else {
                    from + (to - from) * k as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    scenario: &Scenario,
    param: &str,
    from: f64,
    to: f64,
    steps: usize,
    r_grid: usize,
    samples: usize,
    format: Format,
) -> Result<String, CliError> {
    if steps == 0 {
        return Err(CliError::Invalid("--steps must be at least 1".into()));
    }
    let cfg = claim_config(scenario, r_grid, samples)?;
    let mut rows = Vec::with_capacity(steps);
    for value in sweep_values(from, to, steps) {
        let s = scenario.with_param(param, value)?;
        let ctx = LabContext::new(s.committee.clone(), s.file.grid_n);
        let table = theorem1_audit(&ctx, &s.mechanisms, &cfg)?;
        let o = &table.dictatorship_outcome;
        rows.push(SweepRow {
            scenario_id: s.id.clone(),
            param_value: value,
            q_hat: table.q_hat,
            mechanism: dictatorship_label(table.q_hat_member),
            p_enact_good: o.p_enact_good,
            p_enact_bad: o.p_enact_bad,
            p_enact: o.p_enact,
            expected_cost: o.expected_cost.clone(),
            verdict: if table.all_ok { "dominant" } else { "violated" }.to_string(),
        });
    }
    let n = scenario.committee.len();
    let headers = outcome_header(&["scenario_id", "param_value", "q_hat"], n);
    let cells = |f: fn(f64) -> String| -> Vec<Vec<String>> {
        rows.iter()
            .map(|r| {
                let mut cells = vec![
                    r.scenario_id.clone(),
                    f(r.param_value),
                    f(r.q_hat),
                    r.mechanism.clone(),
                ];
                cells.extend([r.p_enact_good, r.p_enact_bad, r.p_enact].map(f));
                cells.extend(r.expected_cost.iter().copied().map(f));
                cells.push(r.verdict.clone());
                cells
            })
            .collect()
    };
    Ok(match format {
        Format::Json => json(&rows),
        Format::Csv => csv_string(&headers, &cells(exact)),
        Format::Text => text_table(&headers, &cells(fixed)),
    })
}

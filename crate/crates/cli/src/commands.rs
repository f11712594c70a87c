//! Command implementations. Each returns both a machine-readable JSON value
//! and a human-readable text block computed from the same numbers.

use serde_json::{json, Value};

use qinfo::{
    apply_measurement, assemble_xq, bounds, conditional_mutual, decohere_ancilla, extracted_info,
    holevo_chi, neumark_dilate, sequential_measure, sweeps, venn2, venn3, Ensemble,
    OptimizerConfig, ProjectiveMeasurement,
};

use crate::format::{Experiment, MeasurementObject};
use crate::CliError;

pub struct CommandOutput {
    pub json: Value,
    pub text: String,
    /// Nonzero only for `check` when a sweep reports a violation.
    pub exit_code: i32,
}

fn qerr(e: qinfo::QError) -> CliError {
    CliError::Invariant(e.to_string())
}

fn venn2_json(v: &qinfo::VennDiagram2, x: &str, y: &str) -> Value {
    Value::Object(
        v.regions(x, y)
            .into_iter()
            .map(|(k, val)| (k, json!(val)))
            .collect(),
    )
}

fn venn3_json(v: &qinfo::VennDiagram3, x: &str, y: &str, z: &str) -> Value {
    Value::Object(
        v.regions(x, y, z)
            .into_iter()
            .map(|(k, val)| (k, json!(val)))
            .collect(),
    )
}

fn report_json(r: &bounds::BoundReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

pub fn cmd_chi(exp: &Experiment, tolerance: f64) -> Result<CommandOutput, CliError> {
    let e = &exp.ensemble;
    let chi = holevo_chi(e).map_err(qerr)?;
    let range = bounds::chi_range(e, tolerance).map_err(qerr)?;
    let s = assemble_xq(e);
    let venn = venn2(&s, &["X"], &["Q"]).map_err(qerr)?;

    let mut text = format!("chi = {chi:.6} bits\n");
    text.push_str(&range.to_text());
    text.push_str(&venn.to_text("X", "Q"));
    text.push('\n');
    Ok(CommandOutput {
        json: json!({
            "chi": chi,
            "range": report_json(&range),
            "venn2": venn2_json(&venn, "X", "Q"),
        }),
        text,
        exit_code: 0,
    })
}

/// Resolves a named measurement; POVMs are dilated, returning the embedded
/// ensemble and the projective family on the extended space.
fn resolve_measurement(
    exp: &Experiment,
    name: &str,
) -> Result<(Ensemble, ProjectiveMeasurement, bool), CliError> {
    match exp.measurements.get(name) {
        None => Err(CliError::Reference(format!("unknown measurement `{name}`"))),
        Some(MeasurementObject::Projective(m)) => {
            Ok((exp.ensemble.clone(), m.clone(), false))
        }
        Some(MeasurementObject::Povm(p)) => {
            let dil = neumark_dilate(p).map_err(qerr)?;
            let embedded = dil.embed_ensemble(&exp.ensemble).map_err(qerr)?;
            Ok((embedded, dil.measurement().clone(), true))
        }
    }
}

pub fn cmd_measure(
    exp: &Experiment,
    name: &str,
    decohere: bool,
    venn: bool,
    tolerance: f64,
) -> Result<CommandOutput, CliError> {
    let (ensemble, m, dilated) = resolve_measurement(exp, name)?;
    let chi = holevo_chi(&ensemble).map_err(qerr)?;
    let (info, table) = extracted_info(&ensemble, &m).map_err(qerr)?;
    let residual = qinfo::residual_info(&ensemble, &m).map_err(qerr)?;

    let s = assemble_xq(&ensemble);
    let mut post = apply_measurement(&s, &m).map_err(qerr)?;
    let balance_residual = conditional_mutual(&post, &["X"], &["Q"], &["A"]).map_err(qerr)?;
    let balance_defect = info + balance_residual - chi;
    if decohere {
        post = decohere_ancilla(&post).map_err(qerr)?;
    }

    let mut text = String::new();
    if dilated {
        text.push_str("(POVM routed through Neumark dilation)\n");
    }
    text.push_str(&format!("I = {info:.6} bits\n"));
    text.push_str(&format!("chi = {chi:.6} bits\n"));
    text.push_str(&format!("residual S(X':Q'|A') (decohered, closed form) = {residual:.6} bits\n"));
    text.push_str(&format!(
        "balance: I + S(X':Q'|A') - chi = {balance_defect:+.3e} (tolerance {tolerance:.1e})\n"
    ));
    text.push_str("outcome table p_alpha|i (rows i):\n");
    for row in &table.conditional {
        let cells: Vec<String> = row.iter().map(|p| format!("{p:.6}")).collect();
        text.push_str(&format!("  [{}]\n", cells.join(", ")));
    }
    let marginals: Vec<String> = table.marginal.iter().map(|p| format!("{p:.6}")).collect();
    text.push_str(&format!("p_alpha: [{}]\n", marginals.join(", ")));

    let mut out = json!({
        "measurement": name,
        "dilated": dilated,
        "I": info,
        "chi": chi,
        "residual": residual,
        "balance_residual": balance_residual,
        "balance_defect": balance_defect,
        "outcome_table": {
            "conditional": table.conditional,
            "marginal": table.marginal,
            "posterior": table.posterior,
        },
    });

    if venn {
        let v = venn3(&post, &["X"], &["Q"], &["A"]).map_err(qerr)?;
        text.push_str(&v.to_text("X'", "Q'", "A'"));
        text.push('\n');
        out["venn3"] = venn3_json(&v, "X'", "Q'", "A'");
        out["decohered"] = json!(decohere);
    }
    Ok(CommandOutput {
        json: out,
        text,
        exit_code: 0,
    })
}

pub fn cmd_venn(exp: &Experiment, name: Option<&str>) -> Result<CommandOutput, CliError> {
    match name {
        None => {
            let s = assemble_xq(&exp.ensemble);
            let v = venn2(&s, &["X"], &["Q"]).map_err(qerr)?;
            Ok(CommandOutput {
                json: json!({ "venn2": venn2_json(&v, "X", "Q") }),
                text: format!("{}\n", v.to_text("X", "Q")),
                exit_code: 0,
            })
        }
        Some(name) => {
            let (ensemble, m, _) = resolve_measurement(exp, name)?;
            let s = assemble_xq(&ensemble);
            let post = apply_measurement(&s, &m).map_err(qerr)?;
            let v = venn3(&post, &["X"], &["Q"], &["A"]).map_err(qerr)?;
            Ok(CommandOutput {
                json: json!({ "measurement": name, "venn3": venn3_json(&v, "X'", "Q'", "A'") }),
                text: format!("{}\n", v.to_text("X'", "Q'", "A'")),
                exit_code: 0,
            })
        }
    }
}

pub fn cmd_sequential(
    exp: &Experiment,
    chain_name: &str,
    tolerance: f64,
) -> Result<CommandOutput, CliError> {
    let steps = exp
        .chains
        .get(chain_name)
        .ok_or_else(|| CliError::Reference(format!("unknown chain `{chain_name}`")))?;
    let mut chain = Vec::with_capacity(steps.len());
    for step in steps {
        match exp.measurements.get(step) {
            Some(MeasurementObject::Projective(m)) => chain.push(m),
            Some(MeasurementObject::Povm(_)) => {
                return Err(CliError::Parse(format!(
                    "chain step `{step}` is a POVM; chains take projective measurements"
                )))
            }
            None => {
                return Err(CliError::Reference(format!(
                    "unknown measurement `{step}` in chain `{chain_name}`"
                )))
            }
        }
    }
    let refs: Vec<&ProjectiveMeasurement> = chain.into_iter().collect();
    let result = sequential_measure(&exp.ensemble, &refs).map_err(qerr)?;
    let chi = holevo_chi(&exp.ensemble).map_err(qerr)?;
    let total = result.total_information();
    let margin = chi - total;

    let mut text = format!("chain `{chain_name}` ({} steps)\n", refs.len());
    for (j, (info, cum)) in result
        .step_informations
        .iter()
        .zip(&result.cumulative)
        .enumerate()
    {
        text.push_str(&format!(
            "  step {}: H(X:A_{}|prev) = {info:.6} bits (cumulative {cum:.6})\n",
            j + 1,
            j + 1
        ));
    }
    text.push_str(&format!("chi = {chi:.6} bits\n"));
    text.push_str(&format!(
        "bound margin chi - sum = {margin:+.6} (tolerance {tolerance:.1e})\n"
    ));
    Ok(CommandOutput {
        json: json!({
            "chain": chain_name,
            "step_informations": result.step_informations,
            "cumulative": result.cumulative,
            "chi": chi,
            "margin": margin,
            "joint_conditional": result.joint_conditional,
        }),
        text,
        exit_code: 0,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_optimize(
    exp: &Experiment,
    restarts: usize,
    steps: usize,
    step_size: f64,
    decay: f64,
    povm_outcomes: Option<usize>,
    seed: u64,
) -> Result<CommandOutput, CliError> {
    let cfg = OptimizerConfig {
        restarts,
        steps,
        initial_step: step_size,
        decay,
        seed,
    };
    let chi = holevo_chi(&exp.ensemble).map_err(qerr)?;
    let (best, measurement) = match povm_outcomes {
        None => bounds::optimize_accessible_info(&exp.ensemble, &cfg).map_err(qerr)?,
        Some(n) => {
            bounds::optimize_accessible_info_dilated(&exp.ensemble, n, &cfg).map_err(qerr)?
        }
    };
    let gap = chi - best;

    let basis: Vec<Vec<Vec<[f64; 2]>>> = measurement
        .projectors()
        .iter()
        .map(|p| {
            (0..p.dim())
                .map(|i| {
                    (0..p.dim())
                        .map(|j| [p.get(i, j).re, p.get(i, j).im])
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut text = format!("best I = {best:.6} bits\n");
    text.push_str(&format!("chi = {chi:.6} bits\n"));
    text.push_str(&format!("gap chi - I = {gap:.6} bits\n"));
    text.push_str(&format!(
        "({} restarts, {} steps, seed {})\n",
        cfg.restarts, cfg.steps, cfg.seed
    ));
    Ok(CommandOutput {
        json: json!({
            "best_I": best,
            "chi": chi,
            "gap": gap,
            "config": serde_json::to_value(&cfg).expect("config serializes"),
            "projectors": basis,
        }),
        text,
        exit_code: 0,
    })
}

pub fn cmd_check(
    dims: &[usize],
    count: usize,
    seed: u64,
    tolerance: f64,
) -> Result<CommandOutput, CliError> {
    let reports = sweeps::full_suite(dims, count, seed, tolerance).map_err(qerr)?;
    let all_pass = reports.iter().all(|r| r.passed());

    let mut text = format!(
        "inequality suite: dims {dims:?}, count {count}, seed {seed}, tolerance {tolerance:.1e}\n"
    );
    for r in &reports {
        text.push_str(&r.to_text());
        text.push('\n');
    }
    text.push_str(if all_pass { "all sweeps passed\n" } else { "VIOLATIONS FOUND\n" });
    Ok(CommandOutput {
        json: json!({
            "dims": dims,
            "count": count,
            "seed": seed,
            "tolerance": tolerance,
            "sweeps": serde_json::to_value(&reports).expect("reports serialize"),
            "passed": all_pass,
        }),
        text,
        exit_code: if all_pass { 0 } else { 5 },
    })
}

//! Executes a validated scenario and collects its result tables.

use phononflux_core::closedform::{equal_temp_array, fourier_scaling, two_osc_heatflows, ScalingParams};
use phononflux_core::dynamics::{
    assemble_effective_two, assemble_full, default_dt, energy_flows_full, evolve_sampled, heat_flows_weak,
    lyapunov_solve, occupations, Bath,
};
use phononflux_core::elimination::{collective_effective_bath, regime_report};
use phononflux_core::model::transmissive_couplings;
use phononflux_core::{ArraySpec, CovarianceState, EffectiveTwoOscModel, LinearModel, ModeLayout, Solver, ValidatedSpec};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{effective_view, InitialState, Mode, ScenarioConfig, SweepAxis, System, Task};
use crate::error::CliError;
use crate::selfcheck;
use crate::table::{format_number, ResultTable};

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub tables: Vec<ResultTable>,
    /// Names of failed self-check criteria.
    pub failures: Vec<String>,
}

impl RunOutput {
    fn tables(tables: Vec<ResultTable>) -> Self {
        RunOutput {
            tables,
            failures: Vec::new(),
        }
    }
}

pub fn run(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let out = match cfg.task {
        Task::Selfcheck => {
            let results = selfcheck::run_selfcheck();
            let failures = results.iter().filter(|r| !r.passed).map(|r| r.label()).collect();
            RunOutput {
                tables: vec![selfcheck::report_table(&results, &cfg.hash)],
                failures,
            }
        }
        Task::Steady => RunOutput::tables(vec![steady(cfg)?]),
        Task::Transient => RunOutput::tables(vec![transient(cfg)?]),
        Task::Sweep => RunOutput::tables(sweep(cfg)?),
        Task::Scaling => RunOutput::tables(scaling(cfg)?),
    };
    for t in &out.tables {
        t.check_finite()?;
    }
    Ok(out)
}

fn system(cfg: &ScenarioConfig) -> &System {
    cfg.system.as_ref().expect("validated configs carry a system for this task")
}

/// The effective model together with regime diagnostics when it came from a
/// two-element array.
fn effective_model(cfg: &ScenarioConfig) -> Result<(EffectiveTwoOscModel, Option<Value>), CliError> {
    let sys = system(cfg);
    let m = effective_view(sys, cfg.mode)?.expect("validated configs reduce to two oscillators here");
    let regime = match sys {
        System::Array(spec) => {
            let r = regime_report(spec, &m, cfg.tolerances.regime_threshold);
            Some(json!({
                "threshold": r.threshold,
                "weak_coupling_ok": r.weak_coupling_ok,
                "spring_small_ok": r.spring_small_ok,
                "hierarchy_ok": r.hierarchy_ok,
                "coupling_margin": finite_or_null(r.margins.coupling),
                "spring_margin": finite_or_null(r.margins.spring),
                "hierarchy_margin": finite_or_null(r.margins.hierarchy),
            }))
        }
        System::Effective(_) => None,
    };
    Ok((m, regime))
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::Null
    }
}

fn effective_meta(m: &EffectiveTwoOscModel) -> Value {
    json!({
        "omega": m.omega,
        "lambda": m.lambda_coupling,
        "gamma": m.gamma,
        "gamma_bar": m.gamma_bar,
        "n_common": m.n_common,
    })
}

fn steady(cfg: &ScenarioConfig) -> Result<ResultTable, CliError> {
    match (cfg.mode, system(cfg)) {
        (Mode::Full, System::Array(spec)) => steady_full(spec, &cfg.hash),
        (Mode::ClosedForm, System::Array(spec)) if spec.n_elements != 2 => {
            let (gamma_bar, n_common) = collective_effective_bath(spec)?;
            let report = equal_temp_array(spec, gamma_bar, n_common)?;
            let mut t = ResultTable::new("steady", &["element", "g", "occupation", "flow"], &cfg.hash)
                .with_solver(Solver::ClosedForm.tag());
            for j in 0..spec.n_elements {
                t.push_row(vec![(j + 1) as f64, spec.g[j], report.occupations[j], report.flows[j]]);
            }
            t.meta.insert("gamma_bar".into(), gamma_bar.into());
            t.meta.insert("n_common".into(), n_common.into());
            t.meta.insert("total_mechanical".into(), report.total_mechanical.into());
            t.meta.insert("cavity_flow".into(), report.cavity_flow.into());
            Ok(t)
        }
        _ => {
            let (m, regime) = effective_model(cfg)?;
            let baths = m.bath_occupations();
            let mut t;
            if cfg.mode == Mode::ClosedForm {
                let r = two_osc_heatflows(&m)?;
                t = ResultTable::new(
                    "steady",
                    &["element", "n_bath", "occupation", "flow", "flow_as_printed"],
                    &cfg.hash,
                )
                .with_solver(Solver::ClosedForm.tag());
                for (j, n) in baths.iter().enumerate() {
                    t.push_row(vec![(j + 1) as f64, *n, r.occupations[j], r.flows[j], r.as_printed[j]]);
                }
                t.meta.insert("total_mechanical".into(), r.total().into());
            } else {
                let v = lyapunov_solve(&assemble_effective_two(&m)?)?;
                let r = heat_flows_weak(&v, &[(m.gamma, m.n1), (m.gamma, m.n2)], m.omega, Solver::OdeSteady)?;
                t = ResultTable::new("steady", &["element", "n_bath", "occupation", "flow"], &cfg.hash)
                    .with_solver(Solver::OdeSteady.tag());
                for (j, n) in baths.iter().enumerate() {
                    t.push_row(vec![(j + 1) as f64, *n, r.occupations[j], r.flows[j]]);
                }
                t.meta.insert("total_mechanical".into(), r.total_mechanical.into());
            }
            t.meta.insert("effective_model".into(), effective_meta(&m));
            if let Some(r) = regime {
                t.meta.insert("regime".into(), r);
            }
            Ok(t)
        }
    }
}

fn steady_full(spec: &ValidatedSpec, hash: &str) -> Result<ResultTable, CliError> {
    let model = assemble_full(spec);
    let v = lyapunov_solve(&model)?;
    let occ = occupations(&v)?;
    let flows = energy_flows_full(&model, &v);
    let mut t = ResultTable::new(
        "steady",
        &["element", "g", "n_bath", "occupation", "flow", "flow_weak"],
        hash,
    )
    .with_solver(Solver::LyapunovFull.tag());
    let mut cavity = 0.0;
    for f in &flows {
        match f.bath {
            Bath::Element(j) => {
                let weak = 2.0 * spec.omega * spec.gamma[j] * (spec.n_bath[j] - occ[j]);
                t.push_row(vec![(j + 1) as f64, spec.g[j], spec.n_bath[j], occ[j], f.flow, weak]);
            }
            Bath::Cavity => cavity = f.flow,
            Bath::Common => unreachable!("the full model has no common bath"),
        }
    }
    t.meta.insert("cavity_occupation".into(), v.mode_occupation(0).into());
    t.meta.insert("cavity_flow".into(), cavity.into());
    t.meta.insert(
        "total_mechanical".into(),
        flows.iter().filter(|f| f.bath != Bath::Cavity).map(|f| f.flow).sum::<f64>().into(),
    );
    Ok(t)
}

fn transient(cfg: &ScenarioConfig) -> Result<ResultTable, CliError> {
    let tc = cfg.transient.as_ref().expect("validated transient block");
    let (model, bath_occ): (LinearModel, Vec<f64>) = match (cfg.mode, system(cfg)) {
        (Mode::Full, System::Array(spec)) => {
            let mut occ = vec![0.0];
            occ.extend(&spec.n_bath);
            (assemble_full(spec), occ)
        }
        _ => {
            let (m, _) = effective_model(cfg)?;
            (assemble_effective_two(&m)?, m.bath_occupations().to_vec())
        }
    };
    let v0 = match tc.initial.unwrap_or(InitialState::Vacuum) {
        InitialState::Vacuum => CovarianceState::vacuum(model.layout),
        InitialState::Thermal => CovarianceState::thermal(model.layout, &bath_occ)?,
    };
    let dt = tc.dt.unwrap_or_else(|| default_dt(&model));
    let traj = evolve_sampled(&model, &v0, tc.t_final, dt, tc.stride.unwrap_or(1))?;

    let n = model.layout.n_elements();
    let mut columns = vec!["t".to_string()];
    if let ModeLayout::CavityAndElements(_) = model.layout {
        columns.push("n_cavity".into());
    }
    columns.extend((1..=n).map(|j| format!("n_{j}")));
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let solver = if cfg.mode == Mode::Full { "rk4-full" } else { "rk4-effective" };
    let mut t = ResultTable::new("transient", &cols, &cfg.hash).with_solver(solver);
    for (time, state) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![*time];
        if model.layout.has_cavity() {
            row.push(state.mode_occupation(0));
        }
        row.extend(occupations(state)?);
        t.push_row(row);
    }
    t.meta.insert("dt".into(), dt.into());
    Ok(t)
}

fn point_flows(base: &EffectiveTwoOscModel, lambda: f64, gamma_bar: f64, mode: Mode) -> Result<[f64; 5], CliError> {
    let m = EffectiveTwoOscModel::new(base.omega, lambda, base.gamma, gamma_bar, base.n1, base.n2, base.n_common)?;
    let (occ, flows) = if mode == Mode::ClosedForm {
        let r = two_osc_heatflows(&m)?;
        (r.occupations, r.flows)
    } else {
        let v = lyapunov_solve(&assemble_effective_two(&m)?)?;
        let r = heat_flows_weak(&v, &[(m.gamma, m.n1), (m.gamma, m.n2)], m.omega, Solver::OdeSteady)?;
        ([r.occupations[0], r.occupations[1]], [r.flows[0], r.flows[1]])
    };
    Ok([occ[0], occ[1], flows[0], flows[1], flows[0] + flows[1]])
}

fn sweep(cfg: &ScenarioConfig) -> Result<Vec<ResultTable>, CliError> {
    let (base, _) = effective_model(cfg)?;
    let solver = if cfg.mode == Mode::ClosedForm { Solver::ClosedForm } else { Solver::OdeSteady };
    let axes = &cfg.sweep;
    let grids: Vec<Vec<f64>> = axes.iter().map(|a| a.values()).collect();
    let fixed = [base.lambda_coupling / base.gamma, base.gamma_bar / base.gamma];
    let coords = |p: &[(SweepAxis, f64)]| {
        let mut c = fixed;
        for &(axis, x) in p {
            match axis {
                SweepAxis::LambdaOverGamma => c[0] = x,
                SweepAxis::GammabarOverGamma => c[1] = x,
            }
        }
        c
    };

    // row-major over (axes[1], axes[0]); rayon's indexed collect keeps the order
    let points: Vec<Vec<(SweepAxis, f64)>> = match axes.len() {
        1 => grids[0].iter().map(|&x| vec![(axes[0].axis, x)]).collect(),
        _ => grids[1]
            .iter()
            .flat_map(|&y| grids[0].iter().map(move |&x| vec![(axes[0].axis, x), (axes[1].axis, y)]))
            .collect(),
    };
    let values = points
        .par_iter()
        .map(|p| {
            let [l, gb] = coords(p);
            point_flows(&base, l * base.gamma, gb * base.gamma, cfg.mode)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let meta_fixed = effective_meta(&base);
    if axes.len() == 1 {
        let mut t = ResultTable::new(
            "sweep",
            &[axes[0].axis.name(), "n1", "n2", "J1", "J2", "Jtotal"],
            &cfg.hash,
        )
        .with_solver(solver.tag());
        for (p, v) in points.iter().zip(&values) {
            let mut row = vec![p[0].1];
            row.extend(v);
            t.push_row(row);
        }
        t.meta.insert("fixed".into(), meta_fixed);
        return Ok(vec![t]);
    }

    let mut columns = vec![axes[1].axis.name().to_string()];
    columns.extend(grids[0].iter().map(|x| format!("{}={}", axes[0].axis.name(), format_number(*x))));
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let width = grids[0].len();
    let tables = [("J1", 2), ("J2", 3), ("Jtotal", 4)]
        .iter()
        .map(|&(name, k)| {
            let mut t = ResultTable::new(name, &cols, &cfg.hash).with_solver(solver.tag());
            for (i, y) in grids[1].iter().enumerate() {
                let mut row = vec![*y];
                row.extend(values[i * width..(i + 1) * width].iter().map(|v| v[k]));
                t.push_row(row);
            }
            t.meta.insert("rows".into(), axes[1].axis.name().into());
            t.meta.insert("columns".into(), axes[0].axis.name().into());
            t.meta.insert("fixed".into(), meta_fixed.clone());
            t
        })
        .collect();
    Ok(tables)
}

fn scaling(cfg: &ScenarioConfig) -> Result<Vec<ResultTable>, CliError> {
    let (m, _) = effective_model(cfg)?;
    let sc = cfg.scaling.as_ref().expect("validated scaling block");
    let params = ScalingParams {
        omega: m.omega,
        gamma: m.gamma,
        gamma_bar: m.gamma_bar,
        n: m.n1,
        n_common: m.n_common,
    };
    let r = fourier_scaling(&sc.sizes, &params)?;
    let mut t = ResultTable::new("scaling", &["N", "J_first", "J_quarter", "J_mean", "J_total"], &cfg.hash)
        .with_solver(Solver::ClosedForm.tag());
    for i in 0..r.sizes.len() {
        t.push_row(vec![r.sizes[i] as f64, r.flows_first[i], r.flows_quarter[i], r.mean_flow[i], r.totals[i]]);
    }

    let slopes = r.fitted_slopes;
    t.meta.insert(
        "fitted_slopes".into(),
        json!({"first": slopes.first, "quarter": slopes.quarter, "mean": slopes.mean}),
    );
    let mut tables = vec![t];

    if let Some(n) = sc.profile_size {
        let spec = ArraySpec::uniform(m.omega, 0.0, 1.0, m.gamma, vec![m.n1; n], transmissive_couplings(n, 1.0)?)
            .validate()?;
        let report = equal_temp_array(&spec, m.gamma_bar, m.n_common)?;
        let mut p = ResultTable::new("profile", &["element", "g", "occupation", "flow"], &cfg.hash)
            .with_solver(Solver::ClosedForm.tag());
        for j in 0..n {
            p.push_row(vec![(j + 1) as f64, spec.g[j], report.occupations[j], report.flows[j]]);
        }
        p.meta.insert("total_mechanical".into(), report.total_mechanical.into());
        tables.push(p);
    }
    Ok(tables)
}

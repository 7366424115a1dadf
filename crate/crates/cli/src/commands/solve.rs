use std::io::Write;
use std::time::Instant;

use heisenberg_green::annulus::AnnulusDomain;
use heisenberg_green::bvp::{harmonic_measure, solve_dirichlet, BoundaryData};
use heisenberg_green::fundamental::g_bar_handle;
use heisenberg_green::{CircularFunction, Dimension};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{check_dim, csv, dimension, emit, num, point_value, quad_config};
use crate::args::{Format, SolveArgs};
use crate::error::{exit, CliError, CliResult};
use crate::manifest::RunManifest;
use crate::parse::DataSpec;

const COLUMNS: [&str; 8] = [
    "probe",
    "abs_z",
    "t",
    "value",
    "volume_term",
    "outer_term",
    "inner_term",
    "kappa",
];

/// The circular function a data spec names, in dimension `n`.
pub fn data_function(spec: &DataSpec, n: Dimension) -> CliResult<CircularFunction> {
    Ok(match spec {
        DataSpec::Constant(c) => CircularFunction::constant(*c),
        DataSpec::Gauge4 => CircularFunction::radial(|rho, t| Ok(rho * rho + t * t)),
        DataSpec::L0Gauge4 => {
            let k = -(2.0 * n.as_f64() + 4.0);
            CircularFunction::radial(move |rho, _| Ok(k * rho))
        }
        DataSpec::GBar(p) => {
            check_dim(p, n)?;
            g_bar_handle(p, n)
        }
    })
}

fn describe(spec: &DataSpec) -> Value {
    match spec {
        DataSpec::Constant(c) => json!(c),
        DataSpec::Gauge4 => json!("gauge4"),
        DataSpec::L0Gauge4 => json!("l0-gauge4"),
        DataSpec::GBar(p) => json!({ "gbar": point_value(p) }),
    }
}

struct Row {
    abs_z: f64,
    t: f64,
    value: f64,
    volume: f64,
    outer: f64,
    inner: f64,
    kappa: f64,
}

pub fn run(a: &SolveArgs, stdout: &mut dyn Write) -> CliResult<u8> {
    let start = Instant::now();
    let n = dimension(&a.common)?;
    let dom = AnnulusDomain::new(a.common.r, n)?;
    let mut q = quad_config(&a.common)?;
    for (slot, v) in [
        (&mut q.radial_nodes, a.radial_nodes),
        (&mut q.angular_nodes, a.angular_nodes),
        (&mut q.boundary_nodes, a.boundary_nodes),
        (&mut q.boundary_panels, a.boundary_panels),
    ] {
        if let Some(v) = v {
            *slot = v;
        }
    }
    q.validate()?;
    for p in &a.probes {
        check_dim(p, n)?;
    }

    let source = match a.f {
        DataSpec::Constant(0.0) => None,
        ref spec => Some(data_function(spec, n)?),
    };
    let bd = BoundaryData::new(data_function(&a.h_outer, n)?, data_function(&a.h_inner, n)?)?;

    let rows = a
        .probes
        .par_iter()
        .map(|p| {
            let s = solve_dirichlet(source.as_ref(), &bd, p, &dom, &q)?;
            let (_, kappa) = harmonic_measure(p, &dom, &q)?;
            Ok(Row {
                abs_z: p.abs_z_sq().sqrt(),
                t: p.t(),
                value: s.value,
                volume: s.volume_term,
                outer: s.outer_term,
                inner: s.inner_term,
                kappa,
            })
        })
        .collect::<Vec<CliResult<Row>>>()
        .into_iter()
        .collect::<CliResult<Vec<_>>>()?;

    let mut manifest = RunManifest::new("solve")
        .param("n", n.get())
        .param("R", a.common.r)
        .param("f", describe(&a.f))
        .param("h_outer", describe(&a.h_outer))
        .param("h_inner", describe(&a.h_inner))
        .param(
            "probes",
            Value::from(a.probes.iter().map(point_value).collect::<Vec<_>>()),
        )
        .param(
            "quadrature",
            json!({
                "radial_nodes": q.radial_nodes,
                "angular_nodes": q.angular_nodes,
                "boundary_nodes": q.boundary_nodes,
                "boundary_panels": q.boundary_panels,
                "fd_step": q.fd_step,
            }),
        )
        .tolerance("series_eps", q.series_eps);
    // κ = 1/∮P dσ: how far the exact boundary measure is from reproducing constants
    let (kmin, kmax) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.kappa), hi.max(r.kappa))
        });
    manifest.calibration.insert("kappa_min".into(), kmin);
    manifest.calibration.insert("kappa_max".into(), kmax);

    let body = match a.format {
        Format::Csv => {
            let text: Vec<Vec<String>> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    vec![
                        i.to_string(),
                        num(r.abs_z),
                        num(r.t),
                        num(r.value),
                        num(r.volume),
                        num(r.outer),
                        num(r.inner),
                        num(r.kappa),
                    ]
                })
                .collect();
            csv(&manifest, &COLUMNS, &text)?
        }
        Format::Json => {
            let data: Vec<Value> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    json!({
                        "probe": i,
                        "abs_z": r.abs_z,
                        "t": r.t,
                        "value": r.value,
                        "volume_term": r.volume,
                        "outer_term": r.outer,
                        "inner_term": r.inner,
                        "kappa": r.kappa,
                    })
                })
                .collect();
            serde_json::to_string_pretty(
                &json!({ "manifest": manifest, "columns": COLUMNS, "rows": data }),
            )? + "\n"
        }
        Format::Text => return Err(CliError::Usage("solve writes csv or json".into())),
    };
    emit(a.out.as_deref(), &body, &manifest, start, stdout)?;
    Ok(exit::OK)
}

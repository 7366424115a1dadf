use std::io::Write;
use std::time::Instant;

use heisenberg_green::annulus::{green_annulus, AnnulusDomain, SeriesEval};
use heisenberg_green::strip::{green_strip, StripDomain};
use heisenberg_green::{Error, GroupPoint};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{check_dim, csv, dimension, emit, num, point_value};
use crate::args::{DomainKind, Format, TableArgs};
use crate::error::{exit, CliError, CliResult};
use crate::manifest::RunManifest;

const COLUMNS: [&str; 5] = ["r", "t", "value", "tail_bound", "mask"];

struct Row {
    r: f64,
    t: f64,
    /// `None` for masked cells: outside the closed domain or on the pole orbit.
    eval: Option<SeriesEval>,
}

pub fn run(a: &TableArgs, stdout: &mut dyn Write) -> CliResult<u8> {
    let start = Instant::now();
    let n = dimension(&a.common)?;
    check_dim(&a.eta, n)?;
    let eps = a.common.eps;
    let mut manifest = RunManifest::new("table")
        .param("n", n.get())
        .param("eta", point_value(&a.eta))
        .param(
            "grid",
            json!({
                "r": [a.grid.r.min, a.grid.r.max, a.grid.r.steps],
                "t": [a.grid.t.min, a.grid.t.max, a.grid.t.steps],
            }),
        )
        .tolerance("eps", eps);

    // each cell is ξ = [(r, 0, ..., 0), t]
    let cell = |r: f64, t: f64| -> CliResult<GroupPoint> {
        let mut z = vec![(0.0, 0.0); n.get()];
        z[0].0 = r;
        Ok(GroupPoint::new(z, t)?)
    };
    let masked = |e: Result<SeriesEval, Error>| match e {
        Ok(v) => Ok(Some(v)),
        Err(Error::PoleOrbit { .. } | Error::Pole { .. }) => Ok(None),
        Err(e) => Err(CliError::from(e)),
    };
    let nodes = a.grid.nodes();
    let rows: Vec<CliResult<Row>> = match a.domain {
        DomainKind::Annulus => {
            let dom = AnnulusDomain::new(a.common.r, n)?;
            if !dom.contains(&a.eta) {
                return Err(Error::Domain(format!(
                    "pole gauge {} outside ({}, 1)",
                    a.eta.gauge(),
                    dom.r()
                ))
                .into());
            }
            manifest = manifest.param("domain", "annulus").param("R", a.common.r);
            nodes
                .par_iter()
                .map(|&(r, t)| {
                    let xi = cell(r, t)?;
                    let eval = if dom.contains_closure(&xi) {
                        masked(green_annulus(&a.eta, &xi, &dom, eps))?
                    } else {
                        None
                    };
                    Ok(Row { r, t, eval })
                })
                .collect()
        }
        DomainKind::Strip => {
            let dom = StripDomain::new(n);
            if !dom.contains(&a.eta) {
                return Err(
                    Error::Domain(format!("pole height {} outside (0, 1)", a.eta.t())).into(),
                );
            }
            manifest = manifest.param("domain", "strip");
            nodes
                .par_iter()
                .map(|&(r, t)| {
                    let xi = cell(r, t)?;
                    let eval = if dom.contains_closure(&xi) {
                        masked(green_strip(&a.eta, &xi, &dom, eps))?
                    } else {
                        None
                    };
                    Ok(Row { r, t, eval })
                })
                .collect()
        }
    };
    let rows = rows.into_iter().collect::<CliResult<Vec<_>>>()?;

    let body = match a.format {
        Format::Csv => {
            let text: Vec<Vec<String>> = rows
                .iter()
                .map(|row| {
                    let (v, b, m) = match &row.eval {
                        Some(e) => (num(e.value), num(e.tail_bound), "0"),
                        None => (String::new(), String::new(), "1"),
                    };
                    vec![num(row.r), num(row.t), v, b, m.to_owned()]
                })
                .collect();
            csv(&manifest, &COLUMNS, &text)?
        }
        Format::Json => {
            let data: Vec<Value> = rows
                .iter()
                .map(|row| {
                    json!({
                        "r": row.r,
                        "t": row.t,
                        "value": row.eval.as_ref().map(|e| e.value),
                        "tail_bound": row.eval.as_ref().map(|e| e.tail_bound),
                        "mask": u8::from(row.eval.is_none()),
                    })
                })
                .collect();
            serde_json::to_string_pretty(
                &json!({ "manifest": manifest, "columns": COLUMNS, "rows": data }),
            )? + "\n"
        }
        Format::Text => return Err(CliError::Usage("table writes csv or json".into())),
    };
    emit(a.out.as_deref(), &body, &manifest, start, stdout)?;
    Ok(exit::OK)
}

use std::io::Write;
use std::time::Instant;

use heisenberg_green::annulus::{green_annulus, AnnulusDomain};
use heisenberg_green::strip::{green_strip, StripDomain};
use serde_json::json;

use super::{check_dim, dimension, emit, manifest_line, num, point_value};
use crate::args::{DomainKind, EvalArgs, Format};
use crate::error::{exit, CliError, CliResult};
use crate::manifest::RunManifest;

pub fn run(a: &EvalArgs, stdout: &mut dyn Write) -> CliResult<u8> {
    let start = Instant::now();
    let n = dimension(&a.common)?;
    check_dim(&a.eta, n)?;
    check_dim(&a.xi, n)?;
    let mut manifest = RunManifest::new("eval")
        .param("n", n.get())
        .param("eta", point_value(&a.eta))
        .param("xi", point_value(&a.xi))
        .tolerance("eps", a.common.eps);
    let ev = match a.domain {
        DomainKind::Annulus => {
            manifest = manifest.param("domain", "annulus").param("R", a.common.r);
            green_annulus(
                &a.eta,
                &a.xi,
                &AnnulusDomain::new(a.common.r, n)?,
                a.common.eps,
            )?
        }
        DomainKind::Strip => {
            manifest = manifest.param("domain", "strip");
            green_strip(&a.eta, &a.xi, &StripDomain::new(n), a.common.eps)?
        }
    };
    let body = match a.format {
        Format::Text => format!(
            "{}value = {}\nterms_used = {}\ntail_bound = {}\n",
            manifest_line(&manifest)?,
            num(ev.value),
            ev.terms_used,
            num(ev.tail_bound)
        ),
        Format::Json => {
            let v = json!({
                "manifest": manifest,
                "value": ev.value,
                "terms_used": ev.terms_used,
                "tail_bound": ev.tail_bound,
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Format::Csv => return Err(CliError::Usage("eval prints text or json".into())),
    };
    emit(None, &body, &manifest, start, stdout)?;
    Ok(exit::OK)
}

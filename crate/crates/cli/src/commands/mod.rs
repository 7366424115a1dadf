use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use heisenberg_green::{Dimension, GroupPoint, QuadratureConfig};
use serde_json::Value;

use crate::args::Common;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

pub mod eval;
pub mod solve;
pub mod table;
pub mod verify;

pub(crate) fn dimension(common: &Common) -> CliResult<Dimension> {
    Ok(Dimension::new(common.n)?)
}

pub(crate) fn check_dim(p: &GroupPoint, n: Dimension) -> CliResult<()> {
    if p.dim() != n {
        return Err(heisenberg_green::Error::DimensionMismatch {
            expected: n.get(),
            got: p.dim().get(),
        }
        .into());
    }
    Ok(())
}

pub(crate) fn quad_config(common: &Common) -> CliResult<QuadratureConfig> {
    let mut q = QuadratureConfig {
        series_eps: common.eps,
        ..Default::default()
    };
    if let Some(h) = common.fd_step {
        q.fd_step = h;
    }
    if let Some(m) = common.theta_nodes {
        q.theta_nodes = m;
    }
    q.validate()?;
    Ok(q)
}

pub(crate) fn point_value(p: &GroupPoint) -> Value {
    Value::from(p.to_flat())
}

/// Shortest round-trip decimal form, so reruns produce identical bytes.
pub(crate) fn num(v: f64) -> String {
    if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub(crate) fn manifest_line(m: &RunManifest) -> CliResult<String> {
    Ok(format!("# manifest: {}\n", serde_json::to_string(m)?))
}

/// CSV body with the manifest header line.
pub(crate) fn csv(m: &RunManifest, columns: &[&str], rows: &[Vec<String>]) -> CliResult<String> {
    let mut s = manifest_line(m)?;
    s.push_str(&columns.join(","));
    s.push('\n');
    for row in rows {
        let _ = writeln!(s, "{}", row.join(","));
    }
    Ok(s)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Writes `body` to `out` (plus a manifest sidecar with the wall time) or to
/// standard output.
pub(crate) fn emit(
    out: Option<&Path>,
    body: &str,
    manifest: &RunManifest,
    start: Instant,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    match out {
        Some(path) => {
            let io = |source| CliError::Io {
                path: path.to_owned(),
                source,
            };
            fs::write(path, body).map_err(io)?;
            let mut timed = manifest.clone();
            timed.wall_time_s = Some(start.elapsed().as_secs_f64());
            let side = sidecar_path(path);
            fs::write(&side, serde_json::to_string_pretty(&timed)? + "\n").map_err(|source| {
                CliError::Io {
                    path: side.clone(),
                    source,
                }
            })?;
        }
        None => stdout
            .write_all(body.as_bytes())
            .map_err(CliError::Stdout)?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_names() {
        assert_eq!(
            sidecar_path(Path::new("/tmp/a.csv")),
            PathBuf::from("/tmp/a.csv.manifest.json")
        );
    }

    #[test]
    fn shortest_round_trip() {
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(3.5e-12), "3.5e-12");
        for v in [1e-300, -2.5e-7, 1.0 / 3.0, 7e20, f64::MAX] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }
}

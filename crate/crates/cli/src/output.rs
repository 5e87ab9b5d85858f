use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use dimer_core::analysis::SweepGrid;
use dimer_core::config::ConfigFile;
use serde::Serialize;

use crate::CliError;

/// 17 significant digits; parses back to the identical double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, CliError> {
    csv::Writer::from_path(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Output(format!("{}: {e}", path.display()))
}

pub fn write_curve(path: &Path, samples: &[(f64, f64)]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(["t_ps", "p12"]).map_err(csv_err(path))?;
    for &(t, p) in samples {
        w.write_record([fmt_f64(t), fmt_f64(p)]).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// 2D grids: header `param2\param1,<axis1 values>`, then one row per axis2
/// value. 1D grids: columns `param1,p_max,t_star_ps`.
pub fn write_grid(path: &Path, grid: &SweepGrid) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    match &grid.axis2 {
        Some(axis2) => {
            let mut header = vec![format!("{}\\{}", axis2.parameter, grid.axis1.parameter)];
            header.extend(grid.axis1.values.iter().map(|&v| fmt_f64(v)));
            w.write_record(&header).map_err(csv_err(path))?;
            for (i2, &v2) in axis2.values.iter().enumerate() {
                let mut row = vec![fmt_f64(v2)];
                row.extend(grid.row(i2).iter().map(|&p| fmt_f64(p)));
                w.write_record(&row).map_err(csv_err(path))?;
            }
        }
        None => {
            w.write_record([grid.axis1.parameter.name(), "p_max", "t_star_ps"])
                .map_err(csv_err(path))?;
            for (i, &v) in grid.axis1.values.iter().enumerate() {
                w.write_record([fmt_f64(v), fmt_f64(grid.values[i]), fmt_f64(grid.times[i])])
                    .map_err(csv_err(path))?;
            }
        }
    }
    w.flush().map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

pub fn sidecar_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}"))
}

pub fn write_argmax(path: &Path, grid: &SweepGrid) -> Result<(), CliError> {
    let a = &grid.argmax;
    let mut text = format!("{} = {}\n", grid.axis1.parameter, fmt_f64(a.value1));
    if let (Some(axis2), Some(v2)) = (&grid.axis2, a.value2) {
        text.push_str(&format!("{} = {}\n", axis2.parameter, fmt_f64(v2)));
    }
    text.push_str(&format!("t_star_ps = {}\n", fmt_f64(a.t)));
    text.push_str(&format!("p_max = {}\n", fmt_f64(a.p)));
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    File::create(path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: &'static str,
    pub config: ConfigFile,
    pub axes: Vec<String>,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_seconds: f64,
    pub summary: serde_json::Value,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: ConfigFile) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            config,
            axes: Vec::new(),
            outputs: Vec::new(),
            wall_clock_seconds: 0.0,
            summary: serde_json::Value::Null,
        }
    }

    /// Writes `<stem>.manifest.json` next to `out`, listing itself too.
    pub fn write_beside(mut self, out: &Path, elapsed: Duration) -> Result<PathBuf, CliError> {
        let path = sidecar_path(out, "manifest.json");
        self.outputs.push(path.clone());
        self.wall_clock_seconds = elapsed.as_secs_f64();
        let text = serde_json::to_string_pretty(&self).map_err(|e| CliError::Output(e.to_string()))?;
        write_text(&path, &(text + "\n"))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 5e-324, 0.0, 1.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn sidecars() {
        assert_eq!(sidecar_path(Path::new("/a/grid.csv"), "argmax.txt"), Path::new("/a/grid.argmax.txt"));
        assert_eq!(sidecar_path(Path::new("curve"), "manifest.json"), Path::new("curve.manifest.json"));
    }
}

//! CSV serialization of runs and reports.
//!
//! Numbers use the shortest decimal that parses back to the same `f64`, so
//! every file round-trips exactly and reruns are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use crate::control::RunRecord;
use crate::error::{Error, Result};
use crate::experiments::{DifferenceAnalysis, ReliabilityReport, ResetScanReport};
use crate::rossler::Vec3;

pub const RUN_HEADER: [&str; 6] = ["t", "x", "y", "u", "gamma", "D"];

/// One row of a run CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRow {
    pub t: usize,
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub gamma: bool,
    pub drive: f64,
}

/// Tabular view of a run, as stored on disk.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTable {
    pub rows: Vec<RunRow>,
}

impl RunTable {
    pub fn from_record(record: &RunRecord) -> Self {
        let traj = &record.trajectory;
        let rows = traj
            .states
            .iter()
            .zip(&traj.spikes)
            .enumerate()
            .map(|(i, (s, &gamma))| RunRow {
                t: traj.start_time + i,
                x: s.x,
                y: s.y,
                u: s.u,
                gamma,
                drive: record.drives.get(i).copied().unwrap_or(0.0),
            })
            .collect();
        Self { rows }
    }
}

fn num(v: f64) -> String {
    v.to_string()
}

fn csv_bytes<I, R>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let into_vec = |e: csv::Error| panic!("writing CSV to memory cannot fail: {e}");
    writer.write_record(header).unwrap_or_else(into_vec);
    for row in rows {
        writer.write_record(row).unwrap_or_else(into_vec);
    }
    writer.into_inner().expect("in-memory buffer")
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn run_table_csv(table: &RunTable) -> Vec<u8> {
    csv_bytes(
        &RUN_HEADER,
        table.rows.iter().map(|r| {
            [
                r.t.to_string(),
                num(r.x),
                num(r.y),
                num(r.u),
                u8::from(r.gamma).to_string(),
                num(r.drive),
            ]
        }),
    )
}

pub fn write_run_table(table: &RunTable, path: &Path) -> Result<()> {
    write_file(path, &run_table_csv(table))
}

/// Writes `t,x,y,u,gamma,D`, one row per stored step.
pub fn emit_run_csv(record: &RunRecord, path: &Path) -> Result<()> {
    write_run_table(&RunTable::from_record(record), path)
}

pub fn parse_run_csv(bytes: &[u8]) -> Result<RunTable> {
    let mut reader = csv::ReaderBuilder::new().from_reader(bytes);
    let header = reader
        .headers()
        .map_err(|e| Error::MalformedCsv(e.to_string()))?
        .clone();
    if header.iter().ne(RUN_HEADER) {
        return Err(Error::MalformedCsv(format!(
            "expected header {}, found {}",
            RUN_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::MalformedCsv(e.to_string()))?;
        let line = i + 2;
        let field = |j: usize| -> Result<&str> {
            record
                .get(j)
                .ok_or_else(|| Error::MalformedCsv(format!("line {line}: missing column {}", RUN_HEADER[j])))
        };
        let float = |j: usize| -> Result<f64> {
            let text = field(j)?;
            text.parse()
                .map_err(|_| Error::MalformedCsv(format!("line {line}: bad {} value `{text}`", RUN_HEADER[j])))
        };
        let t = field(0)?
            .parse()
            .map_err(|_| Error::MalformedCsv(format!("line {line}: bad t")))?;
        let gamma = match field(4)? {
            "0" => false,
            "1" => true,
            other => return Err(Error::MalformedCsv(format!("line {line}: bad gamma `{other}`"))),
        };
        rows.push(RunRow {
            t,
            x: float(1)?,
            y: float(2)?,
            u: float(3)?,
            gamma,
            drive: float(5)?,
        });
    }
    Ok(RunTable { rows })
}

pub fn read_run_csv(path: &Path) -> Result<RunTable> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_run_csv(&bytes)
}

pub fn reliability_report_csv(report: &ReliabilityReport) -> Vec<u8> {
    let totals = report.totals();
    let rows = report
        .per_tau
        .iter()
        .map(|(tau, c)| (tau.to_string(), *c, c.reliability()))
        .chain(std::iter::once(("all".to_string(), totals, report.overall_reliability)))
        .map(|(label, c, rel)| {
            [
                label,
                c.stabilized.to_string(),
                c.diverged.to_string(),
                c.unresolved.to_string(),
                num(rel),
            ]
        });
    csv_bytes(&["tau", "stabilized", "diverged", "unresolved", "reliability"], rows)
}

pub fn reset_scan_csv(report: &ResetScanReport) -> Vec<u8> {
    let rows = report.entries.iter().map(|e| {
        [
            num(e.eta0),
            e.regime.label().to_string(),
            num(e.reliability),
            e.mean_stabilization_time.map(num).unwrap_or_default(),
        ]
    });
    csv_bytes(&["eta0", "regime", "reliability", "mean_stab_time"], rows)
}

/// Per-τ rows plus an `all` summary row.
pub fn emit_reliability_report(report: &ReliabilityReport, path: &Path) -> Result<()> {
    write_file(path, &reliability_report_csv(report))
}

pub fn emit_reset_scan(report: &ResetScanReport, path: &Path) -> Result<()> {
    write_file(path, &reset_scan_csv(report))
}

/// Writes `t,x,y,z` with `t` in continuous time.
pub fn emit_rossler_csv(points: &[Vec3], dt: f64, path: &Path) -> Result<()> {
    let rows = points
        .iter()
        .enumerate()
        .map(|(i, p)| [num(i as f64 * dt), num(p[0]), num(p[1]), num(p[2])]);
    write_file(path, &csv_bytes(&["t", "x", "y", "z"], rows))
}

/// Writes the lag differences, one row per step from `lag` on.
pub fn emit_difference_csv(analysis: &DifferenceAnalysis, path: &Path) -> Result<()> {
    let lag = analysis.lag;
    let rows = (0..analysis.x.values.len()).map(|i| {
        let (dx, dy) = analysis.xy_pairs[i];
        [
            (lag + i).to_string(),
            num(analysis.x.values[i]),
            num(analysis.y.values[i]),
            num(analysis.u.values[i]),
            num(dx),
            num(dy),
            num(analysis.xyz.values[i]),
        ]
    });
    write_file(
        path,
        &csv_bytes(&["t", "abs_dx", "abs_dy", "abs_du", "dx", "dy", "dist_xyz"], rows),
    )
}

/// `run.csv` becomes `run.forced.csv`; a path without extension gets
/// `.forced` appended.
pub fn forced_path(out: &Path) -> PathBuf {
    match (out.file_stem(), out.extension()) {
        (Some(stem), Some(ext)) => {
            let mut name = stem.to_os_string();
            name.push(".forced.");
            name.push(ext);
            out.with_file_name(name)
        }
        _ => {
            let mut name = out.as_os_str().to_os_string();
            name.push(".forced");
            PathBuf::from(name)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{run_controlled, ControlledRunConfig, InitialCondition};
    use crate::model::NdsState;

    fn two_step_record() -> RunRecord {
        let config = ControlledRunConfig {
            initial: InitialCondition::Fixed(NdsState::new(0.0, 0.0, 0.0)),
            total_steps: 2,
            ..ControlledRunConfig::default()
        };
        run_controlled(&config).unwrap()
    }

    #[test]
    fn two_step_rows() {
        let text = String::from_utf8(run_table_csv(&RunTable::from_record(&two_step_record()))).unwrap();
        assert_eq!(
            text,
            "t,x,y,u,gamma,D\n0,0,0,0,0,0\n1,0,0,-1,1,0\n2,0.03,0,-0.9528,0,0\n"
        );
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(run_table_csv(&RunTable::default()), b"t,x,y,u,gamma,D\n");
    }

    #[test]
    fn reemit_is_byte_identical() {
        let config = ControlledRunConfig {
            total_steps: 3000,
            rng_seed: 11,
            ..ControlledRunConfig::default()
        };
        let bytes = run_table_csv(&RunTable::from_record(&run_controlled(&config).unwrap()));
        let table = parse_run_csv(&bytes).unwrap();
        assert_eq!(run_table_csv(&table), bytes);
    }

    #[test]
    fn malformed_input_rejected() {
        assert!(parse_run_csv(b"t,x,y\n0,1,2\n").is_err());
        assert!(parse_run_csv(b"t,x,y,u,gamma,D\n0,1,2,3,7,0\n").is_err());
        assert!(parse_run_csv(b"t,x,y,u,gamma,D\n0,1,zz,3,0,0\n").is_err());
    }

    #[test]
    fn io_error_names_the_path() {
        let err = emit_run_csv(&two_step_record(), Path::new("/nonexistent-dir/run.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/run.csv"));
    }

    #[test]
    fn forced_path_naming() {
        assert_eq!(
            forced_path(Path::new("out/run.csv")),
            PathBuf::from("out/run.forced.csv")
        );
        assert_eq!(forced_path(Path::new("run")), PathBuf::from("run.forced"));
    }
}

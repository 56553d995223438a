//! CSV and JSON artifacts. Floats in CSV are written with 17 significant
//! digits so that files round-trip bit for bit.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::HeightProfile;
use crate::solver::SupportSolution;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.display().to_string(),
            source,
        },
        other => Error::Config(format!("{}: {other:?}", path.display())),
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(io_err(path))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

/// One row per grid node, ordered by level then by angle.
pub fn write_solution_csv(sol: &SupportSolution, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let axisym = sol.radii.first().is_some_and(|r| r.b_parallel.is_some());
    let mut header = vec!["theta", "t", "h", "h_t", "b_meridian"];
    if axisym {
        header.push("b_parallel");
    }
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    let thetas = sol.grid.thetas();
    for k in 0..sol.n_t() {
        for (j, th) in thetas.iter().enumerate() {
            let mut rec = vec![
                fmt_f64(*th),
                fmt_f64(sol.t[k]),
                fmt_f64(sol.h[k][j]),
                fmt_f64(sol.h_t[k][j]),
                fmt_f64(sol.radii[k].b_meridian[j]),
            ];
            if let Some(par) = &sol.radii[k].b_parallel {
                rec.push(fmt_f64(par[j]));
            }
            w.write_record(&rec).map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(io_err(path))
}

/// Long format: `kind,t,f`.
pub fn write_profiles_csv(profiles: &[HeightProfile], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["kind", "t", "f"]).map_err(|e| csv_err(path, e))?;
    for p in profiles {
        for (t, f) in p.t.iter().zip(&p.f) {
            w.write_record([p.kind.name().to_string(), fmt_f64(*t), fmt_f64(*f)])
                .map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(io_err(path))
}

/// `theta,h` rows of a support-sample file.
pub fn read_support_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    #[derive(serde::Deserialize)]
    struct Row {
        theta: f64,
        h: f64,
    }
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    r.deserialize::<Row>()
        .map(|row| row.map(|x| (x.theta, x.h)).map_err(|e| csv_err(path, e)))
        .collect()
}

pub fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn write_jsonl<T: Serialize>(items: &[T], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| Error::Config(e.to_string()))?;
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ProfileKind;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn support_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.csv");
        std::fs::write(&path, "theta,h\n0.0,1.5\n 1.0 , 2.0\n").unwrap();
        assert_eq!(read_support_csv(&path).unwrap(), vec![(0.0, 1.5), (1.0, 2.0)]);
        std::fs::write(&path, "theta,h\nx,1\n").unwrap();
        assert!(matches!(read_support_csv(&path), Err(Error::Config(_))));
        assert!(matches!(read_support_csv(&dir.path().join("none.csv")), Err(Error::Io { .. })));
    }

    #[test]
    fn profile_csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let p = HeightProfile::new(ProfileKind::MinLogK1, vec![0.25, 0.5], vec![1.0, 0.1], 0.0, 0.0).unwrap();
        write_profiles_csv(&[p], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "kind,t,f\nminLogK1,2.5000000000000000e-1,1.0000000000000000e0\nminLogK1,5.0000000000000000e-1,1.0000000000000001e-1\n"
        );
    }
}

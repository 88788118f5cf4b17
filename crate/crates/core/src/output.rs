//! CSV snapshots with a `key=value` sidecar.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so reading
//! a file back gives bit-identical values.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::diagnostics::Snapshot;
use crate::error::{Error, Result};
use crate::mesh::{FeField, Mesh1D};

pub const SNAPSHOT_HEADER: &str = "x,u1,u2,sum";

/// Shortest round-trip decimal; exponent form outside `[1e-5, 1e16)`.
#[derive(Clone, Copy, Debug)]
pub struct Num(pub f64);

impl std::fmt::Display for Num {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let a = self.0.abs();
        if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
            write!(f, "{}", self.0)
        } else {
            write!(f, "{:e}", self.0)
        }
    }
}

/// The sidecar path next to `csv`: same stem, extension `meta`.
pub fn meta_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta")
}

pub fn snapshot_csv(snap: &Snapshot) -> String {
    let mut s = String::with_capacity(64 * snap.u1.values().len());
    s.push_str(SNAPSHOT_HEADER);
    s.push('\n');
    let mesh = snap.u1.mesh();
    for (i, x) in mesh.nodes().enumerate() {
        let (a, b) = (snap.u1.values()[i], snap.u2.values()[i]);
        let _ = writeln!(s, "{},{},{},{}", Num(x), Num(a), Num(b), Num(a + b));
    }
    s
}

fn optional(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |v| Num(v).to_string())
}

pub fn snapshot_meta(snap: &Snapshot) -> String {
    format!(
        "t={}\nmass1={}\nmass2={}\nsegregation_defect={}\ncontact_point={}\ngradient_jump={}\n",
        Num(snap.t),
        Num(snap.mass1),
        Num(snap.mass2),
        Num(snap.segregation_defect),
        optional(snap.contact_point),
        optional(snap.gradient_jump)
    )
}

/// Writes `path` and its `.meta` sidecar.
pub fn write_snapshot_csv(snap: &Snapshot, path: &Path) -> Result<()> {
    fs::write(path, snapshot_csv(snap)).map_err(|e| Error::io(path, e))?;
    let meta = meta_path(path);
    fs::write(&meta, snapshot_meta(snap)).map_err(|e| Error::io(meta, e))
}

/// Columns of a snapshot CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotTable {
    pub x: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl SnapshotTable {
    /// Fields on `mesh`; node coordinates must match to rounding.
    pub fn on_mesh(&self, mesh: &Mesh1D) -> Result<(FeField, FeField)> {
        if self.x.len() != mesh.n_nodes() {
            return Err(Error::LengthMismatch {
                expected: mesh.n_nodes(),
                got: self.x.len(),
            });
        }
        let tol = 1e-9 * (mesh.x_right() - mesh.x_left());
        if let Some((i, _)) = mesh.nodes().enumerate().find(|(i, x)| (x - self.x[*i]).abs() > tol) {
            return Err(Error::InvalidRange(format!(
                "row {} has x = {} but mesh node {i} is at {}",
                i + 1,
                self.x[i],
                mesh.node(i)
            )));
        }
        Ok((
            FeField::new(*mesh, self.u1.clone())?,
            FeField::new(*mesh, self.u2.clone())?,
        ))
    }
}

/// Parses `x,u1,u2` with an optional trailing `sum` column, which is ignored.
pub fn parse_snapshot_csv(text: &str) -> Result<SnapshotTable> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, h)| h.trim()).unwrap_or("");
    if header != SNAPSHOT_HEADER && header != "x,u1,u2" {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{SNAPSHOT_HEADER}`, found `{header}`"),
        });
    }
    let mut table = SnapshotTable {
        x: Vec::new(),
        u1: Vec::new(),
        u2: Vec::new(),
    };
    for (idx, row) in lines {
        let line = idx + 1;
        if row.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = row.split(',').collect();
        if cols.len() < 3 || cols.len() > 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 or 4 columns, found {}", cols.len()),
            });
        }
        let num = |s: &str| {
            s.trim().parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("not a number: `{s}`"),
            })
        };
        table.x.push(num(cols[0])?);
        table.u1.push(num(cols[1])?);
        table.u2.push(num(cols[2])?);
    }
    Ok(table)
}

pub fn read_snapshot_csv(path: &Path) -> Result<SnapshotTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_snapshot_csv(&text)
}

/// `t,eta` rows of an interface trajectory.
pub fn write_trajectory_csv(path: &Path, trajectory: &[(f64, f64)]) -> Result<()> {
    let mut s = String::from("t,eta\n");
    for (t, eta) in trajectory {
        let _ = writeln!(s, "{},{}", Num(*t), Num(*eta));
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::JumpEstimator;
    use proptest::prelude::*;

    fn three_node() -> Snapshot {
        let mesh = Mesh1D::uniform(0.0, 1.0, 2).unwrap();
        let u1 = FeField::new(mesh, vec![1.0, 0.0, 0.0]).unwrap();
        let u2 = FeField::new(mesh, vec![0.0, 0.0, 1.0]).unwrap();
        Snapshot::capture(0.0, u1, u2, JumpEstimator::default()).unwrap()
    }

    #[test]
    fn three_node_rows() {
        let csv = snapshot_csv(&three_node());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines, ["x,u1,u2,sum", "0,1,0,1", "0.5,0,0,0", "1,0,1,1"]);
    }

    #[test]
    fn writes_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.csv");
        write_snapshot_csv(&three_node(), &path).unwrap();
        let meta = fs::read_to_string(dir.path().join("snap.meta")).unwrap();
        let keys: Vec<&str> = meta.lines().map(|l| l.split_once('=').unwrap().0).collect();
        assert_eq!(
            keys,
            ["t", "mass1", "mass2", "segregation_defect", "contact_point", "gradient_jump"]
        );
        assert!(meta.contains("mass1=0.25\n"));
        assert!(meta.contains("contact_point=0.5\n"));
        assert!(meta.contains("gradient_jump=none\n"));
    }

    #[test]
    fn missing_directory_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = write_snapshot_csv(&three_node(), &dir.path().join("no/such/snap.csv")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(!err.is_numerical());
    }

    #[test]
    fn bad_rows_report_lines() {
        assert!(matches!(parse_snapshot_csv("x,y\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse_snapshot_csv("x,u1,u2,sum\n0,1,0,1\n0.5,a,0,0\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_snapshot_csv("x,u1,u2,sum\n0,1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn trajectory_format() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eta.csv");
        write_trajectory_csv(&path, &[(0.0, 0.5), (1e-4, 0.500016)]).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "t,eta\n0,0.5\n0.0001,0.500016\n");
    }

    #[test]
    fn tiny_values_use_exponent() {
        assert_eq!(Num(3.25e-70).to_string(), "3.25e-70");
        assert_eq!(Num(-2e20).to_string(), "-2e20");
        assert_eq!(Num(0.00125).to_string(), "0.00125");
        assert_eq!(Num(0.0).to_string(), "0");
    }

    proptest! {
        #[test]
        fn values_round_trip_bit_exactly(
            vals in prop::collection::vec((any::<f64>(), any::<f64>()), 3..40)
        ) {
            let vals: Vec<(f64, f64)> = vals
                .into_iter()
                .map(|(a, b)| (if a.is_finite() { a } else { 0.0 }, if b.is_finite() { b } else { 1.0 }))
                .collect();
            let mesh = Mesh1D::uniform(-1.0, 3.0, vals.len() - 1).unwrap();
            let u1 = FeField::new(mesh, vals.iter().map(|v| v.0).collect()).unwrap();
            let u2 = FeField::new(mesh, vals.iter().map(|v| v.1).collect()).unwrap();
            let snap = Snapshot {
                t: 0.0, u1: u1.clone(), u2: u2.clone(), mass1: 0.0, mass2: 0.0,
                segregation_defect: 0.0, contact_point: None, gradient_jump: None,
            };
            let table = parse_snapshot_csv(&snapshot_csv(&snap)).unwrap();
            let (b1, b2) = table.on_mesh(&mesh).unwrap();
            for i in 0..vals.len() {
                prop_assert_eq!(b1.values()[i].to_bits(), u1.values()[i].to_bits());
                prop_assert_eq!(b2.values()[i].to_bits(), u2.values()[i].to_bits());
                prop_assert_eq!(table.x[i].to_bits(), mesh.node(i).to_bits());
            }
        }
    }
}

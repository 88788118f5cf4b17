//! Text configuration for simulation runs.
//!
//! The format is line oriented: `[section]` headers followed by
//! `key = value` lines, with `#` starting a comment. Keys are case sensitive
//! and every key must be known to its section.
//!
//! ```text
//! [mesh]
//! x_left = 0
//! x_right = 1
//! n = 1000
//!
//! [time]
//! tau = 1e-5
//! t_final = 0.05
//!
//! [initial]
//! kind = gaussian-bumps
//! centers = 0.4, 0.6
//! width = 0.001
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fronttrack::PressureSign;
use crate::mesh::{FeField, Mesh1D};
use crate::model::{LotkaVolterra, ModelParams, Transport};
use crate::oracle::InterfaceTrajectory;
use crate::scheme::{TimeStepping, DEFAULT_K_MAX};

pub const EXP1: &str = include_str!("../presets/exp1.cfg");
pub const EXP2: &str = include_str!("../presets/exp2.cfg");

/// Shipped preset text by name (`exp1`, `exp2`).
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "exp1" => Some(EXP1),
        "exp2" => Some(EXP2),
        _ => None,
    }
}

pub const DEFAULT_FRONT_NODES: usize = 200;
pub const DEFAULT_STENCIL_WIDTH: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshSpec {
    pub x_left: f64,
    pub x_right: f64,
    pub n: usize,
    /// Nodes per side for the Lagrangian tracker.
    pub front_nodes: usize,
}

impl MeshSpec {
    pub fn build(&self) -> Result<Mesh1D> {
        Mesh1D::uniform(self.x_left, self.x_right, self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Eulerian,
    FrontTrack,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub species: [Transport; 2],
    pub lv: LotkaVolterra,
    pub delta: f64,
    pub epsilon: f64,
    /// Constant drift profile.
    pub q: f64,
    pub pressure_sign: PressureSign,
}

impl ModelSpec {
    pub fn params(&self, mesh: &Mesh1D) -> ModelParams {
        ModelParams {
            species: self.species,
            q_field: (self.q != 0.0).then(|| FeField::constant(*mesh, self.q)),
            lv: self.lv,
            delta: self.delta,
            epsilon: self.epsilon,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialSpec {
    GaussianBumps { centers: [f64; 2], width: f64 },
    BarenblattSplit { x0: f64, t_star: f64 },
    /// Snapshot CSV (`x,u1,u2[,sum]`) on the configured mesh.
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub snapshots: Vec<f64>,
    pub stencil_width: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub mesh: MeshSpec,
    pub time: TimeStepping,
    pub solver: Solver,
    pub model: ModelSpec,
    pub initial: InitialSpec,
    pub output: OutputSpec,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("mesh", &["x_left", "x_right", "n", "front_nodes"]),
    ("time", &["tau", "t_final", "tol", "k_max", "solver"]),
    ("model", &["delta", "epsilon", "q", "pressure_sign"]),
    ("species.1", &["a", "b", "c", "alpha", "beta1", "beta2"]),
    ("species.2", &["a", "b", "c", "alpha", "beta1", "beta2"]),
    ("initial", &["kind", "centers", "width", "x0", "t_star", "path"]),
    ("output", &["dir", "snapshots", "stencil_width"]),
];

struct Entry {
    value: String,
    line: usize,
}

struct Document {
    entries: BTreeMap<(&'static str, &'static str), Entry>,
    sections: Vec<&'static str>,
}

fn tokenize(text: &str) -> Result<Document> {
    let mut entries: BTreeMap<(&'static str, &'static str), Entry> = BTreeMap::new();
    let mut sections = Vec::new();
    let mut current: Option<(&'static str, &'static [&'static str])> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| Error::Parse {
                line,
                message: format!("unterminated section header `{content}`"),
            })?;
            let name = name.trim();
            let &(sec, keys) = SECTIONS.iter().find(|(s, _)| *s == name).ok_or_else(|| Error::Parse {
                line,
                message: format!("unknown section `[{name}]`"),
            })?;
            current = Some((sec, keys));
            if !sections.contains(&sec) {
                sections.push(sec);
            }
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let (sec, keys) = current.ok_or_else(|| Error::Parse {
            line,
            message: format!("key `{key}` appears before any section header"),
        })?;
        let &key = keys.iter().find(|k| **k == key).ok_or_else(|| Error::Parse {
            line,
            message: format!("unknown key `{key}` in [{sec}]"),
        })?;
        if value.is_empty() {
            return Err(Error::Parse {
                line,
                message: format!("missing value for `{sec}.{key}`"),
            });
        }
        if let Some(first) = entries.get(&(sec, key)) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate key `{sec}.{key}` (lines {} and {line})", first.line),
            });
        }
        entries.insert(
            (sec, key),
            Entry {
                value: value.to_string(),
                line,
            },
        );
    }
    Ok(Document { entries, sections })
}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation {
        key: key.into(),
        message: message.into(),
    }
}

impl Document {
    fn raw(&self, sec: &'static str, key: &'static str) -> Option<&Entry> {
        self.entries.get(&(sec, key))
    }

    fn parsed<T: std::str::FromStr>(&self, sec: &'static str, key: &'static str, what: &str) -> Result<Option<T>> {
        self.raw(sec, key)
            .map(|e| {
                e.value.parse::<T>().map_err(|_| Error::Parse {
                    line: e.line,
                    message: format!("`{sec}.{key}` must be {what}, found `{}`", e.value),
                })
            })
            .transpose()
    }

    fn num(&self, sec: &'static str, key: &'static str) -> Result<Option<f64>> {
        self.parsed(sec, key, "a number")
    }

    fn count(&self, sec: &'static str, key: &'static str) -> Result<Option<usize>> {
        self.parsed(sec, key, "a nonnegative integer")
    }

    fn list(&self, sec: &'static str, key: &'static str) -> Result<Option<Vec<f64>>> {
        self.raw(sec, key)
            .map(|e| {
                e.value
                    .split(',')
                    .map(|v| {
                        v.trim().parse::<f64>().map_err(|_| Error::Parse {
                            line: e.line,
                            message: format!("`{sec}.{key}` must be a comma-separated list of numbers"),
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    fn text(&self, sec: &'static str, key: &'static str) -> Option<&str> {
        self.raw(sec, key).map(|e| e.value.as_str())
    }

    fn required<T>(&self, sec: &'static str, key: &'static str, v: Option<T>) -> Result<T> {
        v.ok_or_else(|| invalid(format!("{sec}.{key}"), "is required"))
    }

    fn reject(&self, sec: &'static str, keys: &[&'static str], why: &str) -> Result<()> {
        match keys.iter().find(|k| self.raw(sec, k).is_some()) {
            Some(k) => Err(invalid(format!("{sec}.{k}"), why)),
            None => Ok(()),
        }
    }
}

fn species(doc: &Document, sec: &'static str) -> Result<(Transport, f64, [f64; 2])> {
    let t = Transport {
        a: doc.num(sec, "a")?.unwrap_or(1.0),
        b: doc.num(sec, "b")?.unwrap_or(0.0),
        c: doc.num(sec, "c")?.unwrap_or(0.0),
    };
    let alpha = doc.num(sec, "alpha")?.unwrap_or(0.0);
    let beta = [
        doc.num(sec, "beta1")?.unwrap_or(0.0),
        doc.num(sec, "beta2")?.unwrap_or(0.0),
    ];
    Ok((t, alpha, beta))
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<SimulationConfig> {
    let doc = tokenize(text)?;
    if !doc.sections.contains(&"mesh") {
        return Err(invalid("mesh", "section is required"));
    }

    let mesh = MeshSpec {
        x_left: doc.required("mesh", "x_left", doc.num("mesh", "x_left")?)?,
        x_right: doc.required("mesh", "x_right", doc.num("mesh", "x_right")?)?,
        n: doc.required("mesh", "n", doc.count("mesh", "n")?)?,
        front_nodes: doc.count("mesh", "front_nodes")?.unwrap_or(DEFAULT_FRONT_NODES),
    };

    let time = TimeStepping {
        tau: doc.required("time", "tau", doc.num("time", "tau")?)?,
        t_final: doc.required("time", "t_final", doc.num("time", "t_final")?)?,
        tol: doc.num("time", "tol")?.unwrap_or(1e-4),
        k_max: doc.count("time", "k_max")?.unwrap_or(DEFAULT_K_MAX),
    };
    let solver = match doc.text("time", "solver") {
        None | Some("eulerian") => Solver::Eulerian,
        Some("fronttrack") => Solver::FrontTrack,
        Some(other) => {
            return Err(invalid(
                "time.solver",
                format!("expected `eulerian` or `fronttrack`, found `{other}`"),
            ))
        }
    };

    let (t1, alpha1, beta1) = species(&doc, "species.1")?;
    let (t2, alpha2, beta2) = species(&doc, "species.2")?;
    let pressure_sign = match doc.text("model", "pressure_sign") {
        None | Some("elliptic") => PressureSign::Elliptic,
        Some("darcy") => PressureSign::Darcy,
        Some(other) => {
            return Err(invalid(
                "model.pressure_sign",
                format!("expected `elliptic` or `darcy`, found `{other}`"),
            ))
        }
    };
    let model = ModelSpec {
        species: [t1, t2],
        lv: LotkaVolterra {
            alpha: [alpha1, alpha2],
            beta: [beta1, beta2],
        },
        delta: doc.num("model", "delta")?.unwrap_or(1e-3),
        epsilon: doc.num("model", "epsilon")?.unwrap_or(1e-3),
        q: doc.num("model", "q")?.unwrap_or(0.0),
        pressure_sign,
    };

    let kind = doc.required("initial", "kind", doc.text("initial", "kind"))?;
    let initial = match kind {
        "gaussian-bumps" => {
            doc.reject("initial", &["x0", "t_star", "path"], "not used by gaussian-bumps")?;
            let centers = doc.required("initial", "centers", doc.list("initial", "centers")?)?;
            let centers: [f64; 2] = centers
                .try_into()
                .map_err(|_| invalid("initial.centers", "needs exactly two values"))?;
            InitialSpec::GaussianBumps {
                centers,
                width: doc.required("initial", "width", doc.num("initial", "width")?)?,
            }
        }
        "barenblatt-split" => {
            doc.reject("initial", &["centers", "width", "path"], "not used by barenblatt-split")?;
            InitialSpec::BarenblattSplit {
                x0: doc.required("initial", "x0", doc.num("initial", "x0")?)?,
                t_star: doc.num("initial", "t_star")?.unwrap_or(1.0),
            }
        }
        "file" => {
            doc.reject("initial", &["centers", "width", "x0", "t_star"], "not used by file")?;
            InitialSpec::File(PathBuf::from(doc.required("initial", "path", doc.text("initial", "path"))?))
        }
        other => {
            return Err(invalid(
                "initial.kind",
                format!("expected gaussian-bumps, barenblatt-split or file, found `{other}`"),
            ))
        }
    };

    let output = OutputSpec {
        dir: PathBuf::from(doc.text("output", "dir").unwrap_or("out")),
        snapshots: doc.list("output", "snapshots")?.unwrap_or_default(),
        stencil_width: doc.count("output", "stencil_width")?.unwrap_or(DEFAULT_STENCIL_WIDTH),
    };

    let config = SimulationConfig {
        mesh,
        time,
        solver,
        model,
        initial,
        output,
    };
    config.validate()?;
    Ok(config)
}

/// Reads a config file; a relative `initial.path` is taken relative to the
/// file's directory.
pub fn load_config(path: &Path) -> Result<SimulationConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut config = parse_config(&text)?;
    if let InitialSpec::File(p) = &mut config.initial {
        if p.is_relative() {
            if let Some(dir) = path.parent() {
                *p = dir.join(&*p);
            }
        }
    }
    Ok(config)
}

fn rekey(section: &str, e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => invalid(format!("{section}.{name}"), reason),
        Error::InvalidRange(msg) => invalid(section, msg),
        other => other,
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        let mesh = self.mesh.build().map_err(|e| rekey("mesh", e))?;
        if self.mesh.front_nodes < 3 {
            return Err(invalid("mesh.front_nodes", "must be at least 3"));
        }
        self.time.validate().map_err(|e| rekey("time", e))?;
        let params = self.model.params(&mesh);
        params.validate().map_err(|e| rekey("model", e))?;
        match &self.initial {
            InitialSpec::GaussianBumps { width, .. } => {
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(invalid("initial.width", "must be > 0"));
                }
            }
            InitialSpec::BarenblattSplit { x0, t_star } => {
                InterfaceTrajectory::new(*x0, *t_star).map_err(|e| rekey("initial", e))?;
                if !(mesh.x_left() < *x0 && *x0 < mesh.x_right()) {
                    return Err(invalid("initial.x0", "must lie inside the mesh"));
                }
            }
            InitialSpec::File(_) => {}
        }
        if let Some(t) = self
            .output
            .snapshots
            .iter()
            .find(|t| !(**t >= 0.0 && **t <= self.time.t_final))
        {
            return Err(invalid(
                "output.snapshots",
                format!("{t} lies outside [0, {}]", self.time.t_final),
            ));
        }
        if self.output.stencil_width < 2 {
            return Err(invalid("output.stencil_width", "must be ≥ 2"));
        }
        Ok(())
    }

    /// Canonical text form; [`parse_config`] reads it back unchanged.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let m = &self.mesh;
        let _ = writeln!(
            s,
            "[mesh]\nx_left = {}\nx_right = {}\nn = {}\nfront_nodes = {}\n",
            m.x_left, m.x_right, m.n, m.front_nodes
        );
        let t = &self.time;
        let solver = match self.solver {
            Solver::Eulerian => "eulerian",
            Solver::FrontTrack => "fronttrack",
        };
        let _ = writeln!(
            s,
            "[time]\ntau = {}\nt_final = {}\ntol = {}\nk_max = {}\nsolver = {solver}\n",
            t.tau, t.t_final, t.tol, t.k_max
        );
        let md = &self.model;
        let sign = match md.pressure_sign {
            PressureSign::Elliptic => "elliptic",
            PressureSign::Darcy => "darcy",
        };
        let _ = writeln!(
            s,
            "[model]\ndelta = {}\nepsilon = {}\nq = {}\npressure_sign = {sign}\n",
            md.delta, md.epsilon, md.q
        );
        for i in 0..2 {
            let sp = &md.species[i];
            let _ = writeln!(
                s,
                "[species.{}]\na = {}\nb = {}\nc = {}\nalpha = {}\nbeta1 = {}\nbeta2 = {}\n",
                i + 1,
                sp.a,
                sp.b,
                sp.c,
                md.lv.alpha[i],
                md.lv.beta[i][0],
                md.lv.beta[i][1]
            );
        }
        s.push_str("[initial]\n");
        match &self.initial {
            InitialSpec::GaussianBumps { centers, width } => {
                let _ = writeln!(
                    s,
                    "kind = gaussian-bumps\ncenters = {}, {}\nwidth = {width}",
                    centers[0], centers[1]
                );
            }
            InitialSpec::BarenblattSplit { x0, t_star } => {
                let _ = writeln!(s, "kind = barenblatt-split\nx0 = {x0}\nt_star = {t_star}");
            }
            InitialSpec::File(p) => {
                let _ = writeln!(s, "kind = file\npath = {}", p.display());
            }
        }
        let o = &self.output;
        let _ = write!(s, "\n[output]\ndir = {}\n", o.dir.display());
        if !o.snapshots.is_empty() {
            let times: Vec<String> = o.snapshots.iter().map(|t| t.to_string()).collect();
            let _ = writeln!(s, "snapshots = {}", times.join(", "));
        }
        let _ = writeln!(s, "stencil_width = {}", o.stencil_width);
        s
    }
}

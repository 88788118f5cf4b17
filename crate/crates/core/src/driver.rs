//! End-to-end runs of a [`SimulationConfig`].

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::config::{InitialSpec, SimulationConfig, Solver};
use crate::diagnostics::{contact_point, sup_error, JumpEstimator, Snapshot, DEFAULT_SKIP};
use crate::error::{Error, Result};
use crate::fronttrack::{track, FrontState};
use crate::mesh::{FeField, Mesh1D};
use crate::model::{gaussian_bump_initial, ModelParams, Species};
use crate::oracle::{barenblatt, explicit_segregated, BarenblattProfile, InterfaceTrajectory};
use crate::output::{read_snapshot_csv, write_snapshot_csv, write_trajectory_csv};
use crate::scheme::{run, State, TimeStepping};

/// Everything a finished run produced.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub snapshots: Vec<Snapshot>,
    /// Interface positions `(t, η)`, tracker runs only.
    pub trajectory: Option<Vec<(f64, f64)>>,
    /// Largest Picard count of any step, Eulerian runs only.
    pub max_iterations: Option<usize>,
}

pub fn jump_estimator(config: &SimulationConfig) -> JumpEstimator {
    JumpEstimator {
        stencil_width: config.output.stencil_width,
        skip: DEFAULT_SKIP,
    }
}

/// Initial densities on the configured mesh.
pub fn initial_state(config: &SimulationConfig, mesh: &Mesh1D) -> Result<State> {
    let (u1, u2) = match &config.initial {
        InitialSpec::GaussianBumps { centers, width } => (
            gaussian_bump_initial(centers[0], *width, mesh)?,
            gaussian_bump_initial(centers[1], *width, mesh)?,
        ),
        InitialSpec::BarenblattSplit { x0, t_star } => {
            let traj = InterfaceTrajectory::new(*x0, *t_star)?;
            let profile = traj.profile();
            (
                FeField::from_fn(*mesh, |x| explicit_segregated(x, 0.0, &traj, &profile).0)?,
                FeField::from_fn(*mesh, |x| explicit_segregated(x, 0.0, &traj, &profile).1)?,
            )
        }
        InitialSpec::File(path) => read_snapshot_csv(path)?.on_mesh(mesh)?,
    };
    State::new(0.0, u1, u2)
}

/// Tracker state for the configured initial data. Data other than the
/// Barenblatt split is cut at its contact point.
pub fn initial_front(config: &SimulationConfig, mesh: &Mesh1D) -> Result<FrontState> {
    let (lo, hi) = (config.mesh.x_left, config.mesh.x_right);
    if let InitialSpec::BarenblattSplit { x0, t_star } = config.initial {
        let traj = InterfaceTrajectory::new(x0, t_star)?;
        return FrontState::barenblatt_split(&traj, lo, hi, config.mesh.front_nodes);
    }
    let init = initial_state(config, mesh)?;
    let eta = contact_point(&init.u1, &init.u2)?.ok_or_else(|| Error::Validation {
        key: "initial".into(),
        message: "the tracker needs data with a single contact point".into(),
    })?;
    let right = 0.5 * (eta + hi);
    let plus = if init.u1.eval(right) >= init.u2.eval(right) {
        Species::U1
    } else {
        Species::U2
    };
    let sum = init.u1.zip_with(&init.u2, |a, b| a + b)?;
    FrontState::new(eta, lo, hi, config.mesh.front_nodes, plus, |x| sum.eval(x))
}

fn snapshot_steps(times: &[f64], tau: f64) -> Vec<usize> {
    let mut steps: Vec<usize> = times
        .iter()
        .map(|t| (t / tau - 1e-9).ceil().max(0.0) as usize)
        .filter(|s| *s > 0)
        .collect();
    steps.sort_unstable();
    steps.dedup();
    steps
}

pub fn run_eulerian(config: &SimulationConfig) -> Result<RunSummary> {
    let mesh = config.mesh.build()?;
    let init = initial_state(config, &mesh)?;
    let params = config.model.params(&mesh);
    let out = run(init, &params, &config.time, &config.output.snapshots, jump_estimator(config))?;
    Ok(RunSummary {
        snapshots: out.snapshots,
        trajectory: None,
        max_iterations: Some(out.max_iterations),
    })
}

pub fn run_fronttrack(config: &SimulationConfig) -> Result<RunSummary> {
    let mesh = config.mesh.build()?;
    let initial = initial_front(config, &mesh)?;
    let params = config.model.params(&mesh);
    params.validate()?;
    let jump = jump_estimator(config);
    let targets = snapshot_steps(&config.output.snapshots, config.time.tau);
    let mut snapshots = Vec::new();
    let mut failure = None;
    let mut step = 0;
    let capture = |s: &FrontState| -> Result<Snapshot> {
        let (u1, u2) = s.to_fields(&mesh)?;
        Snapshot::capture(s.t(), u1, u2, jump)
    };
    let (_, trajectory) = track(
        initial,
        &params,
        config.time.tau,
        config.time.n_steps(),
        config.model.pressure_sign,
        |s| {
            if failure.is_none() && (step == 0 || targets.binary_search(&step).is_ok()) {
                match capture(s) {
                    Ok(snap) => snapshots.push(snap),
                    Err(e) => failure = Some(e),
                }
            }
            step += 1;
        },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(RunSummary {
        snapshots,
        trajectory: Some(trajectory),
        max_iterations: None,
    })
}

pub fn run_config(config: &SimulationConfig) -> Result<RunSummary> {
    match config.solver {
        Solver::Eulerian => run_eulerian(config),
        Solver::FrontTrack => run_fronttrack(config),
    }
}

/// Writes `snapshot_NNN.csv` (with sidecars) and, for tracker runs,
/// `trajectory.csv` into `dir`. Returns the files written.
pub fn write_outputs(summary: &RunSummary, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for (i, snap) in summary.snapshots.iter().enumerate() {
        let path = dir.join(format!("snapshot_{i:03}.csv"));
        write_snapshot_csv(snap, &path)?;
        files.push(path);
    }
    if let Some(traj) = &summary.trajectory {
        let path = dir.join("trajectory.csv");
        write_trajectory_csv(&path, traj)?;
        files.push(path);
    }
    Ok(files)
}

/// Final-time interface diagnostics of one member of a δ sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaRow {
    pub delta: f64,
    pub t: f64,
    pub contact_point: Option<f64>,
    pub gradient_jump: Option<f64>,
    pub segregation_defect: f64,
}

/// Repeats the Eulerian run once per `δ`, spreading the runs over the
/// available cores. Rows come back in the order of `deltas`.
pub fn sweep_delta(config: &SimulationConfig, deltas: &[f64]) -> Result<Vec<DeltaRow>> {
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(deltas.len())
        .max(1);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<DeltaRow>>>> = Mutex::new((0..deltas.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= deltas.len() {
                    break;
                }
                let mut c = config.clone();
                c.model.delta = deltas[i];
                c.output.snapshots = vec![c.time.t_final];
                let row = run_eulerian(&c).map(|s| {
                    let last = s.snapshots.last().expect("initial snapshot is always present");
                    DeltaRow {
                        delta: deltas[i],
                        t: last.t,
                        contact_point: last.contact_point,
                        gradient_jump: last.gradient_jump,
                        segregation_defect: last.segregation_defect,
                    }
                });
                results.lock().unwrap()[i] = Some(row);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every index is claimed by a worker"))
        .collect()
}

/// Single-species porous-medium run on `(−6, 6)` from the Barenblatt profile
/// with `t* = 1`; returns the sup-norm error of the P1 solution at `t_final`.
pub fn validate_barenblatt(n: usize, tau: f64, t_final: f64) -> Result<f64> {
    let profile = BarenblattProfile::new(1.0)?;
    let mesh = Mesh1D::uniform(-6.0, 6.0, n)?;
    let u1 = FeField::from_fn(mesh, |x| barenblatt(x, 0.0, &profile))?;
    let init = State::new(0.0, u1, FeField::zeros(mesh))?;
    let params = ModelParams::porous_medium(1.0, 0.0, 1e-3);
    let ts = TimeStepping::new(tau, t_final, 1e-10);
    let out = run(init, &params, &ts, &[], JumpEstimator::default())?;
    let t = out.final_state.t;
    let r = profile.support_radius(t);
    Ok(sup_error(&out.final_state.u1, |x| barenblatt(x, t, &profile), 32, &[-r, r]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, EXP1};
    use crate::diagnostics::mass;

    fn short(text: &str, t_final: f64, snapshots: &str) -> SimulationConfig {
        let text = text
            .replace("t_final = 0.05", &format!("t_final = {t_final}"))
            .replace("0.01, 0.025, 0.05", snapshots);
        parse_config(&text).unwrap()
    }

    #[test]
    fn eulerian_run_writes_numbered_snapshots() {
        let c = short(EXP1, 2e-4, "1e-4, 2e-4");
        let summary = run_config(&c).unwrap();
        assert_eq!(summary.snapshots.len(), 3);
        assert!(summary.max_iterations.unwrap() >= 1);
        let dir = tempfile::tempdir().unwrap();
        let files = write_outputs(&summary, dir.path()).unwrap();
        assert_eq!(files.len(), 3);
        assert!(dir.path().join("snapshot_002.meta").exists());
    }

    fn split_config(solver: &str) -> SimulationConfig {
        parse_config(&format!(
            "[mesh]\nx_left = -6\nx_right = 6\nn = 600\nfront_nodes = 100\n\
             [time]\ntau = 1e-4\nt_final = 0.01\nsolver = {solver}\n\
             [model]\ndelta = 0\n\
             [initial]\nkind = barenblatt-split\nx0 = 0.5\n\
             [output]\nsnapshots = 0.005, 0.01\n"
        ))
        .unwrap()
    }

    #[test]
    fn tracker_run_resamples_onto_mesh() {
        let c = split_config("fronttrack");
        let summary = run_config(&c).unwrap();
        let traj = summary.trajectory.as_ref().unwrap();
        assert_eq!(traj.len(), 101);
        assert_eq!(summary.snapshots.len(), 3);
        let profile = BarenblattProfile::new(1.0).unwrap();
        for s in &summary.snapshots {
            assert_eq!(s.segregation_defect, 0.0);
            assert!((mass(&s.u1) + mass(&s.u2) - profile.mass()).abs() < 1e-3);
        }
        let dir = tempfile::tempdir().unwrap();
        write_outputs(&summary, dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
        assert!(text.starts_with("t,eta\n0,0.5\n"));
    }

    #[test]
    fn tracker_accepts_file_data() {
        let c = split_config("eulerian");
        let mesh = c.mesh.build().unwrap();
        let init = initial_state(&c, &mesh).unwrap();
        let snap = Snapshot::capture(0.0, init.u1, init.u2, JumpEstimator::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("init.csv");
        write_snapshot_csv(&snap, &path).unwrap();
        let mut c2 = split_config("fronttrack");
        c2.initial = InitialSpec::File(path);
        let front = initial_front(&c2, &mesh).unwrap();
        assert!((front.eta() - 0.5).abs() <= mesh.h());
        assert_eq!(front.species(crate::fronttrack::Side::Plus), Species::U1);
    }

    #[test]
    fn sweep_rows_follow_input_order() {
        let c = short(EXP1, 1e-4, "1e-4");
        let deltas = [1e-2, 1e-3, 1e-4];
        let rows = sweep_delta(&c, &deltas).unwrap();
        assert_eq!(rows.iter().map(|r| r.delta).collect::<Vec<_>>(), deltas);
        for r in &rows {
            assert!((r.t - 1e-4).abs() < 1e-15);
            assert!(r.contact_point.is_some());
        }
    }

    #[test]
    fn barenblatt_validation_small() {
        let err = validate_barenblatt(200, 1e-4, 0.01).unwrap();
        assert!(err < 5e-2, "{err}");
    }
}

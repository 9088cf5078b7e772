//! Command implementations: run, reference, compare.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};

use momentuq::closure::ClosureError;
use momentuq::collocation::{run_sc, ScConfig, ScError, ScMode};
use momentuq::mesh::{relative_l2_error, BoxMask, CellGeometry};
use momentuq::solver::{run, DualUpdate, MomentField, MomentProblem, SolverError};

use crate::config::{ExperimentConfig, Geometry, Method, QuadratureKind};
use crate::snapshot::{mesh_hash_1d, mesh_hash_2d, Snapshot};

/// Exit codes distinguish the failure modes callers script against.
pub const EXIT_NONCONVERGENCE: i32 = 10;
pub const EXIT_ILL_CONDITIONED: i32 = 11;
pub const EXIT_INADMISSIBLE: i32 = 12;

/// Maps every error in a run to the documented process exit code.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if let Some(solver) = err.downcast_ref::<SolverError>() {
        return match solver {
            SolverError::Dual { source, .. } => match source {
                ClosureError::IllConditionedHessian { .. } => EXIT_ILL_CONDITIONED,
                ClosureError::InadmissibleDual { .. } => EXIT_INADMISSIBLE,
                _ => EXIT_NONCONVERGENCE,
            },
            SolverError::SteadyNonConvergence { .. } => EXIT_NONCONVERGENCE,
            SolverError::InadmissibleReconstruction { .. }
            | SolverError::InadmissibleMean { .. }
            | SolverError::InadmissibleInitial { .. } => EXIT_INADMISSIBLE,
            SolverError::Precondition(_) => 1,
        };
    }
    if let Some(sc) = err.downcast_ref::<ScError>() {
        return match sc {
            ScError::PointFailures(list) => match list.first() {
                Some((_, momentuq::collocation::PointFailure::SteadyNonConvergence { .. })) => {
                    EXIT_NONCONVERGENCE
                }
                _ => EXIT_INADMISSIBLE,
            },
            ScError::MissingReference => 1,
        };
    }
    1
}

impl Geometry {
    pub fn hash(&self) -> String {
        match self {
            Geometry::Line(mesh) => mesh_hash_1d(mesh),
            Geometry::Tri(mesh) => mesh_hash_2d(mesh),
        }
    }

    pub fn cells(&self) -> &(dyn CellGeometry + Sync) {
        match self {
            Geometry::Line(mesh) => mesh,
            Geometry::Tri(mesh) => mesh.as_ref(),
        }
    }
}

pub struct RunArtifacts {
    pub snapshot_path: PathBuf,
    pub csv_path: PathBuf,
    pub levels: Option<Vec<usize>>,
}

/// Execute a configured run, writing the snapshot and per-iteration CSV
/// into `output_dir`.
pub fn cmd_run(
    config: &ExperimentConfig,
    output_dir: &Path,
    reference: Option<&Path>,
) -> Result<RunArtifacts> {
    std::fs::create_dir_all(output_dir)
        .with_context(|| format!("creating {}", output_dir.display()))?;
    let built = config.build()?;
    let mesh_hash = built.geometry.hash();
    let reference = reference
        .map(|p| -> Result<Snapshot> {
            let snap = Snapshot::read(p)?;
            if snap.mesh_hash != mesh_hash {
                bail!(
                    "reference snapshot {} was produced on a different mesh",
                    p.display()
                );
            }
            Ok(snap)
        })
        .transpose()?;

    let method = &config.experiment.method;
    let csv_path = output_dir.join("run.csv");
    let snapshot_path = output_dir.join("moments.snap");
    let mut csv = std::fs::File::create(&csv_path)?;
    writeln!(csv, "iteration,pseudo_time,wall_seconds,residual,rel_E_error,rel_Var_error")?;

    let component = config.output.error_component;
    let mask = built.mask;
    let (moments, levels) = if method.is_collocation() {
        let mode = if *method == Method::ScCoupled { ScMode::Coupled } else { ScMode::Blackbox };
        let mut sc_config = ScConfig::new(config.time_control());
        sc_config.cfl = built.solver.cfl;
        sc_config.workers = built.solver.workers;
        let out = run_sc(
            built.model.as_ref(),
            &built.domain,
            built.geometry.cells(),
            &built.initial,
            built.ladder.rule(0),
            built.ladder.basis(0),
            &sc_config,
            mode,
            reference.as_ref().map(|r| &r.moments),
            component,
            mask.as_ref(),
        )?;
        match mode {
            ScMode::Coupled => {
                for rec in &out.error_series {
                    writeln!(
                        csv,
                        "{},{},{},,{},{}",
                        rec.step, rec.time, rec.wall_seconds, rec.rel_e_error, rec.rel_var_error
                    )?;
                }
            }
            ScMode::Blackbox => {
                let (e, v) = reference
                    .as_ref()
                    .map(|r| errors_against(&out.moments, &r.moments, built.geometry.cells(), component, mask.as_ref()))
                    .unwrap_or((String::new(), String::new()));
                writeln!(csv, "{},,,,{},{}", out.steps, e, v)?;
            }
        }
        (out.moments, None)
    } else {
        let variant =
            if method.one_shot() { DualUpdate::SingleStep } else { DualUpdate::Converge };
        let problem = MomentProblem {
            model: built.model.as_ref(),
            closure: built.closure.as_ref(),
            ladder: &built.ladder,
            domain: &built.domain,
            initial: built.initial.clone(),
        };
        let started = Instant::now();
        let geometry = built.geometry.cells();
        let mut rows: Vec<String> = Vec::new();
        let mut observer = |rec: &momentuq::solver::StepRecord| {
            let (e, v) = reference
                .as_ref()
                .map(|r| errors_against(rec.moments, &r.moments, geometry, component, mask.as_ref()))
                .unwrap_or((String::new(), String::new()));
            rows.push(format!(
                "{},{},{},{},{},{}",
                rec.step,
                rec.time,
                started.elapsed().as_secs_f64(),
                rec.residual,
                e,
                v
            ));
        };
        let out = run(
            &problem,
            &built.solver,
            variant,
            built.adaptivity.as_ref(),
            Some(&mut observer),
        )?;
        for row in rows {
            writeln!(csv, "{row}")?;
        }
        (out.moments, Some(out.levels))
    };

    let method_name = format!("{:?}", method).to_lowercase();
    let snap = Snapshot::from_run(
        &method_name,
        config.stochastic.dim,
        &moments,
        built.geometry.cells(),
        mesh_hash,
    );
    snap.write(&snapshot_path)?;
    if let Some(levels) = &levels {
        let mut text = String::new();
        for l in levels {
            text.push_str(&format!("{l}\n"));
        }
        std::fs::write(output_dir.join("levels.txt"), text)?;
    }
    Ok(RunArtifacts { snapshot_path, csv_path, levels })
}

fn errors_against(
    moments: &MomentField,
    reference: &MomentField,
    geometry: &(dyn CellGeometry + Sync),
    component: usize,
    mask: Option<&BoxMask>,
) -> (String, String) {
    let e = relative_l2_error(
        geometry,
        &moments.component_expectation(component),
        &reference.component_expectation(component),
        mask,
    )
    .map(|v| v.to_string())
    .unwrap_or_default();
    let v = relative_l2_error(
        geometry,
        &moments.component_variance(component),
        &reference.component_variance(component),
        mask,
    )
    .map(|v| v.to_string())
    .unwrap_or_default();
    (e, v)
}

/// Dense stochastic-collocation reference for a config: Gauss-Legendre
/// with `output.reference_points` per dimension (default 100 for p = 1,
/// 50 otherwise), black-box mode, same deterministic flux.
pub fn cmd_reference(config: &ExperimentConfig, output_dir: &Path) -> Result<PathBuf> {
    let mut ref_config = config.clone();
    ref_config.experiment.method = Method::ScBlackbox;
    ref_config.experiment.closure = crate::config::ClosureKind::Quadratic;
    let points = config
        .output
        .reference_points
        .unwrap_or(if config.stochastic.dim == 1 { 100 } else { 50 });
    let top_order = *config.stochastic.orders.iter().max().unwrap();
    ref_config.stochastic.orders = vec![top_order];
    ref_config.stochastic.quadrature = QuadratureKind::GaussLegendre;
    ref_config.stochastic.points = vec![points];
    ref_config.adaptivity = None;
    ref_config.validate()?;

    std::fs::create_dir_all(output_dir)?;
    let built = ref_config.build()?;
    let mut sc_config = ScConfig::new(ref_config.time_control());
    sc_config.cfl = built.solver.cfl;
    sc_config.workers = built.solver.workers;
    let out = run_sc(
        built.model.as_ref(),
        &built.domain,
        built.geometry.cells(),
        &built.initial,
        built.ladder.rule(0),
        built.ladder.basis(0),
        &sc_config,
        ScMode::Blackbox,
        None,
        0,
        None,
    )?;
    let path = output_dir.join("reference.snap");
    let snap = Snapshot::from_run(
        "sc_reference",
        ref_config.stochastic.dim,
        &out.moments,
        built.geometry.cells(),
        built.geometry.hash(),
    );
    snap.write(&path)?;
    Ok(path)
}

/// Relative L² errors between two snapshots, per conserved component,
/// printed as CSV.
pub fn cmd_compare(
    result: &Path,
    reference: &Path,
    allow_truncate: bool,
    mask: Option<BoxMask>,
) -> Result<String> {
    let mut a = Snapshot::read(result)?;
    let b = Snapshot::read(reference)?;
    a.compatible(&b)?;
    let a_max = a.basis_sizes.iter().copied().max().unwrap_or(0);
    let b_max = b.basis_sizes.iter().copied().max().unwrap_or(0);
    if a_max > b_max {
        if !allow_truncate {
            bail!(
                "result carries higher-order moments than the reference ({a_max} > {b_max}); \
                 pass --allow-truncate to project onto the leading block"
            );
        }
        a.truncate(b_max);
    }
    let mut out = String::from("component,rel_E_error,rel_Var_error\n");
    for component in 0..a.m {
        let e = relative_l2_error(
            &b,
            &a.moments.component_expectation(component),
            &b.moments.component_expectation(component),
            mask.as_ref(),
        )?;
        let v_a = a.moments.component_variance(component);
        let v_b = b.moments.component_variance(component);
        let v = if v_b.iter().all(|&x| x == 0.0) {
            // Deterministic references have no variance to normalize by.
            f64::NAN
        } else {
            relative_l2_error(&b, &v_a, &v_b, mask.as_ref())?
        };
        out.push_str(&format!("{component},{e},{v}\n"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;

    #[test]
    fn run_and_compare_self_is_zero() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = preset("burgers-shock").unwrap();
        config.solver.t_end = Some(0.05);
        config.stochastic.points = vec![4];
        config.mesh = crate::config::MeshSection::Line { x_min: 0.0, x_max: 1.0, n_cells: 24 };
        let artifacts = cmd_run(&config, dir.path(), None).unwrap();
        let csv = cmd_compare(&artifacts.snapshot_path, &artifacts.snapshot_path, false, None)
            .unwrap();
        let line = csv.lines().nth(1).unwrap();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[1].parse::<f64>().unwrap(), 0.0);
        assert_eq!(fields[2].parse::<f64>().unwrap(), 0.0);
    }

    #[test]
    fn higher_order_snapshot_needs_explicit_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let mut low = preset("burgers-shock").unwrap();
        low.solver.t_end = Some(0.02);
        low.stochastic.points = vec![4];
        low.stochastic.orders = vec![2];
        low.mesh = crate::config::MeshSection::Line { x_min: 0.0, x_max: 1.0, n_cells: 16 };
        let mut high = low.clone();
        high.stochastic.orders = vec![4];
        let low_run = cmd_run(&low, &dir.path().join("low"), None).unwrap();
        let high_run = cmd_run(&high, &dir.path().join("high"), None).unwrap();
        let err = cmd_compare(&high_run.snapshot_path, &low_run.snapshot_path, false, None);
        assert!(err.is_err());
        let ok = cmd_compare(&high_run.snapshot_path, &low_run.snapshot_path, true, None);
        assert!(ok.is_ok());
    }
}

//! Experiment configuration: a TOML file fully determines a run.

use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use momentuq::closure::{EntropyClosure, EulerClosure, QuadraticClosure};
use momentuq::mesh::{generate_bend, generate_rect, load_mesh, BoxMask, Mesh1D, Mesh2D};
use momentuq::models::{BurgersModel, EulerFlux, EulerModel, ModelProblem};
use momentuq::random_space::{
    sparse_quadrature, tensor_quadrature, BasisSet, QuadratureFamily, QuadratureRule,
};
use momentuq::solver::{
    AdaptivityConfig, BoundaryCondition, Domain, LevelSpec, ResidualMode, RetardationSchedule,
    SolverConfig, StochasticFn, StochasticLadder, TimeControl,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Sg,
    Ipm,
    Osipm,
    AdaptiveIpm,
    Adosipm,
    Readosipm,
    ScBlackbox,
    ScCoupled,
}

impl Method {
    pub fn is_adaptive(&self) -> bool {
        matches!(self, Method::AdaptiveIpm | Method::Adosipm | Method::Readosipm)
    }

    pub fn is_collocation(&self) -> bool {
        matches!(self, Method::ScBlackbox | Method::ScCoupled)
    }

    pub fn one_shot(&self) -> bool {
        matches!(self, Method::Osipm | Method::Adosipm | Method::Readosipm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Burgers,
    Euler1d,
    Euler2d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureKind {
    Quadratic,
    Euler,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSection {
    pub method: Method,
    pub model: ModelKind,
    pub closure: ClosureKind,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_gamma() -> f64 {
    1.4
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeshSection {
    Line { x_min: f64, x_max: f64, n_cells: usize },
    Rect { x_range: [f64; 2], y_range: [f64; 2], nx: usize, ny: usize },
    Bend { width: f64, length: f64, nx: usize, ny: usize, y_bend: f64, angle: f64 },
    File { path: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKindCfg {
    Periodic,
    Outflow,
    Slip,
    Farfield,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StochasticSection {
    pub dim: usize,
    /// Basis total degrees, one per refinement level (a single entry for
    /// non-adaptive runs).
    pub orders: Vec<usize>,
    pub quadrature: QuadratureKind,
    /// Per-level rule sizes: point counts for Gauss families, doubling
    /// levels for Clenshaw-Curtis, Smolyak levels for sparse grids.
    pub points: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureKind {
    GaussLegendre,
    GaussLobatto,
    ClenshawCurtis,
    SparseClenshawCurtis,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverSection {
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Steady-state residual tolerance; presence selects steady mode
    /// unless t_end/n_steps is given.
    pub epsilon: Option<f64>,
    pub t_end: Option<f64>,
    pub n_steps: Option<usize>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default)]
    pub residual_mode: ResidualModeCfg,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_cfl() -> f64 {
    0.5
}

fn default_tau() -> f64 {
    1e-7
}

fn default_max_steps() -> usize {
    200_000
}

fn default_workers() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ResidualModeCfg {
    #[default]
    AllMoments,
    ZerothOnly,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdaptivitySection {
    pub delta_dec: f64,
    pub delta_inc: f64,
    #[serde(default)]
    pub initial_level: usize,
    /// Retardation stages (residual threshold, maximal level index).
    pub retardation: Option<Vec<(f64, usize)>>,
}

/// Initial conditions are named families so that a config file alone
/// reproduces a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    /// Burgers interface at x0 + sigma·ξ₁, smoothed over `width`
    /// (a sharp jump when width = 0).
    BurgersShock { x0: f64, sigma: f64, width: f64, u_left: f64, u_right: f64 },
    /// Euler 1D two-state tube with the interface at x0 + sigma·ξ₁.
    Sod1d {
        x0: f64,
        sigma: f64,
        left: [f64; 3],
        right: [f64; 3],
    },
    /// Standing Euler shock (2D state layout on a line) at x0 + sigma·ξ₁.
    EulerStandingShock { x0: f64, sigma: f64, mach: f64 },
    /// Gas at rest, two states separated at height y0 + sigma_y·ξ₃, with
    /// lower density ρ = ½(rho_upper + rho_sigma·ξ₁) and lower energy
    /// e_lower + e_sigma·ξ₂.
    ShockTube {
        y0: f64,
        sigma_y: f64,
        rho_upper: f64,
        e_upper: f64,
        rho_sigma: f64,
        e_lower: f64,
        e_sigma: f64,
    },
    /// Uniform far-field flow (also used for Dirichlet boundaries).
    Farfield(FarfieldSpec),
}

/// Far-field state from Mach number, pressure and temperature; any of the
/// angle (degrees), Mach number and pressure may carry a uniform
/// uncertainty driven by the listed ξ component.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FarfieldSpec {
    pub mach: f64,
    pub pressure: f64,
    pub temperature: f64,
    #[serde(default = "default_gas_constant")]
    pub gas_constant: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub angle_deg: f64,
    /// (half-width, ξ index), e.g. angle 1.25 ± 0.5 degrees on ξ₁.
    pub angle_sigma: Option<(f64, usize)>,
    pub mach_sigma: Option<(f64, usize)>,
    pub pressure_sigma: Option<(f64, usize)>,
}

fn default_gas_constant() -> f64 {
    287.87
}

impl FarfieldSpec {
    /// Conserved 2D state at a random point.
    pub fn state(&self, xi: &[f64], out: &mut [f64]) {
        let pick = |base: f64, sigma: &Option<(f64, usize)>| match sigma {
            Some((s, idx)) => base + s * xi.get(*idx).copied().unwrap_or(0.0),
            None => base,
        };
        let mach = pick(self.mach, &self.mach_sigma);
        let pressure = pick(self.pressure, &self.pressure_sigma);
        let angle = pick(self.angle_deg, &self.angle_sigma).to_radians();
        let rho = pressure / (self.gas_constant * self.temperature);
        let c = (self.gamma * pressure / rho).sqrt();
        let speed = mach * c;
        let v = [speed * angle.cos(), speed * angle.sin()];
        let e = pressure / (self.gamma - 1.0) + 0.5 * rho * (v[0] * v[0] + v[1] * v[1]);
        out.copy_from_slice(&[rho, rho * v[0], rho * v[1], e]);
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct OutputSection {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default)]
    pub error_component: usize,
    /// Restrict error norms to an axis-aligned box.
    pub mask: Option<MaskCfg>,
    /// Points per stochastic dimension for `reference` runs.
    pub reference_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MaskCfg {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub mesh: MeshSection,
    /// line meshes: [left, right]; 2D meshes: one entry per marker, in
    /// marker order.
    pub boundaries: Vec<BoundaryKindCfg>,
    /// Far-field state for `farfield` boundaries.
    pub farfield: Option<FarfieldSpec>,
    pub stochastic: StochasticSection,
    pub solver: SolverSection,
    pub adaptivity: Option<AdaptivitySection>,
    pub initial_condition: InitialCondition,
    #[serde(default)]
    pub output: OutputSection,
}

/// Everything a run needs, built from a validated config.
pub struct BuiltProblem {
    pub model: Box<dyn ModelProblem>,
    pub closure: Box<dyn EntropyClosure>,
    pub ladder: StochasticLadder,
    pub domain: Domain,
    pub geometry: Geometry,
    pub initial: StochasticFn,
    pub solver: SolverConfig,
    pub adaptivity: Option<AdaptivityConfig>,
    pub mask: Option<BoxMask>,
}

/// The concrete mesh, kept for norms, hashing and snapshots.
pub enum Geometry {
    Line(Mesh1D),
    Tri(Box<Mesh2D>),
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).context("parsing config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.experiment;
        if e.method.is_adaptive() != self.adaptivity.is_some() {
            bail!("experiment.method: adaptive methods require an [adaptivity] section and vice versa");
        }
        if e.method == Method::Sg && e.closure != ClosureKind::Quadratic {
            bail!("experiment.closure: stochastic-Galerkin is the quadratic closure");
        }
        if e.closure == ClosureKind::Euler && e.model != ModelKind::Euler2d {
            bail!("experiment.closure: the Euler closure pairs with the euler2d model");
        }
        let s = &self.stochastic;
        if s.orders.is_empty() || s.orders.len() != s.points.len() {
            bail!("stochastic.orders and stochastic.points must be non-empty and equally long");
        }
        if !e.method.is_adaptive() && s.orders.len() != 1 {
            bail!("stochastic.orders: non-adaptive methods take exactly one level");
        }
        if s.quadrature == QuadratureKind::GaussLobatto && s.points.iter().any(|&p| p < 2) {
            bail!("stochastic.points: Lobatto rules need at least 2 points");
        }
        let modes = [
            self.solver.epsilon.is_some(),
            self.solver.t_end.is_some(),
            self.solver.n_steps.is_some(),
        ];
        if modes.iter().filter(|&&b| b).count() != 1 {
            bail!("solver: exactly one of epsilon (steady), t_end or n_steps must be set");
        }
        let expected_bcs = match &self.mesh {
            MeshSection::Line { .. } => 2,
            MeshSection::Rect { .. } | MeshSection::Bend { .. } => 4,
            MeshSection::File { .. } => self.boundaries.len().max(1),
        };
        if self.boundaries.len() != expected_bcs {
            bail!(
                "boundaries: expected {expected_bcs} entries for this mesh, found {}",
                self.boundaries.len()
            );
        }
        if self.boundaries.contains(&BoundaryKindCfg::Farfield) && self.farfield.is_none() {
            bail!("boundaries: farfield boundaries need a [farfield] section");
        }
        match (&self.mesh, &self.experiment.model) {
            (MeshSection::Line { .. }, ModelKind::Euler2d) => {}
            (MeshSection::Line { .. }, _) => {}
            (_, ModelKind::Euler2d) => {}
            (_, other) => bail!("mesh: 2D meshes require the euler2d model, found {other:?}"),
        }
        Ok(())
    }

    pub fn time_control(&self) -> TimeControl {
        if let Some(eps) = self.solver.epsilon {
            TimeControl::Steady { epsilon: eps, max_steps: self.solver.max_steps }
        } else if let Some(te) = self.solver.t_end {
            TimeControl::EndTime(te)
        } else {
            TimeControl::FixedSteps(self.solver.n_steps.unwrap())
        }
    }

    fn rule_for_level(&self, level: usize) -> QuadratureRule {
        let s = &self.stochastic;
        let size = s.points[level];
        match s.quadrature {
            QuadratureKind::GaussLegendre => {
                tensor_quadrature(QuadratureFamily::GaussLegendre, &vec![size; s.dim], s.dim)
            }
            QuadratureKind::GaussLobatto => {
                tensor_quadrature(QuadratureFamily::GaussLobatto, &vec![size; s.dim], s.dim)
            }
            QuadratureKind::ClenshawCurtis => {
                tensor_quadrature(QuadratureFamily::ClenshawCurtis, &vec![size; s.dim], s.dim)
            }
            QuadratureKind::SparseClenshawCurtis => sparse_quadrature(size, s.dim),
        }
    }

    pub fn build_ladder(&self) -> StochasticLadder {
        let levels = self
            .stochastic
            .orders
            .iter()
            .enumerate()
            .map(|(l, &order)| LevelSpec {
                basis: BasisSet::total_degree(order, self.stochastic.dim),
                rule: self.rule_for_level(l),
            })
            .collect();
        StochasticLadder::new(levels)
    }

    pub fn build_initial(&self) -> StochasticFn {
        build_ic(&self.initial_condition)
    }

    fn boundary_condition(&self, kind: BoundaryKindCfg) -> BoundaryCondition {
        match kind {
            BoundaryKindCfg::Periodic => BoundaryCondition::Periodic,
            BoundaryKindCfg::Outflow => BoundaryCondition::Outflow,
            BoundaryKindCfg::Slip => BoundaryCondition::SlipWall,
            BoundaryKindCfg::Farfield => {
                let far = self.farfield.clone().expect("validated");
                let m = match self.experiment.model {
                    ModelKind::Euler2d => 4,
                    ModelKind::Euler1d => 3,
                    ModelKind::Burgers => 1,
                };
                BoundaryCondition::Dirichlet(Arc::new(move |_x, xi, out| {
                    let mut full = [0.0; 4];
                    far.state(xi, &mut full);
                    match m {
                        4 => out.copy_from_slice(&full),
                        3 => out.copy_from_slice(&[full[0], full[1], full[3]]),
                        _ => out[0] = full[0],
                    }
                }))
            }
        }
    }

    /// Instantiate every piece of the run.
    pub fn build(&self) -> Result<BuiltProblem> {
        self.validate()?;
        let e = &self.experiment;
        let model: Box<dyn ModelProblem> = match e.model {
            ModelKind::Burgers => Box::new(BurgersModel::new()),
            ModelKind::Euler1d => Box::new(EulerModel::with_flux(e.gamma, 1, EulerFlux::Rusanov)),
            ModelKind::Euler2d => Box::new(EulerModel::with_flux(e.gamma, 2, EulerFlux::Rusanov)),
        };
        let closure: Box<dyn EntropyClosure> = match e.closure {
            ClosureKind::Quadratic => Box::new(QuadraticClosure::new(model.num_conserved())),
            ClosureKind::Euler => Box::new(EulerClosure::new(e.gamma)),
        };
        let (geometry, domain) = match &self.mesh {
            MeshSection::Line { x_min, x_max, n_cells } => {
                let mesh = Mesh1D::new(*x_min, *x_max, *n_cells);
                let left = self.boundary_condition(self.boundaries[0]);
                let right = self.boundary_condition(self.boundaries[1]);
                let domain = Domain::line(&mesh, left, right);
                (Geometry::Line(mesh), domain)
            }
            mesh_cfg => {
                let mesh = match mesh_cfg {
                    MeshSection::Rect { x_range, y_range, nx, ny } => {
                        generate_rect(*x_range, *y_range, *nx, *ny)
                    }
                    MeshSection::Bend { width, length, nx, ny, y_bend, angle } => {
                        generate_bend(*width, *length, *nx, *ny, *y_bend, *angle)
                    }
                    MeshSection::File { path } => load_mesh(path)?,
                    MeshSection::Line { .. } => unreachable!(),
                };
                if mesh.marker_names().len() != self.boundaries.len() {
                    bail!(
                        "boundaries: mesh has {} markers, config lists {}",
                        mesh.marker_names().len(),
                        self.boundaries.len()
                    );
                }
                let bcs =
                    self.boundaries.iter().map(|&k| self.boundary_condition(k)).collect();
                let domain = Domain::triangular(&mesh, bcs);
                (Geometry::Tri(Box::new(mesh)), domain)
            }
        };
        let mut solver = SolverConfig::new(self.time_control());
        solver.cfl = self.solver.cfl;
        solver.dual.tau = self.solver.tau;
        solver.residual_mode = match self.solver.residual_mode {
            ResidualModeCfg::AllMoments => ResidualMode::AllMoments,
            ResidualModeCfg::ZerothOnly => ResidualMode::ZerothOnly,
        };
        solver.workers = self.solver.workers;
        let adaptivity = self.adaptivity.as_ref().map(|a| {
            let mut cfg = AdaptivityConfig::new(a.delta_dec, a.delta_inc);
            cfg.initial_level = a.initial_level;
            cfg.retardation =
                a.retardation.as_ref().map(|s| RetardationSchedule::new(s.clone()));
            cfg
        });
        let mask = self.output.mask.map(|m| BoxMask { x: m.x, y: m.y });
        Ok(BuiltProblem {
            model,
            closure,
            ladder: self.build_ladder(),
            domain,
            geometry,
            initial: self.build_initial(),
            solver,
            adaptivity,
            mask,
        })
    }
}

fn build_ic(ic: &InitialCondition) -> StochasticFn {
    match ic.clone() {
        InitialCondition::BurgersShock { x0, sigma, width, u_left, u_right } => {
            Arc::new(move |x, xi, out| {
                let shift = x0 + sigma * xi.first().copied().unwrap_or(0.0);
                out[0] = if width > 0.0 {
                    u_right + (u_left - u_right) * 0.5 * (1.0 - ((x[0] - shift) / width).tanh())
                } else if x[0] < shift {
                    u_left
                } else {
                    u_right
                };
            })
        }
        InitialCondition::Sod1d { x0, sigma, left, right } => Arc::new(move |x, xi, out| {
            let interface = x0 + sigma * xi.first().copied().unwrap_or(0.0);
            let s = if x[0] < interface { left } else { right };
            out.copy_from_slice(&s);
        }),
        InitialCondition::EulerStandingShock { x0, sigma, mach } => {
            let gamma = 1.4f64;
            let p1 = 1.0 / gamma;
            let (rho1, v1) = (1.0, mach); // upstream sound speed is 1
            let e1 = p1 / (gamma - 1.0) + 0.5 * rho1 * v1 * v1;
            let m2 = mach * mach;
            let rho2 = rho1 * (gamma + 1.0) * m2 / ((gamma - 1.0) * m2 + 2.0);
            let p2 = p1 * (1.0 + 2.0 * gamma / (gamma + 1.0) * (m2 - 1.0));
            let v2 = rho1 * v1 / rho2;
            let e2 = p2 / (gamma - 1.0) + 0.5 * rho2 * v2 * v2;
            Arc::new(move |x, xi, out| {
                let pos = x0 + sigma * xi.first().copied().unwrap_or(0.0);
                let s = if x[0] < pos {
                    [rho1, rho1 * v1, 0.0, e1]
                } else {
                    [rho2, rho2 * v2, 0.0, e2]
                };
                out.copy_from_slice(&s);
            })
        }
        InitialCondition::ShockTube { y0, sigma_y, rho_upper, e_upper, rho_sigma, e_lower, e_sigma } => {
            Arc::new(move |x, xi, out| {
                let xi1 = xi.first().copied().unwrap_or(0.0);
                let xi2 = xi.get(1).copied().unwrap_or(0.0);
                let xi3 = xi.get(2).copied().unwrap_or(0.0);
                let y_s = y0 + sigma_y * xi3;
                if x[1] > y_s {
                    out.copy_from_slice(&[rho_upper, 0.0, 0.0, e_upper]);
                } else {
                    let rho_l = 0.5 * (rho_upper + rho_sigma * xi1);
                    let e_l = e_lower + e_sigma * xi2;
                    out.copy_from_slice(&[rho_l, 0.0, 0.0, e_l]);
                }
            })
        }
        InitialCondition::Farfield(spec) => Arc::new(move |_x, xi, out| {
            let mut full = [0.0; 4];
            spec.state(xi, &mut full);
            match out.len() {
                4 => out.copy_from_slice(&full),
                3 => out.copy_from_slice(&[full[0], full[1], full[3]]),
                _ => out[0] = full[0],
            }
        }),
    }
}

/// Conserved-variable state of the deterministic far field (ξ = 0).
pub fn nominal_farfield(spec: &FarfieldSpec) -> [f64; 4] {
    let mut out = [0.0; 4];
    spec.state(&[0.0; 3], &mut out);
    out
}

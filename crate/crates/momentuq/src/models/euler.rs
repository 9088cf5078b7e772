//! Compressible Euler equations in one and two spatial dimensions.

use super::{InadmissibleState, ModelProblem};

/// Choice of approximate Riemann solver for the Euler flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EulerFlux {
    /// Local Lax-Friedrichs with dissipation max(|v·n| + c) of both sides.
    #[default]
    Rusanov,
    /// Two-wave HLL flux with Davis wave-speed estimates.
    Hll,
}

/// Euler system for an ideal gas: conserved variables (ρ, ρv, ρe) with
/// pressure closure p = (γ−1)ρ(e − ½|v|²). States are admissible iff
/// density and pressure are positive.
#[derive(Debug, Clone)]
pub struct EulerModel {
    gamma: f64,
    dim: usize,
    flux: EulerFlux,
}

impl EulerModel {
    pub fn new(gamma: f64, dim: usize) -> Self {
        Self::with_flux(gamma, dim, EulerFlux::default())
    }

    pub fn with_flux(gamma: f64, dim: usize, flux: EulerFlux) -> Self {
        assert!(gamma > 1.0);
        assert!(dim == 1 || dim == 2);
        Self { gamma, dim, flux }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// p = (γ−1)ρ(e − ½|v|²), computed in velocity form.
    pub fn pressure(&self, u: &[f64]) -> f64 {
        let rho = u[0];
        let m = self.num_conserved();
        let mut v2 = 0.0;
        for d in 0..self.dim {
            let v = u[1 + d] / rho;
            v2 += v * v;
        }
        (self.gamma - 1.0) * rho * (u[m - 1] / rho - 0.5 * v2)
    }

    fn sound_speed(&self, u: &[f64]) -> f64 {
        (self.gamma * self.pressure(u) / u[0]).sqrt()
    }

    fn normal_velocity(&self, u: &[f64], n: &[f64]) -> f64 {
        let mut vn = 0.0;
        for d in 0..self.dim {
            vn += u[1 + d] / u[0] * n[d];
        }
        vn
    }
}

impl ModelProblem for EulerModel {
    fn num_conserved(&self) -> usize {
        self.dim + 2
    }

    fn spatial_dim(&self) -> usize {
        self.dim
    }

    fn physical_flux(&self, u: &[f64], n: &[f64], out: &mut [f64]) {
        let p = self.pressure(u);
        let vn = self.normal_velocity(u, n);
        let m = self.num_conserved();
        out[0] = u[0] * vn;
        for d in 0..self.dim {
            out[1 + d] = u[1 + d] * vn + p * n[d];
        }
        out[m - 1] = (u[m - 1] + p) * vn;
    }

    fn max_wave_speed(&self, u: &[f64], n: &[f64]) -> f64 {
        self.normal_velocity(u, n).abs() + self.sound_speed(u)
    }

    fn admissible(&self, u: &[f64]) -> bool {
        u[0] > 0.0 && u.iter().all(|x| x.is_finite()) && self.pressure(u) > 0.0
    }

    fn numerical_flux(
        &self,
        ul: &[f64],
        ur: &[f64],
        n: &[f64],
        _dx_over_dt: f64,
        out: &mut [f64],
    ) -> Result<(), InadmissibleState> {
        if !self.admissible(ul) {
            return Err(InadmissibleState { state: ul.to_vec() });
        }
        if !self.admissible(ur) {
            return Err(InadmissibleState { state: ur.to_vec() });
        }
        let m = self.num_conserved();
        let mut fl = [0.0; 4];
        let mut fr = [0.0; 4];
        self.physical_flux(ul, n, &mut fl[..m]);
        self.physical_flux(ur, n, &mut fr[..m]);
        match self.flux {
            EulerFlux::Rusanov => {
                let s = self.max_wave_speed(ul, n).max(self.max_wave_speed(ur, n));
                for a in 0..m {
                    out[a] = 0.5 * (fl[a] + fr[a]) - 0.5 * s * (ur[a] - ul[a]);
                }
            }
            EulerFlux::Hll => {
                let (vl, cl) = (self.normal_velocity(ul, n), self.sound_speed(ul));
                let (vr, cr) = (self.normal_velocity(ur, n), self.sound_speed(ur));
                let sl = (vl - cl).min(vr - cr);
                let sr = (vl + cl).max(vr + cr);
                if sl >= 0.0 {
                    out[..m].copy_from_slice(&fl[..m]);
                } else if sr <= 0.0 {
                    out[..m].copy_from_slice(&fr[..m]);
                } else {
                    for a in 0..m {
                        out[a] =
                            (sr * fl[a] - sl * fr[a] + sl * sr * (ur[a] - ul[a])) / (sr - sl);
                    }
                }
            }
        }
        Ok(())
    }
}

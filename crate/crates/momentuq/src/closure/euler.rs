//! Gas-dynamics entropy closure for the Euler system with conserved
//! variables u = (ρ, m₁, m₂, E).

use super::EntropyClosure;

/// Closure built on the entropy
///
/// s(u) = −ρ ln(ρ^{−γ} e_i),  e_i = E − (m₁² + m₂²)/(2ρ),
///
/// whose gradient is
///
/// ∂s/∂ρ  = −ln(ρ^{−γ} e_i) + (m₁²+m₂²)/(−2ρE + m₁²+m₂²) + γ
/// ∂s/∂mᵢ = −2ρ mᵢ/(−2ρE + m₁²+m₂²)
/// ∂s/∂E  = −ρ/e_i.
///
/// The inverse map u_s is closed-form: with
///
/// α(Λ) = exp((Λ₂² + Λ₃² − 2Λ₁Λ₄ + 2Λ₄γ)/(2Λ₄(1−γ))) · (−Λ₄)^{1/(1−γ)}
///
/// the reconstruction is ρ = α, mᵢ = −Λ_{i+1} α/Λ₄ and
/// E = −α(−Λ₂² − Λ₃² + 2Λ₄)/(2Λ₄²). Duals are admissible iff Λ₄ < 0, and
/// every admissible reconstruction has positive density and pressure.
#[derive(Debug, Clone)]
pub struct EulerClosure {
    gamma: f64,
}

impl EulerClosure {
    pub fn new(gamma: f64) -> Self {
        assert!(gamma > 1.0, "heat capacity ratio must exceed 1");
        Self { gamma }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// α(Λ) together with its log-derivative ∂(ln α)/∂Λ.
    fn alpha_and_dlog(&self, lam: &[f64]) -> (f64, [f64; 4]) {
        let (l1, l2, l3, l4) = (lam[0], lam[1], lam[2], lam[3]);
        let beta = 1.0 / (1.0 - self.gamma);
        let s = l2 * l2 + l3 * l3;
        let log_alpha = beta * (s / (2.0 * l4) - l1 + self.gamma + (-l4).ln());
        let dlog = [
            -beta,
            beta * l2 / l4,
            beta * l3 / l4,
            beta * (1.0 / l4 - s / (2.0 * l4 * l4)),
        ];
        (log_alpha.exp(), dlog)
    }
}

impl EntropyClosure for EulerClosure {
    fn num_conserved(&self) -> usize {
        4
    }

    fn state_admissible(&self, u: &[f64]) -> bool {
        u[0] > 0.0 && u[3] - (u[1] * u[1] + u[2] * u[2]) / (2.0 * u[0]) > 0.0
    }

    fn entropy(&self, u: &[f64]) -> f64 {
        let (rho, m1, m2, e) = (u[0], u[1], u[2], u[3]);
        let ei = e - (m1 * m1 + m2 * m2) / (2.0 * rho);
        debug_assert!(rho > 0.0 && ei > 0.0, "entropy evaluated at inadmissible state");
        -rho * (rho.powf(-self.gamma) * ei).ln()
    }

    fn entropy_gradient(&self, u: &[f64], out: &mut [f64]) {
        let (rho, m1, m2, e) = (u[0], u[1], u[2], u[3]);
        let s = m1 * m1 + m2 * m2;
        let ei = e - s / (2.0 * rho);
        debug_assert!(rho > 0.0 && ei > 0.0, "gradient evaluated at inadmissible state");
        let denom = -2.0 * rho * e + s; // = −2ρ e_i
        out[0] = -(rho.powf(-self.gamma) * ei).ln() + s / denom + self.gamma;
        out[1] = -2.0 * rho * m1 / denom;
        out[2] = -2.0 * rho * m2 / denom;
        out[3] = -rho / ei;
    }

    fn dual_admissible(&self, lam: &[f64]) -> bool {
        lam[3] < 0.0
    }

    fn ansatz(&self, lam: &[f64], out: &mut [f64]) -> bool {
        if !self.dual_admissible(lam) {
            return false;
        }
        let (l2, l3, l4) = (lam[1], lam[2], lam[3]);
        let (alpha, _) = self.alpha_and_dlog(lam);
        if !alpha.is_finite() {
            return false;
        }
        out[0] = alpha;
        out[1] = -l2 * alpha / l4;
        out[2] = -l3 * alpha / l4;
        out[3] = -alpha * (-l2 * l2 - l3 * l3 + 2.0 * l4) / (2.0 * l4 * l4);
        true
    }

    fn ansatz_jacobian(&self, lam: &[f64], out: &mut [f64]) -> bool {
        if !self.dual_admissible(lam) {
            return false;
        }
        let (l2, l3, l4) = (lam[1], lam[2], lam[3]);
        let (alpha, dlog) = self.alpha_and_dlog(lam);
        if !alpha.is_finite() {
            return false;
        }
        let dalpha = [
            alpha * dlog[0],
            alpha * dlog[1],
            alpha * dlog[2],
            alpha * dlog[3],
        ];
        let s = l2 * l2 + l3 * l3;
        // E = α ψ with ψ = (Λ₂² + Λ₃² − 2Λ₄)/(2Λ₄²).
        let psi = (s - 2.0 * l4) / (2.0 * l4 * l4);
        let dpsi = [0.0, l2 / (l4 * l4), l3 / (l4 * l4), (l4 - s) / (l4 * l4 * l4)];
        // Column-major 4×4: out[row + 4*col] = ∂(u_s)_row/∂Λ_col.
        for col in 0..4 {
            out[4 * col] = dalpha[col];
            out[1 + 4 * col] = -(l2 * dalpha[col]) / l4;
            out[2 + 4 * col] = -(l3 * dalpha[col]) / l4;
            out[3 + 4 * col] = psi * dalpha[col] + alpha * dpsi[col];
        }
        out[1 + 4] -= alpha / l4; // ∂m₁/∂Λ₂ extra term
        out[2 + 8] -= alpha / l4; // ∂m₂/∂Λ₃
        out[1 + 12] += l2 * alpha / (l4 * l4); // ∂m₁/∂Λ₄
        out[2 + 12] += l3 * alpha / (l4 * l4); // ∂m₂/∂Λ₄
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn jacobian_matches_finite_differences() {
        let closure = EulerClosure::new(1.4);
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..100 {
            let lam = [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                -rng.gen_range(0.2..3.0),
            ];
            let mut jac = [0.0; 16];
            assert!(closure.ansatz_jacobian(&lam, &mut jac));
            for col in 0..4 {
                let h = 1e-6 * (1.0 + lam[col].abs());
                let mut lp = lam;
                lp[col] += h;
                let mut lm = lam;
                lm[col] -= h;
                let mut up = [0.0; 4];
                let mut um = [0.0; 4];
                assert!(closure.ansatz(&lp, &mut up) && closure.ansatz(&lm, &mut um));
                for row in 0..4 {
                    let fd = (up[row] - um[row]) / (2.0 * h);
                    let an = jac[row + 4 * col];
                    assert!(
                        (fd - an).abs() < 1e-5 * (1.0 + an.abs()),
                        "({row},{col}): fd {fd} vs analytic {an}"
                    );
                }
            }
        }
    }

    #[test]
    fn jacobian_is_symmetric_positive_definite() {
        // ∇u_s is the inverse of the entropy Hessian, hence SPD on the
        // admissible dual domain.
        use nalgebra::DMatrix;
        let closure = EulerClosure::new(1.4);
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..200 {
            let lam = [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                -rng.gen_range(0.2..3.0),
            ];
            let mut jac = [0.0; 16];
            assert!(closure.ansatz_jacobian(&lam, &mut jac));
            let m = DMatrix::from_column_slice(4, 4, &jac);
            let asym = (&m - m.transpose()).abs().max();
            let scale = m.abs().max();
            assert!(asym <= 1e-10 * scale, "asymmetry {asym:.3e} at {lam:?}");
            assert!(
                DMatrix::from_column_slice(4, 4, &jac).cholesky().is_some(),
                "∇u_s not positive definite at {lam:?}"
            );
        }
    }
}

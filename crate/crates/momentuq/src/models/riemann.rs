//! Exact self-similar Riemann solutions, used as deterministic reference
//! oracles by the test and acceptance suites.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum RiemannError {
    #[error("vacuum forms between the states; the solver does not support vacuum")]
    Vacuum,
    #[error("pressure iteration did not converge")]
    NoConvergence,
    #[error("inadmissible input state {0:?}")]
    BadState(Vec<f64>),
}

/// Exact Burgers Riemann solution at similarity coordinate s = x/t.
///
/// u_l > u_r forms a shock at speed (u_l + u_r)/2; otherwise a centered
/// rarefaction.
pub fn exact_riemann_burgers(ul: f64, ur: f64, s: f64) -> f64 {
    if ul > ur {
        let shock = 0.5 * (ul + ur);
        if s < shock {
            ul
        } else {
            ur
        }
    } else if s <= ul {
        ul
    } else if s >= ur {
        ur
    } else {
        s
    }
}

/// Exact 1D Euler Riemann solution (ρ, ρv, E) at s = x/t for ideal-gas
/// states, via the classical iterative pressure solver and wave-pattern
/// sampling.
pub fn exact_riemann_euler_1d(
    ul: &[f64; 3],
    ur: &[f64; 3],
    gamma: f64,
    s: f64,
) -> Result<[f64; 3], RiemannError> {
    let (rho_l, v_l, p_l) = primitives(ul, gamma).ok_or(RiemannError::BadState(ul.to_vec()))?;
    let (rho_r, v_r, p_r) = primitives(ur, gamma).ok_or(RiemannError::BadState(ur.to_vec()))?;
    let c_l = (gamma * p_l / rho_l).sqrt();
    let c_r = (gamma * p_r / rho_r).sqrt();

    // Pressure positivity condition: no vacuum formation.
    if 2.0 * (c_l + c_r) / (gamma - 1.0) <= v_r - v_l {
        return Err(RiemannError::Vacuum);
    }

    let p_star = solve_star_pressure(rho_l, v_l, p_l, c_l, rho_r, v_r, p_r, c_r, gamma)?;
    let (f_l, _) = wave_function(p_star, rho_l, p_l, c_l, gamma);
    let (f_r, _) = wave_function(p_star, rho_r, p_r, c_r, gamma);
    let v_star = 0.5 * (v_l + v_r) + 0.5 * (f_r - f_l);

    let (rho, v, p) = sample(
        s, p_star, v_star, rho_l, v_l, p_l, c_l, rho_r, v_r, p_r, c_r, gamma,
    );
    let e = p / (gamma - 1.0) + 0.5 * rho * v * v;
    Ok([rho, rho * v, e])
}

fn primitives(u: &[f64; 3], gamma: f64) -> Option<(f64, f64, f64)> {
    let rho = u[0];
    if rho <= 0.0 {
        return None;
    }
    let v = u[1] / rho;
    let p = (gamma - 1.0) * (u[2] - 0.5 * rho * v * v);
    if p <= 0.0 {
        return None;
    }
    Some((rho, v, p))
}

/// f_K(p) and its derivative for one side: shock branch for p > p_K,
/// rarefaction branch otherwise.
fn wave_function(p: f64, rho_k: f64, p_k: f64, c_k: f64, gamma: f64) -> (f64, f64) {
    if p > p_k {
        let a = 2.0 / ((gamma + 1.0) * rho_k);
        let b = (gamma - 1.0) / (gamma + 1.0) * p_k;
        let root = (a / (p + b)).sqrt();
        let f = (p - p_k) * root;
        let df = root * (1.0 - 0.5 * (p - p_k) / (p + b));
        (f, df)
    } else {
        let expo = (gamma - 1.0) / (2.0 * gamma);
        let f = 2.0 * c_k / (gamma - 1.0) * ((p / p_k).powf(expo) - 1.0);
        let df = 1.0 / (rho_k * c_k) * (p / p_k).powf(-(gamma + 1.0) / (2.0 * gamma));
        (f, df)
    }
}

#[allow(clippy::too_many_arguments)]
fn solve_star_pressure(
    rho_l: f64,
    v_l: f64,
    p_l: f64,
    c_l: f64,
    rho_r: f64,
    v_r: f64,
    p_r: f64,
    c_r: f64,
    gamma: f64,
) -> Result<f64, RiemannError> {
    // Two-rarefaction initial guess, clipped away from zero.
    let expo = (gamma - 1.0) / (2.0 * gamma);
    let guess = ((c_l + c_r - 0.5 * (gamma - 1.0) * (v_r - v_l))
        / (c_l / p_l.powf(expo) + c_r / p_r.powf(expo)))
    .powf(1.0 / expo);
    let mut p = guess.max(1e-12 * (p_l + p_r));
    let dv = v_r - v_l;
    for _ in 0..100 {
        let (f_l, df_l) = wave_function(p, rho_l, p_l, c_l, gamma);
        let (f_r, df_r) = wave_function(p, rho_r, p_r, c_r, gamma);
        let g = f_l + f_r + dv;
        let dp = g / (df_l + df_r);
        let p_new = (p - dp).max(1e-14 * (p_l + p_r));
        if (p_new - p).abs() <= 1e-14 * p_new {
            return Ok(p_new);
        }
        p = p_new;
    }
    Err(RiemannError::NoConvergence)
}

#[allow(clippy::too_many_arguments)]
fn sample(
    s: f64,
    p_star: f64,
    v_star: f64,
    rho_l: f64,
    v_l: f64,
    p_l: f64,
    c_l: f64,
    rho_r: f64,
    v_r: f64,
    p_r: f64,
    c_r: f64,
    gamma: f64,
) -> (f64, f64, f64) {
    let gm = gamma - 1.0;
    let gp = gamma + 1.0;
    if s <= v_star {
        // Left of the contact.
        if p_star > p_l {
            // Left shock.
            let sl = v_l - c_l * (gp / (2.0 * gamma) * p_star / p_l + gm / (2.0 * gamma)).sqrt();
            if s <= sl {
                (rho_l, v_l, p_l)
            } else {
                let rho = rho_l * ((p_star / p_l + gm / gp) / (gm / gp * p_star / p_l + 1.0));
                (rho, v_star, p_star)
            }
        } else {
            // Left rarefaction.
            let head = v_l - c_l;
            let c_star = c_l * (p_star / p_l).powf(gm / (2.0 * gamma));
            let tail = v_star - c_star;
            if s <= head {
                (rho_l, v_l, p_l)
            } else if s >= tail {
                let rho = rho_l * (p_star / p_l).powf(1.0 / gamma);
                (rho, v_star, p_star)
            } else {
                let v = 2.0 / gp * (c_l + 0.5 * gm * v_l + s);
                let c = 2.0 / gp * (c_l + 0.5 * gm * (v_l - s));
                let rho = rho_l * (c / c_l).powf(2.0 / gm);
                let p = p_l * (c / c_l).powf(2.0 * gamma / gm);
                (rho, v, p)
            }
        }
    } else if p_star > p_r {
        // Right shock.
        let sr = v_r + c_r * (gp / (2.0 * gamma) * p_star / p_r + gm / (2.0 * gamma)).sqrt();
        if s >= sr {
            (rho_r, v_r, p_r)
        } else {
            let rho = rho_r * ((p_star / p_r + gm / gp) / (gm / gp * p_star / p_r + 1.0));
            (rho, v_star, p_star)
        }
    } else {
        // Right rarefaction.
        let head = v_r + c_r;
        let c_star = c_r * (p_star / p_r).powf(gm / (2.0 * gamma));
        let tail = v_star + c_star;
        if s >= head {
            (rho_r, v_r, p_r)
        } else if s <= tail {
            let rho = rho_r * (p_star / p_r).powf(1.0 / gamma);
            (rho, v_star, p_star)
        } else {
            let v = 2.0 / gp * (-c_r + 0.5 * gm * v_r + s);
            let c = 2.0 / gp * (c_r - 0.5 * gm * (v_r - s));
            let rho = rho_r * (c / c_r).powf(2.0 / gm);
            let p = p_r * (c / c_r).powf(2.0 * gamma / gm);
            (rho, v, p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn burgers_shock_and_rarefaction() {
        // u_l = 1, u_r = 0: shock at speed ½ by Rankine-Hugoniot.
        assert_eq!(exact_riemann_burgers(1.0, 0.0, 0.49), 1.0);
        assert_eq!(exact_riemann_burgers(1.0, 0.0, 0.51), 0.0);
        // u_l = -1, u_r = 1: centered rarefaction passes through 0.
        assert_eq!(exact_riemann_burgers(-1.0, 1.0, 0.0), 0.0);
        assert_eq!(exact_riemann_burgers(-1.0, 1.0, 0.5), 0.5);
        assert_eq!(exact_riemann_burgers(-1.0, 1.0, -2.0), -1.0);
    }

    #[test]
    fn sod_star_values() {
        // Sod tube: left (1, 0, 1), right (0.125, 0, 0.1). At x/t = 0 the
        // state sits between the rarefaction tail and the contact, with the
        // published ρ*_L ≈ 0.42632.
        let gamma = 1.4;
        let ul = [1.0, 0.0, 1.0 / (gamma - 1.0)];
        let ur = [0.125, 0.0, 0.1 / (gamma - 1.0)];
        let u0 = exact_riemann_euler_1d(&ul, &ur, gamma, 0.0).unwrap();
        assert_abs_diff_eq!(u0[0], 0.42632, epsilon = 1e-3);
        let p0 = (gamma - 1.0) * (u0[2] - 0.5 * u0[1] * u0[1] / u0[0]);
        assert_abs_diff_eq!(p0, 0.30313, epsilon = 1e-3);
        let v0 = u0[1] / u0[0];
        assert_abs_diff_eq!(v0, 0.92745, epsilon = 1e-3);
    }

    #[test]
    fn undisturbed_states_far_out() {
        let gamma = 1.4;
        let ul = [1.0, 0.0, 2.5];
        let ur = [0.125, 0.0, 0.25];
        let far_left = exact_riemann_euler_1d(&ul, &ur, gamma, -100.0).unwrap();
        let far_right = exact_riemann_euler_1d(&ul, &ur, gamma, 100.0).unwrap();
        for a in 0..3 {
            assert_abs_diff_eq!(far_left[a], ul[a], epsilon = 1e-12);
            assert_abs_diff_eq!(far_right[a], ur[a], epsilon = 1e-12);
        }
    }

    #[test]
    fn vacuum_is_detected() {
        let gamma = 1.4;
        // Strongly receding states.
        let ul = [1.0, -20.0, 0.5 / (gamma - 1.0) + 0.5 * 400.0];
        let ur = [1.0, 20.0, 0.5 / (gamma - 1.0) + 0.5 * 400.0];
        assert!(matches!(
            exact_riemann_euler_1d(&ul, &ur, gamma, 0.0),
            Err(RiemannError::Vacuum)
        ));
    }

    #[test]
    fn rankine_hugoniot_across_sampled_shock() {
        // The sampled post-shock state must satisfy the jump conditions.
        let gamma = 1.4;
        let ul = [1.0, 0.0, 2.5];
        let ur = [0.125, 0.0, 0.25];
        // Shock speed from the solver's right-shock branch.
        let (rho_r, v_r, p_r) = primitives(&ur, gamma).unwrap();
        let c_r = (gamma * p_r / rho_r).sqrt();
        let (rho_l, v_l, p_l) = primitives(&ul, gamma).unwrap();
        let c_l = (gamma * p_l / rho_l).sqrt();
        let p_star =
            solve_star_pressure(rho_l, v_l, p_l, c_l, rho_r, v_r, p_r, c_r, gamma).unwrap();
        let sr = v_r
            + c_r
                * ((gamma + 1.0) / (2.0 * gamma) * p_star / p_r
                    + (gamma - 1.0) / (2.0 * gamma))
                    .sqrt();
        let pre = exact_riemann_euler_1d(&ul, &ur, gamma, sr + 1e-6).unwrap();
        let post = exact_riemann_euler_1d(&ul, &ur, gamma, sr - 1e-6).unwrap();
        // RH: f(u⁺) − f(u⁻) = s (u⁺ − u⁻) componentwise.
        let flux = |u: &[f64; 3]| {
            let v = u[1] / u[0];
            let p = (gamma - 1.0) * (u[2] - 0.5 * u[0] * v * v);
            [u[1], u[1] * v + p, v * (u[2] + p)]
        };
        let f_pre = flux(&pre);
        let f_post = flux(&post);
        for a in 0..3 {
            let lhs = f_pre[a] - f_post[a];
            let rhs = sr * (pre[a] - post[a]);
            assert!((lhs - rhs).abs() < 1e-6, "RH violated in component {a}");
        }
    }
}

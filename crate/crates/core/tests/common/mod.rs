//! Independent oracles for cross-checking the solvers. Everything here is
//! deliberately brute-force and shares no code with the implementation
//! paths it validates.

#![allow(dead_code)]

/// SWE depth function phi(h) = f(h; h_l) + f(h; h_r) + (u_r - u_l) built
/// locally so the oracle does not call into the library.
fn depth_fn(h: f64, h_k: f64, g: f64) -> f64 {
    if h <= h_k {
        2.0 * ((g * h).sqrt() - (g * h_k).sqrt())
    } else {
        (h - h_k) * (0.5 * g * (h + h_k) / (h * h_k)).sqrt()
    }
}

/// Star depth by bracketing bisection: phi is monotone increasing, negative
/// at h -> 0+ for wet problems, so grow the bracket then bisect.
pub fn bisect_star_depth(h_l: f64, u_l: f64, h_r: f64, u_r: f64, g: f64) -> f64 {
    let phi = |h: f64| depth_fn(h, h_l, g) + depth_fn(h, h_r, g) + (u_r - u_l);
    let mut lo = 1e-14;
    let mut hi = h_l.max(h_r).max(1e-12);
    while phi(hi) < 0.0 {
        hi *= 2.0;
        assert!(hi < 1e12, "bisection bracket ran away");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Godunov flux for Burgers via explicit wave classification of the
/// similarity solution at s/tau = 0 (shock speed from the jump condition,
/// rarefaction sampled along characteristics).
pub fn burgers_godunov_by_sampling(u_plus: f64, u_minus: f64) -> f64 {
    let f = |u: f64| 0.5 * u * u;
    let at_zero = if u_plus > u_minus {
        // shock with speed (u+ + u-) / 2
        let s = 0.5 * (u_plus + u_minus);
        if s > 0.0 {
            u_plus
        } else if s < 0.0 {
            u_minus
        } else {
            u_plus // either side, fluxes agree
        }
    } else {
        // rarefaction fan spanning [u+, u-]
        if u_plus >= 0.0 {
            u_plus
        } else if u_minus <= 0.0 {
            u_minus
        } else {
            0.0 // sonic point
        }
    };
    f(at_zero)
}

/// Godunov flux of the projected scalar law g(u) = a u^2 / 2 via the
/// min/max characterization over the interval between the states
/// (u_plus occupies s < 0). Evaluated by dense sampling, so it stays valid
/// for either sign of `a`.
pub fn projected_burgers_godunov_minmax(a: f64, u_plus: f64, u_minus: f64) -> f64 {
    let g = |u: f64| 0.5 * a * u * u;
    let (lo, hi) = if u_plus <= u_minus { (u_plus, u_minus) } else { (u_minus, u_plus) };
    let samples = 20_001;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for i in 0..samples {
        let u = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        min = min.min(g(u));
        max = max.max(g(u));
    }
    // include the critical point u = 0 exactly when it lies inside
    if lo < 0.0 && hi > 0.0 {
        min = min.min(0.0);
        max = max.max(0.0);
    }
    if u_plus <= u_minus {
        min
    } else {
        max
    }
}

/// Central-difference gradient of `f` with respect to `params`.
pub fn central_difference<F: FnMut(&[f64]) -> f64>(
    params: &[f64],
    eps: f64,
    mut f: F,
) -> Vec<f64> {
    let mut grad = vec![0.0; params.len()];
    let mut work = params.to_vec();
    for i in 0..params.len() {
        let orig = work[i];
        work[i] = orig + eps;
        let fp = f(&work);
        work[i] = orig - eps;
        let fm = f(&work);
        work[i] = orig;
        grad[i] = (fp - fm) / (2.0 * eps);
    }
    grad
}

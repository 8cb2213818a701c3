//! Deterministic numerical integration.
//!
//! The workhorse is composite Gauss-Legendre quadrature with panel doubling
//! until two successive refinements agree to a relative tolerance. Panels are
//! summed in a fixed left-to-right order, so results are bit-reproducible.
//! An adaptive Simpson routine is provided as an independent cross-check.

/// Parameters for composite Gauss-Legendre integration.
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    /// Nodes per panel.
    pub order: usize,
    /// Initial number of equal-width panels.
    pub panels: usize,
    /// Convergence: successive doublings must agree to this relative tolerance.
    pub rel_tol: f64,
    /// Maximum number of panel doublings before giving up.
    pub max_doublings: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            order: 16,
            panels: 64,
            rel_tol: 1e-10,
            max_doublings: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("quadrature did not converge: last value {value}, last delta {delta}")]
    NoConvergence { value: f64, delta: f64 },
    #[error("integrand produced a non-finite value near {at}")]
    NonFinite { at: f64 },
}

/// Cached nodes/weights per order; rules are reused heavily by nested
/// integrals in the demonstration sequences.
fn cached_rule(order: usize) -> std::sync::Arc<(Vec<f64>, Vec<f64>)> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};
    type Rule = Arc<(Vec<f64>, Vec<f64>)>;
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("rule cache poisoned");
    map.entry(order)
        .or_insert_with(|| Arc::new(gauss_legendre(order)))
        .clone()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre polynomial from the Chebyshev initial guess.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 2, "order must be at least 2");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Recurrence for P_n(x) and P_n'(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn composite<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    panels: usize,
    nodes: &[f64],
    weights: &[f64],
) -> Result<f64, QuadError> {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let left = a + p as f64 * h;
        let center = left + 0.5 * h;
        let halfwidth = 0.5 * h;
        let mut panel_sum = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            let z = center + halfwidth * x;
            let v = f(z);
            if !v.is_finite() {
                return Err(QuadError::NonFinite { at: z });
            }
            panel_sum += w * v;
        }
        total += panel_sum * halfwidth;
    }
    Ok(total)
}

/// Integrates `f` over `[a, b]` per `spec`, doubling the panel count until
/// two successive values agree to `spec.rel_tol` (relative to the magnitude
/// of the finer value, with an absolute floor for integrals near zero).
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    if a == b {
        return Ok(0.0);
    }
    let rule = cached_rule(spec.order);
    let (nodes, weights) = (&rule.0, &rule.1);
    let mut panels = spec.panels.max(1);
    let mut prev = composite(&f, a, b, panels, nodes, weights)?;
    for _ in 0..spec.max_doublings {
        panels *= 2;
        let next = composite(&f, a, b, panels, nodes, weights)?;
        let delta = (next - prev).abs();
        let scale = next.abs().max(1e-300);
        if delta <= spec.rel_tol * scale || delta <= f64::EPSILON {
            return Ok(next);
        }
        prev = next;
    }
    // One more comparison value for the error message.
    let next = composite(&f, a, b, panels * 2, nodes, weights)?;
    Err(QuadError::NoConvergence {
        value: next,
        delta: (next - prev).abs(),
    })
}

/// Adaptive Simpson integration; an independent cross-check for the
/// Gauss-Legendre path. Deterministic for a given integrand and tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)] // cached endpoint samples thread through the recursion
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_symmetric_and_weights_sum_to_two() {
        for order in [2, 5, 16, 24, 48] {
            let (nodes, weights) = gauss_legendre(order);
            let wsum: f64 = weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "order {order}: {wsum}");
            for i in 0..order {
                assert!((nodes[i] + nodes[order - 1 - i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn polynomial_exactness() {
        // Order-16 Gauss-Legendre is exact through degree 31.
        let spec = QuadratureSpec {
            panels: 1,
            max_doublings: 2,
            ..QuadratureSpec::default()
        };
        let val = integrate(|z| z.powi(30), -1.0, 1.0, &spec).unwrap();
        assert!((val - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn smooth_integrals_match_closed_forms() {
        let spec = QuadratureSpec::default();
        let v = integrate(|z: f64| z.exp(), 0.0, 1.0, &spec).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-12);
        let v = integrate(|z: f64| 1.0 / (1.0 + z * z), -1.0, 1.0, &spec).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        // Cross-check against the independent Simpson routine.
        let s = adaptive_simpson(|z: f64| 1.0 / (1.0 + z * z), -1.0, 1.0, 1e-12);
        assert!((v - s).abs() < 1e-10);
    }

    #[test]
    fn non_finite_integrands_are_reported() {
        let spec = QuadratureSpec::default();
        let err = integrate(|z: f64| 1.0 / z, 0.0, 1.0, &spec).unwrap_err();
        assert!(matches!(err, QuadError::NonFinite { .. }) || matches!(err, QuadError::NoConvergence { .. }));
    }

    #[test]
    fn determinism_across_calls() {
        let spec = QuadratureSpec::default();
        let a = integrate(|z: f64| (3.0 * z).sin() * z.exp(), -1.0, 1.0, &spec).unwrap();
        let b = integrate(|z: f64| (3.0 * z).sin() * z.exp(), -1.0, 1.0, &spec).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

//! Fixed-order quadrature rules used by the semi-analytic planar potentials.

use crate::scalar::Real;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Nodes and weights of the `n`-point rule, found by Newton iteration on
    /// the Legendre polynomial from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
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
        Self {
            nodes: nodes.into_iter().map(T::lit).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        }
    }

    /// Composite rule: `panels` equal sub-intervals of `[a, b]`.
    pub fn integrate_composite(&self, a: T, b: T, panels: usize, mut f: impl FnMut(T) -> T) -> T {
        let half = T::lit(0.5);
        let width = (b - a) / T::from_usize_lossy(panels);
        let mut total = T::zero();
        for p in 0..panels {
            let lo = a + width * T::from_usize_lossy(p);
            let mid = lo + width * half;
            let mut acc = T::zero();
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc += *w * f(mid + *x * width * half);
            }
            total += acc * width * half;
        }
        total
    }
}

/// Integrates `f` over `[lo, hi]` with panels graded geometrically away from
/// `focus`, the first panel on each side having width `scale`. Suited to
/// integrands with a near-singular peak of width `scale` at `focus`.
pub fn integrate_graded<T: Real>(
    rule: &GaussLegendre<T>,
    lo: T,
    hi: T,
    focus: T,
    scale: T,
    mut f: impl FnMut(T) -> T,
) -> T {
    let focus = focus.max(lo).min(hi);
    let max_width = (hi - lo) / T::lit(8.0);
    let min_width = (hi - lo) * T::lit(1e-14);
    let first = scale.max(min_width).min(max_width);
    let mut total = T::zero();
    let two = T::lit(2.0);
    // right of focus
    let mut x = focus;
    let mut w = first;
    while x < hi {
        let next = (x + w).min(hi);
        total += rule.integrate_composite(x, next, 1, &mut f);
        x = next;
        w = (w * two).min(max_width);
    }
    // left of focus
    let mut x = focus;
    let mut w = first;
    while x > lo {
        let next = (x - w).max(lo);
        total += rule.integrate_composite(next, x, 1, &mut f);
        x = next;
        w = (w * two).min(max_width);
    }
    total
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Equal-weight trapezoid rule for a `2π`-periodic integrand on `m` nodes.
pub fn periodic_trapezoid<T: Real>(m: usize, mut f: impl FnMut(T) -> T) -> T {
    let h = T::two_pi() / T::from_usize_lossy(m);
    let mut acc = T::zero();
    for j in 0..m {
        acc += f(h * T::from_usize_lossy(j));
    }
    acc * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::<f64>::new(8);
        // Degree 15 is the highest exact degree for 8 nodes.
        let got = rule.integrate_composite(-1.0, 1.0, 1, |x| x.powi(14) + 3.0 * x.powi(15));
        assert!((got - 2.0 / 15.0).abs() < 1e-14, "{got}");
        let wsum: f64 = rule.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_odd_order_has_center_node() {
        let rule = GaussLegendre::<f64>::new(5);
        assert_eq!(rule.nodes[2], 0.0);
        assert!((rule.weights[2] - 128.0 / 225.0).abs() < 1e-14);
    }

    #[test]
    fn composite_rule_on_smooth_function() {
        let rule = GaussLegendre::<f64>::new(10);
        let got = rule.integrate_composite(0.0, std::f64::consts::PI, 4, f64::sin);
        assert!((got - 2.0).abs() < 1e-14);
    }

    #[test]
    fn graded_rule_resolves_narrow_peak() {
        // ∫_{-1}^{1} d / (x² + d²) dx = 2 atan(1/d)
        let rule = GaussLegendre::<f64>::new(16);
        for d in [1e-1, 1e-3, 1e-6] {
            let got = integrate_graded(&rule, -1.0, 1.0, 0.0, d, |x| d / (x * x + d * d));
            let want = 2.0 * (1.0 / d).atan();
            assert!((got - want).abs() < 1e-10 * want, "d={d}: {got} vs {want}");
        }
    }

    #[test]
    fn periodic_trapezoid_is_spectral() {
        // ∫ exp(cos t) dt = 2π I0(1)
        let i0_1 = 1.266_065_877_752_008_4;
        let got = periodic_trapezoid::<f64>(32, |t| t.cos().exp());
        assert!((got - std::f64::consts::TAU * i0_1).abs() < 1e-13);
    }
}

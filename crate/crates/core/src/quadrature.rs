//! Composite Gauss–Legendre quadrature with panel doubling.
//!
//! Nodes and weights come from the `gauss-quad` crate; this module only adds
//! panel composition, a global doubling loop and local panel bisection for
//! real and complex integrands.

use std::ops::{Add, Mul};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::{Error, Result};

/// Values that can be summed by a quadrature rule.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct Rule {
    pairs: Vec<(f64, f64)>,
}

impl Rule {
    pub fn new(order: usize) -> Result<Self> {
        let rule = GaussLegendre::new(order)
            .map_err(|_| Error::invalid("order", "Gauss-Legendre order must be at least 2"))?;
        Ok(Self {
            pairs: rule.as_node_weight_pairs().to_vec(),
        })
    }

    pub fn order(&self) -> usize {
        self.pairs.len()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.pairs
            .iter()
            .map(move |&(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<T: Integrand>(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> T) -> T {
        self.mapped(a, b).fold(T::zero(), |acc, (x, w)| acc + f(x) * w)
    }

    /// `panels` equal sub-intervals of `[a, b]`, each with this rule.
    pub fn composite<T: Integrand>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: impl FnMut(f64) -> T,
    ) -> T {
        let h = (b - a) / panels as f64;
        (0..panels).fold(T::zero(), |acc, i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == panels { b } else { lo + h };
            acc + self.integrate(lo, hi, &mut f)
        })
    }

    /// Fallible version of [`Rule::composite`]: the first error aborts.
    pub fn try_composite<T: Integrand>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: impl FnMut(f64) -> Result<T>,
    ) -> Result<T> {
        let h = (b - a) / panels as f64;
        let mut acc = T::zero();
        for i in 0..panels {
            let lo = a + h * i as f64;
            let hi = if i + 1 == panels { b } else { lo + h };
            for (x, w) in self.mapped(lo, hi) {
                acc = acc + f(x)? * w;
            }
        }
        Ok(acc)
    }
}

/// Panel-doubling driver: the panel count doubles until two successive
/// composite estimates agree to `rel_tol` (relative) or `abs_tol` (absolute).
#[derive(Debug, Clone)]
pub struct Integrator {
    rule: Rule,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self::new(20, 1e-10)
    }
}

impl Integrator {
    pub fn new(order: usize, rel_tol: f64) -> Self {
        Self {
            rule: Rule::new(order).expect("order >= 2"),
            rel_tol,
            abs_tol: 1e-15,
            max_panels: 1 << 14,
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn integrate<T: Integrand>(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> T) -> Result<T> {
        self.try_integrate(a, b, |x| Ok(f(x)))
    }

    pub fn try_integrate<T: Integrand>(
        &self,
        a: f64,
        b: f64,
        mut f: impl FnMut(f64) -> Result<T>,
    ) -> Result<T> {
        let mut panels = 1;
        let mut previous = self.rule.try_composite(a, b, panels, &mut f)?;
        while panels < self.max_panels {
            panels *= 2;
            let current = self.rule.try_composite(a, b, panels, &mut f)?;
            let delta = (current + previous * -1.0).magnitude();
            if delta <= self.rel_tol * current.magnitude() || delta <= self.abs_tol {
                return Ok(current);
            }
            previous = current;
        }
        Err(Error::Numerical {
            location: a,
            reason: format!(
                "quadrature on [{a}, {b}] did not converge with {} panels",
                self.max_panels
            ),
        })
    }
}

/// Local bisection: start from `initial_panels` equal panels and split any
/// panel whose two halves disagree with the whole by more than its share
/// `abs_tol · width / (b - a)`. Returns the estimate and the node count used.
pub fn adaptive<T: Integrand>(
    rule: &Rule,
    a: f64,
    b: f64,
    initial_panels: usize,
    abs_tol: f64,
    mut f: impl FnMut(f64) -> Result<T>,
) -> Result<(T, usize)> {
    let mut panel = |lo: f64, hi: f64| -> Result<T> {
        let mut acc = T::zero();
        for (x, w) in rule.mapped(lo, hi) {
            acc = acc + f(x)? * w;
        }
        Ok(acc)
    };
    let width = b - a;
    let min_width = width * 2f64.powi(-40);
    let h = width / initial_panels as f64;
    let mut stack = Vec::with_capacity(64);
    for i in 0..initial_panels {
        let lo = a + h * i as f64;
        let hi = if i + 1 == initial_panels { b } else { lo + h };
        stack.push((lo, hi, panel(lo, hi)?));
    }
    let mut nodes = initial_panels * rule.order();
    let mut total = T::zero();
    while let Some((lo, hi, whole)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel(lo, mid)?;
        let right = panel(mid, hi)?;
        nodes += 2 * rule.order();
        let halves = left + right;
        if (halves + whole * -1.0).magnitude() <= abs_tol * (hi - lo) / width {
            total = total + halves;
        } else if hi - lo < min_width {
            return Err(Error::Numerical {
                location: mid,
                reason: format!("adaptive quadrature on [{a}, {b}] cannot resolve the integrand near {mid}"),
            });
        } else {
            stack.push((lo, mid, left));
            stack.push((mid, hi, right));
        }
    }
    Ok((total, nodes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = Rule::new(5).unwrap();
        // degree 9 is the highest exact degree for 5 nodes
        let got = rule.integrate(0.0, 2.0, |x: f64| x.powi(9));
        assert_relative_eq!(got, 2f64.powi(10) / 10.0, max_relative = 1e-14);
    }

    #[test]
    fn adaptive_handles_complex_integrands() {
        let integ = Integrator::default();
        let got = integ
            .integrate(0.0, std::f64::consts::PI, |x| Complex64::new(0.0, x).exp())
            .unwrap();
        // ∫₀^π e^{ix} dx = 2i
        assert!((got - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn composite_matches_single_panel_for_smooth_functions() {
        let rule = Rule::new(20).unwrap();
        let one = rule.integrate(1.0, 3.0, |x: f64| x.sin());
        let many = rule.composite(1.0, 3.0, 7, |x: f64| x.sin());
        assert_relative_eq!(one, many, max_relative = 1e-14);
        assert_relative_eq!(one, 1f64.cos() - 3f64.cos(), max_relative = 1e-14);
    }

    #[test]
    fn adaptive_resolves_a_log_spike() {
        // ∫₀² log((x - 1)² + δ²) dx = 2 (log(1 + δ²) - 2 + 2δ atan(1/δ))
        let d: f64 = 1e-4;
        let rule = Rule::new(20).unwrap();
        let (got, nodes) = adaptive(&rule, 0.0, 2.0, 2, 1e-10, |x: f64| {
            Ok(((x - 1.0).powi(2) + d * d).ln())
        })
        .unwrap();
        let exact = 2.0 * ((1.0 + d * d).ln() - 2.0 + 2.0 * d * (1.0 / d).atan());
        assert!((got - exact).abs() < 1e-10, "{got} vs {exact}");
        assert!(nodes < 20_000);
    }

    #[test]
    fn rejects_degenerate_order() {
        assert!(Rule::new(1).is_err());
    }
}

//! The weighted trace inequality and the functional
//! `Z(μ) = ∫_α^β log(k / (4 Im M(k))) p(k) dk`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::determinant::{evaluate, log_det4_continued};
use crate::jost::m_function;
use crate::lattice::Wavenumber;
use crate::potentials::Potential;
use crate::quadrature::{adaptive, Integrator, Rule};
use crate::{Error, Result};

/// Starting node count for the adaptive quadrature.
pub const MIN_NODES: usize = 40;
/// Stop doubling once successive estimates differ by less than this.
pub const NODE_TOL: f64 = 1e-9;

/// `p(k) = (k - α)⁵ (β - k)⁵` on `[α, β]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightPoly {
    alpha: f64,
    beta: f64,
}

impl WeightPoly {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > alpha && beta.is_finite()) {
            return Err(Error::invalid("alpha/beta", format!("need 0 < alpha < beta, got [{alpha}, {beta}]")));
        }
        let first = (alpha / PI).ceil();
        if first * PI <= beta || !Wavenumber::real(alpha).is_real_regular() || !Wavenumber::real(beta).is_real_regular() {
            return Err(Error::invalid(
                "alpha/beta",
                format!("[{alpha}, {beta}] contains or touches a multiple of pi"),
            ));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eval(&self, k: f64) -> f64 {
        ((k - self.alpha) * (self.beta - k)).powi(5)
    }

    pub fn eval_complex(&self, k: Complex64) -> Complex64 {
        ((k - self.alpha) * (self.beta - k)).powi(5)
    }

    /// `∫_α^β p = (β - α)¹¹ B(6, 6) = (β - α)¹¹ / 2772`.
    pub fn integral(&self) -> f64 {
        (self.beta - self.alpha).powi(11) / 2772.0
    }
}

fn gauss(w: &WeightPoly, n_quad: usize, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let rule = Rule::new(n_quad)?;
    let mut acc = 0.0;
    for (k, wt) in rule.mapped(w.alpha, w.beta) {
        acc += f(k)? * wt;
    }
    Ok(acc)
}

// Two 20-point panels to start; panels are halved where the integrand is rough,
// e.g. near the sharp dips of log(k / 4 Im M) where |u_0| is nearly zero.
fn doubling(w: &WeightPoly, f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, usize)> {
    let rule = Rule::new(MIN_NODES / 2)?;
    adaptive(&rule, w.alpha, w.beta, 2, NODE_TOL, f)
}

/// `Im M(k)` at real `k`, rejecting nonpositive values.
pub fn im_m(v: &Potential, k: f64) -> Result<f64> {
    let m = m_function(v, Wavenumber::real(k))?;
    if !(m.im > 0.0) {
        return Err(Error::Numerical {
            location: k,
            reason: format!("Im M = {} is not positive", m.im),
        });
    }
    Ok(m.im)
}

/// `log(k / (4 Im M(k)))`.
pub fn log_ratio(v: &Potential, k: f64) -> Result<f64> {
    Ok((k / (4.0 * im_m(v, k)?)).ln())
}

/// `Z` with a fixed `n_quad`-point Gauss–Legendre rule.
pub fn z_functional(v: &Potential, w: &WeightPoly, n_quad: usize) -> Result<f64> {
    gauss(w, n_quad, |k| Ok(log_ratio(v, k)? * w.eval(k)))
}

/// `Z` starting from [`MIN_NODES`] nodes, with panels halved until the
/// estimate settles to [`NODE_TOL`]; returns the value and the node count.
pub fn z_functional_converged(v: &Potential, w: &WeightPoly) -> Result<(f64, usize)> {
    doubling(w, |k| Ok(log_ratio(v, k)? * w.eval(k)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeValue {
    pub k: f64,
    pub im_m: f64,
    pub log_ratio: f64,
    pub p_k: f64,
}

pub fn node_values(v: &Potential, w: &WeightPoly, n_quad: usize) -> Result<Vec<NodeValue>> {
    Rule::new(n_quad)?
        .mapped(w.alpha, w.beta)
        .map(|(k, _)| {
            let im = im_m(v, k)?;
            Ok(NodeValue {
                k,
                im_m: im,
                log_ratio: (k / (4.0 * im)).ln(),
                p_k: w.eval(k),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceInequality {
    pub z: f64,
    /// `∫ |V̂(2k)|² / k² p(k) dk`.
    pub fourier_term: f64,
    /// `2 Re ∫ (log L₄(V, k) + log L₄(-V, k)) p(k) dk`.
    pub det4_residual: f64,
}

impl TraceInequality {
    pub fn gap(&self) -> f64 {
        self.z - self.fourier_term
    }

    /// `(z - fourier_term) / ‖V‖₄⁴`; `None` for `V = 0`.
    pub fn ratio(&self, v: &Potential) -> Option<f64> {
        let n4 = v.power_trace(4);
        (n4 > 0.0).then(|| self.gap() / n4)
    }
}

pub fn trace_inequality_report(v: &Potential, w: &WeightPoly) -> Result<TraceInequality> {
    let (z, _) = z_functional_converged(v, w)?;
    let fourier_term = Integrator::new(20, 1e-12).integrate(w.alpha, w.beta, |k: f64| {
        v.fourier_hat(k).norm_sqr() / (k * k) * w.eval(k)
    })?;
    let det4_residual = if v.is_zero() {
        0.0
    } else {
        let neg = v.negated();
        doubling(w, |k| {
            let kk = Wavenumber::real(k);
            let s = log_det4_continued(v, kk)? + log_det4_continued(&neg, kk)?;
            Ok(2.0 * s.re * w.eval(k))
        })?
        .0
    };
    Ok(TraceInequality {
        z,
        fourier_term,
        det4_residual,
    })
}

/// Largest `(z - fourier_term) / ‖V‖₄⁴` over an ensemble; `V = 0` is skipped.
pub fn empirical_constant(ensemble: &[Potential], w: &WeightPoly) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for v in ensemble {
        if let Some(r) = trace_inequality_report(v, w)?.ratio(v) {
            best = best.max(r);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseCheck {
    pub k: f64,
    pub log_ratio: f64,
    pub two_log_abs_l: f64,
}

impl PointwiseCheck {
    pub fn slack(&self) -> f64 {
        self.two_log_abs_l - self.log_ratio
    }
}

/// `log(k / (4 Im M)) ≤ 2 log|L(k)|` at each quadrature node.
pub fn pointwise_checks(v: &Potential, w: &WeightPoly, n_quad: usize) -> Result<Vec<PointwiseCheck>> {
    Rule::new(n_quad)?
        .mapped(w.alpha, w.beta)
        .map(|(k, _)| {
            Ok(PointwiseCheck {
                k,
                log_ratio: log_ratio(v, k)?,
                two_log_abs_l: 2.0 * evaluate(v, Wavenumber::real(k))?.log_abs_l,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetrizationCheck {
    pub k: f64,
    /// `2 log|L(V)| + 2 log|L(-V)|`.
    pub lhs: f64,
    /// `|V̂(2k)|² / (2k²) + 2 Re(log L₄(V) + log L₄(-V))`.
    pub rhs: f64,
}

impl SymmetrizationCheck {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

pub fn symmetrization_check(v: &Potential, k: f64) -> Result<SymmetrizationCheck> {
    let kk = Wavenumber::real(k);
    let neg = v.negated();
    let lhs = 2.0 * (evaluate(v, kk)?.log_abs_l + evaluate(&neg, kk)?.log_abs_l);
    let det4 = log_det4_continued(v, kk)? + log_det4_continued(&neg, kk)?;
    let rhs = v.fourier_hat(k).norm_sqr() / (2.0 * k * k) + 2.0 * det4.re;
    Ok(SymmetrizationCheck { k, lhs, rhs })
}

pub fn symmetrization_checks(
    v: &Potential,
    w: &WeightPoly,
    n_quad: usize,
) -> Result<Vec<SymmetrizationCheck>> {
    Rule::new(n_quad)?
        .mapped(w.alpha, w.beta)
        .map(|(k, _)| symmetrization_check(v, k))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourCheck {
    /// `∫_α^β log L₄(k) p(k) dk` along the real segment.
    pub segment: Complex64,
    /// The same integral along the upper semicircle over `[α, β]`.
    pub arc: Complex64,
}

impl ContourCheck {
    pub fn relative_difference(&self) -> f64 {
        (self.segment - self.arc).norm() / self.segment.norm().max(self.arc.norm())
    }
}

/// Compares `∫ log L₄ p` on `[α, β]` with the semicircle `c + r e^{iφ}`,
/// `φ: π → 0`, using `n_nodes` Gauss points on each path. Both agree when
/// `L` has no zeros under the arc.
pub fn contour_check(v: &Potential, w: &WeightPoly, n_nodes: usize) -> Result<ContourCheck> {
    let rule = Rule::new(n_nodes)?;
    let mut segment = Complex64::new(0.0, 0.0);
    for (k, wt) in rule.mapped(w.alpha, w.beta) {
        segment += log_det4_continued(v, Wavenumber::real(k))? * w.eval(k) * wt;
    }
    let c = 0.5 * (w.alpha + w.beta);
    let r = 0.5 * (w.beta - w.alpha);
    let mut arc = Complex64::new(0.0, 0.0);
    for (phi, wt) in rule.mapped(0.0, PI) {
        let e = Complex64::from_polar(1.0, phi);
        let k = c + r * e;
        let dk = Complex64::i() * r * e;
        arc -= log_det4_continued(v, Wavenumber::from_complex(k))? * w.eval_complex(k) * dk * wt;
    }
    Ok(ContourCheck { segment, arc })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemicontinuityReport {
    pub z_full: f64,
    /// `(n_cut, Z(truncate(V, n_cut)))` for each cut.
    pub rows: Vec<(usize, f64)>,
    /// Minimum of `Z` over the cuts at or beyond the support end.
    pub min_large_cut: f64,
}

impl SemicontinuityReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.z_full <= self.min_large_cut + tol
    }
}

pub fn semicontinuity_probe(
    v: &Potential,
    w: &WeightPoly,
    cuts: &[usize],
) -> Result<SemicontinuityReport> {
    if cuts.is_empty() || cuts.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::invalid("cuts", "need a nonempty strictly ascending list"));
    }
    let end = v.support_end();
    let last = *cuts.last().unwrap();
    if last < end {
        return Err(Error::invalid("cuts", format!("final cut {last} is below the support end {end}")));
    }
    let (z_full, _) = z_functional_converged(v, w)?;
    let mut rows = Vec::with_capacity(cuts.len());
    let mut min_large_cut = f64::INFINITY;
    for &n in cuts {
        let z = z_functional_converged(&v.truncate(n), w)?.0;
        if n >= end {
            min_large_cut = min_large_cut.min(z);
        }
        rows.push((n, z));
    }
    Ok(SemicontinuityReport {
        z_full,
        rows,
        min_large_cut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn random_potential(rng: &mut ChaCha20Rng, max_len: usize, amp: f64) -> Potential {
        let len = rng.gen_range(1..=max_len);
        Potential::from_values((0..len).map(|_| rng.gen_range(-amp..amp)).collect()).unwrap()
    }

    #[test]
    fn weight_poly_shape() {
        let w = WeightPoly::new(1.0, 2.0).unwrap();
        assert_eq!(w.eval(1.0), 0.0);
        assert_eq!(w.eval(2.0), 0.0);
        assert_relative_eq!(w.eval(1.5), 0.25f64.powi(5));
        // fifth-order zeros: p(α + h) / h⁵ → (β - α)⁵
        for h in [1e-2, 1e-3, 1e-4] {
            assert_relative_eq!(w.eval(1.0 + h) / h.powi(5), (1.0 - h).powi(5), max_relative = 1e-9);
            assert_relative_eq!(w.eval(2.0 - h) / h.powi(5), (1.0 - h).powi(5), max_relative = 1e-9);
        }
        let quad = Rule::new(12).unwrap().integrate(1.0, 2.0, |k| w.eval(k));
        assert_relative_eq!(quad, w.integral(), max_relative = 1e-13);
        assert!(WeightPoly::new(3.0, 3.5).is_err());
        assert!(WeightPoly::new(2.0, 1.0).is_err());
        assert!(WeightPoly::new(0.0, 1.0).is_err());
    }

    #[test]
    fn free_z_closed_form() {
        let w = WeightPoly::new(1.0, 2.0).unwrap();
        let z = z_functional(&Potential::zero(), &w, 40).unwrap();
        let expected = -4f64.ln() / 2772.0;
        assert!((z - expected).abs() < 1e-12);
        assert_relative_eq!(expected, -5.00106e-4, max_relative = 1e-5);
        let w = WeightPoly::new(0.3, 2.9).unwrap();
        let (z, _) = z_functional_converged(&Potential::zero(), &w).unwrap();
        assert_relative_eq!(z, -4f64.ln() * 2.6f64.powi(11) / 2772.0, max_relative = 1e-12);
    }

    #[test]
    fn z_converges_under_doubling() {
        let mut rng = ChaCha20Rng::seed_from_u64(41);
        let w = WeightPoly::new(0.5, 2.5).unwrap();
        for _ in 0..5 {
            let v = random_potential(&mut rng, 15, 1.0);
            let (z, n) = z_functional_converged(&v, &w).unwrap();
            assert!(z.is_finite() && n >= MIN_NODES);
            let rule = Rule::new(30).unwrap();
            let (fine, _) = adaptive(&rule, 0.5, 2.5, 8, 1e-12, |k| Ok(log_ratio(&v, k)? * w.eval(k))).unwrap();
            assert!((z - fine).abs() < 1e-9);
        }
    }

    #[test]
    fn free_report_is_trivial() {
        let w = WeightPoly::new(1.0, 2.0).unwrap();
        let r = trace_inequality_report(&Potential::zero(), &w).unwrap();
        assert!(r.z < 0.0);
        assert_eq!(r.fourier_term, 0.0);
        assert_eq!(r.det4_residual, 0.0);
        assert!(r.gap() <= 0.0);
        assert_eq!(r.ratio(&Potential::zero()), None);
    }

    #[test]
    fn pointwise_and_symmetrized_nodes() {
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        let w = WeightPoly::new(0.4, 2.8).unwrap();
        for _ in 0..5 {
            let v = random_potential(&mut rng, 20, 1.0);
            for c in pointwise_checks(&v, &w, 40).unwrap() {
                assert!(c.slack() >= -1e-12, "{c:?}");
            }
            for c in symmetrization_checks(&v, &w, 40).unwrap() {
                assert!(c.residual() < 1e-9, "{c:?}");
            }
        }
    }

    #[test]
    fn symmetrized_z_bounded_by_fourier_and_det4() {
        // integrating the pointwise bound for V and -V
        let mut rng = ChaCha20Rng::seed_from_u64(43);
        let w = WeightPoly::new(0.5, 2.5).unwrap();
        for _ in 0..4 {
            let v = random_potential(&mut rng, 12, 1.0);
            let r = trace_inequality_report(&v, &w).unwrap();
            let z_neg = z_functional_converged(&v.negated(), &w).unwrap().0;
            assert!(r.z + z_neg <= 0.5 * r.fourier_term + r.det4_residual + 1e-9);
            let r_neg = trace_inequality_report(&v.negated(), &w).unwrap();
            assert_relative_eq!(r.fourier_term, r_neg.fourier_term, max_relative = 1e-12);
            assert!((r.det4_residual - r_neg.det4_residual).abs() < 1e-9);
        }
    }

    #[test]
    fn scaling_probe_stays_bounded() {
        let v = Potential::from_values(vec![0.7, -0.4, 0.9, -1.0, 0.3]).unwrap();
        let w = WeightPoly::new(0.5, 2.5).unwrap();
        let ts = [1.0, 0.5, 0.25, 0.125, 0.0625];
        let gaps: Vec<f64> = ts
            .iter()
            .map(|&t| trace_inequality_report(&v.scaled(t), &w).unwrap().gap())
            .collect();
        // bounded above: the gap tends to Z(0) < 0, so gap / t⁴ only decreases
        let ratios: Vec<f64> = gaps.iter().zip(ts).map(|(g, t)| g / t.powi(4)).collect();
        assert!(ratios.windows(2).all(|r| r[1] <= r[0]), "{ratios:?}");
        let z0 = -4f64.ln() * w.integral();
        for (g, t) in gaps.iter().zip(ts).skip(2) {
            assert!((g - z0).abs() <= t, "t = {t}: gap {g}, Z(0) = {z0}");
        }
    }

    #[test]
    fn empirical_constant_is_finite() {
        let mut rng = ChaCha20Rng::seed_from_u64(44);
        let w = WeightPoly::new(0.5, 2.5).unwrap();
        let ensemble: Vec<Potential> = (0..6).map(|_| random_potential(&mut rng, 20, 1.0)).collect();
        assert!(empirical_constant(&ensemble, &w).unwrap().is_finite());
    }

    #[test]
    fn contour_shift_agrees() {
        let w = WeightPoly::new(0.6, 2.4).unwrap();
        for v in [
            Potential::from_values(vec![0.5, -0.3, 0.8]).unwrap(),
            Potential::from_values(vec![-1.0]).unwrap(),
        ] {
            let c = contour_check(&v, &w, 40).unwrap();
            assert!(c.relative_difference() < 1e-6, "{c:?}");
        }
    }

    #[test]
    fn semicontinuity_examples() {
        let w = WeightPoly::new(0.5, 2.5).unwrap();
        let v = Potential::from_values((1..=18).map(|i| ((i * 7) % 5) as f64 * 0.3 - 0.6).collect()).unwrap();
        let r = semicontinuity_probe(&v, &w, &[5, 10, 15, 18]).unwrap();
        assert_eq!(r.rows.last().unwrap().1, r.z_full);
        assert!(r.holds(1e-6));
        let zero = semicontinuity_probe(&Potential::zero(), &w, &[1, 2, 3]).unwrap();
        assert!(zero.rows.iter().all(|&(_, z)| z == zero.z_full));
        assert!(semicontinuity_probe(&v, &w, &[5, 10]).is_err());
        assert!(semicontinuity_probe(&v, &w, &[10, 5, 20]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn z_finite_and_below_log_bound(vals in proptest::collection::vec(-1.5f64..1.5, 1..12)) {
            let v = Potential::from_values(vals).unwrap();
            let w = WeightPoly::new(0.5, 2.5).unwrap();
            let z = z_functional(&v, &w, 40).unwrap();
            prop_assert!(z.is_finite());
            let bound: f64 = pointwise_checks(&v, &w, 40).unwrap().iter()
                .zip(Rule::new(40).unwrap().mapped(0.5, 2.5))
                .map(|(c, (k, wt))| c.two_log_abs_l * w.eval(k) * wt)
                .sum();
            prop_assert!(z <= bound + 1e-12);
        }
    }
}

//! Birman–Schwinger operators and Lieb–Thirring sums.
//!
//! For `V = -W² ≤ 0`, `-ε²` is a bound state exactly when 1 is an eigenvalue
//! of `X_ε = W R(iε) W`, whose kernel is `W(n) e^{-ε|n-m|} / (2ε) W(m)`.
//! Operations taking a general `V` use its attractive part `min(V, 0)` for
//! `X_ε` and the full `V` for the eigenvalue sums.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::determinant::{line_bound_states, BOUND_STATE_GRID, BOUND_STATE_TOL};
use crate::jost::u0_on_imaginary_axis;
use crate::potentials::Potential;
use crate::quadrature::Integrator;
use crate::roots::{bisect, open_grid, scan_roots};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct BirmanSchwinger {
    pub eps: f64,
    pub sites: Vec<usize>,
    pub w: Vec<f64>,
    pub matrix: DMatrix<f64>,
}

impl BirmanSchwinger {
    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }
}

pub fn bs_build(v: &Potential, eps: f64) -> Result<BirmanSchwinger> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid("eps", format!("need eps > 0, got {eps}")));
    }
    if let Some((n, x)) = v.support().find(|&(_, x)| x > 0.0) {
        return Err(Error::invalid(
            "V",
            format!("V({n}) = {x} is repulsive; pass the attractive part"),
        ));
    }
    let (sites, w): (Vec<usize>, Vec<f64>) = v.support().map(|(n, x)| (n, (-x).sqrt())).unzip();
    let m = sites.len();
    let matrix = DMatrix::from_fn(m, m, |i, j| {
        let d = sites[i].abs_diff(sites[j]) as f64;
        w[i] * (-eps * d).exp() / (2.0 * eps) * w[j]
    });
    Ok(BirmanSchwinger {
        eps,
        sites,
        w,
        matrix,
    })
}

/// Eigenvalues of `X_ε` in decreasing order.
pub fn bs_eigenvalues(x: &BirmanSchwinger) -> Vec<f64> {
    if x.dim() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = SymmetricEigen::new(x.matrix.clone()).eigenvalues.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Spectral norm of `X_ε`.
pub fn bs_norm(x: &BirmanSchwinger) -> f64 {
    bs_eigenvalues(x).first().copied().unwrap_or(0.0)
}

/// The values `ε_1 ≥ ε_2 ≥ …` at which `s_j(X_ε) = 1`, for the attractive part
/// of `V`. Each `s_j` decreases in `ε`, so each crossing is bracketed once.
pub fn bs_crossings(v: &Potential) -> Result<Vec<f64>> {
    let attractive = v.attractive_part();
    if attractive.is_zero() {
        return Ok(Vec::new());
    }
    // s_1 ≤ Tr X_ε = ‖V‖₁/(2ε) < 1 at the top
    let hi = attractive.l1_norm();
    let lo = hi / BOUND_STATE_GRID as f64;
    let s_at = |eps: f64, j: usize| -> Result<f64> {
        Ok(bs_eigenvalues(&bs_build(&attractive, eps)?)[j])
    };
    let bottom = bs_eigenvalues(&bs_build(&attractive, lo)?);
    let mut crossings = Vec::new();
    for (j, &s) in bottom.iter().enumerate() {
        if s <= 1.0 {
            break;
        }
        crossings.push(bisect(|e| Ok(s_at(e, j)? - 1.0), lo, hi, BOUND_STATE_TOL)?);
    }
    Ok(crossings)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityCheck {
    /// `Σ_{j ≤ n} s_j(X_{ε+τ})`.
    pub lhs: f64,
    /// `Σ_{j ≤ n} s_j(X_ε)`.
    pub rhs: f64,
}

pub fn monotonicity_check(v: &Potential, eps: f64, tau: f64, n: usize) -> Result<MonotonicityCheck> {
    if !(tau > 0.0) {
        return Err(Error::invalid("tau", format!("need tau > 0, got {tau}")));
    }
    if n == 0 {
        return Err(Error::invalid("n", "need n >= 1"));
    }
    let attractive = v.attractive_part();
    let partial = |e: f64| -> Result<f64> {
        Ok(bs_eigenvalues(&bs_build(&attractive, e)?).iter().take(n).sum())
    };
    Ok(MonotonicityCheck {
        lhs: partial(eps + tau)?,
        rhs: partial(eps)?,
    })
}

/// Partial sums `(Σ_{j≤n} ε_j, ε_n Σ_{j≤n} s_j(X_{ε_n}))` for each `n`.
///
/// The right side uses `ε X_ε`, whose kernel `W e^{-ε|n-m|} W / 2` is the
/// Poisson average that the monotonicity argument runs on; for it,
/// `s_n(ε_n X_{ε_n}) = ε_n`.
pub fn induction_check(v: &Potential) -> Result<Vec<(f64, f64)>> {
    let attractive = v.attractive_part();
    let crossings = bs_crossings(v)?;
    let mut lhs = 0.0;
    let mut out = Vec::with_capacity(crossings.len());
    for (n, &eps) in crossings.iter().enumerate() {
        lhs += eps;
        let s = bs_eigenvalues(&bs_build(&attractive, eps)?);
        out.push((lhs, eps * s[..=n].iter().sum::<f64>()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiebThirringSqrt {
    pub sum_sqrt_e: f64,
    pub half_l1: f64,
}

impl LiebThirringSqrt {
    pub fn margin(&self) -> f64 {
        self.half_l1 - self.sum_sqrt_e
    }
}

/// `Σ |E_j|^{1/2}` against `½ Σ |V(n)|`.
pub fn lieb_thirring_sqrt(v: &Potential) -> Result<LiebThirringSqrt> {
    let energies = line_bound_states(v, None)?;
    Ok(LiebThirringSqrt {
        sum_sqrt_e: energies.iter().map(|e| e.abs().sqrt()).sum(),
        half_l1: 0.5 * v.l1_norm(),
    })
}

/// `C_p = √2 ∫_0^4 (1 - γ/4) γ^{p-3/2} dγ / ∫_0^1 (1 - γ)^{1/2} γ^{p-3/2} dγ`.
///
/// With `q = p - 1/2`, the substitution `γ = t^{1/q}` turns `γ^{q-1} dγ` into
/// `dt / q`; the square-root endpoint at `γ = 1` is handled by `γ = 1 - s²`.
pub fn cp_constant(p: f64) -> Result<f64> {
    if !(p > 0.5 && p.is_finite()) {
        return Err(Error::invalid("p", format!("need p > 1/2, got {p}")));
    }
    let q = p - 0.5;
    let integ = Integrator::new(20, 1e-13);
    let numerator = SQRT_2 / q
        * graded(&integ, 4f64.powf(q), |t: f64| 1.0 - t.powf(1.0 / q) / 4.0)?;
    let near_zero = graded(&integ, 0.5f64.powf(q), |t: f64| {
        (1.0 - t.powf(1.0 / q)).max(0.0).sqrt()
    })? / q;
    let near_one = integ.integrate(0.0, 0.5f64.sqrt(), |s: f64| {
        2.0 * s * s * (1.0 - s * s).powf(q - 1.0)
    })?;
    Ok(numerator / (near_zero + near_one))
}

// ∫_0^b on dyadic panels refined towards 0, where t^{1/q} is not smooth
fn graded(integ: &Integrator, b: f64, f: impl Fn(f64) -> f64 + Copy) -> Result<f64> {
    let mut total = 0.0;
    let mut hi = b;
    for _ in 0..80 {
        let lo = 0.5 * hi;
        total += integ.integrate(lo, hi, f)?;
        hi = lo;
    }
    Ok(total + integ.integrate(0.0, hi, f)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiebThirringP {
    pub p: f64,
    pub sum_ep: f64,
    pub bound: f64,
}

impl LiebThirringP {
    pub fn margin(&self) -> f64 {
        self.bound - self.sum_ep
    }
}

fn require_sup_below_two(v: &Potential) -> Result<()> {
    let sup = v.sup_norm();
    if sup >= 2.0 {
        return Err(Error::invalid("V", format!("need ‖V‖∞ < 2, got {sup}")));
    }
    Ok(())
}

/// `Σ |E_j|^p` against `C_p Σ |V(n)|^{p+1/2}`, valid for `‖V‖∞ < 2`.
pub fn lieb_thirring_p(v: &Potential, p: f64) -> Result<LiebThirringP> {
    require_sup_below_two(v)?;
    let cp = cp_constant(p)?;
    let energies = line_bound_states(v, None)?;
    Ok(LiebThirringP {
        p,
        sum_ep: energies.iter().map(|e| e.abs().powf(p)).sum(),
        bound: cp * v.values().iter().map(|x| x.abs().powf(p + 0.5)).sum::<f64>(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszMeans {
    pub gamma: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// `Σ (|E_j| - γ)_+^{1/2}` against `√2 Σ (|V(n)| - γ/4)_+`.
pub fn shifted_riesz_means(v: &Potential, gamma: f64) -> Result<RieszMeans> {
    require_sup_below_two(v)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::invalid("gamma", format!("need gamma > 0, got {gamma}")));
    }
    let energies = line_bound_states(v, None)?;
    Ok(RieszMeans {
        gamma,
        lhs: energies.iter().map(|e| (e.abs() - gamma).max(0.0).sqrt()).sum(),
        rhs: SQRT_2 * v.values().iter().map(|x| (x.abs() - gamma / 4.0).max(0.0)).sum::<f64>(),
    })
}

/// Zeros `ε_j` of `ε ↦ u_0(iε)` on `(0, eps_max]`, decreasing.
pub fn halfline_zeros(v: &Potential, eps_max: Option<f64>) -> Result<Vec<f64>> {
    let eps_max = eps_max.unwrap_or_else(|| v.l1_norm());
    if v.is_zero() || eps_max <= 0.0 {
        return Ok(Vec::new());
    }
    let grid = open_grid(0.0, eps_max, BOUND_STATE_GRID);
    let mut roots = scan_roots(|e| Ok(u0_on_imaginary_axis(v, e)), &grid, BOUND_STATE_TOL)?;
    roots.reverse();
    Ok(roots)
}

/// Dirichlet eigenvalues `-ε_j²` of the half-line operator, ascending.
pub fn halfline_eigenvalues(v: &Potential, eps_max: Option<f64>) -> Result<Vec<f64>> {
    Ok(halfline_zeros(v, eps_max)?.into_iter().map(|e| -e * e).collect())
}

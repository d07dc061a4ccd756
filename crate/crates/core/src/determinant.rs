//! Perturbation determinants `L(k) = det(I + A(k))` with
//! `A(k) = (sin k / k) V G` restricted to the support of `V`.
//!
//! The branch of `log L` is fixed by continuation from large `Im k`, where
//! `L → 1`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::lattice::{r_kernel_entry, Wavenumber};
use crate::potentials::Potential;
use crate::roots::{open_grid, scan_roots};
use crate::{Error, Result};

/// Grid size of the initial bound-state scan on `(0, eps_max]`.
pub const BOUND_STATE_GRID: usize = 10_000;

/// Bisection tolerance for bound-state roots in `ε`.
pub const BOUND_STATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterminantValue {
    pub k: Wavenumber,
    pub l: Complex64,
    pub log_abs_l: f64,
}

/// The matrix `A(k)` on the support: `A_ij = V(n_i) (sin k/k) G(n_i, n_j)`.
pub fn kernel_matrix(v: &Potential, k: Wavenumber) -> Result<DMatrix<Complex64>> {
    k.require_nonresonant()?;
    let sites: Vec<(i64, f64)> = v.support().map(|(n, x)| (n as i64, x)).collect();
    let m = sites.len();
    let mut a = DMatrix::zeros(m, m);
    for (i, &(ni, vi)) in sites.iter().enumerate() {
        for (j, &(nj, _)) in sites.iter().enumerate() {
            a[(i, j)] = vi * r_kernel_entry(k, ni, nj)?;
        }
    }
    Ok(a)
}

fn det_of(a: &DMatrix<Complex64>) -> Complex64 {
    if a.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let n = a.nrows();
    (DMatrix::identity(n, n) + a).lu().determinant()
}

fn traces(a: &DMatrix<Complex64>) -> (Complex64, Complex64, Complex64) {
    if a.nrows() == 0 {
        let z = Complex64::new(0.0, 0.0);
        return (z, z, z);
    }
    let a2 = a * a;
    let tr3 = (&a2 * a).trace();
    (a.trace(), a2.trace(), tr3)
}

/// Sum of singular values.
pub fn trace_norm(a: &DMatrix<Complex64>) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.sum()
}

pub fn perturbation_det(v: &Potential, k: Wavenumber) -> Result<Complex64> {
    Ok(det_of(&kernel_matrix(v, k)?))
}

pub fn evaluate(v: &Potential, k: Wavenumber) -> Result<DeterminantValue> {
    let l = perturbation_det(v, k)?;
    Ok(DeterminantValue {
        k,
        l,
        log_abs_l: l.norm().ln(),
    })
}

/// `det(I + A) exp(-Tr A + Tr A²/2 - Tr A³/3)`.
pub fn det4(v: &Potential, k: Wavenumber) -> Result<Complex64> {
    Ok(det4_parts(v, k)?.0)
}

// (det₄, det(I + A), -Tr A + Tr A²/2 - Tr A³/3)
fn det4_parts(v: &Potential, k: Wavenumber) -> Result<(Complex64, Complex64, Complex64)> {
    let a = kernel_matrix(v, k)?;
    let (t1, t2, t3) = traces(&a);
    let poly = -t1 + t2 / 2.0 - t3 / 3.0;
    let d = det_of(&a);
    if d.norm() == 0.0 {
        return Ok((d, d, poly));
    }
    // combined in log form so a tiny det and a huge exponential do not give 0·∞
    Ok(((d.ln() + poly).exp(), d, poly))
}

/// `Tr A(k)²`.
pub fn trace_square(v: &Potential, k: Wavenumber) -> Result<Complex64> {
    Ok(traces(&kernel_matrix(v, k)?).1)
}

/// Partial sum `Σ_{j ≤ n_terms} (-1)^{j+1} Tr(A^j) / j` of `log L(k)`.
///
/// Rejected when the trace norm of `A` is not below 1, where the series need
/// not converge.
pub fn log_expansion(v: &Potential, k: Wavenumber, n_terms: usize) -> Result<Complex64> {
    let a = kernel_matrix(v, k)?;
    let norm = trace_norm(&a);
    if norm >= 1.0 {
        return Err(Error::Divergence(format!(
            "trace norm {norm:.3} of A(k) at k = {} is not below 1",
            k.value()
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    if a.nrows() == 0 {
        return Ok(sum);
    }
    let mut power = a.clone();
    for j in 1..=n_terms {
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * power.trace() / j as f64;
        power = &power * &a;
    }
    Ok(sum)
}

/// Continues `log f` along the vertical segment from `Re k + iY` down to `k`,
/// starting from the principal branch at the top. Steps are halved until the
/// argument increment is below π/2.
///
/// `f` returns `(value, factor, exponent)` with `value = factor · e^exponent`;
/// a step is also refused when `factor` turns by π/2 or `Im exponent` moves by
/// π/4, so neither factor can alias a full turn into one step of the product.
/// Steps are further capped at a quarter of the local scale
/// `max(Im k, |Re k|, 10⁻³)` and refused when `log|value|` moves by π/4.
fn continue_log(
    mut f: impl FnMut(Wavenumber) -> Result<(Complex64, Complex64, Complex64)>,
    k: Wavenumber,
    top: f64,
) -> Result<Complex64> {
    let kk = k.value();
    let fail = || Error::BranchTracking { re: kk.re, im: kk.im };
    let mut t = top.max(kk.im);
    let (mut prev, mut factor, mut guard) = f(Wavenumber::new(kk.re, t))?;
    if prev.norm() == 0.0 || !prev.norm().is_finite() {
        return Err(fail());
    }
    let mut arg = prev.arg();
    let mut step = (t - kk.im) / 32.0;
    let min_step = 1e-12 * (1.0 + top.abs());
    while t > kk.im {
        step = step.min(0.25 * t.max(kk.re.abs()).max(1e-3));
        let next_t = (t - step).max(kk.im);
        let (val, next_factor, next_guard) = f(Wavenumber::new(kk.re, next_t))?;
        if val.norm() == 0.0 || !val.norm().is_finite() {
            return Err(fail());
        }
        let d = (val / prev).arg();
        let turn = (next_guard.im - guard.im).abs();
        let factor_turn = (next_factor / factor).arg().abs();
        let stretch = (val.norm() / prev.norm()).ln().abs();
        if d.abs() >= FRAC_PI_2 || factor_turn >= FRAC_PI_2 || turn >= FRAC_PI_4 || stretch >= FRAC_PI_4 {
            step *= 0.5;
            if step < min_step {
                return Err(fail());
            }
            continue;
        }
        arg += d;
        prev = val;
        factor = next_factor;
        guard = next_guard;
        t = next_t;
        step *= 1.5;
    }
    Ok(Complex64::new(prev.norm().ln(), arg))
}

/// Height from which branch continuation starts; there `|L - 1|` is small.
fn continuation_top(v: &Potential) -> f64 {
    4.0 * v.l1_norm() + 10.0
}

/// `log L(k)` on the branch continuous from `L ≈ 1` at large `Im k`.
pub fn log_det_continued(v: &Potential, k: Wavenumber) -> Result<Complex64> {
    k.require_nonresonant()?;
    continue_log(
        |z| {
            let l = perturbation_det(v, z)?;
            Ok((l, l, Complex64::new(0.0, 0.0)))
        },
        k,
        continuation_top(v),
    )
}

/// `log L₄(k)`, continued on its own path independently of `log L`.
pub fn log_det4_continued(v: &Potential, k: Wavenumber) -> Result<Complex64> {
    k.require_nonresonant()?;
    continue_log(|z| det4_parts(v, z), k, continuation_top(v))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetrizedIdentity {
    /// `log L(V) + log L(-V)`.
    pub lhs: Complex64,
    /// `Tr A²` for `V`, shared by `±V`.
    pub trace_term: Complex64,
    /// `log L₄(V) + log L₄(-V)`.
    pub det4_terms: Complex64,
    /// `|lhs - (-trace_term + det4_terms)|`.
    pub residual: f64,
}

pub fn symmetrized_identity(v: &Potential, k: Wavenumber) -> Result<SymmetrizedIdentity> {
    let neg = v.negated();
    let lhs = log_det_continued(v, k)? + log_det_continued(&neg, k)?;
    let trace_term = trace_square(v, k)?;
    let det4_terms = log_det4_continued(v, k)? + log_det4_continued(&neg, k)?;
    let residual = (lhs - (-trace_term + det4_terms)).norm();
    Ok(SymmetrizedIdentity {
        lhs,
        trace_term,
        det4_terms,
        residual,
    })
}

/// `L(iε)` as `(sign, log|L|)`; the matrix is real on the imaginary axis.
pub fn line_det_imaginary_parts(v: &Potential, eps: f64) -> (f64, f64) {
    let sites: Vec<(i64, f64)> = v.support().map(|(n, x)| (n as i64, x)).collect();
    let m = sites.len();
    if m == 0 {
        return (1.0, 0.0);
    }
    let mut a = DMatrix::<f64>::identity(m, m);
    for (i, &(ni, vi)) in sites.iter().enumerate() {
        for (j, &(nj, _)) in sites.iter().enumerate() {
            a[(i, j)] += vi * (-eps * (ni - nj).abs() as f64).exp() / (2.0 * eps);
        }
    }
    let lu = a.lu();
    let mut sign: f64 = lu.p().determinant();
    let mut log_abs = 0.0;
    let u = lu.u();
    for i in 0..m {
        let d = u[(i, i)];
        if d == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        sign *= d.signum();
        log_abs += d.abs().ln();
    }
    (sign, log_abs)
}

/// `L(iε)`, real-valued.
pub fn line_det_imaginary(v: &Potential, eps: f64) -> f64 {
    let (sign, log_abs) = line_det_imaginary_parts(v, eps);
    sign * log_abs.exp()
}

/// Zeros `ε_j` of `ε ↦ L(iε)` on `(0, eps_max]`, in decreasing order.
///
/// `eps_max` defaults to `‖V‖₁`, which exceeds every `ε_j ≤ ½‖V‖₁`.
pub fn line_zeros(v: &Potential, eps_max: Option<f64>) -> Result<Vec<f64>> {
    let eps_max = eps_max.unwrap_or_else(|| v.l1_norm());
    if v.is_zero() || eps_max <= 0.0 {
        return Ok(Vec::new());
    }
    if !eps_max.is_finite() {
        return Err(Error::invalid("eps_max", "must be finite"));
    }
    let (top_sign, _) = line_det_imaginary_parts(v, eps_max);
    if top_sign <= 0.0 {
        return Err(Error::BracketTooSmall(format!(
            "L(iε) is not positive at eps_max = {eps_max}; zeros lie beyond it"
        )));
    }
    let grid = open_grid(0.0, eps_max, BOUND_STATE_GRID);
    let mut roots = scan_roots(
        |e| Ok(line_det_imaginary_parts(v, e).0),
        &grid,
        BOUND_STATE_TOL,
    )?;
    roots.reverse();
    Ok(roots)
}

/// Negative eigenvalues `E_j = -ε_j²` of the whole-line operator, ascending.
pub fn line_bound_states(v: &Potential, eps_max: Option<f64>) -> Result<Vec<f64>> {
    Ok(line_zeros(v, eps_max)?.into_iter().map(|e| -e * e).collect())
}

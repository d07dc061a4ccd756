//! Jacobi reduction of the delta comb.
//!
//! Solutions of `-ψ'' + Σ V(n)δ(x-n)ψ = k²ψ` are determined by their integer
//! values, which obey `-u_{n+1} + b_n u_n - u_{n-1} = 0` with
//! `b_n = 2cos k + (sin k / k) V(n)`.

use num_complex::Complex64;

use crate::potentials::Potential;
use crate::quadrature::Integrator;
use crate::{Error, Result};

/// Minimal distance from `πZ` for any operation that divides by `sin k`.
pub const RESONANCE_GUARD: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber(Complex64);

impl Wavenumber {
    pub fn new(re: f64, im: f64) -> Self {
        Self(Complex64::new(re, im))
    }

    pub fn from_complex(k: Complex64) -> Self {
        Self(k)
    }

    pub fn real(k: f64) -> Self {
        Self::new(k, 0.0)
    }

    /// `k = iε`, i.e. energy `-ε²`.
    pub fn imaginary(eps: f64) -> Self {
        Self::new(0.0, eps)
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn energy(self) -> Complex64 {
        self.0 * self.0
    }

    /// Distance from the nearest multiple of π.
    pub fn resonance_distance(self) -> f64 {
        let m = (self.0.re / std::f64::consts::PI).round();
        (self.0 - Complex64::new(m * std::f64::consts::PI, 0.0)).norm()
    }

    pub fn is_upper_half(self) -> bool {
        self.0.im > 0.0
    }

    pub fn is_nonresonant(self) -> bool {
        self.resonance_distance() > RESONANCE_GUARD
    }

    pub fn is_real_regular(self) -> bool {
        self.0.im == 0.0 && self.is_nonresonant()
    }

    pub fn require_nonresonant(self) -> Result<()> {
        if self.0.re.is_finite() && self.0.im.is_finite() && self.is_nonresonant() {
            Ok(())
        } else {
            Err(Error::Resonant {
                re: self.0.re,
                im: self.0.im,
            })
        }
    }

    pub fn require_nonzero(self) -> Result<()> {
        if self.0.norm() == 0.0 || !self.0.re.is_finite() || !self.0.im.is_finite() {
            Err(Error::invalid("k", "k must be finite and nonzero"))
        } else {
            Ok(())
        }
    }
}

impl From<Complex64> for Wavenumber {
    fn from(k: Complex64) -> Self {
        Self(k)
    }
}

/// `sin k / k`, by its Taylor series near the origin.
pub fn sinc(k: Complex64) -> Complex64 {
    if k.norm() < 1e-4 {
        let k2 = k * k;
        1.0 - k2 / 6.0 + k2 * k2 / 120.0
    } else {
        k.sin() / k
    }
}

pub fn b_coeff(k: Wavenumber, v: &Potential, n: i64) -> Complex64 {
    let k = k.value();
    2.0 * k.cos() + sinc(k) * v.get(n)
}

/// Free resolvent kernel `G(n,m) = -e^{ik|n-m|} / (2i sin k)`, normalised so
/// that the free Jacobi matrix applied to a column of `G` is the unit vector.
pub fn free_resolvent_entry(k: Wavenumber, n: i64, m: i64) -> Result<Complex64> {
    k.require_nonresonant()?;
    let k = k.value();
    let d = (n - m).unsigned_abs() as f64;
    Ok(-(I * k * d).exp() / (2.0 * I * k.sin()))
}

/// `(sin k / k) G(n,m) = -e^{ik|n-m|} / (2ik)`; at `k = iε` this is
/// `e^{-ε|n-m|} / (2ε)`.
pub fn r_kernel_entry(k: Wavenumber, n: i64, m: i64) -> Result<Complex64> {
    k.require_nonzero()?;
    let k = k.value();
    let d = (n - m).unsigned_abs() as f64;
    Ok(-(I * k * d).exp() / (2.0 * I * k))
}

/// `n ↦ -u_{n+1} + b_n u_n - u_{n-1}` for `u` stored on `first..first+len`.
/// The result covers the interior indices `first+1..first+len-1`.
pub fn apply_jacobi(
    k: Wavenumber,
    v: &Potential,
    first: i64,
    u: &[Complex64],
) -> Result<Vec<Complex64>> {
    if u.len() < 3 {
        return Err(Error::invalid("u", "window needs at least 3 sites"));
    }
    Ok(u
        .windows(3)
        .enumerate()
        .map(|(i, w)| {
            let n = first + 1 + i as i64;
            -w[2] + b_coeff(k, v, n) * w[1] - w[0]
        })
        .collect())
}

fn halfline_bands(
    k: Wavenumber,
    v: &Potential,
    n_trunc: usize,
) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let mut diag: Vec<Complex64> = (1..=n_trunc as i64).map(|n| b_coeff(k, v, n)).collect();
    // beyond the support u_{N+1} = e^{ik} u_N
    diag[n_trunc - 1] -= (I * k.value()).exp();
    let off = vec![Complex64::new(-1.0, 0.0); n_trunc - 1];
    (off.clone(), diag, off)
}

fn check_halfline(k: Wavenumber, v: &Potential, n_trunc: usize) -> Result<()> {
    k.require_nonzero()?;
    if k.energy().im == 0.0 {
        return Err(Error::invalid("k", "half-line solve needs Im k² ≠ 0"));
    }
    if n_trunc == 0 || n_trunc < v.support_end() {
        return Err(Error::invalid(
            "n_trunc",
            format!(
                "truncation {n_trunc} must cover the support (ends at {})",
                v.support_end()
            ),
        ));
    }
    Ok(())
}

/// Solves the half-line system on `1..=rhs.len()` with the outgoing closure
/// `x_{N+1} = e^{ik} x_N` and Dirichlet condition `x_0 = 0`.
pub fn solve_halfline_system(
    k: Wavenumber,
    v: &Potential,
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    check_halfline(k, v, rhs.len())?;
    let (lower, diag, upper) = halfline_bands(k, v, rhs.len());
    solve_tridiagonal(lower, diag, upper, rhs.to_vec()).ok_or(Error::SingularSystem {
        re: k.value().re,
        im: k.value().im,
    })
}

/// `(J̃_k^{-1} δ_1, δ_1) = u_1 / u_0`.
pub fn solve_halfline(k: Wavenumber, v: &Potential, n_trunc: usize) -> Result<Complex64> {
    let mut rhs = vec![Complex64::new(0.0, 0.0); n_trunc.max(1)];
    rhs[0] = Complex64::new(1.0, 0.0);
    Ok(solve_halfline_system(k, v, &rhs)?[0])
}

/// The half-line operator with outgoing closure applied to `x` on `1..=x.len()`.
pub fn apply_halfline(k: Wavenumber, v: &Potential, x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let (_, diag, _) = halfline_bands(k, v, n);
    (0..n)
        .map(|i| {
            let left = if i > 0 { x[i - 1] } else { Complex64::new(0.0, 0.0) };
            let right = if i + 1 < n { x[i + 1] } else { Complex64::new(0.0, 0.0) };
            diag[i] * x[i] - left - right
        })
        .collect()
}

/// Gaussian elimination with partial pivoting on a tridiagonal system.
/// Returns `None` when a pivot vanishes.
fn solve_tridiagonal(
    mut dl: Vec<Complex64>,
    mut d: Vec<Complex64>,
    mut du: Vec<Complex64>,
    mut b: Vec<Complex64>,
) -> Option<Vec<Complex64>> {
    let n = d.len();
    let scale = d
        .iter()
        .chain(dl.iter())
        .chain(du.iter())
        .fold(0.0_f64, |m, z| m.max(z.norm()));
    let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    // second superdiagonal created by row swaps
    let mut du2 = vec![Complex64::new(0.0, 0.0); n.saturating_sub(2)];
    for i in 0..n.saturating_sub(1) {
        if d[i].norm() >= dl[i].norm() {
            if d[i].norm() <= tiny {
                return None;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] = b[i + 1] - fact * b[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            let bi = b[i];
            b[i] = b[i + 1];
            b[i + 1] = bi - fact * b[i + 1];
        }
        dl[i] = Complex64::new(0.0, 0.0);
    }
    if d[n - 1].norm() <= tiny {
        return None;
    }
    let mut x = b;
    x[n - 1] /= d[n - 1];
    if n > 1 {
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    Some(x)
}

/// Continuum solution on the cell `[n, n+1]` at `x ∈ [0, 1]` from its values
/// `u0` at the left end and `u1` at the right end.
pub fn continuum_interpolate(u0: Complex64, u1: Complex64, k: Wavenumber, x: f64) -> Result<Complex64> {
    k.require_nonresonant()?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid("x", format!("{x} is outside the unit cell")));
    }
    let k = k.value();
    Ok(((k * x).sin() * u1 - (k * (x - 1.0)).sin() * u0) / k.sin())
}

/// Hermitian Gram matrix of `sin(kx)` and `sin(k(x-1))` on `[0, 1]`,
/// returned as `(g11, g12, g22)`.
pub fn cell_gram(k: Wavenumber) -> Result<(f64, Complex64, f64)> {
    k.require_nonresonant()?;
    let k = k.value();
    let integ = Integrator::new(20, 1e-13);
    let f1 = |x: f64| (k * x).sin();
    let f2 = |x: f64| (k * (x - 1.0)).sin();
    let g11 = integ.integrate(0.0, 1.0, |x| f1(x).norm_sqr())?;
    let g22 = integ.integrate(0.0, 1.0, |x| f2(x).norm_sqr())?;
    let g12 = integ.integrate(0.0, 1.0, |x| f1(x) * f2(x).conj())?;
    Ok((g11, g12, g22))
}

/// `c(k)`: square root of the smallest Gram eigenvalue, i.e. the smallest
/// `L²(0,1)` norm of a unit combination of the two cell solutions.
pub fn cell_constant(k: Wavenumber) -> Result<f64> {
    let (a, b, d) = cell_gram(k)?;
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let big = mean + radius;
    // product form keeps the small eigenvalue accurate
    let small = (a * d - b.norm_sqr()) / big;
    Ok(small.max(0.0).sqrt())
}

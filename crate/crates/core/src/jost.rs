//! Jost solutions, scattering data and the Weyl m-function.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::lattice::{b_coeff, solve_halfline, Wavenumber, RESONANCE_GUARD};
use crate::potentials::Potential;
use crate::quadrature::Integrator;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Solution of the lattice recurrence with `u_n = e^{ikn}` beyond the support.
///
/// Values are stored as `ũ_n = u_n e^{-ik s - σ}` with `s = n₀ + 1` the top of
/// the window and `σ` a real log-scale picked up by renormalising the sweep,
/// so it stays finite for large `Im k`. [`JostSolution::u`] undoes the
/// scaling; entries far above the renormalisation point may then read as 0.
#[derive(Debug, Clone)]
pub struct JostSolution {
    k: Wavenumber,
    n_min: i64,
    shift: i64,
    log_scale: f64,
    scaled: Vec<Complex64>,
    u1_over_u0: Complex64,
    a: Complex64,
    b: Complex64,
}

impl JostSolution {
    pub fn k(&self) -> Wavenumber {
        self.k
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.shift
    }

    fn index(&self, n: i64) -> Result<usize> {
        if n < self.n_min || n > self.shift {
            return Err(Error::OutOfWindow {
                index: n,
                lo: self.n_min,
                hi: self.shift,
            });
        }
        Ok((n - self.n_min) as usize)
    }

    pub fn u(&self, n: i64) -> Result<Complex64> {
        let i = self.index(n)?;
        Ok(self.scaled[i] * self.phase())
    }

    fn phase(&self) -> Complex64 {
        (I * self.k.value() * self.shift as f64 + self.log_scale).exp()
    }

    /// `u_n / u_m`, free of the overall scale.
    pub fn ratio(&self, n: i64, m: i64) -> Result<Complex64> {
        Ok(self.scaled[self.index(n)?] / self.scaled[self.index(m)?])
    }

    /// All `(n, u_n)` in the stored window.
    pub fn values(&self) -> Vec<(i64, Complex64)> {
        let phase = self.phase();
        self.scaled
            .iter()
            .enumerate()
            .map(|(i, z)| (self.n_min + i as i64, z * phase))
            .collect()
    }
}

/// Backward sweep `u_{n-1} = b_n u_n - u_{n+1}` from the free side down to `n = -1`.
///
/// The sweep runs on the ratios `ρ_n = u_{n-1} / u_n`, which obey
/// `ρ_n = b_n - 1/ρ_{n+1}`. For real `k` the `b_n` are real, so `Im ρ_n`
/// is propagated multiplicatively and keeps full relative precision even when
/// `|u|` grows large.
pub fn jost_solve(v: &Potential, k: Wavenumber) -> Result<JostSolution> {
    k.require_nonzero()?;
    k.require_nonresonant()?;
    let kk = k.value();
    let n0 = v.support_end() as i64;
    let shift = n0 + 1;
    let n_min = -1;
    let len = (shift - n_min + 1) as usize;
    let mut scaled = vec![Complex64::new(0.0, 0.0); len];
    scaled[len - 1] = Complex64::new(1.0, 0.0);
    let mut rho = (-I * kk).exp();
    let mut log_scale = 0.0;
    let mut u1_over_u0 = Complex64::new(0.0, 0.0);
    for n in (n_min + 1..=shift).rev() {
        let i = (n - n_min) as usize;
        if n <= n0 && rho.norm() < 1e-8 {
            // u_n nearly vanishes: step the plain recurrence instead
            scaled[i - 1] = b_coeff(k, v, n) * scaled[i] - scaled[i + 1];
            rho = scaled[i - 1] / scaled[i];
        } else {
            if n <= n0 {
                rho = b_coeff(k, v, n) - 1.0 / rho;
            }
            scaled[i - 1] = rho * scaled[i];
        }
        if n == 1 {
            u1_over_u0 = 1.0 / rho;
        }
        let size = scaled[i - 1].norm();
        if size > 1e150 {
            for z in &mut scaled[i - 1..] {
                *z /= size;
            }
            log_scale += size.ln();
        }
    }
    if scaled.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Divergence(format!(
            "Jost sweep broke down at k = {kk}"
        )));
    }
    let (u0, um1) = (scaled[1], scaled[0]);
    let two_i_sin = 2.0 * I * kk.sin();
    let a_scaled = ((I * kk).exp() * u0 - um1) / two_i_sin;
    let b_scaled = (um1 - (-I * kk).exp() * u0) / two_i_sin;
    let lift = |z: Complex64| {
        if z.norm() == 0.0 {
            z
        } else {
            (z.ln() + I * kk * shift as f64 + log_scale).exp()
        }
    };
    Ok(JostSolution {
        k,
        n_min,
        shift,
        log_scale,
        scaled,
        u1_over_u0,
        a: lift(a_scaled),
        b: lift(b_scaled),
    })
}

/// `u_n ū_{n-1} - u_{n-1} ū_n` for real `k`.
pub fn wronskian(sol: &JostSolution, n: i64) -> Result<Complex64> {
    if !sol.k.is_real_regular() {
        return Err(Error::invalid("k", "Wronskian certificate needs real regular k"));
    }
    let un = sol.u(n)?;
    let um = sol.u(n - 1)?;
    Ok(un * um.conj() - um * un.conj())
}

fn m_from_ratio(k: Complex64, ratio: Complex64) -> Complex64 {
    let s = k.sin();
    k / s * ratio - k * k.cos() / s
}

/// `M(k) = (k / sin k)(u_1 / u_0) - k cot k`.
pub fn m_function(v: &Potential, k: Wavenumber) -> Result<Complex64> {
    let sol = jost_solve(v, k)?;
    let ratio = sol.u1_over_u0;
    if !(ratio.norm() < 1e14) {
        let kk = k.value();
        return Err(Error::MFunctionPole { re: kk.re, im: kk.im });
    }
    Ok(m_from_ratio(k.value(), ratio))
}

/// The same m-function through the half-line resolvent `(J̃_k^{-1}δ_1, δ_1)`.
pub fn m_function_halfline(v: &Potential, k: Wavenumber, n_trunc: usize) -> Result<Complex64> {
    k.require_nonresonant()?;
    let x1 = solve_halfline(k, v, n_trunc)?;
    Ok(m_from_ratio(k.value(), x1))
}

/// Density `Im M(√E) / π` of the absolutely continuous spectral measure.
pub fn spectral_density(v: &Potential, e: f64) -> Result<f64> {
    if !(e > 0.0 && e.is_finite()) {
        return Err(Error::invalid("E", format!("need E > 0, got {e}")));
    }
    Ok(m_function(v, Wavenumber::real(e.sqrt()))?.im / PI)
}

/// `(2/π) ∫_a^b Im M(k) k dk`, the a.c. mass of the energy interval `(a², b²)`.
pub fn ac_mass(v: &Potential, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > a && b.is_finite()) {
        return Err(Error::invalid("interval", format!("need 0 < a < b, got [{a}, {b}]")));
    }
    let lo = ((a - RESONANCE_GUARD) / PI).floor();
    let hi = ((b + RESONANCE_GUARD) / PI).floor();
    if lo != hi {
        return Err(Error::Resonant { re: PI * hi, im: 0.0 });
    }
    let integ = Integrator::new(20, 1e-11);
    let mass = integ.try_integrate(a, b, |k| Ok(m_function(v, Wavenumber::real(k))?.im * k))?;
    Ok(2.0 / PI * mass)
}

/// `ũ_0(iε)`, a positive multiple of the Jost value `u_0(iε)`; its zeros are
/// the Dirichlet eigenvalues `-ε²` of the half-line operator.
pub fn u0_on_imaginary_axis(v: &Potential, eps: f64) -> f64 {
    let n0 = v.support_end() as i64;
    let (ch, sh_over) = (2.0 * eps.cosh(), if eps < 1e-4 { 1.0 + eps * eps / 6.0 } else { eps.sinh() / eps });
    let mut upper = 1.0;
    let mut current = eps.exp();
    for n in (1..=n0).rev() {
        let next = (ch + sh_over * v.get(n)) * current - upper;
        upper = current;
        current = next;
        let scale = current.abs().max(upper.abs());
        if scale > 1e100 {
            upper /= scale;
            current /= scale;
        }
    }
    current
}

//! The comb `-d²/dx² + Σ (a + V_ω(n)) δ(x - n)` with `V_ω(n) = κ ω_n n^{-α}`:
//! band geometry of the periodic part, the sets `K_{α,β}`, Prüfer variables
//! and the spectral-type regions.
//!
//! On the lattice the model reads `u(n+1) + u(n-1) = (γ(λ) + s(λ) V_ω(n)) u(n)`
//! with `s(λ) = sin √λ / √λ` and `γ(λ) = a s(λ) + 2 cos √λ`, continued to
//! `λ ≤ 0` through `sinh`/`cosh`.

use std::f64::consts::{PI, SQRT_2};

use crate::potentials::RandomModel;
use crate::roots::bisect;
use crate::{Error, Result};

/// Grid size for region boundaries.
pub const REGION_GRID: usize = 10_000;
/// Bisection tolerance for region boundaries.
pub const REGION_TOL: f64 = 1e-10;
/// Distance below which `γ` counts as one of the excluded values.
pub const EXCLUSION_TOL: f64 = 1e-9;

const SERIES_CUTOFF: f64 = 1e-4;

/// `(sin √λ / √λ, cos √λ)`, both entire in `λ`.
fn trig_pair(lambda: f64) -> (f64, f64) {
    if lambda.abs() < SERIES_CUTOFF {
        let (mut s, mut c) = (0.0, 0.0);
        let mut term = 1.0;
        for j in 0..6 {
            // term = (-λ)^j / (2j)!
            c += term;
            s += term / (2 * j + 1) as f64;
            term *= -lambda / ((2 * j + 1) * (2 * j + 2)) as f64;
        }
        return (s, c);
    }
    if lambda > 0.0 {
        let x = lambda.sqrt();
        (x.sin() / x, x.cos())
    } else {
        let x = (-lambda).sqrt();
        (x.sinh() / x, x.cosh())
    }
}

/// `s(λ) = sin √λ / √λ`, the factor in front of each coupling.
pub fn coupling_factor(lambda: f64) -> f64 {
    trig_pair(lambda).0
}

/// `γ(λ) = a s(λ) + 2 cos √λ`.
pub fn discriminant(lambda: f64, a: f64) -> f64 {
    let (s, c) = trig_pair(lambda);
    a * s + 2.0 * c
}

pub fn in_essential_spectrum(lambda: f64, a: f64) -> bool {
    discriminant(lambda, a).abs() <= 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPoint {
    pub lambda: f64,
    pub gamma: f64,
    /// `k̃ ∈ [0, π]` with `2 cos k̃ = γ`, when `|γ| ≤ 2`.
    pub tilde_k: Option<f64>,
}

pub fn dispersion_point(lambda: f64, a: f64) -> DispersionPoint {
    let gamma = discriminant(lambda, a);
    DispersionPoint {
        lambda,
        gamma,
        tilde_k: (gamma.abs() <= 2.0).then(|| (0.5 * gamma).acos()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }
}

/// Maximal intervals of `[lo, hi]` where `m ≥ 0`, from a grid scan with the
/// crossings bisected.
fn level_set(m: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<Vec<Interval>> {
    let n = REGION_GRID;
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let inside: Vec<bool> = grid.iter().map(|&x| m(x) >= 0.0).collect();
    let edge = |a: f64, b: f64| bisect(|x| Ok(m(x)), a, b, REGION_TOL);
    let mut out = Vec::new();
    let mut start = inside[0].then_some(lo);
    for i in 1..=n {
        match (inside[i - 1], inside[i]) {
            (false, true) => start = Some(edge(grid[i - 1], grid[i])?),
            (true, false) => {
                let end = edge(grid[i - 1], grid[i])?;
                out.push(Interval { lo: start.take().unwrap_or(lo), hi: end });
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Interval { lo: s, hi });
    }
    Ok(out)
}

/// A point below the spectrum: `γ > 2` for every smaller `λ`.
pub fn spectrum_floor(a: f64) -> f64 {
    if a >= 0.0 {
        0.0
    } else {
        // for x = √-λ ≥ max(2, 2|a|): 2 cosh x + a sinh x / x ≥ 2 cosh x - sinh x / 2 > 2
        -(2.0 * a.abs()).max(2.0).powi(2)
    }
}

/// The bands `{|γ| ≤ 2}` within `[spectrum_floor(a), lambda_max]`.
pub fn band_edges(a: f64, lambda_max: f64) -> Result<Vec<Interval>> {
    let floor = spectrum_floor(a);
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::invalid("lambda_max", format!("need lambda_max > 0, got {lambda_max}")));
    }
    if !a.is_finite() {
        return Err(Error::invalid("a", "must be finite"));
    }
    level_set(|l| 2.0 - discriminant(l, a).abs(), floor, lambda_max)
}

/// The gaps between consecutive bands.
pub fn spectral_gaps(bands: &[Interval]) -> Vec<Interval> {
    bands
        .windows(2)
        .map(|w| Interval { lo: w[0].hi, hi: w[1].lo })
        .collect()
}

/// The open interval `S_{α,β} = {2 cos k : k ∈ (α, β)}`.
pub fn s_interval(alpha: f64, beta: f64) -> Result<Interval> {
    if !(alpha > 0.0 && beta > alpha && beta.is_finite()) {
        return Err(Error::invalid("alpha/beta", format!("need 0 < alpha < beta, got ({alpha}, {beta})")));
    }
    if (alpha / PI).ceil() * PI <= beta {
        return Err(Error::invalid(
            "alpha/beta",
            format!("[{alpha}, {beta}] contains a multiple of pi"),
        ));
    }
    let (x, y) = (2.0 * alpha.cos(), 2.0 * beta.cos());
    Ok(Interval { lo: x.min(y), hi: x.max(y) })
}

/// `K_{α,β} = {λ ∈ (0, lambda_max] : γ(λ) ∈ S_{α,β}}`.
pub fn k_region(a: f64, alpha: f64, beta: f64, lambda_max: f64) -> Result<Vec<Interval>> {
    let s = s_interval(alpha, beta)?;
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::invalid("lambda_max", format!("need lambda_max > 0, got {lambda_max}")));
    }
    let m = |l: f64| {
        let g = discriminant(l, a);
        (g - s.lo).min(s.hi - g)
    };
    let mut out = level_set(m, 0.0, lambda_max)?;
    out.retain(|iv| !iv.is_empty());
    Ok(out)
}

/// Why the decay exponent is undefined at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exclusion {
    /// `|γ| > 2`.
    OutsideBand,
    /// `γ = ±2`.
    BandEdge,
    /// `γ = ±√2`.
    SqrtTwo,
    /// `γ = 0`.
    Center,
}

impl Exclusion {
    pub fn label(self) -> &'static str {
        match self {
            Exclusion::OutsideBand => "outside_band",
            Exclusion::BandEdge => "band_edge",
            Exclusion::SqrtTwo => "gamma_sqrt2",
            Exclusion::Center => "gamma_zero",
        }
    }
}

fn exclusion(gamma: f64) -> Option<Exclusion> {
    let g = gamma.abs();
    if g > 2.0 + EXCLUSION_TOL {
        Some(Exclusion::OutsideBand)
    } else if (g - 2.0).abs() <= EXCLUSION_TOL {
        Some(Exclusion::BandEdge)
    } else if (g - SQRT_2).abs() <= EXCLUSION_TOL {
        Some(Exclusion::SqrtTwo)
    } else if g <= EXCLUSION_TOL {
        Some(Exclusion::Center)
    } else {
        None
    }
}

/// `β = κ s(λ)`.
pub fn beta_coefficient(lambda: f64, kappa: f64) -> f64 {
    kappa * coupling_factor(lambda)
}

/// `p = β² / (8 - 2γ²)`.
pub fn decay_exponent(lambda: f64, a: f64, kappa: f64) -> std::result::Result<f64, Exclusion> {
    let gamma = discriminant(lambda, a);
    if let Some(e) = exclusion(gamma) {
        return Err(e);
    }
    let beta = beta_coefficient(lambda, kappa);
    Ok(beta * beta / (8.0 - 2.0 * gamma * gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralClass {
    Outside,
    PurePoint,
    SingularContinuous,
    AbsolutelyContinuous,
    Boundary,
}

impl SpectralClass {
    pub fn label(self) -> &'static str {
        match self {
            SpectralClass::Outside => "outside",
            SpectralClass::PurePoint => "pp",
            SpectralClass::SingularContinuous => "sc",
            SpectralClass::AbsolutelyContinuous => "ac",
            SpectralClass::Boundary => "boundary",
        }
    }
}

pub fn classify_point(lambda: f64, a: f64, kappa: f64, alpha_exp: f64) -> SpectralClass {
    if !in_essential_spectrum(lambda, a) {
        return SpectralClass::Outside;
    }
    if alpha_exp < 0.5 - 1e-12 {
        return SpectralClass::PurePoint;
    }
    if alpha_exp > 0.5 + 1e-12 {
        return SpectralClass::AbsolutelyContinuous;
    }
    match decay_exponent(lambda, a, kappa) {
        Ok(p) if (p - 0.5).abs() <= EXCLUSION_TOL => SpectralClass::Boundary,
        Ok(p) if p > 0.5 => SpectralClass::PurePoint,
        Ok(_) => SpectralClass::SingularContinuous,
        Err(_) => SpectralClass::Boundary,
    }
}

/// `k̃`, `sin k̃` and `s(λ)` for a point strictly inside a band, `λ > 0`.
#[derive(Debug, Clone, Copy)]
struct Rotation {
    tilde_k: f64,
    sin_tilde_k: f64,
    s: f64,
}

fn rotation(lambda: f64, a: f64) -> Result<Rotation> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda", format!("Prüfer flow needs lambda > 0, got {lambda}")));
    }
    let gamma = discriminant(lambda, a);
    if !(gamma.abs() < 2.0) {
        return Err(Error::invalid(
            "lambda",
            format!("gamma({lambda}) = {gamma} is not inside (-2, 2)"),
        ));
    }
    let tilde_k = (0.5 * gamma).acos();
    Ok(Rotation {
        tilde_k,
        sin_tilde_k: tilde_k.sin(),
        s: coupling_factor(lambda),
    })
}

/// Prüfer state: `log R²`, the unwrapped angle `θ`, and `θ` reduced to
/// `[-π, π)`, which is what the trigonometry runs on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruferState {
    pub log_r2: f64,
    pub theta: f64,
    phase: f64,
}

impl PruferState {
    pub fn new(log_r2: f64, theta: f64) -> Self {
        Self {
            log_r2,
            theta,
            phase: wrap(theta),
        }
    }

    /// One step with shear `t = s V(n) / sin k̃`: `(R, θ)` is rotated by `k̃`,
    /// sheared, and `θ` takes the branch with increment in `[-π, π)`.
    pub fn step(self, tilde_k: f64, t: f64) -> Self {
        let (sp, cp) = (self.phase + tilde_k).sin_cos();
        let x = cp + t * sp;
        let y = sp;
        let psi = y.atan2(x);
        Self {
            log_r2: self.log_r2 + (x * x + y * y).ln(),
            theta: self.theta + wrap(psi - self.phase),
            phase: psi,
        }
    }
}

/// Representative of `x` modulo `2π` in `[-π, π)`.
fn wrap(x: f64) -> f64 {
    x - 2.0 * PI * ((x + PI) / (2.0 * PI)).floor()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PruferTrajectory {
    pub lambda: f64,
    pub seed: u64,
    pub realization: u64,
    /// `log R(n)²` for `n = 1, …`; entry 0 is `n = 1`.
    pub log_r2: Vec<f64>,
    pub theta: Vec<f64>,
}

impl PruferTrajectory {
    pub fn len(&self) -> usize {
        self.log_r2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_r2.is_empty()
    }
}

/// `(R, θ)` from `R cos θ = u(n) - cos k̃ u(n-1)`, `R sin θ = sin k̃ u(n-1)`,
/// starting at `R(1) = 1`, `θ(1) = 0` (that is `u(0) = 0`, `u(1) = 1`).
pub fn prufer_flow(
    model: &RandomModel,
    lambda: f64,
    n_steps: usize,
    realization: u64,
) -> Result<PruferTrajectory> {
    if n_steps < 2 {
        return Err(Error::invalid("n_steps", "need n_steps >= 2"));
    }
    let rot = rotation(lambda, model.coupling_a)?;
    let scale = rot.s / rot.sin_tilde_k;
    let mut log_r2 = Vec::with_capacity(n_steps);
    let mut theta = Vec::with_capacity(n_steps);
    let mut state = PruferState::new(0.0, 0.0);
    log_r2.push(state.log_r2);
    theta.push(state.theta);
    for v in model.couplings(realization).take(n_steps - 1) {
        state = state.step(rot.tilde_k, scale * v);
        log_r2.push(state.log_r2);
        theta.push(state.theta);
    }
    Ok(PruferTrajectory {
        lambda,
        seed: model.seed,
        realization,
        log_r2,
        theta,
    })
}

/// `log R(n)²` at the given ascending checkpoints, without storing the path.
pub fn prufer_log_r2_at(
    model: &RandomModel,
    lambda: f64,
    checkpoints: &[usize],
    realization: u64,
) -> Result<Vec<f64>> {
    if checkpoints.is_empty() || checkpoints[0] < 1 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("checkpoints", "need ascending values >= 1"));
    }
    let rot = rotation(lambda, model.coupling_a)?;
    let scale = rot.s / rot.sin_tilde_k;
    let last = *checkpoints.last().unwrap();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    let mut state = PruferState::new(0.0, 0.0);
    let mut couplings = model.couplings(realization);
    for n in 1..=last {
        if next.peek() == Some(&&n) {
            out.push(state.log_r2);
            next.next();
        }
        if n < last {
            let v = couplings.next().expect("unbounded stream");
            state = state.step(rot.tilde_k, scale * v);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R4Checkpoint {
    pub n: usize,
    pub mean_r4: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct R4Probe {
    pub checkpoints: Vec<R4Checkpoint>,
    /// Largest empirical `E R(n)⁴` over the checkpoints.
    pub max_mean_r4: f64,
    /// The product bound at the final step.
    pub bound: f64,
}

impl R4Probe {
    /// Largest `mean / bound` over the checkpoints.
    pub fn worst_ratio(&self) -> f64 {
        self.checkpoints
            .iter()
            .map(|c| c.mean_r4 / c.bound)
            .fold(0.0, f64::max)
    }
}

/// `log Π_{m<n} (1 + 3β'² m^{-2α} + β'⁴ m^{-4α})` with `β' = κ s / sin k̃`.
pub fn r4_log_bound(model: &RandomModel, lambda: f64, n: usize) -> Result<f64> {
    let rot = rotation(lambda, model.coupling_a)?;
    let b2 = (model.kappa * rot.s / rot.sin_tilde_k).powi(2);
    Ok((1..n)
        .map(|m| {
            let x = b2 * (m as f64).powf(-2.0 * model.alpha_exp);
            (3.0 * x + x * x).ln_1p()
        })
        .sum())
}

/// Empirical `E R(n)⁴` over realizations `0..trials` against the product
/// bound, at powers of ten and at `n_steps`.
pub fn r4_moment_probe(
    model: &RandomModel,
    lambda: f64,
    n_steps: usize,
    trials: usize,
) -> Result<R4Probe> {
    if trials == 0 {
        return Err(Error::invalid("trials", "need trials >= 1"));
    }
    if n_steps < 2 {
        return Err(Error::invalid("n_steps", "need n_steps >= 2"));
    }
    let mut ns: Vec<usize> = std::iter::successors(Some(10usize), |n| n.checked_mul(10))
        .take_while(|&n| n < n_steps)
        .collect();
    ns.push(n_steps);
    let mut sums = vec![0.0; ns.len()];
    for r in 0..trials as u64 {
        for (s, lr) in sums.iter_mut().zip(prufer_log_r2_at(model, lambda, &ns, r)?) {
            *s += (2.0 * lr).exp();
        }
    }
    let checkpoints = ns
        .iter()
        .zip(&sums)
        .map(|(&n, &s)| {
            Ok(R4Checkpoint {
                n,
                mean_r4: s / trials as f64,
                bound: r4_log_bound(model, lambda, n)?.exp(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_mean_r4 = checkpoints.iter().map(|c| c.mean_r4).fold(0.0, f64::max);
    let bound = checkpoints.last().unwrap().bound;
    Ok(R4Probe {
        checkpoints,
        max_mean_r4,
        bound,
    })
}

/// `W(n) = s(λ) V_ω(n)`, `n = 1..=n_max`, and `E = -γ(λ)`, so that
/// `-u(n+1) - u(n-1) + W(n) u(n) = E u(n)` is the comb's recurrence.
pub fn subordination_inputs(
    model: &RandomModel,
    lambda: f64,
    n_max: usize,
    realization: u64,
) -> (Vec<f64>, f64) {
    let s = coupling_factor(lambda);
    let w = model.couplings(realization).take(n_max).map(|v| s * v).collect();
    (w, -discriminant(lambda, model.coupling_a))
}

/// `‖u‖_L² = Σ_{n ≤ [L]} u(n)² + (L - [L]) u([L]+1)²`; `u[0]` holds `u(1)`.
pub fn l_norm_sq(u: &[f64], l: f64) -> Result<f64> {
    let whole = l.floor();
    if !(l >= 0.0) || whole as usize + usize::from(l > whole) > u.len() {
        return Err(Error::OutOfWindow {
            index: whole as i64 + 1,
            lo: 1,
            hi: u.len() as i64,
        });
    }
    let m = whole as usize;
    let head: f64 = u[..m].iter().map(|x| x * x).sum();
    let tail = if l > whole { (l - whole) * u[m] * u[m] } else { 0.0 };
    Ok(head + tail)
}

/// `min ‖v‖_L / ‖u_⊥‖_L` over solutions of `-u(n+1) - u(n-1) + W(n) u(n) = E u(n)`.
///
/// Solutions are identified with their initial data `(u(0), u(1))`; `v` ranges
/// over unit initial data and `u_⊥` has the orthogonal initial data. The value
/// is `σ_min / σ_max` of the `‖·‖_L` Gram form in any orthonormal basis of
/// initial data. The basis is built from the solution with
/// `(v([L]), v([L]+1)) = (cos θ_init, sin θ_init)`, run backwards where it is
/// stable, and its forward-run orthogonal partner; `θ_init` only changes the
/// basis, not the result.
pub fn subordination_ratio(w: &[f64], energy: f64, l: f64, theta_init: f64) -> Result<f64> {
    if !(l >= 1.0 && l.is_finite()) {
        return Err(Error::invalid("L", format!("need L >= 1, got {l}")));
    }
    let whole = l.floor() as usize;
    if whole > w.len() {
        return Err(Error::OutOfWindow {
            index: whole as i64,
            lo: 1,
            hi: w.len() as i64,
        });
    }
    let f = |n: usize| w[n - 1] - energy;
    // backward: v(n-1) = f(n) v(n) - v(n+1)
    let top = whole + 1;
    let mut v = vec![0.0; top + 1];
    (v[whole], v[top]) = theta_init.sin_cos();
    for n in (1..=whole).rev() {
        v[n - 1] = f(n) * v[n] - v[n + 1];
        if v[n - 1].abs() > 1e100 {
            v[n - 1..].iter_mut().for_each(|x| *x *= 1e-100);
        }
    }
    let norm = v[0].hypot(v[1]);
    v.iter_mut().for_each(|x| *x /= norm);

    // forward partner with initial data (-v(1), v(0)), rows fed to a Givens QR
    let (mut prev, mut cur) = (-v[1], v[0]);
    let mut scale = 1.0;
    let (mut r11, mut r12, mut r22) = (0.0f64, 0.0f64, 0.0f64);
    let frac = l - l.floor();
    for n in 1..=top {
        let weight = if n <= whole { 1.0 } else { frac };
        if weight > 0.0 {
            let sw = weight.sqrt();
            let (a, b) = (sw * scale * v[n], sw * cur);
            let r = r11.hypot(a);
            if r > 0.0 {
                let (c, s) = (r11 / r, a / r);
                let b2 = c * b - s * r12;
                r12 = c * r12 + s * b;
                r11 = r;
                r22 = r22.hypot(b2);
            } else {
                r22 = r22.hypot(b);
            }
        }
        if n == top {
            break;
        }
        let next = f(n) * cur - prev;
        prev = cur;
        cur = next;
        if cur.abs() > 1e100 {
            // rescale every column together so the ratio is unchanged
            prev *= 1e-100;
            cur *= 1e-100;
            scale *= 1e-100;
            r11 *= 1e-100;
            r12 *= 1e-100;
            r22 *= 1e-100;
        }
    }
    let frob = r11 * r11 + r12 * r12 + r22 * r22;
    let det = (r11 * r22).abs();
    let s_max2 = 0.5 * (frob + (frob * frob - 4.0 * det * det).max(0.0).sqrt());
    if !(s_max2 > 0.0 && s_max2.is_finite()) {
        return Err(Error::Numerical {
            location: l,
            reason: "degenerate Gram form".into(),
        });
    }
    Ok(det / s_max2)
}

/// Least-squares slope of `y` against `x` with an intercept.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("x/y", "need two equally long series of length >= 2"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("x", "all abscissae coincide"));
    }
    Ok(sxy / sxx)
}

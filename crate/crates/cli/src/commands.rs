use std::f64::consts::PI;
use std::path::PathBuf;

use deltacomb::bounds::{
    bs_crossings, halfline_eigenvalues, lieb_thirring_p, lieb_thirring_sqrt, shifted_riesz_means,
};
use deltacomb::determinant::{line_bound_states, line_zeros, perturbation_det};
use deltacomb::jost::{jost_solve, m_function};
use deltacomb::random_spectra::{
    band_edges, classify_point, decay_exponent, dispersion_point, k_region, prufer_flow,
    prufer_log_r2_at, r4_moment_probe, spectral_gaps, SpectralClass,
};
use deltacomb::trace_entropy::{
    empirical_constant, node_values, semicontinuity_probe, trace_inequality_report, WeightPoly,
};
use deltacomb::{Potential, RandomModel, Wavenumber};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::config::{self, Config};
use crate::error::CliError;
use crate::output::{num, opt, OutDir};
use crate::svg::{self, Series, Style};

pub struct Ctx {
    pub cfg: Config,
    /// Directory of the config file; relative potential paths resolve here.
    pub base: PathBuf,
    pub out: OutDir,
    pub seed_override: Option<u64>,
}

impl Ctx {
    fn seed(&self, section: Option<u64>) -> u64 {
        self.seed_override.or(section).or(self.cfg.seed).unwrap_or(0)
    }
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::precondition(msg()))
    }
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

/// Attractive potential with support length in `1..=max_support` and values
/// in `[-amplitude, 0)`, from ChaCha20 stream `instance` keyed by `seed`.
fn random_attractive(seed: u64, instance: u64, max_support: usize, amplitude: f64) -> Potential {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(instance);
    let len = rng.gen_range(1..=max_support);
    let values = (0..len).map(|_| -rng.gen_range(0.0..amplitude)).collect();
    Potential::from_values(values).expect("finite values")
}

pub fn spectrum(ctx: &Ctx) -> Result<(), CliError> {
    let c = config::section(&ctx.cfg.spectrum, "spectrum")?;
    let v = c.potential().load("spectrum", &ctx.base)?;
    require(c.points >= 1, || "[spectrum] points must be >= 1".into())?;
    require(c.e_min > 0.0 && c.e_max >= c.e_min && c.e_max.is_finite(), || {
        format!("[spectrum] need 0 < e_min <= e_max, got [{}, {}]", c.e_min, c.e_max)
    })?;
    let energies = grid(c.e_min, c.e_max, c.points);
    for (i, &e) in energies.iter().enumerate() {
        require(Wavenumber::real(e.sqrt()).is_real_regular(), || {
            format!("[spectrum] grid point {i} (E = {e}) has sqrt(E) within the resonance guard of a multiple of pi")
        })?;
    }

    let rows = energies
        .par_iter()
        .map(|&e| {
            let k = Wavenumber::real(e.sqrt());
            let m = m_function(&v, k)?;
            let sol = jost_solve(&v, k)?;
            Ok([k.value().re, e, m.re, m.im, m.im / PI, sol.a().norm(), sol.b().norm()])
        })
        .collect::<Result<Vec<_>, deltacomb::Error>>()?;

    let csv: Vec<Vec<String>> = rows.iter().map(|r| r.iter().copied().map(num).collect()).collect();
    ctx.out.csv("spectrum.csv", &["k", "E", "Re_M", "Im_M", "f", "abs_a", "abs_b"], &csv)?;
    let plot = svg::plot(
        "Spectral density",
        "E",
        "f(E) = Im M / pi",
        &[Series {
            label: "f".into(),
            color: "#1f77b4",
            style: Style::Line,
            points: rows.iter().map(|r| (r[1], r[4])).collect(),
        }],
    );
    ctx.out.text("spectrum.svg", &plot)
}

fn eigen_rows(energies: &[f64]) -> Vec<Vec<String>> {
    energies
        .iter()
        .enumerate()
        .map(|(j, &e)| vec![(j + 1).to_string(), num(e), num((-e).sqrt())])
        .collect()
}

/// One `p,sum_Ep,bound,margin` row; a hypothesis violation gives `NaN`
/// bound and margin, with the reason on stderr.
fn lt_row(v: &Potential, p: f64, tag: &str) -> Result<Vec<String>, CliError> {
    if p == 0.5 {
        let r = lieb_thirring_sqrt(v)?;
        return Ok(vec![num(p), num(r.sum_sqrt_e), num(r.half_l1), num(r.margin())]);
    }
    match lieb_thirring_p(v, p) {
        Ok(r) => Ok(vec![num(p), num(r.sum_ep), num(r.bound), num(r.margin())]),
        Err(deltacomb::Error::InvalidArgument { name: "V", reason }) => {
            eprintln!("{tag}p = {p}: hypothesis not met ({reason}); bound skipped");
            let sum: f64 = line_bound_states(v, None)?.iter().map(|e| e.abs().powf(p)).sum();
            Ok(vec![num(p), num(sum), num(f64::NAN), num(f64::NAN)])
        }
        Err(e) => Err(e.into()),
    }
}

fn check_p_values(section: &str, ps: &[f64]) -> Result<(), CliError> {
    for &p in ps {
        require(p >= 0.5 && p.is_finite(), || format!("[{section}] p_values: need p >= 1/2, got {p}"))?;
    }
    Ok(())
}

pub fn bound_states(ctx: &Ctx) -> Result<(), CliError> {
    let c = config::section(&ctx.cfg.bound_states, "bound-states")?;
    let v = c.potential().load("bound-states", &ctx.base)?;
    check_p_values("bound-states", &c.p_values)?;
    if let Some(e) = c.eps_max {
        require(e > 0.0 && e.is_finite(), || format!("[bound-states] eps_max must be > 0, got {e}"))?;
    }
    for &g in &c.riesz_gammas {
        require(g > 0.0 && g.is_finite(), || format!("[bound-states] riesz_gammas: need gamma > 0, got {g}"))?;
    }

    let line = line_bound_states(&v, c.eps_max)?;
    let half = halfline_eigenvalues(&v, c.eps_max)?;
    let header = ["j", "E_j", "eps_j"];
    ctx.out.csv("eigenvalues_line.csv", &header, &eigen_rows(&line))?;
    ctx.out.csv("eigenvalues_halfline.csv", &header, &eigen_rows(&half))?;

    let mut ps = vec![0.5];
    ps.extend(c.p_values.iter().copied().filter(|&p| p != 0.5));
    let rows = ps.iter().map(|&p| lt_row(&v, p, "")).collect::<Result<Vec<_>, _>>()?;
    ctx.out.csv("lt_bounds.csv", &["p", "sum_Ep", "bound", "margin"], &rows)?;

    if !c.riesz_gammas.is_empty() {
        let mut rows = Vec::new();
        for &g in &c.riesz_gammas {
            match shifted_riesz_means(&v, g) {
                Ok(r) => rows.push(vec![num(g), num(r.lhs), num(r.rhs), num(r.rhs - r.lhs)]),
                Err(deltacomb::Error::InvalidArgument { name: "V", reason }) => {
                    eprintln!("gamma = {g}: hypothesis not met ({reason}); bound skipped");
                    rows.push(vec![num(g), num(f64::NAN), num(f64::NAN), num(f64::NAN)]);
                }
                Err(e) => return Err(e.into()),
            }
        }
        ctx.out.csv("riesz_means.csv", &["gamma", "lhs", "rhs", "margin"], &rows)?;
    }

    let mut series = vec![Series {
        label: "whole line".into(),
        color: "#1f77b4",
        style: Style::Markers,
        points: line.iter().enumerate().map(|(j, &e)| ((j + 1) as f64, e)).collect(),
    }];
    if !half.is_empty() {
        series.push(Series {
            label: "half line".into(),
            color: "#d62728",
            style: Style::Markers,
            points: half.iter().enumerate().map(|(j, &e)| ((j + 1) as f64, e)).collect(),
        });
    }
    ctx.out.text("bound_states.svg", &svg::plot("Bound states", "j", "E_j", &series))
}

pub fn lt_check(ctx: &Ctx) -> Result<(), CliError> {
    let c = config::section(&ctx.cfg.lt_check, "lt-check")?;
    require(c.instances >= 1, || "[lt-check] instances must be >= 1".into())?;
    require(c.max_support >= 1, || "[lt-check] max_support must be >= 1".into())?;
    require(c.amplitude > 0.0 && c.amplitude.is_finite(), || {
        format!("[lt-check] amplitude must be > 0, got {}", c.amplitude)
    })?;
    check_p_values("lt-check", &c.p_values)?;
    let seed = ctx.seed(c.seed);

    let mut ps = vec![0.5];
    ps.extend(c.p_values.iter().copied().filter(|&p| p != 0.5));

    let per_instance = (0..c.instances as u64)
        .into_par_iter()
        .map(|i| {
            let v = random_attractive(seed, i, c.max_support, c.amplitude);
            let mut lt = Vec::new();
            for &p in &ps {
                let mut row = vec![i.to_string()];
                row.extend(lt_row(&v, p, &format!("instance {i}: "))?);
                lt.push(row);
            }
            let bs = bs_crossings(&v)?;
            let det = line_zeros(&v, None)?;
            let bs_rows = (0..bs.len().max(det.len()))
                .map(|j| {
                    let (a, b) = (bs.get(j).copied(), det.get(j).copied());
                    let diff = a.zip(b).map(|(a, b)| (a - b).abs());
                    vec![i.to_string(), (j + 1).to_string(), opt(a), opt(b), opt(diff)]
                })
                .collect::<Vec<_>>();
            Ok((lt, bs_rows))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let (lt, bs): (Vec<_>, Vec<_>) = per_instance.into_iter().unzip();
    let lt: Vec<_> = lt.into_iter().flatten().collect();
    let bs: Vec<_> = bs.into_iter().flatten().collect();
    ctx.out.csv("lt_check.csv", &["instance", "p", "sum_Ep", "bound", "margin"], &lt)?;
    ctx.out.csv("bs_check.csv", &["instance", "j", "eps_bs", "eps_det", "abs_diff"], &bs)
}

pub fn trace_ineq(ctx: &Ctx) -> Result<(), CliError> {
    let c = config::section(&ctx.cfg.trace_ineq, "trace-ineq")?;
    let w = WeightPoly::new(c.alpha, c.beta)
        .map_err(|e| CliError::precondition(format!("[trace-ineq] alpha/beta: {e}")))?;
    require(c.n_quad >= 1, || "[trace-ineq] n_quad must be >= 1".into())?;
    let summary_header = ["z", "fourier_term", "det4_residual", "empirical_C"];

    if let Some(n) = c.ensemble {
        require(n >= 1, || "[trace-ineq] ensemble must be >= 1".into())?;
        require(c.max_support >= 1, || "[trace-ineq] max_support must be >= 1".into())?;
        require(c.amplitude > 0.0 && c.amplitude.is_finite(), || {
            format!("[trace-ineq] amplitude must be > 0, got {}", c.amplitude)
        })?;
        if c.potential().is_given() {
            return Err(CliError::config("[trace-ineq]: ensemble and a potential are mutually exclusive"));
        }
        let seed = ctx.seed(c.seed);
        let ensemble: Vec<Potential> = (0..n as u64)
            .map(|i| random_attractive(seed, i, c.max_support, c.amplitude))
            .collect();
        let reports = ensemble
            .par_iter()
            .map(|v| trace_inequality_report(v, &w))
            .collect::<Result<Vec<_>, _>>()?;
        let big_c = empirical_constant(&ensemble, &w)?;
        let rows: Vec<Vec<String>> = reports
            .iter()
            .map(|r| vec![num(r.z), num(r.fourier_term), num(r.det4_residual), num(big_c)])
            .collect();
        return ctx.out.csv("trace_summary.csv", &summary_header, &rows);
    }

    let v = c.potential().load("trace-ineq", &ctx.base)?;
    let nodes = node_values(&v, &w, c.n_quad)?;
    let node_rows: Vec<Vec<String>> = nodes
        .iter()
        .map(|n| vec![num(n.k), num(n.im_m), num(n.log_ratio), num(n.p_k)])
        .collect();
    ctx.out.csv("trace_nodes.csv", &["k", "ImM", "log_ratio", "p_k"], &node_rows)?;

    let r = trace_inequality_report(&v, &w)?;
    let row = vec![num(r.z), num(r.fourier_term), num(r.det4_residual), String::new()];
    ctx.out.csv("trace_summary.csv", &summary_header, &[row])?;

    if let Some(cuts) = &c.cuts {
        let probe = semicontinuity_probe(&v, &w, cuts)?;
        let end = v.support_end();
        let rows: Vec<Vec<String>> = probe
            .rows
            .iter()
            .map(|&(n, z)| {
                let large = n >= end;
                let flag = if !large {
                    ""
                } else if probe.z_full <= z + 1e-6 {
                    "true"
                } else {
                    "false"
                };
                vec![n.to_string(), num(z), num(probe.z_full), flag.to_string()]
            })
            .collect();
        ctx.out.csv("truncation.csv", &["n_cut", "z_cut", "z_full", "z_full_le_z_cut"], &rows)?;
    }
    Ok(())
}

fn class_color(c: SpectralClass) -> &'static str {
    match c {
        SpectralClass::Outside => "#dddddd",
        SpectralClass::PurePoint => "#d62728",
        SpectralClass::SingularContinuous => "#2ca02c",
        SpectralClass::AbsolutelyContinuous => "#1f77b4",
        SpectralClass::Boundary => "#000000",
    }
}

fn model_fields(section: &str, kappa: f64, alpha_exp: f64, a: f64) -> Result<(), CliError> {
    require(kappa >= 0.0 && kappa.is_finite(), || format!("[{section}] kappa must be >= 0, got {kappa}"))?;
    require(alpha_exp > 0.0 && alpha_exp.is_finite(), || {
        format!("[{section}] alpha_exp must be > 0, got {alpha_exp}")
    })?;
    require(a.is_finite(), || format!("[{section}] coupling_a must be finite"))
}

pub fn phase_diagram(ctx: &Ctx) -> Result<(), CliError> {
    let c = config::section(&ctx.cfg.phase_diagram, "phase-diagram")?;
    model_fields("phase-diagram", c.kappa, c.alpha_exp, c.coupling_a)?;
    require(c.points >= 1, || "[phase-diagram] points must be >= 1".into())?;
    require(c.lambda_max >= c.lambda_min && c.lambda_min.is_finite() && c.lambda_max.is_finite(), || {
        format!("[phase-diagram] need lambda_min <= lambda_max, got [{}, {}]", c.lambda_min, c.lambda_max)
    })?;

    let lambdas = grid(c.lambda_min, c.lambda_max, c.points);
    let points: Vec<_> = lambdas
        .par_iter()
        .map(|&l| {
            let d = dispersion_point(l, c.coupling_a);
            let p = decay_exponent(l, c.coupling_a, c.kappa).ok();
            let class = classify_point(l, c.coupling_a, c.kappa, c.alpha_exp);
            (l, d, p, class)
        })
        .collect();

    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|(l, d, p, class)| {
            vec![num(*l), num(d.gamma), opt(d.tilde_k), opt(*p), class.label().to_string()]
        })
        .collect();
    ctx.out.csv("phase_diagram.csv", &["lambda", "gamma", "tilde_k", "p", "class"], &rows)?;

    let half = if lambdas.len() > 1 { 0.5 * (lambdas[1] - lambdas[0]) } else { 0.5 };
    let segments: Vec<(f64, f64, &str)> = points
        .iter()
        .map(|(l, _, _, class)| (l - half, l + half, class_color(*class)))
        .collect();
    let legend = [
        SpectralClass::PurePoint,
        SpectralClass::SingularContinuous,
        SpectralClass::AbsolutelyContinuous,
        SpectralClass::Boundary,
        SpectralClass::Outside,
    ]
    .map(|s| (s.label(), class_color(s)));
    let title = format!(
        "Spectral type: kappa = {}, alpha = {}, a = {}",
        c.kappa, c.alpha_exp, c.coupling_a
    );
    let plot = svg::strip(
        &title,
        "lambda",
        (c.lambda_min - half, c.lambda_max + half),
        &segments,
        &legend,
    );
    ctx.out.text("phase_diagram.svg", &plot)
}

pub fn prufer(ctx: &Ctx) -> Result<(), CliError> {
    let c = config::section(&ctx.cfg.prufer, "prufer")?;
    model_fields("prufer", c.kappa, c.alpha_exp, c.coupling_a)?;
    require(c.n_steps >= 2, || format!("[prufer] n_steps must be >= 2, got {}", c.n_steps))?;
    require(c.trials >= 1, || "[prufer] trials must be >= 1".into())?;
    require(c.record_every >= 1, || "[prufer] record_every must be >= 1".into())?;
    require(c.dump_trajectories <= c.trials, || {
        format!("[prufer] dump_trajectories ({}) exceeds trials ({})", c.dump_trajectories, c.trials)
    })?;
    let seed = ctx.seed(c.seed);
    let model = RandomModel::new(c.kappa, c.alpha_exp, c.coupling_a, seed)?;
    let d = dispersion_point(c.lambda, c.coupling_a);
    require(c.lambda > 0.0 && d.gamma.abs() < 2.0, || {
        format!("[prufer] lambda = {} is not strictly inside a band (gamma = {})", c.lambda, d.gamma)
    })?;

    (0..c.dump_trajectories as u64)
        .into_par_iter()
        .map(|r| {
            let t = prufer_flow(&model, c.lambda, c.n_steps, r)?;
            let rows: Vec<Vec<String>> = (0..t.len())
                .filter(|&i| i % c.record_every == 0 || i + 1 == t.len())
                .map(|i| vec![(i + 1).to_string(), num(t.log_r2[i]), num(t.theta[i])])
                .collect();
            ctx.out.csv(&format!("trajectory_{r}.csv"), &["n", "logR2", "theta"], &rows)
        })
        .collect::<Result<Vec<()>, CliError>>()?;

    let mut checkpoints: Vec<usize> = std::iter::successors(Some(10usize), |n| n.checked_mul(10))
        .take_while(|&n| n < c.n_steps)
        .collect();
    checkpoints.push(c.n_steps);
    let per_trial = (0..c.trials as u64)
        .into_par_iter()
        .map(|r| prufer_log_r2_at(&model, c.lambda, &checkpoints, r))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Vec<String>> = checkpoints
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let mean = per_trial.iter().map(|t| t[i]).sum::<f64>() / c.trials as f64;
            vec![n.to_string(), num(mean), num(mean / (n as f64).ln())]
        })
        .collect();
    ctx.out.csv("prufer_summary.csv", &["n", "mean_logR2", "mean_logR2_over_log_n"], &rows)?;

    if c.r4 {
        let probe = r4_moment_probe(&model, c.lambda, c.n_steps, c.trials)?;
        let rows: Vec<Vec<String>> = probe
            .checkpoints
            .iter()
            .map(|p| vec![p.n.to_string(), num(p.mean_r4), num(p.bound)])
            .collect();
        ctx.out.csv("r4_moments.csv", &["n", "mean_R4", "bound"], &rows)?;
    }
    Ok(())
}

pub fn band_edges_cmd(ctx: &Ctx) -> Result<(), CliError> {
    let c = config::section(&ctx.cfg.band_edges, "band-edges")?;
    let bands = band_edges(c.coupling_a, c.lambda_max)
        .map_err(|e| CliError::precondition(format!("[band-edges] {e}")))?;
    let gaps = spectral_gaps(&bands);
    let mut rows: Vec<Vec<String>> = Vec::new();
    rows.extend(bands.iter().map(|b| vec!["band".into(), num(b.lo), num(b.hi)]));
    rows.extend(gaps.iter().map(|g| vec!["gap".into(), num(g.lo), num(g.hi)]));
    match (c.k_alpha, c.k_beta) {
        (Some(alpha), Some(beta)) => {
            let region = k_region(c.coupling_a, alpha, beta, c.lambda_max)
                .map_err(|e| CliError::precondition(format!("[band-edges] {e}")))?;
            rows.extend(region.iter().map(|r| vec!["k_region".into(), num(r.lo), num(r.hi)]));
        }
        (None, None) => {}
        _ => return Err(CliError::config("[band-edges]: k_alpha and k_beta go together")),
    }
    ctx.out.csv("band_edges.csv", &["kind", "lo", "hi"], &rows)
}

pub fn det_compare(ctx: &Ctx) -> Result<(), CliError> {
    let c = config::section(&ctx.cfg.det_compare, "det-compare")?;
    let v = c.potential().load("det-compare", &ctx.base)?;
    require(!c.k_points.is_empty(), || "[det-compare] k_points is empty".into())?;
    for (i, &[re, im]) in c.k_points.iter().enumerate() {
        let k = Wavenumber::new(re, im);
        require(re.is_finite() && im >= 0.0 && k.is_nonresonant(), || {
            format!("[det-compare] k_points[{i}] = {re}{im:+}i must lie in the closed upper half-plane away from pi*Z")
        })?;
    }

    let rows = c
        .k_points
        .par_iter()
        .map(|&[re, im]| {
            let k = Wavenumber::new(re, im);
            let a = jost_solve(&v, k)?.a();
            let l = perturbation_det(&v, k)?;
            let rel = (a - l).norm() / a.norm().max(l.norm());
            let unitarity = if im == 0.0 {
                let sol = jost_solve(&v, k)?;
                Some(sol.a().norm_sqr() - sol.b().norm_sqr() - 1.0)
            } else {
                None
            };
            Ok(vec![
                num(re),
                num(im),
                num(a.re),
                num(a.im),
                num(l.re),
                num(l.im),
                num(rel),
                opt(unitarity),
            ])
        })
        .collect::<Result<Vec<_>, deltacomb::Error>>()?;
    ctx.out.csv(
        "det_compare.csv",
        &["re_k", "im_k", "re_a", "im_a", "re_L", "im_L", "rel_diff", "unitarity"],
        &rows,
    )
}

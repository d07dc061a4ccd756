//! Coupling sequences `V(n)` on the positive integers.
//!
//! A [`Potential`] is stored densely over `first_index..=last_index`; sites
//! outside that range (and every `n ≤ 0`) carry zero coupling.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    first_index: usize,
    values: Vec<f64>,
}

impl Potential {
    pub fn new(first_index: usize, values: Vec<f64>) -> Result<Self> {
        if first_index == 0 {
            return Err(Error::invalid("first_index", "sites start at n = 1"));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "values",
                format!("non-finite coupling at n = {}", first_index + bad),
            ));
        }
        Ok(Self {
            first_index,
            values,
        })
    }

    pub fn zero() -> Self {
        Self {
            first_index: 1,
            values: Vec::new(),
        }
    }

    /// Potential starting at `n = 1`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(1, values)
    }

    /// Builds a potential from `(n, V(n))` pairs with strictly increasing `n`.
    pub fn from_pairs(pairs: &[(usize, f64)]) -> Result<Self> {
        let Some(&(first, _)) = pairs.first() else {
            return Ok(Self::zero());
        };
        for w in pairs.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::invalid(
                    "pairs",
                    format!("indices must increase strictly ({} after {})", w[1].0, w[0].0),
                ));
            }
        }
        let last = pairs[pairs.len() - 1].0;
        let mut values = vec![0.0; last - first + 1];
        for &(n, v) in pairs {
            values[n - first] = v;
        }
        Self::new(first, values)
    }

    pub fn first_index(&self) -> usize {
        self.first_index
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `V(n)` for any integer `n`, zero off the stored range.
    pub fn get(&self, n: i64) -> f64 {
        if n < self.first_index as i64 {
            return 0.0;
        }
        self.values
            .get((n - self.first_index as i64) as usize)
            .copied()
            .unwrap_or(0.0)
    }

    /// Nonzero sites in increasing order.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(move |(i, &v)| (self.first_index + i, v))
    }

    /// Largest `n` with `V(n) ≠ 0`, or 0 for the zero potential.
    pub fn support_end(&self) -> usize {
        self.support().last().map_or(0, |(n, _)| n)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `Σ_n e^{2ikn} V(n)`, the Fourier sum evaluated at `2k`; π-periodic in `k`.
    pub fn fourier_hat(&self, k: f64) -> Complex64 {
        self.support()
            .map(|(n, v)| Complex64::from_polar(v, 2.0 * k * n as f64))
            .sum()
    }

    /// `ℓ^p` norm; `p = f64::INFINITY` gives the sup norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::invalid("p", format!("need p >= 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.values.iter().fold(0.0, |m, v| m.max(v.abs())));
        }
        let sum: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        Ok(sum.powf(1.0 / p))
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sum of `V(n)^j`.
    pub fn power_trace(&self, j: i32) -> f64 {
        self.values.iter().map(|v| v.powi(j)).sum()
    }

    /// `V_n(j) = V(j)` for `j ≤ n_cut`, zero beyond.
    pub fn truncate(&self, n_cut: usize) -> Self {
        if n_cut < self.first_index {
            return Self::zero();
        }
        let keep = (n_cut - self.first_index + 1).min(self.values.len());
        Self {
            first_index: self.first_index,
            values: self.values[..keep].to_vec(),
        }
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            first_index: self.first_index,
            values: self.values.iter().map(|v| t * v).collect(),
        }
    }

    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }

    /// `min(V, 0)`.
    pub fn attractive_part(&self) -> Self {
        Self {
            first_index: self.first_index,
            values: self.values.iter().map(|v| v.min(0.0)).collect(),
        }
    }

    /// Text form: one `n value` pair per line for every nonzero site.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (n, v) in self.support() {
            writeln!(out, "{n} {v:e}").unwrap();
        }
        out
    }
}

impl FromStr for Potential {
    type Err = Error;

    /// Parses `n value` lines; `#` starts a comment, blank lines are skipped.
    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(n), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("expected `n value`, got `{line}`"),
                });
            };
            let n: usize = n.parse().map_err(|_| Error::Parse {
                line: line_no,
                reason: format!("bad site index `{n}`"),
            })?;
            if n == 0 {
                return Err(Error::Parse {
                    line: line_no,
                    reason: "site indices start at 1".into(),
                });
            }
            let v: f64 = v.parse().map_err(|_| Error::Parse {
                line: line_no,
                reason: format!("bad coupling value `{v}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    reason: "coupling must be finite".into(),
                });
            }
            if let Some(&(prev, _)) = pairs.last() {
                if n <= prev {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: format!("index {n} does not increase (previous {prev})"),
                    });
                }
            }
            pairs.push((n, v));
        }
        Potential::from_pairs(&pairs)
    }
}

/// `V_ω(n) = κ ω_n n^{-α}` with `ω_n` i.i.d. uniform on `[-1, 1]`.
///
/// Realization `r` draws its `ω_n` in increasing `n` from ChaCha20 stream `r`
/// keyed by `seed`, so a longer window never changes earlier sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomModel {
    pub kappa: f64,
    pub alpha_exp: f64,
    pub coupling_a: f64,
    pub seed: u64,
}

impl RandomModel {
    pub fn new(kappa: f64, alpha_exp: f64, coupling_a: f64, seed: u64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::invalid("kappa", format!("need kappa >= 0, got {kappa}")));
        }
        if !(alpha_exp > 0.0 && alpha_exp.is_finite()) {
            return Err(Error::invalid(
                "alpha_exp",
                format!("need alpha_exp > 0, got {alpha_exp}"),
            ));
        }
        if !coupling_a.is_finite() {
            return Err(Error::invalid("coupling_a", "must be finite"));
        }
        Ok(Self {
            kappa,
            alpha_exp,
            coupling_a,
            seed,
        })
    }

    fn stream(&self, realization: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(realization);
        rng
    }

    /// The disorder variables `ω_1, …, ω_{n_max}` of one realization.
    pub fn omegas(&self, n_max: usize, realization: u64) -> Vec<f64> {
        let dist = Uniform::new_inclusive(-1.0, 1.0);
        let mut rng = self.stream(realization);
        (0..n_max).map(|_| dist.sample(&mut rng)).collect()
    }

    /// Lazily generated couplings `V_ω(1), V_ω(2), …` of one realization.
    pub fn couplings(&self, realization: u64) -> impl Iterator<Item = f64> {
        let dist = Uniform::new_inclusive(-1.0, 1.0);
        let mut rng = self.stream(realization);
        let (kappa, alpha) = (self.kappa, self.alpha_exp);
        (1..).map(move |n: u64| kappa * dist.sample(&mut rng) * (n as f64).powf(-alpha))
    }

    pub fn sample(&self, n_max: usize) -> Result<Potential> {
        self.sample_realization(n_max, 0)
    }

    pub fn sample_realization(&self, n_max: usize, realization: u64) -> Result<Potential> {
        if n_max == 0 {
            return Err(Error::invalid("n_max", "need n_max >= 1"));
        }
        Potential::from_values(self.couplings(realization).take(n_max).collect())
    }
}

//! Grid scan plus bisection for sign changes of a real function.

use crate::Result;

/// Bisection on `[a, b]` where `f(a)` and `f(b)` have opposite signs, down to
/// `|b - a| < tol`.
pub(crate) fn bisect(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<f64> {
    let mut fa = f(a)?;
    while (b - a).abs() > tol {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// All sign changes of `f` between consecutive grid points, each refined by
/// bisection. Grid points where `f` is exactly zero are returned as roots.
pub(crate) fn scan_roots(
    mut f: impl FnMut(f64) -> Result<f64>,
    grid: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    let values = grid.iter().map(|&x| f(x)).collect::<Result<Vec<f64>>>()?;
    let mut roots = Vec::new();
    for i in 0..grid.len() {
        if values[i] == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if i + 1 < grid.len() && values[i + 1] != 0.0 && (values[i] < 0.0) != (values[i + 1] < 0.0) {
            roots.push(bisect(&mut f, grid[i], grid[i + 1], tol)?);
        }
    }
    Ok(roots)
}

/// `n` equally spaced points on `(lo, hi]`.
pub(crate) fn open_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

//! Fixed-step classical Runge–Kutta integration for small dense systems.

use crate::error::{Error, Result};

/// One classical fourth-order step of `y' = f(x, y)`.
pub fn rk4_step<const N: usize, F>(f: &F, x: f64, y: &[f64; N], h: f64) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let k1 = f(x, y)?;
    let k2 = f(x + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = f(x + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = f(x + h, &axpy(y, h, &k3))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}

/// Grid `x0, x0 + h, …, x_end`; the last interval is shortened to land on
/// `x_end` exactly. A remainder below `1e-9·h` is merged into the last step.
pub fn grid(x0: f64, x_end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !(x_end > x0) {
        return Err(Error::InvalidArgument(format!(
            "end {x_end} must exceed start {x0}"
        )));
    }
    let span = x_end - x0;
    let full = (span / step).floor();
    let mut n = full as usize;
    let rem = span - full * step;
    if rem > 1e-9 * step {
        n += 1;
    }
    let n = n.max(1);
    let mut xs: Vec<f64> = (0..n).map(|i| x0 + i as f64 * step).collect();
    xs.push(x_end);
    Ok(xs)
}

/// Integrates over `grid`, returning the state at every grid point.
pub fn integrate<const N: usize, F>(f: F, xs: &[f64], y0: [f64; N]) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut out = Vec::with_capacity(xs.len());
    let mut y = y0;
    out.push(y);
    for w in xs.windows(2) {
        y = rk4_step(&f, w[0], &y, w[1] - w[0])?;
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_ends_exactly() {
        let xs = grid(0.0, 1.05, 0.1).unwrap();
        assert_eq!(xs.len(), 12);
        assert_eq!(*xs.last().unwrap(), 1.05);
        let xs = grid(0.0, 1.0, 0.1).unwrap();
        assert_eq!(xs.len(), 11);
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(grid(0.0, 1.0, 0.0).is_err());
        assert!(grid(1.0, 1.0, 0.1).is_err());
        assert!(grid(0.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn exponential_decay_is_fourth_order() {
        let f = |_x: f64, y: &[f64; 1]| Ok([-y[0]]);
        let err = |h: f64| {
            let xs = grid(0.0, 2.0, h).unwrap();
            let ys = integrate(f, &xs, [1.0]).unwrap();
            (ys.last().unwrap()[0] - (-2.0f64).exp()).abs()
        };
        let ratio = err(0.2) / err(0.1);
        assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
    }
}

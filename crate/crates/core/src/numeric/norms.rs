use super::distributions::stft;
use super::grid::GridFunction;
use crate::error::{Error, Result};

fn check_exponent(p: f64) -> Result<()> {
    if p > 0.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!("exponent must be in (0, ∞], got {p}")))
    }
}

fn power_sum(values: impl Iterator<Item = f64>, p: f64, weight: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        (values.map(|v| v.powf(p)).sum::<f64>() * weight).powf(1.0 / p)
    }
}

/// Riemann-sum `‖f‖_p`; `p = ∞` is the largest sample modulus.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(power_sum(f.values().iter().map(|v| v.norm()), p, f.grid().cell_volume()))
}

/// `‖y ↦ ‖F(·, y)‖_p‖_q` with the inner norm over the first `inner` axes.
pub fn lpq_norm_split(f: &GridFunction, inner: usize, p: f64, q: f64) -> Result<f64> {
    check_exponent(p)?;
    check_exponent(q)?;
    let grid = f.grid();
    let d = grid.dim();
    if inner == 0 || inner >= d {
        return Err(Error::Dimension(format!("inner block size {inner} invalid for a {d}-dimensional grid")));
    }
    let h = grid.step();
    let outer_len = grid.n().pow((d - inner) as u32);
    let inner_len = grid.n().pow(inner as u32);
    let inner_norms: Vec<f64> = (0..outer_len)
        .map(|y| power_sum((0..inner_len).map(|x| f.values()[x * outer_len + y].norm()), p, h.powi(inner as i32)))
        .collect();
    Ok(power_sum(inner_norms.into_iter(), q, h.powi((d - inner) as i32)))
}

/// Mixed norm of a function on `ℝ^{2d}`, inner norm over the first `d` variables.
pub fn lpq_norm(f: &GridFunction, p: f64, q: f64) -> Result<f64> {
    let d = f.grid().dim();
    if !d.is_multiple_of(2) {
        return Err(Error::Dimension(format!("mixed norm needs an even number of axes, got {d}")));
    }
    lpq_norm_split(f, d / 2, p, q)
}

/// Discrete modulation-space norm `‖V_g f‖_p`.
pub fn mp_norm(f: &GridFunction, window: &GridFunction, p: f64) -> Result<f64> {
    lp_norm(&stft(window, f)?, p)
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_HERMITE_NODES: usize = 128;
/// The orthonormal recurrence loses the outermost nodes to underflow beyond
/// this.
pub const MAX_HERMITE_NODES: usize = 160;

/// Nodes and weights of the `m`-point Gauss–Hermite rule for `∫ f(t) e^{-t²} dt`,
/// by Newton iteration on the orthonormal Hermite recurrence.
pub fn gauss_hermite(m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if m == 0 || m > MAX_HERMITE_NODES {
        return Err(Error::invalid(format!("node count {m} outside 1..={MAX_HERMITE_NODES}")));
    }
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mf = m as f64;
    let mut z = 0.0f64;
    for i in 0..m.div_ceil(2) {
        z = match i {
            0 => (2.0 * mf + 1.0).sqrt() - 1.855_75 * (2.0 * mf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * mf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 1..=m {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * mf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[m - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[m - 1 - i] = w[i];
    }
    Ok((x, w))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoshCheck {
    pub alpha: f64,
    pub z: f64,
    /// `E_{x∼N(0,1)}[cosh(αx + z)]` by Gauss–Hermite quadrature.
    pub quadrature: f64,
    /// `cosh(z)·e^{α²/2}`.
    pub closed_form: f64,
    pub relative_error: f64,
    pub nodes: usize,
}

pub fn cosh_expectation_check(alpha: f64, z: f64, nodes: usize) -> Result<CoshCheck> {
    if !(alpha.abs() <= 4.0) || !(z.abs() <= 10.0) {
        return Err(Error::invalid(format!("need |alpha| <= 4 and |z| <= 10, got {alpha}, {z}")));
    }
    if nodes < DEFAULT_HERMITE_NODES {
        return Err(Error::invalid(format!("at least {DEFAULT_HERMITE_NODES} nodes required")));
    }
    let (t, w) = gauss_hermite(nodes)?;
    let s2 = std::f64::consts::SQRT_2;
    let quadrature = t.iter().zip(&w).map(|(ti, wi)| wi * (alpha * s2 * ti + z).cosh()).sum::<f64>()
        / std::f64::consts::PI.sqrt();
    let closed_form = z.cosh() * (alpha * alpha / 2.0).exp();
    Ok(CoshCheck {
        alpha,
        z,
        quadrature,
        closed_form,
        relative_error: (quadrature - closed_form).abs() / closed_form,
        nodes,
    })
}

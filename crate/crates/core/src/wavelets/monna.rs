//! The Monna map carries 2-adic wavelets to Haar wavelets on the half-line.

use super::{Grid, WaveletIndex};
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Haar mother wavelet: 1 on `[0, 1/2)`, −1 on `[1/2, 1)`, 0 elsewhere.
pub fn haar(t: f64) -> f64 {
    if (0.0..0.5).contains(&t) {
        1.0
    } else if (0.5..1.0).contains(&t) {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonnaReport {
    pub samples: usize,
    pub max_deviation: f64,
}

/// Compares `ψ_{γn1}(x)` with `2^{-γ/2} h(2^{-γ} ρ(x) − ρ(n))` on every cell of the grid.
pub fn monna_conjugate_check(idx: &WaveletIndex, grid: Grid) -> Result<MonnaReport> {
    if grid.p != 2 || grid.d != 1 || idx.dim() != 1 {
        return Err(invalid("the Monna conjugation holds for p = 2 in one dimension"));
    }
    let rho_n = idx.n[0].monna(2);
    let amp = idx.amplitude(2);
    let mut max_deviation = 0.0f64;
    for c in 0..grid.len() {
        let x = grid.point(c);
        let psi = idx.eval_prat(2, &x)?;
        let t = x[0].monna();
        let h = amp * haar(2f64.powi(-idx.gamma) * t - rho_n);
        max_deviation = max_deviation.max((psi.re - h).abs()).max(psi.im.abs());
    }
    Ok(MonnaReport { samples: grid.len(), max_deviation })
}

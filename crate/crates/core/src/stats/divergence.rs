use super::density::{check_masses, Density};
use super::MASS_FLOOR;
use crate::error::{Error, Result};

/// `Σ_j (p_j/q_j − 1)² q_j` over aligned masses. Cells where both masses are
/// below [`MASS_FLOOR`] are skipped; `q_j` below the floor with `p_j` above
/// it violates absolute continuity.
fn pearson_masses(p: &[f64], q: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (j, (&pj, &qj)) in p.iter().zip(q).enumerate() {
        if qj < MASS_FLOOR {
            if pj < MASS_FLOOR {
                continue;
            }
            return Err(Error::AbsoluteContinuity(format!(
                "cell {j} has p = {pj:e} but q = {qj:e}"
            )));
        }
        let diff = pj - qj;
        total += diff * diff / qj;
    }
    Ok(total)
}

/// `Σ_j (p_j − q_j)² / (q_j + ε)` with `ε` = [`MASS_FLOOR`] added to both
/// grid densities. Kernel tails of two estimates with different bandwidths
/// can differ by many orders of magnitude far from the data, so no cell is
/// treated as a support violation.
fn pearson_grid(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&pj, &qj)| (pj - qj) * (pj - qj) / (qj + MASS_FLOOR))
        .sum()
}

/// Pearson (χ²) divergence `D_PE(p‖q)` between two densities on the same
/// grid or label set.
pub fn pearson_divergence_density(p: &Density, q: &Density) -> Result<f64> {
    match (p, q) {
        (Density::Degenerate, Density::Degenerate) => Ok(0.0),
        (
            Density::Gridded {
                lo: plo,
                hi: phi,
                masses: pm,
                ..
            },
            Density::Gridded {
                lo: qlo,
                hi: qhi,
                masses: qm,
                ..
            },
        ) => {
            if plo != qlo || phi != qhi || pm.len() != qm.len() {
                return Err(Error::DensityMismatch(format!(
                    "grids differ: [{plo}, {phi}]×{} vs [{qlo}, {qhi}]×{}",
                    pm.len(),
                    qm.len()
                )));
            }
            Ok(pearson_grid(pm, qm))
        }
        (
            Density::Pmf {
                labels: pl,
                masses: pm,
            },
            Density::Pmf {
                labels: ql,
                masses: qm,
            },
        ) => {
            if pl != ql {
                return Err(Error::DensityMismatch("label sets differ".into()));
            }
            pearson_masses(pm, qm)
        }
        _ => Err(Error::DensityMismatch("mixed density kinds".into())),
    }
}

/// Pearson divergence between two probability vectors; entries with
/// `beta_i = 0` must have `alpha_i = 0` and contribute nothing.
pub fn pearson_divergence_discrete(alpha: &[f64], beta: &[f64]) -> Result<f64> {
    if alpha.len() != beta.len() {
        return Err(Error::DensityMismatch(format!(
            "lengths differ: {} vs {}",
            alpha.len(),
            beta.len()
        )));
    }
    check_masses(alpha)?;
    check_masses(beta)?;
    let mut total = 0.0;
    for (i, (&a, &b)) in alpha.iter().zip(beta).enumerate() {
        if b == 0.0 {
            if a > 0.0 {
                return Err(Error::AbsoluteContinuity(format!(
                    "entry {i} has alpha = {a} but beta = 0"
                )));
            }
            continue;
        }
        let r = a / b - 1.0;
        total += r * r * b;
    }
    Ok(total)
}

use super::distribution::VARIANCE_FLOOR;
use super::{
    BayesianNetwork, ClgDistribution, CompoundVector, ConditionalDistribution, ModelError,
    MultinomialTable, ParentSetDag,
};

/// Ridge added to a singular continuous-parent covariance.
pub const RIDGE: f64 = 1e-8;

/// Pivots below this fraction of the raw second-moment scale count as zero.
const PIVOT_TOLERANCE: f64 = 1e-12;

/// Maximum likelihood parameters from averaged sufficient statistics
/// (`expected = Σ s(x_i) / n`).
///
/// Multinomial rows are normalized counts, with a uniform row for unseen
/// parent configurations. Each CLG configuration solves the normal equations
/// of a least-squares fit of the variable on its continuous parents; unseen
/// configurations fall back to α = 0, β = 0, σ² = 1.
pub fn moments_to_parameters(
    dag: &ParentSetDag,
    expected: &CompoundVector,
    n: u64,
) -> Result<BayesianNetwork, ModelError> {
    if n == 0 {
        return Err(ModelError::EmptySample);
    }
    let mut bn = BayesianNetwork::with_default_parameters(dag.clone())?;
    let skeleton = CompoundVector::zero_like(&bn);
    if !skeleton.same_skeleton(expected) {
        return Err(ModelError::SkeletonMismatch(format!(
            "network expects {:?}, statistics have {:?}",
            skeleton.skeleton(),
            expected.skeleton()
        )));
    }
    for (d, element) in bn.distributions_mut().iter_mut().zip(expected.elements()) {
        if element.local.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteMoment(d.main_var().name().to_string()));
        }
        match d {
            ConditionalDistribution::Multinomial(t) => fit_multinomial(t, &element.local)?,
            ConditionalDistribution::Clg(c) => fit_clg(c, &element.local)?,
        }
    }
    Ok(bn)
}

fn fit_multinomial(table: &mut MultinomialTable, moments: &[f64]) -> Result<(), ModelError> {
    let arity = table.arity();
    for (j, counts) in moments.chunks_exact(arity).enumerate() {
        let total: f64 = counts.iter().sum();
        if total > 0.0 {
            let row: Vec<f64> = counts.iter().map(|c| c / total).collect();
            table.set_row(j, &row)?;
        } else {
            table.set_row(j, &vec![1.0 / arity as f64; arity])?;
        }
    }
    Ok(())
}

fn fit_clg(clg: &mut ClgDistribution, moments: &[f64]) -> Result<(), ModelError> {
    let k = clg.continuous_parents().len();
    let block_len = moments.len() / clg.configs();
    for (j, block) in moments.chunks_exact(block_len).enumerate() {
        let weight = block[0];
        if weight <= 0.0 {
            clg.set_config(j, 0.0, &vec![0.0; k], 1.0)?;
            continue;
        }
        let z_mean: Vec<f64> = block[1..=k].iter().map(|v| v / weight).collect();
        let x_mean = block[1 + k] / weight;
        let xz_mean = &block[2 + k..2 + 2 * k];
        let xx_mean = block[2 + 2 * k] / weight;
        let zz_raw = &block[3 + 2 * k..];

        let mut cov_zz = vec![0.0; k * k];
        let mut scale = 1.0f64;
        let mut t = 0;
        for a in 0..k {
            for b in a..k {
                let raw = zz_raw[t] / weight;
                t += 1;
                let c = raw - z_mean[a] * z_mean[b];
                cov_zz[a * k + b] = c;
                cov_zz[b * k + a] = c;
                if a == b {
                    scale = scale.max(raw.abs());
                }
            }
        }
        let cov_zx: Vec<f64> = (0..k)
            .map(|a| xz_mean[a] / weight - z_mean[a] * x_mean)
            .collect();
        let var_x = xx_mean - x_mean * x_mean;

        let beta = match solve_spd(&cov_zz, &cov_zx, k, PIVOT_TOLERANCE * scale) {
            Some(beta) => beta,
            None => {
                let mut ridged = cov_zz.clone();
                for a in 0..k {
                    ridged[a * k + a] += RIDGE;
                }
                solve_spd(&ridged, &cov_zx, k, 0.0).ok_or_else(|| {
                    ModelError::NonFiniteMoment(clg.main_var().name().to_string())
                })?
            }
        };

        let intercept = x_mean - dot(&beta, &z_mean);
        let mut explained = 0.0;
        for a in 0..k {
            for b in 0..k {
                explained += beta[a] * cov_zz[a * k + b] * beta[b];
            }
        }
        let residual = var_x - 2.0 * dot(&beta, &cov_zx) + explained;
        let variance = if residual.is_finite() {
            residual.max(VARIANCE_FLOOR)
        } else {
            return Err(ModelError::NonFiniteMoment(clg.main_var().name().to_string()));
        };
        clg.set_config(j, intercept, &beta, variance)?;
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` for symmetric positive definite `A` (row-major, k×k) by
/// Cholesky factorisation. `None` when a pivot is not above `tolerance`.
fn solve_spd(a: &[f64], b: &[f64], k: usize, tolerance: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..=i {
            let mut s = a[i * k + j];
            for p in 0..j {
                s -= l[i * k + p] * l[j * k + p];
            }
            if i == j {
                if !(s > tolerance) {
                    return None;
                }
                l[i * k + i] = s.sqrt();
            } else {
                l[i * k + j] = s / l[j * k + j];
            }
        }
    }
    let mut y = vec![0.0; k];
    for i in 0..k {
        let mut s = b[i];
        for p in 0..i {
            s -= l[i * k + p] * y[p];
        }
        y[i] = s / l[i * k + i];
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = y[i];
        for p in i + 1..k {
            s -= l[p * k + i] * x[p];
        }
        x[i] = s / l[i * k + i];
    }
    Some(x)
}

//! Conditional autoregressive Wishart SPD series.
//!
//! `Y_t = chol(S_t) E_t chol(S_t)' / 10` with `E_t` iid Wishart(10, I) and
//! `S_t = C C' + rho A Y_{t-1} A' + rho B S_{t-1} B'`, where `A = 0.7 I`,
//! `B = 0.5 I`, `C = I`. Since `S_t` is `I` plus positive-semidefinite
//! terms, the Cholesky factor always exists and every output is SPD.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use super::{DgpFamily, DgpSpec};
use crate::error::Error;
use crate::objects::{linalg, SeriesData, SpdObject};
use crate::Result;

const WISHART_DF: f64 = 10.0;
const A_COEF: f64 = 0.7;
const B_COEF: f64 = 0.5;

pub(super) fn generate(spec: &DgpSpec, rng: &mut ChaCha8Rng) -> Result<SeriesData> {
    let DgpFamily::Caw { dim, rho } = &spec.family else {
        unreachable!("non-CAW family dispatched here")
    };
    let p = *dim;
    let n = spec.n;
    let burn = spec.burn_in();

    let mut identity = vec![0.0; p * p];
    for i in 0..p {
        identity[i * p + i] = 1.0;
    }

    let mut sigma = identity.clone();
    let mut y = vec![0.0; p * p];
    let mut out = Vec::with_capacity(n);
    for t in 0..burn + n {
        if t > 0 {
            // S_t = I + rho a^2 Y_{t-1} + rho b^2 S_{t-1}
            for idx in 0..p * p {
                sigma[idx] = identity[idx]
                    + rho * A_COEF * A_COEF * y[idx]
                    + rho * B_COEF * B_COEF * sigma[idx];
            }
        }
        let chol = linalg::cholesky_lower(&sigma, p)
            .map_err(|e| Error::InvalidConfig(format!("CAW scale matrix lost definiteness: {e}")))?;
        let eps = wishart_identity_scale(rng, p);
        let le = linalg::matmul(&chol, &eps, p);
        let mut lt = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                lt[i * p + j] = chol[j * p + i];
            }
        }
        let mut sample = linalg::matmul(&le, &lt, p);
        for v in &mut sample {
            *v *= 0.1;
        }
        // enforce exact symmetry against rounding in the two products
        for i in 0..p {
            for j in 0..i {
                let s = 0.5 * (sample[i * p + j] + sample[j * p + i]);
                sample[i * p + j] = s;
                sample[j * p + i] = s;
            }
        }
        y = sample.clone();
        if t >= burn {
            out.push(SpdObject::new(p, sample)?);
        }
    }
    Ok(SeriesData::Spds(out))
}

/// Wishart(df, I) draw via the Bartlett decomposition: `W = A A'` with
/// `A_ii^2 ~ chi^2(df - i)` (zero-based `i`) and standard normal entries
/// below the diagonal.
fn wishart_identity_scale(rng: &mut ChaCha8Rng, p: usize) -> Vec<f64> {
    let mut a = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            if i == j {
                let chi = ChiSquared::new(WISHART_DF - i as f64).expect("df > 0");
                a[i * p + i] = chi.sample(rng).sqrt();
            } else {
                a[i * p + j] = rng.sample(StandardNormal);
            }
        }
    }
    let mut at = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            at[i * p + j] = a[j * p + i];
        }
    }
    linalg::matmul(&a, &at, p)
}

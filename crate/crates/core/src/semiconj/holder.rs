use super::linalg::torus_dist;
use super::{Pt, SemiconjError, MAX_DIM};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const MIN_HOLDER_PAIRS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderEstimate {
    /// Least-squares slope of `log dist(h(x), h(y))` against `log dist(x, y)`.
    pub exponent: f64,
    pub pairs_used: usize,
    pub min_separation: f64,
    pub max_separation: f64,
}

/// Empirical Hölder exponent of `h = id + w` from random close pairs with
/// separations log-uniform in `[1e-5, 1e-2]`.
pub fn holder_exponent_estimate<W>(d: usize, w: W, pair_samples: usize, seed: u64) -> Result<HolderEstimate, SemiconjError>
where
    W: Fn(&Pt) -> Result<Pt, SemiconjError>,
{
    if d == 0 || d > MAX_DIM {
        return Err(SemiconjError::DimensionTooLarge { dim: d });
    }
    let (lo, hi) = (1e-5f64, 1e-2f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = |x: &Pt| -> Result<Pt, SemiconjError> {
        let wx = w(x)?;
        let mut out = *x;
        for i in 0..d {
            out[i] += wx[i];
        }
        Ok(out)
    };
    let mut logs = Vec::with_capacity(pair_samples);
    for _ in 0..pair_samples {
        let mut x = [0.0; MAX_DIM];
        let mut dir = [0.0; MAX_DIM];
        for i in 0..d {
            x[i] = rng.gen::<f64>();
            dir[i] = rng.gen::<f64>() * 2.0 - 1.0;
        }
        let len = dir[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
        if len < 1e-3 {
            continue;
        }
        let delta = (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp();
        let mut y = x;
        for i in 0..d {
            y[i] += delta * dir[i] / len;
        }
        let dh = torus_dist(&h(&x)?, &h(&y)?, d);
        let dx = torus_dist(&x, &y, d);
        if dh > 0.0 && dx > 0.0 {
            logs.push((dx.ln(), dh.ln()));
        }
    }
    if logs.len() < MIN_HOLDER_PAIRS {
        return Err(SemiconjError::InsufficientSamples {
            got: logs.len(),
            needed: MIN_HOLDER_PAIRS,
        });
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(HolderEstimate {
        exponent: sxy / sxx,
        pairs_used: logs.len(),
        min_separation: logs.iter().map(|p| p.0.exp()).fold(f64::INFINITY, f64::min),
        max_separation: logs.iter().map(|p| p.0.exp()).fold(0.0, f64::max),
    })
}

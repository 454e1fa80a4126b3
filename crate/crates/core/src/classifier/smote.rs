//! Synthetic minority oversampling. Each synthetic point is a random
//! convex step from a minority point toward one of its k nearest minority
//! neighbors, so synthetics always lie on segments between real points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FeatureVector;
use crate::{Error, Result};

fn squared_distance(a: &FeatureVector, b: &FeatureVector) -> f64 {
    let mut sum = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.entries.len() || j < b.entries.len() {
        match (a.entries.get(i), b.entries.get(j)) {
            (Some(&(ia, va)), Some(&(ib, vb))) => {
                if ia == ib {
                    sum += (va - vb) * (va - vb);
                    i += 1;
                    j += 1;
                } else if ia < ib {
                    sum += va * va;
                    i += 1;
                } else {
                    sum += vb * vb;
                    j += 1;
                }
            }
            (Some(&(_, va)), None) => {
                sum += va * va;
                i += 1;
            }
            (None, Some(&(_, vb))) => {
                sum += vb * vb;
                j += 1;
            }
            (None, None) => break,
        }
    }
    sum
}

/// (1 - r) * a + r * b over sparse entries.
fn interpolate(a: &FeatureVector, b: &FeatureVector, r: f64) -> FeatureVector {
    let mut entries = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    let mut push = |index: usize, value: f64| {
        if value != 0.0 {
            entries.push((index, value));
        }
    };
    while i < a.entries.len() || j < b.entries.len() {
        match (a.entries.get(i), b.entries.get(j)) {
            (Some(&(ia, va)), Some(&(ib, vb))) => {
                if ia == ib {
                    push(ia, (1.0 - r) * va + r * vb);
                    i += 1;
                    j += 1;
                } else if ia < ib {
                    push(ia, (1.0 - r) * va);
                    i += 1;
                } else {
                    push(ib, r * vb);
                    j += 1;
                }
            }
            (Some(&(ia, va)), None) => {
                push(ia, (1.0 - r) * va);
                i += 1;
            }
            (None, Some(&(ib, vb))) => {
                push(ib, r * vb);
                j += 1;
            }
            (None, None) => break,
        }
    }
    FeatureVector { entries }
}

/// Generates synthetic minority vectors until the minority class would
/// reach `target` in total. Requires more minority points than k; returns
/// only the synthetics (the caller keeps the originals).
pub fn smote_oversample(
    minority: &[FeatureVector],
    k: usize,
    target: usize,
    seed: u64,
) -> Result<Vec<FeatureVector>> {
    if k == 0 {
        return Err(Error::Model("smote needs k >= 1".into()));
    }
    if minority.len() <= k {
        return Err(Error::Model(format!(
            "smote needs more than k={k} minority points, got {}",
            minority.len()
        )));
    }
    let needed = target.saturating_sub(minority.len());
    if needed == 0 {
        return Ok(Vec::new());
    }

    // k nearest neighbors per point, ties broken by index.
    let neighbors: Vec<Vec<usize>> = (0..minority.len())
        .map(|i| {
            let mut order: Vec<usize> = (0..minority.len()).filter(|&j| j != i).collect();
            order.sort_by(|&x, &y| {
                squared_distance(&minority[i], &minority[x])
                    .total_cmp(&squared_distance(&minority[i], &minority[y]))
                    .then(x.cmp(&y))
            });
            order.truncate(k);
            order
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut synthetics = Vec::with_capacity(needed);
    for _ in 0..needed {
        let base = rng.random_range(0..minority.len());
        let neighbor = neighbors[base][rng.random_range(0..k)];
        let r: f64 = rng.random();
        synthetics.push(interpolate(&minority[base], &minority[neighbor], r));
    }
    Ok(synthetics)
}

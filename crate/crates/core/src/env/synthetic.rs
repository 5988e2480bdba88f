use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{DistanceMode, ProblemInstance, Target};
use crate::reward::{Discretization, FeatureVector, PiecewiseLinearReward};

/// Planning grid gap: a sixteenth of a full unit of effort (half an hour
/// of an eight-hour patrol day).
pub const DEFAULT_GAP: f64 = 0.0625;

/// Parameters of the synthetic instance generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_targets: usize,
    /// Number of linear pieces per reward function, drawn uniformly.
    pub segments: RangeInclusive<usize>,
    pub budget: f64,
    pub gap: f64,
    pub lipschitz_constant: f64,
    /// Feature dimension; coordinate 0 is the target's accessibility.
    pub n_features: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_targets: 25,
            segments: 4..=6,
            budget: 1.0,
            gap: DEFAULT_GAP,
            lipschitz_constant: 1.0,
            n_features: 2,
        }
    }
}

/// Smallest effort spacing between generated knots.
const MIN_KNOT_SPACING: f64 = 1e-3;

/// Random monotone piecewise-linear rewards through the origin.
///
/// Interior knot efforts are uniform on `(0, 1)`. Slopes are non-increasing
/// and lie in `[0, L]`, so every curve is concave and respects the
/// instance's Lipschitz constant. `μ(1)` is uniform on `[0.2, 1]` (scaled
/// down when `L < 1`).
pub fn generate_synthetic_instance(spec: &SyntheticSpec, seed: u64) -> Result<ProblemInstance> {
    if spec.n_targets == 0 {
        return Err(Error::InvalidArgument("n_targets must be at least 1".into()));
    }
    if spec.segments.is_empty() || *spec.segments.start() == 0 {
        return Err(Error::InvalidArgument(
            "segment range must be non-empty and start at 1 or more".into(),
        ));
    }
    if !(spec.lipschitz_constant > 0.0 && spec.lipschitz_constant.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "lipschitz constant {} must be positive",
            spec.lipschitz_constant
        )));
    }
    let discretization = Discretization::from_gap(spec.gap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let targets = (0..spec.n_targets)
        .map(|_| {
            let features = FeatureVector::new(
                (0..spec.n_features).map(|_| rng.random::<f64>()).collect(),
            );
            let segments = rng.random_range(spec.segments.clone());
            let reward = random_reward(&mut rng, segments, spec.lipschitz_constant);
            Target { features, reward }
        })
        .collect();
    ProblemInstance::new(
        targets,
        spec.budget,
        spec.lipschitz_constant,
        discretization,
        DistanceMode::RewardSupDistance,
    )
}

fn random_reward<R: Rng>(rng: &mut R, segments: usize, lipschitz: f64) -> PiecewiseLinearReward {
    let mut efforts: Vec<f64> = loop {
        let mut e: Vec<f64> = (1..segments).map(|_| rng.random::<f64>()).collect();
        e.sort_by(f64::total_cmp);
        let spaced = std::iter::once(0.0)
            .chain(e.iter().copied())
            .chain(std::iter::once(1.0))
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[1] - w[0] >= MIN_KNOT_SPACING);
        if spaced {
            break e;
        }
    };
    efforts.push(1.0);

    // Decreasing slopes in [0, L], blended so that μ(1) hits `top`. Both
    // blends keep the order, so the curve saturates.
    let top = rng.random_range(0.2..=1.0) * lipschitz.min(1.0);
    let widths: Vec<f64> = std::iter::once(0.0)
        .chain(efforts.iter().copied())
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| w[1] - w[0])
        .collect();
    let mut slopes: Vec<f64> = (0..segments).map(|_| rng.random::<f64>() * lipschitz).collect();
    slopes.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = slopes.iter().zip(&widths).map(|(s, w)| s * w).sum();
    if total >= top {
        slopes.iter_mut().for_each(|s| *s *= top / total);
    } else {
        let lambda = (top - total) / (lipschitz - total);
        slopes.iter_mut().for_each(|s| *s += lambda * (lipschitz - *s));
    }

    let mut knots = Vec::with_capacity(segments + 1);
    knots.push((0.0, 0.0));
    let mut acc = 0.0;
    for ((e, s), w) in efforts.into_iter().zip(slopes).zip(widths) {
        acc += s * w;
        knots.push((e, acc.min(top)));
    }
    PiecewiseLinearReward::new(knots).expect("generator produces valid rewards")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::validate_instance;
    use crate::reward::{reward_sup_distance, DEFAULT_SUP_GRID_STEP};

    #[test]
    fn deterministic_per_seed() {
        let spec = SyntheticSpec::default();
        let a = generate_synthetic_instance(&spec, 17).unwrap();
        let b = generate_synthetic_instance(&spec, 17).unwrap();
        assert_eq!(a.targets(), b.targets());
        let c = generate_synthetic_instance(&spec, 18).unwrap();
        assert_ne!(a.targets(), c.targets());
    }

    #[test]
    fn twenty_five_valid_monotone_functions() {
        let inst = generate_synthetic_instance(&SyntheticSpec::default(), 1).unwrap();
        assert_eq!(inst.n_targets(), 25);
        assert!(validate_instance(&inst).is_valid());
        assert_eq!(inst.distance_mode(), DistanceMode::RewardSupDistance);
        let mut tops = Vec::new();
        for t in inst.targets() {
            assert_eq!(t.reward.evaluate(0.0).unwrap(), 0.0);
            let top = t.reward.evaluate(1.0).unwrap();
            assert!((0.2 - 1e-12..=1.0).contains(&top));
            tops.push(top);
        }
        // functions vary across targets
        tops.sort_by(f64::total_cmp);
        tops.dedup();
        assert!(tops.len() > 20);
    }

    #[test]
    fn single_segment_is_a_line() {
        let spec = SyntheticSpec {
            segments: 1..=1,
            ..SyntheticSpec::default()
        };
        let inst = generate_synthetic_instance(&spec, 5).unwrap();
        for t in inst.targets() {
            assert_eq!(t.reward.knots().len(), 2);
            let top = t.reward.evaluate(1.0).unwrap();
            assert!((t.reward.evaluate(0.3).unwrap() - 0.3 * top).abs() < 1e-12);
        }
    }

    #[test]
    fn slopes_respect_lipschitz_constant() {
        for (seed, l) in [(0, 1.0), (1, 0.5), (2, 3.0)] {
            let spec = SyntheticSpec {
                lipschitz_constant: l,
                ..SyntheticSpec::default()
            };
            let inst = generate_synthetic_instance(&spec, seed).unwrap();
            for t in inst.targets() {
                assert!(t.reward.max_slope() <= l + 1e-9, "{}", t.reward.max_slope());
            }
        }
    }

    #[test]
    fn curves_saturate() {
        let inst = generate_synthetic_instance(&SyntheticSpec::default(), 11).unwrap();
        for t in inst.targets() {
            let slopes: Vec<f64> = t
                .reward
                .knots()
                .windows(2)
                .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
                .collect();
            assert!(slopes.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{slopes:?}");
        }
    }

    #[test]
    fn rejects_empty_instance() {
        let spec = SyntheticSpec {
            n_targets: 0,
            ..SyntheticSpec::default()
        };
        assert!(generate_synthetic_instance(&spec, 0).is_err());
    }

    #[test]
    fn pairwise_gaps_bounded_by_sup_distance() {
        let inst = generate_synthetic_instance(&SyntheticSpec::default(), 3).unwrap();
        let d = inst.distances();
        for a in 0..inst.n_targets() {
            for b in 0..inst.n_targets() {
                let (fa, fb) = (inst.reward(a), inst.reward(b));
                assert_eq!(
                    d.get(a, b),
                    reward_sup_distance(fa, fb, DEFAULT_SUP_GRID_STEP).unwrap()
                );
                for k in 0..=200 {
                    let beta = k as f64 / 200.0;
                    let gap = (fa.evaluate(beta).unwrap() - fb.evaluate(beta).unwrap()).abs();
                    assert!(gap <= d.get(a, b) + 1e-12);
                }
            }
        }
    }
}

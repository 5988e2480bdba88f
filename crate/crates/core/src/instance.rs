//! Problem instances: targets, budget, Lipschitz constant and effort grid.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reward::{
    feature_distance, reward_sup_distance, Discretization, FeatureVector, PiecewiseLinearReward,
    DEFAULT_SUP_GRID_STEP, EFFORT_TOL,
};

/// How the distance between two targets is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMode {
    /// Euclidean distance between min-max normalized feature vectors.
    EuclideanFeatures,
    /// Maximum gap between the two targets' reward functions.
    RewardSupDistance,
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceMode::EuclideanFeatures => f.write_str("euclidean-features"),
            DistanceMode::RewardSupDistance => f.write_str("reward-sup-distance"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub features: FeatureVector,
    pub reward: PiecewiseLinearReward,
}

/// A patrol planning problem.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    targets: Vec<Target>,
    budget: f64,
    lipschitz_constant: f64,
    discretization: Discretization,
    distance_mode: DistanceMode,
}

impl ProblemInstance {
    /// Builds an instance and rejects it if [`validate_instance`] reports anything.
    pub fn new(
        targets: Vec<Target>,
        budget: f64,
        lipschitz_constant: f64,
        discretization: Discretization,
        distance_mode: DistanceMode,
    ) -> Result<Self> {
        let inst = Self::new_unchecked(
            targets,
            budget,
            lipschitz_constant,
            discretization,
            distance_mode,
        );
        let report = validate_instance(&inst);
        if report.is_valid() {
            Ok(inst)
        } else {
            Err(Error::InvalidArgument(report.to_string()))
        }
    }

    pub fn new_unchecked(
        targets: Vec<Target>,
        budget: f64,
        lipschitz_constant: f64,
        discretization: Discretization,
        distance_mode: DistanceMode,
    ) -> Self {
        ProblemInstance {
            targets,
            budget,
            lipschitz_constant,
            discretization,
            distance_mode,
        }
    }

    pub fn n_targets(&self) -> usize {
        self.targets.len()
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn reward(&self, target: usize) -> &PiecewiseLinearReward {
        &self.targets[target].reward
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn lipschitz_constant(&self) -> f64 {
        self.lipschitz_constant
    }

    pub fn discretization(&self) -> &Discretization {
        &self.discretization
    }

    pub fn distance_mode(&self) -> DistanceMode {
        self.distance_mode
    }

    /// Same targets and budget on a different effort grid.
    pub fn with_discretization(&self, discretization: Discretization) -> Self {
        ProblemInstance {
            discretization,
            ..self.clone()
        }
    }

    /// Pairwise target distances under this instance's [`DistanceMode`].
    pub fn distances(&self) -> DistanceMatrix {
        match self.distance_mode {
            DistanceMode::EuclideanFeatures => {
                let features: Vec<FeatureVector> =
                    self.targets.iter().map(|t| t.features.clone()).collect();
                DistanceMatrix::euclidean(&normalize_features(&features))
            }
            DistanceMode::RewardSupDistance => {
                let rewards: Vec<&PiecewiseLinearReward> =
                    self.targets.iter().map(|t| &t.reward).collect();
                DistanceMatrix::from_fn(self.n_targets(), |i, j| {
                    reward_sup_distance(rewards[i], rewards[j], DEFAULT_SUP_GRID_STEP)
                        .expect("default grid step is positive")
                })
            }
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = InstanceFile::load(path)?;
        file.into_instance().map_err(|e| Error::parse(path, e))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        InstanceFile::from_instance(self).save(path)
    }
}

/// Min-max normalizes each feature dimension to `[0, 1]`. Constant
/// dimensions map to 0.
pub fn normalize_features(features: &[FeatureVector]) -> Vec<FeatureVector> {
    let dims = features.first().map_or(0, |f| f.len());
    let mut lo = vec![f64::INFINITY; dims];
    let mut hi = vec![f64::NEG_INFINITY; dims];
    for f in features {
        for (d, &x) in f.values().iter().enumerate().take(dims) {
            lo[d] = lo[d].min(x);
            hi[d] = hi[d].max(x);
        }
    }
    features
        .iter()
        .map(|f| {
            FeatureVector::new(
                f.values()
                    .iter()
                    .enumerate()
                    .map(|(d, &x)| {
                        let span = hi[d] - lo[d];
                        if span > 0.0 {
                            (x - lo[d]) / span
                        } else {
                            0.0
                        }
                    })
                    .collect(),
            )
        })
        .collect()
}

/// Symmetric `N × N` matrix of target distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_fn(n: usize, mut dist: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        DistanceMatrix { n, data }
    }

    /// Euclidean distances between the given (already normalized) features.
    pub fn euclidean(features: &[FeatureVector]) -> Self {
        Self::from_fn(features.len(), |i, j| {
            feature_distance(&features[i], &features[j]).unwrap_or(f64::INFINITY)
        })
    }

    /// All targets infinitely far apart: no information is shared across targets.
    pub fn disconnected(n: usize) -> Self {
        Self::from_fn(n, |_, _| f64::INFINITY)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

/// Outcome of [`validate_instance`]; empty when the instance is valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("instance is valid");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every instance invariant and reports all violations found.
pub fn validate_instance(inst: &ProblemInstance) -> ValidationReport {
    let mut v = Vec::new();
    let n = inst.n_targets();
    if n == 0 {
        v.push("instance has no targets".to_string());
    }
    if !(inst.budget >= 0.0) || !inst.budget.is_finite() {
        v.push(format!("budget {} must be finite and non-negative", inst.budget));
    } else if inst.budget > n as f64 + EFFORT_TOL {
        v.push(format!("budget {} exceeds the number of targets {n}", inst.budget));
    }
    if !(inst.lipschitz_constant > 0.0) || inst.lipschitz_constant.is_nan() {
        v.push(format!(
            "lipschitz constant {} must be positive",
            inst.lipschitz_constant
        ));
    }
    let levels = inst.discretization.levels();
    if levels.len() < 2
        || levels[0].abs() > EFFORT_TOL
        || (levels[levels.len() - 1] - 1.0).abs() > EFFORT_TOL
        || levels.windows(2).any(|w| w[1] <= w[0])
    {
        v.push("discretization must be strictly increasing from 0 to 1".to_string());
    }
    let k = inst.targets.first().map_or(0, |t| t.features.len());
    for (i, t) in inst.targets.iter().enumerate() {
        if t.features.len() != k {
            v.push(format!(
                "target {i}: feature length {} differs from {k}",
                t.features.len()
            ));
        }
        if t.features.values().iter().any(|x| !x.is_finite()) {
            v.push(format!("target {i}: non-finite feature"));
        }
        for msg in t.reward.violations() {
            v.push(format!("target {i}: {msg}"));
        }
    }
    if v.is_empty() {
        let d = inst.distances();
        for i in 0..n {
            if d.get(i, i) != 0.0 {
                v.push(format!("distance matrix diagonal nonzero at {i}"));
            }
            for j in 0..n {
                if d.get(i, j) != d.get(j, i) || d.get(i, j).is_nan() {
                    v.push(format!("distance matrix asymmetric at ({i}, {j})"));
                }
            }
        }
    }
    ValidationReport { violations: v }
}

/// On-disk form of a [`ProblemInstance`] (JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n_targets: usize,
    pub budget: f64,
    pub lipschitz_constant: f64,
    pub distance_mode: DistanceMode,
    pub discretization_gap: f64,
    pub features: Vec<Vec<f64>>,
    pub reward_knots: Vec<Vec<[f64; 2]>>,
}

impl InstanceFile {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        InstanceFile {
            n_targets: inst.n_targets(),
            budget: inst.budget,
            lipschitz_constant: inst.lipschitz_constant,
            distance_mode: inst.distance_mode,
            discretization_gap: inst.discretization.min_gap(),
            features: inst
                .targets
                .iter()
                .map(|t| t.features.values().to_vec())
                .collect(),
            reward_knots: inst
                .targets
                .iter()
                .map(|t| t.reward.knots().iter().map(|&(e, v)| [e, v]).collect())
                .collect(),
        }
    }

    /// Structural conversion. Semantic checks are left to [`validate_instance`].
    pub fn into_instance(self) -> std::result::Result<ProblemInstance, String> {
        if self.features.len() != self.n_targets || self.reward_knots.len() != self.n_targets {
            return Err(format!(
                "n_targets is {} but found {} feature rows and {} reward functions",
                self.n_targets,
                self.features.len(),
                self.reward_knots.len()
            ));
        }
        let discretization =
            Discretization::from_gap(self.discretization_gap).map_err(|e| e.to_string())?;
        let targets = self
            .features
            .into_iter()
            .zip(self.reward_knots)
            .map(|(f, k)| Target {
                features: FeatureVector::new(f),
                reward: PiecewiseLinearReward::from_knots_unchecked(
                    k.into_iter().map(|[e, v]| (e, v)).collect(),
                ),
            })
            .collect();
        Ok(ProblemInstance::new_unchecked(
            targets,
            self.budget,
            self.lipschitz_constant,
            discretization,
            self.distance_mode,
        ))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("instance serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

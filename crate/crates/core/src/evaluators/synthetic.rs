//! Noisy bi-objective test problems with a controllable validation/test shift.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::Evaluator;
use crate::error::{Error, Result};
use crate::pareto::{CostVector, ObjectiveSpec};
use crate::search::{Assignment, ConfigurationSpace};

/// Shape of the noise-free trade-off curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Surface {
    /// `f2 = 1 - sqrt(f1)` on the optimal set.
    Convex,
    /// `f2 = 1 - f1^2` on the optimal set.
    Concave,
    /// `f2 = 1 - f1` on the optimal set.
    Linear,
}

impl Surface {
    fn shape(self, t: f64) -> f64 {
        match self {
            Surface::Convex => t.sqrt(),
            Surface::Concave => t * t,
            Surface::Linear => t,
        }
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Surface::Convex => "convex",
            Surface::Concave => "concave",
            Surface::Linear => "linear",
        })
    }
}

impl FromStr for Surface {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convex" => Ok(Surface::Convex),
            "concave" => Ok(Surface::Concave),
            "linear" => Ok(Surface::Linear),
            other => Err(Error::InvalidArgument(format!(
                "unknown surface `{other}` (expected convex, concave, linear)"
            ))),
        }
    }
}

/// A smooth map from the encoded configuration to two `[0, 1]` losses, with
/// independent Gaussian noise on each split.
///
/// The first coordinate of the encoded point moves along the trade-off, the
/// remaining coordinates measure distance from the optimal set: at the cube
/// centre a point sits on the curve, at a corner it is pushed to `f2 = 1`.
#[derive(Debug, Clone)]
pub struct SyntheticProblem {
    space: ConfigurationSpace,
    surface: Surface,
    noise_sigma: f64,
}

impl SyntheticProblem {
    pub fn new(space: ConfigurationSpace, surface: Surface, noise_sigma: f64) -> Result<Self> {
        if !noise_sigma.is_finite() || noise_sigma < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "noise sigma must be finite and non-negative, got {noise_sigma}"
            )));
        }
        if space.is_empty() {
            return Err(Error::InvalidArgument(
                "synthetic problem needs a non-empty space".into(),
            ));
        }
        Ok(Self {
            space,
            surface,
            noise_sigma,
        })
    }

    pub fn dim(&self) -> usize {
        self.space.len()
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    /// Noise-free losses at a point of the unit cube.
    pub fn objective(&self, x: &[f64]) -> [f64; 2] {
        let t = x[0];
        let distance = if x.len() > 1 {
            x[1..]
                .iter()
                .map(|v| 4.0 * (v - 0.5) * (v - 0.5))
                .sum::<f64>()
                / (x.len() - 1) as f64
        } else {
            0.0
        };
        [t, 1.0 - self.surface.shape(t) * (1.0 - distance)]
    }

    fn perturb(&self, clean: [f64; 2], seed: u64, stream: u64) -> Result<CostVector> {
        if self.noise_sigma == 0.0 {
            return CostVector::new(clean.to_vec());
        }
        let normal = Normal::new(0.0, self.noise_sigma)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        CostVector::new(
            clean
                .iter()
                .map(|v| (v + normal.sample(&mut rng)).clamp(0.0, 1.0))
                .collect(),
        )
    }
}

impl Evaluator for SyntheticProblem {
    fn id(&self) -> String {
        format!("synthetic:{}:{}", self.surface, self.noise_sigma)
    }

    fn objectives(&self) -> Vec<ObjectiveSpec> {
        vec![
            ObjectiveSpec::minimize("f1").with_range(0.0, 1.0),
            ObjectiveSpec::minimize("f2").with_range(0.0, 1.0),
        ]
    }

    fn check_space(&self, space: &ConfigurationSpace) -> Result<()> {
        if space != &self.space {
            return Err(Error::InvalidArgument(
                "search space differs from the one the synthetic problem encodes".into(),
            ));
        }
        Ok(())
    }

    fn evaluate(&self, assignment: &Assignment, seed: u64) -> Result<(CostVector, CostVector)> {
        let x = self.space.encode(assignment)?;
        let clean = self.objective(&x);
        Ok((self.perturb(clean, seed, 1)?, self.perturb(clean, seed, 2)?))
    }
}

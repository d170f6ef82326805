//! Hypervolume indicator.
//!
//! Three routes are provided: an exact sort-and-sweep for two objectives, an
//! exact recursive slicing scheme for any dimension, and a seeded
//! Monte-Carlo estimator that exists purely as an independent check on the
//! exact routes.
//!
//! Points that are not strictly better than the reference point in every
//! coordinate bound no volume and are dropped before computing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pareto::{non_dominated_filter, uniform_dimension, ObjectiveSpec};

/// Absolute tolerance used whenever exact hypervolumes are compared.
pub const HV_TOLERANCE: f64 = 1e-9;

/// Anchor corner for hypervolume computation, on the minimization scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePoint(Vec<f64>);

impl ReferencePoint {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("reference point"));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(values))
    }

    /// The all-ones point, the natural corner for `[0, 1]` losses.
    pub fn unit(dim: usize) -> Self {
        Self(vec![1.0; dim])
    }

    /// Default reference for an objective list: all-ones when every
    /// objective is a `[0, 1]` loss, otherwise none.
    pub fn default_for(objectives: &[ObjectiveSpec]) -> Option<Self> {
        crate::pareto::all_unit_losses(objectives).then(|| Self::unit(objectives.len()))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        Ok(())
    }
}

fn inside_box<'a, P: AsRef<[f64]>>(points: &'a [P], reference: &[f64]) -> Vec<&'a [f64]> {
    points
        .iter()
        .map(AsRef::as_ref)
        .filter(|p| p.iter().zip(reference).all(|(x, r)| x < r))
        .collect()
}

/// Exact two-objective hypervolume by a sweep over the first objective.
///
/// Dominated input points are harmless: they never lower the running
/// minimum of the second objective, so they add no area.
pub fn hypervolume_2d<P: AsRef<[f64]>>(points: &[P], reference: &ReferencePoint) -> Result<f64> {
    if reference.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: reference.dim(),
        });
    }
    if points.is_empty() {
        return Ok(0.0);
    }
    reference.check_dim(uniform_dimension(points)?)?;
    let mut pts = inside_box(points, reference.values());
    Ok(sweep_2d(&mut pts, reference.values()))
}

fn sweep_2d(points: &mut [&[f64]], reference: &[f64]) -> f64 {
    points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for p in points.iter() {
        if p[1] < ceiling {
            area += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}

/// Exact hypervolume for any number of objectives.
///
/// The non-dominated subset is extracted first; two objectives go through
/// the sweep, higher dimensions through recursive slicing along the last
/// objective. Cost grows as `n^(M-1) log n`, which is fine for the front
/// sizes seen in hyperparameter searches up to four objectives.
pub fn hypervolume_nd<P: AsRef<[f64]>>(points: &[P], reference: &ReferencePoint) -> Result<f64> {
    if reference.dim() < 2 {
        return Err(Error::InvalidArgument(
            "hypervolume needs at least two objectives".into(),
        ));
    }
    if points.is_empty() {
        return Ok(0.0);
    }
    reference.check_dim(uniform_dimension(points)?)?;
    let boxed = inside_box(points, reference.values());
    if boxed.is_empty() {
        return Ok(0.0);
    }
    let keep = non_dominated_filter(&boxed)?;
    let mut front: Vec<&[f64]> = keep.into_iter().map(|i| boxed[i]).collect();
    if reference.dim() == 2 {
        Ok(sweep_2d(&mut front, reference.values()))
    } else {
        let owned: Vec<Vec<f64>> = front.iter().map(|p| p.to_vec()).collect();
        Ok(slice_volume(owned, reference.values()))
    }
}

/// Recursive slicing down to one dimension. Every point must lie strictly
/// inside the reference box.
pub(crate) fn slice_volume(mut points: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    let dim = reference.len();
    if points.is_empty() {
        return 0.0;
    }
    if dim == 1 {
        let best = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        return reference[0] - best;
    }
    let last = dim - 1;
    points.sort_by(|a, b| a[last].total_cmp(&b[last]));
    let mut volume = 0.0;
    let mut slab: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        slab.push(p[..last].to_vec());
        let upper = points.get(i + 1).map_or(reference[last], |q| q[last]);
        let depth = upper - p[last];
        if depth <= 0.0 {
            continue;
        }
        // Drop projections that cannot contribute to any later slab either.
        let keep = non_dominated_filter(&slab).expect("slab is non-empty and uniform");
        slab = keep
            .into_iter()
            .map(|k| std::mem::take(&mut slab[k]))
            .collect();
        volume += depth * slice_volume(slab.clone(), &reference[..last]);
    }
    volume
}

/// Monte-Carlo hypervolume estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

const MC_CHUNK: usize = 1 << 15;

/// Estimates the hypervolume by uniform sampling in the box `[lower, reference]`.
///
/// Samples are drawn in fixed-size chunks, each from its own ChaCha stream
/// keyed by `(seed, chunk index)`, so the estimate is bit-identical no
/// matter how the chunks are scheduled across threads.
pub fn hypervolume_mc<P: AsRef<[f64]> + Sync>(
    points: &[P],
    reference: &ReferencePoint,
    lower: &[f64],
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be at least 1".into(),
        ));
    }
    reference.check_dim(lower.len())?;
    if let Some(index) = lower.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let widths: Vec<f64> = reference
        .values()
        .iter()
        .zip(lower)
        .map(|(r, l)| r - l)
        .collect();
    if widths.iter().any(|&w| w <= 0.0) {
        return Err(Error::InvalidArgument(
            "sampling box has zero or negative volume".into(),
        ));
    }
    if points.is_empty() {
        return Ok(McEstimate {
            estimate: 0.0,
            std_error: 0.0,
        });
    }
    reference.check_dim(uniform_dimension(points)?)?;
    for p in points {
        if p.as_ref().iter().zip(lower).any(|(x, l)| x < l) {
            return Err(Error::InvalidArgument(
                "a point lies below the lower sampling corner".into(),
            ));
        }
    }
    let pts: Vec<&[f64]> = points.iter().map(AsRef::as_ref).collect();
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let n = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut sample = vec![0.0; lower.len()];
            let mut hits = 0u64;
            for _ in 0..n {
                for (k, s) in sample.iter_mut().enumerate() {
                    *s = lower[k] + widths[k] * rng.random::<f64>();
                }
                if pts
                    .iter()
                    .any(|p| p.iter().zip(&sample).all(|(x, s)| x <= s))
                {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let volume: f64 = widths.iter().product();
    let fraction = hits as f64 / samples as f64;
    Ok(McEstimate {
        estimate: volume * fraction,
        std_error: volume * (fraction * (1.0 - fraction) / samples as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit2() -> ReferencePoint {
        ReferencePoint::unit(2)
    }

    #[test]
    fn two_d_examples() {
        assert_eq!(hypervolume_2d(&[vec![0.5, 0.5]], &unit2()).unwrap(), 0.25);
        let staircase = [vec![0.2, 0.8], vec![0.5, 0.5], vec![0.8, 0.2]];
        assert!((hypervolume_2d(&staircase, &unit2()).unwrap() - 0.37).abs() < 1e-12);
        let empty: [Vec<f64>; 0] = [];
        assert_eq!(hypervolume_2d(&empty, &unit2()).unwrap(), 0.0);
    }

    #[test]
    fn two_d_rejects_wrong_dimension() {
        assert!(hypervolume_2d(&[vec![0.5, 0.5, 0.5]], &ReferencePoint::unit(3)).is_err());
        assert!(hypervolume_2d(&[vec![0.5, 0.5, 0.5]], &unit2()).is_err());
        assert!(ReferencePoint::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn points_beyond_reference_contribute_nothing() {
        let pts = [vec![0.5, 0.5], vec![0.1, 1.5], vec![1.0, 0.0]];
        assert_eq!(hypervolume_2d(&pts, &unit2()).unwrap(), 0.25);
        assert_eq!(hypervolume_nd(&pts, &unit2()).unwrap(), 0.25);
    }

    #[test]
    fn nd_examples() {
        let r3 = ReferencePoint::unit(3);
        assert_eq!(hypervolume_nd(&[vec![0.5, 0.5, 0.5]], &r3).unwrap(), 0.125);
        // Two overlapping boxes: 0.5 + 0.5 - 0.25.
        let pts = [vec![0.0, 0.5, 0.0], vec![0.5, 0.0, 0.0]];
        assert!((hypervolume_nd(&pts, &r3).unwrap() - 0.75).abs() < 1e-12);
        assert!(hypervolume_nd(&[vec![0.5]], &ReferencePoint::unit(1)).is_err());
    }

    #[test]
    fn unit_box_scale() {
        for dim in 2..=4 {
            let r = ReferencePoint::unit(dim);
            assert_eq!(hypervolume_nd(&[vec![0.0; dim]], &r).unwrap(), 1.0);
        }
    }

    #[test]
    fn mc_examples() {
        let pts = [vec![0.5, 0.5]];
        let est = hypervolume_mc(&pts, &unit2(), &[0.0, 0.0], 1_000_000, 7).unwrap();
        assert!((est.estimate - 0.25).abs() <= 3.0 * est.std_error);
        let again = hypervolume_mc(&pts, &unit2(), &[0.0, 0.0], 1_000_000, 7).unwrap();
        assert_eq!(est.estimate.to_bits(), again.estimate.to_bits());
        let empty: [Vec<f64>; 0] = [];
        assert_eq!(
            hypervolume_mc(&empty, &unit2(), &[0.0, 0.0], 10, 1)
                .unwrap()
                .estimate,
            0.0
        );
    }

    #[test]
    fn mc_rejects_degenerate_box() {
        let pts = [vec![0.5, 0.5]];
        assert!(hypervolume_mc(&pts, &unit2(), &[0.0, 1.0], 10, 1).is_err());
        assert!(hypervolume_mc(&pts, &unit2(), &[0.0, 0.0], 0, 1).is_err());
        assert!(hypervolume_mc(&pts, &unit2(), &[0.6, 0.0], 10, 1).is_err());
    }

    #[test]
    fn slicing_matches_inclusion_exclusion_on_three_boxes() {
        // Inclusion-exclusion over all subsets, computed independently.
        let pts = vec![
            vec![0.1, 0.6, 0.3],
            vec![0.4, 0.2, 0.5],
            vec![0.7, 0.4, 0.1],
        ];
        let r = [1.0, 1.0, 1.0];
        let mut expected = 0.0;
        for mask in 1u32..8 {
            let members: Vec<&Vec<f64>> = (0..3)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| &pts[i])
                .collect();
            let corner: Vec<f64> = (0..3)
                .map(|k| {
                    members
                        .iter()
                        .map(|p| p[k])
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect();
            let vol: f64 = corner.iter().zip(&r).map(|(c, r)| r - c).product();
            let sign = if members.len() % 2 == 1 { 1.0 } else { -1.0 };
            expected += sign * vol;
        }
        let got = hypervolume_nd(&pts, &ReferencePoint::unit(3)).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    fn cloud(dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(0.0f64..1.2, dim), 1..25)
    }

    proptest! {
        #[test]
        fn slicing_agrees_with_sweep_in_2d(pts in cloud(2)) {
            let r = unit2();
            let sweep = hypervolume_2d(&pts, &r).unwrap();
            let boxed: Vec<Vec<f64>> = inside_box(&pts, r.values()).into_iter().map(<[f64]>::to_vec).collect();
            let sliced = slice_volume(boxed, r.values());
            prop_assert!((sweep - sliced).abs() < 1e-12);
            prop_assert_eq!(hypervolume_nd(&pts, &r).unwrap(), sweep);
        }

        #[test]
        fn adding_a_point_never_decreases(pts in cloud(3), extra in prop::collection::vec(0.0f64..1.2, 3)) {
            let r = ReferencePoint::unit(3);
            let before = hypervolume_nd(&pts, &r).unwrap();
            let mut more = pts.clone();
            more.push(extra);
            prop_assert!(hypervolume_nd(&more, &r).unwrap() >= before - HV_TOLERANCE);
        }

        #[test]
        fn dominated_points_contribute_nothing(pts in cloud(3)) {
            let r = ReferencePoint::unit(3);
            let keep = non_dominated_filter(&pts).unwrap();
            let front: Vec<_> = keep.iter().map(|&i| pts[i].clone()).collect();
            let full = hypervolume_nd(&pts, &r).unwrap();
            prop_assert!((full - hypervolume_nd(&front, &r).unwrap()).abs() < HV_TOLERANCE);
        }

        #[test]
        fn dominating_front_has_no_less_volume(pts in cloud(2), shift in 0.0f64..0.3) {
            // Every point of `better` dominates (or equals after clipping) its twin in `pts`.
            let better: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|v| v - shift).collect()).collect();
            let r = unit2();
            prop_assert!(hypervolume_nd(&better, &r).unwrap() >= hypervolume_nd(&pts, &r).unwrap() - HV_TOLERANCE);
        }
    }
}

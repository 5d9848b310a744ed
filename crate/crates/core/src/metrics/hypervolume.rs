//! Exact hypervolume in two and three dimensions and a Monte-Carlo
//! estimator for any dimension.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{pareto_filter, Direction, FrontSample};
use crate::error::{Error, Result};

/// Reference point and orientation of a hypervolume computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypervolumeSpec {
    pub reference: Vec<f64>,
    #[serde(default)]
    pub direction: Direction,
}

impl HypervolumeSpec {
    pub fn minimize(reference: Vec<f64>) -> Self {
        Self {
            reference,
            direction: Direction::Minimize,
        }
    }

    pub fn maximize(reference: Vec<f64>) -> Self {
        Self {
            reference,
            direction: Direction::Maximize,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.reference.is_empty() || self.reference.iter().any(|r| !r.is_finite()) {
            return Err(Error::invalid("reference point must be non-empty and finite"));
        }
        Ok(())
    }

    /// Non-dominated points in minimization form that strictly dominate the
    /// reference, plus the reference in the same form.
    fn canonical(&self, samples: &[FrontSample]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        self.validate()?;
        let dim = self.reference.len();
        let sign = match self.direction {
            Direction::Minimize => 1.0,
            Direction::Maximize => -1.0,
        };
        let reference: Vec<f64> = self.reference.iter().map(|r| sign * r).collect();
        for s in samples {
            Error::check_dim(dim, s.losses.tasks(), "hypervolume sample")?;
        }
        let front = pareto_filter(samples, self.direction);
        let mut points = Vec::with_capacity(front.len());
        for s in &front {
            let p: Vec<f64> = s.losses.iter().map(|v| sign * v).collect();
            if p.iter().zip(&reference).all(|(a, r)| a < r) {
                points.push(p);
            }
        }
        Ok((points, reference))
    }
}

/// Exact hypervolume dominated by `samples` for one to three objectives.
///
/// Samples that do not strictly dominate the reference contribute nothing.
pub fn hypervolume(samples: &[FrontSample], spec: &HypervolumeSpec) -> Result<f64> {
    let (points, reference) = spec.canonical(samples)?;
    match reference.len() {
        1 => Ok(points.iter().map(|p| reference[0] - p[0]).fold(0.0, f64::max)),
        2 => Ok(sweep_2d(points.iter().map(|p| (p[0], p[1])).collect(), (reference[0], reference[1]))),
        3 => Ok(slice_3d(points, &reference)),
        d => Err(Error::Unsupported(format!(
            "exact hypervolume supports at most 3 objectives, got {d}; use the Monte-Carlo estimate"
        ))),
    }
}

fn sweep_2d(mut points: Vec<(f64, f64)>, reference: (f64, f64)) -> f64 {
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut best_y = reference.1;
    let mut area = 0.0;
    for (x, y) in points {
        if y < best_y {
            area += (reference.0 - x) * (best_y - y);
            best_y = y;
        }
    }
    area
}

/// Sums 2-D slices between consecutive third coordinates.
fn slice_3d(mut points: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    points.sort_by(|a, b| a[2].total_cmp(&b[2]));
    let mut volume = 0.0;
    for k in 0..points.len() {
        let top = points.get(k + 1).map_or(reference[2], |p| p[2]);
        let depth = top - points[k][2];
        if depth <= 0.0 {
            continue;
        }
        let slab: Vec<(f64, f64)> = points[..=k].iter().map(|p| (p[0], p[1])).collect();
        volume += depth * sweep_2d(slab, (reference[0], reference[1]));
    }
    volume
}

/// Monte-Carlo hypervolume with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypervolumeEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Default sample count of [`hypervolume_monte_carlo`].
pub const MC_SAMPLES: u64 = 1_000_000;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform in `[0, 1)` as a pure function of `(seed, index, coordinate)`,
/// so any split of the index range yields the same draws.
fn counter_uniform(seed: u64, index: u64, coord: u64) -> f64 {
    let key = splitmix64(seed ^ splitmix64(index.wrapping_mul(0x1000_0000_01B3) ^ coord));
    (key >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Fraction of uniform points in the box spanned by the front's ideal
/// point and the reference that are dominated by some sample.
pub fn hypervolume_monte_carlo(
    samples: &[FrontSample],
    spec: &HypervolumeSpec,
    draws: u64,
    seed: u64,
) -> Result<HypervolumeEstimate> {
    if draws == 0 {
        return Err(Error::invalid("Monte-Carlo hypervolume needs at least one draw"));
    }
    let (points, reference) = spec.canonical(samples)?;
    if points.is_empty() {
        return Ok(HypervolumeEstimate {
            value: 0.0,
            std_error: 0.0,
        });
    }
    let dim = reference.len();
    let lower: Vec<f64> = (0..dim)
        .map(|d| points.iter().map(|p| p[d]).fold(f64::INFINITY, f64::min))
        .collect();
    let box_volume: f64 = lower.iter().zip(&reference).map(|(l, r)| r - l).product();

    const CHUNK: u64 = 1 << 14;
    let chunks = draws.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut u = vec![0.0; dim];
            let mut hits = 0u64;
            for k in c * CHUNK..((c + 1) * CHUNK).min(draws) {
                for (d, ud) in u.iter_mut().enumerate() {
                    *ud = lower[d] + (reference[d] - lower[d]) * counter_uniform(seed, k, d as u64);
                }
                if points.iter().any(|p| p.iter().zip(&u).all(|(a, b)| a <= b)) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let frac = hits as f64 / draws as f64;
    Ok(HypervolumeEstimate {
        value: box_volume * frac,
        std_error: box_volume * (frac * (1.0 - frac) / draws as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::metrics::pareto_filter;
    use crate::objectives::VectorLoss;

    fn pts(v: &[&[f64]]) -> Vec<FrontSample> {
        v.iter()
            .map(|p| FrontSample::oracle(VectorLoss::new(p.to_vec()).unwrap()))
            .collect()
    }

    /// Inclusion-exclusion over every non-empty subset.
    fn inclusion_exclusion(points: &[Vec<f64>], reference: &[f64]) -> f64 {
        let n = points.len();
        let mut total = 0.0;
        for mask in 1u32..(1 << n) {
            let mut corner = vec![f64::NEG_INFINITY; reference.len()];
            for (i, p) in points.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    corner.iter_mut().zip(p).for_each(|(c, v)| *c = c.max(*v));
                }
            }
            let vol: f64 = corner.iter().zip(reference).map(|(c, r)| (r - c).max(0.0)).product();
            let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
            total += sign * vol;
        }
        total
    }

    #[test]
    fn unit_box_from_origin() {
        let hv = hypervolume(&pts(&[&[0.0, 0.0]]), &HypervolumeSpec::minimize(vec![1.0, 1.0])).unwrap();
        assert_eq!(hv, 1.0);
    }

    #[test]
    fn two_point_overlap() {
        let hv = hypervolume(
            &pts(&[&[0.2, 0.5], &[0.5, 0.2]]),
            &HypervolumeSpec::minimize(vec![1.0, 1.0]),
        )
        .unwrap();
        assert!((hv - 0.55).abs() < 1e-12);
    }

    #[test]
    fn degenerate_and_outside_points() {
        let spec = HypervolumeSpec::minimize(vec![1.0, 1.0]);
        assert_eq!(hypervolume(&pts(&[&[1.0, 1.0]]), &spec).unwrap(), 0.0);
        assert_eq!(hypervolume(&pts(&[&[0.5, 2.0]]), &spec).unwrap(), 0.0);
        assert_eq!(hypervolume(&[], &spec).unwrap(), 0.0);
    }

    #[test]
    fn maximize_uses_origin_boxes() {
        let hv = hypervolume(&pts(&[&[0.95, 0.95]]), &HypervolumeSpec::maximize(vec![0.0, 0.0])).unwrap();
        assert!((hv - 0.9025).abs() < 1e-12);
    }

    #[test]
    fn dimension_errors() {
        let spec = HypervolumeSpec::minimize(vec![1.0, 1.0]);
        assert!(hypervolume(&pts(&[&[0.0, 0.0, 0.0]]), &spec).is_err());
        let four = HypervolumeSpec::minimize(vec![1.0; 4]);
        assert!(matches!(
            hypervolume(&pts(&[&[0.0; 4]]), &four),
            Err(Error::Unsupported(_))
        ));
        assert!(hypervolume_monte_carlo(&pts(&[&[0.0; 4]]), &four, 1000, 1).is_ok());
    }

    #[test]
    fn monte_carlo_is_split_invariant() {
        let front = pts(&[&[0.2, 0.5], &[0.5, 0.2]]);
        let spec = HypervolumeSpec::minimize(vec![1.0, 1.0]);
        let a = hypervolume_monte_carlo(&front, &spec, 100_000, 9).unwrap();
        let b = hypervolume_monte_carlo(&front, &spec, 100_000, 9).unwrap();
        assert_eq!(a, b);
        assert!((a.value - 0.55).abs() < 3.0 * a.std_error);
    }

    fn canonical(v: &[Vec<f64>]) -> Vec<FrontSample> {
        v.iter()
            .map(|p| FrontSample::oracle(VectorLoss::new(p.clone()).unwrap()))
            .collect()
    }

    proptest! {
        #[test]
        fn exact_matches_inclusion_exclusion(
            dim in 2usize..=3,
            raw in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 1..9),
        ) {
            let points: Vec<Vec<f64>> = raw.into_iter().map(|p| p[..dim].to_vec()).collect();
            let reference = vec![1.0; dim];
            let exact = hypervolume(&canonical(&points), &HypervolumeSpec::minimize(reference.clone())).unwrap();
            let oracle = inclusion_exclusion(&points, &reference);
            prop_assert!((exact - oracle).abs() < 1e-12);
        }

        #[test]
        fn adding_points_never_decreases(
            raw in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 1..20),
            extra in prop::collection::vec(0.0f64..1.2, 2),
        ) {
            let spec = HypervolumeSpec::minimize(vec![1.0, 1.0]);
            let base = canonical(&raw);
            let before = hypervolume(&base, &spec).unwrap();
            let mut more = base.clone();
            more.push(FrontSample::oracle(VectorLoss::new(extra.clone()).unwrap()));
            let after = hypervolume(&more, &spec).unwrap();
            prop_assert!(after >= before - 1e-12);

            // a point dominated by an existing one changes nothing
            let dominated: Vec<f64> = raw[0].iter().map(|v| v + 0.01).collect();
            let mut with_dominated = base.clone();
            with_dominated.push(FrontSample::oracle(VectorLoss::new(dominated).unwrap()));
            prop_assert!((hypervolume(&with_dominated, &spec).unwrap() - before).abs() < 1e-12);
        }

        #[test]
        fn filtered_front_has_same_volume(
            dim in 2usize..=3,
            raw in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 1..30),
        ) {
            let points: Vec<Vec<f64>> = raw.into_iter().map(|p| p[..dim].to_vec()).collect();
            let spec = HypervolumeSpec::minimize(vec![1.0; dim]);
            let all = canonical(&points);
            let front = pareto_filter(&all, Direction::Minimize);
            prop_assert_eq!(hypervolume(&all, &spec).unwrap(), hypervolume(&front, &spec).unwrap());
        }

        #[test]
        fn translation_covariance(
            dim in 2usize..=3,
            raw in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 1..15),
            shift in prop::collection::vec(-5.0f64..5.0, 3),
        ) {
            let points: Vec<Vec<f64>> = raw.into_iter().map(|p| p[..dim].to_vec()).collect();
            let moved: Vec<Vec<f64>> = points.iter().map(|p| p.iter().zip(&shift).map(|(a, s)| a + s).collect()).collect();
            let a = hypervolume(&canonical(&points), &HypervolumeSpec::minimize(vec![1.0; dim])).unwrap();
            let reference: Vec<f64> = shift[..dim].iter().map(|s| 1.0 + s).collect();
            let b = hypervolume(&canonical(&moved), &HypervolumeSpec::minimize(reference)).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}

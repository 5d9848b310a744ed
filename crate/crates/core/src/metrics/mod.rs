//! Pareto dominance, front extraction, hypervolume and toy oracle fronts.

mod hypervolume;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use hypervolume::{hypervolume, hypervolume_monte_carlo, HypervolumeEstimate, HypervolumeSpec, MC_SAMPLES};

use crate::ensemble::ParameterMatrix;
use crate::error::{Error, Result};
use crate::io::{atomic_write, fmt_f64};
use crate::objectives::{toy_loss, Objective, ToyConfig, VectorLoss, TOY_INITS};
use crate::simplex::{SimplexGrid, Weighting};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Minimize,
    Maximize,
}

/// A loss vector, optionally tagged with the weighting that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontSample {
    pub weighting: Option<Weighting>,
    pub losses: VectorLoss,
}

impl FrontSample {
    pub fn new(weighting: Weighting, losses: VectorLoss) -> Self {
        Self {
            weighting: Some(weighting),
            losses,
        }
    }

    /// A point with no originating weighting.
    pub fn oracle(losses: VectorLoss) -> Self {
        Self {
            weighting: None,
            losses,
        }
    }
}

fn dominates_slice(a: &[f64], b: &[f64], direction: Direction) -> bool {
    let no_worse = match direction {
        Direction::Minimize => a.iter().zip(b).all(|(x, y)| x <= y),
        Direction::Maximize => a.iter().zip(b).all(|(x, y)| x >= y),
    };
    no_worse && a != b
}

/// `a` is no worse than `b` on every task and differs somewhere.
pub fn dominates(a: &VectorLoss, b: &VectorLoss, direction: Direction) -> Result<bool> {
    Error::check_dim(a.tasks(), b.tasks(), "dominance comparison")?;
    Ok(dominates_slice(a, b, direction))
}

/// Non-dominated subset of `samples`, in input order.
///
/// Samples of mixed dimension are treated as mutually incomparable.
pub fn pareto_filter(samples: &[FrontSample], direction: Direction) -> Vec<FrontSample> {
    let keep = if samples.iter().all(|s| s.losses.tasks() == 2) {
        nondominated_2d(samples, direction)
    } else {
        nondominated_brute(samples, direction)
    };
    samples
        .iter()
        .zip(keep)
        .filter_map(|(s, k)| k.then(|| s.clone()))
        .collect()
}

fn nondominated_brute(samples: &[FrontSample], direction: Direction) -> Vec<bool> {
    samples
        .par_iter()
        .map(|s| {
            !samples.iter().any(|o| {
                o.losses.tasks() == s.losses.tasks() && dominates_slice(&o.losses, &s.losses, direction)
            })
        })
        .collect()
}

/// Sort-and-sweep filter; identical points are kept together.
fn nondominated_2d(samples: &[FrontSample], direction: Direction) -> Vec<bool> {
    let sign = match direction {
        Direction::Minimize => 1.0,
        Direction::Maximize => -1.0,
    };
    let key = |i: usize| (sign * samples[i].losses[0], sign * samples[i].losses[1]);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    let mut keep = vec![false; samples.len()];
    let mut best_y = f64::INFINITY;
    let mut start = 0;
    while start < order.len() {
        let head = key(order[start]);
        let mut end = start + 1;
        while end < order.len() && key(order[end]) == head {
            end += 1;
        }
        let survives = head.1 < best_y;
        for &i in &order[start..end] {
            keep[i] = survives;
        }
        best_y = best_y.min(head.1);
        start = end;
    }
    keep
}

/// Smallest grid resolution accepted by [`oracle_front_toy`].
pub const MIN_ORACLE_RESOLUTION: usize = 100;

/// Pareto front of the toy objective over a `resolution`² grid on [−12, 12]².
pub fn oracle_front_toy(cfg: &ToyConfig, resolution: usize) -> Result<Vec<FrontSample>> {
    if resolution < MIN_ORACLE_RESOLUTION {
        return Err(Error::invalid(format!(
            "oracle grid resolution must be at least {MIN_ORACLE_RESOLUTION}, got {resolution}"
        )));
    }
    let step = 24.0 / (resolution - 1) as f64;
    let rows: Vec<Vec<FrontSample>> = (0..resolution)
        .into_par_iter()
        .map(|i| {
            let t1 = -12.0 + step * i as f64;
            let row: Result<Vec<FrontSample>> = (0..resolution)
                .map(|j| {
                    let t2 = -12.0 + step * j as f64;
                    toy_loss(&[t1, t2], cfg).map(FrontSample::oracle)
                })
                .collect();
            row.map(|r| pareto_filter(&r, Direction::Minimize))
        })
        .collect::<Result<_>>()?;
    let candidates: Vec<FrontSample> = rows.into_iter().flatten().collect();
    Ok(pareto_filter(&candidates, Direction::Minimize))
}

/// Componentwise maximum of the toy losses at the five standard inits.
pub fn toy_reference(cfg: &ToyConfig) -> Result<Vec<f64>> {
    let mut reference = vec![f64::NEG_INFINITY; 2];
    for init in TOY_INITS {
        let l = toy_loss(&init, cfg)?;
        reference.iter_mut().zip(l.iter()).for_each(|(r, v)| *r = r.max(*v));
    }
    Ok(reference)
}

/// Losses of the interpolated model at every grid weighting, in grid order.
pub fn evaluate_subspace(
    theta: &ParameterMatrix,
    grid: &SimplexGrid,
    objective: &dyn Objective,
) -> Result<Vec<FrontSample>> {
    Error::check_dim(theta.members(), grid.dim(), "subspace grid")?;
    Error::check_dim(objective.params(), theta.params(), "subspace parameters")?;
    grid.points()
        .par_iter()
        .map(|a| {
            let point = theta.interpolate(a)?;
            Ok(FrontSample::new(a.clone(), objective.loss(&point)?))
        })
        .collect()
}

/// CSV with header `alpha_1..alpha_M,loss_1..loss_T`; alphas are blank for
/// samples without a weighting.
pub fn front_to_csv(samples: &[FrontSample], members: usize) -> Result<String> {
    let tasks = samples.first().map_or(0, |s| s.losses.tasks());
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = (1..=members)
        .map(|m| format!("alpha_{m}"))
        .chain((1..=tasks).map(|t| format!("loss_{t}")))
        .collect();
    w.write_record(&header)?;
    for s in samples {
        Error::check_dim(tasks, s.losses.tasks(), "front sample losses")?;
        let mut row: Vec<String> = match &s.weighting {
            Some(a) => {
                Error::check_dim(members, a.dim(), "front sample weighting")?;
                a.iter().map(|v| fmt_f64(*v)).collect()
            }
            None => vec![String::new(); members],
        };
        row.extend(s.losses.iter().map(|v| fmt_f64(*v)));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii csv"))
}

pub fn write_front_csv(path: &Path, samples: &[FrontSample], members: usize) -> Result<()> {
    atomic_write(path, front_to_csv(samples, members)?.as_bytes())
}

/// Parses the layout written by [`front_to_csv`].
pub fn front_from_csv(text: &str) -> std::result::Result<Vec<FrontSample>, String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| e.to_string())?.clone();
    let members = header.iter().take_while(|h| h.starts_with("alpha_")).count();
    let tasks = header.len() - members;
    for (i, h) in header.iter().enumerate() {
        let expected = if i < members {
            format!("alpha_{}", i + 1)
        } else {
            format!("loss_{}", i - members + 1)
        };
        if h != expected {
            return Err(format!("unexpected column {h:?}, wanted {expected:?}"));
        }
    }
    if tasks == 0 {
        return Err("no loss columns".into());
    }
    let parse = |s: &str| s.parse::<f64>().map_err(|e| format!("bad number {s:?}: {e}"));
    let mut out = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        let cells: Vec<&str> = record.iter().collect();
        let alphas = &cells[..members];
        let weighting = if alphas.iter().all(|c| c.is_empty()) {
            None
        } else {
            let a = alphas.iter().map(|c| parse(c)).collect::<std::result::Result<Vec<_>, _>>()?;
            Some(Weighting::new(a).map_err(|e| format!("row {}: {e}", line + 1))?)
        };
        let losses = cells[members..]
            .iter()
            .map(|c| parse(c))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let losses = VectorLoss::new(losses).map_err(|e| format!("row {}: {e}", line + 1))?;
        out.push(FrontSample { weighting, losses });
    }
    Ok(out)
}

/// Reads a front CSV; malformed files are reported with their path.
pub fn read_front_csv(path: &Path) -> Result<Vec<FrontSample>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    front_from_csv(&text).map_err(|reason| Error::Malformed {
        path: path.to_path_buf(),
        reason,
    })
}

/// Ranks starting at 1, ties sharing their average rank.
fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && x[order[j]] == x[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

/// Spearman rank correlation; NaN when either input is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    Error::check_dim(x.len(), y.len(), "rank correlation")?;
    if x.len() < 2 {
        return Err(Error::invalid("rank correlation needs at least two points"));
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::objectives::ToyObjective;
    use crate::simplex::make_grid;

    fn loss(v: &[f64]) -> VectorLoss {
        VectorLoss::new(v.to_vec()).unwrap()
    }

    fn samples(v: &[Vec<f64>]) -> Vec<FrontSample> {
        v.iter().map(|p| FrontSample::oracle(loss(p))).collect()
    }

    fn brute(v: &[FrontSample], d: Direction) -> Vec<FrontSample> {
        v.iter()
            .filter(|s| !v.iter().any(|o| dominates(&o.losses, &s.losses, d).unwrap()))
            .cloned()
            .collect()
    }

    #[test]
    fn dominance_cases() {
        let d = Direction::Minimize;
        assert!(dominates(&loss(&[1.0, 2.0]), &loss(&[2.0, 2.0]), d).unwrap());
        assert!(!dominates(&loss(&[1.0, 2.0]), &loss(&[1.0, 2.0]), d).unwrap());
        assert!(!dominates(&loss(&[1.0, 3.0]), &loss(&[3.0, 1.0]), d).unwrap());
        assert!(!dominates(&loss(&[3.0, 1.0]), &loss(&[1.0, 3.0]), d).unwrap());
        assert!(dominates(&loss(&[2.0, 2.0]), &loss(&[1.0, 2.0]), Direction::Maximize).unwrap());
        assert!(dominates(&loss(&[1.0]), &loss(&[1.0, 2.0]), d).is_err());
    }

    #[test]
    fn filter_small_set() {
        let s = samples(&[vec![1.0, 2.0], vec![2.0, 1.0], vec![2.0, 2.0]]);
        let f = pareto_filter(&s, Direction::Minimize);
        assert_eq!(f, s[..2].to_vec());
        assert!(pareto_filter(&[], Direction::Minimize).is_empty());
    }

    #[test]
    fn filter_matches_brute_force_in_3d() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vec<f64>> = (0..200).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect();
        let s = samples(&pts);
        assert_eq!(pareto_filter(&s, Direction::Minimize), brute(&s, Direction::Minimize));
    }

    #[test]
    fn oracle_front_is_nondominated() {
        let cfg = ToyConfig::default();
        let front = oracle_front_toy(&cfg, 150).unwrap();
        assert!(!front.is_empty());
        assert_eq!(pareto_filter(&front, Direction::Minimize).len(), front.len());
        assert!(oracle_front_toy(&cfg, 99).is_err());
    }

    #[test]
    fn oracle_front_scales_with_c() {
        let a = oracle_front_toy(&ToyConfig::default(), 201).unwrap();
        let b = oracle_front_toy(&ToyConfig::new(0.1).unwrap(), 201).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((0.1 * x.losses[0] - y.losses[0]).abs() <= 1e-12 * x.losses[0].abs().max(1.0));
            assert_eq!(x.losses[1], y.losses[1]);
        }
    }

    #[test]
    fn subspace_endpoints_and_counts() {
        let obj = ToyObjective::new(ToyConfig::default());
        let theta = ParameterMatrix::from_rows(vec![vec![-8.5, 7.5], vec![9.0, -1.0]]).unwrap();
        let two = evaluate_subspace(&theta, &make_grid(2, 2).unwrap(), &obj).unwrap();
        assert_eq!(two.len(), 2);
        let eleven = evaluate_subspace(&theta, &make_grid(2, 11).unwrap(), &obj).unwrap();
        assert_eq!(eleven.len(), 11);
        let first = obj.loss(theta.row(0)).unwrap();
        let last = obj.loss(theta.row(1)).unwrap();
        for (x, y) in eleven[0].losses.iter().zip(first.iter()) {
            assert!((x - y).abs() <= 1e-12);
        }
        for (x, y) in eleven[10].losses.iter().zip(last.iter()) {
            assert!((x - y).abs() <= 1e-12);
        }
        assert!(evaluate_subspace(&theta, &make_grid(3, 11).unwrap(), &obj).is_err());
    }

    #[test]
    fn three_member_grid_has_66_points() {
        let obj = ToyObjective::new(ToyConfig::default());
        let theta = ParameterMatrix::from_rows(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = evaluate_subspace(&theta, &make_grid(3, 11).unwrap(), &obj).unwrap();
        assert_eq!(s.len(), 66);
    }

    #[test]
    fn csv_round_trip_with_blank_alphas() {
        let s = vec![
            FrontSample::new(Weighting::new(vec![0.25, 0.75]).unwrap(), loss(&[1.5, -2.0])),
            FrontSample::oracle(loss(&[0.1, 1.0 / 3.0])),
        ];
        let text = front_to_csv(&s, 2).unwrap();
        assert!(text.starts_with("alpha_1,alpha_2,loss_1,loss_2\n"));
        assert!(text.lines().nth(2).unwrap().starts_with(",,"));
        let back = front_from_csv(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(front_to_csv(&back, 2).unwrap(), text);
        assert!(front_from_csv("alpha_1,oops\n1,2\n").is_err());
    }

    #[test]
    fn spearman_known_values() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(spearman(&x, &[10.0, 20.0, 30.0, 40.0]).unwrap(), 1.0);
        assert_eq!(spearman(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
        // ranks of y with a tie: 1, 2.5, 2.5, 4
        let r = spearman(&x, &[1.0, 5.0, 5.0, 9.0]).unwrap();
        assert!((r - 4.5 / 4.5f64.sqrt() / 5.0f64.sqrt()).abs() < 1e-12);
        assert!(spearman(&x, &[1.0; 4]).unwrap().is_nan());
    }

    proptest! {
        #[test]
        fn filter_is_idempotent_and_matches_brute_force(
            raw in prop::collection::vec(prop::collection::vec(-3i32..3, 2), 0..40),
            maximize in any::<bool>(),
        ) {
            let d = if maximize { Direction::Maximize } else { Direction::Minimize };
            let pts: Vec<Vec<f64>> = raw.iter().map(|p| p.iter().map(|&v| v as f64).collect()).collect();
            let s = samples(&pts);
            let once = pareto_filter(&s, d);
            prop_assert_eq!(&once, &brute(&s, d));
            prop_assert_eq!(pareto_filter(&once, d), once);
        }
    }
}

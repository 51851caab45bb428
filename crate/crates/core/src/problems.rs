//! ZDT1–ZDT6 and DTLZ1–DTLZ6 test problems with their analytic fronts.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::objective::{ObjectiveVector, Truncation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Zdt1,
    Zdt2,
    Zdt3,
    Zdt4,
    Zdt5,
    Zdt6,
    Dtlz1,
    Dtlz2,
    Dtlz3,
    Dtlz4,
    Dtlz5,
    Dtlz6,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 12] = [
        ProblemKind::Zdt1,
        ProblemKind::Zdt2,
        ProblemKind::Zdt3,
        ProblemKind::Zdt4,
        ProblemKind::Zdt5,
        ProblemKind::Zdt6,
        ProblemKind::Dtlz1,
        ProblemKind::Dtlz2,
        ProblemKind::Dtlz3,
        ProblemKind::Dtlz4,
        ProblemKind::Dtlz5,
        ProblemKind::Dtlz6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Zdt1 => "zdt1",
            ProblemKind::Zdt2 => "zdt2",
            ProblemKind::Zdt3 => "zdt3",
            ProblemKind::Zdt4 => "zdt4",
            ProblemKind::Zdt5 => "zdt5",
            ProblemKind::Zdt6 => "zdt6",
            ProblemKind::Dtlz1 => "dtlz1",
            ProblemKind::Dtlz2 => "dtlz2",
            ProblemKind::Dtlz3 => "dtlz3",
            ProblemKind::Dtlz4 => "dtlz4",
            ProblemKind::Dtlz5 => "dtlz5",
            ProblemKind::Dtlz6 => "dtlz6",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        ProblemKind::ALL.into_iter().find(|k| k.name() == lower).ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

/// DTLZ objective count used throughout.
const DTLZ_OBJECTIVES: usize = 3;
/// Bit lengths of the ZDT5 substrings.
const ZDT5_BITS: [usize; 11] = [30, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5];
const DTLZ4_ALPHA: f64 = 100.0;

/// f1 ranges of the five disconnected ZDT3 front segments.
const ZDT3_SEGMENTS: [(f64, f64); 5] = [
    (0.0, 0.083_001_534_9),
    (0.182_228_728_0, 0.257_762_363_4),
    (0.409_313_674_8, 0.453_882_104_1),
    (0.618_396_794_4, 0.652_511_703_8),
    (0.823_331_798_3, 0.851_832_865_4),
];
/// Smallest f1 reachable on the ZDT6 front.
const ZDT6_F1_MIN: f64 = 0.280_775_319_1;

/// A benchmark problem with fixed dimensions and box bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    kind: ProblemKind,
    bounds: Vec<(f64, f64)>,
    objective_count: usize,
}

impl Problem {
    pub fn new(kind: ProblemKind) -> Self {
        let (n, m) = match kind {
            ProblemKind::Zdt1 | ProblemKind::Zdt2 | ProblemKind::Zdt3 => (30, 2),
            ProblemKind::Zdt4 | ProblemKind::Zdt6 => (10, 2),
            ProblemKind::Zdt5 => (ZDT5_BITS.iter().sum(), 2),
            ProblemKind::Dtlz1 => (DTLZ_OBJECTIVES + 5 - 1, DTLZ_OBJECTIVES),
            _ => (DTLZ_OBJECTIVES + 10 - 1, DTLZ_OBJECTIVES),
        };
        let bounds =
            (0..n).map(|i| if kind == ProblemKind::Zdt4 && i > 0 { (-5.0, 5.0) } else { (0.0, 1.0) }).collect();
        Problem { kind, bounds, objective_count: m }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        Ok(Problem::new(name.parse()?))
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn decision_count(&self) -> usize {
        self.bounds.len()
    }

    pub fn objective_count(&self) -> usize {
        self.objective_count
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// ZDT5 genes are bits stored as 0.0 / 1.0.
    pub fn is_binary(&self) -> bool {
        self.kind == ProblemKind::Zdt5
    }

    /// Reference point for 2-D hypervolume, `None` for 3-objective problems.
    pub fn hypervolume_reference(&self) -> Option<[f64; 2]> {
        match self.kind {
            ProblemKind::Zdt5 => Some([32.0, 71.0]),
            k if k.name().starts_with("zdt") => Some([11.0, 11.0]),
            _ => None,
        }
    }

    /// Truncation policy for archives on this problem: hypervolume
    /// contribution where a 2-D reference point exists, crowding otherwise.
    pub fn archive_truncation(&self) -> Truncation {
        match self.hypervolume_reference() {
            Some(r) => Truncation::Hypervolume2d(r),
            None => Truncation::Crowding,
        }
    }

    pub fn evaluate(&self, genome: &[f64]) -> Result<ObjectiveVector> {
        if genome.len() != self.decision_count() {
            return Err(Error::contract(format!(
                "{} expects {} genes, got {}",
                self.name(),
                self.decision_count(),
                genome.len()
            )));
        }
        for (i, (&x, &(lo, hi))) in genome.iter().zip(&self.bounds).enumerate() {
            if !(lo..=hi).contains(&x) {
                return Err(Error::contract(format!("gene {i} = {x} outside [{lo}, {hi}] for {}", self.name())));
            }
        }
        ObjectiveVector::new(self.evaluate_unchecked(genome))
    }

    fn evaluate_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len() as f64;
        match self.kind {
            ProblemKind::Zdt1 => {
                let g = 1.0 + 9.0 * x[1..].iter().sum::<f64>() / (n - 1.0);
                let f1 = x[0];
                vec![f1, g * (1.0 - (f1 / g).sqrt())]
            }
            ProblemKind::Zdt2 => {
                let g = 1.0 + 9.0 * x[1..].iter().sum::<f64>() / (n - 1.0);
                let f1 = x[0];
                vec![f1, g * (1.0 - (f1 / g).powi(2))]
            }
            ProblemKind::Zdt3 => {
                let g = 1.0 + 9.0 * x[1..].iter().sum::<f64>() / (n - 1.0);
                let f1 = x[0];
                let h = 1.0 - (f1 / g).sqrt() - (f1 / g) * (10.0 * PI * f1).sin();
                vec![f1, g * h]
            }
            ProblemKind::Zdt4 => {
                let g =
                    1.0 + 10.0 * (n - 1.0) + x[1..].iter().map(|v| v * v - 10.0 * (4.0 * PI * v).cos()).sum::<f64>();
                let f1 = x[0];
                vec![f1, g * (1.0 - (f1 / g).sqrt())]
            }
            ProblemKind::Zdt5 => {
                let mut ones = Vec::with_capacity(ZDT5_BITS.len());
                let mut at = 0;
                for len in ZDT5_BITS {
                    ones.push(x[at..at + len].iter().filter(|&&b| b >= 0.5).count());
                    at += len;
                }
                let f1 = 1.0 + ones[0] as f64;
                let g: f64 = ones[1..].iter().map(|&u| if u < 5 { 2.0 + u as f64 } else { 1.0 }).sum();
                vec![f1, g / f1]
            }
            ProblemKind::Zdt6 => {
                let f1 = 1.0 - (-4.0 * x[0]).exp() * (6.0 * PI * x[0]).sin().powi(6);
                let g = 1.0 + 9.0 * (x[1..].iter().sum::<f64>() / (n - 1.0)).powf(0.25);
                vec![f1, g * (1.0 - (f1 / g).powi(2))]
            }
            ProblemKind::Dtlz1 => {
                let m = self.objective_count;
                let g = dtlz_rastrigin_g(&x[m - 1..]);
                let mut f = vec![0.5 * (1.0 + g); m];
                for i in 0..m {
                    for &xj in &x[..m - 1 - i] {
                        f[i] *= xj;
                    }
                    if i > 0 {
                        f[i] *= 1.0 - x[m - 1 - i];
                    }
                }
                f
            }
            ProblemKind::Dtlz2 | ProblemKind::Dtlz3 | ProblemKind::Dtlz4 => {
                let m = self.objective_count;
                let tail = &x[m - 1..];
                let g = if self.kind == ProblemKind::Dtlz3 {
                    dtlz_rastrigin_g(tail)
                } else {
                    tail.iter().map(|v| (v - 0.5).powi(2)).sum()
                };
                let alpha = if self.kind == ProblemKind::Dtlz4 { DTLZ4_ALPHA } else { 1.0 };
                let theta: Vec<f64> = x[..m - 1].iter().map(|v| v.powf(alpha) * PI / 2.0).collect();
                spherical(&theta, g)
            }
            ProblemKind::Dtlz5 | ProblemKind::Dtlz6 => {
                let m = self.objective_count;
                let tail = &x[m - 1..];
                let g: f64 = if self.kind == ProblemKind::Dtlz5 {
                    tail.iter().map(|v| (v - 0.5).powi(2)).sum()
                } else {
                    tail.iter().map(|v| v.powf(0.1)).sum()
                };
                let mut theta = Vec::with_capacity(m - 1);
                theta.push(x[0] * PI / 2.0);
                for &xi in &x[1..m - 1] {
                    theta.push(PI / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * xi));
                }
                spherical(&theta, g)
            }
        }
    }

    /// Point on the analytic Pareto front at parameter(s) in `[0, 1]`.
    ///
    /// Two-objective problems use `u[0]` only; the three-objective problems
    /// use `u[0]` and `u[1]` (DTLZ5/6 fronts are curves and ignore `u[1]`).
    pub fn front_point(&self, u: [f64; 2]) -> ObjectiveVector {
        let values = match self.kind {
            ProblemKind::Zdt1 | ProblemKind::Zdt4 => vec![u[0], 1.0 - u[0].sqrt()],
            ProblemKind::Zdt2 => vec![u[0], 1.0 - u[0] * u[0]],
            ProblemKind::Zdt3 => {
                let f1 = zdt3_f1(u[0]);
                vec![f1, 1.0 - f1.sqrt() - f1 * (10.0 * PI * f1).sin()]
            }
            ProblemKind::Zdt5 => {
                let f1 = 1.0 + (u[0] * 30.0).round();
                vec![f1, 10.0 / f1]
            }
            ProblemKind::Zdt6 => {
                let f1 = ZDT6_F1_MIN + u[0] * (1.0 - ZDT6_F1_MIN);
                vec![f1, 1.0 - f1 * f1]
            }
            ProblemKind::Dtlz1 => {
                vec![0.5 * u[0] * u[1], 0.5 * u[0] * (1.0 - u[1]), 0.5 * (1.0 - u[0])]
            }
            ProblemKind::Dtlz2 | ProblemKind::Dtlz3 | ProblemKind::Dtlz4 => {
                spherical(&[u[0] * PI / 2.0, u[1] * PI / 2.0], 0.0)
            }
            ProblemKind::Dtlz5 | ProblemKind::Dtlz6 => spherical(&[u[0] * PI / 2.0, PI / 4.0], 0.0),
        };
        ObjectiveVector::new(values).expect("front points are finite")
    }

    /// `count` points spread uniformly over the front's parameter space.
    ///
    /// The first point is always an extreme point of the front.
    pub fn true_front_sample(&self, count: usize) -> Vec<ObjectiveVector> {
        if count == 0 {
            return Vec::new();
        }
        if self.objective_count == 2 || matches!(self.kind, ProblemKind::Dtlz5 | ProblemKind::Dtlz6) {
            return (0..count)
                .map(|i| {
                    let u = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
                    self.front_point([u, 0.0])
                })
                .collect();
        }
        // Fibonacci lattice over the unit square.
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        (0..count)
            .map(|i| {
                let u0 = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
                let u1 = (i as f64 * golden).fract();
                self.front_point([u0, u1])
            })
            .collect()
    }
}

fn dtlz_rastrigin_g(tail: &[f64]) -> f64 {
    let s: f64 = tail.iter().map(|v| (v - 0.5).powi(2) - (20.0 * PI * (v - 0.5)).cos()).sum();
    100.0 * (tail.len() as f64 + s)
}

/// DTLZ2-style spherical mapping of angles onto a radius `1 + g` shell.
fn spherical(theta: &[f64], g: f64) -> Vec<f64> {
    let m = theta.len() + 1;
    (0..m)
        .map(|i| {
            let mut f = 1.0 + g;
            for t in &theta[..m - 1 - i] {
                f *= t.cos();
            }
            if i > 0 {
                f *= theta[m - 1 - i].sin();
            }
            f
        })
        .collect()
}

/// Maps `u` in `[0, 1]` onto the union of ZDT3 front segments by arc length in f1.
fn zdt3_f1(u: f64) -> f64 {
    let total: f64 = ZDT3_SEGMENTS.iter().map(|(a, b)| b - a).sum();
    let mut remaining = u.clamp(0.0, 1.0) * total;
    for (a, b) in ZDT3_SEGMENTS {
        let len = b - a;
        if remaining <= len {
            return a + remaining;
        }
        remaining -= len;
    }
    ZDT3_SEGMENTS[4].1
}

/// Mean Euclidean distance from each front point to its nearest reference point.
pub fn generational_distance(front: &[ObjectiveVector], reference: &[ObjectiveVector]) -> Result<f64> {
    if front.is_empty() || reference.is_empty() {
        return Err(Error::contract("generational distance needs non-empty fronts"));
    }
    let dim = reference[0].len();
    if front.iter().chain(reference).any(|p| p.len() != dim) {
        return Err(Error::contract("generational distance needs equal dimensions"));
    }
    let total: f64 = front
        .iter()
        .map(|p| {
            reference
                .iter()
                .map(|r| p.values().iter().zip(r.values()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .sum();
    Ok(total / front.len() as f64)
}

/// Area dominated by a 2-objective front and bounded by `reference`.
///
/// Points that do not strictly dominate the reference point are skipped.
/// Dominated input points contribute nothing.
pub fn hypervolume_2d(front: &[ObjectiveVector], reference: [f64; 2]) -> Result<f64> {
    if front.iter().any(|p| p.len() != 2) {
        return Err(Error::contract("2-D hypervolume needs 2-objective points"));
    }
    let mut pts: Vec<(f64, f64)> = front
        .iter()
        .map(|p| (p.values()[0], p.values()[1]))
        .filter(|&(a, b)| a < reference[0] && b < reference[1])
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for (f1, f2) in pts {
        if f2 < ceiling {
            area += (reference[0] - f1) * (ceiling - f2);
            ceiling = f2;
        }
    }
    Ok(area)
}

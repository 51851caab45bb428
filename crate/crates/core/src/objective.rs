//! Objective vectors, Pareto dominance and the bounded external archive.
//!
//! All objectives are minimized.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Evaluated objective values of one solution.
///
/// Always holds at least two finite values.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::contract(format!("objective vector needs at least 2 values, got {}", values.len())));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::contract(format!("non-finite objective value {v}")));
        }
        Ok(ObjectiveVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Bitwise equality, used for duplicate detection.
    pub fn same_bits(&self, other: &ObjectiveVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl fmt::Display for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A genome together with its evaluated objectives.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub genome: Vec<f64>,
    pub objectives: ObjectiveVector,
}

/// One member of an evolving population, pinned to a topology node.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genome: Vec<f64>,
    /// `None` until the individual has been evaluated.
    pub objectives: Option<ObjectiveVector>,
    pub node_id: usize,
}

impl Individual {
    pub fn unevaluated(genome: Vec<f64>, node_id: usize) -> Self {
        Individual { genome, objectives: None, node_id }
    }

    pub fn is_evaluated(&self) -> bool {
        self.objectives.is_some()
    }

    pub fn to_solution(&self) -> Result<Solution> {
        match &self.objectives {
            Some(obj) => Ok(Solution { genome: self.genome.clone(), objectives: obj.clone() }),
            None => Err(Error::contract(format!("individual at node {} is not evaluated", self.node_id))),
        }
    }
}

/// Pareto dominance on raw slices. Both slices must have equal length.
#[inline]
pub(crate) fn dominates_raw(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

/// `true` iff `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::contract(format!("cannot compare objective vectors of length {} and {}", a.len(), b.len())));
    }
    Ok(dominates_raw(a.values(), b.values()))
}

/// Returns the points that no other input point dominates, in input order.
///
/// Equal points do not dominate each other, so duplicates survive together.
pub fn nondominated_filter(points: &[ObjectiveVector]) -> Result<Vec<ObjectiveVector>> {
    let keep = nondominated_indices(points)?;
    Ok(keep.into_iter().map(|i| points[i].clone()).collect())
}

pub(crate) fn nondominated_indices(points: &[ObjectiveVector]) -> Result<Vec<usize>> {
    let Some(first) = points.first() else {
        return Ok(Vec::new());
    };
    let dim = first.len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::contract(format!("mixed dimensions in point set: {} and {}", dim, p.len())));
    }
    Ok((0..points.len())
        .filter(|&i| !points.iter().enumerate().any(|(j, q)| j != i && dominates_raw(q.values(), points[i].values())))
        .collect())
}

/// What happened to a candidate offered to a [`ParetoArchive`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertOutcome {
    Accepted,
    /// The candidate entered but the archive overflowed and one member was
    /// truncated. `candidate_kept` is false when the candidate itself was the
    /// most crowded member.
    AcceptedWithTruncation {
        candidate_kept: bool,
    },
    RejectedDominated,
    /// An identical objective vector is already archived.
    RejectedDuplicate,
}

impl InsertOutcome {
    pub fn candidate_kept(self) -> bool {
        match self {
            InsertOutcome::Accepted => true,
            InsertOutcome::AcceptedWithTruncation { candidate_kept } => candidate_kept,
            InsertOutcome::RejectedDominated | InsertOutcome::RejectedDuplicate => false,
        }
    }
}

/// How an overflowing archive picks the member to drop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Truncation {
    /// Smallest crowding distance. Boundary members of every objective have
    /// infinite distance, so they are only removed when every member is a
    /// boundary member.
    Crowding,
    /// Smallest exclusive 2-D hypervolume contribution with respect to the
    /// given reference point. Never lowers the archive's hypervolume.
    Hypervolume2d([f64; 2]),
}

/// Bounded set of mutually non-dominated solutions.
///
/// Ties in truncation go to the lowest index.
#[derive(Clone, Debug)]
pub struct ParetoArchive {
    members: Vec<Solution>,
    capacity: usize,
    truncation: Truncation,
}

impl ParetoArchive {
    /// Archive with crowding-distance truncation.
    pub fn new(capacity: usize) -> Result<Self> {
        Self::with_truncation(capacity, Truncation::Crowding)
    }

    pub fn with_truncation(capacity: usize, truncation: Truncation) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::contract("archive capacity must be positive"));
        }
        Ok(ParetoArchive { members: Vec::new(), capacity, truncation })
    }

    pub fn unbounded() -> Self {
        ParetoArchive { members: Vec::new(), capacity: usize::MAX, truncation: Truncation::Crowding }
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Solution] {
        &self.members
    }

    pub fn objectives(&self) -> Vec<ObjectiveVector> {
        self.members.iter().map(|m| m.objectives.clone()).collect()
    }

    pub fn into_members(self) -> Vec<Solution> {
        self.members
    }

    /// Offers an evaluated individual to the archive.
    pub fn insert(&mut self, candidate: &Individual) -> Result<InsertOutcome> {
        let solution = candidate.to_solution()?;
        self.insert_solution(solution)
    }

    pub fn insert_solution(&mut self, candidate: Solution) -> Result<InsertOutcome> {
        if let Some(m) = self.members.first() {
            if m.objectives.len() != candidate.objectives.len() {
                return Err(Error::contract(format!(
                    "archive holds {}-objective points, candidate has {}",
                    m.objectives.len(),
                    candidate.objectives.len()
                )));
            }
        }
        let cand = candidate.objectives.values();
        for m in &self.members {
            let mv = m.objectives.values();
            if dominates_raw(mv, cand) {
                return Ok(InsertOutcome::RejectedDominated);
            }
            if m.objectives.same_bits(&candidate.objectives) {
                return Ok(InsertOutcome::RejectedDuplicate);
            }
        }
        self.members.retain(|m| !dominates_raw(cand, m.objectives.values()));
        self.members.push(candidate);
        if self.members.len() <= self.capacity {
            return Ok(InsertOutcome::Accepted);
        }
        let victim = match self.truncation {
            Truncation::Crowding => most_crowded(&self.members),
            Truncation::Hypervolume2d(reference) => least_contributor(&self.members, reference)?,
        };
        let candidate_kept = victim != self.members.len() - 1;
        self.members.remove(victim);
        Ok(InsertOutcome::AcceptedWithTruncation { candidate_kept })
    }
}

/// Crowding distance of every point; boundary points get `f64::INFINITY`.
#[allow(clippy::needless_range_loop)]
pub fn crowding_distances(points: &[&[f64]]) -> Vec<f64> {
    let n = points.len();
    let mut dist = vec![0.0; n];
    if n == 0 {
        return dist;
    }
    let dims = points[0].len();
    let mut order: Vec<usize> = (0..n).collect();
    for d in 0..dims {
        order.sort_by(|&a, &b| points[a][d].total_cmp(&points[b][d]).then(a.cmp(&b)));
        let lo = points[order[0]][d];
        let hi = points[order[n - 1]][d];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for w in order.windows(3) {
            let (prev, mid, next) = (w[0], w[1], w[2]);
            dist[mid] += (points[next][d] - points[prev][d]) / span;
        }
    }
    dist
}

fn most_crowded(members: &[Solution]) -> usize {
    let pts: Vec<&[f64]> = members.iter().map(|m| m.objectives.values()).collect();
    let dist = crowding_distances(&pts);
    let mut best = 0;
    for (i, d) in dist.iter().enumerate() {
        if *d < dist[best] {
            best = i;
        }
    }
    best
}

/// Exclusive hypervolume contribution of each point of a mutually
/// non-dominated 2-D set. Points outside the reference box contribute zero.
pub fn hypervolume_contributions_2d(points: &[&[f64]], reference: [f64; 2]) -> Vec<f64> {
    let mut contrib = vec![0.0; points.len()];
    let mut inside: Vec<usize> =
        (0..points.len()).filter(|&i| points[i][0] < reference[0] && points[i][1] < reference[1]).collect();
    inside.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]).then(a.cmp(&b)));
    for (k, &i) in inside.iter().enumerate() {
        let right = inside.get(k + 1).map_or(reference[0], |&j| points[j][0]);
        let above = if k == 0 { reference[1] } else { points[inside[k - 1]][1] };
        contrib[i] = (right - points[i][0]) * (above - points[i][1]);
    }
    contrib
}

fn least_contributor(members: &[Solution], reference: [f64; 2]) -> Result<usize> {
    if members[0].objectives.len() != 2 {
        return Err(Error::contract("hypervolume truncation needs 2-objective points"));
    }
    let pts: Vec<&[f64]> = members.iter().map(|m| m.objectives.values()).collect();
    let contrib = hypervolume_contributions_2d(&pts, reference);
    let mut best = 0;
    for (i, c) in contrib.iter().enumerate() {
        if *c < contrib[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Writes a front as one point per line, values separated by a single space.
pub fn write_front<W: Write>(mut out: W, points: &[ObjectiveVector]) -> Result<()> {
    for p in points {
        writeln!(out, "{p}")?;
    }
    Ok(())
}

/// Parses the text format of [`write_front`]. Blank and `#` lines are skipped.
pub fn read_front<R: BufRead>(input: R) -> Result<Vec<ObjectiveVector>> {
    let mut points = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let values = line
            .split(' ')
            .map(|tok| tok.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::decode(format!("line {}: {e}", lineno + 1)))?;
        let v = ObjectiveVector::new(values).map_err(|e| Error::decode(format!("line {}: {e}", lineno + 1)))?;
        points.push(v);
    }
    Ok(points)
}

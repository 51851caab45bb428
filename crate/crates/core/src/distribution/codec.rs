//! Big-endian binary encoding of island tasks and their outcomes.
//!
//! Both layouts open with a 4-byte tag and a version byte. Reals are IEEE-754
//! bit patterns, so a decoded value is bit-identical to the encoded one.

use std::time::Duration;

use super::wire::{PayloadReader, PayloadWriter};
use crate::emo_strategy::{IslandOutcome, IslandTask};
use crate::engine::{EngineParams, EngineResult, EvaluationCost};
use crate::error::{Error, Result};
use crate::objective::{Individual, ObjectiveVector, Solution};
use crate::problems::ProblemKind;
use crate::topology::TopologySpec;

const TASK_TAG: [u8; 4] = *b"ITSK";
const OUTCOME_TAG: [u8; 4] = *b"IOUT";
const VERSION: u8 = 1;

fn nanos(d: Duration) -> u64 {
    u64::try_from(d.as_nanos()).unwrap_or(u64::MAX)
}

fn header(r: &mut PayloadReader<'_>, tag: [u8; 4]) -> Result<()> {
    let got = r.take(4)?;
    if got != tag {
        return Err(Error::decode(format!("expected tag {:?}, got {:?}", tag, got)));
    }
    let v = r.u8()?;
    if v != VERSION {
        return Err(Error::decode(format!("unsupported layout version {v}")));
    }
    Ok(())
}

fn usize_of(v: u32) -> usize {
    v as usize
}

fn write_topology(w: &mut PayloadWriter, t: &TopologySpec) {
    match *t {
        TopologySpec::Lattice { wrap } => {
            w.u8(0).u8(u8::from(wrap));
        }
        TopologySpec::SmallWorld { k, p } => {
            w.u8(1).u32(k as u32).f64(p);
        }
        TopologySpec::ScaleFree { m0, m } => {
            w.u8(2).u32(m0 as u32).u32(m as u32);
        }
        TopologySpec::Random { p } => {
            w.u8(3).f64(p);
        }
    }
}

fn read_topology(r: &mut PayloadReader<'_>) -> Result<TopologySpec> {
    Ok(match r.u8()? {
        0 => TopologySpec::Lattice {
            wrap: match r.u8()? {
                0 => false,
                1 => true,
                b => return Err(Error::decode(format!("bad wrap flag {b}"))),
            },
        },
        1 => TopologySpec::SmallWorld { k: usize_of(r.u32()?), p: r.f64()? },
        2 => TopologySpec::ScaleFree { m0: usize_of(r.u32()?), m: usize_of(r.u32()?) },
        3 => TopologySpec::Random { p: r.f64()? },
        k => return Err(Error::decode(format!("unknown topology kind {k}"))),
    })
}

fn write_params(w: &mut PayloadWriter, p: &EngineParams) {
    w.u32(p.generations).f64(p.crossover_probability).f64(p.crossover_distribution_index);
    match p.mutation_probability {
        Some(m) => w.u8(1).f64(m),
        None => w.u8(0),
    };
    w.f64(p.mutation_distribution_index).u64(p.seed);
    match p.archive_capacity {
        Some(c) => w.u8(1).u64(c as u64),
        None => w.u8(0),
    };
    let (kind, d) = match p.evaluation_cost {
        EvaluationCost::None => (0, Duration::ZERO),
        EvaluationCost::Spin(d) => (1, d),
        EvaluationCost::Sleep(d) => (2, d),
    };
    w.u8(kind).u64(nanos(d));
}

fn read_flag(r: &mut PayloadReader<'_>) -> Result<bool> {
    match r.u8()? {
        0 => Ok(false),
        1 => Ok(true),
        b => Err(Error::decode(format!("bad option flag {b}"))),
    }
}

fn read_params(r: &mut PayloadReader<'_>) -> Result<EngineParams> {
    let generations = r.u32()?;
    let crossover_probability = r.f64()?;
    let crossover_distribution_index = r.f64()?;
    let mutation_probability = if read_flag(r)? { Some(r.f64()?) } else { None };
    let mutation_distribution_index = r.f64()?;
    let seed = r.u64()?;
    let archive_capacity = if read_flag(r)? {
        Some(usize::try_from(r.u64()?).map_err(|_| Error::decode("archive capacity overflows"))?)
    } else {
        None
    };
    let kind = r.u8()?;
    let d = Duration::from_nanos(r.u64()?);
    let evaluation_cost = match kind {
        0 => EvaluationCost::None,
        1 => EvaluationCost::Spin(d),
        2 => EvaluationCost::Sleep(d),
        k => return Err(Error::decode(format!("unknown evaluation cost kind {k}"))),
    };
    Ok(EngineParams {
        generations,
        crossover_probability,
        crossover_distribution_index,
        mutation_probability,
        mutation_distribution_index,
        seed,
        archive_capacity,
        evaluation_cost,
    })
}

fn write_matrix<'a>(w: &mut PayloadWriter, rows: impl ExactSizeIterator<Item = &'a [f64]>, cols: usize) {
    w.u32(rows.len() as u32).u32(cols as u32);
    for row in rows {
        for &v in row {
            w.f64(v);
        }
    }
}

fn read_reals(r: &mut PayloadReader<'_>, n: usize) -> Result<Vec<f64>> {
    // Length check up front so a corrupt count cannot trigger a huge allocation.
    let bytes = r.take(n.checked_mul(8).ok_or_else(|| Error::decode("matrix too large"))?)?;
    Ok(bytes.chunks_exact(8).map(|c| f64::from_bits(u64::from_be_bytes(c.try_into().expect("8")))).collect())
}

fn read_matrix(r: &mut PayloadReader<'_>) -> Result<Vec<Vec<f64>>> {
    let rows = usize_of(r.u32()?);
    let cols = usize_of(r.u32()?);
    let flat = read_reals(r, rows.checked_mul(cols).ok_or_else(|| Error::decode("matrix too large"))?)?;
    if cols == 0 {
        return Ok(vec![Vec::new(); rows]);
    }
    Ok(flat.chunks_exact(cols).map(<[f64]>::to_vec).collect())
}

pub fn encode_island_task(t: &IslandTask) -> Vec<u8> {
    let mut w = PayloadWriter::new();
    w.bytes(&TASK_TAG).u8(VERSION);
    w.u32(t.island_id).u32(t.iteration).string(t.problem.name());
    write_topology(&mut w, &t.topology);
    w.u64(t.topology_seed).u32(t.node_count);
    write_params(&mut w, &t.params);
    match &t.injected {
        Some(rows) if !rows.is_empty() => {
            let cols = rows[0].len();
            write_matrix(&mut w, rows.iter().map(Vec::as_slice), cols);
        }
        // An empty matrix and no matrix both encode as zero rows.
        _ => {
            w.u32(0).u32(0);
        }
    }
    w.finish()
}

pub fn decode_island_task(payload: &[u8]) -> Result<IslandTask> {
    let mut r = PayloadReader::new(payload);
    header(&mut r, TASK_TAG)?;
    let island_id = r.u32()?;
    let iteration = r.u32()?;
    let name = r.string()?;
    let problem: ProblemKind = name.parse().map_err(|_| Error::decode(format!("unknown problem `{name}`")))?;
    let topology = read_topology(&mut r)?;
    let topology_seed = r.u64()?;
    let node_count = r.u32()?;
    let params = read_params(&mut r)?;
    let matrix = read_matrix(&mut r)?;
    r.finish()?;
    Ok(IslandTask {
        island_id,
        iteration,
        problem,
        topology,
        topology_seed,
        node_count,
        params,
        injected: if matrix.is_empty() { None } else { Some(matrix) },
    })
}

fn objective_vector(values: Vec<f64>) -> Result<ObjectiveVector> {
    ObjectiveVector::new(values).map_err(|e| Error::decode(e.to_string()))
}

pub fn encode_island_outcome(o: &IslandOutcome) -> Vec<u8> {
    let res = &o.result;
    let genes = res.final_population.first().map_or(0, |i| i.genome.len());
    let objs = res
        .front
        .first()
        .map(|s| s.objectives.len())
        .or_else(|| res.final_population.iter().find_map(|i| i.objectives.as_ref().map(|o| o.len())))
        .unwrap_or(0);
    let front_genes = res.front.first().map_or(genes, |s| s.genome.len());

    let mut w = PayloadWriter::new();
    w.bytes(&OUTCOME_TAG).u8(VERSION);
    w.u32(o.island_id).u32(o.iteration).u64(nanos(res.pure_execution_time));
    w.u32(objs as u32);
    write_matrix(&mut w, res.front.iter().map(|s| s.genome.as_slice()), front_genes);
    for s in &res.front {
        for &v in s.objectives.values() {
            w.f64(v);
        }
    }
    write_matrix(&mut w, res.final_population.iter().map(|i| i.genome.as_slice()), genes);
    for ind in &res.final_population {
        w.u32(ind.node_id as u32);
        match &ind.objectives {
            Some(o) => {
                w.u8(1);
                for &v in o.values() {
                    w.f64(v);
                }
            }
            None => {
                w.u8(0);
            }
        }
    }
    w.finish()
}

pub fn decode_island_outcome(payload: &[u8]) -> Result<IslandOutcome> {
    let mut r = PayloadReader::new(payload);
    header(&mut r, OUTCOME_TAG)?;
    let island_id = r.u32()?;
    let iteration = r.u32()?;
    let pure_execution_time = Duration::from_nanos(r.u64()?);
    let objs = usize_of(r.u32()?);

    let front_genomes = read_matrix(&mut r)?;
    let mut front = Vec::with_capacity(front_genomes.len());
    for genome in front_genomes {
        front.push(Solution { genome, objectives: objective_vector(read_reals(&mut r, objs)?)? });
    }

    let genomes = read_matrix(&mut r)?;
    let mut final_population = Vec::with_capacity(genomes.len());
    for genome in genomes {
        let node_id = usize_of(r.u32()?);
        let objectives = if read_flag(&mut r)? { Some(objective_vector(read_reals(&mut r, objs)?)?) } else { None };
        final_population.push(Individual { genome, objectives, node_id });
    }
    r.finish()?;
    Ok(IslandOutcome { island_id, iteration, result: EngineResult { front, final_population, pure_execution_time } })
}

// SPDX-License-Identifier: Apache-2.0

//! Degree exploration. Every subcircuit is first factorized at every degree
//! below its output count; then, one step at a time, the subcircuit whose
//! decrement costs the least accuracy is lowered, until the next step would
//! break the error threshold.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bmf::AssoConfig;
use crate::error::{Error, Result};
use crate::netlist::{Netlist, DEFAULT_TRUTH_TABLE_CAP};
use crate::partition::{extract, substitute_many, Partition};
use crate::qor::{ErrorSummary, Evaluator, Metric, OutputInterpretation, Sampling};
use crate::resynth::{approximate_table, area_proxy, Approximation, AreaCost};

/// Default sample count for candidate probes.
pub const DEFAULT_PROBE_SAMPLES: usize = 100_000;

/// All profiled degrees of one subcircuit.
#[derive(Debug, Clone)]
pub struct SubcircuitProfile {
    pub id: usize,
    /// Output count, which is also the exact degree.
    pub outputs: usize,
    pub original_area: AreaCost,
    /// Entry `f - 1` holds degree `f`, for `f` in `1..outputs`.
    pub entries: Vec<Approximation>,
}

impl SubcircuitProfile {
    pub fn approximable(&self) -> bool {
        self.outputs >= 2
    }

    pub fn approximation(&self, f: usize) -> Option<&Approximation> {
        f.checked_sub(1).and_then(|i| self.entries.get(i))
    }

    /// Area at degree `f`; the exact degree keeps the original logic.
    pub fn area(&self, f: usize) -> AreaCost {
        if f >= self.outputs {
            self.original_area
        } else {
            self.entries[f - 1].area
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProfileCache {
    pub subcircuits: Vec<SubcircuitProfile>,
    pub elapsed: Duration,
}

impl ProfileCache {
    pub fn original_area(&self) -> AreaCost {
        self.subcircuits.iter().map(|s| s.original_area).sum()
    }

    /// Total area under the given degrees: the sum over subcircuits.
    pub fn area(&self, degrees: &[usize]) -> AreaCost {
        self.subcircuits.iter().zip(degrees).map(|(s, &f)| s.area(f)).sum()
    }

    pub fn exact_degrees(&self) -> Vec<usize> {
        self.subcircuits.iter().map(|s| s.outputs).collect()
    }
}

/// Factorizes and resynthesizes every subcircuit at every degree `1..m_i`.
pub fn profile_all(n: &Netlist, p: &Partition, cfg: &AssoConfig) -> Result<ProfileCache> {
    cfg.validate()?;
    let start = Instant::now();
    let subcircuits = p
        .subcircuits
        .par_iter()
        .map(|s| {
            let sub = extract(n, s)?;
            let outputs = s.outputs.len();
            let original_area = area_proxy(&sub);
            let entries = if outputs >= 2 {
                let table = sub.truth_table_capped(DEFAULT_TRUTH_TABLE_CAP)?;
                (1..outputs)
                    .into_par_iter()
                    .map(|f| approximate_table(&table, f, cfg, sub.name(), &s.inputs, &s.outputs, Some(&sub)))
                    .collect::<Result<Vec<_>>>()?
            } else {
                Vec::new()
            };
            Ok(SubcircuitProfile {
                id: s.id,
                outputs,
                original_area,
                entries,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProfileCache {
        subcircuits,
        elapsed: start.elapsed(),
    })
}

/// The circuit with each subcircuit below its exact degree replaced by its
/// profiled approximation.
pub fn assemble(n: &Netlist, p: &Partition, cache: &ProfileCache, degrees: &[usize]) -> Result<Netlist> {
    let mut reps = Vec::new();
    for (s, (prof, &f)) in p.subcircuits.iter().zip(cache.subcircuits.iter().zip(degrees)) {
        if f < prof.outputs {
            let a = prof.approximation(f).ok_or(Error::Degree {
                degree: f,
                max: prof.outputs,
            })?;
            reps.push((s, &a.netlist));
        }
    }
    if reps.is_empty() {
        return Ok(n.clone());
    }
    substitute_many(n, &reps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExploreConfig {
    pub metric: Metric,
    pub threshold: f64,
    pub samples: usize,
    pub probe_samples: usize,
    pub seed: u64,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        ExploreConfig {
            metric: Metric::Relative,
            threshold: 0.05,
            samples: crate::qor::DEFAULT_SAMPLES,
            probe_samples: DEFAULT_PROBE_SAMPLES,
            seed: 1,
        }
    }
}

impl ExploreConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(Error::Config(format!("threshold must be positive, got {}", self.threshold)));
        }
        if self.probe_samples == 0 || self.samples < self.probe_samples {
            return Err(Error::Config(format!(
                "need samples >= probe_samples >= 1, got {} and {}",
                self.samples, self.probe_samples
            )));
        }
        Ok(())
    }
}

/// One row of the trajectory. Row 0 is the original circuit; the last row
/// may be a rejected probe that broke the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub step: usize,
    pub subcircuit: Option<usize>,
    pub f_before: usize,
    pub f_after: usize,
    /// The explored metric, measured with the commit samples.
    pub error: f64,
    pub relative: Option<f64>,
    pub normalized_absolute: Option<f64>,
    pub hamming: f64,
    pub area: f64,
    pub accepted: bool,
}

impl Step {
    fn new(step: usize, change: Option<(usize, usize, usize)>, metric: Metric, s: &ErrorSummary, area: AreaCost, accepted: bool) -> Result<Step> {
        let (subcircuit, f_before, f_after) = match change {
            Some((id, from, to)) => (Some(id), from, to),
            None => (None, 0, 0),
        };
        Ok(Step {
            step,
            subcircuit,
            f_before,
            f_after,
            error: s.value(metric)?,
            relative: s.relative.map(|e| e.mean),
            normalized_absolute: s.normalized_absolute.map(|e| e.mean),
            hamming: s.hamming.mean,
            area: area.value(),
            accepted,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Exploration {
    pub netlist: Netlist,
    pub degrees: Vec<usize>,
    pub trajectory: Vec<Step>,
    pub original_area: AreaCost,
    pub final_area: AreaCost,
    pub final_error: f64,
    pub elapsed: Duration,
}

impl Exploration {
    pub fn committed_steps(&self) -> usize {
        self.trajectory.iter().filter(|s| s.accepted && s.subcircuit.is_some()).count()
    }

    /// Relative area reduction, `1 - final / original`.
    pub fn area_saving(&self) -> f64 {
        let o = self.original_area.value();
        if o == 0.0 {
            0.0
        } else {
            1.0 - self.final_area.value() / o
        }
    }
}

/// Greedy degree descent under `cfg.threshold`.
///
/// Candidates are compared on one fixed probe sample set; the chosen step
/// is then re-measured on the larger commit set and rolled back if it
/// breaks the threshold, which ends the search.
pub fn explore(
    n: &Netlist,
    p: &Partition,
    cache: &ProfileCache,
    interp: Option<&OutputInterpretation>,
    cfg: &ExploreConfig,
) -> Result<Exploration> {
    cfg.validate()?;
    let start = Instant::now();
    let probe = Evaluator::new(
        n,
        interp,
        Sampling::MonteCarlo {
            samples: cfg.probe_samples,
            seed: cfg.seed,
        },
    )?;
    let commit = Evaluator::new(
        n,
        interp,
        Sampling::MonteCarlo {
            samples: cfg.samples,
            seed: cfg.seed,
        },
    )?;
    let mut degrees = cache.exact_degrees();
    let mut current = n.clone();
    let base = commit.evaluate(&current)?;
    let mut current_error = base.value(cfg.metric)?;
    assert_eq!(current_error, 0.0, "the original circuit has no error against itself");
    let mut trajectory = vec![Step::new(0, None, cfg.metric, &base, cache.area(&degrees), true)?];

    loop {
        let candidates: Vec<usize> = (0..degrees.len()).filter(|&i| degrees[i] > 1).collect();
        if candidates.is_empty() {
            break;
        }
        let probed = candidates
            .par_iter()
            .map(|&i| {
                let mut d = degrees.clone();
                d[i] -= 1;
                let circuit = assemble(n, p, cache, &d)?;
                let err = probe.evaluate(&circuit)?.value(cfg.metric)?;
                let saving = cache.subcircuits[i].area(degrees[i]).value() - cache.subcircuits[i].area(d[i]).value();
                Ok((err, saving, i, circuit))
            })
            .collect::<Result<Vec<_>>>()?;
        let (_, _, best, circuit) = probed
            .into_iter()
            .min_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)).then(a.2.cmp(&b.2)))
            .expect("at least one candidate");
        let mut d = degrees.clone();
        d[best] -= 1;
        let summary = commit.evaluate(&circuit)?;
        let err = summary.value(cfg.metric)?;
        let accepted = err <= cfg.threshold;
        let step = trajectory.len();
        trajectory.push(Step::new(
            step,
            Some((best, degrees[best], d[best])),
            cfg.metric,
            &summary,
            cache.area(&d),
            accepted,
        )?);
        if !accepted {
            break;
        }
        degrees = d;
        current = circuit;
        current_error = err;
    }
    Ok(Exploration {
        final_area: cache.area(&degrees),
        original_area: cache.original_area(),
        netlist: current,
        degrees,
        trajectory,
        final_error: current_error,
        elapsed: start.elapsed(),
    })
}

/// Trade-off table, one row per trajectory entry.
pub fn pareto_report(trajectory: &[Step]) -> Result<String> {
    if trajectory.is_empty() {
        return Err(Error::Config("empty trajectory".into()));
    }
    let original = trajectory[0].area;
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record([
        "step",
        "subcircuit",
        "f_before",
        "f_after",
        "error",
        "relative_error",
        "normalized_absolute_error",
        "hamming_rate",
        "area",
        "normalized_area",
        "accepted",
    ])
    .map_err(io)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for s in trajectory {
        let norm = if original == 0.0 { 1.0 } else { s.area / original };
        w.write_record([
            s.step.to_string(),
            s.subcircuit.map(|i| i.to_string()).unwrap_or_default(),
            s.f_before.to_string(),
            s.f_after.to_string(),
            s.error.to_string(),
            opt(s.relative),
            opt(s.normalized_absolute),
            s.hamming.to_string(),
            s.area.to_string(),
            norm.to_string(),
            s.accepted.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Seed for the independent re-measurement of a final design.
pub fn verification_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

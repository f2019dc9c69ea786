// SPDX-License-Identifier: Apache-2.0

//! Error between an accurate ("golden") circuit and an approximation of it.
//!
//! Three metrics are supported, all computed from a single simulation pass:
//!
//! * Hamming rate: mismatched output bits divided by `samples * outputs`.
//! * Average relative error: mean of `|R - R'| / max(R, 1)`, where `R` and
//!   `R'` are the golden and approximate outputs read as unsigned words.
//! * Average absolute error: mean of `|R - R'|`, also reported normalized by
//!   the largest value each word can hold.
//!
//! Circuits with several output words average the per-word errors of each
//! sample. Inputs are drawn uniformly with ChaCha8; the sample stream is cut
//! into fixed chunks that each get their own ChaCha stream of the master
//! seed, so results do not depend on how many worker threads run.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netlist::{Netlist, Simulator};

/// Identifier of the input generator, recorded in every report.
pub const RNG_ALGORITHM: &str = "chacha8-stream-per-16384";

/// Default Monte Carlo sample count.
pub const DEFAULT_SAMPLES: usize = 1_000_000;

/// Largest input count [`exhaustive_qor`] enumerates.
pub const EXHAUSTIVE_INPUT_CAP: usize = 20;

const CHUNK_BLOCKS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Relative,
    Absolute,
    Hamming,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relative" => Ok(Metric::Relative),
            "absolute" => Ok(Metric::Absolute),
            "hamming" => Ok(Metric::Hamming),
            other => Err(Error::Config(format!("unknown metric `{other}`"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Relative => "relative",
            Metric::Absolute => "absolute",
            Metric::Hamming => "hamming",
        })
    }
}

/// A group of primary outputs read as one unsigned number, MSB first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word {
    pub name: String,
    pub bits: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OutputInterpretation {
    pub words: Vec<Word>,
}

impl OutputInterpretation {
    pub fn new(words: Vec<Word>) -> Self {
        OutputInterpretation { words }
    }

    /// All primary outputs as one word, `outputs[0]` most significant.
    pub fn single_word(netlist: &Netlist) -> Self {
        OutputInterpretation::new(vec![Word {
            name: "out".into(),
            bits: netlist.output_names().iter().map(|s| s.to_string()).collect(),
        }])
    }

    /// Parses `name:msb..lsb;name:n1,n2,...`. A range `p7..p0` expands over
    /// the numeric suffix of a shared prefix, in the written direction.
    pub fn parse(text: &str) -> Result<Self> {
        let mut words = Vec::new();
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, body) = part
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("word `{part}` lacks `name:`")))?;
            let mut bits = Vec::new();
            for item in body.split(',').map(str::trim).filter(|i| !i.is_empty()) {
                match item.split_once("..") {
                    Some((hi, lo)) => bits.extend(expand_range(hi, lo)?),
                    None => bits.push(item.to_string()),
                }
            }
            if bits.is_empty() {
                return Err(Error::Config(format!("word `{name}` has no bits")));
            }
            words.push(Word {
                name: name.trim().to_string(),
                bits,
            });
        }
        if words.is_empty() {
            return Err(Error::Config("no words given".into()));
        }
        Ok(OutputInterpretation { words })
    }

    fn resolve(&self, netlist: &Netlist) -> Result<ResolvedWords> {
        let names = netlist.output_names();
        let mut used = vec![false; names.len()];
        let mut words = Vec::new();
        for w in &self.words {
            if w.bits.len() > 64 {
                return Err(Error::Config(format!("word `{}` is wider than 64 bits", w.name)));
            }
            let mut idx = Vec::with_capacity(w.bits.len());
            for bit in &w.bits {
                let i = names
                    .iter()
                    .position(|n| n == bit)
                    .ok_or_else(|| Error::Config(format!("word `{}` names unknown output `{bit}`", w.name)))?;
                if used[i] {
                    return Err(Error::Config(format!("output `{bit}` appears in more than one word")));
                }
                used[i] = true;
                idx.push(i);
            }
            words.push(idx);
        }
        Ok(ResolvedWords {
            complete: used.iter().all(|&u| u),
            words,
        })
    }
}

fn split_suffix(name: &str) -> Option<(&str, u32)> {
    let pos = name.rfind(|c: char| !c.is_ascii_digit()).map_or(0, |p| p + 1);
    let (prefix, digits) = name.split_at(pos);
    digits.parse().ok().map(|n| (prefix, n))
}

fn expand_range(hi: &str, lo: &str) -> Result<Vec<String>> {
    let bad = || Error::Config(format!("range `{hi}..{lo}` needs names sharing a prefix with numeric suffixes"));
    let (p1, a) = split_suffix(hi.trim()).ok_or_else(bad)?;
    let (p2, b) = split_suffix(lo.trim()).ok_or_else(bad)?;
    if p1 != p2 {
        return Err(bad());
    }
    let seq: Vec<u32> = if a >= b { (b..=a).rev().collect() } else { (a..=b).collect() };
    Ok(seq.into_iter().map(|i| format!("{p1}{i}")).collect())
}

#[derive(Debug, Clone)]
struct ResolvedWords {
    words: Vec<Vec<usize>>,
    complete: bool,
}

/// Mean and standard error of one per-sample error statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

/// All metrics from one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub hamming: Estimate,
    pub relative: Option<Estimate>,
    pub absolute: Option<Estimate>,
    pub normalized_absolute: Option<Estimate>,
    pub samples: usize,
    pub seed: u64,
    pub exhaustive: bool,
}

impl ErrorSummary {
    pub fn report(&self, metric: Metric) -> Result<QorReport> {
        let missing = || Error::Config(format!("metric `{metric}` needs every output grouped into a word"));
        let (est, normalized) = match metric {
            Metric::Hamming => (self.hamming, None),
            Metric::Relative => (self.relative.ok_or_else(missing)?, None),
            Metric::Absolute => (
                self.absolute.ok_or_else(missing)?,
                Some(self.normalized_absolute.ok_or_else(missing)?.mean),
            ),
        };
        Ok(QorReport {
            metric,
            value: est.mean,
            normalized,
            samples: self.samples,
            seed: self.seed,
            exhaustive: self.exhaustive,
            std_error: est.std_error,
            rng: RNG_ALGORITHM.to_string(),
        })
    }

    pub fn value(&self, metric: Metric) -> Result<f64> {
        self.report(metric).map(|r| r.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QorReport {
    pub metric: Metric,
    pub value: f64,
    pub normalized: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub exhaustive: bool,
    pub std_error: f64,
    pub rng: String,
}

/// Where evaluation inputs come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    MonteCarlo { samples: usize, seed: u64 },
    Exhaustive,
}

impl Sampling {
    /// Exhaustive when `2^inputs <= samples`, Monte Carlo otherwise.
    pub fn auto(inputs: usize, samples: usize, seed: u64) -> Sampling {
        if inputs < usize::BITS as usize - 1 && 1usize << inputs <= samples {
            Sampling::Exhaustive
        } else {
            Sampling::MonteCarlo { samples, seed }
        }
    }
}

struct Block {
    lanes: u64,
    inputs: Vec<u64>,
    golden: Vec<u64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: f64,
    sumsq: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sumsq += x * x;
    }

    fn merge(&mut self, o: &Moments) {
        self.sum += o.sum;
        self.sumsq += o.sumsq;
    }

    fn estimate(&self, n: usize) -> Estimate {
        let n = n as f64;
        let mean = self.sum / n;
        let var = if n > 1.0 {
            ((self.sumsq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            std_error: (var / n).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    hamming: Moments,
    relative: Moments,
    absolute: Moments,
    normalized: Moments,
}

impl Partial {
    fn merge(&mut self, o: &Partial) {
        self.hamming.merge(&o.hamming);
        self.relative.merge(&o.relative);
        self.absolute.merge(&o.absolute);
        self.normalized.merge(&o.normalized);
    }
}

/// Golden responses for a fixed input set, reused across many approximations.
///
/// Every approximation evaluated by the same `Evaluator` sees the same
/// inputs, which makes error differences between candidates directly
/// comparable.
pub struct Evaluator<'g> {
    golden: &'g Netlist,
    words: Option<ResolvedWords>,
    /// Chunks of blocks, each block holding 64 lanes.
    chunks: Vec<Vec<Block>>,
    samples: usize,
    seed: u64,
    exhaustive: bool,
}

impl<'g> Evaluator<'g> {
    /// `interp = None` uses [`OutputInterpretation::single_word`] when the
    /// circuit has at most 64 outputs; the word metrics stay unavailable
    /// otherwise.
    pub fn new(golden: &'g Netlist, interp: Option<&OutputInterpretation>, sampling: Sampling) -> Result<Self> {
        let words = match interp {
            Some(i) => Some(i.resolve(golden)?),
            None if golden.outputs().len() <= 64 => Some(OutputInterpretation::single_word(golden).resolve(golden)?),
            None => None,
        };
        let k = golden.inputs().len();
        let (samples, seed, exhaustive) = match sampling {
            Sampling::MonteCarlo { samples, seed } => {
                if samples == 0 {
                    return Err(Error::Config("sample count must be at least 1".into()));
                }
                (samples, seed, false)
            }
            Sampling::Exhaustive => {
                if k > EXHAUSTIVE_INPUT_CAP {
                    return Err(Error::Budget {
                        what: "exhaustive inputs",
                        value: k,
                        limit: EXHAUSTIVE_INPUT_CAP,
                    });
                }
                (1usize << k, 0, true)
            }
        };
        let n_blocks = samples.div_ceil(64);
        let n_chunks = n_blocks.div_ceil(CHUNK_BLOCKS);
        let chunks = (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c as u64);
                let mut sim = Simulator::new(golden);
                let first = c * CHUNK_BLOCKS;
                let last = (first + CHUNK_BLOCKS).min(n_blocks);
                (first..last)
                    .map(|blk| {
                        let base = blk * 64;
                        let lanes_n = (samples - base).min(64);
                        let lanes = crate::boolmat::low_mask(lanes_n);
                        let inputs: Vec<u64> = if exhaustive {
                            (0..k)
                                .map(|i| {
                                    let shift = k - 1 - i;
                                    (0..lanes_n).fold(0u64, |acc, l| acc | ((((base + l) >> shift) & 1) as u64) << l)
                                })
                                .collect()
                        } else {
                            (0..k).map(|_| rng.next_u64()).collect()
                        };
                        let mut out = vec![0u64; golden.outputs().len()];
                        sim.run(&inputs, &mut out);
                        Block {
                            lanes,
                            inputs,
                            golden: out,
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Evaluator {
            golden,
            words,
            chunks,
            samples,
            seed,
            exhaustive,
        })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn golden(&self) -> &Netlist {
        self.golden
    }

    pub fn check_ports(&self, approx: &Netlist) -> Result<()> {
        check_ports(self.golden, approx)
    }

    /// Measures `approx` against the golden responses.
    pub fn evaluate(&self, approx: &Netlist) -> Result<ErrorSummary> {
        self.check_ports(approx)?;
        let m = self.golden.outputs().len().max(1) as f64;
        let words = self.words.as_ref();
        let partials: Vec<Partial> = self
            .chunks
            .par_iter()
            .map(|chunk| {
                let mut sim = Simulator::new(approx);
                let mut out = vec![0u64; approx.outputs().len()];
                let mut p = Partial::default();
                for block in chunk {
                    sim.run(&block.inputs, &mut out);
                    accumulate(block, &out, words, m, &mut p);
                }
                p
            })
            .collect();
        let mut total = Partial::default();
        for p in &partials {
            total.merge(p);
        }
        let n = self.samples;
        let word_stats = words.filter(|w| w.complete && !w.words.is_empty());
        Ok(ErrorSummary {
            hamming: total.hamming.estimate(n),
            relative: word_stats.map(|_| total.relative.estimate(n)),
            absolute: word_stats.map(|_| total.absolute.estimate(n)),
            normalized_absolute: word_stats.map(|_| total.normalized.estimate(n)),
            samples: n,
            seed: self.seed,
            exhaustive: self.exhaustive,
        })
    }
}

fn accumulate(block: &Block, approx: &[u64], words: Option<&ResolvedWords>, m: f64, p: &mut Partial) {
    let diff: Vec<u64> = block.golden.iter().zip(approx).map(|(g, a)| (g ^ a) & block.lanes).collect();
    let any = diff.iter().fold(0, |acc, d| acc | d);
    // Lanes without any mismatch contribute zero to every moment.
    let mut lane_mismatch = [0u32; 64];
    let mut bits = any;
    while bits != 0 {
        let l = bits.trailing_zeros() as usize;
        lane_mismatch[l] = diff.iter().map(|d| (d >> l & 1) as u32).sum();
        bits &= bits - 1;
    }
    let mut bits = any;
    while bits != 0 {
        let l = bits.trailing_zeros() as usize;
        p.hamming.push(f64::from(lane_mismatch[l]) / m);
        bits &= bits - 1;
    }
    let Some(words) = words.filter(|w| w.complete && !w.words.is_empty()) else {
        return;
    };
    let n_words = words.words.len() as f64;
    let mut bits = any;
    while bits != 0 {
        let l = bits.trailing_zeros() as usize;
        let (mut rel, mut abs, mut nabs) = (0.0, 0.0, 0.0);
        for w in &words.words {
            let (r, r2) = w.iter().fold((0u64, 0u64), |(r, r2), &o| {
                (r << 1 | (block.golden[o] >> l & 1), r2 << 1 | (approx[o] >> l & 1))
            });
            let d = r.abs_diff(r2) as f64;
            rel += d / (r.max(1) as f64);
            abs += d;
            let max = crate::boolmat::low_mask(w.len()) as f64;
            nabs += d / max;
        }
        p.relative.push(rel / n_words);
        p.absolute.push(abs / n_words);
        p.normalized.push(nabs / n_words);
        bits &= bits - 1;
    }
}

/// Golden and approximate circuits must expose identical port lists.
pub fn check_ports(golden: &Netlist, approx: &Netlist) -> Result<()> {
    if golden.input_names() != approx.input_names() {
        return Err(Error::Ports(format!(
            "inputs differ: [{}] vs [{}]",
            golden.input_names().join(" "),
            approx.input_names().join(" ")
        )));
    }
    if golden.output_names() != approx.output_names() {
        return Err(Error::Ports(format!(
            "outputs differ: [{}] vs [{}]",
            golden.output_names().join(" "),
            approx.output_names().join(" ")
        )));
    }
    Ok(())
}

fn one_metric(
    golden: &Netlist,
    approx: &Netlist,
    interp: Option<&OutputInterpretation>,
    sampling: Sampling,
    metric: Metric,
) -> Result<QorReport> {
    check_ports(golden, approx)?;
    Evaluator::new(golden, interp, sampling)?.evaluate(approx)?.report(metric)
}

/// Average relative error; exhaustive whenever `2^inputs <= samples`.
pub fn avg_relative_error(
    golden: &Netlist,
    approx: &Netlist,
    interp: &OutputInterpretation,
    samples: usize,
    seed: u64,
) -> Result<QorReport> {
    let sampling = Sampling::auto(golden.inputs().len(), samples, seed);
    one_metric(golden, approx, Some(interp), sampling, Metric::Relative)
}

/// Average absolute error; the report's `normalized` field divides by the
/// largest representable value of each word.
pub fn avg_absolute_error(
    golden: &Netlist,
    approx: &Netlist,
    interp: &OutputInterpretation,
    samples: usize,
    seed: u64,
) -> Result<QorReport> {
    let sampling = Sampling::auto(golden.inputs().len(), samples, seed);
    one_metric(golden, approx, Some(interp), sampling, Metric::Absolute)
}

pub fn hamming_error_rate(golden: &Netlist, approx: &Netlist, samples: usize, seed: u64) -> Result<QorReport> {
    let sampling = Sampling::auto(golden.inputs().len(), samples, seed);
    check_ports(golden, approx)?;
    Evaluator::new(golden, None, sampling)?.evaluate(approx)?.report(Metric::Hamming)
}

/// Any metric over all `2^inputs` input vectors.
pub fn exhaustive_qor(
    golden: &Netlist,
    approx: &Netlist,
    metric: Metric,
    interp: Option<&OutputInterpretation>,
) -> Result<QorReport> {
    one_metric(golden, approx, interp, Sampling::Exhaustive, metric)
}

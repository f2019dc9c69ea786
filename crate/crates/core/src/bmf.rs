// SPDX-License-Identifier: Apache-2.0

//! Boolean matrix factorization `M ~ B * C` with the association-based
//! greedy heuristic (ASSO), a weighted cover objective, and an exhaustive
//! reference solver for small instances.
//!
//! The heuristic works in two phases. First every column `i` of `M` yields a
//! candidate basis row `a_i`: column `j` joins the candidate when the
//! association confidence `<c_i, c_j> / <c_i, c_i>` reaches the threshold
//! `tau`. Then `f` times over, the candidate with the largest weighted cover
//! gain becomes the next row of `C`, and the matching column of `B` marks the
//! rows of `M` whose reconstruction that candidate strictly improves.
//!
//! The greedy internals operate on per-row bit masks and therefore accept at
//! most 64 columns, which is far beyond the subcircuit output bound used in
//! practice.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolmat::{bool_product, low_mask, weighted_distance, BitMatrix, Semiring, WeightVector};
use crate::error::{Error, Result};

/// Association thresholds swept when the caller does not choose any.
pub const DEFAULT_TAUS: [f64; 5] = [0.6, 0.7, 0.8, 0.9, 1.0];

/// Column weighting applied to the cover objective.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Every mismatch counts one: plain Hamming distance.
    Uniform,
    /// Column `j` of an `m`-column matrix weighs `2^(m-1-j)`.
    #[default]
    Pow2,
    Custom(WeightVector),
}

impl Weighting {
    pub fn for_columns(&self, cols: usize) -> Result<WeightVector> {
        match self {
            Weighting::Uniform => Ok(WeightVector::uniform(cols)),
            Weighting::Pow2 => Ok(WeightVector::powers_of_two(cols)),
            Weighting::Custom(w) if w.len() == cols => Ok(w.clone()),
            Weighting::Custom(w) => Err(Error::shape(format!("{cols} columns"), format!("{} weights", w.len()))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssoConfig {
    pub taus: Vec<f64>,
    pub semiring: Semiring,
    pub weights: Weighting,
    /// Keep consuming basis vectors even when the best gain is zero.
    pub allow_zero_gain: bool,
}

impl Default for AssoConfig {
    fn default() -> Self {
        AssoConfig {
            taus: DEFAULT_TAUS.to_vec(),
            semiring: Semiring::Or,
            weights: Weighting::Pow2,
            allow_zero_gain: false,
        }
    }
}

impl AssoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.taus.is_empty() {
            return Err(Error::Config("tau sweep is empty".into()));
        }
        if let Some(t) = self.taus.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            return Err(Error::Config(format!("tau {t} outside (0, 1]")));
        }
        Ok(())
    }
}

/// One factorization `M ~ B * C` of inner dimension `degree`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorResult {
    pub b: BitMatrixRepr,
    pub c: BitMatrixRepr,
    pub degree: usize,
    /// Basis vectors actually selected; the remaining `degree - used` columns
    /// of `B` and rows of `C` are zero.
    pub used: usize,
    /// Association threshold that produced this result; `None` for the
    /// exhaustive solver.
    pub tau: Option<f64>,
    pub error: f64,
    pub semiring: Semiring,
    /// Weighted error after each selected basis vector, in selection order.
    pub history: Vec<f64>,
}

/// Serializable wrapper so factor matrices can travel in JSON reports.
#[derive(Debug, Clone, PartialEq)]
pub struct BitMatrixRepr(pub BitMatrix);

impl Serialize for BitMatrixRepr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_text())
    }
}

impl<'de> Deserialize<'de> for BitMatrixRepr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map(BitMatrixRepr).map_err(serde::de::Error::custom)
    }
}

impl FactorResult {
    pub fn basis(&self) -> &BitMatrix {
        &self.b.0
    }

    pub fn mixing(&self) -> &BitMatrix {
        &self.c.0
    }

    /// `B * C` under the result's semiring.
    pub fn reconstruction(&self) -> BitMatrix {
        bool_product(&self.b.0, &self.c.0, self.semiring).expect("factor shapes are conformable")
    }
}

/// Weighted-error lookup: a table for narrow matrices, bit iteration otherwise.
struct ErrorWeights {
    weights: WeightVector,
    table: Option<Vec<f64>>,
}

impl ErrorWeights {
    fn new(weights: WeightVector) -> Self {
        let n = weights.len();
        let table = (n <= 16).then(|| (0..1u64 << n).map(|mask| weights.mask_weight(mask)).collect());
        ErrorWeights { weights, table }
    }

    #[inline]
    fn of(&self, mask: u64) -> f64 {
        match &self.table {
            Some(t) => t[mask as usize],
            None => self.weights.mask_weight(mask),
        }
    }
}

fn check_greedy_width(m: &BitMatrix) -> Result<()> {
    if m.cols() > 64 {
        return Err(Error::Budget {
            what: "matrix columns",
            value: m.cols(),
            limit: 64,
        });
    }
    Ok(())
}

/// Candidate basis rows, one per column of `m` before de-duplication,
/// returned as the rows of a matrix with `m.cols()` columns.
pub fn association_candidates(m: &BitMatrix, tau: f64) -> Result<BitMatrix> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::Config("association needs a non-empty matrix".into()));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::Config(format!("tau {tau} outside (0, 1]")));
    }
    let cols = m.transpose();
    let inner = |i: usize, j: usize| -> u32 {
        cols.row_words(i)
            .iter()
            .zip(cols.row_words(j))
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    };
    let n = m.cols();
    let mut seen = std::collections::HashSet::new();
    let mut out: Vec<Vec<bool>> = Vec::new();
    for i in 0..n {
        let own = inner(i, i);
        let row: Vec<bool> = if own == 0 {
            (0..n).map(|j| j == i).collect()
        } else {
            (0..n).map(|j| f64::from(inner(i, j)) / f64::from(own) >= tau).collect()
        };
        if seen.insert(row.clone()) {
            out.push(row);
        }
    }
    BitMatrix::from_rows(&out)
}

/// `B = M`, `C = I`; basis vector `t` restores column `t`.
fn exact_result(m: &BitMatrix, w: &WeightVector, tau: Option<f64>, semiring: Semiring) -> FactorResult {
    let column_weight: Vec<f64> = (0..m.cols()).map(|j| m.column(j).iter().filter(|&&x| x).count() as f64 * w.as_slice()[j]).collect();
    let history = (0..m.cols()).map(|t| column_weight[t + 1..].iter().sum()).collect();
    FactorResult {
        b: BitMatrixRepr(m.clone()),
        c: BitMatrixRepr(BitMatrix::identity(m.cols())),
        degree: m.cols(),
        used: m.cols(),
        tau,
        error: 0.0,
        semiring,
        history,
    }
}

/// Greedy ASSO factorization at a single threshold `tau`.
pub fn asso_factorize(m: &BitMatrix, degree: usize, tau: f64, cfg: &AssoConfig) -> Result<FactorResult> {
    if degree == 0 || degree > m.cols() {
        return Err(Error::Degree {
            degree,
            max: m.cols(),
        });
    }
    check_greedy_width(m)?;
    let weights = cfg.weights.for_columns(m.cols())?;
    if degree == m.cols() {
        return Ok(exact_result(m, &weights, Some(tau), cfg.semiring));
    }
    let candidates = association_candidates(m, tau)?;
    let cand: Vec<u64> = (0..candidates.rows()).map(|i| candidates.row_mask(i)).collect();
    let target: Vec<u64> = (0..m.rows()).map(|r| m.row_mask(r)).collect();
    let ew = ErrorWeights::new(weights.clone());
    let semiring = cfg.semiring;

    let mut recon = vec![0u64; m.rows()];
    let mut b = BitMatrix::zeros(m.rows(), degree);
    let mut c_rows = Vec::with_capacity(degree);
    let mut history = Vec::with_capacity(degree);
    let mut used = 0;

    for step in 0..degree {
        // (gain, candidate index); the first strictly larger gain wins.
        let mut best: Option<(f64, usize)> = None;
        for (ci, &a) in cand.iter().enumerate() {
            let gain: f64 = target
                .iter()
                .zip(&recon)
                .map(|(&t, &r)| {
                    let g = ew.of(t ^ r) - ew.of(t ^ semiring.add(r, a));
                    g.max(0.0)
                })
                .sum();
            if best.is_none_or(|(bg, _)| gain > bg) {
                best = Some((gain, ci));
            }
        }
        let (gain, ci) = best.expect("at least one candidate");
        if gain <= 0.0 && !cfg.allow_zero_gain {
            break;
        }
        let a = cand[ci];
        for (row, (&t, r)) in target.iter().zip(recon.iter_mut()).enumerate() {
            let next = semiring.add(*r, a);
            if ew.of(t ^ *r) - ew.of(t ^ next) > 0.0 {
                *r = next;
                b.set(row, step, true);
            }
        }
        c_rows.push(a);
        used += 1;
        history.push(target.iter().zip(&recon).map(|(&t, &r)| ew.of(t ^ r)).sum());
    }

    c_rows.resize(degree, 0);
    let c = BitMatrix::from_row_masks(m.cols(), &c_rows);
    let error = weighted_distance(m, &bool_product(&b, &c, semiring)?, &weights)?;
    Ok(FactorResult {
        b: BitMatrixRepr(b),
        c: BitMatrixRepr(c),
        degree,
        used,
        tau: Some(tau),
        error,
        semiring,
        history,
    })
}

/// Runs [`asso_factorize`] for every threshold in the sweep and keeps the
/// lowest-error result, preferring the smaller threshold on ties.
pub fn factorize_best(m: &BitMatrix, degree: usize, cfg: &AssoConfig) -> Result<FactorResult> {
    cfg.validate()?;
    let results: Vec<FactorResult> = cfg
        .taus
        .par_iter()
        .map(|&tau| asso_factorize(m, degree, tau, cfg))
        .collect::<Result<_>>()?;
    let best = results
        .into_iter()
        .reduce(|best, r| {
            let (bt, rt) = (best.tau.unwrap_or(0.0), r.tau.unwrap_or(0.0));
            if r.error < best.error || (r.error == best.error && rt < bt) {
                r
            } else {
                best
            }
        })
        .expect("non-empty sweep");
    Ok(best)
}

/// Largest `rows * degree` the exhaustive solver accepts.
pub const ORACLE_BUDGET: usize = 24;

/// Globally optimal factorization by enumeration.
///
/// `B` is encoded as its tuple of column masks (bit `r` = row `r`). Column
/// order does not affect the error, so only non-decreasing tuples are
/// visited, in lexicographic order; the first optimum found is therefore the
/// lexicographically smallest `B`. Each column of `C` is then chosen
/// independently as the smallest combination of basis columns that
/// minimizes that column's mismatches.
pub fn oracle_factorize(m: &BitMatrix, degree: usize, semiring: Semiring, w: &WeightVector) -> Result<FactorResult> {
    if degree == 0 {
        return Err(Error::Degree {
            degree,
            max: m.cols(),
        });
    }
    if m.rows() * degree > ORACLE_BUDGET {
        return Err(Error::Budget {
            what: "oracle rows*degree",
            value: m.rows() * degree,
            limit: ORACLE_BUDGET,
        });
    }
    if w.len() != m.cols() {
        return Err(Error::shape(format!("{} columns", m.cols()), format!("{} weights", w.len())));
    }
    let rows = m.rows();
    let values = 1u64 << rows;
    let combos = 1usize << degree;
    let row_clip = low_mask(rows);
    let target_cols: Vec<u64> = {
        let t = m.transpose();
        (0..m.cols())
            .map(|j| {
                (0..rows).fold(0u64, |acc, r| acc | (u64::from(t.get(j, r)) << r))
            })
            .collect()
    };
    let weights = w.as_slice();

    let mut tuple = vec![0u64; degree];
    let mut span = vec![0u64; combos];
    let mut best_err = f64::INFINITY;
    let mut best_b = tuple.clone();
    let mut best_c = vec![0usize; m.cols()];
    let mut pick = vec![0usize; m.cols()];

    loop {
        for c in 1..combos {
            let low = c.trailing_zeros() as usize;
            span[c] = semiring.add(span[c & (c - 1)], tuple[low]) & row_clip;
        }
        let mut err = 0.0;
        for (j, &col) in target_cols.iter().enumerate() {
            let mut best_pop = u32::MAX;
            for (c, &s) in span.iter().enumerate() {
                let pop = (s ^ col).count_ones();
                if pop < best_pop {
                    best_pop = pop;
                    pick[j] = c;
                }
            }
            err += weights[j] * f64::from(best_pop);
            if err >= best_err {
                break;
            }
        }
        if err < best_err {
            best_err = err;
            best_b.copy_from_slice(&tuple);
            best_c.copy_from_slice(&pick);
        }

        // Next non-decreasing tuple in lexicographic order.
        let mut pos = degree;
        loop {
            if pos == 0 {
                let b = BitMatrix::from_fn(rows, degree, |r, l| best_b[l] >> r & 1 == 1);
                let c = BitMatrix::from_fn(degree, m.cols(), |l, j| best_c[j] >> l & 1 == 1);
                let error = weighted_distance(m, &bool_product(&b, &c, semiring)?, w)?;
                return Ok(FactorResult {
                    b: BitMatrixRepr(b),
                    c: BitMatrixRepr(c),
                    degree,
                    used: degree,
                    tau: None,
                    error,
                    semiring,
                    history: Vec::new(),
                });
            }
            pos -= 1;
            if tuple[pos] + 1 < values {
                let v = tuple[pos] + 1;
                for slot in &mut tuple[pos..] {
                    *slot = v;
                }
                break;
            }
        }
    }
}

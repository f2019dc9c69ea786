// SPDX-License-Identifier: Apache-2.0

//! Bit-packed Boolean matrices and their products over the OR semiring and
//! the XOR field.
//!
//! Rows are stored as contiguous `u64` words. Bits past `cols` in the last
//! word of each row are kept at zero, so whole-word comparisons and popcounts
//! are exact.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

/// How partial products are summed in a Boolean matrix product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semiring {
    /// Addition is logical OR.
    #[default]
    Or,
    /// Addition is logical XOR (GF(2)).
    Xor,
}

impl Semiring {
    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        match self {
            Semiring::Or => a | b,
            Semiring::Xor => a ^ b,
        }
    }
}

impl FromStr for Semiring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "or" => Ok(Semiring::Or),
            "xor" => Ok(Semiring::Xor),
            other => Err(Error::Config(format!("unknown semiring `{other}`"))),
        }
    }
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semiring::Or => "or",
            Semiring::Xor => "xor",
        })
    }
}

/// Non-negative per-column weights, not all zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Weights("empty weight vector".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::Weights(format!("weight {w} is not a finite non-negative number")));
        }
        if weights.iter().all(|w| *w == 0.0) {
            return Err(Error::Weights("all weights are zero".into()));
        }
        Ok(WeightVector(weights))
    }

    pub fn uniform(cols: usize) -> Self {
        assert!(cols > 0, "weight vector needs at least one column");
        WeightVector(vec![1.0; cols])
    }

    /// `w[j] = 2^(cols - 1 - j)`: column 0 is the most significant bit.
    pub fn powers_of_two(cols: usize) -> Self {
        assert!(cols > 0, "weight vector needs at least one column");
        WeightVector((0..cols).map(|j| f64::powi(2.0, (cols - 1 - j) as i32)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Sum of the weights of the columns set in `mask` (bit `j` = column `j`).
    #[inline]
    pub fn mask_weight(&self, mut mask: u64) -> f64 {
        let mut total = 0.0;
        while mask != 0 {
            let j = mask.trailing_zeros() as usize;
            total += self.0[j];
            mask &= mask - 1;
        }
        total
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        WeightVector::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

impl BitMatrix {
    /// All-zero `rows x cols` matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(WORD);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| true)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| i == j)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[bool]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(bad) = rows.iter().find(|r| r.as_ref().len() != cols) {
            return Err(Error::shape(
                format!("row of length {cols}"),
                format!("row of length {}", bad.as_ref().len()),
            ));
        }
        Ok(Self::from_fn(rows.len(), cols, |i, j| rows[i].as_ref()[j]))
    }

    /// Convenience constructor from `0`/`1` integers, used heavily in tests.
    pub fn from_u8_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let bools: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&b| b != 0).collect())
            .collect();
        Self::from_rows(&bools)
    }

    /// Builds a matrix with at most 64 columns from one bit mask per row.
    pub fn from_row_masks(cols: usize, masks: &[u64]) -> Self {
        assert!(cols <= WORD, "row masks limited to 64 columns");
        let mut m = Self::zeros(masks.len(), cols);
        let clip = low_mask(cols);
        if cols > 0 {
            for (i, &mask) in masks.iter().enumerate() {
                m.data[i] = mask & clip;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn shape_str(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(row < self.rows && col < self.cols, "index ({row},{col}) out of bounds");
        let word = self.data[row * self.words_per_row + col / WORD];
        (word >> (col % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        assert!(row < self.rows && col < self.cols, "index ({row},{col}) out of bounds");
        let idx = row * self.words_per_row + col / WORD;
        let bit = 1u64 << (col % WORD);
        if value {
            self.data[idx] |= bit;
        } else {
            self.data[idx] &= !bit;
        }
    }

    pub fn row_words(&self, row: usize) -> &[u64] {
        let start = row * self.words_per_row;
        &self.data[start..start + self.words_per_row]
    }

    /// Row `row` as a mask with bit `j` = column `j`. Requires `cols <= 64`.
    #[inline]
    pub fn row_mask(&self, row: usize) -> u64 {
        assert!(self.cols <= WORD, "row_mask needs at most 64 columns");
        if self.cols == 0 {
            0
        } else {
            self.data[row]
        }
    }

    pub fn column(&self, col: usize) -> Vec<bool> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for (w, &word) in self.row_words(i).iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let j = w * WORD + bits.trailing_zeros() as usize;
                    t.set(j, i, true);
                    bits &= bits - 1;
                }
            }
        }
        t
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Text dump: a `rows cols` header line, then one line of `0`/`1` per row.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        text.parse()
    }
}

#[inline]
pub(crate) fn low_mask(bits: usize) -> u64 {
    if bits >= WORD {
        !0
    } else {
        (1u64 << bits) - 1
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::syntax(1, "missing header"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::syntax(1, "header must be `rows cols`"))?;
        let [rows, cols] = dims[..] else {
            return Err(Error::syntax(1, "header must be `rows cols`"));
        };
        let mut m = BitMatrix::zeros(rows, cols);
        let mut seen = 0;
        for (lineno, line) in lines {
            let line = line.trim();
            if seen == rows || line.len() != cols {
                return Err(Error::syntax(lineno + 1, format!("expected {rows} rows of {cols} bits")));
            }
            for (j, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(seen, j, true),
                    _ => return Err(Error::syntax(lineno + 1, format!("invalid bit `{ch}`"))),
                }
            }
            seen += 1;
        }
        if seen != rows {
            return Err(Error::syntax(text.lines().count(), format!("expected {rows} rows, found {seen}")));
        }
        Ok(m)
    }
}

/// Boolean product `B * C`: entry `(i, j)` is the semiring sum over `l` of
/// `B(i, l) AND C(l, j)`.
pub fn bool_product(b: &BitMatrix, c: &BitMatrix, semiring: Semiring) -> Result<BitMatrix> {
    if b.cols != c.rows {
        return Err(Error::shape(b.shape_str(), c.shape_str()));
    }
    let mut out = BitMatrix::zeros(b.rows, c.cols);
    let wpr = out.words_per_row;
    for i in 0..b.rows {
        let dst = &mut out.data[i * wpr..(i + 1) * wpr];
        for (w, &word) in b.row_words(i).iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let l = w * WORD + bits.trailing_zeros() as usize;
                for (d, &s) in dst.iter_mut().zip(c.row_words(l)) {
                    *d = semiring.add(*d, s);
                }
                bits &= bits - 1;
            }
        }
    }
    Ok(out)
}

/// Number of positions where `a` and `b` differ.
pub fn hamming(a: &BitMatrix, b: &BitMatrix) -> Result<usize> {
    if a.shape() != b.shape() {
        return Err(Error::shape(a.shape_str(), b.shape_str()));
    }
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x ^ y).count_ones() as usize)
        .sum())
}

/// Column-weighted mismatch count `sum_{i,j} [A(i,j) != B(i,j)] * w[j]`.
pub fn weighted_distance(a: &BitMatrix, b: &BitMatrix, w: &WeightVector) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::shape(a.shape_str(), b.shape_str()));
    }
    if w.len() != a.cols {
        return Err(Error::shape(
            format!("{} columns", a.cols),
            format!("{} weights", w.len()),
        ));
    }
    let mut total = 0.0;
    for i in 0..a.rows {
        for (wi, (x, y)) in a.row_words(i).iter().zip(b.row_words(i)).enumerate() {
            let mut diff = x ^ y;
            while diff != 0 {
                let j = wi * WORD + diff.trailing_zeros() as usize;
                total += w.0[j];
                diff &= diff - 1;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[u8]]) -> BitMatrix {
        BitMatrix::from_u8_rows(rows).unwrap()
    }

    #[test]
    fn identity_product_is_neutral() {
        let c = m(&[&[1, 0, 1, 1], &[0, 1, 1, 0], &[1, 1, 0, 0]]);
        for s in [Semiring::Or, Semiring::Xor] {
            assert_eq!(bool_product(&BitMatrix::identity(3), &c, s).unwrap(), c);
        }
    }

    #[test]
    fn small_products() {
        let p = bool_product(&m(&[&[1], &[1]]), &m(&[&[1, 0]]), Semiring::Or).unwrap();
        assert_eq!(p, m(&[&[1, 0], &[1, 0]]));

        let b = m(&[&[1, 1]]);
        let c = m(&[&[1], &[1]]);
        assert_eq!(bool_product(&b, &c, Semiring::Or).unwrap(), m(&[&[1]]));
        assert_eq!(bool_product(&b, &c, Semiring::Xor).unwrap(), m(&[&[0]]));
    }

    #[test]
    fn product_rejects_bad_shapes() {
        let err = bool_product(&BitMatrix::zeros(2, 3), &BitMatrix::zeros(2, 2), Semiring::Or).unwrap_err();
        assert_eq!(err, Error::shape("2x3", "2x2"));
    }

    #[test]
    fn hamming_examples() {
        let z = BitMatrix::zeros(2, 2);
        assert_eq!(hamming(&z, &z).unwrap(), 0);
        assert_eq!(hamming(&z, &BitMatrix::ones(2, 2)).unwrap(), 4);
        assert!(hamming(&z, &BitMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn weighted_single_msb_mismatch() {
        let a = BitMatrix::zeros(3, 4);
        let mut b = a.clone();
        b.set(1, 0, true);
        let w = WeightVector::powers_of_two(4);
        assert_eq!(w.as_slice(), &[8.0, 4.0, 2.0, 1.0]);
        assert_eq!(weighted_distance(&a, &b, &w).unwrap(), 8.0);
        assert!(weighted_distance(&a, &b, &WeightVector::uniform(3)).is_err());
    }

    #[test]
    fn weight_vector_validation() {
        assert!(WeightVector::new(vec![]).is_err());
        assert!(WeightVector::new(vec![0.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![1.0, -1.0]).is_err());
        assert!(WeightVector::new(vec![0.0, 2.0]).is_ok());
    }

    #[test]
    fn text_dump() {
        let a = m(&[&[1, 0, 1], &[0, 0, 1]]);
        assert_eq!(a.to_text(), "2 3\n101\n001\n");
        assert_eq!(BitMatrix::parse_text(&a.to_text()).unwrap(), a);
        assert!(BitMatrix::parse_text("2 2\n10\n").is_err());
        assert!(BitMatrix::parse_text("1 2\n1x\n").is_err());
    }

    #[test]
    fn wide_rows_keep_padding_clear() {
        let mut a = BitMatrix::zeros(2, 70);
        a.set(0, 69, true);
        a.set(1, 3, true);
        let t = a.transpose();
        assert_eq!(t.shape(), (70, 2));
        assert!(t.get(69, 0) && t.get(3, 1));
        assert_eq!(t.transpose(), a);
        assert_eq!(a.count_ones(), 2);
    }

    // Integer matrix product by definition, for the algebraic routes below.
    fn int_product(b: &BitMatrix, c: &BitMatrix) -> Vec<Vec<u32>> {
        (0..b.rows())
            .map(|i| {
                (0..c.cols())
                    .map(|j| (0..b.cols()).filter(|&l| b.get(i, l) && c.get(l, j)).count() as u32)
                    .collect()
            })
            .collect()
    }

    fn all_matrices(rows: usize, cols: usize) -> impl Iterator<Item = BitMatrix> {
        (0u32..1 << (rows * cols)).map(move |bits| BitMatrix::from_fn(rows, cols, |i, j| bits >> (i * cols + j) & 1 == 1))
    }

    #[test]
    fn products_match_integer_arithmetic_exhaustively() {
        for k in 1..=3 {
            for f in 1..=3 {
                for mcols in 1..=3 {
                    for b in all_matrices(k, f) {
                        for c in all_matrices(f, mcols) {
                            let ip = int_product(&b, &c);
                            let or = bool_product(&b, &c, Semiring::Or).unwrap();
                            let xor = bool_product(&b, &c, Semiring::Xor).unwrap();
                            for (i, row) in ip.iter().enumerate() {
                                for (j, &v) in row.iter().enumerate() {
                                    assert_eq!(or.get(i, j), v > 0);
                                    assert_eq!(xor.get(i, j), v % 2 == 1);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = BitMatrix> {
        prop::collection::vec(any::<bool>(), rows * cols)
            .prop_map(move |v| BitMatrix::from_fn(rows, cols, |i, j| v[i * cols + j]))
    }

    fn loop_hamming(a: &BitMatrix, b: &BitMatrix) -> usize {
        let mut n = 0;
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if a.get(i, j) != b.get(i, j) {
                    n += 1;
                }
            }
        }
        n
    }

    proptest! {
        #[test]
        fn hamming_matches_loop(a in arb_matrix(8, 8), b in arb_matrix(8, 8)) {
            prop_assert_eq!(hamming(&a, &b).unwrap(), loop_hamming(&a, &b));
        }

        #[test]
        fn hamming_is_a_metric(a in arb_matrix(5, 7), b in arb_matrix(5, 7), c in arb_matrix(5, 7)) {
            let ab = hamming(&a, &b).unwrap();
            prop_assert_eq!(hamming(&a, &a).unwrap(), 0);
            prop_assert_eq!(ab, hamming(&b, &a).unwrap());
            prop_assert!(hamming(&a, &c).unwrap() <= ab + hamming(&b, &c).unwrap());
        }

        #[test]
        fn weighted_matches_loop(a in arb_matrix(6, 4), b in arb_matrix(6, 4)) {
            let w = WeightVector::powers_of_two(4);
            let mut expect = 0.0;
            for i in 0..6 {
                for j in 0..4 {
                    if a.get(i, j) != b.get(i, j) {
                        expect += w.as_slice()[j];
                    }
                }
            }
            prop_assert_eq!(weighted_distance(&a, &b, &w).unwrap(), expect);
            prop_assert_eq!(
                weighted_distance(&a, &b, &WeightVector::uniform(4)).unwrap(),
                hamming(&a, &b).unwrap() as f64
            );
        }
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Generators for the arithmetic benchmark circuits used throughout the
//! tests and the CLI: ripple-carry adders, array multipliers, a butterfly
//! (sum and difference) and a sum of absolute differences.
//!
//! Every generator declares operand bits and results MSB-first, so the
//! default interpretation (all outputs as one unsigned word, output 0 most
//! significant) applies to the single-word circuits.

use crate::netlist::{GateKind, NetId, Netlist, NetlistBuilder};
use crate::qor::{OutputInterpretation, Word};

struct Gates {
    b: NetlistBuilder,
}

impl Gates {
    fn new(name: &str) -> Self {
        Gates {
            b: NetlistBuilder::new(name),
        }
    }

    /// Declares an MSB-first operand; returns its bits LSB-first.
    fn operand(&mut self, prefix: &str, bits: usize) -> Vec<NetId> {
        let mut v: Vec<NetId> = (0..bits).rev().map(|i| self.b.input(&format!("{prefix}{i}"))).collect();
        v.reverse();
        v
    }

    fn and(&mut self, x: NetId, y: NetId) -> NetId {
        self.b.gate(GateKind::And, &[x, y])
    }

    fn or(&mut self, x: NetId, y: NetId) -> NetId {
        self.b.gate(GateKind::Or, &[x, y])
    }

    fn xor(&mut self, x: NetId, y: NetId) -> NetId {
        self.b.gate(GateKind::Xor, &[x, y])
    }

    fn not(&mut self, x: NetId) -> NetId {
        self.b.gate(GateKind::Not, &[x])
    }

    fn zero(&mut self) -> NetId {
        self.b.gate(GateKind::Const0, &[])
    }

    fn half_adder(&mut self, x: NetId, y: NetId) -> (NetId, NetId) {
        (self.xor(x, y), self.and(x, y))
    }

    fn full_adder(&mut self, x: NetId, y: NetId, c: NetId) -> (NetId, NetId) {
        let p = self.xor(x, y);
        let s = self.xor(p, c);
        let g = self.and(x, y);
        let t = self.and(p, c);
        (s, self.or(g, t))
    }

    /// LSB-first ripple addition of equal-width words; result has one extra bit.
    fn add(&mut self, x: &[NetId], y: &[NetId], carry_in: Option<NetId>) -> Vec<NetId> {
        assert_eq!(x.len(), y.len());
        let mut out = Vec::with_capacity(x.len() + 1);
        let mut carry = carry_in;
        for (&a, &b) in x.iter().zip(y) {
            let (s, c) = match carry {
                None => self.half_adder(a, b),
                Some(c) => self.full_adder(a, b, c),
            };
            out.push(s);
            carry = Some(c);
        }
        out.push(carry.expect("non-empty operands"));
        out
    }

    fn extend(&mut self, x: &[NetId], width: usize) -> Vec<NetId> {
        let mut v = x.to_vec();
        while v.len() < width {
            let z = self.zero();
            v.push(z);
        }
        v
    }

    /// `|x - y|` for unsigned LSB-first words, same width as the operands.
    fn abs_diff(&mut self, x: &[NetId], y: &[NetId]) -> Vec<NetId> {
        let ny: Vec<NetId> = y.iter().map(|&b| self.not(b)).collect();
        let one = self.b.gate(GateKind::Const1, &[]);
        let mut d = self.add(x, &ny, Some(one));
        // Carry out set means x >= y; otherwise negate the difference.
        let no_borrow = d.pop().expect("carry bit");
        let neg = self.not(no_borrow);
        let flipped: Vec<NetId> = d.iter().map(|&b| self.xor(b, neg)).collect();
        let zeros: Vec<NetId> = (0..flipped.len()).map(|_| self.zero()).collect();
        let mut r = self.add(&flipped, &zeros, Some(neg));
        r.pop();
        r
    }

    /// Names result bits `{prefix}{i}` and registers them MSB-first.
    fn finish(mut self, words: &[(&str, Vec<NetId>)]) -> Netlist {
        for (prefix, bits) in words {
            for (i, &net) in bits.iter().enumerate().rev() {
                let name = format!("{prefix}{i}");
                let y = self.b.named_gate(GateKind::Buf, &[net], &name);
                self.b.output(y);
            }
        }
        self.b.build().expect("generated fixture is well formed")
    }
}

/// `bits`-bit ripple-carry adder: inputs `a*`, `b*`; outputs `s{bits}..s0`.
pub fn ripple_carry_adder(bits: usize) -> Netlist {
    let mut g = Gates::new(&format!("adder{bits}"));
    let a = g.operand("a", bits);
    let b = g.operand("b", bits);
    let s = g.add(&a, &b, None);
    g.finish(&[("s", s)])
}

/// Unsigned array multiplier: outputs `p{2 bits - 1}..p0`.
pub fn array_multiplier(bits: usize) -> Netlist {
    let mut g = Gates::new(&format!("mult{bits}"));
    let a = g.operand("a", bits);
    let b = g.operand("b", bits);
    let pp: Vec<Vec<NetId>> = b.iter().map(|&bj| a.iter().map(|&ai| g.and(ai, bj)).collect()).collect();
    let mut product = vec![pp[0][0]];
    let mut acc: Vec<NetId> = pp[0][1..].to_vec();
    for row in pp.iter().skip(1) {
        let acc_ext = g.extend(&acc, row.len());
        let sum = g.add(&acc_ext, row, None);
        product.push(sum[0]);
        acc = sum[1..].to_vec();
    }
    product.extend(acc);
    product.truncate(2 * bits);
    g.finish(&[("p", product)])
}

/// Butterfly: `sum = a + b` and `diff = a - b` (two's complement), each
/// `bits + 1` wide.
pub fn butterfly(bits: usize) -> Netlist {
    let mut g = Gates::new(&format!("but{bits}"));
    let a = g.operand("a", bits);
    let b = g.operand("b", bits);
    let sum = g.add(&a, &b, None);
    let a_ext = g.extend(&a, bits + 1);
    let b_ext = g.extend(&b, bits + 1);
    let nb: Vec<NetId> = b_ext.iter().map(|&x| g.not(x)).collect();
    let one = g.b.gate(GateKind::Const1, &[]);
    let mut diff = g.add(&a_ext, &nb, Some(one));
    diff.pop();
    g.finish(&[("sum", sum), ("diff", diff)])
}

/// Word interpretation for [`butterfly`].
pub fn butterfly_words(bits: usize) -> OutputInterpretation {
    let word = |prefix: &str| Word {
        name: prefix.to_string(),
        bits: (0..=bits).rev().map(|i| format!("{prefix}{i}")).collect(),
    };
    OutputInterpretation::new(vec![word("sum"), word("diff")])
}

/// Sum of absolute differences over `pairs` operand pairs `x{k}`, `y{k}`.
pub fn sum_abs_diff(pairs: usize, bits: usize) -> Netlist {
    assert!(pairs >= 1);
    let mut g = Gates::new(&format!("sad{pairs}x{bits}"));
    let mut terms = Vec::new();
    for k in 0..pairs {
        let x = g.operand(&format!("x{k}_"), bits);
        let y = g.operand(&format!("y{k}_"), bits);
        terms.push(g.abs_diff(&x, &y));
    }
    let width = bits + (usize::BITS - (pairs - 1).leading_zeros()) as usize;
    let mut acc = g.extend(&terms[0], width);
    for t in &terms[1..] {
        let t = g.extend(t, width);
        let mut s = g.add(&acc, &t, None);
        s.pop();
        acc = s;
    }
    g.finish(&[("d", acc)])
}

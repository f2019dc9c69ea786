// SPDX-License-Identifier: Apache-2.0

//! Multi-level synthesis of single-output functions given as truth tables.
//!
//! Functions are split on one variable at a time into XOR, AND, OR or
//! multiplexer forms. Every function already built is remembered together
//! with its complement, so columns share logic. Optionally a reference
//! netlist over the same inputs supplies ready-made signals: when a needed
//! function matches one of its nets, that net's cone is copied instead.

use std::collections::HashMap;

use crate::netlist::{GateKind, NetId, Netlist, NetlistBuilder, NodeFunction};

/// Truth table over `k` variables; row `r` assigns variable `j` the bit
/// `k - 1 - j` of `r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    k: usize,
    words: Vec<u64>,
}

impl TruthTable {
    fn valid(k: usize) -> u64 {
        if k >= 6 {
            !0
        } else {
            (1u64 << (1 << k)) - 1
        }
    }

    fn word_count(k: usize) -> usize {
        if k >= 6 {
            1 << (k - 6)
        } else {
            1
        }
    }

    pub fn constant(k: usize, value: bool) -> Self {
        let w = if value { Self::valid(k) } else { 0 };
        TruthTable {
            k,
            words: vec![w; Self::word_count(k)],
        }
    }

    pub fn from_bits(k: usize, bits: &[bool]) -> Self {
        assert_eq!(bits.len(), 1 << k);
        let mut words = vec![0u64; Self::word_count(k)];
        for (r, _) in bits.iter().enumerate().filter(|(_, b)| **b) {
            words[r / 64] |= 1 << (r % 64);
        }
        TruthTable { k, words }
    }

    pub fn variable(k: usize, j: usize) -> Self {
        let p = k - 1 - j;
        let bits: Vec<bool> = (0..1usize << k).map(|r| r >> p & 1 == 1).collect();
        Self::from_bits(k, &bits)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn map2(&self, o: &TruthTable, f: impl Fn(u64, u64) -> u64) -> TruthTable {
        TruthTable {
            k: self.k,
            words: self.words.iter().zip(&o.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn not(&self) -> TruthTable {
        let v = Self::valid(self.k);
        TruthTable {
            k: self.k,
            words: self.words.iter().map(|w| !w & v).collect(),
        }
    }

    pub fn xor(&self, o: &TruthTable) -> TruthTable {
        self.map2(o, |a, b| a ^ b)
    }

    pub fn constant_value(&self) -> Option<bool> {
        if self.words.iter().all(|&w| w == 0) {
            Some(false)
        } else if *self == Self::constant(self.k, true) {
            Some(true)
        } else {
            None
        }
    }

    /// Cofactors with variable `j` fixed to 0 and to 1, each still a
    /// function of all `k` variables.
    pub fn cofactors(&self, j: usize) -> (TruthTable, TruthTable) {
        let p = self.k - 1 - j;
        let mut f0 = self.words.clone();
        let mut f1 = self.words.clone();
        if p < 6 {
            let shift = 1u32 << p;
            let low = LOW_MASKS[p];
            for (a, b) in f0.iter_mut().zip(f1.iter_mut()) {
                let w = *a;
                *a = (w & low) | (w & low) << shift;
                *b = (w & !low) | (w & !low) >> shift;
            }
        } else {
            let stride = 1usize << (p - 6);
            for w in 0..self.words.len() {
                let base = w & !stride;
                f0[w] = self.words[base];
                f1[w] = self.words[base | stride];
            }
        }
        (TruthTable { k: self.k, words: f0 }, TruthTable { k: self.k, words: f1 })
    }

    pub fn depends_on(&self, j: usize) -> bool {
        let (a, b) = self.cofactors(j);
        a != b
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.k).filter(|&j| self.depends_on(j)).collect()
    }
}

const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Truth tables of every net of `n`, as functions of its primary inputs.
pub fn net_truth_tables(n: &Netlist) -> Vec<Option<TruthTable>> {
    let k = n.inputs().len();
    let mut tt: Vec<Option<TruthTable>> = vec![None; n.net_count()];
    for (j, &i) in n.inputs().iter().enumerate() {
        tt[i] = Some(TruthTable::variable(k, j));
    }
    let words = TruthTable::word_count(k);
    let valid = TruthTable::valid(k);
    for &v in n.topo_order() {
        let node = &n.nodes()[v];
        let fanin: Vec<&TruthTable> = node.fanin.iter().map(|&f| tt[f].as_ref().expect("fanin evaluated")).collect();
        let out: Vec<u64> = (0..words)
            .map(|w| {
                let x = match &node.function {
                    NodeFunction::Gate(g) => g.eval_words(fanin.iter().map(|t| t.words[w])),
                    NodeFunction::Cover(c) => c.cubes.iter().fold(0u64, |acc, cube| {
                        acc | cube.0.iter().zip(&fanin).fold(!0u64, |p, (lit, t)| match lit {
                            crate::netlist::Lit::One => p & t.words[w],
                            crate::netlist::Lit::Zero => p & !t.words[w],
                            crate::netlist::Lit::Any => p,
                        })
                    }),
                };
                x & valid
            })
            .collect();
        tt[node.output] = Some(TruthTable { k, words: out });
    }
    tt
}

/// Signals of a reference netlist that synthesis may copy.
pub struct Reference<'r> {
    netlist: &'r Netlist,
    by_function: HashMap<TruthTable, NetId>,
    copied: HashMap<NetId, NetId>,
}

impl<'r> Reference<'r> {
    /// `netlist` must have the same inputs, in the same order, as the
    /// circuit being synthesized.
    pub fn new(netlist: &'r Netlist) -> Self {
        let tts = net_truth_tables(netlist);
        let mut by_function = HashMap::new();
        for &v in netlist.topo_order() {
            let out = netlist.nodes()[v].output;
            if let Some(t) = &tts[out] {
                by_function.entry(t.clone()).or_insert(out);
            }
        }
        Reference {
            netlist,
            by_function,
            copied: HashMap::new(),
        }
    }
}

pub struct Synthesizer<'b, 'r> {
    k: usize,
    b: &'b mut NetlistBuilder,
    known: HashMap<TruthTable, NetId>,
    reference: Option<Reference<'r>>,
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct Score {
    class: u8,
    support: usize,
    var: usize,
}

impl<'b, 'r> Synthesizer<'b, 'r> {
    pub fn new(b: &'b mut NetlistBuilder, inputs: &[NetId], reference: Option<Reference<'r>>) -> Self {
        let k = inputs.len();
        let mut known = HashMap::new();
        for (j, &i) in inputs.iter().enumerate() {
            known.insert(TruthTable::variable(k, j), i);
        }
        Synthesizer { k, b, known, reference }
    }

    fn available(&self, f: &TruthTable) -> bool {
        let in_ref = |t: &TruthTable| self.reference.as_ref().is_some_and(|r| r.by_function.contains_key(t));
        f.constant_value().is_some() || self.known.contains_key(f) || self.known.contains_key(&f.not()) || in_ref(f) || in_ref(&f.not())
    }

    fn remember(&mut self, f: TruthTable, net: NetId) -> NetId {
        self.known.entry(f).or_insert(net);
        net
    }

    fn gate(&mut self, kind: GateKind, fanin: &[NetId], f: &TruthTable) -> NetId {
        let net = self.b.gate(kind, fanin);
        self.remember(f.clone(), net)
    }

    fn copy_cone(&mut self, net: NetId) -> NetId {
        let r = self.reference.as_ref().expect("reference present");
        if let Some(&done) = r.copied.get(&net) {
            return done;
        }
        let n = r.netlist;
        let new = match n.driver(net) {
            Some(crate::netlist::Driver::Input(j)) => self.known[&TruthTable::variable(self.k, j)],
            Some(crate::netlist::Driver::Node(v)) => {
                let node = n.nodes()[v].clone();
                let fanin: Vec<NetId> = node.fanin.iter().map(|&f| self.copy_cone(f)).collect();
                let out = self.b.fresh_net("_r");
                self.b.push_node(out, fanin, node.function);
                out
            }
            None => unreachable!("reference nets are driven"),
        };
        self.reference.as_mut().expect("reference present").copied.insert(net, new);
        new
    }

    fn reference_net(&mut self, f: &TruthTable) -> Option<NetId> {
        let r = self.reference.as_ref()?;
        if let Some(&net) = r.by_function.get(f) {
            let new = self.copy_cone(net);
            return Some(self.remember(f.clone(), new));
        }
        if let Some(&net) = r.by_function.get(&f.not()) {
            let new = self.copy_cone(net);
            self.remember(f.not(), new);
            return Some(self.gate(GateKind::Not, &[new], f));
        }
        None
    }

    /// A net computing `f`.
    pub fn build(&mut self, f: &TruthTable) -> NetId {
        if let Some(&net) = self.known.get(f) {
            return net;
        }
        if let Some(v) = f.constant_value() {
            let kind = if v { GateKind::Const1 } else { GateKind::Const0 };
            return self.gate(kind, &[], f);
        }
        if let Some(&net) = self.known.get(&f.not()) {
            return self.gate(GateKind::Not, &[net], f);
        }
        if let Some(net) = self.reference_net(f) {
            return net;
        }
        let support = f.support();
        let j = support
            .iter()
            .map(|&j| {
                let (f0, f1) = f.cofactors(j);
                let class = if f1 == f0.not() {
                    0
                } else if f0.constant_value().is_some() || f1.constant_value().is_some() {
                    1
                } else {
                    4 - u8::from(self.available(&f0)) - u8::from(self.available(&f1))
                };
                Score {
                    class,
                    support: f0.support().len() + f1.support().len(),
                    var: j,
                }
            })
            .min()
            .expect("non-constant function has support")
            .var;
        let x = self.known[&TruthTable::variable(self.k, j)];
        let (f0, f1) = f.cofactors(j);
        if f1 == f0.not() {
            let g = self.build(&f0);
            return self.gate(GateKind::Xor, &[x, g], f);
        }
        match (f0.constant_value(), f1.constant_value()) {
            (Some(false), _) => {
                let g = self.build(&f1);
                self.gate(GateKind::And, &[x, g], f)
            }
            (_, Some(false)) => {
                let nx = self.build(&TruthTable::variable(self.k, j).not());
                let g = self.build(&f0);
                self.gate(GateKind::And, &[nx, g], f)
            }
            (_, Some(true)) => {
                let g = self.build(&f0);
                self.gate(GateKind::Or, &[x, g], f)
            }
            (Some(true), _) => {
                let nx = self.build(&TruthTable::variable(self.k, j).not());
                let g = self.build(&f1);
                self.gate(GateKind::Or, &[nx, g], f)
            }
            _ => {
                let diff = f0.xor(&f1);
                if !self.available(&f1) && self.available(&diff) {
                    // f = f0 ^ (x & (f0 ^ f1))
                    let g0 = self.build(&f0);
                    let d = self.build(&diff);
                    let xd = f.xor(&f0);
                    let t = self.gate(GateKind::And, &[x, d], &xd);
                    self.gate(GateKind::Xor, &[g0, t], f)
                } else {
                    let xv = TruthTable::variable(self.k, j);
                    let nx = self.build(&xv.not());
                    let g0 = self.build(&f0);
                    let g1 = self.build(&f1);
                    let hi = f1.map2(&xv, |a, b| a & b);
                    let lo = f0.map2(&xv.not(), |a, b| a & b);
                    let t1 = self.gate(GateKind::And, &[x, g1], &hi);
                    let t0 = self.gate(GateKind::And, &[nx, g0], &lo);
                    self.gate(GateKind::Or, &[t1, t0], f)
                }
            }
        }
    }
}

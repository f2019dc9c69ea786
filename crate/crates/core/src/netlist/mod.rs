// SPDX-License-Identifier: Apache-2.0

//! Combinational gate-level netlists.
//!
//! A [`Netlist`] is a DAG of [`LogicNode`]s over named nets. Each node drives
//! exactly one net and computes either a primitive gate or a single-output
//! sum-of-products cover (the `.names` construct of BLIF). Netlists are only
//! created through [`NetlistBuilder::build`], which checks the structural
//! invariants once: one driver per net, no undriven fanins or outputs, gate
//! arities respected, and no combinational cycles.

mod blif;
mod sim;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

pub use blif::{emit_blif, parse_blif};
pub use sim::Simulator;

use crate::error::{Error, Result};

pub type NetId = usize;

/// Largest input count [`Netlist::truth_table`] enumerates by default.
pub const DEFAULT_TRUTH_TABLE_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    And,
    Or,
    Not,
    Xor,
    Nand,
    Nor,
    Xnor,
    Buf,
    Const0,
    Const1,
}

impl GateKind {
    fn arity_ok(self, n: usize) -> bool {
        match self {
            GateKind::Not | GateKind::Buf => n == 1,
            GateKind::Const0 | GateKind::Const1 => n == 0,
            _ => n >= 2,
        }
    }

    /// Evaluates the gate on 64 lanes at once.
    #[inline]
    pub fn eval_words(self, fanin: impl Iterator<Item = u64>) -> u64 {
        let mut it = fanin;
        match self {
            GateKind::Const0 => 0,
            GateKind::Const1 => !0,
            GateKind::Buf => it.next().unwrap_or(0),
            GateKind::Not => !it.next().unwrap_or(0),
            GateKind::And => it.fold(!0, |a, b| a & b),
            GateKind::Or => it.fold(0, |a, b| a | b),
            GateKind::Xor => it.fold(0, |a, b| a ^ b),
            GateKind::Nand => !it.fold(!0, |a, b| a & b),
            GateKind::Nor => !it.fold(0, |a, b| a | b),
            GateKind::Xnor => !it.fold(0, |a, b| a ^ b),
        }
    }

    pub fn eval(self, fanin: impl Iterator<Item = bool>) -> bool {
        self.eval_words(fanin.map(|b| if b { !0 } else { 0 })) & 1 == 1
    }
}

/// One position of a cube: a required 0, a required 1, or don't-care.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lit {
    Zero,
    One,
    Any,
}

impl Lit {
    pub fn to_char(self) -> char {
        match self {
            Lit::Zero => '0',
            Lit::One => '1',
            Lit::Any => '-',
        }
    }
}

/// A product term over the fanins of a cover node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube(pub Vec<Lit>);

impl Cube {
    pub fn parse(plane: &str) -> Option<Cube> {
        plane
            .chars()
            .map(|c| match c {
                '0' => Some(Lit::Zero),
                '1' => Some(Lit::One),
                '-' => Some(Lit::Any),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Cube)
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn literal_count(&self) -> usize {
        self.0.iter().filter(|l| **l != Lit::Any).count()
    }

    pub fn matches(&self, bits: &[bool]) -> bool {
        self.0.iter().zip(bits).all(|(l, &b)| match l {
            Lit::Zero => !b,
            Lit::One => b,
            Lit::Any => true,
        })
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|l| write!(f, "{}", l.to_char()))
    }
}

/// On-set sum-of-products over a node's fanins. No cubes means constant 0;
/// a width-0 cube means constant 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cover {
    pub width: usize,
    pub cubes: Vec<Cube>,
}

impl Cover {
    pub fn new(width: usize, cubes: Vec<Cube>) -> Self {
        Cover { width, cubes }
    }

    pub fn eval(&self, bits: &[bool]) -> bool {
        self.cubes.iter().any(|c| c.matches(bits))
    }

    pub fn literal_count(&self) -> usize {
        self.cubes.iter().map(Cube::literal_count).sum()
    }

    /// Cube rows sorted and de-duplicated.
    pub fn canonical(&self) -> Vec<String> {
        let mut rows: Vec<String> = self.cubes.iter().map(|c| c.to_string()).collect();
        rows.sort();
        rows.dedup();
        rows
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeFunction {
    Gate(GateKind),
    Cover(Cover),
}

impl NodeFunction {
    /// Equivalent cover; XOR-family gates expand to their parity rows.
    pub fn to_cover(&self, width: usize) -> Cover {
        let kind = match self {
            NodeFunction::Cover(c) => return c.clone(),
            NodeFunction::Gate(k) => *k,
        };
        let repeat = |l: Lit| Cube(vec![l; width]);
        let one_hot = |hot: Lit, rest: Lit| -> Vec<Cube> {
            (0..width)
                .map(|i| Cube((0..width).map(|j| if i == j { hot } else { rest }).collect()))
                .collect()
        };
        let parity = |odd: bool| -> Vec<Cube> {
            (0u64..1 << width)
                .filter(|v| (v.count_ones() % 2 == 1) == odd)
                .map(|v| {
                    Cube(
                        (0..width)
                            .map(|i| if v >> (width - 1 - i) & 1 == 1 { Lit::One } else { Lit::Zero })
                            .collect(),
                    )
                })
                .collect()
        };
        let cubes = match kind {
            GateKind::Const0 => vec![],
            GateKind::Const1 => vec![Cube(vec![])],
            GateKind::Buf | GateKind::And => vec![repeat(Lit::One)],
            GateKind::Not | GateKind::Nor => vec![repeat(Lit::Zero)],
            GateKind::Or => one_hot(Lit::One, Lit::Any),
            GateKind::Nand => one_hot(Lit::Zero, Lit::Any),
            GateKind::Xor => parity(true),
            GateKind::Xnor => parity(false),
        };
        Cover::new(width, cubes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicNode {
    pub output: NetId,
    pub fanin: Vec<NetId>,
    pub function: NodeFunction,
}

impl LogicNode {
    pub fn eval(&self, values: &[bool]) -> bool {
        match &self.function {
            NodeFunction::Gate(k) => k.eval(self.fanin.iter().map(|&n| values[n])),
            NodeFunction::Cover(c) => {
                let bits: Vec<bool> = self.fanin.iter().map(|&n| values[n]).collect();
                c.eval(&bits)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    Input(usize),
    Node(usize),
}

#[derive(Debug, Clone)]
pub struct Netlist {
    name: String,
    net_names: Vec<String>,
    net_index: HashMap<String, NetId>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    nodes: Vec<LogicNode>,
    drivers: Vec<Option<Driver>>,
    order: Vec<usize>,
}

impl Netlist {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> &[NetId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NetId] {
        &self.outputs
    }

    pub fn input_names(&self) -> Vec<&str> {
        self.inputs.iter().map(|&n| self.net_name(n)).collect()
    }

    pub fn output_names(&self) -> Vec<&str> {
        self.outputs.iter().map(|&n| self.net_name(n)).collect()
    }

    pub fn nodes(&self) -> &[LogicNode] {
        &self.nodes
    }

    pub fn net_count(&self) -> usize {
        self.net_names.len()
    }

    pub fn net_name(&self, net: NetId) -> &str {
        &self.net_names[net]
    }

    pub fn net_id(&self, name: &str) -> Option<NetId> {
        self.net_index.get(name).copied()
    }

    /// `None` only for names that were registered but never connected.
    pub fn driver(&self, net: NetId) -> Option<Driver> {
        self.drivers[net]
    }

    /// Node indices in a topological order (fanins before fanouts).
    pub fn topo_order(&self) -> &[usize] {
        &self.order
    }

    /// For every net, the indices of the nodes that read it.
    pub fn consumers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.net_count()];
        for (i, node) in self.nodes.iter().enumerate() {
            for &f in &node.fanin {
                if out[f].last() != Some(&i) {
                    out[f].push(i);
                }
            }
        }
        out
    }

    /// Longest path (in nodes) from a primary input to each node's output.
    pub fn levels(&self) -> Vec<usize> {
        let mut net_level = vec![0usize; self.net_count()];
        let mut level = vec![0usize; self.nodes.len()];
        for &i in &self.order {
            let node = &self.nodes[i];
            let l = node.fanin.iter().map(|&f| net_level[f]).max().unwrap_or(0) + 1;
            level[i] = l;
            net_level[node.output] = l;
        }
        level
    }

    /// Evaluates one input vector, ordered like [`Netlist::inputs`].
    pub fn simulate(&self, input: &[bool]) -> Result<Vec<bool>> {
        if input.len() != self.inputs.len() {
            return Err(Error::Ports(format!(
                "input vector has {} bits, netlist has {} inputs",
                input.len(),
                self.inputs.len()
            )));
        }
        let mut values = vec![false; self.net_count()];
        for (&net, &v) in self.inputs.iter().zip(input) {
            values[net] = v;
        }
        for &i in &self.order {
            let node = &self.nodes[i];
            values[node.output] = node.eval(&values);
        }
        Ok(self.outputs.iter().map(|&n| values[n]).collect())
    }

    /// Word-parallel evaluation of many vectors; equal to mapping
    /// [`Netlist::simulate`].
    pub fn simulate_batch(&self, inputs: &[Vec<bool>]) -> Result<Vec<Vec<bool>>> {
        if let Some(bad) = inputs.iter().find(|v| v.len() != self.inputs.len()) {
            return Err(Error::Ports(format!(
                "input vector has {} bits, netlist has {} inputs",
                bad.len(),
                self.inputs.len()
            )));
        }
        let mut sim = Simulator::new(self);
        let mut words = vec![0u64; self.inputs.len()];
        let mut outs = vec![0u64; self.outputs.len()];
        let mut result = Vec::with_capacity(inputs.len());
        for chunk in inputs.chunks(64) {
            words.iter_mut().for_each(|w| *w = 0);
            for (lane, v) in chunk.iter().enumerate() {
                for (w, &b) in words.iter_mut().zip(v) {
                    *w |= u64::from(b) << lane;
                }
            }
            sim.run(&words, &mut outs);
            for lane in 0..chunk.len() {
                result.push(outs.iter().map(|w| w >> lane & 1 == 1).collect());
            }
        }
        Ok(result)
    }

    /// Exhaustive truth table with the default input cap.
    pub fn truth_table(&self) -> Result<crate::boolmat::BitMatrix> {
        self.truth_table_capped(DEFAULT_TRUTH_TABLE_CAP)
    }

    /// `2^k x m` truth table. Row `r` assigns `inputs[0]` the most
    /// significant bit of `r`; column `j` is `outputs[j]`.
    pub fn truth_table_capped(&self, cap: usize) -> Result<crate::boolmat::BitMatrix> {
        let k = self.inputs.len();
        if k > cap {
            return Err(Error::Budget {
                what: "truth-table inputs",
                value: k,
                limit: cap,
            });
        }
        let rows = 1usize << k;
        let mut table = crate::boolmat::BitMatrix::zeros(rows, self.outputs.len());
        let mut sim = Simulator::new(self);
        let mut words = vec![0u64; k];
        let mut outs = vec![0u64; self.outputs.len()];
        for base in (0..rows).step_by(64) {
            let lanes = (rows - base).min(64);
            for (i, w) in words.iter_mut().enumerate() {
                let shift = k - 1 - i;
                *w = (0..lanes).fold(0, |acc, l| acc | ((((base + l) >> shift) & 1) as u64) << l);
            }
            sim.run(&words, &mut outs);
            for (j, &o) in outs.iter().enumerate() {
                for l in 0..lanes {
                    if o >> l & 1 == 1 {
                        table.set(base + l, j, true);
                    }
                }
            }
        }
        Ok(table)
    }

    fn structural_key(&self) -> BTreeMap<&str, (Vec<&str>, Vec<String>)> {
        self.nodes
            .iter()
            .map(|n| {
                let fanin = n.fanin.iter().map(|&f| self.net_name(f)).collect();
                (self.net_name(n.output), (fanin, n.function.to_cover(n.fanin.len()).canonical()))
            })
            .collect()
    }

    /// Equality up to node order, cube order, and gate-vs-cover spelling.
    pub fn structurally_eq(&self, other: &Netlist) -> bool {
        self.name == other.name
            && self.input_names() == other.input_names()
            && self.output_names() == other.output_names()
            && self.structural_key() == other.structural_key()
    }

    /// Copy of this netlist with a different model name.
    pub fn renamed(&self, name: impl Into<String>) -> Netlist {
        Netlist {
            name: name.into(),
            ..self.clone()
        }
    }

    /// Rebuilds the netlist through a builder, e.g. to append logic.
    pub fn to_builder(&self) -> NetlistBuilder {
        let mut b = NetlistBuilder::new(self.name.clone());
        for &i in &self.inputs {
            b.input(self.net_name(i));
        }
        for node in &self.nodes {
            let fanin: Vec<NetId> = node.fanin.iter().map(|&f| b.net(self.net_name(f))).collect();
            let out = b.net(self.net_name(node.output));
            b.push_node(out, fanin, node.function.clone());
        }
        for &o in &self.outputs {
            let id = b.net(self.net_name(o));
            b.output(id);
        }
        b
    }
}

/// Incremental netlist construction; validation happens in [`build`](Self::build).
#[derive(Debug, Clone, Default)]
pub struct NetlistBuilder {
    name: String,
    net_names: Vec<String>,
    net_index: HashMap<String, NetId>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    nodes: Vec<LogicNode>,
    fresh: usize,
}

impl NetlistBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        NetlistBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    /// Id of the net called `name`, creating it on first use.
    pub fn net(&mut self, name: &str) -> NetId {
        if let Some(&id) = self.net_index.get(name) {
            return id;
        }
        let id = self.net_names.len();
        self.net_names.push(name.to_string());
        self.net_index.insert(name.to_string(), id);
        id
    }

    pub fn has_net(&self, name: &str) -> bool {
        self.net_index.contains_key(name)
    }

    /// A new net whose name starts with `prefix` and collides with nothing.
    pub fn fresh_net(&mut self, prefix: &str) -> NetId {
        loop {
            let name = format!("{prefix}{}", self.fresh);
            self.fresh += 1;
            if !self.net_index.contains_key(&name) {
                return self.net(&name);
            }
        }
    }

    pub fn input(&mut self, name: &str) -> NetId {
        let id = self.net(name);
        self.inputs.push(id);
        id
    }

    pub fn output(&mut self, net: NetId) {
        self.outputs.push(net);
    }

    pub fn push_node(&mut self, output: NetId, fanin: Vec<NetId>, function: NodeFunction) {
        self.nodes.push(LogicNode {
            output,
            fanin,
            function,
        });
    }

    /// Adds a gate driving a fresh internal net.
    pub fn gate(&mut self, kind: GateKind, fanin: &[NetId]) -> NetId {
        let out = self.fresh_net("_n");
        self.push_node(out, fanin.to_vec(), NodeFunction::Gate(kind));
        out
    }

    /// Adds a gate driving the net called `name`.
    pub fn named_gate(&mut self, kind: GateKind, fanin: &[NetId], name: &str) -> NetId {
        let out = self.net(name);
        self.push_node(out, fanin.to_vec(), NodeFunction::Gate(kind));
        out
    }

    pub fn cover(&mut self, fanin: &[NetId], cover: Cover, name: &str) -> NetId {
        let out = self.net(name);
        self.push_node(out, fanin.to_vec(), NodeFunction::Cover(cover));
        out
    }

    pub fn net_name(&self, net: NetId) -> &str {
        &self.net_names[net]
    }

    pub fn build(self) -> Result<Netlist> {
        let n_nets = self.net_names.len();
        let mut drivers: Vec<Option<Driver>> = vec![None; n_nets];
        for (i, &net) in self.inputs.iter().enumerate() {
            if drivers[net].is_some() {
                return Err(Error::DuplicateDriver(self.net_names[net].clone()));
            }
            drivers[net] = Some(Driver::Input(i));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if drivers[node.output].is_some() {
                return Err(Error::DuplicateDriver(self.net_names[node.output].clone()));
            }
            drivers[node.output] = Some(Driver::Node(i));
            let name = &self.net_names[node.output];
            match &node.function {
                NodeFunction::Gate(k) if !k.arity_ok(node.fanin.len()) => {
                    return Err(Error::Config(format!(
                        "gate {k:?} driving `{name}` has invalid arity {}",
                        node.fanin.len()
                    )));
                }
                NodeFunction::Cover(c) if c.width != node.fanin.len() || c.cubes.iter().any(|q| q.width() != c.width) => {
                    return Err(Error::Config(format!(
                        "cover driving `{name}` does not match its {} fanins",
                        node.fanin.len()
                    )));
                }
                _ => {}
            }
        }
        for node in &self.nodes {
            if let Some(&f) = node.fanin.iter().find(|&&f| drivers[f].is_none()) {
                return Err(Error::Undriven(self.net_names[f].clone()));
            }
        }
        if let Some(&o) = self.outputs.iter().find(|&&o| drivers[o].is_none()) {
            return Err(Error::Undriven(self.net_names[o].clone()));
        }
        let order = topological_order(&self.nodes, &drivers, n_nets).map_err(|net| Error::Cycle(self.net_names[net].clone()))?;
        Ok(Netlist {
            name: self.name,
            net_names: self.net_names,
            net_index: self.net_index,
            inputs: self.inputs,
            outputs: self.outputs,
            nodes: self.nodes,
            drivers,
            order,
        })
    }
}

/// Kahn's algorithm over nodes; on failure returns a net on a cycle.
fn topological_order(nodes: &[LogicNode], drivers: &[Option<Driver>], n_nets: usize) -> std::result::Result<Vec<usize>, NetId> {
    let mut consumers = vec![Vec::new(); n_nets];
    let mut pending = vec![0usize; nodes.len()];
    for (i, node) in nodes.iter().enumerate() {
        for &f in &node.fanin {
            if let Some(Driver::Node(_)) = drivers[f] {
                consumers[f].push(i);
                pending[i] += 1;
            }
        }
    }
    let mut ready: std::collections::VecDeque<usize> = (0..nodes.len()).filter(|&i| pending[i] == 0).collect();
    let mut order = Vec::with_capacity(nodes.len());
    while let Some(i) = ready.pop_front() {
        order.push(i);
        for &c in &consumers[nodes[i].output] {
            pending[c] -= 1;
            if pending[c] == 0 {
                ready.push_back(c);
            }
        }
    }
    if order.len() == nodes.len() {
        Ok(order)
    } else {
        let stuck = (0..nodes.len()).find(|&i| pending[i] > 0).expect("some node is blocked");
        Err(nodes[stuck].output)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and2() -> Netlist {
        let mut b = NetlistBuilder::new("and2");
        let a = b.input("a");
        let c = b.input("b");
        let y = b.named_gate(GateKind::And, &[a, c], "y");
        b.output(y);
        b.build().unwrap()
    }

    #[test]
    fn and_gate_simulation() {
        let n = and2();
        assert_eq!(n.simulate(&[true, true]).unwrap(), vec![true]);
        assert_eq!(n.simulate(&[true, false]).unwrap(), vec![false]);
        assert!(n.simulate(&[true]).is_err());
    }

    #[test]
    fn xor_chain_parity() {
        let mut b = NetlistBuilder::new("par");
        let ins: Vec<_> = ["a", "b", "c"].iter().map(|n| b.input(n)).collect();
        let t = b.gate(GateKind::Xor, &ins[..2]);
        let y = b.named_gate(GateKind::Xor, &[t, ins[2]], "y");
        b.output(y);
        let n = b.build().unwrap();
        assert_eq!(n.simulate(&[true, true, true]).unwrap(), vec![true]);
        assert_eq!(n.simulate(&[true, true, false]).unwrap(), vec![false]);
    }

    #[test]
    fn truth_tables() {
        let mut b = NetlistBuilder::new("inv");
        let a = b.input("a");
        let y = b.named_gate(GateKind::Not, &[a], "y");
        b.output(y);
        let t = b.build().unwrap().truth_table().unwrap();
        assert_eq!(t, crate::boolmat::BitMatrix::from_u8_rows(&[[1], [0]]).unwrap());

        let t = and2().truth_table().unwrap();
        assert_eq!(t.column(0), vec![false, false, false, true]);
    }

    #[test]
    fn majority_truth_table_matches_rowwise_simulation() {
        let mut b = NetlistBuilder::new("maj");
        let x: Vec<_> = ["a", "b", "c"].iter().map(|n| b.input(n)).collect();
        let ab = b.gate(GateKind::And, &[x[0], x[1]]);
        let bc = b.gate(GateKind::And, &[x[1], x[2]]);
        let ac = b.gate(GateKind::And, &[x[0], x[2]]);
        let y = b.named_gate(GateKind::Or, &[ab, bc, ac], "y");
        b.output(y);
        let n = b.build().unwrap();
        let t = n.truth_table().unwrap();
        for r in 0..8usize {
            let bits: Vec<bool> = (0..3).map(|i| r >> (2 - i) & 1 == 1).collect();
            assert_eq!(t.get(r, 0), n.simulate(&bits).unwrap()[0]);
            assert_eq!(t.get(r, 0), r.count_ones() >= 2);
        }
    }

    #[test]
    fn truth_table_cap() {
        let mut b = NetlistBuilder::new("wide");
        let ins: Vec<_> = (0..11).map(|i| b.input(&format!("i{i}"))).collect();
        let y = b.named_gate(GateKind::And, &ins, "y");
        b.output(y);
        let n = b.build().unwrap();
        assert!(matches!(n.truth_table(), Err(Error::Budget { .. })));
        assert_eq!(n.truth_table_capped(11).unwrap().count_ones(), 1);
    }

    #[test]
    fn builder_rejects_invalid_structure() {
        let mut b = NetlistBuilder::new("dup");
        let a = b.input("a");
        b.named_gate(GateKind::Buf, &[a], "y");
        b.named_gate(GateKind::Not, &[a], "y");
        assert_eq!(b.build().unwrap_err(), Error::DuplicateDriver("y".into()));

        let mut b = NetlistBuilder::new("cyc");
        let a = b.input("a");
        let p = b.net("p");
        let q = b.named_gate(GateKind::And, &[a, p], "q");
        b.named_gate(GateKind::Buf, &[q], "p");
        assert!(matches!(b.build(), Err(Error::Cycle(_))));

        let mut b = NetlistBuilder::new("undriven");
        let a = b.input("a");
        let ghost = b.net("ghost");
        let y = b.named_gate(GateKind::Or, &[a, ghost], "y");
        b.output(y);
        assert_eq!(b.build().unwrap_err(), Error::Undriven("ghost".into()));

        let mut b = NetlistBuilder::new("arity");
        let a = b.input("a");
        b.named_gate(GateKind::And, &[a], "y");
        assert!(matches!(b.build(), Err(Error::Config(_))));
    }

    #[test]
    fn gate_covers_agree_with_gates() {
        let kinds = [
            GateKind::And,
            GateKind::Or,
            GateKind::Xor,
            GateKind::Nand,
            GateKind::Nor,
            GateKind::Xnor,
        ];
        for kind in kinds {
            for width in 2..=4 {
                let cover = NodeFunction::Gate(kind).to_cover(width);
                for v in 0u32..1 << width {
                    let bits: Vec<bool> = (0..width).map(|i| v >> i & 1 == 1).collect();
                    assert_eq!(cover.eval(&bits), kind.eval(bits.iter().copied()), "{kind:?}/{width}");
                }
            }
        }
        for (kind, width) in [(GateKind::Not, 1), (GateKind::Buf, 1), (GateKind::Const0, 0), (GateKind::Const1, 0)] {
            let cover = NodeFunction::Gate(kind).to_cover(width);
            for v in 0u32..1 << width {
                let bits: Vec<bool> = (0..width).map(|i| v >> i & 1 == 1).collect();
                assert_eq!(cover.eval(&bits), kind.eval(bits.iter().copied()));
            }
        }
    }
}

// SPDX-License-Identifier: Apache-2.0

use super::{GateKind, Lit, Netlist, NodeFunction};

#[derive(Debug, Clone, Copy)]
enum OpKind {
    Gate(GateKind),
    /// Range into `Simulator::cubes`.
    Cover { first: u32, count: u32 },
}

#[derive(Debug, Clone, Copy)]
struct Op {
    out: u32,
    fanin_start: u32,
    fanin_len: u32,
    kind: OpKind,
}

/// A cube as `(literal range into Simulator::literals)`.
#[derive(Debug, Clone, Copy)]
struct CubeOps {
    first: u32,
    count: u32,
}

/// Reusable 64-lane simulator for one netlist.
///
/// The netlist is flattened once into a straight-line program in topological
/// order; each [`run`](Simulator::run) evaluates 64 independent input
/// vectors, one per bit lane.
pub struct Simulator<'a> {
    netlist: &'a Netlist,
    ops: Vec<Op>,
    fanins: Vec<u32>,
    cubes: Vec<CubeOps>,
    /// (net, positive polarity)
    literals: Vec<(u32, bool)>,
    values: Vec<u64>,
}

impl<'a> Simulator<'a> {
    pub fn new(netlist: &'a Netlist) -> Self {
        let mut ops = Vec::with_capacity(netlist.nodes().len());
        let mut fanins = Vec::new();
        let mut cubes = Vec::new();
        let mut literals = Vec::new();
        for &i in netlist.topo_order() {
            let node = &netlist.nodes()[i];
            let fanin_start = fanins.len() as u32;
            fanins.extend(node.fanin.iter().map(|&f| f as u32));
            let kind = match &node.function {
                NodeFunction::Gate(k) => OpKind::Gate(*k),
                NodeFunction::Cover(c) => {
                    let first = cubes.len() as u32;
                    for cube in &c.cubes {
                        let lit_first = literals.len() as u32;
                        for (pos, lit) in cube.0.iter().enumerate() {
                            match lit {
                                Lit::One => literals.push((node.fanin[pos] as u32, true)),
                                Lit::Zero => literals.push((node.fanin[pos] as u32, false)),
                                Lit::Any => {}
                            }
                        }
                        cubes.push(CubeOps {
                            first: lit_first,
                            count: literals.len() as u32 - lit_first,
                        });
                    }
                    OpKind::Cover {
                        first,
                        count: c.cubes.len() as u32,
                    }
                }
            };
            ops.push(Op {
                out: node.output as u32,
                fanin_start,
                fanin_len: node.fanin.len() as u32,
                kind,
            });
        }
        Simulator {
            netlist,
            ops,
            fanins,
            cubes,
            literals,
            values: vec![0; netlist.net_count()],
        }
    }

    /// One word per primary input in; one word per primary output out.
    pub fn run(&mut self, inputs: &[u64], outputs: &mut [u64]) {
        assert_eq!(inputs.len(), self.netlist.inputs().len(), "input word count");
        assert_eq!(outputs.len(), self.netlist.outputs().len(), "output word count");
        for (&net, &w) in self.netlist.inputs().iter().zip(inputs) {
            self.values[net] = w;
        }
        for op in &self.ops {
            let fanin = &self.fanins[op.fanin_start as usize..(op.fanin_start + op.fanin_len) as usize];
            let v = match op.kind {
                OpKind::Gate(k) => k.eval_words(fanin.iter().map(|&f| self.values[f as usize])),
                OpKind::Cover { first, count } => {
                    let mut acc = 0u64;
                    for cube in &self.cubes[first as usize..(first + count) as usize] {
                        let lits = &self.literals[cube.first as usize..(cube.first + cube.count) as usize];
                        acc |= lits.iter().fold(!0u64, |p, &(net, pos)| {
                            let v = self.values[net as usize];
                            p & if pos { v } else { !v }
                        });
                    }
                    acc
                }
            };
            self.values[op.out as usize] = v;
        }
        for (o, &net) in outputs.iter_mut().zip(self.netlist.outputs()) {
            *o = self.values[net];
        }
    }
}

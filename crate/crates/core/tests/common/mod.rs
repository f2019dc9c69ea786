// SPDX-License-Identifier: Apache-2.0
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use bmf_synth::fixtures;
use bmf_synth::netlist::{Driver, Netlist, Simulator};
use bmf_synth::partition::Partition;
use bmf_synth::qor::OutputInterpretation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Fixture {
    pub name: &'static str,
    pub netlist: Netlist,
    pub words: Option<OutputInterpretation>,
}

/// The arithmetic corpus used across the integration suite.
pub fn corpus() -> Vec<Fixture> {
    vec![
        Fixture { name: "adder8", netlist: fixtures::ripple_carry_adder(8), words: None },
        Fixture { name: "adder32", netlist: fixtures::ripple_carry_adder(32), words: None },
        Fixture { name: "mult8", netlist: fixtures::array_multiplier(8), words: None },
        Fixture { name: "but8", netlist: fixtures::butterfly(8), words: Some(fixtures::butterfly_words(8)) },
        Fixture { name: "sad2x4", netlist: fixtures::sum_abs_diff(2, 4), words: None },
        Fixture { name: "sad4x8", netlist: fixtures::sum_abs_diff(4, 8), words: None },
    ]
}

/// Checks a partition from scratch: every node in exactly one block, the
/// reported boundaries recomputed from the netlist, the `k`/`m` bounds and
/// an acyclic block graph. Returns the first violation.
pub fn validate_partition(n: &Netlist, p: &Partition) -> Result<(), String> {
    let node_of = |name: &str| -> Option<usize> {
        match n.driver(n.net_id(name)?) {
            Some(Driver::Node(i)) => Some(i),
            _ => None,
        }
    };
    let mut owner = vec![usize::MAX; n.nodes().len()];
    for (pos, s) in p.subcircuits.iter().enumerate() {
        if s.id != pos {
            return Err(format!("block at position {pos} has id {}", s.id));
        }
        for name in &s.nodes {
            let i = node_of(name).ok_or_else(|| format!("block {} names unknown node {name}", s.id))?;
            if owner[i] != usize::MAX {
                return Err(format!("node {name} in blocks {} and {}", owner[i], s.id));
            }
            owner[i] = s.id;
        }
    }
    if let Some(i) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(format!("node {} is uncovered", n.net_name(n.nodes()[i].output)));
    }
    if owner != p.assignment {
        return Err("assignment disagrees with block membership".into());
    }

    let primary_out: BTreeSet<usize> = n.outputs().iter().copied().collect();
    let mut consumers: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, node) in n.nodes().iter().enumerate() {
        for &f in &node.fanin {
            consumers.entry(f).or_default().push(owner[i]);
        }
    }
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for s in &p.subcircuits {
        let mut ins = BTreeSet::new();
        let mut outs = BTreeSet::new();
        for (i, node) in n.nodes().iter().enumerate() {
            if owner[i] != s.id {
                continue;
            }
            for &f in &node.fanin {
                let inside = matches!(n.driver(f), Some(Driver::Node(d)) if owner[d] == s.id);
                if !inside {
                    ins.insert(n.net_name(f).to_string());
                    if let Some(Driver::Node(d)) = n.driver(f) {
                        edges.insert((owner[d], s.id));
                    }
                }
            }
            let y = node.output;
            let used = consumers.get(&y).map(|c| c.as_slice()).unwrap_or(&[]);
            if primary_out.contains(&y) || used.is_empty() || used.iter().any(|&c| c != s.id) {
                outs.insert(n.net_name(y).to_string());
            }
        }
        let got_in: BTreeSet<String> = s.inputs.iter().cloned().collect();
        let got_out: BTreeSet<String> = s.outputs.iter().cloned().collect();
        if got_in.len() != s.inputs.len() || got_out.len() != s.outputs.len() {
            return Err(format!("block {} repeats a boundary net", s.id));
        }
        if got_in != ins {
            return Err(format!("block {} inputs {:?}, recomputed {:?}", s.id, got_in, ins));
        }
        if got_out != outs {
            return Err(format!("block {} outputs {:?}, recomputed {:?}", s.id, got_out, outs));
        }
        if ins.len() > p.k || outs.len() > p.m {
            return Err(format!("block {} is {}x{}, bound {}x{}", s.id, ins.len(), outs.len(), p.k, p.m));
        }
    }

    // Kahn's algorithm on the block graph.
    let b = p.subcircuits.len();
    let mut indeg = vec![0usize; b];
    for &(_, t) in &edges {
        indeg[t] += 1;
    }
    let mut ready: Vec<usize> = (0..b).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(u) = ready.pop() {
        seen += 1;
        for &(s, t) in edges.range((u, 0)..=(u, usize::MAX)) {
            debug_assert_eq!(s, u);
            indeg[t] -= 1;
            if indeg[t] == 0 {
                ready.push(t);
            }
        }
    }
    if seen != b {
        return Err("block graph has a cycle".into());
    }
    Ok(())
}

/// Number of random input vectors (out of `vectors`) on which `a` and `b`
/// disagree on any output. Ports are matched by name.
pub fn count_mismatches(a: &Netlist, b: &Netlist, vectors: usize, seed: u64) -> usize {
    let b_in: Vec<usize> = a
        .input_names()
        .iter()
        .map(|name| b.input_names().iter().position(|x| x == name).expect("same inputs"))
        .collect();
    let b_out: Vec<usize> = a
        .output_names()
        .iter()
        .map(|name| b.output_names().iter().position(|x| x == name).expect("same outputs"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sa, mut sb) = (Simulator::new(a), Simulator::new(b));
    let mut oa = vec![0u64; a.outputs().len()];
    let mut ob = vec![0u64; b.outputs().len()];
    let mut ib = vec![0u64; b.inputs().len()];
    let mut bad = 0;
    let mut done = 0;
    while done < vectors {
        let lanes = (vectors - done).min(64);
        let mask = if lanes == 64 { u64::MAX } else { (1u64 << lanes) - 1 };
        let ia: Vec<u64> = (0..a.inputs().len()).map(|_| rng.random()).collect();
        for (i, &j) in b_in.iter().enumerate() {
            ib[j] = ia[i];
        }
        sa.run(&ia, &mut oa);
        sb.run(&ib, &mut ob);
        let diff = b_out.iter().enumerate().fold(0u64, |acc, (i, &j)| acc | (oa[i] ^ ob[j]));
        bad += (diff & mask).count_ones() as usize;
        done += lanes;
    }
    bad
}

/// Bits of `v` over `width` positions, most significant first.
pub fn bits_msb(v: u64, width: usize) -> Vec<bool> {
    (0..width).rev().map(|i| v >> i & 1 == 1).collect()
}

/// Value of MSB-first bits.
pub fn value_msb(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| acc << 1 | b as u64)
}

/// Random combinational DAG: `gates` nodes over `inputs` primary inputs,
/// a mix of primitive gates and small cover nodes; the last `outputs`
/// nodes drive the primary outputs.
pub fn random_netlist(seed: u64, inputs: usize, gates: usize, outputs: usize) -> Netlist {
    use bmf_synth::netlist::{Cover, Cube, GateKind, Lit, NetlistBuilder};
    assert!(outputs <= gates && inputs >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = NetlistBuilder::new(format!("rand{seed}"));
    let mut nets: Vec<usize> = (0..inputs).map(|i| b.input(&format!("x{i}"))).collect();
    let kinds = [
        GateKind::And,
        GateKind::Or,
        GateKind::Xor,
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Xnor,
        GateKind::Not,
        GateKind::Buf,
    ];
    for g in 0..gates {
        let name = format!("g{g}");
        let pick = |rng: &mut ChaCha8Rng, nets: &[usize], n: usize| -> Vec<usize> {
            (0..n).map(|_| nets[rng.random_range(0..nets.len())]).collect()
        };
        let y = if rng.random_bool(0.15) {
            let w = rng.random_range(1..=3);
            let fanin = pick(&mut rng, &nets, w);
            let cubes = (0..rng.random_range(1..=3))
                .map(|_| Cube((0..w).map(|_| [Lit::Zero, Lit::One, Lit::Any][rng.random_range(0..3)]).collect()))
                .collect();
            b.cover(&fanin, Cover::new(w, cubes), &name)
        } else {
            let kind = kinds[rng.random_range(0..kinds.len())];
            let w = match kind {
                GateKind::Not | GateKind::Buf => 1,
                _ => rng.random_range(2..=3),
            };
            let fanin = pick(&mut rng, &nets, w);
            b.named_gate(kind, &fanin, &name)
        };
        nets.push(y);
    }
    for g in gates - outputs..gates {
        let y = b.net(&format!("g{g}"));
        b.output(y);
    }
    b.build().expect("random netlist is well formed")
}

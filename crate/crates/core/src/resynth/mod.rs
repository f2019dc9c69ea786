// SPDX-License-Identifier: Apache-2.0

//! From a factorization back to logic. The compressor realizes the columns
//! of B; the decompressor combines the compressed signals per C with OR or
//! XOR trees.
//!
//! Compressor columns are built two ways: as minimized sum-of-products
//! nodes, and as a shared multi-level network that may copy signals of the
//! subcircuit being approximated. The cheaper cascade under
//! [`area_proxy`] is kept.

pub mod multilevel;
pub mod qm;

use serde::{Deserialize, Serialize};

use crate::bmf::{factorize_best, AssoConfig, FactorResult};
use crate::boolmat::{bool_product, BitMatrix, Semiring};
use crate::error::{Error, Result};
use crate::netlist::{Cover, Cube, GateKind, NetId, Netlist, NetlistBuilder, NodeFunction, DEFAULT_TRUTH_TABLE_CAP};

/// Width above which [`area_proxy`] counts a cover as written instead of
/// minimizing it first.
const AREA_MINIMIZE_CAP: usize = 12;

pub use qm::{is_prime, minimize, prime_implicants, Implicant};

use multilevel::{Reference, Synthesizer, TruthTable};

/// Adds a node computing `on` over `fanin` and driving `name`.
///
/// Constants become CONST gates; otherwise one cover node restricted to the
/// variables the minimized cover actually uses.
fn sop_node(b: &mut NetlistBuilder, fanin: &[NetId], on: &[bool], name: &str) -> NetId {
    let k = fanin.len();
    if on.iter().all(|&x| !x) {
        return b.named_gate(GateKind::Const0, &[], name);
    }
    if on.iter().all(|&x| x) {
        return b.named_gate(GateKind::Const1, &[], name);
    }
    let cover = minimize(k, on);
    let support: Vec<usize> = (0..k).filter(|&j| cover.iter().any(|p| p.care >> (k - 1 - j) & 1 == 1)).collect();
    let cubes = cover
        .iter()
        .map(|p| {
            let full = p.to_cube(k);
            Cube(support.iter().map(|&j| full.0[j]).collect())
        })
        .collect();
    let used: Vec<NetId> = support.iter().map(|&j| fanin[j]).collect();
    b.cover(&used, Cover::new(used.len(), cubes), name)
}

fn check_rows(rows: usize) -> Result<usize> {
    if !rows.is_power_of_two() {
        return Err(Error::Config(format!("truth table has {rows} rows, not a power of two")));
    }
    Ok(rows.trailing_zeros() as usize)
}

/// `k`-input, `f`-output circuit whose output `l` has truth column `l` of `b`.
pub fn compressor_from_b(b: &BitMatrix) -> Result<Netlist> {
    let k = check_rows(b.rows())?;
    let mut nb = NetlistBuilder::new("compressor");
    let ins: Vec<NetId> = (0..k).map(|i| nb.input(&format!("x{i}"))).collect();
    for l in 0..b.cols() {
        let y = sop_node(&mut nb, &ins, &b.column(l), &format!("c{l}"));
        nb.output(y);
    }
    nb.build()
}

/// Balanced tree of 2-input `kind` gates over `terms`, the root named `name`.
fn tree(b: &mut NetlistBuilder, kind: GateKind, terms: &[NetId], name: &str) -> NetId {
    match terms {
        [] => b.named_gate(GateKind::Const0, &[], name),
        [t] => b.named_gate(GateKind::Buf, &[*t], name),
        _ => {
            let mut level = terms.to_vec();
            while level.len() > 2 {
                level = level
                    .chunks(2)
                    .map(|pair| match pair {
                        [x, y] => b.gate(kind, &[*x, *y]),
                        [x] => *x,
                        _ => unreachable!(),
                    })
                    .collect();
            }
            b.named_gate(kind, &level, name)
        }
    }
}

/// Decompressor trees over `ins`. `constants[l]` marks compressed signals
/// known to be constant; repeated signals are merged (OR) or cancelled (XOR).
fn decompressor_into(
    b: &mut NetlistBuilder,
    c: &BitMatrix,
    s: Semiring,
    ins: &[NetId],
    constants: &[Option<bool>],
    names: &[String],
) -> Vec<NetId> {
    (0..c.cols())
        .map(|j| {
            let mut terms: Vec<NetId> = Vec::new();
            let mut one = false;
            for l in (0..c.rows()).filter(|&l| c.get(l, j)) {
                match (constants[l], s) {
                    (Some(false), _) => {}
                    (Some(true), Semiring::Or) => one = true,
                    (Some(true), Semiring::Xor) => one = !one,
                    (None, Semiring::Or) => {
                        if !terms.contains(&ins[l]) {
                            terms.push(ins[l]);
                        }
                    }
                    (None, Semiring::Xor) => match terms.iter().position(|&t| t == ins[l]) {
                        Some(p) => {
                            terms.remove(p);
                        }
                        None => terms.push(ins[l]),
                    },
                }
            }
            match s {
                Semiring::Or if one => b.named_gate(GateKind::Const1, &[], &names[j]),
                Semiring::Or => tree(b, GateKind::Or, &terms, &names[j]),
                Semiring::Xor if one && terms.is_empty() => b.named_gate(GateKind::Const1, &[], &names[j]),
                Semiring::Xor if one => {
                    let inner = b.fresh_net("_x");
                    let inner_name = b.net_name(inner).to_string();
                    let t = tree(b, GateKind::Xor, &terms, &inner_name);
                    b.named_gate(GateKind::Not, &[t], &names[j])
                }
                Semiring::Xor => tree(b, GateKind::Xor, &terms, &names[j]),
            }
        })
        .collect()
}

fn column_constants(bm: &BitMatrix) -> Vec<Option<bool>> {
    (0..bm.cols())
        .map(|l| {
            let col = bm.column(l);
            if col.iter().all(|&x| x) {
                Some(true)
            } else if col.iter().all(|&x| !x) {
                Some(false)
            } else {
                None
            }
        })
        .collect()
}

/// `f`-input, `m`-output OR or XOR network: output `j` combines the inputs
/// `l` with `C(l, j) = 1`.
pub fn decompressor_from_c(c: &BitMatrix, s: Semiring) -> Result<Netlist> {
    if c.rows() == 0 || c.cols() == 0 {
        return Err(Error::Config("decompressor matrix is empty".into()));
    }
    let mut b = NetlistBuilder::new("decompressor");
    let ins: Vec<NetId> = (0..c.rows()).map(|l| b.input(&format!("z{l}"))).collect();
    let names: Vec<String> = (0..c.cols()).map(|j| format!("y{j}")).collect();
    let free = vec![None; c.rows()];
    for y in decompressor_into(&mut b, c, s, &ins, &free, &names) {
        b.output(y);
    }
    b.build()
}

/// How the columns of B become logic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompressorStyle {
    /// One minimized sum-of-products node per column.
    TwoLevel,
    /// A shared multi-level network, reusing reference signals if given.
    MultiLevel,
}

/// Compressor and decompressor of one factorization, wired as a single
/// netlist with the given port names.
pub fn cascade_with(
    factor: &FactorResult,
    name: &str,
    inputs: &[String],
    outputs: &[String],
    style: CompressorStyle,
    reference: Option<&Netlist>,
) -> Result<Netlist> {
    let (bm, cm) = (factor.basis(), factor.mixing());
    let k = check_rows(bm.rows())?;
    if inputs.len() != k || outputs.len() != cm.cols() {
        return Err(Error::Ports(format!(
            "factorization is {k}x{}, ports are {}x{}",
            cm.cols(),
            inputs.len(),
            outputs.len()
        )));
    }
    let mut b = NetlistBuilder::new(name);
    let ins: Vec<NetId> = inputs.iter().map(|n| b.input(n)).collect();
    for n in outputs {
        b.net(n);
    }
    let mids: Vec<NetId> = match style {
        CompressorStyle::TwoLevel => (0..bm.cols())
            .map(|l| {
                let mid = b.fresh_net("_b");
                let mid_name = b.net_name(mid).to_string();
                sop_node(&mut b, &ins, &bm.column(l), &mid_name)
            })
            .collect(),
        CompressorStyle::MultiLevel => {
            let reference = reference.filter(|r| r.input_names() == inputs).map(Reference::new);
            let mut synth = Synthesizer::new(&mut b, &ins, reference);
            (0..bm.cols()).map(|l| synth.build(&TruthTable::from_bits(k, &bm.column(l)))).collect()
        }
    };
    let constants = column_constants(bm);
    for y in decompressor_into(&mut b, cm, factor.semiring, &mids, &constants, outputs) {
        b.output(y);
    }
    b.build()
}

/// The cheaper of the two-level and multi-level cascades; ties keep the
/// two-level one. `reference` is the original subcircuit, if available.
pub fn cascade(factor: &FactorResult, name: &str, inputs: &[String], outputs: &[String], reference: Option<&Netlist>) -> Result<Netlist> {
    let two = cascade_with(factor, name, inputs, outputs, CompressorStyle::TwoLevel, None)?;
    let multi = cascade_with(factor, name, inputs, outputs, CompressorStyle::MultiLevel, reference)?;
    if area_proxy(&multi).value() < area_proxy(&two).value() {
        Ok(multi)
    } else {
        Ok(two)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct AreaCost {
    pub two_input_gate_equivalents: f64,
}

impl AreaCost {
    pub fn value(&self) -> f64 {
        self.two_input_gate_equivalents
    }
}

impl std::ops::Add for AreaCost {
    type Output = AreaCost;

    fn add(self, o: AreaCost) -> AreaCost {
        AreaCost {
            two_input_gate_equivalents: self.two_input_gate_equivalents + o.two_input_gate_equivalents,
        }
    }
}

impl std::iter::Sum for AreaCost {
    fn sum<I: Iterator<Item = AreaCost>>(iter: I) -> AreaCost {
        iter.fold(AreaCost::default(), |a, b| a + b)
    }
}

/// Two-input gate count of a sum of products: each cube of `L` literals
/// needs `L - 1` ANDs and `c` cubes need `c - 1` ORs; inverters are free.
fn sop_cost(cubes: impl Iterator<Item = usize>) -> usize {
    let mut n = 0;
    let mut ands = 0;
    for lits in cubes {
        if lits == 0 {
            // A tautological cube makes the whole node constant.
            return 0;
        }
        n += 1;
        ands += lits - 1;
    }
    ands + n.max(1) - 1
}

/// Cost of one node in 2-input gate equivalents.
pub fn node_cost(function: &NodeFunction, width: usize) -> usize {
    match function {
        NodeFunction::Gate(k) => match k {
            GateKind::Not | GateKind::Buf | GateKind::Const0 | GateKind::Const1 => 0,
            _ => width.saturating_sub(1),
        },
        NodeFunction::Cover(c) if c.cubes.is_empty() => 0,
        NodeFunction::Cover(c) if width <= AREA_MINIMIZE_CAP => {
            let on: Vec<bool> = (0..1usize << width)
                .map(|r| {
                    let bits: Vec<bool> = (0..width).map(|j| r >> (width - 1 - j) & 1 == 1).collect();
                    c.eval(&bits)
                })
                .collect();
            if on.iter().all(|&x| x) {
                return 0;
            }
            // Parity covers are priced like the XOR gate they spell out.
            let odd = |r: usize| r.count_ones() % 2 == 1;
            if width >= 2 && (on.iter().enumerate().all(|(r, &x)| x == odd(r)) || on.iter().enumerate().all(|(r, &x)| x != odd(r))) {
                return width - 1;
            }
            sop_cost(minimize(width, &on).iter().map(|p| p.literals()))
        }
        NodeFunction::Cover(c) => sop_cost(c.cubes.iter().map(|q| q.literal_count())),
    }
}

/// Technology-independent area: the sum of [`node_cost`] over all nodes.
pub fn area_proxy(n: &Netlist) -> AreaCost {
    AreaCost {
        two_input_gate_equivalents: n.nodes().iter().map(|node| node_cost(&node.function, node.fanin.len()) as f64).sum(),
    }
}

/// An approximate replacement for one subcircuit at one degree.
#[derive(Debug, Clone)]
pub struct Approximation {
    pub netlist: Netlist,
    /// Truth table of `netlist`, equal to `B C` under the semiring.
    pub table: BitMatrix,
    pub factor: FactorResult,
    pub area: AreaCost,
}

/// Factorizes the truth table of `sub` at degree `f` and resynthesizes it
/// with `sub`'s port names.
pub fn approximate_subcircuit(sub: &Netlist, f: usize, cfg: &AssoConfig) -> Result<Approximation> {
    let m = sub.truth_table_capped(DEFAULT_TRUTH_TABLE_CAP)?;
    let inputs: Vec<String> = sub.input_names().iter().map(|s| s.to_string()).collect();
    let outputs: Vec<String> = sub.output_names().iter().map(|s| s.to_string()).collect();
    approximate_table(&m, f, cfg, sub.name(), &inputs, &outputs, Some(sub))
}

/// [`approximate_subcircuit`] for a truth table that is already known;
/// `reference`, when given, is a netlist computing `m` over `inputs`.
pub fn approximate_table(
    m: &BitMatrix,
    f: usize,
    cfg: &AssoConfig,
    name: &str,
    inputs: &[String],
    outputs: &[String],
    reference: Option<&Netlist>,
) -> Result<Approximation> {
    if f == 0 || f > m.cols() {
        return Err(Error::Degree { degree: f, max: m.cols() });
    }
    let factor = factorize_best(m, f, cfg)?;
    let netlist = cascade(&factor, name, inputs, outputs, reference)?;
    let table = bool_product(factor.basis(), factor.mixing(), factor.semiring)?;
    let area = area_proxy(&netlist);
    Ok(Approximation {
        netlist,
        table,
        factor,
        area,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_blif;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn all_ones_column_is_constant() {
        let b = BitMatrix::ones(4, 1);
        let n = compressor_from_b(&b).unwrap();
        assert_eq!(n.nodes()[0].function, NodeFunction::Gate(GateKind::Const1));
        assert_eq!(n.truth_table().unwrap(), b);
    }

    #[test]
    fn and_column_is_one_cube() {
        let b = BitMatrix::from_u8_rows(&[[0], [0], [0], [1]]).unwrap();
        let n = compressor_from_b(&b).unwrap();
        let text = crate::netlist::emit_blif(&n);
        assert!(text.contains("11 1\n"), "{text}");
        assert_eq!(n.nodes().len(), 1);
        assert!(compressor_from_b(&BitMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn random_compressor_reproduces_b() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let b = BitMatrix::from_fn(16, 2, |_, _| rng.random_bool(0.5));
            assert_eq!(compressor_from_b(&b).unwrap().truth_table().unwrap(), b);
        }
    }

    #[test]
    fn identity_decompressor_is_free() {
        let n = decompressor_from_c(&BitMatrix::identity(4), Semiring::Or).unwrap();
        assert_eq!(area_proxy(&n).value(), 0.0);
        assert_eq!(n.truth_table().unwrap(), BitMatrix::from_fn(16, 4, |r, j| r >> (3 - j) & 1 == 1));
    }

    #[test]
    fn two_ones_make_one_gate() {
        let c = BitMatrix::from_u8_rows(&[[1], [1]]).unwrap();
        for (s, kind) in [(Semiring::Or, GateKind::Or), (Semiring::Xor, GateKind::Xor)] {
            let n = decompressor_from_c(&c, s).unwrap();
            assert_eq!(n.nodes().len(), 1);
            assert_eq!(n.nodes()[0].function, NodeFunction::Gate(kind));
            assert_eq!(area_proxy(&n).value(), 1.0);
        }
    }

    #[test]
    fn wide_trees_are_balanced() {
        let c = BitMatrix::ones(5, 1);
        let n = decompressor_from_c(&c, Semiring::Xor).unwrap();
        assert_eq!(area_proxy(&n).value(), 4.0);
        assert_eq!(*n.levels().iter().max().unwrap(), 3);
    }

    #[test]
    fn random_decompressor_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for s in [Semiring::Or, Semiring::Xor] {
            for _ in 0..20 {
                let c = BitMatrix::from_fn(3, 4, |_, _| rng.random_bool(0.5));
                let n = decompressor_from_c(&c, s).unwrap();
                // Inputs enumerated as truth-table rows form the 8x3 matrix of all vectors.
                let all = BitMatrix::from_fn(8, 3, |r, l| r >> (2 - l) & 1 == 1);
                assert_eq!(n.truth_table().unwrap(), bool_product(&all, &c, s).unwrap());
            }
        }
    }

    #[test]
    fn minimization_is_exact_and_prime() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 0..=6 {
            for _ in 0..15 {
                let on: Vec<bool> = (0..1 << k).map(|_| rng.random_bool(0.4)).collect();
                let cover = minimize(k, &on);
                for r in 0..1u32 << k {
                    assert_eq!(cover.iter().any(|p| p.covers(r)), on[r as usize]);
                }
                assert!(cover.iter().all(|p| is_prime(&on, p)));
            }
        }
    }

    #[test]
    fn classic_minimization() {
        // f = a'b + ab' + ab over (a, b): primes a and b.
        let cover = minimize(2, &bits("0111"));
        let cubes: Vec<String> = cover.iter().map(|p| p.to_cube(2).to_string()).collect();
        assert_eq!(cubes, vec!["-1", "1-"]);
    }

    #[test]
    fn area_examples() {
        let wires = parse_blif(".model w\n.inputs a\n.outputs y\n.names a y\n1 1\n.end\n").unwrap();
        assert_eq!(area_proxy(&wires).value(), 0.0);
        let and = parse_blif(".model a\n.inputs a b\n.outputs y\n.names a b y\n11 1\n.end\n").unwrap();
        assert_eq!(area_proxy(&and).value(), 1.0);
        let mut b = NetlistBuilder::new("g");
        let x = b.input("a");
        let y = b.input("b");
        let z = b.named_gate(GateKind::And, &[x, y], "z");
        b.output(z);
        assert_eq!(area_proxy(&b.build().unwrap()).value(), 1.0);
        // Redundant cover rows are minimized before counting: ab + a = a.
        let red = parse_blif(".model r\n.inputs a b\n.outputs y\n.names a b y\n11 1\n1- 1\n.end\n").unwrap();
        assert_eq!(area_proxy(&red).value(), 0.0);
        let xor3 = parse_blif(".model x\n.inputs a b c\n.outputs y\n.names a b c y\n001 1\n010 1\n100 1\n111 1\n.end\n").unwrap();
        assert_eq!(area_proxy(&xor3).value(), 2.0);
        let xnor2 = parse_blif(".model x\n.inputs a b\n.outputs y\n.names a b y\n00 1\n11 1\n.end\n").unwrap();
        assert_eq!(area_proxy(&xnor2).value(), 1.0);
        // Not parity: a b' + a' b c costs 1 + 2 ANDs and one OR.
        let mixed = parse_blif(".model m\n.inputs a b c\n.outputs y\n.names a b c y\n10- 1\n011 1\n.end\n").unwrap();
        assert_eq!(area_proxy(&mixed).value(), 4.0);
    }

    #[test]
    fn area_survives_blif_round_trip() {
        for n in [crate::fixtures::array_multiplier(6), crate::fixtures::butterfly(6), crate::fixtures::sum_abs_diff(2, 4)] {
            let back = parse_blif(&crate::netlist::emit_blif(&n)).unwrap();
            assert_eq!(area_proxy(&back), area_proxy(&n));
        }
    }

    #[test]
    fn exact_degree_is_equivalent() {
        let n = crate::fixtures::ripple_carry_adder(2);
        let a = approximate_subcircuit(&n, 3, &AssoConfig::default()).unwrap();
        assert_eq!(a.netlist.truth_table().unwrap(), n.truth_table().unwrap());
        assert_eq!(a.table, n.truth_table().unwrap());
        assert_eq!(a.netlist.input_names(), n.input_names());
        assert_eq!(a.netlist.output_names(), n.output_names());
        assert!(approximate_subcircuit(&n, 0, &AssoConfig::default()).is_err());
        assert!(approximate_subcircuit(&n, 4, &AssoConfig::default()).is_err());
    }

    #[test]
    fn degree_one_matches_reconstruction() {
        let n = parse_blif(".model p\n.inputs a b\n.outputs x y\n.names a b x\n01 1\n10 1\n.names a b y\n11 1\n.end\n").unwrap();
        let a = approximate_subcircuit(&n, 1, &AssoConfig::default()).unwrap();
        assert_eq!(a.netlist.truth_table().unwrap(), a.table);
        assert_eq!(a.table, a.factor.reconstruction());
    }
}

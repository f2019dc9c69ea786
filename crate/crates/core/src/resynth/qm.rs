// SPDX-License-Identifier: Apache-2.0

//! Quine-McCluskey prime generation and a greedy cover.

use std::collections::{BTreeSet, HashSet};

use crate::netlist::{Cube, Lit};

/// A product term over `k` variables: `value` holds the literal polarities,
/// `care` marks the bound variables. Bit `k - 1 - j` stands for variable `j`,
/// matching truth-table row numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Implicant {
    pub value: u32,
    pub care: u32,
}

impl Implicant {
    pub fn covers(&self, row: u32) -> bool {
        row & self.care == self.value
    }

    pub fn literals(&self) -> usize {
        self.care.count_ones() as usize
    }

    pub fn to_cube(&self, k: usize) -> Cube {
        Cube(
            (0..k)
                .map(|j| {
                    let bit = 1 << (k - 1 - j);
                    match (self.care & bit != 0, self.value & bit != 0) {
                        (false, _) => Lit::Any,
                        (true, true) => Lit::One,
                        (true, false) => Lit::Zero,
                    }
                })
                .collect(),
        )
    }
}

/// All prime implicants of the on-set `on` (length `2^k`).
pub fn prime_implicants(k: usize, on: &[bool]) -> Vec<Implicant> {
    assert_eq!(on.len(), 1 << k);
    let full = if k == 0 { 0 } else { u32::MAX >> (32 - k) };
    let mut current: HashSet<Implicant> = (0..on.len() as u32)
        .filter(|&r| on[r as usize])
        .map(|r| Implicant { value: r, care: full })
        .collect();
    let mut primes = BTreeSet::new();
    while !current.is_empty() {
        let mut next = HashSet::new();
        let mut merged = HashSet::new();
        for imp in &current {
            let mut free = imp.care & !imp.value;
            while free != 0 {
                let bit = free & free.wrapping_neg();
                free &= free - 1;
                let partner = Implicant {
                    value: imp.value | bit,
                    care: imp.care,
                };
                if current.contains(&partner) {
                    merged.insert(*imp);
                    merged.insert(partner);
                    next.insert(Implicant {
                        value: imp.value,
                        care: imp.care & !bit,
                    });
                }
            }
        }
        primes.extend(current.iter().filter(|i| !merged.contains(i)).copied());
        current = next;
    }
    primes.into_iter().collect()
}

/// Two-level minimization: essential primes first, then greedily the prime
/// covering the most still-uncovered minterms (ties: fewer literals, then
/// lexicographic cube text).
pub fn minimize(k: usize, on: &[bool]) -> Vec<Implicant> {
    let primes = prime_implicants(k, on);
    let minterms: Vec<u32> = (0..on.len() as u32).filter(|&r| on[r as usize]).collect();
    let mut uncovered: BTreeSet<u32> = minterms.iter().copied().collect();
    let mut chosen: Vec<Implicant> = Vec::new();
    for &r in &minterms {
        let mut covering = primes.iter().filter(|p| p.covers(r));
        if let (Some(&only), None) = (covering.next(), covering.next()) {
            if !chosen.contains(&only) {
                chosen.push(only);
            }
        }
    }
    for p in &chosen {
        uncovered.retain(|&r| !p.covers(r));
    }
    let text = |p: &Implicant| p.to_cube(k).to_string();
    while !uncovered.is_empty() {
        let best = primes
            .iter()
            .filter(|p| !chosen.contains(p))
            .map(|p| (uncovered.iter().filter(|&&r| p.covers(r)).count(), p))
            .filter(|&(gain, _)| gain > 0)
            .min_by(|(ga, a), (gb, b)| {
                gb.cmp(ga)
                    .then_with(|| a.literals().cmp(&b.literals()))
                    .then_with(|| text(a).cmp(&text(b)))
            })
            .map(|(_, p)| *p)
            .expect("primes cover every minterm");
        uncovered.retain(|&r| !best.covers(r));
        chosen.push(best);
    }
    chosen.sort_by_key(|p| text(p));
    chosen
}

/// Whether dropping any single literal of `p` would leave the on-set.
pub fn is_prime(on: &[bool], p: &Implicant) -> bool {
    let inside = |imp: &Implicant| (0..on.len() as u32).filter(|&r| imp.covers(r)).all(|r| on[r as usize]);
    if !inside(p) {
        return false;
    }
    let mut care = p.care;
    while care != 0 {
        let bit = care & care.wrapping_neg();
        care &= care - 1;
        let wider = Implicant {
            value: p.value & !bit,
            care: p.care & !bit,
        };
        if inside(&wider) {
            return false;
        }
    }
    true
}

//! Rescalings and sub-automata.
//!
//! The rescaling `⟨A⟩_{m,t,z}` packs cells into blocks of `m`, runs `t` steps
//! and shifts by `z` cells. As a local rule it acts on block states (block
//! `c_0 … c_{m-1}` is state `index(c_0 … c_{m-1})`, first cell most
//! significant) with radius `R = ⌈(rt + |z|)/m⌉`, the smallest block radius
//! whose window covers the cells that output block 0 depends on.

use serde::{Deserialize, Serialize};

use crate::config::{checked_pow, Budget};
use crate::error::{Error, Result};
use crate::iterated::IterTable;
use crate::rule::{RuleTable, MAX_STATES};
use crate::word::{index_of, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RescalingParams {
    /// Block width.
    pub m: usize,
    /// Steps per rescaled step.
    pub t: usize,
    /// Shift in cells; block 0 of the result starts at cell `z`.
    pub z: i64,
}

impl RescalingParams {
    pub fn new(m: usize, t: usize, z: i64) -> Result<Self> {
        let p = RescalingParams { m, t, z };
        p.validate()?;
        Ok(p)
    }

    pub fn identity() -> Self {
        RescalingParams { m: 1, t: 1, z: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.t == 0 {
            return Err(Error::invalid(
                "packing width and step count must be at least 1",
            ));
        }
        Ok(())
    }

    /// Radius of the rescaled rule.
    pub fn radius(&self, rule: &RuleTable) -> usize {
        let reach = rule.radius() * self.t + self.z.unsigned_abs() as usize;
        reach.div_ceil(self.m)
    }
}

/// Packs `w` into blocks of `m` cells.
pub fn pack(w: &Word, m: usize, states: usize) -> Result<Word> {
    if m == 0 || w.len() % m != 0 {
        return Err(Error::invalid(format!(
            "a word of length {} does not split into blocks of {m}",
            w.len()
        )));
    }
    let block_states = checked_pow(states, m);
    if block_states > MAX_STATES as u128 {
        return Err(Error::unsupported(format!(
            "blocks of {m} cells have {block_states} states"
        )));
    }
    w.check_states(states)?;
    Ok(Word::new(
        w.symbols()
            .chunks(m)
            .map(|b| index_of(b, states) as u8)
            .collect(),
    ))
}

/// Inverse of [`pack`].
pub fn unpack(w: &Word, m: usize, states: usize) -> Result<Word> {
    if m == 0 {
        return Err(Error::invalid("block width must be at least 1"));
    }
    let block_states = checked_pow(states, m);
    if let Some(&bad) = w.symbols().iter().find(|&&b| u128::from(b) >= block_states) {
        return Err(Error::invalid(format!("block state {bad} out of range")));
    }
    Ok(Word::new(
        w.symbols()
            .iter()
            .flat_map(|&b| Word::from_index(u64::from(b), m, states).into_symbols())
            .collect(),
    ))
}

/// The local rule of `⟨rule⟩_{m,t,z}`.
pub fn rescale(rule: &RuleTable, p: RescalingParams, budget: Budget) -> Result<RuleTable> {
    p.validate()?;
    let s = rule.states();
    let block_states = checked_pow(s, p.m);
    if block_states > MAX_STATES as u128 {
        return Err(Error::unsupported(format!(
            "rescaled rule would have {block_states} states"
        )));
    }
    let block_states = block_states as usize;
    let big_r = p.radius(rule);
    let width = 2 * big_r + 1;
    let size = checked_pow(block_states, width);
    budget.check(|| format!("the rescaling {p:?} of {rule}"), size)?;
    let step_table = IterTable::build(rule, p.t, budget)?;

    let reach = rule.radius() * p.t;
    // Unpacked window starts at cell -R*m; output cell z+q needs cells
    // z+q-reach ..= z+q+reach.
    let first = (big_r * p.m) as i64 + p.z - reach as i64;
    debug_assert!(first >= 0);
    let first = first as usize;
    let mut table = Vec::with_capacity(size as usize);
    let mut cells = vec![0u8; width * p.m];
    for nb in 0..size as u64 {
        let blocks = Word::from_index(nb, width, block_states);
        for (k, &b) in blocks.symbols().iter().enumerate() {
            let unpacked = Word::from_index(u64::from(b), p.m, s);
            cells[k * p.m..(k + 1) * p.m].copy_from_slice(unpacked.symbols());
        }
        let out: Vec<u8> = (0..p.m)
            .map(|q| step_table.eval(&cells[first + q..first + q + 2 * reach + 1]))
            .collect();
        table.push(index_of(&out, s) as u8);
    }
    RuleTable::new(block_states, big_r, table)
}

/// State map `ι` from one automaton's states into another's.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectionWitness {
    /// `map[a]` is the image of state `a`.
    pub map: Vec<u8>,
}

/// Largest target state count searched by [`find_subautomaton`].
pub const MAX_SUBAUTOMATON_STATES: usize = 8;

/// Whether `ι ∘ f_A = f_B ∘ ι` on every neighborhood over `A`'s states.
pub fn is_subautomaton_witness(a: &RuleTable, b: &RuleTable, w: &InjectionWitness) -> bool {
    if a.radius() != b.radius() || w.map.len() != a.states() {
        return false;
    }
    let mut images = w.map.clone();
    images.sort_unstable();
    images.dedup();
    if images.len() != w.map.len() || images.iter().any(|&v| usize::from(v) >= b.states()) {
        return false;
    }
    commutes(a, b, &w.map)
}

fn commutes(a: &RuleTable, b: &RuleTable, map: &[u8]) -> bool {
    let width = a.width();
    (0..a.table().len() as u64).all(|u| {
        let cells = Word::from_index(u, width, a.states());
        let image: Vec<u8> = cells
            .symbols()
            .iter()
            .map(|&c| map[usize::from(c)])
            .collect();
        b.apply(&image) == map[usize::from(a.lookup(u as usize))]
    })
}

/// Lexicographically smallest injection `ι` with `ι ∘ f_A = f_B ∘ ι`.
pub fn find_subautomaton(a: &RuleTable, b: &RuleTable) -> Result<Option<InjectionWitness>> {
    if a.radius() != b.radius() {
        return Err(Error::invalid(format!(
            "radii differ: {} and {}",
            a.radius(),
            b.radius()
        )));
    }
    if b.states() > MAX_SUBAUTOMATON_STATES {
        return Err(Error::unsupported(format!(
            "injection search is limited to {MAX_SUBAUTOMATON_STATES} target states"
        )));
    }
    if a.states() > b.states() {
        return Ok(None);
    }
    let mut map = Vec::with_capacity(a.states());
    let mut used = vec![false; b.states()];
    Ok(search(a, b, &mut map, &mut used).map(|map| InjectionWitness { map }))
}

fn search(a: &RuleTable, b: &RuleTable, map: &mut Vec<u8>, used: &mut [bool]) -> Option<Vec<u8>> {
    if map.len() == a.states() {
        return commutes(a, b, map).then(|| map.clone());
    }
    for v in 0..b.states() {
        if used[v] {
            continue;
        }
        used[v] = true;
        map.push(v as u8);
        let found = search(a, b, map, used);
        map.pop();
        used[v] = false;
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Rescales both automata and searches for a sub-automaton witness.
pub fn check_simulation(
    a: &RuleTable,
    b: &RuleTable,
    p1: RescalingParams,
    p2: RescalingParams,
    budget: Budget,
) -> Result<Option<InjectionWitness>> {
    let ra = rescale(a, p1, budget)?;
    let rb = rescale(b, p2, budget)?;
    find_subautomaton(&ra, &rb)
}

/// Whether `phi1(alpha·n) ≤ beta·phi2(gamma·n)` for `n = 1..=n_max`, where
/// `phi[k]` is the value at `k+1`.
pub fn compare_cc_sequences(
    phi1: &[u64],
    phi2: &[u64],
    alpha: usize,
    beta: u64,
    gamma: usize,
    n_max: usize,
) -> Result<bool> {
    if alpha == 0 || beta == 0 || gamma == 0 {
        return Err(Error::invalid("constants must be at least 1"));
    }
    if n_max == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let need1 = alpha.checked_mul(n_max);
    let need2 = gamma.checked_mul(n_max);
    if need1.is_none_or(|k| k > phi1.len()) || need2.is_none_or(|k| k > phi2.len()) {
        return Err(Error::invalid(format!(
            "n_max={n_max} indexes past the sequences (lengths {} and {})",
            phi1.len(),
            phi2.len()
        )));
    }
    Ok((1..=n_max).all(|n| {
        u128::from(phi1[alpha * n - 1]) <= u128::from(beta) * u128::from(phi2[gamma * n - 1])
    }))
}

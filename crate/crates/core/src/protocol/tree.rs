//! The pointer-following problem on a complete binary tree.
//!
//! Every node of a complete binary tree of height `h` carries a bit. Starting
//! at the root, a 0 moves to the left child and a 1 to the right child; the
//! answer is the label of the leaf reached. Alice knows the labels on odd
//! levels and Bob those on even levels (the root is level 1). Taking turns,
//! they solve it with `h` bits, while a single message needs far more.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{checked_pow, Budget};
use crate::error::{Error, Result};
use crate::matrix::{IterationMatrix, MatrixSource};

/// Largest height for which [`tree_matrix`] is built.
pub const MAX_TREE_MATRIX_HEIGHT: usize = 4;

/// Labels in heap order: node `v ≥ 1` has children `2v` and `2v+1` and its
/// label is `labels[v-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeInstance {
    height: usize,
    labels: Vec<u8>,
}

fn level_of(node: usize) -> usize {
    (usize::BITS - node.leading_zeros()) as usize
}

fn alice_owns(node: usize) -> bool {
    level_of(node) % 2 == 1
}

/// Nodes owned by each party, in heap order.
fn owned_nodes(height: usize) -> (Vec<usize>, Vec<usize>) {
    (1..1usize << (height + 1)).partition(|&v| alice_owns(v))
}

impl TreeInstance {
    pub fn new(height: usize, labels: Vec<u8>) -> Result<Self> {
        if height == 0 {
            return Err(Error::invalid("tree height must be at least 1"));
        }
        if height >= 32 {
            return Err(Error::unsupported("tree height is limited to 31"));
        }
        let expected = (1usize << (height + 1)) - 1;
        if labels.len() != expected {
            return Err(Error::invalid(format!(
                "a tree of height {height} has {expected} nodes, got {} labels",
                labels.len()
            )));
        }
        if let Some(pos) = labels.iter().position(|&b| b > 1) {
            return Err(Error::invalid(format!("label {pos} is not a bit")));
        }
        Ok(TreeInstance { height, labels })
    }

    /// The instance whose Alice labels (odd levels, heap order) spell
    /// `alice` and Bob labels spell `bob`, first node most significant.
    pub fn from_assignments(height: usize, alice: u64, bob: u64) -> Result<Self> {
        let (a_nodes, b_nodes) = owned_nodes(height);
        let mut labels = vec![0u8; (1 << (height + 1)) - 1];
        for (nodes, value) in [(&a_nodes, alice), (&b_nodes, bob)] {
            if nodes.len() < 64 && value >> nodes.len() != 0 {
                return Err(Error::invalid("assignment has more bits than nodes"));
            }
            for (k, &v) in nodes.iter().enumerate() {
                labels[v - 1] = (value >> (nodes.len() - 1 - k) & 1) as u8;
            }
        }
        TreeInstance::new(height, labels)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> u8 {
        self.labels[node - 1]
    }
}

/// Label of the leaf reached by following the labels from the root.
pub fn tree_value(inst: &TreeInstance) -> u8 {
    let mut v = 1;
    for _ in 0..inst.height {
        v = 2 * v + usize::from(inst.label(v));
    }
    inst.label(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Speaker {
    Alice,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptStep {
    pub level: usize,
    pub speaker: Speaker,
    pub bit: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeTranscript {
    pub steps: Vec<TranscriptStep>,
    /// The leaf label, known to its owner once the path is fixed.
    pub value: u8,
}

/// Alternating protocol: at each level the owner of the current node
/// announces its label.
pub fn tree_multiround_cost(inst: &TreeInstance) -> TreeTranscript {
    let mut v = 1;
    let mut steps = Vec::with_capacity(inst.height);
    for level in 1..=inst.height {
        let bit = inst.label(v);
        let speaker = if alice_owns(v) {
            Speaker::Alice
        } else {
            Speaker::Bob
        };
        steps.push(TranscriptStep {
            level,
            speaker,
            bit,
        });
        v = 2 * v + usize::from(bit);
    }
    TreeTranscript {
        steps,
        value: inst.label(v),
    }
}

/// Instance counts up to which [`verify_tree`] enumerates everything.
pub const MAX_EXHAUSTIVE_TREE_INSTANCES: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeVerification {
    pub height: usize,
    pub instances: u64,
    /// Every labeling was checked; otherwise `instances` seeded samples.
    pub exhaustive: bool,
    /// Instances whose transcript is not `h` bits long or whose value
    /// differs from [`tree_value`].
    pub counterexample_count: u64,
    /// Labels in heap order.
    pub first_counterexamples: Vec<String>,
}

/// Checks the alternating protocol on every instance of height `h`, or on
/// `samples` random instances drawn from `seed` when there are more than
/// [`MAX_EXHAUSTIVE_TREE_INSTANCES`].
pub fn verify_tree(height: usize, samples: u64, seed: u64) -> Result<TreeVerification> {
    if height == 0 || height > 16 {
        return Err(Error::invalid("tree verification needs 1 <= h <= 16"));
    }
    let nodes = (1usize << (height + 1)) - 1;
    let exhaustive = nodes < 64 && (1u64 << nodes) <= MAX_EXHAUSTIVE_TREE_INSTANCES;
    let instance = |k: u64, rng: &mut Option<ChaCha8Rng>| -> TreeInstance {
        let labels = match rng {
            None => (0..nodes)
                .map(|b| (k >> (nodes - 1 - b) & 1) as u8)
                .collect(),
            Some(r) => (0..nodes).map(|_| r.gen_range(0..2)).collect(),
        };
        TreeInstance { height, labels }
    };
    let instances = if exhaustive { 1u64 << nodes } else { samples };
    let mut rng = (!exhaustive).then(|| ChaCha8Rng::seed_from_u64(seed));
    let mut count = 0;
    let mut first = Vec::new();
    for k in 0..instances {
        let inst = instance(k, &mut rng);
        let t = tree_multiround_cost(&inst);
        if t.steps.len() != height || t.value != tree_value(&inst) {
            count += 1;
            if first.len() < 32 {
                first.push(inst.labels.iter().map(|b| char::from(b'0' + b)).collect());
            }
        }
    }
    Ok(TreeVerification {
        height,
        instances,
        exhaustive,
        counterexample_count: count,
        first_counterexamples: first,
    })
}

/// Matrix with rows indexed by Alice's labels and columns by Bob's (see
/// [`TreeInstance::from_assignments`]) and entries [`tree_value`].
pub fn tree_matrix(height: usize, budget: Budget) -> Result<IterationMatrix> {
    if height == 0 {
        return Err(Error::invalid("tree height must be at least 1"));
    }
    if height > MAX_TREE_MATRIX_HEIGHT {
        return Err(Error::unsupported(format!(
            "tree matrices are limited to height {MAX_TREE_MATRIX_HEIGHT}"
        )));
    }
    let (a_nodes, b_nodes) = owned_nodes(height);
    let rows = checked_pow(2, a_nodes.len());
    let cols = checked_pow(2, b_nodes.len());
    budget.check(
        || format!("the tree matrix of height {height}"),
        IterationMatrix::required_bytes(2, rows, cols),
    )?;
    let (rows, cols) = (rows as usize, cols as usize);
    let wpr = cols.div_ceil(64);

    // Column bitsets: columns in which Bob's label at a node is 1.
    let mut bob_mask = vec![Vec::new(); 1 << (height + 1)];
    for (k, &v) in b_nodes.iter().enumerate() {
        let shift = b_nodes.len() - 1 - k;
        let mut mask = vec![0u64; wpr];
        for c in (0..cols).filter(|c| c >> shift & 1 == 1) {
            mask[c / 64] |= 1 << (c % 64);
        }
        bob_mask[v] = mask;
    }
    let mut alice_shift = vec![0usize; 1 << (height + 1)];
    for (k, &v) in a_nodes.iter().enumerate() {
        alice_shift[v] = a_nodes.len() - 1 - k;
    }
    let full: Vec<u64> = (0..wpr)
        .map(|w| {
            let bits = (cols - 64 * w).min(64);
            if bits == 64 {
                u64::MAX
            } else {
                (1u64 << bits) - 1
            }
        })
        .collect();

    let ctx = RowContext {
        height,
        bob_mask: &bob_mask,
        alice_shift: &alice_shift,
        full: &full,
    };
    let words: Vec<u64> = (0..rows)
        .into_par_iter()
        .flat_map_iter(|r| ctx.value(1, r as u64))
        .collect();
    Ok(IterationMatrix::from_packed_rows(
        rows,
        cols,
        words,
        MatrixSource::Tree { height },
    ))
}

struct RowContext<'a> {
    height: usize,
    bob_mask: &'a [Vec<u64>],
    alice_shift: &'a [usize],
    full: &'a [u64],
}

impl RowContext<'_> {
    /// Columns in which the walk from `node` ends on a 1, for Alice's
    /// assignment `alice`.
    fn value(&self, node: usize, alice: u64) -> Vec<u64> {
        let leaf = level_of(node) == self.height + 1;
        if alice_owns(node) {
            let bit = alice >> self.alice_shift[node] & 1;
            if leaf {
                return if bit == 1 {
                    self.full.to_vec()
                } else {
                    vec![0; self.full.len()]
                };
            }
            return self.value(2 * node + bit as usize, alice);
        }
        let mask = &self.bob_mask[node];
        if leaf {
            return mask.clone();
        }
        let left = self.value(2 * node, alice);
        let right = self.value(2 * node + 1, alice);
        left.iter()
            .zip(&right)
            .zip(mask)
            .map(|((l, r), m)| (l & !m) | (r & m))
            .collect()
    }
}

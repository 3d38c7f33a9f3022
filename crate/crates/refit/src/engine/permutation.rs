//! Permutation sampling and enumeration.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::EXHAUSTIVE_MAX_N;
use crate::error::{Error, Result};
use crate::rng::RngPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanMode {
    Sampled,
    Exhaustive,
}

/// A set of permutations of `{0, .., n-1}`, either sampled uniformly or the
/// full enumeration of all `n!`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationPlan {
    pub mode: PlanMode,
    permutations: Vec<Vec<usize>>,
}

impl PermutationPlan {
    pub fn len(&self) -> usize {
        self.permutations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutations.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vec<usize>> {
        self.permutations.iter()
    }

    pub fn get(&self, b: usize) -> &[usize] {
        &self.permutations[b]
    }
}

fn fisher_yates(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

/// Draw `count` permutations i.i.d. uniformly over the symmetric group,
/// with replacement, one independent stream per index. The identity is not
/// excluded.
pub fn sample_permutations(n: usize, count: usize, policy: &RngPolicy) -> PermutationPlan {
    let permutations = (0..count)
        .map(|b| fisher_yates(n, &mut policy.permutation_stream(b as u64)))
        .collect();
    PermutationPlan {
        mode: PlanMode::Sampled,
        permutations,
    }
}

/// Advance to the next permutation in lexicographic order; false at the end.
fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All `n!` permutations in lexicographic order. Guarded to small `n`.
pub fn exhaustive_permutations(n: usize) -> Result<PermutationPlan> {
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::TooLarge {
            n,
            max: EXHAUSTIVE_MAX_N,
        });
    }
    let mut permutations = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        permutations.push(p.clone());
        if !next_permutation(&mut p) {
            break;
        }
    }
    Ok(PermutationPlan {
        mode: PlanMode::Exhaustive,
        permutations,
    })
}

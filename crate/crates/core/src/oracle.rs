//! Naive ground truth for cross-checking builders and the verifier.
//!
//! Nothing here calls into the builders or reuses the verifier's counting;
//! counts come from a linear scan and existence from plain backtracking.

use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::design::{Block, ResolvableDesign, SystemKind};
use crate::error::{Error, Result};
use crate::verify::SubsetTally;

/// Number of blocks containing every element of `subset`.
pub fn oracle_subset_count(blocks: &[Block], subset: &[u32]) -> Result<usize> {
    if subset.is_empty() {
        return Err(Error::InvalidParameter("subset must be nonempty".into()));
    }
    if subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!(
            "subset {subset:?} is not strictly ascending"
        )));
    }
    Ok(blocks
        .iter()
        .filter(|b| subset.iter().all(|x| b.elements().contains(x)))
        .count())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(ResolvableDesign),
    /// The whole space was explored.
    NotFound,
    /// The time budget ran out first; nothing is claimed.
    Indeterminate,
}

/// Exhaustive search for a KTS(n), n in {3, 9}, with every block sum at
/// least `required_min_sum`.
///
/// Classes are filled one block at a time, each new block taking the
/// smallest point not yet in the current class. The block through 0 in each
/// new class must take the smallest partner of 0 still uncovered, which
/// fixes the order of classes without losing solutions.
pub fn oracle_search_kts(
    n: u32,
    required_min_sum: u64,
    budget: Option<Duration>,
) -> Result<SearchOutcome> {
    if n % 6 != 3 {
        return Err(Error::InvalidOrder {
            order: n,
            reason: "no Kirkman triple system has this order",
        });
    }
    if n > 9 {
        return Err(Error::UnsupportedOrder(n));
    }
    let mut search = Search {
        n: n as usize,
        required: required_min_sum,
        used: vec![vec![false; n as usize]; n as usize],
        in_class: vec![false; n as usize],
        classes: vec![Vec::new()],
        deadline: budget.map(|b| Instant::now() + b),
        nodes: 0,
        timed_out: false,
    };
    let found = search.run();
    if search.timed_out {
        return Ok(SearchOutcome::Indeterminate);
    }
    if !found {
        return Ok(SearchOutcome::NotFound);
    }
    let lists: Vec<Vec<Vec<u32>>> = search
        .classes
        .iter()
        .map(|c| c.iter().map(|b| b.to_vec()).collect())
        .collect();
    Ok(SearchOutcome::Found(ResolvableDesign::from_lists(
        n,
        SystemKind::Triple,
        &lists,
    )?))
}

struct Search {
    n: usize,
    required: u64,
    used: Vec<Vec<bool>>,
    in_class: Vec<bool>,
    classes: Vec<Vec<[u32; 3]>>,
    deadline: Option<Instant>,
    nodes: u64,
    timed_out: bool,
}

impl Search {
    fn class_target(&self) -> usize {
        (self.n - 1) / 2
    }

    fn run(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out = true;
                }
            }
        }
        if self.timed_out {
            return false;
        }

        let current_full = self.classes.last().unwrap().len() * 3 == self.n;
        if current_full {
            if self.classes.len() == self.class_target() {
                return true;
            }
            self.classes.push(Vec::new());
            self.in_class.iter_mut().for_each(|x| *x = false);
            if self.run() {
                return true;
            }
            self.classes.pop();
            // Restore membership of the now-current full class.
            self.in_class.iter_mut().for_each(|x| *x = true);
            return false;
        }

        let p = (0..self.n).find(|&x| !self.in_class[x]).unwrap();
        let forced = if p == 0 {
            (1..self.n).find(|&y| !self.used[0][y])
        } else {
            None
        };
        for y in p + 1..self.n {
            if self.in_class[y] || self.used[p][y] {
                continue;
            }
            if let Some(f) = forced {
                if y != f {
                    continue;
                }
            }
            for z in y + 1..self.n {
                if self.in_class[z] || self.used[p][z] || self.used[y][z] {
                    continue;
                }
                if ((p + y + z) as u64) < self.required {
                    continue;
                }
                self.place(p, y, z, true);
                self.classes
                    .last_mut()
                    .unwrap()
                    .push([p as u32, y as u32, z as u32]);
                if self.run() {
                    return true;
                }
                self.classes.last_mut().unwrap().pop();
                self.place(p, y, z, false);
                if self.timed_out {
                    return false;
                }
            }
        }
        false
    }

    fn place(&mut self, p: usize, y: usize, z: usize, on: bool) {
        for (a, b) in [(p, y), (p, z), (y, z)] {
            self.used[a][b] = on;
            self.used[b][a] = on;
        }
        for x in [p, y, z] {
            self.in_class[x] = on;
        }
    }
}

/// One subset whose naive count disagreed with the verifier's tally.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub subset: Vec<u32>,
    pub oracle: usize,
    pub tally: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub samples: usize,
    pub seed: u64,
    pub disagreements: Vec<Disagreement>,
}

impl CrossCheck {
    pub fn agreed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Compares naive counts with the verifier's tally on `samples` uniformly
/// random t-subsets drawn from a seeded generator.
pub fn cross_check(design: &ResolvableDesign, samples: usize, seed: u64) -> CrossCheck {
    let blocks: Vec<Block> = design.blocks().copied().collect();
    let tally = SubsetTally::build(design);
    let t = design.strength() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut disagreements = Vec::new();
    for _ in 0..samples {
        let mut subset: Vec<u32> = sample(&mut rng, design.order() as usize, t)
            .into_iter()
            .map(|x| x as u32)
            .collect();
        subset.sort_unstable();
        let naive = oracle_subset_count(&blocks, &subset).expect("sampled subsets are ascending");
        let counted = tally.count(&subset);
        if naive != counted as usize {
            disagreements.push(Disagreement {
                subset,
                oracle: naive,
                tally: counted,
            });
        }
    }
    CrossCheck {
        samples,
        seed,
        disagreements,
    }
}

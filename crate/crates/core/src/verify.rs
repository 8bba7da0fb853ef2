//! Construction-agnostic checks for ingested or generated designs.
//!
//! Every check tallies exactly; nothing is sampled. Reports keep going after
//! the first failure and record a bounded list of witnesses per check along
//! with the total number of failures.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::design::{min_sum, min_sum_upper_bound, Block, ResolvableDesign, SystemKind};

/// Witnesses retained per check. `Check::failures` still counts every failure.
pub const MAX_WITNESSES: usize = 256;

/// Evidence for a failed check. Class and factor numbers are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A t-subset (or pair) covered `count` times instead of once.
    Subset { elements: Vec<u32>, count: u32 },
    /// A point that appears `count` times in one class instead of once.
    ClassPoint { class: usize, point: u32, count: u32 },
    /// A class with the wrong number of blocks (or pairs).
    ClassSize { class: usize, size: usize, expected: u64 },
    /// A block listed in more than one class.
    RepeatedBlock { block: Vec<u32>, classes: Vec<usize> },
    /// A global count that disagrees with the counting identity.
    Count { observed: u64, expected: u64 },
    /// The block realising the min-sum, against the bound.
    MinSum { block: Vec<u32>, sum: u64, bound: u64 },
    /// An order that admits no system of this kind.
    Order { order: u32, block_size: u32 },
    Message { text: String },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Subset { elements, count } => {
                write!(f, "subset {elements:?} covered {count} times")
            }
            Witness::ClassPoint {
                class,
                point,
                count,
            } => match count {
                0 => write!(f, "class {class} misses point {point}"),
                _ => write!(f, "class {class} covers point {point} {count} times"),
            },
            Witness::ClassSize {
                class,
                size,
                expected,
            } => write!(f, "class {class} has {size} members, expected {expected}"),
            Witness::RepeatedBlock { block, classes } => {
                write!(f, "block {block:?} appears in classes {classes:?}")
            }
            Witness::Count { observed, expected } => {
                write!(f, "observed {observed}, expected {expected}")
            }
            Witness::MinSum { block, sum, bound } => {
                write!(f, "block {block:?} has sum {sum}, bound is {bound}")
            }
            Witness::Order { order, block_size } => {
                write!(f, "order {order} is not admissible for block size {block_size}")
            }
            Witness::Message { text } => f.write_str(text),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub failures: u64,
    pub witnesses: Vec<Witness>,
}

impl Check {
    pub fn new(name: &str) -> Check {
        Check {
            name: name.to_string(),
            passed: true,
            failures: 0,
            witnesses: Vec::new(),
        }
    }

    pub fn fail(&mut self, witness: Witness) {
        self.passed = false;
        self.failures += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(witness);
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(checks: Vec<Check>) -> VerificationReport {
        VerificationReport {
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn merge(mut self, other: VerificationReport) -> VerificationReport {
        self.checks.extend(other.checks);
        self.passed = self.checks.iter().all(|c| c.passed);
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn witnesses(&self) -> impl Iterator<Item = &Witness> {
        self.checks.iter().flat_map(|c| c.witnesses.iter())
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            let verdict = if check.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{verdict} {}", check.name)?;
            for w in &check.witnesses {
                writeln!(f, "    {w}")?;
            }
            if check.failures as usize > check.witnesses.len() {
                writeln!(
                    f,
                    "    ... {} more",
                    check.failures as usize - check.witnesses.len()
                )?;
            }
        }
        writeln!(
            f,
            "{}",
            if self.passed {
                "verification passed"
            } else {
                "verification FAILED"
            }
        )
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Exact occurrence counts of every t-subset, indexed by colex rank.
#[derive(Clone, Debug)]
pub struct SubsetTally {
    order: u32,
    strength: u32,
    counts: Vec<u32>,
}

impl SubsetTally {
    pub fn build(design: &ResolvableDesign) -> SubsetTally {
        let t = design.strength();
        let n = design.order();
        let mut counts = vec![0u32; binomial(u64::from(n), u64::from(t)) as usize];
        for block in design.blocks() {
            let e = block.elements();
            match t {
                2 => {
                    for j in 1..e.len() {
                        for i in 0..j {
                            counts[rank(&[e[i], e[j]])] += 1;
                        }
                    }
                }
                3 => {
                    for l in 2..e.len() {
                        for j in 1..l {
                            for i in 0..j {
                                counts[rank(&[e[i], e[j], e[l]])] += 1;
                            }
                        }
                    }
                }
                _ => unreachable!("strength is 2 or 3"),
            }
        }
        SubsetTally {
            order: n,
            strength: t,
            counts,
        }
    }

    pub fn strength(&self) -> u32 {
        self.strength
    }

    /// Occurrences of an ascending t-subset.
    pub fn count(&self, subset: &[u32]) -> u32 {
        assert_eq!(subset.len(), self.strength as usize, "subset size must equal strength");
        assert!(subset.windows(2).all(|w| w[0] < w[1]), "subset must be ascending");
        assert!(subset.iter().all(|&x| x < self.order), "subset out of range");
        self.counts[rank(subset)]
    }

    /// Every t-subset with its count, in colex order.
    fn for_each(&self, mut f: impl FnMut(&[u32], u32)) {
        let n = self.order;
        let mut idx = 0;
        match self.strength {
            2 => {
                for y in 1..n {
                    for x in 0..y {
                        f(&[x, y], self.counts[idx]);
                        idx += 1;
                    }
                }
            }
            3 => {
                for z in 2..n {
                    for y in 1..z {
                        for x in 0..y {
                            f(&[x, y, z], self.counts[idx]);
                            idx += 1;
                        }
                    }
                }
            }
            _ => unreachable!("strength is 2 or 3"),
        }
    }
}

fn rank(subset: &[u32]) -> usize {
    subset
        .iter()
        .enumerate()
        .map(|(i, &x)| binomial(u64::from(x), i as u64 + 1) as usize)
        .sum()
}

/// Every t-subset lies in exactly one block, and the block count matches.
pub fn verify_coverage(design: &ResolvableDesign) -> VerificationReport {
    let tally = SubsetTally::build(design);
    let mut coverage = Check::new("coverage");
    tally.for_each(|subset, count| {
        if count != 1 {
            coverage.fail(Witness::Subset {
                elements: subset.to_vec(),
                count,
            });
        }
    });

    let mut block_count = Check::new("block_count");
    let expected = design.kind().expected_blocks(design.order());
    let observed = design.block_count() as u64;
    if observed != expected {
        block_count.fail(Witness::Count { observed, expected });
    }
    VerificationReport::new(vec![coverage, block_count])
}

/// Every class partitions the points, class sizes and count match, and no
/// block is listed twice.
pub fn verify_resolution(design: &ResolvableDesign) -> VerificationReport {
    let n = design.order();
    let k = u64::from(design.block_size());

    let mut partition = Check::new("class_partition");
    let mut size = Check::new("class_size");
    let mut seen = vec![0u32; n as usize];
    for (ci, class) in design.classes().iter().enumerate() {
        seen.iter_mut().for_each(|s| *s = 0);
        for block in class.blocks() {
            for &x in block.elements() {
                seen[x as usize] += 1;
            }
        }
        for (point, &count) in seen.iter().enumerate() {
            if count != 1 {
                partition.fail(Witness::ClassPoint {
                    class: ci + 1,
                    point: point as u32,
                    count,
                });
            }
        }
        if class.len() as u64 * k != u64::from(n) {
            size.fail(Witness::ClassSize {
                class: ci + 1,
                size: class.len(),
                expected: u64::from(n) / k,
            });
        }
    }

    let mut count = Check::new("class_count");
    let expected = design.kind().expected_classes(n);
    let observed = design.classes().len() as u64;
    if observed != expected {
        count.fail(Witness::Count { observed, expected });
    }

    let mut distinct = Check::new("distinct_blocks");
    let mut homes: HashMap<Block, Vec<usize>> = HashMap::new();
    for (ci, class) in design.classes().iter().enumerate() {
        for &block in class.blocks() {
            homes.entry(block).or_default().push(ci + 1);
        }
    }
    let mut repeated: Vec<_> = homes.into_iter().filter(|(_, c)| c.len() > 1).collect();
    repeated.sort();
    for (block, classes) in repeated {
        distinct.fail(Witness::RepeatedBlock {
            block: block.elements().to_vec(),
            classes,
        });
    }

    VerificationReport::new(vec![partition, size, count, distinct])
}

/// Whether a Kirkman system with block size `k` can exist at order `n`.
pub fn verify_admissible(n: u32, k: u32) -> bool {
    match k {
        3 => n % 6 == 3,
        4 => n % 12 == 4 || n % 12 == 8,
        _ => false,
    }
}

fn admissible_check(design: &ResolvableDesign) -> Check {
    let mut check = Check::new("admissible_order");
    if !verify_admissible(design.order(), design.block_size()) {
        check.fail(Witness::Order {
            order: design.order(),
            block_size: design.block_size(),
        });
    }
    check
}

/// The min-sum equals the largest value any Steiner system of these
/// parameters can reach.
pub fn verify_max_min_sum(design: &ResolvableDesign) -> VerificationReport {
    let mut check = Check::new("max_min_sum");
    let bound = min_sum_upper_bound(design.strength(), design.block_size(), design.order());
    match (min_sum(design), bound) {
        (Ok(sum), Ok(bound)) => {
            if sum != bound {
                let block = design
                    .blocks()
                    .find(|b| b.sum() == sum)
                    .expect("min-sum is realised by some block");
                check.fail(Witness::MinSum {
                    block: block.elements().to_vec(),
                    sum,
                    bound,
                });
            }
        }
        (Err(e), _) | (_, Err(e)) => check.fail(Witness::Message {
            text: e.to_string(),
        }),
    }
    VerificationReport::new(vec![check])
}

/// Admissibility, coverage, resolution and min-sum optimality together.
pub fn verify_design(design: &ResolvableDesign) -> VerificationReport {
    VerificationReport::new(vec![admissible_check(design)])
        .merge(verify_coverage(design))
        .merge(verify_resolution(design))
        .merge(verify_max_min_sum(design))
}

/// Coverage plus resolution: the design is a Kirkman system of its kind.
pub fn verify_structure(design: &ResolvableDesign) -> VerificationReport {
    verify_coverage(design).merge(verify_resolution(design))
}

pub(crate) fn kind_name(kind: SystemKind) -> &'static str {
    match kind {
        SystemKind::Triple => "KTS",
        SystemKind::Quadruple => "KQS",
    }
}

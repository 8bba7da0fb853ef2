//! Blocks, parallel classes and resolvable designs.
//!
//! Points of an order-`n` design are the dense labels `0..n`; a smaller label
//! marks more popular data. Blocks are stored in canonical (ascending) form,
//! classes keep their blocks sorted lexicographically, and a design keeps its
//! classes in construction order.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest block the crate represents.
pub const MAX_BLOCK: usize = 4;

/// Ascending tuple of distinct point labels.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block {
    elems: [u32; MAX_BLOCK],
    len: u8,
}

impl Block {
    /// Sorts `elements` into a block, rejecting repeats.
    pub fn new(elements: &[u32]) -> Result<Block> {
        if elements.is_empty() || elements.len() > MAX_BLOCK {
            return Err(Error::BlockLength {
                len: elements.len(),
                max: MAX_BLOCK,
            });
        }
        let mut elems = [0u32; MAX_BLOCK];
        elems[..elements.len()].copy_from_slice(elements);
        let sorted = &mut elems[..elements.len()];
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateElement(w[0]));
        }
        Ok(Block {
            elems,
            len: elements.len() as u8,
        })
    }

    pub fn elements(&self) -> &[u32] {
        &self.elems[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, x: u32) -> bool {
        self.elements().binary_search(&x).is_ok()
    }

    pub fn sum(&self) -> u64 {
        self.elements().iter().map(|&x| u64::from(x)).sum()
    }

    /// Largest element; blocks are never empty.
    pub fn max(&self) -> u32 {
        self.elems[self.len as usize - 1]
    }
}

impl Ord for Block {
    fn cmp(&self, other: &Self) -> Ordering {
        self.elements().cmp(other.elements())
    }
}

impl PartialOrd for Block {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.elements().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for Block {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements().serialize(s)
    }
}

/// Canonical block for `elements` in a design of the given order.
pub fn canonical_block(elements: &[u32], order: u32) -> Result<Block> {
    if let Some(&element) = elements.iter().find(|&&x| x >= order) {
        return Err(Error::OutOfRange { element, order });
    }
    Block::new(elements)
}

pub fn block_sum(block: &Block) -> u64 {
    block.sum()
}

/// The two families of Kirkman systems this crate builds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SystemKind {
    /// S(2,3,n): every pair in exactly one triple.
    Triple,
    /// S(3,4,n): every triple in exactly one quadruple.
    Quadruple,
}

impl SystemKind {
    pub fn from_params(strength: u32, block_size: u32) -> Result<SystemKind> {
        match (strength, block_size) {
            (2, 3) => Ok(SystemKind::Triple),
            (3, 4) => Ok(SystemKind::Quadruple),
            _ => Err(Error::UnsupportedParameters {
                strength,
                block_size,
            }),
        }
    }

    pub fn block_size(self) -> u32 {
        match self {
            SystemKind::Triple => 3,
            SystemKind::Quadruple => 4,
        }
    }

    pub fn strength(self) -> u32 {
        match self {
            SystemKind::Triple => 2,
            SystemKind::Quadruple => 3,
        }
    }

    pub fn expected_blocks(self, order: u32) -> u64 {
        let n = u64::from(order);
        match self {
            SystemKind::Triple => n * n.saturating_sub(1) / 6,
            SystemKind::Quadruple => n * n.saturating_sub(1) * n.saturating_sub(2) / 24,
        }
    }

    pub fn expected_classes(self, order: u32) -> u64 {
        let n = u64::from(order);
        match self {
            SystemKind::Triple => n.saturating_sub(1) / 2,
            SystemKind::Quadruple => n.saturating_sub(1) * n.saturating_sub(2) / 6,
        }
    }

    /// Blocks through any single point.
    pub fn expected_replication(self, order: u32) -> u64 {
        // One block per class through each point.
        self.expected_classes(order)
    }

    /// Blocks through any pair of points.
    pub fn expected_pair_multiplicity(self, order: u32) -> u64 {
        match self {
            SystemKind::Triple => 1,
            SystemKind::Quadruple => u64::from(order.saturating_sub(2)) / 2,
        }
    }
}

/// Blocks partitioning the point set; stored in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParallelClass {
    blocks: Vec<Block>,
}

impl ParallelClass {
    pub fn new(mut blocks: Vec<Block>) -> ParallelClass {
        blocks.sort_unstable();
        ParallelClass { blocks }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// A Kirkman system: order, parameters, and its parallel classes in
/// construction order.
///
/// Construction only checks that blocks are well formed (right size, labels in
/// range). Coverage and resolvability are the verifier's job, so corrupted
/// designs remain representable and can be diagnosed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvableDesign {
    order: u32,
    kind: SystemKind,
    classes: Vec<ParallelClass>,
}

impl ResolvableDesign {
    pub fn new(order: u32, kind: SystemKind, classes: Vec<ParallelClass>) -> Result<Self> {
        let k = kind.block_size() as usize;
        for block in classes.iter().flat_map(|c| c.blocks()) {
            if block.len() != k {
                return Err(Error::BlockSizeMismatch {
                    expected: k,
                    got: block.len(),
                });
            }
            if block.max() >= order {
                return Err(Error::OutOfRange {
                    element: block.max(),
                    order,
                });
            }
        }
        Ok(ResolvableDesign {
            order,
            kind,
            classes,
        })
    }

    /// Builds a design from raw element lists, canonicalizing each block.
    pub fn from_lists(order: u32, kind: SystemKind, classes: &[Vec<Vec<u32>>]) -> Result<Self> {
        let classes = classes
            .iter()
            .map(|class| {
                class
                    .iter()
                    .map(|b| canonical_block(b, order))
                    .collect::<Result<Vec<_>>>()
                    .map(ParallelClass::new)
            })
            .collect::<Result<Vec<_>>>()?;
        ResolvableDesign::new(order, kind, classes)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn block_size(&self) -> u32 {
        self.kind.block_size()
    }

    pub fn strength(&self) -> u32 {
        self.kind.strength()
    }

    pub fn classes(&self) -> &[ParallelClass] {
        &self.classes
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Block> + '_ {
        self.classes.iter().flat_map(|c| c.blocks().iter())
    }

    pub fn block_count(&self) -> usize {
        self.classes.iter().map(ParallelClass::len).sum()
    }

    /// Classes as a set of block sets, for order-insensitive comparison.
    pub fn class_set(&self) -> std::collections::BTreeSet<Vec<Block>> {
        self.classes.iter().map(|c| c.blocks().to_vec()).collect()
    }

    pub fn to_file(&self) -> DesignFile {
        DesignFile {
            order: self.order,
            block_size: self.block_size(),
            strength: self.strength(),
            classes: self
                .classes
                .iter()
                .map(|c| c.blocks().iter().map(|b| b.elements().to_vec()).collect())
                .collect(),
        }
    }

    pub fn from_file(file: &DesignFile) -> Result<Self> {
        let kind = SystemKind::from_params(file.strength, file.block_size)?;
        ResolvableDesign::from_lists(file.order, kind, &file.classes)
    }

    /// Deterministic JSON rendering, one class per line.
    pub fn to_json(&self) -> String {
        self.to_file().to_json()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        ResolvableDesign::from_file(&serde_json::from_str(text)?)
    }
}

/// On-disk design document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignFile {
    pub order: u32,
    pub block_size: u32,
    pub strength: u32,
    pub classes: Vec<Vec<Vec<u32>>>,
}

impl DesignFile {
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"order\": {},\n", self.order));
        out.push_str(&format!("  \"block_size\": {},\n", self.block_size));
        out.push_str(&format!("  \"strength\": {},\n", self.strength));
        out.push_str("  \"classes\": [");
        write_nested_lines(&mut out, &self.classes);
        out.push_str("]\n}\n");
        out
    }
}

pub(crate) fn write_nested_lines(out: &mut String, rows: &[Vec<Vec<u32>>]) {
    if rows.is_empty() {
        return;
    }
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        out.push_str("    [");
        for (j, tuple) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push('[');
            for (l, x) in tuple.iter().enumerate() {
                if l > 0 {
                    out.push(',');
                }
                out.push_str(&x.to_string());
            }
            out.push(']');
        }
        out.push(']');
        if i + 1 < rows.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ");
}

/// Classes of fixed-width tuples kept in the coordinate order a construction
/// wrote them.
///
/// The recursive constructions assign roles (`a`, `b`, `c`, ...) to the
/// coordinates of each source block, so the order coordinates were written in
/// decides which derived class a block lands in. Canonicalizing loses that;
/// this type keeps it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Oriented<const K: usize> {
    pub order: u32,
    pub classes: Vec<Vec<[u32; K]>>,
}

pub type OrientedTriples = Oriented<3>;
pub type OrientedQuads = Oriented<4>;

impl<const K: usize> Oriented<K> {
    pub fn kind() -> SystemKind {
        match K {
            3 => SystemKind::Triple,
            4 => SystemKind::Quadruple,
            _ => unreachable!("only triples and quadruples are oriented"),
        }
    }

    /// Reads a design from canonical blocks, so every tuple is ascending.
    pub fn from_design(design: &ResolvableDesign) -> Result<Self> {
        if design.block_size() as usize != K {
            return Err(Error::BlockSizeMismatch {
                expected: K,
                got: design.block_size() as usize,
            });
        }
        let classes = design
            .classes()
            .iter()
            .map(|c| {
                c.blocks()
                    .iter()
                    .map(|b| {
                        let mut t = [0u32; K];
                        t.copy_from_slice(b.elements());
                        t
                    })
                    .collect()
            })
            .collect();
        Ok(Oriented {
            order: design.order(),
            classes,
        })
    }

    /// Reads tuples exactly as written in a design document.
    pub fn from_file(file: &DesignFile) -> Result<Self> {
        if file.block_size as usize != K {
            return Err(Error::BlockSizeMismatch {
                expected: K,
                got: file.block_size as usize,
            });
        }
        let classes = file
            .classes
            .iter()
            .map(|c| {
                c.iter()
                    .map(|b| {
                        // Validate through the canonical path, keep the written order.
                        canonical_block(b, file.order)?;
                        <[u32; K]>::try_from(b.as_slice()).map_err(|_| Error::BlockSizeMismatch {
                            expected: K,
                            got: b.len(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Oriented {
            order: file.order,
            classes,
        })
    }

    pub fn to_design(&self) -> Result<ResolvableDesign> {
        let classes = self
            .classes
            .iter()
            .map(|c| {
                c.iter()
                    .map(|t| canonical_block(t, self.order))
                    .collect::<Result<Vec<_>>>()
                    .map(ParallelClass::new)
            })
            .collect::<Result<Vec<_>>>()?;
        ResolvableDesign::new(self.order, Self::kind(), classes)
    }
}

/// Smallest block sum across the design.
pub fn min_sum(design: &ResolvableDesign) -> Result<u64> {
    design.blocks().map(Block::sum).min().ok_or(Error::EmptyDesign)
}

/// Largest min-sum any S(t, k, n) can reach: `(n(k-t+1) + k(t-2)) / 2`.
pub fn min_sum_upper_bound(t: u32, k: u32, n: u32) -> Result<u64> {
    if !(2 <= t && t <= k && k <= n) {
        return Err(Error::InvalidParameter(format!(
            "bound needs 2 <= t <= k <= n, got t={t}, k={k}, n={n}"
        )));
    }
    let numerator = u64::from(n) * u64::from(k - t + 1) + u64::from(k) * u64::from(t - 2);
    if numerator % 2 != 0 {
        return Err(Error::NonIntegralBound { t, k, n });
    }
    Ok(numerator / 2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Count {
    pub observed: u64,
    pub expected: u64,
}

impl Count {
    pub fn matches(&self) -> bool {
        self.observed == self.expected
    }
}

/// Structural statistics of a design. Mismatches are listed, never fatal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StatsReport {
    pub order: u32,
    pub block_size: u32,
    pub strength: u32,
    pub blocks: Count,
    pub classes: Count,
    pub class_size_expected: u64,
    /// Number of blocks through each point, indexed by label.
    pub replication: Vec<u64>,
    pub replication_expected: u64,
    pub pair_multiplicity_min: u64,
    pub pair_multiplicity_max: u64,
    pub pair_multiplicity_expected: u64,
    /// Edges when each block is drawn as a cycle through its points.
    pub cycle_edges: u64,
    pub min_sum: Option<u64>,
    pub upper_bound: Option<u64>,
    pub mismatches: Vec<String>,
}

pub fn design_stats(design: &ResolvableDesign) -> StatsReport {
    let n = design.order();
    let kind = design.kind();
    let nu = n as usize;

    let mut replication = vec![0u64; nu];
    let mut pair_counts = vec![0u32; nu * nu.saturating_sub(1) / 2];
    for block in design.blocks() {
        let e = block.elements();
        for (i, &x) in e.iter().enumerate() {
            replication[x as usize] += 1;
            for &y in &e[i + 1..] {
                pair_counts[pair_index(x, y)] += 1;
            }
        }
    }
    let pair_min = pair_counts.iter().copied().min().unwrap_or(0) as u64;
    let pair_max = pair_counts.iter().copied().max().unwrap_or(0) as u64;

    let blocks = Count {
        observed: design.block_count() as u64,
        expected: kind.expected_blocks(n),
    };
    let classes = Count {
        observed: design.classes().len() as u64,
        expected: kind.expected_classes(n),
    };
    let replication_expected = kind.expected_replication(n);
    let pair_expected = kind.expected_pair_multiplicity(n);
    let min_sum = min_sum(design).ok();
    let upper_bound = min_sum_upper_bound(kind.strength(), kind.block_size(), n).ok();

    let mut mismatches = Vec::new();
    if !blocks.matches() {
        mismatches.push(format!(
            "block count {} != expected {}",
            blocks.observed, blocks.expected
        ));
    }
    if !classes.matches() {
        mismatches.push(format!(
            "class count {} != expected {}",
            classes.observed, classes.expected
        ));
    }
    for (point, &r) in replication.iter().enumerate() {
        if r != replication_expected {
            mismatches.push(format!(
                "point {point} lies in {r} blocks, expected {replication_expected}"
            ));
        }
    }
    if pair_min != pair_expected || pair_max != pair_expected {
        mismatches.push(format!(
            "pair multiplicity ranges over {pair_min}..={pair_max}, expected {pair_expected}"
        ));
    }
    if let (Some(m), Some(b)) = (min_sum, upper_bound) {
        if m > b {
            mismatches.push(format!("min-sum {m} exceeds the upper bound {b}"));
        }
    }

    StatsReport {
        order: n,
        block_size: kind.block_size(),
        strength: kind.strength(),
        blocks,
        classes,
        class_size_expected: u64::from(n) / u64::from(kind.block_size()),
        replication,
        replication_expected,
        pair_multiplicity_min: pair_min,
        pair_multiplicity_max: pair_max,
        pair_multiplicity_expected: pair_expected,
        cycle_edges: design.block_count() as u64 * u64::from(kind.block_size()),
        min_sum,
        upper_bound,
        mismatches,
    }
}

/// Colex rank of the pair `x < y`.
fn pair_index(x: u32, y: u32) -> usize {
    let (x, y) = (x as usize, y as usize);
    y * (y - 1) / 2 + x
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<u64>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
        let rmin = self.replication.iter().min().copied().unwrap_or(0);
        let rmax = self.replication.iter().max().copied().unwrap_or(0);
        writeln!(
            f,
            "order {}  block size {}  strength {}",
            self.order, self.block_size, self.strength
        )?;
        writeln!(
            f,
            "blocks:       {} (expected {})",
            self.blocks.observed, self.blocks.expected
        )?;
        writeln!(
            f,
            "classes:      {} (expected {}, {} blocks each)",
            self.classes.observed, self.classes.expected, self.class_size_expected
        )?;
        writeln!(
            f,
            "replication:  {rmin}..={rmax} (expected {})",
            self.replication_expected
        )?;
        writeln!(
            f,
            "pair blocks:  {}..={} (expected {})",
            self.pair_multiplicity_min, self.pair_multiplicity_max, self.pair_multiplicity_expected
        )?;
        writeln!(f, "cycle edges:  {}", self.cycle_edges)?;
        writeln!(
            f,
            "min-sum:      {} (upper bound {})",
            opt(self.min_sum),
            opt(self.upper_bound)
        )?;
        if self.mismatches.is_empty() {
            writeln!(f, "all counts match")
        } else {
            for m in &self.mismatches {
                writeln!(f, "mismatch: {m}")?;
            }
            Ok(())
        }
    }
}

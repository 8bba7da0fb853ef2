//! Kirkman triple systems of order `3^k` with min-sum `3^k`, by tripling.
//!
//! From a KTS(n) with every block sum at least `n`, the order-`3n` system has
//! one class of "columns" `(t, t+n, t+2n)` and, for every source class, three
//! classes that spread each source block over the three copies
//! `[0, n)`, `[n, 2n)`, `[2n, 3n)` of the point set.

use crate::design::{
    min_sum, OrientedTriples, ResolvableDesign,
};
use crate::error::{Error, Result};
use crate::verify::{verify_design, verify_structure, Check, VerificationReport, Witness};

/// Largest exponent `build_kts` accepts (order 6561).
pub const MAX_KTS_EXPONENT: i32 = 8;

/// One source block with the roles `(a, b, c)` the tripling assigns to its
/// coordinates, in the order they were written.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TripleClassSpec {
    /// 0-based source class.
    pub class: usize,
    /// 0-based position within the class.
    pub block: usize,
    pub coords: [u32; 3],
}

impl TripleClassSpec {
    pub fn sum(&self) -> u64 {
        self.coords.iter().map(|&x| u64::from(x)).sum()
    }
}

pub fn specs(src: &OrientedTriples) -> impl Iterator<Item = TripleClassSpec> + '_ {
    src.classes.iter().enumerate().flat_map(|(class, blocks)| {
        blocks
            .iter()
            .enumerate()
            .map(move |(block, &coords)| TripleClassSpec {
                class,
                block,
                coords,
            })
    })
}

pub fn base_kts3_oriented() -> OrientedTriples {
    OrientedTriples {
        order: 3,
        classes: vec![vec![[0, 1, 2]]],
    }
}

/// KTS(3): the single block `(0, 1, 2)`.
pub fn base_kts3() -> ResolvableDesign {
    base_kts3_oriented()
        .to_design()
        .expect("base system is well formed")
}

fn check_source(src: &OrientedTriples) -> Result<ResolvableDesign> {
    let design = src.to_design()?;
    let mut report = verify_structure(&design);
    let mut hypothesis = Check::new("source_min_sum");
    let n = u64::from(src.order);
    match min_sum(&design) {
        Ok(m) if m >= n => {}
        Ok(m) => {
            let block = design.blocks().find(|b| b.sum() == m).unwrap();
            hypothesis.fail(Witness::MinSum {
                block: block.elements().to_vec(),
                sum: m,
                bound: n,
            })
        }
        Err(e) => hypothesis.fail(Witness::Message {
            text: e.to_string(),
        }),
    }
    report = report.merge(VerificationReport::new(vec![hypothesis]));
    if !report.passed {
        return Err(Error::PreconditionFailed {
            context: format!("source is not a KTS({}) with min-sum >= {}", src.order, src.order),
            report: Box::new(report),
        });
    }
    Ok(design)
}

/// Triples a KTS(n), keeping coordinates in the order the construction writes
/// them so the result can be tripled again with the same role assignment.
///
/// Output classes: the column class first, then for each source class `i` the
/// three classes built from `(a, b, c+2n)`, `(a, c, b+2n)` and `(b, c, a+2n)`
/// together with their shifts by `n` and `2n`.
pub fn triple_oriented(src: &OrientedTriples) -> Result<OrientedTriples> {
    check_source(src)?;
    let n = src.order;
    let (n1, n2) = (n, 2 * n);
    let target = 3 * u64::from(n);

    let mut classes = Vec::with_capacity(1 + 3 * src.classes.len());
    let columns: Vec<[u32; 3]> = (0..n).map(|t| [t, t + n1, t + n2]).collect();
    debug_assert!(columns
        .iter()
        .enumerate()
        .all(|(t, b)| b.iter().map(|&x| u64::from(x)).sum::<u64>() == 3 * t as u64 + target));
    classes.push(columns);

    let mut fam = [Vec::new(), Vec::new(), Vec::new()];
    let mut current = None;
    for spec in specs(src) {
        if current != Some(spec.class) {
            if current.is_some() {
                classes.extend(fam.iter_mut().map(std::mem::take));
            }
            current = Some(spec.class);
        }
        let [a, b, c] = spec.coords;
        // Each family pairs two coordinates and lifts the third.
        for (slot, (x, y, z)) in [(a, b, c), (a, c, b), (b, c, a)].into_iter().enumerate() {
            let blocks = [
                [x, y, z + n2],
                [x + n1, y + n1, z],
                [x + n2, y + n2, z + n1],
            ];
            for block in blocks {
                debug_assert!(block.iter().map(|&v| u64::from(v)).sum::<u64>() >= target);
                fam[slot].push(block);
            }
        }
    }
    if current.is_some() {
        classes.extend(fam.iter_mut().map(std::mem::take));
    }

    let out = OrientedTriples {
        order: 3 * n,
        classes,
    };
    let report = verify_design(&out.to_design()?);
    if !report.passed {
        return Err(Error::PostconditionFailed {
            context: format!("tripling KTS({n})"),
            report: Box::new(report),
        });
    }
    Ok(out)
}

/// Triples a canonical KTS(n); every source block is read as `a < b < c`.
pub fn triple_kts(design: &ResolvableDesign) -> Result<ResolvableDesign> {
    triple_oriented(&OrientedTriples::from_design(design)?)?.to_design()
}

/// KTS(3^exponent) with the coordinate order of the construction.
pub fn build_kts_oriented(exponent: i32) -> Result<OrientedTriples> {
    if !(1..=MAX_KTS_EXPONENT).contains(&exponent) {
        return Err(Error::InvalidParameter(format!(
            "KTS exponent must lie in 1..={MAX_KTS_EXPONENT}, got {exponent}"
        )));
    }
    let mut design = base_kts3_oriented();
    for _ in 1..exponent {
        design = triple_oriented(&design)?;
    }
    Ok(design)
}

/// KTS(3^exponent) whose min-sum equals its order.
pub fn build_kts(exponent: i32) -> Result<ResolvableDesign> {
    build_kts_oriented(exponent)?.to_design()
}

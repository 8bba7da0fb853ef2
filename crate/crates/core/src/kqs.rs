//! Kirkman quadruple systems of order `4 * 2^k` with min-sum `n + 2`, by
//! doubling.
//!
//! A KQS(n) and a 1-factorization of `{0, .., n-1}` give a KQS(2n). Each
//! source class yields four classes, one per coordinate: each block is split
//! into the copy with only that coordinate lifted by `n` and the copy with the
//! other three lifted. Each factor `p` yields the class
//! `{(s, t, s+n, t+n) : (s, t) in p}`.

use crate::design::{min_sum, OrientedQuads, ResolvableDesign};
use crate::error::{Error, Result};
use crate::factorization::{factorize_even, verify_factorization, OneFactorization};
use crate::verify::{verify_design, verify_structure, Check, VerificationReport, Witness};

/// Largest exponent `build_kqs` accepts (order 256).
pub const MAX_KQS_EXPONENT: i32 = 6;

/// One source block with its coordinates in written order `(a, b, c, d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadClassSpec {
    /// 0-based source class.
    pub class: usize,
    /// 0-based position within the class.
    pub block: usize,
    pub coords: [u32; 4],
}

pub fn specs(src: &OrientedQuads) -> impl Iterator<Item = QuadClassSpec> + '_ {
    src.classes.iter().enumerate().flat_map(|(class, blocks)| {
        blocks
            .iter()
            .enumerate()
            .map(move |(block, &coords)| QuadClassSpec {
                class,
                block,
                coords,
            })
    })
}

pub fn base_kqs4_oriented() -> OrientedQuads {
    OrientedQuads {
        order: 4,
        classes: vec![vec![[0, 1, 2, 3]]],
    }
}

/// KQS(4): the single block `(0, 1, 2, 3)`.
pub fn base_kqs4() -> ResolvableDesign {
    base_kqs4_oriented()
        .to_design()
        .expect("base system is well formed")
}

fn check_sources(src: &OrientedQuads, f: &OneFactorization) -> Result<()> {
    let design = src.to_design()?;
    let n = src.order;
    let mut report = verify_structure(&design);
    let mut hypothesis = Check::new("source_min_sum");
    match min_sum(&design) {
        Ok(m) if m >= u64::from(n) + 2 => {}
        Ok(m) => {
            let block = design.blocks().find(|b| b.sum() == m).unwrap();
            hypothesis.fail(Witness::MinSum {
                block: block.elements().to_vec(),
                sum: m,
                bound: u64::from(n) + 2,
            })
        }
        Err(e) => hypothesis.fail(Witness::Message {
            text: e.to_string(),
        }),
    }
    let mut order = Check::new("factorization_order");
    if f.order() != n {
        order.fail(Witness::Count {
            observed: u64::from(f.order()),
            expected: u64::from(n),
        });
    }
    report = report
        .merge(VerificationReport::new(vec![hypothesis, order]))
        .merge(verify_factorization(f));
    if !report.passed {
        return Err(Error::PreconditionFailed {
            context: format!("doubling needs a KQS({n}) with min-sum {} and an order-{n} factorization", n + 2),
            report: Box::new(report),
        });
    }
    Ok(())
}

/// Doubles a KQS(n) using the given factorization for the cross classes.
///
/// Classes come out source class by source class (lifting coordinate 1, 2,
/// 3, 4 in turn), then one class per factor in factor order.
pub fn double_oriented(src: &OrientedQuads, f: &OneFactorization) -> Result<OrientedQuads> {
    check_sources(src, f)?;
    let n = src.order;

    let mut classes = Vec::with_capacity(4 * src.classes.len() + f.factors().len());
    let mut lifted: [Vec<[u32; 4]>; 4] = Default::default();
    let mut current = None;
    for spec in specs(src) {
        if current != Some(spec.class) {
            if current.is_some() {
                classes.extend(lifted.iter_mut().map(std::mem::take));
            }
            current = Some(spec.class);
        }
        for (m, class) in lifted.iter_mut().enumerate() {
            let mut alone = spec.coords;
            let mut rest = spec.coords;
            for (i, (x, y)) in alone.iter_mut().zip(rest.iter_mut()).enumerate() {
                if i == m {
                    *x += n;
                } else {
                    *y += n;
                }
            }
            class.push(alone);
            class.push(rest);
        }
    }
    if current.is_some() {
        classes.extend(lifted.iter_mut().map(std::mem::take));
    }

    for factor in f.factors() {
        classes.push(
            factor
                .iter()
                .map(|p| [p.lo, p.hi, p.lo + n, p.hi + n])
                .collect(),
        );
    }

    let out = OrientedQuads {
        order: 2 * n,
        classes,
    };
    let report = verify_design(&out.to_design()?);
    if !report.passed {
        return Err(Error::PostconditionFailed {
            context: format!("doubling KQS({n})"),
            report: Box::new(report),
        });
    }
    Ok(out)
}

/// Doubles a canonical KQS(n); blocks are read in ascending coordinate order.
pub fn double_kqs(design: &ResolvableDesign, f: &OneFactorization) -> Result<ResolvableDesign> {
    double_oriented(&OrientedQuads::from_design(design)?, f)?.to_design()
}

/// KQS(4 * 2^exponent), each level paired with `factorize_even` of the
/// current order.
pub fn build_kqs_oriented(exponent: i32) -> Result<OrientedQuads> {
    if !(0..=MAX_KQS_EXPONENT).contains(&exponent) {
        return Err(Error::InvalidParameter(format!(
            "KQS exponent must lie in 0..={MAX_KQS_EXPONENT}, got {exponent}"
        )));
    }
    let mut design = base_kqs4_oriented();
    for _ in 0..exponent {
        let f = factorize_even(design.order)?;
        design = double_oriented(&design, &f)?;
    }
    Ok(design)
}

/// KQS(4 * 2^exponent) whose min-sum is `n + 2`.
pub fn build_kqs(exponent: i32) -> Result<ResolvableDesign> {
    build_kqs_oriented(exponent)?.to_design()
}

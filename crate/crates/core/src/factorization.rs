//! Partitions of all pairs of `{0, .., m-1}` (m even) into `m - 1` perfect
//! matchings.
//!
//! Orders `2 (mod 4)` are built directly from two cyclic families; any other
//! even order is reached by repeatedly doubling the factorization of its
//! largest `2 (mod 4)` divisor.

use serde::{Deserialize, Serialize};

use crate::design::write_nested_lines;
use crate::error::{Error, Result};
use crate::verify::{Check, VerificationReport, Witness};

/// An unordered pair stored as `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Pair {
    pub lo: u32,
    pub hi: u32,
}

impl Pair {
    pub fn new(a: u32, b: u32) -> Result<Pair> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Pair { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Ok(Pair { lo: b, hi: a }),
            std::cmp::Ordering::Equal => Err(Error::DuplicateElement(a)),
        }
    }

    fn of(a: u32, b: u32) -> Pair {
        Pair::new(a, b).expect("construction never pairs a point with itself")
    }
}

/// Sorts a factor by placing each pair at its `lo`, which is linear for a
/// matching; anything with a repeated `lo` falls back to a comparison sort.
fn sort_factor(mut f: Vec<Pair>, slots: &mut [Option<Pair>]) -> Vec<Pair> {
    let mut placed = 0;
    for &p in &f {
        let slot = &mut slots[p.lo as usize];
        if slot.is_some() {
            break;
        }
        *slot = Some(p);
        placed += 1;
    }
    if placed == f.len() {
        let mut i = 0;
        for slot in slots.iter_mut() {
            if let Some(p) = slot.take() {
                f[i] = p;
                i += 1;
            }
        }
    } else {
        slots.iter_mut().for_each(|s| *s = None);
        f.sort_unstable();
    }
    f
}

/// Perfect matchings in construction order; pairs within a factor are sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneFactorization {
    order: u32,
    factors: Vec<Vec<Pair>>,
}

impl OneFactorization {
    /// Wraps factors without checking they partition anything; see
    /// [`verify_factorization`].
    pub fn new(order: u32, factors: Vec<Vec<Pair>>) -> Result<OneFactorization> {
        if let Some(p) = factors.iter().flatten().find(|p| p.hi >= order) {
            return Err(Error::OutOfRange {
                element: p.hi,
                order,
            });
        }
        let mut slots: Vec<Option<Pair>> = vec![None; order as usize];
        let factors = factors
            .into_iter()
            .map(|f| sort_factor(f, &mut slots))
            .collect();
        Ok(OneFactorization { order, factors })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn factors(&self) -> &[Vec<Pair>] {
        &self.factors
    }

    pub fn to_file(&self) -> FactorizationFile {
        FactorizationFile {
            order: self.order,
            factors: self
                .factors
                .iter()
                .map(|f| f.iter().map(|p| vec![p.lo, p.hi]).collect())
                .collect(),
        }
    }

    pub fn from_file(file: &FactorizationFile) -> Result<OneFactorization> {
        let factors = file
            .factors
            .iter()
            .map(|f| {
                f.iter()
                    .map(|p| match p.as_slice() {
                        &[a, b] => Pair::new(a, b),
                        _ => Err(Error::Parse(format!("pair must have two elements: {p:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        OneFactorization::new(file.order, factors)
    }

    pub fn to_json(&self) -> String {
        self.to_file().to_json()
    }

    pub fn from_json(text: &str) -> Result<OneFactorization> {
        OneFactorization::from_file(&serde_json::from_str(text)?)
    }
}

/// On-disk factorization document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationFile {
    pub order: u32,
    pub factors: Vec<Vec<Vec<u32>>>,
}

impl FactorizationFile {
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"order\": {},\n", self.order));
        out.push_str("  \"factors\": [");
        write_nested_lines(&mut out, &self.factors);
        out.push_str("]\n}\n");
        out
    }
}

/// Direct construction for `n = 2 (mod 4)`.
///
/// The first `n/2` factors pair `i` with its antipode `i + n/2` and reflect
/// the rest through `i`; the remaining `n/2 - 1` factors come in twos per odd
/// difference `d < n/2`, joining each even (then each odd) point to the
/// point `d` ahead.
pub fn factorize_2mod4(n: u32) -> Result<OneFactorization> {
    if !n.is_multiple_of(2) || n.is_multiple_of(4) {
        return Err(Error::InvalidOrder {
            order: n,
            reason: "direct construction needs n = 2 (mod 4)",
        });
    }
    if n == 2 {
        return OneFactorization::new(2, vec![vec![Pair::of(0, 1)]]);
    }
    let half = n / 2;
    let mut factors = Vec::with_capacity(n as usize - 1);
    for i in 0..half {
        let mut f = vec![Pair::of(i, i + half)];
        for t in 1..half {
            f.push(Pair::of((i + t) % n, (i + n - t) % n));
        }
        factors.push(f);
    }
    for d in (1..=half - 2).step_by(2) {
        for start in [0, 1] {
            let f = (1..=half)
                .map(|t| {
                    let x = (2 * t + start) % n;
                    Pair::of(x, (x + d) % n)
                })
                .collect();
            factors.push(f);
        }
    }
    OneFactorization::new(n, factors)
}

/// Order-`2n` factorization from an order-`n` one: each factor joined with
/// its copy shifted by `n`, then the `n` cross matchings `j -> n + (j+t mod n)`.
pub fn double_factorization(f: &OneFactorization) -> Result<OneFactorization> {
    let report = verify_factorization(f);
    if !report.passed {
        return Err(Error::PreconditionFailed {
            context: format!("order-{} factorization does not verify", f.order()),
            report: Box::new(report),
        });
    }
    let n = f.order();
    let mut factors = Vec::with_capacity(2 * n as usize - 1);
    for factor in f.factors() {
        let mut doubled = factor.clone();
        doubled.extend(factor.iter().map(|p| Pair::of(p.lo + n, p.hi + n)));
        factors.push(doubled);
    }
    for t in 0..n {
        factors.push((0..n).map(|j| Pair::of(j, n + (j + t) % n)).collect());
    }
    OneFactorization::new(2 * n, factors)
}

/// Factorization of any even order `m = 2^s q` (q odd): the direct
/// construction at `2q` followed by `s - 1` doublings.
pub fn factorize_even(m: u32) -> Result<OneFactorization> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::InvalidOrder {
            order: m,
            reason: "factorization needs an even order >= 2",
        });
    }
    let doublings = (m / 2).trailing_zeros();
    let mut f = factorize_2mod4(m >> doublings)?;
    for _ in 0..doublings {
        f = double_factorization(&f)?;
    }
    Ok(f)
}

/// Each factor is a perfect matching, every pair occurs exactly once, and
/// there are `m - 1` factors.
pub fn verify_factorization(f: &OneFactorization) -> VerificationReport {
    let m = f.order() as usize;

    let mut partition = Check::new("factor_partition");
    let mut seen = vec![0u32; m];
    for (fi, factor) in f.factors().iter().enumerate() {
        seen.iter_mut().for_each(|s| *s = 0);
        for p in factor {
            seen[p.lo as usize] += 1;
            seen[p.hi as usize] += 1;
        }
        for (point, &count) in seen.iter().enumerate() {
            if count != 1 {
                partition.fail(Witness::ClassPoint {
                    class: fi + 1,
                    point: point as u32,
                    count,
                });
            }
        }
    }

    let mut coverage = Check::new("pair_coverage");
    let mut counts = vec![0u32; m * m.saturating_sub(1) / 2];
    let idx = |p: &Pair| p.hi as usize * (p.hi as usize - 1) / 2 + p.lo as usize;
    for p in f.factors().iter().flatten() {
        counts[idx(p)] += 1;
    }
    for hi in 1..m as u32 {
        for lo in 0..hi {
            let count = counts[idx(&Pair { lo, hi })];
            if count != 1 {
                coverage.fail(Witness::Subset {
                    elements: vec![lo, hi],
                    count,
                });
            }
        }
    }

    let mut factor_count = Check::new("factor_count");
    let expected = m.saturating_sub(1) as u64;
    if f.factors().len() as u64 != expected || !m.is_multiple_of(2) {
        factor_count.fail(Witness::Count {
            observed: f.factors().len() as u64,
            expected,
        });
    }

    VerificationReport::new(vec![partition, coverage, factor_count])
}

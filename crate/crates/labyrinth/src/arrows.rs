//! The canonical arrow vocabulary of a free module category: injections,
//! retractions, transportations, sums, and direct sums, all realized as
//! explicit matrices over the coefficient ring.

use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::ring::RingSpec;
use crate::sets::IndexSet;

/// `iota_x : Omega -> Omega^X`, a `|X| x 1` column with a single 1 at `x`.
pub fn injection(ring: RingSpec, set: &IndexSet, x: &str) -> Result<ExactMatrix> {
    let pos = set.position(x)?;
    let mut m = ExactMatrix::zeros(ring, set.len(), 1);
    m.set(pos, 0, 1);
    Ok(m)
}

/// `rho_x : Omega^X -> Omega`, a `1 x |X|` row with a single 1 at `x`.
pub fn retraction(ring: RingSpec, set: &IndexSet, x: &str) -> Result<ExactMatrix> {
    let pos = set.position(x)?;
    let mut m = ExactMatrix::zeros(ring, 1, set.len());
    m.set(0, pos, 1);
    Ok(m)
}

/// The transportation `sigma_xy = iota_x rho_y : Omega^Y -> Omega^X`, sending
/// the `y`-th summand identically onto the `x`-th and killing the rest.
pub fn transport(
    ring: RingSpec,
    target: &IndexSet,
    source: &IndexSet,
    x: &str,
    y: &str,
) -> Result<ExactMatrix> {
    injection(ring, target, x)?.mul(&retraction(ring, source, y)?)
}

/// Sum of a family of arrows with a common target: the block row
/// `[a_1 | ... | a_k]`.
pub fn arrow_sum(arrows: &[ExactMatrix]) -> Result<ExactMatrix> {
    let refs: Vec<&ExactMatrix> = arrows.iter().collect();
    ExactMatrix::hstack(&refs)
}

/// Direct sum `a_1 (+) ... (+) a_k`, the block diagonal.
pub fn direct_sum(arrows: &[ExactMatrix]) -> Result<ExactMatrix> {
    let refs: Vec<&ExactMatrix> = arrows.iter().collect();
    ExactMatrix::block_diag(&refs)
}

/// Positional injection of the `i`-th block: `Omega^{m_i} -> Omega^{sum m}`.
pub fn block_injection(ring: RingSpec, part_sizes: &[usize], i: usize) -> ExactMatrix {
    let total: usize = part_sizes.iter().sum();
    let offset: usize = part_sizes[..i].iter().sum();
    let mut m = ExactMatrix::zeros(ring, total, part_sizes[i]);
    for c in 0..part_sizes[i] {
        m.set(offset + c, c, 1);
    }
    m
}

/// The retraction `rho-hat_j : Omega^{sum m} -> Omega^{sum m - m_j}` deleting
/// the `j`-th block.
pub fn block_deletion(ring: RingSpec, part_sizes: &[usize], j: usize) -> ExactMatrix {
    let total: usize = part_sizes.iter().sum();
    let rows = total - part_sizes[j];
    let mut m = ExactMatrix::zeros(ring, rows, total);
    let mut r = 0;
    let mut offset = 0;
    for (i, &sz) in part_sizes.iter().enumerate() {
        if i != j {
            for c in 0..sz {
                m.set(r + c, offset + c, 1);
            }
            r += sz;
        }
        offset += sz;
    }
    m
}

/// Injection `Omega^I -> Omega^n` of the coordinates selected by `mask`.
pub fn subset_injection(ring: RingSpec, n: usize, mask: u32) -> ExactMatrix {
    let picked: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
    let mut m = ExactMatrix::zeros(ring, n, picked.len());
    for (c, &r) in picked.iter().enumerate() {
        m.set(r, c, 1);
    }
    m
}

/// Retraction `Omega^n -> Omega^I` onto the coordinates selected by `mask`.
pub fn subset_retraction(ring: RingSpec, n: usize, mask: u32) -> ExactMatrix {
    subset_injection(ring, n, mask).transpose()
}

/// The zero arrow `Omega^n -> Omega^m`.
pub fn zero_arrow(ring: RingSpec, m: usize, n: usize) -> ExactMatrix {
    ExactMatrix::zeros(ring, m, n)
}

/// The folding map `Omega^n -> Omega`, the sum of `n` identities.
pub fn fold(ring: RingSpec, n: usize) -> ExactMatrix {
    ExactMatrix::new(ring, 1, n, vec![1; n]).expect("shape is consistent")
}

/// Checks that `x` and `y` are elements before building `sigma_xy`; kept as a
/// separate helper to surface `UnknownElement` errors with both names.
pub fn transport_checked(
    ring: RingSpec,
    target: &IndexSet,
    source: &IndexSet,
    x: &str,
    y: &str,
) -> Result<ExactMatrix> {
    if !target.contains(x) {
        return Err(Error::UnknownElement(x.to_string()));
    }
    if !source.contains(y) {
        return Err(Error::UnknownElement(y.to_string()));
    }
    transport(ring, target, source, x, y)
}

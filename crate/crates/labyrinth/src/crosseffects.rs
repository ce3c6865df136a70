//! The deviation operator and the cross-effect calculus: alternating
//! inclusion-exclusion sums measuring the failure of additivity, the
//! idempotents cutting out cross-effect subspaces, the block decomposition of
//! values on sums, and polynomial-degree detection.

use serde::Serialize;

use crate::arrows::{block_deletion, block_injection, subset_injection, subset_retraction};
use crate::error::{Error, Result};
use crate::functor::Functor;
use crate::matrix::ExactMatrix;

/// The deviation of a family of arrows `a_i : Omega^{m_i} -> Omega^M` with a
/// common target: the alternating sum over subsets `I` of `F` applied to the
/// block arrow that keeps the blocks in `I` and zeroes the rest. The result
/// is a matrix `F(Omega^{sum m_i}) -> F(Omega^M)`.
pub fn deviate(f: &Functor, arrows: &[ExactMatrix]) -> Result<ExactMatrix> {
    if arrows.is_empty() {
        return Err(Error::Dim("deviation of an empty family has no shape".into()));
    }
    let target_arity = arrows[0].rows();
    for a in arrows {
        if a.rows() != target_arity {
            return Err(Error::Dim(format!(
                "deviation needs a common target: {} vs {}",
                target_arity,
                a.rows()
            )));
        }
        if a.ring() != f.source() {
            return Err(Error::RingMismatch(a.ring(), f.source()));
        }
    }
    let k = arrows.len();
    if k > 24 {
        return Err(Error::Guard(format!("deviation of {k} arrows is past the guard")));
    }
    let widths: Vec<usize> = arrows.iter().map(ExactMatrix::cols).collect();
    let total: usize = widths.iter().sum();
    let field = f.target();
    let mut acc = ExactMatrix::zeros(field, f.obj(target_arity)?, f.obj(total)?);
    for mask in 0u32..(1 << k) {
        let block = partial_sum_arrow(f, arrows, &widths, total, target_arity, mask);
        let term = f.apply(&block)?;
        if (k as u32 - mask.count_ones()).is_multiple_of(2) {
            acc.add_assign(&term)?;
        } else {
            acc.sub_assign(&term)?;
        }
    }
    Ok(acc)
}

/// The arrow `sum_{i in mask} a_i` as a single block matrix over the full
/// domain, with zero blocks outside the mask.
fn partial_sum_arrow(
    f: &Functor,
    arrows: &[ExactMatrix],
    widths: &[usize],
    total: usize,
    target_arity: usize,
    mask: u32,
) -> ExactMatrix {
    let mut block = ExactMatrix::zeros(f.source(), target_arity, total);
    let mut offset = 0;
    for (i, a) in arrows.iter().enumerate() {
        if mask >> i & 1 == 1 {
            for r in 0..a.rows() {
                for c in 0..a.cols() {
                    block.set(r, offset + c, a.get(r, c));
                }
            }
        }
        offset += widths[i];
    }
    block
}

/// Alternating sum over subsets of endo-arrows added entrywise:
/// `sum_{J subset [t]} (-1)^{t-|J|} F(sum_{i in J} terms_i)`. Used for the
/// idempotents, where the summands share domain and codomain.
fn alternating_endo_sum(f: &Functor, terms: &[ExactMatrix]) -> Result<ExactMatrix> {
    let t = terms.len();
    if t > 24 {
        return Err(Error::Guard(format!("alternating sum over {t} arrows is past the guard")));
    }
    let arity = terms.first().map_or(0, ExactMatrix::rows);
    let dim = f.obj(arity)?;
    let field = f.target();
    let mut acc = ExactMatrix::zeros(field, dim, dim);
    for mask in 0u32..(1 << t) {
        let mut arrow = ExactMatrix::zeros(f.source(), arity, arity);
        for (i, term) in terms.iter().enumerate() {
            if mask >> i & 1 == 1 {
                arrow.add_assign(term)?;
            }
        }
        let fa = f.apply(&arrow)?;
        if (t as u32 - mask.count_ones()).is_multiple_of(2) {
            acc.add_assign(&fa)?;
        } else {
            acc.sub_assign(&fa)?;
        }
    }
    Ok(acc)
}

/// All subsets of `relation` whose projections cover `[rows]` and `[cols]`,
/// in ascending bitmask order over the relation as listed.
pub fn covering_subsets(
    rows: usize,
    cols: usize,
    relation: &[(usize, usize)],
) -> Vec<Vec<(usize, usize)>> {
    assert!(relation.len() <= 25, "covering-subset enumeration past the guard");
    let full_rows: u64 = if rows == 0 { 0 } else { (1 << rows) - 1 };
    let full_cols: u64 = if cols == 0 { 0 } else { (1 << cols) - 1 };
    let mut out = Vec::new();
    for mask in 0u64..(1 << relation.len()) {
        let mut seen_rows = 0u64;
        let mut seen_cols = 0u64;
        for (i, &(r, c)) in relation.iter().enumerate() {
            if mask >> i & 1 == 1 {
                seen_rows |= 1 << r;
                seen_cols |= 1 << c;
            }
        }
        if seen_rows == full_rows && seen_cols == full_cols {
            out.push(
                relation
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect(),
            );
        }
    }
    out
}

/// Outcome of one instance of the composition formula for deviations.
#[derive(Clone, Debug, Serialize)]
pub struct DevFormulaOutcome {
    pub pass: bool,
    pub outer_terms: usize,
    pub lhs: ExactMatrix,
    pub rhs: ExactMatrix,
}

/// Checks that the composite of two deviations expands as the double sum over
/// covering subsets `K` of the index grid and subsets `L` of `K`:
/// `F(a_1 dev ... dev a_m) F(b_1 dev ... dev b_n) =
///  sum_K sum_{L subset K} (-1)^{|K|-|L|} F(sum_j (sum_{(i,j) in L} a_i) b_j)`.
pub fn deviation_formula_check(
    f: &Functor,
    alphas: &[ExactMatrix],
    betas: &[ExactMatrix],
) -> Result<DevFormulaOutcome> {
    let m = alphas.len();
    let n = betas.len();
    let alpha_widths: Vec<usize> = alphas.iter().map(ExactMatrix::cols).collect();
    let alpha_total: usize = alpha_widths.iter().sum();
    let target_arity = alphas.first().map_or(0, ExactMatrix::rows);
    for b in betas {
        if b.rows() != alpha_total {
            return Err(Error::Dim(format!(
                "second family must land in the sum of the first ({alpha_total}), got {}",
                b.rows()
            )));
        }
    }
    let lhs = deviate(f, alphas)?.mul(&deviate(f, betas)?)?;

    let beta_widths: Vec<usize> = betas.iter().map(ExactMatrix::cols).collect();
    let beta_total: usize = beta_widths.iter().sum();
    let grid: Vec<(usize, usize)> =
        (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let coverings = covering_subsets(m, n, &grid);
    let field = f.target();
    let mut rhs = ExactMatrix::zeros(field, f.obj(target_arity)?, f.obj(beta_total)?);
    for k_set in &coverings {
        for l_mask in 0u32..(1 << k_set.len()) {
            // Arrow: block row over j of (sum_{(i,j) in L} alpha_i) beta_j.
            let mut blocks = Vec::with_capacity(n);
            for (j, beta) in betas.iter().enumerate() {
                let mut rows_mask = 0u32;
                for (idx, &(i, jj)) in k_set.iter().enumerate() {
                    if l_mask >> idx & 1 == 1 && jj == j {
                        rows_mask |= 1 << i;
                    }
                }
                let a_l = partial_sum_arrow(f, alphas, &alpha_widths, alpha_total, target_arity, rows_mask);
                blocks.push(a_l.mul(beta)?);
            }
            let refs: Vec<&ExactMatrix> = blocks.iter().collect();
            let arrow = ExactMatrix::hstack(&refs)?;
            let term = f.apply(&arrow)?;
            if (k_set.len() as u32 - l_mask.count_ones()).is_multiple_of(2) {
                rhs.add_assign(&term)?;
            } else {
                rhs.sub_assign(&term)?;
            }
        }
    }
    Ok(DevFormulaOutcome { pass: lhs == rhs, outer_terms: coverings.len(), lhs, rhs })
}

/// An explicit basis of a cross-effect subspace inside the ambient value on
/// the sum, together with the idempotent that cuts it out.
#[derive(Clone, Debug)]
pub struct CeBasis {
    pub parts: Vec<usize>,
    pub ambient_dim: usize,
    pub idempotent: ExactMatrix,
    /// Ambient columns; the reduced column-echelon basis of the idempotent's
    /// image, so coordinates are reproducible across runs.
    pub basis: ExactMatrix,
}

impl CeBasis {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

/// The cross-effect of `F` at `(Omega^{m_1}, ..., Omega^{m_k})`: the image of
/// the deviation of the canonical injections, equally the kernel of the
/// stacked deleting retractions. An empty `parts` list yields the full value
/// at the zero object.
pub fn ce_basis(f: &Functor, parts: &[usize]) -> Result<CeBasis> {
    let total: usize = parts.iter().sum();
    let dim = f.obj(total)?;
    if parts.is_empty() {
        let id = ExactMatrix::identity(f.target(), dim);
        return Ok(CeBasis { parts: Vec::new(), ambient_dim: dim, idempotent: id.clone(), basis: id });
    }
    let projectors: Vec<ExactMatrix> = (0..parts.len())
        .map(|i| {
            let iota = block_injection(f.source(), parts, i);
            let rho = iota.transpose();
            iota.mul(&rho).expect("projector shapes agree")
        })
        .collect();
    let idempotent = alternating_endo_sum(f, &projectors)?;
    let basis = idempotent.column_echelon_basis()?;
    Ok(CeBasis { parts: parts.to_vec(), ambient_dim: dim, idempotent, basis })
}

/// Dimension of the rank-`k` cross-effect at `(Omega, ..., Omega)`.
pub fn ce_dim(f: &Functor, k: usize) -> Result<usize> {
    Ok(ce_basis(f, &vec![1; k])?.dim())
}

/// The kernel description of the same subspace: stacked `F(rho-hat_j)`.
pub fn retraction_kernel(f: &Functor, parts: &[usize]) -> Result<ExactMatrix> {
    if parts.is_empty() {
        return ExactMatrix::identity(f.target(), f.obj(0)?).kernel_basis();
    }
    let stacked: Vec<ExactMatrix> = (0..parts.len())
        .map(|j| f.apply(&block_deletion(f.source(), parts, j)))
        .collect::<Result<_>>()?;
    let refs: Vec<&ExactMatrix> = stacked.iter().collect();
    ExactMatrix::vstack(&refs)?.kernel_basis()
}

/// The block decomposition of `F(Omega^k)` into cross-effects over subsets of
/// `[k]`, with the change of basis to block coordinates and its inverse.
/// Blocks are ordered by subset bitmask; block `I` uses the canonical
/// cross-effect basis at arity `|I|`, transported along the subset injection.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub arity: usize,
    /// Dimension per subset, in bitmask order.
    pub block_dims: Vec<usize>,
    /// `F(Omega^k) -> (+)_I ce_I`, rows grouped by subset.
    pub to_blocks: ExactMatrix,
    /// The inverse assembly map.
    pub from_blocks: ExactMatrix,
}

pub fn decomposition(f: &Functor, k: usize) -> Result<Decomposition> {
    if k > 16 {
        return Err(Error::Guard(format!("decomposition at arity {k} is past the guard")));
    }
    let ring = f.source();
    let ambient = f.obj(k)?;
    let canonical: Vec<CeBasis> =
        (0..=k).map(|j| ce_basis(f, &vec![1; j])).collect::<Result<_>>()?;

    let mut block_dims = Vec::with_capacity(1 << k);
    let mut coord_rows = Vec::new();
    let mut assembly_cols = Vec::new();
    for mask in 0u32..(1 << k) {
        let j = mask.count_ones() as usize;
        let ce = &canonical[j];
        block_dims.push(ce.dim());
        let rho = f.apply(&subset_retraction(ring, k, mask))?;
        let iota = f.apply(&subset_injection(ring, k, mask))?;
        // Row block: coordinates of e_can * F(rho_I) v in the canonical basis.
        let down = ce.idempotent.mul(&rho)?;
        let coords = ExactMatrix::solve_in_basis(&ce.basis, &down)?
            .ok_or_else(|| Error::Invariant("projected vectors left the cross-effect".into()))?;
        coord_rows.push(coords);
        // Column block: the transported basis F(iota_I) B_j.
        assembly_cols.push(iota.mul(&ce.basis)?);
    }
    let total: usize = block_dims.iter().sum();
    if total != ambient {
        return Err(Error::Invariant(format!(
            "cross-effect dimensions sum to {total}, but the ambient value has dimension {ambient}"
        )));
    }
    let row_refs: Vec<&ExactMatrix> = coord_rows.iter().collect();
    let to_blocks = ExactMatrix::vstack(&row_refs)?;
    let col_refs: Vec<&ExactMatrix> = assembly_cols.iter().collect();
    let from_blocks = ExactMatrix::hstack(&col_refs)?;
    let product = to_blocks.mul(&from_blocks)?;
    if !product.is_identity() {
        return Err(Error::Invariant("block coordinates do not invert the assembly".into()));
    }
    let other = from_blocks.mul(&to_blocks)?;
    if !other.is_identity() {
        return Err(Error::Invariant("assembly does not invert block coordinates".into()));
    }
    Ok(Decomposition { arity: k, block_dims, to_blocks, from_blocks })
}

/// The idempotent of one subset block inside `F(Omega^k)`.
pub fn subset_idempotent(f: &Functor, k: usize, mask: u32) -> Result<ExactMatrix> {
    let ring = f.source();
    let projectors: Vec<ExactMatrix> = (0..k)
        .filter(|&i| mask >> i & 1 == 1)
        .map(|i| {
            let mut p = ExactMatrix::zeros(ring, k, k);
            p.set(i, i, 1);
            p
        })
        .collect();
    if projectors.is_empty() {
        // Empty subset: F applied to the zero endo-arrow.
        return f.apply(&ExactMatrix::zeros(ring, k, k));
    }
    alternating_endo_sum(f, &projectors)
}

/// Polynomial-degree report. `Exceeds` means no vanishing rank was found
/// within the search bound; it never claims "not polynomial".
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Degree {
    Is(usize),
    Exceeds(usize),
}

/// Finds the least `n <= nmax` such that the rank-(n+1) cross-effect at
/// `(Omega,...,Omega)` vanishes; the next rank is verified too when its
/// ambient dimension stays within `max_dim`.
pub fn degree(f: &Functor, nmax: usize, max_dim: usize) -> Result<Degree> {
    let mut dims = Vec::new();
    for k in 0..=nmax + 1 {
        let ambient = f.obj(k)?;
        if ambient > max_dim {
            return Err(Error::Guard(format!(
                "value at arity {k} has dimension {ambient} > {max_dim}"
            )));
        }
        dims.push(ce_dim(f, k)?);
    }
    let last_nonzero = dims.iter().rposition(|&d| d != 0);
    let candidate = match last_nonzero {
        None => 0,
        Some(k) if k <= nmax => k,
        Some(_) => return Ok(Degree::Exceeds(nmax)),
    };
    // Confirm one rank further when the guard allows it.
    let probe = candidate + 2;
    if probe <= nmax + 1 {
        return Ok(Degree::Is(candidate)); // already covered by the profile
    }
    if f.obj(probe)? <= max_dim && ce_dim(f, probe)? != 0 {
        return Ok(Degree::Exceeds(nmax));
    }
    Ok(Degree::Is(candidate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;

    fn z2() -> RingSpec {
        RingSpec::zmod(2).unwrap()
    }

    fn f2() -> RingSpec {
        RingSpec::fp(2).unwrap()
    }

    fn f3() -> RingSpec {
        RingSpec::fp(3).unwrap()
    }

    fn build(spec: &str, ring: RingSpec, field: RingSpec) -> Functor {
        Functor::build(&spec.parse().unwrap(), ring, field).unwrap()
    }

    #[test]
    fn deviation_of_one_arrow_measures_the_constant_part() {
        let u = build("U", z2(), f2());
        let a = ExactMatrix::from_rows(z2(), &[vec![1, 1], vec![0, 1]]).unwrap();
        let dev = deviate(&u, std::slice::from_ref(&a)).unwrap();
        let zero = ExactMatrix::zeros(z2(), 2, 2);
        let expected = u.apply(&a).unwrap().sub(&u.apply(&zero).unwrap()).unwrap();
        assert_eq!(dev, expected);
    }

    #[test]
    fn deviation_of_three_transports_is_the_eight_term_sum() {
        // Oracle: the inclusion-exclusion expansion written out by hand.
        let u = build("U", RingSpec::zmod(4).unwrap(), f3());
        let ring = RingSpec::zmod(4).unwrap();
        let (a, b, c) = (1i64, 2i64, 3i64);
        let s11 = ExactMatrix::new(ring, 2, 1, vec![a, 0]).unwrap();
        let s21 = ExactMatrix::new(ring, 2, 1, vec![0, b]).unwrap();
        let s22 = ExactMatrix::new(ring, 2, 1, vec![0, c]).unwrap();
        let dev = deviate(&u, &[s11.clone(), s21.clone(), s22.clone()]).unwrap();

        let arrow = |m1: Option<&ExactMatrix>, m2: Option<&ExactMatrix>, m3: Option<&ExactMatrix>| {
            let zero = ExactMatrix::zeros(ring, 2, 1);
            let cols = [m1.unwrap_or(&zero), m2.unwrap_or(&zero), m3.unwrap_or(&zero)];
            ExactMatrix::hstack(&cols).unwrap()
        };
        let fa = |m: ExactMatrix| u.apply(&m).unwrap();
        let mut expected = fa(arrow(Some(&s11), Some(&s21), Some(&s22)));
        expected.sub_assign(&fa(arrow(Some(&s11), Some(&s21), None))).unwrap();
        expected.sub_assign(&fa(arrow(Some(&s11), None, Some(&s22)))).unwrap();
        expected.sub_assign(&fa(arrow(None, Some(&s21), Some(&s22)))).unwrap();
        expected.add_assign(&fa(arrow(Some(&s11), None, None))).unwrap();
        expected.add_assign(&fa(arrow(None, Some(&s21), None))).unwrap();
        expected.add_assign(&fa(arrow(None, None, Some(&s22)))).unwrap();
        expected.sub_assign(&fa(arrow(None, None, None))).unwrap();
        assert_eq!(dev, expected);
    }

    #[test]
    fn deviation_vanishes_for_an_additive_table_functor() {
        let f = Functor::from_table(crate::table::tests::identity_table()).unwrap();
        let a = ExactMatrix::new(f2(), 1, 1, vec![1]).unwrap();
        let b = ExactMatrix::new(f2(), 1, 1, vec![1]).unwrap();
        // For a linear functor the four-term alternating sum collapses:
        // F([a b]) - F([a 0]) - F([0 b]) + F(0) = 0, checked by hand below.
        let dev = deviate(&f, &[a.clone(), b.clone()]).unwrap();
        assert!(dev.is_zero(), "a linear functor has no second deviation");
        let hstack = |l: i64, r: i64| ExactMatrix::new(f2(), 1, 2, vec![l, r]).unwrap();
        let mut oracle = f.apply(&hstack(1, 1)).unwrap();
        oracle.sub_assign(&f.apply(&hstack(1, 0)).unwrap()).unwrap();
        oracle.sub_assign(&f.apply(&hstack(0, 1)).unwrap()).unwrap();
        oracle.add_assign(&f.apply(&hstack(0, 0)).unwrap()).unwrap();
        assert_eq!(dev, oracle);
    }

    #[test]
    fn covering_subsets_of_the_full_grid() {
        let grid: Vec<(usize, usize)> =
            (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).collect();
        let found = covering_subsets(2, 2, &grid);
        assert_eq!(found.len(), 7);
        // Independent power-set oracle.
        let mut oracle = 0;
        for mask in 0u32..16 {
            let mut rows = [false; 2];
            let mut cols = [false; 2];
            for (i, &(r, c)) in grid.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    rows[r] = true;
                    cols[c] = true;
                }
            }
            if rows.iter().all(|&x| x) && cols.iter().all(|&x| x) {
                oracle += 1;
            }
        }
        assert_eq!(found.len(), oracle);
    }

    #[test]
    fn covering_subsets_of_a_bijection_graph() {
        let graph = vec![(0, 1), (1, 0), (2, 2)];
        let found = covering_subsets(3, 3, &graph);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0], graph);
    }

    #[test]
    fn covering_subsets_with_an_isolated_row() {
        let relation = vec![(0, 0), (0, 1)];
        assert!(covering_subsets(2, 2, &relation).is_empty());
    }

    #[test]
    fn covering_subsets_match_oracle_on_small_grids() {
        for rows in 1..=3usize {
            for cols in 1..=3usize {
                let grid: Vec<(usize, usize)> =
                    (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).collect();
                let found = covering_subsets(rows, cols, &grid);
                let mut oracle = Vec::new();
                for mask in 0u64..(1 << grid.len()) {
                    let mut r = vec![false; rows];
                    let mut c = vec![false; cols];
                    let members: Vec<(usize, usize)> = grid
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &p)| p)
                        .collect();
                    for &(i, j) in &members {
                        r[i] = true;
                        c[j] = true;
                    }
                    if r.iter().all(|&x| x) && c.iter().all(|&x| x) {
                        oracle.push(members);
                    }
                }
                assert_eq!(found, oracle);
            }
        }
    }

    #[test]
    fn formula_at_one_by_one_is_the_four_term_identity() {
        let u = build("U", z2(), f2());
        let alpha = ExactMatrix::from_rows(z2(), &[vec![1], vec![1]]).unwrap();
        let beta = ExactMatrix::from_rows(z2(), &[vec![1, 0]]).unwrap();
        let out = deviation_formula_check(&u, std::slice::from_ref(&alpha), std::slice::from_ref(&beta)).unwrap();
        assert!(out.pass);
        assert_eq!(out.outer_terms, 1);
        // Both sides equal F(ab) - F(0).
        let ab = alpha.mul(&beta).unwrap();
        let expected = u
            .apply(&ab)
            .unwrap()
            .sub(&u.apply(&ExactMatrix::zeros(z2(), 2, 2)).unwrap())
            .unwrap();
        assert_eq!(out.lhs, expected);
    }

    #[test]
    fn formula_with_all_zero_arrows_holds() {
        let s2 = build("S2", f3(), f3());
        let alphas = vec![ExactMatrix::zeros(f3(), 2, 1), ExactMatrix::zeros(f3(), 2, 1)];
        let betas = vec![ExactMatrix::zeros(f3(), 2, 1), ExactMatrix::zeros(f3(), 2, 2)];
        assert!(deviation_formula_check(&s2, &alphas, &betas).unwrap().pass);
    }

    #[test]
    fn ce_dims_of_the_linearization() {
        let u = build("U", z2(), f2());
        for k in 0..=3 {
            assert_eq!(ce_dim(&u, k).unwrap(), 1, "rank {k}");
        }
    }

    #[test]
    fn ce_dims_of_the_tensor_square() {
        let t2 = build("T2", f2(), f2());
        let dims: Vec<usize> = (0..=3).map(|k| ce_dim(&t2, k).unwrap()).collect();
        assert_eq!(dims, vec![0, 1, 2, 0]);
    }

    #[test]
    fn ce_dims_of_the_exterior_square() {
        let l2 = build("L2", f3(), f3());
        let dims: Vec<usize> = (0..=3).map(|k| ce_dim(&l2, k).unwrap()).collect();
        assert_eq!(dims, vec![0, 0, 1, 0]);
    }

    #[test]
    fn idempotent_image_equals_retraction_kernel() {
        for (spec, ring, field) in [
            ("U", z2(), f2()),
            ("T2", f2(), f2()),
            ("S2", f3(), f3()),
            ("L2", f3(), f3()),
        ] {
            let f = build(spec, ring, field);
            for k in 1..=3usize {
                let parts = vec![1; k];
                let ce = ce_basis(&f, &parts).unwrap();
                // idempotency
                assert_eq!(ce.idempotent.mul(&ce.idempotent).unwrap(), ce.idempotent);
                let kernel = retraction_kernel(&f, &parts).unwrap();
                assert_eq!(ce.dim(), kernel.cols(), "{spec} at rank {k}");
                // mutual containment via coordinates
                for c in 0..kernel.cols() {
                    assert!(ExactMatrix::coords_in_span(&ce.basis, &kernel.column(c))
                        .unwrap()
                        .is_some());
                }
                for c in 0..ce.basis.cols() {
                    assert!(ExactMatrix::coords_in_span(&kernel, &ce.basis.column(c))
                        .unwrap()
                        .is_some());
                }
            }
        }
    }

    #[test]
    fn mixed_part_cross_effects() {
        // ce_2 T2(Omega^2, Omega) should have dimension 2*1 + 1*2 = 4.
        let t2 = build("T2", f2(), f2());
        let ce = ce_basis(&t2, &[2, 1]).unwrap();
        assert_eq!(ce.dim(), 4);
    }

    #[test]
    fn decomposition_blocks_for_the_linearization() {
        let u = build("U", z2(), f2());
        let dec = decomposition(&u, 2).unwrap();
        assert_eq!(dec.block_dims, vec![1, 1, 1, 1]);
        let dec0 = decomposition(&u, 0).unwrap();
        assert!(dec0.to_blocks.is_identity());
    }

    #[test]
    fn decomposition_blocks_for_the_symmetric_square() {
        let s2 = build("S2", f3(), f3());
        let dec = decomposition(&s2, 2).unwrap();
        assert_eq!(dec.block_dims, vec![0, 1, 1, 1]);
    }

    #[test]
    fn subset_idempotents_are_orthogonal_and_complete() {
        for (spec, ring, field) in [("U", z2(), f2()), ("T2", f2(), f2()), ("S2", f3(), f3())] {
            let f = build(spec, ring, field);
            for k in 0..=3usize {
                let es: Vec<ExactMatrix> = (0u32..(1 << k))
                    .map(|mask| subset_idempotent(&f, k, mask).unwrap())
                    .collect();
                let dim = f.obj(k).unwrap();
                let mut sum = ExactMatrix::zeros(f.target(), dim, dim);
                for (i, e) in es.iter().enumerate() {
                    assert_eq!(e.mul(e).unwrap(), *e, "{spec}: e_I idempotent");
                    for (j, e2) in es.iter().enumerate() {
                        if i != j {
                            assert!(e.mul(e2).unwrap().is_zero(), "{spec}: e_I e_J = 0");
                        }
                    }
                    sum.add_assign(e).unwrap();
                }
                assert!(sum.is_identity(), "{spec}: sum of idempotents at arity {k}");
            }
        }
    }

    #[test]
    fn block_dims_sum_to_the_ambient_dimension() {
        for (spec, ring, field) in [("U", z2(), f2()), ("RedU", z2(), f2()), ("S2", f3(), f3())] {
            let f = build(spec, ring, field);
            for k in 0..=4usize {
                let dec = decomposition(&f, k).unwrap();
                let total: usize = dec.block_dims.iter().sum();
                assert_eq!(total, f.obj(k).unwrap());
            }
        }
    }

    #[test]
    fn degrees_of_the_builtins() {
        assert_eq!(degree(&build("T2", f2(), f2()), 4, 512).unwrap(), Degree::Is(2));
        assert_eq!(degree(&build("S2", f3(), f3()), 4, 512).unwrap(), Degree::Is(2));
        assert_eq!(degree(&build("L2", f3(), f3()), 4, 512).unwrap(), Degree::Is(2));
        assert_eq!(degree(&build("RedU", z2(), f2()), 4, 512).unwrap(), Degree::Exceeds(4));
        assert_eq!(degree(&build("Zero", z2(), f2()), 4, 512).unwrap(), Degree::Is(0));
    }

    #[test]
    fn sum_functor_cross_effects_add_up() {
        let s2 = build("S2", f3(), f3());
        let l2 = build("L2", f3(), f3());
        let both = build("Sum(S2,L2)", f3(), f3());
        for k in 0..=3 {
            assert_eq!(
                ce_dim(&both, k).unwrap(),
                ce_dim(&s2, k).unwrap() + ce_dim(&l2, k).unwrap()
            );
        }
        assert_eq!(degree(&both, 4, 512).unwrap(), Degree::Is(2));
    }
}

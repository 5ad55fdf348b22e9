use std::ops::ControlFlow;

use super::field::Elem;
use super::gf2::PackedRows;
use super::matrix::{for_each_combination, solve_left, FMatrix};
use super::vector::{weight, FVector};
use crate::error::{Error, Result};

/// Default cap on the number of vectors any single enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 26;

/// `base^exp` if it fits in a u64.
pub(crate) fn checked_power(base: u64, exp: usize) -> Option<u64> {
    u32::try_from(exp).ok().and_then(|e| base.checked_pow(e))
}

pub(crate) fn ensure_power_within(what: &'static str, base: u64, exp: usize, budget: u64) -> Result<u64> {
    match checked_power(base, exp) {
        Some(v) if v <= budget => Ok(v),
        _ => Err(Error::budget(what, format!("{base}^{exp}"), budget)),
    }
}

/// Visits every `w`-subset of `0..n` in lexicographic order.
pub fn for_each_subset<B>(n: usize, w: usize, mut visit: impl FnMut(&[usize]) -> ControlFlow<B>) -> ControlFlow<B> {
    if w > n {
        return ControlFlow::Continue(());
    }
    let mut idx: Vec<usize> = (0..w).collect();
    loop {
        visit(&idx)?;
        let Some(i) = (0..w).rev().find(|&i| idx[i] != i + n - w) else {
            return ControlFlow::Continue(());
        };
        idx[i] += 1;
        for j in i + 1..w {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// A parity-check matrix for the row space of `g`: `(N - k) × N`, rank `N - k`,
/// with `g · Hᵀ = 0`. Built from the reduced echelon form of `g`, one row per
/// non-pivot column `c`, carrying a one at `c`.
pub fn parity_check_matrix(g: &FMatrix) -> FMatrix {
    let f = g.field();
    let n = g.cols();
    let (r, pivots) = g.rref();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut h = FMatrix::zeros(f, free.len(), n);
    for (row, &c) in free.iter().enumerate() {
        h.set(row, c, 1);
        for (pr, &p) in pivots.iter().enumerate() {
            h.set(row, p, f.neg(r.get(pr, c)));
        }
    }
    h
}

/// A minimum-weight solution of `H · εᵀ = s`.
///
/// Weights are tried in increasing order; within a weight, supports are
/// visited in lexicographic order and the first support admitting a solution
/// that is nonzero on every coordinate wins. At the minimum weight such a
/// solution is unique on its support, so the result is fully determined.
pub fn coset_leader(h: &FMatrix, s: &FVector, weight_cap: usize) -> Result<FVector> {
    if s.len() != h.rows() {
        return Err(Error::LengthMismatch {
            expected: h.rows(),
            got: s.len(),
        });
    }
    let f = h.field();
    let n = h.cols();
    let cols = h.columns();
    if solve_left(f, &cols, s.entries()).is_none() {
        return Err(Error::NoSolution);
    }
    for w in 0..=weight_cap.min(n) {
        let found = for_each_subset(n, w, |support| {
            let sub: Vec<Vec<Elem>> = support.iter().map(|&c| cols[c].clone()).collect();
            match solve_left(f, &sub, s.entries()) {
                Some(vals) if vals.iter().all(|&v| v != 0) => {
                    ControlFlow::Break(support.iter().zip(vals).fold(vec![0; n], |mut e, (&c, v)| {
                        e[c] = v;
                        e
                    }))
                }
                _ => ControlFlow::Continue(()),
            }
        });
        if let ControlFlow::Break(e) = found {
            return Ok(FVector::from_raw(f, e));
        }
    }
    Err(Error::WeightCapExceeded { cap: weight_cap })
}

/// Minimum distance of the code spanned by the rows of `g`, by enumerating
/// all `q^k` messages over a basis (k = rank). Binary codes use the packed path.
pub fn code_min_distance(g: &FMatrix, budget: u64) -> Result<usize> {
    let basis = g.row_space_basis();
    if basis.rows() == 0 {
        return Err(Error::ZeroDimension);
    }
    ensure_power_within("code enumeration", g.field().q() as u64, basis.rows(), budget)?;
    if g.field().is_binary() && basis.rows() < 64 {
        return Ok(PackedRows::from_matrix(&basis).min_combination_weight().unwrap());
    }
    Ok(min_weight_generic(&basis))
}

/// [`code_min_distance`] without the packed binary path.
pub fn code_min_distance_generic(g: &FMatrix, budget: u64) -> Result<usize> {
    let basis = g.row_space_basis();
    if basis.rows() == 0 {
        return Err(Error::ZeroDimension);
    }
    ensure_power_within("code enumeration", g.field().q() as u64, basis.rows(), budget)?;
    Ok(min_weight_generic(&basis))
}

fn min_weight_generic(basis: &FMatrix) -> usize {
    let mut best = usize::MAX;
    let _ = for_each_combination::<()>(basis.field(), &basis.row_vecs(), basis.cols(), |coeffs, v| {
        if coeffs.iter().any(|&c| c != 0) {
            best = best.min(weight(v));
        }
        ControlFlow::Continue(())
    });
    best
}

/// Minimum of `wt(u · g)` over nonzero message vectors `u`. Unlike
/// [`code_min_distance`] this is zero when the rows of `g` are dependent.
pub fn min_encoded_weight(g: &FMatrix, budget: u64) -> Result<usize> {
    if g.rows() == 0 {
        return Err(Error::ZeroDimension);
    }
    if g.rank() < g.rows() {
        return Ok(0);
    }
    code_min_distance(g, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_linalg::Field;

    fn gf(q: u32) -> Field {
        Field::new(q).unwrap()
    }

    /// All vectors of F_q^n, in odometer order.
    fn all_vectors(q: u32, n: usize) -> Vec<Vec<Elem>> {
        let total = (q as usize).pow(n as u32);
        (0..total)
            .map(|mut k| {
                (0..n)
                    .map(|_| {
                        let d = (k % q as usize) as Elem;
                        k /= q as usize;
                        d
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn subsets_in_lex_order() {
        let mut seen = Vec::new();
        let _ = for_each_subset::<()>(4, 2, |s| {
            seen.push(s.to_vec());
            ControlFlow::Continue(())
        });
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        let mut count = 0;
        let _ = for_each_subset::<()>(3, 0, |_| {
            count += 1;
            ControlFlow::Continue(())
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn dual_of_single_row() {
        let f2 = gf(2);
        let g = FMatrix::parse_rows(&f2, &["1110"]).unwrap();
        let h = parity_check_matrix(&g);
        assert_eq!((h.rows(), h.cols()), (3, 4));
        assert_eq!(h.rank(), 3);
        assert!(g.mul(&h.transpose()).unwrap().is_zero());
        // Oracle: the dual is every vector orthogonal to 1110; H must span exactly it.
        let dual: Vec<Vec<Elem>> = all_vectors(2, 4)
            .into_iter()
            .filter(|v| f2.dot(v, g.row(0)) == 0)
            .collect();
        assert_eq!(dual.len(), 8);
        let basis = h.row_vecs();
        for v in &dual {
            assert!(solve_left(&f2, &basis, v).is_some());
        }
    }

    #[test]
    fn dual_edge_cases() {
        let f3 = gf(3);
        let h = parity_check_matrix(&FMatrix::identity(&f3, 4));
        assert_eq!((h.rows(), h.cols()), (0, 4));
        let h = parity_check_matrix(&FMatrix::zeros(&f3, 0, 4));
        assert_eq!(h, FMatrix::identity(&f3, 4));
    }

    #[test]
    fn coset_leader_examples() {
        let f2 = gf(2);
        let h = FMatrix::parse_rows(&f2, &["1100", "0110", "0001"]).unwrap();
        let zero = FVector::zeros(&f2, 3);
        assert!(coset_leader(&h, &zero, 4).unwrap().is_zero());
        let s = FVector::parse(&f2, "110").unwrap();
        let e = coset_leader(&h, &s, 4).unwrap();
        assert_eq!(e.to_string(), "0100");

        // Oracle: brute force over all 16 vectors for the minimum weight.
        let best = all_vectors(2, 4)
            .into_iter()
            .filter(|v| h.mul_vec(&FVector::new(&f2, v.clone()).unwrap()).unwrap() == s)
            .map(|v| weight(&v))
            .min()
            .unwrap();
        assert_eq!(e.weight(), best);

        let f5 = gf(5);
        let id = FMatrix::identity(&f5, 3);
        let s = FVector::parse(&f5, "403").unwrap();
        assert_eq!(coset_leader(&id, &s, 3).unwrap(), s);
    }

    #[test]
    fn coset_leader_errors() {
        let f2 = gf(2);
        let h = FMatrix::parse_rows(&f2, &["1100", "1100"]).unwrap();
        let s = FVector::parse(&f2, "10").unwrap();
        assert_eq!(coset_leader(&h, &s, 4), Err(Error::NoSolution));
        let h = FMatrix::identity(&f2, 3);
        let s = FVector::parse(&f2, "111").unwrap();
        assert_eq!(coset_leader(&h, &s, 2), Err(Error::WeightCapExceeded { cap: 2 }));
        assert!(matches!(
            coset_leader(&h, &FVector::zeros(&f2, 2), 2),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn coset_leaders_never_exceed_the_error() {
        // Every e over GF(3)^5 against a fixed 3×5 check matrix.
        let f3 = gf(3);
        let h = FMatrix::parse_rows(&f3, &["10120", "01102", "00111"]).unwrap();
        for v in all_vectors(3, 5) {
            let e = FVector::new(&f3, v).unwrap();
            let s = h.mul_vec(&e).unwrap();
            let lead = coset_leader(&h, &s, 5).unwrap();
            assert!(lead.weight() <= e.weight());
            assert_eq!(h.mul_vec(&lead).unwrap(), s);
        }
    }

    #[test]
    fn min_distance_examples() {
        let f2 = gf(2);
        let b = DEFAULT_ENUMERATION_BUDGET;
        assert_eq!(code_min_distance(&FMatrix::identity(&f2, 4), b), Ok(1));
        let ex1 = FMatrix::parse_rows(&f2, &["1110", "1101", "1011"]).unwrap();
        assert_eq!(code_min_distance(&ex1, b), Ok(1));
        let rep = FMatrix::parse_rows(&f2, &["11111"]).unwrap();
        assert_eq!(code_min_distance(&rep, b), Ok(5));
        assert_eq!(
            code_min_distance(&FMatrix::zeros(&f2, 2, 3), b),
            Err(Error::ZeroDimension)
        );
        assert!(matches!(
            code_min_distance(&FMatrix::identity(&f2, 10), 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn encoded_weight_sees_dependent_rows() {
        let f2 = gf(2);
        let g = FMatrix::parse_rows(&f2, &["111", "111"]).unwrap();
        assert_eq!(min_encoded_weight(&g, 1000), Ok(0));
        assert_eq!(code_min_distance(&g, 1000), Ok(3));
    }
}

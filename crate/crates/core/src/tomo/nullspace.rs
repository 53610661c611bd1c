//! Exact null space of a 0/1 matrix.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::netgraph::RoutingMatrix;

/// Reduced row echelon form over the rationals; returns the pivot columns.
fn rref(routing: &RoutingMatrix) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let m = routing.entries();
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| BigRational::from_integer(BigInt::from(u8::from(m.get(i, j)))))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = BigRational::one() / &a[r][c];
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= &f * pv;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Rank over the rationals.
pub fn rank(routing: &RoutingMatrix) -> usize {
    rref(routing).1.len()
}

/// Orthonormal basis of `{w : R w = 0}`; empty when `R` has full column rank.
pub fn null_space_basis(routing: &RoutingMatrix) -> Vec<Vec<f64>> {
    let n = routing.link_count();
    let (a, pivots) = rref(routing);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let raw: Vec<Vec<f64>> = free
        .iter()
        .map(|&f| {
            let mut w = vec![0.0; n];
            w[f] = 1.0;
            for (row, &pc) in pivots.iter().enumerate() {
                w[pc] = -a[row][f].to_f64().expect("finite rational");
            }
            w
        })
        .collect();
    orthonormalize(raw)
}

/// Modified Gram-Schmidt with one reorthogonalization pass.
fn orthonormalize(vectors: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        for _ in 0..2 {
            for q in &basis {
                let dot: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        // exact inputs are independent, so this never drops a vector
        if norm > 1e-12 {
            v.iter_mut().for_each(|a| *a /= norm);
            basis.push(v);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::netgraph::BinaryMatrix;

    #[test]
    fn identity_has_trivial_null_space() {
        let r = RoutingMatrix::from_dense(&BinaryMatrix::identity(4).to_rows()).unwrap();
        assert!(null_space_basis(&r).is_empty());
        assert_eq!(rank(&r), 4);
    }

    #[test]
    fn basis_is_orthonormal_and_annihilated() {
        let r = fixtures::eight_link_routing();
        let basis = null_space_basis(&r);
        assert_eq!(basis.len(), 2);
        for (i, u) in basis.iter().enumerate() {
            assert!(r.mul_vec(u).iter().all(|v| v.abs() < 1e-12));
            for (j, v) in basis.iter().enumerate() {
                let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
    }
}

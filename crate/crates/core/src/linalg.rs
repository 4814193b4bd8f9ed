//! Row reduction over a finite field.

use crate::field::{FiniteField, Fq};

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut [Vec<Fq>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
            continue;
        };
        rows.swap(r, k);
        let inv = rows[r][c].inv().unwrap();
        for x in rows[r].iter_mut() {
            *x *= inv;
        }
        for k in 0..rows.len() {
            if k != r && !rows[k][c].is_zero() {
                let m = rows[k][c];
                for j in 0..ncols {
                    let t = rows[r][j] * m;
                    rows[k][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vec<Fq>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{x : M x = 0}`.
pub fn nullspace(field: &'static FiniteField, rows: &[Vec<Fq>], ncols: usize) -> Vec<Vec<Fq>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut x = vec![field.zero(); ncols];
            x[fc] = field.one();
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = -m[r][fc];
            }
            x
        })
        .collect()
}

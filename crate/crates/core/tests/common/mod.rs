#![allow(dead_code)]

use ecic::field_linalg::{Elem, FMatrix, Field};
use ecic::instance::IcsiInstance;
use rand::seq::SliceRandom;
use rand::Rng;

/// A random instance with `n` messages and `m` receivers; each receiver's
/// side information is a uniformly random subset of the other messages.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, m: usize) -> IcsiInstance {
    let mut demands = Vec::with_capacity(m);
    let mut side = Vec::with_capacity(m);
    for _ in 0..m {
        let f = rng.gen_range(0..n);
        let x: Vec<usize> = (0..n).filter(|&j| j != f && rng.gen_bool(0.5)).collect();
        demands.push(f);
        side.push(x);
    }
    IcsiInstance::new(n, demands, side).unwrap()
}

pub fn random_matrix<R: Rng>(rng: &mut R, field: &Field, rows: usize, cols: usize) -> FMatrix {
    let data: Vec<Vec<Elem>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(0..field.order()) as Elem).collect())
        .collect();
    FMatrix::from_rows(field, cols, &data).unwrap()
}

/// A random `rows × cols` matrix of full row rank; `rows ≤ cols`.
pub fn random_full_rank<R: Rng>(rng: &mut R, field: &Field, rows: usize, cols: usize) -> FMatrix {
    loop {
        let m = random_matrix(rng, field, rows, cols);
        if m.rank() == rows {
            return m;
        }
    }
}

/// `L` with its columns permuted and each scaled by a random nonzero element.
pub fn permute_and_scale<R: Rng>(rng: &mut R, l: &FMatrix) -> FMatrix {
    let mut perm: Vec<usize> = (0..l.cols()).collect();
    perm.shuffle(rng);
    let mut out = l.select_columns(&perm);
    for c in 0..out.cols() {
        let a = rng.gen_range(1..l.field().order()) as Elem;
        out.scale_column(c, a);
    }
    out
}

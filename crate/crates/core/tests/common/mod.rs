#![allow(dead_code)]

use std::path::Path;

use umeb::constructions::{Provenance, UmebCandidate};
use umeb::linalg::{seeded_random_unitary, Complex, ComplexMatrix};

/// Runs the CLI in-process and returns (exit code, stdout, stderr).
pub fn cli(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("umeb").chain(args.iter().copied());
    let code = umeb::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Tr(A†B) by forming the product entry by entry.
pub fn brute_trace_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex {
    let n = a.rows();
    let mut t = Complex::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            t += a[(k, i)].conj() * b[(k, i)];
        }
    }
    t
}

/// Kronecker product by copying scaled copies of `b` into place.
pub fn kron_by_blocks(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(a.rows() * p, a.cols() * q);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            for r in 0..p {
                for c in 0..q {
                    out[(i * p + r, j * q + c)] = a[(i, j)] * b[(r, c)];
                }
            }
        }
    }
    out
}

/// Perfect matching between two equal-length lists where `a[i]` may pair
/// with `b[j]` when their entrywise deviation is below `tol`. Returns the
/// worst deviation over the matching, or None if no perfect matching
/// exists.
pub fn match_sets(a: &[ComplexMatrix], b: &[ComplexMatrix], tol: f64) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let n = a.len();
    let cost: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| x.max_abs_diff(y)).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; n];

    fn augment(i: usize, cost: &[Vec<f64>], tol: f64, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for j in 0..cost.len() {
            if cost[i][j] < tol && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, cost, tol, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }

    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, &cost, tol, &mut seen, &mut owner) {
            return None;
        }
    }
    Some(
        owner
            .iter()
            .enumerate()
            .map(|(j, i)| cost[i.unwrap()][j])
            .fold(0.0, f64::max),
    )
}

/// Random permutation of 0..n from a seed (Fisher-Yates over a simple LCG).
pub fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut v: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let j = ((s >> 33) % (i as u64 + 1)) as usize;
        v.swap(i, j);
    }
    v
}

/// `V U_a V†` for a seeded random unitary V, in a seeded random order.
pub fn conjugate_and_shuffle(c: &UmebCandidate, seed: u64) -> UmebCandidate {
    let v = seeded_random_unitary(c.dim(), seed);
    let vd = v.adjoint();
    let moved = c
        .map_elements(|u| &(&v * u) * &vd, Provenance::External("conjugated".into()))
        .unwrap();
    moved.select(&permutation(c.len(), seed ^ 0x5eed), "shuffled").unwrap()
}

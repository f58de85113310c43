//! Nuclear-norm ascent over the Hilbert–Schmidt complement of a candidate.
//!
//! On the sphere `‖M‖_F² = d` the nuclear norm is at most `d`, with
//! equality exactly at unitaries. Each step replaces `M` by the rescaled
//! projection of its polar factor; by Cauchy–Schwarz the objective never
//! decreases. Reaching `d` produces a unitary in the complement, i.e. an
//! extension. Failing to reach it is only evidence.

use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::UmebCandidate;
use crate::error::{Result, UmebError};
use crate::linalg::{
    hs_inner, least_squares, orthonormal_complement, polar_factor, seeded_random_matrix, unitarity_residual, Complex,
    ComplexMatrix, Tolerances,
};

use super::verify_axioms;

/// Slack allowed when checking that the objective is non-decreasing.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Best restarts ending this close to the bound are refined by Newton
/// steps. Near a unitary the ascent converges sublinearly, and its polar
/// factor is only within about √gap of the complement.
const POLISH_GAP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchParams {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    pub extension_tol: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            restarts: 100,
            iters: 500,
            seed: 0,
            extension_tol: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SearchVerdict {
    ExtensionFound,
    NoExtensionFound,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtendibilitySearchResult {
    pub verdict: SearchVerdict,
    pub best_nuclear_norm: f64,
    /// `d − best_nuclear_norm`.
    pub gap: f64,
    /// Best complement element found, `‖M‖_F² = d` (zero when the
    /// complement is trivial).
    pub witness: ComplexMatrix,
    /// Polar factor of the witness, present when an extension was found.
    pub extension: Option<ComplexMatrix>,
    /// `max_a |Tr(U_a† X)|` for the extension `X`.
    pub extension_max_overlap: Option<f64>,
    pub extension_unitarity_residual: Option<f64>,
    pub complement_dim: usize,
    pub best_restart: usize,
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    pub notes: Vec<String>,
    /// Objective value after every iteration, one trace per restart.
    #[serde(skip)]
    pub traces: Vec<Vec<f64>>,
}

/// Per-restart seed; depends only on `(seed, restart)`.
pub fn restart_seed(seed: u64, restart: usize) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(seed ^ splitmix(restart as u64))
}

struct Ascent<'a> {
    basis: &'a [ComplexMatrix],
    radius: f64,
}

impl Ascent<'_> {
    fn coefficients(&self, x: &ComplexMatrix) -> Vec<Complex> {
        self.basis
            .iter()
            .map(|b| hs_inner(b, x).expect("basis and iterate share a shape"))
            .collect()
    }

    /// Rescales coefficients to the sphere and assembles the matrix.
    fn assemble(&self, mut coeffs: Vec<Complex>) -> Result<ComplexMatrix> {
        let norm = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 {
            return Err(UmebError::Numerical("ascent iterate vanished in the complement".into()));
        }
        let s = self.radius / norm;
        coeffs.iter_mut().for_each(|z| *z *= s);
        Ok(self.combine(&coeffs))
    }

    /// Runs up to `iters` objective evaluations from `m`, pushing each onto
    /// `trace`. Stops early once the objective reaches the bound or stalls.
    fn run(&self, mut m: ComplexMatrix, iters: usize, trace: &mut Vec<f64>) -> Result<ComplexMatrix> {
        let bound = self.radius * self.radius;
        let start = trace.len();
        for it in 0..iters {
            let (q, nuclear) = polar_factor(&m)?;
            let stalled = trace.len() > start && nuclear - trace[trace.len() - 1] < 1e-15;
            trace.push(nuclear);
            if it + 1 == iters || stalled || bound - nuclear < 1e-14 {
                break;
            }
            m = self.assemble(self.coefficients(&q))?;
        }
        Ok(m)
    }

    /// Gauss-Newton on `X†X = I` over `X` in the span, minimum-norm steps.
    /// Returns a point with residual below 1e-13, rescaled onto the sphere,
    /// or None.
    fn newton(&self, m: &ComplexMatrix) -> Result<Option<ComplexMatrix>> {
        let d = m.dim();
        let k = self.basis.len();
        let eye = ComplexMatrix::identity(d);
        let mut coeffs = self.coefficients(m);
        for _ in 0..50 {
            let x = self.combine(&coeffs);
            let xd = x.adjoint();
            let r = (&xd * &x).sub(&eye);
            if r.max_abs() < 1e-13 {
                return Ok(Some(x.scale_real(self.radius / x.frobenius_norm_sq().sqrt())));
            }
            // Real Jacobian: δc_j = 1 and δc_j = i for each basis element.
            let mut jac = ComplexMatrix::zeros(2 * d * d, 2 * k);
            for (j, b) in self.basis.iter().enumerate() {
                let a = &xd * b;
                let ah = a.adjoint();
                let re = a.add(&ah);
                let im = a.sub(&ah).scale(Complex::new(0.0, 1.0));
                for (p, (u, v)) in re.entries().iter().zip(im.entries()).enumerate() {
                    jac[(2 * p, 2 * j)] = u.re.into();
                    jac[(2 * p + 1, 2 * j)] = u.im.into();
                    jac[(2 * p, 2 * j + 1)] = v.re.into();
                    jac[(2 * p + 1, 2 * j + 1)] = v.im.into();
                }
            }
            let rhs: Vec<Complex> = r
                .entries()
                .iter()
                .flat_map(|z| [(-z.re).into(), (-z.im).into()])
                .collect();
            let step = least_squares(&jac, &rhs)?;
            for (j, c) in coeffs.iter_mut().enumerate() {
                *c += Complex::new(step[2 * j].re, step[2 * j + 1].re);
            }
            if coeffs.iter().any(|c| !c.is_finite()) {
                return Ok(None);
            }
        }
        Ok(None)
    }

    fn combine(&self, coeffs: &[Complex]) -> ComplexMatrix {
        let d = self.basis[0].dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (c, b) in coeffs.iter().zip(self.basis) {
            m = m.add(&b.scale(*c));
        }
        m
    }
}

/// Seeded multi-start nuclear-norm ascent for a unitary orthogonal to
/// every element of `c`.
///
/// Restarts run in parallel; restart `r` draws its start from
/// [`restart_seed`]`(seed, r)`, and ties on the final objective go to the
/// lowest restart index, so the result does not depend on scheduling.
pub fn search_extension(c: &UmebCandidate, params: &SearchParams) -> Result<ExtendibilitySearchResult> {
    if params.restarts == 0 || params.iters == 0 {
        return Err(UmebError::InvalidArgument(
            "restarts and iters must both be positive".into(),
        ));
    }
    if params.extension_tol.is_nan() || params.extension_tol <= 0.0 {
        return Err(UmebError::InvalidArgument("extension_tol must be positive".into()));
    }
    let tol = Tolerances::default();
    let report = verify_axioms(c, &tol)?;
    if !report.orthonormal(&tol) {
        return Err(UmebError::InvalidArgument(
            "candidate is not an orthonormal set of unitaries; run verify first".into(),
        ));
    }
    let d = c.dim();
    let df = d as f64;
    let basis = orthonormal_complement(c.elements())?;
    let mut result = ExtendibilitySearchResult {
        verdict: SearchVerdict::NoExtensionFound,
        best_nuclear_norm: 0.0,
        gap: df,
        witness: ComplexMatrix::zeros(d, d),
        extension: None,
        extension_max_overlap: None,
        extension_unitarity_residual: None,
        complement_dim: basis.len(),
        best_restart: 0,
        restarts: params.restarts,
        iters: params.iters,
        seed: params.seed,
        notes: Vec::new(),
        traces: Vec::new(),
    };
    if basis.is_empty() {
        result
            .notes
            .push("span is complete: the complement is trivial, so no extension can exist".into());
        return Ok(result);
    }

    let ascent = Ascent {
        basis: &basis,
        radius: df.sqrt(),
    };
    let runs: Vec<(ComplexMatrix, Vec<f64>)> = (0..params.restarts)
        .into_par_iter()
        .map(|r| {
            let start = seeded_random_matrix(d, restart_seed(params.seed, r));
            let m0 = ascent.assemble(ascent.coefficients(&start))?;
            let mut trace = Vec::with_capacity(params.iters);
            let m = ascent.run(m0, params.iters, &mut trace)?;
            Ok((m, trace))
        })
        .collect::<Result<_>>()?;

    let (best_restart, _) = runs
        .iter()
        .enumerate()
        .map(|(i, (_, t))| (i, *t.last().expect("non-empty trace")))
        .fold(
            (0, f64::NEG_INFINITY),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    let (mut witness, traces): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let mut best = witness.swap_remove(best_restart);
    let mut best_value = *traces[best_restart].last().expect("non-empty trace");

    if df - best_value < params.extension_tol.max(POLISH_GAP) {
        if let Some(x) = ascent.newton(&best)? {
            let (_, nuclear) = polar_factor(&x)?;
            if nuclear > best_value {
                best = x;
                best_value = nuclear;
                result
                    .notes
                    .push("best restart refined by Gauss-Newton steps on X†X = I within the complement".into());
            }
        }
    }

    result.best_nuclear_norm = best_value;
    result.gap = df - best_value;
    result.best_restart = best_restart;
    if result.gap < params.extension_tol {
        result.verdict = SearchVerdict::ExtensionFound;
        let (u, _) = polar_factor(&best)?;
        let overlap = c
            .elements()
            .iter()
            .map(|e| hs_inner(e, &u).map(|z| z.norm()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let residual = unitarity_residual(&u);
        if residual >= 1e-8 || overlap >= 1e-6 {
            result.notes.push(format!(
                "extension failed re-verification (unitarity residual {residual:.3e}, max overlap {overlap:.3e})"
            ));
        }
        result.extension_max_overlap = Some(overlap);
        result.extension_unitarity_residual = Some(residual);
        result.extension = Some(u);
    } else {
        result
            .notes
            .push("no unitary found in the complement; this is numerical evidence, not a proof".into());
    }
    result.witness = best;
    result.traces = traces;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{bravyi_smolin_3, weyl, weyl_family};
    use crate::linalg::span_rank;

    fn quick() -> SearchParams {
        SearchParams {
            restarts: 8,
            iters: 200,
            seed: 3,
            extension_tol: 1e-6,
        }
    }

    #[test]
    fn complete_basis_is_reported_not_searched() {
        let r = search_extension(&weyl_family(2), &quick()).unwrap();
        assert_eq!(r.verdict, SearchVerdict::NoExtensionFound);
        assert_eq!(r.complement_dim, 0);
        assert_eq!(r.gap, 2.0);
        assert!(r.notes[0].contains("complete"));
    }

    #[test]
    fn one_dimensional_complement_finds_removed_weyl_operator() {
        let fam = weyl_family(2);
        // (n, m) = (1, 1) is the last element.
        let c = fam.without(3).unwrap();
        let r = search_extension(&c, &quick()).unwrap();
        assert_eq!(r.verdict, SearchVerdict::ExtensionFound);
        let ext = r.extension.unwrap();
        assert_eq!(span_rank(&[ext.clone(), weyl(2, 1, 1)]), 1);
        assert_eq!(span_rank(&[r.witness.clone(), weyl(2, 1, 1)]), 1);
        assert!((r.witness.frobenius_norm_sq() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_zero_counts() {
        let c = bravyi_smolin_3();
        let p = SearchParams { restarts: 0, ..quick() };
        assert!(matches!(search_extension(&c, &p), Err(UmebError::InvalidArgument(_))));
        let p = SearchParams { iters: 0, ..quick() };
        assert!(matches!(search_extension(&c, &p), Err(UmebError::InvalidArgument(_))));
    }

    #[test]
    fn traces_are_monotone_and_bounded() {
        let r = search_extension(&bravyi_smolin_3(), &quick()).unwrap();
        assert_eq!(r.traces.len(), 8);
        for t in &r.traces {
            for w in t.windows(2) {
                assert!(w[1] >= w[0] - MONOTONE_SLACK);
            }
            assert!(*t.last().unwrap() <= 3.0 + 1e-9);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = search_extension(&bravyi_smolin_3(), &quick()).unwrap();
        let b = search_extension(&bravyi_smolin_3(), &quick()).unwrap();
        assert_eq!(a.best_nuclear_norm.to_bits(), b.best_nuclear_norm.to_bits());
        assert_eq!(a.witness, b.witness);
        assert_eq!(a.best_restart, b.best_restart);
    }

    #[test]
    fn restart_seeds_differ() {
        assert_ne!(restart_seed(0, 0), restart_seed(0, 1));
        assert_ne!(restart_seed(0, 1), restart_seed(1, 0));
    }
}

//! Matrix families: Weyl operators, the three-dimensional Bravyi–Smolin
//! set, the explicit 30-member six-dimensional set, and the tensor-product
//! lift from dimension d to qd.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;

use crate::error::{Result, UmebError};
use crate::linalg::{kron, root_of_unity, unitarity_residual, Complex, ComplexMatrix};

/// How a candidate set was obtained. Drives structural certification and
/// the sector split used by spectral reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    WeylFamily(usize),
    BravyiSmolin3,
    /// The explicit 30-member set in dimension 6.
    Umeb6,
    Lift {
        base: Box<Provenance>,
        base_dim: usize,
        base_count: usize,
        q: usize,
    },
    External(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::WeylFamily(d) => write!(f, "weyl(d={d})"),
            Provenance::BravyiSmolin3 => write!(f, "bravyi_smolin_3"),
            Provenance::Umeb6 => write!(f, "umeb_6"),
            Provenance::Lift {
                base,
                base_dim,
                base_count,
                q,
            } => {
                write!(f, "lift(q={q},d={base_dim},n={base_count},base={base})")
            }
            Provenance::External(label) => write!(f, "external:{label}"),
        }
    }
}

fn parse_field(part: &str, key: &str) -> Result<usize> {
    part.strip_prefix(key)
        .and_then(|v| v.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| UmebError::MalformedProvenance(format!("expected {key}=<int>, found {part:?}")))
}

impl FromStr for Provenance {
    type Err = UmebError;

    /// Inverse of `Display`. Strings that match none of the known forms are
    /// taken as an external label.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(label) = s.strip_prefix("external:") {
            return Ok(Provenance::External(label.to_string()));
        }
        match s {
            "bravyi_smolin_3" => return Ok(Provenance::BravyiSmolin3),
            "umeb_6" => return Ok(Provenance::Umeb6),
            _ => {}
        }
        if let Some(inner) = s.strip_prefix("weyl(").and_then(|r| r.strip_suffix(')')) {
            return Ok(Provenance::WeylFamily(parse_field(inner, "d")?));
        }
        if let Some(inner) = s.strip_prefix("lift(").and_then(|r| r.strip_suffix(')')) {
            let mut parts = inner.splitn(4, ',');
            let mut next = |key| parse_field(parts.next().unwrap_or(""), key);
            let q = next("q")?;
            let base_dim = next("d")?;
            let base_count = next("n")?;
            let base = parts
                .next()
                .and_then(|p| p.strip_prefix("base="))
                .ok_or_else(|| UmebError::MalformedProvenance(format!("missing base in {s:?}")))?;
            return Ok(Provenance::Lift {
                base: Box::new(base.parse()?),
                base_dim,
                base_count,
                q,
            });
        }
        if s.starts_with("lift(") || s.starts_with("weyl(") {
            return Err(UmebError::MalformedProvenance(s.to_string()));
        }
        Ok(Provenance::External(s.to_string()))
    }
}

/// An ordered set of d×d matrices proposed as a UMEB.
#[derive(Clone, Debug, PartialEq)]
pub struct UmebCandidate {
    dim: usize,
    elements: Vec<ComplexMatrix>,
    provenance: Provenance,
    exact_cos_theta: Option<Rational64>,
}

impl UmebCandidate {
    pub fn new(dim: usize, elements: Vec<ComplexMatrix>, provenance: Provenance) -> Result<Self> {
        if dim == 0 {
            return Err(UmebError::InvalidArgument("dimension must be positive".into()));
        }
        if elements.is_empty() {
            return Err(UmebError::InvalidArgument("candidate has no elements".into()));
        }
        for m in &elements {
            if !m.is_square() {
                return Err(UmebError::NotSquare {
                    rows: m.rows(),
                    cols: m.cols(),
                });
            }
            if m.rows() != dim {
                return Err(UmebError::DimensionMismatch {
                    expected: dim,
                    found: m.rows(),
                });
            }
        }
        Ok(Self {
            dim,
            elements,
            provenance,
            exact_cos_theta: None,
        })
    }

    pub fn with_exact_cos_theta(mut self, cos: Option<Rational64>) -> Self {
        self.exact_cos_theta = cos;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn exact_cos_theta(&self) -> Option<Rational64> {
        self.exact_cos_theta
    }

    /// Same matrices in a new order (or a subset), tagged as external.
    pub fn select(&self, indices: &[usize], label: &str) -> Result<Self> {
        let elements = indices
            .iter()
            .map(|&i| {
                self.elements.get(i).cloned().ok_or_else(|| {
                    UmebError::InvalidArgument(format!("index {i} out of range for {} elements", self.len()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(self.dim, elements, Provenance::External(label.to_string()))?
            .with_exact_cos_theta(self.exact_cos_theta))
    }

    /// The candidate with element `index` dropped.
    pub fn without(&self, index: usize) -> Result<Self> {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| i != index).collect();
        self.select(&keep, &format!("{} without element {index}", self.provenance))
    }

    /// Replaces the matrices, keeping dimension and metadata.
    pub fn map_elements(&self, f: impl FnMut(&ComplexMatrix) -> ComplexMatrix, provenance: Provenance) -> Result<Self> {
        let elements = self.elements.iter().map(f).collect();
        Ok(Self::new(self.dim, elements, provenance)?.with_exact_cos_theta(self.exact_cos_theta))
    }
}

/// Element counts of a lift: what the construction actually produces, and
/// the closed form `(qd)² − (d² − N)` stated alongside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftCounts {
    pub constructed: usize,
    pub headline: i64,
}

impl LiftCounts {
    pub fn new(base_dim: usize, base_count: usize, q: usize) -> Self {
        let d2 = base_dim * base_dim;
        let constructed = q * q.saturating_sub(1) * d2 + q * base_count;
        let qd = (q * base_dim) as i64;
        let headline = qd * qd - (d2 as i64 - base_count as i64);
        Self { constructed, headline }
    }

    pub fn consistent(&self) -> bool {
        self.constructed as i64 == self.headline
    }
}

/// Generalised Pauli operator `Σ_k e^{2πikn/d} |k⊕m⟩⟨k|`.
pub fn weyl(d: usize, n: i64, m: i64) -> ComplexMatrix {
    assert!(d > 0, "weyl: d must be positive");
    let di = d as i64;
    let mut out = ComplexMatrix::zeros(d, d);
    for k in 0..di {
        let row = (k + m).rem_euclid(di) as usize;
        out[(row, k as usize)] = root_of_unity(k * n, d as u64);
    }
    out
}

/// All d² Weyl operators, ordered by (n, m).
pub fn weyl_family(d: usize) -> UmebCandidate {
    let elements = weyl_operators(d);
    UmebCandidate::new(d, elements, Provenance::WeylFamily(d)).expect("weyl family is well formed")
}

fn weyl_operators(d: usize) -> Vec<ComplexMatrix> {
    let di = d as i64;
    (0..di).flat_map(|n| (0..di).map(move |m| weyl(d, n, m))).collect()
}

/// Cyclic shift with `S|k⟩ = |k−1 mod q⟩` (ones on the superdiagonal and in
/// the bottom-left corner).
pub fn shift_s(q: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(q, q);
    for i in 0..q {
        s[(i, (i + 1) % q)] = Complex::new(1.0, 0.0);
    }
    s
}

/// Unnormalised Fourier (Vandermonde) matrix, entry (j, k) = ζ_q^{jk}.
pub fn fourier_w(q: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(q, q, |j, k| root_of_unity((j * k) as i64, q as u64))
}

/// Diagonal matrix carrying row `i` of `m`.
pub fn row_diag(m: &ComplexMatrix, i: usize) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(UmebError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if i >= m.rows() {
        return Err(UmebError::InvalidArgument(format!(
            "row {i} out of range for {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let row: Vec<Complex> = (0..m.cols()).map(|c| m[(i, c)]).collect();
    Ok(ComplexMatrix::diag(&row))
}

/// Golden ratio used by the Bravyi–Smolin states.
pub fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// The six states `(|a⟩ ± α|b⟩)/√(1+α²)` over the cyclic pairs (0,1),
/// (1,2), (2,0).
pub fn bravyi_smolin_states() -> Vec<[Complex; 3]> {
    let alpha = golden_ratio();
    let norm = 1.0 / (1.0 + alpha * alpha).sqrt();
    let mut states = Vec::with_capacity(6);
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        for sign in [1.0, -1.0] {
            let mut v = [Complex::new(0.0, 0.0); 3];
            v[a] = Complex::new(norm, 0.0);
            v[b] = Complex::new(sign * alpha * norm, 0.0);
            states.push(v);
        }
    }
    states
}

/// `e^{iθ}` with `cos θ = −7/8`, `sin θ = √15/8`.
pub fn bravyi_smolin_phase() -> Complex {
    Complex::new(-7.0 / 8.0, 15f64.sqrt() / 8.0)
}

/// Six unitaries `I − (1 − e^{iθ})|ψ_i⟩⟨ψ_i|` in dimension 3.
pub fn bravyi_smolin_3() -> UmebCandidate {
    let factor = Complex::new(1.0, 0.0) - bravyi_smolin_phase();
    let elements = bravyi_smolin_states()
        .iter()
        .map(|psi| {
            let proj = ComplexMatrix::from_fn(3, 3, |r, c| psi[r] * psi[c].conj());
            ComplexMatrix::identity(3).sub(&proj.scale(factor))
        })
        .collect();
    UmebCandidate::new(3, elements, Provenance::BravyiSmolin3)
        .expect("Bravyi-Smolin set is well formed")
        .with_exact_cos_theta(Some(Rational64::new(-7, 8)))
}

/// The explicit 30-member set in dimension 6: `δ_± ⊗ U_nm` for n, m in
/// 0..3 followed by `η_± ⊗ U_i` over the Bravyi–Smolin unitaries.
///
/// Indices 1, 2, 3 and 0, 1, 2 give the same Weyl operators mod 3.
pub fn umeb_6() -> UmebCandidate {
    let deltas = [
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]),
    ];
    let etas = [
        ComplexMatrix::diag(&[1.0.into(), 1.0.into()]),
        ComplexMatrix::diag(&[1.0.into(), (-1.0).into()]),
    ];
    let bs = bravyi_smolin_3();
    let mut elements = Vec::with_capacity(30);
    for delta in &deltas {
        for n in 0..3 {
            for m in 0..3 {
                elements.push(kron(delta, &weyl(3, n, m)));
            }
        }
    }
    for eta in &etas {
        for u in bs.elements() {
            elements.push(kron(eta, u));
        }
    }
    UmebCandidate::new(6, elements, Provenance::Umeb6)
        .expect("30-member set is well formed")
        .with_exact_cos_theta(bs.exact_cos_theta())
}

/// Lifts a base set in dimension d to dimension qd.
///
/// Output order: the Weyl sector `(W^i S^j) ⊗ U_nm` for i in 0..q, j in
/// 1..q, n, m in 0..d (lexicographic), then the base sector `W^i ⊗ U_n`
/// ordered by (i, n). `W^i` is [`row_diag`] of [`fourier_w`]. The shift
/// power starts at 1. With j = 0 the Weyl-sector terms would be block
/// diagonal and overlap the base sector.
pub fn lift(base: &UmebCandidate, q: usize) -> Result<UmebCandidate> {
    if q == 0 {
        return Err(UmebError::InvalidArgument("lift factor q must be at least 1".into()));
    }
    for (index, u) in base.elements().iter().enumerate() {
        let residual = unitarity_residual(u);
        if residual >= 1e-10 {
            return Err(UmebError::NotUnitary { index, residual });
        }
    }
    let d = base.dim();
    let w = fourier_w(q);
    let w_rows: Vec<ComplexMatrix> = (0..q).map(|i| row_diag(&w, i)).collect::<Result<_>>()?;
    let s = shift_s(q);
    let weyls = weyl_operators(d);
    let counts = LiftCounts::new(d, base.len(), q);
    let mut elements = Vec::with_capacity(counts.constructed);
    for w_i in &w_rows {
        let mut s_j = s.clone();
        for _j in 1..q {
            let factor = w_i * &s_j;
            for u in &weyls {
                elements.push(kron(&factor, u));
            }
            s_j = &s_j * &s;
        }
    }
    for w_i in &w_rows {
        for u in base.elements() {
            elements.push(kron(w_i, u));
        }
    }
    debug_assert_eq!(elements.len(), counts.constructed);
    let provenance = Provenance::Lift {
        base: Box::new(base.provenance().clone()),
        base_dim: d,
        base_count: base.len(),
        q,
    };
    Ok(UmebCandidate::new(q * d, elements, provenance)?.with_exact_cos_theta(base.exact_cos_theta()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{determinant, eigenvalues, gram_matrix};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn weyl_examples() {
        for d in 1..6 {
            assert_eq!(weyl(d, 0, 0), ComplexMatrix::identity(d));
        }
        let w = root_of_unity(1, 3);
        assert!(weyl(3, 1, 0).max_abs_diff(&ComplexMatrix::diag(&[c(1.0, 0.0), w, w * w])) < 1e-15);
        assert_eq!(
            weyl(2, 1, 1),
            ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]])
        );
    }

    #[test]
    fn weyl_is_periodic() {
        for d in 1..6usize {
            let di = d as i64;
            for n in -di..2 * di {
                for m in -di..2 * di {
                    let w = weyl(d, n, m);
                    assert_eq!(w, weyl(d, n + di, m));
                    assert_eq!(w, weyl(d, n, m + di));
                    assert_eq!(w, weyl(d, n.rem_euclid(di), m.rem_euclid(di)));
                }
            }
        }
    }

    #[test]
    fn weyl_family_small() {
        let one = weyl_family(1);
        assert_eq!(one.elements(), &[ComplexMatrix::identity(1)]);
        let two = weyl_family(2);
        assert_eq!(two.len(), 4);
        // (n, m) order: I, X, Z, ZX-type.
        assert_eq!(
            two.elements()[1],
            ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
        );
        assert_eq!(
            two.elements()[2],
            ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
        );
        let g = gram_matrix(two.elements()).unwrap();
        assert_eq!(g, ComplexMatrix::identity(4).scale_real(2.0));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_s(1), ComplexMatrix::identity(1));
        assert_eq!(shift_s(2), ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]));
        for q in 1..7 {
            let s = shift_s(q);
            assert_eq!(s.pow(q as u32), ComplexMatrix::identity(q));
            // S|k⟩ = |k−1⟩
            for k in 0..q {
                assert_eq!(s[((k + q - 1) % q, k)], c(1.0, 0.0));
            }
        }
    }

    #[test]
    fn shift_eigenvalues_are_roots_of_unity() {
        let ev = eigenvalues(&shift_s(4)).unwrap();
        for k in 0..4 {
            let z = root_of_unity(k, 4);
            assert!(ev.iter().any(|e| (e - z).norm() < 1e-12), "missing 4th root {z}");
        }
    }

    #[test]
    fn fourier_examples() {
        assert_eq!(fourier_w(1), ComplexMatrix::identity(1));
        assert_eq!(
            fourier_w(2),
            ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]])
        );
        let det = determinant(&fourier_w(3)).unwrap().norm();
        assert!((det - 27f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn row_diag_examples() {
        let eta_minus = ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(row_diag(&fourier_w(2), 1).unwrap(), eta_minus);
        for q in 1..6 {
            assert_eq!(row_diag(&fourier_w(q), 0).unwrap(), ComplexMatrix::identity(q));
        }
        let expected = ComplexMatrix::diag(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]);
        assert_eq!(row_diag(&fourier_w(4), 1).unwrap(), expected);
        assert!(matches!(row_diag(&fourier_w(2), 2), Err(UmebError::InvalidArgument(_))));
    }

    #[test]
    fn bravyi_smolin_states_are_normalised() {
        for psi in bravyi_smolin_states() {
            let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-15);
        }
        assert!((bravyi_smolin_phase().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bravyi_smolin_metadata() {
        let bs = bravyi_smolin_3();
        assert_eq!(bs.len(), 6);
        assert_eq!(bs.exact_cos_theta(), Some(Rational64::new(-7, 8)));
        for u in bs.elements() {
            assert!(unitarity_residual(u) < 1e-12);
        }
    }

    #[test]
    fn umeb_6_shape() {
        let u6 = umeb_6();
        assert_eq!(u6.len(), 30);
        assert_eq!(u6.dim(), 6);
        for u in u6.elements() {
            assert!(unitarity_residual(u) < 1e-12);
        }
    }

    #[test]
    fn lift_count_and_sectors() {
        let bs = bravyi_smolin_3();
        for q in 1..=4 {
            let lifted = lift(&bs, q).unwrap();
            let counts = LiftCounts::new(3, 6, q);
            assert_eq!(lifted.len(), counts.constructed);
            assert_eq!(lifted.len(), q * (q - 1) * 9 + 6 * q);
            let weyl_len = q * (q - 1) * 9;
            for (idx, m) in lifted.elements().iter().enumerate() {
                let blocks_diag_zero = (0..q).all(|b| m.block(b, b, 3).max_abs() == 0.0);
                let off_diag_zero = (0..q).all(|a| (0..q).all(|b| a == b || m.block(a, b, 3).max_abs() == 0.0));
                if idx < weyl_len {
                    assert!(blocks_diag_zero, "weyl-sector element {idx} has diagonal block mass");
                } else {
                    assert!(off_diag_zero, "base-sector element {idx} is not block diagonal");
                }
            }
        }
        assert_eq!(lift(&bs, 1).unwrap().elements(), bs.elements());
    }

    #[test]
    fn lift_counts_headline() {
        let c = LiftCounts::new(3, 6, 4);
        assert_eq!(c.constructed, 132);
        assert_eq!(c.headline, 141);
        assert!(!c.consistent());
        assert!(LiftCounts::new(3, 6, 1).consistent());
        assert!(LiftCounts::new(3, 9, 3).consistent());
    }

    #[test]
    fn lift_rejects_bad_input() {
        assert!(matches!(
            lift(&bravyi_smolin_3(), 0),
            Err(UmebError::InvalidArgument(_))
        ));
        let bad = UmebCandidate::new(
            2,
            vec![ComplexMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)])],
            Provenance::External("x".into()),
        )
        .unwrap();
        assert!(matches!(lift(&bad, 2), Err(UmebError::NotUnitary { index: 0, .. })));
    }

    #[test]
    fn provenance_round_trips_through_strings() {
        let nested = lift(&lift(&bravyi_smolin_3(), 2).unwrap(), 2).unwrap();
        let cases = [
            Provenance::WeylFamily(5),
            Provenance::BravyiSmolin3,
            Provenance::Umeb6,
            Provenance::External("some label".into()),
            nested.provenance().clone(),
        ];
        for p in cases {
            assert_eq!(p.to_string().parse::<Provenance>().unwrap(), p);
        }
        assert_eq!(
            nested.provenance().to_string(),
            "lift(q=2,d=6,n=30,base=lift(q=2,d=3,n=6,base=bravyi_smolin_3))"
        );
        assert!(matches!(
            "lift(q=x)".parse::<Provenance>(),
            Err(UmebError::MalformedProvenance(_))
        ));
        assert_eq!(
            "hand made".parse::<Provenance>().unwrap(),
            Provenance::External("hand made".into())
        );
    }

    #[test]
    fn candidate_rejects_mixed_dimensions() {
        let err = UmebCandidate::new(
            2,
            vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)],
            Provenance::BravyiSmolin3,
        )
        .unwrap_err();
        assert!(matches!(err, UmebError::DimensionMismatch { expected: 2, found: 3 }));
    }
}

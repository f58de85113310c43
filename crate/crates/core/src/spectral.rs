//! Spectral signatures of unitary sets.
//!
//! Simultaneous conjugation `U_a ↦ V U_a V†` and relabelling of elements
//! both leave the multiset of per-element spectra unchanged, so two sets
//! with different signatures cannot be equivalent. Each eigenphase is also
//! classified by the order of its eigenvalue. A finite order is found by
//! direct search; an infinite order is only ever claimed through an exact
//! rational cosine (Niven's theorem), never from floating point alone.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_rational::Rational64;
use serde::{Serialize, Serializer};

use crate::constructions::{Provenance, UmebCandidate};
use crate::error::{Result, UmebError};
use crate::linalg::{eigenvalues, unitarity_residual, ComplexMatrix, Tolerances};

/// Covers every finite order arising from the d = 12 lifts.
pub const DEFAULT_BOUND: u64 = 144;

/// Width of the buckets phases are rounded into before sorting.
const PHASE_BUCKET: f64 = 1e-9;

/// Reference maximal finite Weyl-sector order at d = 12. Computed values are
/// compared against it and differences reported, not asserted.
pub const REFERENCE_WEYL_SECTOR_MAX_ORDER: u64 = 12;

fn ser_rational<S: Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [*r.numer(), *r.denom()].serialize(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrderClassification {
    Finite(u64),
    NoOrderUpTo(u64),
    ProvablyInfinite(#[serde(serialize_with = "ser_rational")] Rational64),
}

impl OrderClassification {
    fn rank(&self) -> (u8, u64) {
        match self {
            OrderClassification::Finite(n) => (0, *n),
            OrderClassification::NoOrderUpTo(b) => (1, *b),
            OrderClassification::ProvablyInfinite(_) => (2, 0),
        }
    }
}

/// Wraps into `[0, 2π)`, sending values within `tol` of 2π to 0.
fn wrap_phase(phase: f64, tol: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    if TAU - p < tol {
        0.0
    } else {
        p
    }
}

fn circle_distance(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    p.min(TAU - p)
}

/// Ascending eigenphases in `[0, 2π)` of a unitary.
pub fn eigenphases(u: &ComplexMatrix, tol: &Tolerances) -> Result<Vec<f64>> {
    let residual = unitarity_residual(u);
    if !u.is_square() || residual >= tol.unitarity_tol {
        return Err(UmebError::NotUnitary { index: 0, residual });
    }
    let mut phases: Vec<f64> = eigenvalues(u)?
        .iter()
        .map(|z| wrap_phase(z.arg(), PHASE_BUCKET))
        .collect();
    phases.sort_by(f64::total_cmp);
    Ok(phases)
}

/// Smallest `n ≤ bound` with `n·phase ≡ 0 (mod 2π)` within `tol`.
pub fn order_up_to(phase: f64, bound: u64, tol: f64) -> OrderClassification {
    (1..=bound)
        .find(|&n| circle_distance(n as f64 * phase) < tol)
        .map_or(OrderClassification::NoOrderUpTo(bound), OrderClassification::Finite)
}

/// Rational-cosine criterion: if `cos θ` is rational and `cos²θ` is not one
/// of 0, 1/4, 1/2, 3/4, 1, then θ is not a rational multiple of π and
/// `e^{iθ}` (and `e^{iθ}ζ` for every root of unity ζ) has infinite order.
///
/// Returns `None` when the criterion does not apply. Values outside
/// `[-1, 1]` are not cosines and are never classified.
pub fn niven_classify(cos: Rational64) -> Option<OrderClassification> {
    let one = Rational64::from_integer(1);
    if cos > one || cos < -one {
        return None;
    }
    let sq = cos * cos;
    let exceptional = [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)].map(|(n, d)| Rational64::new(n, d));
    (!exceptional.contains(&sq)).then_some(OrderClassification::ProvablyInfinite(cos))
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementSpectrum {
    pub phases: Vec<f64>,
    pub orders: Vec<OrderClassification>,
}

impl ElementSpectrum {
    fn key(&self) -> Vec<i64> {
        self.phases.iter().map(|p| (p / PHASE_BUCKET).round() as i64).collect()
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key()).then_with(|| {
            let a: Vec<_> = self.orders.iter().map(OrderClassification::rank).collect();
            let b: Vec<_> = other.orders.iter().map(OrderClassification::rank).collect();
            a.cmp(&b)
        })
    }

    fn matches(&self, other: &Self, tol: f64) -> bool {
        self.phases.len() == other.phases.len()
            && self.orders == other.orders
            && self
                .phases
                .iter()
                .zip(&other.phases)
                .all(|(a, b)| circle_distance(a - b) < tol)
    }

    pub fn has_infinite(&self) -> bool {
        self.orders
            .iter()
            .any(|o| matches!(o, OrderClassification::ProvablyInfinite(_)))
    }

    pub fn has_undetermined(&self) -> bool {
        self.orders
            .iter()
            .any(|o| matches!(o, OrderClassification::NoOrderUpTo(_)))
    }

    fn finite_orders(&self) -> impl Iterator<Item = u64> + '_ {
        self.orders.iter().filter_map(|o| match o {
            OrderClassification::Finite(n) => Some(*n),
            _ => None,
        })
    }
}

/// Order range over a group of elements, in the shape of an order table
/// row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderSummary {
    pub element_count: usize,
    pub min_finite_order: Option<u64>,
    pub max_finite_order: Option<u64>,
    /// Elements carrying at least one provably infinite-order eigenvalue.
    pub infinite_elements: usize,
    /// Elements carrying a phase with no order found up to the bound.
    pub undetermined_elements: usize,
}

impl OrderSummary {
    fn of<'a>(records: impl IntoIterator<Item = &'a ElementSpectrum>) -> Self {
        let mut s = OrderSummary {
            element_count: 0,
            min_finite_order: None,
            max_finite_order: None,
            infinite_elements: 0,
            undetermined_elements: 0,
        };
        for r in records {
            s.element_count += 1;
            s.infinite_elements += r.has_infinite() as usize;
            s.undetermined_elements += r.has_undetermined() as usize;
            for n in r.finite_orders() {
                s.min_finite_order = Some(s.min_finite_order.map_or(n, |m| m.min(n)));
                s.max_finite_order = Some(s.max_finite_order.map_or(n, |m| m.max(n)));
            }
        }
        s
    }

    /// Largest order with infinity taking precedence, as `O_max` is shown
    /// in the table.
    pub fn max_order_label(&self) -> String {
        if self.infinite_elements > 0 {
            "inf".into()
        } else if self.undetermined_elements > 0 {
            "?".into()
        } else {
            self.max_finite_order.map_or("-".into(), |n| n.to_string())
        }
    }

    pub fn min_order_label(&self) -> String {
        self.min_finite_order.map_or_else(
            || {
                if self.infinite_elements > 0 {
                    "inf".into()
                } else {
                    "-".into()
                }
            },
            |n| n.to_string(),
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorSummary {
    pub sector: String,
    #[serde(flatten)]
    pub summary: OrderSummary,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralSignature {
    pub dim: usize,
    pub bound: u64,
    /// Canonically sorted per-element spectra.
    pub records: Vec<ElementSpectrum>,
    pub summary: OrderSummary,
    /// Weyl/base split of a lift, taken from its canonical element order.
    pub sectors: Vec<SectorSummary>,
    pub notes: Vec<String>,
}

impl SpectralSignature {
    /// Multiset equality of the records, phases compared within `tol`.
    pub fn same_spectra(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim
            && self.records.len() == other.records.len()
            && self.records.iter().zip(&other.records).all(|(a, b)| a.matches(b, tol))
    }

    pub fn sector(&self, name: &str) -> Option<&OrderSummary> {
        self.sectors.iter().find(|s| s.sector == name).map(|s| &s.summary)
    }

    /// Aligned text table with one row per sector (or one overall row).
    pub fn table(&self) -> String {
        let mut rows: Vec<(&str, &OrderSummary)> =
            self.sectors.iter().map(|s| (s.sector.as_str(), &s.summary)).collect();
        if rows.is_empty() {
            rows.push(("all", &self.summary));
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:>8} {:>6} {:>6} {:>9} {:>12}",
            "sector", "elements", "O_min", "O_max", "infinite", "undetermined"
        );
        for (name, s) in rows {
            let _ = writeln!(
                out,
                "{:<8} {:>8} {:>6} {:>6} {:>9} {:>12}",
                name,
                s.element_count,
                s.min_order_label(),
                s.max_order_label(),
                s.infinite_elements,
                s.undetermined_elements
            );
        }
        out
    }
}

fn classify_phase(phase: f64, bound: u64, tol: f64, theta: Option<(f64, Rational64)>) -> OrderClassification {
    let direct = order_up_to(phase, bound, tol);
    if let (OrderClassification::NoOrderUpTo(_), Some((theta, cos))) = (direct, theta) {
        // phase = ±θ + (rational)·2π: e^{i·phase} is e^{±iθ} times a root of unity.
        let shifted = [phase - theta, phase + theta]
            .iter()
            .any(|p| matches!(order_up_to(*p, bound, tol), OrderClassification::Finite(_)));
        if shifted {
            return OrderClassification::ProvablyInfinite(cos);
        }
    }
    direct
}

/// Spectral signature of `c`, orders searched up to `bound`.
///
/// When the candidate carries an exact `cos θ` that passes
/// [`niven_classify`], phases that differ from ±θ by a finite-order phase
/// are classified `ProvablyInfinite`.
pub fn signature(c: &UmebCandidate, bound: u64, tol: &Tolerances) -> Result<SpectralSignature> {
    if bound == 0 {
        return Err(UmebError::InvalidArgument("order bound must be positive".into()));
    }
    let theta = c
        .exact_cos_theta()
        .and_then(|cos| niven_classify(cos).map(|_| cos))
        .map(|cos| ((*cos.numer() as f64 / *cos.denom() as f64).acos(), cos));
    let mut records: Vec<(usize, ElementSpectrum)> = Vec::with_capacity(c.len());
    for (index, u) in c.elements().iter().enumerate() {
        let phases = eigenphases(u, tol).map_err(|e| match e {
            UmebError::NotUnitary { residual, .. } => UmebError::NotUnitary { index, residual },
            other => other,
        })?;
        let orders = phases
            .iter()
            .map(|&p| classify_phase(p, bound, tol.phase_tol, theta))
            .collect();
        records.push((index, ElementSpectrum { phases, orders }));
    }

    let mut sectors = Vec::new();
    let mut notes = Vec::new();
    if let Some((q, d)) = lift_layout(c) {
        let weyl_len = q * (q - 1) * d * d;
        let weyl = OrderSummary::of(records.iter().filter(|(i, _)| *i < weyl_len).map(|(_, r)| r));
        let base = OrderSummary::of(records.iter().filter(|(i, _)| *i >= weyl_len).map(|(_, r)| r));
        if c.dim() == 12 && weyl.element_count > 0 {
            if let Some(max) = weyl.max_finite_order {
                if max != REFERENCE_WEYL_SECTOR_MAX_ORDER {
                    notes.push(format!(
                        "Weyl-sector maximal order computed as {max}, reference value is {REFERENCE_WEYL_SECTOR_MAX_ORDER}"
                    ));
                }
            }
        }
        sectors.push(SectorSummary {
            sector: "weyl".into(),
            summary: weyl,
        });
        sectors.push(SectorSummary {
            sector: "base".into(),
            summary: base,
        });
    }

    let mut records: Vec<ElementSpectrum> = records.into_iter().map(|(_, r)| r).collect();
    records.sort_by(ElementSpectrum::canonical_cmp);
    let summary = OrderSummary::of(&records);
    Ok(SpectralSignature {
        dim: c.dim(),
        bound,
        records,
        summary,
        sectors,
        notes,
    })
}

fn lift_layout(c: &UmebCandidate) -> Option<(usize, usize)> {
    match c.provenance() {
        Provenance::Lift {
            q,
            base_dim,
            base_count,
            ..
        } if c.dim() == q * base_dim && c.len() == q * q.saturating_sub(1) * base_dim * base_dim + q * base_count => {
            Some((*q, *base_dim))
        }
        Provenance::Umeb6 if c.dim() == 6 && c.len() == 30 => Some((2, 3)),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Distinction {
    Distinguished,
    NotDistinguished,
}

/// Sound but incomplete test: `Distinguished` proves inequivalence;
/// `NotDistinguished` proves nothing.
pub fn compare_signatures(a: &SpectralSignature, b: &SpectralSignature, tol: &Tolerances) -> Distinction {
    if a.same_spectra(b, tol.phase_tol) {
        Distinction::NotDistinguished
    } else {
        Distinction::Distinguished
    }
}

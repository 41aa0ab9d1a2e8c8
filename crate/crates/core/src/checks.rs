//! Verifiers: long exact sequences, visibility witnesses, the content and
//! detector checks, per-channel bridge verdicts, and Euler additivity.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cxcore::{
    cone, homotopy_classes, induced_with, is_null_homotopic, BoundedComplex, ChainMap,
    ComplexError, Degree, DegreeHomology, Triangle,
};
use crate::homcx::{hom_complex, hom_nonzero, poincare, precompose, LaurentPoly};
use crate::mtt::{ChannelError, MTTDatum};
use crate::ratlin::RatMatrix;
use crate::transport::{transport_triangle, TransportError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Which Hom space of the sequence a position refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LesSlot {
    /// `H^m Hom(A X'', Y)`
    Third,
    /// `H^m Hom(A X, Y)`
    Second,
    /// `H^m Hom(A X', Y)`
    First,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LesSpace {
    pub degree: Degree,
    pub slot: LesSlot,
    pub dim: usize,
}

/// The long exact sequence obtained by applying `Hom(−, Y)` to the image of a
/// triangle under a channel kernel:
/// `… → H^m(X'') → H^m(X) → H^m(X') → H^{m+1}(X'') → …`.
#[derive(Clone, Debug)]
pub struct LESRecord {
    pub channel: (usize, usize),
    pub triangle: Triangle,
    pub transported: Triangle,
    pub target: BoundedComplex,
    pub spaces: Vec<LesSpace>,
    /// `maps[k] : spaces[k] → spaces[k + 1]`.
    pub maps: Vec<RatMatrix>,
    pub exact_at: Vec<bool>,
}

impl LESRecord {
    pub fn is_exact(&self) -> bool {
        self.exact_at.iter().all(|&b| b)
    }

    pub fn first_inexact(&self) -> Option<LesSpace> {
        self.exact_at
            .iter()
            .position(|&b| !b)
            .map(|k| self.spaces[k])
    }
}

fn shift_keys(h: &BTreeMap<Degree, DegreeHomology>, k: Degree) -> BTreeMap<Degree, DegreeHomology> {
    h.iter().map(|(&n, d)| (n + k, d.clone())).collect()
}

/// Transports `t` through `A_ij`, applies `Hom(−, y)` and checks exactness
/// at every position of the resulting cohomology sequence.
pub fn build_and_verify_les(
    d: &MTTDatum,
    i: usize,
    j: usize,
    t: &Triangle,
    y: &BoundedComplex,
) -> Result<LESRecord, CheckError> {
    t.check()?;
    let a = d.channel_kernel(i, j)?;
    let (image, _) = transport_triangle(&a, t)?;
    les_for_triangle(&image, y).map(|(spaces, maps, exact_at)| LESRecord {
        channel: (i, j),
        triangle: t.clone(),
        transported: image,
        target: y.clone(),
        spaces,
        maps,
        exact_at,
    })
}

type LesParts = (Vec<LesSpace>, Vec<RatMatrix>, Vec<bool>);

/// The cohomology sequence of `Hom(−, y)` applied to a distinguished triangle.
pub fn les_for_triangle(t: &Triangle, y: &BoundedComplex) -> Result<LesParts, CheckError> {
    let h_first = hom_complex(&t.first, y);
    let h_second = hom_complex(&t.second, y);
    let h_third = hom_complex(&t.third, y);
    let b_first = h_first.homology();
    let b_second = h_second.homology();
    let b_third = h_third.homology();

    let b_star = precompose(&t.map_b, y);
    let a_star = precompose(&t.map_a, y);
    let c_star = precompose(&t.map_c, y);
    // Hom(X'[1], Y)^{m+1} is Hom(X', Y)^m with the same differential.
    debug_assert_eq!(
        c_star.source().dims(),
        &h_first.dims().iter().map(|(&n, &v)| (n + 1, v)).collect()
    );
    let ind_b = induced_with(&b_third, &b_second, &b_star);
    let ind_a = induced_with(&b_second, &b_first, &a_star);
    let ind_c = induced_with(&shift_keys(&b_first, 1), &b_third, &c_star);

    let dim_of = |b: &BTreeMap<Degree, DegreeHomology>, m: Degree| b.get(&m).map_or(0, DegreeHomology::dim);
    let support: Vec<Degree> = [&b_first, &b_second, &b_third]
        .iter()
        .flat_map(|b| b.iter().filter(|(_, h)| h.dim() > 0).map(|(&n, _)| n))
        .collect();
    let (Some(&lo), Some(&hi)) = (support.iter().min(), support.iter().max()) else {
        return Ok((Vec::new(), Vec::new(), Vec::new()));
    };
    let mut spaces = Vec::new();
    let mut maps = Vec::new();
    let pick = |ind: &BTreeMap<Degree, RatMatrix>, m: Degree, rows: usize, cols: usize| {
        ind.get(&m).cloned().unwrap_or_else(|| RatMatrix::zeros(rows, cols))
    };
    for m in lo - 1..=hi + 1 {
        let (d3, d2, d1) = (dim_of(&b_third, m), dim_of(&b_second, m), dim_of(&b_first, m));
        spaces.push(LesSpace { degree: m, slot: LesSlot::Third, dim: d3 });
        spaces.push(LesSpace { degree: m, slot: LesSlot::Second, dim: d2 });
        spaces.push(LesSpace { degree: m, slot: LesSlot::First, dim: d1 });
        maps.push(pick(&ind_b, m, d2, d3));
        maps.push(pick(&ind_a, m, d1, d2));
        if m < hi + 1 {
            maps.push(pick(&ind_c, m + 1, dim_of(&b_third, m + 1), d1));
        }
    }
    let exact_at = (0..spaces.len())
        .map(|k| {
            let dim = spaces[k].dim;
            let incoming = k.checked_sub(1).map(|p| &maps[p]);
            let outgoing = maps.get(k);
            let rin = incoming.map_or(0, RatMatrix::rank);
            let rout = outgoing.map_or(0, RatMatrix::rank);
            let composite_zero = match (incoming, outgoing) {
                (Some(a), Some(b)) => b.matmul(a).map(|c| c.is_zero()).unwrap_or(false),
                _ => true,
            };
            composite_zero && rin + rout == dim
        })
        .collect();
    Ok((spaces, maps, exact_at))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VisibilityKind {
    Right,
    Left,
}

/// Evidence that a map is nonzero in the homotopy category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonzeroCertificate {
    /// Dimension of the space of homotopy classes the map was drawn from.
    pub classes_dim: usize,
    /// The map is not of the form `dh + hd`.
    pub not_null_homotopic: bool,
}

#[derive(Clone, Debug)]
pub struct VisibilityWitness {
    pub kind: VisibilityKind,
    pub object: BoundedComplex,
    pub probe: BoundedComplex,
    /// `u : X → L` (right) or `v : L → X` (left).
    pub map: ChainMap,
    /// `B = cone(u)[−1]` (right) or `C = cone(v)` (left).
    pub complement: BoundedComplex,
    /// The cone triangle of `map`.
    pub triangle: Triangle,
    pub certificate: NonzeroCertificate,
}

impl VisibilityWitness {
    pub fn verify(&self) -> bool {
        self.triangle.check().is_ok()
            && self.triangle.map_a == self.map
            && self.certificate.not_null_homotopic
            && !is_null_homotopic(&self.map)
    }
}

fn nonzero_class(source: &BoundedComplex, target: &BoundedComplex) -> Option<(ChainMap, usize)> {
    if source == target {
        let id = ChainMap::identity(source);
        if !source.is_acyclic() {
            return Some((id, homotopy_classes(source, target).dimension));
        }
        return None;
    }
    let classes = homotopy_classes(source, target);
    let rep = classes.representatives.into_iter().next()?;
    Some((rep, classes.dimension))
}

fn witness(
    kind: VisibilityKind,
    object: &BoundedComplex,
    probe: &BoundedComplex,
    map: ChainMap,
    classes_dim: usize,
) -> VisibilityWitness {
    let (c, triangle) = cone(&map);
    let complement = match kind {
        VisibilityKind::Right => c.shift(-1),
        VisibilityKind::Left => c,
    };
    VisibilityWitness {
        kind,
        object: object.clone(),
        probe: probe.clone(),
        certificate: NonzeroCertificate {
            classes_dim,
            not_null_homotopic: !is_null_homotopic(&map),
        },
        map,
        complement,
        triangle,
    }
}

/// A map `u : X → L` that is nonzero up to homotopy, if one exists.
pub fn find_right_visibility(x: &BoundedComplex, l: &BoundedComplex) -> Option<VisibilityWitness> {
    let (u, dim) = nonzero_class(x, l)?;
    Some(witness(VisibilityKind::Right, x, l, u, dim))
}

/// A map `v : L → X` that is nonzero up to homotopy, if one exists.
pub fn find_left_visibility(l: &BoundedComplex, x: &BoundedComplex) -> Option<VisibilityWitness> {
    let (v, dim) = nonzero_class(l, x)?;
    Some(witness(VisibilityKind::Left, x, l, v, dim))
}

/// Right-visibility search against each shifted probe `L[k]`; a witness
/// against `L[k]` certifies degree `k` of `Hom(X, L)`.
pub fn find_right_visibility_shifted(
    x: &BoundedComplex,
    l: &BoundedComplex,
    shifts: &[Degree],
) -> Vec<(Degree, VisibilityWitness)> {
    shifts
        .iter()
        .filter_map(|&k| find_right_visibility(x, &l.shift(k)).map(|w| (k, w)))
        .collect()
}

/// `([Hom(Sh A_ij L_i, Q_j) ≠ 0], [Hom(Q_j, Sh A_ij L_i) ≠ 0])`.
pub fn content_check(d: &MTTDatum, i: usize, j: usize) -> Result<(bool, bool), ChannelError> {
    let s = d.shadow_image(i, j)?;
    let q = &d.shadow_objects[j];
    Ok((hom_nonzero(&s, q), hom_nonzero(q, &s)))
}

/// The detector condition at the transported probe: `Hom(A_ij L_i, L_j) ≠ 0`.
pub fn detector_check(d: &MTTDatum, i: usize, j: usize) -> Result<bool, ChannelError> {
    let a = d.transported_probe(i, j)?;
    Ok(hom_nonzero(&a, &d.probes[j]))
}

/// Verdict for one ordered channel; `i` and `j` are 1-based node positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub i: usize,
    pub j: usize,
    pub supported: bool,
    pub content_left_nonzero: bool,
    pub content_right_nonzero: bool,
    pub detector_holds_at_probe: bool,
    pub h_nonzero: bool,
    pub p: LaurentPoly,
    pub w_tot: i64,
    pub w_chi: i64,
    pub bridge_consistent: bool,
}

impl ChannelReport {
    pub fn content_holds(&self) -> bool {
        self.content_left_nonzero || self.content_right_nonzero
    }
}

pub fn channel_report(d: &MTTDatum, i: usize, j: usize) -> Result<ChannelReport, ChannelError> {
    let p = d.interaction_polynomial(i, j)?;
    let (cl, cr) = content_check(d, i, j)?;
    let detector = detector_check(d, i, j)?;
    let supported = d.support[i][j];
    let h_nonzero = !p.is_zero();
    let hypotheses = (cl || cr) && detector;
    Ok(ChannelReport {
        i: i + 1,
        j: j + 1,
        supported,
        content_left_nonzero: cl,
        content_right_nonzero: cr,
        detector_holds_at_probe: detector,
        h_nonzero,
        w_tot: p.w_tot(),
        w_chi: p.w_chi(),
        p,
        bridge_consistent: !supported || !hypotheses || h_nonzero,
    })
}

/// Reports for all ordered channels, in `(i, j)` order.
pub fn bridge_verdict(d: &MTTDatum) -> Vec<ChannelReport> {
    let r = d.node_count();
    (0..r * r)
        .into_par_iter()
        .map(|k| channel_report(d, k / r, k % r).expect("indices are in range"))
        .collect()
}

/// `χ Hom(A X, Y) = χ Hom(A X', Y) + χ Hom(A X'', Y)` for the image of `t`.
pub fn euler_additivity_check(
    d: &MTTDatum,
    i: usize,
    j: usize,
    t: &Triangle,
    y: &BoundedComplex,
) -> Result<bool, CheckError> {
    t.check()?;
    let a = d.channel_kernel(i, j)?;
    let chi = |x: &BoundedComplex| poincare(&a.apply_complex(x), y).w_chi();
    Ok(chi(&t.second) == chi(&t.first) + chi(&t.third))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mtt::DatumParts;
    use crate::ratlin::Rational;

    fn unit() -> BoundedComplex {
        BoundedComplex::concentrated(0, 1)
    }

    fn datum(r: usize) -> MTTDatum {
        DatumParts {
            nodes: (1..=r).map(|k| format!("p{k}")).collect(),
            phi: vec![unit(); r],
            psi: vec![unit(); r],
            probes: vec![unit(); r],
            shadow_kernels: vec![unit(); r],
            shadow_objects: vec![unit(); r],
            support: vec![vec![true; r]; r],
            c_sigma: vec![Rational::one(); r],
        }
        .build()
        .unwrap()
    }

    fn sample() -> BoundedComplex {
        BoundedComplex::new(
            BTreeMap::from([(0, 1), (1, 2)]),
            BTreeMap::from([(0, RatMatrix::from_i64(&[&[1], &[1]]))]),
        )
        .unwrap()
    }

    #[test]
    fn les_identity_and_split() {
        let d = datum(2);
        let x = sample();
        let y = BoundedComplex::graded(BTreeMap::from([(0, 1), (1, 1)]));
        let t = Triangle::from_cone(&ChainMap::identity(&x));
        let rec = build_and_verify_les(&d, 0, 1, &t, &y).unwrap();
        assert!(rec.is_exact());
        let t = Triangle::from_cone(&ChainMap::zero(&x, &y));
        let rec = build_and_verify_les(&d, 1, 0, &t, &x).unwrap();
        assert!(rec.is_exact(), "{:?}", rec.first_inexact());
        assert!(rec.spaces.iter().any(|s| s.dim > 0));
    }

    #[test]
    fn visibility_examples() {
        let x = sample();
        let w = find_right_visibility(&x, &x).unwrap();
        assert_eq!(w.map, ChainMap::identity(&x));
        assert!(w.verify());
        let (c, _) = cone(&ChainMap::identity(&x));
        assert!(find_right_visibility(&c, &x).is_none());
        let l = BoundedComplex::concentrated(1, 1);
        let w = find_right_visibility(&x, &l).unwrap();
        assert!(w.verify());
        assert!(!poincare(&x, &l).is_zero());
        assert_eq!(w.complement, cone(&w.map).0.shift(-1));
        assert!(find_left_visibility(&l, &c).is_none());
        let w = find_left_visibility(&l, &x).unwrap();
        assert_eq!(w.kind, VisibilityKind::Left);
        assert!(w.verify());
        let found = find_right_visibility_shifted(&x, &unit(), &[-1, 0, 1]);
        assert_eq!(found.iter().map(|(k, _)| *k).collect::<Vec<_>>(), vec![-1]);
    }

    #[test]
    fn bridge_on_unit_datum() {
        let d = datum(2);
        let reports = bridge_verdict(&d);
        assert_eq!(reports.len(), 4);
        for r in &reports {
            assert!(r.bridge_consistent && r.h_nonzero && r.content_holds());
            assert_eq!(r.p, LaurentPoly::one());
        }
        assert_eq!((reports[1].i, reports[1].j), (1, 2));
    }

    #[test]
    fn acyclic_channel_is_vacuous() {
        let mut p = DatumParts {
            nodes: vec!["p1".into(), "p2".into()],
            phi: vec![unit(); 2],
            psi: vec![unit(); 2],
            probes: vec![unit(); 2],
            shadow_kernels: vec![unit(); 2],
            shadow_objects: vec![unit(); 2],
            support: vec![vec![true; 2]; 2],
            c_sigma: vec![Rational::one(); 2],
        };
        let id = BoundedComplex::new(
            BTreeMap::from([(0, 1), (1, 1)]),
            BTreeMap::from([(0, RatMatrix::identity(1))]),
        )
        .unwrap();
        p.phi[0] = id;
        let d = p.build().unwrap();
        let r = channel_report(&d, 0, 1).unwrap();
        assert!(r.supported && !r.h_nonzero && !r.detector_holds_at_probe);
        assert_eq!((r.content_left_nonzero, r.content_right_nonzero), (false, false));
        assert!(r.bridge_consistent);
        assert_eq!(content_check(&d, 1, 1).unwrap(), (true, true));
    }

    #[test]
    fn euler_examples() {
        let d = datum(1);
        let x = sample();
        let y = unit();
        let t = Triangle::from_cone(&ChainMap::identity(&x));
        assert!(euler_additivity_check(&d, 0, 0, &t, &y).unwrap());
        let t = Triangle::from_cone(&ChainMap::zero(&x, &y));
        assert!(euler_additivity_check(&d, 0, 0, &t, &x).unwrap());
    }
}

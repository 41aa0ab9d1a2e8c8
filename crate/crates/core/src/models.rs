//! Toy models, seeded random instances, and the semisimple oracle.
//!
//! Every generator runs the pipeline on what it built and fails if the
//! advertised interaction polynomials do not come out.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cxcore::{
    chain_map_basis, BoundedComplex, ChainMap, Degree, Triangle,
};
use crate::homcx::LaurentPoly;
use crate::mtt::{ChannelError, DatumError, DatumParts, MTTDatum};
use crate::ratlin::{RatMatrix, Rational};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("generator post-condition failed: {0}")]
    PostCondition(String),
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

pub const DEMO_NAMES: [&str; 7] = [
    "single-degree",
    "two-degree",
    "directedness",
    "obstruction",
    "visibility-right",
    "visibility-left",
    "bridge",
];

/// Caps and seed for random instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub seed: u64,
    /// Largest dimension of any probe or shadow object in one degree.
    pub max_dim: usize,
    pub degree_lo: Degree,
    pub degree_hi: Degree,
    pub nodes: usize,
    /// Caps for transport kernels, kept small since kernels multiply sizes.
    pub kernel_max_dim: usize,
    pub kernel_lo: Degree,
    pub kernel_hi: Degree,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            name: "random".into(),
            seed: 0,
            max_dim: 3,
            degree_lo: -2,
            degree_hi: 2,
            nodes: 2,
            kernel_max_dim: 2,
            kernel_lo: -1,
            kernel_hi: 1,
        }
    }
}

impl GeneratorSpec {
    pub fn with_seed(&self, seed: u64) -> Self {
        GeneratorSpec {
            seed,
            ..self.clone()
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Independent seed for trial `t` of a run started from `seed`.
pub fn trial_seed(seed: u64, t: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(t.wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .rotate_left(17)
        ^ t
}

fn unit() -> BoundedComplex {
    BoundedComplex::concentrated(0, 1)
}

fn graded(pairs: &[(Degree, usize)]) -> BoundedComplex {
    BoundedComplex::graded(pairs.iter().copied().collect())
}

/// `ℚ --id--> ℚ` in degrees `lo, lo+1`.
fn contractible(lo: Degree) -> BoundedComplex {
    BoundedComplex::new(
        BTreeMap::from([(lo, 1), (lo + 1, 1)]),
        BTreeMap::from([(lo, RatMatrix::identity(1))]),
    )
    .expect("identity two-term complex")
}

fn node_names(r: usize) -> Vec<String> {
    (1..=r).map(|k| format!("p{k}")).collect()
}

/// Two or more nodes with unit kernels, shadow objects equal to the probes,
/// and full support.
fn unit_parts(probes: Vec<BoundedComplex>) -> DatumParts {
    let r = probes.len();
    DatumParts {
        nodes: node_names(r),
        phi: vec![unit(); r],
        psi: vec![unit(); r],
        shadow_kernels: vec![unit(); r],
        shadow_objects: probes.clone(),
        probes,
        support: vec![vec![true; r]; r],
        c_sigma: (1..=r as i64).map(Rational::from).collect(),
    }
}

fn expect_poly(
    d: &MTTDatum,
    i: usize,
    j: usize,
    expected: &LaurentPoly,
) -> Result<(), ModelError> {
    let got = d.interaction_polynomial(i, j)?;
    if &got != expected {
        return Err(ModelError::PostCondition(format!(
            "P_{}{} = {got}, expected {expected}",
            i + 1,
            j + 1
        )));
    }
    Ok(())
}

/// `L_1 = ℚ^d` in degree 0 and `L_2 = ℚ` in degree `m0`, so that
/// `P_12 = d·q^{m0}`.
pub fn gen_single_degree(d: usize, m0: Degree) -> Result<MTTDatum, ModelError> {
    if d == 0 {
        return Err(ModelError::Parameter("d must be at least 1".into()));
    }
    let datum = unit_parts(vec![graded(&[(0, d)]), graded(&[(m0, 1)])]).build()?;
    expect_poly(&datum, 0, 1, &LaurentPoly::monomial(d as i64, m0))?;
    Ok(datum)
}

/// `L_1 = ℚ` in degree 0 and `L_2 = ℚ^a[−m] ⊕ ℚ^b[−m−1]`, so that
/// `P_12 = a·q^m + b·q^{m+1}`.
pub fn gen_two_degree(a: usize, b: usize, m: Degree) -> Result<MTTDatum, ModelError> {
    if a + b == 0 {
        return Err(ModelError::Parameter("a + b must be at least 1".into()));
    }
    let datum = unit_parts(vec![unit(), graded(&[(m, a), (m + 1, b)])]).build()?;
    let expected = LaurentPoly::from_coeffs([(m, a as i64), (m + 1, b as i64)]);
    expect_poly(&datum, 0, 1, &expected)?;
    Ok(datum)
}

/// `Ψ_1 = ℚ[−1]` and all other kernels unit: `P_12 = 1`, `P_21 = q^{−1}`.
/// With `swapped`, the shift sits on `Ψ_2` instead and the entries trade places.
pub fn gen_directedness(swapped: bool) -> Result<MTTDatum, ModelError> {
    let mut parts = unit_parts(vec![unit(), unit()]);
    let k = if swapped { 1 } else { 0 };
    parts.psi[k] = graded(&[(1, 1)]);
    let datum = parts.build()?;
    let (p12, p21) = (LaurentPoly::one(), LaurentPoly::monomial(1, -1));
    let (p12, p21) = if swapped { (p21, p12) } else { (p12, p21) };
    expect_poly(&datum, 0, 1, &p12)?;
    expect_poly(&datum, 1, 0, &p21)?;
    if p12 == p21 || p12.is_zero() || p21.is_zero() {
        return Err(ModelError::PostCondition("entries are not directed".into()));
    }
    Ok(datum)
}

pub fn gen_directedness_witness() -> Result<MTTDatum, ModelError> {
    gen_directedness(false)
}

/// Two data with the same probes, shadow data and state but different bulk
/// kernels: the first has unit kernels, the second `Φ_1 = ℚ[−1]`,
/// `Ψ_1 = ℚ[1]`. Diagonal channels agree while `P_12` differs.
pub fn gen_obstruction_demo() -> Result<(MTTDatum, MTTDatum), ModelError> {
    // Node 2 emits nothing, so only the channel (1, 2) sees the change in Ψ_2.
    let mut parts = unit_parts(vec![unit(), unit()]);
    parts.phi[1] = contractible(0);
    parts.support[1] = vec![false, false];
    let first = parts.clone().build()?;
    parts.psi[1] = graded(&[(1, 1)]);
    let second = parts.build()?;
    for (i, j) in [(0, 0), (1, 0), (1, 1)] {
        let a = first.interaction_polynomial(i, j)?;
        let b = second.interaction_polynomial(i, j)?;
        if a != b {
            return Err(ModelError::PostCondition(format!(
                "entry ({}, {}) differs: {a} vs {b}",
                i + 1,
                j + 1
            )));
        }
    }
    let (a, b) = (
        first.interaction_polynomial(0, 1)?,
        second.interaction_polynomial(0, 1)?,
    );
    if a == b {
        return Err(ModelError::PostCondition(format!("P_12 agrees: {a}")));
    }
    if first.probes != second.probes
        || first.shadow_objects != second.shadow_objects
        || first.shadow_kernels != second.shadow_kernels
        || first.state != second.state
    {
        return Err(ModelError::PostCondition("nodewise data differ".into()));
    }
    Ok((first, second))
}

/// A channel whose transported probe has a degree-0 map to the target probe
/// that is nonzero up to homotopy.
pub fn gen_visibility_right() -> Result<MTTDatum, ModelError> {
    let l1 = BoundedComplex::new(
        BTreeMap::from([(0, 1), (1, 2)]),
        BTreeMap::from([(0, RatMatrix::from_i64(&[&[1], &[1]]))]),
    )
    .expect("valid two-term complex");
    let mut parts = unit_parts(vec![l1, graded(&[(1, 1)])]);
    parts.psi[1] = graded(&[(-1, 1), (0, 1)]);
    let datum = parts.build()?;
    let p = datum.interaction_polynomial(0, 1)?;
    if p.coeff(0) == 0 {
        return Err(ModelError::PostCondition(format!("P_12 = {p} has no q^0 term")));
    }
    Ok(datum)
}

/// A channel where the target probe maps nontrivially into the transported
/// probe; the right-variance polynomial is reported alongside.
pub fn gen_visibility_left() -> Result<MTTDatum, ModelError> {
    let l2 = graded(&[(-1, 1)]).direct_sum(&contractible(0));
    let mut parts = unit_parts(vec![unit(), l2]);
    parts.phi[0] = graded(&[(-1, 1)]);
    parts.shadow_objects[1] = graded(&[(-1, 1)]);
    let datum = parts.build()?;
    let x = datum.transported_probe(0, 1)?;
    if crate::homcx::poincare(&datum.probes[1], &x).coeff(0) == 0 {
        return Err(ModelError::PostCondition("no degree-0 left map".into()));
    }
    Ok(datum)
}

/// Three nodes with varied kernels and shadow objects that are only
/// quasi-isomorphic to the shadow images. Node 3 has an acyclic `Φ_3`, so its
/// row of channels vanishes and is marked unsupported.
pub fn gen_bridge() -> Result<MTTDatum, ModelError> {
    let probes = vec![
        unit(),
        graded(&[(0, 1), (1, 1)]).direct_sum(&contractible(1)),
        graded(&[(1, 1)]),
    ];
    let shadow_kernels = vec![unit(), graded(&[(-1, 1)]), unit().direct_sum(&contractible(-1))];
    let shadow_objects = probes
        .iter()
        .zip(&shadow_kernels)
        .map(|(l, s)| {
            crate::cxcore::tensor_total(s, l)
                .homology_complex()
                .direct_sum(&contractible(0))
        })
        .collect();
    let datum = DatumParts {
        nodes: node_names(3),
        phi: vec![unit(), graded(&[(-1, 1)]), contractible(0)],
        psi: vec![unit(), graded(&[(0, 1), (1, 1)]), unit()],
        probes,
        shadow_kernels,
        shadow_objects,
        support: vec![
            vec![true, true, false],
            vec![true, true, true],
            vec![false, false, false],
        ],
        c_sigma: vec![Rational::new(1, 2), Rational::from(1), Rational::new(-3, 4)],
    }
    .build()?;
    for report in crate::checks::bridge_verdict(&datum) {
        let hypotheses = report.content_holds() && report.detector_holds_at_probe;
        if report.supported && !(hypotheses && report.h_nonzero) {
            return Err(ModelError::PostCondition(format!(
                "supported channel ({}, {}) fails its checks",
                report.i, report.j
            )));
        }
        if report.i == 3 && report.h_nonzero {
            return Err(ModelError::PostCondition("row 3 should vanish".into()));
        }
    }
    Ok(datum)
}

/// Parameters of the parameterized demos.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemoParams {
    pub d: usize,
    pub m0: Degree,
    pub a: usize,
    pub b: usize,
    pub m: Degree,
}

impl Default for DemoParams {
    fn default() -> Self {
        DemoParams {
            d: 3,
            m0: 2,
            a: 1,
            b: 2,
            m: -1,
        }
    }
}

/// Generates the named demo; only the obstruction demo yields two data.
pub fn demo(name: &str, params: &DemoParams) -> Result<Vec<MTTDatum>, ModelError> {
    Ok(match name {
        "single-degree" => vec![gen_single_degree(params.d, params.m0)?],
        "two-degree" => vec![gen_two_degree(params.a, params.b, params.m)?],
        "directedness" => vec![gen_directedness_witness()?],
        "obstruction" => {
            let (a, b) = gen_obstruction_demo()?;
            vec![a, b]
        }
        "visibility-right" => vec![gen_visibility_right()?],
        "visibility-left" => vec![gen_visibility_left()?],
        "bridge" => vec![gen_bridge()?],
        other => {
            return Err(ModelError::Parameter(format!(
                "unknown demo {other:?}; expected one of {}",
                DEMO_NAMES.join(", ")
            )))
        }
    })
}

/// Unit lower times unit upper times a permutation, with small entries.
fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> RatMatrix {
    let mut lower = RatMatrix::identity(n);
    let mut upper = RatMatrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            lower.set(i, j, Rational::from(rng.gen_range(-1i64..=1)));
            upper.set(j, i, Rational::from(rng.gen_range(-1i64..=1)));
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut p = RatMatrix::zeros(n, n);
    for (i, &k) in perm.iter().enumerate() {
        p.set(i, k, Rational::one());
    }
    lower
        .matmul(&upper)
        .and_then(|m| m.matmul(&p))
        .expect("square factors")
}

/// Standard form with the given homology and boundary ranks, conjugated by
/// random unimodular changes of basis. `ranks[n]` is the rank of `d^n`.
fn conjugated_standard_form(
    rng: &mut ChaCha8Rng,
    homology: &BTreeMap<Degree, usize>,
    ranks: &BTreeMap<Degree, usize>,
) -> BoundedComplex {
    let h = |n: Degree| homology.get(&n).copied().unwrap_or(0);
    let b = |n: Degree| ranks.get(&n).copied().unwrap_or(0);
    let degrees: std::collections::BTreeSet<Degree> = homology
        .keys()
        .copied()
        .chain(ranks.keys().copied())
        .chain(ranks.keys().map(|n| n + 1))
        .collect();
    // basis of degree n: [targets of d^{n-1} | homology | sources of d^n]
    let dim = |n: Degree| b(n - 1) + h(n) + b(n);
    let dims: BTreeMap<Degree, usize> = degrees.iter().map(|&n| (n, dim(n))).collect();
    let change: BTreeMap<Degree, RatMatrix> = dims
        .iter()
        .map(|(&n, &k)| (n, random_unimodular(rng, k)))
        .collect();
    let mut diffs = BTreeMap::new();
    for &n in &degrees {
        if b(n) == 0 {
            continue;
        }
        let mut d = RatMatrix::zeros(dim(n + 1), dim(n));
        d.add_block(0, b(n - 1) + h(n), &RatMatrix::identity(b(n)));
        let g_next = &change[&(n + 1)];
        let g_inv = change[&n].inverse().expect("unimodular matrices invert");
        let conj = g_next
            .matmul(&d)
            .and_then(|m| m.matmul(&g_inv))
            .expect("conjugation shapes");
        diffs.insert(n, conj);
    }
    BoundedComplex::new(dims, diffs).expect("standard form squares to zero")
}

/// Random complex with at most `max_dim` in each degree of `[lo, hi]`.
pub fn random_complex(
    rng: &mut ChaCha8Rng,
    max_dim: usize,
    lo: Degree,
    hi: Degree,
) -> BoundedComplex {
    let mut homology = BTreeMap::new();
    let mut ranks = BTreeMap::new();
    let mut incoming = 0;
    for n in lo..=hi {
        let room = max_dim - incoming;
        let h = rng.gen_range(0..=room);
        let b = if n == hi { 0 } else { rng.gen_range(0..=room - h) };
        let b = b.min(max_dim);
        homology.insert(n, h);
        ranks.insert(n, b);
        incoming = b;
    }
    homology.retain(|_, v| *v > 0);
    ranks.retain(|_, v| *v > 0);
    conjugated_standard_form(rng, &homology, &ranks)
}

/// Random complex with prescribed homology dimensions, adding contractible
/// pieces only where the caps leave room.
pub fn random_complex_with_homology(
    rng: &mut ChaCha8Rng,
    homology: &BTreeMap<Degree, usize>,
    max_dim: usize,
    lo: Degree,
    hi: Degree,
) -> BoundedComplex {
    let h = |n: Degree| homology.get(&n).copied().unwrap_or(0);
    let (lo, hi) = match (homology.keys().next(), homology.keys().next_back()) {
        (Some(&a), Some(&b)) => (lo.min(a), hi.max(b)),
        _ => (lo, hi),
    };
    let cap = max_dim.max(homology.values().copied().max().unwrap_or(0));
    let mut ranks = BTreeMap::new();
    let mut incoming = 0;
    for n in lo..hi {
        let room_here = cap.saturating_sub(incoming + h(n));
        let room_next = cap.saturating_sub(h(n + 1));
        let b = rng.gen_range(0..=room_here.min(room_next));
        if b > 0 {
            ranks.insert(n, b);
        }
        incoming = b;
    }
    let homology = homology.iter().filter(|(_, &v)| v > 0).map(|(&k, &v)| (k, v)).collect();
    conjugated_standard_form(rng, &homology, &ranks)
}

/// A random chain map: a random integer combination of a basis of all chain
/// maps `X → Y`.
pub fn random_chain_map(rng: &mut ChaCha8Rng, x: &BoundedComplex, y: &BoundedComplex) -> ChainMap {
    let mut f = ChainMap::zero(x, y);
    for g in chain_map_basis(x, y) {
        let c = rng.gen_range(-2i64..=2);
        if c != 0 {
            f = f.add(&g.scale(&Rational::from(c))).expect("same source and target");
        }
    }
    f
}

/// The cone triangle of a random map between two random complexes.
pub fn random_triangle(
    rng: &mut ChaCha8Rng,
    max_dim: usize,
    lo: Degree,
    hi: Degree,
) -> Triangle {
    let x = random_complex(rng, max_dim, lo, hi);
    let y = random_complex(rng, max_dim, lo, hi);
    Triangle::from_cone(&random_chain_map(rng, &x, &y))
}

/// A seeded random datum honoring the caps of `spec`. Shadow kernels have
/// homology `ℚ` in degree 0 so that shadow objects stay within the caps.
pub fn gen_random(spec: &GeneratorSpec) -> Result<MTTDatum, ModelError> {
    if spec.nodes == 0 || spec.max_dim == 0 || spec.kernel_max_dim == 0 {
        return Err(ModelError::Parameter("caps must be positive".into()));
    }
    if spec.degree_lo > spec.degree_hi || spec.kernel_lo > spec.kernel_hi {
        return Err(ModelError::Parameter("empty degree span".into()));
    }
    if spec.kernel_lo > 0 || spec.kernel_hi < 0 {
        return Err(ModelError::Parameter("kernel span must contain degree 0".into()));
    }
    let mut rng = spec.rng();
    let r = spec.nodes;
    let (lo, hi) = (spec.degree_lo, spec.degree_hi);
    let (klo, khi, kmax) = (spec.kernel_lo, spec.kernel_hi, spec.kernel_max_dim);
    let kernel = |rng: &mut ChaCha8Rng| random_complex(rng, kmax, klo, khi);
    let phi: Vec<_> = (0..r).map(|_| kernel(&mut rng)).collect();
    let psi: Vec<_> = (0..r).map(|_| kernel(&mut rng)).collect();
    let probes: Vec<_> = (0..r).map(|_| random_complex(&mut rng, spec.max_dim, lo, hi)).collect();
    let unit_h = BTreeMap::from([(0, 1)]);
    let shadow_kernels: Vec<_> = (0..r)
        .map(|_| random_complex_with_homology(&mut rng, &unit_h, kmax, klo, khi))
        .collect();
    let shadow_objects: Vec<_> = probes
        .iter()
        .map(|l| random_complex_with_homology(&mut rng, &l.homology_dims(), spec.max_dim, lo, hi))
        .collect();
    let support = (0..r)
        .map(|_| (0..r).map(|_| rng.gen_bool(0.5)).collect())
        .collect();
    let c_sigma = (0..r)
        .map(|_| Rational::new(rng.gen_range(-5i64..=5), rng.gen_range(1i64..=4)))
        .collect();
    let datum = DatumParts {
        nodes: node_names(r),
        phi,
        psi,
        probes,
        shadow_kernels,
        shadow_objects,
        support,
        c_sigma,
    }
    .build()?;
    Ok(datum)
}

/// `h(K ⊗ X)` from `h(K)` and `h(X)` by the Künneth formula.
pub fn kunneth(a: &BTreeMap<Degree, usize>, b: &BTreeMap<Degree, usize>) -> BTreeMap<Degree, usize> {
    let mut out = BTreeMap::new();
    for (&p, &x) in a {
        for (&q, &y) in b {
            if x * y > 0 {
                *out.entry(p + q).or_insert(0) += x * y;
            }
        }
    }
    out
}

/// `Σ_m (Σ_i hX(i)·hY(i+m)) q^m`.
pub fn semisimple_pairing(
    hx: &BTreeMap<Degree, usize>,
    hy: &BTreeMap<Degree, usize>,
) -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    for (&i, &x) in hx {
        for (&k, &y) in hy {
            p = p.add(&LaurentPoly::monomial((x * y) as i64, k - i));
        }
    }
    p
}

/// `P_ij` from homology dimensions of the kernels and probes alone.
pub fn semisimple_oracle(d: &MTTDatum, i: usize, j: usize) -> Result<LaurentPoly, ModelError> {
    let r = d.node_count();
    for k in [i, j] {
        if k >= r {
            return Err(ChannelError::IndexOutOfRange { index: k, nodes: r }.into());
        }
    }
    let ha = kunneth(
        &d.psi[j].kernel.homology_dims(),
        &kunneth(&d.phi[i].kernel.homology_dims(), &d.probes[i].homology_dims()),
    );
    Ok(semisimple_pairing(&ha, &d.probes[j].homology_dims()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxcore::is_quasi_iso;

    #[test]
    fn closed_forms() {
        for (dd, m0) in [(1usize, 0), (3, 2), (2, -1)] {
            let d = gen_single_degree(dd, m0).unwrap();
            let p = d.interaction_polynomial(0, 1).unwrap();
            assert_eq!(p, LaurentPoly::monomial(dd as i64, m0));
            assert_eq!(p.w_tot(), dd as i64);
            assert_eq!(p.w_chi(), if m0 % 2 == 0 { dd as i64 } else { -(dd as i64) });
            assert_eq!(semisimple_oracle(&d, 0, 1).unwrap(), p);
        }
        let d = gen_two_degree(1, 1, 0).unwrap();
        let p = d.interaction_polynomial(0, 1).unwrap();
        assert_eq!((p.w_tot(), p.w_chi()), (2, 0));
        let d = gen_two_degree(1, 2, -1).unwrap();
        assert_eq!(d.interaction_polynomial(0, 1).unwrap().w_chi(), 1);
        assert_eq!(
            gen_two_degree(2, 0, 1).unwrap().interaction_polynomial(0, 1).unwrap(),
            LaurentPoly::monomial(2, 1)
        );
        assert!(gen_single_degree(0, 0).is_err());
        assert!(gen_two_degree(0, 0, 0).is_err());
    }

    #[test]
    fn directedness_and_swap() {
        let d = gen_directedness_witness().unwrap();
        let (p12, p21) = (
            d.interaction_polynomial(0, 1).unwrap(),
            d.interaction_polynomial(1, 0).unwrap(),
        );
        assert_eq!(p12, p21.shift(1));
        let s = gen_directedness(true).unwrap();
        assert_eq!(s.interaction_polynomial(0, 1).unwrap(), p21);
        assert_eq!(s.interaction_polynomial(1, 0).unwrap(), p12);
    }

    #[test]
    fn obstruction_pair() {
        let (a, b) = gen_obstruction_demo().unwrap();
        assert_ne!(
            a.interaction_polynomial(0, 1).unwrap(),
            b.interaction_polynomial(0, 1).unwrap()
        );
    }

    #[test]
    fn demos_build() {
        for name in DEMO_NAMES {
            let data = demo(name, &DemoParams::default()).unwrap();
            assert!(!data.is_empty());
        }
        assert!(demo("nope", &DemoParams::default()).is_err());
    }

    #[test]
    fn random_complexes_respect_caps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x = random_complex(&mut rng, 3, -2, 2);
            x.validate().unwrap();
            assert!(x.dims().iter().all(|(&n, &d)| d <= 3 && (-2..=2).contains(&n)));
            let h = x.homology_dims();
            let y = random_complex_with_homology(&mut rng, &h, 3, -2, 2);
            assert_eq!(y.homology_dims(), h);
            assert!(y.dims().values().all(|&d| d <= 3));
            let f = random_chain_map(&mut rng, &x, &y);
            f.check().unwrap();
        }
    }

    #[test]
    fn random_data_are_deterministic() {
        let spec = GeneratorSpec::default().with_seed(11);
        let a = gen_random(&spec).unwrap();
        let b = gen_random(&spec).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        for j in 0..2 {
            assert!(is_quasi_iso(a.compatibility_map(j)));
        }
    }
}

//! Exact functors realized as tensoring with a kernel complex, `X ↦ K ⊗ X`.
//!
//! The kernel always sits on the left of the tensor product.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cxcore::{
    is_quasi_iso, tensor_map, tensor_total, BoundedComplex, ChainMap, ComplexError, ComplexRepr,
    Degree, TensorLayout, Triangle, TriangleWitness,
};
use crate::ratlin::{RatMatrix, Rational};

pub type SectorId = String;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransportError {
    #[error("{label}: expects an object of sector {expected:?}, got sector {found:?}")]
    Wiring {
        label: String,
        expected: SectorId,
        found: SectorId,
    },
    #[error("exactness certificate for {label} fails the chain-map equation in degree {degree}")]
    Certificate { label: String, degree: Degree },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A complex tagged with the sector it lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorObject {
    pub sector: SectorId,
    pub complex: BoundedComplex,
}

impl SectorObject {
    pub fn new(sector: impl Into<SectorId>, complex: BoundedComplex) -> Self {
        SectorObject {
            sector: sector.into(),
            complex,
        }
    }
}

/// A chain map tagged with the sector of its source and target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorMap {
    pub sector: SectorId,
    pub map: ChainMap,
}

impl SectorMap {
    pub fn new(sector: impl Into<SectorId>, map: ChainMap) -> Self {
        SectorMap {
            sector: sector.into(),
            map,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportKernel {
    pub kernel: BoundedComplex,
    pub label: String,
    pub source_sector: SectorId,
    pub target_sector: SectorId,
}

impl TransportKernel {
    pub fn new(
        kernel: BoundedComplex,
        label: impl Into<String>,
        source_sector: impl Into<SectorId>,
        target_sector: impl Into<SectorId>,
    ) -> Self {
        TransportKernel {
            kernel,
            label: label.into(),
            source_sector: source_sector.into(),
            target_sector: target_sector.into(),
        }
    }

    /// The kernel `ℚ` in degree 0, acting as the identity.
    pub fn unit(
        label: impl Into<String>,
        source_sector: impl Into<SectorId>,
        target_sector: impl Into<SectorId>,
    ) -> Self {
        Self::new(
            BoundedComplex::concentrated(0, 1),
            label,
            source_sector,
            target_sector,
        )
    }

    fn expect_sector(&self, sector: &str) -> Result<(), TransportError> {
        if sector != self.source_sector {
            return Err(TransportError::Wiring {
                label: self.label.clone(),
                expected: self.source_sector.clone(),
                found: sector.to_string(),
            });
        }
        Ok(())
    }

    pub fn apply(&self, x: &SectorObject) -> Result<SectorObject, TransportError> {
        self.expect_sector(&x.sector)?;
        Ok(SectorObject::new(
            self.target_sector.clone(),
            self.apply_complex(&x.complex),
        ))
    }

    pub fn apply_to_map(&self, f: &SectorMap) -> Result<SectorMap, TransportError> {
        self.expect_sector(&f.sector)?;
        Ok(SectorMap::new(
            self.target_sector.clone(),
            self.apply_map(&f.map),
        ))
    }

    /// `K ⊗ X`, without sector bookkeeping.
    pub fn apply_complex(&self, x: &BoundedComplex) -> BoundedComplex {
        tensor_total(&self.kernel, x)
    }

    /// `id_K ⊗ f`, without sector bookkeeping.
    pub fn apply_map(&self, f: &ChainMap) -> ChainMap {
        tensor_map(&ChainMap::identity(&self.kernel), f)
    }

    /// `self ∘ first`, with kernel `K_self ⊗ K_first`.
    pub fn compose(&self, first: &TransportKernel) -> Result<TransportKernel, TransportError> {
        if first.target_sector != self.source_sector {
            return Err(TransportError::Wiring {
                label: self.label.clone(),
                expected: self.source_sector.clone(),
                found: first.target_sector.clone(),
            });
        }
        Ok(TransportKernel {
            kernel: tensor_total(&self.kernel, &first.kernel),
            label: format!("{}∘{}", self.label, first.label),
            source_sector: first.source_sector.clone(),
            target_sector: self.target_sector.clone(),
        })
    }
}

/// Permutation-with-signs chain map from a rule sending each basis vector of
/// `source` in degree `n` to `(sign, index)` in `target^n`.
fn signed_permutation(
    source: &BoundedComplex,
    target: &BoundedComplex,
    rule: impl Fn(Degree, usize) -> (bool, usize),
) -> ChainMap {
    let mut comps = BTreeMap::new();
    for (&n, &dim) in source.dims() {
        let mut m = RatMatrix::zeros(target.dim(n), dim);
        for col in 0..dim {
            let (negative, row) = rule(n, col);
            let v = if negative { -Rational::one() } else { Rational::one() };
            m.set(row, col, v);
        }
        comps.insert(n, m);
    }
    ChainMap::from_raw(source.clone(), target.clone(), comps).expect("permutation shapes")
}

/// Degreewise inverse of a signed permutation map.
fn invert_signed_permutation(f: &ChainMap) -> ChainMap {
    let comps = f
        .components()
        .iter()
        .map(|(&n, m)| (n, m.transpose()))
        .collect();
    ChainMap::from_raw(f.target().clone(), f.source().clone(), comps)
        .expect("transposed permutation shapes")
}

/// Locates basis vector `col` of `(A ⊗ B)^n` as `(p, q, a, b)`.
fn tensor_coords(layout: &TensorLayout, n: Degree, col: usize) -> (Degree, Degree, usize, usize) {
    let blk = layout
        .blocks(n)
        .iter()
        .find(|b| col >= b.offset && col < b.offset + b.len())
        .expect("column lies in some tensor block");
    let local = col - blk.offset;
    (blk.left, blk.right, local / blk.right_dim, local % blk.right_dim)
}

/// The isomorphism `(K2 ⊗ K1) ⊗ X → K2 ⊗ (K1 ⊗ X)`; a pure permutation.
pub fn associator(
    k2: &BoundedComplex,
    k1: &BoundedComplex,
    x: &BoundedComplex,
) -> ChainMap {
    let inner_left = TensorLayout::new(k2.dims(), k1.dims());
    let k21 = tensor_total(k2, k1);
    let source = tensor_total(&k21, x);
    let source_layout = TensorLayout::new(k21.dims(), x.dims());
    let inner_right = TensorLayout::new(k1.dims(), x.dims());
    let k1x = tensor_total(k1, x);
    let target = tensor_total(k2, &k1x);
    let target_layout = TensorLayout::new(k2.dims(), k1x.dims());
    signed_permutation(&source, &target, |n, col| {
        let (p, c, i12, l) = tensor_coords(&source_layout, n, col);
        let (a, b, i, j) = tensor_coords(&inner_left, p, i12);
        let inner = inner_right
            .block(b + c, b)
            .expect("K1 ⊗ X block exists")
            .index(j, l);
        let outer = target_layout
            .block(n, a)
            .expect("K2 ⊗ (K1 ⊗ X) block exists")
            .index(i, inner);
        (false, outer)
    })
}

/// `K ⊗ (X[1]) → (K ⊗ X)[1]`, `k ⊗ x ↦ (−1)^p k ⊗ x` for `k ∈ K^p`.
pub fn shift_commutation(k: &BoundedComplex, x: &BoundedComplex) -> ChainMap {
    let x1 = x.shift(1);
    let source = tensor_total(k, &x1);
    let target = tensor_total(k, x).shift(1);
    let src_layout = TensorLayout::new(k.dims(), x1.dims());
    let tgt_layout = TensorLayout::new(k.dims(), x.dims());
    signed_permutation(&source, &target, |n, col| {
        let (p, _, a, b) = tensor_coords(&src_layout, n, col);
        let row = tgt_layout
            .block(n + 1, p)
            .expect("matching block after shift")
            .index(a, b);
        (p.rem_euclid(2) == 1, row)
    })
}

/// Evidence that tensoring with a kernel commutes with cones for one map.
#[derive(Clone, Debug)]
pub struct ExactnessCertificate {
    pub label: String,
    /// `cone(K ⊗ f) → K ⊗ cone(f)`.
    pub iso: ChainMap,
    pub cone_span: Option<(Degree, Degree)>,
    pub transported_span: Option<(Degree, Degree)>,
    pub chain_map_ok: bool,
    pub invertible: bool,
    /// First degree where the chain-map equation fails, if any.
    pub first_failure: Option<Degree>,
}

impl ExactnessCertificate {
    pub fn verified(&self) -> bool {
        self.chain_map_ok && self.invertible
    }

    pub fn into_result(self) -> Result<Self, TransportError> {
        if self.verified() {
            return Ok(self);
        }
        Err(TransportError::Certificate {
            label: self.label.clone(),
            degree: self.first_failure.unwrap_or_default(),
        })
    }
}

/// Builds and checks the isomorphism `cone(K ⊗ f) ≅ K ⊗ cone(f)` sending
/// `k ⊗ x ↦ (−1)^p k ⊗ (x, 0)` and `k ⊗ y ↦ k ⊗ (0, y)`.
pub fn certify_exactness(k: &TransportKernel, f: &ChainMap) -> ExactnessCertificate {
    let (x, y) = (f.source(), f.target());
    let kf = k.apply_map(f);
    let (left, _) = crate::cxcore::cone(&kf);
    let (c, _) = crate::cxcore::cone(f);
    let right = k.apply_complex(&c);
    let kx = TensorLayout::new(k.kernel.dims(), x.dims());
    let ky = TensorLayout::new(k.kernel.dims(), y.dims());
    let kc = TensorLayout::new(k.kernel.dims(), c.dims());
    let iso = signed_permutation(&left, &right, |n, col| {
        let x_part = kx.dim(n + 1);
        if col < x_part {
            let (p, q, a, b) = tensor_coords(&kx, n + 1, col);
            let row = kc.block(n, p).expect("K ⊗ cone block").index(a, b);
            debug_assert_eq!(q - 1 + p, n);
            (p.rem_euclid(2) == 1, row)
        } else {
            let (p, q, a, b) = tensor_coords(&ky, n, col - x_part);
            let row = kc
                .block(n, p)
                .expect("K ⊗ cone block")
                .index(a, x.dim(q + 1) + b);
            (false, row)
        }
    });
    let first_failure = first_chain_failure(&iso);
    let invertible = iso
        .components()
        .values()
        .all(|m| m.rows() == m.cols() && m.rank() == m.rows())
        && left.dims() == right.dims();
    ExactnessCertificate {
        label: k.label.clone(),
        cone_span: left.span(),
        transported_span: right.span(),
        chain_map_ok: first_failure.is_none(),
        invertible,
        first_failure,
        iso,
    }
}

fn first_chain_failure(f: &ChainMap) -> Option<Degree> {
    match f.check() {
        Ok(()) => None,
        Err(ComplexError::NotAChainMap { degree }) => Some(degree),
        Err(_) => Some(f.source().span().map_or(0, |s| s.0)),
    }
}

/// Image of a distinguished triangle under `K ⊗ −`, exhibited as a triangle
/// with an explicit quasi-isomorphism to the cone of the transported map.
pub fn transport_triangle(
    k: &TransportKernel,
    t: &Triangle,
) -> Result<(Triangle, ExactnessCertificate), TransportError> {
    let cert = certify_exactness(k, &t.map_a).into_result()?;
    let inverse = invert_signed_permutation(&cert.iso);
    let kc = k.apply_map(&t.map_c);
    let sigma = shift_commutation(&k.kernel, &t.first);
    let map_c = sigma.compose(&kc)?;
    let witness = match &t.witness {
        TriangleWitness::Cone => inverse.clone(),
        TriangleWitness::QuasiIsoToCone(w) => inverse.compose(&k.apply_map(w))?,
    };
    let image = Triangle {
        first: k.apply_complex(&t.first),
        second: k.apply_complex(&t.second),
        third: k.apply_complex(&t.third),
        map_a: k.apply_map(&t.map_a),
        map_b: k.apply_map(&t.map_b),
        map_c,
        witness: TriangleWitness::QuasiIsoToCone(witness),
    };
    image.check()?;
    Ok((image, cert))
}

/// Checks that `K1`-then-`K2` and the composite kernel agree on `X` via the
/// associator, returning the verified isomorphism.
pub fn verify_composition(
    k2: &TransportKernel,
    k1: &TransportKernel,
    x: &BoundedComplex,
) -> Result<ChainMap, TransportError> {
    let assoc = associator(&k2.kernel, &k1.kernel, x);
    assoc.check()?;
    if !is_quasi_iso(&assoc) {
        return Err(TransportError::Certificate {
            label: format!("{}∘{}", k2.label, k1.label),
            degree: first_chain_failure(&assoc).unwrap_or_default(),
        });
    }
    Ok(assoc)
}

/// File form: a complex plus `label`, `source`, `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelRepr {
    pub label: String,
    pub source: SectorId,
    pub target: SectorId,
    #[serde(with = "crate::serde_util")]
    pub dims: BTreeMap<Degree, usize>,
    #[serde(with = "crate::serde_util", default)]
    pub diffs: BTreeMap<Degree, Vec<Vec<Rational>>>,
}

impl KernelRepr {
    pub fn into_kernel(self) -> Result<TransportKernel, ComplexError> {
        let kernel = ComplexRepr {
            dims: self.dims,
            diffs: self.diffs,
        }
        .into_complex()?;
        Ok(TransportKernel {
            kernel,
            label: self.label,
            source_sector: self.source,
            target_sector: self.target,
        })
    }
}

impl From<&TransportKernel> for KernelRepr {
    fn from(k: &TransportKernel) -> Self {
        let repr = ComplexRepr::from(&k.kernel);
        KernelRepr {
            label: k.label.clone(),
            source: k.source_sector.clone(),
            target: k.target_sector.clone(),
            dims: repr.dims,
            diffs: repr.diffs,
        }
    }
}

impl Serialize for TransportKernel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        KernelRepr::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TransportKernel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = KernelRepr::deserialize(deserializer)?;
        let label = r.label.clone();
        r.into_kernel()
            .map_err(|e| serde::de::Error::custom(format!("kernel {label}: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxcore::cone;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_i64(rows)
    }

    fn two_term(lo: Degree, d: RatMatrix) -> BoundedComplex {
        let dims = BTreeMap::from([(lo, d.cols()), (lo + 1, d.rows())]);
        BoundedComplex::new(dims, BTreeMap::from([(lo, d)])).unwrap()
    }

    fn sample_kernel() -> TransportKernel {
        let k = BoundedComplex::new(
            BTreeMap::from([(-1, 1), (0, 2), (1, 1)]),
            BTreeMap::from([(-1, m(&[&[1], &[0]])), (0, m(&[&[0, 1]]))]),
        )
        .unwrap();
        TransportKernel::new(k, "K", "a", "b")
    }

    fn sample_map() -> ChainMap {
        let x = two_term(0, m(&[&[1], &[1]]));
        let y = BoundedComplex::graded(BTreeMap::from([(0, 1), (1, 2)]));
        ChainMap::new(x, y, BTreeMap::from([(1, m(&[&[1, -1], &[2, -2]]))])).unwrap()
    }

    #[test]
    fn unit_kernel_is_identity() {
        let u = TransportKernel::unit("U", "a", "a");
        let f = sample_map();
        assert_eq!(u.apply_complex(f.source()), *f.source());
        assert_eq!(u.apply_map(&f), f);
    }

    #[test]
    fn wiring_is_checked() {
        let k = sample_kernel();
        let x = SectorObject::new("b", BoundedComplex::concentrated(0, 1));
        assert!(matches!(k.apply(&x), Err(TransportError::Wiring { .. })));
        let x = SectorObject::new("a", BoundedComplex::concentrated(0, 1));
        assert_eq!(k.apply(&x).unwrap().sector, "b");
        assert!(k.compose(&k).is_err());
    }

    #[test]
    fn shifted_kernel_shifts_homology() {
        let k = TransportKernel::new(BoundedComplex::concentrated(-1, 1), "S", "a", "a");
        let x = two_term(0, m(&[&[1], &[0]]));
        assert_eq!(
            k.apply_complex(&x).homology_dims(),
            x.shift(1).homology_dims()
        );
    }

    #[test]
    fn functoriality() {
        let k = sample_kernel();
        let f = sample_map();
        k.apply_map(&f).check().unwrap();
        assert_eq!(
            k.apply_map(&ChainMap::identity(f.source())),
            ChainMap::identity(&k.apply_complex(f.source()))
        );
        let g = ChainMap::identity(f.target()).scale(&Rational::from(3));
        assert_eq!(
            k.apply_map(&g.compose(&f).unwrap()),
            k.apply_map(&g).compose(&k.apply_map(&f)).unwrap()
        );
    }

    #[test]
    fn exactness_certificates() {
        let k = sample_kernel();
        let f = sample_map();
        let cert = certify_exactness(&k, &f);
        assert!(cert.verified(), "{:?}", cert.first_failure);
        let id = ChainMap::identity(f.source());
        assert!(certify_exactness(&k, &id).verified());
        let u = TransportKernel::unit("U", "a", "a");
        let cert = certify_exactness(&u, &f);
        assert_eq!(cert.iso, ChainMap::identity(&cone(&f).0));
    }

    #[test]
    fn triangles_transport() {
        let k = sample_kernel();
        let t = Triangle::from_cone(&sample_map());
        let (image, _) = transport_triangle(&k, &t).unwrap();
        image.check().unwrap();
    }

    #[test]
    fn associativity() {
        let k = sample_kernel();
        let k1 = TransportKernel::new(two_term(0, m(&[&[2]])), "L", "c", "a");
        let x = two_term(-1, m(&[&[1, 0], &[0, 0]]));
        let assoc = verify_composition(&k, &k1, &x).unwrap();
        assert_eq!(assoc.source(), &k.compose(&k1).unwrap().apply_complex(&x));
        let shift = shift_commutation(&k.kernel, &x);
        shift.check().unwrap();
        assert!(is_quasi_iso(&shift));
    }

    #[test]
    fn kernel_serialization() {
        let k = sample_kernel();
        let s = serde_json::to_string(&k).unwrap();
        assert!(s.starts_with(r#"{"label":"K","source":"a","target":"b","dims":{"-1":1"#));
        let back: TransportKernel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, k);
    }
}

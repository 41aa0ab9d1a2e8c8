//! Bounded cochain complexes of finite-dimensional rational vector spaces.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * cohomological indexing, `d^n : X^n → X^{n+1}` stored as a
//!   `dim(n+1) × dim(n)` matrix;
//! * shift: `X[k]^n = X^{n+k}` with `d_{X[k]} = (-1)^k d_X`, and on maps
//!   `f[k]^n = f^{n+k}`;
//! * cone of `f : X → Y`: `cone(f)^n = X^{n+1} ⊕ Y^n` (the `X` block first) with
//!   differential `[[-d_X, 0], [f, d_Y]]`;
//! * tensor totalization: `(K ⊗ X)^n = ⊕_{p+q=n} K^p ⊗ X^q`, blocks ordered by
//!   ascending `p`, Kronecker ordering inside a block, and
//!   `d(k ⊗ x) = d k ⊗ x + (-1)^p k ⊗ d x`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ratlin::{LinalgError, RatMatrix, Rational};

pub type Degree = i32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("d^{degree} has shape {found:?}, expected {expected:?}")]
    DiffShape {
        degree: Degree,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("d^{} ∘ d^{degree} is not zero", .degree + 1)]
    NotAComplex { degree: Degree },
    #[error("map component in degree {degree} has shape {found:?}, expected {expected:?}")]
    MapShape {
        degree: Degree,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("chain map equation fails in degree {degree}")]
    NotAChainMap { degree: Degree },
    #[error("maps are not composable: target of the first is not the source of the second")]
    NotComposable,
    #[error("triangle is not distinguished: {0}")]
    BadTriangle(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A bounded cochain complex. Only degrees of positive dimension are stored;
/// a differential is stored exactly when both of its endpoints are nonzero.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BoundedComplex {
    dims: BTreeMap<Degree, usize>,
    diffs: BTreeMap<Degree, RatMatrix>,
}

/// Cycle/boundary data of one degree: `reps` holds cycles representing a
/// basis of `H^n` as columns, and `projector` sends a cycle to the
/// coordinates of its class (it kills boundaries).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeHomology {
    pub reps: RatMatrix,
    pub projector: RatMatrix,
}

impl DegreeHomology {
    pub fn dim(&self) -> usize {
        self.reps.cols()
    }
}

impl BoundedComplex {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `ℚ^dim` sitting in a single degree.
    pub fn concentrated(degree: Degree, dim: usize) -> Self {
        let mut dims = BTreeMap::new();
        if dim > 0 {
            dims.insert(degree, dim);
        }
        BoundedComplex {
            dims,
            diffs: BTreeMap::new(),
        }
    }

    /// Zero-differential complex with the given dimensions.
    pub fn graded(dims: BTreeMap<Degree, usize>) -> Self {
        BoundedComplex {
            dims: dims.into_iter().filter(|&(_, d)| d > 0).collect(),
            diffs: BTreeMap::new(),
        }
        .with_zero_fill()
    }

    /// Checks shapes and normalizes storage, but does not check `d∘d = 0`.
    pub fn from_raw(
        dims: BTreeMap<Degree, usize>,
        diffs: BTreeMap<Degree, RatMatrix>,
    ) -> Result<Self, ComplexError> {
        let dims: BTreeMap<_, _> = dims.into_iter().filter(|&(_, d)| d > 0).collect();
        let dim = |n: Degree| dims.get(&n).copied().unwrap_or(0);
        let mut kept = BTreeMap::new();
        for (n, m) in diffs {
            let expected = (dim(n + 1), dim(n));
            if m.shape() != expected {
                return Err(ComplexError::DiffShape {
                    degree: n,
                    expected,
                    found: m.shape(),
                });
            }
            if expected.0 > 0 && expected.1 > 0 {
                kept.insert(n, m);
            }
        }
        Ok(BoundedComplex { dims, diffs: kept }.with_zero_fill())
    }

    /// [`BoundedComplex::from_raw`] followed by [`BoundedComplex::validate`].
    pub fn new(
        dims: BTreeMap<Degree, usize>,
        diffs: BTreeMap<Degree, RatMatrix>,
    ) -> Result<Self, ComplexError> {
        let c = Self::from_raw(dims, diffs)?;
        c.validate()?;
        Ok(c)
    }

    fn with_zero_fill(mut self) -> Self {
        let degrees: Vec<_> = self.dims.keys().copied().collect();
        for n in degrees {
            let (src, tgt) = (self.dim(n), self.dim(n + 1));
            if tgt > 0 {
                self.diffs
                    .entry(n)
                    .or_insert_with(|| RatMatrix::zeros(tgt, src));
            }
        }
        self
    }

    /// Confirms `d^{n+1} ∘ d^n = 0` everywhere, reporting the first bad `n`.
    pub fn validate(&self) -> Result<(), ComplexError> {
        for (&n, d) in &self.diffs {
            if let Some(next) = self.diffs.get(&(n + 1)) {
                if !next.matmul(d)?.is_zero() {
                    return Err(ComplexError::NotAComplex { degree: n });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self, n: Degree) -> usize {
        self.dims.get(&n).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &BTreeMap<Degree, usize> {
        &self.dims
    }

    /// `d^n`, as an explicit zero matrix when not stored.
    pub fn diff(&self, n: Degree) -> RatMatrix {
        self.diffs
            .get(&n)
            .cloned()
            .unwrap_or_else(|| RatMatrix::zeros(self.dim(n + 1), self.dim(n)))
    }

    pub fn diff_ref(&self, n: Degree) -> Option<&RatMatrix> {
        self.diffs.get(&n)
    }

    /// Nonzero differentials, by source degree.
    pub fn nonzero_diffs(&self) -> impl Iterator<Item = (Degree, &RatMatrix)> {
        self.diffs
            .iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(&n, m)| (n, m))
    }

    /// Smallest and largest degree of positive dimension.
    pub fn span(&self) -> Option<(Degree, Degree)> {
        Some((*self.dims.keys().next()?, *self.dims.keys().next_back()?))
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn shift(&self, k: Degree) -> BoundedComplex {
        BoundedComplex {
            dims: self.dims.iter().map(|(&n, &d)| (n - k, d)).collect(),
            diffs: self
                .diffs
                .iter()
                .map(|(&n, m)| (n - k, m.signed(k as i64)))
                .collect(),
        }
    }

    pub fn direct_sum(&self, other: &BoundedComplex) -> BoundedComplex {
        let degrees: BTreeSet<_> = self.dims.keys().chain(other.dims.keys()).copied().collect();
        let dims: BTreeMap<_, _> = degrees
            .iter()
            .map(|&n| (n, self.dim(n) + other.dim(n)))
            .collect();
        let mut diffs = BTreeMap::new();
        for &n in &degrees {
            let rows = self.dim(n + 1) + other.dim(n + 1);
            if rows == 0 {
                continue;
            }
            let mut d = RatMatrix::zeros(rows, dims[&n]);
            d.add_block(0, 0, &self.diff(n));
            d.add_block(self.dim(n + 1), self.dim(n), &other.diff(n));
            diffs.insert(n, d);
        }
        BoundedComplex { dims, diffs }
    }

    /// `dim H^n = dim X^n − rank d^n − rank d^{n−1}`, nonzero entries only.
    pub fn homology_dims(&self) -> BTreeMap<Degree, usize> {
        let ranks: BTreeMap<Degree, usize> =
            self.diffs.iter().map(|(&n, d)| (n, d.rank())).collect();
        self.dims
            .iter()
            .filter_map(|(&n, &d)| {
                let h = d - ranks.get(&n).copied().unwrap_or(0)
                    - ranks.get(&(n - 1)).copied().unwrap_or(0);
                (h > 0).then_some((n, h))
            })
            .collect()
    }

    /// Stops at the first degree with nonzero homology.
    pub fn is_acyclic(&self) -> bool {
        acyclic_by_ranks(&self.dims, |n| self.diffs.get(&n).map_or(0, RatMatrix::rank))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.homology_dims()
            .iter()
            .map(|(&n, &h)| if n.rem_euclid(2) == 0 { h as i64 } else { -(h as i64) })
            .sum()
    }

    /// Explicit homology bases for every degree of positive dimension.
    ///
    /// Cycles are coordinatized by the free columns of the RREF of `d^n`, and
    /// the class map is a left-kernel basis of the boundaries written in those
    /// coordinates.
    pub fn homology(&self) -> BTreeMap<Degree, DegreeHomology> {
        self.dims
            .iter()
            .map(|(&n, &dim)| (n, self.degree_homology(n, dim)))
            .collect()
    }

    fn degree_homology(&self, n: Degree, dim: usize) -> DegreeHomology {
        let (cycles, free) = match self.diffs.get(&n) {
            Some(d) => {
                let (r, pivots) = d.rref();
                let free = non_pivots(dim, &pivots);
                (RatMatrix::kernel_matrix_from_rref(dim, &r, &pivots), free)
            }
            None => (RatMatrix::identity(dim), (0..dim).collect()),
        };
        let z = free.len();
        // Boundaries in cycle coordinates: rows `free` of d^{n-1}.
        let boundary_coords = match self.diffs.get(&(n - 1)) {
            Some(prev) => prev.select_rows(&free),
            None => RatMatrix::zeros(z, 0),
        };
        let bt = boundary_coords.transpose();
        let (br, bpivots) = bt.rref();
        let class_free = non_pivots(z, &bpivots);
        let class_map = RatMatrix::kernel_matrix_from_rref(z, &br, &bpivots).transpose();
        let mut select = RatMatrix::zeros(z, dim);
        for (i, &f) in free.iter().enumerate() {
            select.set(i, f, Rational::one());
        }
        let projector = class_map
            .matmul(&select)
            .expect("class map and selection are compatible");
        let reps_cols: Vec<_> = class_free.iter().map(|&c| cycles.column(c)).collect();
        DegreeHomology {
            reps: RatMatrix::from_columns(dim, &reps_cols),
            projector,
        }
    }

    /// The homology of `self` as a complex with zero differential.
    pub fn homology_complex(&self) -> BoundedComplex {
        BoundedComplex::graded(self.homology_dims())
    }
}

/// Whether a complex with the given dimensions is acyclic, where `rank(n)`
/// is the rank of `d^n`. Small degrees are tried first and each rank is
/// computed at most once.
pub fn acyclic_by_ranks(dims: &BTreeMap<Degree, usize>, mut rank: impl FnMut(Degree) -> usize) -> bool {
    let mut order: Vec<(usize, Degree)> = dims.iter().map(|(&n, &d)| (d, n)).collect();
    order.sort_unstable();
    let mut known: BTreeMap<Degree, usize> = BTreeMap::new();
    for (d, n) in order {
        let mut r = |m: Degree| -> usize {
            if !dims.contains_key(&m) || !dims.contains_key(&(m + 1)) {
                return 0;
            }
            *known.entry(m).or_insert_with(|| rank(m))
        };
        if d > r(n) + r(n - 1) {
            return false;
        }
    }
    true
}

fn non_pivots(n: usize, pivots: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &p in pivots {
        mask[p] = false;
    }
    (0..n).filter(|&c| mask[c]).collect()
}

/// Degree-0 chain map between two bounded complexes. Components are stored
/// for every degree where both source and target are nonzero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainMap {
    source: BoundedComplex,
    target: BoundedComplex,
    comps: BTreeMap<Degree, RatMatrix>,
}

impl ChainMap {
    /// Checks component shapes only.
    pub fn from_raw(
        source: BoundedComplex,
        target: BoundedComplex,
        comps: BTreeMap<Degree, RatMatrix>,
    ) -> Result<Self, ComplexError> {
        let mut kept = BTreeMap::new();
        for (n, m) in comps {
            let expected = (target.dim(n), source.dim(n));
            if m.shape() != expected {
                return Err(ComplexError::MapShape {
                    degree: n,
                    expected,
                    found: m.shape(),
                });
            }
            if expected.0 > 0 && expected.1 > 0 {
                kept.insert(n, m);
            }
        }
        for (&n, &d) in source.dims() {
            if target.dim(n) > 0 {
                kept.entry(n)
                    .or_insert_with(|| RatMatrix::zeros(target.dim(n), d));
            }
        }
        Ok(ChainMap {
            source,
            target,
            comps: kept,
        })
    }

    pub fn new(
        source: BoundedComplex,
        target: BoundedComplex,
        comps: BTreeMap<Degree, RatMatrix>,
    ) -> Result<Self, ComplexError> {
        let f = Self::from_raw(source, target, comps)?;
        f.check()?;
        Ok(f)
    }

    /// Verifies `d_Y^n f^n = f^{n+1} d_X^n` in every degree.
    pub fn check(&self) -> Result<(), ComplexError> {
        let (Some(lo), Some(hi)) = (self.source.span(), self.target.span()) else {
            return Ok(());
        };
        let (lo, hi) = (lo.0.min(hi.0) - 1, lo.1.max(hi.1));
        for n in lo..=hi {
            let left = self.target.diff(n).matmul(&self.component(n))?;
            let right = self.component(n + 1).matmul(&self.source.diff(n))?;
            if left != right {
                return Err(ComplexError::NotAChainMap { degree: n });
            }
        }
        Ok(())
    }

    pub fn zero(source: &BoundedComplex, target: &BoundedComplex) -> Self {
        Self::from_raw(source.clone(), target.clone(), BTreeMap::new())
            .expect("zero map has consistent shapes")
    }

    pub fn identity(x: &BoundedComplex) -> Self {
        let comps = x
            .dims()
            .iter()
            .map(|(&n, &d)| (n, RatMatrix::identity(d)))
            .collect();
        ChainMap {
            source: x.clone(),
            target: x.clone(),
            comps,
        }
    }

    pub fn source(&self) -> &BoundedComplex {
        &self.source
    }

    pub fn target(&self) -> &BoundedComplex {
        &self.target
    }

    pub fn components(&self) -> &BTreeMap<Degree, RatMatrix> {
        &self.comps
    }

    pub fn component(&self, n: Degree) -> RatMatrix {
        self.comps
            .get(&n)
            .cloned()
            .unwrap_or_else(|| RatMatrix::zeros(self.target.dim(n), self.source.dim(n)))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(RatMatrix::is_zero)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ChainMap) -> Result<ChainMap, ComplexError> {
        if first.target != self.source {
            return Err(ComplexError::NotComposable);
        }
        let mut comps = BTreeMap::new();
        for &n in first.source.dims().keys() {
            if self.target.dim(n) > 0 {
                comps.insert(n, self.component(n).matmul(&first.component(n))?);
            }
        }
        Ok(ChainMap {
            source: first.source.clone(),
            target: self.target.clone(),
            comps,
        })
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap, ComplexError> {
        if self.source != other.source || self.target != other.target {
            return Err(ComplexError::NotComposable);
        }
        let mut comps = BTreeMap::new();
        for (&n, m) in &self.comps {
            comps.insert(n, m.add(&other.component(n))?);
        }
        Ok(ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            comps,
        })
    }

    pub fn scale(&self, c: &Rational) -> ChainMap {
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            comps: self.comps.iter().map(|(&n, m)| (n, m.scale(c))).collect(),
        }
    }

    /// `f[k] : X[k] → Y[k]` with `f[k]^n = f^{n+k}`.
    pub fn shift(&self, k: Degree) -> ChainMap {
        ChainMap {
            source: self.source.shift(k),
            target: self.target.shift(k),
            comps: self.comps.iter().map(|(&n, m)| (n - k, m.clone())).collect(),
        }
    }

    /// Matrices of the induced maps `H^n(X) → H^n(Y)` in the bases of
    /// [`BoundedComplex::homology`], for every degree where either side is
    /// nonzero.
    pub fn induced_on_homology(&self) -> BTreeMap<Degree, RatMatrix> {
        let hx = self.source.homology();
        let hy = self.target.homology();
        induced_with(&hx, &hy, self)
    }
}

/// [`ChainMap::induced_on_homology`] with precomputed homology bases.
pub fn induced_with(
    hx: &BTreeMap<Degree, DegreeHomology>,
    hy: &BTreeMap<Degree, DegreeHomology>,
    f: &ChainMap,
) -> BTreeMap<Degree, RatMatrix> {
    let degrees: BTreeSet<_> = hx.keys().chain(hy.keys()).copied().collect();
    let mut out = BTreeMap::new();
    for n in degrees {
        let a = hx.get(&n).map_or(0, DegreeHomology::dim);
        let b = hy.get(&n).map_or(0, DegreeHomology::dim);
        if a + b == 0 {
            continue;
        }
        let m = match (hx.get(&n), hy.get(&n)) {
            (Some(x), Some(y)) if a > 0 && b > 0 => y
                .projector
                .matmul(&f.component(n))
                .and_then(|m| m.matmul(&x.reps))
                .expect("homology bases match the map's shapes"),
            _ => RatMatrix::zeros(b, a),
        };
        out.insert(n, m);
    }
    out
}

/// Which kind of evidence makes a [`Triangle`] distinguished.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TriangleWitness {
    /// `third` is literally `cone(map_a)` and `map_b`, `map_c` are the
    /// canonical inclusion and projection.
    Cone,
    /// A quasi-isomorphism `third → cone(map_a)` under which `map_b` and
    /// `map_c` become the canonical maps.
    QuasiIsoToCone(ChainMap),
}

/// `first --a--> second --b--> third --c--> first[1]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Triangle {
    pub first: BoundedComplex,
    pub second: BoundedComplex,
    pub third: BoundedComplex,
    pub map_a: ChainMap,
    pub map_b: ChainMap,
    pub map_c: ChainMap,
    pub witness: TriangleWitness,
}

impl Triangle {
    /// The canonical triangle `X → Y → cone(f) → X[1]`.
    pub fn from_cone(f: &ChainMap) -> Triangle {
        cone(f).1
    }

    /// Checks that the triangle is distinguished according to its witness.
    pub fn check(&self) -> Result<(), ComplexError> {
        let bad = |s: &str| Err(ComplexError::BadTriangle(s.to_string()));
        if self.map_a.source() != &self.first || self.map_a.target() != &self.second {
            return bad("map_a does not go first → second");
        }
        self.map_a.check()?;
        let (c, canonical) = cone(&self.map_a);
        match &self.witness {
            TriangleWitness::Cone => {
                if self.third != c {
                    return bad("third object is not the cone of map_a");
                }
                if self.map_b != canonical.map_b || self.map_c != canonical.map_c {
                    return bad("maps are not the canonical cone maps");
                }
            }
            TriangleWitness::QuasiIsoToCone(q) => {
                if q.source() != &self.third || q.target() != &c {
                    return bad("witness does not go third → cone(map_a)");
                }
                q.check()?;
                if !is_quasi_iso(q) {
                    return bad("witness is not a quasi-isomorphism");
                }
                if q.compose(&self.map_b)? != canonical.map_b {
                    return bad("witness ∘ map_b differs from the cone inclusion");
                }
                if canonical.map_c.compose(q)? != self.map_c {
                    return bad("projection ∘ witness differs from map_c");
                }
            }
        }
        Ok(())
    }

    /// For a cone triangle, a null-homotopy `h^n : X^n → cone^{n-1}` of
    /// `map_b ∘ map_a`, namely `x ↦ (x, 0)`.
    pub fn composite_homotopy(&self) -> BTreeMap<Degree, RatMatrix> {
        let mut h = BTreeMap::new();
        for (&n, &d) in self.first.dims() {
            let rows = self.third.dim(n - 1);
            let mut m = RatMatrix::zeros(rows, d);
            m.add_block(0, 0, &RatMatrix::identity(d));
            h.insert(n, m);
        }
        h
    }
}

/// Checks `f^n = d_Y^{n-1} h^n + h^{n+1} d_X^n` for every `n`.
pub fn is_homotopy(f: &ChainMap, h: &BTreeMap<Degree, RatMatrix>) -> bool {
    let (x, y) = (f.source(), f.target());
    let hn = |n: Degree| {
        h.get(&n)
            .cloned()
            .unwrap_or_else(|| RatMatrix::zeros(y.dim(n - 1), x.dim(n)))
    };
    x.dims().keys().all(|&n| {
        let a = y.diff(n - 1).matmul(&hn(n));
        let b = hn(n + 1).matmul(&x.diff(n));
        match (a, b) {
            (Ok(a), Ok(b)) => a.add(&b).is_ok_and(|s| s == f.component(n)),
            _ => false,
        }
    })
}

/// Mapping cone of `f : X → Y` with its canonical triangle.
pub fn cone(f: &ChainMap) -> (BoundedComplex, Triangle) {
    let (x, y) = (f.source(), f.target());
    let degrees: BTreeSet<Degree> = x
        .dims()
        .keys()
        .map(|n| n - 1)
        .chain(y.dims().keys().copied())
        .collect();
    let cdim = |n: Degree| x.dim(n + 1) + y.dim(n);
    let mut dims = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    for &n in &degrees {
        dims.insert(n, cdim(n));
        let mut d = RatMatrix::zeros(cdim(n + 1), cdim(n));
        d.add_block(0, 0, &x.diff(n + 1).neg());
        d.add_block(x.dim(n + 2), 0, &f.component(n + 1));
        d.add_block(x.dim(n + 2), x.dim(n + 1), &y.diff(n));
        diffs.insert(n, d);
    }
    let c = BoundedComplex::from_raw(dims, diffs).expect("cone blocks have consistent shapes");

    let mut incl = BTreeMap::new();
    for (&n, &d) in y.dims() {
        let mut m = RatMatrix::zeros(cdim(n), d);
        m.add_block(x.dim(n + 1), 0, &RatMatrix::identity(d));
        incl.insert(n, m);
    }
    let x1 = x.shift(1);
    let mut proj = BTreeMap::new();
    for (&n, &d) in x1.dims() {
        let mut m = RatMatrix::zeros(d, cdim(n));
        m.add_block(0, 0, &RatMatrix::identity(d));
        proj.insert(n, m);
    }
    let map_b = ChainMap::from_raw(y.clone(), c.clone(), incl).expect("inclusion shapes");
    let map_c = ChainMap::from_raw(c.clone(), x1, proj).expect("projection shapes");
    let triangle = Triangle {
        first: x.clone(),
        second: y.clone(),
        third: c.clone(),
        map_a: f.clone(),
        map_b,
        map_c,
        witness: TriangleWitness::Cone,
    };
    (c, triangle)
}

/// One summand `K^p ⊗ X^q` inside `(K ⊗ X)^{p+q}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorBlock {
    pub left: Degree,
    pub right: Degree,
    pub offset: usize,
    pub left_dim: usize,
    pub right_dim: usize,
}

impl TensorBlock {
    pub fn len(&self) -> usize {
        self.left_dim * self.right_dim
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Position of `e_a ⊗ e_b` in the total degree.
    pub fn index(&self, a: usize, b: usize) -> usize {
        self.offset + a * self.right_dim + b
    }
}

/// Block structure of a tensor totalization.
#[derive(Clone, Debug, Default)]
pub struct TensorLayout {
    degrees: BTreeMap<Degree, Vec<TensorBlock>>,
}

impl TensorLayout {
    pub fn new(left: &BTreeMap<Degree, usize>, right: &BTreeMap<Degree, usize>) -> Self {
        let mut degrees: BTreeMap<Degree, Vec<TensorBlock>> = BTreeMap::new();
        for (&p, &a) in left {
            for (&q, &b) in right {
                if a * b == 0 {
                    continue;
                }
                degrees.entry(p + q).or_default().push(TensorBlock {
                    left: p,
                    right: q,
                    offset: 0,
                    left_dim: a,
                    right_dim: b,
                });
            }
        }
        for blocks in degrees.values_mut() {
            blocks.sort_by_key(|b| b.left);
            let mut off = 0;
            for b in blocks.iter_mut() {
                b.offset = off;
                off += b.len();
            }
        }
        TensorLayout { degrees }
    }

    pub fn blocks(&self, n: Degree) -> &[TensorBlock] {
        self.degrees.get(&n).map_or(&[], Vec::as_slice)
    }

    pub fn block(&self, n: Degree, left: Degree) -> Option<&TensorBlock> {
        self.blocks(n).iter().find(|b| b.left == left)
    }

    pub fn dim(&self, n: Degree) -> usize {
        self.blocks(n).iter().map(TensorBlock::len).sum()
    }

    pub fn dims(&self) -> BTreeMap<Degree, usize> {
        self.degrees.keys().map(|&n| (n, self.dim(n))).collect()
    }
}

/// Total complex of `K ⊗ X` with the Koszul sign on the right factor.
pub fn tensor_total(k: &BoundedComplex, x: &BoundedComplex) -> BoundedComplex {
    let layout = TensorLayout::new(k.dims(), x.dims());
    let dims = layout.dims();
    let mut diffs = BTreeMap::new();
    for (&n, &dim) in &dims {
        let rows = layout.dim(n + 1);
        if rows == 0 {
            continue;
        }
        let mut d = RatMatrix::zeros(rows, dim);
        for blk in layout.blocks(n) {
            let (p, q) = (blk.left, blk.right);
            if let Some(to) = layout.block(n + 1, p + 1) {
                let m = k.diff(p).kron_identity(blk.right_dim);
                d.add_block(to.offset, blk.offset, &m);
            }
            if let Some(to) = layout.block(n + 1, p) {
                let m = x.diff(q).identity_kron(blk.left_dim).signed(p as i64);
                d.add_block(to.offset, blk.offset, &m);
            }
        }
        diffs.insert(n, d);
    }
    BoundedComplex::from_raw(dims, diffs).expect("tensor blocks have consistent shapes")
}

/// `g ⊗ f : K ⊗ X → K' ⊗ Y` for degree-0 maps (no Koszul sign arises).
pub fn tensor_map(g: &ChainMap, f: &ChainMap) -> ChainMap {
    let src_layout = TensorLayout::new(g.source().dims(), f.source().dims());
    let tgt_layout = TensorLayout::new(g.target().dims(), f.target().dims());
    let source = tensor_total(g.source(), f.source());
    let target = tensor_total(g.target(), f.target());
    let mut comps = BTreeMap::new();
    for (&n, &dim) in source.dims() {
        let rows = target.dim(n);
        if rows == 0 {
            continue;
        }
        let mut m = RatMatrix::zeros(rows, dim);
        for blk in src_layout.blocks(n) {
            if let Some(to) = tgt_layout.block(n, blk.left) {
                let piece = g.component(blk.left).kron(&f.component(blk.right));
                m.add_block(to.offset, blk.offset, &piece);
            }
        }
        comps.insert(n, m);
    }
    ChainMap::from_raw(source, target, comps).expect("tensor map shapes")
}

/// True iff `f` induces isomorphisms on homology in every degree.
pub fn is_quasi_iso(f: &ChainMap) -> bool {
    f.induced_on_homology()
        .values()
        .all(|m| m.rows() == m.cols() && m.rank() == m.rows())
}

/// The quasi-isomorphism `X → H(X)` onto the homology complex.
pub fn to_homology(x: &BoundedComplex) -> ChainMap {
    let h = x.homology();
    let target = x.homology_complex();
    let comps = h
        .into_iter()
        .filter(|(_, dh)| dh.dim() > 0)
        .map(|(n, dh)| (n, dh.projector))
        .collect();
    ChainMap::from_raw(x.clone(), target, comps).expect("projector shapes")
}

/// The quasi-isomorphism `H(X) → X` picking cycle representatives.
pub fn from_homology(x: &BoundedComplex) -> ChainMap {
    let h = x.homology();
    let source = x.homology_complex();
    let comps = h
        .into_iter()
        .filter(|(_, dh)| dh.dim() > 0)
        .map(|(n, dh)| (n, dh.reps))
        .collect();
    ChainMap::from_raw(source, x.clone(), comps).expect("representative shapes")
}

/// An explicit quasi-isomorphism `X → Y`, which exists over a field exactly
/// when the homology dimensions agree.
pub fn quasi_iso_between(x: &BoundedComplex, y: &BoundedComplex) -> Option<ChainMap> {
    if x.homology_dims() != y.homology_dims() {
        return None;
    }
    from_homology(y).compose(&to_homology(x)).ok()
}

/// Row-major vectorization of `⊕_n Hom(X^n, Y^{n+offset})`.
#[derive(Clone, Debug)]
pub(crate) struct HomBlocks {
    /// `(source degree n, rows = dim Y^{n+offset}, cols = dim X^n, start)`
    pub blocks: Vec<(Degree, usize, usize, usize)>,
    pub len: usize,
}

impl HomBlocks {
    pub fn new(x: &BoundedComplex, y: &BoundedComplex, offset: Degree) -> Self {
        let mut blocks = Vec::new();
        let mut len = 0;
        for (&n, &c) in x.dims() {
            let r = y.dim(n + offset);
            if r > 0 {
                blocks.push((n, r, c, len));
                len += r * c;
            }
        }
        HomBlocks { blocks, len }
    }

    pub fn find(&self, n: Degree) -> Option<(usize, usize, usize)> {
        self.blocks
            .iter()
            .find(|b| b.0 == n)
            .map(|&(_, r, c, s)| (r, c, s))
    }
}

/// Operator matrix of `f ↦ A f` on row-major `rows × cols` blocks: `A ⊗ I`.
pub(crate) fn left_mul_op(a: &RatMatrix, cols: usize) -> RatMatrix {
    a.kron_identity(cols)
}

/// Operator matrix of `f ↦ f B` on row-major `rows × _` blocks: `I ⊗ Bᵀ`.
pub(crate) fn right_mul_op(b: &RatMatrix, rows: usize) -> RatMatrix {
    b.transpose().identity_kron(rows)
}

/// Linear data for homotopy classes of maps `X → Y`: the chain-map
/// constraint and the image of the null-homotopies, both on the vectorized
/// degree-0 maps.
struct HomotopyData {
    maps: HomBlocks,
    constraint: RatMatrix,
    nullhomotopic: RatMatrix,
}

fn homotopy_data(x: &BoundedComplex, y: &BoundedComplex) -> HomotopyData {
    let maps = HomBlocks::new(x, y, 0);
    let eqs = HomBlocks::new(x, y, 1);
    let homs = HomBlocks::new(x, y, -1);
    // constraint: (d_Y f - f d_X) in ⊕ Hom(X^n, Y^{n+1})
    let mut constraint = RatMatrix::zeros(eqs.len, maps.len);
    for &(n, r, c, s) in &maps.blocks {
        if let Some((er, ec, es)) = eqs.find(n) {
            debug_assert_eq!(ec, c);
            let _ = er;
            constraint.add_block(es, s, &left_mul_op(&y.diff(n), c));
        }
        if let Some((_, _, es)) = eqs.find(n - 1) {
            constraint.add_block(es, s, &right_mul_op(&x.diff(n - 1), r).neg());
        }
    }
    // null-homotopic maps: d_Y h + h d_X
    let mut nullhomotopic = RatMatrix::zeros(maps.len, homs.len);
    for &(n, r, c, s) in &homs.blocks {
        if let Some((_, _, ms)) = maps.find(n) {
            nullhomotopic.add_block(ms, s, &left_mul_op(&y.diff(n - 1), c));
        }
        if let Some((_, _, ms)) = maps.find(n - 1) {
            nullhomotopic.add_block(ms, s, &right_mul_op(&x.diff(n - 1), r));
        }
    }
    HomotopyData {
        maps,
        constraint,
        nullhomotopic,
    }
}

fn unflatten(
    layout: &HomBlocks,
    x: &BoundedComplex,
    y: &BoundedComplex,
    v: &[Rational],
) -> ChainMap {
    let mut comps = BTreeMap::new();
    for &(n, r, c, s) in &layout.blocks {
        let rows = (0..r).map(|i| v[s + i * c..s + (i + 1) * c].to_vec()).collect();
        comps.insert(
            n,
            RatMatrix::from_rows_with_shape(r, c, rows).expect("block shape"),
        );
    }
    ChainMap::from_raw(x.clone(), y.clone(), comps).expect("block shapes")
}

fn flatten(layout: &HomBlocks, f: &ChainMap) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); layout.len];
    for &(n, r, c, s) in &layout.blocks {
        let m = f.component(n);
        for i in 0..r {
            for j in 0..c {
                v[s + i * c + j] = m.get(i, j).clone();
            }
        }
    }
    v
}

/// Chain maps `X → Y` up to homotopy: the dimension of the quotient and
/// chain maps whose classes form a basis of it.
#[derive(Clone, Debug)]
pub struct HomotopyClasses {
    pub dimension: usize,
    pub representatives: Vec<ChainMap>,
}

pub fn homotopy_classes(x: &BoundedComplex, y: &BoundedComplex) -> HomotopyClasses {
    let data = homotopy_data(x, y);
    let kernel = data.constraint.kernel_matrix();
    let hcount = data.nullhomotopic.cols();
    let stacked = data
        .nullhomotopic
        .hstack(&kernel)
        .expect("both live in the space of degree-0 maps");
    let (_, pivots) = stacked.rref();
    let representatives: Vec<ChainMap> = pivots
        .into_iter()
        .filter(|&p| p >= hcount)
        .map(|p| unflatten(&data.maps, x, y, &kernel.column(p - hcount)))
        .collect();
    HomotopyClasses {
        dimension: representatives.len(),
        representatives,
    }
}

/// A basis of the space of all chain maps `X → Y`.
pub fn chain_map_basis(x: &BoundedComplex, y: &BoundedComplex) -> Vec<ChainMap> {
    let data = homotopy_data(x, y);
    data.constraint
        .kernel_basis()
        .iter()
        .map(|v| unflatten(&data.maps, x, y, v))
        .collect()
}

/// Dimension of chain maps `X → Y` modulo null-homotopic ones.
pub fn hom_classes_dim(x: &BoundedComplex, y: &BoundedComplex) -> usize {
    let data = homotopy_data(x, y);
    let cycles = data.maps.len - data.constraint.rank();
    cycles - data.nullhomotopic.rank()
}

pub fn is_null_homotopic(f: &ChainMap) -> bool {
    let data = homotopy_data(f.source(), f.target());
    let v = flatten(&data.maps, f);
    let base = data.nullhomotopic.rank();
    let with = data
        .nullhomotopic
        .hstack(&RatMatrix::from_columns(data.maps.len, &[v]))
        .expect("same ambient space")
        .rank();
    with == base
}

/// Serialized form shared by complexes, kernels and datum files:
/// `{"dims": {"0": 1}, "diffs": {"0": [["1"], ["-1/2"]]}}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq, Default)]
pub struct ComplexRepr {
    #[serde(with = "crate::serde_util")]
    pub dims: BTreeMap<Degree, usize>,
    #[serde(with = "crate::serde_util", default)]
    pub diffs: BTreeMap<Degree, Vec<Vec<Rational>>>,
}

impl ComplexRepr {
    pub fn into_complex(self) -> Result<BoundedComplex, ComplexError> {
        let dim = |n: Degree| self.dims.get(&n).copied().unwrap_or(0);
        let mut diffs = BTreeMap::new();
        for (n, rows) in self.diffs.iter() {
            let (r, c) = (dim(n + 1), dim(*n));
            let m = if rows.is_empty() && (r == 0 || c == 0) {
                RatMatrix::zeros(r, c)
            } else {
                let found = (rows.len(), rows.first().map_or(0, Vec::len));
                RatMatrix::from_rows_with_shape(r, c, rows.clone()).map_err(|_| {
                    ComplexError::DiffShape {
                        degree: *n,
                        expected: (r, c),
                        found,
                    }
                })?
            };
            diffs.insert(*n, m);
        }
        BoundedComplex::new(self.dims, diffs)
    }
}

impl From<&BoundedComplex> for ComplexRepr {
    fn from(c: &BoundedComplex) -> Self {
        ComplexRepr {
            dims: c.dims().clone(),
            diffs: c.nonzero_diffs().map(|(n, m)| (n, m.to_rows())).collect(),
        }
    }
}

impl Serialize for BoundedComplex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ComplexRepr::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BoundedComplex {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        ComplexRepr::deserialize(deserializer)?
            .into_complex()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_i64(rows)
    }

    fn two_term(d0: RatMatrix) -> BoundedComplex {
        let dims = BTreeMap::from([(0, d0.cols()), (1, d0.rows())]);
        BoundedComplex::new(dims, BTreeMap::from([(0, d0)])).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(two_term(m(&[&[1]])).validate().is_ok());
        let bad = BoundedComplex::from_raw(
            BTreeMap::from([(0, 1), (1, 1), (2, 1)]),
            BTreeMap::from([(0, m(&[&[1]])), (1, m(&[&[1]]))]),
        )
        .unwrap();
        assert_eq!(bad.validate(), Err(ComplexError::NotAComplex { degree: 0 }));
        assert!(BoundedComplex::zero().validate().is_ok());
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let err = BoundedComplex::from_raw(
            BTreeMap::from([(0, 1), (1, 2)]),
            BTreeMap::from([(0, m(&[&[1, 1]]))]),
        )
        .unwrap_err();
        assert!(matches!(err, ComplexError::DiffShape { degree: 0, .. }));
    }

    #[test]
    fn shift_examples() {
        let x = two_term(m(&[&[1], &[1]]));
        assert_eq!(x.shift(0), x);
        assert_eq!(x.shift(1).shift(-1), x);
        let q = BoundedComplex::concentrated(0, 1).shift(1);
        assert_eq!(q.dims(), &BTreeMap::from([(-1, 1)]));
        assert_eq!(x.shift(1).diff(-1), m(&[&[-1], &[-1]]));
    }

    #[test]
    fn homology_examples() {
        let g = BoundedComplex::graded(BTreeMap::from([(0, 2), (3, 1)]));
        assert_eq!(g.homology_dims(), BTreeMap::from([(0, 2), (3, 1)]));
        assert!(two_term(m(&[&[1]])).is_acyclic());
        let x = two_term(m(&[&[1], &[1]]));
        assert_eq!(x.homology_dims(), BTreeMap::from([(1, 1)]));
    }

    #[test]
    fn homology_bases_are_consistent() {
        let x = two_term(m(&[&[1, 2], &[2, 4], &[0, 0]]));
        let h = x.homology();
        for (&n, dh) in &h {
            let d = x.diff(n);
            // reps are cycles
            assert!(d.matmul(&dh.reps).unwrap().is_zero());
            // projector ∘ reps = id
            assert_eq!(
                dh.projector.matmul(&dh.reps).unwrap(),
                RatMatrix::identity(dh.dim())
            );
            // projector kills boundaries
            assert!(dh.projector.matmul(&x.diff(n - 1)).unwrap().is_zero());
        }
        let dims: BTreeMap<_, _> = h
            .iter()
            .filter(|(_, d)| d.dim() > 0)
            .map(|(&n, d)| (n, d.dim()))
            .collect();
        assert_eq!(dims, x.homology_dims());
    }

    #[test]
    fn cone_examples() {
        let x = two_term(m(&[&[1], &[1]]));
        let (c, t) = cone(&ChainMap::identity(&x));
        assert!(c.validate().is_ok());
        assert!(c.is_acyclic());
        t.check().unwrap();

        let y = BoundedComplex::graded(BTreeMap::from([(0, 1), (2, 2)]));
        let (c0, _) = cone(&ChainMap::zero(&x, &y));
        let mut expected = x.shift(1).homology_dims();
        for (n, h) in y.homology_dims() {
            *expected.entry(n).or_default() += h;
        }
        assert_eq!(c0.homology_dims(), expected);

        let q = BoundedComplex::concentrated(0, 1);
        let two = ChainMap::new(q.clone(), q.clone(), BTreeMap::from([(0, m(&[&[2]]))])).unwrap();
        assert!(cone(&two).0.is_acyclic());
    }

    #[test]
    fn cone_composite_is_nullhomotopic() {
        let x = two_term(m(&[&[1], &[1]]));
        let y = BoundedComplex::graded(BTreeMap::from([(0, 1), (1, 2)]));
        let f = ChainMap::new(
            x.clone(),
            y.clone(),
            BTreeMap::from([(0, m(&[&[0]])), (1, m(&[&[1, 0], &[0, 1]]))]),
        );
        // d_Y f^0 = 0 but f^1 d_X ≠ 0, so this is not a chain map
        assert!(matches!(f, Err(ComplexError::NotAChainMap { degree: 0 })));
        let f = ChainMap::new(
            x.clone(),
            y,
            BTreeMap::from([(1, m(&[&[1, -1], &[1, -1]]))]),
        )
        .unwrap();
        let t = Triangle::from_cone(&f);
        let composite = t.map_b.compose(&t.map_a).unwrap();
        assert!(is_homotopy(&composite, &t.composite_homotopy()));
        assert!(is_null_homotopic(&composite));
    }

    #[test]
    fn quasi_iso_examples() {
        let x = two_term(m(&[&[1], &[1]]));
        assert!(is_quasi_iso(&ChainMap::identity(&x)));
        assert!(!is_quasi_iso(&ChainMap::zero(&x, &x)));
        let (c, _) = cone(&ChainMap::identity(&x));
        assert!(is_quasi_iso(&ChainMap::zero(&c, &BoundedComplex::zero())));
        assert!(is_quasi_iso(&to_homology(&x)));
        assert!(is_quasi_iso(&from_homology(&x)));
        to_homology(&x).check().unwrap();
        from_homology(&x).check().unwrap();
    }

    #[test]
    fn hom_classes_examples() {
        let q = BoundedComplex::concentrated(0, 1);
        assert_eq!(hom_classes_dim(&q, &q), 1);
        let x = two_term(m(&[&[1]]));
        let (c, _) = cone(&ChainMap::identity(&x));
        assert_eq!(hom_classes_dim(&c, &q), 0);
        let g = BoundedComplex::graded(BTreeMap::from([(0, 1), (1, 1)]));
        assert_eq!(hom_classes_dim(&g, &q), 1);
        let classes = homotopy_classes(&g, &q);
        assert_eq!(classes.dimension, 1);
        assert!(!is_null_homotopic(&classes.representatives[0]));
    }

    #[test]
    fn tensor_examples() {
        let x = two_term(m(&[&[1, 2], &[0, 3]]));
        let unit = BoundedComplex::concentrated(0, 1);
        assert_eq!(tensor_total(&unit, &x), x);
        let down = BoundedComplex::concentrated(-1, 1);
        let t = tensor_total(&down, &x);
        assert_eq!(t.dims(), x.shift(1).dims());
        // (-1)^{-1} sign on d_X
        assert_eq!(t.diff(-1), x.diff(0).neg());
    }

    #[test]
    fn serialization_roundtrip() {
        let x = two_term(m(&[&[1], &[-1]]));
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"dims":{"0":1,"1":2},"diffs":{"0":[["1"],["-1"]]}}"#);
        let back: BoundedComplex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        let bad = r#"{"dims":{"0":1,"1":1,"2":1},"diffs":{"0":[["1"]],"1":[["1"]]}}"#;
        assert!(serde_json::from_str::<BoundedComplex>(bad).is_err());
    }
}

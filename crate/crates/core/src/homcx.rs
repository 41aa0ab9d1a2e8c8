//! Hom complexes and their graded Poincaré polynomials.
//!
//! `Hom(X, Y)^n = ⊕_i Hom(X^i, Y^{i+n})`, blocks in ascending `i`, each block
//! vectorized row-major, with `(df)^i = d_Y f^i − (−1)^n f^{i+1} d_X^i`. Over a
//! field this complex computes `RHom(X, Y)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cxcore::{
    acyclic_by_ranks, left_mul_op, right_mul_op, BoundedComplex, ChainMap, Degree, HomBlocks,
};
use crate::ratlin::RatMatrix;

/// Integer Laurent polynomial in `q`; only nonzero coefficients are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LaurentPoly {
    #[serde(with = "crate::serde_util")]
    coeffs: BTreeMap<i32, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `c·q^e`.
    pub fn monomial(c: i64, e: i32) -> Self {
        Self::from_coeffs([(e, c)])
    }

    pub fn from_coeffs(coeffs: impl IntoIterator<Item = (i32, i64)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in coeffs {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: i32, c: i64) {
        let slot = self.coeffs.entry(e).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.coeffs.remove(&e);
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<i32, i64> {
        &self.coeffs
    }

    pub fn coeff(&self, e: i32) -> i64 {
        self.coeffs.get(&e).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut p = self.clone();
        for (&e, &c) in &other.coeffs {
            p.add_term(e, c);
        }
        p
    }

    pub fn scale(&self, c: i64) -> LaurentPoly {
        LaurentPoly::from_coeffs(self.coeffs.iter().map(|(&e, &a)| (e, a * c)))
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i32) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, &c)| (e + k, c)).collect(),
        }
    }

    /// Value at `q = 1` or `q = −1`; `None` for any other point.
    pub fn eval(&self, at: i64) -> Option<i64> {
        match at {
            1 => Some(self.coeffs.values().sum()),
            -1 => Some(
                self.coeffs
                    .iter()
                    .map(|(&e, &c)| if e.rem_euclid(2) == 0 { c } else { -c })
                    .sum(),
            ),
            _ => None,
        }
    }

    /// `P(1)`, the total weight.
    pub fn w_tot(&self) -> i64 {
        self.coeffs.values().sum()
    }

    /// `P(−1)`, the Euler weight.
    pub fn w_chi(&self) -> i64 {
        self.eval(-1).expect("−1 is a valid specialization")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (&e, &c)) in self.coeffs.iter().enumerate() {
            let mag = c.unsigned_abs();
            match (k, c < 0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            match e {
                0 => write!(f, "{mag}")?,
                _ => {
                    if mag != 1 {
                        write!(f, "{mag}*")?;
                    }
                    if e == 1 {
                        f.write_str("q")?;
                    } else {
                        write!(f, "q^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Degrees where `Hom(X, Y)` can be nonzero.
fn hom_degrees(x: &BoundedComplex, y: &BoundedComplex) -> Option<(Degree, Degree)> {
    let (xl, xh) = x.span()?;
    let (yl, yh) = y.span()?;
    Some((yl - xh, yh - xl))
}

/// Differential `Hom(X,Y)^n → Hom(X,Y)^{n+1}` in the vectorized layouts.
fn hom_diff(x: &BoundedComplex, y: &BoundedComplex, n: Degree) -> RatMatrix {
    let src = HomBlocks::new(x, y, n);
    let tgt = HomBlocks::new(x, y, n + 1);
    let mut d = RatMatrix::zeros(tgt.len, src.len);
    for &(i, r, c, s) in &src.blocks {
        if let Some((_, _, t)) = tgt.find(i) {
            d.add_block(t, s, &left_mul_op(&y.diff(i + n), c));
        }
        if let Some((_, _, t)) = tgt.find(i - 1) {
            d.add_block(t, s, &right_mul_op(&x.diff(i - 1), r).signed(n as i64 + 1));
        }
    }
    d
}

pub fn hom_complex(x: &BoundedComplex, y: &BoundedComplex) -> BoundedComplex {
    let Some((lo, hi)) = hom_degrees(x, y) else {
        return BoundedComplex::zero();
    };
    let mut dims = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    for n in lo..=hi {
        let len = HomBlocks::new(x, y, n).len;
        if len == 0 {
            continue;
        }
        dims.insert(n, len);
        if HomBlocks::new(x, y, n + 1).len > 0 {
            diffs.insert(n, hom_diff(x, y, n));
        }
    }
    BoundedComplex::from_raw(dims, diffs).expect("hom blocks have consistent shapes")
}

/// Whether `Hom(X, Y)` has any cohomology; builds only the differentials it
/// needs.
pub fn hom_nonzero(x: &BoundedComplex, y: &BoundedComplex) -> bool {
    let Some((lo, hi)) = hom_degrees(x, y) else {
        return false;
    };
    let dims: BTreeMap<Degree, usize> = (lo..=hi)
        .map(|n| (n, HomBlocks::new(x, y, n).len))
        .filter(|&(_, l)| l > 0)
        .collect();
    !acyclic_by_ranks(&dims, |n| hom_diff(x, y, n).rank())
}

pub fn rhom_cohomology(x: &BoundedComplex, y: &BoundedComplex) -> BTreeMap<Degree, usize> {
    hom_complex(x, y).homology_dims()
}

/// `Σ_m dim H^m(Hom(X, Y)) q^m`.
pub fn poincare(x: &BoundedComplex, y: &BoundedComplex) -> LaurentPoly {
    poincare_of(&hom_complex(x, y))
}

/// Poincaré polynomial of the cohomology of any complex.
pub fn poincare_of(c: &BoundedComplex) -> LaurentPoly {
    LaurentPoly::from_coeffs(
        c.homology_dims()
            .into_iter()
            .map(|(n, h)| (n, h as i64)),
    )
}

/// `f^* : Hom(T, Y) → Hom(S, Y)`, `g ↦ g ∘ f`, for `f : S → T`.
pub fn precompose(f: &ChainMap, y: &BoundedComplex) -> ChainMap {
    let source = hom_complex(f.target(), y);
    let target = hom_complex(f.source(), y);
    let mut comps = BTreeMap::new();
    for &n in target.dims().keys() {
        let src = HomBlocks::new(f.target(), y, n);
        let tgt = HomBlocks::new(f.source(), y, n);
        let mut m = RatMatrix::zeros(tgt.len, src.len);
        for &(i, r, _, t) in &tgt.blocks {
            if let Some((_, _, s)) = src.find(i) {
                m.add_block(t, s, &right_mul_op(&f.component(i), r));
            }
        }
        comps.insert(n, m);
    }
    ChainMap::from_raw(source, target, comps).expect("precomposition shapes")
}

/// `g_* : Hom(X, Y) → Hom(X, Y')`, `h ↦ g ∘ h`, for `g : Y → Y'`.
pub fn postcompose(x: &BoundedComplex, g: &ChainMap) -> ChainMap {
    let source = hom_complex(x, g.source());
    let target = hom_complex(x, g.target());
    let mut comps = BTreeMap::new();
    for &n in target.dims().keys() {
        let src = HomBlocks::new(x, g.source(), n);
        let tgt = HomBlocks::new(x, g.target(), n);
        let mut m = RatMatrix::zeros(tgt.len, src.len);
        for &(i, _, c, t) in &tgt.blocks {
            if let Some((_, _, s)) = src.find(i) {
                m.add_block(t, s, &left_mul_op(&g.component(i + n), c));
            }
        }
        comps.insert(n, m);
    }
    ChainMap::from_raw(source, target, comps).expect("postcomposition shapes")
}

/// A degree-`n` element of `Hom(X, Y)`, unvectorized into its blocks
/// `X^i → Y^{i+n}`.
pub fn hom_element(
    x: &BoundedComplex,
    y: &BoundedComplex,
    n: Degree,
    v: &[crate::ratlin::Rational],
) -> BTreeMap<Degree, RatMatrix> {
    let layout = HomBlocks::new(x, y, n);
    assert_eq!(v.len(), layout.len, "vector length does not match Hom degree");
    layout
        .blocks
        .iter()
        .map(|&(i, r, c, s)| {
            let rows = (0..r).map(|a| v[s + a * c..s + (a + 1) * c].to_vec()).collect();
            (i, RatMatrix::from_rows_with_shape(r, c, rows).expect("block shape"))
        })
        .collect()
}

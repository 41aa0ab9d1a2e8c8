//! Exact dense linear algebra over the rationals.
//!
//! Every homological computation in the crate bottoms out here: ranks of
//! differentials, kernels, images and change-of-basis inverses. Nothing in
//! this module rounds.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
}

/// An exact rational number, always stored in lowest terms with a positive
/// denominator. Values whose numerator and denominator fit in `i64` live
/// inline; anything larger is a big rational.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rational(Repr);

// Canonical: `Small` whenever both parts fit, so structural equality is
// value equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Repr {
    Small(i64, i64),
    Big(Box<BigRational>),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        // Ratio::new reduces and moves the sign onto the numerator; it panics on a zero
        // denominator, which is a programming error here.
        Rational::from_big(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        let n: BigInt = n.into();
        match n.to_i64() {
            Some(v) => Rational(Repr::Small(v, 1)),
            None => Rational(Repr::Big(Box::new(BigRational::from_integer(n)))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(Box::new(r))),
        }
    }

    /// `n / d` for `d != 0`, reduced.
    fn from_i128(n: i128, d: i128) -> Self {
        let g = gcd_u128(n.unsigned_abs(), d.unsigned_abs()) as i128;
        let (mut n, mut d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        if d < 0 {
            (n, d) = (-n, -d);
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(Box::new(BigRational::new_raw(BigInt::from(n), BigInt::from(d))))),
        }
    }

    fn big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => (**r).clone(),
        }
    }

    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    /// `(numerator, denominator)` when both fit in `i64`.
    pub fn to_small(&self) -> Option<(i64, i64)> {
        match self.0 {
            Repr::Small(n, d) => Some((n, d)),
            Repr::Big(_) => None,
        }
    }

    pub fn recip(&self) -> Self {
        match self.0 {
            Repr::Small(n, d) => Rational::from_i128(d as i128, n as i128),
            Repr::Big(ref r) => Rational::from_big(r.recip()),
        }
    }

    pub fn abs(&self) -> Self {
        match self.0 {
            Repr::Small(n, d) => Rational::from_i128((n as i128).abs(), d as i128),
            Repr::Big(ref r) => Rational::from_big(r.abs()),
        }
    }

    pub fn to_big_rational(&self) -> BigRational {
        self.big()
    }

    fn add_ref(&self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, 1), Repr::Small(c, 1)) => match a.checked_add(*c) {
                Some(v) => Rational(Repr::Small(v, 1)),
                None => Rational::from_i128(*a as i128 + *c as i128, 1),
            },
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Rational::from_i128(a * d + c * b, b * d)
            }
            _ => Rational::from_big(self.big() + rhs.big()),
        }
    }

    fn mul_ref(&self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, 1), Repr::Small(c, 1)) => match a.checked_mul(*c) {
                Some(v) => Rational(Repr::Small(v, 1)),
                None => Rational::from_i128(*a as i128 * *c as i128, 1),
            },
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                // cross-cancel first so the i128 products stay reduced
                let g1 = gcd_u64(a.unsigned_abs(), d.unsigned_abs()).max(1) as i128;
                let g2 = gcd_u64(c.unsigned_abs(), b.unsigned_abs()).max(1) as i128;
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Rational::from_i128((a / g1) * (c / g2), (b / g2) * (d / g1))
            }
            _ => Rational::from_big(self.big() * rhs.big()),
        }
    }

    fn neg_ref(&self) -> Rational {
        match self.0 {
            Repr::Small(n, d) if n != i64::MIN => Rational(Repr::Small(-n, d)),
            _ => Rational::from_big(-self.big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.big().cmp(&other.big()),
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational(Repr::Small(n as i64, 1))
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational::from_big(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for Rational {
    type Err = LinalgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LinalgError::ParseRational(s.to_string());
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (t, None),
        };
        let numer: BigInt = num.trim().parse().map_err(|_| bad())?;
        let denom: BigInt = match den {
            Some(d) => {
                let d = d.trim();
                // sign lives on the numerator only
                if d.starts_with('-') || d.starts_with('+') {
                    return Err(bad());
                }
                d.parse().map_err(|_| bad())?
            }
            None => BigInt::one(),
        };
        if denom.is_zero() {
            return Err(bad());
        }
        Ok(Rational::new(numer, denom))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Text {
            Text(String),
            Int(i64),
        }
        match Text::deserialize(deserializer)? {
            Text::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Text::Int(n) => Ok(Rational::from(n)),
        }
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &'a Rational) -> Rational {
        self.add_ref(rhs)
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &'a Rational) -> Rational {
        self.add_ref(&rhs.neg_ref())
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &'a Rational) -> Rational {
        self.mul_ref(rhs)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        self.mul_ref(&rhs.recip())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        self.neg_ref()
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        self.neg_ref()
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = self.add_ref(rhs);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = self.add_ref(&rhs.neg_ref());
    }
}

static ZERO: Rational = Rational(Repr::Small(0, 1));

/// Row-sparse matrix of rationals: each row keeps its nonzero entries sorted
/// by column. Zero-row and zero-column matrices are ordinary values.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseRow<Rational>>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        RatMatrix {
            rows: n,
            cols: n,
            data: (0..n).map(|i| vec![(i, Rational::one())]).collect(),
        }
    }

    fn from_sparse(rows: usize, cols: usize, data: Vec<SparseRow<Rational>>) -> Self {
        debug_assert_eq!(data.len(), rows);
        RatMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_shape(rows.len(), cols, rows)
    }

    /// Like [`RatMatrix::from_rows`] but with an explicit shape, so that `0×n`
    /// matrices survive a trip through a list-of-rows representation.
    pub fn from_rows_with_shape(
        nrows: usize,
        ncols: usize,
        rows: Vec<Vec<Rational>>,
    ) -> Result<Self, LinalgError> {
        if rows.len() != nrows {
            return Err(LinalgError::DimensionMismatch {
                op: "from_rows",
                left: (nrows, ncols),
                right: (rows.len(), rows.first().map_or(0, Vec::len)),
            });
        }
        let mut data = Vec::with_capacity(nrows);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(LinalgError::RaggedRows {
                    row: i,
                    found: row.len(),
                    expected: ncols,
                });
            }
            data.push(row.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect());
        }
        Ok(RatMatrix {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    /// Convenience constructor for integer literals, mostly used by tests and
    /// generators.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), ncols, "ragged integer matrix literal");
                r.iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(j, &x)| (j, Rational::from(x)))
                    .collect()
            })
            .collect();
        RatMatrix {
            rows: rows.len(),
            cols: ncols,
            data,
        }
    }

    pub fn from_columns(nrows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut data = vec![Vec::new(); nrows];
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), nrows);
            for (i, x) in c.iter().enumerate() {
                if !x.is_zero() {
                    data[i].push((j, x.clone()));
                }
            }
        }
        RatMatrix::from_sparse(nrows, columns.len(), data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    /// Number of stored nonzero entries.
    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        let row = &self.data[i];
        match row.binary_search_by_key(&j, |e| e.0) {
            Ok(k) => &row[k].1,
            Err(_) => &ZERO,
        }
    }

    pub fn set(&mut self, i: usize, j: usize, x: Rational) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        let row = &mut self.data[i];
        match row.binary_search_by_key(&j, |e| e.0) {
            Ok(k) if x.is_zero() => {
                row.remove(k);
            }
            Ok(k) => row[k].1 = x,
            Err(_) if x.is_zero() => {}
            Err(k) => row.insert(k, (j, x)),
        }
    }

    /// Nonzero entries of row `i` as `(column, value)`, sorted by column.
    pub fn row_entries(&self, i: usize) -> &[(usize, Rational)] {
        &self.data[i]
    }

    pub fn row(&self, i: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.cols];
        for (j, x) in &self.data[i] {
            out[*j] = x.clone();
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![Vec::new(); self.cols];
        for (i, row) in self.data.iter().enumerate() {
            for (j, x) in row {
                data[*j].push((i, x.clone()));
            }
        }
        RatMatrix::from_sparse(self.cols, self.rows, data)
    }

    pub fn matmul(&self, rhs: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut acc = vec![Rational::zero(); rhs.cols];
        let mut touched = vec![false; rhs.cols];
        let mut cols_hit = Vec::new();
        let data = self
            .data
            .iter()
            .map(|row| {
                for (k, a) in row {
                    for (j, b) in &rhs.data[*k] {
                        if !touched[*j] {
                            touched[*j] = true;
                            cols_hit.push(*j);
                        }
                        acc[*j] += &(a * b);
                    }
                }
                cols_hit.sort_unstable();
                let mut out = Vec::with_capacity(cols_hit.len());
                for &j in &cols_hit {
                    touched[j] = false;
                    let v = std::mem::take(&mut acc[j]);
                    if !v.is_zero() {
                        out.push((j, v));
                    }
                }
                cols_hit.clear();
                out
            })
            .collect();
        Ok(RatMatrix::from_sparse(self.rows, rhs.cols, data))
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch {
                op: "mul_vec",
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        Ok(self
            .data
            .iter()
            .map(|row| {
                let mut acc = Rational::zero();
                for (j, a) in row {
                    if !v[*j].is_zero() {
                        acc += &(a * &v[*j]);
                    }
                }
                acc
            })
            .collect())
    }

    fn merge_with(&self, rhs: &RatMatrix, op: &'static str, negate_rhs: bool) -> Result<RatMatrix, LinalgError> {
        if self.shape() != rhs.shape() {
            return Err(LinalgError::DimensionMismatch {
                op,
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(x, y)| {
                let mut out = Vec::with_capacity(x.len() + y.len());
                let (mut a, mut b) = (0, 0);
                while a < x.len() || b < y.len() {
                    let ja = x.get(a).map_or(usize::MAX, |e| e.0);
                    let jb = y.get(b).map_or(usize::MAX, |e| e.0);
                    let yv = |b: usize| if negate_rhs { -&y[b].1 } else { y[b].1.clone() };
                    let (j, v) = if ja < jb {
                        a += 1;
                        (ja, x[a - 1].1.clone())
                    } else if jb < ja {
                        b += 1;
                        (jb, yv(b - 1))
                    } else {
                        a += 1;
                        b += 1;
                        (ja, &x[a - 1].1 + &yv(b - 1))
                    };
                    if !v.is_zero() {
                        out.push((j, v));
                    }
                }
                out
            })
            .collect();
        Ok(RatMatrix::from_sparse(self.rows, self.cols, data))
    }

    pub fn add(&self, rhs: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        self.merge_with(rhs, "add", false)
    }

    pub fn sub(&self, rhs: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        self.merge_with(rhs, "sub", true)
    }

    pub fn scale(&self, c: &Rational) -> RatMatrix {
        if c.is_zero() {
            return RatMatrix::zeros(self.rows, self.cols);
        }
        let data = self
            .data
            .iter()
            .map(|row| row.iter().map(|(j, x)| (*j, x * c)).collect())
            .collect();
        RatMatrix::from_sparse(self.rows, self.cols, data)
    }

    pub fn neg(&self) -> RatMatrix {
        let data = self
            .data
            .iter()
            .map(|row| row.iter().map(|(j, x)| (*j, -x)).collect())
            .collect();
        RatMatrix::from_sparse(self.rows, self.cols, data)
    }

    /// Multiplies by `(-1)^k`.
    pub fn signed(&self, k: i64) -> RatMatrix {
        if k.rem_euclid(2) == 0 {
            self.clone()
        } else {
            self.neg()
        }
    }

    /// `self ⊗ I_n`.
    pub fn kron_identity(&self, n: usize) -> RatMatrix {
        let mut data = Vec::with_capacity(self.rows * n);
        for arow in &self.data {
            for k in 0..n {
                data.push(arow.iter().map(|(j, a)| (j * n + k, a.clone())).collect());
            }
        }
        RatMatrix::from_sparse(self.rows * n, self.cols * n, data)
    }

    /// `I_n ⊗ self`.
    pub fn identity_kron(&self, n: usize) -> RatMatrix {
        let mut data = Vec::with_capacity(self.rows * n);
        for k in 0..n {
            for brow in &self.data {
                data.push(brow.iter().map(|(l, b)| (k * self.cols + l, b.clone())).collect());
            }
        }
        RatMatrix::from_sparse(self.rows * n, self.cols * n, data)
    }

    /// Kronecker product `self ⊗ rhs`, with index `(i*rhs.rows + k, j*rhs.cols + l)`.
    pub fn kron(&self, rhs: &RatMatrix) -> RatMatrix {
        let mut data = Vec::with_capacity(self.rows * rhs.rows);
        for arow in &self.data {
            for brow in &rhs.data {
                let mut out = Vec::with_capacity(arow.len() * brow.len());
                for (j, a) in arow {
                    for (l, b) in brow {
                        out.push((j * rhs.cols + l, a * b));
                    }
                }
                data.push(out);
            }
        }
        RatMatrix::from_sparse(self.rows * rhs.rows, self.cols * rhs.cols, data)
    }

    /// Adds `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &RatMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for (i, brow) in block.data.iter().enumerate() {
            if brow.is_empty() {
                continue;
            }
            let row = &mut self.data[r0 + i];
            // fast path: the block lands right of everything already stored
            if row.last().is_none_or(|e| e.0 < c0) {
                row.extend(brow.iter().map(|(j, x)| (c0 + j, x.clone())));
                continue;
            }
            let shifted: Vec<(usize, Rational)> = brow.iter().map(|(j, x)| (c0 + j, x.clone())).collect();
            let old = std::mem::take(row);
            let mut out = Vec::with_capacity(old.len() + shifted.len());
            let (mut a, mut b) = (0, 0);
            while a < old.len() || b < shifted.len() {
                let ja = old.get(a).map_or(usize::MAX, |e| e.0);
                let jb = shifted.get(b).map_or(usize::MAX, |e| e.0);
                let (j, v) = if ja < jb {
                    a += 1;
                    (ja, old[a - 1].1.clone())
                } else if jb < ja {
                    b += 1;
                    (jb, shifted[b - 1].1.clone())
                } else {
                    a += 1;
                    b += 1;
                    (ja, &old[a - 1].1 + &shifted[b - 1].1)
                };
                if !v.is_zero() {
                    out.push((j, v));
                }
            }
            *row = out;
        }
    }

    pub fn block(&self, r0: usize, c0: usize, nrows: usize, ncols: usize) -> RatMatrix {
        assert!(r0 + nrows <= self.rows && c0 + ncols <= self.cols);
        let data = self.data[r0..r0 + nrows]
            .iter()
            .map(|row| {
                let start = row.partition_point(|e| e.0 < c0);
                row[start..]
                    .iter()
                    .take_while(|e| e.0 < c0 + ncols)
                    .map(|(j, x)| (j - c0, x.clone()))
                    .collect()
            })
            .collect();
        RatMatrix::from_sparse(nrows, ncols, data)
    }

    /// The rows listed in `which`, in that order.
    pub fn select_rows(&self, which: &[usize]) -> RatMatrix {
        let data = which.iter().map(|&i| self.data[i].clone()).collect();
        RatMatrix::from_sparse(which.len(), self.cols, data)
    }

    pub fn hstack(&self, rhs: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.rows != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "hstack",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = RatMatrix::zeros(self.rows, self.cols + rhs.cols);
        out.add_block(0, 0, self);
        out.add_block(0, self.cols, rhs);
        Ok(out)
    }

    pub fn vstack(&self, rhs: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.cols != rhs.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "vstack",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        Ok(RatMatrix::from_sparse(self.rows + rhs.rows, self.cols, data))
    }

    /// Reduced row echelon form together with the pivot columns.
    ///
    /// Elimination runs on sparse integer-scaled rows (checked `i128` first,
    /// big integers on overflow); rationals are formed only for the final rows.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        if self.rows == 0 || self.cols == 0 {
            return (self.clone(), Vec::new());
        }
        let small = self.small_integer_rows().and_then(|mut rows| {
            let pivots = echelon(&mut rows, self.cols, true)?;
            Some((rows, pivots))
        });
        let (data, pivots): (Vec<SparseRow<Rational>>, Vec<usize>) = match small {
            Some((rows, pivots)) => {
                let data = rows
                    .into_iter()
                    .enumerate()
                    .map(|(r, row)| {
                        if r >= pivots.len() {
                            return Vec::new();
                        }
                        let p = row[0].1;
                        row.into_iter().map(|(j, v)| (j, Rational::from_i128(v, p))).collect()
                    })
                    .collect();
                (data, pivots)
            }
            None => {
                let mut rows = self.integer_rows();
                let pivots = echelon(&mut rows, self.cols, true)
                    .expect("big integer elimination cannot overflow");
                let data = rows
                    .into_iter()
                    .enumerate()
                    .map(|(r, row)| {
                        if r >= pivots.len() {
                            return Vec::new();
                        }
                        let p = row[0].1.clone();
                        row.into_iter().map(|(j, v)| (j, Rational::new(v, p.clone()))).collect()
                    })
                    .collect();
                (data, pivots)
            }
        };
        (RatMatrix::from_sparse(self.rows, self.cols, data), pivots)
    }

    /// Rank over ℚ, by fraction-free forward elimination on integer-scaled rows.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        if let Some(mut small) = self.small_integer_rows() {
            if let Some(p) = echelon(&mut small, self.cols, false) {
                return p.len();
            }
        }
        let mut rows = self.integer_rows();
        echelon(&mut rows, self.cols, false)
            .expect("big integer elimination cannot overflow")
            .len()
    }

    /// Each row multiplied by the lcm of its denominators.
    fn integer_rows(&self) -> Vec<SparseRow<BigInt>> {
        self.data
            .iter()
            .map(|row| {
                let l = row.iter().fold(BigInt::one(), |acc, (_, x)| acc.lcm(&x.denom()));
                row.iter().map(|(j, x)| (*j, x.numer() * (&l / x.denom()))).collect()
            })
            .collect()
    }

    /// [`RatMatrix::integer_rows`] in `i128`, when every entry and row
    /// multiplier is small enough.
    fn small_integer_rows(&self) -> Option<Vec<SparseRow<i128>>> {
        self.data
            .iter()
            .map(|row| {
                let mut l: i128 = 1;
                for (_, x) in row {
                    let (_, d) = x.to_small()?;
                    if d != 1 {
                        let d = d as i128;
                        l = (l / gcd_u128(l as u128, d as u128) as i128).checked_mul(d)?;
                    }
                }
                if l == 1 {
                    return row.iter().map(|(j, x)| x.to_small().map(|(n, _)| (*j, n as i128))).collect();
                }
                row.iter()
                    .map(|(j, x)| {
                        let (n, d) = x.to_small()?;
                        Some((*j, (n as i128).checked_mul(l / d as i128)?))
                    })
                    .collect()
            })
            .collect()
    }

    /// Basis of `{v : self·v = 0}`, one vector per free column of the RREF.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        Self::kernel_from_rref(self.cols, &r, &pivots)
    }

    /// Kernel basis read off an already computed RREF.
    pub fn kernel_from_rref(ncols: usize, r: &RatMatrix, pivots: &[usize]) -> Vec<Vec<Rational>> {
        let mut slot = vec![usize::MAX; ncols];
        let mut is_pivot = vec![false; ncols];
        for &p in pivots {
            is_pivot[p] = true;
        }
        let mut basis: Vec<Vec<Rational>> = Vec::new();
        for f in 0..ncols {
            if !is_pivot[f] {
                slot[f] = basis.len();
                let mut v = vec![Rational::zero(); ncols];
                v[f] = Rational::one();
                basis.push(v);
            }
        }
        for (row, &p) in pivots.iter().enumerate() {
            for (j, x) in r.row_entries(row) {
                if *j != p {
                    basis[slot[*j]][p] = -x;
                }
            }
        }
        basis
    }

    /// Kernel basis as the columns of a `cols × nullity` matrix.
    pub fn kernel_matrix(&self) -> RatMatrix {
        let (r, pivots) = self.rref();
        Self::kernel_matrix_from_rref(self.cols, &r, &pivots)
    }

    /// [`RatMatrix::kernel_from_rref`] as the columns of a matrix, built
    /// without dense intermediates.
    pub fn kernel_matrix_from_rref(ncols: usize, r: &RatMatrix, pivots: &[usize]) -> RatMatrix {
        let mut pivot_row = vec![usize::MAX; ncols];
        for (k, &p) in pivots.iter().enumerate() {
            pivot_row[p] = k;
        }
        let mut slot = vec![usize::MAX; ncols];
        let mut nullity = 0;
        for f in 0..ncols {
            if pivot_row[f] == usize::MAX {
                slot[f] = nullity;
                nullity += 1;
            }
        }
        let data = (0..ncols)
            .map(|i| match pivot_row[i] {
                usize::MAX => vec![(slot[i], Rational::one())],
                k => r
                    .row_entries(k)
                    .iter()
                    .filter(|(j, _)| *j != i)
                    .map(|(j, x)| (slot[*j], -x))
                    .collect(),
            })
            .collect();
        RatMatrix::from_sparse(ncols, nullity, data)
    }

    /// Columns of `self` forming a basis of its column space (the pivot columns).
    pub fn image_matrix(&self) -> RatMatrix {
        let (_, pivots) = self.rref();
        let cols: Vec<_> = pivots.iter().map(|&j| self.column(j)).collect();
        RatMatrix::from_columns(self.rows, &cols)
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let aug = self.hstack(&RatMatrix::identity(n)).ok()?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.block(0, n, n, n))
    }

    /// Some solution `x` of `self·x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let col = RatMatrix::from_columns(self.rows, &[b.to_vec()]);
        let aug = self.hstack(&col).ok()?;
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r.get(row, self.cols).clone();
        }
        Some(x)
    }
}

/// Integer entries for fraction-free elimination; arithmetic returns `None`
/// on overflow.
trait EliminationInt: Clone {
    fn is_nil(&self) -> bool;
    fn nil() -> Self;
    /// `±1`.
    fn is_unit(&self) -> bool;
    /// `p·a − x·b`.
    fn cross(p: &Self, a: &Self, x: &Self, b: &Self) -> Option<Self>;
    /// `a − f·b`.
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Option<Self>;
    fn times(a: &Self, b: &Self) -> Option<Self>;
    fn gcd_with(&self, other: &Self) -> Self;
    fn exceeds_one(&self) -> bool;
    fn div_exact(&self, g: &Self) -> Self;
}

impl EliminationInt for i128 {
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn nil() -> Self {
        0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn cross(p: &Self, a: &Self, x: &Self, b: &Self) -> Option<Self> {
        p.checked_mul(*a)?.checked_sub(x.checked_mul(*b)?)
    }
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Option<Self> {
        a.checked_sub(f.checked_mul(*b)?)
    }
    fn times(a: &Self, b: &Self) -> Option<Self> {
        a.checked_mul(*b)
    }
    fn gcd_with(&self, other: &Self) -> Self {
        // gcd of values that fit in i128 fits too, except |i128::MIN|
        i128::try_from(gcd_u128(self.unsigned_abs(), other.unsigned_abs())).unwrap_or(1)
    }
    fn exceeds_one(&self) -> bool {
        *self > 1
    }
    fn div_exact(&self, g: &Self) -> Self {
        self / g
    }
}

impl EliminationInt for BigInt {
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn nil() -> Self {
        <BigInt as Zero>::zero()
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn cross(p: &Self, a: &Self, x: &Self, b: &Self) -> Option<Self> {
        Some(p * a - x * b)
    }
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Option<Self> {
        Some(a - f * b)
    }
    fn times(a: &Self, b: &Self) -> Option<Self> {
        Some(a * b)
    }
    fn gcd_with(&self, other: &Self) -> Self {
        self.gcd(other)
    }
    fn exceeds_one(&self) -> bool {
        self > &BigInt::one()
    }
    fn div_exact(&self, g: &Self) -> Self {
        self / g
    }
}

type SparseRow<T> = Vec<(usize, T)>;

/// `pv·row − x·pivot` (or `row − f·pivot` for a unit pivot, with `f = x·pv`),
/// dropping zeros.
fn combine<T: EliminationInt>(row: &[(usize, T)], pivot: &[(usize, T)], pv: &T, x: &T, unit: bool) -> Option<SparseRow<T>> {
    let f = if unit { Some(T::times(x, pv)?) } else { None };
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut a, mut b) = (0, 0);
    while a < row.len() || b < pivot.len() {
        let ja = row.get(a).map_or(usize::MAX, |e| e.0);
        let jb = pivot.get(b).map_or(usize::MAX, |e| e.0);
        let (j, v) = if ja < jb {
            a += 1;
            let v = match &f {
                Some(_) => row[a - 1].1.clone(),
                None => T::times(pv, &row[a - 1].1)?,
            };
            (ja, v)
        } else if jb < ja {
            b += 1;
            let v = match &f {
                Some(f) => T::sub_mul(&T::nil(), f, &pivot[b - 1].1)?,
                None => T::sub_mul(&T::nil(), x, &pivot[b - 1].1)?,
            };
            (jb, v)
        } else {
            a += 1;
            b += 1;
            let v = match &f {
                Some(f) => T::sub_mul(&row[a - 1].1, f, &pivot[b - 1].1)?,
                None => T::cross(pv, &row[a - 1].1, x, &pivot[b - 1].1)?,
            };
            (ja, v)
        };
        if !v.is_nil() {
            out.push((j, v));
        }
    }
    if !unit {
        let g = out.iter().fold(None::<T>, |g, (_, v)| {
            Some(g.map_or_else(|| v.gcd_with(v), |g| g.gcd_with(v)))
        });
        if let Some(g) = g {
            if g.exceeds_one() {
                for (_, v) in out.iter_mut() {
                    *v = v.div_exact(&g);
                }
            }
        }
    }
    Some(out)
}

/// Fraction-free Gauss-Jordan elimination on sparse rows, in place. Pivot
/// columns are taken left to right. Among candidate rows a pivot of absolute
/// value one is preferred, then the shortest row; eliminating with a unit
/// pivot leaves the row's scale alone, other updates are divided by the gcd
/// of the row. With `full`, pivot columns are also cleared above the pivot,
/// leaving each row an integer multiple of the matching RREF row. The pivot
/// rows end up first, in order. Returns the pivot columns, or `None` on
/// overflow.
fn echelon<T: EliminationInt>(rows: &mut [SparseRow<T>], ncols: usize, full: bool) -> Option<Vec<usize>> {
    let nrows = rows.len();
    // Rows are bucketed by leading column. Entries go stale when a row
    // changes and are checked on use.
    let mut lead: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    // Rows that may hold an entry in a column, for clearing above pivots.
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); if full { ncols } else { 0 }];
    for (i, row) in rows.iter().enumerate() {
        if let Some(e) = row.first() {
            lead[e.0].push(i);
        }
        if full {
            for e in row {
                occurs[e.0].push(i);
            }
        }
    }
    let mut is_pivot = vec![false; nrows];
    let mut seen = vec![usize::MAX; nrows];
    let mut order = Vec::new();
    let mut pivots = Vec::new();
    for c in 0..ncols {
        let mut candidates = std::mem::take(&mut lead[c]);
        candidates.retain(|&i| !is_pivot[i] && rows[i].first().is_some_and(|e| e.0 == c));
        candidates.sort_unstable();
        candidates.dedup();
        let Some(&p) = candidates.iter().min_by_key(|&&i| (!rows[i][0].1.is_unit(), rows[i].len(), i)) else {
            continue;
        };
        is_pivot[p] = true;
        order.push(p);
        pivots.push(c);
        let pivot = std::mem::take(&mut rows[p]);
        let pv = pivot[0].1.clone();
        let unit = pv.is_unit();
        let mut touched: Vec<usize> = candidates.into_iter().filter(|&i| i != p).collect();
        if full {
            for i in std::mem::take(&mut occurs[c]) {
                if is_pivot[i] && i != p && seen[i] != c && rows[i].binary_search_by_key(&c, |e| e.0).is_ok() {
                    seen[i] = c;
                    touched.push(i);
                }
            }
        }
        for i in touched {
            let k = rows[i].binary_search_by_key(&c, |e| e.0).ok()?;
            let x = rows[i][k].1.clone();
            let new = combine(&rows[i], &pivot, &pv, &x, unit)?;
            if !is_pivot[i] {
                if let Some(e) = new.first() {
                    lead[e.0].push(i);
                }
            }
            if full {
                // only columns the pivot row brought in can be new
                for e in &pivot {
                    if e.0 > c {
                        occurs[e.0].push(i);
                    }
                }
            }
            rows[i] = new;
        }
        rows[p] = pivot;
    }
    let mut rest: Vec<usize> = (0..nrows).filter(|&i| !is_pivot[i]).collect();
    order.append(&mut rest);
    let mut taken: Vec<SparseRow<T>> = rows.iter_mut().map(std::mem::take).collect();
    for (slot, &i) in rows.iter_mut().zip(&order) {
        *slot = std::mem::take(&mut taken[i]);
    }
    Some(pivots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    /// Plain rational Gaussian elimination counting pivots; kept separate from
    /// the fraction-free path it checks.
    fn oracle_rank(m: &RatMatrix) -> usize {
        let mut rows = m.to_rows();
        let mut rank = 0;
        for c in 0..m.cols() {
            if let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) {
                rows.swap(rank, p);
                for i in rank + 1..rows.len() {
                    let f = &rows[i][c] / &rows[rank][c];
                    for j in 0..m.cols() {
                        let d = &f * &rows[rank][j];
                        rows[i][j] = &rows[i][j] - &d;
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn rational_canonical_form() {
        assert_eq!(q("2/4").to_string(), "1/2");
        assert_eq!(q("-6/3").to_string(), "-2");
        assert_eq!(q("0/7").to_string(), "0");
        assert_eq!(Rational::new(3, -6).to_string(), "-1/2");
        assert!("1/-2".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RatMatrix::zeros(3, 3).rank(), 0);
        assert_eq!(RatMatrix::identity(3).rank(), 3);
        let m = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(oracle_rank(&m), 1);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rank_of_empty_shapes() {
        assert_eq!(RatMatrix::zeros(0, 4).rank(), 0);
        assert_eq!(RatMatrix::zeros(4, 0).rank(), 0);
        assert_eq!(RatMatrix::zeros(0, 4).kernel_basis().len(), 4);
        assert!(RatMatrix::zeros(4, 0).kernel_basis().is_empty());
    }

    #[test]
    fn rank_falls_back_to_bigint_on_overflow() {
        let big = Rational::from_integer(BigInt::from(10).pow(30));
        let m = RatMatrix::from_rows(vec![
            vec![big.clone(), Rational::one()],
            vec![Rational::one(), big.clone()],
        ])
        .unwrap();
        assert_eq!(m.rank(), 2);
        let singular = RatMatrix::from_rows(vec![
            vec![big.clone(), big.clone()],
            vec![&big * &big, &big * &big],
        ])
        .unwrap();
        assert_eq!(singular.rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(RatMatrix::identity(2).kernel_basis().is_empty());
        assert_eq!(RatMatrix::zeros(2, 2).kernel_basis().len(), 2);
        let m = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).unwrap().iter().all(Rational::is_zero));
        // proportional to (-2, 1)
        assert_eq!(&k[0][0] * &Rational::from(1), &k[0][1] * &Rational::from(-2));
    }

    #[test]
    fn matmul_examples() {
        let a = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let b = RatMatrix::from_i64(&[&[1, 0], &[1, 1]]);
        assert_eq!(a.matmul(&b).unwrap(), RatMatrix::from_i64(&[&[2, 1], &[1, 1]]));
        assert_eq!(a.matmul(&RatMatrix::identity(2)).unwrap(), a);
        assert_eq!(RatMatrix::identity(2).matmul(&b).unwrap(), b);
        assert!(matches!(
            a.matmul(&RatMatrix::zeros(3, 1)),
            Err(LinalgError::DimensionMismatch { .. })
        ));
        let e = RatMatrix::zeros(2, 0).matmul(&RatMatrix::zeros(0, 3)).unwrap();
        assert_eq!(e, RatMatrix::zeros(2, 3));
    }

    #[test]
    fn inverse_and_solve() {
        let a = RatMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.matmul(&inv).unwrap(), RatMatrix::identity(2));
        assert!(RatMatrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
        let x = a.solve(&[q("3"), q("2")]).unwrap();
        assert_eq!(x, vec![q("1"), q("1")]);
        assert!(RatMatrix::from_i64(&[&[1, 2], &[2, 4]])
            .solve(&[q("1"), q("1")])
            .is_none());
        assert_eq!(RatMatrix::identity(0).inverse(), Some(RatMatrix::identity(0)));
    }

    fn small_matrix() -> impl Strategy<Value = RatMatrix> {
        (0usize..5, 0usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec((-3i64..4, 1i64..4), r * c).prop_map(move |v| {
                let rows = (0..r)
                    .map(|i| {
                        (0..c)
                            .map(|j| {
                                let (n, d) = v[i * c + j];
                                Rational::new(n, d)
                            })
                            .collect()
                    })
                    .collect();
                RatMatrix::from_rows_with_shape(r, c, rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn rank_is_transpose_invariant(m in small_matrix()) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
            prop_assert_eq!(m.rank(), oracle_rank(&m));
        }

        #[test]
        fn rank_nullity(m in small_matrix()) {
            let k = m.kernel_basis();
            prop_assert_eq!(m.cols(), m.rank() + k.len());
            for v in &k {
                prop_assert!(m.mul_vec(v).unwrap().iter().all(Rational::is_zero));
            }
        }

        #[test]
        fn matmul_associative(a in small_matrix(), seed in 0i64..100) {
            let b = RatMatrix::from_rows_with_shape(a.cols(), 3,
                (0..a.cols()).map(|i| (0..3).map(|j| Rational::from((i as i64 * 7 + j * 3 + seed) % 5 - 2)).collect()).collect()).unwrap();
            let c = RatMatrix::from_rows_with_shape(3, 2,
                (0..3).map(|i| (0..2).map(|j| Rational::new((i as i64 + j + seed) % 4 - 1, 2)).collect()).collect()).unwrap();
            let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
            let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn rational_print_parse_roundtrip(n in -10_000i64..10_000, d in 1i64..500) {
            let x = Rational::new(n, d);
            let back: Rational = x.to_string().parse().unwrap();
            prop_assert_eq!(&back, &x);
            prop_assert!(back.denom() > BigInt::zero());
        }
    }
}

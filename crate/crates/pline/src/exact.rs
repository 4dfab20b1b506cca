//! Exact rational scalars, vectors and matrices.
//!
//! `Rational` is `num_rational::BigRational`, which is always kept reduced
//! with a positive denominator, so structural equality is value equality.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `n/d` from machine integers. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q`, `p`, or a decimal such as `0.25`, `-1.5e-3`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| Error::Parse(format!("bad numerator in {t:?}")))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| Error::Parse(format!("bad denominator in {t:?}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {t:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Ok(p) = BigInt::from_str(t) {
        return Ok(Rational::from_integer(p));
    }
    parse_decimal(t).ok_or_else(|| Error::Parse(format!("not a rational: {t:?}")))
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{ip}{fp}");
    let mut v = Rational::from_integer(BigInt::from_str(&digits).ok()?);
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10u32);
    if scale >= 0 {
        v *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        v /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -v } else { v })
}

/// `p/q`, or `p` when `q = 1`.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn format_vec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

/// Serde adapters storing rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    /// Either `"p/q"` or a bare JSON integer.
    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(super) enum Repr {
        Text(String),
        Int(i64),
    }

    impl Repr {
        pub(super) fn into_rational<E: serde::de::Error>(self) -> std::result::Result<Rational, E> {
            match self {
                Repr::Text(s) => parse_rational(&s).map_err(E::custom),
                Repr::Int(i) => Ok(int(i)),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        Repr::deserialize(d)?.into_rational()
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            let strs: Vec<String> = v.iter().map(format_rational).collect();
            strs.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
            let reprs = Vec::<Repr>::deserialize(d)?;
            reprs.into_iter().map(Repr::into_rational).collect()
        }
    }

    pub mod rows {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
            let strs: Vec<Vec<String>> = v.iter().map(|r| r.iter().map(format_rational).collect()).collect();
            strs.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
            let reprs = Vec::<Vec<Repr>>::deserialize(d)?;
            reprs.into_iter().map(|r| r.into_iter().map(Repr::into_rational).collect()).collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Integer-entry convenience constructor; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let v = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::from_rows(v).expect("rectangular input")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                entries.push(self.get(i, j).clone());
            }
        }
        Self { rows: rows.len(), cols: cols.len(), entries }
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} against {} columns", x.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for (a, b) in self.row(i).iter().zip(x) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect())
    }

    pub fn max_abs_entry(&self) -> Rational {
        self.entries.iter().map(|e| e.abs()).max().unwrap_or_else(Rational::zero)
    }

    pub fn denominator_lcm(&self) -> BigInt {
        lcm_of_denominators(self.entries.iter())
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_vec(self.row(i)).replace('(', "[").replace(')', "]"))?;
        }
        write!(f, "]")
    }
}

pub fn lcm_of_denominators<'a>(it: impl Iterator<Item = &'a Rational>) -> BigInt {
    it.fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Row `i` of `m` scaled to integers, together with the scale used.
fn integer_rows(m: &RationalMatrix, extra: Option<&[Rational]>) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut rows = Vec::with_capacity(m.rows);
    let mut scales = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let mut l = lcm_of_denominators(m.row(i).iter());
        if let Some(b) = extra {
            l = l.lcm(b[i].denom());
        }
        let lr = Rational::from_integer(l.clone());
        let mut row: Vec<BigInt> = m.row(i).iter().map(|e| (e * &lr).to_integer()).collect();
        if let Some(b) = extra {
            row.push((&b[i] * &lr).to_integer());
        }
        rows.push(row);
        scales.push(l);
    }
    (rows, scales)
}

/// Bareiss elimination on the leading `n` columns. Returns the sign from
/// row swaps, or `None` if a pivot column is all zero (singular).
fn bareiss(a: &mut [Vec<BigInt>], n: usize) -> Option<bool> {
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !a[i][k].is_zero())?;
            a.swap(k, swap);
            negate = !negate;
        }
        let width = a[k].len();
        for i in k + 1..n {
            for j in k + 1..width {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    Some(negate)
}

/// Exact determinant by fraction-free elimination.
pub fn det(m: &RationalMatrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("determinant of a {}x{} matrix", m.rows, m.cols)));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Rational::one());
    }
    let (mut a, scales) = integer_rows(m, None);
    let Some(negate) = bareiss(&mut a, n) else {
        return Ok(Rational::zero());
    };
    let mut d = Rational::from_integer(a[n - 1][n - 1].clone());
    if negate {
        d = -d;
    }
    let denom = scales.iter().fold(BigInt::one(), |acc, s| acc * s);
    Ok(d / Rational::from_integer(denom))
}

/// Solves `a x = b` exactly.
pub fn solve_linear(a: &RationalMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("solve with a {}x{} matrix", a.rows, a.cols)));
    }
    if b.len() != a.rows {
        return Err(Error::Dimension(format!("right-hand side of length {} for {} rows", b.len(), a.rows)));
    }
    let n = a.rows;
    let (mut rows, _) = integer_rows(a, Some(b));
    if bareiss(&mut rows, n).is_none() || (n > 0 && rows[n - 1][n - 1].is_zero()) {
        return Err(Error::Singular);
    }
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(rows[i][n].clone());
        for j in i + 1..n {
            if !rows[i][j].is_zero() {
                acc -= Rational::from_integer(rows[i][j].clone()) * &x[j];
            }
        }
        x[i] = acc / Rational::from_integer(rows[i][i].clone());
    }
    Ok(x)
}

/// Determinant of the principal submatrix on `index_set` (0-based indices).
pub fn principal_minor(m: &RationalMatrix, index_set: &[usize]) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::Dimension("principal minor of a non-square matrix".into()));
    }
    if index_set.is_empty() {
        return Err(Error::Argument("principal minor of the empty index set".into()));
    }
    if let Some(&bad) = index_set.iter().find(|&&i| i >= m.rows) {
        return Err(Error::Argument(format!("index {bad} out of range for dimension {}", m.rows)));
    }
    det(&m.submatrix(index_set, index_set))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BitLength(pub u64);

pub fn bits_of_int(x: &BigInt) -> u64 {
    x.magnitude().bits()
}

/// Larger of the numerator and denominator bit lengths.
pub fn bit_length(r: &Rational) -> BitLength {
    BitLength(bits_of_int(r.numer()).max(bits_of_int(r.denom())))
}

pub fn max_bit_length<'a>(it: impl Iterator<Item = &'a Rational>) -> BitLength {
    it.map(bit_length).max().unwrap_or(BitLength(0))
}

/// `⌈log₂ x⌉` for `x ≥ 1`; `0` for `x ≤ 1`.
pub fn ceil_log2(x: &BigUint) -> u64 {
    if x <= &BigUint::one() {
        0
    } else {
        (x - 1u32).bits()
    }
}

/// `⌈n·log₂ n⌉ + 3·n·b_M + b_q`.
pub fn hadamard_solution_bitbound(b_m: BitLength, b_q: BitLength, n: u64) -> BitLength {
    let nn = num_traits::pow(BigUint::from(n.max(1)), n.max(1) as usize);
    BitLength(ceil_log2(&nn) + 3 * n * b_m.0 + b_q.0)
}

/// The rational of least denominator strictly inside `(lo, hi)`, if its
/// denominator is at most `max_denominator`.
pub fn best_rational_in_interval(lo: &Rational, hi: &Rational, max_denominator: &BigInt) -> Result<Option<Rational>> {
    if lo >= hi {
        return Err(Error::Argument(format!("empty interval ({lo}, {hi})")));
    }
    let r = simplest_between(lo, Some(hi));
    Ok((r.denom() <= max_denominator).then_some(r))
}

// Stern–Brocot descent expressed through continued fractions; `hi = None` is +∞.
fn simplest_between(lo: &Rational, hi: Option<&Rational>) -> Rational {
    let fl = lo.floor();
    let next = &fl + Rational::one();
    match hi {
        None => return next,
        Some(h) if &next < h => return next,
        _ => {}
    }
    let h = hi.unwrap();
    let a = lo - &fl;
    let b = h - &fl;
    let inv_a = if a.is_zero() { None } else { Some(a.recip()) };
    let y = simplest_between(&b.recip(), inv_a.as_ref());
    fl + y.recip()
}

pub fn abs_pow(x: &Rational, p: u32) -> Rational {
    num_traits::pow(x.abs(), p as usize)
}

pub fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

pub fn rational_floor_to_biguint(r: &Rational) -> BigUint {
    let f = r.floor().to_integer();
    match f.sign() {
        Sign::Minus => BigUint::zero(),
        _ => f.magnitude().clone(),
    }
}

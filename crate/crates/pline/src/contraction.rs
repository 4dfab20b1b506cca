//! Slices, direction grids and discrete contraction maps, the line through a
//! discrete contraction map, and the exact and approximate nested binary
//! searches for contraction fixpoints.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{best_rational_in_interval, ceil_log2, format_vec, hadamard_solution_bitbound, pow2, BitLength, Rational};
use crate::line::{BitVector, Solution, UfeoplInstance, MAX_WIDTH};
use crate::linfixp::{EvaluableMap, LinFixpCircuit, NormIndex};

// ------------------------------------------------------------------ slices

/// Each coordinate is either fixed to a value in `[0,1]` or free (`None`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slice {
    #[serde(with = "slice_pattern")]
    pattern: Vec<Option<Rational>>,
}

mod slice_pattern {
    use super::*;
    use crate::exact::{format_rational, parse_rational};
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Option<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let xs: Vec<String> = v.iter().map(|x| x.as_ref().map_or_else(|| "*".to_string(), format_rational)).collect();
        xs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Option<Rational>>, D::Error> {
        let xs = Vec::<String>::deserialize(d)?;
        xs.iter()
            .map(|x| if x == "*" { Ok(None) } else { parse_rational(x).map(Some).map_err(serde::de::Error::custom) })
            .collect()
    }
}

impl Slice {
    pub fn new(pattern: Vec<Option<Rational>>) -> Result<Self> {
        for (i, v) in pattern.iter().enumerate() {
            if let Some(v) = v {
                if v.is_negative() || v > &Rational::one() {
                    return Err(Error::Argument(format!("slice coordinate {i} = {v} is outside [0,1]")));
                }
            }
        }
        Ok(Self { pattern })
    }

    pub fn free(d: usize) -> Self {
        Self { pattern: vec![None; d] }
    }

    pub fn dim(&self) -> usize {
        self.pattern.len()
    }

    pub fn get(&self, i: usize) -> Option<&Rational> {
        self.pattern[i].as_ref()
    }

    pub fn fixed(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.pattern[i].is_some()).collect()
    }

    pub fn free_coords(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.pattern[i].is_none()).collect()
    }

    pub fn with_fixed(&self, i: usize, v: Rational) -> Result<Self> {
        let mut p = self.pattern.clone();
        p[i] = Some(v);
        Self::new(p)
    }

    /// `x` with the fixed coordinates overwritten.
    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        x.iter().zip(&self.pattern).map(|(xi, s)| s.clone().unwrap_or_else(|| xi.clone())).collect()
    }

    /// The free coordinates of `x`.
    pub fn project(&self, x: &[Rational]) -> Vec<Rational> {
        self.free_coords().into_iter().map(|i| x[i].clone()).collect()
    }
}

/// `f|_s`: evaluates `f` after substituting the fixed coordinates.
#[derive(Clone, Debug)]
pub struct Restricted<M> {
    f: M,
    slice: Slice,
}

impl<M: EvaluableMap> Restricted<M> {
    pub fn slice(&self) -> &Slice {
        &self.slice
    }

    /// The restriction viewed as a map onto the free coordinates only.
    pub fn eval_projected(&self, x: &[Rational]) -> Vec<Rational> {
        self.slice.project(&self.eval(x))
    }
}

impl<M: EvaluableMap> EvaluableMap for Restricted<M> {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn eval(&self, x: &[Rational]) -> Vec<Rational> {
        self.f.eval(&self.slice.apply(x))
    }

    fn eval_coord(&self, x: &[Rational], k: usize) -> Rational {
        self.f.eval_coord(&self.slice.apply(x), k)
    }
}

pub fn restrict<M: EvaluableMap>(f: M, s: Slice) -> Result<Restricted<M>> {
    if f.dim() != s.dim() {
        return Err(Error::Dimension(format!("map of dimension {} with slice of dimension {}", f.dim(), s.dim())));
    }
    Ok(Restricted { f, slice: s })
}

// -------------------------------------------------------------------- grids

/// Grid widths `k_1, …, k_d`; coordinate `i` ranges over `{0, 1/k_i, …, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(with = "biguint_vec")]
    k: Vec<BigUint>,
    #[serde(rename = "override", default)]
    overridden: bool,
}

mod biguint_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
        let xs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        xs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigUint>, D::Error> {
        let xs = Vec::<serde_json::Value>::deserialize(d)?;
        xs.into_iter()
            .map(|x| match x {
                serde_json::Value::Number(n) => {
                    n.as_u64().map(BigUint::from).ok_or_else(|| serde::de::Error::custom("grid width must be a positive integer"))
                }
                serde_json::Value::String(s) => s.parse().map_err(|_| serde::de::Error::custom(format!("bad grid width {s:?}"))),
                _ => Err(serde::de::Error::custom("grid width must be a number or string")),
            })
            .collect()
    }
}

impl GridSpec {
    /// Explicit desk-scale widths.
    pub fn with_sizes(k: &[u64]) -> Result<Self> {
        if k.is_empty() || k.contains(&0) {
            return Err(Error::Argument(format!("grid widths must be positive, got {k:?}")));
        }
        Ok(Self { k: k.iter().map(|&x| BigUint::from(x)).collect(), overridden: true })
    }

    /// `k_i = 2^((d−i+1)·⌈n log₂ n⌉ + 3(d−i+1)·n·b_M + b_q)`.
    pub fn from_bounds(d: usize, n: u64, b_m: BitLength, b_q: BitLength) -> Self {
        let base = hadamard_solution_bitbound(BitLength(0), BitLength(0), n).0;
        let k = (1..=d)
            .map(|i| {
                let r = (d - i + 1) as u64;
                let e = r * base + 3 * r * n * b_m.0 + b_q.0;
                BigUint::one() << e
            })
            .collect();
        Self { k, overridden: false }
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    pub fn widths(&self) -> &[BigUint] {
        &self.k
    }

    pub fn is_override(&self) -> bool {
        self.overridden
    }

    /// Widths as machine integers, for grids that are enumerated.
    pub fn small_widths(&self) -> Result<Vec<u64>> {
        self.k
            .iter()
            .map(|k| {
                k.to_u64()
                    .filter(|&x| x < u64::MAX / 4)
                    .ok_or_else(|| Error::Capability(format!("grid width {k} is too large to enumerate")))
            })
            .collect()
    }

    /// Number of grid points, if it fits in a `u64`.
    pub fn num_points(&self) -> Option<u64> {
        self.k.iter().try_fold(1u64, |acc, k| acc.checked_mul(k.to_u64()?.checked_add(1)?))
    }
}

/// Grid sizes for a circuit, with `b(M_C) = b(q_C) = n·size(C)` and `n` the
/// number of max/min gates (at least 1).
pub fn grid_from_circuit(circuit: &LinFixpCircuit) -> GridSpec {
    let n = circuit.num_nonlinear().max(1) as u64;
    let b = n * circuit.size().total();
    GridSpec::from_bounds(circuit.dim(), n, BitLength(b), BitLength(b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
    Zero,
}

impl Direction {
    pub fn as_char(self) -> char {
        match self {
            Direction::Up => 'u',
            Direction::Down => 'd',
            Direction::Zero => 'z',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'u' => Ok(Direction::Up),
            'd' => Ok(Direction::Down),
            'z' => Ok(Direction::Zero),
            _ => Err(Error::Parse(format!("direction must be one of u, d, z, got {c:?}"))),
        }
    }
}

#[derive(Clone)]
enum DirSource {
    Map(Arc<dyn EvaluableMap>),
    Table(Arc<Vec<Vec<Direction>>>),
}

/// Direction functions `D_1, …, D_d` over a grid, backed by a map or a table.
#[derive(Clone)]
pub struct DirectionGrid {
    k: Vec<u64>,
    source: DirSource,
}

impl fmt::Debug for DirectionGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.source {
            DirSource::Map(_) => "map",
            DirSource::Table(_) => "table",
        };
        write!(f, "DirectionGrid(k={:?}, {kind})", self.k)
    }
}

pub fn direction_grid_from_map(f: Arc<dyn EvaluableMap>, grid: &GridSpec) -> Result<DirectionGrid> {
    if f.dim() != grid.dim() {
        return Err(Error::Dimension(format!("map of dimension {} on a {}-dimensional grid", f.dim(), grid.dim())));
    }
    Ok(DirectionGrid { k: grid.small_widths()?, source: DirSource::Map(f) })
}

impl DirectionGrid {
    /// Table with one entry per point, first coordinate varying fastest.
    pub fn from_table(k: &[u64], table: Vec<Vec<Direction>>) -> Result<Self> {
        let grid = GridSpec::with_sizes(k)?;
        let n = grid.num_points().ok_or_else(|| Error::Capability("grid too large".into()))?;
        if table.len() as u64 != n || table.iter().any(|t| t.len() != k.len()) {
            return Err(Error::Dimension(format!("direction table needs {n} entries of length {}", k.len())));
        }
        Ok(Self { k: k.to_vec(), source: DirSource::Table(Arc::new(table)) })
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    pub fn widths(&self) -> &[u64] {
        &self.k
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec::with_sizes(&self.k).expect("positive widths")
    }

    pub fn num_points(&self) -> Option<u64> {
        self.k.iter().try_fold(1u64, |acc, &k| acc.checked_mul(k + 1))
    }

    pub fn index_of(&self, p: &[u64]) -> u64 {
        p.iter().zip(&self.k).rev().fold(0u64, |acc, (&x, &k)| acc * (k + 1) + x)
    }

    pub fn point_at(&self, mut idx: u64) -> Vec<u64> {
        self.k
            .iter()
            .map(|&k| {
                let x = idx % (k + 1);
                idx /= k + 1;
                x
            })
            .collect()
    }

    pub fn contains(&self, p: &[u64]) -> bool {
        p.len() == self.k.len() && p.iter().zip(&self.k).all(|(x, k)| x <= k)
    }

    pub fn to_rational(&self, p: &[u64]) -> Vec<Rational> {
        p.iter().zip(&self.k).map(|(&x, &k)| Rational::new(BigInt::from(x), BigInt::from(k))).collect()
    }

    pub fn directions(&self, p: &[u64]) -> Vec<Direction> {
        match &self.source {
            DirSource::Table(t) => t[self.index_of(p) as usize].clone(),
            DirSource::Map(f) => {
                let x = self.to_rational(p);
                let y = f.eval(&x);
                x.iter()
                    .zip(&y)
                    .map(|(a, b)| match b.cmp(a) {
                        std::cmp::Ordering::Greater => Direction::Up,
                        std::cmp::Ordering::Less => Direction::Down,
                        std::cmp::Ordering::Equal => Direction::Zero,
                    })
                    .collect()
            }
        }
    }

    /// `D_i(p)` for the 0-based dimension `i`.
    pub fn direction(&self, i: usize, p: &[u64]) -> Direction {
        match &self.source {
            DirSource::Table(t) => t[self.index_of(p) as usize][i],
            DirSource::Map(_) => self.directions(p)[i],
        }
    }

    /// Table-backed copy; errors when the grid has more than `budget` points.
    pub fn tabulate(&self, budget: u64) -> Result<Self> {
        if let DirSource::Table(_) = self.source {
            return Ok(self.clone());
        }
        let n = self.num_points().filter(|&n| n <= budget).ok_or(Error::BudgetExhausted(budget))?;
        let table = (0..n).map(|i| self.directions(&self.point_at(i))).collect();
        Ok(Self { k: self.k.clone(), source: DirSource::Table(Arc::new(table)) })
    }

    /// Brute-force scan for all-zero points.
    pub fn fixpoints(&self, budget: u64) -> Result<Vec<Vec<u64>>> {
        let n = self.num_points().filter(|&n| n <= budget).ok_or(Error::BudgetExhausted(budget))?;
        Ok((0..n).map(|i| self.point_at(i)).filter(|p| self.directions(p).iter().all(|&d| d == Direction::Zero)).collect())
    }

    /// One string of `u`/`d`/`z` per point.
    pub fn table_strings(&self, budget: u64) -> Result<Vec<String>> {
        let t = self.tabulate(budget)?;
        let n = t.num_points().unwrap_or(0);
        Ok((0..n).map(|i| t.directions(&t.point_at(i)).into_iter().map(Direction::as_char).collect()).collect())
    }

    pub fn from_table_strings(k: &[u64], rows: &[String]) -> Result<Self> {
        let table =
            rows.iter().map(|r| r.chars().map(Direction::from_char).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
        Self::from_table(k, table)
    }
}

// ---------------------------------------------------------- DCM validation

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DcmViolation {
    /// `D_dim` is not monotone along a column: `lower` sits one step below `upper`.
    NotDirectionFunction {
        dim: usize,
        lower: Vec<u64>,
        upper: Vec<u64>,
    },
    /// An `i`-slice (coordinates after `i` fixed to `fixed`) has no fixpoint.
    NoFixpoint {
        i: usize,
        fixed: Vec<u64>,
    },
    MultipleFixpoints {
        i: usize,
        first: Vec<u64>,
        second: Vec<u64>,
    },
    /// The fixpoint `point` of a sub-slice does not point toward the parent fixpoint.
    WrongDirection {
        i: usize,
        parent: Vec<u64>,
        point: Vec<u64>,
        found: Direction,
    },
}

/// Checks the direction-function property of each `D_i`, unique fixpoints
/// of every `i`-slice (the first `i` coordinates free), and that the fixpoint
/// of each sub-slice fixing coordinate `i` points toward the parent fixpoint.
pub fn validate_dcm(dg: &DirectionGrid, budget: u64) -> Result<Option<DcmViolation>> {
    if dg.num_points().map_or(true, |n| n > budget) {
        return Err(Error::BudgetExhausted(budget));
    }
    let dg = dg.tabulate(budget)?;
    let d = dg.dim();
    let k = dg.widths().to_vec();
    let n = dg.num_points().unwrap_or(0);
    let dirs: Vec<Vec<Direction>> = (0..n).map(|i| dg.directions(&dg.point_at(i))).collect();

    let mut stride = 1u64;
    for i in 0..d {
        for idx in 0..n {
            let p = dg.point_at(idx);
            if p[i] == k[i] {
                continue;
            }
            let lo = dirs[idx as usize][i];
            let hi = dirs[(idx + stride) as usize][i];
            // zero or down at p forces down at p + e_i
            if lo != Direction::Up && hi != Direction::Down {
                let mut up = p.clone();
                up[i] += 1;
                return Ok(Some(DcmViolation::NotDirectionFunction { dim: i, lower: p, upper: up }));
            }
        }
        stride *= k[i] + 1;
    }

    // Length of the all-zero prefix of each point's directions.
    let zero_prefix: Vec<usize> = dirs.iter().map(|ds| ds.iter().take_while(|&&x| x == Direction::Zero).count()).collect();

    // fix[i][key] = index of the unique fixpoint of the i-slice with suffix key.
    let mut fix: Vec<Vec<u64>> = Vec::with_capacity(d + 1);
    let mut prefix = 1u64;
    for i in 0..=d {
        if i > 0 {
            prefix *= k[i - 1] + 1;
        }
        let keys = n / prefix;
        let mut found: Vec<Option<u64>> = vec![None; keys as usize];
        for idx in 0..n {
            if zero_prefix[idx as usize] < i {
                continue;
            }
            let key = (idx / prefix) as usize;
            if let Some(prev) = found[key] {
                return Ok(Some(DcmViolation::MultipleFixpoints { i, first: dg.point_at(prev), second: dg.point_at(idx) }));
            }
            found[key] = Some(idx);
        }
        let mut row = Vec::with_capacity(keys as usize);
        for (key, f) in found.into_iter().enumerate() {
            match f {
                Some(x) => row.push(x),
                None => {
                    let any = dg.point_at(key as u64 * prefix);
                    return Ok(Some(DcmViolation::NoFixpoint { i, fixed: any[i..].to_vec() }));
                }
            }
        }
        fix.push(row);
    }

    for i in 1..=d {
        for (key, &q_idx) in fix[i].iter().enumerate() {
            let q = dg.point_at(q_idx);
            for x in 0..=k[i - 1] {
                if x == q[i - 1] {
                    continue;
                }
                let sub_key = (key as u64 * (k[i - 1] + 1) + x) as usize;
                let p_idx = fix[i - 1][sub_key];
                let found = dirs[p_idx as usize][i - 1];
                let want = if x < q[i - 1] { Direction::Up } else { Direction::Down };
                if found != want {
                    return Ok(Some(DcmViolation::WrongDirection { i, parent: q, point: dg.point_at(p_idx), found }));
                }
            }
        }
    }
    Ok(None)
}

// ------------------------------------------------------ DCM → unique line

/// A vertex of the line: `slots[l−1]` is the point held at level `l`.
/// Level 1 always holds the current point; an absent level-`l` slot means
/// the level-`(l−1)` vertex carries the start tag, and then every slot above
/// it is absent too.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain {
    pub slots: Vec<Option<Vec<u64>>>,
}

impl Chain {
    pub fn start(d: usize) -> Self {
        let mut slots = vec![None; d];
        slots[0] = Some(vec![0; d]);
        Self { slots }
    }

    pub fn point(&self) -> &[u64] {
        self.slots[0].as_deref().expect("level 1 always holds a point")
    }

    fn slot(&self, l: usize) -> Option<&Vec<u64>> {
        self.slots[l - 1].as_ref()
    }
}

enum Step {
    To(Chain),
    End,
}

struct DcmCore {
    dg: DirectionGrid,
    d: usize,
    k: Vec<u64>,
    coord_bits: Vec<usize>,
    point_bits: usize,
}

impl DcmCore {
    fn dir(&self, l: usize, p: &[u64]) -> Direction {
        self.dg.direction(l - 1, p)
    }

    fn on_surface(&self, p: &[u64], m: usize) -> bool {
        (1..=m).all(|j| self.dir(j, p) == Direction::Zero)
    }

    fn on_line(&self, l: usize, c: &Chain) -> bool {
        let d = self.d;
        let Some(r) = c.slot(l) else { return false };
        if l == d {
            return self.on_surface(r, d - 1) && self.dir(d, r) != Direction::Down;
        }
        if !self.on_surface(r, l - 1) {
            return false;
        }
        match c.slot(l + 1) {
            None => {
                (l + 1..=d).all(|j| c.slot(j).is_none()) && r[l..].iter().all(|&x| x == 0) && self.dir(l, r) != Direction::Down
            }
            Some(_) => {
                if !self.on_line(l + 1, c) {
                    return false;
                }
                let Step::To(next) = self.step(l + 1, c) else { return false };
                let u = next.slot(l + 1).expect("successor keeps its level");
                if r[l..] != u[l..] {
                    return false;
                }
                match self.dir(l, r) {
                    Direction::Up => r[l - 1] >= u[l - 1],
                    Direction::Down => r[l - 1] <= u[l - 1],
                    Direction::Zero => true,
                }
            }
        }
    }

    /// Successor at level `l`; the result only reads and writes slots ≥ `l`.
    fn step(&self, l: usize, c: &Chain) -> Step {
        let r = c.slot(l).expect("on-line vertex holds a point").clone();
        let i = l - 1;
        match self.dir(l, &r) {
            Direction::Up | Direction::Down => {
                let up = self.dir(l, &r) == Direction::Up;
                let mut r2 = r;
                if up && r2[i] < self.k[i] {
                    r2[i] += 1;
                } else if !up && r2[i] > 0 {
                    r2[i] -= 1;
                } else {
                    return Step::To(c.clone());
                }
                let mut out = c.clone();
                out.slots[i] = Some(r2);
                Step::To(out)
            }
            Direction::Zero => {
                if l == self.d {
                    return Step::End;
                }
                // r is the next level-(l+1) point; that vertex carries the
                // tags of the successor of the current level-(l+1) vertex.
                let mut u = if c.slot(l + 1).is_none() {
                    Chain { slots: vec![None; self.d] }
                } else {
                    match self.step(l + 1, c) {
                        Step::To(next) => next,
                        Step::End => return Step::End,
                    }
                };
                u.slots[l] = Some(r);
                match self.step(l + 1, &u) {
                    Step::End => Step::End,
                    Step::To(next) => {
                        u.slots[i] = next.slots[l].clone();
                        Step::To(u)
                    }
                }
            }
        }
    }

    fn potential(&self, l: usize, c: &Chain) -> BigUint {
        let r = c.slot(l).expect("on-line vertex holds a point");
        let i = l - 1;
        if l == self.d {
            return BigUint::from(r[i]);
        }
        if c.slot(l + 1).is_none() {
            return BigUint::from(r[i]);
        }
        let k = self.k[i];
        let base = BigUint::from(k + 1) * (self.potential(l + 1, c) + 1u32);
        let rising = match self.dir(l, r) {
            Direction::Up => true,
            Direction::Down => false,
            Direction::Zero => match self.step(l + 1, c) {
                Step::To(next) => r[i] >= next.slot(l + 1).expect("level kept")[i],
                Step::End => true,
            },
        };
        if rising {
            base + r[i]
        } else {
            base + (k - r[i])
        }
    }

    fn potential_bound(&self) -> BigUint {
        let mut b = BigUint::from(self.k[self.d - 1]);
        for l in (1..self.d).rev() {
            let k = self.k[l - 1];
            b = BigUint::from(k + 1) * (b + 1u32) + k;
        }
        b
    }

    fn width(&self) -> usize {
        1 + (self.d - 1) * (1 + self.point_bits) + self.point_bits
    }

    fn encode(&self, c: &Chain, sink: bool) -> BitVector {
        let mut bits = Vec::with_capacity(self.width());
        bits.push(sink);
        let push_point = |bits: &mut Vec<bool>, p: Option<&Vec<u64>>| {
            for (j, &w) in self.coord_bits.iter().enumerate() {
                let x = p.map_or(0, |p| p[j]);
                for b in (0..w).rev() {
                    bits.push((x >> b) & 1 == 1);
                }
            }
        };
        for l in (2..=self.d).rev() {
            let s = c.slot(l);
            bits.push(s.is_some());
            push_point(&mut bits, s);
        }
        push_point(&mut bits, c.slot(1));
        let mut v = BitVector::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v = v.with_bit(i, true);
            }
        }
        v
    }

    /// `None` for the sink flag and for non-canonical encodings.
    fn decode(&self, x: &BitVector) -> Option<Chain> {
        if x.width() != self.width() || x.get(0) {
            return None;
        }
        let mut pos = 1;
        let read_point = |pos: &mut usize| -> Option<Vec<u64>> {
            let mut p = Vec::with_capacity(self.d);
            for (j, &w) in self.coord_bits.iter().enumerate() {
                let mut v = 0u64;
                for _ in 0..w {
                    v = (v << 1) | x.get(*pos) as u64;
                    *pos += 1;
                }
                if v > self.k[j] {
                    return None;
                }
                p.push(v);
            }
            Some(p)
        };
        let mut slots = vec![None; self.d];
        for l in (2..=self.d).rev() {
            let flag = x.get(pos);
            pos += 1;
            let p = read_point(&mut pos)?;
            if flag {
                slots[l - 1] = Some(p);
            } else if p.iter().any(|&v| v != 0) {
                return None;
            }
        }
        slots[0] = Some(read_point(&mut pos)?);
        // An absent slot forces every slot above it to be absent.
        let first_absent = (2..=self.d).find(|&l| slots[l - 1].is_none());
        if let Some(a) = first_absent {
            if (a..=self.d).any(|l| slots[l - 1].is_some()) {
                return None;
            }
        }
        Some(Chain { slots })
    }
}

/// The unique-forward line through a discrete contraction map, with the
/// vertex layout used to encode chains.
#[derive(Clone)]
pub struct DcmLine {
    inst: UfeoplInstance,
    core: Arc<DcmCore>,
}

impl fmt::Debug for DcmLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DcmLine(k={:?}, n={})", self.core.k, self.inst.n())
    }
}

/// Vertices are a sink flag, the tags for levels `d, …, 2` (each a presence
/// flag plus one grid point) and the current point. The line walks
/// dimension 1 between consecutive points of the 1-surface, and so on up to
/// dimension `d`, from the all-zero point to the fixpoint.
pub fn dcm_to_ufeopl(dg: &DirectionGrid) -> Result<DcmLine> {
    let d = dg.dim();
    let k = dg.widths().to_vec();
    let coord_bits: Vec<usize> = k.iter().map(|&x| (64 - x.leading_zeros()) as usize).collect();
    let point_bits = coord_bits.iter().sum();
    let core = DcmCore { dg: dg.clone(), d, k, coord_bits, point_bits };
    let n = core.width();
    if n > MAX_WIDTH {
        return Err(Error::Capability(format!("line vertices would need {n} bits")));
    }
    let m = core.potential_bound().bits().max(1) as usize;
    let core = Arc::new(core);
    let (c1, c2, c3) = (core.clone(), core.clone(), core.clone());
    let on_line = move |x: &BitVector| c1.decode(x).is_some_and(|c| c1.on_line(1, &c));
    let succ = move |x: &BitVector| -> BitVector {
        let Some(c) = c2.decode(x) else { return x.clone() };
        if !c2.on_line(1, &c) {
            return x.clone();
        }
        match c2.step(1, &c) {
            Step::To(next) => c2.encode(&next, false),
            Step::End => c2.encode(&c, true),
        }
    };
    let pot = move |x: &BitVector| -> BigUint {
        match c3.decode(x) {
            Some(c) if c3.on_line(1, &c) => c3.potential(1, &c),
            _ => BigUint::zero(),
        }
    };
    let inst = UfeoplInstance::new(n, m, Arc::new(on_line), Arc::new(succ), Arc::new(pot))?;
    Ok(DcmLine { inst, core })
}

impl DcmLine {
    pub fn instance(&self) -> &UfeoplInstance {
        &self.inst
    }

    pub fn encode(&self, c: &Chain) -> BitVector {
        self.core.encode(c, false)
    }

    pub fn decode(&self, x: &BitVector) -> Option<Chain> {
        self.core.decode(x)
    }

    /// Grid point held by a vertex.
    pub fn point_of(&self, x: &BitVector) -> Option<Vec<u64>> {
        self.core.decode(x).map(|c| c.point().to_vec())
    }

    /// Whether the level-`l` part of the chain lies on that level's line.
    pub fn on_level_line(&self, l: usize, c: &Chain) -> bool {
        l >= 1 && l <= self.core.d && self.core.on_line(l, c)
    }

    /// All chains on the line, found level by level: a chain can only be on
    /// the level-`l` line if its tag is absent or on the level-`(l+1)` line,
    /// so every grid point is tried against every such tag.
    pub fn on_line_chains(&self, budget: u64) -> Result<Vec<Chain>> {
        let core = &self.core;
        let d = core.d;
        let n = core.dg.num_points().filter(|&n| n <= budget).ok_or(Error::BudgetExhausted(budget))?;
        let points: Vec<Vec<u64>> = (0..n).map(|i| core.dg.point_at(i)).collect();
        let mut level: Vec<Chain> = points
            .iter()
            .map(|p| {
                let mut slots = vec![None; d];
                slots[d - 1] = Some(p.clone());
                Chain { slots }
            })
            .filter(|c| core.on_line(d, c))
            .collect();
        for l in (1..d).rev() {
            let mut next = Vec::new();
            let mut tags: Vec<Option<&Chain>> = vec![None];
            tags.extend(level.iter().map(Some));
            for tag in tags {
                for p in &points {
                    let mut slots = match tag {
                        Some(t) => t.slots.clone(),
                        None => vec![None; d],
                    };
                    slots[l - 1] = Some(p.clone());
                    let c = Chain { slots };
                    if next.len() as u64 >= budget {
                        return Err(Error::BudgetExhausted(budget));
                    }
                    if core.on_line(l, &c) {
                        next.push(c);
                    }
                }
            }
            level = next;
        }
        Ok(level)
    }

    /// The grid fixpoint named by a U2 solution at the end of the line.
    pub fn fixpoint_of_solution(&self, sol: &Solution) -> Result<Vec<u64>> {
        let c = self.core.decode(sol.vertex()).ok_or_else(|| Error::Breach(format!("{} is not a chain", sol.vertex())))?;
        let p = c.point().to_vec();
        if self.core.dg.directions(&p).iter().any(|&x| x != Direction::Zero) {
            return Err(Error::Breach(format!("line ended at {p:?}, which is not a fixpoint")));
        }
        Ok(p)
    }
}

// ------------------------------------------------------ exact fixpoints

/// Bisection precision beyond which the exact search gives up.
pub const MAX_REFINE_BITS: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixpointResult {
    #[serde(with = "crate::exact::serde_rational::vec")]
    pub point: Vec<Rational>,
    pub queries: u64,
    /// Set when some recovery step needed more than the grid's precision.
    #[serde(default)]
    pub refined: bool,
}

struct Search<'a, M: ?Sized> {
    f: &'a M,
    d: usize,
    queries: u64,
}

impl<M: EvaluableMap + ?Sized> Search<'_, M> {
    fn eval_coord(&mut self, v: &[Rational], k: usize) -> Rational {
        self.queries += 1;
        self.f.eval_coord(v, k)
    }
}

struct ExactSearch<'a, M: ?Sized> {
    s: Search<'a, M>,
    bits: Vec<u64>,
    refined: bool,
}

impl<M: EvaluableMap + ?Sized> ExactSearch<'_, M> {
    fn probe(&mut self, fixed: &mut Vec<Rational>, t: Rational) -> Result<(Vec<Rational>, Rational)> {
        let k = fixed.len();
        fixed.push(t);
        let v = self.solve(fixed);
        fixed.pop();
        let v = v?;
        let fv = self.s.eval_coord(&v, k);
        Ok((v, fv))
    }

    fn solve(&mut self, fixed: &mut Vec<Rational>) -> Result<Vec<Rational>> {
        let k = fixed.len();
        if k == self.s.d {
            return Ok(fixed.clone());
        }
        let zero = Rational::zero();
        let one = Rational::one();
        let (vl, fl) = self.probe(fixed, zero.clone())?;
        if fl == zero {
            return Ok(vl);
        }
        let (vh, fh) = self.probe(fixed, one.clone())?;
        if fh == one {
            return Ok(vh);
        }
        if fl < zero || fh > one {
            return Err(Error::PromiseViolation(format!(
                "coordinate {k} leaves [0,1] at the slice fixpoints {} and {}",
                format_vec(&vl),
                format_vec(&vh)
            )));
        }
        let (mut lo, mut hi) = (zero, one);
        let mut bits = self.bits[k];
        let two = Rational::from_integer(BigInt::from(2));
        loop {
            let width = Rational::new(BigInt::one(), pow2(bits + 1));
            while &hi - &lo > width {
                let mid = (&lo + &hi) / &two;
                let (v, fv) = self.probe(fixed, mid.clone())?;
                if fv == mid {
                    return Ok(v);
                }
                if fv > mid {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if let Some(t) = best_rational_in_interval(&lo, &hi, &pow2(bits))? {
                let (v, fv) = self.probe(fixed, t.clone())?;
                if fv == t {
                    return Ok(v);
                }
                if fv > t {
                    lo = t;
                } else {
                    hi = t;
                }
            }
            self.refined = true;
            bits = (bits * 2).max(bits + 1);
            if bits > MAX_REFINE_BITS {
                return Err(Error::PromiseViolation(format!(
                    "no rational fixpoint found for coordinate {k} in ({lo}, {hi}) up to {MAX_REFINE_BITS} bits"
                )));
            }
        }
    }
}

/// Nested binary search over coordinates `1, …, d`. Coordinate `k` stops at
/// width `2^{−(L_k+1)}` with `L_k = ⌈log₂ k_{d−k+1}⌉` and recovers the unique
/// rational of denominator at most `2^{L_k}`; if that candidate is not a
/// fixpoint the search keeps bisecting with doubled precision.
pub fn find_fp_exact<M: EvaluableMap + ?Sized>(f: &M, grid: &GridSpec) -> Result<FixpointResult> {
    let d = f.dim();
    if grid.dim() != d {
        return Err(Error::Dimension(format!("{d}-dimensional map with a {}-dimensional grid", grid.dim())));
    }
    let bits = (0..d).map(|k| ceil_log2(&grid.widths()[d - 1 - k])).collect();
    let mut search = ExactSearch { s: Search { f, d, queries: 0 }, bits, refined: false };
    let point = search.solve(&mut Vec::with_capacity(d))?;
    Ok(FixpointResult { point, queries: search.s.queries, refined: search.refined })
}

// -------------------------------------------------- approximate fixpoints

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub p: NormIndex,
    #[serde(with = "crate::exact::serde_rational")]
    pub eps: Rational,
    #[serde(with = "crate::exact::serde_rational::vec")]
    pub values: Vec<Rational>,
}

impl EpsilonSchedule {
    /// Strictly decreasing and `Σ ε_i < ε` (`p = 1`) or `Σ ε_i^p < ε^p`.
    pub fn is_consistent(&self) -> bool {
        if self.values.iter().any(|e| !e.is_positive()) || self.values.windows(2).any(|w| w[1] >= w[0]) {
            return false;
        }
        let p = match self.p {
            NormIndex::Finite(p) => p,
            NormIndex::Inf => return false,
        };
        let sum: Rational = self.values.iter().map(|e| num_traits::pow(e.clone(), p as usize)).sum();
        sum < num_traits::pow(self.eps.clone(), p as usize)
    }
}

/// `ε_i = ε/4^i` for `p = 1`; `ε_i = ε^{p^i}·p^{−2Σ_{j=0}^{i} p^j}` for `p ≥ 2`.
pub fn epsilon_schedule(p: NormIndex, eps: &Rational, d: usize) -> Result<EpsilonSchedule> {
    let p_val = match p {
        NormIndex::Finite(p) => p,
        NormIndex::Inf => return Err(Error::Capability("no epsilon schedule for the l-infinity norm".into())),
    };
    if !eps.is_positive() || eps > &Rational::one() {
        return Err(Error::Argument(format!("epsilon must lie in (0, 1], got {eps}")));
    }
    let values = (1..=d)
        .map(|i| {
            if p_val == 1 {
                eps / Rational::from_integer(pow2(2 * i as u64))
            } else {
                let pb = BigInt::from(p_val);
                let pi = num_traits::pow(pb.clone(), i);
                let e = num_traits::pow(eps.clone(), pi.to_usize().expect("small exponent"));
                let s: usize = (0..=i).map(|j| num_traits::pow(p_val as usize, j)).sum();
                e / Rational::from_integer(num_traits::pow(pb, 2 * s))
            }
        })
        .collect();
    Ok(EpsilonSchedule { p, eps: eps.clone(), values })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxFixpoint {
    #[serde(with = "crate::exact::serde_rational::vec")]
    pub point: Vec<Rational>,
    pub queries: u64,
    pub schedule: EpsilonSchedule,
}

struct ApproxSearch<'a, M: ?Sized> {
    s: Search<'a, M>,
    eps: Vec<Rational>,
}

impl<M: EvaluableMap + ?Sized> ApproxSearch<'_, M> {
    fn probe(&mut self, fixed: &mut Vec<Rational>, t: Rational) -> (Vec<Rational>, Rational) {
        let k = fixed.len();
        fixed.push(t);
        let v = self.solve(fixed);
        fixed.pop();
        let fv = self.s.eval_coord(&v, k);
        (v, fv)
    }

    fn solve(&mut self, fixed: &mut Vec<Rational>) -> Vec<Rational> {
        let k = fixed.len();
        if k == self.s.d {
            return fixed.clone();
        }
        let e = self.eps[k].clone();
        let zero = Rational::zero();
        let one = Rational::one();
        let (vl, fl) = self.probe(fixed, zero.clone());
        if (&fl - &zero).abs() <= e {
            return vl;
        }
        let (vh, fh) = self.probe(fixed, one.clone());
        if (&fh - &one).abs() <= e {
            return vh;
        }
        let (mut lo, mut hi) = (zero, one);
        let two = Rational::from_integer(BigInt::from(2));
        while &hi - &lo > e {
            let mid = (&lo + &hi) / &two;
            let (v, fv) = self.probe(fixed, mid.clone());
            if (&fv - &mid).abs() <= e {
                return v;
            }
            if fv > mid {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        fixed.push((&lo + &hi) / &two);
        let v = self.solve(fixed);
        fixed.pop();
        v
    }
}

/// Nested binary search with per-level tolerances from [`epsilon_schedule`];
/// `f` is only queried as a black box.
pub fn find_fp_approx<M: EvaluableMap + ?Sized>(f: &M, p: NormIndex, eps: &Rational) -> Result<ApproxFixpoint> {
    let d = f.dim();
    let schedule = epsilon_schedule(p, eps, d)?;
    let mut search = ApproxSearch { s: Search { f, d, queries: 0 }, eps: schedule.values.clone() };
    let point = search.solve(&mut Vec::with_capacity(d));
    Ok(ApproxFixpoint { point, queries: search.s.queries, schedule })
}

/// Whether `|f(v)_i − v_i| ≤ ε_i` for every coordinate.
pub fn within_schedule<M: EvaluableMap + ?Sized>(f: &M, v: &[Rational], schedule: &EpsilonSchedule) -> bool {
    let fv = f.eval(v);
    fv.iter().zip(v).zip(&schedule.values).all(|((a, b), e)| &(a - b).abs() <= e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::line::follow_forward;
    use crate::linfixp::{parse_circuit, AffineMap, FnMap};
    use crate::RationalMatrix;

    fn half() -> Rational {
        rat(1, 2)
    }

    #[test]
    fn restriction_substitutes_fixed_coordinates() {
        let f = FnMap::new(2, |x| vec![&x[1] / int(2), &x[0] / int(2)]);
        let s = Slice::new(vec![Some(int(1)), None]).unwrap();
        let r = restrict(f.clone(), s).unwrap();
        assert_eq!(r.eval(&[int(0), rat(1, 3)]), vec![rat(1, 6), half()]);
        assert_eq!(r.eval_projected(&[int(0), rat(1, 3)]), vec![half()]);
        let all = restrict(f.clone(), Slice::free(2)).unwrap();
        assert_eq!(all.eval(&[rat(1, 4), half()]), f.eval(&[rat(1, 4), half()]));
        assert!(Slice::new(vec![Some(int(2))]).is_err());
        assert!(restrict(f, Slice::free(3)).is_err());
    }

    #[test]
    fn grid_sizes_from_bounds() {
        let g = GridSpec::from_bounds(1, 1, BitLength(2), BitLength(2));
        assert_eq!(g.widths(), &[BigUint::from(256u32)]);
        let g = GridSpec::from_bounds(2, 1, BitLength(2), BitLength(2));
        assert_eq!(g.widths()[1], BigUint::from(256u32));
        assert_eq!(g.widths()[0], BigUint::one() << 14);
        let g = GridSpec::with_sizes(&[8, 8]).unwrap();
        assert!(g.is_override());
        let c = parse_circuit("d 1\nc 1/2\np 2\ng1 = in 1\ng2 = mulc 1/2 g1\nout g2").unwrap();
        assert_eq!(grid_from_circuit(&c).dim(), 1);
    }

    #[test]
    fn directions_of_constant_map() {
        let f: Arc<dyn EvaluableMap> = Arc::new(FnMap::new(1, |_| vec![rat(1, 2)]));
        let dg = direction_grid_from_map(f, &GridSpec::with_sizes(&[4]).unwrap()).unwrap();
        let got: Vec<Direction> = (0..=4).map(|x| dg.direction(0, &[x])).collect();
        use Direction::*;
        assert_eq!(got, vec![Up, Up, Zero, Down, Down]);
        assert_eq!(validate_dcm(&dg, 1000).unwrap(), None);
        // Fixpoint 1/3 is off the grid.
        let g: Arc<dyn EvaluableMap> = Arc::new(FnMap::new(1, |x| vec![&x[0] / int(2) + rat(1, 6)]));
        let dg = direction_grid_from_map(g, &GridSpec::with_sizes(&[4]).unwrap()).unwrap();
        assert!(dg.fixpoints(100).unwrap().is_empty());
        assert!(matches!(validate_dcm(&dg, 100).unwrap(), Some(DcmViolation::NoFixpoint { i: 1, .. })));
    }

    #[test]
    fn dcm_validation_cases() {
        let f: Arc<dyn EvaluableMap> = Arc::new(FnMap::new(2, |_| vec![rat(1, 2), rat(1, 2)]));
        let dg = direction_grid_from_map(f, &GridSpec::with_sizes(&[4, 4]).unwrap()).unwrap();
        assert_eq!(validate_dcm(&dg, 1000).unwrap(), None);
        let two_zeros = DirectionGrid::from_table_strings(&[2], &["u".into(), "z".into(), "z".into()]).unwrap();
        assert!(matches!(validate_dcm(&two_zeros, 10).unwrap(), Some(DcmViolation::NotDirectionFunction { .. })));
        let col = DirectionGrid::from_table_strings(&[2], &["u".into(), "z".into(), "d".into()]).unwrap();
        assert_eq!(validate_dcm(&col, 10).unwrap(), None);
        assert!(matches!(validate_dcm(&col, 2), Err(Error::BudgetExhausted(2))));
    }

    fn constant_line(k: u64, target: (u64, u64)) -> (DirectionGrid, DcmLine) {
        let t = (rat(target.0 as i64, k as i64), rat(target.1 as i64, k as i64));
        let f: Arc<dyn EvaluableMap> = Arc::new(FnMap::new(2, move |_| vec![t.0.clone(), t.1.clone()]));
        let dg = direction_grid_from_map(f, &GridSpec::with_sizes(&[k, k]).unwrap()).unwrap().tabulate(1 << 20).unwrap();
        let line = dcm_to_ufeopl(&dg).unwrap();
        (dg, line)
    }

    #[test]
    fn line_through_constant_map() {
        let (_, line) = constant_line(8, (3, 5));
        let inst = line.instance();
        let z = BitVector::zeros(inst.n());
        assert!(inst.on_line(&z));
        assert_eq!(inst.potential(&z), BigUint::zero());
        let walk = follow_forward(inst, &z, 10_000).unwrap();
        assert_eq!(line.fixpoint_of_solution(&walk.solution).unwrap(), vec![3, 5]);
        // Every on-line chain is visited exactly once by the walk.
        let chains = line.on_line_chains(1 << 20).unwrap();
        assert_eq!(chains.len() as u64, walk.steps + 1);
        let mut x = z;
        for _ in 0..walk.steps {
            let y = inst.succ(&x);
            assert!(inst.potential(&y) > inst.potential(&x));
            x = y;
        }
    }

    #[test]
    fn line_through_three_dimensions() {
        let t = [rat(1, 4), rat(3, 4), rat(1, 2)];
        let f: Arc<dyn EvaluableMap> = Arc::new(FnMap::new(3, move |_| t.to_vec()));
        let dg = direction_grid_from_map(f, &GridSpec::with_sizes(&[4, 4, 4]).unwrap()).unwrap().tabulate(1000).unwrap();
        let line = dcm_to_ufeopl(&dg).unwrap();
        let inst = line.instance();
        let walk = follow_forward(inst, &BitVector::zeros(inst.n()), 100_000).unwrap();
        assert_eq!(line.fixpoint_of_solution(&walk.solution).unwrap(), vec![1, 3, 2]);
        assert_eq!(line.on_line_chains(1 << 20).unwrap().len() as u64, walk.steps + 1);
    }

    #[test]
    fn line_exhaustive_on_tiny_grid() {
        let (_, line) = constant_line(2, (1, 2));
        let inst = line.instance();
        let on: Vec<BitVector> = crate::line::all_vertices(inst.n()).filter(|x| inst.on_line(x)).collect();
        let walk = follow_forward(inst, &BitVector::zeros(inst.n()), 1000).unwrap();
        assert_eq!(on.len() as u64, walk.steps + 1);
        assert_eq!(line.fixpoint_of_solution(&walk.solution).unwrap(), vec![1, 2]);
    }

    #[test]
    fn exact_fixpoints() {
        let g1 = GridSpec::with_sizes(&[16]).unwrap();
        let c = parse_circuit("d 1\nc 1/2\np 2\ng1 = in 1\ng2 = mulc 1/2 g1\nout g2").unwrap();
        assert_eq!(find_fp_exact(&c, &grid_from_circuit(&c)).unwrap().point, vec![int(0)]);
        let c = parse_circuit(
            "d 1\nc 1/2\np 2\ng1 = in 1\ng2 = mulc 1/2 g1\ng3 = const 1/4\ng4 = add g2 g3\ng5 = const 1\ng6 = min g4 g5\ng7 = const 0\ng8 = max g6 g7\nout g8",
        )
        .unwrap();
        assert_eq!(find_fp_exact(&c, &g1).unwrap().point, vec![half()]);
        let a = AffineMap::new(
            RationalMatrix::from_rows(vec![vec![half(), int(0)], vec![int(0), half()]]).unwrap(),
            vec![rat(1, 4), rat(1, 8)],
        )
        .unwrap();
        let got = find_fp_exact(&a, &GridSpec::with_sizes(&[8, 8]).unwrap()).unwrap();
        assert_eq!(got.point, vec![half(), rat(1, 4)]);
        assert_eq!(got.point, a.exact_fixpoint().unwrap());
        // A coarse grid still recovers 1/3 by refining.
        let b = FnMap::new(1, |x| vec![&x[0] / int(2) + rat(1, 6)]);
        let got = find_fp_exact(&b, &GridSpec::with_sizes(&[2]).unwrap()).unwrap();
        assert_eq!(got.point, vec![rat(1, 3)]);
        assert!(got.refined);
    }

    #[test]
    fn epsilon_schedules() {
        let s = epsilon_schedule(NormIndex::Finite(1), &int(1), 2).unwrap();
        assert_eq!(s.values, vec![rat(1, 4), rat(1, 16)]);
        let s = epsilon_schedule(NormIndex::Finite(2), &half(), 1).unwrap();
        assert_eq!(s.values, vec![rat(1, 256)]);
        for p in 1..=3 {
            for d in 1..=4 {
                assert!(epsilon_schedule(NormIndex::Finite(p), &rat(1, 10), d).unwrap().is_consistent());
            }
        }
        assert!(matches!(epsilon_schedule(NormIndex::Inf, &half(), 1), Err(Error::Capability(_))));
    }

    #[test]
    fn approximate_fixpoints() {
        let eps = rat(1, 1000);
        let f = FnMap::new(1, |x| vec![&x[0] / int(2) + rat(1, 4)]);
        let r = find_fp_approx(&f, NormIndex::Finite(2), &eps).unwrap();
        assert!((&r.point[0] - half()).abs() <= &eps * int(2));
        assert!(within_schedule(&f, &r.point, &r.schedule));
        let c = FnMap::new(2, |_| vec![rat(1, 3), rat(2, 7)]);
        let r = find_fp_approx(&c, NormIndex::Finite(1), &eps).unwrap();
        assert!((&r.point[0] - rat(1, 3)).abs() <= eps && (&r.point[1] - rat(2, 7)).abs() <= eps);
        let a = AffineMap::new(
            RationalMatrix::from_rows(vec![vec![rat(1, 3), rat(1, 6)], vec![rat(1, 6), rat(1, 3)]]).unwrap(),
            vec![rat(1, 4), rat(1, 4)],
        )
        .unwrap();
        let eps = rat(1, 100);
        let r = find_fp_approx(&a, NormIndex::Finite(1), &eps).unwrap();
        let res = crate::linfixp::sub_vec(&a.eval(&r.point), &r.point);
        assert!(crate::linfixp::lp_norm(&res, NormIndex::Finite(1)) < eps);
        assert!(r.point.iter().all(|x| (x - half()).abs() <= &eps * int(3)));
    }
}

//! Implicit-graph search problems: EndOfPotentialLine, EndOfMeteredLine,
//! UniqueForwardEOPL and SinkOfVerifiableLine, with verifiers and solvers.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_WIDTH: usize = 512;
pub const MAX_EXPLICIT_WIDTH: usize = 20;

/// Fixed-width bit string. Bit 0 is the first (most significant) bit of the
/// written form, so `concat` and `split_at` follow the written order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    width: usize,
    value: BigUint,
}

impl BitVector {
    pub fn zeros(width: usize) -> Self {
        assert!(width <= MAX_WIDTH, "bit width {width} exceeds {MAX_WIDTH}");
        Self { width, value: BigUint::zero() }
    }

    pub fn from_biguint(width: usize, value: BigUint) -> Result<Self> {
        if width > MAX_WIDTH {
            return Err(Error::Capability(format!("bit width {width} exceeds {MAX_WIDTH}")));
        }
        if value.bits() > width as u64 {
            return Err(Error::Argument(format!("value needs {} bits, width is {width}", value.bits())));
        }
        Ok(Self { width, value })
    }

    pub fn from_u64(width: usize, value: u64) -> Self {
        Self::from_biguint(width, BigUint::from(value)).expect("value fits width")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    pub fn index(&self) -> usize {
        self.to_u64().expect("explicit vertex index") as usize
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Bit `i` counted from the front.
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.width);
        self.value.bit((self.width - 1 - i) as u64)
    }

    pub fn with_bit(&self, i: usize, on: bool) -> Self {
        assert!(i < self.width);
        let mut v = self.value.clone();
        v.set_bit((self.width - 1 - i) as u64, on);
        Self { width: self.width, value: v }
    }

    /// `self` followed by `tail`.
    pub fn concat(&self, tail: &BitVector) -> Self {
        let width = self.width + tail.width;
        assert!(width <= MAX_WIDTH, "bit width {width} exceeds {MAX_WIDTH}");
        Self { width, value: (&self.value << tail.width) | &tail.value }
    }

    /// The first `k` bits and the rest.
    pub fn split_at(&self, k: usize) -> (BitVector, BitVector) {
        assert!(k <= self.width);
        let rest = self.width - k;
        let mask = (BigUint::one() << rest) - 1u32;
        (Self { width: k, value: &self.value >> rest }, Self { width: rest, value: &self.value & mask })
    }

    /// Bits `[start, start+len)` as a number.
    pub fn field(&self, start: usize, len: usize) -> BigUint {
        assert!(start + len <= self.width);
        let shift = self.width - start - len;
        (&self.value >> shift) & ((BigUint::one() << len) - 1u32)
    }

    pub fn to_bitstring(&self) -> String {
        (0..self.width).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if !s.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::Parse(format!("not a bit string: {s:?}")));
        }
        let value = if s.is_empty() { BigUint::zero() } else { BigUint::parse_bytes(s.as_bytes(), 2).unwrap() };
        Self::from_biguint(s.len(), value)
    }

    pub fn count_ones(&self) -> u64 {
        self.value.count_ones()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_bitstring())
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_bitstring())
    }
}

impl Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bitstring())
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BitVector::parse(&s).map_err(serde::de::Error::custom)
    }
}

pub type VertexFn = Arc<dyn Fn(&BitVector) -> BitVector + Send + Sync>;
pub type PotentialFn = Arc<dyn Fn(&BitVector) -> BigUint + Send + Sync>;
pub type PredicateFn = Arc<dyn Fn(&BitVector) -> bool + Send + Sync>;
pub type StepPredicateFn = Arc<dyn Fn(&BitVector, &BigUint) -> bool + Send + Sync>;

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > MAX_WIDTH {
        return Err(Error::Capability(format!("vertex width {n} outside 1..={MAX_WIDTH}")));
    }
    Ok(())
}

#[derive(Clone)]
pub struct EoplInstance {
    n: usize,
    m: usize,
    s: VertexFn,
    p: VertexFn,
    v: PotentialFn,
}

impl fmt::Debug for EoplInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EoplInstance(n={}, m={})", self.n, self.m)
    }
}

impl EoplInstance {
    /// Checks `P(0ⁿ) = 0ⁿ ≠ S(0ⁿ)` and `V(0ⁿ) = 0`.
    pub fn new(n: usize, m: usize, s: VertexFn, p: VertexFn, v: PotentialFn) -> Result<Self> {
        check_width(n)?;
        let inst = Self { n, m, s, p, v };
        let z = BitVector::zeros(n);
        if !inst.pred(&z).is_zero() {
            return Err(Error::Invariant("P(0^n) must be 0^n".into()));
        }
        if inst.succ(&z).is_zero() {
            return Err(Error::Invariant("S(0^n) must differ from 0^n".into()));
        }
        if !inst.potential(&z).is_zero() {
            return Err(Error::Invariant("V(0^n) must be 0".into()));
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn succ(&self, x: &BitVector) -> BitVector {
        (self.s)(x)
    }

    pub fn pred(&self, x: &BitVector) -> BitVector {
        (self.p)(x)
    }

    pub fn potential(&self, x: &BitVector) -> BigUint {
        (self.v)(x)
    }

    pub fn is_self_loop(&self, x: &BitVector) -> bool {
        &self.succ(x) == x && &self.pred(x) == x
    }
}

#[derive(Clone)]
pub struct EomlInstance {
    n: usize,
    s: VertexFn,
    p: VertexFn,
    v: PotentialFn,
}

impl fmt::Debug for EomlInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EomlInstance(n={})", self.n)
    }
}

impl EomlInstance {
    /// Checks `P(0ⁿ) = 0ⁿ ≠ S(0ⁿ)` and `V(0ⁿ) = 1`.
    pub fn new(n: usize, s: VertexFn, p: VertexFn, v: PotentialFn) -> Result<Self> {
        check_width(n)?;
        let inst = Self { n, s, p, v };
        let z = BitVector::zeros(n);
        if !inst.pred(&z).is_zero() {
            return Err(Error::Invariant("P(0^n) must be 0^n".into()));
        }
        if inst.succ(&z).is_zero() {
            return Err(Error::Invariant("S(0^n) must differ from 0^n".into()));
        }
        if !inst.potential(&z).is_one() {
            return Err(Error::Invariant("V(0^n) must be 1".into()));
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn succ(&self, x: &BitVector) -> BitVector {
        (self.s)(x)
    }

    pub fn pred(&self, x: &BitVector) -> BitVector {
        (self.p)(x)
    }

    pub fn potential(&self, x: &BitVector) -> BigUint {
        (self.v)(x)
    }
}

#[derive(Clone)]
pub struct UfeoplInstance {
    n: usize,
    m: usize,
    c: PredicateFn,
    s: VertexFn,
    v: PotentialFn,
    /// Unchecked promise: every vertex with `C = 1` is reachable from `0ⁿ`.
    pub promise_single_line: bool,
}

impl fmt::Debug for UfeoplInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UfeoplInstance(n={}, m={})", self.n, self.m)
    }
}

impl UfeoplInstance {
    /// Checks `C(0ⁿ) = 1` and `V(0ⁿ) = 0`.
    pub fn new(n: usize, m: usize, c: PredicateFn, s: VertexFn, v: PotentialFn) -> Result<Self> {
        check_width(n)?;
        let inst = Self { n, m, c, s, v, promise_single_line: true };
        let z = BitVector::zeros(n);
        if !inst.on_line(&z) {
            return Err(Error::Invariant("C(0^n) must be 1".into()));
        }
        if !inst.potential(&z).is_zero() {
            return Err(Error::Invariant("V(0^n) must be 0".into()));
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn on_line(&self, x: &BitVector) -> bool {
        (self.c)(x)
    }

    pub fn succ(&self, x: &BitVector) -> BitVector {
        (self.s)(x)
    }

    pub fn potential(&self, x: &BitVector) -> BigUint {
        (self.v)(x)
    }
}

#[derive(Clone)]
pub struct SvlInstance {
    n: usize,
    start: BitVector,
    target: BigUint,
    s: VertexFn,
    w: StepPredicateFn,
}

impl fmt::Debug for SvlInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SvlInstance(n={}, start={}, T={})", self.n, self.start, self.target)
    }
}

impl SvlInstance {
    /// Checks `W(x_s, 1) = 1`.
    pub fn new(n: usize, start: BitVector, target: BigUint, s: VertexFn, w: StepPredicateFn) -> Result<Self> {
        check_width(n)?;
        let inst = Self { n, start, target, s, w };
        if !inst.verifies(&inst.start, &BigUint::one()) {
            return Err(Error::Invariant("W(x_s, 1) must be 1".into()));
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn start(&self) -> &BitVector {
        &self.start
    }

    pub fn target(&self) -> &BigUint {
        &self.target
    }

    pub fn succ(&self, x: &BitVector) -> BitVector {
        (self.s)(x)
    }

    /// `W(x, t)`: whether `x` is the `t`-th vertex of the line (the start is the first).
    pub fn verifies(&self, x: &BitVector, t: &BigUint) -> bool {
        (self.w)(x, t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolutionKind {
    R1,
    R2,
    T1,
    T2,
    T3,
    U1,
    U2,
    #[serde(rename = "SVL-sink")]
    SvlSink,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Solution {
    pub kind: SolutionKind,
    pub witness: Vec<BitVector>,
}

impl Solution {
    pub fn at(kind: SolutionKind, x: BitVector) -> Self {
        Self { kind, witness: vec![x] }
    }

    pub fn vertex(&self) -> &BitVector {
        &self.witness[0]
    }
}

pub fn verify_eopl(inst: &EoplInstance, x: &BitVector) -> Option<Solution> {
    let sx = inst.succ(x);
    let px = inst.pred(x);
    if (&inst.succ(&px) != x && !x.is_zero()) || &inst.pred(&sx) != x {
        return Some(Solution::at(SolutionKind::R1, x.clone()));
    }
    if &sx != x && inst.potential(&sx) <= inst.potential(x) {
        return Some(Solution::at(SolutionKind::R2, x.clone()));
    }
    None
}

pub fn verify_eoml(inst: &EomlInstance, x: &BitVector) -> Option<Solution> {
    let sx = inst.succ(x);
    let px = inst.pred(x);
    if (&inst.succ(&px) != x && !x.is_zero()) || &inst.pred(&sx) != x {
        return Some(Solution::at(SolutionKind::T1, x.clone()));
    }
    let v = inst.potential(x);
    if !x.is_zero() && v.is_one() {
        return Some(Solution::at(SolutionKind::T2, x.clone()));
    }
    let one = BigUint::one();
    if !v.is_zero() && inst.potential(&sx) != &v + &one {
        return Some(Solution::at(SolutionKind::T3, x.clone()));
    }
    if v > one && inst.potential(&px) + &one != v {
        return Some(Solution::at(SolutionKind::T3, x.clone()));
    }
    None
}

pub fn verify_ufeopl(inst: &UfeoplInstance, x: &BitVector) -> Option<Solution> {
    if !inst.on_line(x) {
        return None;
    }
    let sx = inst.succ(x);
    if !inst.on_line(&sx) {
        return Some(Solution::at(SolutionKind::U2, x.clone()));
    }
    if inst.potential(&sx) <= inst.potential(x) {
        return Some(Solution::at(SolutionKind::U1, x.clone()));
    }
    None
}

pub fn verify_svl(inst: &SvlInstance, x: &BitVector) -> Option<Solution> {
    inst.verifies(x, &inst.target).then(|| Solution::at(SolutionKind::SvlSink, x.clone()))
}

/// Checks that `sol` is a solution of the stated kind at its witness.
pub fn check_eopl_solution(inst: &EoplInstance, sol: &Solution) -> bool {
    sol.witness.len() == 1 && verify_eopl(inst, &sol.witness[0]).is_some_and(|s| s.kind == sol.kind)
}

pub fn check_eoml_solution(inst: &EomlInstance, sol: &Solution) -> bool {
    if sol.witness.len() != 1 {
        return false;
    }
    let x = &sol.witness[0];
    let sx = inst.succ(x);
    let px = inst.pred(x);
    let v = inst.potential(x);
    let one = BigUint::one();
    match sol.kind {
        SolutionKind::T1 => (&inst.succ(&px) != x && !x.is_zero()) || &inst.pred(&sx) != x,
        SolutionKind::T2 => !x.is_zero() && v.is_one(),
        SolutionKind::T3 => (!v.is_zero() && inst.potential(&sx) != &v + &one) || (v > one && inst.potential(&px) + &one != v),
        _ => false,
    }
}

pub fn check_ufeopl_solution(inst: &UfeoplInstance, sol: &Solution) -> bool {
    sol.witness.len() == 1 && verify_ufeopl(inst, &sol.witness[0]).is_some_and(|s| s.kind == sol.kind)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub solution: Solution,
    pub steps: u64,
}

/// `2ⁿ` capped to `u64`, the default walk budget.
pub fn default_budget(n: usize) -> u64 {
    if n >= 63 {
        u64::MAX
    } else {
        1u64 << n
    }
}

/// Walks `x ← S(x)` from `start` until `x` is a solution.
pub fn follow_line(inst: &EoplInstance, start: &BitVector, step_budget: u64) -> Result<Walk> {
    if start.width() != inst.n() {
        return Err(Error::Dimension(format!("start of width {} for n = {}", start.width(), inst.n())));
    }
    if inst.is_self_loop(start) {
        return Err(Error::Argument(format!("start {start} is a self-loop")));
    }
    let mut x = start.clone();
    let mut steps = 0u64;
    loop {
        if let Some(solution) = verify_eopl(inst, &x) {
            return Ok(Walk { solution, steps });
        }
        if steps >= step_budget {
            return Err(Error::BudgetExhausted(step_budget));
        }
        x = inst.succ(&x);
        steps += 1;
    }
}

/// Forward walk on a UniqueForwardEOPL instance.
pub fn follow_forward(inst: &UfeoplInstance, start: &BitVector, step_budget: u64) -> Result<Walk> {
    if !inst.on_line(start) {
        return Err(Error::Argument(format!("start {start} is not on the line")));
    }
    let mut x = start.clone();
    let mut steps = 0u64;
    loop {
        if let Some(solution) = verify_ufeopl(inst, &x) {
            return Ok(Walk { solution, steps });
        }
        if steps >= step_budget {
            return Err(Error::BudgetExhausted(step_budget));
        }
        x = inst.succ(&x);
        steps += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AldousOutcome {
    pub solution: Solution,
    /// Retained vertex of maximum potential the walk started from.
    pub start: BitVector,
    pub walk_steps: u64,
}

pub fn default_samples(n: usize) -> u64 {
    // ⌈2^{n/2}⌉
    let half = n / 2;
    if n % 2 == 0 {
        1u64 << half
    } else {
        ((std::f64::consts::SQRT_2 * (1u64 << half) as f64).ceil()) as u64
    }
}

fn random_vertex(rng: &mut ChaCha8Rng, n: usize) -> BitVector {
    let words = n.div_ceil(32);
    let digits: Vec<u32> = (0..words).map(|_| rng.gen()).collect();
    let mut v = BigUint::new(digits);
    let excess = words * 32 - n;
    v >>= excess;
    BitVector::from_biguint(n, v).expect("masked to width")
}

/// Samples `samples` uniform vertices plus `0ⁿ`, keeps the non-self-loop
/// vertex of largest potential (earliest sample on ties), and walks from it.
pub fn aldous_solve(inst: &EoplInstance, samples: u64, rng_seed: u64, step_budget: u64) -> Result<AldousOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut best = BitVector::zeros(inst.n());
    let mut best_v = inst.potential(&best);
    for _ in 0..samples {
        let x = random_vertex(&mut rng, inst.n());
        if inst.is_self_loop(&x) {
            continue;
        }
        let v = inst.potential(&x);
        if v > best_v {
            best_v = v;
            best = x;
        }
    }
    let walk = follow_line(inst, &best, step_budget)?;
    Ok(AldousOutcome { solution: walk.solution, start: best, walk_steps: walk.steps })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Eopl,
    Eoml,
    Ufeopl,
}

/// Table-backed instance: `S`, `P`, `V` (and `C` for UFEOPL) listed per
/// vertex in index order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitTables {
    pub kind: TableKind,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "S")]
    pub s: Vec<BitVector>,
    #[serde(rename = "P", default, skip_serializing_if = "Vec::is_empty")]
    pub p: Vec<BitVector>,
    #[serde(rename = "V", with = "biguint_strings")]
    pub v: Vec<BigUint>,
    #[serde(rename = "C", default, skip_serializing_if = "Vec::is_empty")]
    pub c: Vec<bool>,
}

mod biguint_strings {
    use super::*;

    pub fn serialize<S: serde::Serializer>(v: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
        let xs: Vec<serde_json::Value> = v
            .iter()
            .map(|x| match x.to_u64() {
                Some(u) if u < (1u64 << 53) => serde_json::Value::from(u),
                _ => serde_json::Value::from(x.to_string()),
            })
            .collect();
        xs.serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigUint>, D::Error> {
        let xs = Vec::<serde_json::Value>::deserialize(d)?;
        xs.into_iter()
            .map(|x| match x {
                serde_json::Value::Number(n) => n
                    .as_u64()
                    .map(BigUint::from)
                    .ok_or_else(|| serde::de::Error::custom("potential must be a non-negative integer")),
                serde_json::Value::String(s) => {
                    s.parse::<BigUint>().map_err(|_| serde::de::Error::custom(format!("bad potential {s:?}")))
                }
                _ => Err(serde::de::Error::custom("potential must be a number or string")),
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub enum LineInstance {
    Eopl(EoplInstance),
    Eoml(EomlInstance),
    Ufeopl(UfeoplInstance),
}

impl ExplicitTables {
    fn check_shape(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_EXPLICIT_WIDTH {
            return Err(Error::Capability(format!("explicit tables need 1 <= n <= {MAX_EXPLICIT_WIDTH}, got {}", self.n)));
        }
        let len = 1usize << self.n;
        let need_p = self.kind != TableKind::Ufeopl;
        if self.s.len() != len || self.v.len() != len || (need_p && self.p.len() != len) {
            return Err(Error::Invariant(format!("tables must have 2^n = {len} entries")));
        }
        if self.kind == TableKind::Ufeopl && self.c.len() != len {
            return Err(Error::Invariant(format!("C table must have {len} entries")));
        }
        if self.s.iter().chain(&self.p).any(|x| x.width() != self.n) {
            return Err(Error::Invariant(format!("table vertices must have width {}", self.n)));
        }
        let bound = match self.kind {
            TableKind::Eoml => (BigUint::one() << self.n) + 1u32,
            _ => BigUint::one() << self.m,
        };
        if let Some(i) = self.v.iter().position(|v| v >= &bound) {
            return Err(Error::Invariant(format!("V at vertex {i} is out of range")));
        }
        Ok(())
    }

    pub fn to_eopl(&self) -> Result<EoplInstance> {
        if self.kind != TableKind::Eopl {
            return Err(Error::Argument("tables are not an EOPL instance".into()));
        }
        self.check_shape()?;
        let s = Arc::new(self.s.clone());
        let p = Arc::new(self.p.clone());
        let v = Arc::new(self.v.clone());
        EoplInstance::new(
            self.n,
            self.m,
            Arc::new(move |x: &BitVector| s[x.index()].clone()),
            Arc::new(move |x: &BitVector| p[x.index()].clone()),
            Arc::new(move |x: &BitVector| v[x.index()].clone()),
        )
    }

    pub fn to_eoml(&self) -> Result<EomlInstance> {
        if self.kind != TableKind::Eoml {
            return Err(Error::Argument("tables are not an EOML instance".into()));
        }
        self.check_shape()?;
        let s = Arc::new(self.s.clone());
        let p = Arc::new(self.p.clone());
        let v = Arc::new(self.v.clone());
        EomlInstance::new(
            self.n,
            Arc::new(move |x: &BitVector| s[x.index()].clone()),
            Arc::new(move |x: &BitVector| p[x.index()].clone()),
            Arc::new(move |x: &BitVector| v[x.index()].clone()),
        )
    }

    pub fn to_ufeopl(&self) -> Result<UfeoplInstance> {
        if self.kind != TableKind::Ufeopl {
            return Err(Error::Argument("tables are not a UFEOPL instance".into()));
        }
        self.check_shape()?;
        let c = Arc::new(self.c.clone());
        let s = Arc::new(self.s.clone());
        let v = Arc::new(self.v.clone());
        UfeoplInstance::new(
            self.n,
            self.m,
            Arc::new(move |x: &BitVector| c[x.index()]),
            Arc::new(move |x: &BitVector| s[x.index()].clone()),
            Arc::new(move |x: &BitVector| v[x.index()].clone()),
        )
    }
}

/// Builds a table-backed instance, re-checking the boundary conditions.
pub fn make_explicit_instance(tables: &ExplicitTables) -> Result<LineInstance> {
    Ok(match tables.kind {
        TableKind::Eopl => LineInstance::Eopl(tables.to_eopl()?),
        TableKind::Eoml => LineInstance::Eoml(tables.to_eoml()?),
        TableKind::Ufeopl => LineInstance::Ufeopl(tables.to_ufeopl()?),
    })
}

pub fn all_vertices(n: usize) -> impl Iterator<Item = BitVector> {
    assert!(n <= MAX_EXPLICIT_WIDTH + 12, "enumerating 2^{n} vertices");
    (0..(1u64 << n)).map(move |i| BitVector::from_u64(n, i))
}

pub fn materialize_eopl(inst: &EoplInstance) -> Result<ExplicitTables> {
    if inst.n() > MAX_EXPLICIT_WIDTH {
        return Err(Error::Capability(format!("width {} exceeds {MAX_EXPLICIT_WIDTH}", inst.n())));
    }
    let mut t = ExplicitTables { kind: TableKind::Eopl, n: inst.n(), m: inst.m(), s: vec![], p: vec![], v: vec![], c: vec![] };
    for x in all_vertices(inst.n()) {
        t.s.push(inst.succ(&x));
        t.p.push(inst.pred(&x));
        t.v.push(inst.potential(&x));
    }
    Ok(t)
}

pub fn materialize_eoml(inst: &EomlInstance) -> Result<ExplicitTables> {
    if inst.n() > MAX_EXPLICIT_WIDTH {
        return Err(Error::Capability(format!("width {} exceeds {MAX_EXPLICIT_WIDTH}", inst.n())));
    }
    let mut t =
        ExplicitTables { kind: TableKind::Eoml, n: inst.n(), m: inst.n() + 1, s: vec![], p: vec![], v: vec![], c: vec![] };
    for x in all_vertices(inst.n()) {
        t.s.push(inst.succ(&x));
        t.p.push(inst.pred(&x));
        t.v.push(inst.potential(&x));
    }
    Ok(t)
}

pub fn materialize_ufeopl(inst: &UfeoplInstance) -> Result<ExplicitTables> {
    if inst.n() > MAX_EXPLICIT_WIDTH {
        return Err(Error::Capability(format!("width {} exceeds {MAX_EXPLICIT_WIDTH}", inst.n())));
    }
    let mut t = ExplicitTables { kind: TableKind::Ufeopl, n: inst.n(), m: inst.m(), s: vec![], p: vec![], v: vec![], c: vec![] };
    for x in all_vertices(inst.n()) {
        t.c.push(inst.on_line(&x));
        t.s.push(inst.succ(&x));
        t.v.push(inst.potential(&x));
    }
    Ok(t)
}

/// Tables for one line `0ⁿ = x₀ → x₁ → … → x_{L−1}` through random distinct
/// vertices with strictly increasing random potentials; every other vertex
/// is a self-loop with potential 0.
pub fn gen_line_tables(n: usize, length: u64, rng_seed: u64) -> Result<ExplicitTables> {
    if n == 0 || n > MAX_EXPLICIT_WIDTH {
        return Err(Error::Capability(format!("generated lines need 1 <= n <= {MAX_EXPLICIT_WIDTH}")));
    }
    let size = 1u64 << n;
    if length < 2 {
        return Err(Error::Argument("a line needs at least 2 vertices since S(0^n) != 0^n".into()));
    }
    if length > size {
        return Err(Error::Argument(format!("length {length} exceeds 2^{n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    // partial Fisher–Yates over the non-zero vertices
    let mut perm: Vec<u64> = (1..size).collect();
    let k = (length - 1) as usize;
    for i in 0..k {
        let j = rng.gen_range(i..perm.len());
        perm.swap(i, j);
    }
    let mut order = vec![0u64];
    order.extend_from_slice(&perm[..k]);
    // potentials: 0 then strictly increasing with random gaps, within m bits
    let m = n + 2;
    let mut pots = vec![0u64];
    let slack = (1u64 << m) - 1 - (length - 1);
    let mut spare = slack;
    for _ in 1..length {
        let extra = if spare > 0 { rng.gen_range(0..=spare.min(3)) } else { 0 };
        spare -= extra;
        pots.push(pots.last().unwrap() + 1 + extra);
    }
    let idx: Vec<BitVector> = (0..size).map(|i| BitVector::from_u64(n, i)).collect();
    let mut s = idx.clone();
    let mut p = idx.clone();
    let mut v = vec![BigUint::zero(); size as usize];
    for (t, &x) in order.iter().enumerate() {
        v[x as usize] = BigUint::from(pots[t]);
        if t + 1 < order.len() {
            s[x as usize] = idx[order[t + 1] as usize].clone();
        }
        if t > 0 {
            p[x as usize] = idx[order[t - 1] as usize].clone();
        }
    }
    Ok(ExplicitTables { kind: TableKind::Eopl, n, m, s, p, v, c: vec![] })
}

pub fn gen_line(n: usize, length: u64, rng_seed: u64) -> Result<EoplInstance> {
    gen_line_tables(n, length, rng_seed)?.to_eopl()
}

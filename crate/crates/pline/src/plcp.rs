//! Encoding the Lemke path of an LCP as an EndOfPotentialLine instance.
//!
//! Vertices are configurations `u ∈ {0,1}^{2d}`. Bit `i < d` says which of
//! `y_i ≥ 0` (bit 0) or `s_i ≥ 0` (bit 1) is tight; the last `d` bits are a
//! one-hot duplicate label, or all zero for a vertex with `z = 0`. For the
//! duplicate label `l` the canonical encoding has bit `l` clear. `0^{2d}` is
//! the start of the line and stands for the primary ray.
//!
//! The polyhedron is `s − My − z·1 = q`, `y, s, z ≥ 0`, built over the LCP
//! scaled to integer data; `y` is unaffected by the scaling while `s` and `z`
//! are multiplied by the scale.
//!
//! Edges are oriented by determinant sign: along the edge on which `y_i` is
//! free exactly for `i ∈ Y`, the forward direction decreases `z` when
//! `det M_{YY} > 0` and increases it when `det M_{YY} < 0` (`det` of the
//! empty matrix is 1). Every vertex with a duplicate label then has one
//! incoming and one outgoing edge, and on P-matrices forward always means
//! decreasing `z`.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, Rational, RationalMatrix};
use crate::lcp::{self, find_nonpositive_minor, LcpInstance, LcpResult, Variable};
use crate::line::{check_eopl_solution, BitVector, EoplInstance, Solution, SolutionKind};

/// A point `(y, s, z)` of the Lemke polyhedron.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVertex {
    pub y: Vec<Rational>,
    pub s: Vec<Rational>,
    pub z: Rational,
}

impl PolyVertex {
    fn value(&self, v: Variable) -> &Rational {
        match v {
            Variable::W(i) => &self.s[i],
            Variable::Y(i) => &self.y[i],
            Variable::Z => &self.z,
        }
    }

    fn value_mut(&mut self, v: Variable) -> &mut Rational {
        match v {
            Variable::W(i) => &mut self.s[i],
            Variable::Y(i) => &mut self.y[i],
            Variable::Z => &mut self.z,
        }
    }
}

/// A decoded valid configuration: the vertex and its basic variables.
#[derive(Clone, Debug)]
struct Decoded {
    x: PolyVertex,
    basic: Vec<Variable>,
    label: Option<usize>,
}

#[derive(Debug)]
struct Core {
    d: usize,
    lcp: LcpInstance,
    delta: BigInt,
    start: PolyVertex,
    start_config: BitVector,
}

impl Core {
    fn n(&self) -> usize {
        2 * self.d
    }

    fn column(&self, v: Variable) -> Vec<Rational> {
        let d = self.d;
        match v {
            Variable::W(i) => (0..d).map(|r| if r == i { Rational::one() } else { Rational::zero() }).collect(),
            Variable::Y(j) => (0..d).map(|r| -self.lcp.matrix().get(r, j)).collect(),
            Variable::Z => vec![-Rational::one(); d],
        }
    }

    fn basis_matrix(&self, basic: &[Variable]) -> RationalMatrix {
        let cols: Vec<Vec<Rational>> = basic.iter().map(|&v| self.column(v)).collect();
        let rows = (0..self.d).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
        RationalMatrix::from_rows(rows).expect("square")
    }

    fn point(&self, basic: &[Variable], values: Vec<Rational>) -> PolyVertex {
        let d = self.d;
        let mut x = PolyVertex { y: vec![Rational::zero(); d], s: vec![Rational::zero(); d], z: Rational::zero() };
        for (&v, val) in basic.iter().zip(values) {
            *x.value_mut(v) = val;
        }
        x
    }

    fn marker(&self) -> BitVector {
        let n = self.n();
        BitVector::zeros(n).with_bit(n - 2, true).with_bit(n - 1, true)
    }

    fn label_bits(&self, u: &BitVector) -> Vec<usize> {
        (0..self.d).filter(|&i| u.get(self.d + i)).collect()
    }

    fn basic_for(&self, u: &BitVector, label: Option<usize>) -> Vec<Variable> {
        let mut basic = Vec::with_capacity(self.d);
        for i in 0..self.d {
            if Some(i) == label {
                continue;
            }
            basic.push(if u.get(i) { Variable::Y(i) } else { Variable::W(i) });
        }
        if label.is_some() {
            basic.push(Variable::Z);
        }
        basic
    }

    /// `None` for `0^n` and for every invalid configuration.
    fn decode(&self, u: &BitVector) -> Option<Decoded> {
        if u.is_zero() {
            return None;
        }
        let labels = self.label_bits(u);
        if labels.len() > 1 {
            return None;
        }
        let label = labels.first().copied();
        if label.is_some_and(|l| u.get(l)) {
            return None;
        }
        let basic = self.basic_for(u, label);
        let values = exact::solve_linear(&self.basis_matrix(&basic), self.lcp.q()).ok()?;
        if values.iter().any(Signed::is_negative) {
            return None;
        }
        let x = self.point(&basic, values);
        if self.itoe(&x).ok().as_ref() != Some(u) {
            return None;
        }
        Some(Decoded { x, basic, label })
    }

    fn itoe(&self, x: &PolyVertex) -> Result<BitVector> {
        let d = self.d;
        if (0..d).any(|i| !x.y[i].is_zero() && !x.s[i].is_zero()) {
            return Ok(self.marker());
        }
        let dl: Vec<usize> = (0..d).filter(|&i| x.y[i].is_zero() && x.s[i].is_zero()).collect();
        if dl.len() > 1 {
            return Err(Error::Degenerate(format!("{} duplicate labels", dl.len())));
        }
        let mut u = BitVector::zeros(2 * d);
        for i in 0..d {
            if dl.first() == Some(&i) {
                u = u.with_bit(d + i, true);
            } else if x.s[i].is_zero() {
                u = u.with_bit(i, true);
            }
        }
        Ok(u)
    }

    /// The vertex reached by raising nonbasic `entering` from `dec`, and the
    /// rate of change of `z` along that edge. The vertex is `None` on a ray.
    fn neighbor(&self, dec: &Decoded, entering: Variable) -> Option<(Option<PolyVertex>, Rational)> {
        let b = self.basis_matrix(&dec.basic);
        let rhs: Vec<Rational> = self.column(entering).into_iter().map(|v| -v).collect();
        let dir = exact::solve_linear(&b, &rhs).ok()?;
        let dz = if entering == Variable::Z {
            Rational::one()
        } else {
            dec.basic.iter().position(|&v| v == Variable::Z).map_or_else(Rational::zero, |k| dir[k].clone())
        };
        let mut step: Option<Rational> = None;
        for (k, dv) in dir.iter().enumerate() {
            if dv.is_negative() {
                let t = dec.x.value(dec.basic[k]) / -dv;
                if step.as_ref().map_or(true, |s| &t < s) {
                    step = Some(t);
                }
            }
        }
        let Some(t) = step else {
            return Some((None, dz));
        };
        let mut x = dec.x.clone();
        for (k, dv) in dir.iter().enumerate() {
            let v = x.value_mut(dec.basic[k]);
            *v += &t * dv;
        }
        *x.value_mut(entering) = t;
        Some((Some(x), dz))
    }

    /// Sign of `det M_{YY}` for the edge support `Y`.
    fn edge_sign(&self, dec: &Decoded, entering: Variable) -> i32 {
        let mut support: Vec<usize> = dec
            .basic
            .iter()
            .filter_map(|v| match v {
                Variable::Y(i) => Some(*i),
                _ => None,
            })
            .collect();
        if let Variable::Y(i) = entering {
            support.push(i);
        }
        support.sort_unstable();
        if support.is_empty() {
            return 1;
        }
        let det = exact::principal_minor(self.lcp.matrix(), &support).expect("in range");
        sign(&det)
    }

    /// `+1` if the edge leaves `dec` forward, `−1` if it enters it, `0` if undetermined.
    fn orientation(&self, dec: &Decoded, entering: Variable) -> (i32, Option<PolyVertex>) {
        match self.neighbor(dec, entering) {
            Some((x, dz)) => (-self.edge_sign(dec, entering) * sign(&dz), x),
            None => (0, None),
        }
    }

    fn step(&self, u: &BitVector, forward: bool) -> BitVector {
        let Some(dec) = self.decode(u) else {
            return u.clone();
        };
        if !forward && dec.x == self.start {
            return BitVector::zeros(self.n());
        }
        let want = if forward { 1 } else { -1 };
        let next = match dec.label {
            None => {
                let (o, x) = self.orientation(&dec, Variable::Z);
                if o != want {
                    return u.clone();
                }
                x
            }
            Some(l) => {
                let (o, x1) = self.orientation(&dec, Variable::Y(l));
                if o == want {
                    x1
                } else {
                    self.neighbor(&dec, Variable::W(l)).and_then(|(x, _)| x)
                }
            }
        };
        let Some(next) = next else {
            return u.clone();
        };
        let advance = if forward { next.z < dec.x.z } else { next.z > dec.x.z };
        if !advance {
            return u.clone();
        }
        self.itoe(&next).unwrap_or_else(|_| self.marker())
    }

    fn successor(&self, u: &BitVector) -> BitVector {
        if u.is_zero() {
            return self.start_config.clone();
        }
        self.step(u, true)
    }

    fn predecessor(&self, u: &BitVector) -> BitVector {
        if u.is_zero() {
            return u.clone();
        }
        self.step(u, false)
    }

    fn potential(&self, u: &BitVector) -> BigUint {
        match self.decode(u) {
            None => BigUint::zero(),
            Some(dec) => {
                let delta = Rational::from_integer(self.delta.clone());
                let v = &delta * &delta * (&delta - &dec.x.z);
                exact::rational_floor_to_biguint(&v)
            }
        }
    }
}

fn sign(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// The EOPL instance built from an LCP, with access to the encoding.
#[derive(Clone, Debug)]
pub struct PlcpEoplInstance {
    eopl: EoplInstance,
    source: LcpInstance,
    core: Arc<Core>,
    m: usize,
}

/// Outcome of building the reduction: `q ≥ 0` is solved by `y = 0` before
/// any line exists.
#[derive(Clone, Debug)]
pub enum PlcpBuild {
    Solved(LcpResult),
    Reduced(Box<PlcpEoplInstance>),
}

/// `Δ = (2d)!·I_max^{2d+1} + 1`.
pub fn delta_bound(d: usize, i_max: &BigInt) -> BigInt {
    let fact: BigInt = (1..=2 * d as u64).map(BigInt::from).product();
    fact * num_traits::pow(i_max.clone(), 2 * d + 1) + 1
}

/// Potential bit width `⌈log₂(2Δ³)⌉`.
pub fn potential_bits(delta: &BigInt) -> usize {
    let cube = delta.magnitude().pow(3u32) * 2u32;
    exact::ceil_log2(&cube) as usize
}

pub fn build_plcp_eopl(inst: &LcpInstance) -> Result<PlcpBuild> {
    let d = inst.d();
    if inst.q().iter().all(|v| !v.is_negative()) {
        return Ok(PlcpBuild::Solved(LcpResult::Q1 { y: vec![Rational::zero(); d] }));
    }
    let (scaled, _) = inst.scaled_to_integers();
    let i_max = lcp::max_abs_integer(&scaled);
    let delta = delta_bound(d, &i_max);
    let m = potential_bits(&delta);
    let qmin = scaled.q().iter().min().expect("d >= 1").clone();
    if scaled.q().iter().filter(|&v| v == &qmin).count() > 1 {
        return Err(Error::Degenerate("several coordinates attain min q; the start vertex is degenerate".into()));
    }
    let z0 = -qmin;
    let start = PolyVertex { y: vec![Rational::zero(); d], s: scaled.q().iter().map(|v| v + &z0).collect(), z: z0 };
    let mut core = Core { d, lcp: scaled, delta, start: start.clone(), start_config: BitVector::zeros(2 * d) };
    core.start_config = core.itoe(&start)?;
    if core.decode(&core.start_config).map(|dec| dec.x) != Some(start) {
        return Err(Error::Degenerate("start vertex does not decode back to itself".into()));
    }
    let core = Arc::new(core);
    let (cs, cp, cv) = (core.clone(), core.clone(), core.clone());
    let eopl = EoplInstance::new(
        2 * d,
        m,
        Arc::new(move |u: &BitVector| cs.successor(u)),
        Arc::new(move |u: &BitVector| cp.predecessor(u)),
        Arc::new(move |u: &BitVector| cv.potential(u)),
    )?;
    Ok(PlcpBuild::Reduced(Box::new(PlcpEoplInstance { eopl, source: inst.clone(), core, m })))
}

impl PlcpEoplInstance {
    pub fn eopl(&self) -> &EoplInstance {
        &self.eopl
    }

    pub fn source(&self) -> &LcpInstance {
        &self.source
    }

    /// The integer-scaled instance whose polyhedron the configurations encode.
    pub fn scaled(&self) -> &LcpInstance {
        &self.core.lcp
    }

    pub fn d(&self) -> usize {
        self.core.d
    }

    pub fn delta(&self) -> &BigInt {
        &self.core.delta
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn start_vertex(&self) -> &PolyVertex {
        &self.core.start
    }

    pub fn start_config(&self) -> &BitVector {
        &self.core.start_config
    }

    pub fn is_valid(&self, u: &BitVector) -> bool {
        u.is_zero() || self.core.decode(u).is_some()
    }

    pub fn etoi(&self, u: &BitVector) -> Result<PolyVertex> {
        if u.width() != self.core.n() {
            return Err(Error::Dimension(format!("configuration of width {} for d = {}", u.width(), self.d())));
        }
        self.core.decode(u).map(|dec| dec.x).ok_or_else(|| Error::Contract(format!("{u} is not a valid non-start configuration")))
    }

    pub fn itoe(&self, x: &PolyVertex) -> Result<BitVector> {
        self.core.itoe(x)
    }

    pub fn successor(&self, u: &BitVector) -> BitVector {
        self.core.successor(u)
    }

    pub fn predecessor(&self, u: &BitVector) -> BitVector {
        self.core.predecessor(u)
    }

    pub fn potential(&self, u: &BitVector) -> BigUint {
        self.core.potential(u)
    }

    /// `⌊Δ²(Δ − z)⌋` for a `z` of the scaled system.
    pub fn potential_at(&self, z: &Rational) -> BigUint {
        let delta = Rational::from_integer(self.core.delta.clone());
        exact::rational_floor_to_biguint(&(&delta * &delta * (&delta - z)))
    }
}

/// Maps an EOPL solution of the constructed instance back to the LCP.
pub fn pullback_plcp_solution(inst: &PlcpEoplInstance, sol: &Solution) -> Result<LcpResult> {
    if sol.witness.len() != 1 || sol.vertex().width() != 2 * inst.d() {
        return Err(Error::Contract("witness has the wrong shape".into()));
    }
    let u = sol.vertex();
    if u.is_zero() {
        return Err(Error::Contract("0^n is never a solution".into()));
    }
    if !check_eopl_solution(&inst.eopl, sol) {
        return Err(Error::Contract(format!("{u} is not a {:?} solution", sol.kind)));
    }
    if sol.kind == SolutionKind::R2 {
        return Err(Error::Breach(format!("R2 at {u}, but potentials strictly increase on every edge")));
    }
    let dec = inst.core.decode(u).ok_or_else(|| Error::Breach(format!("solution {u} decodes to no vertex")))?;
    if dec.x.z.is_zero() {
        let y = dec.x.y;
        if !lcp::verify_lcp_solution(&inst.source, &y) {
            return Err(Error::Breach("z = 0 vertex is not complementary".into()));
        }
        return Ok(LcpResult::Q1 { y });
    }
    let support: Vec<usize> = dec
        .basic
        .iter()
        .filter_map(|v| match v {
            Variable::Y(i) => Some(*i),
            _ => None,
        })
        .collect();
    let mut hints = vec![support.clone()];
    if let Some(l) = dec.label {
        let mut with_l = support;
        with_l.push(l);
        hints.push(with_l);
    }
    match find_nonpositive_minor(inst.source.matrix(), &hints, lcp::MAX_MINOR_SEARCH)? {
        Some((index_set, minor)) => Ok(LcpResult::Q2 { index_set, minor }),
        None => Err(Error::Degenerate(format!("line ends at {u} with z > 0 but every principal minor is positive"))),
    }
}

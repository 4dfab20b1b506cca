//! Piecewise-linear arithmetic circuits (max, min, +, −, ×constant), their
//! text format, exact evaluation, and the `EvaluableMap` adapter trait.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{abs_pow, bit_length, format_rational, parse_rational, Rational, RationalMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormIndex {
    Finite(u32),
    Inf,
}

impl NormIndex {
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            return Ok(NormIndex::Inf);
        }
        match t.parse::<u32>() {
            Ok(p) if p >= 1 => Ok(NormIndex::Finite(p)),
            _ => Err(Error::Parse(format!("norm index must be a positive integer or inf, got {t:?}"))),
        }
    }

    /// `Σ|v_i|^p` for finite `p`, `max|v_i|` for `∞`.
    pub fn power_norm(&self, v: &[Rational]) -> Rational {
        lp_norm(v, *self)
    }

    /// Raises a scale factor to the power used by `power_norm`.
    pub fn scale_power(&self, c: &Rational) -> Rational {
        match self {
            NormIndex::Finite(p) => num_traits::pow(c.clone(), *p as usize),
            NormIndex::Inf => c.clone(),
        }
    }

    /// Decides `‖u‖ ≤ c·‖w‖` exactly (for `c ≥ 0`).
    pub fn norm_le_scaled(&self, u: &[Rational], c: &Rational, w: &[Rational]) -> bool {
        self.power_norm(u) <= self.scale_power(c) * self.power_norm(w)
    }
}

impl fmt::Display for NormIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormIndex::Finite(p) => write!(f, "{p}"),
            NormIndex::Inf => write!(f, "inf"),
        }
    }
}

/// For `p = 1` and `p = ∞` the norm itself; for other finite `p` its `p`-th power.
pub fn lp_norm(v: &[Rational], p: NormIndex) -> Rational {
    match p {
        NormIndex::Inf => v.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero),
        NormIndex::Finite(p) => v.iter().fold(Rational::zero(), |acc, x| acc + abs_pow(x, p)),
    }
}

pub fn sub_vec(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn clamp01(x: Rational) -> Rational {
    if x.is_negative() {
        Rational::zero()
    } else if x > Rational::one() {
        Rational::one()
    } else {
        x
    }
}

pub fn in_unit_cube(x: &[Rational]) -> bool {
    x.iter().all(|v| !v.is_negative() && v <= &Rational::one())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    /// 0-based input coordinate.
    Input(usize),
    Const(Rational),
    Add(usize, usize),
    Sub(usize, usize),
    MulC(Rational, usize),
    Max(usize, usize),
    Min(usize, usize),
}

impl Gate {
    fn operands(&self) -> Vec<usize> {
        match self {
            Gate::Input(_) | Gate::Const(_) => vec![],
            Gate::MulC(_, a) => vec![*a],
            Gate::Add(a, b) | Gate::Sub(a, b) | Gate::Max(a, b) | Gate::Min(a, b) => vec![*a, *b],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinFixpCircuit {
    d: usize,
    gates: Vec<Gate>,
    outputs: Vec<usize>,
    c: Rational,
    p: NormIndex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitSize {
    pub num_inputs: u64,
    pub num_gates: u64,
    pub constant_bits: u64,
}

impl CircuitSize {
    pub fn total(&self) -> u64 {
        self.num_inputs + self.num_gates + self.constant_bits
    }
}

impl LinFixpCircuit {
    pub fn new(d: usize, gates: Vec<Gate>, outputs: Vec<usize>, c: Rational, p: NormIndex) -> Result<Self> {
        if d == 0 {
            return Err(Error::Circuit("dimension must be positive".into()));
        }
        if !(c.is_positive() && c < Rational::one()) {
            return Err(Error::Circuit(format!("contraction factor {c} outside (0,1)")));
        }
        for (k, g) in gates.iter().enumerate() {
            if let Gate::Input(i) = g {
                if *i >= d {
                    return Err(Error::Circuit(format!("gate g{} reads input {} of {d}", k + 1, i + 1)));
                }
            }
            if let Some(bad) = g.operands().into_iter().find(|&a| a >= k) {
                return Err(Error::Circuit(format!("gate g{} references g{} which is not earlier", k + 1, bad + 1)));
            }
        }
        if outputs.len() != d {
            return Err(Error::Circuit(format!("{} outputs for dimension {d}", outputs.len())));
        }
        if let Some(bad) = outputs.iter().find(|&&o| o >= gates.len()) {
            return Err(Error::Circuit(format!("output references missing gate g{}", bad + 1)));
        }
        Ok(Self { d, gates, outputs, c, p })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn contraction_factor(&self) -> &Rational {
        &self.c
    }

    pub fn norm(&self) -> NormIndex {
        self.p
    }

    /// Number of max/min gates.
    pub fn num_nonlinear(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Max(..) | Gate::Min(..))).count()
    }

    /// Exact gate-by-gate evaluation with outputs clamped to `[0,1]`.
    pub fn evaluate(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.d {
            return Err(Error::Dimension(format!("input of length {} for a {}-dimensional circuit", x.len(), self.d)));
        }
        let mut vals: Vec<Rational> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = match g {
                Gate::Input(i) => x[*i].clone(),
                Gate::Const(c) => c.clone(),
                Gate::Add(a, b) => &vals[*a] + &vals[*b],
                Gate::Sub(a, b) => &vals[*a] - &vals[*b],
                Gate::MulC(c, a) => c * &vals[*a],
                Gate::Max(a, b) => vals[*a].clone().max(vals[*b].clone()),
                Gate::Min(a, b) => vals[*a].clone().min(vals[*b].clone()),
            };
            vals.push(v);
        }
        Ok(self.outputs.iter().map(|&o| clamp01(vals[o].clone())).collect())
    }

    pub fn size(&self) -> CircuitSize {
        circuit_size(self)
    }

    /// Canonical text form; gates are renamed `g1..gN` in order.
    pub fn unparse(&self) -> String {
        let mut s = format!("d {}\nc {}\np {}\n", self.d, format_rational(&self.c), self.p);
        for (k, g) in self.gates.iter().enumerate() {
            let body = match g {
                Gate::Input(i) => format!("in {}", i + 1),
                Gate::Const(c) => format!("const {}", format_rational(c)),
                Gate::Add(a, b) => format!("add g{} g{}", a + 1, b + 1),
                Gate::Sub(a, b) => format!("sub g{} g{}", a + 1, b + 1),
                Gate::MulC(c, a) => format!("mulc {} g{}", format_rational(c), a + 1),
                Gate::Max(a, b) => format!("max g{} g{}", a + 1, b + 1),
                Gate::Min(a, b) => format!("min g{} g{}", a + 1, b + 1),
            };
            s.push_str(&format!("g{} = {}\n", k + 1, body));
        }
        let outs: Vec<String> = self.outputs.iter().map(|o| format!("g{}", o + 1)).collect();
        s.push_str(&format!("out {}\n", outs.join(" ")));
        s
    }
}

pub fn circuit_size(circuit: &LinFixpCircuit) -> CircuitSize {
    let constant_bits = circuit
        .gates
        .iter()
        .map(|g| match g {
            Gate::Const(c) | Gate::MulC(c, _) => bit_length(c).0,
            _ => 0,
        })
        .sum();
    CircuitSize { num_inputs: circuit.d as u64, num_gates: circuit.gates.len() as u64, constant_bits }
}

pub fn evaluate(circuit: &LinFixpCircuit, x: &[Rational]) -> Result<Vec<Rational>> {
    circuit.evaluate(x)
}

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    tokens: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, ch) in text.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push((s, &text[s..i]));
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            tokens.push((s, &text[s..]));
        }
        Self { line, text, tokens, pos: 0 }
    }

    fn err(&self, column: usize, message: impl Into<String>) -> Error {
        Error::Syntax { line: self.line, column, message: message.into() }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let t = self.tokens.get(self.pos).copied().ok_or_else(|| self.err(self.text.len() + 1, format!("expected {what}")))?;
        self.pos += 1;
        Ok((t.0 + 1, t.1))
    }

    fn finish(&self) -> Result<()> {
        match self.tokens.get(self.pos) {
            Some(t) => Err(self.err(t.0 + 1, format!("unexpected token {:?}", t.1))),
            None => Ok(()),
        }
    }
}

fn gate_label(tok: &str) -> Option<&str> {
    let rest = tok.strip_prefix('g')?;
    (!rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())).then_some(rest)
}

/// Parses the line-oriented circuit format (`d`, `c`, `p` headers, gate
/// lines `gK = op ...`, one `out` line, `#` comments).
pub fn parse_circuit(text: &str) -> Result<LinFixpCircuit> {
    let mut d: Option<usize> = None;
    let mut c: Option<Rational> = None;
    let mut p: Option<NormIndex> = None;
    let mut gates: Vec<Gate> = Vec::new();
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut outputs: Option<Vec<usize>> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut cur = Cursor::new(lineno + 1, line);
        if cur.tokens.is_empty() {
            continue;
        }
        let (col, head) = cur.next("a directive")?;
        let resolve = |cur: &Cursor, col: usize, tok: &str| -> Result<usize> {
            names.get(tok).copied().ok_or_else(|| cur.err(col, format!("undefined gate {tok}")))
        };
        match head {
            "d" => {
                let (col, v) = cur.next("dimension")?;
                d = Some(v.parse().map_err(|_| cur.err(col, format!("bad dimension {v:?}")))?);
                cur.finish()?;
            }
            "c" => {
                let (col, v) = cur.next("contraction factor")?;
                c = Some(parse_rational(v).map_err(|e| cur.err(col, e.to_string()))?);
                cur.finish()?;
            }
            "p" => {
                let (col, v) = cur.next("norm index")?;
                p = Some(NormIndex::parse(v).map_err(|e| cur.err(col, e.to_string()))?);
                cur.finish()?;
            }
            "out" => {
                if outputs.is_some() {
                    return Err(cur.err(col, "second out line"));
                }
                let mut outs = Vec::new();
                while cur.pos < cur.tokens.len() {
                    let (col, tok) = cur.next("gate")?;
                    outs.push(resolve(&cur, col, tok)?);
                }
                outputs = Some(outs);
            }
            name if gate_label(name).is_some() => {
                if names.contains_key(name) {
                    return Err(cur.err(col, format!("gate {name} defined twice")));
                }
                let (col_eq, eq) = cur.next("'='")?;
                if eq != "=" {
                    return Err(cur.err(col_eq, format!("expected '=', found {eq:?}")));
                }
                let (col_op, op) = cur.next("operation")?;
                let operand = |cur: &mut Cursor| -> Result<usize> {
                    let (col, tok) = cur.next("gate operand")?;
                    resolve(cur, col, tok)
                };
                let gate = match op {
                    "in" => {
                        let (col, v) = cur.next("input index")?;
                        let i: usize = v.parse().map_err(|_| cur.err(col, format!("bad input index {v:?}")))?;
                        if i == 0 {
                            return Err(cur.err(col, "input indices start at 1"));
                        }
                        Gate::Input(i - 1)
                    }
                    "const" => {
                        let (col, v) = cur.next("constant")?;
                        Gate::Const(parse_rational(v).map_err(|e| cur.err(col, e.to_string()))?)
                    }
                    "mulc" => {
                        let (col, v) = cur.next("constant")?;
                        let k = parse_rational(v).map_err(|e| cur.err(col, e.to_string()))?;
                        Gate::MulC(k, operand(&mut cur)?)
                    }
                    "add" | "sub" | "max" | "min" => {
                        let a = operand(&mut cur)?;
                        let b = operand(&mut cur)?;
                        match op {
                            "add" => Gate::Add(a, b),
                            "sub" => Gate::Sub(a, b),
                            "max" => Gate::Max(a, b),
                            _ => Gate::Min(a, b),
                        }
                    }
                    other => return Err(cur.err(col_op, format!("unknown operation {other:?}"))),
                };
                cur.finish()?;
                names.insert(name.to_string(), gates.len());
                gates.push(gate);
            }
            other => return Err(cur.err(col, format!("unknown directive {other:?}"))),
        }
    }
    let d = d.ok_or_else(|| Error::Circuit("missing 'd' header".into()))?;
    let c = c.ok_or_else(|| Error::Circuit("missing 'c' header".into()))?;
    let p = p.ok_or_else(|| Error::Circuit("missing 'p' header".into()))?;
    let outputs = outputs.ok_or_else(|| Error::Circuit("missing 'out' line".into()))?;
    LinFixpCircuit::new(d, gates, outputs, c, p)
}

/// A map `[0,1]^d → [0,1]^d` that can be evaluated exactly.
pub trait EvaluableMap: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[Rational]) -> Vec<Rational>;

    /// Coordinate `k` of `f(x)`.
    fn eval_coord(&self, x: &[Rational], k: usize) -> Rational {
        self.eval(x).swap_remove(k)
    }
}

impl EvaluableMap for LinFixpCircuit {
    fn dim(&self) -> usize {
        self.d
    }

    fn eval(&self, x: &[Rational]) -> Vec<Rational> {
        self.evaluate(x).expect("input dimension matches circuit")
    }
}

impl<T: EvaluableMap + ?Sized> EvaluableMap for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, x: &[Rational]) -> Vec<Rational> {
        (**self).eval(x)
    }

    fn eval_coord(&self, x: &[Rational], k: usize) -> Rational {
        (**self).eval_coord(x, k)
    }
}

/// `x ↦ clamp(A x + b)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMap {
    #[serde(rename = "A", with = "crate::exact::serde_rational::rows")]
    a: Vec<Vec<Rational>>,
    #[serde(with = "crate::exact::serde_rational::vec")]
    b: Vec<Rational>,
}

impl AffineMap {
    pub fn new(a: RationalMatrix, b: Vec<Rational>) -> Result<Self> {
        if !a.is_square() || a.rows() != b.len() {
            return Err(Error::Dimension(format!(
                "affine map with {}x{} matrix and offset of length {}",
                a.rows(),
                a.cols(),
                b.len()
            )));
        }
        Ok(Self { a: a.to_rows(), b })
    }

    pub fn matrix(&self) -> RationalMatrix {
        RationalMatrix::from_rows(self.a.clone()).expect("square by construction")
    }

    pub fn offset(&self) -> &[Rational] {
        &self.b
    }

    /// Linear-solve oracle for the fixpoint, `(I − A)⁻¹ b`.
    pub fn exact_fixpoint(&self) -> Result<Vec<Rational>> {
        let d = self.b.len();
        let mut m = RationalMatrix::identity(d);
        for i in 0..d {
            for j in 0..d {
                let v = m.get(i, j) - &self.a[i][j];
                m.set(i, j, v);
            }
        }
        crate::exact::solve_linear(&m, &self.b)
    }

    /// Gate-level circuit computing the same map.
    pub fn to_circuit(&self, c: Rational, p: NormIndex) -> Result<LinFixpCircuit> {
        let d = self.b.len();
        let mut gates: Vec<Gate> = (0..d).map(Gate::Input).collect();
        let mut outputs = Vec::with_capacity(d);
        for i in 0..d {
            gates.push(Gate::Const(self.b[i].clone()));
            let mut acc = gates.len() - 1;
            for j in 0..d {
                if self.a[i][j].is_zero() {
                    continue;
                }
                gates.push(Gate::MulC(self.a[i][j].clone(), j));
                gates.push(Gate::Add(acc, gates.len() - 1));
                acc = gates.len() - 1;
            }
            outputs.push(acc);
        }
        LinFixpCircuit::new(d, gates, outputs, c, p)
    }
}

impl EvaluableMap for AffineMap {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn eval(&self, x: &[Rational]) -> Vec<Rational> {
        (0..self.b.len()).map(|k| self.eval_coord(x, k)).collect()
    }

    fn eval_coord(&self, x: &[Rational], k: usize) -> Rational {
        // unreduced accumulation, one gcd at the end
        let (mut num, mut den) = (self.b[k].numer().clone(), self.b[k].denom().clone());
        for (a, xi) in self.a[k].iter().zip(x) {
            if a.is_zero() || xi.is_zero() {
                continue;
            }
            let tn = a.numer() * xi.numer();
            let td = a.denom() * xi.denom();
            if td == den {
                num += tn;
            } else {
                num = num * &td + tn * &den;
                den *= td;
            }
        }
        clamp01(Rational::new(num, den))
    }
}

type VecFn = dyn Fn(&[Rational]) -> Vec<Rational> + Send + Sync;

/// Closure-backed map; outputs are clamped to `[0,1]`.
#[derive(Clone)]
pub struct FnMap {
    d: usize,
    f: Arc<VecFn>,
}

impl FnMap {
    pub fn new(d: usize, f: impl Fn(&[Rational]) -> Vec<Rational> + Send + Sync + 'static) -> Self {
        Self { d, f: Arc::new(f) }
    }
}

impl fmt::Debug for FnMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnMap(d={})", self.d)
    }
}

impl EvaluableMap for FnMap {
    fn dim(&self) -> usize {
        self.d
    }

    fn eval(&self, x: &[Rational]) -> Vec<Rational> {
        (self.f)(x).into_iter().map(clamp01).collect()
    }
}

/// Wraps a map and counts evaluations.
pub struct CountingMap<M> {
    inner: M,
    count: AtomicU64,
}

impl<M: EvaluableMap> CountingMap<M> {
    pub fn new(inner: M) -> Self {
        Self { inner, count: AtomicU64::new(0) }
    }

    pub fn queries(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

impl<M: EvaluableMap> EvaluableMap for CountingMap<M> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[Rational]) -> Vec<Rational> {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.eval(x)
    }

    fn eval_coord(&self, x: &[Rational], k: usize) -> Rational {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.eval_coord(x, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    const HALF: &str = "d 1\nc 1/2\np 2\ng1 = in 1\ng2 = mulc 1/2 g1\nout g2";

    #[test]
    fn parse_half_map() {
        let c = parse_circuit(HALF).unwrap();
        assert_eq!(c.dim(), 1);
        assert_eq!(c.evaluate(&[rat(1, 3)]).unwrap(), vec![rat(1, 6)]);
        assert_eq!(circuit_size(&c), CircuitSize { num_inputs: 1, num_gates: 2, constant_bits: 2 });
    }

    #[test]
    fn undefined_gate_reports_position() {
        let err = parse_circuit(&HALF.replace("out g2", "out g3")).unwrap_err();
        assert_eq!(err, Error::Syntax { line: 6, column: 5, message: "undefined gate g3".into() });
    }

    #[test]
    fn rejects_bad_headers_and_forward_refs() {
        assert!(matches!(parse_circuit(&HALF.replace("c 1/2", "c 1")), Err(Error::Circuit(_))));
        assert!(matches!(parse_circuit("d 1\nc 1/2\np 1\ng1 = add g1 g1\nout g1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_circuit("d 1\nc 1/2\np 0\ng1 = in 1\nout g1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_circuit("d 2\nc 1/2\np 1\ng1 = in 1\nout g1"), Err(Error::Circuit(_))));
        assert!(matches!(parse_circuit("d 1\nc 1/2\np 1\ng1 = in 2\nout g1"), Err(Error::Circuit(_))));
        assert!(matches!(parse_circuit("d 1\nc 1/2\np 1\ng1 = frob 2\nout g1"), Err(Error::Syntax { line: 4, column: 6, .. })));
    }

    #[test]
    fn clamped_affine_fixpoint() {
        let text = "# x/2 + 1/4 clamped\nd 1\nc 1/2\np inf\ng1 = in 1\ng2 = mulc 1/2 g1\ng3 = const 1/4\ng4 = add g2 g3\ng5 = const 1\ng6 = min g5 g4\ng7 = const 0\ng8 = max g7 g6\nout g8\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.norm(), NormIndex::Inf);
        assert_eq!(c.evaluate(&[rat(1, 2)]).unwrap(), vec![rat(1, 2)]);
        assert_eq!(c.num_nonlinear(), 2);
    }

    #[test]
    fn two_dimensional_round_trip() {
        let text = "d 2\nc 1/2\np 1\ng1 = in 1\ng2 = in 2\ng3 = add g1 g2\ng4 = mulc 1/4 g3\ng5 = const 1/2\ng6 = max g4 g5\ng7 = min g6 g4\nout g7 g5\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.evaluate(&[int(1), int(1)]).unwrap(), vec![rat(1, 2), rat(1, 2)]);
        let again = parse_circuit(&c.unparse()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.unparse(), c.unparse());
    }

    #[test]
    fn norms() {
        assert_eq!(lp_norm(&[rat(3, 4), rat(-1, 4)], NormIndex::Finite(1)), int(1));
        assert_eq!(lp_norm(&[int(3), int(4)], NormIndex::Finite(2)), int(25));
        assert_eq!(lp_norm(&[int(3), int(-4)], NormIndex::Inf), int(4));
        assert_eq!(lp_norm(&[int(0), int(0)], NormIndex::Finite(3)), int(0));
        assert!(NormIndex::Finite(2).norm_le_scaled(&[int(3), int(4)], &int(5), &[int(1), int(0)]));
        assert!(!NormIndex::Finite(2).norm_le_scaled(&[int(3), int(4)], &rat(49, 10), &[int(1), int(0)]));
    }

    #[test]
    fn size_counts_added_gate() {
        let c = parse_circuit(HALF).unwrap();
        let bigger = parse_circuit(&HALF.replace("out g2", "g3 = add g2 g1\nout g3")).unwrap();
        assert_eq!(bigger.size().num_gates, c.size().num_gates + 1);
        let noconst = parse_circuit("d 1\nc 1/2\np 1\ng1 = in 1\ng2 = max g1 g1\nout g2").unwrap();
        assert_eq!(noconst.size().constant_bits, 0);
    }

    #[test]
    fn affine_circuit_matches_map() {
        let a = RationalMatrix::from_rows(vec![vec![rat(1, 2), int(0)], vec![int(0), rat(1, 2)]]).unwrap();
        let m = AffineMap::new(a, vec![rat(1, 4), rat(1, 8)]).unwrap();
        assert_eq!(m.exact_fixpoint().unwrap(), vec![rat(1, 2), rat(1, 4)]);
        let c = m.to_circuit(rat(1, 2), NormIndex::Finite(2)).unwrap();
        for x in [[int(0), int(1)], [rat(1, 3), rat(2, 7)]] {
            assert_eq!(c.eval(&x), m.eval(&x));
        }
        let counted = CountingMap::new(m);
        counted.eval(&[int(0), int(0)]);
        counted.eval(&[int(1), int(0)]);
        assert_eq!(counted.queries(), 2);
    }
}

//! Linear complementarity problems and Lemke's complementary pivot method.
//!
//! Convention: find `y ≥ 0` with `w = q + My ≥ 0` and `yᵀw = 0`. Lemke's
//! system adds a covering variable `z` with the all-ones vector,
//! `w − My − z·1 = q`. Index sets are 0-based.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, principal_minor, serde_rational, Rational, RationalMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcpInstance {
    m: RationalMatrix,
    q: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct LcpFile {
    d: usize,
    #[serde(rename = "M", with = "serde_rational::rows")]
    m: Vec<Vec<Rational>>,
    #[serde(with = "serde_rational::vec")]
    q: Vec<Rational>,
}

impl LcpInstance {
    pub fn new(m: RationalMatrix, q: Vec<Rational>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("M is {}x{}", m.rows(), m.cols())));
        }
        if q.len() != m.rows() {
            return Err(Error::Dimension(format!("q has length {} but M is {}x{}", q.len(), m.rows(), m.cols())));
        }
        if q.is_empty() {
            return Err(Error::Dimension("empty LCP".into()));
        }
        Ok(Self { m, q })
    }

    pub fn from_i64(m: &[&[i64]], q: &[i64]) -> Result<Self> {
        Self::new(RationalMatrix::from_i64(m), q.iter().map(|&x| exact::int(x)).collect())
    }

    pub fn d(&self) -> usize {
        self.q.len()
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.m
    }

    pub fn q(&self) -> &[Rational] {
        &self.q
    }

    /// `w = q + My`.
    pub fn slack(&self, y: &[Rational]) -> Result<Vec<Rational>> {
        let my = self.m.mul_vec(y)?;
        Ok(my.into_iter().zip(&self.q).map(|(a, b)| a + b).collect())
    }

    /// The instance with `M` and `q` multiplied by the lcm of all
    /// denominators, together with that multiplier.
    pub fn scaled_to_integers(&self) -> (LcpInstance, BigInt) {
        let l = exact::lcm_of_denominators(self.m.entries().iter().chain(&self.q));
        let lr = Rational::from_integer(l.clone());
        let rows = self.m.to_rows().into_iter().map(|r| r.into_iter().map(|e| e * &lr).collect()).collect();
        let m = RationalMatrix::from_rows(rows).expect("same shape");
        let q = self.q.iter().map(|e| e * &lr).collect();
        (LcpInstance { m, q }, l)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&LcpFile { d: self.d(), m: self.m.to_rows(), q: self.q.clone() }).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: LcpFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if f.m.len() != f.d {
            return Err(Error::Dimension(format!("d = {} but M has {} rows", f.d, f.m.len())));
        }
        Self::new(RationalMatrix::from_rows(f.m)?, f.q)
    }
}

impl Serialize for LcpInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LcpFile { d: self.d(), m: self.m.to_rows(), q: self.q.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LcpInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = LcpFile::deserialize(d)?;
        if f.m.len() != f.d {
            return Err(serde::de::Error::custom(format!("d = {} but M has {} rows", f.d, f.m.len())));
        }
        let m = RationalMatrix::from_rows(f.m).map_err(serde::de::Error::custom)?;
        LcpInstance::new(m, f.q).map_err(serde::de::Error::custom)
    }
}

/// A variable of Lemke's system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    W(usize),
    Y(usize),
    Z,
}

impl Variable {
    fn column(self, d: usize) -> usize {
        match self {
            Variable::W(i) => i,
            Variable::Y(i) => d + i,
            Variable::Z => 2 * d,
        }
    }

    fn from_column(c: usize, d: usize) -> Self {
        match c {
            c if c < d => Variable::W(c),
            c if c < 2 * d => Variable::Y(c - d),
            _ => Variable::Z,
        }
    }

    pub fn complement(self) -> Option<Variable> {
        match self {
            Variable::W(i) => Some(Variable::Y(i)),
            Variable::Y(i) => Some(Variable::W(i)),
            Variable::Z => None,
        }
    }
}

/// One vertex of the Lemke path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemkeState {
    /// Basic variable of each tableau row.
    pub basis: Vec<Variable>,
    /// Index with both `y_i` and `w_i` nonbasic, present while `z` is basic.
    pub duplicate_label: Option<usize>,
    /// Variable about to enter, if the path continues.
    pub entering: Option<Variable>,
    #[serde(with = "serde_rational::vec")]
    pub y: Vec<Rational>,
    #[serde(with = "serde_rational::vec")]
    pub w: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub z: Rational,
}

impl LemkeState {
    /// Exact residual `w − My − z·1 − q`.
    pub fn residual(&self, inst: &LcpInstance) -> Vec<Rational> {
        let my = inst.m.mul_vec(&self.y).expect("dimension");
        (0..inst.d()).map(|i| &self.w[i] - &my[i] - &self.z - &inst.q[i]).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum LcpResult {
    Q1 {
        #[serde(with = "serde_rational::vec")]
        y: Vec<Rational>,
    },
    Q2 {
        index_set: Vec<usize>,
        #[serde(with = "serde_rational")]
        minor: Rational,
    },
    SecondaryRay {
        state: LemkeState,
    },
}

/// The full pivot sequence of one Lemke run.
#[derive(Clone, Debug)]
pub struct LemkeRun {
    pub result: LcpResult,
    /// Vertices after each pivot, starting with the first vertex `z = z⁰`.
    pub states: Vec<LemkeState>,
    pub pivots: u64,
    /// Whether some vertex on the path had a basic variable at zero.
    pub degenerate: bool,
}

pub const DEFAULT_PIVOT_BUDGET: u64 = 1 << 22;

/// Largest dimension for which principal minors are enumerated.
pub const MAX_MINOR_SEARCH: usize = 16;

/// Subsets of `0..d` ordered by size, then lexicographically.
fn subsets_by_size(d: usize) -> impl Iterator<Item = Vec<usize>> {
    (1..=d).flat_map(move |k| Combinations::new(d, k))
}

struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self { n, cur: (k <= n).then(|| (0..k).collect()) }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.cur = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// First index set (by size, then lexicographic) whose principal minor is
/// not positive, or `None` if `m` is a P-matrix.
pub fn is_p_matrix(m: &RationalMatrix) -> Result<Option<Vec<usize>>> {
    if !m.is_square() {
        return Err(Error::Dimension("P-matrix test on a non-square matrix".into()));
    }
    if m.rows() > MAX_MINOR_SEARCH {
        return Err(Error::Capability(format!("P-matrix test needs 2^{} minors; limit is d = {MAX_MINOR_SEARCH}", m.rows())));
    }
    for set in subsets_by_size(m.rows()) {
        if !principal_minor(m, &set)?.is_positive() {
            return Ok(Some(set));
        }
    }
    Ok(None)
}

/// A non-positive principal minor, trying `hints` first.
pub fn find_nonpositive_minor(
    m: &RationalMatrix,
    hints: &[Vec<usize>],
    search_limit: usize,
) -> Result<Option<(Vec<usize>, Rational)>> {
    for h in hints {
        if h.is_empty() {
            continue;
        }
        let mut set = h.clone();
        set.sort_unstable();
        set.dedup();
        let v = principal_minor(m, &set)?;
        if !v.is_positive() {
            return Ok(Some((set, v)));
        }
    }
    if m.rows() > search_limit {
        return Ok(None);
    }
    for set in subsets_by_size(m.rows()) {
        let v = principal_minor(m, &set)?;
        if !v.is_positive() {
            return Ok(Some((set, v)));
        }
    }
    Ok(None)
}

pub fn verify_lcp_solution(inst: &LcpInstance, y: &[Rational]) -> bool {
    if y.len() != inst.d() || y.iter().any(|v| v.is_negative()) {
        return false;
    }
    let w = inst.slack(y).expect("length checked");
    w.iter().zip(y).all(|(wi, yi)| !wi.is_negative() && (wi * yi).is_zero())
}

/// Checks a result against the instance: Q1 must be complementary, Q2 must
/// name a non-positive principal minor.
pub fn verify_lcp_result(inst: &LcpInstance, res: &LcpResult) -> bool {
    match res {
        LcpResult::Q1 { y } => verify_lcp_solution(inst, y),
        LcpResult::Q2 { index_set, minor } => principal_minor(&inst.m, index_set).is_ok_and(|v| &v == minor && !v.is_positive()),
        LcpResult::SecondaryRay { .. } => false,
    }
}

/// Brute force over all `2^d` complementary bases: each feasible
/// complementary point, deduplicated and sorted.
pub fn enumerate_complementary_bases(inst: &LcpInstance) -> Result<Vec<Vec<Rational>>> {
    let d = inst.d();
    if d > 12 {
        return Err(Error::Capability(format!("basis enumeration limited to d <= 12, got {d}")));
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << d) {
        let set: Vec<usize> = (0..d).filter(|&i| mask >> i & 1 == 1).collect();
        let mut y = vec![Rational::zero(); d];
        if !set.is_empty() {
            let a = inst.m.submatrix(&set, &set);
            let rhs: Vec<Rational> = set.iter().map(|&i| -&inst.q[i]).collect();
            match exact::solve_linear(&a, &rhs) {
                Ok(sol) => {
                    for (&i, v) in set.iter().zip(sol) {
                        y[i] = v;
                    }
                }
                Err(Error::Singular) => continue,
                Err(e) => return Err(e),
            }
        }
        if verify_lcp_solution(inst, &y) {
            out.push(y);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

struct Tableau {
    d: usize,
    t: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<Variable>,
}

impl Tableau {
    fn new(inst: &LcpInstance) -> Self {
        let d = inst.d();
        let mut t = vec![vec![Rational::zero(); 2 * d + 1]; d];
        for (i, row) in t.iter_mut().enumerate() {
            row[i] = Rational::one();
            for j in 0..d {
                row[d + j] = -inst.m.get(i, j);
            }
            row[2 * d] = -Rational::one();
        }
        Self { d, t, rhs: inst.q.clone(), basis: (0..d).map(Variable::W).collect() }
    }

    fn pivot(&mut self, r: usize, c: usize) -> Variable {
        let piv = self.t[r][c].clone();
        for e in self.t[r].iter_mut() {
            *e /= &piv;
        }
        self.rhs[r] /= &piv;
        let prow = self.t[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.d {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for (e, p) in self.t[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *e -= &f * p;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        let leaving = self.basis[r];
        self.basis[r] = Variable::from_column(c, self.d);
        leaving
    }

    /// Lexicographic minimum ratio row for entering column `c`.
    fn ratio_row(&self, c: usize) -> Option<usize> {
        let mut best: Option<(usize, Vec<Rational>)> = None;
        for i in 0..self.d {
            let a = &self.t[i][c];
            if !a.is_positive() {
                continue;
            }
            let key: Vec<Rational> = std::iter::once(&self.rhs[i]).chain(&self.t[i][..self.d]).map(|v| v / a).collect();
            let better = match &best {
                None => true,
                Some((_, k)) => key.cmp(k) == Ordering::Less,
            };
            if better {
                best = Some((i, key));
            }
        }
        best.map(|(i, _)| i)
    }

    fn state(&self, entering: Option<Variable>) -> LemkeState {
        let d = self.d;
        let mut y = vec![Rational::zero(); d];
        let mut w = vec![Rational::zero(); d];
        let mut z = Rational::zero();
        let mut covered = vec![false; d];
        for (row, &v) in self.basis.iter().enumerate() {
            match v {
                Variable::W(i) => {
                    w[i] = self.rhs[row].clone();
                    covered[i] = true;
                }
                Variable::Y(i) => {
                    y[i] = self.rhs[row].clone();
                    covered[i] = true;
                }
                Variable::Z => z = self.rhs[row].clone(),
            }
        }
        let duplicate_label = if self.basis.contains(&Variable::Z) { covered.iter().position(|c| !c) } else { None };
        LemkeState { basis: self.basis.clone(), duplicate_label, entering, y, w, z }
    }

    fn has_zero_basic(&self) -> bool {
        self.rhs.iter().any(Zero::is_zero)
    }
}

pub fn lemke_solve(inst: &LcpInstance) -> Result<LcpResult> {
    Ok(lemke_path(inst, DEFAULT_PIVOT_BUDGET)?.result)
}

/// Runs Lemke's method from the primary ray with the lexicographic ratio
/// test, recording every vertex.
pub fn lemke_path(inst: &LcpInstance, pivot_budget: u64) -> Result<LemkeRun> {
    let d = inst.d();
    if inst.q.iter().all(|v| !v.is_negative()) {
        return Ok(LemkeRun {
            result: LcpResult::Q1 { y: vec![Rational::zero(); d] },
            states: Vec::new(),
            pivots: 0,
            degenerate: false,
        });
    }
    let mut tab = Tableau::new(inst);
    // Most negative q; ties go to the largest index so the rows stay
    // lexicographically positive after the first pivot.
    let mut r = 0;
    for i in 1..d {
        if inst.q[i] <= inst.q[r] {
            r = i;
        }
    }
    let leaving = tab.pivot(r, Variable::Z.column(d));
    let mut entering = leaving.complement().expect("w leaves first");
    let mut pivots = 1u64;
    let mut degenerate = tab.has_zero_basic();
    let mut states = vec![tab.state(Some(entering))];
    loop {
        check_feasible(&tab)?;
        let c = entering.column(d);
        let Some(row) = tab.ratio_row(c) else {
            let state = tab.state(Some(entering));
            let mut edge: Vec<usize> = state
                .basis
                .iter()
                .filter_map(|v| match v {
                    Variable::Y(i) => Some(*i),
                    _ => None,
                })
                .collect();
            let mut hints = vec![edge.clone()];
            if let Variable::Y(i) = entering {
                edge.push(i);
                hints.insert(0, edge);
            }
            let result = match find_nonpositive_minor(&inst.m, &hints, 12)? {
                Some((index_set, minor)) => LcpResult::Q2 { index_set, minor },
                None => LcpResult::SecondaryRay { state },
            };
            return Ok(LemkeRun { result, states, pivots, degenerate });
        };
        if pivots >= pivot_budget {
            return Err(Error::BudgetExhausted(pivot_budget));
        }
        let leaving = tab.pivot(row, c);
        pivots += 1;
        if leaving == Variable::Z {
            check_feasible(&tab)?;
            let state = tab.state(None);
            let y = state.y.clone();
            states.push(state);
            if !verify_lcp_solution(inst, &y) {
                return Err(Error::Breach("terminal Lemke vertex is not complementary".into()));
            }
            return Ok(LemkeRun { result: LcpResult::Q1 { y }, states, pivots, degenerate });
        }
        degenerate |= tab.has_zero_basic();
        entering = leaving.complement().expect("z handled above");
        states.push(tab.state(Some(entering)));
    }
}

fn check_feasible(tab: &Tableau) -> Result<()> {
    if tab.rhs.iter().any(|v| v.is_negative()) {
        return Err(Error::Breach("basic variable went negative".into()));
    }
    Ok(())
}

/// Largest absolute entry of the instance rounded up to an integer.
pub fn max_abs_integer(inst: &LcpInstance) -> BigInt {
    let mx = inst.m.max_abs_entry().max(inst.q.iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero));
    let (q, r) = mx.numer().div_rem(mx.denom());
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

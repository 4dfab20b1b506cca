//! Continuous local optimisation (CLO), general and meta-metric contraction
//! (GCM/MMCM), the reductions GCM → CLO and CLO → MMCM with their solution
//! pullbacks, and exact meta-metric axiom checks.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{format_vec, serde_rational, Rational};
use crate::linfixp::{in_unit_cube, lp_norm, sub_vec, EvaluableMap, NormIndex};

pub type ScalarFn = Arc<dyn Fn(&[Rational]) -> Rational + Send + Sync>;
pub type PairFn = Arc<dyn Fn(&[Rational], &[Rational]) -> Rational + Send + Sync>;

/// A constant `coeff · 2^{two_exp}`, exact even when the power is irrational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scalar {
    #[serde(with = "serde_rational")]
    pub coeff: Rational,
    #[serde(with = "serde_rational")]
    pub two_exp: Rational,
}

impl Scalar {
    pub fn rational(c: Rational) -> Self {
        Self { coeff: c, two_exp: Rational::zero() }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.two_exp.is_zero().then_some(&self.coeff)
    }

    /// Decides `lhs > self · ‖w‖_r` for `lhs ≥ 0`, raising both sides to a
    /// common integer power.
    pub fn exceeded_by(&self, lhs: &Rational, w: &[Rational], r: NormIndex) -> bool {
        if lhs.is_negative() {
            return false;
        }
        let b = self.two_exp.denom().clone();
        let a = self.two_exp.numer().clone();
        let (root, norm_pow) = match r {
            NormIndex::Finite(r) => (r, lp_norm(w, NormIndex::Finite(r))),
            NormIndex::Inf => (1, lp_norm(w, NormIndex::Inf)),
        };
        let b: usize = b.try_into().expect("small exponent denominator");
        let q = b * root as usize;
        let lhs_q = num_traits::pow(lhs.clone(), q);
        let two = pow2_signed(&(a * BigInt::from(root)));
        let rhs = num_traits::pow(self.coeff.clone(), q) * two * num_traits::pow(norm_pow, b);
        lhs_q > rhs
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_exp.is_zero() {
            write!(f, "{}", self.coeff)
        } else {
            write!(f, "{}*2^({})", self.coeff, self.two_exp)
        }
    }
}

fn pow2_signed(e: &BigInt) -> Rational {
    let mag: usize = e.magnitude().try_into().expect("small exponent");
    let p = Rational::from_integer(BigInt::one() << mag);
    if e.is_negative() {
        p.recip()
    } else {
        p
    }
}

/// `2^{1−1/r}`, the factor relating `‖a‖ + ‖b‖` to `‖(a, b)‖_r`.
pub fn concat_factor(r: NormIndex) -> Rational {
    match r {
        NormIndex::Finite(r) => Rational::one() - Rational::new(BigInt::one(), BigInt::from(r)),
        NormIndex::Inf => Rational::one(),
    }
}

fn concat(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().chain(b).cloned().collect()
}

fn scaled_gt(lhs: &Rational, lambda: &Rational, w: &[Rational], r: NormIndex) -> bool {
    Scalar::rational(lambda.clone()).exceeded_by(lhs, w, r)
}

// ----------------------------------------------------------------- CLO

#[derive(Clone)]
pub struct CloInstance {
    d: usize,
    f: Arc<dyn EvaluableMap>,
    p: ScalarFn,
    eps: Rational,
    lambda: Rational,
    norm: NormIndex,
}

impl fmt::Debug for CloInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CloInstance(d={}, eps={}, lambda={}, norm={})", self.d, self.eps, self.lambda, self.norm)
    }
}

impl CloInstance {
    pub fn new(f: Arc<dyn EvaluableMap>, p: ScalarFn, eps: Rational, lambda: Rational, norm: NormIndex) -> Result<Self> {
        if !eps.is_positive() || !lambda.is_positive() {
            return Err(Error::Argument(format!("CLO needs eps, lambda > 0, got {eps}, {lambda}")));
        }
        Ok(Self { d: f.dim(), f, p, eps, lambda, norm })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn f(&self, x: &[Rational]) -> Vec<Rational> {
        self.f.eval(x)
    }

    pub fn p(&self, x: &[Rational]) -> Rational {
        (self.p)(x)
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn norm(&self) -> NormIndex {
        self.norm
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CloSolution {
    /// `p(f(x)) > p(x) − ε`: `f` fails to improve the potential by `ε`.
    C1 {
        #[serde(with = "serde_rational::vec")]
        x: Vec<Rational>,
    },
    C2a {
        #[serde(with = "serde_rational::vec")]
        x: Vec<Rational>,
        #[serde(with = "serde_rational::vec")]
        y: Vec<Rational>,
    },
    C2b {
        #[serde(with = "serde_rational::vec")]
        x: Vec<Rational>,
        #[serde(with = "serde_rational::vec")]
        y: Vec<Rational>,
    },
}

pub fn verify_clo_solution(inst: &CloInstance, sol: &CloSolution) -> bool {
    let ok_point = |x: &[Rational]| x.len() == inst.d && in_unit_cube(x);
    match sol {
        CloSolution::C1 { x } => ok_point(x) && inst.p(&inst.f(x)) > inst.p(x) - &inst.eps,
        CloSolution::C2a { x, y } => {
            ok_point(x)
                && ok_point(y)
                && norm_exceeds(
                    &sub_vec(&inst.f(x), &inst.f(y)),
                    &Scalar::rational(inst.lambda.clone()),
                    &sub_vec(x, y),
                    inst.norm,
                )
        }
        CloSolution::C2b { x, y } => {
            ok_point(x) && ok_point(y) && scaled_gt(&(inst.p(x) - inst.p(y)).abs(), &inst.lambda, &sub_vec(x, y), inst.norm)
        }
    }
}

// ---------------------------------------------------------------- MMCM

#[derive(Clone)]
pub struct MmcmInstance {
    d: usize,
    f: Arc<dyn EvaluableMap>,
    dist: PairFn,
    norm: NormIndex,
    eps: Rational,
    c: Rational,
    /// Threshold of the `d`-continuity violation (M2b).
    delta: Scalar,
    /// Threshold of the `f`-continuity violation (M2c).
    lambda: Scalar,
    /// Promised continuity of `d`; not part of any solution clause.
    gamma: Scalar,
}

impl fmt::Debug for MmcmInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MmcmInstance(d={}, norm={}, eps={}, c={}, delta={}, lambda={}, gamma={})",
            self.d, self.norm, self.eps, self.c, self.delta, self.lambda, self.gamma
        )
    }
}

impl MmcmInstance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        f: Arc<dyn EvaluableMap>,
        dist: PairFn,
        norm: NormIndex,
        eps: Rational,
        c: Rational,
        delta: Scalar,
        lambda: Scalar,
        gamma: Scalar,
    ) -> Result<Self> {
        if !c.is_positive() || c >= Rational::one() {
            return Err(Error::Argument(format!("contraction factor must lie in (0,1), got {c}")));
        }
        if !eps.is_positive() || eps >= Rational::one() {
            return Err(Error::Argument(format!("eps must lie in (0,1), got {eps}")));
        }
        for (name, s) in [("delta", &delta), ("lambda", &lambda), ("gamma", &gamma)] {
            if !s.coeff.is_positive() {
                return Err(Error::Argument(format!("{name} must be positive, got {s}")));
            }
        }
        Ok(Self { d: f.dim(), f, dist, norm, eps, c, delta, lambda, gamma })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn f(&self, x: &[Rational]) -> Vec<Rational> {
        self.f.eval(x)
    }

    pub fn dist(&self, x: &[Rational], y: &[Rational]) -> Rational {
        (self.dist)(x, y)
    }

    pub fn dist_fn(&self) -> &PairFn {
        &self.dist
    }

    pub fn norm(&self) -> NormIndex {
        self.norm
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn delta(&self) -> &Scalar {
        &self.delta
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn gamma(&self) -> &Scalar {
        &self.gamma
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomKind {
    Negativity,
    ZeroDistinct,
    Asymmetry,
    Triangle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetametricWitness {
    pub kind: AxiomKind,
    #[serde(with = "serde_rational::rows")]
    pub points: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MmcmSolution {
    M1 {
        #[serde(with = "serde_rational::vec")]
        x: Vec<Rational>,
    },
    M2a {
        #[serde(with = "serde_rational::vec")]
        x: Vec<Rational>,
        #[serde(with = "serde_rational::vec")]
        y: Vec<Rational>,
    },
    /// `|d(x,y) − d(x′,y′)| > δ·‖(x,y) − (x′,y′)‖`.
    M2b {
        #[serde(with = "serde_rational::vec")]
        x: Vec<Rational>,
        #[serde(with = "serde_rational::vec")]
        y: Vec<Rational>,
        #[serde(with = "serde_rational::vec")]
        xp: Vec<Rational>,
        #[serde(with = "serde_rational::vec")]
        yp: Vec<Rational>,
    },
    M2c {
        #[serde(with = "serde_rational::vec")]
        x: Vec<Rational>,
        #[serde(with = "serde_rational::vec")]
        y: Vec<Rational>,
    },
    M3(MetametricWitness),
}

/// Verifies a solution; `allow_axiom_witness` is false for GCM instances.
pub fn verify_mmcm_solution(inst: &MmcmInstance, sol: &MmcmSolution, allow_axiom_witness: bool) -> bool {
    let ok = |x: &[Rational]| x.len() == inst.d && in_unit_cube(x);
    match sol {
        MmcmSolution::M1 { x } => ok(x) && inst.dist(&inst.f(x), x) <= inst.eps,
        MmcmSolution::M2a { x, y } => ok(x) && ok(y) && inst.dist(&inst.f(x), &inst.f(y)) > &inst.c * inst.dist(x, y),
        MmcmSolution::M2b { x, y, xp, yp } => {
            ok(x) && ok(y) && ok(xp) && ok(yp) && {
                let lhs = (inst.dist(x, y) - inst.dist(xp, yp)).abs();
                let w = sub_vec(&concat(x, y), &concat(xp, yp));
                inst.delta.exceeded_by(&lhs, &w, inst.norm)
            }
        }
        MmcmSolution::M2c { x, y } => {
            ok(x) && ok(y) && {
                let fx = inst.f(x);
                let fy = inst.f(y);
                norm_exceeds(&sub_vec(&fx, &fy), &inst.lambda, &sub_vec(x, y), inst.norm)
            }
        }
        MmcmSolution::M3(w) => allow_axiom_witness && w.points.iter().all(|p| ok(p)) && witness_holds(&inst.dist, w),
    }
}

/// `‖u‖ > s·‖w‖` exactly, via `‖u‖^r` against `(s·‖w‖)^r`.
fn norm_exceeds(u: &[Rational], s: &Scalar, w: &[Rational], r: NormIndex) -> bool {
    match r {
        NormIndex::Inf => s.exceeded_by(&lp_norm(u, r), w, r),
        NormIndex::Finite(k) => {
            // ‖u‖ > s‖w‖  ⟺  ‖u‖^k > (s‖w‖)^k; compare with a scalar 2^{k·e}.
            let uk = lp_norm(u, r);
            let sk = Scalar { coeff: num_traits::pow(s.coeff.clone(), k as usize), two_exp: &s.two_exp * BigInt::from(k) };
            let wk = lp_norm(w, r);
            sk.exceeded_by(&uk, &[wk], NormIndex::Finite(1))
        }
    }
}

pub fn witness_holds(dist: &PairFn, w: &MetametricWitness) -> bool {
    let p = &w.points;
    match (w.kind, p.len()) {
        (AxiomKind::Negativity, 2) => dist(&p[0], &p[1]).is_negative(),
        (AxiomKind::ZeroDistinct, 2) => p[0] != p[1] && dist(&p[0], &p[1]).is_zero(),
        (AxiomKind::Asymmetry, 2) => dist(&p[0], &p[1]) != dist(&p[1], &p[0]),
        (AxiomKind::Triangle, 3) => dist(&p[0], &p[2]) > dist(&p[0], &p[1]) + dist(&p[1], &p[2]),
        _ => false,
    }
}

/// First axiom violation over the given pairs, then the given triples
/// `(x, y, z)` tested as `d(x,z) ≤ d(x,y) + d(y,z)`.
pub fn check_metametric_on(
    dist: &PairFn,
    pairs: &[(Vec<Rational>, Vec<Rational>)],
    triples: &[(Vec<Rational>, Vec<Rational>, Vec<Rational>)],
) -> Option<MetametricWitness> {
    for (x, y) in pairs {
        let dxy = dist(x, y);
        let kind = if dxy.is_negative() {
            Some(AxiomKind::Negativity)
        } else if dxy.is_zero() && x != y {
            Some(AxiomKind::ZeroDistinct)
        } else if dxy != dist(y, x) {
            Some(AxiomKind::Asymmetry)
        } else {
            None
        };
        if let Some(kind) = kind {
            return Some(MetametricWitness { kind, points: vec![x.clone(), y.clone()] });
        }
    }
    for (x, y, z) in triples {
        if dist(x, z) > dist(x, y) + dist(y, z) {
            return Some(MetametricWitness { kind: AxiomKind::Triangle, points: vec![x.clone(), y.clone(), z.clone()] });
        }
    }
    None
}

/// All ordered pairs and triples of the sample points.
pub fn check_metametric(dist: &PairFn, points: &[Vec<Rational>]) -> Option<MetametricWitness> {
    let pairs: Vec<_> = points.iter().flat_map(|x| points.iter().map(move |y| (x.clone(), y.clone()))).collect();
    if let Some(w) = check_metametric_on(dist, &pairs, &[]) {
        return Some(w);
    }
    for x in points {
        for y in points {
            for z in points {
                if dist(x, z) > dist(x, y) + dist(y, z) {
                    return Some(MetametricWitness { kind: AxiomKind::Triangle, points: vec![x.clone(), y.clone(), z.clone()] });
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------- reductions

/// `p(x) = d(f(x), x)`, `λ′ = max(λ, (λ+1)δ)`, `ε′ = (1−c)ε`.
pub fn gcm_to_clo(src: &MmcmInstance) -> Result<CloInstance> {
    let (Some(lambda), Some(delta)) = (src.lambda.as_rational(), src.delta.as_rational()) else {
        return Err(Error::Capability("GCM to CLO needs rational lambda and delta".into()));
    };
    let lp = (lambda + Rational::one()) * delta;
    let lambda2 = if &lp >= lambda { lp } else { lambda.clone() };
    let eps2 = (Rational::one() - &src.c) * &src.eps;
    let f = src.f.clone();
    let dist = src.dist.clone();
    let p: ScalarFn = Arc::new(move |x: &[Rational]| dist(&f.eval(x), x));
    CloInstance::new(src.f.clone(), p, eps2, lambda2, src.norm)
}

pub fn pullback_gcm_solution(src: &MmcmInstance, image: &CloInstance, sol: &CloSolution) -> Result<MmcmSolution> {
    if !verify_clo_solution(image, sol) {
        return Err(Error::Contract(format!("{sol:?} is not a solution of the CLO image")));
    }
    let out = match sol {
        CloSolution::C1 { x } => {
            let fx = src.f(x);
            if src.dist(&fx, x) <= src.eps {
                MmcmSolution::M1 { x: x.clone() }
            } else {
                MmcmSolution::M2a { x: fx, y: x.clone() }
            }
        }
        CloSolution::C2a { x, y } => MmcmSolution::M2c { x: x.clone(), y: y.clone() },
        CloSolution::C2b { x, y } => {
            let m2c = MmcmSolution::M2c { x: x.clone(), y: y.clone() };
            if verify_mmcm_solution(src, &m2c, false) {
                m2c
            } else {
                MmcmSolution::M2b { x: src.f(x), y: x.clone(), xp: src.f(y), yp: y.clone() }
            }
        }
    };
    if verify_mmcm_solution(src, &out, false) {
        Ok(out)
    } else {
        Err(Error::Breach(format!("pulled back {out:?} does not verify")))
    }
}

/// `d(x,y) = p(x) + p(y) + 1`, `ε′ = ε`, `c = 1 − ε/4`, `f`-continuity `λ`,
/// and `δ = γ = 2^{1−1/r}·λ` for the continuity of `d`.
pub fn clo_to_mmcm(src: &CloInstance) -> Result<MmcmInstance> {
    if src.eps >= Rational::one() {
        return Err(Error::Argument(format!("eps must be below 1, got {}", src.eps)));
    }
    let p = src.p.clone();
    let dist: PairFn = Arc::new(move |x: &[Rational], y: &[Rational]| p(x) + p(y) + Rational::one());
    let c = Rational::one() - &src.eps / Rational::from_integer(BigInt::from(4));
    let cont = Scalar { coeff: src.lambda.clone(), two_exp: concat_factor(src.norm) };
    MmcmInstance::new(src.f.clone(), dist, src.norm, src.eps.clone(), c, cont.clone(), Scalar::rational(src.lambda.clone()), cont)
}

pub fn pullback_clo_solution(src: &CloInstance, image: &MmcmInstance, sol: &MmcmSolution) -> Result<CloSolution> {
    if !verify_mmcm_solution(image, sol, true) {
        return Err(Error::Contract(format!("{sol:?} is not a solution of the MMCM image")));
    }
    let candidates = match sol {
        MmcmSolution::M1 { x } => {
            return Err(Error::Breach(format!("approximate fixpoint {} cannot exist since d >= 1 > eps", format_vec(x))))
        }
        MmcmSolution::M3(w) => return Err(Error::Breach(format!("constructed distance violates an axiom: {w:?}"))),
        MmcmSolution::M2a { x, y } => vec![CloSolution::C1 { x: x.clone() }, CloSolution::C1 { x: y.clone() }],
        MmcmSolution::M2b { x, y, xp, yp } => {
            vec![CloSolution::C2b { x: x.clone(), y: xp.clone() }, CloSolution::C2b { x: y.clone(), y: yp.clone() }]
        }
        MmcmSolution::M2c { x, y } => vec![CloSolution::C2a { x: x.clone(), y: y.clone() }],
    };
    candidates
        .into_iter()
        .find(|c| verify_clo_solution(src, c))
        .ok_or_else(|| Error::Breach(format!("no CLO solution recovered from {sol:?}")))
}

/// Whether `|d(x,y) − d(x′,y′)| ≤ γ·‖(x,y) − (x′,y′)‖`.
pub fn within_gamma(inst: &MmcmInstance, x: &[Rational], y: &[Rational], xp: &[Rational], yp: &[Rational]) -> bool {
    let lhs = (inst.dist(x, y) - inst.dist(xp, yp)).abs();
    !inst.gamma.exceeded_by(&lhs, &sub_vec(&concat(x, y), &concat(xp, yp)), inst.norm)
}

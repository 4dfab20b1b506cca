//! Reductions between the line problems, each with a solution pullback.
//!
//! All image instances are lazy closures over the source evaluators.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::line::{
    check_eoml_solution, check_eopl_solution, check_ufeopl_solution, verify_eoml, verify_eopl, verify_ufeopl, BitVector,
    EomlInstance, EoplInstance, Solution, SolutionKind, SvlInstance, UfeoplInstance,
};

fn pack(u: &BitVector, pi: &BigUint, m: usize) -> BitVector {
    u.concat(&BitVector::from_biguint(m, pi.clone()).expect("pi fits in m bits"))
}

fn unpack(x: &BitVector, n: usize) -> (BitVector, BigUint) {
    let (u, pi) = x.split_at(n);
    (u, pi.value().clone())
}

// ---------------------------------------------------------------- EOML → EOPL

/// One extra leading bit: `(0, u ≠ 0ⁿ)` are dummies, `(1, u)` carries the
/// source vertex `u`, and `0^{n+1} → (1, 0ⁿ)` starts the line.
pub fn eoml_to_eopl(src: &EomlInstance) -> Result<EoplInstance> {
    let n = src.n();
    let k = n + 1;
    let (s1, s2, s3) = (src.clone(), src.clone(), src.clone());
    let succ = move |x: &BitVector| -> BitVector {
        let (b, u) = x.split_at(1);
        if x.is_zero() {
            return BitVector::from_u64(1, 1).concat(&BitVector::zeros(n));
        }
        if b.is_zero() {
            return x.clone();
        }
        if s1.potential(&u).is_zero() {
            return x.clone();
        }
        b.concat(&s1.succ(&u))
    };
    let pred = move |x: &BitVector| -> BitVector {
        let (b, u) = x.split_at(1);
        if x.is_zero() || b.is_zero() {
            return x.clone();
        }
        if u.is_zero() {
            return BitVector::zeros(k);
        }
        if s2.potential(&u).is_zero() {
            return x.clone();
        }
        b.concat(&s2.pred(&u))
    };
    let pot = move |x: &BitVector| -> BigUint {
        let (b, u) = x.split_at(1);
        if b.is_zero() {
            BigUint::zero()
        } else {
            s3.potential(&u)
        }
    };
    EoplInstance::new(k, k, Arc::new(succ), Arc::new(pred), Arc::new(pot))
}

/// Maps an EOPL solution of [`eoml_to_eopl`]'s image to a T1/T2/T3 solution.
pub fn pullback_eoml_solution(src: &EomlInstance, image: &EoplInstance, sol: &Solution) -> Result<Solution> {
    if !check_eopl_solution(image, sol) {
        return Err(Error::Contract(format!("{sol:?} is not a solution of the image")));
    }
    let (b, u) = sol.vertex().split_at(1);
    if b.is_zero() {
        return Err(Error::Breach(format!("solution {} lies on a dummy vertex", sol.vertex())));
    }
    if sol.kind == SolutionKind::R2 {
        let t3 = Solution::at(SolutionKind::T3, u.clone());
        if check_eoml_solution(src, &t3) {
            return Ok(t3);
        }
    }
    verify_eoml(src, &u).ok_or_else(|| Error::Breach(format!("{u} is not a solution of the source")))
}

// ---------------------------------------------------------------- EOPL → EOML

/// Result of [`eopl_to_eoml`]: either `0ⁿ` or `S(0ⁿ)` already solves the
/// source, or the metered image instance.
#[derive(Clone, Debug)]
pub enum EoplToEoml {
    Trivial(Solution),
    Reduced(EomlInstance),
}

struct MeteredCore {
    src: EoplInstance,
    n: usize,
    m: usize,
    s1: BitVector,
    s2: BitVector,
    p2: BigUint,
}

impl MeteredCore {
    fn at(&self, u: &BitVector, pi: &BigUint) -> BitVector {
        pack(u, pi, self.m)
    }

    fn succ(&self, x: &BitVector) -> BitVector {
        let (u, pi) = unpack(x, self.n);
        let one = BigUint::one();
        let two = BigUint::from(2u32);
        if (u.is_zero() && pi.is_one()) || u == self.s1 {
            return x.clone();
        }
        if x.is_zero() {
            return if self.p2 == two { self.at(&self.s2, &two) } else { self.at(&u, &two) };
        }
        let p2 = &self.p2;
        if u.is_zero() {
            if two <= pi && &pi + &one < *p2 {
                return self.at(&u, &(&pi + &one));
            }
            if &pi + &one == *p2 {
                return self.at(&self.s2, p2);
            }
            return x.clone();
        }
        let u1 = self.src.succ(&u);
        let p1 = self.src.potential(&u1);
        let p = self.src.potential(&u);
        if self.src.pred(&u1) != u || u1 == u {
            return x.clone();
        }
        if (pi == p && p == p1) || (pi == p && p1 == &p + &one) || (pi == p && &p1 + &one == p) {
            return self.at(&u1, &p1);
        }
        if (pi < p && p <= p1) || (p <= p1 && p1 <= pi) || (pi > p && p >= p1) || (p >= p1 && p1 >= pi) {
            return x.clone();
        }
        if p < p1 {
            if p <= pi && &pi + &one < p1 {
                return self.at(&u, &(&pi + &one));
            }
            if &pi + &one == p1 {
                return self.at(&u1, &p1);
            }
        }
        if p > p1 {
            if p >= pi && pi > &p1 + &one {
                return self.at(&u, &(&pi - &one));
            }
            if pi == &p1 + &one {
                return self.at(&u1, &p1);
            }
        }
        x.clone()
    }

    fn pred(&self, x: &BitVector) -> BitVector {
        let (u, pi) = unpack(x, self.n);
        let one = BigUint::one();
        let two = BigUint::from(2u32);
        let k = self.n + self.m;
        if (u.is_zero() && pi.is_one()) || u == self.s1 {
            return x.clone();
        }
        if u.is_zero() {
            if pi.is_zero() {
                return BitVector::zeros(k);
            }
            if pi < self.p2 && pi != one && pi != two {
                return self.at(&u, &(&pi - &one));
            }
            if pi < self.p2 && pi == two {
                return BitVector::zeros(k);
            }
            // Values at or above V(S(S(0ⁿ))) are unused on the 0ⁿ column.
            return x.clone();
        }
        if u == self.s2 && pi == self.p2 {
            return if pi == two { BitVector::zeros(k) } else { self.at(&BitVector::zeros(self.n), &(&pi - &one)) };
        }
        let p = self.src.potential(&u);
        if pi == p {
            let u1 = self.src.pred(&u);
            let p1 = self.src.potential(&u1);
            if self.src.succ(&u1) != u || u1 == u {
                return x.clone();
            }
            if p == p1 {
                return self.at(&u1, &p1);
            }
            return if p1 < p { self.at(&u1, &(&p - &one)) } else { self.at(&u1, &(&p + &one)) };
        }
        let u1 = self.src.succ(&u);
        let p1 = self.src.potential(&u1);
        if self.src.pred(&u1) != u || u1 == u {
            return x.clone();
        }
        if p1 == p || (pi < p && p < p1) || (p < p1 && p1 <= pi) || (pi > p && p > p1) || (p > p1 && p1 >= pi) {
            return x.clone();
        }
        if p < p1 && p < pi && &pi + &one <= p1 {
            return self.at(&u, &(&pi - &one));
        }
        if p > p1 && p > pi && pi >= &p1 + &one {
            return self.at(&u, &(&pi + &one));
        }
        x.clone()
    }

    fn potential(&self, x: &BitVector) -> BigUint {
        if x.is_zero() {
            return BigUint::one();
        }
        if &self.succ(x) == x && &self.pred(x) == x {
            return BigUint::zero();
        }
        unpack(x, self.n).1
    }
}

/// Embeds potentials in `m` low bits so that every edge changes them by
/// exactly one; vertex `(u, π)` is `u` followed by `π`.
pub fn eopl_to_eoml(src: &EoplInstance) -> Result<EoplToEoml> {
    let n = src.n();
    let m = src.m();
    let z = BitVector::zeros(n);
    if let Some(sol) = verify_eopl(src, &z) {
        return Ok(EoplToEoml::Trivial(sol));
    }
    let s1 = src.succ(&z);
    if let Some(sol) = verify_eopl(src, &s1) {
        return Ok(EoplToEoml::Trivial(sol));
    }
    let s2 = src.succ(&s1);
    let p2 = src.potential(&s2);
    let core = Arc::new(MeteredCore { src: src.clone(), n, m, s1, s2, p2 });
    let (c1, c2, c3) = (core.clone(), core.clone(), core);
    let img = EomlInstance::new(
        n + m,
        Arc::new(move |x: &BitVector| c1.succ(x)),
        Arc::new(move |x: &BitVector| c2.pred(x)),
        Arc::new(move |x: &BitVector| c3.potential(x)),
    )?;
    Ok(EoplToEoml::Reduced(img))
}

/// Maps a T1/T2/T3 solution `(u, π)` of the metered image to an R1/R2
/// solution of the source among `u`, `P(u)`, `P(P(u))` and `S(u)`.
pub fn pullback_eopl_solution(src: &EoplInstance, image: &EomlInstance, sol: &Solution) -> Result<Solution> {
    if !check_eoml_solution(image, sol) {
        return Err(Error::Contract(format!("{sol:?} is not a solution of the image")));
    }
    let (u, _) = unpack(sol.vertex(), src.n());
    let pu = src.pred(&u);
    let ppu = src.pred(&pu);
    let su = src.succ(&u);
    let order: Vec<&BitVector> = match sol.kind {
        SolutionKind::T1 => vec![&u],
        SolutionKind::T2 => vec![&u, &pu, &ppu],
        _ => vec![&u, &pu],
    };
    for cand in order.into_iter().chain([&su, &pu, &ppu]) {
        if let Some(s) = verify_eopl(src, cand) {
            return Ok(s);
        }
    }
    Err(Error::Breach(format!("no source solution near {u}")))
}

// ------------------------------------------------ unique forward, unit steps

struct UnitCore {
    src: UfeoplInstance,
    n: usize,
    m: usize,
}

impl UnitCore {
    fn on_line(&self, x: &BitVector) -> bool {
        let (v, pi) = unpack(x, self.n);
        if !self.src.on_line(&v) {
            return false;
        }
        let p = self.src.potential(&v);
        if pi == p {
            return true;
        }
        let sv = self.src.succ(&v);
        self.src.on_line(&sv) && p < pi && pi < self.src.potential(&sv)
    }

    fn succ(&self, x: &BitVector) -> BitVector {
        if !self.on_line(x) {
            return x.clone();
        }
        let (v, pi) = unpack(x, self.n);
        let sv = self.src.succ(&v);
        let ps = self.src.potential(&sv);
        let next = &pi + 1u32;
        if self.src.on_line(&sv) && next < ps {
            return pack(&v, &next, self.m);
        }
        pack(&sv, &ps, self.m)
    }
}

/// Splits every on-line edge with potential gap `g > 1` into `g` unit steps
/// through `(v, V(v)+1), …, (v, V(S(v))−1)`. Edges whose potential does not
/// increase are left as single edges, so their tails stay U1 solutions.
pub fn ufeopl_to_ufeoml(src: &UfeoplInstance) -> Result<UfeoplInstance> {
    let n = src.n();
    let m = src.m();
    let core = Arc::new(UnitCore { src: src.clone(), n, m });
    let (c1, c2) = (core.clone(), core);
    let img = UfeoplInstance::new(
        n + m,
        m,
        Arc::new(move |x: &BitVector| c1.on_line(x)),
        Arc::new(move |x: &BitVector| c2.succ(x)),
        Arc::new(move |x: &BitVector| unpack(x, n).1),
    )?;
    Ok(img)
}

pub fn pullback_ufeoml_solution(src: &UfeoplInstance, image: &UfeoplInstance, sol: &Solution) -> Result<Solution> {
    if !check_ufeopl_solution(image, sol) {
        return Err(Error::Contract(format!("{sol:?} is not a solution of the image")));
    }
    let (v, _) = unpack(sol.vertex(), src.n());
    verify_ufeopl(src, &v).ok_or_else(|| Error::Breach(format!("{v} is not a solution of the source")))
}

// ------------------------------------------------------------------- → SVL

/// Bits of the counter field `i ∈ {−} ∪ [1, p_cap]`, with `−` stored as 0.
fn counter_bits(p_cap: &BigUint) -> usize {
    p_cap.bits().max(1) as usize
}

/// Vertices `(v, i)`: `(v, −)` walks the line; at its end `u` the counter
/// runs `(u, 1), (u, 2), …` up to the sink `(u, p_cap − 1 − V(u))`. The
/// start counts as step 1, so `(v, −)` sits at step `V(v) + 1`, `(u, i)` at
/// `V(u) + 1 + i`, and the sink at `T = p_cap`.
pub fn ufeoml_to_svl(src: &UfeoplInstance, p_cap: &BigUint) -> Result<SvlInstance> {
    let n = src.n();
    let max_potential = (BigUint::one() << src.m()) - 1u32;
    if p_cap <= &max_potential {
        return Err(Error::Argument(format!("p_cap = {p_cap} must exceed every potential (up to {max_potential})")));
    }
    let w = counter_bits(p_cap);
    let (sa, sb) = (src.clone(), src.clone());
    let cap_s = p_cap.clone();
    let succ = move |x: &BitVector| -> BitVector {
        let (v, i) = unpack(x, n);
        if !sa.on_line(&v) {
            return x.clone();
        }
        let sv = sa.succ(&v);
        let at_end = !sa.on_line(&sv);
        if i.is_zero() && !at_end {
            return pack(&sv, &BigUint::zero(), w);
        }
        if at_end && &sa.potential(&v) + &i + 1u32 < cap_s {
            return pack(&v, &(&i + 1u32), w);
        }
        x.clone()
    };
    let cap_w = p_cap.clone();
    let verify = move |x: &BitVector, t: &BigUint| -> bool {
        if x.width() != n + w {
            return false;
        }
        let (v, i) = unpack(x, n);
        if !sb.on_line(&v) {
            return false;
        }
        let pv = sb.potential(&v);
        if i.is_zero() {
            return &pv + 1u32 == *t;
        }
        !sb.on_line(&sb.succ(&v)) && &pv + &i + 1u32 == *t && t <= &cap_w
    };
    let start = BitVector::zeros(n + w);
    SvlInstance::new(n + w, start, p_cap.clone(), Arc::new(succ), Arc::new(verify))
}

/// The end of the source line encoded in an SVL sink.
pub fn pullback_svl_solution(src: &UfeoplInstance, image: &SvlInstance, sol: &Solution) -> Result<Solution> {
    if sol.kind != SolutionKind::SvlSink || !image.verifies(sol.vertex(), image.target()) {
        return Err(Error::Contract(format!("{sol:?} is not the sink")));
    }
    let (v, _) = unpack(sol.vertex(), src.n());
    verify_ufeopl(src, &v).ok_or_else(|| Error::Breach(format!("{v} is not the end of the source line")))
}

/// The potential cap `2^m` used when none is given.
pub fn default_p_cap(src: &UfeoplInstance) -> BigUint {
    BigUint::one() << src.m()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line::{all_vertices, follow_forward, follow_line, ExplicitTables, TableKind};
    use num_traits::ToPrimitive;

    fn bits(s: &str) -> BitVector {
        BitVector::parse(s).unwrap()
    }

    fn tables(kind: TableKind, n: usize, m: usize, s: &[&str], p: &[&str], v: &[u64]) -> ExplicitTables {
        ExplicitTables {
            kind,
            n,
            m,
            s: s.iter().map(|x| bits(x)).collect(),
            p: p.iter().map(|x| bits(x)).collect(),
            v: v.iter().map(|&x| BigUint::from(x)).collect(),
            c: Vec::new(),
        }
    }

    /// 00 → 01 → 10 with V = 1, 2, 3; 11 a self-loop with V = 0.
    fn three_vertex_eoml() -> EomlInstance {
        tables(TableKind::Eoml, 2, 2, &["01", "10", "10", "11"], &["00", "00", "01", "11"], &[1, 2, 3, 0]).to_eoml().unwrap()
    }

    #[test]
    fn eoml_image_procedures() {
        let src = three_vertex_eoml();
        let img = eoml_to_eopl(&src).unwrap();
        assert_eq!(img.succ(&bits("000")), bits("100"));
        assert_eq!(img.succ(&bits("010")), bits("010"));
        assert_eq!(img.pred(&bits("010")), bits("010"));
        assert_eq!(img.succ(&bits("111")), bits("111"));
        assert_eq!(img.pred(&bits("100")), bits("000"));
        assert_eq!(img.potential(&bits("110")), BigUint::from(3u32));
        let mut sols = Vec::new();
        for x in all_vertices(3) {
            if let Some(s) = verify_eopl(&img, &x) {
                let back = pullback_eoml_solution(&src, &img, &s).unwrap();
                assert!(check_eoml_solution(&src, &back));
                sols.push((s, back));
            }
        }
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].1, Solution::at(SolutionKind::T1, bits("10")));
    }

    #[test]
    fn eoml_pullback_cases() {
        // 00 → 01 → 11 with V = 1, 2, 4: the jump makes 01 a T3 and the
        // image has an R1-free line through it; (1,11) ends the line.
        let src =
            tables(TableKind::Eoml, 2, 3, &["01", "11", "10", "11"], &["00", "00", "10", "01"], &[1, 2, 0, 4]).to_eoml().unwrap();
        let img = eoml_to_eopl(&src).unwrap();
        let end = verify_eopl(&img, &bits("111")).unwrap();
        assert_eq!(end.kind, SolutionKind::R1);
        let back = pullback_eoml_solution(&src, &img, &end).unwrap();
        assert_eq!(back.kind, SolutionKind::T1);
        // V(S(u)) = V(u) on an edge gives R2 in the image and T3 in the source.
        let flat =
            tables(TableKind::Eoml, 2, 3, &["01", "11", "10", "11"], &["00", "00", "10", "01"], &[1, 2, 0, 2]).to_eoml().unwrap();
        let img = eoml_to_eopl(&flat).unwrap();
        let r2 = verify_eopl(&img, &bits("101")).unwrap();
        assert_eq!(r2.kind, SolutionKind::R2);
        assert_eq!(pullback_eoml_solution(&flat, &img, &r2).unwrap(), Solution::at(SolutionKind::T3, bits("01")));
        let bogus = Solution::at(SolutionKind::R1, bits("010"));
        assert!(matches!(pullback_eoml_solution(&flat, &img, &bogus), Err(Error::Contract(_))));
    }

    fn reduced(src: &EoplInstance) -> EomlInstance {
        match eopl_to_eoml(src).unwrap() {
            EoplToEoml::Reduced(img) => img,
            EoplToEoml::Trivial(s) => panic!("unexpected trivial {s:?}"),
        }
    }

    #[test]
    fn metered_chain_expansion() {
        // 00 → 01 → 11 → 10 with V = 0, 1, 3, 6.
        let src =
            tables(TableKind::Eopl, 2, 3, &["01", "11", "10", "10"], &["00", "00", "11", "01"], &[0, 1, 6, 3]).to_eopl().unwrap();
        let img = reduced(&src);
        let k = 5;
        assert_eq!(img.potential(&BitVector::zeros(k)), BigUint::one());
        // 0^k → (00, 2) → (11, 3) → (11, 4) → (11, 5) → (10, 6).
        let path: Vec<BitVector> = ["00000", "00010", "11011", "11100", "11101", "10110"].iter().map(|s| bits(s)).collect();
        for w in path.windows(2) {
            assert_eq!(img.succ(&w[0]), w[1]);
            assert_eq!(img.pred(&w[1]), w[0]);
        }
        let vals: Vec<u64> = path.iter().map(|x| img.potential(x).to_u64().unwrap()).collect();
        assert_eq!(vals, vec![1, 2, 3, 4, 5, 6]);
        // S(0ⁿ) = 01 is a dummy column.
        assert_eq!(img.succ(&bits("01001")), bits("01001"));
        for x in all_vertices(k) {
            if let Some(s) = verify_eoml(&img, &x) {
                let back = pullback_eopl_solution(&src, &img, &s).unwrap();
                assert!(check_eopl_solution(&src, &back), "{s:?} -> {back:?}");
            }
        }
    }

    #[test]
    fn metered_trivial_marker() {
        // S(0) = 1 is already the end.
        let src = tables(TableKind::Eopl, 1, 1, &["1", "1"], &["0", "0"], &[0, 1]).to_eopl().unwrap();
        match eopl_to_eoml(&src).unwrap() {
            EoplToEoml::Trivial(s) => assert_eq!(s, Solution::at(SolutionKind::R1, bits("1"))),
            EoplToEoml::Reduced(_) => panic!("expected the trivial marker"),
        }
    }

    #[test]
    fn metered_pullback_cases() {
        // 00 → 01 → 10 → 11 with V = 0, 1, 3, 3: the last edge is flat.
        let src =
            tables(TableKind::Eopl, 2, 2, &["01", "10", "11", "11"], &["00", "00", "01", "10"], &[0, 1, 3, 3]).to_eopl().unwrap();
        let img = reduced(&src);
        let sols: Vec<Solution> = all_vertices(4).filter_map(|x| verify_eoml(&img, &x)).collect();
        assert!(!sols.is_empty());
        for s in sols {
            let back = pullback_eopl_solution(&src, &img, &s).unwrap();
            assert!(check_eopl_solution(&src, &back));
        }
        let walk = follow_line(&src, &BitVector::zeros(2), 8).unwrap();
        assert_eq!(walk.solution, Solution::at(SolutionKind::R2, bits("10")));
    }

    fn unit_source() -> UfeoplInstance {
        // 000 → 001 → 011 → 111 with V = 0, 1, 4, 5; the rest off the line.
        let s = ["001", "011", "010", "111", "100", "101", "110", "110"];
        let on = [true, true, false, true, false, false, false, true];
        let v = [0u64, 1, 0, 4, 0, 0, 0, 5];
        let mut t = tables(TableKind::Ufeopl, 3, 3, &s, &s, &v);
        t.c = on.to_vec();
        t.p = Vec::new();
        t.to_ufeopl().unwrap()
    }

    #[test]
    fn unit_step_chains() {
        let src = unit_source();
        let img = ufeopl_to_ufeoml(&src).unwrap();
        let walk = follow_forward(&img, &BitVector::zeros(6), 64).unwrap();
        assert_eq!(walk.steps, 5);
        assert_eq!(walk.solution.kind, SolutionKind::U2);
        let back = pullback_ufeoml_solution(&src, &img, &walk.solution).unwrap();
        assert_eq!(back, Solution::at(SolutionKind::U2, bits("111")));
        let mut x = BitVector::zeros(6);
        for _ in 0..5 {
            let y = img.succ(&x);
            assert_eq!(img.potential(&y), img.potential(&x) + 1u32);
            x = y;
        }
        // Gap 1 edge is unchanged; gap 3 gets two chain vertices.
        assert_eq!(img.succ(&bits("000000")), bits("001001"));
        assert_eq!(img.succ(&bits("001001")), bits("001010"));
        assert_eq!(img.succ(&bits("001011")), bits("011100"));
    }

    #[test]
    fn unit_step_negative_gap() {
        let s = ["001", "011", "010", "111", "100", "101", "110", "110"];
        let on = [true, true, false, true, false, false, false, true];
        let v = [0u64, 3, 0, 2, 0, 0, 0, 5];
        let mut t = tables(TableKind::Ufeopl, 3, 3, &s, &s, &v);
        t.c = on.to_vec();
        t.p = Vec::new();
        let src = t.to_ufeopl().unwrap();
        let img = ufeopl_to_ufeoml(&src).unwrap();
        let walk = follow_forward(&img, &BitVector::zeros(6), 64).unwrap();
        assert_eq!(walk.solution, Solution::at(SolutionKind::U1, bits("001011")));
        assert_eq!(pullback_ufeoml_solution(&src, &img, &walk.solution).unwrap().kind, SolutionKind::U1);
    }

    #[test]
    fn svl_distances() {
        // Five vertices with unit steps: 000 → 001 → 011 → 010 → 110, V = 0..4.
        let s = ["001", "011", "110", "010", "100", "101", "111", "111"];
        let on = [true, true, true, true, false, false, true, false];
        let v = [0u64, 1, 3, 2, 0, 0, 4, 0];
        let mut t = tables(TableKind::Ufeopl, 3, 3, &s, &s, &v);
        t.c = on.to_vec();
        t.p = Vec::new();
        let src = t.to_ufeopl().unwrap();
        let cap = BigUint::from(8u32);
        let svl = ufeoml_to_svl(&src, &cap).unwrap();
        assert!(svl.verifies(svl.start(), &BigUint::one()));
        assert_eq!(svl.target(), &BigUint::from(8u32));
        // Sink is (110, 8 − 1 − 4).
        let sink = pack(&bits("110"), &BigUint::from(3u32), 4);
        assert!(svl.verifies(&sink, svl.target()));
        assert_eq!(svl.succ(&sink), sink);
        let mut x = svl.start().clone();
        for _ in 0..7 {
            x = svl.succ(&x);
        }
        assert_eq!(x, sink);
        for t in 1u32..=8 {
            let hits = all_vertices(svl.n()).filter(|x| svl.verifies(x, &BigUint::from(t))).count();
            assert_eq!(hits, 1, "t = {t}");
        }
        let back = pullback_svl_solution(&src, &svl, &Solution::at(SolutionKind::SvlSink, sink)).unwrap();
        assert_eq!(back, Solution::at(SolutionKind::U2, bits("110")));
        assert!(ufeoml_to_svl(&src, &BigUint::from(7u32)).is_err());
    }
}

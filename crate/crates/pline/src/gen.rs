//! Seeded instance generators: random line tables, P-matrix LCPs, affine
//! contractions with on-grid fixpoints, and affine discrete contraction maps.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cls::{CloInstance, ScalarFn};
use crate::contraction::{direction_grid_from_map, validate_dcm, GridSpec};
use crate::error::{Error, Result};
use crate::exact::{rat, Rational, RationalMatrix};
use crate::lcp::{lemke_path, LcpInstance, DEFAULT_PIVOT_BUDGET};
use crate::line::{BitVector, ExplicitTables, TableKind, MAX_EXPLICIT_WIDTH};
use crate::linfixp::{clamp01, AffineMap, EvaluableMap, NormIndex};

/// Attempts before a rejection sampler gives up.
const MAX_ATTEMPTS: u32 = 10_000;

fn random_tables(kind: TableKind, n: usize, m: usize, rng: &mut ChaCha8Rng) -> ExplicitTables {
    let size = 1usize << n;
    let vmax = 1u64 << m;
    let idx: Vec<BitVector> = (0..size as u64).map(|i| BitVector::from_u64(n, i)).collect();
    let mut s = idx.clone();
    let mut p = idx.clone();
    let mut v: Vec<u64> = (0..size).map(|_| rng.gen_range(0..vmax)).collect();

    // Disjoint chains, the first one starting at 0ⁿ.
    let mut order: Vec<usize> = (1..size).collect();
    order.shuffle(rng);
    order.insert(0, 0);
    let mut pos = 0;
    while pos < size {
        // the first chain has at least two edges so neither 0ⁿ nor S(0ⁿ) is a solution
        let lo = if pos == 0 { 3.min(size) } else { 1 };
        let len = rng.gen_range(lo..=(size - pos).min(size / 2).max(lo));
        let chain = &order[pos..pos + len];
        let mut pot = if pos == 0 { 0 } else { rng.gen_range(0..vmax / 2 + 1) };
        for (t, &x) in chain.iter().enumerate() {
            let keep = pos == 0 && t < 3;
            v[x] = if keep || rng.gen_bool(0.85) { pot.min(vmax - 1) } else { rng.gen_range(0..vmax) };
            pot += rng.gen_range(1..=2);
            if t + 1 < chain.len() {
                s[x] = idx[chain[t + 1]].clone();
                p[chain[t + 1]] = idx[x].clone();
            }
        }
        pos += len;
    }
    // A few inconsistent pointers, away from the first two edges.
    for _ in 0..rng.gen_range(0..=n) {
        let x = rng.gen_range(0..size);
        let y = rng.gen_range(0..size);
        if size > 4 && order[..3].contains(&x) {
            continue;
        }
        if rng.gen_bool(0.5) {
            s[x] = idx[y].clone();
        } else {
            p[x] = idx[y].clone();
        }
    }
    if s[0] == idx[0] {
        s[0] = idx[order[1]].clone();
    }
    p[0] = idx[0].clone();
    v[0] = if kind == TableKind::Eoml { 1 } else { 0 };
    ExplicitTables { kind, n, m, s, p, v: v.into_iter().map(BigUint::from).collect(), c: vec![] }
}

/// Random EOPL tables: disjoint chains with mostly increasing potentials,
/// plus stray pointers and potential drops.
pub fn gen_random_eopl_tables(n: usize, m: usize, rng_seed: u64) -> Result<ExplicitTables> {
    if n == 0 || n > MAX_EXPLICIT_WIDTH || m == 0 || m > 62 {
        return Err(Error::Capability(format!("random tables need 1 <= n <= {MAX_EXPLICIT_WIDTH} and 1 <= m <= 62")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok(random_tables(TableKind::Eopl, n, m, &mut rng))
}

/// Random EOML tables in the same style, potentials below `2ⁿ`.
pub fn gen_random_eoml_tables(n: usize, rng_seed: u64) -> Result<ExplicitTables> {
    if n == 0 || n > MAX_EXPLICIT_WIDTH {
        return Err(Error::Capability(format!("random tables need 1 <= n <= {MAX_EXPLICIT_WIDTH}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok(random_tables(TableKind::Eoml, n, n, &mut rng))
}

/// Strictly row diagonally dominant integer LCP of dimension `d ≤ 8` with all
/// entries of bit length at most 8, a unique most negative `q_i`, and a
/// nondegenerate Lemke path.
pub fn gen_plcp(d: usize, rng_seed: u64) -> Result<LcpInstance> {
    if d == 0 || d > 8 {
        return Err(Error::Capability("generated P-matrix LCPs need 1 <= d <= 8".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut rows = vec![vec![0i64; d]; d];
        for (i, row) in rows.iter_mut().enumerate() {
            let mut off = 0;
            for (j, e) in row.iter_mut().enumerate() {
                if i != j {
                    *e = rng.gen_range(-8..=8);
                    off += e.abs();
                }
            }
            row[i] = off + rng.gen_range(1..=8);
        }
        let mut q: Vec<i64> = (0..d).map(|_| rng.gen_range(-64..=64)).collect();
        if q.iter().all(|&x| x >= 0) {
            let i = rng.gen_range(0..d);
            q[i] = -rng.gen_range(1..=64);
        }
        let min = *q.iter().min().expect("d >= 1");
        if q.iter().filter(|&&x| x == min).count() > 1 {
            continue;
        }
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let inst = LcpInstance::from_i64(&refs, &q)?;
        if !lemke_path(&inst, DEFAULT_PIVOT_BUDGET)?.degenerate {
            return Ok(inst);
        }
    }
    Err(Error::BudgetExhausted(MAX_ATTEMPTS as u64))
}

fn max_abs_sums(a: &[Vec<Rational>]) -> Rational {
    let d = a.len();
    let rows = (0..d).map(|i| a[i].iter().map(|x| x.abs()).sum::<Rational>());
    let cols = (0..d).map(|j| a.iter().map(|r| r[j].abs()).sum::<Rational>());
    rows.chain(cols).max().unwrap_or_else(Rational::zero)
}

/// Affine contraction `x ↦ clamp(Ax + b)` whose fixpoint lies on the grid
/// `{0, 1/k, …, 1}^d`. Entries of `A` are multiples of `1/8` and every row
/// and column of `|A|` sums to at most `3/4`, so the map contracts by `3/4`
/// in every ℓp norm.
pub fn gen_affine_contraction(d: usize, k: u64, rng_seed: u64) -> Result<(AffineMap, Vec<Rational>)> {
    if d == 0 || k == 0 {
        return Err(Error::Argument("need d >= 1 and k >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let bound = rat(3, 4);
    let a = loop {
        let a: Vec<Vec<Rational>> = (0..d).map(|_| (0..d).map(|_| rat(rng.gen_range(-3..=3), 8)).collect()).collect();
        if max_abs_sums(&a) <= bound {
            break a;
        }
    };
    let x: Vec<Rational> = (0..d).map(|_| Rational::new(BigInt::from(rng.gen_range(0..=k)), BigInt::from(k))).collect();
    let m = RationalMatrix::from_rows(a)?;
    let ax = m.mul_vec(&x)?;
    let b = x.iter().zip(&ax).map(|(xi, axi)| xi - axi).collect();
    Ok((AffineMap::new(m, b)?, x))
}

/// Grid widths used by [`gen_dcm`]: `k_i = 4^{d−i}·K`.
pub fn dcm_widths(d: usize) -> Vec<u64> {
    scaled_widths(d, default_dcm_base(d))
}

fn default_dcm_base(d: usize) -> u64 {
    if d <= 2 {
        8
    } else {
        2
    }
}

fn scaled_widths(d: usize, base: u64) -> Vec<u64> {
    (1..=d).map(|i| 4u64.pow((d - i) as u32) * base).collect()
}

/// Upper-triangular affine contraction with diagonal entries in `{0, 1/2}`
/// and off-diagonal entries in `{0, ±1/4}`, checked to give a discrete
/// contraction map on the grid of [`dcm_widths`]. The triangular shape
/// keeps every slice fixpoint on the grid.
pub fn gen_dcm(d: usize, rng_seed: u64) -> Result<(AffineMap, GridSpec)> {
    gen_dcm_scaled(d, default_dcm_base(d), rng_seed)
}

/// [`gen_dcm`] on the grid `k_i = 4^{d−i}·base`.
pub fn gen_dcm_scaled(d: usize, base: u64, rng_seed: u64) -> Result<(AffineMap, GridSpec)> {
    if d == 0 || d > 3 {
        return Err(Error::Capability("generated discrete contraction maps need 1 <= d <= 3".into()));
    }
    if base == 0 || base > 64 {
        return Err(Error::Argument(format!("grid base must lie in 1..=64, got {base}")));
    }
    let widths = scaled_widths(d, base);
    let grid = GridSpec::with_sizes(&widths)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let bound = rat(3, 4);
    for _ in 0..MAX_ATTEMPTS {
        let a: Vec<Vec<Rational>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| match j.cmp(&i) {
                        std::cmp::Ordering::Less => Rational::zero(),
                        std::cmp::Ordering::Equal => rat(rng.gen_range(0..=1), 2),
                        std::cmp::Ordering::Greater => rat(rng.gen_range(-1..=1), 4),
                    })
                    .collect()
            })
            .collect();
        if max_abs_sums(&a) > bound {
            continue;
        }
        let b: Vec<Rational> = widths
            .iter()
            .map(|&k| {
                let k = k as i64;
                rat(rng.gen_range(-k / 4..=k), k)
            })
            .collect();
        let map = AffineMap::new(RationalMatrix::from_rows(a)?, b)?;
        let f: Arc<dyn EvaluableMap> = Arc::new(map.clone());
        let dg = direction_grid_from_map(f, &grid)?;
        if validate_dcm(&dg, 1 << 20)?.is_none() {
            return Ok((map, grid));
        }
    }
    Err(Error::BudgetExhausted(MAX_ATTEMPTS as u64))
}

/// Desk-scale CLO instance on `[0,1]^d`: `f = clamp(Ax + b)` and
/// `p = clamp(w·x + w₀)` with entries in multiples of `1/4`. `λ` and `ε` are
/// drawn small enough that continuity violations and local optima both occur.
pub fn gen_clo(d: usize, norm: NormIndex, rng_seed: u64) -> Result<CloInstance> {
    if d == 0 || d > 3 {
        return Err(Error::Capability("generated CLO instances need 1 <= d <= 3".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut q = |lo: i64, hi: i64| rat(rng.gen_range(lo..=hi), 4);
    let a: Vec<Vec<Rational>> = (0..d).map(|_| (0..d).map(|_| q(-4, 4)).collect()).collect();
    let b: Vec<Rational> = (0..d).map(|_| q(0, 4)).collect();
    let w: Vec<Rational> = (0..d).map(|_| q(-4, 4)).collect();
    let w0 = q(0, 4);
    let lambda = q(2, 6);
    let eps = rat(1, 1 << rng.gen_range(1..=3));
    let f: Arc<dyn EvaluableMap> = Arc::new(AffineMap::new(RationalMatrix::from_rows(a)?, b)?);
    let p: ScalarFn = Arc::new(move |x: &[Rational]| clamp01(x.iter().zip(&w).map(|(xi, wi)| xi * wi).sum::<Rational>() + &w0));
    CloInstance::new(f, p, eps, lambda, norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lcp::{is_p_matrix, lemke_solve, verify_lcp_result, LcpResult};

    #[test]
    fn line_tables_are_seed_stable() {
        let a = gen_random_eopl_tables(4, 3, 7).unwrap();
        assert_eq!(a, gen_random_eopl_tables(4, 3, 7).unwrap());
        assert!(a.v.iter().all(|v| v < &BigUint::from(8u32)));
        assert_ne!(a.s[0], BitVector::zeros(4));
        a.to_eopl().unwrap();
        gen_random_eoml_tables(5, 1).unwrap().to_eoml().unwrap();
    }

    #[test]
    fn plcp_instances() {
        for seed in 0..20 {
            let inst = gen_plcp(1 + (seed as usize % 6), seed).unwrap();
            assert_eq!(is_p_matrix(inst.matrix()).unwrap(), None);
            let r = lemke_solve(&inst).unwrap();
            assert!(matches!(r, LcpResult::Q1 { .. }) && verify_lcp_result(&inst, &r));
        }
    }

    #[test]
    fn affine_contractions_hit_their_fixpoint() {
        for seed in 0..10 {
            let (f, x) = gen_affine_contraction(3, 8, seed).unwrap();
            assert_eq!(f.eval(&x), x);
            assert_eq!(f.exact_fixpoint().unwrap(), x);
        }
    }

    #[test]
    fn dcm_generation() {
        assert_eq!(dcm_widths(2), vec![32, 8]);
        assert_eq!(dcm_widths(3), vec![32, 8, 2]);
        for d in 2..=3 {
            let (f, grid) = gen_dcm(d, 3).unwrap();
            let dg = direction_grid_from_map(Arc::new(f), &grid).unwrap();
            assert_eq!(dg.fixpoints(1 << 20).unwrap().len(), 1);
        }
    }
}

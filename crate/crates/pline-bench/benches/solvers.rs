use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pline::contraction::{find_fp_approx, find_fp_exact, GridSpec};
use pline::exact::rat;
use pline::lcp::lemke_solve;
use pline::line::{aldous_solve, follow_line, gen_line};
use pline::linfixp::NormIndex;
use pline::plcp::{build_plcp_eopl, PlcpBuild};
use pline::BitVector;
use pline_bench::{affine, plcps};

fn lemke(c: &mut Criterion) {
    let mut g = c.benchmark_group("lemke");
    for d in [2, 4, 8] {
        let insts = plcps(d, 8);
        g.bench_with_input(BenchmarkId::from_parameter(d), &insts, |b, insts| {
            b.iter(|| {
                for i in insts {
                    black_box(lemke_solve(black_box(i)).unwrap());
                }
            })
        });
    }
    g.finish();
}

fn plcp_line(c: &mut Criterion) {
    let mut g = c.benchmark_group("plcp_line");
    for d in [2, 3] {
        let insts = plcps(d, 4);
        g.bench_with_input(BenchmarkId::from_parameter(d), &insts, |b, insts| {
            b.iter(|| {
                for inst in insts {
                    if let PlcpBuild::Reduced(r) = build_plcp_eopl(inst).unwrap() {
                        follow_line(r.eopl(), &BitVector::zeros(2 * d), 1 << 20).unwrap();
                    }
                }
            })
        });
    }
    g.finish();
}

fn line_solvers(c: &mut Criterion) {
    let inst = gen_line(16, 1 << 14, 5).unwrap();
    let z = BitVector::zeros(16);
    c.bench_function("follow_line n=16", |b| b.iter(|| follow_line(&inst, black_box(&z), 1 << 17).unwrap()));
    c.bench_function("aldous n=16", |b| b.iter(|| aldous_solve(&inst, 256, black_box(9), 1 << 17).unwrap()));
}

fn contraction(c: &mut Criterion) {
    let mut g = c.benchmark_group("contraction");
    g.sample_size(10);
    for d in [1, 2, 3] {
        let map = affine(d, 8, 300 + d as u64);
        let grid = GridSpec::with_sizes(&vec![8; d]).unwrap();
        g.bench_with_input(BenchmarkId::new("exact", d), &map, |b, m| b.iter(|| find_fp_exact(m, &grid).unwrap()));
    }
    let eps = rat(1, 1000);
    for d in [1, 2] {
        let map = affine(d, 64, 600 + d as u64);
        g.bench_with_input(BenchmarkId::new("approx p=2", d), &map, |b, m| {
            b.iter(|| find_fp_approx(m, NormIndex::Finite(2), &eps).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, lemke, plcp_line, line_solvers, contraction);
criterion_main!(benches);

use criterion::{black_box, criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use trirem_core::{
    draw_uniform_triangle, psi_ladder, run, Graph, LadderWord, ProcessState, RunConfig, RunRng, Stream, WeightedSampler,
};

fn sampler(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampler");
    for n in [128usize, 512] {
        let g = Graph::new_complete(n);
        let s = WeightedSampler::from_graph(&g);
        let mut rng = RunRng::new(1, Stream::Process);
        group.bench_with_input(BenchmarkId::new("draw", n), &n, |b, _| {
            b.iter(|| black_box(draw_uniform_triangle(&g, &s, &mut rng)))
        });
        group.bench_with_input(BenchmarkId::new("update", n), &n, |b, _| {
            let mut s = s.clone();
            let mut k = 0usize;
            b.iter(|| {
                k = (k + 7919) % s.capacity();
                s.set_weight(k, (k % 50) as u32).unwrap();
            })
        });
    }
    group.finish();
}

fn steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("process");
    group.sample_size(10);
    for n in [256usize, 512] {
        group.bench_with_input(BenchmarkId::new("full_run", n), &n, |b, &n| {
            let mut seed = 0;
            b.iter(|| {
                seed += 1;
                run(n, seed, &RunConfig::default()).unwrap().final_edges
            })
        });
    }
    group.bench_function("first_1000_steps/1024", |b| {
        b.iter_batched(
            || ProcessState::new(1024, 5),
            |mut st| {
                for _ in 0..1000 {
                    st.step();
                }
                st
            },
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

fn counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("psi");
    let mut g = Graph::new_complete(300);
    let mut rng = RunRng::new(9, Stream::Pairs);
    for (u, v) in g.edges() {
        if rng.below(2) == 0 {
            g.delete_edge(u, v).unwrap();
        }
    }
    for w in ["11", "111", "1e1"] {
        let word: LadderWord = w.parse().unwrap();
        group.bench_function(w, |b| b.iter(|| psi_ladder(&word, 3, 17, &g).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, sampler, steps, counting);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use mogalign_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn density(c: &mut Criterion) {
    let gt = make_ground_truth();
    let p = Point2::new(0.3, -0.7);
    c.bench_function("log_density/k8", |b| {
        b.iter(|| log_density(black_box(&gt), black_box(&p)))
    });
    c.bench_function("grad_log_density/k8", |b| {
        b.iter(|| grad_log_density(black_box(&gt), black_box(&p)))
    });
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    c.bench_function("sample/k8/n256", |b| {
        b.iter(|| sample(black_box(&gt), 1.25, 256, &mut rng).unwrap())
    });
}

fn training(c: &mut Criterion) {
    let gt = make_ground_truth();
    let fit = FitConfig {
        iterations: 10,
        ..FitConfig::default()
    };
    c.bench_function("fit_mle/k6/10it", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        b.iter(|| fit_mle(&gt, &fit, &mut rng).unwrap())
    });

    let reference = run_kd(&gt, 4, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    let reward = RewardSpec::default();
    for algorithm in Algorithm::ALL {
        let cfg = AlignConfig {
            iterations: 10,
            offline_dataset_size: 2560,
            ..AlignConfig::for_algorithm(algorithm)
        };
        c.bench_function(&format!("align/{algorithm}/10it"), |b| {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            b.iter(|| align(&reference, &reference, &reward, &cfg, &mut rng).unwrap())
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    c.bench_function("dpo_loss/k4/256pairs", |b| {
        b.iter_batched(
            || {
                let pts = sample(&reference, 1.0, 512, &mut rng).unwrap();
                pts.chunks(2)
                    .map(|c| prefer(c[0], c[1], &reward))
                    .collect::<Vec<_>>()
            },
            |pairs| dpo_loss(&reference, &reference, &pairs, 1.0).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, density, training);
criterion_main!(benches);

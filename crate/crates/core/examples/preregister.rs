//! Large-sample oracle run used to fix the Monte Carlo acceptance bands.
//!
//! Each statistic is computed by direct loops over the raw draws, without the
//! tracker or the convergence runner. For every experiment it prints the
//! median over all paths and the 0.5%–99.5% range of the median of a
//! `k`-path subsample (bootstrap), which is what the acceptance suite checks.
//!
//! `cargo run --release -p hull-limits --example preregister -- [paths]`

use hull_limits::normalizers::{eval_b, eval_c};
use hull_limits::par::map_indexed;
use hull_limits::rng::{derive_seed, PathRng};
use statrs::distribution::{ContinuousCDF, Normal};

const DECADES: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];
const MASTER: u64 = 0x0AC1E;

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn subsample_band(values: &[f64], k: usize, rng: &mut PathRng) -> (f64, f64) {
    let mut medians: Vec<f64> = (0..4000)
        .map(|_| {
            let mut s: Vec<f64> = (0..k)
                .map(|_| values[(rng.uniform() * values.len() as f64) as usize])
                .collect();
            median(&mut s)
        })
        .collect();
    medians.sort_by(f64::total_cmp);
    (medians[20], medians[3979])
}

fn report(name: &str, k: usize, columns: &[(u64, Vec<f64>)]) {
    let mut rng = PathRng::from_seed(99);
    println!("{name} (subsample of {k} paths)");
    for (n, values) in columns {
        let (lo, hi) = subsample_band(values, k, &mut rng);
        let mut v = values.clone();
        println!(
            "  n = {n:>8}: median {:.4}, 99% subsample-median range [{lo:.4}, {hi:.4}]",
            median(&mut v)
        );
    }
}

/// Runs `step` for every path and records `stat(min, max, n)` at each decade.
fn scalar_paths<S, F>(paths: usize, salt: u64, mut_step: S, stat: F) -> Vec<(u64, Vec<f64>)>
where
    S: Fn(&mut PathRng, u64, &mut f64) -> f64 + Sync + Send,
    F: Fn(f64, f64, u64) -> f64 + Sync + Send,
{
    let rows = map_indexed(paths, |p| {
        let mut rng = PathRng::from_seed(derive_seed(MASTER ^ salt, p as u64));
        let (mut lo, mut hi, mut state) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        let mut out = Vec::new();
        let mut k = 0;
        for &n in &DECADES {
            while k < n {
                k += 1;
                let x = mut_step(&mut rng, k, &mut state);
                lo = lo.min(x);
                hi = hi.max(x);
            }
            out.push(stat(lo, hi, n));
        }
        out
    });
    DECADES
        .iter()
        .enumerate()
        .map(|(j, &n)| (n, rows.iter().map(|r| r[j]).collect()))
        .collect()
}

fn interval_distance(lo: f64, hi: f64, n: u64) -> f64 {
    let b = eval_b(n as f64).unwrap();
    (hi / b - 1.0).abs().max((lo / b + 1.0).abs())
}

fn iid_exact_median(n: u64) -> f64 {
    let phi = Normal::standard();
    let b = eval_b(n as f64).unwrap();
    let cdf = |d: f64| {
        let f = |a: f64, c: f64| (phi.cdf(c) - phi.cdf(a)).max(0.0).powf(n as f64);
        let (u, l) = (b * (1.0 + d), b * (1.0 - d));
        f(-u, u) - 2.0 * f(-u, l) + f(-l, l)
    };
    let (mut lo, mut hi) = (0.0, 0.99);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < 0.5 {
            lo = mid
        } else {
            hi = mid
        }
    }
    0.5 * (lo + hi)
}

fn diamond_paths(paths: usize) -> Vec<(u64, Vec<f64>)> {
    let checkpoints = [10_000u64, 1_000_000];
    // Dense continuous-direction approximation of the Hausdorff distance.
    let dirs: Vec<(f64, f64)> = (0..20_000)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / 20_000.0;
            (a.cos(), a.sin())
        })
        .collect();
    let rows = map_indexed(paths, |p| {
        let mut rng = PathRng::from_seed(derive_seed(MASTER ^ 7, p as u64));
        let mut ext = [0.0f64; 4]; // max x, -min x, max y, -min y
        let mut out = Vec::new();
        let mut k = 0;
        for &n in &checkpoints {
            while k < n {
                k += 1;
                let z = rng.standard_normal();
                let axis = if rng.uniform() < 0.5 { 0 } else { 2 };
                ext[axis] = ext[axis].max(z);
                ext[axis + 1] = ext[axis + 1].max(-z);
            }
            let b = eval_b(n as f64).unwrap();
            let d = dirs
                .iter()
                .map(|&(c, s)| {
                    let h = (c * ext[0])
                        .max(-c * ext[1])
                        .max(s * ext[2])
                        .max(-s * ext[3])
                        .max(0.0)
                        / b;
                    (h - c.abs().max(s.abs())).abs()
                })
                .fold(0.0, f64::max);
            out.push(d);
        }
        out
    });
    checkpoints
        .iter()
        .enumerate()
        .map(|(j, &n)| (n, rows.iter().map(|r| r[j]).collect()))
        .collect()
}

fn main() {
    let paths: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(1000);
    println!("oracle run with {paths} paths per experiment\n");

    let iid = scalar_paths(
        paths,
        1,
        |rng, _, _| rng.standard_normal(),
        interval_distance,
    );
    report("iid N(0,1), d_H(W_n/b(n), [-1,1])", 100, &iid);
    let exact: Vec<String> = DECADES
        .iter()
        .map(|&n| format!("{:.4}", iid_exact_median(n)))
        .collect();
    println!("  exact-distribution medians: {}", exact.join(", "));

    let phi = 0.5f64;
    let ar1 = scalar_paths(
        paths,
        2,
        move |rng, k, x| {
            let z = rng.standard_normal();
            *x = if k == 1 {
                z
            } else {
                phi * *x + (1.0 - phi * phi).sqrt() * z
            };
            *x
        },
        interval_distance,
    );
    report("ar1(0.5)", 100, &ar1);

    let scaled = scalar_paths(
        paths,
        3,
        |rng, k, _| (1.0 + 1.0 / (k as f64).sqrt()) * rng.standard_normal(),
        interval_distance,
    );
    report("scaled-iid sigma_n = 1 + n^-1/2", 100, &scaled);

    let walk_step = |rng: &mut PathRng, k: u64, s: &mut f64| {
        *s += rng.standard_normal();
        *s / (k as f64).sqrt()
    };
    let walk_b = scalar_paths(paths, 4, walk_step, |lo, hi, n| {
        hi.max(-lo) / eval_b(n as f64).unwrap()
    });
    report("normalized walk, V(n)/b(n)", 100, &walk_b);
    let walk_c = scalar_paths(paths, 4, walk_step, |lo, hi, n| {
        hi.max(-lo) / eval_c(n as f64).unwrap()
    });
    report("normalized walk, V(n)/c(n)", 100, &walk_c);

    report(
        "polytope lines on e1, e2 vs diamond (dense directions)",
        20,
        &diamond_paths(paths),
    );
}

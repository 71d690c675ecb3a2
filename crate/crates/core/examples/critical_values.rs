//! Regenerates the embedded break-test critical values by simulating the
//! limiting distributions on a Gaussian random-walk grid.
//!
//! ```text
//! cargo run --release -p breakgauge-core --example critical_values -- seq 0.15 200000
//! cargo run --release -p breakgauge-core --example critical_values -- udmax 0.15 100000 5
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const GRID: usize = 1000;
const SEED: u64 = 20070103;
const LEVELS: [f64; 3] = [0.10, 0.05, 0.01];

fn quantile(v: &mut [f64], p: f64) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let h = (v.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

fn walk(rng: &mut ChaCha8Rng, ps: &mut [f64], ps2: &mut [f64]) {
    for t in 0..GRID {
        let e: f64 = StandardNormal.sample(rng);
        ps[t + 1] = ps[t] + e;
        ps2[t + 1] = ps2[t] + e * e;
    }
}

/// sup-F(1|0) draws; F(l+1|l) quantiles come from the same draws at level
/// (1 - a)^(1 / (l + 1)).
fn sequential(eps: f64, reps: usize) {
    let h = (eps * GRID as f64).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut ps, mut ps2) = (vec![0.0; GRID + 1], vec![0.0; GRID + 1]);
    let mut stats: Vec<f64> = (0..reps)
        .map(|_| {
            walk(&mut rng, &mut ps, &mut ps2);
            let total = ps[GRID];
            (h..=GRID - h)
                .map(|tau| {
                    let m1 = ps[tau] / tau as f64;
                    let m2 = (total - ps[tau]) / (GRID - tau) as f64;
                    (tau * (GRID - tau)) as f64 / GRID as f64 * (m1 - m2) * (m1 - m2)
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let max_l = (1.0 / eps).floor() as usize - 1;
    for alpha in LEVELS {
        let row: Vec<String> = (0..max_l)
            .map(|l| format!("{:.2}", quantile(&mut stats, (1.0 - alpha).powf(1.0 / (l as f64 + 1.0)))))
            .collect();
        println!("eps={eps} level={alpha}: {}", row.join(", "));
    }
}

fn udmax(eps: f64, reps: usize, max_breaks: usize) {
    let h = (eps * GRID as f64).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut ps, mut ps2) = (vec![0.0; GRID + 1], vec![0.0; GRID + 1]);
    let mut draws: Vec<Vec<f64>> = vec![Vec::with_capacity(reps); max_breaks];
    let mut prev = vec![f64::INFINITY; GRID + 1];
    let mut cur = vec![f64::INFINITY; GRID + 1];
    for _ in 0..reps {
        walk(&mut rng, &mut ps, &mut ps2);
        let cost = |a: usize, b: usize| {
            let s = ps[b] - ps[a];
            (ps2[b] - ps2[a]) - s * s / (b - a) as f64
        };
        let ssr0 = cost(0, GRID);
        for j in 0..=GRID {
            prev[j] = if j >= h { cost(0, j) } else { f64::INFINITY };
        }
        let mut running = 0.0f64;
        for k in 1..=max_breaks {
            for j in 0..=GRID {
                cur[j] = f64::INFINITY;
                if j < (k + 1) * h {
                    continue;
                }
                cur[j] = ((k * h)..=(j - h))
                    .map(|b| prev[b] + cost(b, j))
                    .fold(f64::INFINITY, f64::min);
            }
            running = running.max((ssr0 - cur[GRID]) / k as f64);
            draws[k - 1].push(running);
            std::mem::swap(&mut prev, &mut cur);
        }
    }
    for (m, v) in draws.iter_mut().enumerate() {
        let q: Vec<String> = LEVELS
            .iter()
            .map(|a| format!("{:.2}", quantile(v, 1.0 - a)))
            .collect();
        println!("eps={eps} M={}: {}", m + 1, q.join(", "));
    }
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let usage = "usage: critical_values (seq EPS REPS | udmax EPS REPS MAX_BREAKS)";
    let eps: f64 = args.get(1).and_then(|s| s.parse().ok()).expect(usage);
    let reps: usize = args.get(2).and_then(|s| s.parse().ok()).expect(usage);
    match args[0].as_str() {
        "seq" => sequential(eps, reps),
        "udmax" => {
            let m: usize = args.get(3).and_then(|s| s.parse().ok()).expect(usage);
            udmax(eps, reps, m)
        }
        _ => panic!("{usage}"),
    }
}

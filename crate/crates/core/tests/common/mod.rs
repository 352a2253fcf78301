//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tnvs::data::Dataset;

// Reference CODEC. It shares nothing with the library except the tie rule:
// candidates at exactly the minimum squared distance, ascending by index,
// one drawn with `gen_range` whenever there is more than one.

pub fn oracle_nn(rows: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = rows.len();
    (0..n)
        .map(|h| {
            let dist = |i: usize| {
                let mut s = 0.0;
                for (a, b) in rows[h].iter().zip(&rows[i]) {
                    s += (a - b) * (a - b);
                }
                s
            };
            let best = (0..n)
                .filter(|&i| i != h)
                .map(dist)
                .fold(f64::INFINITY, f64::min);
            let ties: Vec<usize> = (0..n).filter(|&i| i != h && dist(i) == best).collect();
            if ties.len() == 1 {
                ties[0]
            } else {
                ties[rng.gen_range(0..ties.len())]
            }
        })
        .collect()
}

pub fn ranks(y: &[f64]) -> (Vec<i128>, Vec<i128>) {
    let r = y
        .iter()
        .map(|a| y.iter().filter(|b| *b <= a).count() as i128)
        .collect();
    let l = y
        .iter()
        .map(|a| y.iter().filter(|b| *b >= a).count() as i128)
        .collect();
    (r, l)
}

pub fn oracle_unconditional(y: &[f64], x: &[f64], rng: &mut ChaCha8Rng) -> Option<f64> {
    let n = y.len() as i128;
    let (r, l) = ranks(y);
    let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
    let m = oracle_nn(&rows, rng);
    let num: i128 = (0..y.len())
        .map(|h| n * r[h].min(r[m[h]]) - l[h] * l[h])
        .sum();
    let den: i128 = l.iter().map(|&lh| lh * (n - lh)).sum();
    (den != 0).then(|| num as f64 / den as f64)
}

pub fn oracle_conditional(
    y: &[f64],
    x: &[f64],
    given: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> Option<f64> {
    let n = y.len();
    let (r, _) = ranks(y);
    let g_rows: Vec<Vec<f64>> = (0..n)
        .map(|h| given.iter().map(|c| c[h]).collect())
        .collect();
    let nn = oracle_nn(&g_rows, rng);
    let j_rows: Vec<Vec<f64>> = g_rows
        .iter()
        .zip(x)
        .map(|(g, &v)| g.iter().copied().chain([v]).collect())
        .collect();
    let m = oracle_nn(&j_rows, rng);
    let num: i128 = (0..n).map(|h| r[h].min(r[m[h]]) - r[h].min(r[nn[h]])).sum();
    let den: i128 = (0..n).map(|h| r[h] - r[h].min(r[nn[h]])).sum();
    (den != 0).then(|| num as f64 / den as f64)
}

/// Columns drawn from a few value regimes so that exact ties are common.
pub fn column(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    match rng.gen_range(0..4) {
        0 => (0..n).map(|_| rng.gen::<f64>()).collect(),
        1 => (0..n).map(|_| rng.gen_range(0..4) as f64).collect(),
        2 => (0..n)
            .map(|_| {
                if rng.gen_bool(0.1) {
                    rng.gen::<f64>()
                } else {
                    0.0
                }
            })
            .collect(),
        _ => (0..n)
            .map(|_| (rng.gen_range(0..20) as f64) * 0.25 - 2.0)
            .collect(),
    }
}

/// A predictor drawn from one of several shapes the selector must cope with.
pub fn fuzz_column(rng: &mut ChaCha8Rng, n: usize, earlier: &[Vec<f64>]) -> Vec<f64> {
    match rng.gen_range(0..7) {
        0 => vec![rng.gen_range(-3.0..3.0); n],
        1 => (0..n)
            .map(|_| {
                if rng.gen_bool(0.05) {
                    rng.gen::<f64>()
                } else {
                    0.0
                }
            })
            .collect(),
        2 => (0..n).map(|_| rng.gen_range(0..3) as f64).collect(),
        3 if !earlier.is_empty() => earlier[rng.gen_range(0..earlier.len())].clone(),
        4 if earlier.len() >= 2 => {
            let a = &earlier[rng.gen_range(0..earlier.len())];
            let b = &earlier[rng.gen_range(0..earlier.len())];
            let (s, t) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            a.iter().zip(b).map(|(x, y)| s * x + t * y).collect()
        }
        _ => (0..n).map(|_| rng.sample(StandardNormal)).collect(),
    }
}

pub fn fuzz_dataset(seed: u64) -> Dataset<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..60);
    let p = rng.gen_range(1..12);
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(p);
    for _ in 0..p {
        let c = fuzz_column(&mut rng, n, &cols);
        cols.push(c);
    }
    let y: Vec<f64> = match rng.gen_range(0..4) {
        0 => vec![1.0; n],
        1 => cols[0].iter().map(|v| v.sin() + v * v).collect(),
        2 => (0..n).map(|_| rng.gen_range(0..3) as f64).collect(),
        _ => (0..n).map(|_| rng.sample(StandardNormal)).collect(),
    };
    let names = (1..=p).map(|j| format!("X{j}")).collect();
    Dataset::from_columns(cols, y, names, "Y").unwrap()
}

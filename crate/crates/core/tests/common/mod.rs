//! Reference implementations that share no code with the library.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taco_core::annotator::TimeSeriesClass;
use taco_core::synth::{derive_seed, sample_spec, Overlay, OverlayKind, Shape, SynthSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// W1 as the integral of |F_a - F_b| over the merged sample points.
pub fn w1_cdf(a: &[f64], b: &[f64]) -> f64 {
    let mut points: Vec<f64> = a.iter().chain(b).copied().collect();
    points.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let cdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
    points
        .windows(2)
        .map(|w| (cdf(a, w[0]) - cdf(b, w[0])).abs() * (w[1] - w[0]))
        .sum()
}

pub fn mean_pairwise_w1(values: &[f64], k: usize) -> f64 {
    let len = values.len() / k;
    let segs: Vec<&[f64]> = (0..k).map(|i| &values[i * len..(i + 1) * len]).collect();
    let mut total = 0.0;
    let mut pairs = 0;
    for i in 0..k {
        for j in i + 1..k {
            total += w1_cdf(segs[i], segs[j]);
            pairs += 1;
        }
    }
    total / pairs as f64
}

pub fn minmax(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

/// Least squares on `t = i / (n - 1)` through the normal equations, solved
/// by Gaussian elimination with partial pivoting. Returns the mean squared
/// residual.
pub fn normal_equations_mse(values: &[f64], degree: usize) -> f64 {
    let n = values.len();
    let m = degree + 1;
    let t: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let mut a = vec![vec![0.0; m + 1]; m];
    for r in 0..m {
        for c in 0..m {
            a[r][c] = t.iter().map(|x| x.powi((r + c) as i32)).sum();
        }
        a[r][m] = t.iter().zip(values).map(|(x, y)| x.powi(r as i32) * y).sum();
    }
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let coef: Vec<f64> = (0..m).map(|r| a[r][m] / a[r][r]).collect();
    t.iter()
        .zip(values)
        .map(|(x, y)| {
            let fit: f64 = coef.iter().enumerate().map(|(p, c)| c * x.powi(p as i32)).sum();
            (fit - y).powi(2)
        })
        .sum::<f64>()
        / n as f64
}

pub fn tokens(s: &str) -> Vec<String> {
    s.chars()
        .filter(|c| !c.is_ascii_punctuation())
        .collect::<String>()
        .to_lowercase()
        .split_whitespace()
        .map(String::from)
        .collect()
}

/// LCS by enumerating every subsequence of the shorter sequence.
pub fn lcs_brute(a: &[String], b: &[String]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    assert!(short.len() <= 16, "brute force limited to short inputs");
    let is_subseq = |sub: &[&String]| {
        let mut it = long.iter();
        sub.iter().all(|s| it.any(|x| x == *s))
    };
    (0u32..(1 << short.len()))
        .filter_map(|mask| {
            let sub: Vec<&String> = (0..short.len()).filter(|i| mask & (1 << i) != 0).map(|i| &short[i]).collect();
            is_subseq(&sub).then_some(sub.len())
        })
        .max()
        .unwrap_or(0)
}

pub fn rouge_oracle(c: &str, r: &str) -> f64 {
    let (c, r) = (tokens(c), tokens(r));
    let l = lcs_brute(&c, &r) as f64;
    if l == 0.0 {
        return 0.0;
    }
    let (p, rc) = (l / c.len() as f64, l / r.len() as f64);
    (1.0 + 1.44) * p * rc / (rc + 1.44 * p)
}

/// Corpus BLEU with per-order totals pooled over pairs; orders with no
/// candidate n-grams are skipped.
pub fn bleu_oracle(pairs: &[(&str, Vec<&str>)], n: usize) -> f64 {
    let mut num = vec![0usize; n];
    let mut den = vec![0usize; n];
    let (mut c_len, mut r_len) = (0, 0);
    for (c, refs) in pairs {
        let c = tokens(c);
        let refs: Vec<Vec<String>> = refs.iter().map(|r| tokens(r)).collect();
        c_len += c.len();
        let mut best = refs[0].len();
        for r in &refs {
            let (d, bd) = (r.len().abs_diff(c.len()), best.abs_diff(c.len()));
            if d < bd || (d == bd && r.len() < best) {
                best = r.len();
            }
        }
        r_len += best;
        for k in 1..=n {
            let grams: Vec<&[String]> = c.windows(k).collect();
            let mut distinct: Vec<&[String]> = Vec::new();
            for g in &grams {
                if !distinct.contains(g) {
                    distinct.push(g);
                }
            }
            for g in distinct {
                let count = grams.iter().filter(|x| **x == g).count();
                let max_ref = refs.iter().map(|r| r.windows(k).filter(|x| *x == g).count()).max().unwrap();
                num[k - 1] += count.min(max_ref);
            }
            den[k - 1] += grams.len();
        }
    }
    if c_len == 0 {
        return 0.0;
    }
    let used: Vec<usize> = (0..n).filter(|&k| den[k] > 0).collect();
    if used.iter().any(|&k| num[k] == 0) {
        return 0.0;
    }
    let geo = used.iter().map(|&k| (num[k] as f64 / den[k] as f64).ln()).sum::<f64>() / used.len() as f64;
    let bp = if c_len > r_len { 1.0 } else { (1.0 - r_len as f64 / c_len as f64).exp() };
    bp * geo.exp()
}

/// Position of the minimum-mse vector, first on ties.
pub fn nearest_oracle(query: &[f64], vectors: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_err = f64::MAX;
    for (i, v) in vectors.iter().enumerate() {
        let err = v.iter().zip(query).fold(0.0, |acc, (a, b)| acc + (a - b) * (a - b)) / query.len() as f64;
        if err < best_err {
            best = i;
            best_err = err;
        }
    }
    best
}

/// One forward↔backward mapping: a family of clean specs and the classes
/// the backward annotator is expected to assign.
pub struct Mapping {
    pub name: &'static str,
    pub expected: &'static [TimeSeriesClass],
    pub spec: fn(u64) -> SynthSpec,
}

fn clean(seed: u64, shapes: Option<&[Shape]>) -> SynthSpec {
    let mut spec = sample_spec(seed, 2048, shapes).unwrap();
    spec.overlays.clear();
    spec
}

fn with_overlay(seed: u64, kind: OverlayKind) -> SynthSpec {
    let mut spec = clean(seed, None);
    let (lo, hi) = kind.magnitude_range();
    let magnitude = rng(seed ^ 0x5eed).random_range(lo..=hi);
    spec.overlays.push(Overlay { kind, magnitude });
    spec
}

pub const MAPPINGS: [Mapping; 10] = {
    use TimeSeriesClass::*;
    [
        Mapping {
            name: "LinearIncrease -> Rising+Linear",
            expected: &[Rising, Linear],
            spec: |s| clean(s, Some(&[Shape::LinearIncrease])),
        },
        Mapping {
            name: "LinearDecrease -> Falling",
            expected: &[Falling],
            spec: |s| clean(s, Some(&[Shape::LinearDecrease])),
        },
        Mapping {
            name: "Constant -> Constant",
            expected: &[Constant],
            spec: |s| clean(s, Some(&[Shape::Constant])),
        },
        Mapping {
            name: "Sinusoidal(>=3 periods) -> Periodic",
            expected: &[Periodic],
            spec: |s| {
                let periods = rng(s).random_range(3.0..=8.0);
                clean(s, Some(&[Shape::Sinusoidal])).with_param("periods", periods)
            },
        },
        Mapping {
            name: "Convex -> Convex",
            expected: &[Convex],
            spec: |s| clean(s, Some(&[Shape::Convex])),
        },
        Mapping {
            name: "Concave -> Concave",
            expected: &[Concave],
            spec: |s| clean(s, Some(&[Shape::Concave])),
        },
        Mapping {
            name: "Gaussian(centered) -> Symmetry",
            expected: &[Symmetry],
            spec: |s| clean(s, Some(&[Shape::Gaussian])).with_param("center", 0.5),
        },
        Mapping {
            name: "Noisy overlay -> Noisy",
            expected: &[Noisy],
            spec: |s| with_overlay(s, OverlayKind::Noisy),
        },
        Mapping {
            name: "PosSpiky overlay -> Spiky",
            expected: &[Spiky],
            spec: |s| with_overlay(s, OverlayKind::PosSpiky),
        },
        Mapping {
            name: "Steppy overlay -> Step",
            expected: &[Step],
            spec: |s| with_overlay(s, OverlayKind::Steppy),
        },
    ]
};

/// Seed of the `i`-th instance of mapping `m`.
pub fn instance_seed(m: usize, i: u64) -> u64 {
    derive_seed(0xF0_0D + m as u64, i)
}

/// Monotone random walk plus small noise; `rising` picks the direction.
pub fn monotone_plus_noise(seed: u64, n: usize, rising: bool) -> Vec<f64> {
    let mut r = rng(seed);
    let noise = r.random_range(0.0..0.02);
    let mut level = 0.0;
    (0..n)
        .map(|_| {
            level += r.random_range(0.0..1.0) / n as f64;
            let v = level + noise * r.random_range(-1.0..1.0);
            if rising {
                v
            } else {
                -v
            }
        })
        .collect()
}

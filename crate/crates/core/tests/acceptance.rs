//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p taco-core --test acceptance`.

mod common;

use std::io::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use sha2::{Digest, Sha256};
use taco_core::annotator::{Annotator, TimeSeriesClass};
use taco_core::detectors::{score_amplitude, score_complexity, score_constancy, score_step, DetectorParams};
use taco_core::evalkit::{bleu_n, evaluate_corpus, nearnbr_caption, rouge_l, CaptionEntry, TrainIndex};
use taco_core::pipeline::{build_dataset, build_forward_dataset, write_jsonl, BuildOptions, ForwardOptions, IngestSpec};
use taco_core::signal::{polyfit, NormalizedSeries};
use taco_core::synth::generate;
use taco_core::Series64;

use common::*;

type Outcome = Result<String, String>;

fn check(cond: bool, ok: impl Into<String>, fail: impl Into<String>) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(fail.into())
    }
}

fn forward_backward() -> Outcome {
    let start = Instant::now();
    let annotator = Annotator::default();
    let mut rates = Vec::new();
    let mut worst = 100;
    for (m, mapping) in MAPPINGS.iter().enumerate() {
        let hits = (0..100)
            .filter(|&i| {
                let sample = generate(&(mapping.spec)(instance_seed(m, i))).expect("valid spec");
                let ann = annotator.annotate("", &sample.series).expect("annotates");
                mapping.expected.iter().all(|c| ann.classes.contains(c))
            })
            .count();
        worst = worst.min(hits);
        rates.push(format!("{}: {hits}/100", mapping.name));
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!("{} ({secs:.1}s)", rates.join("; "));
    check(worst >= 90 && secs < 60.0, detail.clone(), detail)
}

fn detector_oracles() -> Outcome {
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = r.random_range(16..=64);
        let k = r.random_range(2..=(n / 2).min(10));
        let raw: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
        let s = NormalizedSeries::from_raw(&raw).unwrap();
        let p = DetectorParams {
            k_segments: k,
            ..DetectorParams::default()
        };
        let norm = minmax(&raw);
        let diff: Vec<f64> = norm.windows(2).map(|w| w[1] - w[0]).collect();
        worst = worst.max((score_constancy(&s, &p).unwrap() - mean_pairwise_w1(&norm, k)).abs());
        if diff.len() / k >= 2 {
            worst = worst.max((score_complexity(&s, &p).unwrap() - mean_pairwise_w1(&diff, k)).abs());
        }
    }
    let mut fit_worst: f64 = 0.0;
    for _ in 0..200 {
        let n = r.random_range(16..=256);
        let raw: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let s = NormalizedSeries::from_raw(&raw).unwrap();
        for degree in [1, 2] {
            let lib = polyfit(&s, degree).unwrap().mse;
            fit_worst = fit_worst.max((lib - normal_equations_mse(s.values(), degree)).abs());
        }
    }
    let detail = format!("max W1 deviation {worst:.2e} (tol 1e-10), max polyfit mse deviation {fit_worst:.2e} (tol 1e-9)");
    check(worst <= 1e-10 && fit_worst <= 1e-9, detail.clone(), detail)
}

fn analytic_fixtures() -> Outcome {
    let p = DetectorParams::default();
    let heaviside: Vec<f64> = (0..2048).map(|i| if i < 1024 { 0.0 } else { 1.0 }).collect();
    let step = score_step(&NormalizedSeries::from_raw(&heaviside).unwrap(), &p).unwrap();

    let ramp: Vec<f64> = (0..2049).map(|i| i as f64).collect();
    let ramp_s = NormalizedSeries::from_raw(&ramp).unwrap();
    let half_kernel = DetectorParams {
        step_kernel_fracs: vec![0.5],
        ..p.clone()
    };
    let ramp_step = score_step(&ramp_s, &half_kernel).unwrap();

    let square: Vec<f64> = (0..2000).map(|i| ((i / 10) % 2) as f64).collect();
    let amp = score_amplitude(&NormalizedSeries::from_raw(&square).unwrap(), &p).unwrap();

    let two = DetectorParams { k_segments: 2, ..p };
    let constancy = score_constancy(&ramp_s, &two).unwrap();

    let detail = format!("step {step}, ramp step {ramp_step}, square variance {amp}, ramp constancy {constancy}");
    check(
        (step - 1.0).abs() <= 1e-9
            && (ramp_step - 0.25).abs() <= 1e-6
            && (amp - 0.25).abs() <= 1e-9
            && (constancy - 0.5).abs() <= 1e-6,
        detail.clone(),
        detail,
    )
}

fn invariance() -> Outcome {
    let annotator = Annotator::default();
    let mut r = rng(2);
    let mut affine_failures = 0;
    for i in 0..200 {
        let spec = taco_core::synth::sample_spec(instance_seed(99, i), 512, None).unwrap();
        let series = generate(&spec).unwrap().series;
        let base = annotator.annotate("", &series).unwrap().classes;
        for _ in 0..5 {
            let a = r.random_range(0.01..100.0);
            let b = r.random_range(-100.0..100.0);
            let mapped = Series64::new(series.values().iter().map(|v| a * v + b).collect()).unwrap();
            if annotator.annotate("", &mapped).unwrap().classes != base {
                affine_failures += 1;
            }
        }
    }
    let mut duality_failures = 0;
    for i in 0..200 {
        let values = monotone_plus_noise(1000 + i, 512, i % 2 == 0);
        let s = Series64::new(values).unwrap();
        let fwd = annotator.annotate("", &s).unwrap().classes;
        let rev = annotator.annotate("", &s.reversed()).unwrap().classes;
        let rising = fwd.contains(&TimeSeriesClass::Rising);
        let falling = fwd.contains(&TimeSeriesClass::Falling);
        if rising != rev.contains(&TimeSeriesClass::Falling) || falling != rev.contains(&TimeSeriesClass::Rising) || !(rising || falling) {
            duality_failures += 1;
        }
    }
    let detail = format!("affine mismatches {affine_failures}/1000, reversal mismatches {duality_failures}/200");
    check(affine_failures == 0 && duality_failures == 0, detail.clone(), detail)
}

const FIXTURE: [(&str, &str); 10] = [
    ("The signal has a rising trend.", "The signal has a rising trend overall."),
    ("The signal is noisy.", "The signal is noisy and spiky."),
    ("A smooth rising curve.", "The signal has a smooth shape."),
    ("The signal shows periodic behavior.", "The signal shows periodic behavior."),
    ("Falling trend with steps.", "The signal has a falling trend and step-like changes."),
    ("constant level", "The signal stays at a constant level."),
    ("The signal contains sudden spikes in value.", "Sudden spikes in value appear in the signal."),
    ("The signal has a high amplitude.", "The signal has a low amplitude."),
    ("It is a wave.", "The signal is a sinusoidal wave."),
    ("The signal has a concave shape and a rising trend.", "The signal has a rising trend and a concave shape."),
];

fn metric_suite() -> Outcome {
    let mut problems = Vec::new();
    let x = "The signal has a rising trend. The signal has a smooth shape.";
    if bleu_n(x, &[x], 3) != 1.0 || bleu_n(x, &[x], 4) != 1.0 || rouge_l(x, x) != 1.0 {
        problems.push("perfect match is not exactly 1".to_string());
    }

    // hand-derived: precisions 6/6, 5/5, 4/4 and brevity exp(1 - 7/6)
    let hand = (-1.0f64 / 6.0).exp();
    let got = bleu_n("the signal has a rising trend", &["the signal has a rising trend overall"], 3);
    if (got - hand).abs() > 1e-9 {
        problems.push(format!("bleu hand value {got} vs {hand}"));
    }
    // LCS 3 of 4 on both sides
    if (rouge_l("a b c d", "a c d e") - 0.75).abs() > 1e-9 {
        problems.push("rouge hand value".into());
    }

    let mut worst: f64 = 0.0;
    for (c, r) in FIXTURE {
        worst = worst.max((bleu_n(c, &[r], 3) - bleu_oracle(&[(c, vec![r])], 3)).abs());
        worst = worst.max((bleu_n(c, &[r], 4) - bleu_oracle(&[(c, vec![r])], 4)).abs());
        worst = worst.max((rouge_l(c, r) - rouge_oracle(c, r)).abs());
    }
    let cands: Vec<CaptionEntry> = FIXTURE
        .iter()
        .enumerate()
        .map(|(i, (c, _))| CaptionEntry { id: i.to_string(), caption: c.to_string() })
        .collect();
    let refs: Vec<CaptionEntry> = FIXTURE
        .iter()
        .enumerate()
        .map(|(i, (_, r))| CaptionEntry { id: i.to_string(), caption: r.to_string() })
        .collect();
    let report = evaluate_corpus(&cands, &refs).unwrap();
    let pairs: Vec<(&str, Vec<&str>)> = FIXTURE.iter().map(|(c, r)| (*c, vec![*r])).collect();
    let rouge_mean = FIXTURE.iter().map(|(c, r)| rouge_oracle(c, r)).sum::<f64>() / 10.0;
    worst = worst
        .max((report.bleu_3 - bleu_oracle(&pairs, 3)).abs())
        .max((report.bleu_4 - bleu_oracle(&pairs, 4)).abs())
        .max((report.rouge_l - rouge_mean).abs());
    if worst > 1e-9 {
        problems.push(format!("fixture deviation {worst:.2e}"));
    }

    let vocab = ["the", "signal", "has", "a", "rising", "trend.", "noisy", "is", "Spiky!", "x", ""];
    let mut r = rng(3);
    let words = |r: &mut rand_chacha::ChaCha8Rng| {
        let len = r.random_range(0..12);
        (0..len).map(|_| vocab[r.random_range(0..vocab.len())]).collect::<Vec<_>>().join(" ")
    };
    let mut out_of_bounds = 0;
    for _ in 0..10_000 {
        let (c, rf) = (words(&mut r), words(&mut r));
        for v in [bleu_n(&c, &[&rf], 3), bleu_n(&c, &[&rf], 4), rouge_l(&c, &rf)] {
            if !(0.0..=1.0).contains(&v) {
                out_of_bounds += 1;
            }
        }
    }
    if out_of_bounds > 0 {
        problems.push(format!("{out_of_bounds} fuzz values outside [0, 1]"));
    }
    check(
        problems.is_empty(),
        format!("fixture deviation {worst:.2e}, 10000 fuzz pairs in bounds"),
        problems.join("; "),
    )
}

fn nearnbr() -> Outcome {
    let mut r = rng(4);
    let vectors: Vec<Vec<f64>> = (0..1000)
        .map(|_| (0..2048).map(|_| r.random_range(0.0..1.0)).collect())
        .collect();
    let index = TrainIndex::new(
        vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (format!("train-{i}"), v.clone(), format!("caption {i}")))
            .collect(),
    )
    .unwrap();
    let mut disagreements = 0;
    for q in 0..100 {
        let query: Vec<f64> = if q % 10 == 0 {
            vectors[r.random_range(0..1000)].clone()
        } else {
            (0..2048).map(|_| r.random_range(0.0..1.0)).collect()
        };
        let got = nearnbr_caption(&query, &index).unwrap();
        if got.id != format!("train-{}", nearest_oracle(&query, &vectors)) {
            disagreements += 1;
        }
    }
    check(
        disagreements == 0,
        "100/100 queries agree with the oracle scan",
        format!("{disagreements}/100 queries disagree"),
    )
}

fn ramp_csv(dir: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("signals.csv");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "time,ramp,wave,flat").unwrap();
    for i in 0..900 {
        let t = i as f64;
        writeln!(f, "{i},{},{},{}", 0.5 * t + 3.0, (t / 25.0).sin(), 2.5).unwrap();
    }
    path
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn pipeline_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let spec = IngestSpec {
        columns: Some(vec!["ramp".into(), "wave".into(), "flat".into()]),
        ..IngestSpec::new(vec![ramp_csv(dir.path())])
    };
    let annotator = Annotator::default();
    let mut hashes = Vec::new();
    for jobs in [1, 4, 1, 3] {
        let opts = BuildOptions { jobs, ..BuildOptions::default() };
        let out = build_dataset(&spec, &annotator, &opts).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &out.records).unwrap();
        let fwd = build_forward_dataset(
            &ForwardOptions {
                annotate_also: Some(annotator.clone()),
                ..ForwardOptions::new(40, 7)
            },
            &opts,
        )
        .unwrap();
        write_jsonl(&mut buf, &fwd).unwrap();
        hashes.push(digest(&buf));
    }
    let same = hashes.windows(2).all(|w| w[0] == w[1]);
    check(
        same,
        format!("sha256 {} for jobs 1, 4, 1, 3", &hashes[0][..16]),
        format!("hashes differ: {hashes:?}"),
    )
}

fn end_to_end_caption() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let spec = IngestSpec {
        columns: Some(vec!["ramp".into()]),
        ..IngestSpec::new(vec![ramp_csv(dir.path())])
    };
    let out = build_dataset(&spec, &Annotator::default(), &BuildOptions::default()).unwrap();
    let first = out.records.first().ok_or("no records")?;
    check(
        first.caption_base.contains("The signal has a rising trend."),
        format!("caption: {}", first.caption_base),
        format!("caption lacks rising trend: {}", first.caption_base),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("forward-backward consistency", forward_backward),
        ("detector oracles", detector_oracles),
        ("analytic fixtures", analytic_fixtures),
        ("invariance", invariance),
        ("metrics", metric_suite),
        ("nearnbr exhaustive scan", nearnbr),
        ("pipeline determinism", pipeline_determinism),
        ("end-to-end ramp caption", end_to_end_caption),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

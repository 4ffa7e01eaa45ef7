use std::collections::HashMap;

/// Lowercases, drops ASCII punctuation and splits on whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    text.chars()
        .filter(|c| !c.is_ascii_punctuation())
        .collect::<String>()
        .to_lowercase()
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Corpus BLEU over `(candidate, references)` pairs with uniform weights on
/// orders `1..=n`.
///
/// Clipped counts and lengths are pooled across the corpus. Orders for which
/// no candidate has any n-gram are left out of the geometric mean, so a
/// short candidate identical to its reference still scores 1. Any order with
/// zero matches gives 0.
pub fn corpus_bleu<S: AsRef<str>>(pairs: &[(S, Vec<S>)], n: usize) -> f64 {
    assert!(n >= 1, "BLEU order must be at least 1");
    let mut matched = vec![0usize; n];
    let mut total = vec![0usize; n];
    let (mut cand_len, mut ref_len) = (0usize, 0usize);
    for (cand, refs) in pairs {
        let cand = tokenize(cand.as_ref());
        let refs: Vec<Vec<String>> = refs.iter().map(|r| tokenize(r.as_ref())).collect();
        cand_len += cand.len();
        // closest reference length, shorter on ties
        ref_len += refs
            .iter()
            .map(Vec::len)
            .min_by_key(|&l| (l.abs_diff(cand.len()), l))
            .unwrap_or(0);
        for k in 1..=n {
            let cand_counts = ngram_counts(&cand, k);
            let mut max_ref: HashMap<&[String], usize> = HashMap::new();
            for r in &refs {
                for (gram, c) in ngram_counts(r, k) {
                    let e = max_ref.entry(gram).or_insert(0);
                    *e = (*e).max(c);
                }
            }
            for (gram, c) in cand_counts {
                matched[k - 1] += c.min(max_ref.get(gram).copied().unwrap_or(0));
                total[k - 1] += c;
            }
        }
    }
    if cand_len == 0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    let mut orders = 0;
    for k in 0..n {
        if total[k] == 0 {
            continue;
        }
        if matched[k] == 0 {
            return 0.0;
        }
        log_sum += (matched[k] as f64 / total[k] as f64).ln();
        orders += 1;
    }
    let brevity = if cand_len > ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / cand_len as f64).exp()
    };
    (brevity * (log_sum / orders as f64).exp()).clamp(0.0, 1.0)
}

/// BLEU of a single candidate against its references.
pub fn bleu_n<S: AsRef<str>>(candidate: &str, references: &[S], n: usize) -> f64 {
    let refs: Vec<&str> = references.iter().map(AsRef::as_ref).collect();
    corpus_bleu(&[(candidate, refs)], n)
}

pub(crate) fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub const ROUGE_BETA: f64 = 1.2;

/// LCS-based F-measure.
pub fn rouge_l(candidate: &str, reference: &str) -> f64 {
    let c = tokenize(candidate);
    let r = tokenize(reference);
    let lcs = lcs_len(&c, &r);
    if lcs == 0 {
        return 0.0;
    }
    let p = lcs as f64 / c.len() as f64;
    let rc = lcs as f64 / r.len() as f64;
    let b2 = ROUGE_BETA * ROUGE_BETA;
    ((1.0 + b2) * p * rc / (rc + b2 * p)).clamp(0.0, 1.0)
}

/// Best ROUGE-L over several references.
pub fn rouge_l_multi<S: AsRef<str>>(candidate: &str, references: &[S]) -> f64 {
    references
        .iter()
        .map(|r| rouge_l(candidate, r.as_ref()))
        .fold(0.0, f64::max)
}

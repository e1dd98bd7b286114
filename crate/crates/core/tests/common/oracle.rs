//! Independent reference computations.

use llmprep::agreement::pair_score;
use rand::Rng;

/// Best summed pair score over every monotone matching, found by
/// enumerating the matchings one by one.
pub fn best_alignment_score(orig: &[&str], out: &[&str]) -> i32 {
    fn go(orig: &[&str], out: &[&str], i: usize, j: usize, acc: i32, best: &mut i32) {
        *best = (*best).max(acc);
        if i == orig.len() {
            return;
        }
        go(orig, out, i + 1, j, acc, best);
        for k in j..out.len() {
            go(orig, out, i + 1, k + 1, acc + pair_score(orig[i], out[k]).max(0), best);
        }
    }
    let mut best = 0;
    go(orig, out, 0, 0, 0, &mut best);
    best
}

/// A sequence of up to `max_len` tokens of one to three letters from `abcd`.
pub fn random_tokens(rng: &mut impl Rng, max_len: usize) -> Vec<String> {
    let n = rng.gen_range(0..=max_len);
    (0..n)
        .map(|_| (0..rng.gen_range(1..=3)).map(|_| char::from(b'a' + rng.gen_range(0..4u8))).collect())
        .collect()
}

/// Micro-F1 from pooled per-class true positives, false positives and
/// false negatives.
pub fn pooled_f1(y_true: &[usize], y_pred: &[usize], classes: usize) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for c in 0..classes {
        for (t, p) in y_true.iter().zip(y_pred) {
            match (*t == c, *p == c) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
                _ => {}
            }
        }
    }
    if tp == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    2.0 * precision * recall / (precision + recall)
}

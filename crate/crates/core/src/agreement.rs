//! Word-level agreement between original and preprocessed text: monotone
//! token alignment, SW/NSW/L/S percentages and corpus diagnostics.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::classic::{lemmatize, stem_sequence, LemmaTable, StopwordInventory};
use crate::tokenize::{TokenSequence, WordFilter};
use crate::Stemmer;

pub const EQUAL: i32 = 3;
pub const PREFIX: i32 = 2;
pub const SIMILAR: i32 = 1;
pub const MISMATCH: i32 = -1;

fn levenshtein(a: &[char], b: &[char]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// 3 for equal norms, 2 when one is a prefix of the other sharing at
/// least two characters, 1 when normalized edit similarity is at least
/// 0.5, otherwise -1.
pub fn pair_score(a: &str, b: &str) -> i32 {
    if a == b {
        return EQUAL;
    }
    let ac: Vec<char> = a.chars().collect();
    let bc: Vec<char> = b.chars().collect();
    let shorter = ac.len().min(bc.len());
    if shorter >= 2 && (ac.starts_with(&bc) || bc.starts_with(&ac)) {
        return PREFIX;
    }
    let longest = ac.len().max(bc.len());
    if longest > 0 && 2 * levenshtein(&ac, &bc) <= longest {
        return SIMILAR;
    }
    MISMATCH
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    pub pairs: Vec<(usize, usize)>,
    pub removed: Vec<usize>,
    pub inserted: Vec<usize>,
}

impl Alignment {
    /// Output index aligned to each original index.
    pub fn out_for(&self, orig_len: usize) -> Vec<Option<usize>> {
        let mut map = vec![None; orig_len];
        for &(i, j) in &self.pairs {
            map[i] = Some(j);
        }
        map
    }
}

/// Total score of an alignment; substitution pairs count 0.
pub fn alignment_score(orig: &[&str], out: &[&str], alignment: &Alignment) -> i32 {
    alignment.pairs.iter().map(|&(i, j)| pair_score(orig[i], out[j]).max(0)).sum()
}

/// Global monotone alignment maximizing the summed pair score, gaps free,
/// and among optimal alignments the number of pairs (a mismatched pair
/// counts 0 here). Remaining ties go to the earliest pairs. A zero-score
/// pair survives only as a substitution: inside a stretch between scored
/// pairs holding as many original as output tokens (`is` / `be`).
pub fn align_norms(orig: &[&str], out: &[&str]) -> Alignment {
    let score: Vec<Vec<i32>> = orig.iter().map(|a| out.iter().map(|b| pair_score(a, b).max(0)).collect()).collect();
    align_scores(&score, orig.len(), out.len())
}

fn align_scores(score: &[Vec<i32>], n: usize, m: usize) -> Alignment {
    let mut dp = vec![vec![(0i32, 0i32); m + 1]; n + 1];
    for i in 1..=n {
        for j in 1..=m {
            let (s, c) = dp[i - 1][j - 1];
            dp[i][j] = dp[i - 1][j].max(dp[i][j - 1]).max((s + score[i - 1][j - 1], c + 1));
        }
    }
    let mut raw = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 && j > 0 {
        if dp[i][j] == dp[i - 1][j] {
            i -= 1;
        } else if dp[i][j] == dp[i][j - 1] {
            j -= 1;
        } else {
            raw.push((i - 1, j - 1));
            i -= 1;
            j -= 1;
        }
    }
    raw.reverse();
    let anchors: Vec<(usize, usize)> = raw.iter().copied().filter(|&(a, b)| score[a][b] > 0).collect();
    let pairs = with_substitutions(&anchors, n, m);
    let mut orig_used = vec![false; n];
    let mut out_used = vec![false; m];
    for &(a, b) in &pairs {
        orig_used[a] = true;
        out_used[b] = true;
    }
    Alignment {
        pairs,
        removed: (0..n).filter(|&k| !orig_used[k]).collect(),
        inserted: (0..m).filter(|&k| !out_used[k]).collect(),
    }
}

fn with_substitutions(anchors: &[(usize, usize)], n: usize, m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(anchors.len());
    let (mut i0, mut j0) = (0, 0);
    for &(i, j) in anchors.iter().chain(std::iter::once(&(n, m))) {
        if i - i0 == j - j0 {
            out.extend((0..i - i0).map(|k| (i0 + k, j0 + k)));
        }
        if i < n {
            out.push((i, j));
        }
        (i0, j0) = (i + 1, j + 1);
    }
    out
}

pub fn align(orig: &TokenSequence, out: &TokenSequence) -> Alignment {
    align_norms(&orig.norms(), &out.norms())
}

/// Like [`align`], but a pair scores the best of the original word and
/// its expected forms (`expected[k][i]` for original position `i`), so an
/// output equal to an expected sequence aligns position by position.
pub fn align_guided(orig: &TokenSequence, out: &TokenSequence, expected: &[TokenSequence]) -> Alignment {
    let score: Vec<Vec<i32>> = orig
        .iter()
        .enumerate()
        .map(|(i, a)| {
            out.iter()
                .map(|b| {
                    let forms = std::iter::once(a).chain(expected.iter().map(|e| &e.tokens[i]));
                    forms.map(|f| pair_score(&f.norm, &b.norm)).max().unwrap_or(MISMATCH).max(0)
                })
                .collect()
        })
        .collect();
    align_scores(&score, orig.len(), out.len())
}

/// Hit and total counts behind one percentage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub hits: usize,
    pub total: usize,
}

impl Ratio {
    pub fn pct(self) -> Option<f64> {
        (self.total > 0).then(|| 100.0 * self.hits as f64 / self.total as f64)
    }

    fn add(&mut self, other: Ratio) {
        self.hits += other.hits;
        self.total += other.total;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StopwordScores {
    pub sw: Ratio,
    pub nsw: Ratio,
    /// Norms of removed tokens outside the inventory.
    pub removed_non_stopwords: Vec<String>,
}

impl StopwordScores {
    /// 100 for a document without inventory words where nothing was
    /// removed; undefined (skipped) when such a document lost words.
    pub fn sw_pct(&self) -> Option<f64> {
        match self.sw.pct() {
            Some(p) => Some(p),
            None if self.nsw.hits == 0 => Some(100.0),
            None => None,
        }
    }

    pub fn nsw_pct(&self) -> Option<f64> {
        self.nsw.pct()
    }
}

/// Recall-style stopword rates over word tokens: share of inventory words
/// removed and share of other words removed.
pub fn stopword_counts(orig: &TokenSequence, out: &TokenSequence, inv: &StopwordInventory) -> StopwordScores {
    let alignment = align(orig, out);
    let mut removed = vec![false; orig.len()];
    for &i in &alignment.removed {
        removed[i] = true;
    }
    let mut scores = StopwordScores::default();
    for (t, &gone) in orig.iter().zip(&removed) {
        let ratio = if inv.contains(&t.norm) { &mut scores.sw } else { &mut scores.nsw };
        ratio.total += 1;
        if gone {
            ratio.hits += 1;
            if !inv.contains(&t.norm) {
                scores.removed_non_stopwords.push(t.norm.clone());
            }
        }
    }
    scores
}

/// `(sw_pct, nsw_pct)` for one document; `None` marks an undefined rate.
pub fn stopword_metrics(orig: &TokenSequence, out: &TokenSequence, inv: &StopwordInventory) -> (Option<f64>, Option<f64>) {
    let s = stopword_counts(orig, out, inv);
    (s.sw_pct(), s.nsw_pct())
}

fn expected_hits(orig: &TokenSequence, out: &TokenSequence, expected: &TokenSequence) -> Ratio {
    let map = align_guided(orig, out, std::slice::from_ref(expected)).out_for(orig.len());
    let hits = map
        .iter()
        .zip(expected.iter())
        .filter(|(j, e)| j.is_some_and(|j| out.tokens[j].norm == e.norm))
        .count();
    Ratio { hits, total: orig.len() }
}

pub fn lemma_counts(orig: &TokenSequence, out: &TokenSequence, table: &LemmaTable) -> Ratio {
    expected_hits(orig, out, &lemmatize(orig, table))
}

/// Share of original words whose aligned output equals the classic lemma;
/// dropped words count as misses.
pub fn lemma_agreement(orig: &TokenSequence, out: &TokenSequence, table: &LemmaTable) -> Option<f64> {
    lemma_counts(orig, out, table).pct()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StemCounts {
    pub per_algo: BTreeMap<String, Ratio>,
    pub any: Ratio,
}

pub fn stem_counts(orig: &TokenSequence, out: &TokenSequence, algos: &[Stemmer]) -> StemCounts {
    let expected: Vec<TokenSequence> = algos.iter().map(|&a| stem_sequence(orig, a)).collect();
    let map = align_guided(orig, out, &expected).out_for(orig.len());
    let mut counts = StemCounts {
        any: Ratio { hits: 0, total: orig.len() },
        ..Default::default()
    };
    let mut hit_any = vec![false; orig.len()];
    for (algo, exp) in algos.iter().zip(&expected) {
        let mut r = Ratio { hits: 0, total: orig.len() };
        for (i, j) in map.iter().enumerate() {
            if j.is_some_and(|j| out.tokens[j].norm == exp.tokens[i].norm) {
                r.hits += 1;
                hit_any[i] = true;
            }
        }
        counts.per_algo.insert(algo.label().to_string(), r);
    }
    counts.any.hits = hit_any.iter().filter(|&&h| h).count();
    counts
}

/// Per-algorithm and "any" stem agreement percentages.
pub fn stem_agreement(orig: &TokenSequence, out: &TokenSequence, algos: &[Stemmer]) -> (BTreeMap<String, f64>, Option<f64>) {
    let c = stem_counts(orig, out, algos);
    let per = c.per_algo.iter().filter_map(|(k, r)| r.pct().map(|p| (k.clone(), p))).collect();
    (per, c.any.pct())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Mean of per-document percentages.
    #[default]
    Macro,
    /// Percentages of pooled counts.
    Micro,
}

/// One document's original text and the outputs of the single-operation
/// runs being compared (any may be absent).
#[derive(Debug, Clone, Default)]
pub struct DocOutputs {
    pub id: String,
    pub orig: TokenSequence,
    pub stopwords: Option<TokenSequence>,
    pub lemma: Option<TokenSequence>,
    pub stem: Option<TokenSequence>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DocAgreement {
    pub id: String,
    pub sw: Option<f64>,
    pub nsw: Option<f64>,
    pub l: Option<f64>,
    pub s: BTreeMap<String, f64>,
    pub s_any: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub docs: usize,
    pub averaging: Averaging,
    pub sw_pct: Option<f64>,
    pub nsw_pct: Option<f64>,
    pub l_pct: Option<f64>,
    pub s_pct: BTreeMap<String, f64>,
    pub s_any_pct: Option<f64>,
    pub top_removed_non_stopwords: Vec<(String, usize)>,
    pub stem_consistency: f64,
    /// Set when no word type occurred twice, so consistency is vacuous.
    pub stem_consistency_vacuous: bool,
    pub per_document: Vec<DocAgreement>,
}

#[derive(Debug, Clone, Copy)]
pub struct AgreementOptions {
    pub filter: WordFilter,
    pub averaging: Averaging,
    pub top_k: usize,
}

impl Default for AgreementOptions {
    fn default() -> Self {
        AgreementOptions {
            filter: WordFilter::default(),
            averaging: Averaging::Macro,
            top_k: 20,
        }
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Removed non-inventory words, most frequent first (ties by norm).
pub fn top_removed(removed: &[String], k: usize) -> Vec<(String, usize)> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for r in removed {
        *counts.entry(r).or_insert(0) += 1;
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().map(|(w, c)| (w.to_string(), c)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked
}

/// Share of repeated word types whose aligned stem output is the same at
/// every occurrence (a dropped occurrence counts as its own outcome).
/// Returns `(1.0, true)` when no type repeats. Alignment is guided by the
/// stems of `algos`, as in the S metrics.
pub fn stem_consistency(pairs: &[(TokenSequence, TokenSequence)], algos: &[Stemmer]) -> (f64, bool) {
    let mut outcomes: BTreeMap<String, (usize, Vec<Option<String>>)> = BTreeMap::new();
    for (orig, out) in pairs {
        let expected: Vec<TokenSequence> = algos.iter().map(|&a| stem_sequence(orig, a)).collect();
        let map = align_guided(orig, out, &expected).out_for(orig.len());
        for (t, j) in orig.iter().zip(map) {
            let entry = outcomes.entry(t.norm.clone()).or_default();
            entry.0 += 1;
            let outcome = j.map(|j| out.tokens[j].norm.clone());
            if !entry.1.contains(&outcome) {
                entry.1.push(outcome);
            }
        }
    }
    let repeated: Vec<_> = outcomes.values().filter(|(n, _)| *n >= 2).collect();
    if repeated.is_empty() {
        return (1.0, true);
    }
    let consistent = repeated.iter().filter(|(_, o)| o.len() == 1).count();
    (consistent as f64 / repeated.len() as f64, false)
}

/// Corpus-level agreement for one (language, backend, prompt language).
pub fn agreement_report(
    docs: &[DocOutputs],
    inv: &StopwordInventory,
    table: &LemmaTable,
    stemmers: &[Stemmer],
    opts: &AgreementOptions,
) -> AgreementReport {
    let words = |s: &TokenSequence| opts.filter.apply(s);
    let mut per_document = Vec::with_capacity(docs.len());
    let mut pooled_sw = StopwordScores::default();
    let mut pooled_l = Ratio::default();
    let mut pooled_s = StemCounts::default();
    let mut removed_all = Vec::new();
    let mut stem_pairs = Vec::new();

    for d in docs {
        let orig = words(&d.orig);
        let mut row = DocAgreement {
            id: d.id.clone(),
            ..Default::default()
        };
        if let Some(out) = &d.stopwords {
            let s = stopword_counts(&orig, &words(out), inv);
            row.sw = s.sw_pct();
            row.nsw = s.nsw_pct();
            pooled_sw.sw.add(s.sw);
            pooled_sw.nsw.add(s.nsw);
            removed_all.extend(s.removed_non_stopwords);
        }
        if let Some(out) = &d.lemma {
            let r = lemma_counts(&orig, &words(out), table);
            row.l = r.pct();
            pooled_l.add(r);
        }
        if let Some(out) = &d.stem {
            let out = words(out);
            let c = stem_counts(&orig, &out, stemmers);
            row.s = c.per_algo.iter().filter_map(|(k, r)| r.pct().map(|p| (k.clone(), p))).collect();
            row.s_any = c.any.pct();
            for (k, r) in &c.per_algo {
                pooled_s.per_algo.entry(k.clone()).or_default().add(*r);
            }
            pooled_s.any.add(c.any);
            stem_pairs.push((orig.clone(), out));
        }
        per_document.push(row);
    }

    let (sw_pct, nsw_pct, l_pct, s_pct, s_any_pct) = match opts.averaging {
        Averaging::Macro => {
            let mut s_pct = BTreeMap::new();
            for algo in stemmers {
                let label = algo.label();
                if let Some(m) = mean(per_document.iter().filter_map(|r| r.s.get(label).copied())) {
                    s_pct.insert(label.to_string(), m);
                }
            }
            (
                mean(per_document.iter().filter_map(|r| r.sw)),
                mean(per_document.iter().filter_map(|r| r.nsw)),
                mean(per_document.iter().filter_map(|r| r.l)),
                s_pct,
                mean(per_document.iter().filter_map(|r| r.s_any)),
            )
        }
        Averaging::Micro => (
            pooled_sw.sw_pct(),
            pooled_sw.nsw_pct(),
            pooled_l.pct(),
            pooled_s.per_algo.iter().filter_map(|(k, r)| r.pct().map(|p| (k.clone(), p))).collect(),
            pooled_s.any.pct(),
        ),
    };
    let (consistency, vacuous) = stem_consistency(&stem_pairs, stemmers);

    AgreementReport {
        docs: docs.len(),
        averaging: opts.averaging,
        sw_pct,
        nsw_pct,
        l_pct,
        s_pct,
        s_any_pct,
        top_removed_non_stopwords: top_removed(&removed_all, opts.top_k),
        stem_consistency: consistency,
        stem_consistency_vacuous: vacuous,
        per_document,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scores() {
        assert_eq!(pair_score("go", "going"), PREFIX);
        assert_eq!(pair_score("g", "going"), MISMATCH);
        assert_eq!(pair_score("happy", "happi"), SIMILAR);
        assert_eq!(pair_score("is", "be"), MISMATCH);
        assert_eq!(levenshtein(&['a', 'b'], &['b']), 1);
    }

    #[test]
    fn he_is_going() {
        let a = align_norms(&["he", "is", "going"], &["he", "be", "go"]);
        assert_eq!(a.pairs, vec![(0, 0), (1, 1), (2, 2)]);
        assert!(a.removed.is_empty() && a.inserted.is_empty());
        assert_eq!(alignment_score(&["he", "is", "going"], &["he", "be", "go"], &a), 5);
        let b = align_norms(&["is", "being"], &["be", "be"]);
        assert_eq!(b.pairs, vec![(0, 0), (1, 1)]);
        let c = align_norms(&["the", "happy"], &["sad"]);
        assert!(c.pairs.is_empty());
    }
}

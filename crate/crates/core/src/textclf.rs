//! Bag-of-words TF-IDF features and three classifiers (multinomial naive
//! Bayes, softmax logistic regression, CART) scored with micro-F1.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, Split};
use crate::Language;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum TextClfError {
    #[error("cannot fit a vectorizer on an empty corpus")]
    EmptyCorpus,
    #[error("training data holds a single class ({0:?}); need at least two")]
    SingleClass(String),
    #[error("length mismatch: {0} labels vs {1} predictions")]
    LengthMismatch(usize, usize),
    #[error("no predictions to score")]
    Empty,
    #[error("empty hyperparameter grid")]
    EmptyGrid,
    #[error("invalid vectorizer config: {0}")]
    InvalidConfig(String),
    #[error("model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported model format version {0}")]
    FormatVersion(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VectorizerConfig {
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub max_features: usize,
}

impl Default for VectorizerConfig {
    fn default() -> Self {
        VectorizerConfig {
            ngram_min: 1,
            ngram_max: 1,
            max_features: 20_000,
        }
    }
}

impl VectorizerConfig {
    pub fn validate(&self) -> Result<(), TextClfError> {
        if !(1 <= self.ngram_min && self.ngram_min <= self.ngram_max && self.ngram_max <= 3) {
            return Err(TextClfError::InvalidConfig(format!(
                "need 1 <= ngram_min <= ngram_max <= 3, got {}..{}",
                self.ngram_min, self.ngram_max
            )));
        }
        if self.max_features == 0 {
            return Err(TextClfError::InvalidConfig("max_features must be >= 1".into()));
        }
        Ok(())
    }
}

/// All n-grams of the given lengths, joined with `_`.
pub fn ngrams<S: AsRef<str>>(tokens: &[S], min: usize, max: usize) -> Vec<String> {
    let mut out = Vec::new();
    for n in min..=max {
        for w in tokens.windows(n) {
            out.push(w.iter().map(AsRef::as_ref).collect::<Vec<_>>().join("_"));
        }
    }
    out
}

/// Sparse vector: `(column, value)` sorted by column.
pub type SparseVec = Vec<(usize, f64)>;

pub fn l2_norm(v: &SparseVec) -> f64 {
    v.iter().map(|(_, x)| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub config: VectorizerConfig,
    /// Column order: lexicographic.
    pub terms: Vec<String>,
    pub df: Vec<usize>,
    pub idf: Vec<f64>,
    pub n_docs: usize,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Vocabulary {
    fn reindex(&mut self) {
        self.index = self.terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn column(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }
}

/// Keeps the `max_features` n-grams with the highest total count (ties in
/// lexicographic order) and computes smooth idf,
/// `ln((1 + N) / (1 + df)) + 1`.
pub fn fit_vectorizer<S: AsRef<str>>(docs: &[Vec<S>], config: VectorizerConfig) -> Result<Vocabulary, TextClfError> {
    config.validate()?;
    if docs.iter().all(|d| d.is_empty()) {
        return Err(TextClfError::EmptyCorpus);
    }
    let mut counts: HashMap<String, (usize, usize)> = HashMap::new();
    for doc in docs {
        let grams = ngrams(doc, config.ngram_min, config.ngram_max);
        let mut seen = BTreeSet::new();
        for g in grams {
            let e = counts.entry(g.clone()).or_insert((0, 0));
            e.0 += 1;
            if seen.insert(g) {
                e.1 += 1;
            }
        }
    }
    let mut ranked: Vec<(String, (usize, usize))> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1 .0.cmp(&a.1 .0).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(config.max_features);
    ranked.sort_by(|a, b| a.0.cmp(&b.0));

    let n = docs.len();
    let mut vocab = Vocabulary {
        config,
        idf: ranked.iter().map(|(_, (_, df))| ((1.0 + n as f64) / (1.0 + *df as f64)).ln() + 1.0).collect(),
        df: ranked.iter().map(|(_, (_, df))| *df).collect(),
        terms: ranked.into_iter().map(|(t, _)| t).collect(),
        n_docs: n,
        index: HashMap::new(),
    };
    vocab.reindex();
    Ok(vocab)
}

/// Raw counts times idf, L2-normalized; unknown n-grams are ignored.
pub fn transform<S: AsRef<str>>(doc: &[S], vocab: &Vocabulary) -> SparseVec {
    let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
    for g in ngrams(doc, vocab.config.ngram_min, vocab.config.ngram_max) {
        if let Some(c) = vocab.column(&g) {
            *tf.entry(c).or_insert(0.0) += 1.0;
        }
    }
    let v: SparseVec = tf.into_iter().map(|(c, n)| (c, n * vocab.idf[c])).collect();
    normalize_l2(v)
}

pub fn normalize_l2(v: SparseVec) -> SparseVec {
    let norm = l2_norm(&v);
    if norm == 0.0 {
        return Vec::new();
    }
    v.into_iter().map(|(c, x)| (c, x / norm)).collect()
}

/// Feature vectors with class indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Vec<SparseVec>,
    pub y: Vec<usize>,
    /// Class names, sorted; `y` indexes into this.
    pub classes: Vec<String>,
    pub dim: usize,
}

impl Dataset {
    pub fn new<S: AsRef<str>>(x: Vec<SparseVec>, labels: &[S], dim: usize) -> Self {
        let classes: Vec<String> = labels.iter().map(|l| l.as_ref().to_string()).collect::<BTreeSet<_>>().into_iter().collect();
        let y = labels.iter().map(|l| classes.binary_search_by(|c| c.as_str().cmp(l.as_ref())).expect("class listed")).collect();
        Dataset { x, y, classes, dim }
    }

    pub fn from_dense<S: AsRef<str>>(rows: &[Vec<f64>], labels: &[S]) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        let x = rows
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (i, *v)).collect())
            .collect();
        Dataset::new(x, labels, dim)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    fn require_two_classes(&self) -> Result<(), TextClfError> {
        if self.classes.len() < 2 {
            return Err(TextClfError::SingleClass(self.classes.first().cloned().unwrap_or_default()));
        }
        Ok(())
    }
}

fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    pub classes: Vec<String>,
    pub log_prior: Vec<f64>,
    /// `[class][feature]` log probabilities.
    pub log_likelihood: Vec<Vec<f64>>,
}

/// Multinomial naive Bayes over feature weights with additive smoothing.
pub fn train_nb(data: &Dataset, alpha: f64) -> Result<NaiveBayes, TextClfError> {
    data.require_two_classes()?;
    let k = data.classes.len();
    let mut class_n = vec![0usize; k];
    let mut feature = vec![vec![0.0; data.dim]; k];
    for (x, &y) in data.x.iter().zip(&data.y) {
        class_n[y] += 1;
        for &(c, v) in x {
            feature[y][c] += v;
        }
    }
    let n = data.len() as f64;
    let log_likelihood = feature
        .into_iter()
        .map(|f| {
            let total: f64 = f.iter().sum::<f64>() + alpha * data.dim as f64;
            f.into_iter().map(|c| ((c + alpha) / total).ln()).collect()
        })
        .collect();
    Ok(NaiveBayes {
        classes: data.classes.clone(),
        log_prior: class_n.iter().map(|&c| (c as f64 / n).ln()).collect(),
        log_likelihood,
    })
}

impl NaiveBayes {
    pub fn predict(&self, x: &SparseVec) -> usize {
        let scores: Vec<f64> = (0..self.classes.len())
            .map(|k| self.log_prior[k] + x.iter().map(|&(c, v)| v * self.log_likelihood[k][c]).sum::<f64>())
            .collect();
        argmax(&scores)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRegParams {
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams {
            lambda: 0.01,
            tol: 1e-4,
            max_iter: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogReg {
    pub classes: Vec<String>,
    pub dim: usize,
    /// Row-major `[class][feature]`, bias in the last column.
    pub weights: Vec<f64>,
    pub iterations: usize,
}

fn logits(w: &[f64], x: &SparseVec, k: usize, stride: usize) -> Vec<f64> {
    (0..k)
        .map(|c| {
            let row = &w[c * stride..(c + 1) * stride];
            row[stride - 1] + x.iter().map(|&(j, v)| row[j] * v).sum::<f64>()
        })
        .collect()
}

fn softmax(z: &mut [f64]) {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

/// Mean cross-entropy plus `lambda / 2 * ||W||^2` (bias not penalized) and
/// its gradient, for weights laid out as in [`LogReg::weights`].
pub fn loss_and_grad(w: &[f64], data: &Dataset, lambda: f64) -> (f64, Vec<f64>) {
    let k = data.classes.len();
    let stride = data.dim + 1;
    let n = data.len().max(1) as f64;
    let mut grad = vec![0.0; w.len()];
    let mut loss = 0.0;
    for (x, &y) in data.x.iter().zip(&data.y) {
        let z = logits(w, x, k, stride);
        let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        loss += lse - z[y];
        let mut p = z;
        softmax(&mut p);
        p[y] -= 1.0;
        for c in 0..k {
            let row = &mut grad[c * stride..(c + 1) * stride];
            for &(j, v) in x {
                row[j] += p[c] * v / n;
            }
            row[stride - 1] += p[c] / n;
        }
    }
    loss /= n;
    for c in 0..k {
        for j in 0..data.dim {
            let i = c * stride + j;
            loss += 0.5 * lambda * w[i] * w[i];
            grad[i] += lambda * w[i];
        }
    }
    (loss, grad)
}

/// Softmax regression by full-batch gradient descent from zero weights,
/// step `1 / L` with `L = max ||[x, 1]||^2 / 2 + lambda`, until the
/// gradient norm drops below `tol` or `max_iter` steps.
pub fn train_logreg(data: &Dataset, params: LogRegParams) -> Result<LogReg, TextClfError> {
    data.require_two_classes()?;
    let k = data.classes.len();
    let stride = data.dim + 1;
    let max_sq = data.x.iter().map(|x| l2_norm(x).powi(2) + 1.0).fold(1.0, f64::max);
    let step = 1.0 / (0.5 * max_sq + params.lambda);
    let mut w = vec![0.0; k * stride];
    let mut iterations = 0;
    while iterations < params.max_iter {
        let (_, g) = loss_and_grad(&w, data, params.lambda);
        if g.iter().map(|v| v * v).sum::<f64>().sqrt() < params.tol {
            break;
        }
        for (wi, gi) in w.iter_mut().zip(&g) {
            *wi -= step * gi;
        }
        iterations += 1;
    }
    Ok(LogReg {
        classes: data.classes.clone(),
        dim: data.dim,
        weights: w,
        iterations,
    })
}

impl LogReg {
    pub fn predict(&self, x: &SparseVec) -> usize {
        argmax(&logits(&self.weights, x, self.classes.len(), self.dim + 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf { class: usize, counts: Vec<usize> },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub classes: Vec<String>,
    /// Root first.
    pub nodes: Vec<Node>,
}

fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

fn feature_value(x: &SparseVec, f: usize) -> f64 {
    x.binary_search_by_key(&f, |&(c, _)| c).map(|i| x[i].1).unwrap_or(0.0)
}

struct TreeBuilder<'a> {
    data: &'a Dataset,
    params: TreeParams,
    nodes: Vec<Node>,
}

impl TreeBuilder<'_> {
    fn counts(&self, samples: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.data.classes.len()];
        for &s in samples {
            counts[self.data.y[s]] += 1;
        }
        counts
    }

    /// Best `(feature, threshold)` by Gini gain; ties keep the lowest
    /// feature, then the lowest threshold. Zero-gain splits are allowed.
    fn best_split(&self, samples: &[usize], counts: &[usize]) -> Option<(usize, f64)> {
        let n = samples.len();
        let k = counts.len();
        let parent = gini(counts, n);
        let mut columns: BTreeMap<usize, Vec<(f64, usize)>> = BTreeMap::new();
        for &s in samples {
            for &(c, v) in &self.data.x[s] {
                if v != 0.0 {
                    columns.entry(c).or_default().push((v, self.data.y[s]));
                }
            }
        }
        let leaf = self.params.min_samples_leaf.max(1);
        let mut best: Option<(f64, usize, f64)> = None;
        for (feature, mut entries) in columns {
            let mut zero = counts.to_vec();
            for &(_, y) in &entries {
                zero[y] -= 1;
            }
            let zeros = zero.iter().sum::<usize>();
            entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            // `None` stands for the block of all samples with value 0
            let mut blocks: Vec<(f64, Option<usize>)> = entries.iter().map(|&(v, y)| (v, Some(y))).collect();
            if zeros > 0 {
                let at = entries.partition_point(|&(v, _)| v < 0.0);
                blocks.insert(at, (0.0, None));
            }
            let mut left = vec![0usize; k];
            let mut nl = 0;
            for i in 0..blocks.len() - 1 {
                match blocks[i].1 {
                    Some(y) => {
                        left[y] += 1;
                        nl += 1;
                    }
                    None => {
                        left.iter_mut().zip(&zero).for_each(|(l, z)| *l += z);
                        nl += zeros;
                    }
                }
                let (v, next) = (blocks[i].0, blocks[i + 1].0);
                if v == next {
                    continue;
                }
                let nr = n - nl;
                if nl < leaf || nr < leaf {
                    continue;
                }
                let right: Vec<usize> = counts.iter().zip(&left).map(|(c, l)| c - l).collect();
                let weighted = (nl as f64 * gini(&left, nl) + nr as f64 * gini(&right, nr)) / n as f64;
                let gain = parent - weighted;
                if best.is_none_or(|(g, _, _)| gain > g + 1e-12) {
                    best = Some((gain, feature, (v + next) / 2.0));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }

    fn grow(&mut self, samples: Vec<usize>, depth: usize) -> usize {
        let counts = self.counts(&samples);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            class: majority(&counts),
            counts: counts.clone(),
        });
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_ok = self.params.max_depth.is_none_or(|d| depth < d);
        if pure || !depth_ok || samples.len() < self.params.min_samples_split.max(2) {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(&samples, &counts) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = samples
            .into_iter()
            .partition(|&s| feature_value(&self.data.x[s], feature) <= threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

/// CART with Gini impurity; `x[feature] <= threshold` goes left. Leaves
/// predict the majority class, ties to the lowest class index.
pub fn train_tree(data: &Dataset, params: TreeParams) -> Result<DecisionTree, TextClfError> {
    data.require_two_classes()?;
    let mut builder = TreeBuilder {
        data,
        params,
        nodes: Vec::new(),
    };
    builder.grow((0..data.len()).collect(), 0);
    Ok(DecisionTree {
        classes: data.classes.clone(),
        nodes: builder.nodes,
    })
}

impl DecisionTree {
    pub fn predict(&self, x: &SparseVec) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { class, .. } => return *class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if feature_value(x, *feature) <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    NaiveBayes(NaiveBayes),
    LogReg(LogReg),
    Tree(DecisionTree),
}

impl Model {
    pub fn classes(&self) -> &[String] {
        match self {
            Model::NaiveBayes(m) => &m.classes,
            Model::LogReg(m) => &m.classes,
            Model::Tree(m) => &m.classes,
        }
    }

    pub fn predict_index(&self, x: &SparseVec) -> usize {
        match self {
            Model::NaiveBayes(m) => m.predict(x),
            Model::LogReg(m) => m.predict(x),
            Model::Tree(m) => m.predict(x),
        }
    }

    pub fn predict(&self, x: &SparseVec) -> &str {
        &self.classes()[self.predict_index(x)]
    }
}

/// Versioned JSON artifact: a vocabulary and a model trained on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub vocabulary: Vocabulary,
    pub model: Model,
}

impl ModelFile {
    pub fn new(vocabulary: Vocabulary, model: Model) -> Self {
        ModelFile {
            format_version: FORMAT_VERSION,
            vocabulary,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String, TextClfError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, TextClfError> {
        let mut f: ModelFile = serde_json::from_str(s)?;
        if f.format_version != FORMAT_VERSION {
            return Err(TextClfError::FormatVersion(f.format_version));
        }
        f.vocabulary.reindex();
        Ok(f)
    }
}

/// Micro-averaged F1 over pooled true/false positives and false negatives.
pub fn micro_f1<T: Eq + Hash>(y_true: &[T], y_pred: &[T]) -> Result<f64, TextClfError> {
    if y_true.len() != y_pred.len() {
        return Err(TextClfError::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.is_empty() {
        return Err(TextClfError::Empty);
    }
    let mut tp = 0usize;
    let mut fp: HashMap<&T, usize> = HashMap::new();
    let mut fn_: HashMap<&T, usize> = HashMap::new();
    for (t, p) in y_true.iter().zip(y_pred) {
        if t == p {
            tp += 1;
        } else {
            *fp.entry(p).or_insert(0) += 1;
            *fn_.entry(t).or_insert(0) += 1;
        }
    }
    let fp: usize = fp.values().sum();
    let fn_: usize = fn_.values().sum();
    Ok(2.0 * tp as f64 / (2 * tp + fp + fn_) as f64)
}

pub fn accuracy<T: Eq>(y_true: &[T], y_pred: &[T]) -> f64 {
    let hits = y_true.iter().zip(y_pred).filter(|(a, b)| a == b).count();
    hits as f64 / y_true.len().max(1) as f64
}

/// Frozen hyperparameters used for every backend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunedParams {
    pub vectorizer: VectorizerConfig,
    pub alpha: f64,
    pub lambda: f64,
    /// 0 means unlimited.
    pub tree_depth: usize,
}

impl Default for TunedParams {
    fn default() -> Self {
        TunedParams {
            vectorizer: VectorizerConfig::default(),
            alpha: 1.0,
            lambda: 0.01,
            tree_depth: 0,
        }
    }
}

fn depth_limit(depth: usize) -> Option<usize> {
    (depth > 0).then_some(depth)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    pub micro_f1: f64,
    /// `[true][predicted]` counts over `EvalResult::classes`.
    pub confusion: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub classes: Vec<String>,
    pub naive_bayes: ModelScore,
    pub logreg: ModelScore,
    pub tree: ModelScore,
    pub average: f64,
}

fn score_model(model: &Model, x: &[SparseVec], labels: &[String], classes: &[String]) -> Result<ModelScore, TextClfError> {
    let preds: Vec<String> = x.iter().map(|v| model.predict(v).to_string()).collect();
    let idx = |l: &str| classes.iter().position(|c| c == l);
    let mut confusion = vec![vec![0; classes.len()]; classes.len()];
    for (t, p) in labels.iter().zip(&preds) {
        if let (Some(t), Some(p)) = (idx(t), idx(p)) {
            confusion[t][p] += 1;
        }
    }
    Ok(ModelScore {
        micro_f1: micro_f1(labels, &preds)?,
        confusion,
    })
}

/// Trained vectorizer and the three models.
#[derive(Debug, Clone)]
pub struct Trained {
    pub vocabulary: Vocabulary,
    pub naive_bayes: Model,
    pub logreg: Model,
    pub tree: Model,
}

/// Fits the vectorizer on `train` and trains the three models in parallel.
pub fn train_all(train: &[Vec<String>], labels: &[String], params: &TunedParams) -> Result<Trained, TextClfError> {
    let vocabulary = fit_vectorizer(train, params.vectorizer)?;
    let x: Vec<SparseVec> = train.iter().map(|d| transform(d, &vocabulary)).collect();
    let data = Dataset::new(x, labels, vocabulary.len());
    data.require_two_classes()?;
    let (nb, lr, tree) = std::thread::scope(|s| {
        let nb = s.spawn(|| train_nb(&data, params.alpha).map(Model::NaiveBayes));
        let lr = s.spawn(|| {
            train_logreg(
                &data,
                LogRegParams {
                    lambda: params.lambda,
                    ..Default::default()
                },
            )
            .map(Model::LogReg)
        });
        let tree = s.spawn(|| {
            train_tree(
                &data,
                TreeParams {
                    max_depth: depth_limit(params.tree_depth),
                    ..Default::default()
                },
            )
            .map(Model::Tree)
        });
        (
            nb.join().expect("naive bayes thread"),
            lr.join().expect("logreg thread"),
            tree.join().expect("tree thread"),
        )
    });
    Ok(Trained {
        vocabulary,
        naive_bayes: nb?,
        logreg: lr?,
        tree: tree?,
    })
}

/// Trains on `train`, scores on `test`, averages the three micro-F1 values.
pub fn evaluate(
    train: &[Vec<String>],
    train_labels: &[String],
    test: &[Vec<String>],
    test_labels: &[String],
    params: &TunedParams,
) -> Result<EvalResult, TextClfError> {
    let trained = train_all(train, train_labels, params)?;
    let x: Vec<SparseVec> = test.iter().map(|d| transform(d, &trained.vocabulary)).collect();
    let classes: Vec<String> = train_labels.iter().chain(test_labels).cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let nb = score_model(&trained.naive_bayes, &x, test_labels, &classes)?;
    let lr = score_model(&trained.logreg, &x, test_labels, &classes)?;
    let tree = score_model(&trained.tree, &x, test_labels, &classes)?;
    Ok(EvalResult {
        average: (nb.micro_f1 + lr.micro_f1 + tree.micro_f1) / 3.0,
        classes,
        naive_bayes: nb,
        logreg: lr,
        tree,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Grid {
    /// `[min, max]` n-gram ranges.
    pub ngram_ranges: Vec<(usize, usize)>,
    pub max_features: Vec<usize>,
    pub alpha: Vec<f64>,
    pub lambda: Vec<f64>,
    /// 0 means unlimited.
    pub tree_depth: Vec<usize>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            ngram_ranges: vec![(1, 1), (1, 2)],
            max_features: vec![5_000, 20_000, 50_000],
            alpha: vec![0.5, 1.0],
            lambda: vec![0.01, 0.1],
            tree_depth: vec![10, 25, 0],
        }
    }
}

impl Grid {
    /// Vectorizer configs in tie-break order: fewest features first, then
    /// the narrowest n-gram range.
    pub fn vectorizer_configs(&self) -> Vec<VectorizerConfig> {
        let mut configs: Vec<VectorizerConfig> = self
            .max_features
            .iter()
            .flat_map(|&f| {
                self.ngram_ranges.iter().map(move |&(lo, hi)| VectorizerConfig {
                    ngram_min: lo,
                    ngram_max: hi,
                    max_features: f,
                })
            })
            .collect();
        configs.sort_by_key(|c| (c.max_features, c.ngram_max - c.ngram_min, c.ngram_max, c.ngram_min));
        configs.dedup();
        configs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneTrial {
    pub vectorizer: VectorizerConfig,
    pub alpha: f64,
    pub lambda: f64,
    pub tree_depth: usize,
    pub naive_bayes: f64,
    pub logreg: f64,
    pub tree: f64,
    pub average: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub best: TunedParams,
    pub validation_f1: f64,
    /// Best trial per vectorizer config, in search order.
    pub trials: Vec<TuneTrial>,
}

fn best_of<T: Copy>(options: &[T], mut score: impl FnMut(T) -> Result<f64, TextClfError>) -> Result<(T, f64), TextClfError> {
    let mut best: Option<(T, f64)> = None;
    for &o in options {
        let s = score(o)?;
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((o, s));
        }
    }
    best.ok_or(TextClfError::EmptyGrid)
}

/// Grid search on a validation set. For each vectorizer config the best
/// alpha, lambda and depth are chosen independently; the config with the
/// highest averaged micro-F1 wins, earlier configs winning ties.
pub fn tune(
    train: &[Vec<String>],
    train_labels: &[String],
    validation: &[Vec<String>],
    validation_labels: &[String],
    grid: &Grid,
) -> Result<TuneResult, TextClfError> {
    if validation.is_empty() {
        return Err(TextClfError::Empty);
    }
    let configs = grid.vectorizer_configs();
    if configs.is_empty() || grid.alpha.is_empty() || grid.lambda.is_empty() || grid.tree_depth.is_empty() {
        return Err(TextClfError::EmptyGrid);
    }
    let mut trials = Vec::new();
    let mut best: Option<TuneTrial> = None;
    for vectorizer in configs {
        let vocab = fit_vectorizer(train, vectorizer)?;
        let data = Dataset::new(train.iter().map(|d| transform(d, &vocab)).collect(), train_labels, vocab.len());
        data.require_two_classes()?;
        let xv: Vec<SparseVec> = validation.iter().map(|d| transform(d, &vocab)).collect();
        let f1 = |m: &Model| -> Result<f64, TextClfError> {
            let preds: Vec<String> = xv.iter().map(|v| m.predict(v).to_string()).collect();
            micro_f1(validation_labels, &preds)
        };
        let (alpha, nb) = best_of(&grid.alpha, |a| f1(&Model::NaiveBayes(train_nb(&data, a)?)))?;
        let (lambda, lr) = best_of(&grid.lambda, |l| {
            f1(&Model::LogReg(train_logreg(
                &data,
                LogRegParams {
                    lambda: l,
                    ..Default::default()
                },
            )?))
        })?;
        let (tree_depth, tree) = best_of(&grid.tree_depth, |d| {
            f1(&Model::Tree(train_tree(
                &data,
                TreeParams {
                    max_depth: depth_limit(d),
                    ..Default::default()
                },
            )?))
        })?;
        let trial = TuneTrial {
            vectorizer,
            alpha,
            lambda,
            tree_depth,
            naive_bayes: nb,
            logreg: lr,
            tree,
            average: (nb + lr + tree) / 3.0,
        };
        if best.as_ref().is_none_or(|b| trial.average > b.average) {
            best = Some(trial.clone());
        }
        trials.push(trial);
    }
    let best = best.ok_or(TextClfError::EmptyGrid)?;
    Ok(TuneResult {
        best: TunedParams {
            vectorizer: best.vectorizer,
            alpha: best.alpha,
            lambda: best.lambda,
            tree_depth: best.tree_depth,
        },
        validation_f1: best.average,
        trials,
    })
}

const FILLER: &[&str] = &[
    "the", "a", "is", "was", "and", "of", "to", "in", "it", "not", "this", "that", "with", "for", "on", "today", "people",
    "time", "really", "just", "going", "things", "think", "new", "day", "world", "week", "saw", "said", "made",
];

/// Two-class English corpus where every class `A` document contains
/// `alpha` and every class `B` document contains `bravo`, padded with
/// shared filler words. Labels alternate, so classes are balanced.
pub fn synthetic_separable_corpus(n_docs: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let docs = (0..n_docs)
        .map(|i| {
            let (label, marker) = if i % 2 == 0 { ("A", "alpha") } else { ("B", "bravo") };
            let len = rng.gen_range(6..12);
            let mut words: Vec<&str> = (0..len).map(|_| *FILLER.choose(&mut rng).expect("filler")).collect();
            let at = rng.gen_range(0..=words.len());
            words.insert(at, marker);
            Document {
                id: format!("synthetic:{}", i + 1),
                text: words.join(" "),
                label: label.to_string(),
                language: Language::English,
                split: Split::Unassigned,
            }
        })
        .collect();
    Corpus::new(docs)
}

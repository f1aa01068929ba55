use super::{
    argmax, hoeffding_bound, ClassId, GaussianEstimator, IncrementalClassifier, LeafPrediction,
    TreeConfig,
};
use crate::drift::Adwin;
use crate::error::{Error, Result};
use crate::stream::Instance;

/// A split is admissible only if at least two branches carry this fraction
/// of the leaf weight.
const MIN_BRANCH_FRACTION: f64 = 0.01;
/// Both error monitors need this many values before an alternate subtree
/// can replace (or be discarded in favour of) the main one.
const REPLACEMENT_MIN_WIDTH: u64 = 100;
const REPLACEMENT_CONFIDENCE: f64 = 0.05;

// Per-element byte costs behind `size_bytes`.
const NODE_BYTES: usize = 48;
const SPLIT_BYTES: usize = 24;
const LEAF_BYTES: usize = 64;
const CLASS_WEIGHT_BYTES: usize = 8;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TreeStats {
    pub splits: u64,
    pub alternates_created: u64,
    pub alternates_pruned: u64,
    pub replacements: u64,
}

#[derive(Debug, Clone, Default)]
struct Leaf {
    class_weights: Vec<f64>,
    /// `[class][feature]`, allocated when the class is first learned here.
    stats: Vec<Vec<GaussianEstimator>>,
    weight_at_last_eval: f64,
    mc_correct: f64,
    nb_correct: f64,
}

struct SplitCandidate {
    feature: usize,
    threshold: f64,
    merit: f64,
    left: Vec<f64>,
    right: Vec<f64>,
}

fn entropy(dist: &[f64]) -> f64 {
    let total: f64 = dist.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    dist.iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.log2()
        })
        .sum()
}

fn info_gain(pre: &[f64], branches: [&[f64]; 2]) -> f64 {
    let total: f64 = pre.iter().sum();
    let weights = branches.map(|b| b.iter().sum::<f64>());
    let admissible = weights
        .iter()
        .filter(|&&w| w >= MIN_BRANCH_FRACTION * total)
        .count();
    if admissible < 2 {
        return f64::NEG_INFINITY;
    }
    let post_total: f64 = weights.iter().sum();
    let post: f64 = branches
        .iter()
        .zip(weights)
        .map(|(b, w)| w / post_total * entropy(b))
        .sum();
    entropy(pre) - post
}

impl Leaf {
    fn with_distribution(class_weights: Vec<f64>) -> Self {
        Self {
            class_weights,
            ..Self::default()
        }
    }

    fn total(&self) -> f64 {
        self.class_weights.iter().sum()
    }

    fn classes_present(&self) -> usize {
        self.class_weights.iter().filter(|&&w| w > 0.0).count()
    }

    fn majority(&self) -> Option<ClassId> {
        argmax(&self.class_weights).filter(|&c| self.class_weights[c] > 0.0)
    }

    fn naive_bayes(&self, x: &[f64]) -> Option<ClassId> {
        if self.stats.iter().all(Vec::is_empty) {
            return self.majority();
        }
        let total = self.total();
        let mut best: Option<(ClassId, f64)> = None;
        for (c, &w) in self.class_weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            let mut score = (w / total).ln();
            for (j, &v) in x.iter().enumerate() {
                let density = self
                    .stats
                    .get(c)
                    .and_then(|s| s.get(j))
                    .map_or(0.0, |g| g.density(v));
                score += density.ln();
            }
            if score > f64::NEG_INFINITY && best.is_none_or(|(_, b)| score > b) {
                best = Some((c, score));
            }
        }
        best.map(|(c, _)| c)
    }

    fn predict(&self, x: &[f64], policy: LeafPrediction) -> Option<ClassId> {
        match policy {
            LeafPrediction::Majority => self.majority(),
            LeafPrediction::NaiveBayesAdaptive => {
                if self.mc_correct > self.nb_correct {
                    self.majority()
                } else {
                    self.naive_bayes(x).or_else(|| self.majority())
                }
            }
        }
    }

    fn learn(&mut self, x: &[f64], y: ClassId, policy: LeafPrediction) {
        if policy == LeafPrediction::NaiveBayesAdaptive && self.total() > 0.0 {
            if self.majority() == Some(y) {
                self.mc_correct += 1.0;
            }
            if self.naive_bayes(x) == Some(y) {
                self.nb_correct += 1.0;
            }
        }
        if self.class_weights.len() <= y {
            self.class_weights.resize(y + 1, 0.0);
        }
        self.class_weights[y] += 1.0;
        if self.stats.len() <= y {
            self.stats.resize_with(y + 1, Vec::new);
        }
        let stats = &mut self.stats[y];
        if stats.is_empty() {
            stats.resize(x.len(), GaussianEstimator::default());
        }
        for (g, &v) in stats.iter_mut().zip(x) {
            g.add(v);
        }
    }

    fn best_split(&self, cfg: &TreeConfig, dimension: usize) -> Option<SplitCandidate> {
        let mut candidates: Vec<SplitCandidate> = Vec::new();
        for feature in 0..dimension {
            let estimators = || self.stats.iter().filter_map(|s| s.get(feature));
            let lo = estimators()
                .map(GaussianEstimator::min)
                .fold(f64::INFINITY, f64::min);
            let hi = estimators()
                .map(GaussianEstimator::max)
                .fold(f64::NEG_INFINITY, f64::max);
            if hi <= lo {
                continue;
            }
            let mut best: Option<SplitCandidate> = None;
            for i in 0..cfg.split_points {
                let threshold = lo + (hi - lo) * (i + 1) as f64 / (cfg.split_points + 1) as f64;
                let mut left = vec![0.0; self.class_weights.len()];
                let mut right = vec![0.0; self.class_weights.len()];
                for (c, s) in self.stats.iter().enumerate() {
                    if let Some(g) = s.get(feature) {
                        let below = g.weight_at_or_below(threshold);
                        left[c] = below;
                        right[c] = g.weight() - below;
                    }
                }
                let merit = info_gain(&self.class_weights, [&left, &right]);
                if best.as_ref().is_none_or(|b| merit > b.merit) {
                    best = Some(SplitCandidate {
                        feature,
                        threshold,
                        merit,
                        left,
                        right,
                    });
                }
            }
            candidates.extend(best.filter(|b| b.merit > f64::NEG_INFINITY));
        }
        if candidates.is_empty() {
            return None;
        }
        // The no-split alternative has merit 0.
        let mut merits: Vec<f64> = candidates.iter().map(|c| c.merit).collect();
        merits.push(0.0);
        merits.sort_by(|a, b| b.total_cmp(a));
        let range = (self.classes_present().max(2) as f64).log2();
        let bound = hoeffding_bound(range, cfg.split_confidence, self.total());
        if !(merits[0] - merits[1] > bound || bound < cfg.tie_threshold) {
            return None;
        }
        candidates
            .into_iter()
            .filter(|c| c.merit > 0.0)
            .max_by(|a, b| a.merit.total_cmp(&b.merit).then(b.feature.cmp(&a.feature)))
    }
}

#[derive(Debug, Clone)]
enum NodeKind {
    Leaf(Leaf),
    Split {
        feature: usize,
        threshold: f64,
        children: Box<[Node; 2]>,
    },
}

#[derive(Debug, Clone)]
struct Node {
    kind: NodeKind,
    /// Prequential 0/1 error of this subtree (adaptive trees only).
    monitor: Option<Adwin>,
    alternate: Option<Box<Node>>,
}

impl Node {
    fn leaf(leaf: Leaf, adaptive: bool) -> Self {
        Self {
            kind: NodeKind::Leaf(leaf),
            monitor: adaptive.then(Adwin::default),
            alternate: None,
        }
    }

    fn leaf_for(&self, x: &[f64]) -> &Leaf {
        match &self.kind {
            NodeKind::Leaf(l) => l,
            NodeKind::Split {
                feature,
                threshold,
                children,
            } => children[branch(x, *feature, *threshold)].leaf_for(x),
        }
    }

    fn count(&self, with_alternates: bool) -> (usize, usize) {
        let mut total = match &self.kind {
            NodeKind::Leaf(_) => (1, 1),
            NodeKind::Split { children, .. } => {
                let (a, b) = (
                    children[0].count(with_alternates),
                    children[1].count(with_alternates),
                );
                (1 + a.0 + b.0, a.1 + b.1)
            }
        };
        if with_alternates {
            if let Some(alt) = &self.alternate {
                let a = alt.count(true);
                total = (total.0 + a.0, total.1 + a.1);
            }
        }
        total
    }

    fn depth(&self) -> usize {
        match &self.kind {
            NodeKind::Leaf(_) => 0,
            NodeKind::Split { children, .. } => 1 + children[0].depth().max(children[1].depth()),
        }
    }

    fn size_bytes(&self, dimension: usize, classes: usize) -> usize {
        let own = NODE_BYTES + self.monitor.as_ref().map_or(0, |_| Adwin::SIZE_BYTES);
        let kind = match &self.kind {
            NodeKind::Leaf(_) => {
                LEAF_BYTES
                    + classes * CLASS_WEIGHT_BYTES
                    + classes * dimension * GaussianEstimator::BYTES
            }
            NodeKind::Split { children, .. } => {
                SPLIT_BYTES
                    + children[0].size_bytes(dimension, classes)
                    + children[1].size_bytes(dimension, classes)
            }
        };
        let alt = self
            .alternate
            .as_ref()
            .map_or(0, |a| a.size_bytes(dimension, classes));
        own + kind + alt
    }
}

fn branch(x: &[f64], feature: usize, threshold: f64) -> usize {
    usize::from(x[feature] > threshold)
}

struct LearnContext<'a> {
    cfg: &'a TreeConfig,
    adaptive: bool,
    dimension: usize,
    fallback: ClassId,
    stats: &'a mut TreeStats,
}

fn learn_node(node: &mut Node, x: &[f64], y: ClassId, ctx: &mut LearnContext<'_>) {
    if ctx.adaptive && adapt(node, x, y, ctx) {
        // the alternate took this node's place and has not seen `x` yet
        return learn_node(node, x, y, ctx);
    }
    let split = match &mut node.kind {
        NodeKind::Leaf(leaf) => {
            leaf.learn(x, y, ctx.cfg.leaf_prediction);
            let total = leaf.total();
            if total - leaf.weight_at_last_eval >= f64::from(ctx.cfg.grace_period) {
                leaf.weight_at_last_eval = total;
                if leaf.classes_present() > 1 {
                    leaf.best_split(ctx.cfg, ctx.dimension)
                } else {
                    None
                }
            } else {
                None
            }
        }
        NodeKind::Split {
            feature,
            threshold,
            children,
        } => {
            let b = branch(x, *feature, *threshold);
            learn_node(&mut children[b], x, y, ctx);
            None
        }
    };
    if let Some(c) = split {
        ctx.stats.splits += 1;
        node.kind = NodeKind::Split {
            feature: c.feature,
            threshold: c.threshold,
            children: Box::new([
                Node::leaf(Leaf::with_distribution(c.left), ctx.adaptive),
                Node::leaf(Leaf::with_distribution(c.right), ctx.adaptive),
            ]),
        };
    }
}

/// Error monitoring and alternate-subtree management for one node.
/// Returns true when the alternate replaced the node.
fn adapt(node: &mut Node, x: &[f64], y: ClassId, ctx: &mut LearnContext<'_>) -> bool {
    let predicted = node
        .leaf_for(x)
        .predict(x, ctx.cfg.leaf_prediction)
        .unwrap_or(ctx.fallback);
    let error = if predicted == y { 0.0 } else { 1.0 };
    let monitor = node.monitor.get_or_insert_with(Adwin::default);
    let before = monitor.mean();
    let changed = monitor.add(error);
    let increased = changed && monitor.mean() > before;
    let (main_width, main_error) = (monitor.width(), monitor.mean());

    if increased && node.alternate.is_none() && matches!(node.kind, NodeKind::Split { .. }) {
        node.alternate = Some(Box::new(Node::leaf(Leaf::default(), true)));
        ctx.stats.alternates_created += 1;
    }

    if let Some(alt) = &node.alternate {
        let alt_monitor = alt.monitor.as_ref().expect("adaptive nodes carry monitors");
        let (alt_width, alt_error) = (alt_monitor.width(), alt_monitor.mean());
        if main_width > REPLACEMENT_MIN_WIDTH && alt_width > REPLACEMENT_MIN_WIDTH {
            let spread = 1.0 / alt_width as f64 + 1.0 / main_width as f64;
            let bound = (2.0
                * main_error
                * (1.0 - main_error)
                * (2.0 / REPLACEMENT_CONFIDENCE).ln()
                * spread)
                .sqrt();
            if bound < main_error - alt_error {
                let alt = node.alternate.take().expect("checked above");
                *node = *alt;
                ctx.stats.replacements += 1;
                return true;
            } else if bound < alt_error - main_error {
                node.alternate = None;
                ctx.stats.alternates_pruned += 1;
            }
        }
    }

    if let Some(alt) = node.alternate.as_mut() {
        learn_node(alt, x, y, ctx);
    }
    false
}

#[derive(Debug, Clone)]
struct Tree {
    cfg: TreeConfig,
    adaptive: bool,
    root: Node,
    dimension: Option<usize>,
    classes: usize,
    fallback: Option<ClassId>,
    stats: TreeStats,
}

impl Tree {
    fn new(cfg: TreeConfig, adaptive: bool) -> Self {
        Self {
            cfg,
            adaptive,
            root: Node::leaf(Leaf::default(), adaptive),
            dimension: None,
            classes: 0,
            fallback: None,
            stats: TreeStats::default(),
        }
    }

    fn check_dimension(&self, x: &Instance) -> Result<()> {
        match self.dimension {
            Some(d) if d != x.dimension() => Err(Error::DimensionMismatch {
                expected: d,
                found: x.dimension(),
            }),
            _ => Ok(()),
        }
    }

    fn learn_one(&mut self, x: &Instance) -> Result<()> {
        let y = x.require_label()?;
        self.check_dimension(x)?;
        let dimension = *self.dimension.get_or_insert(x.dimension());
        self.classes = self.classes.max(y + 1);
        let fallback = *self.fallback.get_or_insert(y);
        let mut ctx = LearnContext {
            cfg: &self.cfg,
            adaptive: self.adaptive,
            dimension,
            fallback,
            stats: &mut self.stats,
        };
        learn_node(&mut self.root, &x.features, y, &mut ctx);
        Ok(())
    }

    fn predict_one(&self, x: &Instance) -> Result<ClassId> {
        self.check_dimension(x)?;
        let fallback = self.fallback.unwrap_or(0);
        if self.dimension.is_none() {
            return Ok(fallback);
        }
        Ok(self
            .root
            .leaf_for(&x.features)
            .predict(&x.features, self.cfg.leaf_prediction)
            .unwrap_or(fallback))
    }

    fn reset(&mut self) {
        self.root = Node::leaf(Leaf::default(), self.adaptive);
        self.dimension = None;
        self.classes = 0;
        self.stats = TreeStats::default();
    }

    fn size_bytes(&self) -> usize {
        std::mem::size_of::<Self>()
            + self
                .root
                .size_bytes(self.dimension.unwrap_or(0), self.classes)
    }
}

macro_rules! tree_type {
    ($(#[$doc:meta])* $name:ident, $adaptive:expr, $label:expr) => {
        $(#[$doc])*
        #[derive(Debug, Clone)]
        pub struct $name(Tree);

        impl $name {
            pub fn new(cfg: TreeConfig) -> Self {
                Self(Tree::new(cfg, $adaptive))
            }

            pub fn config(&self) -> &TreeConfig {
                &self.0.cfg
            }

            pub fn stats(&self) -> TreeStats {
                self.0.stats
            }

            /// Nodes of the main tree.
            pub fn node_count(&self) -> usize {
                self.0.root.count(false).0
            }

            /// Nodes including alternate subtrees.
            pub fn total_node_count(&self) -> usize {
                self.0.root.count(true).0
            }

            pub fn leaf_count(&self) -> usize {
                self.0.root.count(false).1
            }

            pub fn depth(&self) -> usize {
                self.0.root.depth()
            }

            pub fn dimension(&self) -> Option<usize> {
                self.0.dimension
            }
        }

        impl Default for $name {
            fn default() -> Self {
                Self::new(TreeConfig::default())
            }
        }

        impl IncrementalClassifier for $name {
            fn learn_one(&mut self, x: &Instance) -> Result<()> {
                self.0.learn_one(x)
            }

            fn predict_one(&self, x: &Instance) -> Result<ClassId> {
                self.0.predict_one(x)
            }

            fn reset(&mut self) {
                self.0.reset()
            }

            fn size_bytes(&self) -> usize {
                self.0.size_bytes()
            }

            fn name(&self) -> String {
                $label.into()
            }

            fn box_clone(&self) -> Box<dyn IncrementalClassifier> {
                Box::new(self.clone())
            }
        }
    };
}

tree_type!(
    /// Hoeffding tree over numeric features.
    ///
    /// Leaves keep per-class Gaussian summaries of every feature. Every
    /// `grace_period` observations an impure leaf scores
    /// `split_points` equally spaced thresholds per feature by information
    /// gain and splits when the best candidate beats the runner-up (or not
    /// splitting) by more than the Hoeffding bound, or when the bound has
    /// shrunk below `tie_threshold`.
    ///
    /// Before any training, and after `reset`, predictions fall back to the
    /// first label the tree ever learned (class 0 if none).
    HoeffdingTree,
    false,
    "ht"
);

tree_type!(
    /// Hoeffding adaptive tree: a Hoeffding tree whose nodes monitor their
    /// own prequential error with ADWIN.
    ///
    /// When a split node's error rises significantly it starts growing an
    /// alternate subtree from the following instances. Once both monitors
    /// hold enough values, the alternate replaces the node if its error is
    /// lower by more than a confidence bound, or is discarded if it is
    /// worse by that margin. Ties keep the main subtree.
    HoeffdingAdaptiveTree,
    true,
    "hat"
);

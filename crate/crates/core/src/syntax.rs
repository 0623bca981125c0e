//! Syntactic objects, workspaces, MERGE and the economy validators.
//!
//! Objects are immutable and reference counted; every operation returns a
//! new [`Workspace`] and leaves its input untouched. Copies created by
//! internal MERGE share occurrence ids with their antecedent, so a copy chain
//! is simply a set of positions carrying the same occurrence structure. The
//! highest (first in preorder) member of a chain is its head; the others are
//! lower copies.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("root index {index} out of range for workspace with {len} roots")]
    RootIndex { index: usize, len: usize },
    #[error("path {path} does not address a term of the root")]
    InvalidPath { path: Path },
    #[error("internal merge of a root with itself")]
    DegenerateMerge,
    #[error("cannot merge a root with itself (index {0})")]
    SameRoot(usize),
    #[error("validators need consecutive workspaces, got steps {before} and {after}")]
    Sequencing { before: usize, after: usize },
    #[error("feature {0} given with both polarities")]
    ConflictingPolarity(String),
    #[error("feature name is empty")]
    EmptyFeatureName,
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
    #[error("bad feature syntax {0:?}")]
    BadFeature(String),
    #[error("term at {0} is a leaf, expected a node")]
    NotANode(Path),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Plus,
    Minus,
}

impl Polarity {
    fn sign(self) -> char {
        match self {
            Polarity::Plus => '+',
            Polarity::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Feature {
    pub name: String,
    pub polarity: Polarity,
}

impl Feature {
    pub fn plus(name: &str) -> Self {
        Feature { name: name.to_string(), polarity: Polarity::Plus }
    }

    pub fn minus(name: &str) -> Self {
        Feature { name: name.to_string(), polarity: Polarity::Minus }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.polarity.sign(), self.name)
    }
}

impl FromStr for Feature {
    type Err = SyntaxError;

    /// Accepts `+NAME`, `-NAME` (or the Unicode minus / `±` variants
    /// `−NAME`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        let polarity = match chars.next() {
            Some('+') => Polarity::Plus,
            Some('-') | Some('−') => Polarity::Minus,
            _ => return Err(SyntaxError::BadFeature(s.to_string())),
        };
        let name: String = chars.collect();
        if name.is_empty() {
            return Err(SyntaxError::EmptyFeatureName);
        }
        if !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(SyntaxError::BadFeature(s.to_string()));
        }
        Ok(Feature { name, polarity })
    }
}

/// Features keyed by name; at most one polarity per name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FeatureSet(BTreeMap<String, Polarity>);

impl FeatureSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, feature: Feature) -> Result<(), SyntaxError> {
        if feature.name.is_empty() {
            return Err(SyntaxError::EmptyFeatureName);
        }
        match self.0.get(&feature.name) {
            Some(p) if *p != feature.polarity => Err(SyntaxError::ConflictingPolarity(feature.name)),
            _ => {
                self.0.insert(feature.name, feature.polarity);
                Ok(())
            }
        }
    }

    pub fn from_features<I: IntoIterator<Item = Feature>>(it: I) -> Result<Self, SyntaxError> {
        let mut set = FeatureSet::new();
        for f in it {
            set.insert(f)?;
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, feature: &Feature) -> bool {
        self.0.get(&feature.name) == Some(&feature.polarity)
    }

    pub fn is_superset_of(&self, other: &FeatureSet) -> bool {
        other.iter().all(|f| self.contains(&f))
    }

    /// Features present with the same polarity in both sets.
    pub fn shared(&self, other: &FeatureSet) -> FeatureSet {
        FeatureSet(
            self.0
                .iter()
                .filter(|(k, p)| other.0.get(*k) == Some(p))
                .map(|(k, p)| (k.clone(), *p))
                .collect(),
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = Feature> + '_ {
        self.0.iter().map(|(n, p)| Feature { name: n.clone(), polarity: *p })
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// The bounded category inventory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    N,
    V,
    Adj,
    Adv,
    P,
    C,
    T,
    LittleN,
    LittleV,
    Asp,
    Cl,
    Neg,
    Q,
    Det,
}

impl Category {
    pub const ALL: [Category; 14] = [
        Category::N,
        Category::V,
        Category::Adj,
        Category::Adv,
        Category::P,
        Category::C,
        Category::T,
        Category::LittleN,
        Category::LittleV,
        Category::Asp,
        Category::Cl,
        Category::Neg,
        Category::Q,
        Category::Det,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Category::N => "N",
            Category::V => "V",
            Category::Adj => "Adj",
            Category::Adv => "Adv",
            Category::P => "P",
            Category::C => "C",
            Category::T => "T",
            Category::LittleN => "n",
            Category::LittleV => "v",
            Category::Asp => "Asp",
            Category::Cl => "Cl",
            Category::Neg => "Neg",
            Category::Q => "Q",
            Category::Det => "Det",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Category {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "D" {
            return Ok(Category::Det);
        }
        Category::ALL
            .iter()
            .copied()
            .find(|c| c.symbol() == s)
            .ok_or_else(|| SyntaxError::UnknownCategory(s.to_string()))
    }
}

/// A lexicon entry. `phon` may be empty for covert items (PRO, empty C/T).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LexicalItem {
    pub phon: String,
    pub category: Option<Category>,
    pub features: FeatureSet,
}

impl LexicalItem {
    pub fn new(phon: &str, category: Option<Category>) -> Self {
        LexicalItem { phon: phon.to_string(), category, features: FeatureSet::new() }
    }

    pub fn with_features(mut self, features: FeatureSet) -> Self {
        self.features = features;
        self
    }

    pub fn is_covert(&self) -> bool {
        self.phon.is_empty()
    }

    /// Category symbol if the item has one, else its phonological form.
    pub fn descriptor(&self) -> String {
        match self.category {
            Some(c) => c.symbol().to_string(),
            None if self.phon.is_empty() => "∅".to_string(),
            None => self.phon.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Left,
    Right,
}

/// A root-relative address: a sequence of left/right daughter choices.
/// Printed as a string of `L`/`R`; the empty path is the root itself.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(pub Vec<Branch>);

impl Path {
    pub fn root() -> Self {
        Path(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, b: Branch) -> Path {
        let mut v = self.0.clone();
        v.push(b);
        Path(v)
    }

    pub fn parent(&self) -> Option<Path> {
        if self.0.is_empty() {
            None
        } else {
            Some(Path(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn sister(&self) -> Option<Path> {
        let last = *self.0.last()?;
        let mut v = self.0.clone();
        *v.last_mut().unwrap() = match last {
            Branch::Left => Branch::Right,
            Branch::Right => Branch::Left,
        };
        Some(Path(v))
    }

    /// True when `self` dominates or equals `other`.
    pub fn is_prefix_of(&self, other: &Path) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn join(&self, rest: &Path) -> Path {
        let mut v = self.0.clone();
        v.extend_from_slice(&rest.0);
        Path(v)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(match b {
                Branch::Left => "L",
                Branch::Right => "R",
            })?;
        }
        Ok(())
    }
}

impl FromStr for Path {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                'L' | 'l' | '0' => Ok(Branch::Left),
                'R' | 'r' | '1' => Ok(Branch::Right),
                _ => Err(SyntaxError::InvalidPath { path: Path::root() }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Path)
    }
}

impl Serialize for Path {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Path {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A node label. `source` points (relative to the labeled node) at the head
/// that supplied the label, when known.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Label {
    pub category: String,
    pub source: Option<Path>,
}

impl Label {
    pub fn named(category: &str) -> Self {
        Label { category: category.to_string(), source: None }
    }
}

pub type OccurrenceId = u32;

#[derive(Debug)]
enum Term {
    Leaf { item: Arc<LexicalItem>, occurrence: OccurrenceId },
    Node { left: SyntacticObject, right: SyntacticObject, label: Option<Label> },
}

/// A binary-branching term over lexical items.
#[derive(Debug, Clone)]
pub struct SyntacticObject(Arc<Term>);

/// How structural equality treats daughter order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EqMode {
    #[default]
    OrderSensitive,
    OrderInsensitive,
}

/// Interned identity of a term's occurrence structure.
type Ident = u32;

struct IdentTable {
    leaves: HashMap<OccurrenceId, Ident>,
    nodes: HashMap<(Ident, Ident), Ident>,
}

impl IdentTable {
    fn new() -> Self {
        IdentTable { leaves: HashMap::new(), nodes: HashMap::new() }
    }

    fn next(&self) -> Ident {
        (self.leaves.len() + self.nodes.len()) as Ident
    }

    fn ident(&mut self, so: &SyntacticObject) -> Ident {
        match &*so.0 {
            Term::Leaf { occurrence, .. } => {
                let n = self.next();
                *self.leaves.entry(*occurrence).or_insert(n)
            }
            Term::Node { left, right, .. } => {
                let l = self.ident(left);
                let r = self.ident(right);
                let n = self.next();
                *self.nodes.entry((l, r)).or_insert(n)
            }
        }
    }
}

/// Copy-chain structure of a root: which positions are lower copies.
#[derive(Debug, Clone, Default)]
pub struct CopyInfo {
    /// Lower copies in preorder; their interiors are not listed.
    pub lower: Vec<Path>,
    /// Chains with at least two members, head first.
    pub chains: Vec<Vec<Path>>,
}

impl CopyInfo {
    pub fn is_lower(&self, path: &Path) -> bool {
        self.lower.iter().any(|p| p == path)
    }

    /// True when `path` is a lower copy or lies inside one.
    pub fn is_within_lower(&self, path: &Path) -> bool {
        self.lower.iter().any(|p| p.is_prefix_of(path))
    }
}

impl SyntacticObject {
    pub fn leaf(item: LexicalItem, occurrence: OccurrenceId) -> Self {
        SyntacticObject(Arc::new(Term::Leaf { item: Arc::new(item), occurrence }))
    }

    pub fn node(left: SyntacticObject, right: SyntacticObject, label: Option<Label>) -> Self {
        SyntacticObject(Arc::new(Term::Node { left, right, label }))
    }

    pub fn is_leaf(&self) -> bool {
        matches!(&*self.0, Term::Leaf { .. })
    }

    pub fn item(&self) -> Option<&LexicalItem> {
        match &*self.0 {
            Term::Leaf { item, .. } => Some(item),
            Term::Node { .. } => None,
        }
    }

    pub fn occurrence(&self) -> Option<OccurrenceId> {
        match &*self.0 {
            Term::Leaf { occurrence, .. } => Some(*occurrence),
            Term::Node { .. } => None,
        }
    }

    pub fn daughters(&self) -> Option<(&SyntacticObject, &SyntacticObject)> {
        match &*self.0 {
            Term::Node { left, right, .. } => Some((left, right)),
            Term::Leaf { .. } => None,
        }
    }

    pub fn daughter(&self, b: Branch) -> Option<&SyntacticObject> {
        self.daughters().map(|(l, r)| match b {
            Branch::Left => l,
            Branch::Right => r,
        })
    }

    pub fn label(&self) -> Option<&Label> {
        match &*self.0 {
            Term::Node { label, .. } => label.as_ref(),
            Term::Leaf { .. } => None,
        }
    }

    /// Same node with a different label; daughters are shared.
    pub fn with_label(&self, label: Option<Label>) -> Self {
        match &*self.0 {
            Term::Node { left, right, .. } => {
                SyntacticObject::node(left.clone(), right.clone(), label)
            }
            Term::Leaf { .. } => self.clone(),
        }
    }

    pub fn subterm(&self, path: &Path) -> Option<&SyntacticObject> {
        let mut cur = self;
        for b in &path.0 {
            cur = cur.daughter(*b)?;
        }
        Some(cur)
    }

    pub fn try_subterm(&self, path: &Path) -> Result<&SyntacticObject, SyntaxError> {
        self.subterm(path).ok_or_else(|| SyntaxError::InvalidPath { path: path.clone() })
    }

    /// All positions in preorder (node before daughters, left before right).
    pub fn preorder(&self) -> Vec<(Path, &SyntacticObject)> {
        let mut out = Vec::new();
        fn go<'a>(so: &'a SyntacticObject, path: Path, out: &mut Vec<(Path, &'a SyntacticObject)>) {
            out.push((path.clone(), so));
            if let Some((l, r)) = so.daughters() {
                go(l, path.child(Branch::Left), out);
                go(r, path.child(Branch::Right), out);
            }
        }
        go(self, Path::root(), &mut out);
        out
    }

    pub fn node_count(&self) -> usize {
        match self.daughters() {
            Some((l, r)) => 1 + l.node_count() + r.node_count(),
            None => 0,
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self.daughters() {
            Some((l, r)) => l.leaf_count() + r.leaf_count(),
            None => 1,
        }
    }

    pub fn height(&self) -> usize {
        match self.daughters() {
            Some((l, r)) => 1 + l.height().max(r.height()),
            None => 0,
        }
    }

    pub fn max_occurrence(&self) -> Option<OccurrenceId> {
        match &*self.0 {
            Term::Leaf { occurrence, .. } => Some(*occurrence),
            Term::Node { left, right, .. } => left.max_occurrence().max(right.max_occurrence()),
        }
    }

    /// Chain structure of this object taken as a root.
    pub fn copy_info(&self) -> CopyInfo {
        let mut table = IdentTable::new();
        let mut seen: HashMap<Ident, usize> = HashMap::new();
        let mut info = CopyInfo::default();
        let mut groups: Vec<Vec<Path>> = Vec::new();
        fn go(
            so: &SyntacticObject,
            path: Path,
            table: &mut IdentTable,
            seen: &mut HashMap<Ident, usize>,
            groups: &mut Vec<Vec<Path>>,
            info: &mut CopyInfo,
        ) {
            let id = table.ident(so);
            if let Some(&g) = seen.get(&id) {
                groups[g].push(path.clone());
                info.lower.push(path);
                return;
            }
            seen.insert(id, groups.len());
            groups.push(vec![path.clone()]);
            if let Some((l, r)) = so.daughters() {
                go(l, path.child(Branch::Left), table, seen, groups, info);
                go(r, path.child(Branch::Right), table, seen, groups, info);
            }
        }
        go(self, Path::root(), &mut table, &mut seen, &mut groups, &mut info);
        info.chains = groups.into_iter().filter(|g| g.len() > 1).collect();
        info
    }

    fn item_key(item: &LexicalItem) -> String {
        let mut s = if item.phon.is_empty() { "∅".to_string() } else { item.phon.clone() };
        if let Some(c) = item.category {
            s.push(':');
            s.push_str(c.symbol());
        }
        if !item.features.is_empty() {
            s.push('{');
            s.push_str(&item.features.to_string());
            s.push('}');
        }
        s
    }

    /// Canonical text of the content alone: items and labels, ignoring
    /// occurrence ids and copy chains.
    pub fn content_key(&self, mode: EqMode) -> String {
        match &*self.0 {
            Term::Leaf { item, .. } => Self::item_key(item),
            Term::Node { left, right, label } => {
                let mut kids = [left.content_key(mode), right.content_key(mode)];
                if mode == EqMode::OrderInsensitive {
                    kids.sort();
                }
                match label {
                    Some(l) => format!("[_{} {} {}]", l.category, kids[0], kids[1]),
                    None => format!("[{} {}]", kids[0], kids[1]),
                }
            }
        }
    }

    /// Canonical text that ignores occurrence ids but records copy chains:
    /// chain heads are tagged `#k` and lower copies written `~k`.
    pub fn structural_key(&self, mode: EqMode) -> String {
        // Identity multiplicities over all positions, then a canonical walk.
        let mut table = IdentTable::new();
        let mut counts: HashMap<Ident, usize> = HashMap::new();
        for (_, so) in self.preorder() {
            *counts.entry(table.ident(so)).or_insert(0) += 1;
        }
        let mut numbering: HashMap<Ident, usize> = HashMap::new();
        let mut out = String::new();
        fn go(
            so: &SyntacticObject,
            mode: EqMode,
            table: &mut IdentTable,
            counts: &HashMap<Ident, usize>,
            numbering: &mut HashMap<Ident, usize>,
            out: &mut String,
        ) {
            let id = table.ident(so);
            if let Some(k) = numbering.get(&id) {
                out.push_str(&format!("~{k}"));
                return;
            }
            if counts[&id] > 1 {
                let k = numbering.len();
                numbering.insert(id, k);
                out.push_str(&format!("#{k}"));
            }
            match &*so.0 {
                Term::Leaf { item, .. } => out.push_str(&SyntacticObject::item_key(item)),
                Term::Node { left, right, label } => {
                    out.push('[');
                    if let Some(l) = label {
                        out.push('_');
                        out.push_str(&l.category);
                    }
                    let (a, b) = if mode == EqMode::OrderInsensitive
                        && left.content_key(mode) > right.content_key(mode)
                    {
                        (right, left)
                    } else {
                        (left, right)
                    };
                    out.push(' ');
                    go(a, mode, table, counts, numbering, out);
                    out.push(' ');
                    go(b, mode, table, counts, numbering, out);
                    out.push(']');
                }
            }
        }
        go(self, mode, &mut table, &counts, &mut numbering, &mut out);
        out
    }

    pub fn eq_mode(&self, other: &SyntacticObject, mode: EqMode) -> bool {
        self.structural_key(mode) == other.structural_key(mode)
    }

    /// Internal-node content keys of every position (order-sensitive).
    fn node_content_keys(&self, acc: &mut HashSet<String>) {
        for (_, so) in self.preorder() {
            if !so.is_leaf() {
                acc.insert(so.content_key(EqMode::OrderSensitive));
            }
        }
    }
}

impl PartialEq for SyntacticObject {
    fn eq(&self, other: &Self) -> bool {
        self.eq_mode(other, EqMode::OrderSensitive)
    }
}

impl Eq for SyntacticObject {}

impl std::hash::Hash for SyntacticObject {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.structural_key(EqMode::OrderSensitive).hash(state)
    }
}

impl Serialize for SyntacticObject {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &*self.0 {
            Term::Leaf { item, occurrence } => {
                let mut m = s.serialize_map(None)?;
                m.serialize_entry("phon", &item.phon)?;
                m.serialize_entry("category", &item.category.map(|c| c.symbol()))?;
                let feats: Vec<String> = item.features.iter().map(|f| f.to_string()).collect();
                m.serialize_entry("features", &feats)?;
                m.serialize_entry("occurrence", occurrence)?;
                m.end()
            }
            Term::Node { left, right, label } => {
                let mut m = s.serialize_map(None)?;
                m.serialize_entry("label", &label.as_ref().map(|l| l.category.as_str()))?;
                m.serialize_entry("left", left)?;
                m.serialize_entry("right", right)?;
                m.end()
            }
        }
    }
}

/// An ordered multiset of root objects plus a step counter.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    roots: Vec<SyntacticObject>,
    step: usize,
    next_occurrence: OccurrenceId,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// A lexical array: each item becomes a root leaf; the step stays 0.
    pub fn from_items<I: IntoIterator<Item = LexicalItem>>(items: I) -> Self {
        let mut ws = Workspace::new();
        for item in items {
            let leaf = SyntacticObject::leaf(item, ws.next_occurrence);
            ws.next_occurrence += 1;
            ws.roots.push(leaf);
        }
        ws
    }

    /// Wraps existing roots (e.g. parsed structures). Occurrence ids are
    /// assumed to be disjoint across roots.
    pub fn from_roots(roots: Vec<SyntacticObject>, step: usize) -> Self {
        let next = roots.iter().filter_map(|r| r.max_occurrence()).max().map_or(0, |m| m + 1);
        Workspace { roots, step, next_occurrence: next }
    }

    pub fn roots(&self) -> &[SyntacticObject] {
        &self.roots
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    fn root_at(&self, index: usize) -> Result<&SyntacticObject, SyntaxError> {
        self.roots.get(index).ok_or(SyntaxError::RootIndex { index, len: self.roots.len() })
    }

    /// Merges a fresh lexical item with the root at `target`, giving
    /// `{item, root}`. On an empty workspace the item simply becomes the sole
    /// root, to be paired on the next call.
    pub fn external_merge(&self, item: LexicalItem, target: usize) -> Result<Workspace, SyntaxError> {
        let mut next = self.clone();
        let leaf = SyntacticObject::leaf(item, next.next_occurrence);
        next.next_occurrence += 1;
        next.step += 1;
        if self.roots.is_empty() {
            next.roots.push(leaf);
            return Ok(next);
        }
        let old = self.root_at(target)?.clone();
        next.roots[target] = SyntacticObject::node(leaf, old, None);
        Ok(next)
    }

    /// Merges two distinct roots; the result takes the position of the
    /// earlier one.
    pub fn merge_roots(&self, first: usize, second: usize) -> Result<Workspace, SyntaxError> {
        if first == second {
            return Err(SyntaxError::SameRoot(first));
        }
        let a = self.root_at(first)?.clone();
        let b = self.root_at(second)?.clone();
        let mut next = self.clone();
        next.step += 1;
        let (lo, hi) = (first.min(second), first.max(second));
        next.roots.remove(hi);
        next.roots[lo] = SyntacticObject::node(a, b, None);
        Ok(next)
    }

    /// Re-merges a proper subterm of a root with that root: `{X, {.. X ..}}`.
    /// The lower occurrence stays in place and shares occurrence ids with the
    /// new copy, forming a chain.
    pub fn internal_merge(&self, root: usize, subterm: &Path) -> Result<Workspace, SyntaxError> {
        let old = self.root_at(root)?.clone();
        if subterm.is_root() {
            return Err(SyntaxError::DegenerateMerge);
        }
        let copy = old.try_subterm(subterm)?.clone();
        let mut next = self.clone();
        next.step += 1;
        next.roots[root] = SyntacticObject::node(copy, old, None);
        Ok(next)
    }

    /// Relabels the root at `index` (labeling is not a MERGE step).
    pub fn with_root_label(&self, index: usize, label: Option<Label>) -> Result<Workspace, SyntaxError> {
        let r = self.root_at(index)?.with_label(label);
        let mut next = self.clone();
        next.roots[index] = r;
        Ok(next)
    }

    /// Occurrence identities of every term in the workspace, one per distinct
    /// identity (copies collapse, distinct tokens do not).
    fn accessible_with_ids(&self) -> Vec<(Ident, SyntacticObject)> {
        let mut table = IdentTable::new();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for root in &self.roots {
            for (_, so) in root.preorder() {
                let id = table.ident(so);
                if seen.insert(id) {
                    out.push((id, so.clone()));
                }
            }
        }
        out
    }
}

/// Every subterm of every root, with each copy chain counted once.
pub fn accessible_terms(ws: &Workspace) -> Vec<SyntacticObject> {
    ws.accessible_with_ids().into_iter().map(|(_, so)| so).collect()
}

/// Number of accessible terms plus number of root objects.
pub fn workspace_size(ws: &Workspace) -> usize {
    accessible_terms(ws).len() + ws.roots.len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EconomyCondition {
    NoTampering,
    Extension,
    ResourceRestriction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EconomyVerdict {
    pub condition: EconomyCondition,
    pub ok: bool,
    pub detail: String,
}

impl EconomyVerdict {
    fn pass(condition: EconomyCondition, detail: impl Into<String>) -> Self {
        EconomyVerdict { condition, ok: true, detail: detail.into() }
    }

    fn fail(condition: EconomyCondition, detail: impl Into<String>) -> Self {
        let detail = detail.into();
        debug_assert!(!detail.is_empty());
        EconomyVerdict { condition, ok: false, detail }
    }
}

/// How Resource Restriction counts growth between consecutive workspaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum ResourceRule {
    /// At most one new set may be created.
    #[default]
    NewSets,
    /// Accessible terms may grow by at most `bound`.
    AccessibleGrowth { bound: usize },
}

fn check_sequence(before: &Workspace, after: &Workspace) -> Result<(), SyntaxError> {
    if after.step != before.step + 1 {
        return Err(SyntaxError::Sequencing { before: before.step, after: after.step });
    }
    Ok(())
}

fn new_node_keys(before: &Workspace, after: &Workspace) -> Vec<String> {
    let mut old = HashSet::new();
    for r in &before.roots {
        r.node_content_keys(&mut old);
    }
    let mut new = HashSet::new();
    for r in &after.roots {
        r.node_content_keys(&mut new);
    }
    let mut diff: Vec<String> = new.difference(&old).cloned().collect();
    diff.sort();
    diff
}

fn same_roots(before: &Workspace, after: &Workspace) -> bool {
    before.roots.len() == after.roots.len()
        && before.roots.iter().zip(&after.roots).all(|(a, b)| {
            a.content_key(EqMode::OrderSensitive) == b.content_key(EqMode::OrderSensitive)
        })
}

/// Every root of `before` must survive unchanged (same content, no added
/// material) as a root or subterm of `after`.
pub fn check_no_tampering(before: &Workspace, after: &Workspace) -> Result<EconomyVerdict, SyntaxError> {
    check_sequence(before, after)?;
    let cond = EconomyCondition::NoTampering;
    if same_roots(before, after) {
        return Ok(EconomyVerdict::pass(cond, "vacuous: workspace unchanged"));
    }
    let mut present = HashSet::new();
    for r in &after.roots {
        for (_, so) in r.preorder() {
            present.insert(so.content_key(EqMode::OrderSensitive));
        }
    }
    for (i, r) in before.roots.iter().enumerate() {
        let key = r.content_key(EqMode::OrderSensitive);
        if !present.contains(&key) {
            return Ok(EconomyVerdict::fail(
                cond,
                format!("root {i} {key} was modified: it no longer appears intact"),
            ));
        }
    }
    Ok(EconomyVerdict::pass(cond, "all prior roots intact"))
}

/// Every newly created set must be a root of `after`.
pub fn check_extension(before: &Workspace, after: &Workspace) -> Result<EconomyVerdict, SyntaxError> {
    check_sequence(before, after)?;
    let cond = EconomyCondition::Extension;
    let new = new_node_keys(before, after);
    if new.is_empty() {
        return Ok(EconomyVerdict::pass(cond, "vacuous: no new set"));
    }
    let roots: HashSet<String> =
        after.roots.iter().map(|r| r.content_key(EqMode::OrderSensitive)).collect();
    let inner: Vec<&String> = new.iter().filter(|k| !roots.contains(*k)).collect();
    if inner.is_empty() {
        Ok(EconomyVerdict::pass(cond, "new set created at the root"))
    } else {
        Ok(EconomyVerdict::fail(
            cond,
            format!("{} new set(s) created below the root, e.g. {}", inner.len(), inner[0]),
        ))
    }
}

pub fn check_resource_restriction(
    before: &Workspace,
    after: &Workspace,
    rule: ResourceRule,
) -> Result<EconomyVerdict, SyntaxError> {
    check_sequence(before, after)?;
    let cond = EconomyCondition::ResourceRestriction;
    match rule {
        ResourceRule::NewSets => {
            let new = new_node_keys(before, after).len();
            match new {
                0 => Ok(EconomyVerdict::pass(cond, "vacuous: no new set")),
                1 => Ok(EconomyVerdict::pass(cond, "exactly one new set")),
                n => Ok(EconomyVerdict::fail(cond, format!("{n} new sets created in one step"))),
            }
        }
        ResourceRule::AccessibleGrowth { bound } => {
            let b = accessible_terms(before).len();
            let a = accessible_terms(after).len();
            let growth = a.saturating_sub(b);
            if growth <= bound {
                Ok(EconomyVerdict::pass(cond, format!("accessible terms grew by {growth}")))
            } else {
                Ok(EconomyVerdict::fail(
                    cond,
                    format!("accessible terms grew by {growth}, bound is {bound}"),
                ))
            }
        }
    }
}

/// `a` c-commands `b` iff `a`'s sister dominates or equals `b` and `a`
/// does not dominate `b`.
pub fn c_command(root: &SyntacticObject, a: &Path, b: &Path) -> Result<bool, SyntaxError> {
    root.try_subterm(a)?;
    root.try_subterm(b)?;
    let Some(sister) = a.sister() else {
        return Ok(false);
    };
    Ok(sister.is_prefix_of(b) && !a.is_prefix_of(b))
}

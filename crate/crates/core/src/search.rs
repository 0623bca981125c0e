//! Minimal search, labeling and search traces.
//!
//! Depth is counted in edges from the domain root, so the root's daughters
//! sit at depth 1. Search is iterative deepening: the depth limit grows one
//! level at a time and every head (leaf) at the current limit is matched
//! against the target, left daughter before right. Lower copies are
//! invisible to search and to labeling.

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{Branch, Category, CopyInfo, FeatureSet, Label, LexicalItem, Path, SyntacticObject, Workspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search target is empty")]
    EmptyTarget,
    #[error("path {0} does not address a term of the domain")]
    InvalidPath(Path),
    #[error("term at {0} is a leaf; labeling needs a node")]
    NotANode(Path),
    #[error("movable at {0} does not bear +Q")]
    NotQ(Path),
    #[error("root index {0} out of range")]
    RootIndex(usize),
    #[error("structure has no copy chain")]
    NoChain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchTarget {
    /// Matches heads whose features include all of these.
    Features(FeatureSet),
    Category(Category),
}

impl SearchTarget {
    pub fn validate(&self) -> Result<(), SearchError> {
        match self {
            SearchTarget::Features(fs) if fs.is_empty() => Err(SearchError::EmptyTarget),
            _ => Ok(()),
        }
    }

    pub fn matches(&self, item: &LexicalItem) -> bool {
        match self {
            SearchTarget::Features(fs) => item.features.is_superset_of(fs),
            SearchTarget::Category(c) => item.category == Some(*c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchHit {
    pub path: Path,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub hits: Vec<SearchHit>,
    pub depth_limit_reached: usize,
}

impl SearchResult {
    pub fn found(&self) -> bool {
        !self.hits.is_empty()
    }

    pub fn depth(&self) -> Option<usize> {
        self.hits.first().map(|h| h.depth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceOrigin {
    LabelSearch,
    ProbeGoal,
    NodeEnumeration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchTrace {
    pub visits: Vec<String>,
    pub origin: TraceOrigin,
}

impl SearchTrace {
    pub fn len(&self) -> usize {
        self.visits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }

    /// Number of edges crossed (for root-to-goal traces).
    pub fn steps(&self) -> usize {
        self.visits.len().saturating_sub(1)
    }
}

/// Heads at exactly `limit`, left to right, skipping lower copies.
fn heads_at(
    so: &SyntacticObject,
    path: &mut Vec<Branch>,
    limit: usize,
    info: &CopyInfo,
    out: &mut Vec<Path>,
) -> bool {
    // returns whether anything exists deeper than the current level
    let here = Path(path.clone());
    if !path.is_empty() && info.is_lower(&here) {
        return false;
    }
    if path.len() == limit {
        if so.is_leaf() {
            out.push(here);
        }
        return !so.is_leaf();
    }
    let Some((l, r)) = so.daughters() else {
        return false;
    };
    path.push(Branch::Left);
    let a = heads_at(l, path, limit, info, out);
    path.pop();
    path.push(Branch::Right);
    let b = heads_at(r, path, limit, info, out);
    path.pop();
    a || b
}

/// All heads bearing `target` at the shallowest depth where any exists.
pub fn minimal_search(domain: &SyntacticObject, target: &SearchTarget) -> Result<SearchResult, SearchError> {
    target.validate()?;
    let info = domain.copy_info();
    let mut limit = 0;
    loop {
        limit += 1;
        let mut heads = Vec::new();
        let deeper = heads_at(domain, &mut Vec::new(), limit, &info, &mut heads);
        let hits: Vec<SearchHit> = heads
            .into_iter()
            .filter(|p| domain.subterm(p).and_then(|s| s.item()).is_some_and(|i| target.matches(i)))
            .map(|path| SearchHit { path, depth: limit })
            .collect();
        if !hits.is_empty() {
            return Ok(SearchResult { hits, depth_limit_reached: limit });
        }
        if !deeper {
            let reached = if domain.is_leaf() { 0 } else { limit };
            return Ok(SearchResult { hits: Vec::new(), depth_limit_reached: reached });
        }
    }
}

/// Descriptor of a node: explicit label, else the computed label for
/// nodes, else the leaf's category, else its phon (`∅` when covert).
pub fn descriptor(root: &SyntacticObject, path: &Path) -> String {
    let Some(so) = root.subterm(path) else {
        return String::new();
    };
    match so.item() {
        Some(item) => item.descriptor(),
        None => match so.label() {
            Some(l) => l.category.clone(),
            None => match label_in(root, path) {
                Ok(l) => l.category,
                Err(_) => "∅".to_string(),
            },
        },
    }
}

/// Descriptors of every node from the root down to `path`, inclusive.
pub fn path_trace(domain: &SyntacticObject, path: &Path) -> Result<SearchTrace, SearchError> {
    domain.subterm(path).ok_or_else(|| SearchError::InvalidPath(path.clone()))?;
    let visits = (0..=path.len())
        .map(|k| descriptor(domain, &Path(path.0[..k].to_vec())))
        .collect();
    Ok(SearchTrace { visits, origin: TraceOrigin::ProbeGoal })
}

/// The root-to-goal trace of the first (leftmost) minimal-search hit. On a
/// miss the trace holds only the root.
pub fn search_trace(domain: &SyntacticObject, target: &SearchTarget) -> Result<SearchTrace, SearchError> {
    let res = minimal_search(domain, target)?;
    match res.hits.first() {
        Some(hit) => path_trace(domain, &hit.path),
        None => Ok(SearchTrace { visits: vec![descriptor(domain, &Path::root())], origin: TraceOrigin::ProbeGoal }),
    }
}

/// Path of the deepest lower copy of the first chain (the launch site of
/// the most prominent movement).
pub fn lowest_copy(root: &SyntacticObject) -> Result<Path, SearchError> {
    let info = root.copy_info();
    let chain = info.chains.first().ok_or(SearchError::NoChain)?;
    Ok(chain.iter().skip(1).max_by_key(|p| p.len()).cloned().unwrap_or_else(|| chain[0].clone()))
}

/// Root-to-launch-site trace for the first chain.
pub fn movement_trace(root: &SyntacticObject) -> Result<SearchTrace, SearchError> {
    let p = lowest_copy(root)?;
    path_trace(root, &p)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("{0}")]
    Search(#[from] SearchError),
    #[error("unlabeled: {reason}")]
    Unlabeled { reason: String },
}

fn visible(info: &CopyInfo, path: &Path) -> bool {
    !info.is_lower(path)
}

/// The leaf that supplies a node's label, as a path relative to `root`.
fn label_head(root: &SyntacticObject, path: &Path, info: &CopyInfo) -> Result<Path, LabelError> {
    let so = root.subterm(path).ok_or_else(|| SearchError::InvalidPath(path.clone()))?;
    if so.is_leaf() {
        return Ok(path.clone());
    }
    let l = path.child(Branch::Left);
    let r = path.child(Branch::Right);
    let (ls, rs) = so.daughters().unwrap();
    let (lv, rv) = (visible(info, &l), visible(info, &r));
    match (ls.is_leaf(), rs.is_leaf()) {
        (true, true) => {
            let cands: Vec<(&Path, &SyntacticObject)> =
                [(&l, ls, lv), (&r, rs, rv)].into_iter().filter(|x| x.2).map(|x| (x.0, x.1)).collect();
            let with_cat: Vec<&(&Path, &SyntacticObject)> =
                cands.iter().filter(|(_, s)| s.item().unwrap().category.is_some()).collect();
            match (cands.len(), with_cat.len()) {
                (0, _) => Err(LabelError::Unlabeled { reason: "both daughters are lower copies".into() }),
                (_, 1) => Ok(with_cat[0].0.clone()),
                _ => Ok(cands[0].0.clone()),
            }
        }
        (true, false) | (false, true) => {
            let (leaf, leaf_vis, phrase) = if ls.is_leaf() { (&l, lv, &r) } else { (&r, rv, &l) };
            if leaf_vis {
                Ok(leaf.clone())
            } else {
                label_head(root, phrase, info)
            }
        }
        (false, false) => match (lv, rv) {
            (true, false) => label_head(root, &l, info),
            (false, true) => label_head(root, &r, info),
            (false, false) => Err(LabelError::Unlabeled { reason: "both daughters are lower copies".into() }),
            (true, true) => Err(LabelError::Unlabeled { reason: "XP-YP".into() }),
        },
    }
}

fn relative(node: &Path, target: &Path) -> Path {
    Path(target.0[node.len()..].to_vec())
}

/// Label of the node at `path`, with copies judged relative to `root`.
///
/// Head–phrase: the head labels. Head–head: the only head with a category,
/// else the left one. Phrase–phrase: lower copies are invisible; if both
/// daughters are visible the node is labeled by features shared by their
/// heads, and is unlabeled when there are none.
pub fn label_in(root: &SyntacticObject, path: &Path) -> Result<Label, LabelError> {
    let so = root.subterm(path).ok_or_else(|| SearchError::InvalidPath(path.clone()))?;
    if so.is_leaf() {
        return Err(SearchError::NotANode(path.clone()).into());
    }
    let info = root.copy_info();
    match label_head(root, path, &info) {
        Ok(head) => {
            let item = root.subterm(&head).and_then(|s| s.item()).unwrap();
            Ok(Label { category: item.descriptor(), source: Some(relative(path, &head)) })
        }
        Err(LabelError::Unlabeled { reason }) if reason == "XP-YP" => {
            let hl = label_head(root, &path.child(Branch::Left), &info);
            let hr = label_head(root, &path.child(Branch::Right), &info);
            let (Ok(hl), Ok(hr)) = (hl, hr) else {
                return Err(LabelError::Unlabeled { reason: "a daughter is unlabeled".into() });
            };
            let fl = &root.subterm(&hl).and_then(|s| s.item()).unwrap().features;
            let fr = &root.subterm(&hr).and_then(|s| s.item()).unwrap().features;
            let shared = fl.shared(fr);
            if shared.is_empty() {
                Err(LabelError::Unlabeled {
                    reason: format!(
                        "XP-YP with no shared feature between {} and {}",
                        descriptor(root, &hl),
                        descriptor(root, &hr)
                    ),
                })
            } else {
                let name = shared.iter().map(|f| f.name).collect::<Vec<_>>().join("+");
                Ok(Label { category: name, source: None })
            }
        }
        Err(e) => Err(e),
    }
}

/// Label of a standalone node (the node is its own root).
pub fn label(node: &SyntacticObject) -> Result<Label, LabelError> {
    label_in(node, &Path::root())
}

/// Nodes (outside lower copies) that cannot be labeled.
pub fn labeling_failures(root: &SyntacticObject) -> Vec<Path> {
    let info = root.copy_info();
    root.preorder()
        .into_iter()
        .filter(|(p, so)| !so.is_leaf() && !info.is_within_lower(p))
        .filter(|(p, _)| matches!(label_in(root, p), Err(LabelError::Unlabeled { .. })))
        .map(|(p, _)| p)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnumerationMode {
    /// Explicitly labeled nodes.
    LabelsOnly,
    /// Explicitly labeled nodes and overt terminals.
    LabelsAndTerminals,
    /// Every phrase, with its explicit or computed label.
    PhraseLabels,
}

/// Depth-first, left-to-right enumeration of the selected nodes. Lower
/// copies and their contents are skipped.
pub fn node_enumeration(so: &SyntacticObject, mode: EnumerationMode) -> SearchTrace {
    let info = so.copy_info();
    let mut visits = Vec::new();
    for (p, node) in so.preorder() {
        if info.is_within_lower(&p) {
            continue;
        }
        match (mode, node.item()) {
            (EnumerationMode::LabelsOnly, None) | (EnumerationMode::LabelsAndTerminals, None) => {
                if let Some(l) = node.label() {
                    visits.push(l.category.clone());
                }
            }
            (EnumerationMode::LabelsAndTerminals, Some(item)) if !item.is_covert() => {
                visits.push(item.descriptor());
            }
            (EnumerationMode::PhraseLabels, None) => visits.push(descriptor(so, &p)),
            _ => {}
        }
    }
    SearchTrace { visits, origin: TraceOrigin::NodeEnumeration }
}

/// Groups movable phrases by their distance from the root probe,
/// shallowest first; members of a group may move in either order.
pub fn superiority_order(ws: &Workspace, root: usize, movables: &[Path]) -> Result<Vec<Vec<Path>>, SearchError> {
    let so = ws.roots().get(root).ok_or(SearchError::RootIndex(root))?;
    let q = crate::syntax::Feature::plus("Q");
    let mut keyed = Vec::with_capacity(movables.len());
    for p in movables {
        let t = so.subterm(p).ok_or_else(|| SearchError::InvalidPath(p.clone()))?;
        let bears_q = match t.item() {
            Some(item) => item.features.contains(&q),
            None => {
                let info = so.copy_info();
                label_head(so, p, &info)
                    .ok()
                    .and_then(|h| so.subterm(&h).and_then(|s| s.item()).map(|i| i.features.contains(&q)))
                    .unwrap_or(false)
            }
        };
        if !bears_q {
            return Err(SearchError::NotQ(p.clone()));
        }
        keyed.push((p.len(), p.clone()));
    }
    keyed.sort();
    let mut groups: Vec<Vec<Path>> = Vec::new();
    let mut last = None;
    for (d, p) in keyed {
        if last == Some(d) {
            groups.last_mut().unwrap().push(p);
        } else {
            groups.push(vec![p]);
            last = Some(d);
        }
    }
    Ok(groups)
}

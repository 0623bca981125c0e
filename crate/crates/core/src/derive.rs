//! Breadth-first enumeration of MERGE derivations.
//!
//! Terms are hash-consed: every distinct set gets a `u32` id and a set is a
//! pair of ids in canonical (sorted) order, so structural equality is id
//! equality. Lexicon entries are tokens; re-merging a term already in the
//! workspace yields a copy of it, so repeated content always means a copy
//! chain and chains are counted once, as accessible terms are.
//!
//! Each step expands the frontier in parallel; new sets are interned in
//! frontier order afterwards, so ids and counts do not depend on the number
//! of worker threads.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{self, Branch, EqMode, LexicalItem, Path, ResourceRule, SyntacticObject};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    NoTampering,
    Extension,
    ResourceRestriction,
}

impl std::str::FromStr for Constraint {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['_', ' '], "-").as_str() {
            "ntc" | "no-tampering" | "notampering" => Ok(Constraint::NoTampering),
            "ext" | "extension" => Ok(Constraint::Extension),
            "rr" | "resource-restriction" | "resourcerestriction" => Ok(Constraint::ResourceRestriction),
            other => Err(format!("unknown constraint {other:?} (expected ntc, extension, rr)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dedupe {
    /// Workspaces equal as multisets of unordered sets are merged.
    #[default]
    Structural,
    /// Every derivation is counted separately.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergeMode {
    /// MERGE of any two distinct accessible terms; operands that were roots
    /// leave the root list.
    #[default]
    Free,
    /// External merge of two roots, or internal merge of a root with one of
    /// its own terms.
    Restricted,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnumerationConfig {
    #[serde(skip)]
    pub lexicon: Vec<LexicalItem>,
    /// Extra starting roots besides the lexicon atoms.
    #[serde(skip)]
    pub initial_roots: Vec<SyntacticObject>,
    pub max_steps: usize,
    pub constraints: BTreeSet<Constraint>,
    pub dedupe: Dedupe,
    pub mode: MergeMode,
    /// Also generate in-situ attachments of a root inside another root,
    /// the shape of a counter-cyclic derivation.
    pub counter_cyclic: bool,
    pub self_merge: bool,
    pub resource_rule: ResourceRule,
    /// Approximate byte budget for frontier and term store.
    pub mem_budget: Option<u64>,
}

impl EnumerationConfig {
    pub fn new(lexicon: Vec<LexicalItem>, max_steps: usize) -> Self {
        EnumerationConfig {
            lexicon,
            initial_roots: Vec::new(),
            max_steps,
            constraints: BTreeSet::new(),
            dedupe: Dedupe::Structural,
            mode: MergeMode::Free,
            counter_cyclic: false,
            self_merge: false,
            resource_rule: ResourceRule::NewSets,
            mem_budget: None,
        }
    }

    pub fn with_constraints<I: IntoIterator<Item = Constraint>>(mut self, cs: I) -> Self {
        self.constraints = cs.into_iter().collect();
        self
    }

    pub fn validate(&self) -> Result<(), EnumError> {
        if self.max_steps == 0 {
            return Err(EnumError::Config("max_steps must be at least 1".into()));
        }
        if self.lexicon.is_empty() && self.initial_roots.is_empty() {
            return Err(EnumError::Config("lexicon is empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepCounts {
    pub step: usize,
    /// Sets first formed at this step.
    pub new_sets: u64,
    /// Sets formed at or before this step.
    pub cumulative_sets: u64,
    /// Distinct workspaces reached at this step (equals `derivations` when
    /// deduplication is off).
    pub workspaces: u64,
    /// Derivations of this length.
    pub derivations: u64,
    /// Candidate operations rejected by the constraints at this step.
    pub rejected: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumerationResult {
    pub steps: Vec<StepCounts>,
    pub total_distinct_sets: u64,
    pub total_workspaces: u64,
    pub total_derivations: u64,
    /// False when enumeration stopped early (budget); counts are partial.
    pub authoritative: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

#[derive(Debug, Clone, Error)]
pub enum EnumError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("memory budget of {budget} bytes exceeded at step {step} (estimated {estimate}); partial counts are not authoritative")]
    Budget { budget: u64, estimate: u64, step: usize, partial: Box<EnumerationResult> },
    #[error("target leaf {0} is not in the lexicon")]
    UnknownLeaf(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Atom(u32),
    Pair(u32, u32),
}

/// Hash-consed term store.
#[derive(Debug, Default, Clone)]
pub struct TermStore {
    nodes: Vec<Node>,
    index: HashMap<Node, u32>,
    items: Vec<LexicalItem>,
    /// Sorted subterm ids of every term, itself included.
    subterms: Vec<Vec<u32>>,
}

impl TermStore {
    fn atom(&mut self, item: LexicalItem) -> u32 {
        let k = self.items.len() as u32;
        self.items.push(item);
        let id = self.nodes.len() as u32;
        let n = Node::Atom(k);
        self.nodes.push(n);
        self.index.insert(n, id);
        self.subterms.push(vec![id]);
        id
    }

    fn lookup(&self, a: u32, b: u32) -> Option<u32> {
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        self.index.get(&Node::Pair(x, y)).copied()
    }

    /// Returns the id and whether it is new.
    fn pair(&mut self, a: u32, b: u32) -> (u32, bool) {
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        let n = Node::Pair(x, y);
        if let Some(id) = self.index.get(&n) {
            return (*id, false);
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n);
        self.index.insert(n, id);
        let mut subs: Vec<u32> = self.subterms[x as usize].iter().chain(&self.subterms[y as usize]).copied().collect();
        subs.push(id);
        subs.sort_unstable();
        subs.dedup();
        self.subterms.push(subs);
        (id, true)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn set_count(&self) -> usize {
        self.nodes.len() - self.items.len()
    }

    fn daughters(&self, id: u32) -> Option<(u32, u32)> {
        match self.nodes[id as usize] {
            Node::Pair(a, b) => Some((a, b)),
            Node::Atom(_) => None,
        }
    }

    /// Rebuilds a syntactic object; atoms keep their lexicon index as
    /// occurrence id, so repeated terms come out as copy chains.
    pub fn to_object(&self, id: u32) -> SyntacticObject {
        match self.nodes[id as usize] {
            Node::Atom(k) => SyntacticObject::leaf(self.items[k as usize].clone(), k),
            Node::Pair(a, b) => SyntacticObject::node(self.to_object(a), self.to_object(b), None),
        }
    }

    fn intern_object(&mut self, so: &SyntacticObject, atoms: &HashMap<u32, u32>) -> u32 {
        match so.daughters() {
            None => atoms[&so.occurrence().unwrap()],
            Some((l, r)) => {
                let a = self.intern_object(l, atoms);
                let b = self.intern_object(r, atoms);
                self.pair(a, b).0
            }
        }
    }

    fn accessible(&self, roots: &[u32]) -> Vec<u32> {
        let mut acc: Vec<u32> = roots.iter().flat_map(|r| self.subterms[*r as usize].iter().copied()).collect();
        acc.sort_unstable();
        acc.dedup();
        acc
    }
}

/// A set built during expansion that may not be interned yet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Fresh {
    Old(u32),
    Pair(Box<Fresh>, Box<Fresh>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Successor {
    kept: Vec<u32>,
    fresh: Fresh,
}

/// A recorded operation, for witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergeStep {
    pub operation: String,
    pub operands: Vec<String>,
    pub result: String,
}

type Op = (&'static str, Vec<u32>, Option<Path>);

struct Engine<'a> {
    store: &'a TermStore,
    cfg: &'a EnumerationConfig,
}

impl Engine<'_> {
    fn remove_one(roots: &mut Vec<u32>, x: u32) -> bool {
        if let Some(i) = roots.iter().position(|r| *r == x) {
            roots.remove(i);
            true
        } else {
            false
        }
    }

    fn resolve_pair(&self, a: u32, b: u32) -> Fresh {
        match self.store.lookup(a, b) {
            Some(id) => Fresh::Old(id),
            None => Fresh::Pair(Box::new(Fresh::Old(a)), Box::new(Fresh::Old(b))),
        }
    }

    /// Rebuilds `root` with the term at `path` replaced by `{term, with}`.
    fn attach(&self, root: u32, path: &[Branch], with: u32) -> Fresh {
        match path.split_first() {
            None => Fresh::Pair(Box::new(Fresh::Old(root)), Box::new(Fresh::Old(with))),
            Some((b, rest)) => {
                let (l, r) = self.store.daughters(root).expect("path inside term");
                let (stay, go) = match b {
                    Branch::Left => (r, l),
                    Branch::Right => (l, r),
                };
                let inner = self.attach(go, rest, with);
                Fresh::Pair(Box::new(inner), Box::new(Fresh::Old(stay)))
            }
        }
    }

    fn positions(&self, id: u32, prefix: &mut Vec<Branch>, out: &mut Vec<Path>) {
        if let Some((l, r)) = self.store.daughters(id) {
            prefix.push(Branch::Left);
            out.push(Path(prefix.clone()));
            self.positions(l, prefix, out);
            prefix.pop();
            prefix.push(Branch::Right);
            out.push(Path(prefix.clone()));
            self.positions(r, prefix, out);
            prefix.pop();
        }
    }

    fn expand(&self, roots: &[u32]) -> Vec<(Successor, Op)> {
        let mut out = Vec::new();
        match self.cfg.mode {
            MergeMode::Free => {
                let acc = self.store.accessible(roots);
                for i in 0..acc.len() {
                    let start = if self.cfg.self_merge { i } else { i + 1 };
                    for j in start..acc.len() {
                        let (x, y) = (acc[i], acc[j]);
                        let mut kept = roots.to_vec();
                        Self::remove_one(&mut kept, x);
                        if x != y {
                            Self::remove_one(&mut kept, y);
                        }
                        out.push((Successor { kept, fresh: self.resolve_pair(x, y) }, ("merge", vec![x, y], None)));
                    }
                }
            }
            MergeMode::Restricted => {
                for i in 0..roots.len() {
                    for j in i + 1..roots.len() {
                        let mut kept = roots.to_vec();
                        kept.remove(j);
                        kept.remove(i);
                        let (x, y) = (roots[i], roots[j]);
                        out.push((Successor { kept, fresh: self.resolve_pair(x, y) }, ("external-merge", vec![x, y], None)));
                    }
                    let r = roots[i];
                    for &x in &self.store.subterms[r as usize] {
                        if x == r && !self.cfg.self_merge {
                            continue;
                        }
                        let mut kept = roots.to_vec();
                        kept.remove(i);
                        out.push((Successor { kept, fresh: self.resolve_pair(x, r) }, ("internal-merge", vec![x, r], None)));
                    }
                }
            }
        }
        if self.cfg.counter_cyclic {
            for i in 0..roots.len() {
                let mut ps = Vec::new();
                self.positions(roots[i], &mut Vec::new(), &mut ps);
                for j in 0..roots.len() {
                    if i == j {
                        continue;
                    }
                    for p in &ps {
                        let mut kept = roots.to_vec();
                        let (hi, lo) = (i.max(j), i.min(j));
                        kept.remove(hi);
                        kept.remove(lo);
                        let fresh = self.attach(roots[i], &p.0, roots[j]);
                        out.push((Successor { kept, fresh }, ("in-situ", vec![roots[j], roots[i]], Some(p.clone()))));
                    }
                }
            }
        }
        let mut seen = HashSet::new();
        out.retain(|(s, _)| {
            let mut key = s.kept.clone();
            key.sort_unstable();
            seen.insert((key, s.fresh.clone()))
        });
        out
    }
}

fn materialize(store: &mut TermStore, f: &Fresh, created: &mut Vec<u32>) -> u32 {
    match f {
        Fresh::Old(id) => *id,
        Fresh::Pair(a, b) => {
            let x = materialize(store, a, created);
            let y = materialize(store, b, created);
            let (id, new) = store.pair(x, y);
            if new {
                created.push(id);
            }
            id
        }
    }
}

/// Checks the selected constraints. `after` must already be materialized.
fn admissible(store: &TermStore, cfg: &EnumerationConfig, before: &[u32], after: &[u32]) -> bool {
    let acc_before = store.accessible(before);
    let acc_after = store.accessible(after);
    let new: Vec<u32> = acc_after
        .iter()
        .copied()
        .filter(|x| acc_before.binary_search(x).is_err() && store.daughters(*x).is_some())
        .collect();
    for c in &cfg.constraints {
        let ok = match c {
            Constraint::NoTampering => before.iter().all(|r| acc_after.binary_search(r).is_ok()),
            Constraint::Extension => new.iter().all(|x| after.contains(x)),
            Constraint::ResourceRestriction => match cfg.resource_rule {
                ResourceRule::NewSets => new.len() <= 1,
                ResourceRule::AccessibleGrowth { bound } => acc_after.len().saturating_sub(acc_before.len()) <= bound,
            },
        };
        if !ok {
            return false;
        }
    }
    true
}

struct Start {
    store: TermStore,
    roots: Vec<u32>,
}

fn start(cfg: &EnumerationConfig) -> Start {
    let mut store = TermStore::default();
    let mut roots = Vec::new();
    for item in &cfg.lexicon {
        roots.push(store.atom(item.clone()));
    }
    for so in &cfg.initial_roots {
        let mut leaves: Vec<(u32, LexicalItem)> = so
            .preorder()
            .into_iter()
            .filter_map(|(_, t)| t.item().map(|i| (t.occurrence().unwrap(), i.clone())))
            .collect();
        leaves.sort_by_key(|(o, _)| *o);
        leaves.dedup_by_key(|(o, _)| *o);
        let mut local = HashMap::new();
        for (occ, item) in leaves {
            local.insert(occ, store.atom(item));
        }
        roots.push(store.intern_object(so, &local));
    }
    roots.sort_unstable();
    Start { store, roots }
}

const BYTES_PER_WORKSPACE: u64 = 96;
const BYTES_PER_TERM: u64 = 96;

fn estimate(store: &TermStore, frontier: &[(Vec<u32>, u64)]) -> u64 {
    let roots: u64 = frontier.iter().map(|(r, _)| r.len() as u64 * 4).sum();
    frontier.len() as u64 * BYTES_PER_WORKSPACE + roots + store.len() as u64 * BYTES_PER_TERM
}

/// Enumerates all workspaces reachable within `max_steps` MERGE steps.
pub fn enumerate(cfg: &EnumerationConfig) -> Result<EnumerationResult, EnumError> {
    enumerate_with_store(cfg).map(|(r, _)| r)
}

fn enumerate_with_store(cfg: &EnumerationConfig) -> Result<(EnumerationResult, TermStore), EnumError> {
    cfg.validate()?;
    let t0 = Instant::now();
    let Start { mut store, roots, .. } = start(cfg);
    let mut frontier: Vec<(Vec<u32>, u64)> = vec![(roots, 1)];
    // Sets present at the start are not counted as formed.
    let mut counted: HashSet<u32> = (0..store.len() as u32).collect();
    let mut steps = Vec::new();
    let result = |steps: Vec<StepCounts>, authoritative: bool| EnumerationResult {
        total_distinct_sets: steps.last().map_or(0, |s: &StepCounts| s.cumulative_sets),
        total_workspaces: steps.iter().map(|s: &StepCounts| s.workspaces).sum(),
        total_derivations: steps.iter().map(|s| s.derivations).sum(),
        steps,
        authoritative,
        wall_time_ms: Some(t0.elapsed().as_millis()),
    };
    for step in 1..=cfg.max_steps {
        let expanded: Vec<Vec<(Successor, Op)>> = {
            let engine = Engine { store: &store, cfg };
            frontier.par_iter().map(|(r, _)| engine.expand(r)).collect()
        };
        let mut next: HashMap<Vec<u32>, u64> = HashMap::new();
        let mut order: Vec<Vec<u32>> = Vec::new();
        let mut derivations = 0u64;
        let mut rejected = 0u64;
        let mut new_sets = 0u64;
        for ((roots, mult), succs) in frontier.iter().zip(expanded) {
            for (succ, _) in succs {
                let mut created = Vec::new();
                let id = materialize(&mut store, &succ.fresh, &mut created);
                let mut after = succ.kept.clone();
                after.push(id);
                after.sort_unstable();
                if !admissible(&store, cfg, roots, &after) {
                    rejected += mult;
                    continue;
                }
                // A set counts once an admissible operation first builds it.
                if !counted.contains(&id) {
                    for &x in &store.subterms[id as usize] {
                        if counted.insert(x) {
                            new_sets += 1;
                        }
                    }
                }
                derivations += mult;
                match next.get_mut(&after) {
                    Some(m) => *m += mult,
                    None => {
                        next.insert(after.clone(), *mult);
                        order.push(after);
                    }
                }
            }
        }
        let workspaces = match cfg.dedupe {
            Dedupe::Structural => next.len() as u64,
            Dedupe::None => derivations,
        };
        let prev_cum = steps.last().map_or(0, |s: &StepCounts| s.cumulative_sets);
        steps.push(StepCounts {
            step,
            new_sets,
            cumulative_sets: prev_cum + new_sets,
            workspaces,
            derivations,
            rejected,
        });
        frontier = order.into_iter().map(|r| {
            let m = next[&r];
            (r, m)
        }).collect();
        if let Some(budget) = cfg.mem_budget {
            let est = estimate(&store, &frontier);
            if est > budget && step < cfg.max_steps {
                let partial = result(steps, false);
                return Err(EnumError::Budget { budget, estimate: est, step, partial: Box::new(partial) });
            }
        }
    }
    Ok((result(steps, true), store))
}

/// True when `target` is a root of some reachable workspace; the witness is
/// the list of operations that builds it.
pub fn is_derivable(target: &SyntacticObject, cfg: &EnumerationConfig) -> Result<Option<Vec<MergeStep>>, EnumError> {
    cfg.validate()?;
    let Start { mut store, roots } = start(cfg);
    // Map target leaves onto lexicon atoms by content, left to right.
    let mut by_content: HashMap<String, Vec<u32>> = HashMap::new();
    for id in 0..store.len() as u32 {
        if let Node::Atom(k) = store.nodes[id as usize] {
            by_content.entry(crate::bracket::print_item(&store.items[k as usize])).or_default().push(id);
        }
    }
    let mut atoms = HashMap::new();
    for (_, t) in target.preorder() {
        if let (Some(item), Some(occ)) = (t.item(), t.occurrence()) {
            if atoms.contains_key(&occ) {
                continue;
            }
            let key = crate::bracket::print_item(item);
            let pool = by_content.get_mut(&key).ok_or_else(|| EnumError::UnknownLeaf(key.clone()))?;
            if pool.is_empty() {
                return Err(EnumError::UnknownLeaf(key));
            }
            atoms.insert(occ, pool.remove(0));
        }
    }
    let goal = store.intern_object(target, &atoms);
    let mut parents: Vec<HashMap<Vec<u32>, (Vec<u32>, MergeStep)>> = Vec::new();
    let mut frontier = vec![roots.clone()];
    if roots.contains(&goal) {
        return Ok(Some(Vec::new()));
    }
    for step in 0..cfg.max_steps {
        let mut layer: HashMap<Vec<u32>, (Vec<u32>, MergeStep)> = HashMap::new();
        let mut order = Vec::new();
        for ws in &frontier {
            let succs = Engine { store: &store, cfg }.expand(ws);
            for (succ, (name, operands, path)) in succs {
                let mut created = Vec::new();
                let id = materialize(&mut store, &succ.fresh, &mut created);
                let mut after = succ.kept.clone();
                after.push(id);
                after.sort_unstable();
                if !admissible(&store, cfg, ws, &after) || layer.contains_key(&after) {
                    continue;
                }
                let mut ops: Vec<String> = operands.iter().map(|o| store.to_object(*o).to_string()).collect();
                if let Some(p) = path {
                    ops.push(format!("at {p}"));
                }
                let rec = MergeStep { operation: name.to_string(), operands: ops, result: store.to_object(id).to_string() };
                layer.insert(after.clone(), (ws.clone(), rec));
                order.push(after);
            }
        }
        let hit = order.iter().find(|ws| ws.contains(&goal)).cloned();
        parents.push(layer);
        if let Some(mut ws) = hit {
            let mut witness = Vec::new();
            for k in (0..=step).rev() {
                let (prev, rec) = parents[k][&ws].clone();
                witness.push(rec);
                ws = prev;
            }
            witness.reverse();
            return Ok(Some(witness));
        }
        frontier = order;
    }
    Ok(None)
}

/// One enumerated transition rebuilt as syntax workspaces, for checking the
/// enumerator against the syntax validators.
#[derive(Debug, Clone)]
pub struct Transition {
    pub before: syntax::Workspace,
    pub after: syntax::Workspace,
    pub admitted: bool,
}

/// Every candidate transition out of every workspace reachable within
/// `max_steps - 1` steps, with the enumerator's verdict. Meant for small
/// configurations.
pub fn transitions(cfg: &EnumerationConfig) -> Result<Vec<Transition>, EnumError> {
    cfg.validate()?;
    let Start { mut store, roots, .. } = start(cfg);
    let mut frontier = vec![roots];
    let mut out = Vec::new();
    for step in 0..cfg.max_steps {
        let mut next = Vec::new();
        let mut seen = HashSet::new();
        for ws in &frontier {
            let succs = Engine { store: &store, cfg }.expand(ws);
            for (succ, _) in succs {
                let mut created = Vec::new();
                let id = materialize(&mut store, &succ.fresh, &mut created);
                let mut after = succ.kept.clone();
                after.push(id);
                after.sort_unstable();
                let admitted = admissible(&store, cfg, ws, &after);
                let to_ws = |roots: &[u32], s: usize| {
                    syntax::Workspace::from_roots(roots.iter().map(|r| store.to_object(*r)).collect(), s)
                };
                out.push(Transition { before: to_ws(ws, step), after: to_ws(&after, step + 1), admitted });
                if admitted && seen.insert(after.clone()) {
                    next.push(after);
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// Re-checks a transition with the syntax validators.
pub fn validators_admit(t: &Transition, cfg: &EnumerationConfig) -> Result<bool, syntax::SyntaxError> {
    for c in &cfg.constraints {
        let v = match c {
            Constraint::NoTampering => syntax::check_no_tampering(&t.before, &t.after)?,
            Constraint::Extension => syntax::check_extension(&t.before, &t.after)?,
            Constraint::ResourceRestriction => syntax::check_resource_restriction(&t.before, &t.after, cfg.resource_rule)?,
        };
        if !v.ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Structural key of an object as the enumerator sees it (order-insensitive).
pub fn set_key(so: &SyntacticObject) -> String {
    so.structural_key(EqMode::OrderInsensitive)
}

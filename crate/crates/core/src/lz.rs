//! LZ76 exhaustive-history phrase counting (Kaspar–Schuster) and its
//! normalization `c(n) · log_b(n) / n`.
//!
//! A phrase is extended while it still occurs somewhere in the text that
//! precedes its last symbol (overlap with itself allowed); when extension
//! fails the phrase is closed, including the symbol that broke it. A trailing
//! partial phrase counts as one.
//!
//! [`phrase_count`] runs in linear time with an online suffix automaton.
//! [`phrase_count_ks`] is the textbook Kaspar–Schuster scan, quadratic in the
//! worst case, kept as an independent implementation.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LzError {
    #[error("empty input sequence")]
    Empty,
    #[error("sequence of length {0} is too short to normalize (need at least 2)")]
    TooShort(usize),
    #[error("log base equals alphabet size 1; normalization is undefined")]
    DegenerateBase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Two,
    Alphabet,
}

impl std::str::FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two" | "2" => Ok(LogBase::Two),
            "alphabet" | "alpha" => Ok(LogBase::Alphabet),
            _ => Err(format!("unknown log base {s:?} (expected two|alphabet)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub length: usize,
    pub phrase_count: usize,
    pub alphabet_size: usize,
    pub log_base: LogBase,
    pub normalized: f64,
}

const DENSE_LIMIT: u32 = 32;

enum Transitions {
    Dense { width: usize, table: Vec<u32> },
    Sparse(Vec<Vec<(u32, u32)>>),
}

const NONE: u32 = u32::MAX;

/// Online suffix automaton over `u32` symbols.
struct Sam {
    len: Vec<usize>,
    link: Vec<u32>,
    next: Transitions,
    last: u32,
}

impl Sam {
    fn new(alphabet_bound: u32, capacity: usize) -> Self {
        let next = if alphabet_bound <= DENSE_LIMIT {
            let width = alphabet_bound.max(1) as usize;
            let mut table = Vec::with_capacity(capacity * width);
            table.resize(width, NONE);
            Transitions::Dense { width, table }
        } else {
            let mut rows = Vec::with_capacity(capacity);
            rows.push(Vec::new());
            Transitions::Sparse(rows)
        };
        let mut len = Vec::with_capacity(capacity);
        let mut link = Vec::with_capacity(capacity);
        len.push(0);
        link.push(NONE);
        Sam { len, link, next, last: 0 }
    }

    #[inline]
    fn go(&self, state: u32, sym: u32) -> Option<u32> {
        let t = match &self.next {
            Transitions::Dense { width, table } => table[state as usize * width + sym as usize],
            Transitions::Sparse(rows) => rows[state as usize]
                .iter()
                .find(|(c, _)| *c == sym)
                .map_or(NONE, |(_, t)| *t),
        };
        (t != NONE).then_some(t)
    }

    #[inline]
    fn set(&mut self, state: u32, sym: u32, to: u32) {
        match &mut self.next {
            Transitions::Dense { width, table } => table[state as usize * *width + sym as usize] = to,
            Transitions::Sparse(rows) => {
                let row = &mut rows[state as usize];
                match row.iter_mut().find(|(c, _)| *c == sym) {
                    Some(e) => e.1 = to,
                    None => row.push((sym, to)),
                }
            }
        }
    }

    fn new_state(&mut self, len: usize, link: u32, copy_from: Option<u32>) -> u32 {
        let id = self.len.len() as u32;
        self.len.push(len);
        self.link.push(link);
        match &mut self.next {
            Transitions::Dense { width, table } => {
                let w = *width;
                match copy_from {
                    Some(src) => {
                        let start = src as usize * w;
                        table.extend_from_within(start..start + w);
                    }
                    None => table.resize(table.len() + w, NONE),
                }
            }
            Transitions::Sparse(rows) => {
                let row = copy_from.map_or_else(Vec::new, |src| rows[src as usize].clone());
                rows.push(row);
            }
        }
        id
    }

    fn extend(&mut self, sym: u32) {
        let cur = self.new_state(self.len[self.last as usize] + 1, NONE, None);
        let mut p = self.last;
        while p != NONE && self.go(p, sym).is_none() {
            self.set(p, sym, cur);
            p = self.link[p as usize];
        }
        if p == NONE {
            self.link[cur as usize] = 0;
        } else {
            let q = self.go(p, sym).unwrap();
            if self.len[p as usize] + 1 == self.len[q as usize] {
                self.link[cur as usize] = q;
            } else {
                let clone = self.new_state(self.len[p as usize] + 1, self.link[q as usize], Some(q));
                while p != NONE && self.go(p, sym) == Some(q) {
                    self.set(p, sym, clone);
                    p = self.link[p as usize];
                }
                self.link[q as usize] = clone;
                self.link[cur as usize] = clone;
            }
        }
        self.last = cur;
    }
}

/// Re-interns large symbol values so dense tables stay small.
fn densify(symbols: &[u32]) -> (Vec<u32>, u32) {
    let max = symbols.iter().copied().max().unwrap_or(0);
    if max < DENSE_LIMIT {
        return (symbols.to_vec(), max + 1);
    }
    let mut map = HashMap::new();
    let out: Vec<u32> = symbols
        .iter()
        .map(|s| {
            let n = map.len() as u32;
            *map.entry(*s).or_insert(n)
        })
        .collect();
    let bound = map.len() as u32;
    (out, bound)
}

/// Exhaustive-history phrase count `c(n)`.
pub fn phrase_count(symbols: &[u32]) -> Result<usize, LzError> {
    if symbols.is_empty() {
        return Err(LzError::Empty);
    }
    let (s, bound) = densify(symbols);
    let mut sam = Sam::new(bound, 2 * s.len() + 1);
    let mut count = 0;
    let mut state = 0u32;
    let mut phrase_len = 0usize;
    for &x in &s {
        // The automaton holds exactly the text before x.
        match sam.go(state, x) {
            Some(t) => {
                state = t;
                phrase_len += 1;
            }
            None => {
                count += 1;
                state = 0;
                phrase_len = 0;
            }
        }
        sam.extend(x);
        // Cloning may have split the state; keep the shortest-suffix class
        // that still contains a string of the current phrase length.
        while state != 0 && sam.len[sam.link[state as usize] as usize] >= phrase_len {
            state = sam.link[state as usize];
        }
    }
    if phrase_len > 0 {
        count += 1;
    }
    Ok(count)
}

/// The Kaspar–Schuster scan with indices `i`, `k`, `l`, `k_max`.
pub fn phrase_count_ks<T: PartialEq>(s: &[T]) -> Result<usize, LzError> {
    let n = s.len();
    if n == 0 {
        return Err(LzError::Empty);
    }
    if n == 1 {
        return Ok(1);
    }
    let (mut c, mut l, mut i, mut k, mut k_max) = (1usize, 1usize, 0usize, 1usize, 1usize);
    loop {
        if s[i + k - 1] == s[l + k - 1] {
            k += 1;
            if l + k > n {
                c += 1;
                break;
            }
        } else {
            k_max = k_max.max(k);
            i += 1;
            if i == l {
                c += 1;
                l += k_max;
                if l + 1 > n {
                    break;
                }
                i = 0;
                k = 1;
                k_max = 1;
            } else {
                k = 1;
            }
        }
    }
    Ok(c)
}

/// `c · log_b(n) / n`.
pub fn normalize(phrase_count: usize, length: usize, alphabet_size: usize, base: LogBase) -> Result<f64, LzError> {
    if length == 0 {
        return Err(LzError::Empty);
    }
    if length < 2 {
        return Err(LzError::TooShort(length));
    }
    let n = length as f64;
    let log_n = match base {
        LogBase::Two => n.log2(),
        LogBase::Alphabet => {
            if alphabet_size < 2 {
                return Err(LzError::DegenerateBase);
            }
            n.ln() / (alphabet_size as f64).ln()
        }
    };
    Ok(phrase_count as f64 * log_n / n)
}

pub fn alphabet_size(symbols: &[u32]) -> usize {
    let mut v = symbols.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

pub fn complexity(symbols: &[u32], base: LogBase) -> Result<ComplexityReport, LzError> {
    if symbols.is_empty() {
        return Err(LzError::Empty);
    }
    if symbols.len() < 2 {
        return Err(LzError::TooShort(symbols.len()));
    }
    let c = phrase_count(symbols)?;
    let alpha = alphabet_size(symbols);
    let normalized = normalize(c, symbols.len(), alpha, base)?;
    Ok(ComplexityReport {
        length: symbols.len(),
        phrase_count: c,
        alphabet_size: alpha,
        log_base: base,
        normalized,
    })
}

/// Empirical entropy in bits per symbol.
pub fn shannon_entropy(symbols: &[u32]) -> Result<f64, LzError> {
    if symbols.is_empty() {
        return Err(LzError::Empty);
    }
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for s in symbols {
        *counts.entry(*s).or_insert(0) += 1;
    }
    let n = symbols.len() as f64;
    let mut freqs: Vec<usize> = counts.into_values().collect();
    freqs.sort_unstable();
    let h: f64 = freqs
        .into_iter()
        .map(|k| {
            let p = k as f64 / n;
            -p * p.log2()
        })
        .sum();
    Ok(h.max(0.0))
}

/// Splits a literal sequence: whitespace/comma separated tokens if any
/// separator is present, otherwise one token per character.
pub fn literal_tokens(text: &str) -> Vec<String> {
    if text.contains(|c: char| c.is_whitespace() || c == ',') {
        text.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect()
    } else {
        text.chars().map(|c| c.to_string()).collect()
    }
}

/// [`literal_tokens`], interned by first appearance.
pub fn parse_literal(text: &str) -> Vec<u32> {
    let mut map: HashMap<String, u32> = HashMap::new();
    literal_tokens(text)
        .into_iter()
        .map(|t| {
            let n = map.len() as u32;
            *map.entry(t).or_insert(n)
        })
        .collect()
}

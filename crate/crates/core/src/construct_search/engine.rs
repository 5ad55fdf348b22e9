//! Exhaustive search for column multisets meeting weight constraints.
//!
//! Given constraint vectors `z_1, …, z_t` in F_q^n and a target `D`, find `N`
//! columns `c_1, …, c_N` such that `#{j : z_s · c_j ≠ 0} ≥ D` for every `s`.
//! With the rows of `I(q, H)` as constraints this is the (δ, H)-ECIC
//! existence question for `D = 2δ + 1`; with every nonzero message as a
//! constraint it is the existence of an `[N, n, ≥ D]` code.
//!
//! `z · c ≠ 0` is unchanged by scaling `c`, so columns are drawn from
//! projective classes, and the order of columns is irrelevant, so choices are
//! enumerated as non-decreasing index sequences. A class whose hit set is
//! contained in another's is never needed and is dropped up front.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field_linalg::{checked_power, Elem, Field};

/// Classes beyond this count skip the quadratic dominance filter.
const DOMINANCE_LIMIT: usize = 4096;

/// Canonical representatives (first nonzero coordinate 1) of every
/// projective point of F_q^dim, in odometer order.
pub fn projective_points(field: &Field, dim: usize, budget: u64) -> Result<Vec<Vec<Elem>>> {
    let q = field.q() as u64;
    let total = checked_power(q, dim)
        .map(|t| (t - 1) / (q - 1))
        .filter(|&c| c <= budget)
        .ok_or_else(|| Error::budget("projective points", format!("({q}^{dim} - 1)/({q} - 1)"), budget))?;
    let mut out = Vec::with_capacity(total as usize);
    for lead in 0..dim {
        let tail = dim - lead - 1;
        let mut digits = vec![0 as Elem; tail];
        loop {
            let mut v = vec![0 as Elem; dim];
            v[lead] = 1;
            v[lead + 1..].copy_from_slice(&digits);
            out.push(v);
            let mut k = 0;
            loop {
                if k == tail {
                    break;
                }
                digits[k] = ((digits[k] as usize + 1) % field.order()) as Elem;
                if digits[k] != 0 {
                    break;
                }
                k += 1;
            }
            if k == tail {
                break;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Column representatives of a solution, in search order.
    Feasible(Vec<Vec<Elem>>),
    Infeasible,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub verdict: Verdict,
    /// Nodes visited in sequential order up to the verdict. Independent of
    /// the worker count.
    pub nodes: u64,
}

pub struct ColumnSearch {
    dim: usize,
    constraints: usize,
    words: usize,
    classes: Vec<Vec<Elem>>,
    hits: Vec<u64>,
    last_hit: Vec<usize>,
}

impl ColumnSearch {
    /// Prepares a search for columns of length `dim` against `constraints`.
    /// `budget` caps the number of projective classes generated.
    pub fn new(field: &Field, dim: usize, constraints: &[Vec<Elem>], budget: u64) -> Result<Self> {
        let points = projective_points(field, dim, budget)?;
        let t = constraints.len();
        let words = t.div_ceil(64).max(1);

        let mut by_hits: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut classes = Vec::new();
        let mut hit_sets: Vec<Vec<u64>> = Vec::new();
        for p in points {
            let mut h = vec![0u64; words];
            for (s, z) in constraints.iter().enumerate() {
                if field.dot(z, &p) != 0 {
                    h[s / 64] |= 1 << (s % 64);
                }
            }
            if h.iter().all(|&w| w == 0) || by_hits.contains_key(&h) {
                continue;
            }
            by_hits.insert(h.clone(), classes.len());
            classes.push(p);
            hit_sets.push(h);
        }

        let mut keep: Vec<usize> = (0..classes.len()).collect();
        if classes.len() <= DOMINANCE_LIMIT {
            let subset = |a: &[u64], b: &[u64]| a.iter().zip(b).all(|(x, y)| x & !y == 0);
            keep.retain(|&a| !(0..hit_sets.len()).any(|b| b != a && subset(&hit_sets[a], &hit_sets[b])));
        }
        // Classes that hit the most constraints first: solutions surface sooner.
        keep.sort_by_key(|&c| {
            let pop: u32 = hit_sets[c].iter().map(|w| w.count_ones()).sum();
            (std::cmp::Reverse(pop), c)
        });

        let classes: Vec<Vec<Elem>> = keep.iter().map(|&c| classes[c].clone()).collect();
        let hits: Vec<u64> = keep.iter().flat_map(|&c| hit_sets[c].clone()).collect();
        let mut last_hit = vec![0usize; t];
        for (c, _) in classes.iter().enumerate() {
            for s in 0..t {
                if hits[c * words + s / 64] >> (s % 64) & 1 == 1 {
                    last_hit[s] = c;
                }
            }
        }
        Ok(ColumnSearch {
            dim,
            constraints: t,
            words,
            classes,
            hits,
            last_hit,
        })
    }

    pub fn classes(&self) -> usize {
        self.classes.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Looks for `length` columns giving every constraint at least `required` hits.
    pub fn run(&self, length: usize, required: usize, node_budget: u64, jobs: usize) -> Run {
        if self.constraints == 0 || required == 0 {
            let zero = vec![0 as Elem; self.dim];
            return Run {
                verdict: Verdict::Feasible(vec![zero; length]),
                nodes: 1,
            };
        }
        if length == 0 || self.classes.is_empty() {
            return Run {
                verdict: Verdict::Infeasible,
                nodes: 1,
            };
        }

        let first_found = AtomicUsize::new(usize::MAX);
        let subtree = |c0: usize, budget: u64| -> Option<SubtreeResult> {
            if first_found.load(Ordering::Relaxed) < c0 {
                return None;
            }
            let r = self.subtree(c0, length, required, budget);
            if r.solution.is_some() {
                first_found.fetch_min(c0, Ordering::Relaxed);
            }
            Some(r)
        };

        // Root node, then one subtree per first column class.
        let mut nodes = 1u64;
        let roots: Vec<usize> = (0..self.classes.len()).collect();
        let results: Vec<Option<SubtreeResult>> = if jobs > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .expect("thread pool");
            pool.install(|| roots.par_iter().map(|&c0| subtree(c0, node_budget)).collect())
        } else {
            let mut out = Vec::with_capacity(roots.len());
            for &c0 in &roots {
                let r = subtree(c0, node_budget.saturating_sub(nodes));
                let stop = r.as_ref().is_none_or(|r| r.exhausted_budget || r.solution.is_some());
                nodes += r.as_ref().map_or(0, |r| r.nodes);
                out.push(r);
                if stop {
                    break;
                }
            }
            nodes = 1;
            out
        };

        for r in results {
            let Some(r) = r else { break };
            nodes += r.nodes;
            if r.exhausted_budget || nodes > node_budget {
                return Run {
                    verdict: Verdict::BudgetExceeded,
                    nodes: node_budget,
                };
            }
            if let Some(sol) = r.solution {
                let cols = sol.iter().map(|&c| self.classes[c].clone()).collect();
                return Run {
                    verdict: Verdict::Feasible(cols),
                    nodes,
                };
            }
        }
        Run {
            verdict: Verdict::Infeasible,
            nodes,
        }
    }

    fn subtree(&self, c0: usize, length: usize, required: usize, budget: u64) -> SubtreeResult {
        let mut state = Dfs {
            search: self,
            length,
            required: required as u32,
            counts: vec![0u32; self.constraints],
            chosen: Vec::with_capacity(length),
            nodes: 0,
            budget,
            exhausted: false,
        };
        state.place(c0);
        let found = state.dfs(c0);
        SubtreeResult {
            nodes: state.nodes,
            exhausted_budget: state.exhausted,
            solution: found.then_some(state.chosen),
        }
    }
}

struct SubtreeResult {
    nodes: u64,
    exhausted_budget: bool,
    solution: Option<Vec<usize>>,
}

struct Dfs<'a> {
    search: &'a ColumnSearch,
    length: usize,
    required: u32,
    counts: Vec<u32>,
    chosen: Vec<usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Dfs<'_> {
    fn bits(&self, c: usize) -> &[u64] {
        let w = self.search.words;
        &self.search.hits[c * w..(c + 1) * w]
    }

    fn place(&mut self, c: usize) {
        let w = self.search.words;
        for k in 0..w {
            let mut b = self.search.hits[c * w + k];
            while b != 0 {
                self.counts[k * 64 + b.trailing_zeros() as usize] += 1;
                b &= b - 1;
            }
        }
        self.chosen.push(c);
    }

    fn unplace(&mut self) {
        let c = self.chosen.pop().unwrap();
        let w = self.search.words;
        for k in 0..w {
            let mut b = self.search.hits[c * w + k];
            while b != 0 {
                self.counts[k * 64 + b.trailing_zeros() as usize] -= 1;
                b &= b - 1;
            }
        }
    }

    /// Whether the current prefix, extended with classes `start..`, can still succeed.
    fn viable(&self, start: usize) -> bool {
        let remaining = (self.length - self.chosen.len()) as u32;
        self.counts.iter().enumerate().all(|(s, &cnt)| {
            cnt >= self.required || (cnt + remaining >= self.required && self.search.last_hit[s] >= start)
        })
    }

    fn dfs(&mut self, start: usize) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return false;
        }
        if !self.viable(start) {
            return false;
        }
        if self.counts.iter().all(|&c| c >= self.required) {
            // Any further columns keep every constraint satisfied.
            let pad = *self.chosen.last().unwrap();
            self.chosen.resize(self.length, pad);
            return true;
        }
        if self.chosen.len() == self.length {
            return false;
        }
        for c in start..self.search.classes.len() {
            // A class that hits no constraint still short of the target cannot help here.
            let useful = self.bits(c).iter().enumerate().any(|(k, &b)| {
                let mut b = b;
                while b != 0 {
                    if self.counts[k * 64 + b.trailing_zeros() as usize] < self.required {
                        return true;
                    }
                    b &= b - 1;
                }
                false
            });
            if !useful {
                continue;
            }
            self.place(c);
            if self.dfs(c) {
                return true;
            }
            self.unplace();
            if self.exhausted {
                return false;
            }
        }
        false
    }
}

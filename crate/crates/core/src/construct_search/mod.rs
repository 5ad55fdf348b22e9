//! Building (δ, H)-ECICs: concatenation of an index code with an outer
//! error-correcting code, random sampling, and the exact optimal-length search.

pub mod engine;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::shortest_code_length;
use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::field_linalg::{min_encoded_weight, FMatrix, Field};
use crate::index_codes::{generalized_independence_number, min_rank, verify_ecic, verify_ic, LinearIndexCode};
use crate::instance::{projective_error_vectors, IcsiInstance};
use engine::{ColumnSearch, Verdict};

/// Generator of an `[N, k, N − k + 1]_q` MDS code.
///
/// `k = 1` gives the repetition code and `N = k` the identity. Otherwise this
/// is the extended Reed–Solomon code for `N ≤ q + 1`: column `j` evaluates the
/// monomials `1, x, …, x^{k−1}` at the j-th point of `0, 1, α, α², …`, and
/// the column for `N = q + 1` is the point at infinity `(0, …, 0, 1)ᵀ`.
pub fn mds_generator(field: &Field, k: usize, length: usize) -> Result<FMatrix> {
    if k == 0 {
        return Err(Error::ZeroDimension);
    }
    if length < k {
        return Err(Error::OutOfRegime(format!("length {length} is below dimension {k}")));
    }
    if k == 1 {
        return FMatrix::from_rows(field, length, &[vec![1; length]]);
    }
    if length == k {
        return Ok(FMatrix::identity(field, k));
    }
    let q = field.order();
    if length > q + 1 {
        return Err(Error::OutOfRegime(format!(
            "no Reed-Solomon code of length {length} over GF({q})"
        )));
    }
    let alpha = field.primitive_element();
    let points: Vec<u8> = std::iter::once(0)
        .chain((0..q as u64 - 1).map(|e| field.pow(alpha, e)))
        .collect();
    let mut g = FMatrix::zeros(field, k, length);
    for (c, &p) in points.iter().take(length).enumerate() {
        for r in 0..k {
            g.set(r, c, field.pow(p, r as u64));
        }
    }
    if length == q + 1 {
        g.set(k - 1, q, 1);
    }
    Ok(g)
}

/// `L = G · outer` for an index code `G` (n × κ) and an outer generator
/// (κ × N′) of distance at least 2δ + 1. The result is re-verified.
pub fn concatenate_construction(
    inst: &IcsiInstance,
    delta: usize,
    ic_matrix: &FMatrix,
    outer: &FMatrix,
    budgets: &Budgets,
) -> Result<LinearIndexCode> {
    let inner = LinearIndexCode::new(inst.clone(), ic_matrix.clone())?;
    if !verify_ic(&inner) {
        return Err(Error::InvalidInnerIc);
    }
    if outer.rows() != ic_matrix.cols() {
        return Err(Error::LengthMismatch {
            expected: ic_matrix.cols(),
            got: outer.rows(),
        });
    }
    let required = 2 * delta + 1;
    if outer.rows() > 0 {
        let distance = min_encoded_weight(outer, budgets.enumeration)?;
        if distance < required {
            return Err(Error::OuterDistanceTooSmall { distance, required });
        }
    }
    let code = LinearIndexCode::new(inst.clone(), ic_matrix.mul(outer)?)?;
    ensure_valid(&code, delta, budgets)?;
    Ok(code)
}

fn ensure_valid(code: &LinearIndexCode, delta: usize, budgets: &Budgets) -> Result<()> {
    if verify_ecic(code, delta, budgets.enumeration)?.valid {
        Ok(())
    } else {
        Err(Error::InternalContradiction(format!(
            "constructed matrix is not a ({delta}, H)-ECIC"
        )))
    }
}

/// The concatenation with the smallest outer code available: a min-rank
/// index code followed by an MDS code when `q + 1 ≥ κ + 2δ`, else by a
/// shortest code found by search.
pub fn concatenate_with_best_outer(
    inst: &IcsiInstance,
    field: &Field,
    delta: usize,
    budgets: &Budgets,
) -> Result<LinearIndexCode> {
    let kappa = min_rank(inst, field, budgets.assignments)?;
    let g = crate::index_codes::ic_matrix_from_witness(&kappa.rows);
    let k = kappa.kappa;
    let d = 2 * delta + 1;
    let outer = if k == 0 {
        FMatrix::zeros(field, 0, 0)
    } else if k == 1 || field.order() + 1 >= k + d - 1 {
        mds_generator(field, k, k + d - 1)?
    } else {
        crate::bounds::shortest_code_length_search(field, k, d, budgets)?.generator
    };
    concatenate_construction(inst, delta, &g, &outer, budgets)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomOutcome {
    pub code: Option<LinearIndexCode>,
    /// Trials drawn, including the successful one.
    pub trials_used: usize,
}

/// Samples up to `trials` matrices with i.i.d. uniform entries from a
/// ChaCha8 stream seeded with `seed`, row-major within each trial, and
/// returns the first (δ, H)-ECIC. `first`, when given, replaces the first
/// sample without consuming randomness.
#[allow(clippy::too_many_arguments)]
pub fn random_construct(
    inst: &IcsiInstance,
    field: &Field,
    delta: usize,
    length: usize,
    trials: usize,
    seed: u64,
    first: Option<&FMatrix>,
    budgets: &Budgets,
) -> Result<RandomOutcome> {
    let n = inst.messages();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let matrix = match (t, first) {
            (0, Some(m)) => m.clone(),
            _ => {
                let rows: Vec<Vec<u8>> = (0..n)
                    .map(|_| (0..length).map(|_| rng.gen_range(0..field.order()) as u8).collect())
                    .collect();
                FMatrix::from_rows(field, length, &rows)?
            }
        };
        let code = LinearIndexCode::new(inst.clone(), matrix)?;
        if verify_ecic(&code, delta, budgets.enumeration)?.valid {
            return Ok(RandomOutcome {
                code: Some(code),
                trials_used: t + 1,
            });
        }
    }
    Ok(RandomOutcome {
        code: None,
        trials_used: trials,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Existence {
    Feasible(LinearIndexCode),
    /// Proven by exhausting the search space.
    Infeasible,
    /// The node budget ran out first.
    Unknown,
}

/// A prepared (δ, H)-ECIC existence search for one instance and field. The
/// constraints are one representative per projective class of `I(q, H)`.
pub struct EcicSearch {
    inst: IcsiInstance,
    field: Field,
    search: ColumnSearch,
}

impl EcicSearch {
    pub fn new(inst: &IcsiInstance, field: &Field, budgets: &Budgets) -> Result<Self> {
        let zs = projective_error_vectors(inst, field, budgets.enumeration)?;
        Ok(EcicSearch {
            inst: inst.clone(),
            field: field.clone(),
            search: ColumnSearch::new(field, inst.messages(), &zs, budgets.enumeration)?,
        })
    }

    /// Column classes left after dropping useless and dominated ones.
    pub fn classes(&self) -> usize {
        self.search.classes()
    }

    pub fn exists(&self, delta: usize, length: usize, budgets: &Budgets) -> Result<(Existence, u64)> {
        let run = self.search.run(length, 2 * delta + 1, budgets.nodes, budgets.jobs);
        let outcome = match run.verdict {
            Verdict::Feasible(cols) => {
                let matrix = FMatrix::from_columns(&self.field, self.inst.messages(), &cols)?;
                let code = LinearIndexCode::new(self.inst.clone(), matrix)?;
                ensure_valid(&code, delta, budgets)?;
                Existence::Feasible(code)
            }
            Verdict::Infeasible => Existence::Infeasible,
            Verdict::BudgetExceeded => Existence::Unknown,
        };
        Ok((outcome, run.nodes))
    }
}

/// Decides whether an `n × N` (δ, H)-ECIC exists over the field.
pub fn exists_ecic(
    inst: &IcsiInstance,
    field: &Field,
    delta: usize,
    length: usize,
    budgets: &Budgets,
) -> Result<Existence> {
    Ok(EcicSearch::new(inst, field, budgets)?.exists(delta, length, budgets)?.0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthVerdict {
    Feasible,
    Infeasible,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LengthStat {
    pub length: usize,
    pub verdict: LengthVerdict,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub classes: usize,
    pub lengths: Vec<LengthStat>,
    pub nodes: u64,
    pub node_budget: u64,
    /// Wall time varies between runs, so it is kept out of serialized output.
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub q: u32,
    pub delta: usize,
    /// N_q(H, δ), when the search completed.
    pub optimal_length: Option<usize>,
    pub witness: Option<LinearIndexCode>,
    /// Largest length proven infeasible, by the lower bounds or by exhaustion.
    pub infeasible_below: Option<usize>,
    /// Smallest length known to admit a code.
    pub feasible_at: usize,
    /// Lower bound the search started from.
    pub start: usize,
    pub stats: SearchStats,
}

impl SearchOutcome {
    pub fn complete(&self) -> bool {
        self.optimal_length.is_some()
    }
}

/// N_q(H, δ) by exhaustive search, from `max(α-bound, κ + 2δ)` upward. The
/// κ-bound (or, if it is unknown, `κ(2δ + 1)`) is always achievable by
/// concatenation and caps the range. When the node budget runs out the
/// outcome is a bracket `[infeasible_below + 1, feasible_at]`.
pub fn optimal_length_search(
    inst: &IcsiInstance,
    field: &Field,
    delta: usize,
    budgets: &Budgets,
) -> Result<SearchOutcome> {
    let clock = Instant::now();
    let d = 2 * delta + 1;
    let alpha = generalized_independence_number(inst, budgets.alpha_cap)?.alpha;
    let kappa = min_rank(inst, field, budgets.assignments)?.kappa;
    let alpha_bound = shortest_code_length(field, alpha, d, budgets)
        .map(|c| c.length)
        .unwrap_or(alpha);
    let upper = match shortest_code_length(field, kappa, d, budgets) {
        Ok(c) => c.length,
        Err(e) if e.is_budget() => kappa * d,
        Err(e) => return Err(e),
    };
    let start = alpha_bound.max(kappa + 2 * delta);

    let search = EcicSearch::new(inst, field, budgets)?;
    let mut stats = SearchStats {
        classes: search.classes(),
        lengths: Vec::new(),
        nodes: 0,
        node_budget: budgets.nodes,
        wall_time: Duration::ZERO,
    };
    let mut outcome = SearchOutcome {
        q: field.q(),
        delta,
        optimal_length: None,
        witness: None,
        infeasible_below: start.checked_sub(1),
        feasible_at: upper,
        start,
        stats: stats.clone(),
    };
    for length in start..=upper {
        let (verdict, nodes) = search.exists(delta, length, budgets)?;
        stats.nodes += nodes;
        let v = match verdict {
            Existence::Feasible(code) => {
                outcome.optimal_length = Some(length);
                outcome.feasible_at = length;
                outcome.witness = Some(code);
                LengthVerdict::Feasible
            }
            Existence::Infeasible => {
                outcome.infeasible_below = Some(length);
                LengthVerdict::Infeasible
            }
            Existence::Unknown => LengthVerdict::Unknown,
        };
        let stop = v != LengthVerdict::Infeasible;
        stats.lengths.push(LengthStat {
            length,
            verdict: v,
            nodes,
        });
        if stop {
            break;
        }
    }
    if outcome.optimal_length.is_none() && outcome.infeasible_below == Some(upper) {
        return Err(Error::InternalContradiction(format!(
            "no code found up to the achievable length {upper}"
        )));
    }
    stats.wall_time = clock.elapsed();
    outcome.stats = stats;
    Ok(outcome)
}

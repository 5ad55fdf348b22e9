//! Bounds on the optimal length N_q(H, δ) of a (δ, H)-ECIC, and the classical
//! shortest-code lengths N_q[k, d] they are built from.
//!
//! The sandwich is `N_q[α, 2δ+1] ≤ N_q(H, δ) ≤ N_q[κ, 2δ+1]`, with the
//! Singleton-type lower bound `κ + 2δ` alongside and the random-coding length
//! as an existence guarantee.

use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::Serialize;

use crate::budget::Budgets;
use crate::construct_search::engine::{projective_points, ColumnSearch, Verdict};
use crate::error::{Error, Result};
use crate::field_linalg::{FMatrix, Field};
use crate::index_codes::{generalized_independence_number, min_rank};
use crate::instance::IcsiInstance;

/// Known values `(q, k, d, N_q[k, d])` outside the closed forms. Each is
/// re-derived by [`shortest_code_length_search`] in the tests.
const CODE_LENGTH_TABLE: &[(u32, usize, usize, usize)] = &[(2, 2, 5, 8), (2, 3, 5, 10)];

/// `V_q(N, r) = Σ_{ℓ ≤ r} C(N, ℓ)(q−1)^ℓ`, the size of a Hamming ball. `r` is
/// clamped to `N`.
pub fn sphere_volume(q: u32, n: usize, r: usize) -> BigUint {
    let mut total = BigUint::from(0u32);
    let mut term = BigUint::from(1u32);
    for l in 0..=r.min(n) {
        total += &term;
        // C(N, ℓ+1)(q−1)^{ℓ+1} = C(N, ℓ)(q−1)^ℓ · (N−ℓ)(q−1)/(ℓ+1), exact at every step.
        term = term * (n - l) * (q - 1) / (l + 1);
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthSource {
    ClosedForm,
    Table,
    Search,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeLength {
    pub length: usize,
    pub source: LengthSource,
}

/// Result of the exhaustive N_q[k, d] search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSearch {
    pub length: usize,
    /// A `k × N` generator of minimum distance at least `d`.
    pub generator: FMatrix,
    /// Nodes spent per length tried, from the Singleton length upward.
    pub nodes: Vec<(usize, u64)>,
}

/// N_q[k, d] from the closed forms, then the table, then exhaustive search.
pub fn shortest_code_length(field: &Field, k: usize, d: usize, budgets: &Budgets) -> Result<CodeLength> {
    let closed = |length| {
        Ok(CodeLength {
            length,
            source: LengthSource::ClosedForm,
        })
    };
    match (k, d) {
        (0, _) => return closed(0),
        (_, 0 | 1) => return closed(k),
        (1, _) => return closed(d),
        _ => {}
    }
    if let Some(&(.., length)) = CODE_LENGTH_TABLE
        .iter()
        .find(|&&(q, tk, td, _)| q == field.q() && tk == k && td == d)
    {
        return Ok(CodeLength {
            length,
            source: LengthSource::Table,
        });
    }
    Ok(CodeLength {
        length: shortest_code_length_search(field, k, d, budgets)?.length,
        source: LengthSource::Search,
    })
}

/// N_q[k, d] by exhaustive search alone. Lengths below `k + d − 1` are ruled
/// out by the Singleton bound; from there each length is searched to
/// exhaustion until one admits a code. `k` repetitions of each unit vector
/// `d` times always works, so the loop ends by `N = kd`.
pub fn shortest_code_length_search(field: &Field, k: usize, d: usize, budgets: &Budgets) -> Result<CodeSearch> {
    let unknown = || Error::UnknownCodeLength { q: field.q(), k, d };
    if k == 0 {
        return Err(Error::ZeroDimension);
    }
    let d = d.max(1);
    let messages = projective_points(field, k, budgets.enumeration).map_err(|_| unknown())?;
    let search = ColumnSearch::new(field, k, &messages, budgets.enumeration).map_err(|_| unknown())?;
    let mut nodes = Vec::new();
    for length in k + d - 1..=k * d {
        let run = search.run(length, d, budgets.nodes, budgets.jobs);
        nodes.push((length, run.nodes));
        match run.verdict {
            Verdict::Feasible(cols) => {
                return Ok(CodeSearch {
                    length,
                    generator: FMatrix::from_columns(field, k, &cols)?,
                    nodes,
                })
            }
            Verdict::Infeasible => {}
            Verdict::BudgetExceeded => return Err(unknown()),
        }
    }
    Err(Error::InternalContradiction(format!(
        "no [N, {k}, {d}] code found up to N = {}",
        k * d
    )))
}

/// `N_q[α(H), 2δ + 1]`.
pub fn alpha_bound(inst: &IcsiInstance, field: &Field, delta: usize, budgets: &Budgets) -> Result<usize> {
    let alpha = generalized_independence_number(inst, budgets.alpha_cap)?.alpha;
    Ok(shortest_code_length(field, alpha, 2 * delta + 1, budgets)?.length)
}

/// `N_q[κ_q(H), 2δ + 1]`.
pub fn kappa_bound(inst: &IcsiInstance, field: &Field, delta: usize, budgets: &Budgets) -> Result<usize> {
    let kappa = min_rank(inst, field, budgets.assignments)?.kappa;
    Ok(shortest_code_length(field, kappa, 2 * delta + 1, budgets)?.length)
}

/// `κ_q(H) + 2δ`.
pub fn singleton_bound(inst: &IcsiInstance, field: &Field, delta: usize, budgets: &Budgets) -> Result<usize> {
    Ok(min_rank(inst, field, budgets.assignments)?.kappa + 2 * delta)
}

/// Smallest N with `Σ_i q^{n − |X_i| − 1} · V_q(N, 2δ) < q^N`, in exact arithmetic.
pub fn random_coding_length(inst: &IcsiInstance, field: &Field, delta: usize) -> usize {
    let q = field.q();
    let n = inst.messages();
    let lhs: BigUint = (0..inst.receivers())
        .map(|i| BigUint::from(q).pow((n - inst.side_info(i).len() - 1) as u32))
        .sum();
    let mut length = 0usize;
    let mut q_pow = BigUint::from(1u32);
    loop {
        if &lhs * sphere_volume(q, length, 2 * delta) < q_pow {
            return length;
        }
        length += 1;
        q_pow *= q;
    }
}

/// `κ + 2δ` when an MDS outer code of that length exists over GF(q), i.e.
/// when `q ≥ κ + 2δ − 1`; the Singleton bound then makes it optimal.
pub fn mds_optimal_length(
    inst: &IcsiInstance,
    field: &Field,
    delta: usize,
    budgets: &Budgets,
) -> Result<Option<usize>> {
    let kappa = min_rank(inst, field, budgets.assignments)?.kappa;
    Ok(mds_condition(field.q(), kappa, delta).then_some(kappa + 2 * delta))
}

fn mds_condition(q: u32, kappa: usize, delta: usize) -> bool {
    q as usize + 1 >= kappa + 2 * delta
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub q: u32,
    pub delta: usize,
    pub alpha: Option<usize>,
    pub kappa: Option<usize>,
    pub alpha_bound: Option<usize>,
    pub kappa_bound: Option<usize>,
    pub singleton: Option<usize>,
    pub random_coding: usize,
    pub mds_equality: Option<bool>,
    /// Best computed lower bound: the larger of `alpha_bound` and `singleton`.
    pub lower: Option<usize>,
    pub upper: Option<usize>,
    /// One line per quantity left unknown, with the reason.
    pub unknown: Vec<String>,
}

/// Every bound at once, computing α and κ a single time. Quantities whose
/// computation exceeds a budget are left empty and explained in `unknown`.
pub fn bounds_report(inst: &IcsiInstance, field: &Field, delta: usize, budgets: &Budgets) -> BoundsReport {
    let d = 2 * delta + 1;
    let mut unknown = Vec::new();
    let mut note = |name: &str, e: Error| unknown.push(format!("{name}: {e}"));

    let alpha = generalized_independence_number(inst, budgets.alpha_cap)
        .map(|a| a.alpha)
        .map_err(|e| note("alpha", e))
        .ok();
    let kappa = min_rank(inst, field, budgets.assignments)
        .map(|k| k.kappa)
        .map_err(|e| note("kappa", e))
        .ok();
    let alpha_bound = alpha.and_then(|a| {
        shortest_code_length(field, a, d, budgets)
            .map(|c| c.length)
            .map_err(|e| note("alpha_bound", e))
            .ok()
    });
    let kappa_bound = kappa.and_then(|k| {
        shortest_code_length(field, k, d, budgets)
            .map(|c| c.length)
            .map_err(|e| note("kappa_bound", e))
            .ok()
    });
    let singleton = kappa.map(|k| k + 2 * delta);
    let lower = alpha_bound.max(singleton);
    BoundsReport {
        q: field.q(),
        delta,
        alpha,
        kappa,
        alpha_bound,
        kappa_bound,
        singleton,
        random_coding: random_coding_length(inst, field, delta),
        mds_equality: kappa.map(|k| mds_condition(field.q(), k, delta)),
        lower,
        upper: kappa_bound,
        unknown,
    }
}

impl BoundsReport {
    /// Two aligned columns, one quantity per line.
    pub fn to_text(&self) -> String {
        let show = |v: Option<usize>| v.map_or_else(|| "unknown".to_string(), |v| v.to_string());
        let rows = [
            ("q", self.q.to_string()),
            ("delta", self.delta.to_string()),
            ("alpha", show(self.alpha)),
            ("kappa", show(self.kappa)),
            ("alpha_bound", show(self.alpha_bound)),
            ("kappa_bound", show(self.kappa_bound)),
            ("singleton", show(self.singleton)),
            ("random_coding", self.random_coding.to_string()),
            (
                "mds_equality",
                self.mds_equality.map_or_else(|| "unknown".into(), |b| b.to_string()),
            ),
            ("lower", show(self.lower)),
            ("upper", show(self.upper)),
        ];
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            let _ = writeln!(out, "{k:<width$}  {v}");
        }
        for u in &self.unknown {
            let _ = writeln!(out, "note: {u}");
        }
        out
    }
}

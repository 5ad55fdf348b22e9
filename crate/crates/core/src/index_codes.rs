//! Linear index codes `E(x) = xL`, their decodability criteria, and the
//! instance parameters α(H) (generalized independence number) and κ_q(H)
//! (min-rank).
//!
//! Two independent routes decide whether `L` is a (δ, H)-ECIC:
//! [`verify_ecic`] computes each receiver's margin `d(L_{f(i)}, span L_{Y_i})`,
//! while [`verify_ecic_direct`] enumerates `I(q, H)` and checks `wt(zL)`.

use std::collections::HashMap;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field_linalg::{
    ensure_power_within, for_each_combination, solve_left, weight, Echelon, Elem, FMatrix, FVector, Field,
};
use crate::instance::{in_support_family_mask, projective_error_vectors, IcsiInstance};

/// Default limit on the number of assignments the min-rank search may cover (2^30).
pub const DEFAULT_ASSIGNMENT_BUDGET: u64 = 1 << 30;

/// Default limit on n for the generalized independence number search.
pub const DEFAULT_ALPHA_CAP: usize = 24;

/// An `n × N` encoding matrix bound to an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearIndexCode {
    instance: IcsiInstance,
    matrix: FMatrix,
}

impl LinearIndexCode {
    pub fn new(instance: IcsiInstance, matrix: FMatrix) -> Result<Self> {
        if matrix.rows() != instance.messages() {
            return Err(Error::LengthMismatch {
                expected: instance.messages(),
                got: matrix.rows(),
            });
        }
        Ok(LinearIndexCode { instance, matrix })
    }

    pub fn instance(&self) -> &IcsiInstance {
        &self.instance
    }

    pub fn matrix(&self) -> &FMatrix {
        &self.matrix
    }

    pub fn field(&self) -> &Field {
        self.matrix.field()
    }

    /// Code length N.
    pub fn length(&self) -> usize {
        self.matrix.cols()
    }

    /// `E(x) = xL`.
    pub fn encode(&self, x: &FVector) -> Result<FVector> {
        self.matrix.vec_mul(x)
    }
}

pub fn encode(code: &LinearIndexCode, x: &FVector) -> Result<FVector> {
    code.encode(x)
}

/// Named binary encoding matrices: `example1` (3 × 4, a (1, H)-ECIC of
/// minimum distance one) and `pentagon` (5 × 9, an optimal (2, H)-ECIC).
pub fn builtin_matrix(name: &str) -> Result<FMatrix> {
    let f2 = Field::new(2)?;
    match name {
        "example1" => FMatrix::parse_rows(&f2, &["1110", "1101", "1011"]),
        "pentagon" => FMatrix::parse_rows(&f2, &["111110000", "010110110", "110001110", "011001011", "101010011"]),
        _ => Err(Error::MalformedDocument(format!("unknown built-in matrix {name:?}"))),
    }
}

/// A receiver's margin with a witness `z ∈ I(q, H)` attaining `wt(zL) = value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Margin {
    pub receiver: usize,
    pub value: usize,
    pub witness: FVector,
}

fn margin_key(inst: &IcsiInstance, i: usize) -> (usize, Vec<usize>) {
    (inst.demand(i), inst.complement(i))
}

fn compute_margin(code: &LinearIndexCode, i: usize, budget: u64) -> Result<Margin> {
    let inst = code.instance();
    let l = code.matrix();
    let f = l.field();
    let demand = inst.demand(i);
    let ys = inst.complement(i);
    let target = l.row(demand);
    let y_rows: Vec<Vec<Elem>> = ys.iter().map(|&j| l.row(j).to_vec()).collect();
    let basis = FMatrix::from_rows(f, l.cols(), &y_rows)?.row_space_basis();
    ensure_power_within("margin enumeration", f.q() as u64, basis.rows(), budget)?;

    let mut best = (usize::MAX, vec![0; l.cols()]);
    let _ = for_each_combination(f, &basis.row_vecs(), l.cols(), |_, c| {
        let d = target.iter().zip(c).filter(|(a, b)| a != b).count();
        if d < best.0 {
            best = (d, c.to_vec());
            if d == 0 {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });

    // z = e_{f(i)} - Σ a_j e_j where the nearest point is Σ a_j L_j.
    let coeffs = solve_left(f, &y_rows, &best.1)
        .ok_or_else(|| Error::InternalContradiction("span element not expressible in its spanning rows".into()))?;
    let mut z = vec![0; inst.messages()];
    z[demand] = 1;
    for (&j, &a) in ys.iter().zip(&coeffs) {
        z[j] = f.neg(a);
    }
    Ok(Margin {
        receiver: i,
        value: best.0,
        witness: FVector::new(f, z)?,
    })
}

/// `d(L_{f(i)}, span{L_j : j ∈ Y_i})`, by enumerating the span over a basis.
pub fn receiver_margin(code: &LinearIndexCode, i: usize, budget: u64) -> Result<usize> {
    receiver_margin_with_witness(code, i, budget).map(|m| m.value)
}

pub fn receiver_margin_with_witness(code: &LinearIndexCode, i: usize, budget: u64) -> Result<Margin> {
    if i >= code.instance().receivers() {
        return Err(Error::IndexOutOfRange {
            what: "receiver",
            index: i + 1,
            max: code.instance().receivers(),
        });
    }
    compute_margin(code, i, budget)
}

/// Margins of every receiver. Receivers sharing `(f(i), Y_i)` share one computation.
pub fn all_margins(code: &LinearIndexCode, budget: u64) -> Result<Vec<Margin>> {
    let inst = code.instance();
    let mut memo: HashMap<(usize, Vec<usize>), Margin> = HashMap::new();
    let mut out = Vec::with_capacity(inst.receivers());
    for i in 0..inst.receivers() {
        let key = margin_key(inst, i);
        let m = match memo.get(&key) {
            Some(m) => Margin {
                receiver: i,
                ..m.clone()
            },
            None => {
                let m = compute_margin(code, i, budget)?;
                memo.insert(key, m.clone());
                m
            }
        };
        out.push(m);
    }
    Ok(out)
}

/// A vector `z ∈ I(q, H)` with `wt(zL) ≤ 2δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub receiver: Option<usize>,
    pub z: FVector,
    pub weight: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EcicVerdict {
    pub valid: bool,
    pub delta: usize,
    /// Per-receiver margins; empty for the direct route.
    pub margins: Vec<usize>,
    pub violation: Option<Violation>,
}

/// Decides whether `L` is a (δ, H)-ECIC: every receiver margin is at least 2δ + 1.
/// On failure the verdict carries a `z ∈ I(q, H)` with `wt(zL) ≤ 2δ`.
pub fn verify_ecic(code: &LinearIndexCode, delta: usize, budget: u64) -> Result<EcicVerdict> {
    let margins = all_margins(code, budget)?;
    let need = 2 * delta + 1;
    let worst = margins.iter().min_by_key(|m| m.value);
    let violation = worst.filter(|m| m.value < need).map(|m| Violation {
        receiver: Some(m.receiver),
        z: m.witness.clone(),
        weight: m.value,
    });
    Ok(EcicVerdict {
        valid: violation.is_none(),
        delta,
        margins: margins.iter().map(|m| m.value).collect(),
        violation,
    })
}

/// The same decision as [`verify_ecic`], reached by checking `wt(zL) ≥ 2δ + 1`
/// over one representative of every projective class of `I(q, H)`.
pub fn verify_ecic_direct(code: &LinearIndexCode, delta: usize, budget: u64) -> Result<EcicVerdict> {
    let need = 2 * delta + 1;
    let f = code.field();
    let zs = projective_error_vectors(code.instance(), f, budget)?;
    let violation = zs.into_iter().find_map(|z| {
        let w = weight(&code.matrix().combine_rows(&z));
        (w < need).then(|| Violation {
            receiver: None,
            z: FVector::new(f, z).unwrap(),
            weight: w,
        })
    });
    Ok(EcicVerdict {
        valid: violation.is_none(),
        delta,
        margins: Vec::new(),
        violation,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum CorrectionRadius {
    /// No receivers, so every δ works.
    Unbounded,
    /// Some receiver has margin zero: not even an index code.
    NotEvenIc,
    Radius(usize),
}

/// The largest δ for which `L` is a (δ, H)-ECIC: `⌊(min margin − 1) / 2⌋`.
pub fn correction_radius(code: &LinearIndexCode, budget: u64) -> Result<CorrectionRadius> {
    let margins = all_margins(code, budget)?;
    Ok(match margins.iter().map(|m| m.value).min() {
        None => CorrectionRadius::Unbounded,
        Some(0) => CorrectionRadius::NotEvenIc,
        Some(d) => CorrectionRadius::Radius((d - 1) / 2),
    })
}

/// Index-code test by linear solvability: for each receiver there must be a
/// vector `v ⊲ X_i` with `v + e_{f(i)} ∈ colspan(L)`. Only the coordinates
/// `{f(i)} ∪ Y_i` constrain the column combination, so this solves
/// `L_{{f(i)} ∪ Y_i} · a = (1, 0, …, 0)ᵀ`.
pub fn verify_ic(code: &LinearIndexCode) -> bool {
    let inst = code.instance();
    let l = code.matrix();
    (0..inst.receivers()).all(|i| {
        let mut coords = vec![inst.demand(i)];
        coords.extend(inst.complement(i));
        let columns: Vec<Vec<Elem>> = (0..l.cols())
            .map(|c| coords.iter().map(|&r| l.get(r, c)).collect())
            .collect();
        let mut rhs = vec![0; coords.len()];
        rhs[0] = 1;
        solve_left(l.field(), &columns, &rhs).is_some()
    })
}

/// A maximum generalized independent set (0-based, sorted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaResult {
    pub alpha: usize,
    pub witness: Vec<usize>,
}

/// α(H): the largest set all of whose nonempty subsets lie in `J(q, H)`.
///
/// Depth-first over sorted extensions. Generalized independence is closed
/// under taking subsets, so extending a valid set by `v` only needs the
/// subsets that contain `v`. The first maximum set met is the
/// lexicographically smallest one.
pub fn generalized_independence_number(inst: &IcsiInstance, cap: usize) -> Result<AlphaResult> {
    let n = inst.messages();
    if n > cap.min(63) {
        return Err(Error::budget(
            "generalized independence search",
            format!("n = {n}"),
            cap as u64,
        ));
    }

    fn extends(inst: &IcsiInstance, set: u64, v: usize) -> bool {
        let bit = 1u64 << v;
        let mut sub = set;
        loop {
            if !in_support_family_mask(inst, sub | bit) {
                return false;
            }
            if sub == 0 {
                return true;
            }
            sub = (sub - 1) & set;
        }
    }

    fn dfs(inst: &IcsiInstance, n: usize, set: u64, chosen: &mut Vec<usize>, start: usize, best: &mut Vec<usize>) {
        if chosen.len() > best.len() {
            *best = chosen.clone();
        }
        for v in start..n {
            if chosen.len() + (n - v) <= best.len() {
                return;
            }
            if extends(inst, set, v) {
                chosen.push(v);
                dfs(inst, n, set | 1 << v, chosen, v + 1, best);
                chosen.pop();
            }
        }
    }

    let mut best = Vec::new();
    dfs(inst, n, 0, &mut Vec::new(), 0, &mut best);
    Ok(AlphaResult {
        alpha: best.len(),
        witness: best,
    })
}

/// Brute-force definition check: is every nonempty subset of `set` in `J(q, H)`?
pub fn is_generalized_independent(inst: &IcsiInstance, set: &[usize]) -> bool {
    let mask = set.iter().fold(0u64, |m, &j| m | 1 << j);
    let mut sub = mask;
    while sub != 0 {
        if !in_support_family_mask(inst, sub) {
            return false;
        }
        sub = (sub - 1) & mask;
    }
    true
}

/// κ_q(H) with a minimizing assignment. `rows` is the `m × n` matrix whose
/// i-th row is `v_i + e_{f(i)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaResult {
    pub kappa: usize,
    pub rows: FMatrix,
    /// Assignment search nodes visited.
    pub nodes: u64,
}

/// κ_q(H) = min rank of `{v_i + e_{f(i)}}` over all `v_i ⊲ X_i`.
///
/// Exhaustive depth-first search over receivers sorted by `|X_i|`, with
/// assignments in lexicographic order and an incremental echelon basis. A
/// branch dies as soon as its partial rank reaches the best complete rank,
/// so once the partial rank is one below the best, only rows already in the
/// span are tried.
pub fn min_rank(inst: &IcsiInstance, field: &Field, budget: u64) -> Result<KappaResult> {
    let n = inst.messages();
    let m = inst.receivers();
    let total_free: usize = (0..m).map(|i| inst.side_info(i).len()).sum();
    ensure_power_within("min-rank assignments", field.q() as u64, total_free, budget)?;

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| inst.side_info(i).len());

    struct Search<'a> {
        inst: &'a IcsiInstance,
        field: &'a Field,
        order: Vec<usize>,
        basis: Echelon,
        current: Vec<Vec<Elem>>,
        best_rank: usize,
        best_rows: Vec<Vec<Elem>>,
        nodes: u64,
    }

    impl Search<'_> {
        fn run(&mut self, t: usize) {
            self.nodes += 1;
            let rank = self.basis.rank();
            if rank >= self.best_rank {
                return;
            }
            if t == self.order.len() {
                self.best_rank = rank;
                self.best_rows = self.current.clone();
                return;
            }
            let i = self.order[t];
            let side = self.inst.side_info(i).to_vec();
            let q = self.field.order();
            let mut digits = vec![0 as Elem; side.len()];
            loop {
                let mut row = vec![0 as Elem; self.inst.messages()];
                row[self.inst.demand(i)] = 1;
                for (&j, &d) in side.iter().zip(&digits) {
                    row[j] = d;
                }
                let residual = self.basis.reduce(&row);
                let grows = residual.iter().any(|&e| e != 0);
                if !grows || rank + 1 < self.best_rank {
                    if grows {
                        self.basis.insert_reduced(residual);
                    }
                    let slot = std::mem::replace(&mut self.current[i], row);
                    self.run(t + 1);
                    self.current[i] = slot;
                    if grows {
                        self.basis.pop();
                    }
                    // Nothing below a rank of one is possible with m ≥ 1.
                    if self.best_rank <= 1 {
                        return;
                    }
                }
                // Odometer, last coordinate fastest: lexicographic order.
                let mut k = digits.len();
                loop {
                    if k == 0 {
                        return;
                    }
                    k -= 1;
                    digits[k] = ((digits[k] as usize + 1) % q) as Elem;
                    if digits[k] != 0 {
                        break;
                    }
                }
            }
        }
    }

    // v_i = 0 everywhere is always feasible; its rank is the number of distinct demands.
    let zero_rows: Vec<Vec<Elem>> = (0..m)
        .map(|i| {
            let mut r = vec![0; n];
            r[inst.demand(i)] = 1;
            r
        })
        .collect();
    let baseline = FMatrix::from_rows(field, n, &zero_rows)?;
    let mut search = Search {
        inst,
        field,
        order,
        basis: Echelon::new(field, n),
        current: zero_rows.clone(),
        best_rank: baseline.rank(),
        best_rows: zero_rows,
        nodes: 0,
    };
    if m > 0 && search.best_rank > 1 {
        search.run(0);
    }
    Ok(KappaResult {
        kappa: search.best_rank,
        rows: FMatrix::from_rows(field, n, &search.best_rows)?,
        nodes: search.nodes,
    })
}

/// Checks a min-rank witness: row i is `e_{f(i)}` plus something supported on `X_i`.
pub fn is_valid_kappa_witness(inst: &IcsiInstance, rows: &FMatrix) -> bool {
    rows.rows() == inst.receivers()
        && rows.cols() == inst.messages()
        && (0..inst.receivers()).all(|i| {
            let d = inst.demand(i);
            rows.row(i).iter().enumerate().all(|(j, &e)| {
                if j == d {
                    e == 1
                } else {
                    e == 0 || inst.side_info(i).binary_search(&j).is_ok()
                }
            })
        })
}

/// Turns a min-rank witness into an `n × κ` index code: the columns are a basis
/// of the witness row space, so every `v_i + e_{f(i)}` lies in the column span.
pub fn ic_matrix_from_witness(rows: &FMatrix) -> FMatrix {
    rows.row_space_basis().transpose()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceParams {
    pub q: u32,
    pub alpha: AlphaResult,
    pub kappa: KappaResult,
}

pub fn instance_params(
    inst: &IcsiInstance,
    field: &Field,
    alpha_cap: usize,
    assignment_budget: u64,
) -> Result<InstanceParams> {
    Ok(InstanceParams {
        q: field.q(),
        alpha: generalized_independence_number(inst, alpha_cap)?,
        kappa: min_rank(inst, field, assignment_budget)?,
    })
}

//! Syndrome decoding at a single receiver.
//!
//! Receiver `i` knows `x_{X_i}` and sees `y_i = xL + ε_i`. Subtracting the
//! known part leaves `x_{f(i)} L_{f(i)} + Σ_{j ∈ Y_i} x_j L_j + ε_i`, a word of
//! the code `C_i = span({L_{f(i)}} ∪ L_{Y_i})` plus noise. A minimum-weight
//! solution `ε̂` of `H⁽ⁱ⁾ εᵀ = β` puts the word back into `C_i`, and the
//! coefficient of `L_{f(i)}` is read off. `ε̂` need not equal `ε_i`: it only
//! has to lie in `ε_i + span L_{Y_i}`, which changes the `Y_i` coefficients
//! and leaves the demanded one alone.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::field_linalg::{
    coset_leader, ensure_power_within, for_each_subset, parity_check_matrix, solve_left, Elem, FMatrix, FVector,
};
use crate::index_codes::LinearIndexCode;
use crate::instance::{receiver_frame, ReceiverFrame};

/// Precomputed decoding data for one receiver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceiverDecoder {
    pub frame: ReceiverFrame,
    /// Basis of `C_i`.
    pub code_space: FMatrix,
    /// `H⁽ⁱ⁾`, of rank `N − dim C_i`.
    pub parity: FMatrix,
    /// `L_{X_i}`, in the order of `frame.side_info`.
    pub side_rows: FMatrix,
    /// `L_{f(i)}` followed by `L_{Y_i}`.
    local_rows: Vec<Vec<Elem>>,
    /// Whether `L_{f(i)} ∉ span L_{Y_i}`, so that `x̂_{f(i)}` is unique.
    determined: bool,
}

pub fn build_receiver_decoder(code: &LinearIndexCode, i: usize) -> Result<ReceiverDecoder> {
    let frame = receiver_frame(code.instance(), i)?;
    let l = code.matrix();
    let mut local = vec![frame.demand];
    local.extend(&frame.complement);
    let local_m = l.select_rows(&local);
    let code_space = local_m.row_space_basis();
    let parity = parity_check_matrix(&code_space);
    if !code_space.mul(&parity.transpose())?.is_zero() {
        return Err(Error::InternalContradiction(
            "parity check does not annihilate C_i".into(),
        ));
    }
    let determined = code_space.rows() > l.select_rows(&frame.complement).rank();
    Ok(ReceiverDecoder {
        side_rows: l.select_rows(&frame.side_info),
        code_space,
        parity,
        local_rows: local_m.row_vecs(),
        determined,
        frame,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub receiver: usize,
    pub recovered: Elem,
    pub error_estimate: FVector,
    pub estimate_weight: usize,
    /// False when `ε̂` is heavier than the weight cap; `recovered` is then a
    /// best guess with no guarantee.
    pub within_cap: bool,
    /// Whether `recovered` equals the true symbol, when that is known.
    pub success: Option<bool>,
}

impl ReceiverDecoder {
    fn stripped(&self, y: &FVector, side: &[Elem]) -> Result<FVector> {
        if y.len() != self.parity.cols() {
            return Err(Error::LengthMismatch {
                expected: self.parity.cols(),
                got: y.len(),
            });
        }
        if side.len() != self.frame.side_info.len() {
            return Err(Error::LengthMismatch {
                expected: self.frame.side_info.len(),
                got: side.len(),
            });
        }
        let f = y.field();
        let known = FVector::new(f, side.to_vec())?;
        y.sub(&self.side_rows.vec_mul(&known)?)
    }

    /// Step 3 alone: given a member `e` of `ε_i + span L_{Y_i}`, solve
    /// `y − x_{X_i} L_{X_i} − e = x̂_{f(i)} L_{f(i)} + Σ x̂_j L_j` for `x̂_{f(i)}`.
    pub fn recover_with(&self, y: &FVector, side: &[Elem], error: &FVector) -> Result<Elem> {
        if !self.determined {
            return Err(Error::InternalContradiction(format!(
                "receiver {}: demanded column lies in the span of the unknown ones",
                self.frame.receiver + 1
            )));
        }
        let word = self.stripped(y, side)?.sub(error)?;
        let coeffs = solve_left(y.field(), &self.local_rows, word.entries()).ok_or_else(|| {
            Error::InternalContradiction(format!(
                "receiver {}: corrected word is not in C_i",
                self.frame.receiver + 1
            ))
        })?;
        Ok(coeffs[0])
    }
}

/// Runs the three decoding steps on `y_i`, with `side` holding `x_{X_i}` in
/// the order of the receiver's side-information set. The coset leader is
/// exact and unrestricted; `weight_cap` only sets the `within_cap` flag.
pub fn decode(dec: &ReceiverDecoder, y: &FVector, side: &[Elem], weight_cap: usize) -> Result<DecodeOutcome> {
    let beta = dec.parity.mul_vec(&dec.stripped(y, side)?)?;
    let estimate = coset_leader(&dec.parity, &beta, y.len())?;
    let recovered = dec.recover_with(y, side, &estimate)?;
    let w = estimate.weight();
    Ok(DecodeOutcome {
        receiver: dec.frame.receiver,
        recovered,
        estimate_weight: w,
        within_cap: w <= weight_cap,
        error_estimate: estimate,
        success: None,
    })
}

/// Whether `candidate − true_error ∈ span L_{Y_i}`.
pub fn in_relevant_error_set(dec: &ReceiverDecoder, candidate: &FVector, true_error: &FVector) -> Result<bool> {
    let diff = candidate.sub(true_error)?;
    let unknown_rows = &dec.local_rows[1..];
    Ok(solve_left(candidate.field(), unknown_rows, diff.entries()).is_some())
}

/// Channel errors for one broadcast.
#[derive(Clone, Copy, Debug)]
pub enum ErrorPattern<'a> {
    /// Every receiver sees the same error.
    Shared(&'a FVector),
    /// Receiver `i` sees the i-th error.
    PerReceiver(&'a [FVector]),
}

/// Encodes `x`, adds each receiver's error, and decodes at every receiver.
pub fn simulate_round(
    code: &LinearIndexCode,
    x: &FVector,
    errors: ErrorPattern<'_>,
    delta: usize,
) -> Result<Vec<DecodeOutcome>> {
    let inst = code.instance();
    if let ErrorPattern::PerReceiver(list) = errors {
        if list.len() != inst.receivers() {
            return Err(Error::LengthMismatch {
                expected: inst.receivers(),
                got: list.len(),
            });
        }
    }
    let y = code.encode(x)?;
    (0..inst.receivers())
        .map(|i| {
            let err = match errors {
                ErrorPattern::Shared(e) => e,
                ErrorPattern::PerReceiver(list) => &list[i],
            };
            let dec = build_receiver_decoder(code, i)?;
            let side: Vec<Elem> = dec.frame.side_info.iter().map(|&j| x.get(j)).collect();
            let mut out = decode(&dec, &y.add(err)?, &side, delta)?;
            out.success = Some(out.recovered == x.get(dec.frame.demand));
            Ok(out)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub x: FVector,
    pub error: FVector,
    pub receiver: usize,
    pub expected: Elem,
    pub recovered: Elem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectnessReport {
    pub passed: bool,
    pub delta: usize,
    pub decodes: u64,
    /// First failing decode in enumeration order.
    pub counterexample: Option<Counterexample>,
    /// Decodes whose `ε̂` left `ε_i + span L_{Y_i}`.
    pub relevance_violations: u64,
}

/// Every error vector of weight at most `r` over the field, by weight, then
/// support in lexicographic order, then values in odometer order.
fn low_weight_errors(code: &LinearIndexCode, r: usize) -> Vec<FVector> {
    let f = code.field();
    let n = code.length();
    let q = f.order();
    let mut out = Vec::new();
    for w in 0..=r.min(n) {
        let _ = for_each_subset::<()>(n, w, |support| {
            let mut vals = vec![1 as Elem; w];
            loop {
                let mut e = vec![0 as Elem; n];
                for (&c, &v) in support.iter().zip(&vals) {
                    e[c] = v;
                }
                out.push(FVector::new(f, e).unwrap());
                let Some(k) = (0..w).find(|&k| (vals[k] as usize) < q - 1) else {
                    break;
                };
                vals[k] += 1;
                vals[..k].fill(1);
            }
            ControlFlow::Continue(())
        });
    }
    out
}

/// Decodes every message `x ∈ F_q^n` under every error of weight at most δ
/// at every receiver, and checks both the output symbol and that each `ε̂`
/// is a relevant error pattern.
pub fn exhaustive_correctness_check(code: &LinearIndexCode, delta: usize, budget: u64) -> Result<CorrectnessReport> {
    let f = code.field();
    let n = code.instance().messages();
    let m = code.instance().receivers();
    let messages = ensure_power_within("correctness check messages", f.q() as u64, n, budget)?;
    let errors = low_weight_errors(code, delta);
    let total = messages
        .checked_mul(errors.len() as u64)
        .and_then(|t| t.checked_mul(m as u64))
        .filter(|&t| t <= budget)
        .ok_or_else(|| Error::budget("correctness check decodes", "q^n · V_q(N, δ) · m", budget))?;
    let decoders: Vec<ReceiverDecoder> = (0..m).map(|i| build_receiver_decoder(code, i)).collect::<Result<_>>()?;

    let mut report = CorrectnessReport {
        passed: true,
        delta,
        decodes: 0,
        counterexample: None,
        relevance_violations: 0,
    };
    let mut digits = vec![0 as Elem; n];
    for _ in 0..messages {
        let x = FVector::new(f, digits.clone())?;
        let y = code.encode(&x)?;
        for e in &errors {
            let received = y.add(e)?;
            for dec in &decoders {
                let side: Vec<Elem> = dec.frame.side_info.iter().map(|&j| x.get(j)).collect();
                let out = decode(dec, &received, &side, delta)?;
                report.decodes += 1;
                let expected = x.get(dec.frame.demand);
                if out.recovered != expected {
                    report.passed = false;
                    report.counterexample.get_or_insert_with(|| Counterexample {
                        x: x.clone(),
                        error: e.clone(),
                        receiver: dec.frame.receiver,
                        expected,
                        recovered: out.recovered,
                    });
                }
                if !in_relevant_error_set(dec, &out.error_estimate, e)? {
                    report.relevance_violations += 1;
                }
            }
        }
        // Odometer over F_q^n.
        for d in digits.iter_mut() {
            *d = ((*d as usize + 1) % f.order()) as Elem;
            if *d != 0 {
                break;
            }
        }
    }
    debug_assert_eq!(report.decodes, total);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_linalg::{Field, DEFAULT_ENUMERATION_BUDGET as B};
    use crate::index_codes::{builtin_matrix, verify_ecic};
    use crate::instance::{builtin_instance, IcsiInstance};

    fn example1() -> LinearIndexCode {
        LinearIndexCode::new(
            builtin_instance("example1").unwrap(),
            builtin_matrix("example1").unwrap(),
        )
        .unwrap()
    }

    fn pentagon_nine() -> LinearIndexCode {
        LinearIndexCode::new(
            builtin_instance("pentagon").unwrap(),
            builtin_matrix("pentagon").unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn receiver_spaces() {
        let d = build_receiver_decoder(&example1(), 0).unwrap();
        assert_eq!(d.code_space.rows(), 1);
        assert_eq!(d.parity.rank(), 3);

        let f3 = Field::new(3).unwrap();
        let plain = LinearIndexCode::new(IcsiInstance::no_side_info(3), FMatrix::identity(&f3, 3)).unwrap();
        let d = build_receiver_decoder(&plain, 1).unwrap();
        assert_eq!((d.code_space.rows(), d.parity.rows()), (3, 0));

        let d = build_receiver_decoder(&pentagon_nine(), 0).unwrap();
        assert_eq!(d.code_space.rows(), 3);
        assert_eq!(d.parity.rank(), 6);
        assert!(matches!(
            build_receiver_decoder(&pentagon_nine(), 5),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn example1_trace() {
        // x = (1,0,1) encodes to 0101; one flip gives 0001.
        let code = example1();
        let f2 = code.field().clone();
        let x = FVector::parse(&f2, "101").unwrap();
        assert_eq!(code.encode(&x).unwrap().to_string(), "0101");
        let y = FVector::parse(&f2, "0001").unwrap();
        let dec = build_receiver_decoder(&code, 0).unwrap();
        let out = decode(&dec, &y, &[0, 1], 1).unwrap();
        assert_eq!(out.recovered, 1);
        assert_eq!(out.error_estimate.to_string(), "0100");
        assert!(out.within_cap);
        assert_eq!(
            dec.parity.mul_vec(&out.error_estimate).unwrap(),
            dec.parity.mul_vec(&FVector::parse(&f2, "1010").unwrap()).unwrap()
        );
    }

    #[test]
    fn zero_error_decodes_exactly() {
        let code = pentagon_nine();
        let f2 = code.field().clone();
        let x = FVector::parse(&f2, "10110").unwrap();
        let zero = FVector::zeros(&f2, 9);
        for out in simulate_round(&code, &x, ErrorPattern::Shared(&zero), 2).unwrap() {
            assert_eq!(out.success, Some(true));
            assert!(out.error_estimate.is_zero());
        }
    }

    #[test]
    fn relevant_error_sets() {
        let code = pentagon_nine();
        let f2 = code.field().clone();
        let dec = build_receiver_decoder(&code, 0).unwrap();
        let e = FVector::parse(&f2, "010000001").unwrap();
        assert!(in_relevant_error_set(&dec, &e, &e).unwrap());
        // Y_1 = {3, 4}: adding L_3 stays in the set, adding L_1 does not.
        let shifted = e.add(&code.matrix().row_vector(2)).unwrap();
        assert!(in_relevant_error_set(&dec, &shifted, &e).unwrap());
        let off = e.add(&code.matrix().row_vector(0)).unwrap();
        assert!(!in_relevant_error_set(&dec, &off, &e).unwrap());

        let ex = example1();
        let dec = build_receiver_decoder(&ex, 0).unwrap();
        let a = FVector::parse(&f2, "1000").unwrap();
        let b = FVector::parse(&f2, "0100").unwrap();
        assert!(!in_relevant_error_set(&dec, &a, &b).unwrap());
    }

    #[test]
    fn any_relevant_pattern_recovers_the_symbol() {
        let code = pentagon_nine();
        let f2 = code.field().clone();
        let x = FVector::parse(&f2, "11010").unwrap();
        let e = FVector::parse(&f2, "000100010").unwrap();
        let y = code.encode(&x).unwrap().add(&e).unwrap();
        let dec = build_receiver_decoder(&code, 0).unwrap();
        let side: Vec<Elem> = dec.frame.side_info.iter().map(|&j| x.get(j)).collect();
        for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let mut member = e.clone();
            if a == 1 {
                member = member.add(&code.matrix().row_vector(2)).unwrap();
            }
            if b == 1 {
                member = member.add(&code.matrix().row_vector(3)).unwrap();
            }
            assert_eq!(dec.recover_with(&y, &side, &member).unwrap(), 1);
        }
    }

    #[test]
    fn exhaustive_checks() {
        let r = exhaustive_correctness_check(&example1(), 1, B).unwrap();
        assert!(r.passed);
        assert_eq!(r.decodes, 120);
        assert_eq!(r.relevance_violations, 0);

        let r = exhaustive_correctness_check(&pentagon_nine(), 2, B).unwrap();
        assert!(r.passed);
        assert_eq!(r.decodes, 32 * 46 * 5);
        assert_eq!(r.relevance_violations, 0);

        let r = exhaustive_correctness_check(&example1(), 2, B).unwrap();
        assert!(!r.passed);
        let c = r.counterexample.unwrap();
        assert!(c.error.weight() == 2 && c.expected != c.recovered);
        assert!(matches!(
            exhaustive_correctness_check(&pentagon_nine(), 2, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn per_receiver_errors() {
        let code = example1();
        let f2 = code.field().clone();
        let x = FVector::parse(&f2, "011").unwrap();
        let errs: Vec<FVector> = ["1000", "0010", "0001"]
            .iter()
            .map(|s| FVector::parse(&f2, s).unwrap())
            .collect();
        let outs = simulate_round(&code, &x, ErrorPattern::PerReceiver(&errs), 1).unwrap();
        assert!(outs.iter().all(|o| o.success == Some(true)));
        assert!(simulate_round(&code, &x, ErrorPattern::PerReceiver(&errs[..2]), 1).is_err());
    }

    #[test]
    fn duality_with_verifier_on_example1() {
        let code = example1();
        for delta in 0..3 {
            let v = verify_ecic(&code, delta, B).unwrap().valid;
            assert_eq!(exhaustive_correctness_check(&code, delta, B).unwrap().passed, v);
        }
    }
}

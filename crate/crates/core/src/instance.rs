//! ICSI instances `(m, n, X, f)`: receivers, messages, side information and
//! demands, plus the derived families used by every decodability test.
//!
//! The Rust API is 0-based. The JSON document and every report use 1-based
//! indices, so `{"m":1,"n":2,"f":[1],"X":[[2]]}` is receiver 1 demanding
//! message 1 while holding message 2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_linalg::{Elem, FVector, Field};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IcsiInstance {
    n: usize,
    demands: Vec<usize>,
    side_info: Vec<Vec<usize>>,
}

/// One receiver's view of the message index set: `{f(i)}`, `X_i` and the
/// remainder `Y_i` partition `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceiverFrame {
    pub receiver: usize,
    pub demand: usize,
    pub side_info: Vec<usize>,
    pub complement: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct InstanceDocument {
    m: usize,
    n: usize,
    f: Vec<usize>,
    #[serde(rename = "X")]
    x: Vec<Vec<usize>>,
}

impl IcsiInstance {
    /// Validates and builds an instance from 0-based demands and side-information sets.
    pub fn new(n: usize, demands: Vec<usize>, side_info: Vec<Vec<usize>>) -> Result<Self> {
        if demands.len() != side_info.len() {
            return Err(Error::MalformedDocument(format!(
                "{} demands but {} side-information sets",
                demands.len(),
                side_info.len()
            )));
        }
        let mut sorted_sets = Vec::with_capacity(side_info.len());
        for (i, (&d, set)) in demands.iter().zip(&side_info).enumerate() {
            if d >= n {
                return Err(Error::IndexOutOfRange {
                    what: "demand",
                    index: d + 1,
                    max: n,
                });
            }
            let mut set = set.clone();
            set.sort_unstable();
            for w in set.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::MalformedDocument(format!(
                        "X_{} lists message {} twice",
                        i + 1,
                        w[0] + 1
                    )));
                }
            }
            if let Some(&j) = set.iter().find(|&&j| j >= n) {
                return Err(Error::IndexOutOfRange {
                    what: "side-information",
                    index: j + 1,
                    max: n,
                });
            }
            if set.binary_search(&d).is_ok() {
                return Err(Error::DemandInSideInfo {
                    receiver: i + 1,
                    demand: d + 1,
                });
            }
            sorted_sets.push(set);
        }
        Ok(IcsiInstance {
            n,
            demands,
            side_info: sorted_sets,
        })
    }

    /// Builds an instance from 1-based demands and sets, as written in documents.
    pub fn from_one_based(n: usize, demands: &[usize], side_info: &[Vec<usize>]) -> Result<Self> {
        let to_zero = |what: &'static str, j: usize| {
            j.checked_sub(1)
                .ok_or(Error::IndexOutOfRange { what, index: 0, max: n })
        };
        let demands = demands
            .iter()
            .map(|&d| to_zero("demand", d))
            .collect::<Result<Vec<_>>>()?;
        let side_info = side_info
            .iter()
            .map(|s| s.iter().map(|&j| to_zero("side-information", j)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Self::new(n, demands, side_info)
    }

    /// The instance with `f = id` and no side information: classical coding.
    pub fn no_side_info(n: usize) -> Self {
        Self::new(n, (0..n).collect(), vec![Vec::new(); n]).unwrap()
    }

    pub fn receivers(&self) -> usize {
        self.demands.len()
    }

    pub fn messages(&self) -> usize {
        self.n
    }

    pub fn demand(&self, i: usize) -> usize {
        self.demands[i]
    }

    pub fn demands(&self) -> &[usize] {
        &self.demands
    }

    /// Sorted 0-based side-information set of receiver `i`.
    pub fn side_info(&self, i: usize) -> &[usize] {
        &self.side_info[i]
    }

    /// `Y_i = [n] \ ({f(i)} ∪ X_i)`, sorted.
    pub fn complement(&self, i: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&j| j != self.demands[i] && self.side_info[i].binary_search(&j).is_err())
            .collect()
    }

    /// Side-information set as a bitmask; requires n ≤ 64.
    pub(crate) fn side_mask(&self, i: usize) -> u64 {
        self.side_info[i].iter().fold(0, |m, &j| m | 1 << j)
    }

    /// Directed edges `(f(i), X_i)` of the side-information hypergraph, one per
    /// receiver, 0-based.
    pub fn hyperedges(&self) -> impl Iterator<Item = (usize, &[usize])> {
        self.demands
            .iter()
            .zip(&self.side_info)
            .map(|(&d, x)| (d, x.as_slice()))
    }

    pub fn to_json(&self) -> String {
        let doc = InstanceDocument {
            m: self.receivers(),
            n: self.n,
            f: self.demands.iter().map(|d| d + 1).collect(),
            x: self
                .side_info
                .iter()
                .map(|s| s.iter().map(|j| j + 1).collect())
                .collect(),
        };
        serde_json::to_string(&doc).unwrap()
    }
}

/// Parses the JSON instance document `{"m", "n", "f", "X"}` (1-based).
pub fn parse_instance(text: &str) -> Result<IcsiInstance> {
    let doc: InstanceDocument = serde_json::from_str(text).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    if doc.f.len() != doc.m || doc.x.len() != doc.m {
        return Err(Error::MalformedDocument(format!(
            "m = {} but f has {} entries and X has {}",
            doc.m,
            doc.f.len(),
            doc.x.len()
        )));
    }
    IcsiInstance::from_one_based(doc.n, &doc.f, &doc.x)
}

/// Named instances: `pentagon`, `example1`, `odd-cycle-complement:<l>` and
/// `no-side-info:<n>`.
pub fn builtin_instance(name: &str) -> Result<IcsiInstance> {
    let param = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::MalformedDocument(format!("bad parameter in {name:?}")))
    };
    match name {
        "pentagon" => IcsiInstance::from_one_based(
            5,
            &[1, 2, 3, 4, 5],
            &[vec![2, 5], vec![1, 3], vec![2, 4], vec![3, 5], vec![1, 4]],
        ),
        "example1" => IcsiInstance::from_one_based(3, &[1, 2, 3], &[vec![2, 3], vec![1, 3], vec![1, 2]]),
        _ => {
            if let Some(l) = name.strip_prefix("odd-cycle-complement:") {
                odd_cycle_complement(param(l)?)
            } else if let Some(n) = name.strip_prefix("no-side-info:") {
                Ok(IcsiInstance::no_side_info(param(n)?))
            } else {
                Err(Error::MalformedDocument(format!("unknown built-in instance {name:?}")))
            }
        }
    }
}

/// `n = 2l + 1` receivers, each knowing every message except its own and its
/// two cyclic neighbours. The side-information graph is the complement of
/// the odd cycle `C_n`.
pub fn odd_cycle_complement(l: usize) -> Result<IcsiInstance> {
    if l == 0 {
        return Err(Error::MalformedDocument("odd-cycle-complement needs l ≥ 1".into()));
    }
    let n = 2 * l + 1;
    let side = (0..n)
        .map(|i| {
            let (prev, next) = ((i + n - 1) % n, (i + 1) % n);
            (0..n).filter(|&j| j != i && j != prev && j != next).collect()
        })
        .collect();
    IcsiInstance::new(n, (0..n).collect(), side)
}

pub fn receiver_frame(inst: &IcsiInstance, i: usize) -> Result<ReceiverFrame> {
    if i >= inst.receivers() {
        return Err(Error::IndexOutOfRange {
            what: "receiver",
            index: i + 1,
            max: inst.receivers(),
        });
    }
    Ok(ReceiverFrame {
        receiver: i,
        demand: inst.demand(i),
        side_info: inst.side_info(i).to_vec(),
        complement: inst.complement(i),
    })
}

/// Membership of a 0-based index set `K` in the support family `J(q, H)`:
/// some receiver demands a message in `K` and holds none of `K`.
pub fn in_support_family(inst: &IcsiInstance, k: &[usize]) -> Result<bool> {
    if k.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(&j) = k.iter().find(|&&j| j >= inst.messages()) {
        return Err(Error::IndexOutOfRange {
            what: "message",
            index: j + 1,
            max: inst.messages(),
        });
    }
    Ok((0..inst.receivers())
        .any(|i| k.contains(&inst.demand(i)) && !k.iter().any(|j| inst.side_info(i).binary_search(j).is_ok())))
}

/// Bitmask form of [`in_support_family`]; requires n ≤ 64 and `k != 0`.
pub(crate) fn in_support_family_mask(inst: &IcsiInstance, k: u64) -> bool {
    (0..inst.receivers()).any(|i| k >> inst.demand(i) & 1 == 1 && k & inst.side_mask(i) == 0)
}

/// Streams the set `I(q, H)`: every `z` with `z_{X_i} = 0` and `z_{f(i)} ≠ 0`
/// for some receiver `i`. Receivers are visited in order and a vector is
/// emitted only by the first receiver that generates it, so the stream has
/// no duplicates.
pub struct ErrorVectors {
    inst: IcsiInstance,
    field: Field,
    receiver: usize,
    free: Vec<usize>,
    digits: Vec<Elem>,
    fresh: bool,
}

impl ErrorVectors {
    fn start_receiver(&mut self) {
        if self.receiver < self.inst.receivers() {
            let mut free = vec![self.inst.demand(self.receiver)];
            free.extend(self.inst.complement(self.receiver));
            self.digits = vec![0; free.len()];
            self.digits[0] = 1;
            self.free = free;
            self.fresh = true;
        }
    }

    fn advance(&mut self) -> bool {
        let q = self.field.order();
        for j in 0..self.digits.len() {
            let next = (self.digits[j] as usize + 1) % q;
            // Position 0 is the demand coordinate and cycles through 1..q only.
            if j == 0 && next == 0 {
                self.digits[0] = 1;
                continue;
            }
            self.digits[j] = next as Elem;
            if next != 0 {
                return true;
            }
        }
        false
    }

    fn current(&self) -> Vec<Elem> {
        let mut z = vec![0; self.inst.messages()];
        for (&pos, &d) in self.free.iter().zip(&self.digits) {
            z[pos] = d;
        }
        z
    }

    fn generated_earlier(&self, z: &[Elem]) -> bool {
        (0..self.receiver).any(|i| z[self.inst.demand(i)] != 0 && self.inst.side_info(i).iter().all(|&j| z[j] == 0))
    }
}

impl Iterator for ErrorVectors {
    type Item = FVector;

    fn next(&mut self) -> Option<FVector> {
        while self.receiver < self.inst.receivers() {
            if !self.fresh && !self.advance() {
                self.receiver += 1;
                self.start_receiver();
                continue;
            }
            self.fresh = false;
            let z = self.current();
            if !self.generated_earlier(&z) {
                return Some(FVector::new(&self.field, z).unwrap());
            }
        }
        None
    }
}

/// Number of candidates the stream for `I(q, H)` will examine, if it fits in a u64.
pub fn error_vector_work(inst: &IcsiInstance, field: &Field) -> Option<u64> {
    let q = field.q() as u64;
    (0..inst.receivers()).try_fold(0u64, |acc, i| {
        let per = crate::field_linalg::checked_power(q, inst.complement(i).len())?.checked_mul(q - 1)?;
        acc.checked_add(per)
    })
}

pub fn enumerate_error_vectors(inst: &IcsiInstance, field: &Field, budget: u64) -> Result<ErrorVectors> {
    match error_vector_work(inst, field) {
        Some(w) if w <= budget => {}
        _ => return Err(Error::budget("error-vector enumeration", "Σ (q-1)·q^|Y_i|", budget)),
    }
    let mut stream = ErrorVectors {
        inst: inst.clone(),
        field: field.clone(),
        receiver: 0,
        free: Vec::new(),
        digits: Vec::new(),
        fresh: true,
    };
    stream.start_receiver();
    Ok(stream)
}

/// One representative per projective class of `I(q, H)`: the members whose
/// first nonzero coordinate is 1. `I(q, H)` is closed under nonzero scaling,
/// so this loses nothing for weight conditions.
pub fn projective_error_vectors(inst: &IcsiInstance, field: &Field, budget: u64) -> Result<Vec<Vec<Elem>>> {
    Ok(enumerate_error_vectors(inst, field, budget)?
        .map(FVector::into_entries)
        .filter(|z| z.iter().find(|&&e| e != 0) == Some(&1))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn one_based(v: &[usize]) -> Vec<usize> {
        v.iter().map(|j| j + 1).collect()
    }

    #[test]
    fn parses_worked_instances() {
        let pent = parse_instance(r#"{"m":5,"n":5,"f":[1,2,3,4,5],"X":[[2,5],[1,3],[2,4],[3,5],[1,4]]}"#).unwrap();
        assert_eq!(pent, builtin_instance("pentagon").unwrap());
        let ex1 = parse_instance(r#"{"m":3,"n":3,"f":[1,2,3],"X":[[2,3],[1,3],[1,2]]}"#).unwrap();
        assert_eq!(ex1, builtin_instance("example1").unwrap());
        assert_eq!(parse_instance(&ex1.to_json()).unwrap(), ex1);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_instance(r#"{"m":1,"n":2,"f":[1],"X":[[1,2]]}"#),
            Err(Error::DemandInSideInfo { receiver: 1, demand: 1 })
        );
        assert!(matches!(
            parse_instance(r#"{"m":1,"n":2,"f":[3],"X":[[]]}"#),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            parse_instance(r#"{"m":1,"n":2,"f":[1],"X":[[0]]}"#),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            parse_instance(r#"{"m":2,"n":2,"f":[1],"X":[[2]]}"#),
            Err(Error::MalformedDocument(_))
        ));
        assert!(matches!(
            parse_instance(r#"{"m":1,"n":3,"f":[1],"X":[[2,2]]}"#),
            Err(Error::MalformedDocument(_))
        ));
        assert!(matches!(parse_instance("not json"), Err(Error::MalformedDocument(_))));
        assert!(builtin_instance("hexagon").is_err());
    }

    #[test]
    fn frames() {
        let pent = builtin_instance("pentagon").unwrap();
        let fr = receiver_frame(&pent, 0).unwrap();
        assert_eq!(fr.demand, 0);
        assert_eq!(one_based(&fr.side_info), vec![2, 5]);
        assert_eq!(one_based(&fr.complement), vec![3, 4]);

        let ex1 = builtin_instance("example1").unwrap();
        assert!(receiver_frame(&ex1, 0).unwrap().complement.is_empty());

        let none = IcsiInstance::no_side_info(4);
        assert_eq!(one_based(&receiver_frame(&none, 1).unwrap().complement), vec![1, 3, 4]);
        assert!(matches!(receiver_frame(&none, 4), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn frames_partition_the_messages() {
        for inst in [
            builtin_instance("pentagon").unwrap(),
            builtin_instance("odd-cycle-complement:3").unwrap(),
        ] {
            for i in 0..inst.receivers() {
                let fr = receiver_frame(&inst, i).unwrap();
                let mut all = fr.side_info.clone();
                all.extend(&fr.complement);
                all.push(fr.demand);
                all.sort_unstable();
                assert_eq!(all, (0..inst.messages()).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn support_family_membership() {
        let pent = builtin_instance("pentagon").unwrap();
        assert_eq!(in_support_family(&pent, &[0, 2]), Ok(true));
        assert_eq!(in_support_family(&pent, &[0, 1]), Ok(false));
        let ex1 = builtin_instance("example1").unwrap();
        assert_eq!(in_support_family(&ex1, &[0]), Ok(true));
        assert_eq!(in_support_family(&ex1, &[]), Err(Error::EmptySet));
        for k in 1u64..32 {
            let set: Vec<usize> = (0..5).filter(|j| k >> j & 1 == 1).collect();
            assert_eq!(
                in_support_family(&pent, &set).unwrap(),
                in_support_family_mask(&pent, k)
            );
        }
    }

    #[test]
    fn example1_error_vectors() {
        let f2 = Field::new(2).unwrap();
        let ex1 = builtin_instance("example1").unwrap();
        let zs: Vec<String> = enumerate_error_vectors(&ex1, &f2, 1 << 20)
            .unwrap()
            .map(|z| z.to_string())
            .collect();
        assert_eq!(zs, vec!["100", "010", "001"]);
    }

    #[test]
    fn no_side_info_gives_every_nonzero_vector() {
        for q in [2u32, 3, 4] {
            let f = Field::new(q).unwrap();
            let inst = IcsiInstance::no_side_info(3);
            let zs: Vec<FVector> = enumerate_error_vectors(&inst, &f, 1 << 20).unwrap().collect();
            let distinct: HashSet<Vec<Elem>> = zs.iter().map(|z| z.entries().to_vec()).collect();
            assert_eq!(zs.len(), (q as usize).pow(3) - 1);
            assert_eq!(distinct.len(), zs.len());
            assert!(zs.iter().all(|z| !z.is_zero()));
        }
    }

    #[test]
    fn pentagon_error_vectors_match_brute_force() {
        let f2 = Field::new(2).unwrap();
        let pent = builtin_instance("pentagon").unwrap();
        let streamed: HashSet<Vec<Elem>> = enumerate_error_vectors(&pent, &f2, 1 << 20)
            .unwrap()
            .map(FVector::into_entries)
            .collect();
        // Oracle: test all 31 nonzero vectors against the defining predicate.
        let brute: HashSet<Vec<Elem>> = (1u32..32)
            .map(|k| (0..5).map(|j| (k >> j & 1) as Elem).collect::<Vec<_>>())
            .filter(|z| (0..5).any(|i| z[pent.demand(i)] != 0 && pent.side_info(i).iter().all(|&j| z[j] == 0)))
            .collect();
        // 5 receivers × 4 vectors, but each non-adjacent pair (i, j) shares e_i + e_j.
        assert_eq!(brute.len(), 15);
        assert_eq!(streamed, brute);
        assert_eq!(projective_error_vectors(&pent, &f2, 1 << 20).unwrap().len(), 15);
    }

    #[test]
    fn budget_is_enforced() {
        let f2 = Field::new(2).unwrap();
        let inst = IcsiInstance::no_side_info(30);
        assert!(matches!(
            enumerate_error_vectors(&inst, &f2, 1 << 20),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn odd_cycle_complement_shape() {
        let inst = odd_cycle_complement(2).unwrap();
        assert_eq!(inst.messages(), 5);
        assert_eq!(one_based(inst.side_info(0)), vec![3, 4]);
        assert_eq!(one_based(inst.side_info(4)), vec![2, 3]);
        assert!((0..5).all(|i| inst.side_info(i).len() == 2));
        let inst = odd_cycle_complement(3).unwrap();
        assert!((0..7).all(|i| inst.side_info(i).len() == 4));
    }
}

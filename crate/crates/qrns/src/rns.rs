//! Moduli-set construction and validation, forward residue conversion, and
//! Chinese-remainder reconstruction.
//!
//! Moduli are drawn from the three power-of-two families `2^k - 1`, `2^k`,
//! and `2^k + 1`; a valid set is pairwise coprime and its range is the exact
//! product of the moduli. Arithmetic is exact in `u128` with checked
//! multiplication, which covers every supported width.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimator::DesignId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RnsError {
    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("a moduli set needs at least one modulus")]
    EmptySet,
    #[error("moduli product overflows the supported range")]
    RangeOverflow,
    #[error("value {value} out of range [0, {range})")]
    ValueOutOfRange { value: u128, range: u128 },
    #[error("no published set for input width {0}; widths 3..=8 are tabulated")]
    NoPaperSet(u32),
    #[error("expected {expected} residues, got {got}")]
    ResidueCountMismatch { expected: usize, got: usize },
    #[error("residue {residue} not reduced modulo {modulus}")]
    ResidueTooLarge { residue: u64, modulus: u64 },
    #[error("modulus family width k must be in [1, 62], got {0}")]
    WidthOutOfRange(u32),
    #[error("search width must be in [2, 16], got {0}")]
    SearchWidthOutOfRange(u32),
    #[error("no feasible moduli set found for width {0}")]
    Infeasible(u32),
}

/// The three supported modulus families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "POW2")]
    Pow2,
    #[serde(rename = "MERSENNE_LIKE")]
    MersenneLike,
    #[serde(rename = "FERMAT_LIKE")]
    FermatLike,
}

/// One modulus: its family, the width `k`, and the resulting value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Modulus {
    family: Family,
    k: u32,
    value: u64,
}

impl Modulus {
    pub fn new(family: Family, k: u32) -> Result<Self, RnsError> {
        let min_k = if family == Family::MersenneLike { 2 } else { 1 };
        if k < min_k || k > 62 {
            return Err(RnsError::WidthOutOfRange(k));
        }
        let value = match family {
            Family::Pow2 => 1u64 << k,
            Family::MersenneLike => (1u64 << k) - 1,
            Family::FermatLike => (1u64 << k) + 1,
        };
        Ok(Self { family, k, value })
    }

    /// Classifies a raw value into its family, if it belongs to one.
    /// The ambiguous value 3 reads as `2^2 - 1`, matching the tabulated
    /// sets, rather than `2^1 + 1`.
    pub fn from_value(value: u64) -> Option<Self> {
        for shift in 1..=62u32 {
            let p = 1u64 << shift;
            if value == p {
                return Some(Self {
                    family: Family::Pow2,
                    k: shift,
                    value,
                });
            }
        }
        for shift in 2..=62u32 {
            let p = 1u64 << shift;
            if value == p - 1 {
                return Some(Self {
                    family: Family::MersenneLike,
                    k: shift,
                    value,
                });
            }
        }
        for shift in 1..=62u32 {
            let p = 1u64 << shift;
            if value == p + 1 {
                return Some(Self {
                    family: Family::FermatLike,
                    k: shift,
                    value,
                });
            }
        }
        None
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// The estimator design that implements this modulus family.
    pub fn design(&self) -> DesignId {
        match self.family {
            Family::Pow2 => DesignId::Mod2n,
            Family::MersenneLike => DesignId::Mod2nMinus1,
            Family::FermatLike => DesignId::Mod2nPlus1,
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A pairwise-coprime list of moduli with its exact range (the product of
/// the values).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuliSet {
    moduli: Vec<Modulus>,
    range: u128,
}

impl ModuliSet {
    pub fn new(moduli: Vec<Modulus>) -> Result<Self, RnsError> {
        if moduli.is_empty() {
            return Err(RnsError::EmptySet);
        }
        for (i, a) in moduli.iter().enumerate() {
            for b in &moduli[i + 1..] {
                if gcd(a.value(), b.value()) != 1 {
                    return Err(RnsError::NotCoprime(a.value(), b.value()));
                }
            }
        }
        let range = moduli
            .iter()
            .try_fold(1u128, |acc, m| acc.checked_mul(u128::from(m.value())))
            .ok_or(RnsError::RangeOverflow)?;
        Ok(Self { moduli, range })
    }

    pub fn from_values(values: &[u64]) -> Result<Self, RnsError> {
        let moduli = values
            .iter()
            .map(|&v| {
                Modulus::from_value(v).ok_or(RnsError::ValueOutOfRange {
                    value: u128::from(v),
                    range: 0,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(moduli)
    }

    pub fn moduli(&self) -> &[Modulus] {
        &self.moduli
    }

    pub fn len(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }

    pub fn range(&self) -> u128 {
        self.range
    }

    pub fn values(&self) -> Vec<u64> {
        self.moduli.iter().map(Modulus::value).collect()
    }

    /// Human form, e.g. `(3, 4, 5)`.
    pub fn display_values(&self) -> String {
        let vals: Vec<String> = self.moduli.iter().map(|m| m.value().to_string()).collect();
        format!("({})", vals.join(", "))
    }
}

/// Exact product of the set's moduli.
pub fn range_of(set: &ModuliSet) -> u128 {
    set.moduli
        .iter()
        .fold(1u128, |acc, m| acc * u128::from(m.value()))
}

/// The tabulated set for each input width 3..=8.
pub fn paper_set_lookup(n: u32) -> Result<ModuliSet, RnsError> {
    let values: &[u64] = match n {
        3 => &[3, 4, 5],
        4 => &[5, 8, 9],
        5 => &[4, 5, 7, 9],
        6 => &[5, 7, 9, 16],
        7 => &[7, 9, 16, 17],
        8 => &[5, 7, 9, 16, 17],
        _ => return Err(RnsError::NoPaperSet(n)),
    };
    ModuliSet::from_values(values)
}

/// Primary metric minimized by [`search_set`]; ties always break by max
/// T count, then max qubits, then set size, then lexicographic values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchObjective {
    #[default]
    ToffoliDepth,
    TCount,
    Qubits,
}

type SearchScore = (u64, u64, u64, usize, Vec<u64>);

/// Exhaustively searches pairwise-coprime subsets of
/// `{2^k - 1, 2^k, 2^k + 1 : 2 <= k <= n}` (at most one power of two) whose
/// range strictly exceeds the maximum product `(2^n - 1)^2`, and returns the
/// best set under the objective.
pub fn search_set(n: u32, objective: SearchObjective) -> Result<ModuliSet, RnsError> {
    if !(2..=16).contains(&n) {
        return Err(RnsError::SearchWidthOutOfRange(n));
    }
    let mut pool = Vec::new();
    for k in 2..=n {
        pool.push(Modulus::new(Family::MersenneLike, k)?);
        pool.push(Modulus::new(Family::Pow2, k)?);
        pool.push(Modulus::new(Family::FermatLike, k)?);
    }
    pool.sort_by_key(Modulus::value);
    let needed = {
        let top = (1u128 << n) - 1;
        top * top
    };

    // Score: (primary, max t. count, max qubits, set size, values) so that
    // plain tuple ordering picks the winner deterministically.
    let score = |set: &ModuliSet| -> SearchScore {
        let reports: Vec<_> = set
            .moduli()
            .iter()
            .map(|m| crate::estimator::estimate(m.design(), m.k()).expect("k >= 2"))
            .collect();
        let max = |f: fn(&crate::estimator::FormulaReport) -> u64| {
            reports.iter().map(f).max().unwrap_or(0)
        };
        let primary = match objective {
            SearchObjective::ToffoliDepth => max(|r| r.toffoli_depth),
            SearchObjective::TCount => max(|r| r.t_count),
            SearchObjective::Qubits => max(|r| r.qubits),
        };
        (
            primary,
            max(|r| r.t_count),
            max(|r| r.qubits),
            set.len(),
            set.values(),
        )
    };

    let mut best: Option<(ModuliSet, SearchScore)> = None;
    let mut chosen: Vec<Modulus> = Vec::new();
    search_rec(&pool, 0, &mut chosen, 1, needed, &mut |candidate| {
        let set = ModuliSet::new(candidate.to_vec()).expect("search candidates are coprime");
        let s = score(&set);
        match &best {
            Some((_, b)) if *b <= s => {}
            _ => best = Some((set, s)),
        }
    });
    best.map(|(set, _)| set).ok_or(RnsError::Infeasible(n))
}

fn search_rec(
    pool: &[Modulus],
    index: usize,
    chosen: &mut Vec<Modulus>,
    product: u128,
    needed: u128,
    report: &mut impl FnMut(&[Modulus]),
) {
    if product > needed && !chosen.is_empty() {
        report(chosen);
    }
    for (offset, m) in pool[index..].iter().enumerate() {
        if m.family() == Family::Pow2 && chosen.iter().any(|c| c.family() == Family::Pow2) {
            continue;
        }
        if chosen.iter().any(|c| gcd(c.value(), m.value()) != 1) {
            continue;
        }
        let Some(next) = product.checked_mul(u128::from(m.value())) else {
            continue;
        };
        chosen.push(*m);
        search_rec(pool, index + offset + 1, chosen, next, needed, report);
        chosen.pop();
    }
}

/// Residues of `x` modulo every set member, in set order.
pub fn forward_convert(x: u128, set: &ModuliSet) -> Result<Vec<u64>, RnsError> {
    if x >= set.range() {
        return Err(RnsError::ValueOutOfRange {
            value: x,
            range: set.range(),
        });
    }
    Ok(set
        .moduli()
        .iter()
        .map(|m| (x % u128::from(m.value())) as u64)
        .collect())
}

fn mod_inverse(a: u128, m: u128) -> Option<u128> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u128)
}

/// The unique `x` in `[0, range)` congruent to every residue, via
/// precomputed CRT coefficients.
pub fn crt_reconstruct(residues: &[u64], set: &ModuliSet) -> Result<u128, RnsError> {
    if residues.len() != set.len() {
        return Err(RnsError::ResidueCountMismatch {
            expected: set.len(),
            got: residues.len(),
        });
    }
    for (&r, m) in residues.iter().zip(set.moduli()) {
        if r >= m.value() {
            return Err(RnsError::ResidueTooLarge {
                residue: r,
                modulus: m.value(),
            });
        }
    }
    let range = set.range();
    let mut acc = 0u128;
    for (&r, m) in residues.iter().zip(set.moduli()) {
        let mv = u128::from(m.value());
        let partial = range / mv;
        let inv = mod_inverse(partial % mv, mv).expect("set members are pairwise coprime");
        // (r * inv mod m) * partial < m * partial = range, so the term and
        // the running sum both stay well inside u128 after reduction.
        let term = ((u128::from(r) * inv) % mv) * partial % range;
        acc = (acc + term) % range;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_families_compute_values() {
        assert_eq!(Modulus::new(Family::MersenneLike, 3).unwrap().value(), 7);
        assert_eq!(Modulus::new(Family::Pow2, 3).unwrap().value(), 8);
        assert_eq!(Modulus::new(Family::FermatLike, 3).unwrap().value(), 9);
        assert!(Modulus::new(Family::Pow2, 0).is_err());
        // 2^1 - 1 = 1 is not a usable modulus.
        assert!(Modulus::new(Family::MersenneLike, 1).is_err());
    }

    #[test]
    fn classify_raw_values() {
        let m = Modulus::from_value(17).unwrap();
        assert_eq!((m.family(), m.k()), (Family::FermatLike, 4));
        let m = Modulus::from_value(16).unwrap();
        assert_eq!((m.family(), m.k()), (Family::Pow2, 4));
        let m = Modulus::from_value(3).unwrap();
        assert_eq!((m.family(), m.k()), (Family::MersenneLike, 2));
        assert!(Modulus::from_value(11).is_none());
    }

    #[test]
    fn range_of_small_sets() {
        let set = ModuliSet::from_values(&[3, 4, 5]).unwrap();
        assert_eq!(range_of(&set), 60);
        assert_eq!(set.range(), 60);

        let set = ModuliSet::from_values(&[5, 7, 9, 16]).unwrap();
        assert_eq!(range_of(&set), 5040);

        let set = ModuliSet::from_values(&[7]).unwrap();
        assert_eq!(range_of(&set), 7);
    }

    #[test]
    fn coprimality_is_enforced() {
        let e = ModuliSet::from_values(&[3, 9]).unwrap_err();
        assert_eq!(e, RnsError::NotCoprime(3, 9));
    }

    #[test]
    fn paper_sets_match_published_rows() {
        assert_eq!(paper_set_lookup(3).unwrap().values(), vec![3, 4, 5]);
        assert_eq!(paper_set_lookup(5).unwrap().values(), vec![4, 5, 7, 9]);
        assert_eq!(paper_set_lookup(8).unwrap().values(), vec![5, 7, 9, 16, 17]);
        assert_eq!(paper_set_lookup(2).unwrap_err(), RnsError::NoPaperSet(2));
        assert_eq!(paper_set_lookup(9).unwrap_err(), RnsError::NoPaperSet(9));
    }

    #[test]
    fn paper_set_ranges_exceed_max_product() {
        for n in 3..=8u32 {
            let set = paper_set_lookup(n).unwrap();
            let top = (1u128 << n) - 1;
            assert!(set.range() > top * top, "n={n}");
        }
    }

    #[test]
    fn search_finds_published_set_for_width_three() {
        let set = search_set(3, SearchObjective::ToffoliDepth).unwrap();
        let top = 49u128;
        assert!(set.range() > top);
        let max_depth = set
            .moduli()
            .iter()
            .map(|m| {
                crate::estimator::estimate(m.design(), m.k())
                    .unwrap()
                    .toffoli_depth
            })
            .max()
            .unwrap();
        assert!(max_depth <= 18);
        assert_eq!(set.values(), vec![3, 4, 5]);
    }

    #[test]
    fn search_respects_range_constraint() {
        for n in 2..=6u32 {
            let set = search_set(n, SearchObjective::ToffoliDepth).unwrap();
            let top = (1u128 << n) - 1;
            assert!(set.range() > top * top, "n={n} range {}", set.range());
            // Pairwise coprime by construction.
            let vals = set.values();
            for (i, &a) in vals.iter().enumerate() {
                for &b in &vals[i + 1..] {
                    assert_eq!(gcd(a, b), 1);
                }
            }
            let pow2s = set
                .moduli()
                .iter()
                .filter(|m| m.family() == Family::Pow2)
                .count();
            assert!(pow2s <= 1);
        }
    }

    #[test]
    fn forward_convert_examples() {
        let set = ModuliSet::from_values(&[3, 4, 5]).unwrap();
        assert_eq!(forward_convert(0, &set).unwrap(), vec![0, 0, 0]);
        assert_eq!(forward_convert(7, &set).unwrap(), vec![1, 3, 2]);
        assert!(forward_convert(60, &set).is_err());
    }

    #[test]
    fn crt_examples() {
        let set = ModuliSet::from_values(&[3, 4, 5]).unwrap();
        // Brute-force oracle: the unique x in [0, 60) with the residues.
        let brute = (0u128..60)
            .find(|&x| x % 3 == 1 && x % 4 == 0 && x % 5 == 0)
            .unwrap();
        assert_eq!(brute, 40);
        assert_eq!(crt_reconstruct(&[1, 0, 0], &set).unwrap(), 40);
        assert_eq!(crt_reconstruct(&[0, 0, 0], &set).unwrap(), 0);
    }

    #[test]
    fn crt_rejects_bad_inputs() {
        let set = ModuliSet::from_values(&[3, 4, 5]).unwrap();
        assert!(matches!(
            crt_reconstruct(&[1, 0], &set),
            Err(RnsError::ResidueCountMismatch { .. })
        ));
        assert!(matches!(
            crt_reconstruct(&[1, 0, 5], &set),
            Err(RnsError::ResidueTooLarge { .. })
        ));
    }

    #[test]
    fn round_trip_exhaustive_small_set() {
        let set = ModuliSet::from_values(&[3, 4, 5]).unwrap();
        for x in 0..60u128 {
            let residues = forward_convert(x, &set).unwrap();
            assert_eq!(crt_reconstruct(&residues, &set).unwrap(), x);
        }
    }

    #[test]
    fn round_trip_at_paper_max_product() {
        let set = paper_set_lookup(8).unwrap();
        let residues = forward_convert(65025, &set).unwrap();
        assert_eq!(crt_reconstruct(&residues, &set).unwrap(), 65025);
    }

    #[test]
    fn multiplicative_homomorphism_sampled() {
        let set = paper_set_lookup(6).unwrap();
        let range = set.range();
        let mut rng = crate::rng::SplitMix64::new(31);
        for _ in 0..200 {
            let x = u128::from(rng.next_below(range as u64));
            let y = u128::from(rng.next_below(range as u64));
            let prod = (x * y) % range;
            let lhs = forward_convert(prod, &set).unwrap();
            let rhs: Vec<u64> = forward_convert(x, &set)
                .unwrap()
                .iter()
                .zip(forward_convert(y, &set).unwrap())
                .zip(set.moduli())
                .map(|((&xr, yr), m)| {
                    ((u128::from(xr) * u128::from(yr)) % u128::from(m.value())) as u64
                })
                .collect();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn json_shape_matches_interface() {
        let set = ModuliSet::from_values(&[17]).unwrap();
        let json = serde_json::to_string(&set).unwrap();
        assert_eq!(
            json,
            r#"{"moduli":[{"family":"FERMAT_LIKE","k":4,"value":17}],"range":17}"#
        );
        let back: ModuliSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, set);
    }
}

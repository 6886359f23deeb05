//! Monotone Boolean functions, power-set partitions and the reference
//! partitions on four variables.

use std::fmt;

use crate::error::{Error, Result};
use crate::pbf::{QuadraticPoly, SubsetMask, ENUM_CAP};
use crate::rational::Rational;

/// Largest `k` for which [`enumerate_mbfs`] runs.
pub const ENUMERATION_CAP: usize = 5;

/// Whether `bits` (indexed by subset mask over `k` variables) never drops
/// when a variable is switched on.
pub fn is_monotone(k: usize, bits: &[bool]) -> bool {
    if bits.len() != 1 << k {
        return false;
    }
    (0..bits.len()).all(|s| !bits[s] || (0..k).all(|i| bits[s | 1 << i]))
}

/// A monotone truth table over `k` variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MbfTable {
    k: usize,
    bits: Vec<bool>,
}

impl MbfTable {
    pub fn new(k: usize, bits: Vec<bool>) -> Result<Self> {
        if k > ENUM_CAP {
            return Err(Error::TooManyVariables {
                what: "a truth table",
                n: k,
                cap: ENUM_CAP,
            });
        }
        if bits.len() != 1 << k {
            return Err(Error::MbfWidthMismatch {
                expected: 1 << k,
                found: bits.len(),
            });
        }
        if !is_monotone(k, &bits) {
            return Err(Error::NotMonotone);
        }
        Ok(MbfTable { k, bits })
    }

    pub fn from_fn(k: usize, f: impl Fn(SubsetMask) -> bool) -> Result<Self> {
        Self::new(k, SubsetMask::all(k).map(f).collect())
    }

    pub fn constant(k: usize, value: bool) -> Self {
        MbfTable {
            k,
            bits: vec![value; 1 << k],
        }
    }

    pub fn projection(k: usize, i: usize) -> Self {
        Self::from_fn(k, |s| s.contains(i)).expect("projection is monotone")
    }

    /// `1` exactly on sets of size at least `r`.
    pub fn at_least(k: usize, r: usize) -> Self {
        Self::from_fn(k, |s| s.len() >= r).expect("threshold is monotone")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, s: SubsetMask) -> bool {
        self.bits[s.bits() as usize]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_constant(&self) -> bool {
        self.bits.iter().all(|b| *b == self.bits[0])
    }

    /// The variable this table copies, if it is a projection.
    pub fn projected_var(&self) -> Option<usize> {
        (0..self.k).find(|&i| SubsetMask::all(self.k).all(|s| self.get(s) == s.contains(i)))
    }

    pub fn is_degenerate(&self) -> bool {
        self.is_constant() || self.projected_var().is_some()
    }

    /// Bit-string in mask order, first character is the empty set.
    pub fn to_bit_string(&self) -> String {
        self.bits
            .iter()
            .map(|b| if *b { '1' } else { '0' })
            .collect()
    }

    pub fn from_bit_string(s: &str) -> Result<Self> {
        let bits: Vec<bool> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Precondition(format!("bad bit `{c}` in table `{s}`"))),
            })
            .collect::<Result<_>>()?;
        if !bits.len().is_power_of_two() {
            return Err(Error::Precondition(format!(
                "table length {} is not a power of two",
                bits.len()
            )));
        }
        Self::new(bits.len().trailing_zeros() as usize, bits)
    }
}

impl fmt::Debug for MbfTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MbfTable({})", self.to_bit_string())
    }
}

/// All monotone tables on `k` variables, built by Shannon splitting on the
/// last variable: a table is a pair `f0 ≤ f1` of tables on `k − 1`
/// variables.
pub fn enumerate_mbfs(k: usize) -> Result<Vec<MbfTable>> {
    if k > ENUMERATION_CAP {
        return Err(Error::TooManyVariables {
            what: "table enumeration",
            n: k,
            cap: ENUMERATION_CAP,
        });
    }
    let mut level: Vec<u32> = vec![0, 1];
    for j in 1..=k {
        let half = 1u32 << (j - 1);
        let mut next = Vec::new();
        for &f0 in &level {
            for &f1 in &level {
                if f0 & !f1 == 0 {
                    next.push(f0 | f1 << half);
                }
            }
        }
        level = next;
    }
    level.sort_unstable();
    Ok(level
        .into_iter()
        .map(|t| MbfTable {
            k,
            bits: (0..1 << k).map(|s| t >> s & 1 == 1).collect(),
        })
        .collect())
}

/// Drops the two constants and the `k` projections.
pub fn prune_mbf_set(ms: &[MbfTable]) -> Vec<MbfTable> {
    ms.iter().filter(|t| !t.is_degenerate()).cloned().collect()
}

/// The split of the power set by an auxiliary variable's optimal state:
/// 1 on the upper family, 0 on the lower family.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Partition {
    table: MbfTable,
}

impl Partition {
    pub fn from_table(table: MbfTable) -> Self {
        Partition { table }
    }

    pub fn table(&self) -> &MbfTable {
        &self.table
    }

    pub fn k(&self) -> usize {
        self.table.k
    }

    pub fn in_upper(&self, s: SubsetMask) -> bool {
        self.table.get(s)
    }

    /// Sets where the auxiliary variable is 1.
    pub fn upper_family(&self) -> Vec<SubsetMask> {
        SubsetMask::all(self.k())
            .filter(|s| self.in_upper(*s))
            .collect()
    }

    /// Sets where the auxiliary variable is 0.
    pub fn lower_family(&self) -> Vec<SubsetMask> {
        SubsetMask::all(self.k())
            .filter(|s| !self.in_upper(*s))
            .collect()
    }

    pub fn is_subset_of(&self, other: &Partition) -> bool {
        self.k() == other.k()
            && SubsetMask::all(self.k()).all(|s| !self.in_upper(s) || other.in_upper(s))
    }
}

/// Coefficients of a single auxiliary variable's term `κ(x)·z` with
/// `κ(x) = bias − Σ weights_i·x_i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AvParams {
    pub bias: Rational,
    pub weights: Vec<Rational>,
}

impl AvParams {
    pub fn new(bias: Rational, weights: Vec<Rational>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::Precondition(format!("negative weight {w}")));
        }
        Ok(AvParams { bias, weights })
    }

    /// Integer shorthand, mostly for tests and examples.
    pub fn ints(bias: i64, weights: &[i64]) -> Self {
        Self::new(
            bias.into(),
            weights.iter().map(|w| Rational::from_int(*w)).collect(),
        )
        .expect("non-negative weights")
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    /// The partition coefficient `κ(S)`.
    pub fn kappa(&self, s: SubsetMask) -> Rational {
        let mut v = self.bias.clone();
        for i in s.iter() {
            v -= &self.weights[i];
        }
        v
    }

    /// `min_z κ(S)·z`.
    pub fn min_value(&self, s: SubsetMask) -> Rational {
        self.kappa(s).neg_part()
    }

    /// Whether `κ ≤ 0` on the upper family and `≥ 0` on the lower family.
    pub fn weakly_realizes(&self, p: &Partition) -> bool {
        p.k() == self.k()
            && SubsetMask::all(self.k()).all(|s| {
                let c = self.kappa(s);
                if p.in_upper(s) {
                    !c.is_positive()
                } else {
                    !c.is_negative()
                }
            })
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        AvParams {
            bias: &self.bias * c,
            weights: self.weights.iter().map(|w| w * c).collect(),
        }
    }

    pub fn sum(&self, other: &AvParams) -> Self {
        AvParams {
            bias: &self.bias + &other.bias,
            weights: self
                .weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// Strict rule: the variable is 1 exactly where `κ < 0`.
pub fn partition_from_params(p: &AvParams) -> Partition {
    Partition::from_table(
        MbfTable::from_fn(p.k(), |s| p.kappa(s).is_negative())
            .expect("non-negative weights give an upward-closed family"),
    )
}

/// Four variables, 1 on every set of size at least three.
pub fn forward_partition() -> Partition {
    Partition::from_table(MbfTable::at_least(4, 3))
}

/// Four variables, 1 on every set of size at least two.
pub fn backward_partition() -> Partition {
    Partition::from_table(MbfTable::at_least(4, 2))
}

/// Optimal state of auxiliary variable `av` of `h` as a function of the
/// original block: 1 only where forcing it to 1 is strictly better than
/// forcing it to 0, other auxiliaries minimized out.
pub fn induced_mbf(h: &QuadraticPoly, av: usize) -> Result<MbfTable> {
    let (k, m) = (h.n_x(), h.n_aux());
    if av < k || av >= k + m {
        return Err(Error::NotAuxiliary(av));
    }
    h.check_submodular()?;
    if k + m > ENUM_CAP {
        return Err(Error::TooManyVariables {
            what: "state extraction",
            n: k + m,
            cap: ENUM_CAP,
        });
    }
    let mut bits = Vec::with_capacity(1 << k);
    let mut assign = vec![false; k + m];
    for x in 0..1u32 << k {
        for (i, slot) in assign.iter_mut().enumerate().take(k) {
            *slot = x >> i & 1 == 1;
        }
        let mut best: [Option<Rational>; 2] = [None, None];
        for z in 0..1u32 << m {
            for a in 0..m {
                assign[k + a] = z >> a & 1 == 1;
            }
            let v = h.evaluate(&assign)?;
            let side = &mut best[assign[av] as usize];
            if side.as_ref().is_none_or(|b| v < *b) {
                *side = Some(v);
            }
        }
        bits.push(best[1] < best[0]);
    }
    MbfTable::new(k, bits).map_err(|_| Error::Invariant("induced state is not monotone".into()))
}

/// Rank `r` when the lower family is exactly `{S : |S| ≤ r}`.
pub fn is_uniform_matroid(p: &Partition) -> Option<usize> {
    let lower = p.lower_family();
    let r = lower.iter().map(|s| s.len()).max()?;
    SubsetMask::all(p.k())
        .all(|s| p.in_upper(s) != (s.len() <= r))
        .then_some(r)
}

/// Independence axioms: non-empty, closed under subsets, and the exchange
/// property.
pub fn is_matroid(k: usize, independent: &[SubsetMask]) -> bool {
    let member = |s: SubsetMask| independent.contains(&s);
    if !member(SubsetMask::EMPTY) {
        return false;
    }
    let closed = independent
        .iter()
        .all(|s| s.iter().all(|i| member(s.without(i))));
    let exchange = independent.iter().all(|a| {
        independent.iter().all(|b| {
            a.len() <= b.len()
                || b.iter().all(|i| a.contains(i))
                || (0..k).any(|e| a.contains(e) && !b.contains(e) && member(b.with(e)))
        })
    });
    closed && exchange
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use proptest::prelude::*;

    fn m(idx: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(idx.iter().map(|i| i - 1))
    }

    #[test]
    fn monotonicity_examples() {
        assert!(is_monotone(2, &[false; 4]));
        let majority: Vec<bool> = SubsetMask::all(3).map(|s| s.len() >= 2).collect();
        assert!(is_monotone(3, &majority));
        let odd: Vec<bool> = SubsetMask::all(2).map(|s| s.len() % 2 == 1).collect();
        assert!(!is_monotone(2, &odd));
        assert!(!is_monotone(2, &[false; 3]));
    }

    #[test]
    fn monotone_counts_small_cases() {
        let one = enumerate_mbfs(1).unwrap();
        assert_eq!(one.len(), 3);
        assert!(one.contains(&MbfTable::projection(1, 0)));
        let two = enumerate_mbfs(2).unwrap();
        assert_eq!(two.len(), 6);
        assert!(two.contains(&MbfTable::from_fn(2, |s| !s.is_empty()).unwrap()));
        assert!(two.contains(&MbfTable::from_fn(2, |s| s.len() == 2).unwrap()));
        assert_eq!(enumerate_mbfs(4).unwrap().len(), 168);
        assert!(enumerate_mbfs(6).is_err());
    }

    #[test]
    fn enumeration_is_duplicate_free_and_monotone() {
        let all = enumerate_mbfs(4).unwrap();
        let mut sorted = all.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
        assert!(all.iter().all(|t| is_monotone(4, t.bits())));
    }

    #[test]
    fn pruning_counts() {
        assert_eq!(prune_mbf_set(&enumerate_mbfs(2).unwrap()).len(), 2);
        assert_eq!(prune_mbf_set(&enumerate_mbfs(3).unwrap()).len(), 15);
        assert_eq!(prune_mbf_set(&enumerate_mbfs(4).unwrap()).len(), 162);
    }

    #[test]
    fn partition_examples() {
        let params = AvParams::ints(3, &[4, 1, 1, 1]);
        let p = partition_from_params(&params);
        for s in SubsetMask::all(4) {
            assert_eq!(p.in_upper(s), s.contains(0), "{s:?}");
        }
        // {2,3,4} sits exactly on the boundary: the strict rule leaves it
        // below, the non-strict one used in LP constraints puts it above.
        assert_eq!(params.kappa(m(&[2, 3, 4])), int(0));
        let mut upper = p.upper_family();
        upper.push(m(&[2, 3, 4]));
        let weak = Partition::from_table(MbfTable::from_fn(4, |s| upper.contains(&s)).unwrap());
        assert!(params.weakly_realizes(&weak));
        assert!(partition_from_params(&AvParams::ints(1, &[0, 0, 0, 0]))
            .upper_family()
            .is_empty());
        assert!(partition_from_params(&AvParams::ints(6, &[1, 1, 1, 1]))
            .upper_family()
            .is_empty());
    }

    #[test]
    fn reference_partitions() {
        let (f, b) = (forward_partition(), backward_partition());
        assert_eq!(f.upper_family().len(), 5);
        assert_eq!(b.upper_family().len(), 11);
        assert!(f.is_subset_of(&b) && !b.is_subset_of(&f));
    }

    #[test]
    fn uniform_matroid_examples() {
        assert_eq!(is_uniform_matroid(&forward_partition()), Some(2));
        assert_eq!(is_uniform_matroid(&backward_partition()), Some(1));
        let lower = [m(&[]), m(&[1]), m(&[2]), m(&[3]), m(&[4]), m(&[3, 4])];
        let p = Partition::from_table(MbfTable::from_fn(4, |s| !lower.contains(&s)).unwrap());
        assert_eq!(is_uniform_matroid(&p), None);
        assert!(!is_matroid(4, &lower));
        assert!(is_matroid(4, &forward_partition().lower_family()));
        assert!(is_matroid(4, &backward_partition().lower_family()));
        let everything = Partition::from_table(MbfTable::constant(2, true));
        assert_eq!(is_uniform_matroid(&everything), None);
    }

    #[test]
    fn bit_string_round_trip() {
        let t = MbfTable::at_least(3, 2);
        assert_eq!(t.to_bit_string(), "00010111");
        assert_eq!(MbfTable::from_bit_string("00010111").unwrap(), t);
        assert!(MbfTable::from_bit_string("0110").is_err());
        assert!(MbfTable::from_bit_string("011").is_err());
    }

    fn single_aux(k: usize, bias: i64, w: &[i64]) -> QuadraticPoly {
        let mut h = QuadraticPoly::zero(k, 1);
        h.add_linear(k, &int(bias));
        for (i, wi) in w.iter().enumerate() {
            h.add_pair(i, k, &int(-wi));
        }
        h
    }

    #[test]
    fn induced_examples() {
        let t = induced_mbf(&single_aux(3, 2, &[1, 1, 1]), 3).unwrap();
        assert!(t.get(m(&[1, 2, 3])));
        assert!(!t.get(m(&[1, 2])));
        assert!(!t.get(m(&[1])));
        let mut plain = QuadraticPoly::zero(2, 1);
        plain.add_pair(0, 1, &int(-1));
        assert_eq!(
            induced_mbf(&plain, 2).unwrap(),
            MbfTable::constant(2, false)
        );
        let g4 = induced_mbf(&single_aux(4, 1, &[1, 1, 1, 1]), 4).unwrap();
        assert_eq!(g4, MbfTable::at_least(4, 2));
        assert_eq!(induced_mbf(&plain, 0), Err(Error::NotAuxiliary(0)));
        let mut bad = single_aux(1, 0, &[0]);
        bad.add_pair(0, 1, &int(1));
        assert!(induced_mbf(&bad, 1).is_err());
    }

    fn arb_params() -> impl Strategy<Value = AvParams> {
        (-8i64..16, proptest::collection::vec(0i64..10, 4)).prop_map(|(g, w)| AvParams::ints(g, &w))
    }

    proptest! {
        #[test]
        fn params_give_upward_closed_partitions(p in arb_params()) {
            let part = partition_from_params(&p);
            prop_assert!(is_monotone(4, part.table().bits()));
        }

        #[test]
        fn complementary_pairs_cannot_split(p in arb_params()) {
            // κ(A) + κ(S₄∖A) = 2·bias − Σ weights for every pair A.
            let pairs: Vec<SubsetMask> = SubsetMask::all(4).filter(|s| s.len() == 2).collect();
            let full = SubsetMask::full(4);
            let upper_pair = pairs.iter().any(|a| p.kappa(*a).is_negative() && p.kappa(full.minus(*a)).is_negative());
            let lower_pair = pairs.iter().any(|c| p.kappa(*c).is_positive() && p.kappa(full.minus(*c)).is_positive());
            prop_assert!(!(upper_pair && lower_pair));
        }

        #[test]
        fn induced_state_is_monotone(
            k in 1usize..4,
            m in 1usize..4,
            lin in proptest::collection::vec(-5i64..5, 7),
            pairs in proptest::collection::vec((0usize..7, 0usize..7, 0i64..4), 0..12),
        ) {
            let mut h = QuadraticPoly::zero(k, m);
            for i in 0..k + m {
                h.add_linear(i, &int(lin[i]));
            }
            for (i, j, w) in pairs {
                if i != j && i < k + m && j < k + m {
                    h.add_pair(i, j, &int(-w));
                }
            }
            for av in k..k + m {
                let t = induced_mbf(&h, av).unwrap();
                prop_assert!(is_monotone(k, t.bits()));
            }
        }
    }
}

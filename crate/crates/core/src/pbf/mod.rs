//! Pseudo-Boolean functions in multilinear form.
//!
//! Variables are 0-based internally. The text format and the CLI use 1-based
//! indices.

mod quadratic;
pub mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use quadratic::{from_capacity_form, to_capacity_form, CapacityForm, QuadraticPoly};

/// Largest variable count a bit-mask can address.
pub const MAX_VARS: usize = 32;
/// Largest variable count for anything that enumerates all labelings.
pub const ENUM_CAP: usize = 20;

pub type VarIndex = usize;

/// A subset of `{0..n}`; bit `i` set means variable `i` is 1.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_VARS);
        if n == 32 {
            SubsetMask(u32::MAX)
        } else {
            SubsetMask((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: VarIndex) -> Self {
        SubsetMask(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = VarIndex>>(idx: I) -> Self {
        SubsetMask(idx.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, i: VarIndex) -> bool {
        i < 32 && self.0 >> i & 1 == 1
    }

    pub fn with(self, i: VarIndex) -> Self {
        SubsetMask(self.0 | 1 << i)
    }

    pub fn without(self, i: VarIndex) -> Self {
        SubsetMask(self.0 & !(1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersection(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 & other.0)
    }

    pub fn minus(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 & !other.0)
    }

    /// Member indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = VarIndex> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    /// Whether the mask only uses the first `n` variables.
    pub fn fits(self, n: usize) -> bool {
        self.is_subset_of(SubsetMask::full(n))
    }

    /// All subsets of `{0..n}` in mask order.
    pub fn all(n: usize) -> impl Iterator<Item = SubsetMask> {
        assert!(n <= ENUM_CAP);
        (0u32..1 << n).map(SubsetMask)
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

/// Multilinear polynomial `Σ a_S Π_{i∈S} x_i` with exact coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultilinearPoly {
    n_vars: usize,
    terms: BTreeMap<SubsetMask, Rational>,
}

impl MultilinearPoly {
    pub fn zero(n_vars: usize) -> Self {
        assert!(n_vars <= MAX_VARS, "at most {MAX_VARS} variables");
        MultilinearPoly {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: Rational) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(SubsetMask::EMPTY, c);
        p
    }

    /// Builds a polynomial, summing duplicate subsets.
    pub fn from_terms<I>(n_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SubsetMask, Rational)>,
    {
        if n_vars > MAX_VARS {
            return Err(Error::TooManyVariables {
                what: "a polynomial",
                n: n_vars,
                cap: MAX_VARS,
            });
        }
        let mut p = Self::zero(n_vars);
        for (mask, c) in terms {
            if !mask.fits(n_vars) {
                let index = 31 - mask.minus(SubsetMask::full(n_vars)).0.leading_zeros() as usize;
                return Err(Error::IndexOutOfRange { index, n: n_vars });
            }
            p.add_term(mask, c);
        }
        Ok(p)
    }

    /// `c · Π_{i∈vars} x_i`.
    pub fn monomial(n_vars: usize, vars: &[VarIndex], c: Rational) -> Self {
        let mask = SubsetMask::from_indices(vars.iter().copied());
        Self::from_terms(n_vars, [(mask, c)]).expect("monomial index in range")
    }

    pub fn add_term(&mut self, mask: SubsetMask, c: Rational) {
        assert!(
            mask.fits(self.n_vars),
            "term {mask:?} outside {} variables",
            self.n_vars
        );
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(mask).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (SubsetMask, &Rational)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, mask: SubsetMask) -> Rational {
        self.terms.get(&mask).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Union of all variables that appear in some term.
    pub fn support(&self) -> SubsetMask {
        self.terms
            .keys()
            .fold(SubsetMask::EMPTY, |a, m| a.union(*m))
    }

    /// Same polynomial viewed over `n` variables.
    pub fn with_n_vars(&self, n: usize) -> Result<Self> {
        if n > MAX_VARS {
            return Err(Error::TooManyVariables {
                what: "a polynomial",
                n,
                cap: MAX_VARS,
            });
        }
        if !self.support().fits(n) {
            let index = 31 - self.support().minus(SubsetMask::full(n)).0.leading_zeros() as usize;
            return Err(Error::IndexOutOfRange { index, n });
        }
        Ok(MultilinearPoly {
            n_vars: n,
            terms: self.terms.clone(),
        })
    }

    /// Renames variable `i` to `perm[i]`.
    pub fn relabel(&self, perm: &[VarIndex]) -> Result<Self> {
        let n = perm
            .iter()
            .map(|&p| p + 1)
            .max()
            .unwrap_or(0)
            .max(self.n_vars);
        let terms = self.terms.iter().map(|(m, c)| {
            (
                SubsetMask::from_indices(m.iter().map(|i| perm[i])),
                c.clone(),
            )
        });
        Self::from_terms(n, terms)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut p = Self::zero(self.n_vars);
        for (m, a) in &self.terms {
            p.add_term(*m, a * c);
        }
        p
    }

    /// Value at labeling `x`: the sum of `a_S` over `S ⊆ x`.
    pub fn evaluate(&self, x: SubsetMask) -> Result<Rational> {
        if !x.fits(self.n_vars) {
            return Err(Error::WidthMismatch { width: self.n_vars });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: SubsetMask) -> Rational {
        self.terms
            .iter()
            .filter(|(m, _)| m.is_subset_of(x))
            .map(|(_, c)| c)
            .sum()
    }

    fn check_index(&self, i: VarIndex) -> Result<()> {
        if i >= self.n_vars {
            Err(Error::IndexOutOfRange {
                index: i,
                n: self.n_vars,
            })
        } else {
            Ok(())
        }
    }

    /// Fixes some variables to constants. The variable count is kept; fixed
    /// variables simply no longer appear.
    pub fn restrict(&self, assignment: &[(VarIndex, bool)]) -> Result<Self> {
        let mut ones = SubsetMask::EMPTY;
        let mut zeros = SubsetMask::EMPTY;
        for &(i, b) in assignment {
            self.check_index(i)?;
            if b {
                ones = ones.with(i);
            } else {
                zeros = zeros.with(i);
            }
        }
        let mut p = Self::zero(self.n_vars);
        for (m, c) in &self.terms {
            if m.intersection(zeros).is_empty() {
                p.add_term(m.minus(ones), c.clone());
            }
        }
        Ok(p)
    }

    /// `f|_{x_i=1} − f|_{x_i=0}`.
    pub fn derivative(&self, i: VarIndex) -> Result<Self> {
        self.check_index(i)?;
        let mut p = Self::zero(self.n_vars);
        for (m, c) in &self.terms {
            if m.contains(i) {
                p.add_term(m.without(i), c.clone());
            }
        }
        Ok(p)
    }

    /// Four-point mixed difference in `i` and `j` at `x`; the bits of `x` at
    /// `i` and `j` are ignored.
    pub fn second_derivative(&self, i: VarIndex, j: VarIndex, x: SubsetMask) -> Result<Rational> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(Error::SameIndex(i));
        }
        if !x.fits(self.n_vars) {
            return Err(Error::WidthMismatch { width: self.n_vars });
        }
        let base = x.without(i).without(j);
        let e = |m| self.eval_unchecked(m);
        Ok(e(base.with(i).with(j)) - e(base.with(i)) - e(base.with(j)) + e(base))
    }

    /// Whether every mixed second difference is `≤ 0`.
    ///
    /// Degree ≤ 2 is decided from the coefficients for any width. Higher
    /// degrees enumerate, per pair, only the variables that the pair's
    /// second-difference polynomial depends on.
    pub fn is_submodular(&self) -> Result<bool> {
        match self.degree() {
            0 | 1 => return Ok(true),
            2 => {
                return Ok(self
                    .terms
                    .iter()
                    .all(|(m, c)| m.len() < 2 || !c.is_positive()))
            }
            _ => {}
        }
        if self.n_vars > ENUM_CAP {
            return Err(Error::TooManyVariables {
                what: "submodularity check",
                n: self.n_vars,
                cap: ENUM_CAP,
            });
        }
        let mut per_pair: BTreeMap<(usize, usize), Vec<(SubsetMask, &Rational)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let idx: Vec<_> = m.iter().collect();
            for a in 0..idx.len() {
                for b in a + 1..idx.len() {
                    let rest = m.without(idx[a]).without(idx[b]);
                    per_pair
                        .entry((idx[a], idx[b]))
                        .or_default()
                        .push((rest, c));
                }
            }
        }
        Ok(per_pair
            .values()
            .all(|d| max_over_labelings(d) <= Rational::zero()))
    }
}

/// Maximum over all labelings of `Σ c·[mask ⊆ x]`, enumerating only the
/// variables that occur.
fn max_over_labelings(terms: &[(SubsetMask, &Rational)]) -> Rational {
    let support: Vec<usize> = terms
        .iter()
        .fold(SubsetMask::EMPTY, |a, (m, _)| a.union(*m))
        .iter()
        .collect();
    let s = support.len();
    let mut table = vec![Rational::zero(); 1 << s];
    for (m, c) in terms {
        let mut packed = 0usize;
        for (bit, &v) in support.iter().enumerate() {
            if m.contains(v) {
                packed |= 1 << bit;
            }
        }
        table[packed] += *c;
    }
    for bit in 0..s {
        for mask in 0..1usize << s {
            if mask >> bit & 1 == 1 {
                let lower = table[mask ^ 1 << bit].clone();
                table[mask] += lower;
            }
        }
    }
    table
        .into_iter()
        .max()
        .expect("table has at least one entry")
}

impl fmt::Debug for MultilinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for i in m.iter() {
                write!(f, "·x{}", i + 1)?;
            }
        }
        Ok(())
    }
}

impl Add for &MultilinearPoly {
    type Output = MultilinearPoly;
    fn add(self, rhs: &MultilinearPoly) -> MultilinearPoly {
        let mut p = MultilinearPoly::zero(self.n_vars.max(rhs.n_vars));
        for (m, c) in self.terms.iter().chain(rhs.terms.iter()) {
            p.add_term(*m, c.clone());
        }
        p
    }
}

impl Sub for &MultilinearPoly {
    type Output = MultilinearPoly;
    fn sub(self, rhs: &MultilinearPoly) -> MultilinearPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultilinearPoly {
    type Output = MultilinearPoly;
    fn neg(self) -> MultilinearPoly {
        self.scale(&Rational::from_int(-1))
    }
}

/// Product with `x_i² = x_i`.
impl Mul for &MultilinearPoly {
    type Output = MultilinearPoly;
    fn mul(self, rhs: &MultilinearPoly) -> MultilinearPoly {
        let mut p = MultilinearPoly::zero(self.n_vars.max(rhs.n_vars));
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                p.add_term(m1.union(*m2), c1 * c2);
            }
        }
        p
    }
}

macro_rules! owned_ops {
    ($tr:ident, $method:ident) => {
        impl $tr for MultilinearPoly {
            type Output = MultilinearPoly;
            fn $method(self, rhs: MultilinearPoly) -> MultilinearPoly {
                (&self).$method(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

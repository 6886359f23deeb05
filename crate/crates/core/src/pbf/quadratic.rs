//! Quadratic polynomials and their non-negative capacity form.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::pbf::{MultilinearPoly, SubsetMask, VarIndex, MAX_VARS};
use crate::rational::Rational;

/// A quadratic over an original block `x_0..x_{n_x-1}` followed by an
/// auxiliary block. Stored sparsely, so widths beyond a bit-mask are fine.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadraticPoly {
    n_x: usize,
    constant: Rational,
    linear: Vec<Rational>,
    /// Keyed `(i, j)` with `i < j`; zero entries are never stored.
    pairs: BTreeMap<(usize, usize), Rational>,
}

impl QuadraticPoly {
    pub fn zero(n_x: usize, n_aux: usize) -> Self {
        QuadraticPoly {
            n_x,
            constant: Rational::zero(),
            linear: vec![Rational::zero(); n_x + n_aux],
            pairs: BTreeMap::new(),
        }
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_aux(&self) -> usize {
        self.linear.len() - self.n_x
    }

    pub fn n_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn linear(&self, i: VarIndex) -> &Rational {
        &self.linear[i]
    }

    pub fn pair(&self, i: VarIndex, j: VarIndex) -> Rational {
        let key = if i < j { (i, j) } else { (j, i) };
        self.pairs.get(&key).cloned().unwrap_or_default()
    }

    /// Non-zero bilinear coefficients as `((i, j), c)` with `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), &Rational)> + '_ {
        self.pairs.iter().map(|(k, c)| (*k, c))
    }

    pub fn add_constant(&mut self, c: &Rational) {
        self.constant += c;
    }

    pub fn add_linear(&mut self, i: VarIndex, c: &Rational) {
        self.linear[i] += c;
    }

    pub fn add_pair(&mut self, i: VarIndex, j: VarIndex, c: &Rational) {
        assert!(i != j, "bilinear term needs two distinct variables");
        assert!(
            i < self.n_vars() && j < self.n_vars(),
            "pair ({i}, {j}) out of range"
        );
        if c.is_zero() {
            return;
        }
        let key = if i < j { (i, j) } else { (j, i) };
        let slot = self.pairs.entry(key).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.pairs.remove(&key);
        }
    }

    /// Adds `other` (whose variables map through `map`) into `self`.
    pub fn add_mapped(&mut self, other: &QuadraticPoly, map: &[VarIndex]) {
        self.constant += &other.constant;
        for (i, c) in other.linear.iter().enumerate() {
            self.linear[map[i]] += c;
        }
        for ((i, j), c) in &other.pairs {
            self.add_pair(map[*i], map[*j], c);
        }
    }

    /// Same coefficients with `extra` more auxiliary variables.
    pub fn with_extra_aux(&self, extra: usize) -> Self {
        let mut q = self.clone();
        q.linear
            .extend(std::iter::repeat_with(Rational::zero).take(extra));
        q
    }

    pub fn evaluate(&self, assignment: &[bool]) -> Result<Rational> {
        if assignment.len() != self.n_vars() {
            return Err(Error::WidthMismatch {
                width: self.n_vars(),
            });
        }
        let mut v = self.constant.clone();
        for (c, &b) in self.linear.iter().zip(assignment) {
            if b {
                v += c;
            }
        }
        for ((i, j), c) in &self.pairs {
            if assignment[*i] && assignment[*j] {
                v += c;
            }
        }
        Ok(v)
    }

    pub fn evaluate_mask(&self, x: SubsetMask) -> Result<Rational> {
        if self.n_vars() > MAX_VARS || !x.fits(self.n_vars()) {
            return Err(Error::WidthMismatch {
                width: self.n_vars(),
            });
        }
        let bits: Vec<bool> = (0..self.n_vars()).map(|i| x.contains(i)).collect();
        self.evaluate(&bits)
    }

    pub fn is_submodular(&self) -> bool {
        self.pairs.values().all(|c| !c.is_positive())
    }

    pub fn check_submodular(&self) -> Result<()> {
        match self.pairs.iter().find(|(_, c)| c.is_positive()) {
            Some(((i, j), _)) => Err(Error::NotSubmodularQuadratic(*i, *j)),
            None => Ok(()),
        }
    }

    /// First bilinear term between two auxiliary variables, if any.
    pub fn aux_interaction(&self) -> Option<(usize, usize)> {
        self.pairs.keys().find(|(i, _)| *i >= self.n_x).copied()
    }

    /// Whether an auxiliary variable has any non-zero coefficient.
    pub fn aux_is_used(&self, a: VarIndex) -> bool {
        !self.linear[a].is_zero() || self.pairs.keys().any(|(i, j)| *i == a || *j == a)
    }

    /// Drops auxiliary variables that have no terms; they never change a
    /// minimum.
    pub fn without_unused_aux(&self) -> Self {
        let mut map = vec![usize::MAX; self.n_vars()];
        let mut next = 0;
        for (v, slot) in map.iter_mut().enumerate() {
            if v < self.n_x || self.aux_is_used(v) {
                *slot = next;
                next += 1;
            }
        }
        let mut q = QuadraticPoly::zero(self.n_x, next - self.n_x);
        q.add_mapped_filtered(self, &map);
        q
    }

    fn add_mapped_filtered(&mut self, other: &QuadraticPoly, map: &[usize]) {
        self.constant += &other.constant;
        for (i, c) in other.linear.iter().enumerate() {
            if map[i] != usize::MAX {
                self.linear[map[i]] += c;
            }
        }
        for ((i, j), c) in &other.pairs {
            self.add_pair(map[*i], map[*j], c);
        }
    }

    pub fn from_multilinear(p: &MultilinearPoly, n_x: usize) -> Result<Self> {
        if p.degree() > 2 {
            return Err(Error::NotQuadratic(p.degree()));
        }
        if n_x > p.n_vars() {
            return Err(Error::Precondition(format!(
                "original block of {n_x} exceeds {} variables",
                p.n_vars()
            )));
        }
        let mut q = QuadraticPoly::zero(n_x, p.n_vars() - n_x);
        for (m, c) in p.terms() {
            let idx: Vec<_> = m.iter().collect();
            match idx.as_slice() {
                [] => q.constant += c,
                [i] => q.linear[*i] += c,
                [i, j] => q.add_pair(*i, *j, c),
                _ => unreachable!("degree checked"),
            }
        }
        Ok(q)
    }

    pub fn to_multilinear(&self) -> Result<MultilinearPoly> {
        let n = self.n_vars();
        if n > MAX_VARS {
            return Err(Error::TooManyVariables {
                what: "a multilinear polynomial",
                n,
                cap: MAX_VARS,
            });
        }
        let mut p = MultilinearPoly::zero(n);
        p.add_term(SubsetMask::EMPTY, self.constant.clone());
        for (i, c) in self.linear.iter().enumerate() {
            p.add_term(SubsetMask::singleton(i), c.clone());
        }
        for ((i, j), c) in &self.pairs {
            p.add_term(SubsetMask::from_indices([*i, *j]), c.clone());
        }
        Ok(p)
    }

    /// Terms as `(indices, coefficient)` in degree-then-lexicographic order.
    pub fn term_list(&self) -> Vec<(Vec<usize>, Rational)> {
        let mut out = Vec::new();
        if !self.constant.is_zero() {
            out.push((vec![], self.constant.clone()));
        }
        for (i, c) in self.linear.iter().enumerate() {
            if !c.is_zero() {
                out.push((vec![i], c.clone()));
            }
        }
        for ((i, j), c) in &self.pairs {
            out.push((vec![*i, *j], c.clone()));
        }
        out
    }
}

/// `c_empty + Σ src_i·(1−x_i) + Σ sink_i·x_i + Σ pair_(u,v)·x_u·(1−x_v)` with
/// every capacity non-negative.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CapacityForm {
    n_x: usize,
    pub c_empty: Rational,
    src_cap: Vec<Rational>,
    sink_cap: Vec<Rational>,
    pair_cap: BTreeMap<(usize, usize), Rational>,
}

impl CapacityForm {
    pub fn zero(n_x: usize, n_nodes: usize) -> Self {
        assert!(n_x <= n_nodes);
        CapacityForm {
            n_x,
            c_empty: Rational::zero(),
            src_cap: vec![Rational::zero(); n_nodes],
            sink_cap: vec![Rational::zero(); n_nodes],
            pair_cap: BTreeMap::new(),
        }
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_nodes(&self) -> usize {
        self.src_cap.len()
    }

    fn nonneg(c: &Rational) -> Result<()> {
        if c.is_negative() {
            Err(Error::NegativeCapacity(c.to_string()))
        } else {
            Ok(())
        }
    }

    /// Adds to the capacity charged when node `i` is 0.
    pub fn add_src(&mut self, i: usize, c: &Rational) -> Result<()> {
        Self::nonneg(c)?;
        self.src_cap[i] += c;
        Ok(())
    }

    /// Adds to the capacity charged when node `i` is 1.
    pub fn add_sink(&mut self, i: usize, c: &Rational) -> Result<()> {
        Self::nonneg(c)?;
        self.sink_cap[i] += c;
        Ok(())
    }

    /// Adds to the capacity charged when `u` is 1 and `v` is 0.
    pub fn add_pair(&mut self, u: usize, v: usize, c: &Rational) -> Result<()> {
        Self::nonneg(c)?;
        assert!(u != v && u < self.n_nodes() && v < self.n_nodes());
        if !c.is_zero() {
            *self.pair_cap.entry((u, v)).or_insert_with(Rational::zero) += c;
        }
        Ok(())
    }

    pub fn src_cap(&self, i: usize) -> &Rational {
        &self.src_cap[i]
    }

    pub fn sink_cap(&self, i: usize) -> &Rational {
        &self.sink_cap[i]
    }

    pub fn pair_caps(&self) -> impl Iterator<Item = ((usize, usize), &Rational)> + '_ {
        self.pair_cap.iter().map(|(k, c)| (*k, c))
    }

    /// Places another form's nodes at `map[i]` and adds its costs.
    pub fn add_mapped(&mut self, other: &CapacityForm, map: &[usize]) {
        self.c_empty += &other.c_empty;
        for i in 0..other.n_nodes() {
            self.src_cap[map[i]] += &other.src_cap[i];
            self.sink_cap[map[i]] += &other.sink_cap[i];
        }
        for ((u, v), c) in &other.pair_cap {
            *self
                .pair_cap
                .entry((map[*u], map[*v]))
                .or_insert_with(Rational::zero) += c;
        }
    }

    pub fn evaluate(&self, labeling: &[bool]) -> Result<Rational> {
        if labeling.len() != self.n_nodes() {
            return Err(Error::WidthMismatch {
                width: self.n_nodes(),
            });
        }
        let mut v = self.c_empty.clone();
        for (i, &b) in labeling.iter().enumerate() {
            v += if b {
                &self.sink_cap[i]
            } else {
                &self.src_cap[i]
            };
        }
        for ((u, w), c) in &self.pair_cap {
            if labeling[*u] && !labeling[*w] {
                v += c;
            }
        }
        Ok(v)
    }
}

/// Normal form: each `a·x_i·x_j` (a ≤ 0, i < j) becomes `−a·x_i(1−x_j) + a·x_i`;
/// each linear coefficient then goes to the sink side when positive, or to
/// the source side with a matching constant shift when negative.
pub fn to_capacity_form(h: &QuadraticPoly) -> Result<CapacityForm> {
    h.check_submodular()?;
    let mut lin = h.linear.clone();
    let mut c = CapacityForm::zero(h.n_x, h.n_vars());
    c.c_empty = h.constant.clone();
    for ((i, j), a) in &h.pairs {
        c.add_pair(*i, *j, &-a)?;
        lin[*i] += a;
    }
    for (i, l) in lin.iter().enumerate() {
        if l.is_negative() {
            c.src_cap[i] = -l;
            c.c_empty += l;
        } else {
            c.sink_cap[i] = l.clone();
        }
    }
    Ok(c)
}

pub fn from_capacity_form(c: &CapacityForm) -> QuadraticPoly {
    let mut h = QuadraticPoly::zero(c.n_x, c.n_nodes() - c.n_x);
    h.constant = c.c_empty.clone();
    for i in 0..c.n_nodes() {
        h.constant += &c.src_cap[i];
        h.linear[i] += &c.sink_cap[i] - &c.src_cap[i];
    }
    for ((u, v), w) in &c.pair_cap {
        h.linear[*u] += w;
        h.add_pair(*u, *v, &-w);
    }
    h
}

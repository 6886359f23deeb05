//! Fourth-order functions with two interacting auxiliary variables.
//!
//! The forward auxiliary is 1 on labelings with at least three ones and the
//! backward auxiliary on labelings with at least two. A small LP searches
//! for a quadratic over both whose minimum reproduces the target, so the
//! result is certified by the oracle rather than by construction.

mod catalog;
mod pipeline;

pub use catalog::{catalog_patterns, generator_catalog, CatalogEntry, GROUP_COUNT};
pub use pipeline::{
    case_split, complemented_form, determinant, merge_duplicate_avs, normalize_to_reference,
    params_of, reduce_av_count, reference_direction, reference_system, remove_singletons,
    CaseSplit, Direction, SplitCase, PRINTED_SYSTEM,
};

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::mbf::AvParams;
use crate::oracle::{self, VerificationReport};
use crate::pbf::{MultilinearPoly, QuadraticPoly, SubsetMask};
use crate::rational::Rational;

/// The six pairs of four variables in lexicographic order.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
/// The four triples of four variables in lexicographic order.
pub const TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

/// Variable index of the forward auxiliary in [`JointQuadratic::to_quadratic`].
pub const FORWARD_AV: usize = 4;
/// Variable index of the backward auxiliary.
pub const BACKWARD_AV: usize = 5;

fn zeros<const N: usize>() -> [Rational; N] {
    std::array::from_fn(|_| Rational::zero())
}

/// A pseudo-Boolean function of four variables by monomial coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuarticFunction {
    pub constant: Rational,
    pub linear: [Rational; 4],
    /// In [`PAIRS`] order.
    pub pairs: [Rational; 6],
    /// In [`TRIPLES`] order.
    pub triples: [Rational; 4],
    pub quartic: Rational,
}

impl QuarticFunction {
    pub fn zero() -> Self {
        QuarticFunction {
            constant: Rational::zero(),
            linear: zeros(),
            pairs: zeros(),
            triples: zeros(),
            quartic: Rational::zero(),
        }
    }

    pub fn from_poly(p: &MultilinearPoly) -> Result<Self> {
        let p = p.with_n_vars(4)?;
        Ok(QuarticFunction {
            constant: p.coeff(SubsetMask::EMPTY),
            linear: std::array::from_fn(|i| p.coeff(SubsetMask::singleton(i))),
            pairs: std::array::from_fn(|e| {
                p.coeff(SubsetMask::from_indices([PAIRS[e].0, PAIRS[e].1]))
            }),
            triples: std::array::from_fn(|t| p.coeff(SubsetMask::from_indices(TRIPLES[t]))),
            quartic: p.coeff(SubsetMask::full(4)),
        })
    }

    pub fn to_poly(&self) -> MultilinearPoly {
        let mut terms = vec![
            (SubsetMask::EMPTY, self.constant.clone()),
            (SubsetMask::full(4), self.quartic.clone()),
        ];
        terms.extend(
            self.linear
                .iter()
                .enumerate()
                .map(|(i, c)| (SubsetMask::singleton(i), c.clone())),
        );
        terms.extend(
            PAIRS
                .iter()
                .zip(&self.pairs)
                .map(|(&(i, j), c)| (SubsetMask::from_indices([i, j]), c.clone())),
        );
        terms.extend(
            TRIPLES
                .iter()
                .zip(&self.triples)
                .map(|(t, c)| (SubsetMask::from_indices(*t), c.clone())),
        );
        MultilinearPoly::from_terms(4, terms).expect("indices below four")
    }

    pub fn evaluate(&self, s: SubsetMask) -> Rational {
        self.to_poly().evaluate(s).expect("four variables")
    }

    pub fn is_submodular(&self) -> bool {
        self.to_poly().is_submodular().expect("four variables")
    }
}

/// `b0 + Σ b_i x_i − Σ b_ij x_i x_j + κ_f(x)·z_f + κ_b(x)·z_b − j·z_f·z_b`,
/// with both `κ` in [`AvParams`] form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointQuadratic {
    pub constant: Rational,
    pub linear: [Rational; 4],
    /// Magnitudes of the (non-positive) pair coefficients, in [`PAIRS`] order.
    pub pair_magnitudes: [Rational; 6],
    pub forward: AvParams,
    pub backward: AvParams,
    pub interaction: Rational,
}

impl JointQuadratic {
    pub fn zero() -> Self {
        let av = AvParams::ints(0, &[0; 4]);
        JointQuadratic {
            constant: Rational::zero(),
            linear: zeros(),
            pair_magnitudes: zeros(),
            forward: av.clone(),
            backward: av,
            interaction: Rational::zero(),
        }
    }

    pub fn value(&self, s: SubsetMask, zf: bool, zb: bool) -> Rational {
        let mut v = self.constant.clone();
        for i in s.iter() {
            v += &self.linear[i];
        }
        for (&(i, j), b) in PAIRS.iter().zip(&self.pair_magnitudes) {
            if s.contains(i) && s.contains(j) {
                v -= b;
            }
        }
        if zf {
            v += self.forward.kappa(s);
        }
        if zb {
            v += self.backward.kappa(s);
        }
        if zf && zb {
            v -= &self.interaction;
        }
        v
    }

    /// Four original variables, then the forward and backward auxiliaries.
    pub fn to_quadratic(&self) -> QuadraticPoly {
        let mut h = QuadraticPoly::zero(4, 2);
        h.add_constant(&self.constant);
        for (i, c) in self.linear.iter().enumerate() {
            h.add_linear(i, c);
        }
        for (&(i, j), b) in PAIRS.iter().zip(&self.pair_magnitudes) {
            h.add_pair(i, j, &-b);
        }
        for (av, p) in [(FORWARD_AV, &self.forward), (BACKWARD_AV, &self.backward)] {
            h.add_linear(av, &p.bias);
            for (i, w) in p.weights.iter().enumerate() {
                h.add_pair(i, av, &-w);
            }
        }
        h.add_pair(FORWARD_AV, BACKWARD_AV, &-&self.interaction);
        h
    }
}

/// Whether both auxiliaries are 1 at `s`, i.e. `|s| ≥ 3`.
pub fn eta(s: SubsetMask) -> bool {
    s.len() >= 3
}

/// Prescribed `(forward, backward)` state at `s`.
pub fn prescribed_states(s: SubsetMask) -> (bool, bool) {
    (s.len() >= 3, s.len() >= 2)
}

/// How the LP ties the auxiliaries to their prescribed states.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StateConstraints {
    /// The prescribed pair of states is a joint minimizer of the auxiliary
    /// part at every labeling, so the minimum equals the fitted value.
    #[default]
    JointOptimality,
    /// Only the sign of each `κ`: `≤ 0` where the auxiliary is 1, `≥ 0`
    /// elsewhere. With a positive interaction term this does not make the
    /// prescribed states optimal, so solutions still go through the oracle.
    KappaSigns,
}

/// LP columns of the [`JointQuadratic`] coefficients.
struct Columns {
    constant: usize,
    linear: [usize; 4],
    pairs: [usize; 6],
    fwd_bias: usize,
    fwd: [usize; 4],
    bwd_bias: usize,
    bwd: [usize; 4],
    interaction: usize,
}

impl Columns {
    fn declare(lp: &mut LinearProgram) -> Self {
        Columns {
            constant: lp.add_free("b0"),
            linear: std::array::from_fn(|i| lp.add_free(format!("b{}", i + 1))),
            pairs: std::array::from_fn(|e| {
                lp.add_nonneg(format!("b{}{}", PAIRS[e].0 + 1, PAIRS[e].1 + 1))
            }),
            fwd_bias: lp.add_free("gf"),
            fwd: std::array::from_fn(|i| lp.add_nonneg(format!("gf{}", i + 1))),
            bwd_bias: lp.add_free("gb"),
            bwd: std::array::from_fn(|i| lp.add_nonneg(format!("gb{}", i + 1))),
            interaction: lp.add_nonneg("j12"),
        }
    }

    fn kappa(&self, forward: bool, s: SubsetMask) -> Vec<(usize, Rational)> {
        let (bias, w) = if forward {
            (self.fwd_bias, &self.fwd)
        } else {
            (self.bwd_bias, &self.bwd)
        };
        let mut e = vec![(bias, Rational::one())];
        e.extend(s.iter().map(|i| (w[i], -Rational::one())));
        e
    }

    /// Auxiliary part of `h` at `s` for fixed states.
    fn aux_part(&self, s: SubsetMask, zf: bool, zb: bool) -> Vec<(usize, Rational)> {
        let mut e = Vec::new();
        if zf {
            e.extend(self.kappa(true, s));
        }
        if zb {
            e.extend(self.kappa(false, s));
        }
        if zf && zb {
            e.push((self.interaction, -Rational::one()));
        }
        e
    }

    fn value(&self, s: SubsetMask, zf: bool, zb: bool) -> Vec<(usize, Rational)> {
        let mut e = vec![(self.constant, Rational::one())];
        e.extend(s.iter().map(|i| (self.linear[i], Rational::one())));
        for (e_id, &(i, j)) in PAIRS.iter().enumerate() {
            if s.contains(i) && s.contains(j) {
                e.push((self.pairs[e_id], -Rational::one()));
            }
        }
        e.extend(self.aux_part(s, zf, zb));
        e
    }

    fn read(&self, v: &[Rational]) -> JointQuadratic {
        let params = |bias: usize, w: &[usize; 4]| AvParams {
            bias: v[bias].clone(),
            weights: w.iter().map(|&c| v[c].clone()).collect(),
        };
        JointQuadratic {
            constant: v[self.constant].clone(),
            linear: std::array::from_fn(|i| v[self.linear[i]].clone()),
            pair_magnitudes: std::array::from_fn(|e| v[self.pairs[e]].clone()),
            forward: params(self.fwd_bias, &self.fwd),
            backward: params(self.bwd_bias, &self.bwd),
            interaction: v[self.interaction].clone(),
        }
    }
}

fn neg(e: Vec<(usize, Rational)>) -> impl Iterator<Item = (usize, Rational)> {
    e.into_iter().map(|(i, c)| (i, -c))
}

fn build(
    f: &QuarticFunction,
    exact: bool,
    constraints: StateConstraints,
) -> (LinearProgram, Columns) {
    let mut lp = LinearProgram::new();
    let cols = Columns::declare(&mut lp);
    let mut slacks = Vec::new();
    for s in SubsetMask::all(4) {
        let (zf, zb) = prescribed_states(s);
        let fitted = cols.value(s, zf, zb);
        let target = f.evaluate(s);
        if exact {
            lp.add_constraint(fitted, Relation::Eq, target);
        } else {
            let e = lp.add_nonneg(format!("dist{}", s.bits()));
            slacks.push((e, Rational::one()));
            lp.add_constraint(
                fitted.iter().cloned().chain([(e, Rational::one())]),
                Relation::Ge,
                target.clone(),
            );
            lp.add_constraint(
                neg(fitted).chain([(e, Rational::one())]),
                Relation::Ge,
                -target,
            );
        }
        match constraints {
            StateConstraints::JointOptimality => {
                for (af, ab) in [(false, false), (true, false), (false, true), (true, true)] {
                    if (af, ab) != (zf, zb) {
                        let here = cols.aux_part(s, zf, zb);
                        let other = cols.aux_part(s, af, ab);
                        lp.add_constraint(
                            here.into_iter().chain(neg(other)),
                            Relation::Le,
                            Rational::zero(),
                        );
                    }
                }
            }
            StateConstraints::KappaSigns => {
                for (forward, on) in [(true, zf), (false, zb)] {
                    let rel = if on { Relation::Le } else { Relation::Ge };
                    lp.add_constraint(cols.kappa(forward, s), rel, Rational::zero());
                }
            }
        }
    }
    lp.set_objective(slacks);
    (lp, cols)
}

/// The two-auxiliary program. With `exact` the 16 fitted values must equal
/// the target and the objective is empty; otherwise their L1 distance to
/// the target is minimized.
pub fn build_quartic_lp(f: &QuarticFunction, exact: bool) -> Result<LinearProgram> {
    build_quartic_lp_with(f, exact, StateConstraints::default())
}

pub fn build_quartic_lp_with(
    f: &QuarticFunction,
    exact: bool,
    constraints: StateConstraints,
) -> Result<LinearProgram> {
    if !f.is_submodular() {
        return Err(Error::NotSubmodular);
    }
    Ok(build(f, exact, constraints).0)
}

/// Solves the program; `None` when the exact version is infeasible.
pub fn solve_quartic_lp(
    f: &QuarticFunction,
    exact: bool,
    constraints: StateConstraints,
) -> Result<Option<(JointQuadratic, Rational)>> {
    if !f.is_submodular() {
        return Err(Error::NotSubmodular);
    }
    let (lp, cols) = build(f, exact, constraints);
    let sol = lp.solve();
    match sol.status {
        LpStatus::Optimal => Ok(Some((cols.read(&sol.values), sol.objective_value))),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(Error::Invariant("quartic LP unbounded".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuarticReduction {
    pub joint: JointQuadratic,
    pub quadratic: QuadraticPoly,
    pub report: VerificationReport,
    /// L1 distance of the fitted minimum to the target (0 when exact).
    pub distance: Rational,
}

/// Whether each auxiliary takes its prescribed state wherever fixing that
/// state is strictly better or worse than the alternative.
pub fn states_follow_generators(j: &JointQuadratic) -> bool {
    SubsetMask::all(4).all(|s| {
        let (zf, zb) = prescribed_states(s);
        let best = |which: usize, state: bool| {
            [(false, false), (true, false), (false, true), (true, true)]
                .into_iter()
                .filter(|&(a, b)| if which == 0 { a == state } else { b == state })
                .map(|(a, b)| j.value(s, a, b))
                .min()
                .expect("two states")
        };
        [(0, zf), (1, zb)].into_iter().all(|(which, z)| {
            let (on, off) = (best(which, true), best(which, false));
            on == off || (on < off) == z
        })
    })
}

fn finish(
    f: &QuarticFunction,
    joint: JointQuadratic,
    distance: Rational,
) -> Result<QuarticReduction> {
    let quadratic = joint.to_quadratic();
    let report = oracle::verify_reduction(&f.to_poly(), &quadratic)?;
    if report.l1_gap() != distance {
        return Err(Error::Invariant(format!(
            "oracle distance {} differs from LP distance {distance}",
            report.l1_gap()
        )));
    }
    if !states_follow_generators(&joint) {
        return Err(Error::Invariant(
            "auxiliary states leave the generator partitions".into(),
        ));
    }
    Ok(QuarticReduction {
        joint,
        quadratic,
        report,
        distance,
    })
}

/// Exact two-auxiliary reduction, certified on all 16 labelings.
pub fn reduce_quartic(f: &QuarticFunction) -> Result<QuarticReduction> {
    reduce_quartic_with(f, StateConstraints::default())
}

pub fn reduce_quartic_with(
    f: &QuarticFunction,
    constraints: StateConstraints,
) -> Result<QuarticReduction> {
    match solve_quartic_lp(f, true, constraints)? {
        Some((joint, _)) => finish(f, joint, Rational::zero()),
        None => Err(Error::NotRepresentable),
    }
}

/// L1-nearest two-auxiliary quadratic.
pub fn nearest_quartic(f: &QuarticFunction) -> Result<QuarticReduction> {
    let (joint, distance) = solve_quartic_lp(f, false, StateConstraints::JointOptimality)?
        .ok_or_else(|| Error::Invariant("distance LP infeasible".into()))?;
    finish(f, joint, distance)
}

//! Nearest quadratic with prescribed auxiliary-variable tables.
//!
//! The unknowns are the capacities of a [`CapacityForm`] over the original
//! block plus one node per table. For every labeling `x` the prescribed
//! auxiliary state `m(x)` must minimize `h(x, ·)`, and the objective is the
//! L1 distance `Σ_x |g(x) − h(x, m(x))|`.
//!
//! Two exact formulations are provided:
//! * [`LpStrategy::FullFlow`] writes one flow network per labeling into the
//!   LP; any feasible flow bounds the minimum cut from below, so requiring
//!   `cut(m(x)) ≤ flow` pins `m(x)` to a minimum cut.
//! * [`LpStrategy::CutGeneration`] keeps only capacities and slacks and adds
//!   `h(x, m(x)) ≤ h(x, z*)` whenever max-flow finds a better `z*`. It
//!   reaches the same optimum with a much smaller program.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::maxflow;
use crate::mbf::MbfTable;
use crate::oracle;
use crate::pbf::{
    from_capacity_form, CapacityForm, MultilinearPoly, QuadraticPoly, SubsetMask, ENUM_CAP,
};
use crate::rational::Rational;

/// Tables beyond this count need [`ProblemOptions::allow_large`].
pub const MBF_SET_GUARD: usize = 40;
/// Largest original block; the programs have one block per labeling.
pub const MAX_K: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProblemOptions {
    /// Accept constant and single-variable tables.
    pub allow_degenerate: bool,
    /// Lift the table-count guard.
    pub allow_large: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LpStrategy {
    #[default]
    CutGeneration,
    FullFlow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionProblem {
    target: MultilinearPoly,
    k: usize,
    mbf_set: Vec<MbfTable>,
}

impl ReductionProblem {
    pub fn new(target: &MultilinearPoly, k: usize, mbf_set: Vec<MbfTable>) -> Result<Self> {
        Self::with_options(target, k, mbf_set, ProblemOptions::default())
    }

    pub fn with_options(
        target: &MultilinearPoly,
        k: usize,
        mbf_set: Vec<MbfTable>,
        options: ProblemOptions,
    ) -> Result<Self> {
        if k > MAX_K {
            return Err(Error::SizeGuard(format!(
                "{k} original variables (limit {MAX_K})"
            )));
        }
        let target = target.with_n_vars(k)?;
        for (i, t) in mbf_set.iter().enumerate() {
            if t.k() != k {
                return Err(Error::MbfWidthMismatch {
                    expected: k,
                    found: t.k(),
                });
            }
            if mbf_set[..i].contains(t) {
                return Err(Error::DuplicateMbf);
            }
            if t.is_degenerate() && !options.allow_degenerate {
                return Err(Error::DegenerateMbf);
            }
        }
        if mbf_set.len() > MBF_SET_GUARD && !options.allow_large {
            return Err(Error::SizeGuard(format!(
                "{} tables (limit {MBF_SET_GUARD} without the large-problem flag)",
                mbf_set.len()
            )));
        }
        Ok(ReductionProblem { target, k, mbf_set })
    }

    pub fn target(&self) -> &MultilinearPoly {
        &self.target
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mbf_set(&self) -> &[MbfTable] {
        &self.mbf_set
    }

    fn n_nodes(&self) -> usize {
        self.k + self.mbf_set.len()
    }

    fn x_bits(&self, x: u32) -> Vec<bool> {
        (0..self.k).map(|i| x >> i & 1 == 1).collect()
    }

    /// Prescribed auxiliary state for labeling `x`.
    fn prescribed(&self, x: u32) -> Vec<bool> {
        self.mbf_set.iter().map(|t| t.get(SubsetMask(x))).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionResult {
    /// Over the original block followed by one auxiliary per table.
    pub quadratic: QuadraticPoly,
    pub l1_distance: Rational,
    /// `g(x) − min_z h(x, z)`, recomputed independently of the LP.
    pub per_labeling_gap: BTreeMap<SubsetMask, Rational>,
    pub lp_objective: Rational,
}

/// LP column ids of every capacity in the layout.
struct CapVars {
    c_empty: usize,
    src: Vec<usize>,
    sink: Vec<usize>,
    /// `(u, v)` with `u < v`: charged when `u` is 1 and `v` is 0.
    pair: BTreeMap<(usize, usize), usize>,
}

impl CapVars {
    fn declare(lp: &mut LinearProgram, n: usize) -> Self {
        let c_empty = lp.add_free("c_empty");
        let src = (0..n)
            .map(|i| lp.add_nonneg(format!("src{}", i + 1)))
            .collect();
        let sink = (0..n)
            .map(|i| lp.add_nonneg(format!("sink{}", i + 1)))
            .collect();
        let mut pair = BTreeMap::new();
        for u in 0..n {
            for v in u + 1..n {
                pair.insert((u, v), lp.add_nonneg(format!("pair{}_{}", u + 1, v + 1)));
            }
        }
        CapVars {
            c_empty,
            src,
            sink,
            pair,
        }
    }

    /// The cost at a full labeling as a linear form in the capacities.
    fn cost(&self, labeling: &[bool]) -> Vec<(usize, Rational)> {
        let one = Rational::one;
        let mut e = vec![(self.c_empty, one())];
        for (i, &b) in labeling.iter().enumerate() {
            e.push((if b { self.sink[i] } else { self.src[i] }, one()));
        }
        for (&(u, v), &id) in &self.pair {
            if labeling[u] && !labeling[v] {
                e.push((id, one()));
            }
        }
        e
    }

    fn form(&self, values: &[Rational], n_x: usize) -> CapacityForm {
        let n = self.src.len();
        let mut c = CapacityForm::zero(n_x, n);
        c.c_empty = values[self.c_empty].clone();
        for i in 0..n {
            c.add_src(i, &values[self.src[i]])
                .expect("LP keeps capacities non-negative");
            c.add_sink(i, &values[self.sink[i]])
                .expect("LP keeps capacities non-negative");
        }
        for (&(u, v), &id) in &self.pair {
            c.add_pair(u, v, &values[id])
                .expect("LP keeps capacities non-negative");
        }
        c
    }
}

fn joined(x: &[bool], z: &[bool]) -> Vec<bool> {
    x.iter().chain(z).copied().collect()
}

fn neg(e: &[(usize, Rational)]) -> Vec<(usize, Rational)> {
    e.iter().map(|(i, c)| (*i, -c)).collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode<'a> {
    Nearest,
    Over(&'a SubsetMask),
}

/// Capacities, slacks and the distance rows shared by both strategies.
fn base_program(p: &ReductionProblem, mode: Mode) -> (LinearProgram, CapVars, Vec<usize>) {
    let mut lp = LinearProgram::new();
    let caps = CapVars::declare(&mut lp, p.n_nodes());
    let mut slacks = Vec::new();
    for x in 0..1u32 << p.k {
        let e = lp.add_nonneg(format!("dist{x}"));
        slacks.push(e);
        let g = p.target.eval_unchecked(SubsetMask(x));
        let at_m = caps.cost(&joined(&p.x_bits(x), &p.prescribed(x)));
        // e ≥ h − g and e ≥ g − h.
        lp.add_constraint(
            neg(&at_m).into_iter().chain([(e, Rational::one())]),
            Relation::Ge,
            -&g,
        );
        lp.add_constraint(
            at_m.iter().cloned().chain([(e, Rational::one())]),
            Relation::Ge,
            g.clone(),
        );
        if let Mode::Over(anchor) = mode {
            let rel = if SubsetMask(x) == *anchor {
                Relation::Eq
            } else {
                Relation::Ge
            };
            lp.add_constraint(at_m, rel, g);
        }
    }
    lp.set_objective(slacks.iter().map(|&e| (e, Rational::one())));
    (lp, caps, slacks)
}

/// The full per-labeling flow program for the nearest quadratic.
pub fn build_reduction_lp(p: &ReductionProblem) -> LinearProgram {
    build_flow_program(p, Mode::Nearest).0
}

fn build_flow_program(p: &ReductionProblem, mode: Mode) -> (LinearProgram, CapVars) {
    let (mut lp, caps, _) = base_program(p, mode);
    let (k, m) = (p.k, p.mbf_set.len());
    let one = Rational::one;
    for x in 0..1u32 << k {
        let xb = p.x_bits(x);
        // Arcs over auxiliary nodes 0..m, source m, sink m + 1, each with
        // its capacity as a linear form.
        let (s, t) = (m, m + 1);
        let mut arcs: Vec<(usize, usize, Vec<(usize, Rational)>)> = Vec::new();
        for l in 0..m {
            arcs.push((s, l, vec![(caps.sink[k + l], one())]));
            let mut to_sink = vec![(caps.src[k + l], one())];
            for i in (0..k).filter(|&i| xb[i]) {
                to_sink.push((caps.pair[&(i, k + l)], one()));
            }
            arcs.push((l, t, to_sink));
        }
        for l in 0..m {
            for q in l + 1..m {
                arcs.push((q, l, vec![(caps.pair[&(k + l, k + q)], one())]));
            }
        }
        let mut inflow: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); m];
        let mut from_source = Vec::new();
        for (a, (from, to, cap)) in arcs.into_iter().enumerate() {
            let f = lp.add_nonneg(format!("flow{x}_{a}"));
            lp.add_constraint(
                neg(&cap).into_iter().chain([(f, one())]),
                Relation::Le,
                Rational::zero(),
            );
            if from == s {
                from_source.push((f, one()));
            } else {
                inflow[from].push((f, -one()));
            }
            if to != t {
                inflow[to].push((f, one()));
            }
        }
        for row in inflow {
            if !row.is_empty() {
                lp.add_constraint(row, Relation::Eq, Rational::zero());
            }
        }
        let value = lp.add_nonneg(format!("value{x}"));
        lp.add_constraint(
            from_source.into_iter().chain([(value, -one())]),
            Relation::Eq,
            Rational::zero(),
        );
        // The cut cost of m(x) is h(x, m(x)) minus the part that does not
        // depend on the auxiliary block; it may not exceed the flow value.
        let mut cut_cost = caps.cost(&joined(&xb, &p.prescribed(x)));
        cut_cost.push((caps.c_empty, -one()));
        for i in 0..k {
            cut_cost.push((if xb[i] { caps.sink[i] } else { caps.src[i] }, -one()));
            for j in i + 1..k {
                if xb[i] && !xb[j] {
                    cut_cost.push((caps.pair[&(i, j)], -one()));
                }
            }
        }
        lp.add_constraint(
            cut_cost.into_iter().chain([(value, -one())]),
            Relation::Le,
            Rational::zero(),
        );
    }
    (lp, caps)
}

/// Minimum of `h(x, ·)` and a minimizing auxiliary state, via max-flow.
fn best_response(form: &CapacityForm, xb: &[bool]) -> (Rational, Vec<bool>) {
    let h = from_capacity_form(form);
    maxflow::min_over_aux(&h, xb).expect("capacities are non-negative")
}

fn solve_cut_generation(
    p: &ReductionProblem,
    mode: Mode,
) -> Result<(Vec<Rational>, CapVars, Rational)> {
    let (mut lp, caps, _) = base_program(p, mode);
    let m = p.mbf_set.len();
    // Seed with single flips of the prescribed state.
    for x in 0..1u32 << p.k {
        let xb = p.x_bits(x);
        let mz = p.prescribed(x);
        let at_m = caps.cost(&joined(&xb, &mz));
        for l in 0..m {
            let mut flip = mz.clone();
            flip[l] = !flip[l];
            let alt = caps.cost(&joined(&xb, &flip));
            lp.add_constraint(
                at_m.iter().cloned().chain(neg(&alt)),
                Relation::Le,
                Rational::zero(),
            );
        }
    }
    loop {
        let sol = lp.solve();
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Err(Error::AnchorInfeasible),
            LpStatus::Unbounded => return Err(Error::Invariant("distance LP unbounded".into())),
        }
        let form = caps.form(&sol.values, p.k);
        let mut added = false;
        for x in 0..1u32 << p.k {
            let xb = p.x_bits(x);
            let mz = p.prescribed(x);
            let at_m = form.evaluate(&joined(&xb, &mz)).expect("width matches");
            let (best, z) = best_response(&form, &xb);
            if best < at_m {
                let lhs = caps.cost(&joined(&xb, &mz));
                let rhs = caps.cost(&joined(&xb, &z));
                lp.add_constraint(
                    lhs.into_iter().chain(neg(&rhs)),
                    Relation::Le,
                    Rational::zero(),
                );
                added = true;
            }
        }
        if !added {
            return Ok((sol.values, caps, sol.objective_value));
        }
    }
}

fn solve_full_flow(p: &ReductionProblem, mode: Mode) -> Result<(Vec<Rational>, CapVars, Rational)> {
    let (lp, caps) = build_flow_program(p, mode);
    let sol = lp.solve();
    match sol.status {
        LpStatus::Optimal => Ok((sol.values, caps, sol.objective_value)),
        LpStatus::Infeasible => Err(Error::AnchorInfeasible),
        LpStatus::Unbounded => Err(Error::Invariant("distance LP unbounded".into())),
    }
}

fn assemble(
    p: &ReductionProblem,
    form: &CapacityForm,
    lp_objective: Rational,
) -> Result<ReductionResult> {
    let quadratic = from_capacity_form(form);
    let mut per_labeling_gap = BTreeMap::new();
    if p.n_nodes() <= ENUM_CAP {
        let report = oracle::verify_reduction(&p.target, &quadratic)?;
        for row in report.rows {
            per_labeling_gap.insert(row.x, row.gap);
        }
    } else {
        for x in 0..1u32 << p.k {
            let (best, _) = maxflow::min_over_aux(&quadratic, &p.x_bits(x))?;
            per_labeling_gap.insert(SubsetMask(x), p.target.eval_unchecked(SubsetMask(x)) - best);
        }
    }
    let l1_distance: Rational = per_labeling_gap.values().map(|g| g.abs()).sum();
    if l1_distance != lp_objective {
        return Err(Error::Invariant(format!(
            "recomputed distance {l1_distance} differs from LP objective {lp_objective}"
        )));
    }
    Ok(ReductionResult {
        quadratic,
        l1_distance,
        per_labeling_gap,
        lp_objective,
    })
}

/// Tries the threshold tables alone first. A zero distance there is already
/// optimal for the full set, with the other auxiliaries left unconnected.
fn try_threshold_tables(p: &ReductionProblem, mode: Mode) -> Option<CapacityForm> {
    let core: Vec<usize> = (0..p.mbf_set.len())
        .filter(|&l| (2..=p.k).any(|r| p.mbf_set[l] == MbfTable::at_least(p.k, r)))
        .collect();
    if core.is_empty() || core.len() == p.mbf_set.len() {
        return None;
    }
    let sub = ReductionProblem {
        target: p.target.clone(),
        k: p.k,
        mbf_set: core.iter().map(|&l| p.mbf_set[l].clone()).collect(),
    };
    let (values, caps, obj) = solve_cut_generation(&sub, mode).ok()?;
    if !obj.is_zero() {
        return None;
    }
    let map: Vec<usize> = (0..p.k).chain(core.iter().map(|&l| p.k + l)).collect();
    let mut form = CapacityForm::zero(p.k, p.n_nodes());
    form.add_mapped(&caps.form(&values, p.k), &map);
    Some(form)
}

fn run(p: &ReductionProblem, strategy: LpStrategy, mode: Mode) -> Result<ReductionResult> {
    if strategy == LpStrategy::CutGeneration {
        if let Some(form) = try_threshold_tables(p, mode) {
            return assemble(p, &form, Rational::zero());
        }
    }
    let (values, caps, obj) = match strategy {
        LpStrategy::CutGeneration => solve_cut_generation(p, mode)?,
        LpStrategy::FullFlow => solve_full_flow(p, mode)?,
    };
    assemble(p, &caps.form(&values, p.k), obj)
}

/// L1-nearest quadratic whose auxiliaries follow the prescribed tables.
pub fn nearest_quadratic(p: &ReductionProblem) -> Result<ReductionResult> {
    nearest_quadratic_with(p, LpStrategy::default())
}

pub fn nearest_quadratic_with(
    p: &ReductionProblem,
    strategy: LpStrategy,
) -> Result<ReductionResult> {
    run(p, strategy, Mode::Nearest)
}

/// An exact quadratic with unused auxiliaries removed, and how many remain.
pub fn exact_reduce(p: &ReductionProblem) -> Result<Option<(QuadraticPoly, usize)>> {
    let r = nearest_quadratic(p)?;
    if !r.l1_distance.is_zero() {
        return Ok(None);
    }
    let h = r.quadratic.without_unused_aux();
    if h.n_vars() <= ENUM_CAP && !oracle::verify_reduction(&p.target, &h)?.pass {
        return Err(Error::Invariant(
            "zero-distance reduction failed verification".into(),
        ));
    }
    let n = h.n_aux();
    Ok(Some((h, n)))
}

/// Smallest total overestimate `Σ_x (h(x) − g(x))` with `h ≥ g` everywhere
/// and equality at `anchor`.
pub fn overestimate(p: &ReductionProblem, anchor: SubsetMask) -> Result<ReductionResult> {
    overestimate_with(p, anchor, LpStrategy::default())
}

pub fn overestimate_with(
    p: &ReductionProblem,
    anchor: SubsetMask,
    strategy: LpStrategy,
) -> Result<ReductionResult> {
    if !anchor.fits(p.k) {
        return Err(Error::WidthMismatch { width: p.k });
    }
    run(p, strategy, Mode::Over(&anchor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mbf::{enumerate_mbfs, prune_mbf_set};
    use crate::rational::int;

    fn poly(n: usize, terms: &[(i64, &[usize])]) -> MultilinearPoly {
        MultilinearPoly::from_terms(
            n,
            terms
                .iter()
                .map(|(c, idx)| (SubsetMask::from_indices(idx.iter().map(|i| i - 1)), int(*c))),
        )
        .unwrap()
    }

    fn pruned(k: usize) -> Vec<MbfTable> {
        prune_mbf_set(&enumerate_mbfs(k).unwrap())
    }

    #[test]
    fn quadratic_target_needs_no_tables() {
        let f = poly(2, &[(3, &[]), (-2, &[1, 2]), (1, &[2])]);
        let p = ReductionProblem::new(&f, 2, vec![]).unwrap();
        for strategy in [LpStrategy::CutGeneration, LpStrategy::FullFlow] {
            let r = nearest_quadratic_with(&p, strategy).unwrap();
            assert_eq!(r.l1_distance, int(0));
            assert_eq!(r.quadratic.to_multilinear().unwrap(), f);
        }
    }

    #[test]
    fn negative_cubic_is_exact() {
        let f = poly(3, &[(-1, &[1, 2, 3])]);
        let p = ReductionProblem::new(&f, 3, pruned(3)).unwrap();
        let r = nearest_quadratic(&p).unwrap();
        assert_eq!(r.l1_distance, int(0));
        assert!(r.per_labeling_gap.values().all(|g| g.is_zero()));
        let (h, n) = exact_reduce(&p).unwrap().unwrap();
        assert!(n >= 1);
        assert!(oracle::verify_reduction(&f, &h).unwrap().pass);
    }

    #[test]
    fn supermodular_cubic_has_positive_distance() {
        let f = poly(3, &[(1, &[1, 2, 3])]);
        let p = ReductionProblem::new(&f, 3, pruned(3)).unwrap();
        assert!(nearest_quadratic(&p).unwrap().l1_distance.is_positive());
        assert_eq!(exact_reduce(&p).unwrap(), None);
    }

    #[test]
    fn zero_target() {
        let p = ReductionProblem::new(&MultilinearPoly::zero(3), 3, pruned(3)).unwrap();
        let r = nearest_quadratic(&p).unwrap();
        assert_eq!(r.l1_distance, int(0));
    }

    #[test]
    fn quadratic_members_of_f2_reduce_with_nothing() {
        let f = poly(3, &[(-1, &[1, 2]), (-2, &[2, 3]), (5, &[1])]);
        let (h, n) = exact_reduce(&ReductionProblem::new(&f, 3, vec![]).unwrap())
            .unwrap()
            .unwrap();
        assert_eq!(n, 0);
        assert_eq!(h.to_multilinear().unwrap(), f);
    }

    #[test]
    fn supermodular_pair_is_not_exact() {
        let f = poly(2, &[(1, &[1, 2])]);
        let p = ReductionProblem::new(&f, 2, pruned(2)).unwrap();
        assert_eq!(exact_reduce(&p).unwrap(), None);
    }

    #[test]
    fn problem_validation() {
        let f = MultilinearPoly::zero(2);
        assert_eq!(
            ReductionProblem::new(&f, 2, vec![MbfTable::constant(2, false)]),
            Err(Error::DegenerateMbf)
        );
        let ok = ProblemOptions {
            allow_degenerate: true,
            ..Default::default()
        };
        assert!(
            ReductionProblem::with_options(&f, 2, vec![MbfTable::constant(2, false)], ok).is_ok()
        );
        let and = MbfTable::at_least(2, 2);
        assert_eq!(
            ReductionProblem::new(&f, 2, vec![and.clone(), and]),
            Err(Error::DuplicateMbf)
        );
        assert!(matches!(
            ReductionProblem::new(&f, 2, vec![MbfTable::at_least(3, 2)]),
            Err(Error::MbfWidthMismatch { .. })
        ));
        let big = pruned(4);
        assert!(matches!(
            ReductionProblem::new(&MultilinearPoly::zero(4), 4, big.clone()),
            Err(Error::SizeGuard(_))
        ));
        let large = ProblemOptions {
            allow_large: true,
            ..Default::default()
        };
        assert!(ReductionProblem::with_options(&MultilinearPoly::zero(4), 4, big, large).is_ok());
    }

    #[test]
    fn strategies_agree_on_small_problems() {
        let cases = [
            poly(3, &[(1, &[1, 2, 3])]),
            poly(3, &[(-1, &[1, 2, 3]), (2, &[1, 2]), (-1, &[3])]),
            poly(
                3,
                &[(1, &[1, 2, 3]), (-1, &[1, 2]), (-1, &[1, 3]), (-1, &[2, 3])],
            ),
        ];
        let tables = vec![MbfTable::at_least(3, 2), MbfTable::at_least(3, 3)];
        for f in &cases {
            let p = ReductionProblem::new(f, 3, tables.clone()).unwrap();
            let a = nearest_quadratic_with(&p, LpStrategy::CutGeneration).unwrap();
            let b = nearest_quadratic_with(&p, LpStrategy::FullFlow).unwrap();
            assert_eq!(a.l1_distance, b.l1_distance, "{f:?}");
        }
    }

    #[test]
    fn flow_program_shape() {
        let f = poly(2, &[(-1, &[1, 2])]);
        let p = ReductionProblem::new(&f, 2, vec![MbfTable::at_least(2, 2)]).unwrap();
        let lp = build_reduction_lp(&p);
        let caps = 1 + 3 + 3 + 3;
        // Per labeling: 2 arcs, a flow value, a distance slack.
        assert_eq!(lp.vars().len(), caps + 4 * (2 + 1 + 1));
        assert!(lp.dump().lines().count() > lp.constraints().len());
    }

    #[test]
    fn overestimate_supermodular_pair() {
        let f = poly(2, &[(1, &[1, 2])]);
        let p = ReductionProblem::new(&f, 2, vec![]).unwrap();
        let anchor = SubsetMask(0b11);
        let r = overestimate(&p, anchor).unwrap();
        for (x, gap) in &r.per_labeling_gap {
            assert!(!gap.is_positive(), "h must not undercut f at {x:?}");
        }
        assert_eq!(r.per_labeling_gap[&anchor], int(0));
    }

    #[test]
    fn overestimate_of_representable_is_exact() {
        let f = poly(3, &[(-1, &[1, 2, 3])]);
        let p = ReductionProblem::new(&f, 3, vec![MbfTable::at_least(3, 3)]).unwrap();
        let r = overestimate(&p, SubsetMask::EMPTY).unwrap();
        assert_eq!(r.l1_distance, int(0));
    }

    fn g10() -> MultilinearPoly {
        poly(
            4,
            &[
                (-1, &[1, 2, 3, 4]),
                (1, &[1, 3, 4]),
                (1, &[2, 3, 4]),
                (-1, &[1, 3]),
                (-1, &[1, 4]),
                (-1, &[2, 3]),
                (-1, &[2, 4]),
                (-1, &[3, 4]),
            ],
        )
    }

    fn generator_pair() -> Vec<MbfTable> {
        vec![MbfTable::at_least(4, 3), MbfTable::at_least(4, 2)]
    }

    #[test]
    fn g10_with_generator_pair_is_at_distance_one() {
        // Both strategies solve the same program; the value is frozen here.
        let p = ReductionProblem::new(&g10(), 4, generator_pair()).unwrap();
        for strategy in [LpStrategy::CutGeneration, LpStrategy::FullFlow] {
            assert_eq!(
                nearest_quadratic_with(&p, strategy).unwrap().l1_distance,
                int(1)
            );
        }
    }

    #[test]
    fn g10_overestimate_is_tight_at_empty_set() {
        let p = ReductionProblem::new(&g10(), 4, generator_pair()).unwrap();
        let r = overestimate(&p, SubsetMask::EMPTY).unwrap();
        assert_eq!(r.per_labeling_gap[&SubsetMask::EMPTY], int(0));
        assert!(r.per_labeling_gap.values().all(|g| !g.is_positive()));
        assert!(r.l1_distance.is_positive());
    }

    #[test]
    fn threshold_shortcut_matches_full_program() {
        let f = poly(
            3,
            &[(-3, &[1, 2, 3]), (-1, &[1, 2]), (2, &[1]), (-2, &[2, 3])],
        );
        let mut tables = vec![MbfTable::at_least(3, 3), MbfTable::at_least(3, 2)];
        let other = pruned(3).into_iter().find(|t| !tables.contains(t)).unwrap();
        tables.push(other);
        let p = ReductionProblem::new(&f, 3, tables).unwrap();
        let a = nearest_quadratic_with(&p, LpStrategy::CutGeneration).unwrap();
        let b = nearest_quadratic_with(&p, LpStrategy::FullFlow).unwrap();
        assert_eq!(a.l1_distance, int(0));
        assert_eq!(b.l1_distance, int(0));
        assert_eq!(a.quadratic.n_aux(), 3);
    }

    /// Auxiliary states where `h(x, ·)` has a unique minimizer in that
    /// coordinate must follow the prescribed tables.
    fn assert_states_follow_tables(p: &ReductionProblem, h: &QuadraticPoly) {
        let (k, m) = (p.k(), p.mbf_set().len());
        for x in 0..1u32 << k {
            for (a, table) in p.mbf_set().iter().enumerate() {
                let mut best: [Option<Rational>; 2] = [None, None];
                for z in 0..1u32 << m {
                    let bits: Vec<bool> = (0..k)
                        .map(|i| x >> i & 1 == 1)
                        .chain((0..m).map(|j| z >> j & 1 == 1))
                        .collect();
                    let v = h.evaluate(&bits).unwrap();
                    let side = &mut best[(z >> a & 1) as usize];
                    if side.as_ref().is_none_or(|b| v < *b) {
                        *side = Some(v);
                    }
                }
                if best[0] != best[1] {
                    assert_eq!(
                        best[1] < best[0],
                        table.get(SubsetMask(x)),
                        "aux {a} at {x:b}"
                    );
                }
            }
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

        #[test]
        fn zero_distance_reductions_are_sound(c in proptest::collection::vec(-4i64..=4, 7)) {
            // Submodular by construction: pair coefficients absorb the cubic.
            let a = c[0];
            let pairs = [c[1].min(0) - a.abs(), c[2].min(0) - a.abs(), c[3].min(0) - a.abs()];
            let f = poly(3, &[(a, &[1, 2, 3]), (pairs[0], &[1, 2]), (pairs[1], &[1, 3]), (pairs[2], &[2, 3]), (c[4], &[1]), (c[5], &[2]), (c[6], &[])]);
            let p = ReductionProblem::new(&f, 3, vec![MbfTable::at_least(3, 2), MbfTable::at_least(3, 3)]).unwrap();
            let r = nearest_quadratic(&p).unwrap();
            proptest::prop_assert_eq!(&r.l1_distance, &int(0));
            assert_states_follow_tables(&p, &r.quadratic);
            for av in 3..5 {
                proptest::prop_assert!(crate::mbf::induced_mbf(&r.quadratic, av).is_ok());
            }
        }

        #[test]
        fn more_tables_never_increase_distance(c in proptest::collection::vec(-3i64..=3, 8), extra in 0usize..15) {
            let f = poly(3, &[(c[0], &[1, 2, 3]), (c[1], &[1, 2]), (c[2], &[1, 3]), (c[3], &[2, 3]), (c[4], &[1]), (c[5], &[2]), (c[6], &[3]), (c[7], &[])]);
            let all = pruned(3);
            let small = vec![MbfTable::at_least(3, 3)];
            let mut large = small.clone();
            let pick = all[extra].clone();
            if !large.contains(&pick) {
                large.push(pick);
            }
            let d_small = nearest_quadratic(&ReductionProblem::new(&f, 3, small).unwrap()).unwrap().l1_distance;
            let d_large = nearest_quadratic(&ReductionProblem::new(&f, 3, large).unwrap()).unwrap().l1_distance;
            proptest::prop_assert!(d_large <= d_small, "{} > {}", d_large, d_small);
        }
    }
}

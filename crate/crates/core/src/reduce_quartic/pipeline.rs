//! Rewrites a quadratic that is linear in each auxiliary so that at most
//! two auxiliaries remain, one on each reference partition.
//!
//! Every auxiliary contributes `min(0, κ(x))` after minimization. Each step
//! below splits that contribution into a quadratic residual over `x` plus
//! new auxiliary terms without changing it on any labeling, and checks so
//! on all 16 labelings before returning.

use std::collections::BTreeMap;

use super::PAIRS;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::mbf::{
    backward_partition, forward_partition, partition_from_params, AvParams, Partition,
};
use crate::pbf::{QuadraticPoly, SubsetMask, ENUM_CAP};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// 1 on sets of size at least three.
    Forward,
    /// 1 on sets of size at least two.
    Backward,
}

impl Direction {
    pub fn partition(self) -> Partition {
        match self {
            Direction::Forward => forward_partition(),
            Direction::Backward => backward_partition(),
        }
    }
}

fn check_params(p: &AvParams) -> Result<()> {
    if p.k() != 4 {
        return Err(Error::Precondition(format!(
            "expected four weights, found {}",
            p.k()
        )));
    }
    if let Some(w) = p.weights.iter().find(|w| w.is_negative()) {
        return Err(Error::Precondition(format!("negative weight {w}")));
    }
    Ok(())
}

fn checked_params(bias: Rational, weights: Vec<Rational>) -> Result<AvParams> {
    AvParams::new(bias, weights).map_err(|e| Error::Invariant(format!("replacement produced {e}")))
}

/// The linear form `κ(x)` as a quadratic over four variables.
fn kappa_poly(p: &AvParams) -> QuadraticPoly {
    let mut r = QuadraticPoly::zero(4, 0);
    r.add_constant(&p.bias);
    for (i, w) in p.weights.iter().enumerate() {
        r.add_linear(i, &-w);
    }
    r
}

/// Checks `min(0, κ(S)) = residual(S) + Σ min(0, κ_t(S))` on every `S`.
fn ensure_preserved(
    p: &AvParams,
    residual: &QuadraticPoly,
    avs: &[AvParams],
    step: &str,
) -> Result<()> {
    for s in SubsetMask::all(4) {
        let rhs: Rational =
            residual.evaluate_mask(s)? + avs.iter().map(|t| t.min_value(s)).sum::<Rational>();
        if rhs != p.min_value(s) {
            return Err(Error::Invariant(format!(
                "{step} changed the minimum at {s:?}"
            )));
        }
    }
    Ok(())
}

/// Moves singleton members of the upper family into the residual.
///
/// A singleton `{e}` with `κ({e}) < 0` is replaced by the linear term
/// `(g − g_e)·x_e` and `g_e := g`. When `κ(∅) < 0` the auxiliary is 1 on
/// every labeling and disappears into the residual `κ(x)`.
pub fn remove_singletons(p: &AvParams) -> Result<(QuadraticPoly, Option<AvParams>)> {
    check_params(p)?;
    if p.bias.is_negative() {
        return Ok((kappa_poly(p), None));
    }
    let mut residual = QuadraticPoly::zero(4, 0);
    let mut q = p.clone();
    for e in 0..4 {
        if p.kappa(SubsetMask::singleton(e)).is_negative() {
            residual.add_linear(e, &(&p.bias - &p.weights[e]));
            q.weights[e] = p.bias.clone();
        }
    }
    ensure_preserved(p, &residual, std::slice::from_ref(&q), "singleton removal")?;
    Ok((residual, Some(q)))
}

/// The reference partition containing the upper family, preferring forward.
pub fn reference_direction(p: &AvParams) -> Option<Direction> {
    let b = partition_from_params(p);
    [Direction::Forward, Direction::Backward]
        .into_iter()
        .find(|d| b.is_subset_of(&d.partition()))
}

/// The five sets of the normalization system (the four triples, then all
/// four variables) and their rows `[1, −[1∈S], …, −[4∈S]]` over the
/// unknowns `(g, g_1, …, g_4)`.
pub fn reference_system() -> (Vec<SubsetMask>, Vec<Vec<Rational>>) {
    let sets: Vec<SubsetMask> = super::TRIPLES
        .iter()
        .map(|t| SubsetMask::from_indices(*t))
        .chain([SubsetMask::full(4)])
        .collect();
    let rows = sets
        .iter()
        .map(|s| {
            std::iter::once(Rational::one())
                .chain((0..4).map(|i| {
                    if s.contains(i) {
                        -Rational::one()
                    } else {
                        Rational::zero()
                    }
                }))
                .collect()
        })
        .collect();
    (sets, rows)
}

/// The normalization matrix in the row order in which it is usually
/// printed; it is a row permutation of [`reference_system`].
pub const PRINTED_SYSTEM: [[i64; 5]; 5] = [
    [1, -1, -1, 0, -1],
    [1, -1, -1, -1, 0],
    [1, 0, -1, -1, -1],
    [1, -1, 0, -1, -1],
    [1, -1, -1, -1, -1],
];

/// Exact determinant by elimination.
pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..n {
            if !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                for j in c..n {
                    let v = &f * &a[c][j];
                    a[r][j] -= v;
                }
            }
        }
    }
    det
}

/// Solves a square system; `None` when singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(p, c);
        b.swap(p, c);
        let inv = a[c][c].clone();
        for j in c..n {
            a[c][j] = &a[c][j] / &inv;
        }
        b[c] = &b[c] / &inv;
        for r in (0..n).filter(|&r| r != c) {
            if a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in c..n {
                let v = &f * &a[c][j];
                a[r][j] -= v;
            }
            let v = &f * &b[c];
            b[r] -= v;
        }
    }
    Some(b)
}

/// Re-expresses an auxiliary whose upper family lies inside a reference
/// partition as one that realizes that partition, with the same
/// `min(0, κ)` everywhere.
///
/// The five unknowns are fixed by matching `min(0, κ)` on the triples and
/// the full set; the remaining eleven sets are then checked.
pub fn normalize_to_reference(p: &AvParams, direction: Direction) -> Result<AvParams> {
    check_params(p)?;
    let reference = direction.partition();
    if !partition_from_params(p).is_subset_of(&reference) {
        return Err(Error::Precondition(format!(
            "upper family is not contained in the {direction:?} reference partition"
        )));
    }
    let (sets, rows) = reference_system();
    let rhs = sets.iter().map(|s| p.min_value(*s)).collect();
    let x = solve_square(rows, rhs)
        .ok_or_else(|| Error::Invariant("normalization system is singular".into()))?;
    let q = AvParams {
        bias: x[0].clone(),
        weights: x[1..].to_vec(),
    };
    if let Some(w) = q.weights.iter().find(|w| w.is_negative()) {
        return Err(Error::NotNormalizable(format!("weight {w} is negative")));
    }
    if let Some(s) = SubsetMask::all(4).find(|s| q.min_value(*s) != p.min_value(*s)) {
        return Err(Error::NotNormalizable(format!("minimum changes at {s:?}")));
    }
    if !q.weakly_realizes(&reference) {
        return Err(Error::NotNormalizable(format!(
            "result does not realize the {direction:?} partition"
        )));
    }
    Ok(q)
}

/// Shape of the pair graph (pairs with `κ < 0`) that decided the split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitCase {
    /// Upper family empty; nothing to keep.
    Empty,
    /// No pairs; the auxiliary already fits the forward partition.
    NoPairs,
    SingleEdge,
    Path,
    Star,
    Triangle,
    /// All six pairs; the auxiliary already fits the backward partition.
    AllPairs,
    /// Graphs without a closed-form table, split by a small LP.
    Decomposed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseSplit {
    pub case: SplitCase,
    pub residual: QuadraticPoly,
    pub avs: Vec<AvParams>,
}

fn others(used: &[usize]) -> Vec<usize> {
    (0..4).filter(|m| !used.contains(m)).collect()
}

fn pair_kappa(p: &AvParams, i: usize, j: usize) -> Rational {
    p.kappa(SubsetMask::from_indices([i, j]))
}

/// Splits an auxiliary without singletons in its upper family into a
/// residual over `x` and auxiliaries whose upper families lie inside a
/// reference partition.
pub fn case_split(p: &AvParams) -> Result<CaseSplit> {
    check_params(p)?;
    if p.bias.is_negative() || (0..4).any(|e| p.kappa(SubsetMask::singleton(e)).is_negative()) {
        return Err(Error::Precondition(
            "upper family has sets of size below two; remove singletons first".into(),
        ));
    }
    let g = &p.bias;
    let w = &p.weights;
    let edges: Vec<(usize, usize)> = PAIRS
        .iter()
        .copied()
        .filter(|&(i, j)| pair_kappa(p, i, j).is_negative())
        .collect();
    let mut deg = [0usize; 4];
    for &(i, j) in &edges {
        deg[i] += 1;
        deg[j] += 1;
    }
    let mut residual = QuadraticPoly::zero(4, 0);
    let (case, avs) = match edges.len() {
        0 if !p.kappa(SubsetMask::full(4)).is_negative() => (SplitCase::Empty, vec![]),
        0 => (SplitCase::NoPairs, vec![p.clone()]),
        1 => {
            let (i, j) = edges[0];
            let rest = others(&[i, j]);
            residual.add_pair(i, j, &pair_kappa(p, i, j));
            let mut t = vec![Rational::zero(); 4];
            t[i] = g - &w[j];
            t[j] = g - &w[i];
            for &m in &rest {
                t[m] = w[m].clone();
            }
            let bias = Rational::from_int(2) * g - &w[i] - &w[j];
            (SplitCase::SingleEdge, vec![checked_params(bias, t)?])
        }
        2 => {
            let Some(j) = (0..4).find(|&m| deg[m] == 2) else {
                return Err(Error::ForbiddenConfiguration("two disjoint pairs".into()));
            };
            let ends: Vec<usize> = (0..4).filter(|&m| deg[m] == 1).collect();
            let (i, k) = (ends[0], ends[1]);
            let l = others(&[i, j, k])[0];
            residual.add_pair(i, j, &pair_kappa(p, i, j));
            residual.add_pair(j, k, &pair_kappa(p, j, k));
            let mut t = vec![Rational::zero(); 4];
            t[i] = g - &w[j];
            t[j] = Rational::from_int(2) * g - &w[i] - &w[j] - &w[k];
            t[k] = g - &w[j];
            t[l] = w[l].clone();
            let bias = Rational::from_int(3) * g - Rational::from_int(2) * &w[j] - &w[i] - &w[k];
            (SplitCase::Path, vec![checked_params(bias, t)?])
        }
        3 => {
            if let Some(i) = (0..4).find(|&m| deg[m] == 3) {
                let sum: Rational = w.iter().cloned().sum();
                if (Rational::from_int(2) * g - sum).is_negative() {
                    return decompose(p);
                }
                let rest = others(&[i]);
                let alpha = g - &w[i];
                let mu = p
                    .kappa(SubsetMask::from_indices(rest.iter().copied()))
                    .neg_part();
                for &m in &rest {
                    residual.add_pair(i, m, &pair_kappa(p, i, m));
                }
                let mut t = vec![alpha.clone(); 4];
                t[i] = &mu + Rational::from_int(2) * &alpha;
                let bias = mu + Rational::from_int(3) * alpha;
                (SplitCase::Star, vec![checked_params(bias, t)?])
            } else if let Some(l) = (0..4).find(|&m| deg[m] == 0) {
                // Triangle; (i, j) is its pair with the largest κ.
                let (i, j) = edges
                    .iter()
                    .copied()
                    .reduce(|a, b| {
                        if pair_kappa(p, b.0, b.1) > pair_kappa(p, a.0, a.1) {
                            b
                        } else {
                            a
                        }
                    })
                    .expect("three edges");
                let k = others(&[i, j, l])[0];
                let delta = &w[i] + &w[j] - g;
                residual.add_pair(i, k, &-(&w[k] - &w[j]));
                residual.add_pair(j, k, &-(&w[k] - &w[i]));
                let mut t = vec![g - &w[k]; 4];
                t[l] = w[l].clone();
                let mut r = vec![delta.clone(); 4];
                r[l] = Rational::zero();
                let bias = Rational::from_int(2) * (g - &w[k]);
                (
                    SplitCase::Triangle,
                    vec![checked_params(bias, t)?, checked_params(delta, r)?],
                )
            } else {
                return Err(Error::ForbiddenConfiguration(
                    "path through all four variables".into(),
                ));
            }
        }
        4 if deg.iter().all(|&d| d == 2) => {
            return Err(Error::ForbiddenConfiguration("four-cycle of pairs".into()));
        }
        4 | 5 => return decompose(p),
        _ => (SplitCase::AllPairs, vec![p.clone()]),
    };
    ensure_preserved(p, &residual, &avs, "case split")?;
    Ok(CaseSplit {
        case,
        residual,
        avs,
    })
}

/// Splits `min(0, κ)` into a quadratic residual plus one forward and one
/// backward auxiliary by solving for all three at once.
fn decompose(p: &AvParams) -> Result<CaseSplit> {
    let mut lp = LinearProgram::new();
    let r0 = lp.add_free("r0");
    let r: Vec<usize> = (0..4).map(|i| lp.add_free(format!("r{}", i + 1))).collect();
    let rp: Vec<usize> = PAIRS
        .iter()
        .map(|(i, j)| lp.add_nonneg(format!("r{}{}", i + 1, j + 1)))
        .collect();
    let mut av = |name: &str| -> (usize, Vec<usize>) {
        (
            lp.add_free(name),
            (0..4)
                .map(|i| lp.add_nonneg(format!("{name}{}", i + 1)))
                .collect(),
        )
    };
    let (fb, fw) = av("gf");
    let (bb, bw) = av("gb");
    let one = Rational::one;
    let kappa = |bias: usize, ws: &[usize], s: SubsetMask| -> Vec<(usize, Rational)> {
        std::iter::once((bias, one()))
            .chain(s.iter().map(|i| (ws[i], -one())))
            .collect()
    };
    for s in SubsetMask::all(4) {
        let mut e = vec![(r0, one())];
        e.extend(s.iter().map(|i| (r[i], one())));
        for (id, &(i, j)) in PAIRS.iter().enumerate() {
            if s.contains(i) && s.contains(j) {
                e.push((rp[id], -one()));
            }
        }
        let (zf, zb) = super::prescribed_states(s);
        if zf {
            e.extend(kappa(fb, &fw, s));
        }
        if zb {
            e.extend(kappa(bb, &bw, s));
        }
        lp.add_constraint(e, Relation::Eq, p.min_value(s));
        for (bias, ws, on) in [(fb, &fw, zf), (bb, &bw, zb)] {
            lp.add_constraint(
                kappa(bias, ws, s),
                if on { Relation::Le } else { Relation::Ge },
                Rational::zero(),
            );
        }
    }
    let sol = lp.solve();
    if sol.status != LpStatus::Optimal {
        return Err(Error::ForbiddenConfiguration(
            "no split into reference auxiliaries exists".into(),
        ));
    }
    let v = &sol.values;
    let mut residual = QuadraticPoly::zero(4, 0);
    residual.add_constant(&v[r0]);
    for i in 0..4 {
        residual.add_linear(i, &v[r[i]]);
    }
    for (id, &(i, j)) in PAIRS.iter().enumerate() {
        residual.add_pair(i, j, &-&v[rp[id]]);
    }
    let read = |bias: usize, ws: &[usize]| {
        checked_params(v[bias].clone(), ws.iter().map(|&c| v[c].clone()).collect())
    };
    let avs = vec![read(fb, &fw)?, read(bb, &bw)?];
    ensure_preserved(p, &residual, &avs, "decomposition")?;
    Ok(CaseSplit {
        case: SplitCase::Decomposed,
        residual,
        avs,
    })
}

/// Rewrites `min_z κ(x)·z` as `κ(x) + min_w κ'(x̄)·w` with `w = 1 − z` and
/// `x̄` the complemented labeling, returning the shift `κ(x)` and `κ'`,
/// which has bias `Σ g_i − g` and the same weights.
pub fn complemented_form(p: &AvParams) -> Result<(QuadraticPoly, AvParams)> {
    check_params(p)?;
    let total: Rational = p.weights.iter().cloned().sum();
    Ok((
        kappa_poly(p),
        AvParams {
            bias: total - &p.bias,
            weights: p.weights.clone(),
        },
    ))
}

/// Parameters of auxiliary `av`, which must not interact with another
/// auxiliary.
pub fn params_of(h: &QuadraticPoly, av: usize) -> Result<AvParams> {
    if av < h.n_x() || av >= h.n_vars() {
        return Err(Error::NotAuxiliary(av));
    }
    let mut weights = Vec::with_capacity(h.n_x());
    for i in 0..h.n_x() {
        let c = h.pair(i, av);
        if c.is_positive() {
            return Err(Error::NotSubmodularQuadratic(i, av));
        }
        weights.push(-c);
    }
    if let Some(b) = (h.n_x()..h.n_vars()).find(|&b| b != av && !h.pair(av, b).is_zero()) {
        return Err(Error::AuxInteraction(av.min(b), av.max(b)));
    }
    Ok(AvParams {
        bias: h.linear(av).clone(),
        weights,
    })
}

fn aux_interacts(h: &QuadraticPoly, av: usize) -> bool {
    (h.n_x()..h.n_vars()).any(|b| b != av && !h.pair(av, b).is_zero())
}

/// No labeling where one `κ` is negative and the other positive, so the
/// two minima add up to the minimum of the sum.
fn sign_compatible(a: &AvParams, b: &AvParams) -> bool {
    SubsetMask::all(a.k()).all(|s| a.kappa(s).signum() * b.kappa(s).signum() >= 0)
}

/// The original block of `h` with no auxiliaries.
fn x_part(h: &QuadraticPoly, n_aux: usize) -> QuadraticPoly {
    let n_x = h.n_x();
    let mut out = QuadraticPoly::zero(n_x, n_aux);
    out.add_constant(h.constant());
    for i in 0..n_x {
        out.add_linear(i, h.linear(i));
    }
    for ((i, j), c) in h.pairs() {
        if j < n_x {
            out.add_pair(i, j, c);
        }
    }
    out
}

fn push_av(h: &mut QuadraticPoly, av: usize, p: &AvParams) {
    h.add_linear(av, &p.bias);
    for (i, w) in p.weights.iter().enumerate() {
        h.add_pair(i, av, &-w);
    }
}

/// Collapses auxiliaries that are linear in `z` and never disagree in the
/// sign of `κ` into one auxiliary with summed parameters. Auxiliaries that
/// interact with others are kept as they are, after the merged ones.
pub fn merge_duplicate_avs(h: &QuadraticPoly) -> Result<QuadraticPoly> {
    h.check_submodular()?;
    if h.n_x() > ENUM_CAP {
        return Err(Error::TooManyVariables {
            what: "auxiliary merging",
            n: h.n_x(),
            cap: ENUM_CAP,
        });
    }
    let (n_x, n) = (h.n_x(), h.n_vars());
    let mut groups: Vec<AvParams> = Vec::new();
    let mut kept = Vec::new();
    for av in n_x..n {
        if aux_interacts(h, av) {
            kept.push(av);
            continue;
        }
        let p = params_of(h, av)?;
        match groups.iter_mut().find(|g| sign_compatible(g, &p)) {
            Some(g) => *g = g.sum(&p),
            None => groups.push(p),
        }
    }
    let mut out = x_part(h, groups.len() + kept.len());
    for (a, p) in groups.iter().enumerate() {
        push_av(&mut out, n_x + a, p);
    }
    let mut map: Vec<usize> = (0..n).collect();
    for (a, &av) in kept.iter().enumerate() {
        map[av] = n_x + groups.len() + a;
    }
    for (a, &av) in kept.iter().enumerate() {
        out.add_linear(n_x + groups.len() + a, h.linear(av));
    }
    for ((u, v), c) in h.pairs() {
        if kept.contains(&v) && (u < n_x || kept.contains(&u)) {
            out.add_pair(map[u], map[v], c);
        }
    }
    Ok(out)
}

/// Replaces every auxiliary of a four-variable quadratic that is linear in
/// `z` by at most two, forward first, then backward.
pub fn reduce_av_count(h: &QuadraticPoly) -> Result<QuadraticPoly> {
    if h.n_x() != 4 {
        return Err(Error::Precondition(format!(
            "expected four original variables, found {}",
            h.n_x()
        )));
    }
    h.check_submodular()?;
    if let Some((a, b)) = h.aux_interaction() {
        return Err(Error::AuxInteraction(a, b));
    }
    let mut residual = QuadraticPoly::zero(4, 0);
    let mut sums: BTreeMap<Direction, AvParams> = BTreeMap::new();
    for av in 4..h.n_vars() {
        let (r, rest) = remove_singletons(&params_of(h, av)?)?;
        residual.add_mapped(&r, &[0, 1, 2, 3]);
        let Some(q) = rest else { continue };
        let split = case_split(&q)?;
        residual.add_mapped(&split.residual, &[0, 1, 2, 3]);
        for t in &split.avs {
            let dir = reference_direction(t).ok_or_else(|| {
                Error::Invariant("split produced an auxiliary outside both references".into())
            })?;
            let n = normalize_to_reference(t, dir)?;
            sums.entry(dir).and_modify(|s| *s = s.sum(&n)).or_insert(n);
        }
    }
    sums.retain(|_, p| p.kappa(SubsetMask::full(4)).is_negative());
    let mut out = x_part(h, sums.len());
    out.add_mapped(&residual, &[0, 1, 2, 3]);
    for (a, p) in sums.values().enumerate() {
        push_av(&mut out, 4 + a, p);
    }
    Ok(out)
}

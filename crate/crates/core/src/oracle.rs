//! Exhaustive ground truth: minimization and reduction checks by full
//! enumeration. Nothing here calls into the reduction or max-flow code.

use crate::error::{Error, Result};
use crate::mbf::is_monotone;
use crate::pbf::{MultilinearPoly, QuadraticPoly, SubsetMask, ENUM_CAP};
use crate::rational::Rational;

/// All `2^n` values of `f`, indexed by mask (superset-sum transform).
pub fn value_table(f: &MultilinearPoly) -> Result<Vec<Rational>> {
    let n = f.n_vars();
    if n > ENUM_CAP {
        return Err(Error::TooManyVariables {
            what: "exhaustive evaluation",
            n,
            cap: ENUM_CAP,
        });
    }
    let mut t = vec![Rational::zero(); 1 << n];
    for (m, c) in f.terms() {
        t[m.bits() as usize] = c.clone();
    }
    for bit in 0..n {
        let step = 1usize << bit;
        for mask in 0..t.len() {
            if mask & step != 0 && !t[mask ^ step].is_zero() {
                let lower = t[mask ^ step].clone();
                t[mask] += lower;
            }
        }
    }
    Ok(t)
}

fn quadratic_table(h: &QuadraticPoly) -> Result<Vec<Rational>> {
    let n = h.n_vars();
    if n > ENUM_CAP {
        return Err(Error::TooManyVariables {
            what: "exhaustive evaluation",
            n,
            cap: ENUM_CAP,
        });
    }
    value_table(&h.to_multilinear()?)
}

/// Exact global minimum; ties go to the numerically smallest mask.
pub fn brute_min(f: &MultilinearPoly) -> Result<(Rational, SubsetMask)> {
    let t = value_table(f)?;
    let mut best = 0usize;
    for (m, v) in t.iter().enumerate() {
        if *v < t[best] {
            best = m;
        }
    }
    Ok((t[best].clone(), SubsetMask(best as u32)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationRow {
    pub x: SubsetMask,
    pub f: Rational,
    pub min_h: Rational,
    /// `f(x) − min_z h(x, z)`.
    pub gap: Rational,
    /// Smallest auxiliary mask attaining the minimum.
    pub argmin_z: SubsetMask,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub k: usize,
    pub m: usize,
    pub rows: Vec<VerificationRow>,
    pub pass: bool,
    /// For submodular `h`: whether every auxiliary variable's optimal state,
    /// as a function of `x`, is monotone. `None` when `h` is not submodular.
    pub aux_states_monotone: Option<bool>,
}

impl VerificationReport {
    pub fn l1_gap(&self) -> Rational {
        self.rows.iter().map(|r| r.gap.abs()).sum()
    }

    pub fn failing_rows(&self) -> impl Iterator<Item = &VerificationRow> {
        self.rows.iter().filter(|r| !r.gap.is_zero())
    }
}

/// Checks `f(x) = min_z h(x, z)` on every labeling of the original block.
pub fn verify_reduction(f: &MultilinearPoly, h: &QuadraticPoly) -> Result<VerificationReport> {
    let k = h.n_x();
    let m = h.n_aux();
    if f.n_vars() > k {
        return Err(Error::WidthMismatch { width: k });
    }
    if k + m > ENUM_CAP {
        return Err(Error::TooManyVariables {
            what: "reduction check",
            n: k + m,
            cap: ENUM_CAP,
        });
    }
    let ft = value_table(&f.with_n_vars(k)?)?;
    let ht = quadratic_table(h)?;
    let x_count = 1usize << k;
    let mut rows = Vec::with_capacity(x_count);
    // best[x][a][b]: minimum over z with z_a = b, used for the state check.
    let mut state_min: Vec<Vec<[Option<Rational>; 2]>> = vec![vec![[None, None]; m]; x_count];
    for (x, fx) in ft.iter().enumerate() {
        let mut best: Option<(Rational, usize)> = None;
        for z in 0..1usize << m {
            let v = &ht[x | z << k];
            if best.as_ref().is_none_or(|(b, _)| v < b) {
                best = Some((v.clone(), z));
            }
            for (a, slot) in state_min[x].iter_mut().enumerate() {
                let side = &mut slot[z >> a & 1];
                if side.as_ref().is_none_or(|s| v < s) {
                    *side = Some(v.clone());
                }
            }
        }
        let (min_h, z) = best.expect("at least one auxiliary assignment");
        rows.push(VerificationRow {
            x: SubsetMask(x as u32),
            f: fx.clone(),
            gap: fx - &min_h,
            min_h,
            argmin_z: SubsetMask(z as u32),
        });
    }
    let aux_states_monotone = h.is_submodular().then(|| {
        (0..m).all(|a| {
            let states: Vec<bool> = state_min
                .iter()
                .map(|s| s[a][1].as_ref().unwrap() < s[a][0].as_ref().unwrap())
                .collect();
            is_monotone(k, &states)
        })
    });
    let pass = rows.iter().all(|r| r.gap.is_zero());
    Ok(VerificationReport {
        k,
        m,
        rows,
        pass,
        aux_states_monotone,
    })
}

/// `min_z h(x, z)` for one labeling of the original block.
pub fn min_over_aux(h: &QuadraticPoly, x: SubsetMask) -> Result<Rational> {
    let (k, m) = (h.n_x(), h.n_aux());
    if m > ENUM_CAP {
        return Err(Error::TooManyVariables {
            what: "auxiliary enumeration",
            n: m,
            cap: ENUM_CAP,
        });
    }
    let mut bits: Vec<bool> = (0..k + m).map(|i| i < k && x.contains(i)).collect();
    let mut best: Option<Rational> = None;
    for z in 0..1u32 << m {
        for a in 0..m {
            bits[k + a] = z >> a & 1 == 1;
        }
        let v = h.evaluate(&bits)?;
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    Ok(best.expect("non-empty enumeration"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn m(idx: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(idx.iter().map(|i| i - 1))
    }

    fn poly(n: usize, terms: &[(i64, &[usize])]) -> MultilinearPoly {
        MultilinearPoly::from_terms(n, terms.iter().map(|(c, idx)| (m(idx), int(*c)))).unwrap()
    }

    /// `z·(b − Σ x_i)` over `k` original variables plus one auxiliary.
    fn single_aux(k: usize, b: i64) -> QuadraticPoly {
        let mut h = QuadraticPoly::zero(k, 1);
        h.add_linear(k, &int(b));
        for i in 0..k {
            h.add_pair(i, k, &int(-1));
        }
        h
    }

    #[test]
    fn brute_min_examples() {
        assert_eq!(
            brute_min(&poly(4, &[(-1, &[1, 2, 3, 4])])).unwrap(),
            (int(-1), m(&[1, 2, 3, 4]))
        );
        assert_eq!(
            brute_min(&MultilinearPoly::zero(3)).unwrap(),
            (int(0), SubsetMask::EMPTY)
        );
        let g6 = poly(
            3,
            &[(1, &[1, 2, 3]), (-1, &[1, 2]), (-1, &[1, 3]), (-1, &[2, 3])],
        );
        assert_eq!(brute_min(&g6).unwrap(), (int(-2), m(&[1, 2, 3])));
    }

    #[test]
    fn brute_min_refuses_wide_input() {
        let f = MultilinearPoly::zero(21);
        assert!(matches!(brute_min(&f), Err(Error::TooManyVariables { .. })));
    }

    #[test]
    fn table_matches_pointwise_evaluation() {
        let f = poly(
            4,
            &[
                (3, &[]),
                (-2, &[1, 3]),
                (5, &[2, 3, 4]),
                (-1, &[1, 2, 3, 4]),
            ],
        );
        let t = value_table(&f).unwrap();
        for x in SubsetMask::all(4) {
            assert_eq!(t[x.bits() as usize], f.evaluate(x).unwrap());
        }
    }

    #[test]
    fn verify_examples() {
        let cubic = poly(3, &[(-1, &[1, 2, 3])]);
        let r = verify_reduction(&cubic, &single_aux(3, 2)).unwrap();
        assert!(r.pass);
        assert_eq!(r.aux_states_monotone, Some(true));
        assert_eq!(r.rows[7].argmin_z, SubsetMask(1));
        assert_eq!(r.rows[3].argmin_z, SubsetMask(0));

        let pair = poly(2, &[(-1, &[1, 2])]);
        let mut h = QuadraticPoly::zero(2, 0);
        h.add_pair(0, 1, &int(-1));
        assert!(verify_reduction(&pair, &h).unwrap().pass);

        let r = verify_reduction(&cubic, &QuadraticPoly::zero(3, 0)).unwrap();
        assert!(!r.pass);
        let bad: Vec<_> = r.failing_rows().collect();
        assert_eq!(bad.len(), 1);
        assert_eq!((bad[0].x, &bad[0].gap), (m(&[1, 2, 3]), &int(-1)));
        assert_eq!(r.l1_gap(), int(1));
    }

    #[test]
    fn non_submodular_h_has_no_state_verdict() {
        let mut h = QuadraticPoly::zero(1, 1);
        h.add_pair(0, 1, &int(1));
        let r = verify_reduction(&MultilinearPoly::zero(1), &h).unwrap();
        assert_eq!(r.aux_states_monotone, None);
    }

    #[test]
    fn min_over_aux_matches_report() {
        let h = single_aux(3, 2);
        let f = poly(3, &[(-1, &[1, 2, 3])]);
        let r = verify_reduction(&f, &h).unwrap();
        for row in &r.rows {
            assert_eq!(min_over_aux(&h, row.x).unwrap(), row.min_h);
        }
    }
}

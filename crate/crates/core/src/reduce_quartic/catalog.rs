//! The ten groups of fourth-order submodular generators.
//!
//! Every row is written once for the pattern `(i, j, k, l) = (1, 2, 3, 4)`
//! and relabeled for other patterns. Quadratics put the auxiliaries after
//! the four original variables.

use crate::error::{Error, Result};
use crate::pbf::{MultilinearPoly, QuadraticPoly, SubsetMask};
use crate::rational::Rational;

pub const GROUP_COUNT: u8 = 10;

/// Coefficient and 0-based variables; indices 4 and 5 are auxiliaries.
type Terms = &'static [(i64, &'static [usize])];

struct Row {
    function: Terms,
    quadratic: Option<Terms>,
    aux: usize,
    /// The polynomial as printed, when it disagrees with its own quadratic.
    printed: Option<Terms>,
}

fn row(group: u8) -> Row {
    const G4: Terms = &[
        (-1, &[0, 1, 2, 3]),
        (1, &[0, 1, 2]),
        (1, &[0, 1, 3]),
        (1, &[0, 2, 3]),
        (1, &[1, 2, 3]),
        (-1, &[0, 1]),
        (-1, &[0, 2]),
        (-1, &[0, 3]),
        (-1, &[1, 2]),
        (-1, &[1, 3]),
        (-1, &[2, 3]),
    ];
    const G8: Terms = &[
        (2, &[0, 1, 2, 3]),
        (-1, &[0, 1, 2]),
        (-1, &[0, 1, 3]),
        (-1, &[0, 2, 3]),
        (-1, &[1, 2, 3]),
    ];
    match group {
        1 => Row {
            function: &[(-1, &[0, 1])],
            quadratic: Some(&[(-1, &[0, 1])]),
            aux: 0,
            printed: None,
        },
        2 => Row {
            function: &[(-1, &[0, 1, 2])],
            quadratic: Some(&[(2, &[4]), (-1, &[0, 4]), (-1, &[1, 4]), (-1, &[2, 4])]),
            aux: 1,
            printed: None,
        },
        3 => Row {
            function: &[(-1, &[0, 1, 2, 3])],
            quadratic: Some(&[
                (3, &[4]),
                (-1, &[0, 4]),
                (-1, &[1, 4]),
                (-1, &[2, 4]),
                (-1, &[3, 4]),
            ]),
            aux: 1,
            printed: None,
        },
        4 => Row {
            function: G4,
            quadratic: Some(&[
                (1, &[4]),
                (-1, &[0, 4]),
                (-1, &[1, 4]),
                (-1, &[2, 4]),
                (-1, &[3, 4]),
            ]),
            aux: 1,
            printed: None,
        },
        5 => Row {
            function: &[
                (1, &[0, 1, 2, 3]),
                (-1, &[0, 1, 2]),
                (-1, &[0, 3]),
                (-1, &[1, 3]),
                (-1, &[2, 3]),
            ],
            quadratic: Some(&[
                (2, &[4]),
                (-1, &[0, 4]),
                (-1, &[1, 4]),
                (-1, &[2, 4]),
                (-2, &[3, 4]),
            ]),
            aux: 1,
            printed: None,
        },
        6 => Row {
            function: &[(1, &[0, 1, 2]), (-1, &[0, 1]), (-1, &[0, 2]), (-1, &[1, 2])],
            quadratic: Some(&[(1, &[4]), (-1, &[0, 4]), (-1, &[1, 4]), (-1, &[2, 4])]),
            aux: 1,
            printed: None,
        },
        7 => Row {
            function: &[
                (1, &[0, 1, 2, 3]),
                (-1, &[0, 1, 2]),
                (-1, &[0, 1, 3]),
                (-1, &[0, 2, 3]),
            ],
            quadratic: Some(&[
                (3, &[4]),
                (-2, &[0, 4]),
                (-1, &[1, 4]),
                (-1, &[2, 4]),
                (-1, &[3, 4]),
            ]),
            aux: 1,
            printed: None,
        },
        8 => Row {
            function: G8,
            quadratic: Some(&[
                (2, &[4]),
                (-1, &[0, 4]),
                (-1, &[1, 4]),
                (-1, &[2, 4]),
                (-1, &[3, 4]),
            ]),
            aux: 1,
            printed: None,
        },
        9 => Row {
            function: &[
                (1, &[0, 1, 2, 3]),
                (-1, &[0, 1]),
                (-1, &[0, 2, 3]),
                (-1, &[1, 2, 3]),
            ],
            quadratic: Some(&[
                (1, &[4]),
                (2, &[5]),
                (-1, &[4, 5]),
                (-1, &[0, 4]),
                (-1, &[1, 4]),
                (-1, &[2, 5]),
                (-1, &[3, 5]),
            ]),
            aux: 2,
            printed: Some(&[
                (1, &[0, 1, 2, 3]),
                (-1, &[0, 1]),
                (-1, &[0, 2]),
                (-1, &[0, 2, 3]),
                (-1, &[1, 2, 3]),
            ]),
        },
        _ => Row {
            function: &[
                (-1, &[0, 1, 2, 3]),
                (1, &[0, 2, 3]),
                (1, &[1, 2, 3]),
                (-1, &[0, 2]),
                (-1, &[0, 3]),
                (-1, &[1, 2]),
                (-1, &[1, 3]),
                (-1, &[2, 3]),
            ],
            quadratic: None,
            aux: 0,
            printed: None,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub group: u8,
    /// 0-based images of `(i, j, k, l)`.
    pub pattern: [usize; 4],
    pub function: MultilinearPoly,
    /// Four original variables followed by the row's auxiliaries; none for
    /// the non-representable group.
    pub quadratic: Option<QuadraticPoly>,
    /// The printed polynomial when it had to be corrected to match its own
    /// quadratic.
    pub printed_function: Option<MultilinearPoly>,
}

fn poly(terms: Terms, pattern: &[usize; 4]) -> MultilinearPoly {
    let mapped = terms.iter().map(|(c, idx)| {
        (
            SubsetMask::from_indices(idx.iter().map(|&i| pattern[i])),
            Rational::from_int(*c),
        )
    });
    MultilinearPoly::from_terms(4, mapped).expect("indices below four")
}

/// Row `group` (1-based) under the index pattern.
pub fn generator_catalog(group: u8, pattern: [usize; 4]) -> Result<CatalogEntry> {
    if !(1..=GROUP_COUNT).contains(&group) {
        return Err(Error::InvalidGenerator(format!(
            "group {group} (expected 1 to {GROUP_COUNT})"
        )));
    }
    let mut seen = [false; 4];
    for &p in &pattern {
        if p >= 4 || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidGenerator(format!(
                "pattern {pattern:?} is not a permutation of four variables"
            )));
        }
    }
    let r = row(group);
    let quadratic = r.quadratic.map(|terms| {
        let mut h = QuadraticPoly::zero(4, r.aux);
        let var = |i: usize| if i < 4 { pattern[i] } else { i };
        for (c, idx) in terms {
            let c = Rational::from_int(*c);
            match idx {
                [a] => h.add_linear(var(*a), &c),
                [a, b] => h.add_pair(var(*a), var(*b), &c),
                _ => unreachable!("quadratic terms have one or two variables"),
            }
        }
        h
    });
    Ok(CatalogEntry {
        group,
        pattern,
        function: poly(r.function, &pattern),
        quadratic,
        printed_function: r.printed.map(|t| poly(t, &pattern)),
    })
}

/// One pattern per distinct polynomial of the group, in lexicographic
/// order of first appearance.
pub fn catalog_patterns(group: u8) -> Result<Vec<[usize; 4]>> {
    let mut out: Vec<([usize; 4], MultilinearPoly)> = Vec::new();
    for p in permutations() {
        let f = generator_catalog(group, p)?.function;
        if out.iter().all(|(_, g)| *g != f) {
            out.push((p, f));
        }
    }
    Ok(out.into_iter().map(|(p, _)| p).collect())
}

fn permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in (0..4).filter(|&b| b != a) {
            for c in (0..4).filter(|&c| c != a && c != b) {
                out.push([a, b, c, 6 - a - b - c]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::verify_reduction;
    use crate::rational::int;

    #[test]
    fn g6_on_first_three_variables() {
        let e = generator_catalog(6, [0, 1, 2, 3]).unwrap();
        assert_eq!(
            e.function.to_text(),
            MultilinearPoly::parse("1 : 1 2 3\n-1 : 1 2\n-1 : 1 3\n-1 : 2 3", 4)
                .unwrap()
                .to_text()
        );
        let h = e.quadratic.unwrap();
        assert_eq!(h.n_aux(), 1);
        assert_eq!(*h.linear(4), int(1));
        assert_eq!(h.pair(0, 4), int(-1));
    }

    #[test]
    fn g1_quadratic_is_the_function() {
        let e = generator_catalog(1, [0, 1, 2, 3]).unwrap();
        assert_eq!(e.quadratic.unwrap().to_multilinear().unwrap(), e.function);
    }

    #[test]
    fn g9_has_two_interacting_auxiliaries() {
        let e = generator_catalog(9, [0, 1, 2, 3]).unwrap();
        let h = e.quadratic.unwrap();
        assert_eq!(h.n_aux(), 2);
        assert_eq!(h.pair(4, 5), int(-1));
        assert!(e.printed_function.is_some());
    }

    #[test]
    fn every_row_matches_its_quadratic_under_every_pattern() {
        for group in 1..=9 {
            for p in catalog_patterns(group).unwrap() {
                let e = generator_catalog(group, p).unwrap();
                assert!(e.function.is_submodular().unwrap(), "G{group} {p:?}");
                let r = verify_reduction(&e.function, e.quadratic.as_ref().unwrap()).unwrap();
                assert!(r.pass, "G{group} {p:?}");
            }
        }
    }

    #[test]
    fn printed_g9_disagrees_with_its_quadratic() {
        let e = generator_catalog(9, [0, 1, 2, 3]).unwrap();
        let r = verify_reduction(
            e.printed_function.as_ref().unwrap(),
            e.quadratic.as_ref().unwrap(),
        )
        .unwrap();
        assert!(!r.pass);
        // The only discrepancy is the extra pair term on {i, k}.
        assert!(r
            .failing_rows()
            .all(|row| row.x.contains(0) && row.x.contains(2)));
    }

    #[test]
    fn g10_has_no_quadratic_and_is_submodular() {
        for p in catalog_patterns(10).unwrap() {
            let e = generator_catalog(10, p).unwrap();
            assert!(e.quadratic.is_none());
            assert!(e.function.is_submodular().unwrap());
        }
    }

    #[test]
    fn pattern_counts() {
        let counts: Vec<usize> = (1..=GROUP_COUNT)
            .map(|g| catalog_patterns(g).unwrap().len())
            .collect();
        assert_eq!(counts, vec![6, 4, 1, 1, 4, 4, 4, 1, 6, 6]);
    }

    #[test]
    fn relabeling_commutes_with_patterns() {
        let base = generator_catalog(7, [0, 1, 2, 3]).unwrap().function;
        for p in permutations() {
            let e = generator_catalog(7, p).unwrap();
            assert_eq!(base.relabel(&p).unwrap(), e.function);
        }
    }

    #[test]
    fn invalid_requests() {
        assert!(matches!(
            generator_catalog(0, [0, 1, 2, 3]),
            Err(Error::InvalidGenerator(_))
        ));
        assert!(matches!(
            generator_catalog(11, [0, 1, 2, 3]),
            Err(Error::InvalidGenerator(_))
        ));
        assert!(matches!(
            generator_catalog(2, [0, 1, 1, 3]),
            Err(Error::InvalidGenerator(_))
        ));
        assert!(matches!(
            generator_catalog(2, [0, 1, 2, 4]),
            Err(Error::InvalidGenerator(_))
        ));
    }
}

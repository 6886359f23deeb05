//! Plain-text polynomial format.
//!
//! One term per line: `<rational> [: i j k ...]` with 1-based indices. A line
//! without `:` (or with nothing after it) is a constant. `#` starts a
//! comment. Duplicate subsets are summed.
//!
//! ```text
//! # G6 generator
//! 1 : 1 2 3
//! -1 : 1 2
//! -1 : 1 3
//! -1 : 2 3
//! ```

use crate::error::{Error, Result};
use crate::pbf::{MultilinearPoly, QuadraticPoly, SubsetMask, MAX_VARS};
use crate::rational::Rational;

/// Parsed terms with 0-based indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermList {
    pub terms: Vec<(Vec<usize>, Rational)>,
    /// Largest 1-based index seen (0 if none).
    pub max_index: usize,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Byte offset of `part` inside `whole`, as a 1-based character column.
fn column_of(whole: &str, part: &str) -> usize {
    let offset = part.as_ptr() as usize - whole.as_ptr() as usize;
    whole[..offset].chars().count() + 1
}

pub fn parse_terms(text: &str) -> Result<TermList> {
    let mut terms = Vec::new();
    let mut max_index = 0;
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let (coef_part, idx_part) = match body.split_once(':') {
            Some((c, i)) => (c, Some(i)),
            None => (body, None),
        };
        let mut coef_tokens = coef_part.split_whitespace();
        let coef_tok = coef_tokens
            .next()
            .ok_or_else(|| parse_err(line_no, column_of(raw, coef_part), "missing coefficient"))?;
        if let Some(extra) = coef_tokens.next() {
            return Err(parse_err(
                line_no,
                column_of(raw, extra),
                "expected `:` before indices",
            ));
        }
        let coef: Rational = coef_tok.parse().map_err(|_| {
            parse_err(
                line_no,
                column_of(raw, coef_tok),
                format!("bad coefficient `{coef_tok}`"),
            )
        })?;
        let mut idx = Vec::new();
        for tok in idx_part.unwrap_or("").split_whitespace() {
            let col = column_of(raw, tok);
            let i: usize = tok
                .parse()
                .map_err(|_| parse_err(line_no, col, format!("bad variable index `{tok}`")))?;
            if i == 0 {
                return Err(parse_err(line_no, col, "variable indices are 1-based"));
            }
            if i > MAX_VARS {
                return Err(parse_err(
                    line_no,
                    col,
                    format!("index {i} exceeds {MAX_VARS}"),
                ));
            }
            if idx.contains(&(i - 1)) {
                return Err(parse_err(
                    line_no,
                    col,
                    format!("index {i} repeated in one term"),
                ));
            }
            max_index = max_index.max(i);
            idx.push(i - 1);
        }
        idx.sort_unstable();
        terms.push((idx, coef));
    }
    Ok(TermList { terms, max_index })
}

/// Renders terms one per line; the empty list renders as `0`.
pub fn format_terms(terms: &[(Vec<usize>, Rational)]) -> String {
    let mut sorted: Vec<_> = terms.iter().filter(|(_, c)| !c.is_zero()).collect();
    sorted.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    if sorted.is_empty() {
        return "0\n".to_string();
    }
    let mut out = String::new();
    for (idx, c) in sorted {
        out.push_str(&c.to_string());
        if !idx.is_empty() {
            out.push_str(" :");
            for i in idx {
                out.push_str(&format!(" {}", i + 1));
            }
        }
        out.push('\n');
    }
    out
}

impl MultilinearPoly {
    /// Parses the text format; the width is the largest index, or
    /// `min_vars` if larger.
    pub fn parse(text: &str, min_vars: usize) -> Result<Self> {
        let t = parse_terms(text)?;
        let n = t.max_index.max(min_vars);
        MultilinearPoly::from_terms(
            n,
            t.terms
                .into_iter()
                .map(|(idx, c)| (SubsetMask::from_indices(idx), c)),
        )
    }

    pub fn to_text(&self) -> String {
        let terms: Vec<_> = self
            .terms()
            .map(|(m, c)| (m.iter().collect(), c.clone()))
            .collect();
        format_terms(&terms)
    }
}

impl QuadraticPoly {
    /// Parses the text format as a quadratic whose first `n_x` variables are
    /// the original block; the total width is at least `n_x + n_aux`.
    pub fn parse(text: &str, n_x: usize, n_aux: usize) -> Result<Self> {
        let t = parse_terms(text)?;
        let n = t.max_index.max(n_x + n_aux);
        let mut h = QuadraticPoly::zero(n_x, n - n_x);
        for (idx, c) in t.terms {
            match idx.as_slice() {
                [] => h.add_constant(&c),
                [i] => h.add_linear(*i, &c),
                [i, j] => h.add_pair(*i, *j, &c),
                _ => return Err(Error::NotQuadratic(idx.len())),
            }
        }
        Ok(h)
    }

    pub fn to_text(&self) -> String {
        format_terms(&self.term_list())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn parses_comments_duplicates_and_constants() {
        let p =
            MultilinearPoly::parse("# header\n1/2 : 1 2\n3\n1/2 : 2 1 # again\n-1 :\n", 0).unwrap();
        assert_eq!(p.n_vars(), 2);
        assert_eq!(p.coeff(SubsetMask(0b11)), int(1));
        assert_eq!(p.coeff(SubsetMask::EMPTY), int(2));
    }

    #[test]
    fn reports_line_and_column() {
        let err = MultilinearPoly::parse("1 : 1\n  2/x : 3\n", 0).unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                column: 3,
                message: "bad coefficient `2/x`".into()
            }
        );
        let err = MultilinearPoly::parse("1 : 0", 0).unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 1,
                column: 5,
                ..
            }
        ));
        let err = MultilinearPoly::parse("1 2 3", 0).unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 1,
                column: 3,
                ..
            }
        ));
        let err = MultilinearPoly::parse("1 : 2 2", 0).unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 1,
                column: 7,
                ..
            }
        ));
    }

    #[test]
    fn round_trips_through_text() {
        let p = MultilinearPoly::parse("-1 : 1 2 3 4\n2/3 : 2\n5\n", 0).unwrap();
        let text = p.to_text();
        assert_eq!(text, "5\n2/3 : 2\n-1 : 1 2 3 4\n");
        assert_eq!(MultilinearPoly::parse(&text, 0).unwrap(), p);
        assert_eq!(MultilinearPoly::zero(3).to_text(), "0\n");
    }

    #[test]
    fn quadratic_parse_respects_blocks() {
        let h = QuadraticPoly::parse("-1/2 : 1 3\n1 : 3", 2, 0).unwrap();
        assert_eq!((h.n_x(), h.n_aux()), (2, 1));
        assert_eq!(h.pair(0, 2), rat(-1, 2));
        assert_eq!(
            QuadraticPoly::parse("1 : 1 2 3", 3, 0),
            Err(Error::NotQuadratic(3))
        );
    }
}

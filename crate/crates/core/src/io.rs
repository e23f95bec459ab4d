//! Text and JSON forms of complexes.
//!
//! Text form: facets separated by `;`, vertices by spaces or commas, e.g. `0 1 2;1 2 3`.
//! JSON form: `{"n":8,"facets":[[0,1,4],...]}`, or a bare facet array `[[0,1,4],...]`.

use thiserror::Error;

use crate::complex::{Complex, ComplexError, ComplexJson};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("malformed input at byte {offset}: {message}")]
    Malformed { offset: usize, message: String },
    #[error("label gap: label {missing} is unused but {max} occurs (facet {facet})")]
    LabelGap { missing: usize, max: usize, facet: usize },
    #[error("too many vertices: labels span {0}, the limit is 16")]
    TooManyVertices(usize),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Parses a complex in either the text or the JSON form.
///
/// Without an explicit `n`, labels are normalized: a labeling starting at 1 is shifted to
/// start at 0, and the resulting labels must be exactly `0..n`.
pub fn parse_complex(text: &str) -> Result<Complex, ParseError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(ParseError::Empty);
    }
    if trimmed.starts_with('{') {
        let j: ComplexJson = serde_json::from_str(trimmed)?;
        return Ok(Complex::try_from(j)?);
    }
    let facets = if trimmed.starts_with('[') {
        serde_json::from_str::<Vec<Vec<usize>>>(trimmed)?
    } else {
        parse_facet_text(text)?
    };
    normalized(facets)
}

fn parse_facet_text(text: &str) -> Result<Vec<Vec<usize>>, ParseError> {
    let mut facets = Vec::new();
    let mut offset = 0;
    for chunk in text.split(';') {
        let mut facet = Vec::new();
        let mut pos = offset;
        for token in chunk.split(|c: char| c.is_whitespace() || c == ',') {
            if !token.is_empty() {
                let start = pos + chunk[pos - offset..].find(token).unwrap_or(0);
                let v = token.parse::<usize>().map_err(|_| ParseError::Malformed {
                    offset: start,
                    message: format!("expected a vertex label, found `{token}`"),
                })?;
                facet.push(v);
                pos = start + token.len();
            }
        }
        if facet.is_empty() {
            if chunk.trim().is_empty() && offset + chunk.len() == text.len() && !facets.is_empty() {
                // trailing separator
                break;
            }
            return Err(ParseError::Malformed { offset, message: "empty facet".into() });
        }
        facets.push(facet);
        offset += chunk.len() + 1;
    }
    Ok(facets)
}

fn normalized(mut facets: Vec<Vec<usize>>) -> Result<Complex, ParseError> {
    if facets.is_empty() {
        return Err(ParseError::Empty);
    }
    let used: std::collections::BTreeSet<usize> = facets.iter().flatten().copied().collect();
    let min = *used.iter().next().unwrap();
    if min == 1 {
        for f in facets.iter_mut() {
            for v in f.iter_mut() {
                *v -= 1;
            }
        }
    }
    let shift = usize::from(min == 1);
    let max = *used.iter().next_back().unwrap() - shift;
    for label in 0..=max {
        if !used.contains(&(label + shift)) {
            let facet = facets.iter().position(|f| f.contains(&max)).unwrap_or(0);
            return Err(ParseError::LabelGap { missing: label, max, facet });
        }
    }
    if max + 1 > crate::complex::MAX_VERTICES {
        return Err(ParseError::TooManyVertices(max + 1));
    }
    Ok(Complex::new(max + 1, facets)?)
}

/// Text form with facets in lexicographic order.
pub fn render_facet_list(k: &Complex) -> String {
    k.facet_lists()
        .iter()
        .map(|f| f.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn render_json(k: &Complex) -> String {
    serde_json::to_string(&ComplexJson::from(k)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    #[test]
    fn parses_text() {
        let k = parse_complex("0 1 2;1 2 3").unwrap();
        assert_eq!(k.n(), 4);
        assert_eq!(k.facet_lists(), vec![vec![0, 1, 2], vec![1, 2, 3]]);
        assert_eq!(parse_complex("1 2 3; 2 3 4;").unwrap(), k);
    }

    #[test]
    fn parses_json_forms() {
        let text = "[[0, 1, 4], [0, 1, 7], [0, 2, 3], [0, 2, 5], [0, 3, 4], [0, 5, 6], [0, 6, 7], \
                    [1, 2, 3], [1, 2, 4], [1, 3, 6], [1, 5, 6], [1, 5, 7], [2, 4, 7], [2, 5, 7], \
                    [3, 4, 5], [3, 5, 7], [3, 6, 7], [4, 5, 6], [4, 6, 7]]";
        let k = parse_complex(text).unwrap();
        assert_eq!(k.n(), 8);
        assert_eq!(k.facets().len(), 19);
        assert_eq!(k, fixtures::braid_b3());
        let obj = parse_complex(r#"{"n":5,"facets":[[0,1,2]]}"#).unwrap();
        assert_eq!(obj.n(), 5);
    }

    #[test]
    fn reports_errors() {
        let e = parse_complex("0 1;0 1 2").unwrap_err();
        assert_eq!(e.to_string(), "facet `0 1` contained in `0 1 2`");
        let e = parse_complex("0 1 2;2 4 5").unwrap_err();
        assert!(matches!(e, ParseError::LabelGap { missing: 3, .. }), "{e}");
        let e = parse_complex("0 1 x").unwrap_err();
        assert!(matches!(e, ParseError::Malformed { offset: 4, .. }), "{e}");
        assert!(matches!(parse_complex("  "), Err(ParseError::Empty)));
        assert!(parse_complex("{\"n\":2").is_err());
    }

    fn arb_complex() -> impl Strategy<Value = Complex> {
        (3usize..=8)
            .prop_flat_map(|n| (Just(n), proptest::collection::vec(1u16..(1 << n), 1..8)))
            .prop_map(|(n, masks)| {
                let k = Complex::from_masks_maximal(n, masks);
                k.compact_labels()
            })
    }

    proptest! {
        #[test]
        fn round_trip(k in arb_complex()) {
            prop_assert_eq!(parse_complex(&render_facet_list(&k)).unwrap(), k.clone());
            prop_assert_eq!(parse_complex(&render_json(&k)).unwrap(), k);
        }
    }
}

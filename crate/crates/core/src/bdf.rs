//! Reader and writer for the GRID / CTRIA3 / CQUAD4 subset of NASTRAN bulk
//! data.
//!
//! Both the fixed small-field layout (8-character columns) and the
//! comma-separated free-field layout are read. Output is always small-field.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::mesh::{
    Element, ElementId, ElementKind, ElementSet, Mesh, MeshError, NodeId, NodeSet, Point3,
};

const FIELD: usize = 8;

/// A parsed deck: the mesh plus per-element bookkeeping.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BulkDeck {
    pub mesh: Mesh,
    /// PSHELL reference of each element.
    pub property_ids: BTreeMap<ElementId, u64>,
    /// 1-based line on which each element was defined.
    pub source_lines: BTreeMap<ElementId, usize>,
    pub warnings: Vec<Warning>,
}

impl BulkDeck {
    /// Wraps a mesh, giving every element property 1.
    pub fn from_mesh(mesh: Mesh) -> Self {
        let property_ids = mesh.element_ids().map(|e| (e, 1)).collect();
        BulkDeck {
            mesh,
            property_ids,
            ..Default::default()
        }
    }

    pub fn property_id(&self, e: ElementId) -> u64 {
        self.property_ids.get(&e).copied().unwrap_or(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct BdfError {
    pub line: usize,
    pub kind: BdfErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BdfErrorKind {
    #[error("field {field}: {text:?} is not a positive integer")]
    BadInteger { field: usize, text: String },
    #[error("field {field}: {text:?} is not a real number")]
    BadReal { field: usize, text: String },
    #[error("field {field}: {text:?} uses the short exponent form; write it with E")]
    ShortExponent { field: usize, text: String },
    #[error("field {field} is required")]
    MissingField { field: usize },
    #[error("tab characters are not allowed in fixed fields")]
    Tab,
    #[error("duplicate GRID {0}")]
    DuplicateGrid(NodeId),
    #[error("duplicate element {0}")]
    DuplicateElement(ElementId),
    #[error("element {element} references undefined GRID {node}")]
    UndefinedGrid { element: ElementId, node: NodeId },
    #[error(transparent)]
    Mesh(MeshError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WriteError {
    #[error("a panel deck must contain elements")]
    EmptySelection,
    #[error("selected element {0} is not in the deck")]
    UnknownElement(ElementId),
    #[error("element {element} references node {node} which has no GRID")]
    MissingGrid { element: ElementId, node: NodeId },
    #[error("identifier {0} does not fit an 8-character field")]
    IdTooWide(u64),
}

fn err(line: usize, kind: BdfErrorKind) -> BdfError {
    BdfError { line, kind }
}

/// Splits a card into trimmed fields; field 1 is the keyword.
fn split_fields(text: &str, line: usize) -> Result<Vec<String>, BdfError> {
    if text.contains(',') {
        return Ok(text.split(',').map(|f| f.trim().to_string()).collect());
    }
    if text.contains('\t') {
        return Err(err(line, BdfErrorKind::Tab));
    }
    let chars: Vec<char> = text.chars().collect();
    Ok(chars
        .chunks(FIELD)
        .take(10)
        .map(|c| c.iter().collect::<String>().trim().to_string())
        .collect())
}

fn field(fields: &[String], i: usize) -> &str {
    fields.get(i - 1).map(String::as_str).unwrap_or("")
}

fn parse_id(fields: &[String], i: usize, line: usize) -> Result<u64, BdfError> {
    let text = field(fields, i);
    if text.is_empty() {
        return Err(err(line, BdfErrorKind::MissingField { field: i }));
    }
    match text.strip_prefix('+').unwrap_or(text).parse::<u64>() {
        Ok(v) if v > 0 && text.bytes().all(|b| b.is_ascii_digit() || b == b'+') => Ok(v),
        _ => Err(err(
            line,
            BdfErrorKind::BadInteger {
                field: i,
                text: text.to_string(),
            },
        )),
    }
}

/// Parses a real field. Blank is `None`.
///
/// Accepted: `1`, `1.`, `.5`, `-1.5E-3`, `2.e4`. Rejected: the legacy
/// `1.5-3` short exponent and `D` exponents.
pub fn parse_real(text: &str) -> Result<Option<f64>, RealError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(None);
    }
    let body = text.strip_prefix(['+', '-']).unwrap_or(text);
    if body.is_empty()
        || !body
            .bytes()
            .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'E' | b'e' | b'+' | b'-'))
    {
        return Err(RealError::Malformed);
    }
    let (mantissa, exponent) = match body.find(['E', 'e']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    if mantissa.contains(['+', '-']) {
        return Err(
            if exponent.is_none() && mantissa[1..].contains(['+', '-']) {
                RealError::ShortExponent
            } else {
                RealError::Malformed
            },
        );
    }
    let digits = mantissa.bytes().filter(u8::is_ascii_digit).count();
    if digits == 0 || mantissa.bytes().filter(|&b| b == b'.').count() > 1 {
        return Err(RealError::Malformed);
    }
    if let Some(exp) = exponent {
        let exp = exp.strip_prefix(['+', '-']).unwrap_or(exp);
        if exp.is_empty() || !exp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(RealError::Malformed);
        }
    }
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Some)
        .ok_or(RealError::Malformed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealError {
    Malformed,
    ShortExponent,
}

fn real_field(fields: &[String], i: usize, line: usize) -> Result<Option<f64>, BdfError> {
    let text = field(fields, i);
    parse_real(text).map_err(|e| {
        let text = text.to_string();
        err(
            line,
            match e {
                RealError::Malformed => BdfErrorKind::BadReal { field: i, text },
                RealError::ShortExponent => BdfErrorKind::ShortExponent { field: i, text },
            },
        )
    })
}

/// Parses bulk data text.
pub fn parse_bdf(text: &str) -> Result<BulkDeck, BdfError> {
    let mut deck = BulkDeck::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('$').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let fields = split_fields(content.trim_end(), line)?;
        let keyword = field(&fields, 1).to_ascii_uppercase();
        match keyword.as_str() {
            "GRID" => {
                let id = NodeId(parse_id(&fields, 2, line)?);
                let xyz = [
                    real_field(&fields, 4, line)?,
                    real_field(&fields, 5, line)?,
                    real_field(&fields, 6, line)?,
                ];
                let coordinate: Option<Point3> = if xyz.iter().all(Option::is_none) {
                    None
                } else {
                    Some(xyz.map(|v| v.unwrap_or(0.0)))
                };
                deck.mesh.add_node(id, coordinate).map_err(|e| {
                    err(
                        line,
                        match e {
                            MeshError::DuplicateNode(n) => BdfErrorKind::DuplicateGrid(n),
                            other => BdfErrorKind::Mesh(other),
                        },
                    )
                })?;
            }
            "CTRIA3" | "CQUAD4" => {
                let kind = if keyword == "CTRIA3" {
                    ElementKind::Tri
                } else {
                    ElementKind::Quad
                };
                let id = ElementId(parse_id(&fields, 2, line)?);
                let pid = if field(&fields, 3).is_empty() {
                    id.0
                } else {
                    parse_id(&fields, 3, line)?
                };
                let nodes = (0..kind.arity())
                    .map(|k| parse_id(&fields, 4 + k, line).map(NodeId))
                    .collect::<Result<Vec<_>, _>>()?;
                let element =
                    Element::new(id, kind, nodes).map_err(|e| err(line, BdfErrorKind::Mesh(e)))?;
                deck.mesh.add_element(element).map_err(|e| {
                    err(
                        line,
                        match e {
                            MeshError::DuplicateElement(e) => BdfErrorKind::DuplicateElement(e),
                            other => BdfErrorKind::Mesh(other),
                        },
                    )
                })?;
                deck.property_ids.insert(id, pid);
                deck.source_lines.insert(id, line);
            }
            "ENDDATA" => break,
            _ => {
                let what = if keyword.is_empty() || keyword.starts_with(['+', '*']) {
                    "continuation card ignored".to_string()
                } else {
                    format!("unsupported card {keyword} skipped")
                };
                log::warn!("line {line}: {what}");
                deck.warnings.push(Warning {
                    line,
                    message: what,
                });
            }
        }
    }
    // references are resolved after the whole deck is read
    for e in deck.mesh.elements() {
        if let Some(&n) = e.nodes().iter().find(|&&n| !deck.mesh.has_node(n)) {
            return Err(err(
                deck.source_lines[&e.id],
                BdfErrorKind::UndefinedGrid {
                    element: e.id,
                    node: n,
                },
            ));
        }
    }
    Ok(deck)
}

fn id_field(v: u64) -> Result<String, WriteError> {
    let s = v.to_string();
    if s.len() > FIELD {
        return Err(WriteError::IdTooWide(v));
    }
    Ok(format!("{s:>8}"))
}

fn with_point(mut s: String) -> String {
    if !s.contains('.') {
        match s.find('E') {
            Some(i) => s.insert(i, '.'),
            None => s.push('.'),
        }
    }
    s
}

fn candidate(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    let fixed = format!("{x}");
    let fixed = if fixed.contains('.') {
        fixed
    } else if fixed.len() + 2 <= FIELD {
        fixed + ".0"
    } else {
        fixed + "."
    };
    if fixed.len() <= FIELD {
        return fixed;
    }
    let exp = with_point(format!("{x:E}"));
    if exp.len() <= FIELD {
        return exp;
    }
    let rounded_fixed = (0..=7)
        .rev()
        .map(|p| {
            let s = format!("{x:.p$}");
            if s.contains('.') {
                let s = s.trim_end_matches('0');
                if s.ends_with('.') {
                    format!("{s}0")
                } else {
                    s.to_string()
                }
            } else {
                s + "."
            }
        })
        .find(|s| s.len() <= FIELD);
    let rounded_exp = (0..=6)
        .rev()
        .map(|p| with_point(format!("{x:.p$E}")))
        .find(|s| s.len() <= FIELD);
    let error = |s: &String| (s.parse::<f64>().unwrap_or(f64::INFINITY) - x).abs();
    match (rounded_fixed, rounded_exp) {
        (Some(f), Some(e)) => {
            if error(&e) < error(&f) {
                e
            } else {
                f
            }
        }
        (Some(f), None) => f,
        (None, Some(e)) => e,
        (None, None) => {
            unreachable!("an 8-character exponent form always exists for finite values")
        }
    }
}

/// Shortest 8-character rendering of `x` that reads back to a value whose
/// own rendering is the same string.
pub fn format_real(x: f64) -> String {
    let first = candidate(x);
    candidate(first.parse().expect("candidate output parses"))
}

/// Writes the selected elements, or all of them, plus the GRID cards they
/// need. Output is small-field, sorted by ID.
pub fn write_bdf(deck: &BulkDeck, selection: Option<&ElementSet>) -> Result<String, WriteError> {
    let all: ElementSet;
    let selected = match selection {
        Some(s) => s,
        None => {
            all = deck.mesh.element_ids().collect();
            &all
        }
    };
    if selected.is_empty() {
        return Err(WriteError::EmptySelection);
    }
    let mut nodes = NodeSet::new();
    for &e in selected {
        let element = deck.mesh.element(e).ok_or(WriteError::UnknownElement(e))?;
        for &n in element.nodes() {
            if !deck.mesh.has_node(n) {
                return Err(WriteError::MissingGrid {
                    element: e,
                    node: n,
                });
            }
            nodes.insert(n);
        }
    }
    let mut out = String::new();
    for &n in &nodes {
        out.push_str("GRID    ");
        out.push_str(&id_field(n.0)?);
        out.push_str("        ");
        if let Some(xyz) = deck.mesh.coordinate(n) {
            for v in xyz {
                out.push_str(&format!("{:>8}", format_real(v)));
            }
        }
        out.push('\n');
    }
    for &e in selected {
        let element = deck.mesh.element(e).ok_or(WriteError::UnknownElement(e))?;
        let keyword = match element.kind {
            ElementKind::Tri => "CTRIA3  ",
            ElementKind::Quad => "CQUAD4  ",
        };
        out.push_str(keyword);
        out.push_str(&id_field(e.0)?);
        out.push_str(&id_field(deck.property_id(e))?);
        for &n in element.nodes() {
            out.push_str(&id_field(n.0)?);
        }
        out.push('\n');
    }
    out.push_str("ENDDATA\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::reference_mesh;
    use crate::mesh::element_set;

    #[test]
    fn small_field_grid() {
        let deck = parse_bdf("GRID           1             0.0     0.0     0.0\n").unwrap();
        assert_eq!(deck.mesh.coordinate(NodeId(1)), Some([0.0, 0.0, 0.0]));
    }

    #[test]
    fn free_field_tria() {
        let deck =
            parse_bdf("GRID,1,,0.,0.,0.\nGRID,2,,1.,0.,0.\nGRID,7,,1.,1.,0.\nctria3,1,1,1,2,7\n")
                .unwrap();
        let e = deck.mesh.element(ElementId(1)).unwrap();
        assert_eq!(e.kind, ElementKind::Tri);
        assert_eq!(e.nodes(), &[NodeId(1), NodeId(2), NodeId(7)]);
        assert_eq!(deck.property_ids[&ElementId(1)], 1);
        assert_eq!(deck.source_lines[&ElementId(1)], 4);
    }

    #[test]
    fn reals() {
        assert_eq!(parse_real("1.5E-3"), Ok(Some(1.5e-3)));
        assert_eq!(parse_real("-.5"), Ok(Some(-0.5)));
        assert_eq!(parse_real("2.e4"), Ok(Some(2e4)));
        assert_eq!(parse_real("7"), Ok(Some(7.0)));
        assert_eq!(parse_real("   "), Ok(None));
        assert_eq!(parse_real("1.0+3"), Err(RealError::ShortExponent));
        assert_eq!(parse_real("-1.0-3"), Err(RealError::ShortExponent));
        assert_eq!(parse_real("1.0D3"), Err(RealError::Malformed));
        assert_eq!(parse_real("inf"), Err(RealError::Malformed));
        assert_eq!(parse_real("1.2.3"), Err(RealError::Malformed));
        assert_eq!(parse_real("E5"), Err(RealError::Malformed));
        assert_eq!(parse_real("1E"), Err(RealError::Malformed));
    }

    #[test]
    fn real_formatting_fits_and_is_stable() {
        for x in [
            0.0,
            1.0,
            -1.0,
            0.5,
            1e-9,
            -3.25e-7,
            1234567.0,
            123456789.0,
            0.1234567891,
            -0.000123456,
            1e300,
            6.02e23,
        ] {
            let s = format_real(x);
            assert!(s.len() <= 8, "{x} -> {s}");
            assert!(s.contains('.'), "{x} -> {s}");
            assert_eq!(format_real(s.parse().unwrap()), s);
            let back: f64 = s.parse().unwrap();
            assert!((back - x).abs() <= 5e-3 * x.abs(), "{x} -> {s}");
        }
        assert_eq!(format_real(0.5), "0.5");
        assert_eq!(format_real(3.0), "3.0");
    }

    #[test]
    fn write_selection() {
        let deck = BulkDeck::from_mesh(reference_mesh());
        let text = write_bdf(&deck, Some(&element_set([1]))).unwrap();
        let cards: Vec<&str> = text.lines().collect();
        assert_eq!(cards.len(), 5);
        assert!(cards[..3].iter().all(|c| c.starts_with("GRID")));
        assert_eq!(cards[3], "CTRIA3         1       1       1       2       7");
        assert_eq!(
            write_bdf(&deck, Some(&ElementSet::new())),
            Err(WriteError::EmptySelection)
        );
    }

    #[test]
    fn skipped_cards_warn() {
        let deck = parse_bdf("PSHELL         1       1    0.01\nGRID    1\n+       abc\n").unwrap();
        assert_eq!(deck.warnings.len(), 2);
        assert_eq!(deck.warnings[0].line, 1);
        assert_eq!(deck.mesh.coordinate(NodeId(1)), None);
    }
}

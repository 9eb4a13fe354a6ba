//! Sectioned plain-text format shared by molecule and scenario files.
//!
//! ```text
//! # comment
//! [section]
//! key = value
//! column_a  column_b  column_c
//! ```
//!
//! A line containing `=` is a key/value pair, anything else is a
//! whitespace-separated row. Sections may repeat; order is preserved.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct TextError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LineKind {
    Pair(String, String),
    Row(Vec<String>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub number: usize,
    pub kind: LineKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub lines: Vec<Line>,
}

impl Section {
    pub fn pairs(&self) -> impl Iterator<Item = (usize, &str, &str)> {
        self.lines.iter().filter_map(|l| match &l.kind {
            LineKind::Pair(k, v) => Some((l.number, k.as_str(), v.as_str())),
            LineKind::Row(_) => None,
        })
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &[String])> {
        self.lines.iter().filter_map(|l| match &l.kind {
            LineKind::Row(r) => Some((l.number, r.as_slice())),
            LineKind::Pair(..) => None,
        })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.pairs().find(|(_, k, _)| *k == key).map(|(_, _, v)| v)
    }

    pub fn error(&self, line: usize, message: impl Into<String>) -> TextError {
        TextError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Document {
    pub sections: Vec<Section>,
}

impl Document {
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn sections_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Section> {
        self.sections.iter().filter(move |s| s.name == name)
    }
}

pub fn parse(text: &str) -> Result<Document, TextError> {
    let mut doc = Document::default();
    for (idx, raw) in text.lines().enumerate() {
        let number = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| TextError {
                line: number,
                message: format!("unterminated section header {content:?}"),
            })?;
            doc.sections.push(Section {
                name: name.trim().to_string(),
                line: number,
                lines: Vec::new(),
            });
            continue;
        }
        let section = doc.sections.last_mut().ok_or_else(|| TextError {
            line: number,
            message: "content before the first [section]".to_string(),
        })?;
        let kind = match content.split_once('=') {
            Some((k, v)) => {
                let k = k.trim();
                if k.is_empty() {
                    return Err(TextError {
                        line: number,
                        message: "empty key".to_string(),
                    });
                }
                LineKind::Pair(k.to_string(), v.trim().to_string())
            }
            None => LineKind::Row(content.split_whitespace().map(str::to_string).collect()),
        };
        section.lines.push(Line { number, kind });
    }
    Ok(doc)
}

/// Parse a float that may be spelled `inf`.
pub fn parse_f64(s: &str) -> Option<f64> {
    match s {
        "inf" | "Inf" | "infinity" => Some(f64::INFINITY),
        _ => s.parse().ok(),
    }
}

/// Comma-separated list with empty items dropped.
pub fn parse_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_rows_and_comments() {
        let doc = parse(
            "# header\n[a]\nk = v # trailing\n\n x  y z\n[b]\n[a]\nq=1\n",
        )
        .unwrap();
        assert_eq!(doc.sections.len(), 3);
        let a = doc.section("a").unwrap();
        assert_eq!(a.get("k"), Some("v"));
        let rows: Vec<_> = a.rows().collect();
        assert_eq!(rows, vec![(5, &["x".to_string(), "y".into(), "z".into()][..])]);
        assert_eq!(doc.sections_named("a").count(), 2);
    }

    #[test]
    fn rejects_orphan_lines_and_bad_headers() {
        assert_eq!(parse("k = v").unwrap_err().line, 1);
        assert_eq!(parse("[a]\n[b").unwrap_err().line, 2);
        assert!(parse("[a]\n = 3").is_err());
    }

    #[test]
    fn helpers() {
        assert_eq!(parse_f64("inf"), Some(f64::INFINITY));
        assert_eq!(parse_f64("0.5"), Some(0.5));
        assert_eq!(parse_f64("x"), None);
        assert_eq!(parse_list("a, b,,c "), vec!["a", "b", "c"]);
    }
}

//! Plain-text `key = value` files with `[section]` headers.
//!
//! `#` starts a comment. Keys before the first header belong to the
//! unnamed section `""`. Keys may repeat; consumers decide whether that is
//! allowed.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for ParseError {}

pub fn parse(text: &str) -> Result<Vec<Section>, ParseError> {
    let mut sections = vec![Section {
        name: String::new(),
        line: 0,
        entries: Vec::new(),
    }];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ParseError {
                line,
                msg: format!("unterminated section header '{body}'"),
            })?;
            let name = name.trim();
            if name.is_empty() {
                return Err(ParseError {
                    line,
                    msg: "empty section name".into(),
                });
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(ParseError {
                    line,
                    msg: format!("duplicate section [{name}]"),
                });
            }
            sections.push(Section {
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (k, v) = body.split_once('=').ok_or_else(|| ParseError {
            line,
            msg: format!("expected 'key = value', found '{body}'"),
        })?;
        let key = k.trim();
        if key.is_empty() {
            return Err(ParseError {
                line,
                msg: "empty key".into(),
            });
        }
        sections
            .last_mut()
            .expect("root section")
            .entries
            .push(Entry {
                key: key.to_string(),
                value: v.trim().to_string(),
                line,
            });
    }
    Ok(sections)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let s = parse("a = 1 # note\n\n[run]\nlevel=2\nlevel = 3\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].entries[0].value, "1");
        assert_eq!(s[1].name, "run");
        assert_eq!(s[1].entries.len(), 2);
        assert_eq!(s[1].entries[1].line, 5);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(parse("[ok]\nnonsense\n").unwrap_err().line, 2);
        assert_eq!(parse("[a\n").unwrap_err().line, 1);
        assert_eq!(parse("[a]\n[a]\n").unwrap_err().line, 2);
    }
}

//! Text facet lists and poset JSON.
//!
//! A facet list has one facet per line as whitespace-separated labels; `#`
//! starts a comment and `{}` stands for the empty face. A relative pair uses
//! `[DELTA]` and `[GAMMA]` headers; without them the file is an absolute
//! complex. A missing or empty `[GAMMA]` section is the void subcomplex.

use std::fmt::Write as _;
use std::path::Path;

use crate::complex::{build_complex, RelativePair, SimplicialComplex};
use crate::error::{Error, Result};
use crate::poset::{PosetFile, RelativePosetPair};

fn facet_line(line: &str) -> Option<Vec<String>> {
    let body = line.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        return None;
    }
    if body == "{}" {
        return Some(Vec::new());
    }
    Some(body.split_whitespace().map(str::to_string).collect())
}

pub fn parse_facet_list(text: &str) -> Result<RelativePair> {
    let mut delta: Vec<Vec<String>> = Vec::new();
    let mut gamma: Vec<Vec<String>> = Vec::new();
    let mut section = 0u8; // 0: no header seen, 1: delta, 2: gamma
    for (no, line) in text.lines().enumerate() {
        let trimmed = line.split('#').next().unwrap_or("").trim();
        match trimmed {
            "[DELTA]" => {
                section = 1;
                continue;
            }
            "[GAMMA]" => {
                if section == 0 && !delta.is_empty() {
                    return Err(Error::Malformed(format!("line {}: [GAMMA] without [DELTA]", no + 1)));
                }
                section = 2;
                continue;
            }
            t if t.starts_with('[') => {
                return Err(Error::Malformed(format!("line {}: unknown section {t}", no + 1)));
            }
            _ => {}
        }
        if let Some(f) = facet_line(line) {
            if section == 2 {
                gamma.push(f);
            } else {
                delta.push(f);
            }
        }
    }
    let d = build_complex(&delta)?;
    let g = if gamma.is_empty() {
        SimplicialComplex::void(d.table().clone())
    } else {
        build_complex(&gamma)?
    };
    RelativePair::new(d, g)
}

pub fn read_facet_list(path: &Path) -> Result<RelativePair> {
    parse_facet_list(&std::fs::read_to_string(path)?)
}

fn write_facets(out: &mut String, c: &SimplicialComplex) {
    for f in c.labeled_facets() {
        if f.is_empty() {
            out.push_str("{}\n");
        } else {
            let _ = writeln!(out, "{}", f.join(" "));
        }
    }
}

/// Facet list of a complex; relative pairs get section headers.
pub fn format_facet_list(pair: &RelativePair) -> String {
    let mut out = String::new();
    if pair.is_absolute() {
        write_facets(&mut out, &pair.delta);
    } else {
        out.push_str("[DELTA]\n");
        write_facets(&mut out, &pair.delta);
        out.push_str("[GAMMA]\n");
        write_facets(&mut out, &pair.gamma);
    }
    out
}

pub fn format_complex(c: &SimplicialComplex) -> String {
    let mut out = String::new();
    write_facets(&mut out, c);
    out
}

pub fn parse_poset_json(text: &str) -> Result<RelativePosetPair> {
    let file: PosetFile = serde_json::from_str(text)?;
    RelativePosetPair::from_file(&file)
}

pub fn read_poset_json(path: &Path) -> Result<RelativePosetPair> {
    parse_poset_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absolute_with_comments() {
        let p = parse_facet_list("# torus-ish\n1 2 3 # a facet\n\n2 3 4\n").unwrap();
        assert!(p.is_absolute());
        assert_eq!(p.delta.facets().len(), 2);
        let back = parse_facet_list(&format_facet_list(&p)).unwrap();
        assert_eq!(back.delta, p.delta);
    }

    #[test]
    fn relative_sections() {
        let p = parse_facet_list("[DELTA]\na b c\n[GAMMA]\na b\nc\n").unwrap();
        assert_eq!(p.f_vector().f, vec![0, 0, 2, 1]);
        let e = parse_facet_list("[DELTA]\na b\n[GAMMA]\n{}\n").unwrap();
        assert_eq!(e.f_vector().f, vec![0, 2, 1]);
        let v = parse_facet_list("[DELTA]\na b\n[GAMMA]\n").unwrap();
        assert!(v.gamma.is_void());
        assert!(parse_facet_list("[DELTA]\na b\n[GAMMA]\nc d\n").is_err());
        assert!(parse_facet_list("[OTHER]\n").is_err());
        let back = parse_facet_list(&format_facet_list(&p)).unwrap();
        assert_eq!(back.f_vector(), p.f_vector());
        assert_eq!(format_facet_list(&e).lines().last(), Some("{}"));
    }

    #[test]
    fn poset_json() {
        let text = r#"{"faces":[{"id":1,"rank":1},{"id":2,"rank":1,"covers":[]},
            {"id":3,"rank":2,"covers":[1,2]},{"id":4,"rank":2,"covers":[1,2]}],"gamma":[1]}"#;
        let p = parse_poset_json(text).unwrap();
        assert_eq!(p.f_vector().f, vec![0, 1, 2]);
        assert!(parse_poset_json(r#"{"faces":[{"id":1,"rank":2,"covers":[1]}]}"#).is_err());
    }
}

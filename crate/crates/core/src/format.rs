//! The `ALT v1` text format.
//!
//! ```text
//! ALT v1
//! p=3 n=1 dimV=2
//! meta seed=0 rounds=2 history=5      # optional
//! beta 0 1 : 1
//! ```
//!
//! One `beta i j : k_1 … k_n` line per nonzero Gram entry with `i < j` and
//! every `k` reduced mod `p`. Blank lines and `#` comments are ignored. The
//! serializer writes entries sorted by `(i, j)`, so `serialize ∘ parse` is
//! the identity on serializer output.
//!
//! Documents extend a system with named element lists, used for command
//! inputs and counterexample certificates:
//!
//! ```text
//! check symmetry
//! set A
//! elem : 1 0 | 0
//! ```

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::alt_system::AltSystem;
use crate::baer_group::GroupElement;
use crate::fp_linalg::{FVector, Prime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatErrorKind {
    #[error("parse error: {0}")]
    Syntax(String),
    #[error("modulus {0} is not an odd prime")]
    BadPrime(u64),
    #[error("diagonal entry beta({0}, {0}) must be zero")]
    NotAlternating(usize),
}

/// A format error at a 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct FormatError {
    pub line: usize,
    pub kind: FormatErrorKind,
}

impl FormatError {
    fn syntax(line: usize, msg: impl Into<String>) -> Self {
        FormatError {
            line,
            kind: FormatErrorKind::Syntax(msg.into()),
        }
    }
}

type FResult<T> = std::result::Result<T, FormatError>;

/// Optional provenance header of a generated stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Meta {
    pub seed: u64,
    pub rounds: usize,
    pub history: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltFile {
    pub sys: AltSystem,
    pub meta: Option<Meta>,
}

/// A system together with named element lists and an optional check name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub file: AltFile,
    pub check: Option<String>,
    pub sets: Vec<(String, Vec<GroupElement>)>,
}

impl Document {
    pub fn new(sys: AltSystem) -> Self {
        Document {
            file: AltFile { sys, meta: None },
            check: None,
            sets: Vec::new(),
        }
    }

    pub fn set(&self, name: &str) -> Option<&[GroupElement]> {
        self.sets
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn with_set(mut self, name: &str, elems: Vec<GroupElement>) -> Self {
        self.sets.push((name.to_string(), elems));
        self
    }
}

pub fn parse_system(text: &str) -> FResult<AltSystem> {
    Ok(parse_alt(text)?.sys)
}

pub fn parse_alt(text: &str) -> FResult<AltFile> {
    let doc = parse_document(text)?;
    if let Some(name) = doc.sets.first().map(|(n, _)| n) {
        return Err(FormatError::syntax(
            0,
            format!("unexpected element set {name}"),
        ));
    }
    if doc.check.is_some() {
        return Err(FormatError::syntax(0, "unexpected check line"));
    }
    Ok(doc.file)
}

/// Significant lines with their 1-based numbers, comments stripped.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_int<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> FResult<T> {
    tok.parse().map_err(|_| {
        FormatError::syntax(
            line,
            format!("{what}: expected a nonnegative integer, found {tok:?}"),
        )
    })
}

/// Parses `key=value` tokens in the given order.
fn parse_keys<'a>(line: usize, toks: &[&'a str], keys: &[&str]) -> FResult<Vec<&'a str>> {
    if toks.len() != keys.len() {
        return Err(FormatError::syntax(
            line,
            format!("expected {} fields ({})", keys.len(), keys.join(" ")),
        ));
    }
    toks.iter()
        .zip(keys)
        .map(|(tok, key)| {
            tok.strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| {
                    FormatError::syntax(line, format!("expected {key}=<int>, found {tok:?}"))
                })
        })
        .collect()
}

fn parse_residues(line: usize, p: Prime, toks: &[&str]) -> FResult<Vec<u32>> {
    toks.iter()
        .map(|t| {
            let x: u64 = parse_int(line, t, "entry")?;
            if x >= p.get() as u64 {
                return Err(FormatError::syntax(
                    line,
                    format!("entry {x} is not reduced mod {p}"),
                ));
            }
            Ok(x as u32)
        })
        .collect()
}

pub fn parse_document(text: &str) -> FResult<Document> {
    let mut it = lines(text).peekable();
    match it.next() {
        Some((_, "ALT v1")) => {}
        Some((l, other)) => {
            return Err(FormatError::syntax(
                l,
                format!("expected `ALT v1`, found {other:?}"),
            ))
        }
        None => return Err(FormatError::syntax(1, "empty input")),
    }
    let Some((hl, header)) = it.next() else {
        return Err(FormatError::syntax(2, "missing `p= n= dimV=` header"));
    };
    let toks: Vec<&str> = header.split_whitespace().collect();
    let vals = parse_keys(hl, &toks, &["p", "n", "dimV"])?;
    let p_raw: u64 = parse_int(hl, vals[0], "p")?;
    let n: usize = parse_int(hl, vals[1], "n")?;
    let dim: usize = parse_int(hl, vals[2], "dimV")?;
    let p = Prime::new(p_raw).map_err(|_| FormatError {
        line: hl,
        kind: FormatErrorKind::BadPrime(p_raw),
    })?;
    let mut sys = AltSystem::zero(p, n, dim).map_err(|e| FormatError::syntax(hl, e.to_string()))?;

    let mut meta = None;
    if let Some(&(ml, line)) = it.peek() {
        if let Some(rest) = line.strip_prefix("meta") {
            it.next();
            let toks: Vec<&str> = rest.split_whitespace().collect();
            let keys: &[&str] = if toks.len() == 3 {
                &["seed", "rounds", "history"]
            } else {
                &["seed", "rounds"]
            };
            let vals = parse_keys(ml, &toks, keys)?;
            meta = Some(Meta {
                seed: parse_int(ml, vals[0], "seed")?,
                rounds: parse_int(ml, vals[1], "rounds")?,
                history: vals
                    .get(2)
                    .map(|v| parse_int(ml, v, "history"))
                    .transpose()?,
            });
        }
    }

    let mut seen = std::collections::HashSet::new();
    let mut check = None;
    let mut sets: Vec<(String, Vec<GroupElement>)> = Vec::new();
    for (l, line) in it {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("beta") => {
                if !sets.is_empty() {
                    return Err(FormatError::syntax(l, "beta line after an element set"));
                }
                let toks: Vec<&str> = toks.collect();
                if toks.len() < 3 || toks[2] != ":" {
                    return Err(FormatError::syntax(
                        l,
                        "expected `beta <i> <j> : <k_1> ... <k_n>`",
                    ));
                }
                let i: usize = parse_int(l, toks[0], "i")?;
                let j: usize = parse_int(l, toks[1], "j")?;
                if i >= dim || j >= dim {
                    return Err(FormatError::syntax(
                        l,
                        format!("index out of range for dimV={dim}"),
                    ));
                }
                let w = parse_residues(l, p, &toks[3..])?;
                if w.len() != n {
                    return Err(FormatError::syntax(
                        l,
                        format!("expected {n} entries, found {}", w.len()),
                    ));
                }
                if i == j {
                    if w.iter().any(|&x| x != 0) {
                        return Err(FormatError {
                            line: l,
                            kind: FormatErrorKind::NotAlternating(i),
                        });
                    }
                    return Err(FormatError::syntax(l, "diagonal entries are not listed"));
                }
                if i > j {
                    return Err(FormatError::syntax(
                        l,
                        format!("expected i < j, found {i} {j}"),
                    ));
                }
                if !seen.insert((i, j)) {
                    return Err(FormatError::syntax(
                        l,
                        format!("duplicate entry ({i}, {j})"),
                    ));
                }
                sys.set_entry(i, j, &w);
            }
            Some("check") => {
                let name: Vec<&str> = toks.collect();
                if name.len() != 1 || check.is_some() {
                    return Err(FormatError::syntax(
                        l,
                        "expected a single `check <name>` line",
                    ));
                }
                check = Some(name[0].to_string());
            }
            Some("set") => {
                let name: Vec<&str> = toks.collect();
                if name.len() != 1 {
                    return Err(FormatError::syntax(l, "expected `set <name>`"));
                }
                if sets.iter().any(|(n, _)| n == name[0]) {
                    return Err(FormatError::syntax(l, format!("duplicate set {}", name[0])));
                }
                sets.push((name[0].to_string(), Vec::new()));
            }
            Some("elem") => {
                let Some(current) = sets.last_mut() else {
                    return Err(FormatError::syntax(l, "element outside of a set"));
                };
                let toks: Vec<&str> = toks.collect();
                let bar = toks.iter().position(|&t| t == "|");
                if toks.first() != Some(&":") || bar.is_none() {
                    return Err(FormatError::syntax(l, "expected `elem : <v..> | <w..>`"));
                }
                let bar = bar.unwrap();
                let v = parse_residues(l, p, &toks[1..bar])?;
                let w = parse_residues(l, p, &toks[bar + 1..])?;
                if v.len() != dim || w.len() != n {
                    return Err(FormatError::syntax(
                        l,
                        format!(
                            "element has shape {}|{}, expected {dim}|{n}",
                            v.len(),
                            w.len()
                        ),
                    ));
                }
                current.1.push(GroupElement::new(
                    FVector::from_raw(p, v),
                    FVector::from_raw(p, w),
                ));
            }
            Some(other) => {
                return Err(FormatError::syntax(
                    l,
                    format!("unknown directive {other:?}"),
                ))
            }
            None => unreachable!("blank lines are filtered"),
        }
    }
    Ok(Document {
        file: AltFile { sys, meta },
        check,
        sets,
    })
}

struct Coords<'a>(&'a [u32]);

impl fmt::Display for Coords<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_char(' ')?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

pub fn serialize_system(sys: &AltSystem) -> String {
    serialize_alt(&AltFile {
        sys: sys.clone(),
        meta: None,
    })
}

pub fn serialize_alt(file: &AltFile) -> String {
    let sys = &file.sys;
    let mut out = String::new();
    let _ = writeln!(out, "ALT v1");
    let _ = writeln!(out, "p={} n={} dimV={}", sys.prime(), sys.n(), sys.dim_v());
    if let Some(m) = file.meta {
        let _ = write!(out, "meta seed={} rounds={}", m.seed, m.rounds);
        if let Some(h) = m.history {
            let _ = write!(out, " history={h}");
        }
        out.push('\n');
    }
    for (i, j, w) in sys.nonzero_entries() {
        let _ = writeln!(out, "beta {i} {j} : {}", Coords(w.coords()));
    }
    out
}

pub fn serialize_element(x: &GroupElement) -> String {
    format!("elem : {} | {}", Coords(x.v.coords()), Coords(x.w.coords()))
}

pub fn serialize_document(doc: &Document) -> String {
    let mut out = serialize_alt(&doc.file);
    if let Some(c) = &doc.check {
        let _ = writeln!(out, "check {c}");
    }
    for (name, elems) in &doc.sets {
        let _ = writeln!(out, "set {name}");
        for x in elems {
            out.push_str(&serialize_element(x));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn symplectic_plane() {
        let sys = parse_system("ALT v1\np=3 n=1 dimV=2\nbeta 0 1 : 1\n").unwrap();
        let p = Prime::new(3).unwrap();
        assert_eq!(
            sys,
            AltSystem::plane(p, &FVector::from_ints(p, &[1])).unwrap()
        );
    }

    #[test]
    fn comments_and_blanks() {
        let text = "# a plane\nALT v1\n\np=3 n=1 dimV=2   # header\nbeta 0 1 : 2\n";
        assert_eq!(parse_system(text).unwrap().gram(0, 1).get(0), 2);
    }

    #[test]
    fn diagonal_is_not_alternating() {
        let err = parse_system("ALT v1\np=3 n=1 dimV=2\nbeta 1 1 : 1\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert_eq!(err.kind, FormatErrorKind::NotAlternating(1));
    }

    #[test]
    fn bad_prime_and_syntax() {
        let err = parse_system("ALT v1\np=4 n=1 dimV=2\n").unwrap_err();
        assert_eq!((err.line, err.kind), (2, FormatErrorKind::BadPrime(4)));
        for (text, line) in [
            ("ALT v2\n", 1),
            ("ALT v1\np=3 n=1\n", 2),
            ("ALT v1\np=3 n=1 dimV=2\nbeta 0 1 : 3\n", 3),
            ("ALT v1\np=3 n=1 dimV=2\nbeta 1 0 : 1\n", 3),
            ("ALT v1\np=3 n=1 dimV=2\nbeta 0 1 : 1\nbeta 0 1 : 2\n", 4),
            ("ALT v1\np=3 n=1 dimV=2\n\nbeta 0 2 : 1\n", 4),
            ("ALT v1\np=3 n=2 dimV=2\nbeta 0 1 : 1\n", 3),
            ("ALT v1\np=3 n=1 dimV=2\nfoo\n", 3),
        ] {
            let err = parse_system(text).unwrap_err();
            assert_eq!(err.line, line, "{text:?}");
            assert!(matches!(err.kind, FormatErrorKind::Syntax(_)), "{text:?}");
        }
    }

    #[test]
    fn round_trip_with_meta() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = Prime::new(5).unwrap();
        let sys = AltSystem::random(p, 2, 4, &mut rng).unwrap();
        let file = AltFile {
            sys,
            meta: Some(Meta {
                seed: 9,
                rounds: 2,
                history: Some(14),
            }),
        };
        let text = serialize_alt(&file);
        assert_eq!(parse_alt(&text).unwrap(), file);
        assert_eq!(serialize_alt(&parse_alt(&text).unwrap()), text);
    }

    #[test]
    fn document_round_trip() {
        let p = Prime::new(3).unwrap();
        let sys = AltSystem::plane(p, &FVector::from_ints(p, &[1])).unwrap();
        let x = GroupElement::new(FVector::from_ints(p, &[1, 2]), FVector::from_ints(p, &[0]));
        let mut doc = Document::new(sys)
            .with_set("A", vec![x.clone()])
            .with_set("B", vec![]);
        doc.check = Some("symmetry".into());
        let text = serialize_document(&doc);
        let back = parse_document(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.set("A").unwrap(), &[x]);
        assert!(parse_alt(&text).is_err());
    }

    #[test]
    fn element_shape_checked() {
        let text = "ALT v1\np=3 n=1 dimV=2\nset A\nelem : 1 | 0\n";
        assert_eq!(parse_document(text).unwrap_err().line, 4);
        let text = "ALT v1\np=3 n=1 dimV=2\nelem : 1 0 | 0\n";
        assert_eq!(parse_document(text).unwrap_err().line, 3);
    }
}

//! Text formats for shift and code definitions.
//!
//! ```text
//! shift golden {
//!     alphabet = 0 1;
//!     forbid = "11";
//!     sided = two;
//! }
//!
//! code swap {
//!     alphabet = 0 1;
//!     memory = 0;
//!     anticipation = 0;
//!     rule "0" -> 1;
//!     rule "1" -> 0;
//! }
//! ```
//!
//! A shift block carries exactly one of `forbid` (quoted words, possibly
//! none), `regex` (one quoted expression), or `graph` (edges written
//! `p -a-> q`). Code blocks take an optional `codomain` alphabet and one
//! `rule` line per window. Errors carry line and column.

use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::code::SlidingBlockCode;
use crate::point::Sidedness;
use crate::presentation::{PresentationError, ShiftPresentation};
use crate::word::Word;

#[derive(Debug, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct FormatError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl FormatError {
    fn new(line: usize, col: usize, msg: impl Into<String>) -> Self {
        FormatError {
            line,
            col,
            msg: msg.into(),
        }
    }
}

/// Everything defined in one file, in order of appearance.
#[derive(Default)]
pub struct Document {
    pub shifts: Vec<ShiftPresentation>,
    pub codes: Vec<SlidingBlockCode>,
}

impl std::fmt::Debug for Document {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Document")
            .field(
                "shifts",
                &self.shifts.iter().map(|s| s.name()).collect::<Vec<_>>(),
            )
            .field(
                "codes",
                &self.codes.iter().map(|c| c.name()).collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl Document {
    pub fn shift(&self, name: Option<&str>) -> Option<&ShiftPresentation> {
        match name {
            Some(n) => self.shifts.iter().find(|s| s.name() == n),
            None => self.shifts.first(),
        }
    }

    pub fn code(&self, name: Option<&str>) -> Option<&SlidingBlockCode> {
        match name {
            Some(n) => self.codes.iter().find(|c| c.name() == n),
            None => self.codes.first(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Arrow(String), // -a-> carrying the label text
    Punct(char),   // { } = ;
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, FormatError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        let bump = |ch: char, line: &mut usize, col: &mut usize| {
            if ch == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                chars.next();
                bump(c, &mut line, &mut col);
            }
            '#' => {
                for ch in chars.by_ref() {
                    bump(ch, &mut line, &mut col);
                    if ch == '\n' {
                        break;
                    }
                }
            }
            '{' | '}' | '=' | ';' => {
                chars.next();
                bump(c, &mut line, &mut col);
                out.push(Spanned {
                    tok: Tok::Punct(c),
                    line: tl,
                    col: tc,
                });
            }
            '"' => {
                chars.next();
                bump(c, &mut line, &mut col);
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => {
                            bump('"', &mut line, &mut col);
                            break;
                        }
                        Some(ch) if ch != '\n' => {
                            bump(ch, &mut line, &mut col);
                            s.push(ch);
                        }
                        _ => return Err(FormatError::new(tl, tc, "unterminated string")),
                    }
                }
                out.push(Spanned {
                    tok: Tok::Str(s),
                    line: tl,
                    col: tc,
                });
            }
            '-' => {
                // plain -> in rule lines, -label-> in graph entries
                chars.next();
                bump('-', &mut line, &mut col);
                if chars.peek() == Some(&'>') {
                    chars.next();
                    bump('>', &mut line, &mut col);
                    out.push(Spanned {
                        tok: Tok::Arrow(String::new()),
                        line: tl,
                        col: tc,
                    });
                    continue;
                }
                let mut label = String::new();
                loop {
                    match chars.next() {
                        Some('-') => {
                            bump('-', &mut line, &mut col);
                            break;
                        }
                        Some(ch) if !ch.is_whitespace() => {
                            bump(ch, &mut line, &mut col);
                            label.push(ch);
                        }
                        _ => return Err(FormatError::new(tl, tc, "malformed edge arrow")),
                    }
                }
                match chars.next() {
                    Some('>') => bump('>', &mut line, &mut col),
                    _ => return Err(FormatError::new(tl, tc, "edge arrow must end with '>'")),
                }
                out.push(Spanned {
                    tok: Tok::Arrow(label),
                    line: tl,
                    col: tc,
                });
            }
            ch if !ch.is_whitespace() => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() || "{}=;\"#-".contains(ch) {
                        break;
                    }
                    s.push(ch);
                    chars.next();
                    bump(ch, &mut line, &mut col);
                }
                out.push(Spanned {
                    tok: Tok::Ident(s),
                    line: tl,
                    col: tc,
                });
            }
            _ => return Err(FormatError::new(tl, tc, format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, msg: impl Into<String>) -> FormatError {
        match self.toks.get(self.pos.min(self.toks.len().saturating_sub(1))) {
            Some(t) => FormatError::new(t.line, t.col, msg),
            None => FormatError::new(1, 1, msg),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), FormatError> {
        match self.next() {
            Some(Spanned {
                tok: Tok::Punct(p), ..
            }) if p == c => Ok(()),
            Some(t) => Err(FormatError::new(
                t.line,
                t.col,
                format!("expected '{c}', found {}", describe(&t.tok)),
            )),
            None => Err(self.err_here(format!("expected '{c}' before end of file"))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize, usize), FormatError> {
        match self.next() {
            Some(Spanned {
                tok: Tok::Ident(s),
                line,
                col,
            }) => Ok((s, line, col)),
            Some(t) => Err(FormatError::new(
                t.line,
                t.col,
                format!("expected {what}, found {}", describe(&t.tok)),
            )),
            None => Err(self.err_here(format!("expected {what} before end of file"))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("\"{s}\""),
        Tok::Str(_) => "a quoted string".to_string(),
        Tok::Arrow(_) => "an edge arrow".to_string(),
        Tok::Punct(c) => format!("'{c}'"),
    }
}

/// One `key = value... ;` entry, values left raw for the block builder.
struct Entry {
    key: String,
    line: usize,
    col: usize,
    values: Vec<Spanned>,
}

fn parse_entries(p: &mut Parser) -> Result<Vec<Entry>, FormatError> {
    let mut entries = Vec::new();
    loop {
        match p.peek() {
            Some(Spanned {
                tok: Tok::Punct('}'),
                ..
            }) => {
                p.next();
                return Ok(entries);
            }
            Some(_) => {
                let (key, line, col) = p.expect_ident("an entry name")?;
                let mut values = Vec::new();
                if key != "rule" {
                    p.expect_punct('=')?;
                }
                loop {
                    match p.peek() {
                        Some(Spanned {
                            tok: Tok::Punct(';'),
                            ..
                        }) => {
                            p.next();
                            break;
                        }
                        Some(Spanned {
                            tok: Tok::Punct(c), ..
                        }) if *c == '{' || *c == '}' || *c == '=' => {
                            return Err(p.err_here("missing ';' before this token"))
                        }
                        Some(_) => values.push(p.next().expect("peeked")),
                        None => return Err(p.err_here("missing ';' before end of file")),
                    }
                }
                entries.push(Entry {
                    key,
                    line,
                    col,
                    values,
                });
            }
            None => return Err(p.err_here("missing '}' before end of file")),
        }
    }
}

fn entry_alphabet(e: &Entry) -> Result<Alphabet, FormatError> {
    let mut names = Vec::new();
    for v in &e.values {
        match &v.tok {
            Tok::Ident(s) => names.push(s.clone()),
            _ => {
                return Err(FormatError::new(
                    v.line,
                    v.col,
                    "alphabet entries are bare symbol names",
                ))
            }
        }
    }
    Alphabet::new(names).map_err(|err| FormatError::new(e.line, e.col, err.to_string()))
}

fn entry_strings(e: &Entry) -> Result<Vec<(String, usize, usize)>, FormatError> {
    let mut out = Vec::new();
    for v in &e.values {
        match &v.tok {
            Tok::Str(s) => out.push((s.clone(), v.line, v.col)),
            _ => {
                return Err(FormatError::new(
                    v.line,
                    v.col,
                    format!("expected a quoted string, found {}", describe(&v.tok)),
                ))
            }
        }
    }
    Ok(out)
}

fn entry_usize(e: &Entry) -> Result<usize, FormatError> {
    match e.values.as_slice() {
        [Spanned {
            tok: Tok::Ident(s),
            line,
            col,
        }] => s
            .parse()
            .map_err(|_| FormatError::new(*line, *col, format!("\"{s}\" is not a number"))),
        _ => Err(FormatError::new(
            e.line,
            e.col,
            format!("{} takes a single number", e.key),
        )),
    }
}

fn build_shift(name: &str, entries: &[Entry], line: usize, col: usize) -> Result<ShiftPresentation, FormatError> {
    let mut alphabet = None;
    let mut sided = Sidedness::TwoSided;
    let mut forbid: Option<&Entry> = None;
    let mut regex: Option<&Entry> = None;
    let mut graph: Option<&Entry> = None;
    for e in entries {
        match e.key.as_str() {
            "alphabet" => alphabet = Some(entry_alphabet(e)?),
            "sided" => {
                sided = match e.values.as_slice() {
                    [Spanned {
                        tok: Tok::Ident(s), ..
                    }] if s == "two" => Sidedness::TwoSided,
                    [Spanned {
                        tok: Tok::Ident(s), ..
                    }] if s == "one" => Sidedness::OneSided,
                    _ => return Err(FormatError::new(e.line, e.col, "sided is 'two' or 'one'")),
                }
            }
            "forbid" => forbid = Some(e),
            "regex" => regex = Some(e),
            "graph" => graph = Some(e),
            other => {
                return Err(FormatError::new(
                    e.line,
                    e.col,
                    format!("unknown shift entry \"{other}\""),
                ))
            }
        }
    }
    let alphabet = alphabet
        .ok_or_else(|| FormatError::new(line, col, format!("shift {name} needs an alphabet")))?;
    let sources = [forbid.is_some(), regex.is_some(), graph.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if sources != 1 {
        return Err(FormatError::new(
            line,
            col,
            format!("shift {name} needs exactly one of forbid, regex, graph"),
        ));
    }
    let lift = |err: PresentationError| FormatError::new(line, col, err.to_string());
    if let Some(e) = forbid {
        let mut words = Vec::new();
        for (text, l, c) in entry_strings(e)? {
            words.push(
                Word::parse(&alphabet, &text)
                    .map_err(|err| FormatError::new(l, c, err.to_string()))?,
            );
        }
        return ShiftPresentation::from_forbidden(name, &alphabet, &words, sided).map_err(lift);
    }
    if let Some(e) = regex {
        let strings = entry_strings(e)?;
        let [(expr, l, c)] = strings.as_slice() else {
            return Err(FormatError::new(
                e.line,
                e.col,
                "regex takes a single quoted expression",
            ));
        };
        return ShiftPresentation::from_regex(name, &alphabet, expr, sided)
            .map_err(|err| FormatError::new(*l, *c, err.to_string()));
    }
    let e = graph.expect("one source");
    let mut g = crate::graph::LabeledGraph::new(alphabet.clone());
    let find = |g: &mut crate::graph::LabeledGraph, n: &str| match g.find_state(n) {
        Some(i) => i,
        None => g.add_state(n),
    };
    let mut i = 0;
    while i < e.values.len() {
        let from = match &e.values[i].tok {
            Tok::Ident(s) => s.clone(),
            _ => {
                return Err(FormatError::new(
                    e.values[i].line,
                    e.values[i].col,
                    "expected a state name",
                ))
            }
        };
        let Some(arrow) = e.values.get(i + 1) else {
            return Err(FormatError::new(
                e.values[i].line,
                e.values[i].col,
                "dangling state without an edge",
            ));
        };
        let Tok::Arrow(label) = &arrow.tok else {
            return Err(FormatError::new(
                arrow.line,
                arrow.col,
                "expected an edge arrow like -a->",
            ));
        };
        let Some(to_tok) = e.values.get(i + 2) else {
            return Err(FormatError::new(arrow.line, arrow.col, "edge without a target state"));
        };
        let Tok::Ident(to) = &to_tok.tok else {
            return Err(FormatError::new(to_tok.line, to_tok.col, "expected a state name"));
        };
        let sym = alphabet.id_of(label).ok_or_else(|| {
            FormatError::new(
                arrow.line,
                arrow.col,
                format!("\"{label}\" is not an alphabet symbol"),
            )
        })?;
        let fi = find(&mut g, &from);
        let ti = find(&mut g, to);
        g.add_edge(fi, sym, ti);
        i += 3;
    }
    ShiftPresentation::from_graph(name, g, sided).map_err(lift)
}

fn build_code(name: &str, entries: &[Entry], line: usize, col: usize) -> Result<SlidingBlockCode, FormatError> {
    let mut domain = None;
    let mut codomain = None;
    let mut memory = 0;
    let mut anticipation = 0;
    let mut rules: Vec<&Entry> = Vec::new();
    for e in entries {
        match e.key.as_str() {
            "alphabet" => domain = Some(entry_alphabet(e)?),
            "codomain" => codomain = Some(entry_alphabet(e)?),
            "memory" => memory = entry_usize(e)?,
            "anticipation" => anticipation = entry_usize(e)?,
            "rule" => rules.push(e),
            other => {
                return Err(FormatError::new(
                    e.line,
                    e.col,
                    format!("unknown code entry \"{other}\""),
                ))
            }
        }
    }
    let domain = domain
        .ok_or_else(|| FormatError::new(line, col, format!("code {name} needs an alphabet")))?;
    let codomain = codomain.unwrap_or_else(|| domain.clone());
    let mut code = SlidingBlockCode::new(name, domain.clone(), codomain.clone(), memory, anticipation);
    let window_len = memory + anticipation + 1;
    for e in rules {
        let (window, output) = match e.values.as_slice() {
            [Spanned {
                tok: Tok::Str(w),
                line: wl,
                col: wc,
            }, Spanned {
                tok: Tok::Arrow(a), ..
            }, Spanned {
                tok: Tok::Ident(out),
                line: ol,
                col: oc,
            }] if a.is_empty() => {
                let word = Word::parse(&domain, w)
                    .map_err(|err| FormatError::new(*wl, *wc, err.to_string()))?;
                if word.len() != window_len {
                    return Err(FormatError::new(
                        *wl,
                        *wc,
                        format!("rule window \"{w}\" must have length {window_len}"),
                    ));
                }
                let sym = codomain.id_of(out).ok_or_else(|| {
                    FormatError::new(*ol, *oc, format!("\"{out}\" is not a codomain symbol"))
                })?;
                (word, sym)
            }
            _ => {
                return Err(FormatError::new(
                    e.line,
                    e.col,
                    "rule lines look like: rule \"abc\" -> d;",
                ))
            }
        };
        code.add_rule(&window, output)
            .map_err(|err| FormatError::new(e.line, e.col, err.to_string()))?;
    }
    Ok(code)
}

/// Parses a whole definition file.
pub fn parse_document(text: &str) -> Result<Document, FormatError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let mut doc = Document::default();
    while p.peek().is_some() {
        let (kind, line, col) = p.expect_ident("\"shift\" or \"code\"")?;
        let (name, ..) = p.expect_ident("a name")?;
        p.expect_punct('{')?;
        let entries = parse_entries(&mut p)?;
        match kind.as_str() {
            "shift" => doc.shifts.push(build_shift(&name, &entries, line, col)?),
            "code" => doc.codes.push(build_code(&name, &entries, line, col)?),
            other => {
                return Err(FormatError::new(
                    line,
                    col,
                    format!("expected \"shift\" or \"code\", found \"{other}\""),
                ))
            }
        }
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forbidden_word_shift() {
        let doc = parse_document(
            "shift golden {\n  alphabet = 0 1;\n  forbid = \"11\";\n  sided = two;\n}\n",
        )
        .unwrap();
        let s = doc.shift(None).unwrap();
        assert_eq!(s.name(), "golden");
        let w = Word::parse(s.alphabet(), "0110").unwrap();
        assert!(!s.word_in_language(&w).unwrap());
    }

    #[test]
    fn parses_regex_and_graph_shifts() {
        let doc = parse_document(concat!(
            "# the even shift two ways\n",
            "shift even { alphabet = 0 1; regex = \"(1(00)*)*\"; }\n",
            "shift even_graph { alphabet = 0 1; graph = q -1-> q q -0-> r r -0-> q; }\n",
        ))
        .unwrap();
        assert_eq!(doc.shifts.len(), 2);
        let by_regex = doc.shift(Some("even")).unwrap();
        let by_graph = doc.shift(Some("even_graph")).unwrap();
        for text in ["1001", "101", "1000011"] {
            let w = Word::parse(by_regex.alphabet(), text).unwrap();
            assert_eq!(
                by_regex.word_in_language(&w).unwrap(),
                by_graph.word_in_language(&w).unwrap(),
                "{text}"
            );
        }
    }

    #[test]
    fn parses_code_with_rules() {
        let doc = parse_document(concat!(
            "code swap {\n",
            "  alphabet = 0 1;\n",
            "  memory = 0; anticipation = 0;\n",
            "  rule \"0\" -> 1;\n",
            "  rule \"1\" -> 0;\n",
            "}\n",
        ))
        .unwrap();
        let c = doc.code(Some("swap")).unwrap();
        assert_eq!(c.lookup(&[0]), Some(1));
        assert_eq!(c.lookup(&[1]), Some(0));
    }

    #[test]
    fn empty_forbid_gives_full_shift() {
        let doc = parse_document("shift full { alphabet = a b; forbid = ; }").unwrap();
        let s = doc.shift(None).unwrap();
        let w = Word::parse(s.alphabet(), "abba").unwrap();
        assert!(s.word_in_language(&w).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_document("shift s {\n  alphabet = 0 1;\n  forbid = \"12\";\n}").unwrap_err();
        assert_eq!((err.line, err.col), (3, 12));

        let err = parse_document("shift s {\n  alphabet = 0 1\n  forbid = \"1\";\n}").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.msg.contains("';'"), "{}", err.msg);

        let err = parse_document(
            "shift s { alphabet = 0 1; forbid = \"11\"; regex = \"0*\"; }",
        )
        .unwrap_err();
        assert!(err.msg.contains("exactly one"), "{}", err.msg);

        let err = parse_document("code c { alphabet = 0 1; rule \"01\" -> 0; }").unwrap_err();
        assert!(err.msg.contains("length 1"), "{}", err.msg);
    }
}

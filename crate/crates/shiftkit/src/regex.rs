//! Regular expressions over an alphabet, compiled into labeled graphs whose
//! bi-infinite walks spell arbitrary concatenations of expression matches.
//!
//! Grammar: union binds loosest (`+` or `|`), then concatenation, then `*`.
//! Symbols are matched longest-first, so multi-character symbol names work
//! without separators only when unambiguous; whitespace always separates.
//!
//! Compilation builds a Thompson automaton, merges its accept state into its
//! start state (so matches can repeat forever in both directions), and then
//! removes epsilon edges. Walks that eventually avoid the start state stay in
//! some sub-loop of the expression; their labels are limits of concatenations,
//! which is exactly what the closed shift needs.

use thiserror::Error;

use crate::alphabet::{Alphabet, SymbolId};
use crate::graph::LabeledGraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegexError {
    #[error("syntax error at byte {at}: {msg}")]
    Syntax { msg: String, at: usize },
    #[error("unknown symbol at byte {at} in \"{text}\"")]
    UnknownSymbol { text: String, at: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Symbol(SymbolId),
    LParen,
    RParen,
    Star,
    Union,
}

fn tokenize(alphabet: &Alphabet, text: &str) -> Result<Vec<(Tok, usize)>, RegexError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            '+' | '|' => {
                toks.push((Tok::Union, i));
                i += 1;
            }
            _ => {
                // longest symbol name starting here
                let rest = &text[i..];
                let mut best: Option<(SymbolId, usize)> = None;
                for id in alphabet.ids() {
                    let name = alphabet.symbol(id);
                    if rest.starts_with(name)
                        && best.is_none_or(|(_, l)| name.len() > l)
                    {
                        best = Some((id, name.len()));
                    }
                }
                match best {
                    Some((id, len)) => {
                        toks.push((Tok::Symbol(id), i));
                        i += len;
                    }
                    None => {
                        return Err(RegexError::UnknownSymbol {
                            text: text.to_string(),
                            at: i,
                        })
                    }
                }
            }
        }
    }
    Ok(toks)
}

/// Thompson automaton under construction. Edge label `None` is epsilon.
struct Nfa {
    edges: Vec<Vec<(Option<SymbolId>, usize)>>,
}

impl Nfa {
    fn state(&mut self) -> usize {
        self.edges.push(Vec::new());
        self.edges.len() - 1
    }

    fn edge(&mut self, from: usize, label: Option<SymbolId>, to: usize) {
        self.edges[from].push((label, to));
    }
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    nfa: Nfa,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|&(t, _)| t)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(_, at)| at)
    }

    /// expr := term ( ('+' | '|') term )*
    fn expr(&mut self) -> Result<(usize, usize), RegexError> {
        let (mut s, mut f) = self.term()?;
        while self.peek() == Some(Tok::Union) {
            self.pos += 1;
            let (s2, f2) = self.term()?;
            let ns = self.nfa.state();
            let nf = self.nfa.state();
            self.nfa.edge(ns, None, s);
            self.nfa.edge(ns, None, s2);
            self.nfa.edge(f, None, nf);
            self.nfa.edge(f2, None, nf);
            s = ns;
            f = nf;
        }
        Ok((s, f))
    }

    /// term := factor*  (empty term matches the empty word)
    fn term(&mut self) -> Result<(usize, usize), RegexError> {
        let mut frag: Option<(usize, usize)> = None;
        while let Some(Tok::Symbol(_) | Tok::LParen) = self.peek() {
            let (s2, f2) = self.factor()?;
            frag = Some(match frag {
                None => (s2, f2),
                Some((s, f)) => {
                    self.nfa.edge(f, None, s2);
                    (s, f2)
                }
            });
        }
        Ok(frag.unwrap_or_else(|| {
            let s = self.nfa.state();
            (s, s)
        }))
    }

    /// factor := atom '*'*
    fn factor(&mut self) -> Result<(usize, usize), RegexError> {
        let (mut s, mut f) = self.atom()?;
        while self.peek() == Some(Tok::Star) {
            self.pos += 1;
            // hub state: zero or more passes through the fragment
            let hub = self.nfa.state();
            self.nfa.edge(hub, None, s);
            self.nfa.edge(f, None, hub);
            s = hub;
            f = hub;
        }
        Ok((s, f))
    }

    fn atom(&mut self) -> Result<(usize, usize), RegexError> {
        match self.peek() {
            Some(Tok::Symbol(id)) => {
                self.pos += 1;
                let s = self.nfa.state();
                let f = self.nfa.state();
                self.nfa.edge(s, Some(id), f);
                Ok((s, f))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let frag = self.expr()?;
                if self.peek() != Some(Tok::RParen) {
                    return Err(RegexError::Syntax {
                        msg: "expected ')'".into(),
                        at: self.at(),
                    });
                }
                self.pos += 1;
                Ok(frag)
            }
            _ => Err(RegexError::Syntax {
                msg: "expected a symbol or '('".into(),
                at: self.at(),
            }),
        }
    }
}

/// Compiles `text` into a labeled graph presenting the closure of all
/// bi-infinite concatenations of words matching the expression.
pub fn compile_cyclic(alphabet: &Alphabet, text: &str) -> Result<LabeledGraph, RegexError> {
    let toks = tokenize(alphabet, text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        nfa: Nfa { edges: Vec::new() },
        end: text.len(),
    };
    let (start, accept) = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(RegexError::Syntax {
            msg: "unexpected token".into(),
            at: p.at(),
        });
    }
    let mut nfa = p.nfa;

    // close the loop: matching can restart immediately after accepting
    if accept != start {
        nfa.edge(accept, None, start);
    }

    // epsilon closures
    let n = nfa.edges.len();
    let mut closure: Vec<Vec<usize>> = Vec::with_capacity(n);
    for q in 0..n {
        let mut seen = vec![false; n];
        let mut stack = vec![q];
        seen[q] = true;
        while let Some(u) = stack.pop() {
            for &(l, v) in &nfa.edges[u] {
                if l.is_none() && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        closure.push((0..n).filter(|&v| seen[v]).collect());
    }

    let mut g = LabeledGraph::new(alphabet.clone());
    for q in 0..n {
        g.add_state(format!("n{q}"));
    }
    for (q, cls) in closure.iter().enumerate() {
        for &u in cls {
            for &(l, v) in &nfa.edges[u] {
                if let Some(a) = l {
                    g.add_edge(q, a, v);
                }
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::StateSet;

    fn spells(g: &LabeledGraph, w: &[SymbolId]) -> bool {
        // w occurs on some path lying on a bi-infinite walk
        let (t, _) = g.trimmed();
        if t.state_count() == 0 {
            return false;
        }
        !t.step_word(&StateSet::full(t.state_count()), w).is_empty()
    }

    #[test]
    fn even_runs_of_zero() {
        let a = Alphabet::digits(2);
        let g = compile_cyclic(&a, "(1(00)*)*").unwrap();
        assert!(spells(&g, &[1, 0, 0, 1]));
        assert!(spells(&g, &[1, 1]));
        assert!(spells(&g, &[0, 0, 0, 0]));
        assert!(!spells(&g, &[1, 0, 1]));
        assert!(!spells(&g, &[1, 0, 0, 0, 1]));
    }

    #[test]
    fn union_both_spellings() {
        let a = Alphabet::digits(3);
        let g = compile_cyclic(&a, "(0+12)*").unwrap();
        assert!(spells(&g, &[0, 1, 2, 0]));
        assert!(spells(&g, &[1, 2, 1, 2]));
        assert!(!spells(&g, &[1, 1]));
        assert!(!spells(&g, &[2, 1, 2, 2]));
    }

    #[test]
    fn pipe_is_union_too() {
        let a = Alphabet::digits(2);
        let g1 = compile_cyclic(&a, "(0|1)*").unwrap();
        assert!(spells(&g1, &[0, 1, 1, 0]));
    }

    #[test]
    fn nested_stars_limit_points() {
        let a = Alphabet::digits(4);
        let g = compile_cyclic(&a, "((0*+1*)2(0*+1*)3)*").unwrap();
        assert!(spells(&g, &[2, 3]));
        assert!(spells(&g, &[0, 0, 2, 1, 1, 3, 0]));
        assert!(spells(&g, &[0, 0, 0, 0, 0])); // limit of long runs
        assert!(!spells(&g, &[0, 1])); // runs are pure between markers
        assert!(!spells(&g, &[2, 0, 2])); // markers alternate
        assert!(!spells(&g, &[3, 1, 3]));
        assert!(spells(&g, &[3, 1, 2]));
    }

    #[test]
    fn syntax_errors_have_positions() {
        let a = Alphabet::digits(2);
        assert!(matches!(
            compile_cyclic(&a, "(01"),
            Err(RegexError::Syntax { at: 3, .. })
        ));
        assert!(matches!(
            compile_cyclic(&a, "0)"),
            Err(RegexError::Syntax { at: 1, .. })
        ));
        assert!(matches!(
            compile_cyclic(&a, "02"),
            Err(RegexError::UnknownSymbol { at: 1, .. })
        ));
        assert!(matches!(
            compile_cyclic(&a, "*0"),
            Err(RegexError::Syntax { at: 0, .. })
        ));
    }

    #[test]
    fn empty_expression_is_empty_shift() {
        let a = Alphabet::digits(2);
        let g = compile_cyclic(&a, "").unwrap();
        let (t, _) = g.trimmed();
        assert_eq!(t.state_count(), 0);
    }
}

//! Finite alphabets with interned symbol names.
//!
//! Symbols are identified by dense indices (`SymbolId`) so words can be
//! `Vec<SymbolId>` and per-symbol tables can be plain vectors. The alphabet
//! itself is a cheap handle: clones share the interned name table.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Index of a symbol within its alphabet.
pub type SymbolId = usize;

#[derive(Debug, Error)]
pub enum AlphabetError {
    #[error("alphabet must contain at least one symbol")]
    Empty,
    #[error("symbol {0:?} is not a valid name (alphanumeric and '_' only)")]
    BadSymbol(String),
    #[error("symbol {0:?} listed twice")]
    Duplicate(String),
    #[error("no symbol of {alphabet} matches input at byte {at}: {rest:?}")]
    UnknownSymbol {
        alphabet: String,
        at: usize,
        rest: String,
    },
}

#[derive(Debug)]
struct Inner {
    symbols: Vec<String>,
    index: HashMap<String, SymbolId>,
    // true when every symbol is a single character, so words render glued
    single_char: bool,
}

/// An ordered finite set of named symbols.
#[derive(Clone, Debug)]
pub struct Alphabet {
    inner: Arc<Inner>,
}

impl Alphabet {
    /// Builds an alphabet from symbol names, in the given order.
    ///
    /// Names must be nonempty, consist of alphanumeric characters or `_`,
    /// and be pairwise distinct.
    pub fn new<I, S>(symbols: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(AlphabetError::Empty);
        }
        let mut index = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || !s.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(AlphabetError::BadSymbol(s.clone()));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(AlphabetError::Duplicate(s.clone()));
            }
        }
        let single_char = symbols.iter().all(|s| s.chars().count() == 1);
        Ok(Alphabet {
            inner: Arc::new(Inner {
                symbols,
                index,
                single_char,
            }),
        })
    }

    /// The alphabet `{0, 1, ..., n-1}` of decimal digit symbols.
    pub fn digits(n: usize) -> Self {
        assert!((1..=10).contains(&n), "digit alphabets support 1..=10 symbols");
        Alphabet::new((0..n).map(|d| d.to_string())).unwrap()
    }

    pub fn len(&self) -> usize {
        self.inner.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbol(&self, id: SymbolId) -> &str {
        &self.inner.symbols[id]
    }

    pub fn id_of(&self, name: &str) -> Option<SymbolId> {
        self.inner.index.get(name).copied()
    }

    pub fn ids(&self) -> std::ops::Range<SymbolId> {
        0..self.len()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.inner.symbols.iter().map(String::as_str)
    }

    /// True when every symbol is one character, so words print without
    /// separators.
    pub fn single_char(&self) -> bool {
        self.inner.single_char
    }

    /// Scans `input` into symbol ids, skipping whitespace, choosing the
    /// longest symbol name that matches at each position.
    pub fn tokenize(&self, input: &str) -> Result<Vec<SymbolId>, AlphabetError> {
        let mut out = Vec::new();
        let bytes = input.as_bytes();
        let mut at = 0;
        while at < bytes.len() {
            if bytes[at].is_ascii_whitespace() {
                at += 1;
                continue;
            }
            let rest = &input[at..];
            let mut best: Option<(usize, SymbolId)> = None;
            for (id, name) in self.inner.symbols.iter().enumerate() {
                if rest.starts_with(name.as_str())
                    && best.is_none_or(|(len, _)| name.len() > len)
                {
                    best = Some((name.len(), id));
                }
            }
            match best {
                Some((len, id)) => {
                    out.push(id);
                    at += len;
                }
                None => {
                    return Err(AlphabetError::UnknownSymbol {
                        alphabet: self.to_string(),
                        at,
                        rest: rest.chars().take(8).collect(),
                    })
                }
            }
        }
        Ok(out)
    }

    /// Renders a symbol sequence using this alphabet's conventions.
    pub fn render(&self, symbols: &[SymbolId]) -> String {
        let sep = if self.single_char() { "" } else { " " };
        symbols
            .iter()
            .map(|&s| self.symbol(s))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.symbols == other.inner.symbols
    }
}

impl Eq for Alphabet {}

impl std::hash::Hash for Alphabet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.inner.symbols.hash(state);
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.inner.symbols.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_and_indexes() {
        let a = Alphabet::new(["0", "1", "2"]).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a.symbol(1), "1");
        assert_eq!(a.id_of("2"), Some(2));
        assert_eq!(a.id_of("3"), None);
        assert!(a.single_char());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a b"]).is_err());
        assert!(Alphabet::new([""]).is_err());
    }

    #[test]
    fn tokenize_prefers_longest_match() {
        let a = Alphabet::new(["a", "ab", "b"]).unwrap();
        assert_eq!(a.tokenize("ab a b").unwrap(), vec![1, 0, 2]);
        assert_eq!(a.tokenize("aba").unwrap(), vec![1, 0]);
        assert!(a.tokenize("abc").is_err());
    }

    #[test]
    fn tokenize_glued_digits() {
        let a = Alphabet::digits(2);
        assert_eq!(a.tokenize("0110").unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(a.tokenize(" 0 1\t1").unwrap(), vec![0, 1, 1]);
        assert_eq!(a.render(&[0, 1, 1, 0]), "0110");
    }

    #[test]
    fn equality_is_structural() {
        let a = Alphabet::new(["x", "y"]).unwrap();
        let b = Alphabet::new(["x", "y"]).unwrap();
        let c = Alphabet::new(["y", "x"]).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.clone(), a);
    }

    #[test]
    fn multichar_rendering_uses_spaces() {
        let a = Alphabet::new(["s0", "s1"]).unwrap();
        assert!(!a.single_char());
        assert_eq!(a.render(&[0, 1, 0]), "s0 s1 s0");
        assert_eq!(a.tokenize("s0 s1s0").unwrap(), vec![0, 1, 0]);
    }
}

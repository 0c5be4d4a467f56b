use std::fmt;

use super::FormulaError;

/// Placeholder name standing for the latent two-level grouping factor.
pub const GROUP: &str = "group";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Main(String),
    Interaction(String, String),
}

impl Term {
    pub fn vars(&self) -> Vec<&str> {
        match self {
            Term::Main(a) => vec![a],
            Term::Interaction(a, b) => vec![a, b],
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Term::Main(_) => 1,
            Term::Interaction(..) => 2,
        }
    }

    /// Order-free identity: `a:b` and `b:a` share a key.
    fn key(&self) -> Vec<&str> {
        let mut v = self.vars();
        v.sort_unstable();
        v
    }

    pub fn same_as(&self, other: &Term) -> bool {
        self.key() == other.key()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Main(a) => write!(f, "{a}"),
            Term::Interaction(a, b) => write!(f, "{a}:{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermList {
    pub response: String,
    pub intercept: bool,
    /// Main effects first, then interactions, each in order of appearance.
    pub terms: Vec<Term>,
    pub uses_group: bool,
}

impl TermList {
    pub fn contains(&self, t: &Term) -> bool {
        self.terms.iter().any(|x| x.same_as(t))
    }

    /// Same response and the same set of terms, regardless of order.
    pub fn same_structure(&self, other: &TermList) -> bool {
        self.response == other.response
            && self.terms.len() == other.terms.len()
            && self.terms.iter().all(|t| other.contains(t))
    }

    pub fn variables(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for t in &self.terms {
            for v in t.vars() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }
}

impl fmt::Display for TermList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}~", self.response)?;
        if self.terms.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.terms.iter().map(Term::to_string).collect();
        write!(f, "{}", parts.join("+"))
    }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '.' || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '.' || c == '_')
}

/// Parses `resp ~ rhs` where `rhs` is `1` or `+`-separated terms of the forms
/// `a`, `a:b` and `a*b` (the last expands to `a + b + a:b`).
pub fn parse_formula(text: &str) -> Result<TermList, FormulaError> {
    let fail = |reason: &str| FormulaError::ParseFailure { text: text.to_string(), reason: reason.to_string() };
    let (lhs, rhs) = text.split_once('~').ok_or_else(|| fail("missing '~'"))?;
    let response = lhs.trim();
    if !is_name(response) {
        return Err(fail("response must be a single column name"));
    }
    if response == GROUP {
        return Err(fail("`group` cannot be the response"));
    }
    let rhs = rhs.trim();
    if rhs.is_empty() {
        return Err(fail("empty right-hand side"));
    }

    let mut raw: Vec<Term> = Vec::new();
    if rhs != "1" {
        for piece in rhs.split('+') {
            let piece = piece.trim();
            let (names, star) = if piece.contains('*') {
                (piece.split('*').map(str::trim).collect::<Vec<_>>(), true)
            } else {
                (piece.split(':').map(str::trim).collect::<Vec<_>>(), false)
            };
            if names.iter().any(|n| !is_name(n)) {
                return Err(fail(&format!("invalid term '{piece}'")));
            }
            if piece.contains('*') && piece.contains(':') {
                return Err(fail(&format!("cannot mix '*' and ':' in '{piece}'")));
            }
            if names.contains(&response) {
                return Err(fail("the response cannot appear on the right-hand side"));
            }
            match names.as_slice() {
                [a] => raw.push(Term::Main(a.to_string())),
                [a, b] if a == b => return Err(fail(&format!("'{piece}' interacts a variable with itself"))),
                [a, b] => {
                    if star {
                        raw.push(Term::Main(a.to_string()));
                        raw.push(Term::Main(b.to_string()));
                    }
                    raw.push(Term::Interaction(a.to_string(), b.to_string()));
                }
                _ => return Err(fail(&format!("only two-way interactions are supported: '{piece}'"))),
            }
        }
    }

    let mut terms: Vec<Term> = Vec::new();
    for degree in [1, 2] {
        for t in raw.iter().filter(|t| t.degree() == degree) {
            if !terms.iter().any(|x| x.same_as(t)) {
                terms.push(t.clone());
            }
        }
    }
    let uses_group = terms.iter().any(|t| t.vars().contains(&GROUP));
    Ok(TermList { response: response.to_string(), intercept: true, terms, uses_group })
}

//! Line-oriented program parser.
//!
//! ```text
//! rule := atom ":-" atom ("," atom)* "."?
//! decl := ".decl" name "/" arity (".edb" | ".idb")?
//! ```
//!
//! `%` starts a comment running to the end of the line.

use std::collections::{BTreeMap, BTreeSet};

use super::{Atom, Decl, FrontendError, Program, RelKind, Rule, Term};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    LParen,
    RParen,
    Comma,
    Turnstile,
    Dot,
    Slash,
}

fn lex(line: &str, lineno: usize) -> Result<Vec<Tok>, FrontendError> {
    let err = |msg: String| FrontendError::SyntaxError { line: lineno, msg };
    let mut out = Vec::new();
    let b = line.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        match c {
            b' ' | b'\t' | b'\r' => i += 1,
            b'(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            b')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            b',' => {
                out.push(Tok::Comma);
                i += 1;
            }
            b'.' => {
                out.push(Tok::Dot);
                i += 1;
            }
            b'/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            b':' => {
                if b.get(i + 1) == Some(&b'-') {
                    out.push(Tok::Turnstile);
                    i += 2;
                } else {
                    return Err(err("expected ':-'".into()));
                }
            }
            b'0'..=b'9' => {
                let start = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Tok::Num(line[start..i].to_string()));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                out.push(Tok::Ident(line[start..i].to_string()));
            }
            _ => {
                let ch = line[i..].chars().next().unwrap_or('?');
                return Err(err(format!("unexpected character {ch:?}")));
            }
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Tok],
    pos: usize,
    line: usize,
}

impl Cursor<'_> {
    fn err(&self, msg: impl Into<String>) -> FrontendError {
        FrontendError::SyntaxError { line: self.line, msg: msg.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), FrontendError> {
        match self.next() {
            Some(t) if *t == want => Ok(()),
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, FrontendError> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s.clone()),
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn number(&mut self, what: &str) -> Result<u64, FrontendError> {
        match self.next().cloned() {
            Some(Tok::Num(s)) => s.parse::<u64>().map_err(|_| self.err(format!("{s} does not fit in 64 bits"))),
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn atom(&mut self) -> Result<Atom, FrontendError> {
        let relation = self.ident("relation name")?;
        self.expect(Tok::LParen, "'('")?;
        let mut args = Vec::new();
        loop {
            let term = match self.next().cloned() {
                Some(Tok::Ident(v)) => Term::Var(v),
                Some(Tok::Num(s)) => {
                    Term::Const(s.parse::<u64>().map_err(|_| self.err(format!("{s} does not fit in 64 bits")))?)
                }
                _ => return Err(self.err("expected a variable or constant")),
            };
            args.push(term);
            match self.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::RParen) => break,
                _ => return Err(self.err("expected ',' or ')'")),
            }
        }
        Ok(Atom { relation, args })
    }
}

struct Builder {
    decls: BTreeMap<String, Decl>,
    explicit: BTreeSet<String>,
    explicit_kind: BTreeSet<String>,
}

impl Builder {
    fn use_arity(&mut self, name: &str, arity: usize, line: usize) -> Result<(), FrontendError> {
        match self.decls.get(name) {
            Some(d) if d.arity != arity => Err(FrontendError::ArityMismatch {
                line,
                relation: name.to_string(),
                expected: d.arity,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.decls.insert(name.to_string(), Decl { arity, kind: RelKind::Edb });
                Ok(())
            }
        }
    }
}

pub fn parse_program(text: &str) -> Result<Program, FrontendError> {
    let mut b = Builder { decls: BTreeMap::new(), explicit: BTreeSet::new(), explicit_kind: BTreeSet::new() };
    let mut rules: Vec<(Rule, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('%').next().unwrap_or("");
        let toks = lex(content, line)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor { toks: &toks, pos: 0, line };
        if toks[0] == Tok::Dot {
            c.next();
            let kw = c.ident("directive")?;
            if kw != "decl" {
                return Err(c.err(format!("unknown directive .{kw}")));
            }
            let name = c.ident("relation name")?;
            c.expect(Tok::Slash, "'/'")?;
            let arity = c.number("arity")?;
            if arity == 0 {
                return Err(c.err("arity must be positive"));
            }
            let arity = arity as usize;
            let kind = match c.next().cloned() {
                None => None,
                Some(Tok::Dot) => match c.ident("'edb' or 'idb'")?.as_str() {
                    "edb" => Some(RelKind::Edb),
                    "idb" => Some(RelKind::Idb),
                    other => return Err(c.err(format!("unknown relation kind {other}"))),
                },
                Some(_) => return Err(c.err("unexpected token after declaration")),
            };
            if c.peek().is_some() {
                return Err(c.err("unexpected token after declaration"));
            }
            if !b.explicit.insert(name.clone()) {
                return Err(c.err(format!("relation {name} declared twice")));
            }
            b.use_arity(&name, arity, line)?;
            if let Some(k) = kind {
                b.decls.get_mut(&name).expect("just inserted").kind = k;
                b.explicit_kind.insert(name);
            }
            continue;
        }

        let head = c.atom()?;
        c.expect(Tok::Turnstile, "':-'")?;
        let mut body = vec![c.atom()?];
        loop {
            match c.next() {
                Some(Tok::Comma) => body.push(c.atom()?),
                Some(Tok::Dot) => {
                    if c.peek().is_some() {
                        return Err(c.err("text after the end of the rule"));
                    }
                    break;
                }
                None => break,
                Some(_) => return Err(c.err("expected ',' or end of rule")),
            }
        }
        for a in std::iter::once(&head).chain(body.iter()) {
            b.use_arity(&a.relation, a.arity(), line)?;
        }
        for t in &head.args {
            if let Term::Var(v) = t {
                if !body.iter().any(|a| a.args.iter().any(|u| u.var() == Some(v))) {
                    return Err(FrontendError::UnsafeRule { line, var: v.clone() });
                }
            }
        }
        rules.push((Rule { head, body }, line));
    }

    for (r, line) in &rules {
        let name = &r.head.relation;
        if b.explicit_kind.contains(name) {
            if b.decls[name].kind == RelKind::Edb {
                return Err(FrontendError::EdbInHead { line: *line, relation: name.clone() });
            }
        } else {
            b.decls.get_mut(name).expect("head was registered").kind = RelKind::Idb;
        }
    }

    Ok(Program { decls: b.decls, rules: rules.into_iter().map(|(r, _)| r).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reachability_rules() {
        let p = parse_program(
            "Reachable(y) :- Reachable(x), Edges(x,y)\nReachable(y) :- Reachable(x), Edges(y,x).\n",
        )
        .unwrap();
        assert_eq!(p.rules.len(), 2);
        assert_eq!(p.decls["Reachable"], Decl { arity: 1, kind: RelKind::Idb });
        assert_eq!(p.decls["Edges"], Decl { arity: 2, kind: RelKind::Edb });
    }

    #[test]
    fn empty_and_comments() {
        let p = parse_program("% nothing here\n\n   \n").unwrap();
        assert!(p.rules.is_empty());
        assert!(p.decls.is_empty());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_program("a(x) :- b(x, y)\na(x) :- b(x)"), Err(FrontendError::ArityMismatch { line: 2, .. })));
        assert!(matches!(parse_program("a(x, z) :- b(x)"), Err(FrontendError::UnsafeRule { .. })));
        assert!(matches!(
            parse_program(".decl e/1 .edb\ne(x) :- f(x)"),
            Err(FrontendError::EdbInHead { line: 2, .. })
        ));
        assert!(matches!(parse_program("a(x) :- "), Err(FrontendError::SyntaxError { line: 1, .. })));
        assert!(matches!(parse_program("a(x) :- b(99999999999999999999)"), Err(FrontendError::SyntaxError { .. })));
        assert!(matches!(parse_program(".decl e/0"), Err(FrontendError::SyntaxError { .. })));
        assert!(matches!(parse_program("a() :- b(x)"), Err(FrontendError::SyntaxError { .. })));
    }

    #[test]
    fn constants_and_decls() {
        let p = parse_program(".decl out/1 .idb\n.decl e/2\nout(y) :- e(7, y).").unwrap();
        assert_eq!(p.rules[0].body[0].args[0], Term::Const(7));
        assert_eq!(p.decls["e"].kind, RelKind::Edb);
        assert_eq!(p.decls["out"].kind, RelKind::Idb);
    }
}

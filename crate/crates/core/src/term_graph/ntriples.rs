use std::fmt::Write as _;

use super::{Datatype, Graph, Iri, Literal, PrefixMap, Term, TermError, Triple};

/// One triple per line, sorted. The empty graph serializes to the empty string.
pub fn serialize_ntriples(graph: &Graph) -> String {
    let mut out = String::new();
    for t in graph.iter() {
        write_triple(&mut out, t);
    }
    out
}

pub fn write_triple(out: &mut String, t: &Triple) {
    let _ = writeln!(out, "{t}");
}

/// Parse N-Triples, plus `@prefix p: <iri> .` header lines and prefixed names.
///
/// Untyped quoted literals are strings.
pub fn parse_ntriples(text: &str) -> Result<Graph, TermError> {
    let mut graph = Graph::new();
    let mut prefixes = PrefixMap::default();
    for (i, line) in text.lines().enumerate() {
        let mut cur = Cursor { chars: line.char_indices().collect(), pos: 0, line: i + 1 };
        cur.skip_ws();
        if cur.at_end() || cur.peek() == Some('#') {
            continue;
        }
        if cur.peek() == Some('@') {
            let (p, base) = cur.prefix_decl()?;
            prefixes.insert(&p, base.as_str());
            graph.prefixes_mut().insert(&p, base.as_str());
            continue;
        }
        let s = cur.iri_term(&prefixes)?;
        cur.require_ws()?;
        let p = cur.iri_term(&prefixes)?;
        cur.require_ws()?;
        let o = cur.object(&prefixes)?;
        cur.skip_ws();
        cur.expect('.')?;
        cur.skip_ws();
        if !cur.at_end() && cur.peek() != Some('#') {
            return Err(cur.err("unexpected trailing input"));
        }
        graph.insert(Triple::new(s, p, o));
    }
    Ok(graph)
}

struct Cursor {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn err(&self, message: impl Into<String>) -> TermError {
        TermError::Syntax { line: self.line, column: self.pos + 1, message: message.into() }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r')) {
            self.pos += 1;
        }
    }

    fn require_ws(&mut self) -> Result<(), TermError> {
        let start = self.pos;
        self.skip_ws();
        if self.pos == start {
            return Err(self.err("expected whitespace"));
        }
        Ok(())
    }

    fn expect(&mut self, c: char) -> Result<(), TermError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn word(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_whitespace() || matches!(c, '<' | '>' | '"') {
                break;
            }
            s.push(c);
            self.pos += 1;
        }
        s
    }

    fn prefix_decl(&mut self) -> Result<(String, Iri), TermError> {
        let kw = self.word();
        if kw != "@prefix" {
            return Err(self.err(format!("unknown directive `{kw}`")));
        }
        self.require_ws()?;
        let col = self.pos;
        let name = self.word();
        let Some(p) = name.strip_suffix(':').filter(|p| !p.contains(':')) else {
            self.pos = col;
            return Err(self.err("expected prefix name ending in `:`"));
        };
        let p = p.to_string();
        self.skip_ws();
        let base = self.angle_iri()?;
        self.skip_ws();
        self.expect('.')?;
        self.skip_ws();
        if !self.at_end() && self.peek() != Some('#') {
            return Err(self.err("unexpected trailing input"));
        }
        Ok((p, base))
    }

    fn angle_iri(&mut self) -> Result<Iri, TermError> {
        let start = self.pos;
        self.expect('<')?;
        let mut s = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some(c) => s.push(c),
                None => return Err(self.err("unterminated IRI")),
            }
        }
        Iri::new(&s).map_err(|_| {
            let mut e = self.err(format!("invalid IRI `{s}`"));
            if let TermError::Syntax { column, .. } = &mut e {
                *column = start + 1;
            }
            e
        })
    }

    fn iri_term(&mut self, prefixes: &PrefixMap) -> Result<Iri, TermError> {
        match self.peek() {
            Some('<') => self.angle_iri(),
            Some('"') => Err(self.err("literal not allowed in subject or predicate position")),
            Some(_) => {
                let start = self.pos;
                let w = self.word();
                prefixes.expand(&w).map_err(|e| {
                    self.pos = start;
                    self.err(e.to_string())
                })
            }
            None => Err(self.err("unexpected end of line")),
        }
    }

    fn object(&mut self, prefixes: &PrefixMap) -> Result<Term, TermError> {
        if self.peek() != Some('"') {
            return self.iri_term(prefixes).map(Term::Iri);
        }
        let start = self.pos;
        self.pos += 1;
        let mut lex = String::new();
        loop {
            match self.bump() {
                Some('"') => break,
                Some('\\') => lex.push(self.escape()?),
                Some(c) => lex.push(c),
                None => return Err(self.err("unterminated literal")),
            }
        }
        let datatype = if self.peek() == Some('^') {
            self.pos += 1;
            self.expect('^')?;
            let dt_col = self.pos;
            let iri = self.iri_term(prefixes)?;
            Datatype::from_iri(iri.as_str()).ok_or_else(|| {
                self.pos = dt_col;
                self.err(format!("unsupported datatype {iri}"))
            })?
        } else if self.peek() == Some('@') {
            return Err(self.err("language tags are not supported"));
        } else {
            Datatype::String
        };
        Literal::new(&lex, datatype).map(Term::Literal).map_err(|e| {
            self.pos = start;
            self.err(e.to_string())
        })
    }

    fn escape(&mut self) -> Result<char, TermError> {
        match self.bump() {
            Some('"') => Ok('"'),
            Some('\\') => Ok('\\'),
            Some('n') => Ok('\n'),
            Some('r') => Ok('\r'),
            Some('t') => Ok('\t'),
            Some(u @ ('u' | 'U')) => {
                let n = if u == 'u' { 4 } else { 8 };
                let mut hex = String::new();
                for _ in 0..n {
                    hex.push(self.bump().ok_or_else(|| self.err("truncated escape"))?);
                }
                u32::from_str_radix(&hex, 16)
                    .ok()
                    .and_then(char::from_u32)
                    .ok_or_else(|| self.err(format!("invalid escape \\{u}{hex}")))
            }
            _ => Err(self.err("invalid escape")),
        }
    }
}

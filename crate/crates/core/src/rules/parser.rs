use crate::term_graph::{vocab, Datatype, Iri, Literal, PatternTerm, PrefixMap, Term, TriplePattern};

use super::{BodyItem, Builtin, BuiltinCall, Rule, RuleError, RuleSet};

/// Parse a rule file using the default prefix table (`:`, `xsd:`, `geo:`, `rdf:`, `rdfs:`).
pub fn parse_rules(text: &str) -> Result<RuleSet, RuleError> {
    parse_rules_with(text, &PrefixMap::default())
}

/// Parse with a caller-supplied prefix table; `@prefix p: <iri> .` lines extend it.
pub fn parse_rules_with(text: &str, prefixes: &PrefixMap) -> Result<RuleSet, RuleError> {
    let mut s = Scanner { chars: text.chars().collect(), pos: 0, line: 1, col: 1, prefixes: prefixes.clone() };
    let mut rs = RuleSet::default();
    loop {
        s.skip_trivia();
        match s.peek() {
            None => break,
            Some('@') => s.prefix_directive()?,
            Some('[') => {
                let rule = s.rule()?;
                rs.push(rule)?;
            }
            Some(c) => return Err(s.err(format!("expected `[` to start a rule, found `{c}`"))),
        }
    }
    Ok(rs)
}

struct Scanner {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    prefixes: PrefixMap,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':')
}

impl Scanner {
    fn err(&self, message: impl Into<String>) -> RuleError {
        RuleError::Syntax { line: self.line, column: self.col, message: message.into() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<char> {
        self.chars.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while !matches!(self.peek(), None | Some('\n')) {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, c: char) -> Result<(), RuleError> {
        self.skip_trivia();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn name(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek().filter(|&c| is_name_char(c)) {
            out.push(c);
            self.bump();
        }
        out
    }

    fn prefix_directive(&mut self) -> Result<(), RuleError> {
        self.bump();
        let kw = self.name();
        if kw != "prefix" {
            return Err(self.err(format!("unknown directive @{kw}")));
        }
        self.skip_trivia();
        let p = self.name();
        let Some(p) = p.strip_suffix(':') else {
            return Err(self.err("expected prefix name ending in `:`"));
        };
        self.skip_trivia();
        let base = self.angle_iri()?;
        self.expect('.')?;
        self.prefixes.insert(p, base.as_str());
        Ok(())
    }

    fn rule(&mut self) -> Result<Rule, RuleError> {
        self.expect('[')?;
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        let mut name = String::new();
        while let Some(c) = self.peek().filter(|&c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.')) {
            name.push(c);
            self.bump();
        }
        if name.is_empty() {
            return Err(RuleError::Syntax { line, column: col, message: "expected rule name".into() });
        }
        self.expect(':')?;
        let mut body = Vec::new();
        loop {
            self.skip_trivia();
            match (self.peek(), self.peek2()) {
                (Some('-'), Some('>')) => {
                    self.bump();
                    self.bump();
                    break;
                }
                (Some('('), _) => body.push(BodyItem::Pattern(self.pattern()?)),
                (Some(c), _) if c.is_alphabetic() => body.push(BodyItem::Builtin(self.builtin()?)),
                (None, _) => return Err(self.err("unterminated rule")),
                (Some(c), _) => return Err(self.err(format!("unexpected `{c}` in rule body"))),
            }
        }
        let mut head = Vec::new();
        loop {
            self.skip_trivia();
            match self.peek() {
                Some(']') => {
                    self.bump();
                    break;
                }
                Some('(') => head.push(self.pattern()?),
                None => return Err(self.err("unterminated rule")),
                Some(c) => return Err(self.err(format!("unexpected `{c}` in rule head"))),
            }
        }
        if head.is_empty() {
            return Err(self.err("rule head needs at least one pattern"));
        }
        Rule::new(name, body, head)
    }

    fn pattern(&mut self) -> Result<TriplePattern, RuleError> {
        self.expect('(')?;
        let s = self.term(false)?;
        let p = self.term(true)?;
        let o = self.term(false)?;
        self.expect(')')?;
        Ok(TriplePattern::new(s, p, o))
    }

    fn builtin(&mut self) -> Result<BuiltinCall, RuleError> {
        let (line, column) = (self.line, self.col);
        let name = self.name();
        let builtin = Builtin::from_name(&name).ok_or(RuleError::UnknownBuiltin { name, line, column })?;
        self.expect('(')?;
        let mut args = vec![self.term(false)?];
        loop {
            self.skip_trivia();
            match self.peek() {
                Some(',') => {
                    self.bump();
                    args.push(self.term(false)?);
                }
                Some(')') => {
                    self.bump();
                    break;
                }
                _ => return Err(self.err("expected `,` or `)`")),
            }
        }
        BuiltinCall::new(builtin, args)
    }

    fn angle_iri(&mut self) -> Result<Iri, RuleError> {
        let (line, column) = (self.line, self.col);
        self.expect('<')?;
        let mut s = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\n') | None => return Err(self.err("unterminated IRI")),
                Some(c) => s.push(c),
            }
        }
        Iri::new(&s).map_err(|e| RuleError::Syntax { line, column, message: e.to_string() })
    }

    fn prefixed(&mut self, predicate_position: bool) -> Result<Iri, RuleError> {
        let (line, column) = (self.line, self.col);
        let mut w = self.name();
        while w.ends_with('.') {
            // a trailing dot belongs to punctuation, not the name
            w.pop();
            self.pos -= 1;
            self.col -= 1;
        }
        if w.is_empty() {
            return Err(self.err("expected a term"));
        }
        if predicate_position && (w == "type" || w == "a") {
            return Ok(vocab::rdf_type());
        }
        self.prefixes.expand(&w).map_err(|e| RuleError::Syntax { line, column, message: e.to_string() })
    }

    fn term(&mut self, predicate_position: bool) -> Result<PatternTerm, RuleError> {
        self.skip_trivia();
        let (line, column) = (self.line, self.col);
        match self.peek() {
            Some('?') => {
                self.bump();
                let v = self.name();
                if v.is_empty() || v.contains(':') {
                    return Err(RuleError::Syntax { line, column, message: "invalid variable name".into() });
                }
                Ok(PatternTerm::Var(v))
            }
            Some('<') => Ok(PatternTerm::Term(Term::Iri(self.angle_iri()?))),
            Some('"') => self.string_literal().map(|l| PatternTerm::Term(Term::Literal(l))),
            Some(c) if c.is_ascii_digit() || ((c == '-' || c == '+') && self.peek2().is_some_and(|d| d.is_ascii_digit() || d == '.')) => {
                let mut num = String::new();
                while let Some(c) = self.peek().filter(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')) {
                    num.push(c);
                    self.bump();
                }
                let dt = if num.contains(['.', 'e', 'E']) { Datatype::Double } else { Datatype::Integer };
                Literal::new(&num, dt)
                    .map(|l| PatternTerm::Term(Term::Literal(l)))
                    .map_err(|e| RuleError::Syntax { line, column, message: e.to_string() })
            }
            Some(_) => Ok(PatternTerm::Term(Term::Iri(self.prefixed(predicate_position)?))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn string_literal(&mut self) -> Result<Literal, RuleError> {
        let (line, column) = (self.line, self.col);
        self.bump();
        let mut lex = String::new();
        loop {
            match self.bump() {
                Some('"') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('r') => '\r',
                        Some('"') => '"',
                        Some('\\') => '\\',
                        Some('u') => {
                            let hex: String = (0..4).filter_map(|_| self.bump()).collect();
                            u32::from_str_radix(&hex, 16)
                                .ok()
                                .and_then(char::from_u32)
                                .ok_or_else(|| self.err("invalid \\u escape"))?
                        }
                        _ => return Err(self.err("invalid escape")),
                    };
                    lex.push(c);
                }
                Some(c) => lex.push(c),
                None => return Err(RuleError::Syntax { line, column, message: "unterminated string".into() }),
            }
        }
        let datatype = if self.peek() == Some('^') && self.peek2() == Some('^') {
            self.bump();
            self.bump();
            let (dl, dc) = (self.line, self.col);
            let dt_err = |what: &str| RuleError::Syntax { line: dl, column: dc, message: format!("unsupported datatype {what}") };
            if self.peek() == Some('<') {
                let iri = self.angle_iri()?;
                Datatype::from_iri(iri.as_str()).ok_or_else(|| dt_err(iri.as_str()))?
            } else {
                let w = self.name();
                let w = w.trim_end_matches('.');
                match Datatype::from_short_name(w) {
                    Some(d) => d,
                    None => {
                        let iri = self.prefixes.expand(w).map_err(|_| dt_err(w))?;
                        Datatype::from_iri(iri.as_str()).ok_or_else(|| dt_err(w))?
                    }
                }
            }
        } else {
            Datatype::String
        };
        Literal::new(&lex, datatype).map_err(|e| RuleError::Syntax { line, column, message: e.to_string() })
    }
}

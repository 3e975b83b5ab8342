use num_bigint::BigInt;

use super::{PolyError, Polynomial, VariableId, Vars};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, PolyError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, col) = (ln + 1, i + 1);
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let s = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let n: String = chars[s..i].iter().collect();
                out.push(Spanned { tok: Tok::Num(n.parse().expect("digits")), line, col });
            } else if c.is_alphabetic() || c == '_' {
                let s = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Spanned { tok: Tok::Ident(chars[s..i].iter().collect()), line, col });
            } else if "+-*^()=;".contains(c) {
                out.push(Spanned { tok: Tok::Sym(c), line, col });
                i += 1;
            } else {
                return Err(PolyError::Parse { line, col, msg: format!("unexpected character '{c}'") });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    vars: Option<Vars>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn err(&self, msg: impl Into<String>) -> PolyError {
        let (line, col) = match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        };
        PolyError::Parse { line, col, msg: msg.into() }
    }

    fn expect(&mut self, c: char) -> Result<(), PolyError> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> Result<String, PolyError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err("expected identifier")),
        }
    }

    fn vars(&self) -> Result<&Vars, PolyError> {
        self.vars.as_ref().ok_or_else(|| self.err("polynomial before variable declarations"))
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.term()?;
        while let Some(Tok::Sym(c @ ('+' | '-'))) = self.peek() {
            let c = *c;
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { acc.add(&t)? } else { acc.sub(&t)? };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::Sym('*')) {
            self.pos += 1;
            acc = acc.mul(&self.unary()?)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial, PolyError> {
        if self.peek() == Some(&Tok::Sym('-')) {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Sym('^')) {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek() {
            Some(Tok::Num(n)) => {
                let k: u32 = n.try_into().map_err(|_| self.err("exponent too large"))?;
                self.pos += 1;
                Ok(base.pow(k))
            }
            _ => Err(self.err("expected a nonnegative integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Polynomial::constant(self.vars()?, n))
            }
            Some(Tok::Ident(name)) => {
                let vars = self.vars()?;
                let id = vars.iter().position(|v| *v == name).ok_or_else(|| PolyError::UnknownVariable(name.clone()))?;
                let p = Polynomial::variable(vars, id);
                self.pos += 1;
                Ok(p)
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => Err(self.err("expected number, variable or '('")),
        }
    }
}

/// Parse one infix polynomial over `vars`.
pub fn parse_poly(text: &str, vars: &Vars) -> Result<Polynomial, PolyError> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, pos: 0, vars: Some(vars.clone()) };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// An algebraized geometry statement.
#[derive(Clone, Debug, PartialEq)]
pub struct GeoProblem {
    pub indep: Vec<String>,
    pub dep: Vec<String>,
    pub vars: Vars,
    pub hyps: Vec<(String, Polynomial)>,
    pub concls: Vec<(String, Polynomial)>,
}

impl GeoProblem {
    /// Dependent variable ids in declared order.
    pub fn dep_order(&self) -> Vec<VariableId> {
        self.dep.iter().map(|d| self.vars.iter().position(|v| v == d).expect("declared")).collect()
    }

    pub fn hyp_polys(&self) -> Vec<Polynomial> {
        self.hyps.iter().map(|(_, p)| p.clone()).collect()
    }
}

/// A list of named polynomials over declared variables.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyFile {
    pub vars: Vars,
    pub polys: Vec<(String, Polynomial)>,
}

struct Statements {
    indep: Vec<String>,
    dep: Vec<String>,
    vars: Option<Vars>,
    entries: Vec<(String, String, Polynomial)>,
}

fn statements(text: &str) -> Result<Statements, PolyError> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, pos: 0, vars: None };
    let mut st = Statements { indep: Vec::new(), dep: Vec::new(), vars: None, entries: Vec::new() };
    while p.pos < toks.len() {
        let kw = p.ident()?;
        match kw.as_str() {
            "indep" | "dep" | "vars" => {
                if p.vars.is_some() {
                    return Err(p.err("declarations must precede polynomials"));
                }
                let mut names = Vec::new();
                while p.peek() != Some(&Tok::Sym(';')) {
                    names.push(p.ident()?);
                }
                p.expect(';')?;
                if kw == "dep" { &mut st.dep } else { &mut st.indep }.extend(names);
            }
            "hyp" | "concl" | "poly" => {
                if p.vars.is_none() {
                    let all: Vec<&str> = st.indep.iter().chain(&st.dep).map(String::as_str).collect();
                    for (i, v) in all.iter().enumerate() {
                        if all[..i].contains(v) {
                            return Err(p.err(format!("variable {v} declared twice")));
                        }
                    }
                    p.vars = Some(super::vars(&all));
                }
                let name = p.ident()?;
                p.expect('=')?;
                let e = p.expr()?;
                p.expect(';')?;
                st.entries.push((kw, name, e));
            }
            other => return Err(PolyError::Parse { line: toks[p.pos - 1].line, col: toks[p.pos - 1].col, msg: format!("unknown statement '{other}'") }),
        }
    }
    st.vars = p.vars;
    Ok(st)
}

/// `indep u1 u2; dep x1 x2; hyp h1 = ...; concl g = ...;`
pub fn parse_geo(text: &str) -> Result<GeoProblem, PolyError> {
    let st = statements(text)?;
    let vars = st.vars.ok_or_else(|| PolyError::Parse { line: 1, col: 1, msg: "no hypotheses or conclusions".into() })?;
    let mut hyps = Vec::new();
    let mut concls = Vec::new();
    for (kw, name, p) in st.entries {
        match kw.as_str() {
            "hyp" => hyps.push((name, p)),
            "concl" => concls.push((name, p)),
            _ => return Err(PolyError::Parse { line: 1, col: 1, msg: format!("'{kw}' not allowed in a geometry file") }),
        }
    }
    if concls.is_empty() {
        return Err(PolyError::Parse { line: 1, col: 1, msg: "no conclusion".into() });
    }
    Ok(GeoProblem { indep: st.indep, dep: st.dep, vars, hyps, concls })
}

/// `vars x y; poly p = ...;`
pub fn parse_poly_file(text: &str) -> Result<PolyFile, PolyError> {
    let st = statements(text)?;
    let vars = st.vars.ok_or_else(|| PolyError::Parse { line: 1, col: 1, msg: "no polynomial".into() })?;
    let polys = st.entries.into_iter().map(|(_, n, p)| (n, p)).collect();
    Ok(PolyFile { vars, polys })
}

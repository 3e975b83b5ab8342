use super::FormulaError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SExpr {
    Atom(String, Span),
    List(Vec<SExpr>, Span),
}

impl SExpr {
    pub fn span(&self) -> Span {
        match self {
            SExpr::Atom(_, s) | SExpr::List(_, s) => *s,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(a, _) => Some(a),
            _ => None,
        }
    }
}

pub(crate) fn syntax(span: Span, msg: impl Into<String>) -> FormulaError {
    FormulaError::Syntax { line: span.line, col: span.col, msg: msg.into() }
}

/// Parse every top-level s-expression in `text`.  `;` starts a line comment.
pub fn parse_all(text: &str) -> Result<Vec<SExpr>, FormulaError> {
    let mut stack: Vec<(Vec<SExpr>, Span)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    let mut tok = String::new();
    let mut tok_span = Span { line, col };

    fn flush(tok: &mut String, span: Span, stack: &mut [(Vec<SExpr>, Span)], top: &mut Vec<SExpr>) {
        if tok.is_empty() {
            return;
        }
        let a = SExpr::Atom(std::mem::take(tok), span);
        match stack.last_mut() {
            Some((v, _)) => v.push(a),
            None => top.push(a),
        }
    }

    while let Some(ch) = chars.next() {
        let here = Span { line, col };
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
        match ch {
            ';' => {
                flush(&mut tok, tok_span, &mut stack, &mut top);
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                flush(&mut tok, tok_span, &mut stack, &mut top);
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut tok, tok_span, &mut stack, &mut top);
                let (items, open) = stack.pop().ok_or_else(|| syntax(here, "unbalanced ')'"))?;
                let l = SExpr::List(items, open);
                match stack.last_mut() {
                    Some((v, _)) => v.push(l),
                    None => top.push(l),
                }
            }
            c if c.is_whitespace() => flush(&mut tok, tok_span, &mut stack, &mut top),
            c => {
                if tok.is_empty() {
                    tok_span = here;
                }
                tok.push(c);
            }
        }
    }
    flush(&mut tok, tok_span, &mut stack, &mut top);
    if let Some((_, open)) = stack.last() {
        return Err(syntax(*open, "unbalanced '(': missing ')'"));
    }
    Ok(top)
}

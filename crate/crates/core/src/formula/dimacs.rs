use super::prop::ClauseSet;
use super::FormulaError;

/// Parse DIMACS CNF.  Variables are named `x1..xN`; `c` lines are comments.
pub fn parse_dimacs(text: &str) -> Result<ClauseSet, FormulaError> {
    let mut header: Option<(usize, usize)> = None;
    let mut lists: Vec<Vec<(usize, bool)>> = Vec::new();
    let mut cur: Vec<(usize, bool)> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        if t.starts_with('p') {
            let f: Vec<&str> = t.split_whitespace().collect();
            if f.len() != 4 || f[1] != "cnf" || header.is_some() {
                return Err(FormulaError::Syntax { line: line_no, col: 1, msg: "bad 'p cnf N M' header".into() });
            }
            let n = f[2].parse().map_err(|_| FormulaError::Syntax { line: line_no, col: 1, msg: "bad variable count".into() })?;
            let m = f[3].parse().map_err(|_| FormulaError::Syntax { line: line_no, col: 1, msg: "bad clause count".into() })?;
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or(FormulaError::Syntax { line: line_no, col: 1, msg: "clause before header".into() })?;
        let mut col = 1;
        for tok in t.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| FormulaError::Syntax { line: line_no, col, msg: format!("bad literal '{tok}'") })?;
            if v == 0 {
                lists.push(std::mem::take(&mut cur));
            } else {
                let idx = v.unsigned_abs() as usize;
                if idx > n {
                    return Err(FormulaError::Syntax { line: line_no, col, msg: format!("variable {idx} exceeds header count {n}") });
                }
                cur.push((idx - 1, v > 0));
            }
            col += tok.len() + 1;
        }
    }
    let (n, m) = header.ok_or(FormulaError::Syntax { line: 1, col: 1, msg: "missing 'p cnf' header".into() })?;
    if !cur.is_empty() {
        lists.push(cur);
    }
    if lists.len() != m {
        return Err(FormulaError::Syntax { line: 1, col: 1, msg: format!("header declares {m} clauses, found {}", lists.len()) });
    }
    let names = (1..=n).map(|i| format!("x{i}")).collect();
    Ok(ClauseSet::from_literal_lists(names, &lists))
}

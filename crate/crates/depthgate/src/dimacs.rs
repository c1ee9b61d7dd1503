//! DIMACS CNF reading and writing.

use std::io::{BufRead, Write};

use crate::cnf::CnfFormula;
use crate::error::{Error, Result};

/// Writes `p cnf <vars> <clauses>` followed by one 0-terminated clause per
/// line. The output is a pure function of the formula.
pub fn write_dimacs(formula: &CnfFormula, sink: &mut impl Write) -> Result<()> {
    writeln!(sink, "p cnf {} {}", formula.num_vars, formula.clauses.len())?;
    for clause in &formula.clauses {
        for lit in clause {
            write!(sink, "{lit} ")?;
        }
        writeln!(sink, "0")?;
    }
    Ok(())
}

pub fn dimacs_string(formula: &CnfFormula) -> String {
    let mut buf = Vec::new();
    write_dimacs(formula, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("dimacs output is ascii")
}

/// Parses DIMACS, preserving clause order. Comment lines start with `c`.
pub fn parse_dimacs(source: impl BufRead, origin: &str) -> Result<CnfFormula> {
    let mut num_vars: Option<usize> = None;
    let mut declared_clauses = 0usize;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut current: Vec<i32> = Vec::new();

    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('p') {
            if num_vars.is_some() {
                return Err(parse_err(origin, lineno, "duplicate problem line"));
            }
            let mut parts = trimmed.split_whitespace();
            parts.next();
            if parts.next() != Some("cnf") {
                return Err(parse_err(origin, lineno, "expected `p cnf <vars> <clauses>`"));
            }
            let vars = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(origin, lineno, "bad variable count"))?;
            declared_clauses = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(origin, lineno, "bad clause count"))?;
            if parts.next().is_some() {
                return Err(parse_err(origin, lineno, "trailing tokens on problem line"));
            }
            num_vars = Some(vars);
            continue;
        }
        let vars =
            num_vars.ok_or_else(|| parse_err(origin, lineno, "clause before problem line"))?;
        for token in trimmed.split_whitespace() {
            let lit: i32 = token
                .parse()
                .map_err(|_| parse_err(origin, lineno, &format!("bad literal `{token}`")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > vars {
                    return Err(parse_err(
                        origin,
                        lineno,
                        &format!("literal {lit} beyond declared {vars} variables"),
                    ));
                }
                current.push(lit);
            }
        }
    }

    let num_vars = num_vars.ok_or_else(|| parse_err(origin, 1, "missing problem line"))?;
    if !current.is_empty() {
        return Err(parse_err(origin, 0, "unterminated final clause"));
    }
    if clauses.len() != declared_clauses {
        return Err(parse_err(
            origin,
            0,
            &format!("declared {declared_clauses} clauses, found {}", clauses.len()),
        ));
    }
    Ok(CnfFormula { num_vars, clauses })
}

fn parse_err(path: &str, line: usize, msg: &str) -> Error {
    Error::Parse { path: path.to_string(), line, msg: msg.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_formula() {
        let formula = CnfFormula::new(0);
        assert_eq!(dimacs_string(&formula), "p cnf 0 0\n");
        let parsed = parse_dimacs(dimacs_string(&formula).as_bytes(), "<mem>").unwrap();
        assert_eq!(parsed, formula);
    }

    #[test]
    fn round_trip_preserves_clause_order() {
        let mut formula = CnfFormula::new(3);
        formula.push_clause(vec![1, -2]);
        formula.push_clause(vec![-3]);
        formula.push_clause(vec![2, 3, -1]);
        let text = dimacs_string(&formula);
        let parsed = parse_dimacs(text.as_bytes(), "<mem>").unwrap();
        assert_eq!(parsed, formula);
    }

    #[test]
    fn comments_are_ignored() {
        let text = "c header\np cnf 2 1\nc middle\n1 -2 0\n";
        let parsed = parse_dimacs(text.as_bytes(), "<mem>").unwrap();
        assert_eq!(parsed.clauses, vec![vec![1, -2]]);
    }

    #[test]
    fn rejects_literal_beyond_declared_vars() {
        let text = "p cnf 2 1\n3 0\n";
        assert!(matches!(
            parse_dimacs(text.as_bytes(), "<mem>"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn rejects_malformed_header_and_counts() {
        assert!(parse_dimacs("p dnf 1 1\n1 0\n".as_bytes(), "<mem>").is_err());
        assert!(parse_dimacs("1 0\n".as_bytes(), "<mem>").is_err());
        assert!(parse_dimacs("p cnf 1 2\n1 0\n".as_bytes(), "<mem>").is_err());
        assert!(parse_dimacs("p cnf 1 1\n1\n".as_bytes(), "<mem>").is_err());
    }
}

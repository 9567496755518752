//! CPLEX-style LP text.
//!
//! The writer emits `Minimize`, `Subject To`, `Bounds`, `General`, `Binary`
//! and `End` sections. Every variable gets a line in `Bounds`, in index
//! order, which is how the parser recovers the variable order. Rows without
//! terms are written with a literal `0` left-hand side. Lines starting with
//! a backslash are comments; `\Problem name:` carries the model name.

use std::collections::HashMap;
use std::fmt::Write as _;

use freightplan_core::milp::{Constraint, ModelDescription, Sense, VarKind, Variable};
use freightplan_core::Provenance;

const WRAP: usize = 100;

#[derive(Debug, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct LpError {
    pub line: usize,
    pub message: String,
}

/// Shortest text that parses back to the same `f64`.
pub(crate) fn number(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

fn push_terms(out: &mut String, model: &ModelDescription, terms: &[(usize, f64)], mut width: usize) {
    for (k, &(j, c)) in terms.iter().enumerate() {
        let term = match (k, c < 0.0) {
            (0, false) => format!(" {} {}", number(c), model.variables[j].name),
            (0, true) => format!(" - {} {}", number(-c), model.variables[j].name),
            (_, false) => format!(" + {} {}", number(c), model.variables[j].name),
            (_, true) => format!(" - {} {}", number(-c), model.variables[j].name),
        };
        if width + term.len() > WRAP {
            out.push_str("\n  ");
            width = 2;
        }
        width += term.len();
        out.push_str(&term);
    }
}

pub fn write_lp(model: &ModelDescription, provenance: Option<&Provenance>) -> String {
    let mut out = String::new();
    if let Some(p) = provenance {
        writeln!(out, "\\ {} {} input sha256 {}", p.tool, p.version, p.input_digest).unwrap();
    }
    writeln!(out, "\\Problem name: {}", model.name).unwrap();
    out.push_str("Minimize\n obj:");
    push_terms(&mut out, model, &model.objective, 5);
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        write!(out, " {}:", c.name).unwrap();
        if c.coefficients.is_empty() {
            out.push_str(" 0");
        }
        push_terms(&mut out, model, &c.coefficients, c.name.len() + 2);
        let op = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        writeln!(out, " {op} {}", number(c.rhs)).unwrap();
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        match (v.lower == f64::NEG_INFINITY, v.upper == f64::INFINITY) {
            (true, true) => writeln!(out, " {} free", v.name),
            (false, true) => writeln!(out, " {} >= {}", v.name, number(v.lower)),
            _ => writeln!(out, " {} <= {} <= {}", number(v.lower), v.name, number(v.upper)),
        }
        .unwrap();
    }
    for (title, kind) in [("General", VarKind::Integer), ("Binary", VarKind::Binary)] {
        let names: Vec<&str> = model.variables.iter().filter(|v| v.kind == kind).map(|v| v.name.as_str()).collect();
        if names.is_empty() {
            continue;
        }
        writeln!(out, "{title}").unwrap();
        for chunk in names.chunks(8) {
            writeln!(out, " {}", chunk.join(" ")).unwrap();
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Rows,
    Bounds,
    General,
    Binary,
    End,
}

fn section(line: &str) -> Option<Section> {
    match line.to_ascii_lowercase().as_str() {
        "minimize" | "minimise" | "min" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Rows),
        "bounds" => Some(Section::Bounds),
        "general" | "generals" | "gen" => Some(Section::General),
        "binary" | "binaries" | "bin" => Some(Section::Binary),
        "end" => Some(Section::End),
        _ => None,
    }
}

fn parse_number(tok: &str, line: usize) -> Result<f64, LpError> {
    match tok.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => tok.parse().map_err(|_| LpError { line, message: format!("expected a number, found {tok:?}") }),
    }
}

fn is_number(tok: &str) -> bool {
    tok.parse::<f64>().is_ok() || matches!(tok.to_ascii_lowercase().as_str(), "inf" | "+inf" | "-inf" | "infinity" | "-infinity")
}

/// One `name: terms [op rhs]` statement gathered over continuation lines.
struct Statement {
    line: usize,
    name: String,
    tokens: Vec<String>,
}

#[derive(Default)]
struct Names {
    order: Vec<String>,
    index: HashMap<String, usize>,
}

impl Names {
    fn get(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.order.push(name.to_string());
        self.index.insert(name.to_string(), self.order.len() - 1);
        self.order.len() - 1
    }
}

fn parse_terms(tokens: &[String], names: &mut Names, line: usize) -> Result<Vec<(usize, f64)>, LpError> {
    let mut terms: Vec<(usize, f64)> = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for tok in tokens {
        match tok.as_str() {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            t if is_number(t) => coef = Some(parse_number(t, line)?),
            t => {
                terms.push((names.get(t), sign * coef.unwrap_or(1.0)));
                sign = 1.0;
                coef = None;
            }
        }
    }
    if let Some(c) = coef {
        if c != 0.0 {
            return Err(LpError { line, message: "constant terms are not supported".into() });
        }
    }
    terms.sort_by_key(|t| t.0);
    let mut merged: Vec<(usize, f64)> = Vec::new();
    for (j, c) in terms {
        match merged.last_mut() {
            Some(last) if last.0 == j => last.1 += c,
            _ => merged.push((j, c)),
        }
    }
    merged.retain(|t| t.1 != 0.0);
    Ok(merged)
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let flush = |cur: &mut String, out: &mut Vec<String>| {
        if !cur.is_empty() {
            out.push(std::mem::take(cur));
        }
    };
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            flush(&mut cur, &mut out);
        } else if c == '<' || c == '>' || c == '=' {
            flush(&mut cur, &mut out);
            let mut op = c.to_string();
            if i + 1 < chars.len() && chars[i + 1] == '=' && c != '=' {
                op.push('=');
                i += 1;
            }
            out.push(op);
        } else if (c == '+' || c == '-') && cur.is_empty() && chars.get(i + 1).is_none_or(|n| n.is_whitespace()) {
            out.push(c.to_string());
        } else {
            cur.push(c);
        }
        i += 1;
    }
    flush(&mut cur, &mut out);
    out
}

fn split_sense(tokens: &[String], line: usize) -> Result<(&[String], Sense, f64), LpError> {
    let pos = tokens
        .iter()
        .position(|t| matches!(t.as_str(), "<=" | ">=" | "=" | "<" | ">" | "=<" | "=>"))
        .ok_or_else(|| LpError { line, message: "row without a comparison".into() })?;
    let sense = match tokens[pos].as_str() {
        "<=" | "<" | "=<" => Sense::Le,
        ">=" | ">" | "=>" => Sense::Ge,
        _ => Sense::Eq,
    };
    let rest = &tokens[pos + 1..];
    let rhs = match rest {
        [v] => parse_number(v, line)?,
        [s, v] if s == "-" => -parse_number(v, line)?,
        [s, v] if s == "+" => parse_number(v, line)?,
        _ => return Err(LpError { line, message: "right-hand side must be one number".into() }),
    };
    Ok((&tokens[..pos], sense, rhs))
}

pub fn parse_lp(text: &str) -> Result<ModelDescription, LpError> {
    let mut name = String::new();
    let mut current = Section::Preamble;
    let mut objective: Option<Statement> = None;
    let mut rows: Vec<Statement> = Vec::new();
    let mut bounds: Vec<(usize, Vec<String>)> = Vec::new();
    let mut kinds: Vec<(usize, String, VarKind)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        if let Some(rest) = raw.strip_prefix("\\Problem name:") {
            name = rest.trim().to_string();
            continue;
        }
        let content = raw.split('\\').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(s) = section(content) {
            current = s;
            continue;
        }
        match current {
            Section::Preamble | Section::End => {
                return Err(LpError { line, message: format!("unexpected text {content:?}") });
            }
            Section::Objective | Section::Rows => {
                let (label, body) = match content.split_once(':') {
                    Some((l, b)) if !l.trim().contains(' ') => (Some(l.trim().to_string()), b),
                    _ => (None, content),
                };
                let tokens = tokenize(body);
                match (label, current) {
                    (Some(label), Section::Objective) => objective = Some(Statement { line, name: label, tokens }),
                    (Some(label), _) => rows.push(Statement { line, name: label, tokens }),
                    (None, Section::Objective) => match objective.as_mut() {
                        Some(st) => st.tokens.extend(tokens),
                        None => objective = Some(Statement { line, name: "obj".into(), tokens }),
                    },
                    (None, _) => match rows.last_mut() {
                        Some(st) => st.tokens.extend(tokens),
                        None => return Err(LpError { line, message: "row without a name".into() }),
                    },
                }
            }
            Section::Bounds => bounds.push((line, tokenize(content))),
            Section::General | Section::Binary => {
                let kind = if current == Section::General { VarKind::Integer } else { VarKind::Binary };
                kinds.extend(content.split_whitespace().map(|n| (line, n.to_string(), kind)));
            }
        }
    }
    if current != Section::End {
        return Err(LpError { line: text.lines().count(), message: "missing End".into() });
    }

    // Bounds fix the variable order, so they are read before any row.
    let mut names = Names::default();
    let mut lower: HashMap<usize, f64> = HashMap::new();
    let mut upper: HashMap<usize, f64> = HashMap::new();
    for (line, toks) in &bounds {
        let line = *line;
        let t: Vec<&str> = toks.iter().map(String::as_str).collect();
        match t.as_slice() {
            [v, "free"] => {
                let j = names.get(v);
                lower.insert(j, f64::NEG_INFINITY);
                upper.insert(j, f64::INFINITY);
            }
            [l, "<=", v, "<=", u] if !is_number(v) => {
                let j = names.get(v);
                lower.insert(j, parse_number(l, line)?);
                upper.insert(j, parse_number(u, line)?);
            }
            [v, op, b] if !is_number(v) => {
                let j = names.get(v);
                let b = parse_number(b, line)?;
                match *op {
                    ">=" => {
                        lower.insert(j, b);
                    }
                    "<=" => {
                        upper.insert(j, b);
                    }
                    "=" => {
                        lower.insert(j, b);
                        upper.insert(j, b);
                    }
                    _ => return Err(LpError { line, message: format!("unknown bound operator {op}") }),
                }
            }
            _ => return Err(LpError { line, message: format!("unreadable bound {:?}", toks.join(" ")) }),
        }
    }

    let objective = match objective {
        Some(st) => parse_terms(&st.tokens, &mut names, st.line)?,
        None => Vec::new(),
    };
    let mut constraints = Vec::with_capacity(rows.len());
    for st in &rows {
        let (lhs, sense, rhs) = split_sense(&st.tokens, st.line)?;
        let coefficients = parse_terms(lhs, &mut names, st.line)?;
        constraints.push(Constraint { name: st.name.clone(), coefficients, sense, rhs });
    }
    let mut kind_of: HashMap<usize, VarKind> = HashMap::new();
    for (_, n, kind) in &kinds {
        let j = names.get(n);
        kind_of.insert(j, *kind);
    }

    let variables = names
        .order
        .iter()
        .enumerate()
        .map(|(j, n)| {
            let kind = kind_of.get(&j).copied().unwrap_or(VarKind::Continuous);
            let (lo, up) = if kind == VarKind::Binary { (0.0, 1.0) } else { (0.0, f64::INFINITY) };
            Variable { name: n.clone(), kind, lower: lower.get(&j).copied().unwrap_or(lo), upper: upper.get(&j).copied().unwrap_or(up) }
        })
        .collect();
    Ok(ModelDescription { name, variables, constraints, objective })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ModelDescription {
        let var = |name: &str, kind, lower, upper| Variable { name: name.into(), kind, lower, upper };
        ModelDescription {
            name: "small".into(),
            variables: vec![
                var("x", VarKind::Binary, 0.0, 1.0),
                var("z", VarKind::Binary, 0.0, 0.0),
                var("e_p1", VarKind::Integer, 0.0, f64::INFINITY),
                var("y", VarKind::Continuous, f64::NEG_INFINITY, 2.5),
                var("w", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY),
            ],
            constraints: vec![
                Constraint { name: "c1".into(), coefficients: vec![(0, 1.0), (2, -3.5)], sense: Sense::Le, rhs: -4.0 },
                Constraint { name: "empty".into(), coefficients: vec![], sense: Sense::Ge, rhs: 1.0 },
                Constraint { name: "eq".into(), coefficients: vec![(3, 1e-7), (4, 1e21)], sense: Sense::Eq, rhs: 0.0 },
            ],
            objective: vec![(0, 1253800.0), (1, -2.0)],
        }
    }

    #[test]
    fn round_trip() {
        let m = small();
        let text = write_lp(&m, None);
        assert_eq!(parse_lp(&text).unwrap(), m);
        assert!(text.contains("Minimize\n obj: 1253800 x - 2 z\n"));
    }

    #[test]
    fn empty_model() {
        let m = ModelDescription::default();
        let text = write_lp(&m, None);
        assert_eq!(text, "\\Problem name: \nMinimize\n obj:\nSubject To\nBounds\nEnd\n");
        assert_eq!(parse_lp(&text).unwrap(), m);
    }

    #[test]
    fn long_rows_wrap() {
        let mut m = ModelDescription::default();
        for j in 0..60 {
            m.variables.push(Variable { name: format!("x_p{j}_e1_t1"), kind: VarKind::Binary, lower: 0.0, upper: 1.0 });
        }
        m.constraints.push(Constraint { name: "big".into(), coefficients: (0..60).map(|j| (j, 2.0)).collect(), sense: Sense::Le, rhs: 9.0 });
        let text = write_lp(&m, None);
        assert!(text.lines().all(|l| l.len() <= WRAP + 40));
        assert_eq!(parse_lp(&text).unwrap(), m);
    }

    #[test]
    fn hand_written_file() {
        let text = "\\ a comment\nMinimize\n obj: x + 2 y\nSubject To\n c: x + y >= 1\nBounds\n x <= 4\nGeneral\n x\nEnd\n";
        let m = parse_lp(text).unwrap();
        assert_eq!(m.variables.len(), 2);
        assert_eq!(m.variables[0].upper, 4.0);
        assert_eq!(m.variables[0].kind, VarKind::Integer);
        assert_eq!(m.objective, vec![(0, 1.0), (1, 2.0)]);
    }

    #[test]
    fn errors() {
        assert!(parse_lp("Minimize\n obj: x\n").unwrap_err().message.contains("End"));
        assert!(parse_lp("Minimize\nSubject To\n c: x\nEnd\n").unwrap_err().message.contains("comparison"));
    }
}

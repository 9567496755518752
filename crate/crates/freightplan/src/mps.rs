//! Fixed-format MPS.
//!
//! Fields sit at the classic columns (2-3, 5-12, 15-22, 25-36, 40-47,
//! 50-61), so names are at most 8 characters and numbers at most 12. Longer
//! names are replaced by generated ones (`C0000001` for columns, `R0000001`
//! for rows) and the mapping is returned as a [`NameMap`], written next to
//! the model as CSV. Integer columns sit between `INTORG`/`INTEND` markers;
//! binaries get a `BV` bound. Every column gets explicit bounds, since
//! readers disagree on defaults for integer columns.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use freightplan_core::milp::{Constraint, ModelDescription, Sense, VarKind, Variable};
use freightplan_core::Provenance;
use serde::{Deserialize, Serialize};

/// Name of the objective row.
pub const OBJECTIVE_ROW: &str = "COST";
const NAME_WIDTH: usize = 8;
const NUMBER_WIDTH: usize = 12;

#[derive(Debug, thiserror::Error)]
pub enum MpsError {
    #[error("value {0} does not fit a 12-character field")]
    Value(f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("name map: {0}")]
    NameMap(#[from] csv::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> MpsError {
    MpsError::Parse { line, message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NameKind {
    Column,
    Row,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappedName {
    pub kind: NameKind,
    pub mangled: String,
    pub original: String,
}

/// Generated short names and the names they stand for.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NameMap {
    pub entries: Vec<MappedName>,
}

impl NameMap {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Original name to the name used in the file.
    pub fn forward(&self, kind: NameKind) -> HashMap<&str, &str> {
        self.entries.iter().filter(|e| e.kind == kind).map(|e| (e.original.as_str(), e.mangled.as_str())).collect()
    }

    fn backward(&self, kind: NameKind) -> HashMap<&str, &str> {
        self.entries.iter().filter(|e| e.kind == kind).map(|e| (e.mangled.as_str(), e.original.as_str())).collect()
    }

    pub fn to_csv(&self) -> Result<String, MpsError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        if self.entries.is_empty() {
            w.write_record(["kind", "mangled", "original"])?;
        }
        for e in &self.entries {
            w.serialize(e)?;
        }
        Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self, MpsError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let entries = r.deserialize().collect::<Result<Vec<MappedName>, _>>()?;
        Ok(NameMap { entries })
    }
}

pub struct MpsOutput {
    pub text: String,
    pub names: NameMap,
}

fn fits(name: &str) -> bool {
    !name.is_empty() && name.len() <= NAME_WIDTH && name.bytes().all(|b| b.is_ascii_graphic())
}

/// File names for every original name, generating short ones where needed.
fn short_names<'a>(kind: NameKind, names: impl Iterator<Item = &'a str> + Clone, reserved: &[&str], map: &mut NameMap) -> Vec<String> {
    let mut taken: BTreeSet<String> = names.clone().filter(|n| fits(n)).map(String::from).collect();
    taken.extend(reserved.iter().map(|s| s.to_string()));
    let prefix = if kind == NameKind::Column { 'C' } else { 'R' };
    let mut next = 0u32;
    names
        .map(|n| {
            if fits(n) && !reserved.contains(&n) {
                return n.to_string();
            }
            let short = loop {
                next += 1;
                let candidate = format!("{prefix}{next:07}");
                if !taken.contains(&candidate) {
                    break candidate;
                }
            };
            taken.insert(short.clone());
            map.entries.push(MappedName { kind, mangled: short.clone(), original: n.to_string() });
            short
        })
        .collect()
}

/// Shortest text of `v` within the numeric field width.
fn number(v: f64) -> Result<String, MpsError> {
    let plain = format!("{v}");
    if plain.len() <= NUMBER_WIDTH {
        return Ok(plain);
    }
    let exp = format!("{v:e}");
    if exp.len() <= NUMBER_WIDTH {
        return Ok(exp);
    }
    Err(MpsError::Value(v))
}

/// One data line with fields placed at their fixed columns.
fn card(fields: [&str; 6]) -> String {
    const STARTS: [usize; 6] = [1, 4, 14, 24, 39, 49];
    let mut line = String::new();
    for (f, &start) in fields.iter().zip(&STARTS) {
        if f.is_empty() {
            continue;
        }
        while line.len() < start {
            line.push(' ');
        }
        line.push_str(f);
    }
    line.push('\n');
    line
}

pub fn write_mps(model: &ModelDescription, provenance: Option<&Provenance>) -> Result<MpsOutput, MpsError> {
    let mut names = NameMap::default();
    let cols = short_names(NameKind::Column, model.variables.iter().map(|v| v.name.as_str()), &["MARKER"], &mut names);
    let rows = short_names(NameKind::Row, model.constraints.iter().map(|c| c.name.as_str()), &[OBJECTIVE_ROW], &mut names);

    let mut out = String::new();
    if let Some(p) = provenance {
        out.push_str(&format!("* {} {} input sha256 {}\n", p.tool, p.version, p.input_digest));
    }
    out.push_str(&format!("NAME          {}\n", model.name));
    out.push_str("ROWS\n");
    out.push_str(&card(["N", OBJECTIVE_ROW, "", "", "", ""]));
    for (c, name) in model.constraints.iter().zip(&rows) {
        let t = match c.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        out.push_str(&card([t, name, "", "", "", ""]));
    }

    let mut by_column: Vec<Vec<(&str, f64)>> = vec![Vec::new(); model.variables.len()];
    for &(j, a) in &model.objective {
        by_column[j].push((OBJECTIVE_ROW, a));
    }
    for (c, name) in model.constraints.iter().zip(&rows) {
        for &(j, a) in &c.coefficients {
            by_column[j].push((name, a));
        }
    }
    out.push_str("COLUMNS\n");
    let mut in_marker = false;
    let mut markers = 0;
    for (j, v) in model.variables.iter().enumerate() {
        let integral = v.kind != VarKind::Continuous;
        if integral != in_marker {
            let tag = if integral { "'INTORG'" } else { "'INTEND'" };
            out.push_str(&card(["", &format!("M{markers:07}"), "'MARKER'", "", tag, ""]));
            markers += 1;
            in_marker = integral;
        }
        let entries = if by_column[j].is_empty() { vec![(OBJECTIVE_ROW, 0.0)] } else { by_column[j].clone() };
        for pair in entries.chunks(2) {
            let a = number(pair[0].1)?;
            match pair.get(1) {
                Some(&(r2, v2)) => out.push_str(&card(["", &cols[j], pair[0].0, &a, r2, &number(v2)?])),
                None => out.push_str(&card(["", &cols[j], pair[0].0, &a, "", ""])),
            }
        }
    }
    if in_marker {
        out.push_str(&card(["", &format!("M{markers:07}"), "'MARKER'", "", "'INTEND'", ""]));
    }

    out.push_str("RHS\n");
    for (c, name) in model.constraints.iter().zip(&rows) {
        if c.rhs != 0.0 {
            out.push_str(&card(["", "RHS", name, &number(c.rhs)?, "", ""]));
        }
    }

    out.push_str("BOUNDS\n");
    for (v, name) in model.variables.iter().zip(&cols) {
        let mut bound = |t: &str, value: Option<f64>| -> Result<(), MpsError> {
            let value = match value {
                Some(x) => number(x)?,
                None => String::new(),
            };
            out.push_str(&card([t, "BND", name, &value, "", ""]));
            Ok(())
        };
        let (default_lo, default_up) = if v.kind == VarKind::Binary {
            bound("BV", None)?;
            (0.0, 1.0)
        } else {
            (0.0, f64::INFINITY)
        };
        match (v.lower, v.upper) {
            (lo, up) if lo == f64::NEG_INFINITY && up == f64::INFINITY => bound("FR", None)?,
            (lo, up) => {
                if lo == f64::NEG_INFINITY {
                    bound("MI", None)?;
                } else if lo != default_lo {
                    bound("LO", Some(lo))?;
                }
                if up == f64::INFINITY {
                    if v.kind == VarKind::Integer {
                        bound("PL", None)?;
                    }
                } else if up != default_up || v.kind == VarKind::Integer {
                    bound("UP", Some(up))?;
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    Ok(MpsOutput { text: out, names })
}

fn field(line: &str, start: usize, end: usize) -> &str {
    if line.len() <= start {
        return "";
    }
    line[start..end.min(line.len())].trim()
}

fn fields(line: &str) -> [&str; 6] {
    [field(line, 1, 3), field(line, 4, 12), field(line, 14, 22), field(line, 24, 36), field(line, 39, 47), field(line, 49, 61)]
}

fn value(text: &str, line: usize) -> Result<f64, MpsError> {
    text.parse().map_err(|_| parse_err(line, format!("bad number {text:?}")))
}

/// Reads fixed-format MPS, restoring original names through `names`.
pub fn parse_mps(text: &str, names: Option<&NameMap>) -> Result<ModelDescription, MpsError> {
    let empty = NameMap::default();
    let names = names.unwrap_or(&empty);
    let col_names = names.backward(NameKind::Column);
    let row_names = names.backward(NameKind::Row);

    let mut model = ModelDescription::default();
    let mut section = "";
    let mut objective_row: Option<String> = None;
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut terms: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    let mut in_marker = false;
    let mut ended = false;

    for (k, line) in text.lines().enumerate() {
        let n = k + 1;
        if line.starts_with('*') || line.trim().is_empty() {
            continue;
        }
        if !line.starts_with(' ') {
            let mut words = line.split_whitespace();
            section = words.next().unwrap_or("");
            match section {
                "NAME" => model.name = line.get(14..).unwrap_or("").trim_end().to_string(),
                "ROWS" | "COLUMNS" | "RHS" | "BOUNDS" => {}
                "ENDATA" => {
                    ended = true;
                    break;
                }
                other => return Err(parse_err(n, format!("unsupported section {other}"))),
            }
            continue;
        }
        let f = fields(line);
        match section {
            "ROWS" => {
                let sense = match f[0] {
                    "N" => {
                        if objective_row.is_some() {
                            return Err(parse_err(n, "more than one objective row"));
                        }
                        objective_row = Some(f[1].to_string());
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    t => return Err(parse_err(n, format!("unknown row type {t:?}"))),
                };
                let name = row_names.get(f[1]).map_or(f[1], |s| *s).to_string();
                if row_index.insert(f[1].to_string(), model.constraints.len()).is_some() {
                    return Err(parse_err(n, format!("duplicate row {}", f[1])));
                }
                model.constraints.push(Constraint { name, coefficients: Vec::new(), sense, rhs: 0.0 });
            }
            "COLUMNS" => {
                if f[2] == "'MARKER'" {
                    in_marker = match f[4] {
                        "'INTORG'" => true,
                        "'INTEND'" => false,
                        t => return Err(parse_err(n, format!("unknown marker {t}"))),
                    };
                    continue;
                }
                let j = match col_index.get(f[1]) {
                    Some(&j) if j + 1 == model.variables.len() => j,
                    Some(_) => return Err(parse_err(n, format!("column {} is not contiguous", f[1]))),
                    None => {
                        let name = col_names.get(f[1]).map_or(f[1], |s| *s).to_string();
                        let kind = if in_marker { VarKind::Integer } else { VarKind::Continuous };
                        model.variables.push(Variable { name, kind, lower: 0.0, upper: f64::INFINITY });
                        col_index.insert(f[1].to_string(), model.variables.len() - 1);
                        model.variables.len() - 1
                    }
                };
                for (row, v) in [(f[2], f[3]), (f[4], f[5])] {
                    if row.is_empty() {
                        continue;
                    }
                    let a = value(v, n)?;
                    if a == 0.0 {
                        continue;
                    }
                    if objective_row.as_deref() == Some(row) {
                        model.objective.push((j, a));
                    } else {
                        let r = *row_index.get(row).ok_or_else(|| parse_err(n, format!("unknown row {row}")))?;
                        terms.entry(r).or_default().push((j, a));
                    }
                }
            }
            "RHS" => {
                for (row, v) in [(f[2], f[3]), (f[4], f[5])] {
                    if row.is_empty() || objective_row.as_deref() == Some(row) {
                        continue;
                    }
                    let r = *row_index.get(row).ok_or_else(|| parse_err(n, format!("unknown row {row}")))?;
                    model.constraints[r].rhs = value(v, n)?;
                }
            }
            "BOUNDS" => {
                let j = *col_index.get(f[2]).ok_or_else(|| parse_err(n, format!("unknown column {}", f[2])))?;
                let var = &mut model.variables[j];
                match f[0] {
                    "BV" => {
                        var.kind = VarKind::Binary;
                        var.lower = 0.0;
                        var.upper = 1.0;
                    }
                    "LO" => var.lower = value(f[3], n)?,
                    "UP" => var.upper = value(f[3], n)?,
                    "FX" => {
                        var.lower = value(f[3], n)?;
                        var.upper = var.lower;
                    }
                    "FR" => {
                        var.lower = f64::NEG_INFINITY;
                        var.upper = f64::INFINITY;
                    }
                    "MI" => var.lower = f64::NEG_INFINITY,
                    "PL" => var.upper = f64::INFINITY,
                    t => return Err(parse_err(n, format!("unknown bound type {t:?}"))),
                }
            }
            _ => return Err(parse_err(n, "data before the first section")),
        }
    }
    if !ended {
        return Err(parse_err(text.lines().count(), "missing ENDATA"));
    }
    for (r, list) in terms {
        model.constraints[r].coefficients = list;
    }
    Ok(model)
}

//! A small in-memory LP model with a writer and parser for the subset of the
//! CPLEX LP format that [`super::build_model`] emits, plus a row checker.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};

const LINE_WIDTH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    fn parse(tok: &str) -> Option<Sense> {
        match tok {
            "<=" | "=<" | "<" => Some(Sense::Le),
            ">=" | "=>" | ">" => Some(Sense::Ge),
            "=" => Some(Sense::Eq),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(f64, String)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn new(name: impl Into<String>) -> Self {
        Row {
            name: name.into(),
            terms: Vec::new(),
            sense: Sense::Le,
            rhs: 0.0,
        }
    }

    pub fn add(&mut self, coef: f64, var: impl Into<String>) {
        self.terms.push((coef, var.into()));
    }

    fn with(mut self, sense: Sense, rhs: f64) -> Self {
        self.sense = sense;
        self.rhs = rhs;
        self
    }

    pub fn le(self, rhs: f64) -> Self {
        self.with(Sense::Le, rhs)
    }

    pub fn ge(self, rhs: f64) -> Self {
        self.with(Sense::Ge, rhs)
    }

    pub fn eq(self, rhs: f64) -> Self {
        self.with(Sense::Eq, rhs)
    }

    pub fn lhs(&self, values: &HashMap<String, f64>) -> f64 {
        self.terms
            .iter()
            .map(|(c, v)| c * values.get(v).copied().unwrap_or(0.0))
            .sum()
    }
}

/// Minimization model. Variables without a bound entry are non-negative.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LpModel {
    pub comments: Vec<String>,
    pub objective: Vec<(f64, String)>,
    pub rows: Vec<Row>,
    pub bounds: Vec<(String, f64, f64)>,
    pub binaries: Vec<String>,
    pub generals: Vec<String>,
}

fn push_wrapped(out: &mut String, head: &str, pieces: impl IntoIterator<Item = String>) {
    let mut line = head.to_string();
    for piece in pieces {
        if line.len() + piece.len() + 1 > LINE_WIDTH && !line.trim().is_empty() {
            out.push_str(&line);
            out.push('\n');
            line = String::from("   ");
        }
        line.push(' ');
        line.push_str(&piece);
    }
    out.push_str(&line);
    out.push('\n');
}

fn term_text(coef: f64, var: &str) -> String {
    let sign = if coef < 0.0 { '-' } else { '+' };
    let mag = coef.abs();
    if mag == 1.0 {
        format!("{sign} {var}")
    } else {
        format!("{sign} {mag} {var}")
    }
}

impl LpModel {
    pub fn to_lp(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "\\ {c}");
        }
        out.push_str("Minimize\n");
        push_wrapped(&mut out, " obj:", self.objective.iter().map(|(c, v)| term_text(*c, v)));
        out.push_str("Subject To\n");
        for row in &self.rows {
            let pieces = row
                .terms
                .iter()
                .map(|(c, v)| term_text(*c, v))
                .chain([row.sense.symbol().to_string(), row.rhs.to_string()]);
            push_wrapped(&mut out, &format!(" {}:", row.name), pieces);
        }
        out.push_str("Bounds\n");
        for (var, lo, hi) in &self.bounds {
            let _ = writeln!(out, " {lo} <= {var} <= {hi}");
        }
        out.push_str("Binaries\n");
        push_wrapped(&mut out, "", self.binaries.iter().cloned());
        out.push_str("Generals\n");
        push_wrapped(&mut out, "", self.generals.iter().cloned());
        out.push_str("End\n");
        out
    }

    /// Variables used in the objective or a row but never declared in the
    /// bounds, binaries or generals sections.
    pub fn undeclared(&self) -> Vec<String> {
        let declared: HashSet<&str> = self
            .bounds
            .iter()
            .map(|b| b.0.as_str())
            .chain(self.binaries.iter().map(String::as_str))
            .chain(self.generals.iter().map(String::as_str))
            .collect();
        let mut missing: Vec<String> = self
            .objective
            .iter()
            .chain(self.rows.iter().flat_map(|r| r.terms.iter()))
            .map(|(_, v)| v.as_str())
            .filter(|v| !declared.contains(v))
            .map(String::from)
            .collect();
        missing.sort();
        missing.dedup();
        missing
    }

    pub fn objective_value(&self, values: &HashMap<String, f64>) -> f64 {
        self.objective
            .iter()
            .map(|(c, v)| c * values.get(v).copied().unwrap_or(0.0))
            .sum()
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Rows,
    Bounds,
    Binaries,
    Generals,
    Done,
}

fn section_of(line: &str) -> Option<Section> {
    match line.to_ascii_lowercase().as_str() {
        "minimize" | "minimise" | "min" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Rows),
        "bounds" => Some(Section::Bounds),
        "binaries" | "binary" | "bin" => Some(Section::Binaries),
        "generals" | "general" | "gen" => Some(Section::Generals),
        "end" => Some(Section::Done),
        _ => None,
    }
}

fn number(tok: &str) -> Option<f64> {
    match tok.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        _ => tok.parse().ok(),
    }
}

/// Splits a run of tokens into linear terms.
fn parse_terms(tokens: &[&str], line: usize) -> Result<Vec<(f64, String)>> {
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for &tok in tokens {
        match tok {
            "+" => sign = 1.0,
            "-" => sign = -sign,
            _ => {
                if let Some(c) = number(tok) {
                    if coef.is_some() {
                        return Err(Error::parse(line, format!("two coefficients in a row near {tok:?}")));
                    }
                    coef = Some(c);
                } else {
                    terms.push((sign * coef.unwrap_or(1.0), tok.to_string()));
                    sign = 1.0;
                    coef = None;
                }
            }
        }
    }
    if coef.is_some() {
        return Err(Error::parse(line, "coefficient without a variable"));
    }
    Ok(terms)
}

/// Parses the LP subset written by [`LpModel::to_lp`]: one objective,
/// named rows with the constant on the right, `lo <= x <= hi` bounds.
pub fn parse_lp(text: &str) -> Result<LpModel> {
    let mut model = LpModel::default();
    let mut section = Section::Preamble;
    // (name, first line, tokens) of the statement being collected
    let mut pending: Option<(String, usize, Vec<String>)> = None;

    let flush = |model: &mut LpModel, section: Section, pending: &mut Option<(String, usize, Vec<String>)>| -> Result<()> {
        let Some((name, line, tokens)) = pending.take() else {
            return Ok(());
        };
        let toks: Vec<&str> = tokens.iter().map(String::as_str).collect();
        match section {
            Section::Objective => model.objective = parse_terms(&toks, line)?,
            Section::Rows => {
                let at = toks
                    .iter()
                    .position(|t| Sense::parse(t).is_some())
                    .ok_or_else(|| Error::parse(line, format!("row {name} has no sense")))?;
                if at + 2 != toks.len() {
                    return Err(Error::parse(line, format!("row {name} needs a single constant on the right")));
                }
                let rhs = number(toks[at + 1]).ok_or_else(|| Error::parse(line, format!("bad constant in row {name}")))?;
                model.rows.push(Row {
                    name,
                    terms: parse_terms(&toks[..at], line)?,
                    sense: Sense::parse(toks[at]).expect("checked above"),
                    rhs,
                });
            }
            _ => {}
        }
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = raw.trim();
        if let Some(comment) = trimmed.strip_prefix('\\') {
            model.comments.push(comment.trim().to_string());
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        if let Some(next) = section_of(trimmed) {
            flush(&mut model, section, &mut pending)?;
            section = next;
            continue;
        }
        match section {
            Section::Preamble | Section::Done => {
                return Err(Error::parse(lineno, format!("text outside any section: {trimmed:?}")));
            }
            Section::Objective | Section::Rows => {
                // a label starts a new statement; other lines continue it
                let (label, body) = match trimmed.split_once(':') {
                    Some((l, b)) => (Some(l.trim().to_string()), b),
                    None => (None, trimmed),
                };
                if let Some(label) = label {
                    flush(&mut model, section, &mut pending)?;
                    pending = Some((label, lineno, Vec::new()));
                }
                let (_, _, tokens) = pending
                    .as_mut()
                    .ok_or_else(|| Error::parse(lineno, "statement without a name"))?;
                tokens.extend(body.split_whitespace().map(String::from));
            }
            Section::Bounds => {
                let toks: Vec<&str> = trimmed.split_whitespace().collect();
                let bad = || Error::parse(lineno, format!("unsupported bound {trimmed:?}"));
                match toks.as_slice() {
                    [lo, "<=", var, "<=", hi] => {
                        model.bounds.push((var.to_string(), number(lo).ok_or_else(bad)?, number(hi).ok_or_else(bad)?))
                    }
                    [var, "<=", hi] => model.bounds.push((var.to_string(), 0.0, number(hi).ok_or_else(bad)?)),
                    [var, ">=", lo] => model.bounds.push((var.to_string(), number(lo).ok_or_else(bad)?, f64::INFINITY)),
                    [var, "free"] => model.bounds.push((var.to_string(), f64::NEG_INFINITY, f64::INFINITY)),
                    _ => return Err(bad()),
                }
            }
            Section::Binaries => model.binaries.extend(trimmed.split_whitespace().map(String::from)),
            Section::Generals => model.generals.extend(trimmed.split_whitespace().map(String::from)),
        }
    }
    flush(&mut model, section, &mut pending)?;
    if section != Section::Done {
        return Err(Error::parse(text.lines().count(), "missing End"));
    }
    Ok(model)
}

/// Every row, bound and integrality condition that `values` violates.
/// Variables missing from `values` count as zero.
pub fn check_assignment(model: &LpModel, values: &HashMap<String, f64>) -> Vec<String> {
    let tol = |scale: f64| 1e-6 * scale.abs().max(1.0);
    let mut bad = Vec::new();
    for row in &model.rows {
        let lhs = row.lhs(values);
        let ok = match row.sense {
            Sense::Le => lhs <= row.rhs + tol(row.rhs),
            Sense::Ge => lhs >= row.rhs - tol(row.rhs),
            Sense::Eq => (lhs - row.rhs).abs() <= tol(row.rhs),
        };
        if !ok {
            bad.push(format!("row {}: lhs {lhs} {} {}", row.name, row.sense.symbol(), row.rhs));
        }
    }
    let bounded: HashMap<&str, (f64, f64)> = model.bounds.iter().map(|(v, lo, hi)| (v.as_str(), (*lo, *hi))).collect();
    for (var, &value) in values {
        let (lo, hi) = bounded.get(var.as_str()).copied().unwrap_or((0.0, f64::INFINITY));
        if value < lo - tol(lo) || value > hi + tol(hi) {
            bad.push(format!("bound {var} = {value} outside [{lo}, {hi}]"));
        }
    }
    for var in &model.binaries {
        let value = values.get(var).copied().unwrap_or(0.0);
        if value != 0.0 && value != 1.0 {
            bad.push(format!("binary {var} = {value}"));
        }
    }
    for var in &model.generals {
        let value = values.get(var).copied().unwrap_or(0.0);
        if value.fract() != 0.0 {
            bad.push(format!("integer {var} = {value}"));
        }
    }
    bad.sort();
    bad
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LpModel {
        let mut r = Row::new("c1");
        r.add(1.0, "x");
        r.add(-2.5, "y");
        LpModel {
            comments: vec!["demo".into()],
            objective: vec![(3.0, "x".into()), (1.0, "y".into())],
            rows: vec![r.ge(-1.0)],
            bounds: vec![("y".into(), 0.0, 4.0)],
            binaries: vec!["x".into()],
            generals: vec![],
        }
    }

    #[test]
    fn writes_and_reads_back() {
        let m = sample();
        let text = m.to_lp();
        assert!(text.contains(" c1: + x - 2.5 y >= -1\n"));
        assert_eq!(parse_lp(&text).unwrap(), m);
        assert!(m.undeclared().is_empty());
    }

    #[test]
    fn long_rows_wrap() {
        let mut r = Row::new("long");
        for i in 0..100 {
            r.add(1.0, format!("var_{i}"));
        }
        let m = LpModel {
            rows: vec![r.le(5.0)],
            ..LpModel::default()
        };
        let text = m.to_lp();
        assert!(text.lines().all(|l| l.len() <= LINE_WIDTH + 20));
        assert_eq!(parse_lp(&text).unwrap(), m);
    }

    #[test]
    fn checker_flags_violations() {
        let m = sample();
        let mut vals = HashMap::from([("x".to_string(), 1.0), ("y".to_string(), 0.5)]);
        assert!(check_assignment(&m, &vals).is_empty());
        vals.insert("y".into(), 1.0);
        assert_eq!(check_assignment(&m, &vals).len(), 1);
        vals.insert("x".into(), 0.5);
        assert!(check_assignment(&m, &vals).iter().any(|v| v.starts_with("binary")));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_lp("Minimize\n obj: + x\nSubject To\n c: + x\nEnd\n").is_err());
        assert!(parse_lp("Minimize\n obj: + x\n").is_err());
        assert!(parse_lp("hello\n").is_err());
    }
}

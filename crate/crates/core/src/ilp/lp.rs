//! A plain mixed-integer program container with CPLEX-LP and MPS writers and
//! an MPS reader.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::format::format_number;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

impl Variable {
    pub fn binary(name: String) -> Self {
        Variable {
            name,
            kind: VarKind::Binary,
            lower: 0.0,
            upper: 1.0,
        }
    }

    pub fn nonnegative(name: String) -> Self {
        Variable {
            name,
            kind: VarKind::Continuous,
            lower: 0.0,
            upper: f64::INFINITY,
        }
    }

    pub fn free(name: String) -> Self {
        Variable {
            name,
            kind: VarKind::Continuous,
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        }
    }

    pub fn is_fixed(&self) -> bool {
        self.lower == self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn lp_symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    fn mps_code(self) -> &'static str {
        match self {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        }
    }

    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Sense::Le => lhs <= rhs + tol,
            Sense::Ge => lhs >= rhs - tol,
            Sense::Eq => (lhs - rhs).abs() <= tol,
        }
    }
}

/// A linear constraint; terms are sorted by variable index.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Minimize `objective . x + 1/2 sum q_j x_j^2` subject to `rows` and the
/// variable bounds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub name: String,
    pub variables: Vec<Variable>,
    pub rows: Vec<Row>,
    pub objective: Vec<(usize, f64)>,
    /// Diagonal quadratic objective coefficients `q_j`.
    pub quadratic: Vec<(usize, f64)>,
}

impl LinearProgram {
    pub fn add_variable(&mut self, v: Variable) -> usize {
        self.variables.push(v);
        self.variables.len() - 1
    }

    pub fn add_row(&mut self, name: String, mut terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        terms.sort_by_key(|&(j, _)| j);
        self.rows.push(Row {
            name,
            terms,
            sense,
            rhs,
        });
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        let lin: f64 = self.objective.iter().map(|&(j, c)| c * x[j]).sum();
        let quad: f64 = self.quadratic.iter().map(|&(j, q)| 0.5 * q * x[j] * x[j]).sum();
        lin + quad
    }

    /// Names of the first violated row or bound, if any.
    pub fn violation(&self, x: &[f64], tol: f64) -> Option<String> {
        for (v, &val) in self.variables.iter().zip(x) {
            if val < v.lower - tol || val > v.upper + tol {
                return Some(v.name.clone());
            }
            if v.kind == VarKind::Binary && (val - val.round()).abs() > tol {
                return Some(v.name.clone());
            }
        }
        self.rows
            .iter()
            .find(|r| {
                let lhs: f64 = r.terms.iter().map(|&(j, c)| c * x[j]).sum();
                !r.sense.holds(lhs, r.rhs, tol)
            })
            .map(|r| r.name.clone())
    }

    pub fn to_lp(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "\\ Problem: {}", self.name);
        out.push_str("Minimize\n obj:");
        let mut line = terms_text(&self.objective, &self.variables);
        if !self.quadratic.is_empty() {
            let quad: Vec<String> = self
                .quadratic
                .iter()
                .map(|&(j, q)| format!("{} {} ^2", format_number(q), self.variables[j].name))
                .collect();
            if !line.is_empty() {
                line.push_str(" +");
            }
            let _ = write!(line, " [ {} ] / 2", quad.join(" + "));
        }
        if line.is_empty() {
            line = format!(" 0 {}", self.variables[0].name);
        }
        let _ = writeln!(out, "{}", line);
        out.push_str("Subject To\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                " {}:{} {} {}",
                r.name,
                terms_text(&r.terms, &self.variables),
                r.sense.lp_symbol(),
                format_number(r.rhs)
            );
        }
        out.push_str("Bounds\n");
        for v in &self.variables {
            let default_upper = match v.kind {
                VarKind::Binary => 1.0,
                VarKind::Continuous => f64::INFINITY,
            };
            if v.is_fixed() {
                let _ = writeln!(out, " {} = {}", v.name, format_number(v.lower));
            } else if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
                let _ = writeln!(out, " {} free", v.name);
            } else if v.lower != 0.0 || v.upper != default_upper {
                let lo = if v.lower == f64::NEG_INFINITY {
                    "-inf".to_string()
                } else {
                    format_number(v.lower)
                };
                let hi = if v.upper == f64::INFINITY {
                    "+inf".to_string()
                } else {
                    format_number(v.upper)
                };
                let _ = writeln!(out, " {} <= {} <= {}", lo, v.name, hi);
            }
        }
        let binaries: Vec<&str> = self
            .variables
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .map(|v| v.name.as_str())
            .collect();
        if !binaries.is_empty() {
            out.push_str("Binary\n");
            for chunk in binaries.chunks(8) {
                let _ = writeln!(out, " {}", chunk.join(" "));
            }
        }
        out.push_str("End\n");
        out
    }

    pub fn to_mps(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "NAME          {}", self.name);
        out.push_str("ROWS\n N  obj\n");
        for r in &self.rows {
            let _ = writeln!(out, " {}  {}", r.sense.mps_code(), r.name);
        }
        let mut entries: Vec<Vec<(&str, f64)>> = vec![Vec::new(); self.variables.len()];
        for &(j, c) in &self.objective {
            entries[j].push(("obj", c));
        }
        for r in &self.rows {
            for &(j, c) in &r.terms {
                entries[j].push((r.name.as_str(), c));
            }
        }
        out.push_str("COLUMNS\n");
        let mut integer = false;
        for (v, col) in self.variables.iter().zip(&entries) {
            let is_int = v.kind == VarKind::Binary;
            if is_int != integer {
                let tag = if is_int { "'INTORG'" } else { "'INTEND'" };
                let _ = writeln!(out, "    MARKER                 'MARKER'                 {}", tag);
                integer = is_int;
            }
            if col.is_empty() {
                let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", v.name, "obj", "0");
            }
            for &(row, c) in col {
                let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", v.name, row, format_number(c));
            }
        }
        if integer {
            out.push_str("    MARKER                 'MARKER'                 'INTEND'\n");
        }
        out.push_str("RHS\n");
        for r in self.rows.iter().filter(|r| r.rhs != 0.0) {
            let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", "RHS", r.name, format_number(r.rhs));
        }
        out.push_str("BOUNDS\n");
        for v in &self.variables {
            let mut bound = |code: &str, value: Option<f64>| {
                let value = value.map(format_number).unwrap_or_default();
                let _ = writeln!(out, " {} BND       {:<8}  {:>12}", code, v.name, value);
            };
            if v.is_fixed() {
                bound("FX", Some(v.lower));
                continue;
            }
            if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
                bound("FR", None);
                continue;
            }
            if v.lower == f64::NEG_INFINITY {
                bound("MI", None);
            } else if v.lower != 0.0 {
                bound("LO", Some(v.lower));
            }
            if v.upper != f64::INFINITY {
                bound("UP", Some(v.upper));
            }
        }
        if !self.quadratic.is_empty() {
            out.push_str("QUADOBJ\n");
            for &(j, q) in &self.quadratic {
                let name = &self.variables[j].name;
                let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", name, name, format_number(q));
            }
        }
        out.push_str("ENDATA\n");
        out
    }
}

fn terms_text(terms: &[(usize, f64)], vars: &[Variable]) -> String {
    let mut s = String::new();
    for (i, &(j, c)) in terms.iter().enumerate() {
        let sign = if c < 0.0 { "-" } else { "+" };
        let mag = c.abs();
        let coef = if mag == 1.0 {
            String::new()
        } else {
            format!("{} ", format_number(mag))
        };
        if i > 0 && i % 8 == 0 {
            s.push_str("\n   ");
        }
        if i == 0 && c >= 0.0 {
            let _ = write!(s, " {}{}", coef, vars[j].name);
        } else {
            let _ = write!(s, " {} {}{}", sign, coef, vars[j].name);
        }
    }
    s
}

/// Reads MPS text as written by [`LinearProgram::to_mps`]. Fields are
/// whitespace-separated, so names longer than the fixed-width columns are
/// accepted. Integer columns with bounds `[0, 1]` (or fixed inside them) are
/// read as binaries.
pub fn parse_mps(text: &str) -> Result<LinearProgram> {
    let mut lp = LinearProgram::default();
    let mut section = "";
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut objective_row = String::new();
    let mut integer = false;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let err = |message: &str| Error::Parse {
            line: lineno,
            message: message.to_string(),
        };
        if line.trim().is_empty() || line.starts_with('*') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if !line.starts_with(' ') {
            section = f[0];
            match section {
                "NAME" => lp.name = f.get(1).unwrap_or(&"").to_string(),
                "ROWS" | "COLUMNS" | "RHS" | "BOUNDS" | "QUADOBJ" | "ENDATA" => {}
                _ => return Err(err(&format!("unknown section {}", section))),
            }
            continue;
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| err(&format!("invalid number {:?}", s)));
        match section {
            "ROWS" => {
                if f.len() != 2 {
                    return Err(err("expected `type name`"));
                }
                let sense = match f[0] {
                    "N" => {
                        objective_row = f[1].to_string();
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    other => return Err(err(&format!("unknown row type {}", other))),
                };
                row_index.insert(f[1].to_string(), lp.rows.len());
                lp.rows.push(Row {
                    name: f[1].to_string(),
                    terms: Vec::new(),
                    sense,
                    rhs: 0.0,
                });
            }
            "COLUMNS" => {
                if f.len() == 3 && f[1] == "'MARKER'" {
                    integer = f[2] == "'INTORG'";
                    continue;
                }
                if f.len() != 3 && f.len() != 5 {
                    return Err(err("expected `column row value [row value]`"));
                }
                let j = *col_index.entry(f[0].to_string()).or_insert_with(|| {
                    lp.variables.push(Variable {
                        name: f[0].to_string(),
                        kind: if integer { VarKind::Binary } else { VarKind::Continuous },
                        lower: 0.0,
                        upper: f64::INFINITY,
                    });
                    lp.variables.len() - 1
                });
                for pair in f[1..].chunks(2) {
                    let c = num(pair[1])?;
                    if pair[0] == objective_row {
                        if c != 0.0 {
                            lp.objective.push((j, c));
                        }
                    } else {
                        let r = *row_index
                            .get(pair[0])
                            .ok_or_else(|| err(&format!("unknown row {}", pair[0])))?;
                        lp.rows[r].terms.push((j, c));
                    }
                }
            }
            "RHS" => {
                for pair in f[1..].chunks(2) {
                    if pair.len() != 2 {
                        return Err(err("expected `set row value`"));
                    }
                    let r = *row_index
                        .get(pair[0])
                        .ok_or_else(|| err(&format!("unknown row {}", pair[0])))?;
                    lp.rows[r].rhs = num(pair[1])?;
                }
            }
            "BOUNDS" => {
                if f.len() < 3 {
                    return Err(err("expected `type set column [value]`"));
                }
                let j = *col_index
                    .get(f[2])
                    .ok_or_else(|| err(&format!("unknown column {}", f[2])))?;
                let value = || -> Result<f64> {
                    f.get(3).map(|s| num(s)).unwrap_or_else(|| Err(err("missing bound value")))
                };
                let v = &mut lp.variables[j];
                match f[0] {
                    "UP" => v.upper = value()?,
                    "LO" => v.lower = value()?,
                    "FX" => {
                        v.lower = value()?;
                        v.upper = v.lower;
                    }
                    "FR" => {
                        v.lower = f64::NEG_INFINITY;
                        v.upper = f64::INFINITY;
                    }
                    "MI" => v.lower = f64::NEG_INFINITY,
                    "PL" => v.upper = f64::INFINITY,
                    "BV" => {
                        v.lower = 0.0;
                        v.upper = 1.0;
                    }
                    other => return Err(err(&format!("unknown bound type {}", other))),
                }
            }
            "QUADOBJ" => {
                if f.len() != 3 || f[0] != f[1] {
                    return Err(err("only diagonal quadratic terms are supported"));
                }
                let j = *col_index
                    .get(f[0])
                    .ok_or_else(|| err(&format!("unknown column {}", f[0])))?;
                lp.quadratic.push((j, num(f[2])?));
            }
            _ => return Err(err("data outside a section")),
        }
    }
    for v in &mut lp.variables {
        if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
            v.kind = VarKind::Continuous;
        }
    }
    for r in &mut lp.rows {
        r.terms.sort_by_key(|&(j, _)| j);
    }
    lp.objective.sort_by_key(|&(j, _)| j);
    Ok(lp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> LinearProgram {
        let mut lp = LinearProgram {
            name: "small".to_string(),
            ..Default::default()
        };
        let x = lp.add_variable(Variable::binary("x".to_string()));
        let y = lp.add_variable(Variable::nonnegative("y".to_string()));
        let r = lp.add_variable(Variable::free("r".to_string()));
        lp.add_row("c1".to_string(), vec![(y, 1.0), (x, -2.5)], Sense::Le, 0.0);
        lp.add_row("c2".to_string(), vec![(r, 1.0), (y, 1.0)], Sense::Eq, 3.0);
        lp.objective = vec![(y, 1.0)];
        lp.quadratic = vec![(r, 2.0)];
        lp
    }

    #[test]
    fn lp_text() {
        let text = small().to_lp();
        assert!(text.contains(" obj: y + [ 2 r ^2 ] / 2\n"));
        assert!(text.contains(" c1: - 2.5 x + y <= 0\n"));
        assert!(text.contains(" r free\n"));
        assert!(text.contains("Binary\n x\n"));
    }

    #[test]
    fn mps_round_trip() {
        let mut lp = small();
        lp.variables[0].lower = 1.0;
        assert_eq!(parse_mps(&lp.to_mps()).unwrap(), lp);
    }

    #[test]
    fn feasibility_check() {
        let lp = small();
        assert_eq!(lp.violation(&[1.0, 2.0, 1.0], 1e-9), None);
        assert_eq!(lp.violation(&[0.0, 2.0, 1.0], 1e-9), Some("c1".to_string()));
        assert_eq!(lp.objective_value(&[1.0, 2.0, 1.0]), 3.0);
    }

    #[test]
    fn mps_errors_carry_lines() {
        let err = parse_mps("NAME x\nROWS\n Q  r\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }
}

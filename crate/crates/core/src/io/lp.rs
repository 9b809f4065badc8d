//! Textual LP format.
//!
//! ```text
//! Maximize
//!  obj: 0.5 c_1 + 0.3 c_2
//! Subject To
//!  topology_planarity_0: c_1 + c_2 <= 1
//! Bounds
//!  0 <= su_0 <= 1
//! Binary
//!  c_1
//!  c_2
//! End
//! ```
//!
//! Constraints are named `<family>_<position>`. Numbers carry 9 significant
//! digits and unit coefficients are written without a number. Binaries are
//! listed in declaration order, then slacks in the `Bounds` section. A
//! constraint counts as softened when it contains a slack.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ipbuild::{BinaryProgram, Family, LinearConstraint, Relation, VarKind, VarRef};

/// Formats `v` with 9 significant digits, dropping trailing zeros. Exponents
/// outside `[-4, 9)` use scientific notation.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn write_terms(out: &mut String, terms: &[(f64, VarRef)]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (i, (coef, var)) in terms.iter().enumerate() {
        let sign = if *coef < 0.0 { "-" } else { "+" };
        match (i, sign) {
            (0, "+") => out.push(' '),
            (0, _) => out.push_str(" - "),
            _ => {
                let _ = write!(out, " {sign} ");
            }
        }
        let mag = coef.abs();
        if mag != 1.0 {
            let _ = write!(out, "{} ", format_number(mag));
        }
        let _ = write!(out, "{var}");
    }
}

pub fn write_lp(p: &BinaryProgram) -> String {
    let mut out = String::from("Maximize\n obj:");
    let obj: Vec<(f64, VarRef)> =
        p.variables().iter().zip(p.objective()).filter(|(_, c)| **c != 0.0).map(|(v, c)| (*c, v.var)).collect();
    if !obj.is_empty() {
        write_terms(&mut out, &obj);
    }
    out.push_str("\nSubject To\n");
    for (i, c) in p.constraints.iter().enumerate() {
        let _ = write!(out, " {}_{i}:", c.family.tag());
        write_terms(&mut out, &c.terms);
        let _ = writeln!(out, " {} {}", c.relation.symbol(), format_number(c.rhs));
    }
    out.push_str("Bounds\n");
    for v in p.variables() {
        if let VarKind::Slack { cap } = v.kind {
            let _ = writeln!(out, " 0 <= {} <= {}", v.var, format_number(cap));
        }
    }
    out.push_str("Binary\n");
    for v in p.variables() {
        if v.kind == VarKind::Binary {
            let _ = writeln!(out, " {}", v.var);
        }
    }
    out.push_str("End\n");
    out
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("LP line {line}: {msg}"))
}

fn parse_var(tok: &str, line: usize) -> Result<VarRef> {
    VarRef::parse(tok).ok_or_else(|| parse_err(line, format!("bad variable name '{tok}'")))
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| parse_err(line, format!("bad number '{tok}'")))
}

/// Parses `[-] [coef] var (+|- [coef] var)*`, or a lone `0`.
fn parse_terms(s: &str, line: usize) -> Result<Vec<(f64, VarRef)>> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    if toks.is_empty() || toks == ["0"] {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut i = 0;
    let mut sign: f64;
    let mut first = true;
    while i < toks.len() {
        match toks[i] {
            "+" | "-" => {
                sign = if toks[i] == "-" { -1.0 } else { 1.0 };
                i += 1;
            }
            _ if !first => return Err(parse_err(line, "expected '+' or '-'")),
            _ => sign = 1.0,
        }
        first = false;
        let tok = toks.get(i).ok_or_else(|| parse_err(line, "dangling sign"))?;
        let coef = if VarRef::parse(tok).is_some() {
            1.0
        } else {
            i += 1;
            parse_num(tok, line)?
        };
        let var = parse_var(toks.get(i).ok_or_else(|| parse_err(line, "missing variable"))?, line)?;
        terms.push((sign * coef, var));
        i += 1;
    }
    Ok(terms)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Start,
    Objective,
    Constraints,
    Bounds,
    Binary,
    End,
}

/// Reads a program written by [`write_lp`].
pub fn parse_lp(text: &str) -> Result<BinaryProgram> {
    let mut section = Section::Start;
    let mut objective = Vec::new();
    let mut constraints = Vec::new();
    let mut slacks = Vec::new();
    let mut binaries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let ln = n + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        let next = match line {
            "Maximize" => Some(Section::Objective),
            "Subject To" => Some(Section::Constraints),
            "Bounds" => Some(Section::Bounds),
            "Binary" => Some(Section::Binary),
            "End" => Some(Section::End),
            _ => None,
        };
        if let Some(s) = next {
            if s as u8 <= section as u8 {
                return Err(parse_err(ln, format!("section '{line}' out of order")));
            }
            section = s;
            continue;
        }
        match section {
            Section::Objective => {
                let body = line.strip_prefix("obj:").ok_or_else(|| parse_err(ln, "expected 'obj:'"))?;
                objective.extend(parse_terms(body, ln)?);
            }
            Section::Constraints => {
                let (name, body) = line.split_once(':').ok_or_else(|| parse_err(ln, "constraint without a name"))?;
                let tag = name.rsplit_once('_').map(|(t, _)| t).unwrap_or("");
                let family =
                    Family::from_tag(tag).ok_or_else(|| parse_err(ln, format!("unknown family in '{name}'")))?;
                let toks: Vec<&str> = body.split_whitespace().collect();
                if toks.len() < 3 {
                    return Err(parse_err(ln, "constraint is too short"));
                }
                let relation = match toks[toks.len() - 2] {
                    "<=" => Relation::Le,
                    "=" => Relation::Eq,
                    ">=" => Relation::Ge,
                    other => return Err(parse_err(ln, format!("bad relation '{other}'"))),
                };
                let rhs = parse_num(toks[toks.len() - 1], ln)?;
                let terms = parse_terms(&toks[..toks.len() - 2].join(" "), ln)?;
                let softened = terms.iter().any(|(_, v)| v.is_slack());
                constraints.push(LinearConstraint { terms, relation, rhs, family, softened });
            }
            Section::Bounds => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                match toks.as_slice() {
                    ["0", "<=", var, "<=", cap] => slacks.push((parse_var(var, ln)?, parse_num(cap, ln)?)),
                    _ => return Err(parse_err(ln, "expected '0 <= var <= cap'")),
                }
            }
            Section::Binary => binaries.push(parse_var(line, ln)?),
            Section::Start | Section::End => return Err(parse_err(ln, "text outside a section")),
        }
    }
    if section != Section::End {
        return Err(Error::Parse("LP text does not end with 'End'".into()));
    }
    let mut p = BinaryProgram::new();
    for v in binaries {
        if p.contains(&v) {
            return Err(Error::Parse(format!("{v} declared twice")));
        }
        p.declare_binary(v);
    }
    for (v, cap) in slacks {
        if p.contains(&v) || !v.is_slack() {
            return Err(Error::Parse(format!("bad bound on {v}")));
        }
        p.declare(v, VarKind::Slack { cap });
    }
    for (coef, v) in objective {
        p.add_objective(&v, coef)?;
    }
    for c in constraints {
        p.add_constraint(c)?;
    }
    Ok(p)
}

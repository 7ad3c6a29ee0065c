use std::fmt::Write;

use super::model::{LinearModel, Relation, VarId};

fn sanitize(name: &str, id: usize) -> String {
    let clean: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "_.".contains(c) { c } else { '_' })
        .collect();
    if clean.is_empty() || clean.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        format!("v{id}_{clean}")
    } else {
        clean
    }
}

fn write_terms(out: &mut String, names: &[String], terms: &[(VarId, f64)]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (idx, &(v, c)) in terms.iter().enumerate() {
        let sign = if c < 0.0 { '-' } else { '+' };
        if idx == 0 && c >= 0.0 {
            let _ = write!(out, " {} {}", c.abs(), names[v.0]);
        } else {
            let _ = write!(out, " {sign} {} {}", c.abs(), names[v.0]);
        }
    }
}

/// Renders the model in CPLEX LP format.
pub fn write_lp(model: &LinearModel) -> String {
    let names: Vec<String> = model.vars.iter().enumerate().map(|(i, v)| sanitize(&v.name, i)).collect();
    let mut out = String::from("\\ exported by robust-appt\nMinimize\n obj:");
    write_terms(&mut out, &names, &model.objective);
    if model.objective_offset != 0.0 {
        let _ = write!(out, " + {}", model.objective_offset);
    }
    out.push_str("\nSubject To\n");
    for (r, c) in model.constraints.iter().enumerate() {
        let _ = write!(out, " {}:", sanitize(&c.name, r));
        write_terms(&mut out, &names, &c.terms);
        let rel = match c.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(out, " {rel} {}", c.rhs);
    }
    out.push_str("Bounds\n");
    for (v, name) in model.vars.iter().zip(&names).filter(|(v, _)| !v.binary) {
        let _ = writeln!(out, " {} <= {name} <= {}", v.lower, v.upper);
    }
    let binaries: Vec<&String> = model.vars.iter().zip(&names).filter(|(v, _)| v.binary).map(|(_, n)| n).collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for name in binaries {
            let _ = writeln!(out, " {name}");
        }
    }
    out.push_str("End\n");
    out
}

use std::collections::BTreeMap;

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub binary: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear expression `sum coef * var + constant`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinExpr {
    terms: BTreeMap<VarId, f64>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        LinExpr { terms: BTreeMap::new(), constant: c }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (VarId, f64)>) -> Self {
        let mut e = Self::new();
        for (v, c) in terms {
            e.add(v, c);
        }
        e
    }

    pub fn add(&mut self, var: VarId, coef: f64) -> &mut Self {
        *self.terms.entry(var).or_insert(0.0) += coef;
        self
    }

    pub fn add_const(&mut self, c: f64) -> &mut Self {
        self.constant += c;
        self
    }

    /// Adds `scale * other`.
    pub fn add_expr(&mut self, other: &LinExpr, scale: f64) -> &mut Self {
        for (&v, &c) in &other.terms {
            self.add(v, scale * c);
        }
        self.constant += scale * other.constant;
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (VarId, f64)> + '_ {
        self.terms.iter().map(|(&v, &c)| (v, c)).filter(|&(_, c)| c != 0.0)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.constant + self.terms().map(|(v, c)| c * x[v.0]).sum::<f64>()
    }
}

/// A bounded-variable mixed-binary linear program, minimized.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearModel {
    pub vars: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(VarId, f64)>,
    pub objective_offset: f64,
}

impl LinearModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        self.vars.push(Variable { name: name.into(), lower, upper, binary: false });
        VarId(self.vars.len() - 1)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.vars.push(Variable { name: name.into(), lower: 0.0, upper: 1.0, binary: true });
        VarId(self.vars.len() - 1)
    }

    /// Adds `expr rel rhs`, moving the expression's constant to the right.
    pub fn add_constraint(&mut self, name: impl Into<String>, expr: LinExpr, relation: Relation, rhs: f64) {
        let terms = expr.terms().collect();
        self.constraints.push(Constraint { name: name.into(), terms, relation, rhs: rhs - expr.constant });
    }

    /// Adds `lhs rel rhs` for two expressions.
    pub fn add_row(&mut self, name: impl Into<String>, lhs: &LinExpr, relation: Relation, rhs: &LinExpr) {
        let mut e = lhs.clone();
        e.add_expr(rhs, -1.0);
        self.add_constraint(name, e, relation, 0.0);
    }

    pub fn set_objective(&mut self, expr: LinExpr) {
        self.objective = expr.terms().collect();
        self.objective_offset = expr.constant;
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.binary).count()
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn validate(&self) -> Result<()> {
        for v in &self.vars {
            if !v.lower.is_finite() || !v.upper.is_finite() || v.lower > v.upper {
                return Err(invalid(format!("variable {} has bounds [{}, {}]", v.name, v.lower, v.upper)));
            }
            if v.binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(invalid(format!("binary {} must have bounds within [0, 1]", v.name)));
            }
        }
        let n = self.vars.len();
        let refs = self.constraints.iter().flat_map(|c| c.terms.iter()).chain(&self.objective);
        for &(v, coef) in refs {
            if v.0 >= n {
                return Err(invalid(format!("reference to undeclared variable {}", v.0)));
            }
            if !coef.is_finite() {
                return Err(invalid(format!("non-finite coefficient on {}", self.vars[v.0].name)));
            }
        }
        if let Some(c) = self.constraints.iter().find(|c| !c.rhs.is_finite()) {
            return Err(invalid(format!("constraint {} has a non-finite right-hand side", c.name)));
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_offset + self.objective.iter().map(|&(v, c)| c * x[v.0]).sum::<f64>()
    }

    /// Largest violation of any bound or constraint at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (v, &xv) in self.vars.iter().zip(x) {
            worst = worst.max(v.lower - xv).max(xv - v.upper);
        }
        for c in &self.constraints {
            let lhs: f64 = c.terms.iter().map(|&(v, a)| a * x[v.0]).sum();
            let gap = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(gap);
        }
        worst
    }

    /// Largest distance of a binary from {0, 1} at `x`.
    pub fn max_integrality_gap(&self, x: &[f64]) -> f64 {
        self.vars
            .iter()
            .zip(x)
            .filter(|(v, _)| v.binary)
            .map(|(_, &xv)| (xv - xv.round()).abs())
            .fold(0.0, f64::max)
    }
}

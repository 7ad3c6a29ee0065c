//! Branch and bound over the binary variables.
//!
//! Until the first incumbent is found the search dives depth first; after
//! that it switches to best-bound order with deeper nodes preferred on ties.
//! Each node re-solves its LP from scratch with tightened bounds.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use super::model::LinearModel;
use super::simplex::{solve_lp, LpStatus, SimplexOptions};
use super::{MilpSolution, MilpStatus};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct BnbOptions {
    pub time_limit: Option<Duration>,
    pub node_limit: usize,
    /// Absolute optimality gap used for pruning.
    pub gap_tol: f64,
    pub int_tol: f64,
    /// Only solutions strictly better than this value are of interest.
    pub cutoff: Option<f64>,
    pub simplex: SimplexOptions,
}

impl Default for BnbOptions {
    fn default() -> Self {
        BnbOptions {
            time_limit: None,
            node_limit: 1_000_000,
            gap_tol: 1e-7,
            int_tol: 1e-6,
            cutoff: None,
            simplex: SimplexOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
struct Node {
    fixes: Vec<(usize, f64)>,
    bound: f64,
    id: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    /// Max-heap order: lower bound first, then deeper, then older.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.fixes.len().cmp(&other.fixes.len()))
            .then(other.id.cmp(&self.id))
    }
}

/// Solves `model` to optimality, or until `time_limit` seconds elapse.
pub fn branch_and_bound(model: &LinearModel, time_limit: Option<f64>) -> Result<MilpSolution> {
    let opts = BnbOptions { time_limit: time_limit.map(Duration::from_secs_f64), ..Default::default() };
    branch_and_bound_with(model, &opts)
}

pub fn branch_and_bound_with(model: &LinearModel, opts: &BnbOptions) -> Result<MilpSolution> {
    model.validate()?;
    let t0 = Instant::now();
    let base_lo: Vec<f64> = model.vars.iter().map(|v| v.lower).collect();
    let base_hi: Vec<f64> = model.vars.iter().map(|v| v.upper).collect();
    let binaries: Vec<usize> = (0..model.vars.len()).filter(|&j| model.vars[j].binary).collect();

    let mut incumbent = opts.cutoff.unwrap_or(f64::INFINITY);
    let mut best_x: Vec<f64> = Vec::new();
    let mut dive: Vec<Node> = vec![Node { fixes: Vec::new(), bound: f64::NEG_INFINITY, id: 0 }];
    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut next_id = 1usize;
    let mut nodes = 0usize;
    let mut iterations = 0usize;
    let mut unresolved_bound = f64::INFINITY;
    let mut stopped: Option<MilpStatus> = None;
    let prune = |bound: f64, inc: f64| bound >= inc - opts.gap_tol - 1e-9 * inc.abs().min(1e12);

    loop {
        let node = if best_x.is_empty() {
            match dive.pop() {
                Some(n) => n,
                None => match heap.pop() {
                    Some(n) => n,
                    None => break,
                },
            }
        } else {
            if !dive.is_empty() {
                heap.extend(dive.drain(..));
            }
            match heap.pop() {
                Some(n) => n,
                None => break,
            }
        };
        if prune(node.bound, incumbent) {
            continue;
        }
        if opts.time_limit.is_some_and(|tl| t0.elapsed() >= tl) {
            stopped = Some(MilpStatus::TimeLimit);
            dive.push(node);
            break;
        }
        if nodes >= opts.node_limit {
            stopped = Some(MilpStatus::NodeLimit);
            dive.push(node);
            break;
        }
        nodes += 1;

        let mut lo = base_lo.clone();
        let mut hi = base_hi.clone();
        for &(j, v) in &node.fixes {
            lo[j] = v;
            hi[j] = v;
        }
        let lp = solve_lp(model, &lo, &hi, &opts.simplex)?;
        iterations += lp.iterations;
        match lp.status {
            LpStatus::Infeasible => continue,
            LpStatus::IterationLimit => {
                unresolved_bound = unresolved_bound.min(node.bound);
                continue;
            }
            LpStatus::Optimal => {}
        }
        if prune(lp.objective, incumbent) {
            continue;
        }

        let branch = binaries
            .iter()
            .map(|&j| (j, (lp.x[j] - lp.x[j].round()).abs()))
            .filter(|&(_, f)| f > opts.int_tol)
            .fold(None, |best: Option<(usize, f64)>, (j, f)| match best {
                Some((_, bf)) if bf >= f => best,
                _ => Some((j, f)),
            });

        let Some((j, _)) = branch else {
            // Integral: fix the binaries exactly and polish the continuous part.
            for &b in &binaries {
                let r = lp.x[b].round();
                lo[b] = r;
                hi[b] = r;
            }
            let polished = solve_lp(model, &lo, &hi, &opts.simplex)?;
            iterations += polished.iterations;
            let (obj, x) = if polished.status == LpStatus::Optimal {
                (polished.objective, polished.x)
            } else {
                (lp.objective, lp.x)
            };
            if obj < incumbent - opts.gap_tol || best_x.is_empty() && obj < incumbent {
                incumbent = obj;
                best_x = x;
            }
            continue;
        };

        let nearer = lp.x[j].round();
        let mut children = Vec::with_capacity(2);
        for v in [nearer, 1.0 - nearer] {
            let mut fixes = node.fixes.clone();
            fixes.push((j, v));
            children.push(Node { fixes, bound: lp.objective, id: next_id });
            next_id += 1;
        }
        if best_x.is_empty() {
            // Stack: the nearer child is explored first.
            children.reverse();
            dive.extend(children);
        } else {
            heap.extend(children);
        }
    }

    let open_bound = dive.iter().chain(heap.iter()).map(|n| n.bound).fold(f64::INFINITY, f64::min);
    let bound = open_bound.min(unresolved_bound).min(incumbent);
    let status = match stopped {
        Some(s) => s,
        None if unresolved_bound.is_finite() => MilpStatus::IterationLimit,
        None if !best_x.is_empty() => MilpStatus::Optimal,
        None if opts.cutoff.is_some() => MilpStatus::Cutoff,
        None => MilpStatus::Infeasible,
    };
    let objective = if best_x.is_empty() { f64::INFINITY } else { incumbent };
    Ok(MilpSolution { status, objective, values: best_x, bound, nodes, iterations, elapsed: t0.elapsed() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::model::{LinExpr, Relation};
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_binary() {
        let mut m = LinearModel::new();
        let b = m.add_binary("b");
        m.add_constraint("c", LinExpr::from_terms([(b, 1.0)]), Relation::Ge, 0.5);
        m.set_objective(LinExpr::from_terms([(b, 1.0)]));
        let s = branch_and_bound(&m, None).unwrap();
        assert_eq!(s.status, MilpStatus::Optimal);
        assert_abs_diff_eq!(s.objective, 1.0);
        assert_eq!(s.values[0], 1.0);
    }

    #[test]
    fn subset_sum() {
        let mut m = LinearModel::new();
        let a = [3.0, 5.0, 7.0];
        let ys: Vec<_> = (0..3).map(|i| m.add_binary(format!("y{i}"))).collect();
        let e = LinExpr::from_terms(ys.iter().copied().zip(a));
        m.add_constraint("t", e.clone(), Relation::Ge, 8.0);
        m.set_objective(e);
        let s = branch_and_bound(&m, None).unwrap();
        assert_eq!(s.status, MilpStatus::Optimal);
        assert_abs_diff_eq!(s.objective, 8.0, epsilon = 1e-9);
        assert!(m.max_violation(&s.values) <= 1e-6);
        assert_abs_diff_eq!(s.bound, 8.0, epsilon = 1e-9);
    }

    #[test]
    fn infeasible_and_cutoff() {
        let mut m = LinearModel::new();
        let b = m.add_binary("b");
        let c = m.add_binary("c");
        m.add_constraint("x", LinExpr::from_terms([(b, 1.0), (c, 1.0)]), Relation::Eq, 1.5);
        assert_eq!(branch_and_bound(&m, None).unwrap().status, MilpStatus::Infeasible);

        let mut m = LinearModel::new();
        let b = m.add_binary("b");
        m.set_objective(LinExpr::from_terms([(b, 1.0)]).add_const(2.0).clone());
        let opts = BnbOptions { cutoff: Some(2.0), ..Default::default() };
        let s = branch_and_bound_with(&m, &opts).unwrap();
        assert_eq!(s.status, MilpStatus::Cutoff);
        assert!(!s.has_solution());
    }

    #[test]
    fn knapsack_matches_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let n = rng.random_range(2..8);
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(1..10) as f64).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(1..10) as f64).collect();
            let cap = w.iter().sum::<f64>() / 2.0;
            let mut m = LinearModel::new();
            let ys: Vec<_> = (0..n).map(|i| m.add_binary(format!("y{i}"))).collect();
            m.add_constraint("cap", LinExpr::from_terms(ys.iter().copied().zip(w.clone())), Relation::Le, cap);
            m.set_objective(LinExpr::from_terms(ys.iter().copied().zip(v.iter().map(|x| -x))));
            let s = branch_and_bound(&m, None).unwrap();
            let mut best = 0.0f64;
            for mask in 0u32..(1 << n) {
                let (tw, tv) = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .fold((0.0, 0.0), |(a, b), i| (a + w[i], b + v[i]));
                if tw <= cap {
                    best = best.max(tv);
                }
            }
            assert_abs_diff_eq!(s.objective, -best, epsilon = 1e-7);
        }
    }

    #[test]
    fn node_limit_reports_bound() {
        let mut m = LinearModel::new();
        let ys: Vec<_> = (0..6).map(|i| m.add_binary(format!("y{i}"))).collect();
        m.add_constraint("c", LinExpr::from_terms(ys.iter().map(|&y| (y, 2.0))), Relation::Eq, 7.0);
        m.set_objective(LinExpr::from_terms(ys.iter().map(|&y| (y, 1.0))));
        let opts = BnbOptions { node_limit: 3, ..Default::default() };
        let s = branch_and_bound_with(&m, &opts).unwrap();
        assert_eq!(s.status, MilpStatus::NodeLimit);
        assert!(s.bound <= 3.5 + 1e-9);
    }
}

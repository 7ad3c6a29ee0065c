//! Polynomial rules: ASAP start times, SVF-WTG sequencing and their composition.

use crate::adversary::TopSum;
use crate::error::{Error, Result};
use crate::milp::{simplex_solve, LinExpr, LinearModel, MilpStatus, Relation};
use crate::model::{pos, CostShape, Instance, Schedule, Sequence};

/// How the worst-case window load `U` is computed inside the ASAP rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WindowBound {
    /// Sum of the `k - 1` largest maximum service times in the window.
    #[default]
    Closed,
    /// Solve the window LP with the simplex engine (for cross-checking).
    Lp,
}

/// Earliest start times meeting every worst-case waiting guarantee.
pub fn asap_schedule(inst: &Instance, seq: &Sequence) -> Result<Schedule> {
    asap_schedule_with(inst, seq, WindowBound::Closed)
}

pub fn asap_schedule_with(inst: &Instance, seq: &Sequence, bound: WindowBound) -> Result<Schedule> {
    inst.validate()?;
    if seq.len() != inst.n {
        return Err(crate::error::invalid(format!(
            "sequence has length {}, instance has n = {}",
            seq.len(),
            inst.n
        )));
    }
    let ub = seq.positional(&inst.service_ub);
    let w = seq.positional(&inst.wait_guarantee);
    let n = inst.n;
    let k = inst.show_count;
    let mut start = vec![0.0; n];
    if k > 0 {
        for i in 1..n {
            let mut latest = f64::NEG_INFINITY;
            match bound {
                WindowBound::Closed => {
                    let mut window = TopSum::new(k - 1);
                    for l in (0..i).rev() {
                        window.push(ub[l]);
                        latest = latest.max(start[l] + window.sum());
                    }
                }
                WindowBound::Lp => {
                    for l in 0..i {
                        latest = latest.max(start[l] + window_lp(&ub[l..i], k - 1)?);
                    }
                }
            }
            start[i] = pos(latest - w[i]);
        }
    }
    Schedule::new(seq.clone(), start)
}

/// `min (k-1) a + sum z` s.t. `z_s + a >= ub_s`, the dual of the max-(k-1)-sum.
fn window_lp(ub: &[f64], shows: usize) -> Result<f64> {
    let cap = ub.iter().copied().fold(0.0, f64::max);
    let mut m = LinearModel::new();
    let alpha = m.add_var("alpha", 0.0, cap);
    let mut obj = LinExpr::new();
    obj.add(alpha, shows as f64);
    for (s, &u) in ub.iter().enumerate() {
        let z = m.add_var(format!("z{s}"), 0.0, cap);
        obj.add(z, 1.0);
        m.add_constraint(format!("cover{s}"), LinExpr::from_terms([(z, 1.0), (alpha, 1.0)]), Relation::Ge, u);
    }
    m.set_objective(obj);
    let sol = simplex_solve(&m)?;
    if sol.status != MilpStatus::Optimal {
        return Err(Error::Solver(format!("window LP ended with status {:?}", sol.status)));
    }
    Ok(sol.objective)
}

/// Whether ASAP times are optimal for every fixed sequence (non-increasing idle costs).
pub fn asap_in_regime(inst: &Instance) -> bool {
    inst.has_non_increasing_costs()
}

/// Whether SVF-WTG is an optimal sequence (constant idle costs and no no-shows).
pub fn svf_in_regime(inst: &Instance) -> bool {
    inst.cost_shape() == CostShape::Constant && inst.all_show()
}

/// Sorts customers by `(ub - lb) + (1 + c_o) W`, ties by index.
pub fn svf_wtg_sequence(inst: &Instance) -> Sequence {
    let key = |j: usize| {
        (inst.service_ub[j] - inst.service_lb[j]) + (1.0 + inst.overtime_cost) * inst.wait_guarantee[j]
    };
    let mut order: Vec<usize> = (0..inst.n).collect();
    order.sort_by(|&a, &b| key(a).total_cmp(&key(b)));
    Sequence::new(order).expect("sorted indices form a permutation")
}

/// SVF-WTG followed by ASAP; optimal for constant costs without no-shows.
pub fn pta_solve(inst: &Instance) -> Result<Schedule> {
    inst.validate()?;
    if inst.cost_shape() != CostShape::Constant {
        return Err(Error::NotApplicable("PTA requires constant idle costs c_1 = ... = c_{n+1}".into()));
    }
    if !inst.all_show() {
        return Err(Error::NotApplicable(format!(
            "PTA requires show_count = n, found {} < {}",
            inst.show_count, inst.n
        )));
    }
    asap_schedule(inst, &svf_wtg_sequence(inst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{check_feasibility, worst_case_waits};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn identical(n: usize, lb: f64, ub: f64, w: f64, k: usize) -> Instance {
        Instance {
            n,
            service_lb: vec![lb; n],
            service_ub: vec![ub; n],
            wait_guarantee: vec![w; n],
            idle_cost: vec![1.0; n + 1],
            overtime_cost: 1.25,
            horizon: ub * n as f64 - w,
            show_count: k,
        }
    }

    #[test]
    fn plateau() {
        let inst = identical(10, 15.0, 25.0, 30.0, 10);
        let s = pta_solve(&inst).unwrap();
        assert_eq!(s.start, vec![0.0, 0.0, 20.0, 45.0, 70.0, 95.0, 120.0, 145.0, 170.0, 195.0]);
        assert_eq!(s.sequence, Sequence::identity(10));
    }

    #[test]
    fn zero_noshow_closed_form() {
        let mut inst = identical(4, 1.0, 7.0, 0.0, 4);
        inst.service_ub = vec![7.0, 3.0, 9.0, 2.0];
        inst.wait_guarantee = vec![0.0, 4.0, 1.0, 30.0];
        let s = asap_schedule(&inst, &Sequence::identity(4)).unwrap();
        assert_eq!(s.start, vec![0.0, 3.0, 9.0, 0.0]);
    }

    #[test]
    fn non_monotone_fixture() {
        let mut inst = identical(3, 10.0, 10.0, 0.0, 3);
        inst.wait_guarantee = vec![0.0, 0.0, 30.0];
        let s = asap_schedule(&inst, &Sequence::identity(3)).unwrap();
        assert_eq!(s.start, vec![0.0, 10.0, 0.0]);
    }

    #[test]
    fn nobody_shows_starts_everything_at_zero() {
        let inst = identical(3, 1.0, 5.0, 0.0, 0);
        assert_eq!(asap_schedule(&inst, &Sequence::identity(3)).unwrap().start, vec![0.0; 3]);
    }

    #[test]
    fn svf_keys() {
        let mut inst = identical(2, 0.0, 10.0, 30.0, 2);
        inst.service_ub = vec![10.0, 5.0];
        inst.wait_guarantee = vec![30.0, 10.0];
        assert_eq!(svf_wtg_sequence(&inst).to_one_based(), vec![2, 1]);
        assert_eq!(svf_wtg_sequence(&identical(4, 1.0, 2.0, 3.0, 4)), Sequence::identity(4));
    }

    #[test]
    fn pta_regime_errors() {
        let mut inst = identical(3, 1.0, 2.0, 3.0, 2);
        assert!(matches!(pta_solve(&inst), Err(Error::NotApplicable(_))));
        inst.show_count = 3;
        inst.idle_cost = vec![1.0, 0.9, 0.8, 0.7];
        assert!(matches!(pta_solve(&inst), Err(Error::NotApplicable(_))));
        assert!(pta_solve(&identical(1, 1.0, 2.0, 0.0, 1)).unwrap().start == vec![0.0]);
    }

    fn arb_instance() -> impl Strategy<Value = Instance> {
        (1usize..=6).prop_flat_map(|n| {
            (prop::collection::vec((0u8..6, 0u8..6, 0u8..15), n), 0..=n).prop_map(move |(c, k)| Instance {
                n,
                service_lb: c.iter().map(|x| x.0 as f64).collect(),
                service_ub: c.iter().map(|x| (x.0 + x.1) as f64).collect(),
                wait_guarantee: c.iter().map(|x| x.2 as f64).collect(),
                idle_cost: vec![1.0; n + 1],
                overtime_cost: 1.25,
                horizon: 10.0,
                show_count: k,
            })
        })
    }

    proptest! {
        #[test]
        fn asap_is_feasible_and_minimal(inst in arb_instance()) {
            let seq = Sequence::identity(inst.n);
            let s = asap_schedule(&inst, &seq).unwrap();
            prop_assert!(check_feasibility(&s, &inst).unwrap().feasible);
            for i in 1..inst.n {
                if s.start[i] > 0.0 {
                    let mut t = s.clone();
                    t.start[i] -= 1e-3;
                    let waits = worst_case_waits(&t, &inst).unwrap();
                    let w = inst.wait_guarantee[i];
                    prop_assert!(waits[i] > w + 1e-9);
                }
            }
        }

        #[test]
        fn lp_window_matches_closed_form(inst in arb_instance()) {
            let seq = Sequence::identity(inst.n);
            let a = asap_schedule(&inst, &seq).unwrap();
            let b = asap_schedule_with(&inst, &seq, WindowBound::Lp).unwrap();
            for (x, y) in a.start.iter().zip(&b.start) {
                prop_assert!((x - y).abs() <= 1e-7);
            }
        }
    }

    #[test]
    fn window_lp_value() {
        assert_abs_diff_eq!(window_lp(&[5.0, 3.0, 7.0], 2).unwrap(), 12.0, epsilon = 1e-9);
        assert_abs_diff_eq!(window_lp(&[5.0, 3.0], 0).unwrap(), 0.0, epsilon = 1e-9);
    }
}

//! Bounded exhaustive search over catalog equations and resolvent systems,
//! and the table verification built on it.
//!
//! The outer coordinate range is cut into contiguous partitions processed on
//! scoped threads. Partial results are concatenated in partition order and
//! sorted, so reports do not depend on the thread count.

use std::thread;
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::{factor_u64, Int};
use crate::equations::{
    check_resolvent, eval_quartic, list_catalog, resolvent_catalog, QuarticEquation, QuarticSolution,
    ResolventSolution, ResolventSystem,
};
use crate::json::int_array;
use crate::reduction::{
    backward_lift_biquadratic, forward_reduce_biquadratic, resolvent_to_sextic, sextic_to_resolvent, ReductionError,
};

pub const MAX_QUARTIC_BOUND: u64 = 10_000;
pub const MAX_RESOLVENT_BOUND: u64 = 2_000;
pub const DEFAULT_QUARTIC_BOUND: u64 = 100;
pub const DEFAULT_RESOLVENT_BOUND: u64 = 60;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("bound {bound} for {target} outside 1..={max}")]
    BoundExceeded { target: String, bound: u64, max: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub require_coprime: bool,
    pub include_trivial: bool,
    /// Worker threads; values below 1 are treated as 1.
    pub threads: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            require_coprime: true,
            include_trivial: false,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Witness {
    Quartic(QuarticSolution),
    Resolvent(ResolventSolution),
}

impl Witness {
    pub fn coords(&self) -> Vec<Int> {
        match self {
            Witness::Quartic(q) => q.coords().to_vec(),
            Witness::Resolvent(r) => r.coords().to_vec(),
        }
    }

    pub fn trivial(&self) -> bool {
        match self {
            Witness::Quartic(q) => q.trivial,
            Witness::Resolvent(r) => r.trivial,
        }
    }

    fn orbit_size(&self) -> u64 {
        match self {
            Witness::Quartic(q) => q.orbit().len() as u64,
            Witness::Resolvent(r) => r.orbit().len() as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub target: String,
    pub bound: u64,
    pub require_coprime: bool,
    pub include_trivial: bool,
    /// Canonical nonnegative representatives, sorted by coordinates.
    pub solutions: Vec<Witness>,
    /// Signed solutions covered by the representatives.
    pub orbit_count: u64,
    pub elapsed: Duration,
    pub partitions: usize,
}

impl SearchReport {
    /// JSON form. Timing and partitioning vary between runs, so they are
    /// only included on request.
    pub fn to_json(&self, timings: bool) -> Value {
        let mut v = json!({
            "id": self.target,
            "bound": self.bound,
            "options": {
                "require_coprime": self.require_coprime,
                "include_trivial": self.include_trivial,
            },
            "solutions": self.solutions.iter().map(|w| int_array(&w.coords())).collect::<Vec<_>>(),
            "orbit_count": self.orbit_count,
        });
        if timings {
            v["elapsed_ms"] = json!(self.elapsed.as_millis() as u64);
            v["partitions"] = json!(self.partitions);
        }
        v
    }

    /// CSV rows `id,c1,c2,...` without a header.
    pub fn csv_rows(&self) -> Vec<String> {
        self.solutions
            .iter()
            .map(|w| {
                let coords: Vec<String> = w.coords().iter().map(ToString::to_string).collect();
                format!("{},{}", self.target, coords.join(","))
            })
            .collect()
    }
}

fn check_bound(target: &str, bound: u64, max: u64) -> Result<(), SearchError> {
    if bound == 0 || bound > max {
        return Err(SearchError::BoundExceeded {
            target: target.to_string(),
            bound,
            max,
        });
    }
    Ok(())
}

/// Splits `0..=bound` into at most `parts` contiguous ranges.
fn partitions(bound: u64, parts: usize) -> Vec<(u64, u64)> {
    let total = bound + 1;
    let parts = (parts.max(1) as u64).min(total);
    let base = total / parts;
    let extra = total % parts;
    let mut out = Vec::with_capacity(parts as usize);
    let mut start = 0;
    for i in 0..parts {
        let len = base + u64::from(i < extra);
        out.push((start, start + len - 1));
        start += len;
    }
    out
}

fn run_partitioned<F>(bound: u64, threads: usize, work: F) -> (Vec<Witness>, usize)
where
    F: Fn(u64, u64) -> Vec<Witness> + Sync,
{
    let ranges = partitions(bound, threads);
    let count = ranges.len();
    let mut found: Vec<Witness> = if count == 1 {
        work(ranges[0].0, ranges[0].1)
    } else {
        thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .iter()
                .map(|&(lo, hi)| {
                    let work = &work;
                    scope.spawn(move || work(lo, hi))
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("search worker panicked"))
                .collect()
        })
    };
    found.sort();
    found.dedup();
    (found, count)
}

/// All `(x, y)` with `0 <= x, y <= bound`, solving for `z >= 0`.
pub fn search_quartic(eq: &QuarticEquation, bound: u64, opts: SearchOptions) -> Result<SearchReport, SearchError> {
    check_bound(&eq.id, bound, MAX_QUARTIC_BOUND)?;
    let started = Instant::now();
    let (solutions, partitions) = run_partitioned(bound, opts.threads, |lo, hi| {
        let mut out = Vec::new();
        for x in lo..=hi {
            let x = Int::from(x);
            for y in 0..=bound {
                let y = Int::from(y);
                if opts.require_coprime && !x.gcd(&y).is_one() {
                    continue;
                }
                for sol in eval_quartic(eq, &x, &y) {
                    if sol.z.is_negative() || (sol.trivial && !opts.include_trivial) {
                        continue;
                    }
                    out.push(Witness::Quartic(sol));
                }
            }
        }
        out
    });
    Ok(SearchReport {
        target: eq.id.clone(),
        bound,
        require_coprime: opts.require_coprime,
        include_trivial: opts.include_trivial,
        orbit_count: solutions.iter().map(Witness::orbit_size).sum(),
        solutions,
        elapsed: started.elapsed(),
        partitions,
    })
}

/// Every `(X', Y')` with `X'·Y' = product`, `gcd(X', Y') = 1`, both `>= 0`.
fn coprime_factorizations(product: u64) -> Vec<(u64, u64)> {
    if product == 0 {
        return vec![(1, 0), (0, 1)];
    }
    let prime_powers: Vec<u64> = factor_u64(product).into_iter().map(|(p, e)| p.pow(e)).collect();
    (0..1u32 << prime_powers.len())
        .map(|mask| {
            let xp: u64 = prime_powers
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, pp)| pp)
                .product();
            (xp, product / xp)
        })
        .collect()
}

/// Coprime `(X, Y)` with `0 <= X, Y <= bound`; `(X', Y')` ranges over the
/// coprime factorizations of `X·Y`. Coprimality is part of the system, so
/// `require_coprime` is not consulted.
pub fn search_resolvent(sys: &ResolventSystem, bound: u64, opts: SearchOptions) -> Result<SearchReport, SearchError> {
    check_bound(&sys.id, bound, MAX_RESOLVENT_BOUND)?;
    let started = Instant::now();
    let small = [&sys.m, &sys.n, &sys.k, &sys.l].map(|c| c.to_i64().map(i128::from));
    let (solutions, partitions) = run_partitioned(bound, opts.threads, |lo, hi| {
        let mut out = Vec::new();
        for x in lo..=hi {
            for y in 0..=bound {
                if x.gcd(&y) != 1 {
                    continue;
                }
                for (xp, yp) in coprime_factorizations(x * y) {
                    // |X|, |Y| <= 2000 keeps every square far inside i128.
                    let candidate = match small {
                        [Some(m), Some(n), Some(k), Some(l)] => {
                            let sq = |v: u64| i128::from(v) * i128::from(v);
                            m * sq(x) + n * sq(y) == k * sq(xp) + l * sq(yp)
                        }
                        _ => true,
                    };
                    if !candidate {
                        continue;
                    }
                    let (bx, by, bxp, byp) = (Int::from(x), Int::from(y), Int::from(xp), Int::from(yp));
                    if !check_resolvent(sys, &bx, &by, &bxp, &byp) {
                        continue;
                    }
                    let sol = ResolventSolution::new(bx, by, bxp, byp);
                    if sol.trivial && !opts.include_trivial {
                        continue;
                    }
                    out.push(Witness::Resolvent(sol));
                }
            }
        }
        out
    });
    Ok(SearchReport {
        target: sys.id.clone(),
        bound,
        require_coprime: true,
        include_trivial: opts.include_trivial,
        orbit_count: solutions.iter().map(Witness::orbit_size).sum(),
        solutions,
        elapsed: started.elapsed(),
        partitions,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Quartic(QuarticEquation),
    Resolvent(ResolventSystem),
}

impl Target {
    pub fn id(&self) -> &str {
        match self {
            Target::Quartic(q) => &q.id,
            Target::Resolvent(r) => &r.id,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Counterexample,
    /// A reduction map misbehaved on a found solution.
    ContractViolation,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::Counterexample => "COUNTEREXAMPLE",
            Verdict::ContractViolation => "CONTRACT_VIOLATION",
        }
    }
}

/// One reduction map applied to one found solution, with the outcome its
/// preconditions dictate and the outcome observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheck {
    pub map: &'static str,
    pub input: Vec<Int>,
    pub expected: &'static str,
    pub observed: String,
    pub stage_failure: bool,
}

impl CrossCheck {
    pub fn ok(&self) -> bool {
        self.expected == self.observed
    }

    pub fn to_json(&self) -> Value {
        json!({
            "map": self.map,
            "input": int_array(&self.input),
            "expected": self.expected,
            "observed": self.observed,
            "ok": self.ok(),
        })
    }
}

fn observe<T>(result: &Result<T, ReductionError>, accept: impl Fn(&T) -> bool) -> (String, bool) {
    match result {
        Ok(v) if accept(v) => ("Ok".into(), false),
        Ok(_) => ("WrongOutput".into(), false),
        Err(e) => (e.label().into(), e.is_stage_failure()),
    }
}

fn check(map: &'static str, input: Vec<Int>, expected: &'static str, observed: (String, bool)) -> CrossCheck {
    CrossCheck {
        map,
        input,
        expected,
        observed: observed.0,
        stage_failure: observed.1,
    }
}

fn lift_checks(res: &ResolventSolution, out: &mut Vec<CrossCheck>) {
    let e2 = &crate::equations::lookup("E2").expect("E2").equation;
    let e4 = &crate::equations::lookup("E4").expect("E4").equation;
    let lifted = backward_lift_biquadratic(res);
    out.push(check(
        "backward_lift_biquadratic",
        res.coords().to_vec(),
        "Ok",
        observe(&lifted, |(q, t)| e2.satisfied_by(&q.x, &q.y, &q.z) && t.replay().is_ok()),
    ));
    let lifted = resolvent_to_sextic(res);
    out.push(check(
        "resolvent_to_sextic",
        res.coords().to_vec(),
        "Ok",
        observe(&lifted, |(q, t)| e4.satisfied_by(&q.x, &q.y, &q.z) && t.replay().is_ok()),
    ));
}

/// Runs the reduction maps applicable to a solution of `E2` or `E4` and
/// compares each outcome with what its preconditions dictate. Lifts of every
/// resolvent solution produced are checked as well. Other targets yield no
/// checks.
pub fn reduction_contract(target: &str, sol: &QuarticSolution) -> Vec<CrossCheck> {
    let mut out = Vec::new();
    let r1 = ResolventSystem::r1();
    let input = sol.coords().to_vec();
    match target {
        "E2" => {
            let expected = if (&sol.x * &sol.y).is_zero() {
                "TrivialInput"
            } else if !sol.x.gcd(&(Int::from(2) * &sol.y)).is_one() {
                "NotPrimitive"
            } else {
                "Ok"
            };
            let result = forward_reduce_biquadratic(&sol.x, &sol.y, &sol.z);
            out.push(check(
                "forward_reduce_biquadratic",
                input,
                expected,
                observe(&result, |(r, t)| check_resolvent(&r1, &r.x, &r.y, &r.xp, &r.yp) && t.replay().is_ok()),
            ));
            if let Ok((res, _)) = result {
                lift_checks(&res, &mut out);
            }
        }
        "E4" => {
            let expected = if sol.x.gcd(&sol.y).is_one() { "Ok" } else { "NotPrimitive" };
            let result = sextic_to_resolvent(&sol.x, &sol.y, &sol.z);
            out.push(check(
                "sextic_to_resolvent",
                input,
                expected,
                observe(&result, |(r, t)| check_resolvent(&r1, &r.x, &r.y, &r.xp, &r.yp) && t.replay().is_ok()),
            ));
            if let Ok((res, _)) = result {
                lift_checks(&res, &mut out);
            }
        }
        _ => {}
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub report: SearchReport,
    pub verdict: Verdict,
    pub cross_checks: Vec<CrossCheck>,
}

impl TableEntry {
    pub fn has_stage_failure(&self) -> bool {
        self.cross_checks.iter().any(|c| c.stage_failure)
    }

    pub fn to_json(&self, timings: bool) -> Value {
        let mut v = json!({
            "id": self.report.target,
            "verdict": self.verdict.as_str(),
            "report": self.report.to_json(timings),
        });
        if !self.cross_checks.is_empty() {
            let passed = self.cross_checks.iter().filter(|c| c.ok()).count();
            v["cross_checks"] = json!({
                "total": self.cross_checks.len(),
                "passed": passed,
                "failures": self.cross_checks.iter().filter(|c| !c.ok()).map(CrossCheck::to_json).collect::<Vec<_>>(),
            });
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableBounds {
    pub quartic: u64,
    pub resolvent: u64,
}

impl TableBounds {
    /// `bound` for quartics; resolvents use it capped at the default 60.
    pub fn from_quartic_bound(bound: u64) -> Self {
        Self {
            quartic: bound,
            resolvent: bound.min(DEFAULT_RESOLVENT_BOUND),
        }
    }
}

/// Searches each target with `opts`; a target is CONSISTENT when nothing is
/// found. For `E2` and `E4` every solution up to the quartic bound, trivial
/// and non-coprime ones included, is also pushed through the reduction maps.
pub fn verify_targets(
    targets: &[Target],
    bounds: TableBounds,
    opts: SearchOptions,
) -> Result<Vec<TableEntry>, SearchError> {
    let mut entries = Vec::with_capacity(targets.len());
    for target in targets {
        let (report, cross_checks) = match target {
            Target::Quartic(eq) => {
                let report = search_quartic(eq, bounds.quartic, opts)?;
                let mut checks = Vec::new();
                if eq.id == "E2" || eq.id == "E4" {
                    let all = SearchOptions {
                        require_coprime: false,
                        include_trivial: true,
                        threads: opts.threads,
                    };
                    for w in search_quartic(eq, bounds.quartic, all)?.solutions {
                        if let Witness::Quartic(sol) = w {
                            checks.extend(reduction_contract(&eq.id, &sol));
                        }
                    }
                }
                (report, checks)
            }
            Target::Resolvent(sys) => (search_resolvent(sys, bounds.resolvent, opts)?, Vec::new()),
        };
        let verdict = if !report.solutions.is_empty() {
            Verdict::Counterexample
        } else if cross_checks.iter().any(|c| !c.ok()) {
            Verdict::ContractViolation
        } else {
            Verdict::Consistent
        };
        entries.push(TableEntry {
            report,
            verdict,
            cross_checks,
        });
    }
    Ok(entries)
}

/// The whole catalog: `E1`–`E11`, `X1`, then `R1`, `R2`, coprime and with
/// trivial solutions excluded.
pub fn catalog_targets() -> Vec<Target> {
    list_catalog()
        .iter()
        .map(|e| Target::Quartic(e.equation.clone()))
        .chain(resolvent_catalog().iter().cloned().map(Target::Resolvent))
        .collect()
}

pub fn verify_table(bounds: TableBounds, threads: usize) -> Result<Vec<TableEntry>, SearchError> {
    let opts = SearchOptions {
        require_coprime: true,
        include_trivial: false,
        threads,
    };
    verify_targets(&catalog_targets(), bounds, opts)
}

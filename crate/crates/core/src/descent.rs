//! Infinite descent on the first resolvent.
//!
//! A nontrivial solution `(X, Y, X', Y')` is split into the four gcds
//! `p = (X,X')`, `q = (X,Y')`, `r = (Y,X')`, `s = (Y,Y')`. The quadratic
//! equation rearranges to `(p² − s²)q² = (p² + s²)r²`, which forces
//! `q² = p² + s²` and `r² = p² − s²`. Decomposing both triples yields a new
//! solution `(s₀, t₀, s₀', t₀')` with `ν(s₀t₀) < ν(XY)`.
//!
//! Each deduction is its own public stage function so it can be exercised on
//! synthetic data: no genuine nontrivial input exists to drive the whole
//! step end to end.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::{coprime_split, factor_u64, nu, pythagorean_decompose, Int};
use crate::equations::{check_resolvent_solution, ResolventSolution, ResolventSystem};
use crate::json::int_array;
use crate::trace::{named_values, StageFailure};

pub const MAX_RESIDUE_MODULUS: u64 = 10_000;

/// Moduli whose obstructions make up [`nu_lower_bound`].
pub const LOWER_BOUND_MODULI: [u64; 2] = [2, 3];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescentError {
    #[error("trivial input (X·Y = 0)")]
    TrivialInput,
    #[error("{0:?} is not a solution of the resolvent")]
    NotASolution(Vec<Int>),
    #[error("descent is only implemented for R1, not {0}")]
    UnsupportedResolvent(String),
    #[error("{0}")]
    StageFailure(StageFailure),
    #[error("modulus {0} outside 2..={MAX_RESIDUE_MODULUS}")]
    BoundExceeded(u64),
    #[error("internal invariant broken: {0}")]
    InternalInvariantBroken(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescentStage {
    Split,
    Rearrange,
    SquareSystem,
    SumTriple,
    DifferenceTriple,
    Assemble,
    Measure,
}

impl DescentStage {
    pub fn as_str(self) -> &'static str {
        match self {
            DescentStage::Split => "Split",
            DescentStage::Rearrange => "Rearrange",
            DescentStage::SquareSystem => "SquareSystem",
            DescentStage::SumTriple => "SumTriple",
            DescentStage::DifferenceTriple => "DifferenceTriple",
            DescentStage::Assemble => "Assemble",
            DescentStage::Measure => "Measure",
        }
    }
}

fn failure(stage: DescentStage, reason: impl Into<String>, values: &[(&str, &Int)]) -> StageFailure {
    StageFailure {
        stage: stage.as_str().to_string(),
        reason: reason.into(),
        values: values.iter().map(|(n, v)| (n.to_string(), (*v).clone())).collect(),
    }
}

/// `X = pq`, `Y = rs`, `X' = pr`, `Y' = qs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub p: Int,
    pub q: Int,
    pub r: Int,
    pub s: Int,
}

pub fn split_stage(sol: &ResolventSolution) -> Result<Split, StageFailure> {
    coprime_split(&sol.x, &sol.y, &sol.xp, &sol.yp)
        .map(|(p, q, r, s)| Split { p, q, r, s })
        .map_err(|e| {
            failure(
                DescentStage::Split,
                e.to_string(),
                &[("X", &sol.x), ("Y", &sol.y), ("X'", &sol.xp), ("Y'", &sol.yp)],
            )
        })
}

/// `(p² − s²)·q² = (p² + s²)·r²`.
pub fn rearrange_stage(split: &Split) -> Result<(), StageFailure> {
    let Split { p, q, r, s } = split;
    let (pp, ss) = (p * p, s * s);
    let left = (&pp - &ss) * q * q;
    let right = (&pp + &ss) * r * r;
    if left != right {
        return Err(failure(
            DescentStage::Rearrange,
            "(p²−s²)q² != (p²+s²)r²",
            &[("lhs", &left), ("rhs", &right)],
        ));
    }
    Ok(())
}

/// Coprimality of `p² − s²` and `p² + s²`, then `q² = p² + s²` and
/// `r² = p² − s²`.
///
/// For odd `p` and `s` both expressions are even; that case is reported as a
/// failure carrying the gcd rather than repaired.
pub fn square_system_stage(split: &Split) -> Result<(), StageFailure> {
    let Split { p, q, r, s } = split;
    let (pp, ss) = (p * p, s * s);
    let (diff, sum) = (&pp - &ss, &pp + &ss);
    let g = diff.gcd(&sum);
    if !g.is_one() {
        return Err(failure(
            DescentStage::SquareSystem,
            "p²−s² and p²+s² are not coprime",
            &[("p^2-s^2", &diff), ("p^2+s^2", &sum), ("gcd", &g)],
        ));
    }
    if q * q != sum || r * r != diff {
        return Err(failure(
            DescentStage::SquareSystem,
            "q² = p²+s² and r² = p²−s² do not both hold",
            &[("q", q), ("r", r), ("p^2+s^2", &sum), ("p^2-s^2", &diff)],
        ));
    }
    Ok(())
}

/// `(p, s, q)` as a primitive triple: `p = s₀² − t₀²`, `s = 2s₀t₀`.
pub fn sum_triple_stage(p: &Int, s: &Int, q: &Int) -> Result<(Int, Int), StageFailure> {
    pythagorean_decompose(p, s, q)
        .map_err(|e| failure(DescentStage::SumTriple, e.to_string(), &[("p", p), ("s", s), ("q", q)]))
}

/// `(r, s, p)` as a primitive triple: `p = s₀'² + t₀'²`, `s = 2s₀'t₀'`.
pub fn difference_triple_stage(r: &Int, s: &Int, p: &Int) -> Result<(Int, Int), StageFailure> {
    pythagorean_decompose(r, s, p)
        .map_err(|e| failure(DescentStage::DifferenceTriple, e.to_string(), &[("r", r), ("s", s), ("p", p)]))
}

pub fn assemble_stage(sum: &(Int, Int), difference: &(Int, Int)) -> Result<ResolventSolution, StageFailure> {
    let out = ResolventSolution::new(sum.0.clone(), sum.1.clone(), difference.0.clone(), difference.1.clone());
    if !check_resolvent_solution(&ResolventSystem::r1(), &out) {
        return Err(failure(
            DescentStage::Assemble,
            "assembled tuple does not solve R1",
            &[("s0", &out.x), ("t0", &out.y), ("s0'", &out.xp), ("t0'", &out.yp)],
        ));
    }
    Ok(out)
}

/// `ν(X·Y)` of both solutions; fails unless the measure strictly drops.
pub fn measure_stage(input: &ResolventSolution, output: &ResolventSolution) -> Result<(u32, u32), StageFailure> {
    let (before, after) = (&input.x * &input.y, &output.x * &output.y);
    let nu_in = nu(&before).map_err(|e| failure(DescentStage::Measure, e.to_string(), &[("XY", &before)]))?;
    if after.is_zero() {
        // A trivial output ends the descent; its measure is taken as 0.
        return Ok((nu_in, 0));
    }
    let nu_out = nu(&after).map_err(|e| failure(DescentStage::Measure, e.to_string(), &[("s0t0", &after)]))?;
    if nu_out >= nu_in {
        return Err(failure(
            DescentStage::Measure,
            format!("measure did not drop: {nu_out} >= {nu_in}"),
            &[("XY", &before), ("s0t0", &after)],
        ));
    }
    Ok((nu_in, nu_out))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentStep {
    pub input: ResolventSolution,
    pub split: Split,
    pub sum_generators: (Int, Int),
    pub difference_generators: (Int, Int),
    pub output: ResolventSolution,
    pub nu_in: u32,
    pub nu_out: u32,
}

impl DescentStep {
    pub fn to_json(&self) -> Value {
        let Split { p, q, r, s } = &self.split;
        json!({
            "stage": "DescentStep",
            "inputs": int_array(&self.input.coords()),
            "split": named_values([("p", p), ("q", q), ("r", r), ("s", s)].into_iter()),
            "sum_generators": int_array([&self.sum_generators.0, &self.sum_generators.1]),
            "difference_generators": int_array([&self.difference_generators.0, &self.difference_generators.1]),
            "outputs": int_array(&self.output.coords()),
            "nu_in": self.nu_in,
            "nu_out": self.nu_out,
        })
    }
}

fn require_r1(sys: &ResolventSystem) -> Result<(), DescentError> {
    if sys.is_r1() {
        Ok(())
    } else {
        Err(DescentError::UnsupportedResolvent(sys.id.clone()))
    }
}

/// One descent step on a nontrivial solution of R1. Signs are dropped first.
pub fn descent_step(sys: &ResolventSystem, sol: &ResolventSolution) -> Result<DescentStep, DescentError> {
    require_r1(sys)?;
    if !check_resolvent_solution(sys, sol) {
        return Err(DescentError::NotASolution(sol.coords().to_vec()));
    }
    if (&sol.x * &sol.y).is_zero() {
        return Err(DescentError::TrivialInput);
    }
    let input = sol.canonical();
    let split = split_stage(&input).map_err(DescentError::StageFailure)?;
    rearrange_stage(&split).map_err(DescentError::StageFailure)?;
    square_system_stage(&split).map_err(DescentError::StageFailure)?;
    let sum_generators = sum_triple_stage(&split.p, &split.s, &split.q).map_err(DescentError::StageFailure)?;
    let difference_generators =
        difference_triple_stage(&split.r, &split.s, &split.p).map_err(DescentError::StageFailure)?;
    let output = assemble_stage(&sum_generators, &difference_generators).map_err(DescentError::StageFailure)?;
    let (nu_in, nu_out) = measure_stage(&input, &output).map_err(DescentError::StageFailure)?;
    Ok(DescentStep {
        input,
        split,
        sum_generators,
        difference_generators,
        output,
        nu_in,
        nu_out,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DescentTerminal {
    /// The starting solution was already trivial.
    TrivialInput,
    /// Some step produced a trivial solution.
    TrivialReached,
    NonSolutionInput,
    StageFailure(StageFailure),
}

impl DescentTerminal {
    pub fn label(&self) -> &'static str {
        match self {
            DescentTerminal::TrivialInput => "TrivialInput",
            DescentTerminal::TrivialReached => "TrivialReached",
            DescentTerminal::NonSolutionInput => "NonSolutionInput",
            DescentTerminal::StageFailure(_) => "StageFailure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentTrace {
    pub start: ResolventSolution,
    pub steps: Vec<DescentStep>,
    pub terminal: DescentTerminal,
}

impl DescentTrace {
    pub fn terminal_json(&self) -> Value {
        let mut v = json!({ "terminal": self.terminal.label() });
        if let DescentTerminal::StageFailure(f) = &self.terminal {
            v["failure"] = f.to_json();
        }
        v
    }

    /// One JSON object per step, then the terminal record.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            out.push_str(&step.to_json().to_string());
            out.push('\n');
        }
        out.push_str(&self.terminal_json().to_string());
        out.push('\n');
        out
    }
}

/// Repeats [`descent_step`] until a trivial solution, a stage failure, or a
/// non-solution stops it. The measure `ν(XY)` strictly drops at every step,
/// so more than `ν(XY) + 1` iterations is an internal error.
pub fn descent_chain(sys: &ResolventSystem, sol: &ResolventSolution) -> Result<DescentTrace, DescentError> {
    require_r1(sys)?;
    let mut trace = DescentTrace {
        start: sol.clone(),
        steps: Vec::new(),
        terminal: DescentTerminal::NonSolutionInput,
    };
    if !check_resolvent_solution(sys, sol) {
        return Ok(trace);
    }
    if (&sol.x * &sol.y).is_zero() {
        trace.terminal = DescentTerminal::TrivialInput;
        return Ok(trace);
    }
    let cap = nu(&(&sol.x * &sol.y)).map_err(|e| DescentError::InternalInvariantBroken(e.to_string()))? + 1;
    let mut current = sol.clone();
    for _ in 0..cap {
        match descent_step(sys, &current) {
            Ok(step) => {
                let next = step.output.clone();
                trace.steps.push(step);
                if next.trivial {
                    trace.terminal = DescentTerminal::TrivialReached;
                    return Ok(trace);
                }
                current = next;
            }
            Err(DescentError::StageFailure(f)) => {
                trace.terminal = DescentTerminal::StageFailure(f);
                return Ok(trace);
            }
            Err(DescentError::TrivialInput) => {
                trace.terminal = DescentTerminal::TrivialReached;
                return Ok(trace);
            }
            Err(e) => return Err(DescentError::InternalInvariantBroken(format!("step rejected its own output: {e}"))),
        }
    }
    Err(DescentError::InternalInvariantBroken(format!(
        "descent exceeded {cap} iterations"
    )))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionReport {
    pub system: String,
    pub modulus: u64,
    /// `modulus | X·Y` holds on every surviving residue class.
    pub forced: bool,
    /// Distinct `X·Y mod modulus` over surviving classes, ascending.
    pub surviving_products: Vec<u64>,
    /// Number of `(X, Y)` residue pairs that admit some compatible `(X', Y')`.
    pub surviving_pairs: u64,
}

impl ObstructionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "system": self.system,
            "modulus": self.modulus,
            "forced": self.forced,
            "surviving_products": self.surviving_products,
            "surviving_pairs": self.surviving_pairs,
        })
    }
}

fn residue(c: &Int, modulus: u64) -> u64 {
    c.mod_floor(&Int::from(modulus)).to_u64().expect("residue below modulus")
}

/// Enumerates residue quadruples modulo `modulus` satisfying the quadratic
/// and product congruences, with no prime divisor of `modulus` dividing both
/// `X` and `Y` or both `X'` and `Y'`.
pub fn residue_obstruction(sys: &ResolventSystem, modulus: u64) -> Result<ObstructionReport, DescentError> {
    if !(2..=MAX_RESIDUE_MODULUS).contains(&modulus) {
        return Err(DescentError::BoundExceeded(modulus));
    }
    let md = modulus;
    let (m, n, k, l) = (residue(&sys.m, md), residue(&sys.n, md), residue(&sys.k, md), residue(&sys.l, md));
    let primes: Vec<u64> = factor_u64(md).into_iter().map(|(p, _)| p).collect();
    let masks: Vec<u8> = (0..md)
        .map(|v| primes.iter().enumerate().fold(0u8, |acc, (i, p)| if v % p == 0 { acc | 1 << i } else { acc }))
        .collect();
    let key = |prod: u64, quad: u64| (prod * md + quad) as usize;

    // (X'·Y', k·X'² + l·Y'²) pairs reachable by compatible primed classes.
    let mut reachable = vec![false; (md * md) as usize];
    for xp in 0..md {
        for yp in 0..md {
            if masks[xp as usize] & masks[yp as usize] != 0 {
                continue;
            }
            let quad = (k * (xp * xp % md) + l * (yp * yp % md)) % md;
            reachable[key(xp * yp % md, quad)] = true;
        }
    }
    let mut seen_products = vec![false; md as usize];
    let mut surviving_pairs = 0;
    for x in 0..md {
        for y in 0..md {
            if masks[x as usize] & masks[y as usize] != 0 {
                continue;
            }
            let prod = x * y % md;
            let quad = (m * (x * x % md) + n * (y * y % md)) % md;
            if reachable[key(prod, quad)] {
                surviving_pairs += 1;
                seen_products[prod as usize] = true;
            }
        }
    }
    let surviving_products: Vec<u64> = (0..md).filter(|&v| seen_products[v as usize]).collect();
    Ok(ObstructionReport {
        system: sys.id.clone(),
        modulus,
        forced: surviving_products.iter().all(|&v| v == 0),
        surviving_products,
        surviving_pairs,
    })
}

/// Number of moduli in [`LOWER_BOUND_MODULI`] whose residue analysis forces
/// them to divide `X·Y`.
pub fn nu_lower_bound(sys: &ResolventSystem) -> Result<u32, DescentError> {
    require_r1(sys)?;
    let mut bound = 0;
    for modulus in LOWER_BOUND_MODULI {
        if residue_obstruction(sys, modulus)?.forced {
            bound += 1;
        }
    }
    Ok(bound)
}

/// `gcd(a² + b², a² − b²)` for the coprimality lemma checks.
pub fn sum_difference_gcd(a: &Int, b: &Int) -> Int {
    let (aa, bb) = (a * a, b * b);
    (&aa + &bb).gcd(&(aa - bb)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::check_resolvent;
    use proptest::prelude::*;

    fn i(v: i64) -> Int {
        Int::from(v)
    }

    fn res(a: i64, b: i64, c: i64, d: i64) -> ResolventSolution {
        ResolventSolution::new(i(a), i(b), i(c), i(d))
    }

    fn check_r1(x: &Int, y: &Int, xp: &Int, yp: &Int) -> bool {
        check_resolvent(&ResolventSystem::r1(), x, y, xp, yp)
    }

    // Straight enumeration of all m⁴ quadruples; independent of the
    // keyed lookup used by `residue_obstruction`.
    fn brute_force_products(coeffs: [i64; 4], md: i64) -> Vec<i64> {
        let primes: Vec<i64> = (2..=md).filter(|p| md % p == 0 && (2..*p).all(|d| p % d != 0)).collect();
        let ok = |a: i64, b: i64| !primes.iter().any(|p| a % p == 0 && b % p == 0);
        let [m, n, k, l] = coeffs;
        let mut out = std::collections::BTreeSet::new();
        for x in 0..md {
            for y in 0..md {
                for xp in 0..md {
                    for yp in 0..md {
                        if !ok(x, y) || !ok(xp, yp) {
                            continue;
                        }
                        let quad = (m * x * x + n * y * y - k * xp * xp - l * yp * yp).rem_euclid(md);
                        let prod = (x * y - xp * yp).rem_euclid(md);
                        if quad == 0 && prod == 0 {
                            out.insert(x * y % md);
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    #[test]
    fn residue_matches_brute_force() {
        for sys in [ResolventSystem::r1(), ResolventSystem::r2()] {
            let coeffs = [&sys.m, &sys.n, &sys.k, &sys.l].map(|c| c.to_i64().unwrap());
            for md in 2..=12 {
                let report = residue_obstruction(&sys, md as u64).unwrap();
                let expected: Vec<u64> = brute_force_products(coeffs, md).into_iter().map(|v| v as u64).collect();
                assert_eq!(report.surviving_products, expected, "{} mod {md}", sys.id);
                assert_eq!(report.forced, expected.iter().all(|&v| v == 0));
            }
        }
    }

    #[test]
    fn residue_values_for_r1() {
        let r1 = ResolventSystem::r1();
        // Mod 2 the class (1, 1, 1, 1) survives: 1 − 1 ≡ 1 + 1 and 1 ≡ 1.
        assert_eq!(brute_force_products([1, -1, 1, 1], 2), vec![0, 1]);
        assert!(!residue_obstruction(&r1, 2).unwrap().forced);
        assert!(residue_obstruction(&r1, 3).unwrap().forced);
        // Mod 4 the odd-odd classes die but X odd, Y ≡ 2 survives.
        assert_eq!(brute_force_products([1, -1, 1, 1], 4), vec![0, 2]);
        assert!(!residue_obstruction(&r1, 4).unwrap().forced);
        assert_eq!(brute_force_products([1, -1, 1, 1], 5), vec![0]);
        assert!(residue_obstruction(&r1, 5).unwrap().forced);
        assert_eq!(nu_lower_bound(&r1), Ok(1));
        assert!(matches!(
            nu_lower_bound(&ResolventSystem::r2()),
            Err(DescentError::UnsupportedResolvent(_))
        ));
        assert!(matches!(residue_obstruction(&r1, 1), Err(DescentError::BoundExceeded(1))));
        assert!(matches!(residue_obstruction(&r1, 10_001), Err(DescentError::BoundExceeded(_))));
    }

    #[test]
    fn step_examples() {
        let r1 = ResolventSystem::r1();
        assert_eq!(descent_step(&r1, &res(1, 0, 1, 0)), Err(DescentError::TrivialInput));
        assert!(matches!(descent_step(&r1, &res(6, 35, 10, 21)), Err(DescentError::NotASolution(_))));
        assert!(matches!(
            descent_step(&ResolventSystem::r2(), &res(1, 0, 1, 0)),
            Err(DescentError::UnsupportedResolvent(_))
        ));
    }

    #[test]
    fn chain_examples() {
        let r1 = ResolventSystem::r1();
        let t = descent_chain(&r1, &res(1, 0, 1, 0)).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.terminal, DescentTerminal::TrivialInput);
        // 9 − 1 = 8 while 9 + 1 = 10.
        let t = descent_chain(&r1, &res(3, 1, 3, 1)).unwrap();
        assert_eq!(t.terminal, DescentTerminal::NonSolutionInput);
        assert_eq!(t.to_json_lines().trim(), r#"{"terminal":"NonSolutionInput"}"#);
    }

    #[test]
    fn no_small_nontrivial_r1_solution() {
        // Four nested loops over 1..=60 guarded by the product constraint.
        for x in 1..=60i64 {
            for y in 1..=60i64 {
                for xp in 1..=60i64 {
                    if (x * y) % xp != 0 {
                        continue;
                    }
                    let yp = x * y / xp;
                    assert!(!check_r1(&i(x), &i(y), &i(xp), &i(yp)), "({x},{y},{xp},{yp})");
                }
            }
        }
    }

    #[test]
    fn synthetic_stages() {
        // (p, q, r, s) = (2, 3, 5, 7): X=6, Y=35, X'=10, Y'=21.
        let split = split_stage(&res(6, 35, 10, 21)).unwrap();
        assert_eq!(split, Split { p: i(2), q: i(3), r: i(5), s: i(7) });
        // Not an R1 solution, so the rearranged identity must fail.
        assert!(rearrange_stage(&split).is_err());
        // p, s odd: the coprimality claim fails with gcd 2.
        let odd = Split { p: i(3), q: i(1), r: i(1), s: i(1) };
        let f = square_system_stage(&odd).unwrap_err();
        assert_eq!(f.values.last().unwrap(), &("gcd".to_string(), i(2)));
        // Coprime but not squares.
        let f = square_system_stage(&Split { p: i(2), q: i(1), r: i(1), s: i(1) }).unwrap_err();
        assert!(f.reason.contains("do not both hold"));

        assert_eq!(sum_triple_stage(&i(3), &i(4), &i(5)).unwrap(), (i(2), i(1)));
        assert_eq!(difference_triple_stage(&i(3), &i(4), &i(5)).unwrap(), (i(2), i(1)));
        assert!(sum_triple_stage(&i(4), &i(3), &i(5)).is_err());
        // (2,1) and (2,1): 4 − 1 != 4 + 1.
        assert!(assemble_stage(&(i(2), i(1)), &(i(2), i(1))).is_err());
        assert_eq!(assemble_stage(&(i(1), i(0)), &(i(1), i(0))).unwrap(), res(1, 0, 1, 0));
    }

    #[test]
    fn measure_strictly_drops_on_injected_outputs() {
        // Input X·Y = 2²·3·5, output s₀t₀ = 2·3: measure 4 -> 2.
        let (a, b) = measure_stage(&res(12, 5, 1, 60), &res(3, 2, 1, 6)).unwrap();
        assert_eq!((a, b), (4, 2));
        assert!(measure_stage(&res(3, 2, 1, 6), &res(12, 5, 1, 60)).is_err());
        assert_eq!(measure_stage(&res(3, 2, 1, 6), &res(1, 0, 1, 0)).unwrap(), (2, 0));
    }

    proptest! {
        #[test]
        fn split_reproduces_parts([p, q, r, s] in crate::arith::testing::coprime_quad()) {
            let sol = res(p * q, r * s, p * r, q * s);
            let split = split_stage(&sol).unwrap();
            prop_assert_eq!(split, Split { p: i(p), q: i(q), r: i(r), s: i(s) });
        }

        #[test]
        fn rearrangement_is_equivalent_to_quadratic(p in 1i64..500, q in 1i64..500, r in 1i64..500, s in 1i64..500) {
            let (x, y, xp, yp) = (i(p * q), i(r * s), i(p * r), i(q * s));
            let quadratic = &x * &x - &y * &y == &xp * &xp + &yp * &yp;
            let (pp, ss) = (i(p * p), i(s * s));
            let rearranged = (&pp - &ss) * i(q * q) == (&pp + &ss) * i(r * r);
            prop_assert_eq!(quadratic, rearranged);
        }

        #[test]
        fn coprimality_lemma(p in 1i64..100_000, s in 1i64..100_000) {
            prop_assume!(i(p).gcd(&i(s)).is_one());
            let g = sum_difference_gcd(&i(p), &i(s));
            let both_odd = p % 2 == 1 && s % 2 == 1;
            prop_assert_eq!(g, if both_odd { i(2) } else { i(1) });
        }
    }
}

//! Audited step records shared by the reduction maps.
//!
//! Every step is an application of a [`Rule`] to named integer inputs. The
//! rule both computes the outputs and checks its defining identity, so a
//! recorded trace can be replayed step by step from its inputs alone.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed};
use serde_json::{Map, Value};

use crate::arith::{isqrt_exact, pythagorean_decompose, Int};
use crate::equations::{check_resolvent, lookup, ResolventSolution, ResolventSystem};
use crate::json::int_value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Normalize,
    TripleDecompose,
    SquareExtract,
    DifferenceOfSquares,
    TwinTripleDecompose,
    Substitute,
    Assemble,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Normalize => "Normalize",
            Stage::TripleDecompose => "TripleDecompose",
            Stage::SquareExtract => "SquareExtract",
            Stage::DifferenceOfSquares => "DifferenceOfSquares",
            Stage::TwinTripleDecompose => "TwinTripleDecompose",
            Stage::Substitute => "Substitute",
            Stage::Assemble => "Assemble",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The identity a step realizes. Inputs and outputs are positional; the
/// names live on the recorded step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Every output is the absolute value of its input.
    Normalize,
    /// `(a, b, c) -> (u, v)` with `a = u²−v²`, `b = 2uv`, `c = u²+v²`.
    TripleDecompose,
    /// `n -> r` with `r² = n`, `r >= 0`.
    SquareExtract,
    /// `(x, s, t) -> (s²−t², s²+t²)`, requiring `x² = (s²−t²)(s²+t²)` and
    /// coprime factors.
    DifferenceOfSquares,
    /// `(s, t, α, β) -> (λ, γ, λ', γ')` from the triples `(s, t, α)` and
    /// `(β, t, s)`.
    TwinTripleDecompose,
    /// `(λ, γ, λ', γ') -> (T, S)`, `T = λ²−γ² = λ'²+γ'²`, `S = 2λγ = 2λ'γ'`.
    TsSubstitution,
    /// `(T, S) -> (T²+S², T²−S²)`.
    SquareSumDifference,
    /// `(x, y) -> (t, s)`, `t = x²+y²`, `s = 2xy`.
    SexticSubstitution,
    /// `(X', Y') -> D²`, `D² = X'⁴ + 6X'²Y'² + Y'⁴ = (X'²+Y'²)² + 4(X'Y')²`.
    Discriminant,
    /// `(T, S, ψ, φ) -> (x, y, z)`, `x = ψφ`, `y = |TS|`, `z = T⁴+S⁴`.
    AssembleBiquadratic,
    /// Passes four values through, requiring they solve the first resolvent.
    AssembleResolvent,
    /// `(X', Y', D)` passes through, requiring `D² = X'⁴ + 6X'²Y'² + Y'⁴`.
    AssembleSextic,
}

impl Rule {
    pub fn stage(self) -> Stage {
        match self {
            Rule::Normalize => Stage::Normalize,
            Rule::TripleDecompose => Stage::TripleDecompose,
            Rule::SquareExtract => Stage::SquareExtract,
            Rule::DifferenceOfSquares => Stage::DifferenceOfSquares,
            Rule::TwinTripleDecompose => Stage::TwinTripleDecompose,
            Rule::TsSubstitution
            | Rule::SquareSumDifference
            | Rule::SexticSubstitution
            | Rule::Discriminant => Stage::Substitute,
            Rule::AssembleBiquadratic | Rule::AssembleResolvent | Rule::AssembleSextic => Stage::Assemble,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Normalize => "normalize",
            Rule::TripleDecompose => "triple_decompose",
            Rule::SquareExtract => "square_extract",
            Rule::DifferenceOfSquares => "difference_of_squares",
            Rule::TwinTripleDecompose => "twin_triple_decompose",
            Rule::TsSubstitution => "ts_substitution",
            Rule::SquareSumDifference => "square_sum_difference",
            Rule::SexticSubstitution => "sextic_substitution",
            Rule::Discriminant => "discriminant",
            Rule::AssembleBiquadratic => "assemble_biquadratic",
            Rule::AssembleResolvent => "assemble_resolvent",
            Rule::AssembleSextic => "assemble_sextic",
        }
    }

    fn arity(self) -> Option<usize> {
        match self {
            Rule::Normalize => None,
            Rule::SquareExtract => Some(1),
            Rule::SquareSumDifference | Rule::SexticSubstitution | Rule::Discriminant => Some(2),
            Rule::TripleDecompose | Rule::DifferenceOfSquares | Rule::AssembleSextic => Some(3),
            Rule::TwinTripleDecompose
            | Rule::TsSubstitution
            | Rule::AssembleBiquadratic
            | Rule::AssembleResolvent => Some(4),
        }
    }

    /// Computes the outputs, or explains which part of the identity fails.
    pub fn apply(self, inputs: &[Int]) -> Result<Vec<Int>, String> {
        if let Some(n) = self.arity() {
            if inputs.len() != n {
                return Err(format!("{} takes {n} inputs, got {}", self.as_str(), inputs.len()));
            }
        }
        let two = Int::from(2);
        match self {
            Rule::Normalize => Ok(inputs.iter().map(Signed::abs).collect()),
            Rule::TripleDecompose => {
                let (u, v) = pythagorean_decompose(&inputs[0], &inputs[1], &inputs[2]).map_err(|e| e.to_string())?;
                Ok(vec![u, v])
            }
            Rule::SquareExtract => isqrt_exact(&inputs[0])
                .map(|r| vec![r])
                .ok_or_else(|| format!("{} is not a perfect square", inputs[0])),
            Rule::DifferenceOfSquares => {
                let (x, s, t) = (&inputs[0], &inputs[1], &inputs[2]);
                let (ss, tt) = (s * s, t * t);
                let (diff, sum) = (&ss - &tt, &ss + &tt);
                if x * x != &diff * &sum {
                    return Err(format!("{x}² != ({s}²−{t}²)({s}²+{t}²)"));
                }
                let g = diff.gcd(&sum);
                if !g.is_one() {
                    return Err(format!("gcd({diff}, {sum}) = {g}, factors are not coprime"));
                }
                Ok(vec![diff, sum])
            }
            Rule::TwinTripleDecompose => {
                let (s, t, alpha, beta) = (&inputs[0], &inputs[1], &inputs[2], &inputs[3]);
                let (lambda, gamma) =
                    pythagorean_decompose(s, t, alpha).map_err(|e| format!("sum triple: {e}"))?;
                let (lambda_p, gamma_p) =
                    pythagorean_decompose(beta, t, s).map_err(|e| format!("difference triple: {e}"))?;
                Ok(vec![lambda, gamma, lambda_p, gamma_p])
            }
            Rule::TsSubstitution => {
                let (l, g, lp, gp) = (&inputs[0], &inputs[1], &inputs[2], &inputs[3]);
                let t = l * l - g * g;
                let s = &two * l * g;
                if t != lp * lp + gp * gp || s != &two * lp * gp {
                    return Err(format!("T = {t}, S = {s} disagree between the primed and unprimed pairs"));
                }
                Ok(vec![t, s])
            }
            Rule::SquareSumDifference => {
                let (tt, ss) = (&inputs[0] * &inputs[0], &inputs[1] * &inputs[1]);
                Ok(vec![&tt + &ss, tt - ss])
            }
            Rule::SexticSubstitution => {
                let (x, y) = (&inputs[0], &inputs[1]);
                Ok(vec![x * x + y * y, &two * x * y])
            }
            Rule::Discriminant => {
                let (xp, yp) = (&inputs[0], &inputs[1]);
                let (a, b) = (xp * xp, yp * yp);
                let d2 = &a * &a + Int::from(6) * &a * &b + &b * &b;
                let sum = &a + &b;
                let prod = xp * yp;
                if d2 != &sum * &sum + Int::from(4) * &prod * &prod {
                    return Err(format!("discriminant identity fails for ({xp}, {yp})"));
                }
                Ok(vec![d2])
            }
            Rule::AssembleBiquadratic => {
                let (t, s, psi, phi) = (&inputs[0], &inputs[1], &inputs[2], &inputs[3]);
                let x = psi * phi;
                let y = (t * s).abs();
                let (tt, ss) = (t * t, s * s);
                let z = &tt * &tt + &ss * &ss;
                let eq = &lookup("E2").expect("E2 in catalog").equation;
                if !eq.satisfied_by(&x, &y, &z) {
                    return Err(format!("({x}, {y}, {z}) misses x⁴+4y⁴=z²"));
                }
                Ok(vec![x, y, z])
            }
            Rule::AssembleResolvent => {
                let r1 = ResolventSystem::r1();
                if !check_resolvent(&r1, &inputs[0], &inputs[1], &inputs[2], &inputs[3]) {
                    return Err(format!(
                        "({}, {}, {}, {}) does not solve R1",
                        inputs[0], inputs[1], inputs[2], inputs[3]
                    ));
                }
                Ok(inputs.to_vec())
            }
            Rule::AssembleSextic => {
                let eq = &lookup("E4").expect("E4 in catalog").equation;
                if !eq.satisfied_by(&inputs[0], &inputs[1], &inputs[2]) {
                    return Err(format!(
                        "({}, {}, {}) misses x⁴+6x²y²+y⁴=z²",
                        inputs[0], inputs[1], inputs[2]
                    ));
                }
                Ok(inputs.to_vec())
            }
        }
    }
}

/// A failed deduction: the stage, why it failed, and the witnessing values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageFailure {
    pub stage: String,
    pub reason: String,
    pub values: Vec<(String, Int)>,
}

impl StageFailure {
    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "stage": self.stage,
            "reason": self.reason,
            "values": named_values(self.values.iter().map(|(n, v)| (n.as_str(), v))),
        })
    }
}

impl fmt::Display for StageFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {} failed: {}", self.stage, self.reason)?;
        for (name, value) in &self.values {
            write!(f, " {name}={value}")?;
        }
        Ok(())
    }
}

pub(crate) fn named_values<'a>(items: impl Iterator<Item = (&'a str, &'a Int)>) -> Value {
    let mut map = Map::new();
    for (name, value) in items {
        map.insert(name.to_string(), int_value(value));
    }
    Value::Object(map)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: Rule,
    pub inputs: Vec<(&'static str, Int)>,
    pub outputs: Vec<(&'static str, Int)>,
}

impl TraceStep {
    pub fn stage(&self) -> Stage {
        self.rule.stage()
    }

    pub fn output(&self, name: &str) -> Option<&Int> {
        self.outputs.iter().find(|(n, _)| *n == name).map(|(_, v)| v)
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "stage": self.stage().as_str(),
            "rule": self.rule.as_str(),
            "inputs": named_values(self.inputs.iter().map(|(n, v)| (*n, v))),
            "outputs": named_values(self.outputs.iter().map(|(n, v)| (*n, v))),
        })
    }

    /// Re-applies the rule to the recorded inputs.
    pub fn replay(&self) -> Result<(), String> {
        let inputs: Vec<Int> = self.inputs.iter().map(|(_, v)| v.clone()).collect();
        let recomputed = self.rule.apply(&inputs)?;
        let recorded: Vec<&Int> = self.outputs.iter().map(|(_, v)| v).collect();
        if recomputed.iter().collect::<Vec<_>>() != recorded {
            return Err(format!("{} outputs differ on replay", self.rule.as_str()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceOutcome {
    Resolvent(ResolventSolution),
    Quartic(crate::equations::QuarticSolution),
}

impl TraceOutcome {
    pub fn coords(&self) -> Vec<Int> {
        match self {
            TraceOutcome::Resolvent(r) => r.coords().to_vec(),
            TraceOutcome::Quartic(q) => q.coords().to_vec(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            TraceOutcome::Resolvent(r) => serde_json::json!({
                "kind": "resolvent",
                "solution": r.coords().iter().map(int_value).collect::<Vec<_>>(),
                "trivial": r.trivial,
            }),
            TraceOutcome::Quartic(q) => serde_json::json!({
                "kind": "quartic",
                "solution": q.coords().iter().map(int_value).collect::<Vec<_>>(),
                "primitive": q.primitive,
                "trivial": q.trivial,
            }),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionTrace {
    pub steps: Vec<TraceStep>,
    pub outcome: Option<TraceOutcome>,
}

impl ReductionTrace {
    /// Applies `rule`, records the step, and returns the outputs. A failing
    /// identity becomes a [`StageFailure`] carrying the inputs.
    pub(crate) fn apply(
        &mut self,
        rule: Rule,
        inputs: &[(&'static str, &Int)],
        output_names: &[&'static str],
    ) -> Result<Vec<Int>, StageFailure> {
        let values: Vec<Int> = inputs.iter().map(|(_, v)| (*v).clone()).collect();
        match rule.apply(&values) {
            Ok(outputs) => {
                debug_assert_eq!(outputs.len(), output_names.len());
                self.steps.push(TraceStep {
                    rule,
                    inputs: inputs.iter().map(|(n, v)| (*n, (*v).clone())).collect(),
                    outputs: output_names.iter().copied().zip(outputs.iter().cloned()).collect(),
                });
                Ok(outputs)
            }
            Err(reason) => Err(StageFailure {
                stage: rule.stage().as_str().to_string(),
                reason,
                values: inputs.iter().map(|(n, v)| (n.to_string(), (*v).clone())).collect(),
            }),
        }
    }

    /// Replays every step; returns the index and reason of the first mismatch.
    pub fn replay(&self) -> Result<(), (usize, String)> {
        for (idx, step) in self.steps.iter().enumerate() {
            step.replay().map_err(|e| (idx, e))?;
        }
        Ok(())
    }

    /// One JSON object per line, steps first, then the outcome if any.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            out.push_str(&step.to_json().to_string());
            out.push('\n');
        }
        if let Some(outcome) = &self.outcome {
            out.push_str(&serde_json::json!({ "final": outcome.to_json() }).to_string());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i(v: i64) -> Int {
        Int::from(v)
    }

    #[test]
    fn rules_compute_and_check() {
        assert_eq!(Rule::TripleDecompose.apply(&[i(3), i(4), i(5)]), Ok(vec![i(2), i(1)]));
        assert!(Rule::SquareExtract.apply(&[i(10)]).is_err());
        assert_eq!(Rule::SexticSubstitution.apply(&[i(2), i(1)]), Ok(vec![i(5), i(4)]));
        assert_eq!(Rule::Discriminant.apply(&[i(2), i(1)]), Ok(vec![i(41)]));
        assert_eq!(Rule::Normalize.apply(&[i(-3), i(0), i(5)]), Ok(vec![i(3), i(0), i(5)]));
        assert!(Rule::TsSubstitution.apply(&[i(2), i(1), i(2), i(1)]).is_err());
        assert_eq!(Rule::TsSubstitution.apply(&[i(1), i(0), i(1), i(0)]), Ok(vec![i(1), i(0)]));
        assert!(Rule::AssembleResolvent.apply(&[i(1), i(0), i(0), i(1)]).is_ok());
        assert!(Rule::SquareExtract.apply(&[i(1), i(2)]).is_err());
        // 3² != (2²−1²)(2²+1²)
        assert!(Rule::DifferenceOfSquares.apply(&[i(3), i(2), i(1)]).is_err());
        // s, t both odd: the factors share a 2.
        let err = Rule::DifferenceOfSquares.apply(&[i(0), i(1), i(1)]).unwrap_err();
        assert!(err.contains("= 2"), "{err}");
    }

    #[test]
    fn replay_detects_tampering() {
        let mut trace = ReductionTrace::default();
        trace.apply(Rule::SquareExtract, &[("n", &i(49))], &["r"]).unwrap();
        assert_eq!(trace.replay(), Ok(()));
        trace.steps[0].outputs[0].1 = i(-7);
        assert!(trace.replay().is_err());
    }

    #[test]
    fn failure_carries_inputs() {
        let mut trace = ReductionTrace::default();
        let err = trace.apply(Rule::SquareExtract, &[("u", &i(8))], &["s"]).unwrap_err();
        assert_eq!(err.stage, "SquareExtract");
        assert_eq!(err.values, vec![("u".to_string(), i(8))]);
        assert!(trace.steps.is_empty());
    }
}

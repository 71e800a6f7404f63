//! Command dispatch. Every command renders exactly one document; errors that
//! happen after argument parsing are rendered too, in the requested format.

use descent_forge::descent::{
    descent_chain, nu_lower_bound, residue_obstruction, DescentError, DescentTerminal, DescentTrace,
    ObstructionReport, LOWER_BOUND_MODULI,
};
use descent_forge::equations::{list_catalog, lookup, lookup_resolvent, resolvent_catalog};
use descent_forge::json::int_array;
use descent_forge::reduction::{
    backward_lift_biquadratic, forward_reduce_biquadratic, resolvent_to_sextic, sextic_to_resolvent, Reduction,
    ReductionError,
};
use descent_forge::search::{
    search_quartic, search_resolvent, verify_table, SearchOptions, SearchReport, TableBounds, TableEntry, Verdict,
    DEFAULT_QUARTIC_BOUND, DEFAULT_RESOLVENT_BOUND,
};
use descent_forge::trace::{ReductionTrace, StageFailure, TraceOutcome};
use descent_forge::{Int, ResolventSolution};
use serde_json::{json, Value};

use crate::{Cli, Command, Format, EXIT_FINDING, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE};

pub struct Output {
    pub document: String,
    pub diagnostics: Vec<String>,
    pub exit: u8,
}

impl Output {
    fn ok(document: String) -> Self {
        Self {
            document,
            diagnostics: Vec::new(),
            exit: EXIT_OK,
        }
    }
}

struct Failure {
    exit: u8,
    label: &'static str,
    message: String,
}

fn usage(label: &'static str, message: impl Into<String>) -> Failure {
    Failure {
        exit: EXIT_USAGE,
        label,
        message: message.into(),
    }
}

fn render_failure(format: Format, f: &Failure) -> String {
    match format {
        Format::Json => format!("{}\n", json!({ "error": f.label, "message": f.message })),
        Format::Csv => csv_doc(&["error", "message"], [vec![f.label.to_string(), f.message.clone()]]),
        Format::Text => format!("error ({}): {}\n", f.label, f.message),
    }
}

pub fn run(cli: &Cli, threads: usize) -> Output {
    let result = match &cli.command {
        Command::Search {
            target,
            bound,
            include_trivial,
            no_coprime,
            timings,
        } => {
            let opts = SearchOptions {
                require_coprime: !no_coprime,
                include_trivial: *include_trivial,
                threads,
            };
            search(cli.format, target, *bound, opts, *timings)
        }
        Command::Reduce { target, tuple } => reduce(cli.format, target, tuple),
        Command::Lift { target, tuple } => lift(cli.format, target, tuple),
        Command::Descend { target, tuple } => descend(cli.format, target, tuple),
        Command::Residues { target, modulus } => residues(cli.format, target, *modulus),
        Command::VerifyTable {
            bound,
            resolvent_bound,
            timings,
        } => {
            let bounds = TableBounds {
                quartic: *bound,
                resolvent: resolvent_bound.unwrap_or_else(|| TableBounds::from_quartic_bound(*bound).resolvent),
            };
            table(cli.format, bounds, threads, *timings)
        }
        Command::Catalog => Ok(catalog(cli.format)),
    };
    result.unwrap_or_else(|f| Output {
        document: render_failure(cli.format, &f),
        diagnostics: vec![format!("error: {}", f.message)],
        exit: f.exit,
    })
}

fn csv_doc<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.write_record(&row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn joined(values: &[Int]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn parse_tuple(raw: &[String], len: usize, what: &str) -> Result<Vec<Int>, Failure> {
    let values = raw
        .iter()
        .map(|s| {
            s.trim()
                .parse::<Int>()
                .map_err(|_| usage("InvalidTuple", format!("not an integer: {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != len {
        return Err(usage(
            "InvalidTuple",
            format!("{what} takes {len} integers, got {}", values.len()),
        ));
    }
    Ok(values)
}

fn search(format: Format, target: &str, bound: Option<u64>, opts: SearchOptions, timings: bool) -> Result<Output, Failure> {
    let report = if let Some(entry) = lookup(target) {
        search_quartic(&entry.equation, bound.unwrap_or(DEFAULT_QUARTIC_BOUND), opts)
    } else if let Some(sys) = lookup_resolvent(target) {
        search_resolvent(sys, bound.unwrap_or(DEFAULT_RESOLVENT_BOUND), opts)
    } else {
        return Err(usage("UnknownTarget", format!("unknown target {target:?}")));
    }
    .map_err(|e| usage("BoundExceeded", e.to_string()))?;
    Ok(Output::ok(render_search(format, &report, timings)))
}

fn render_search(format: Format, report: &SearchReport, timings: bool) -> String {
    match format {
        Format::Json => pretty(&report.to_json(timings)),
        Format::Csv => {
            let arity = report.solutions.first().map_or(0, |w| w.coords().len());
            let header: &[&str] = if arity == 4 || lookup_resolvent(&report.target).is_some() {
                &["id", "X", "Y", "X'", "Y'"]
            } else {
                &["id", "x", "y", "z"]
            };
            let rows = report.solutions.iter().map(|w| {
                std::iter::once(report.target.clone())
                    .chain(w.coords().iter().map(ToString::to_string))
                    .collect()
            });
            csv_doc(header, rows)
        }
        Format::Text => {
            let mut s = format!(
                "{} bound={} coprime={} include_trivial={}\nsolutions: {}  orbit_count: {}\n",
                report.target,
                report.bound,
                report.require_coprime,
                report.include_trivial,
                report.solutions.len(),
                report.orbit_count
            );
            for w in &report.solutions {
                let c: Vec<String> = w.coords().iter().map(ToString::to_string).collect();
                s.push_str(&format!("  ({}){}\n", c.join(", "), if w.trivial() { "  trivial" } else { "" }));
            }
            if timings {
                s.push_str(&format!(
                    "elapsed_ms: {}  partitions: {}\n",
                    report.elapsed.as_millis(),
                    report.partitions
                ));
            }
            s
        }
    }
}

fn reduction_failure(e: ReductionError) -> Failure {
    let label = e.label();
    usage(label, e.to_string())
}

fn finish_reduction<T>(format: Format, result: Reduction<T>) -> Result<Output, Failure> {
    match result {
        Ok((_, trace)) => Ok(Output::ok(render_trace(format, &trace, None))),
        Err(ReductionError::StageFailure { failure, partial }) => Ok(Output {
            document: render_trace(format, &partial, Some(&failure)),
            diagnostics: vec![format!("StageFailure: {failure}")],
            exit: EXIT_FINDING,
        }),
        Err(e) => Err(reduction_failure(e)),
    }
}

fn reduce(format: Format, target: &str, tuple: &[String]) -> Result<Output, Failure> {
    let id = lookup(target)
        .map(|e| e.equation.id.as_str())
        .ok_or_else(|| usage("UnknownTarget", format!("unknown target {target:?}")))?;
    let v = parse_tuple(tuple, 3, "reduce")?;
    match id {
        "E2" => finish_reduction(format, forward_reduce_biquadratic(&v[0], &v[1], &v[2])),
        "E4" => finish_reduction(format, sextic_to_resolvent(&v[0], &v[1], &v[2])),
        other => Err(usage("NoReductionMap", format!("no reduction map for {other}; use E2 or E4"))),
    }
}

fn lift(format: Format, target: &str, tuple: &[String]) -> Result<Output, Failure> {
    let id = lookup(target)
        .map(|e| e.equation.id.as_str())
        .ok_or_else(|| usage("UnknownTarget", format!("unknown target {target:?}")))?;
    let v = parse_tuple(tuple, 4, "lift")?;
    let res = ResolventSolution::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone());
    match id {
        "E2" => finish_reduction(format, backward_lift_biquadratic(&res)),
        "E4" => finish_reduction(format, resolvent_to_sextic(&res)),
        other => Err(usage("NoReductionMap", format!("no lift to {other}; use E2 or E4"))),
    }
}

fn render_trace(format: Format, trace: &ReductionTrace, failure: Option<&StageFailure>) -> String {
    match format {
        Format::Json => {
            let mut s = trace.to_json_lines();
            if let Some(f) = failure {
                s.push_str(&json!({ "failure": f.to_json() }).to_string());
                s.push('\n');
            }
            s
        }
        Format::Csv => {
            let mut rows = Vec::new();
            for (idx, step) in trace.steps.iter().enumerate() {
                for (role, values) in [("input", &step.inputs), ("output", &step.outputs)] {
                    for (name, value) in values {
                        rows.push(vec![
                            idx.to_string(),
                            step.stage().as_str().to_string(),
                            step.rule.as_str().to_string(),
                            role.to_string(),
                            name.to_string(),
                            value.to_string(),
                        ]);
                    }
                }
            }
            if let Some(outcome) = &trace.outcome {
                let kind = match outcome {
                    TraceOutcome::Resolvent(_) => "resolvent",
                    TraceOutcome::Quartic(_) => "quartic",
                };
                for (k, value) in outcome.coords().iter().enumerate() {
                    rows.push(vec![
                        "final".into(),
                        String::new(),
                        kind.into(),
                        "solution".into(),
                        k.to_string(),
                        value.to_string(),
                    ]);
                }
            }
            if let Some(f) = failure {
                for (name, value) in &f.values {
                    rows.push(vec![
                        "failure".into(),
                        f.stage.clone(),
                        f.reason.clone(),
                        "value".into(),
                        name.clone(),
                        value.to_string(),
                    ]);
                }
            }
            csv_doc(&["step", "stage", "rule", "role", "name", "value"], rows)
        }
        Format::Text => {
            let mut s = String::new();
            let pairs = |vs: &[(&str, Int)]| vs.iter().map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(" ");
            for (idx, step) in trace.steps.iter().enumerate() {
                s.push_str(&format!(
                    "{:>2}. {:<20} {:<24} {} -> {}\n",
                    idx + 1,
                    step.stage().as_str(),
                    step.rule.as_str(),
                    pairs(&step.inputs),
                    pairs(&step.outputs)
                ));
            }
            if let Some(outcome) = &trace.outcome {
                s.push_str(&format!("final: ({})\n", outcome.coords().iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")));
            }
            if let Some(f) = failure {
                s.push_str(&format!("FAILURE: {f}\n"));
            }
            s
        }
    }
}

fn descend(format: Format, target: &str, tuple: &[String]) -> Result<Output, Failure> {
    let sys = lookup_resolvent(target).ok_or_else(|| usage("UnknownTarget", format!("unknown resolvent {target:?}")))?;
    let v = parse_tuple(tuple, 4, "descend")?;
    let sol = ResolventSolution::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone());
    let trace = descent_chain(sys, &sol).map_err(|e| match e {
        DescentError::InternalInvariantBroken(_) => Failure {
            exit: EXIT_INTERNAL,
            label: "InternalInvariantBroken",
            message: e.to_string(),
        },
        DescentError::UnsupportedResolvent(_) => usage("UnsupportedResolvent", e.to_string()),
        other => usage("DescentError", other.to_string()),
    })?;
    let mut out = Output::ok(render_descent(format, &trace));
    match &trace.terminal {
        DescentTerminal::StageFailure(f) => {
            out.exit = EXIT_FINDING;
            out.diagnostics.push(format!("StageFailure: {f}"));
        }
        DescentTerminal::NonSolutionInput => out.diagnostics.push(format!("note: {} is not a solution of {}", joined(&v), sys.id)),
        _ => {}
    }
    Ok(out)
}

fn render_descent(format: Format, trace: &DescentTrace) -> String {
    match format {
        Format::Json => trace.to_json_lines(),
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = trace
                .steps
                .iter()
                .enumerate()
                .map(|(idx, step)| {
                    vec![
                        idx.to_string(),
                        joined(&step.input.coords()),
                        joined(&step.output.coords()),
                        step.nu_in.to_string(),
                        step.nu_out.to_string(),
                    ]
                })
                .collect();
            rows.push(vec![
                "terminal".into(),
                trace.terminal.label().into(),
                String::new(),
                String::new(),
                String::new(),
            ]);
            csv_doc(&["step", "input", "output", "nu_in", "nu_out"], rows)
        }
        Format::Text => {
            let mut s = format!("start: ({})\n", joined(&trace.start.coords()).replace(' ', ", "));
            for (idx, step) in trace.steps.iter().enumerate() {
                s.push_str(&format!(
                    "{:>2}. ({}) -> ({})  nu {} -> {}\n",
                    idx + 1,
                    joined(&step.input.coords()).replace(' ', ", "),
                    joined(&step.output.coords()).replace(' ', ", "),
                    step.nu_in,
                    step.nu_out
                ));
            }
            s.push_str(&format!("terminal: {}\n", trace.terminal.label()));
            if let DescentTerminal::StageFailure(f) = &trace.terminal {
                s.push_str(&format!("FAILURE: {f}\n"));
            }
            s
        }
    }
}

fn residues(format: Format, target: &str, modulus: Option<u64>) -> Result<Output, Failure> {
    let sys = lookup_resolvent(target).ok_or_else(|| usage("UnknownTarget", format!("unknown resolvent {target:?}")))?;
    let moduli: Vec<u64> = modulus.map_or_else(|| LOWER_BOUND_MODULI.to_vec(), |m| vec![m]);
    let reports = moduli
        .iter()
        .map(|&m| residue_obstruction(sys, m))
        .collect::<Result<Vec<ObstructionReport>, _>>()
        .map_err(|e| usage("BoundExceeded", e.to_string()))?;
    let lower = if modulus.is_none() { nu_lower_bound(sys).ok() } else { None };
    let document = match format {
        Format::Json if modulus.is_some() => pretty(&reports[0].to_json()),
        Format::Json => pretty(&json!({
            "system": sys.id,
            "obstructions": reports.iter().map(ObstructionReport::to_json).collect::<Vec<_>>(),
            "nu_lower_bound": lower,
        })),
        Format::Csv => csv_doc(
            &["system", "modulus", "forced", "surviving_pairs", "surviving_products"],
            reports.iter().map(|r| {
                vec![
                    r.system.clone(),
                    r.modulus.to_string(),
                    r.forced.to_string(),
                    r.surviving_pairs.to_string(),
                    r.surviving_products.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
                ]
            }),
        ),
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                s.push_str(&format!(
                    "{} mod {}: forced={} surviving_pairs={} products={:?}\n",
                    r.system, r.modulus, r.forced, r.surviving_pairs, r.surviving_products
                ));
            }
            if let Some(n) = lower {
                s.push_str(&format!("nu_lower_bound: {n}\n"));
            }
            s
        }
    };
    Ok(Output::ok(document))
}

fn overall(entries: &[TableEntry]) -> Verdict {
    if entries.iter().any(|e| e.verdict == Verdict::Counterexample) {
        Verdict::Counterexample
    } else if entries.iter().any(|e| e.verdict == Verdict::ContractViolation) {
        Verdict::ContractViolation
    } else {
        Verdict::Consistent
    }
}

fn table(format: Format, bounds: TableBounds, threads: usize, timings: bool) -> Result<Output, Failure> {
    let entries = verify_table(bounds, threads).map_err(|e| usage("BoundExceeded", e.to_string()))?;
    let verdict = overall(&entries);
    let document = match format {
        Format::Json => pretty(&json!({
            "quartic_bound": bounds.quartic,
            "resolvent_bound": bounds.resolvent,
            "verdict": verdict.as_str(),
            "entries": entries.iter().map(|e| e.to_json(timings)).collect::<Vec<_>>(),
        })),
        Format::Csv => csv_doc(
            &["id", "verdict", "bound", "solutions", "orbit_count", "cross_checks", "cross_check_failures"],
            entries.iter().map(|e| {
                vec![
                    e.report.target.clone(),
                    e.verdict.as_str().into(),
                    e.report.bound.to_string(),
                    e.report.solutions.len().to_string(),
                    e.report.orbit_count.to_string(),
                    e.cross_checks.len().to_string(),
                    e.cross_checks.iter().filter(|c| !c.ok()).count().to_string(),
                ]
            }),
        ),
        Format::Text => {
            let mut s = String::new();
            for e in &entries {
                s.push_str(&format!(
                    "{:<4} {:<18} bound={:<5} solutions={} orbits={}",
                    e.report.target,
                    e.verdict.as_str(),
                    e.report.bound,
                    e.report.solutions.len(),
                    e.report.orbit_count
                ));
                if !e.cross_checks.is_empty() {
                    let passed = e.cross_checks.iter().filter(|c| c.ok()).count();
                    s.push_str(&format!(" cross_checks={passed}/{}", e.cross_checks.len()));
                }
                s.push('\n');
            }
            let consistent = entries.iter().filter(|e| e.verdict == Verdict::Consistent).count();
            s.push_str(&format!("{consistent}/{} CONSISTENT\n", entries.len()));
            s
        }
    };
    let mut diagnostics = Vec::new();
    for e in &entries {
        for w in &e.report.solutions {
            diagnostics.push(format!("COUNTEREXAMPLE {}: {}", e.report.target, int_array(&w.coords())));
        }
        for c in e.cross_checks.iter().filter(|c| !c.ok()) {
            diagnostics.push(format!(
                "contract: {} on {} expected {} observed {}",
                c.map,
                int_array(&c.input),
                c.expected,
                c.observed
            ));
        }
    }
    let stage_failure = entries.iter().any(TableEntry::has_stage_failure);
    let exit = if verdict == Verdict::Counterexample || stage_failure {
        EXIT_FINDING
    } else if verdict == Verdict::ContractViolation {
        EXIT_INTERNAL
    } else {
        EXIT_OK
    };
    Ok(Output {
        document,
        diagnostics,
        exit,
    })
}

fn catalog(format: Format) -> Output {
    let document = match format {
        Format::Json => pretty(&json!({
            "equations": list_catalog().iter().map(|entry| {
                let q = &entry.equation;
                json!({
                    "id": q.id,
                    "expression": q.expression(),
                    "coefficients": int_array([&q.a, &q.b, &q.c, &q.d]),
                    "z_exponent": q.e,
                    "resolvent": entry.membership.as_str(),
                })
            }).collect::<Vec<_>>(),
            "resolvents": resolvent_catalog().iter().map(|r| json!({
                "id": r.id,
                "expression": r.expression(),
                "coefficients": int_array([&r.m, &r.n, &r.k, &r.l]),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => csv_doc(
            &["id", "kind", "expression", "resolvent"],
            list_catalog()
                .iter()
                .map(|e| {
                    vec![
                        e.equation.id.clone(),
                        "quartic".into(),
                        e.equation.expression(),
                        e.membership.as_str().into(),
                    ]
                })
                .chain(
                    resolvent_catalog()
                        .iter()
                        .map(|r| vec![r.id.clone(), "resolvent".into(), r.expression(), String::new()]),
                ),
        ),
        Format::Text => {
            let mut s = String::new();
            for e in list_catalog() {
                s.push_str(&format!(
                    "{:<4} {:<24} resolvent: {}\n",
                    e.equation.id,
                    e.equation.expression(),
                    e.membership.as_str()
                ));
            }
            for r in resolvent_catalog() {
                s.push_str(&format!("{:<4} {}\n", r.id, r.expression()));
            }
            s
        }
    };
    Output::ok(document)
}

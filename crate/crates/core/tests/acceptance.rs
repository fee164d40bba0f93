//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use graph_morse::config_complex::Cell;
use graph_morse::corpus;
use graph_morse::gauge::{flux, square_boundary_cycle, DirectedEdge, PhaseExpr};
use graph_morse::graph_model::Edge;
use graph_morse::morse_homology::morse_boundary_by_vpaths;
use graph_morse::pipeline::{analyze, verify_invariants, Analysis, AnalysisOptions};
use graph_morse::trial_fix::TieBreakPolicy;

const GOLDEN_LIMIT: Duration = Duration::from_secs(1);
const PROPERTY_LIMIT: Duration = Duration::from_secs(5 * 60);
const CROSS_LIMIT: Duration = Duration::from_secs(2 * 60);
const PROPERTY_SAMPLES: u64 = 200;
const PROPERTY_SEED: u64 = 20240917;
const PROPERTY_VERTICES: (usize, usize) = (3, 8);
const CROSS_MAX_VERTICES: usize = 6;

type Outcome = Result<String, String>;

fn c(s: &str) -> Cell {
    s.parse().unwrap()
}

fn cells(list: &[&str]) -> BTreeSet<Cell> {
    list.iter().map(|s| c(s)).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixed_tree(edges: &[(usize, usize)], policy: TieBreakPolicy) -> AnalysisOptions {
    AnalysisOptions {
        policy,
        tree: Some(edges.iter().map(|&(a, b)| Edge::new(a, b)).collect()),
        root: Some(1),
    }
}

fn lasso() -> Result<Analysis, String> {
    analyze(&corpus::lasso(), &fixed_tree(&[(1, 2), (2, 3), (2, 4)], TieBreakPolicy::Min)).map_err(|e| e.to_string())
}

fn ac1_lasso() -> Outcome {
    let a = lasso()?;
    ensure(a.critical.dim0 == cells(&["(1,2)"]), || format!("critical 0-cells {:?}", a.critical.dim0))?;
    ensure(a.critical.dim1 == cells(&["3x(2,4)", "1x(3,4)"]), || {
        format!("critical 1-cells {:?}", a.critical.dim1)
    })?;
    ensure(a.critical.dim2.is_empty(), || format!("critical 2-cells {:?}", a.critical.dim2))?;
    let fixes: Vec<(Cell, i64, i64)> = a
        .log
        .raised_cells()
        .map(|r| (*r, a.trial.value(r), a.f2.value(r)))
        .collect();
    ensure(fixes == vec![(c("3x(2,4)"), 10, 11)], || format!("repair fixes {fixes:?}"))?;
    ensure(a.homology.free_rank == 2 && a.homology.torsion.is_empty(), || {
        format!("H1 = {}", a.homology.h1_string())
    })?;
    ensure(a.agreement(), || format!("oracle {:?}", a.oracle))?;
    Ok(format!("H1 = {}, fix 3x(2,4): 10 -> 11", a.homology.h1_string()))
}

fn ac2_bowtie() -> Outcome {
    let a = analyze(
        &corpus::bowtie(),
        &fixed_tree(&[(1, 2), (2, 3), (2, 4), (2, 5)], TieBreakPolicy::Min),
    )
    .map_err(|e| e.to_string())?;
    ensure(a.critical.dim0 == cells(&["(1,2)"]), || format!("critical 0-cells {:?}", a.critical.dim0))?;
    ensure(
        a.critical.dim1 == cells(&["1x(4,5)", "2x(1,3)", "3x(2,4)", "3x(2,5)", "4x(2,5)"]),
        || format!("critical 1-cells {:?}", a.critical.dim1),
    )?;
    ensure(a.critical.dim2 == cells(&["(1,3)x(4,5)"]), || format!("critical 2-cells {:?}", a.critical.dim2))?;
    let col = a.morse.boundary_of(&c("(1,3)x(4,5)"));
    let plus = vec![(c("3x(2,4)"), 1), (c("3x(2,5)"), -1)];
    let minus: Vec<(Cell, i64)> = plus.iter().map(|(x, k)| (*x, -k)).collect();
    ensure(col == plus || col == minus, || format!("Morse boundary of the 2-cell {col:?}"))?;
    ensure(a.morse.boundary1.is_zero(), || format!("d1 = {}", a.morse.boundary1))?;
    ensure(a.homology.free_rank == 4 && a.homology.torsion.is_empty(), || {
        format!("H1 = {}", a.homology.h1_string())
    })?;
    ensure(a.agreement(), || format!("oracle {:?}", a.oracle))?;
    let sign = if col == plus { "+" } else { "-" };
    Ok(format!("d2 = {sign}(3x(2,4) - 3x(2,5)), H1 = {}", a.homology.h1_string()))
}

fn ac3_star() -> Outcome {
    let a = analyze(&corpus::star(), &AnalysisOptions::default()).map_err(|e| e.to_string())?;
    let counts = [a.complex.count(0), a.complex.count(1), a.complex.count(2)];
    ensure(counts == [6, 6, 0], || format!("cell counts {counts:?}"))?;
    ensure(a.homology.free_rank == 1 && a.homology.torsion.is_empty(), || {
        format!("Morse H1 = {}", a.homology.h1_string())
    })?;
    ensure(a.oracle.free_rank == 1 && a.oracle.torsion.is_empty(), || {
        format!("oracle H1 = {}", a.oracle.h1_string())
    })?;
    Ok("cells 6/6/0, H1 = Z by both routes".into())
}

fn ac4_gauge() -> Outcome {
    let a = lasso()?;
    let g = &a.gauge;
    ensure(g.params.len() == 2, || format!("{} parameters", g.params.len()))?;
    let phi = g.param_of(&c("1x(3,4)")).ok_or("1x(3,4) carries no parameter")?;
    let tail = g.phase(&DirectedEdge::forward(c("2x(3,4)")));
    ensure(tail == Some(PhaseExpr::param(phi)), || format!("phase of 2x(3,4) is {tail:?}"))?;
    let cycle = square_boundary_cycle(&c("(1,2)x(3,4)")).unwrap();
    let fl = flux(g, &cycle).map_err(|e| e.to_string())?;
    ensure(fl.is_zero(), || format!("square flux {fl}"))?;
    Ok(format!("2 parameters, 2x(3,4) = {}, square flux 0", PhaseExpr::param(phi)))
}

fn ac5_properties() -> Outcome {
    let mut tally = [0usize; 7];
    let letters = ["a", "b", "c", "d", "e", "f", "g"];
    let mut runs = 0;
    for i in 0..PROPERTY_SAMPLES {
        let g = corpus::sample_graph(PROPERTY_SEED, i, PROPERTY_VERTICES.0, PROPERTY_VERTICES.1);
        for policy in TieBreakPolicy::ALL {
            runs += 1;
            let a = analyze(&g, &AnalysisOptions { policy, ..Default::default() })
                .map_err(|e| format!("sample {i} ({policy}): {e}"))?;
            for f in verify_invariants(&a, false) {
                let slot = match f.check {
                    "morse" => 0,
                    "acyclic" => 1,
                    "cellular_d1_d2" | "morse_d1_d2" => 2,
                    "classification" => 3,
                    "oracle" | "oracle_h0" => 4,
                    "morse_inequalities" => 5,
                    "euler" => 6,
                    _ => return Err(format!("sample {i} ({policy}): {} {}", f.check, f.detail)),
                };
                tally[slot] += 1;
                if tally.iter().sum::<usize>() == 1 {
                    eprintln!("first failure: sample {i} ({policy}) {}: {}", f.check, f.detail);
                }
            }
        }
    }
    let bad: Vec<String> = letters
        .iter()
        .zip(tally)
        .filter(|(_, n)| *n > 0)
        .map(|(l, n)| format!("({l}) x{n}"))
        .collect();
    ensure(bad.is_empty(), || format!("failures {}", bad.join(", ")))?;
    Ok(format!("{PROPERTY_SAMPLES} graphs, {runs} runs, (a)-(g) all hold"))
}

fn ac6_cross_validation() -> Outcome {
    let mut graphs = 0;
    let mut columns = 0;
    for n in 2..=CROSS_MAX_VERTICES {
        for g in corpus::connected_graph_classes(n) {
            graphs += 1;
            for policy in TieBreakPolicy::ALL {
                let a = analyze(&g, &AnalysisOptions { policy, ..Default::default() }).map_err(|e| e.to_string())?;
                let by_paths = morse_boundary_by_vpaths(&a.complex, &a.field).map_err(|e| e.to_string())?;
                ensure(by_paths.boundary2 == a.morse.boundary2 && by_paths.boundary1 == a.morse.boundary1, || {
                    format!("mismatch on {g:?} ({policy})")
                })?;
                columns += a.morse.critical[2].len();
            }
        }
    }
    Ok(format!("{graphs} graphs, {columns} critical 2-cell columns agree"))
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, Duration, fn() -> Outcome); 6] = [
        ("AC1", "lasso golden", GOLDEN_LIMIT, ac1_lasso),
        ("AC2", "bow-tie golden", GOLDEN_LIMIT, ac2_bowtie),
        ("AC3", "star golden", GOLDEN_LIMIT, ac3_star),
        ("AC4", "lasso gauge", GOLDEN_LIMIT, ac4_gauge),
        ("AC5", "property suite", PROPERTY_LIMIT, ac5_properties),
        ("AC6", "V-path cross-validation", CROSS_LIMIT, ac6_cross_validation),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > limit => Err(format!("{msg}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("{id} PASS {name}: {msg} [{elapsed:.2?} < {limit:?}]"),
            Err(msg) => {
                failed += 1;
                println!("{id} FAIL {name}: {msg} [{elapsed:.2?}]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 6 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

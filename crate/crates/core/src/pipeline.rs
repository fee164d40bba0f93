//! The full computation for one graph, its self-checks, and the JSON report.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::complex::CellLike;
use crate::config_complex::{build_d2, euler_characteristic, Cell, ComplexError, TwoParticleComplex};
use crate::discrete_morse::{
    build_gradient_field, check_acyclic, check_morse, enumerate_vpaths, CellFunction, GradientField, MorseError,
    PathEnd,
};
use crate::gauge::{build_gauge, flux, square_boundary_cycle, GaugeError, GaugePotential};
use crate::graph_model::{
    build_f1, build_spanning_tree, graph_complex, relabel_by_tree, Edge, Graph, GraphError, OneParticleMorse,
    Relabeling, RootedSpanningTree, Vertex,
};
use crate::input::RawGraph;
use crate::morse_homology::{
    cellular_homology_oracle, homology_h1, is_perfect, morse_boundary, morse_boundary_by_vpaths, HomologyError,
    HomologyResult, MorseComplex,
};
use crate::trial_fix::{classify_critical, repair, trial_f2, CriticalCells, RepairError, RepairLog, TieBreakPolicy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("graph_model: {0}")]
    Graph(#[from] GraphError),
    #[error("config_complex: {0}")]
    Complex(#[from] ComplexError),
    #[error("trial_fix: {0}")]
    Repair(#[from] RepairError),
    #[error("discrete_morse: {0}")]
    Morse(#[from] MorseError),
    #[error("morse_homology: {0}")]
    Homology(#[from] HomologyError),
    #[error("gauge: {0}")]
    Gauge(#[from] GaugeError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub policy: TieBreakPolicy,
    /// Tree edges in input labels.
    pub tree: Option<Vec<Edge>>,
    /// Root in input labels.
    pub root: Option<Vertex>,
}

/// Everything computed for one graph. All cells use the relabelled vertices.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub input: Graph,
    pub options: AnalysisOptions,
    pub relabeling: Relabeling,
    pub graph: Graph,
    pub tree: RootedSpanningTree,
    pub f1: OneParticleMorse,
    pub complex: TwoParticleComplex,
    pub trial: CellFunction<Cell>,
    pub f2: CellFunction<Cell>,
    pub log: RepairLog,
    pub field: GradientField<Cell>,
    pub critical: CriticalCells,
    pub predicted: CriticalCells,
    pub morse: MorseComplex<Cell>,
    pub homology: HomologyResult,
    pub oracle: HomologyResult,
    pub gauge: GaugePotential,
}

impl Analysis {
    pub fn agreement(&self) -> bool {
        self.homology == self.oracle
    }

    pub fn perfect(&self) -> bool {
        is_perfect(self.morse.counts(), &self.oracle)
    }
}

pub fn analyze(input: &Graph, options: &AnalysisOptions) -> Result<Analysis, PipelineError> {
    let requested = build_spanning_tree(input, options.tree.as_deref(), options.root)?;
    let (graph, tree, relabeling) = relabel_by_tree(input, &requested);
    let complex = build_d2(&graph)?;
    let f1 = build_f1(&graph, &tree);
    let trial = trial_f2(&complex, &f1);
    let (f2, log) = repair(&complex, &trial, &tree, options.policy)?;
    let field = build_gradient_field(&complex, &f2)?;
    let critical = CriticalCells::from_field(&field);
    let predicted = classify_critical(&graph, &tree, options.policy);
    let morse = morse_boundary(&complex, &field)?;
    let homology = homology_h1(&morse);
    let oracle = cellular_homology_oracle(&complex);
    let gauge = build_gauge(&complex, &field)?;
    Ok(Analysis {
        input: input.clone(),
        options: options.clone(),
        relabeling,
        graph,
        tree,
        f1,
        complex,
        trial,
        f2,
        log,
        field,
        critical,
        predicted,
        morse,
        homology,
        oracle,
        gauge,
    })
}

/// A failed self-check, named by the property it tests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantFailure {
    pub check: &'static str,
    pub detail: String,
}

/// Runs every self-check on an analysis. `cross_validate` adds the slower
/// comparison against explicit V-path enumeration.
pub fn verify_invariants(a: &Analysis, cross_validate: bool) -> Vec<InvariantFailure> {
    let mut out = Vec::new();
    let mut check = |name: &'static str, ok: bool, detail: &dyn Fn() -> String| {
        if !ok {
            out.push(InvariantFailure {
                check: name,
                detail: detail(),
            });
        }
    };

    // One-particle layer.
    let gc = graph_complex(&a.graph);
    let f1_field = build_gradient_field(&gc, &a.f1.as_cell_function());
    check("f1_morse", f1_field.is_ok(), &|| format!("{f1_field:?}"));
    if let Ok(field) = &f1_field {
        let crit = field.critical().len();
        check("f1_critical_count", crit == 1 + a.graph.cycle_rank(), &|| {
            format!("{crit} critical cells, cycle rank {}", a.graph.cycle_rank())
        });
    }
    check(
        "parent_labels",
        a.graph.vertices().all(|v| a.tree.parent(v).is_none_or(|p| p < v)) && a.tree.root() == 1,
        &|| "tree labels not in preorder".into(),
    );

    // (a) Morse function.
    let violations = check_morse(&a.complex, &a.f2).map(|v| v.len());
    check("morse", violations == Ok(0), &|| format!("{violations:?}"));
    // (b) acyclic field.
    check("acyclic", check_acyclic(&a.complex, &a.field), &|| String::new());
    // (c) chain complexes.
    check(
        "cellular_d1_d2",
        a.complex.boundary_matrix(1).mul(&a.complex.boundary_matrix(2)).is_zero(),
        &|| String::new(),
    );
    check("morse_d1_d2", a.morse.boundary1.mul(&a.morse.boundary2).is_zero(), &|| {
        format!("d1 = {}\nd2 = {}", a.morse.boundary1, a.morse.boundary2)
    });
    // (d) classification.
    check("classification", a.predicted == a.critical, &|| {
        format!("predicted {:?}, realized {:?}", a.predicted, a.critical)
    });
    // (e) oracle agreement.
    check("oracle", a.agreement(), &|| format!("morse {:?}, oracle {:?}", a.homology, a.oracle));
    check("oracle_h0", a.oracle.h0_rank == 1, &|| format!("h0 rank {}", a.oracle.h0_rank));
    // (f) Morse inequalities.
    let counts = a.morse.counts();
    let betti = a.oracle.betti();
    check("morse_inequalities", (0..3).all(|k| counts[k] >= betti[k]), &|| {
        format!("critical {counts:?}, betti {betti:?}")
    });
    // (g) Euler characteristic.
    let alt = counts[0] as i64 - counts[1] as i64 + counts[2] as i64;
    let chi = euler_characteristic(&a.complex);
    check("euler", alt == chi, &|| format!("critical alternating sum {alt}, euler {chi}"));

    // Repair audit.
    let raised: Vec<&Cell> = a.log.raised_cells().collect();
    let distinct: BTreeSet<&Cell> = raised.iter().copied().collect();
    check("raised_once", raised.len() == distinct.len(), &|| format!("{raised:?}"));
    let squares: BTreeSet<Cell> = a.log.step1_fixes.iter().map(|f| f.site).collect();
    let touched = a.complex.all_cells().find(|c| {
        let delta = a.f2.value(c) - a.trial.value(c);
        let expected = i64::from(distinct.contains(c) || squares.contains(c));
        delta != expected
    });
    check("repair_audit", touched.is_none(), &|| format!("unexpected change at {touched:?}"));

    // Gauge potential.
    let g = &a.gauge;
    check("gauge_params", g.params.len() == counts[1], &|| {
        format!("{} parameters, {} critical 1-cells", g.params.len(), counts[1])
    });
    for sq in a.complex.cells(2) {
        let Some(cycle) = square_boundary_cycle(sq) else { continue };
        let fl = flux(g, &cycle);
        if a.field.is_critical(sq) {
            let mismatch = g.params.iter().enumerate().find(|(i, p)| {
                fl.as_ref().map_or(true, |e| e.coefficient(*i) != a.morse.coefficient(sq, &p.cell))
            });
            check("gauge_constraint", mismatch.is_none(), &|| {
                format!("flux of {sq} is {fl:?}, Morse boundary {:?}", a.morse.boundary_of(sq))
            });
        } else {
            check("gauge_flux", fl.as_ref().is_ok_and(|e| e.is_zero()), &|| format!("flux of {sq} is {fl:?}"));
        }
    }
    if a.perfect() {
        check("gauge_independent", g.nontrivial_constraints().next().is_none(), &|| {
            format!("{:?}", g.constraints)
        });
    }

    if cross_validate {
        let by_paths = morse_boundary_by_vpaths(&a.complex, &a.field);
        check("vpath_boundary", by_paths.as_ref() == Ok(&a.morse), &|| {
            format!("substitution {:?}, V-paths {by_paths:?}", a.morse)
        });
        let starts: Vec<Cell> = a.complex.cells(1).to_vec();
        let bad = enumerate_vpaths(&a.complex, &a.field, &starts, PathEnd::Any)
            .into_iter()
            .find(|p| !descends(&a.f2, &p.cells));
        check("vpath_descent", bad.is_none(), &|| format!("{bad:?}"));
    }
    out
}

/// Along a V-path, pairing steps do not increase the value and face steps
/// strictly decrease it.
fn descends(f: &CellFunction<Cell>, cells: &[Cell]) -> bool {
    cells.windows(2).all(|w| {
        if w[1].dim() > w[0].dim() {
            f.value(&w[1]) <= f.value(&w[0])
        } else {
            f.value(&w[1]) < f.value(&w[0])
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputEcho {
    pub graph: RawGraph,
    pub tree: Vec<Edge>,
    pub root: Vertex,
    pub policy: TieBreakPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexValue {
    pub vertex: Vertex,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeValue {
    pub edge: Edge,
    pub value: i64,
    pub deleted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct F1Table {
    pub vertices: Vec<VertexValue>,
    pub edges: Vec<EdgeValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellValue {
    pub cell: Cell,
    pub trial: i64,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryReport {
    pub critical0: Vec<Cell>,
    pub critical1: Vec<Cell>,
    pub critical2: Vec<Cell>,
    /// Rows follow `critical0`, columns `critical1`.
    pub boundary1: Vec<Vec<i64>>,
    /// Rows follow `critical1`, columns `critical2`.
    pub boundary2: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaugeSummary {
    pub parameters: usize,
    pub constraints: usize,
    pub nontrivial_constraints: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub milliseconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub input: InputEcho,
    /// `[old, new]` vertex labels.
    pub relabeling: Vec<[Vertex; 2]>,
    pub cell_counts: [usize; 3],
    pub euler_characteristic: i64,
    pub f1: F1Table,
    pub f2: Vec<CellValue>,
    pub repair_log: RepairLog,
    pub critical_cells: CriticalCells,
    pub classification_matches: bool,
    pub morse_complex: BoundaryReport,
    pub homology: HomologyResult,
    pub oracle: HomologyResult,
    pub agreement: bool,
    pub perfect: bool,
    pub gauge: GaugeSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl RunReport {
    pub fn new(a: &Analysis, timing: Option<Timing>) -> Self {
        let mut tree: Vec<Edge> = a.tree.tree_edges().iter().copied().collect();
        tree.sort();
        let mut edges: Vec<EdgeValue> = a
            .graph
            .edges()
            .iter()
            .map(|e| EdgeValue {
                edge: *e,
                value: a.f1.edge(e),
                deleted: a.f1.is_deleted(e),
            })
            .collect();
        edges.sort_by_key(|e| e.edge);
        let mut graph = RawGraph::from_graph(&a.graph);
        graph.edges.sort();
        RunReport {
            input: InputEcho {
                graph,
                tree,
                root: a.tree.root(),
                policy: a.options.policy,
            },
            relabeling: a.relabeling.pairs().map(|(o, n)| [o, n]).collect(),
            cell_counts: [a.complex.count(0), a.complex.count(1), a.complex.count(2)],
            euler_characteristic: euler_characteristic(&a.complex),
            f1: F1Table {
                vertices: a
                    .graph
                    .vertices()
                    .map(|v| VertexValue {
                        vertex: v,
                        value: a.f1.vertex(v),
                    })
                    .collect(),
                edges,
            },
            f2: a
                .complex
                .all_cells()
                .map(|c| CellValue {
                    cell: *c,
                    trial: a.trial.value(c),
                    value: a.f2.value(c),
                })
                .collect(),
            repair_log: a.log.clone(),
            critical_cells: a.critical.clone(),
            classification_matches: a.predicted == a.critical,
            morse_complex: BoundaryReport {
                critical0: a.morse.critical[0].clone(),
                critical1: a.morse.critical[1].clone(),
                critical2: a.morse.critical[2].clone(),
                boundary1: a.morse.boundary1.to_i64_rows(),
                boundary2: a.morse.boundary2.to_i64_rows(),
            },
            homology: a.homology.clone(),
            oracle: a.oracle.clone(),
            agreement: a.agreement(),
            perfect: a.perfect(),
            gauge: GaugeSummary {
                parameters: a.gauge.params.len(),
                constraints: a.gauge.constraints.len(),
                nontrivial_constraints: a.gauge.nontrivial_constraints().count(),
            },
            timing,
        }
    }
}

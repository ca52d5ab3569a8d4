//! Equalization of two PC volume forms by chained volume transfers.
//!
//! Given two forms of equal total volume on the same complex, the
//! equalizer walks the excess of the source form over the target form
//! along adjacency paths: each outer iteration picks the cell with the
//! largest excess and a cell with the smallest (most negative) one,
//! routes the excess along a shortest dual-graph path, and restores every
//! intermediate cell's volume on the way, so the excess cell's deficit is
//! settled exactly and the count of unbalanced cells strictly drops. The
//! loop therefore terminates in at most as many outer iterations as there
//! are top cells.
//!
//! The output is a [`TransferChain`] (every step with its cocycles before
//! and after) and a [`Certificate`]; [`verify_chain`] re-derives the
//! whole certificate from the chain alone, re-verifying each step by
//! exact rational volume computations.

use crate::complex::{Complex, Point};
use crate::forms::{diff_cocycle, pullback_cocycle, DiffCocycle, FormError, PCForm};
use crate::scalar::{format_scalar, Scalar};
use crate::transfer::{solve_transfer, verify_transfer, TransferError, TransferMap, TransferSpec, VerificationReport};
use num_traits::{Signed, Zero};
use std::collections::VecDeque;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EqualizerError {
    #[error("total volumes differ{}: {expected} vs {got}", component.map(|c| format!(" on dual component {c}")).unwrap_or_default())]
    TotalVolumeMismatch { expected: String, got: String, component: Option<usize> },
    #[error("no adjacency path from cell {from} to cell {to}")]
    Disconnected { from: usize, to: usize },
    #[error("equalization requires dimension >= 2, got {0}")]
    DimensionUnsupported(usize),
    #[error("forms live on different complexes")]
    ComplexMismatch,
    #[error("difference cocycle is identically zero")]
    AlreadyEqual,
    #[error("complex has boundary facets but a closed manifold was required")]
    NotClosed,
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// How the outer loop picks the surplus/deficit pair to settle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathStrategy {
    /// Largest excess to largest deficit, shortest path between them.
    #[default]
    MaxToMin,
    /// The surplus/deficit pair at the smallest dual-graph distance.
    NearestPair,
}

#[derive(Debug, Clone, Default)]
pub struct EqualizeOptions {
    pub strategy: PathStrategy,
    /// Insist on a closed pseudomanifold.
    /// Off by default: transfers never move boundary points, so compact
    /// manifolds with boundary equalize just as well.
    pub require_closed: bool,
}

/// One transfer step inside a chain, with the cocycles around it.
#[derive(Debug, Clone)]
pub struct ChainStep {
    pub iteration: usize,
    pub map: TransferMap,
    pub before: Vec<Scalar>,
    pub after: Vec<Scalar>,
}

/// An ordered list of transfer steps realizing the equalization.
#[derive(Debug, Clone)]
pub struct TransferChain {
    complex: Arc<Complex>,
    initial: Vec<Scalar>,
    target: Vec<Scalar>,
    final_values: Vec<Scalar>,
    steps: Vec<ChainStep>,
}

impl TransferChain {
    /// Reassembles a chain from stored parts (deserialization). No
    /// coherence is assumed; run [`verify_chain`] on the result.
    pub fn from_parts(
        complex: Arc<Complex>,
        initial: Vec<Scalar>,
        target: Vec<Scalar>,
        final_values: Vec<Scalar>,
        steps: Vec<ChainStep>,
    ) -> Self {
        TransferChain { complex, initial, target, final_values, steps }
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    /// Cocycle of the form being transported (the equalizer's source).
    pub fn initial(&self) -> &[Scalar] {
        &self.initial
    }

    /// Cocycle the chain is asked to reach.
    pub fn target(&self) -> &[Scalar] {
        &self.target
    }

    /// Cocycle after the last step.
    pub fn final_values(&self) -> &[Scalar] {
        &self.final_values
    }

    pub fn steps(&self) -> &[ChainStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The transport direction: carries the mass distribution of the
    /// initial form onto the final one. Pullbacks compose contravariantly,
    /// so this applies each step's *inverse* map, in step order: after
    /// step i the pushed-forward mass is distributed as the cocycle
    /// recorded before step i+1.
    pub fn apply(&self, p: &Point) -> Result<Point, TransferError> {
        let mut q = p.clone();
        for step in &self.steps {
            q = step.map.apply_inverse(&q)?;
        }
        Ok(q)
    }

    /// The composed PL self-equivalence whose pullback of the initial form
    /// is the final form: the steps' forward maps applied in reverse order.
    pub fn apply_pullback_map(&self, p: &Point) -> Result<Point, TransferError> {
        let mut q = p.clone();
        for step in self.steps.iter().rev() {
            q = step.map.apply(&q)?;
        }
        Ok(q)
    }
}

/// Per-outer-iteration log entry.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub surplus_cell: usize,
    pub deficit_cell: usize,
    pub path: Vec<usize>,
    pub moved: Scalar,
}

/// Exact verification data for a chain.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub outer_iterations: usize,
    /// Bound on outer iterations: the number of top cells.
    pub iteration_bound: usize,
    pub iterations: Vec<IterationRecord>,
    pub chain_length: usize,
    pub final_diff: Vec<Scalar>,
    pub exact_arithmetic: bool,
    pub report: VerificationReport,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.exact_arithmetic
            && self.outer_iterations <= self.iteration_bound
            && self.final_diff.iter().all(Zero::is_zero)
            && self.report.passed()
    }

    /// One line per check, `ok`-prefixed, for CLI output.
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!(
                "{} outer iterations {} (bound {})",
                if self.outer_iterations <= self.iteration_bound { "ok" } else { "FAIL" },
                self.outer_iterations,
                self.iteration_bound
            ),
            format!(
                "{} final difference cocycle identically zero",
                if self.final_diff.iter().all(Zero::is_zero) { "ok" } else { "FAIL" }
            ),
        ];
        for check in &self.report.checks {
            out.push(format!(
                "{} {}{}",
                if check.passed { "ok" } else { "FAIL" },
                check.name,
                check.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default()
            ));
        }
        out
    }
}

/// Argmax and argmin of a difference cocycle, lowest cell id on ties.
pub fn find_extremes(d: &DiffCocycle) -> Result<(usize, usize), EqualizerError> {
    if d.is_zero() {
        return Err(EqualizerError::AlreadyEqual);
    }
    let values = d.values();
    let mut max_cell = 0;
    let mut min_cell = 0;
    for (cell, v) in values.iter().enumerate() {
        if v > &values[max_cell] {
            max_cell = cell;
        }
        if v < &values[min_cell] {
            min_cell = cell;
        }
    }
    Ok((max_cell, min_cell))
}

/// Shortest dual-graph path between two cells by BFS; among shortest paths
/// the lexicographically smallest id sequence.
pub fn adjacency_path(complex: &Complex, from: usize, to: usize) -> Result<Vec<usize>, EqualizerError> {
    let n = complex.num_cells();
    let mut dist = vec![usize::MAX; n];
    dist[to] = 0;
    let mut queue = VecDeque::from([to]);
    while let Some(c) = queue.pop_front() {
        for &d in complex.neighbors(c) {
            if dist[d] == usize::MAX {
                dist[d] = dist[c] + 1;
                queue.push_back(d);
            }
        }
    }
    if dist[from] == usize::MAX {
        return Err(EqualizerError::Disconnected { from, to });
    }
    let mut path = vec![from];
    let mut current = from;
    while current != to {
        let next = complex
            .neighbors(current)
            .iter()
            .copied()
            .filter(|&d| dist[d] + 1 == dist[current])
            .min()
            .expect("a descending neighbor exists on a shortest path");
        path.push(next);
        current = next;
    }
    Ok(path)
}

/// Equalizes `source_form` to `target_form`: returns a chain of transfer
/// steps whose final cocycle equals the target's exactly, plus the
/// certificate produced along the way.
pub fn equalize(
    target_form: &PCForm,
    source_form: &PCForm,
    options: &EqualizeOptions,
) -> Result<(TransferChain, Certificate), EqualizerError> {
    if !target_form.same_complex(source_form) {
        return Err(EqualizerError::ComplexMismatch);
    }
    let complex = source_form.complex().clone();
    if complex.dim() < 2 {
        return Err(EqualizerError::DimensionUnsupported(complex.dim()));
    }
    if options.require_closed && complex.has_boundary() {
        return Err(EqualizerError::NotClosed);
    }
    // Totals must agree on every dual component; transfers cannot cross
    // components.
    for component in 0..complex.num_components() {
        let mut want = Scalar::zero();
        let mut have = Scalar::zero();
        for cell in 0..complex.num_cells() {
            if complex.components()[cell] == component {
                want += target_form.value(cell);
                have += source_form.value(cell);
            }
        }
        if want != have {
            return Err(EqualizerError::TotalVolumeMismatch {
                expected: format_scalar(&want),
                got: format_scalar(&have),
                component: (complex.num_components() > 1).then_some(component),
            });
        }
    }

    let bound = complex.num_cells();
    let mut current = source_form.clone();
    let mut steps: Vec<ChainStep> = Vec::new();
    let mut iterations: Vec<IterationRecord> = Vec::new();
    let mut report = VerificationReport::default();

    loop {
        let d = diff_cocycle(target_form, &current)?;
        if d.is_zero() {
            break;
        }
        if iterations.len() >= bound {
            // The excess-count argument guarantees termination within the
            // bound; reaching this line means a logic error upstream.
            report.push("outer loop stayed within the cell-count bound", false, None);
            break;
        }
        let (surplus, deficit) = select_pair(&complex, &d, options.strategy)?;
        let path = adjacency_path(&complex, surplus, deficit)?;
        let moved = d.value(surplus).clone();
        debug_assert!(moved.is_positive());
        for pair in path.windows(2) {
            let (donor, receiver) = (pair[0], pair[1]);
            let spec = TransferSpec {
                receiver,
                donor,
                donor_new_volume: current.value(donor) - &moved,
            };
            let map = solve_transfer(&current, &spec)?;
            let next = pullback_cocycle(&map, &current)?;
            steps.push(ChainStep {
                iteration: iterations.len(),
                map,
                before: current.values().to_vec(),
                after: next.values().to_vec(),
            });
            current = next;
        }
        iterations.push(IterationRecord { surplus_cell: surplus, deficit_cell: deficit, path, moved });
    }

    let final_diff = diff_cocycle(target_form, &current)?;
    report.push(
        "final cocycle equals the target exactly",
        final_diff.is_zero(),
        None,
    );
    report.push(
        "total volume conserved",
        current.total_volume() == source_form.total_volume(),
        None,
    );
    let certificate = Certificate {
        outer_iterations: iterations.len(),
        iteration_bound: bound,
        iterations,
        chain_length: steps.len(),
        final_diff: final_diff.values().to_vec(),
        exact_arithmetic: true,
        report,
    };
    let chain = TransferChain {
        complex,
        initial: source_form.values().to_vec(),
        target: target_form.values().to_vec(),
        final_values: current.values().to_vec(),
        steps,
    };
    Ok((chain, certificate))
}

fn select_pair(
    complex: &Complex,
    d: &DiffCocycle,
    strategy: PathStrategy,
) -> Result<(usize, usize), EqualizerError> {
    match strategy {
        PathStrategy::MaxToMin => {
            let (surplus, _) = find_extremes(d)?;
            // The deficit partner must live in the surplus cell's dual
            // component; totals agree per component, so one exists.
            let component = complex.components()[surplus];
            let deficit = (0..complex.num_cells())
                .filter(|&c| complex.components()[c] == component)
                .min_by(|&a, &b| d.value(a).cmp(d.value(b)).then(a.cmp(&b)))
                .expect("component is nonempty");
            debug_assert!(d.value(deficit).is_negative());
            Ok((surplus, deficit))
        }
        PathStrategy::NearestPair => {
            let surpluses: Vec<usize> = (0..complex.num_cells()).filter(|&c| d.value(c).is_positive()).collect();
            let mut best: Option<(usize, usize, usize)> = None; // (dist, surplus, deficit)
            for &s in &surpluses {
                // BFS distances from the surplus cell.
                let mut dist = vec![usize::MAX; complex.num_cells()];
                dist[s] = 0;
                let mut queue = VecDeque::from([s]);
                while let Some(c) = queue.pop_front() {
                    for &n in complex.neighbors(c) {
                        if dist[n] == usize::MAX {
                            dist[n] = dist[c] + 1;
                            queue.push_back(n);
                        }
                    }
                }
                for t in 0..complex.num_cells() {
                    if d.value(t).is_negative() && dist[t] != usize::MAX {
                        let candidate = (dist[t], s, t);
                        if best.map_or(true, |b| candidate < b) {
                            best = Some(candidate);
                        }
                    }
                }
            }
            let (_, s, t) = best.ok_or(EqualizerError::AlreadyEqual)?;
            Ok((s, t))
        }
    }
}

/// Re-derives a certificate from a chain: every step re-verified through
/// [`verify_transfer`], chain consistency, final equality with the target
/// cocycle, and the iteration bound. Never errors; failures are report
/// lines.
pub fn verify_chain(chain: &TransferChain, target_form: &PCForm, source_form: &PCForm) -> Certificate {
    let mut report = VerificationReport::default();
    let complex = chain.complex();

    let start_values: &[Scalar] = chain.steps.first().map(|s| s.before.as_slice()).unwrap_or(&chain.final_values);
    report.push(
        "chain starts at the source cocycle",
        start_values == source_form.values() && chain.initial == source_form.values(),
        None,
    );

    let mut consistent = true;
    let mut detail = None;
    for (i, pair) in chain.steps.windows(2).enumerate() {
        if pair[0].after != pair[1].before {
            consistent = false;
            detail = Some(format!("step {} ends where step {} does not begin", i, i + 1));
            break;
        }
    }
    if let Some(last) = chain.steps.last() {
        if last.after != chain.final_values {
            consistent = false;
            detail = Some("last step does not end at the recorded final cocycle".into());
        }
    }
    report.push("consecutive cocycles agree", consistent, detail);

    for (i, step) in chain.steps.iter().enumerate() {
        match PCForm::from_cocycle(complex.clone(), step.before.clone()) {
            Ok(before) => {
                let step_report = verify_transfer(&step.map, &before);
                for check in step_report.checks {
                    report.push(format!("step {i}: {}", check.name), check.passed, check.detail);
                }
                match pullback_cocycle(&step.map, &before) {
                    Ok(pulled) => {
                        let ok = pulled.values() == step.after.as_slice();
                        report.push(
                            format!("step {i}: recorded cocycle matches the pullback"),
                            ok,
                            None,
                        );
                    }
                    Err(e) => report.push(format!("step {i}: pullback"), false, Some(e.to_string())),
                }
            }
            Err(e) => report.push(format!("step {i}: before-cocycle is a valid form"), false, Some(e.to_string())),
        }
    }

    let final_ok = chain.final_values == target_form.values() && chain.target == target_form.values();
    report.push("final cocycle equals the target exactly", final_ok, None);

    let outer_iterations = chain.steps.iter().map(|s| s.iteration + 1).max().unwrap_or(0);
    let bound = complex.num_cells();
    report.push(
        "outer iterations within the cell-count bound",
        outer_iterations <= bound,
        None,
    );

    let final_diff: Vec<Scalar> = target_form
        .values()
        .iter()
        .zip(&chain.final_values)
        .map(|(want, have)| have - want)
        .collect();
    Certificate {
        outer_iterations,
        iteration_bound: bound,
        iterations: Vec::new(),
        chain_length: chain.steps.len(),
        final_diff,
        exact_arithmetic: true,
        report,
    }
}

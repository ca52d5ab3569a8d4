//! Volume transfer between adjacent top cells.
//!
//! One transfer step moves a prescribed amount of volume from a *donor*
//! cell to an adjacent *receiver* through a PL self-homeomorphism of the
//! complex, built as a simplicial map between two pair subdivisions. The
//! map fixes every original vertex and keeps the pulled-back form constant
//! on each original cell, so the result is again a PC form on the same
//! complex with only the two cells' volumes changed.
//!
//! The solver uses the closed forms for the four construction points (the
//! shared-facet barycenter splits a cell's cones equally because the cone
//! volume over a facet is the facet-opposite barycentric weight of the
//! cone point), and then re-verifies every defining volume constraint by
//! independent rational determinant evaluation. [`verify_transfer`] is the
//! contract: it re-checks vertex fixing, piecewise constancy and the
//! transferred totals from scratch, with exact equality.

use crate::complex::{BaryPoint, Complex, ComplexError, FacetPoint, Point};
use crate::forms::PCForm;
use crate::scalar::{format_scalar, Scalar};
use crate::subdivision::{pair_subdivision, PairSubdivision, SubdivisionError};
use num_traits::{One, Signed};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TransferError {
    #[error("transfer amount {amount} is outside (0, {donor_volume})")]
    SpecOutOfRange { amount: String, donor_volume: String },
    #[error("cells {donor} and {receiver} are not adjacent")]
    NotAdjacent { donor: usize, receiver: usize },
    #[error("volume transfer requires dimension >= 2, got {0}")]
    DimensionUnsupported(usize),
    #[error("solved points violate a defining constraint: {0}")]
    DegenerateSolve(String),
    #[error("point lies outside the complex")]
    PointOutsideComplex,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Subdivision(#[from] SubdivisionError),
}

/// What a transfer step is asked to do: leave the donor cell with volume
/// `donor_new_volume` (strictly between 0 and its current volume) and let
/// the adjacent receiver absorb the difference.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferSpec {
    pub receiver: usize,
    pub donor: usize,
    pub donor_new_volume: Scalar,
}

/// One solved application of the transfer construction.
#[derive(Debug, Clone)]
pub struct TransferMap {
    complex: Arc<Complex>,
    spec: TransferSpec,
    donor_volume: Scalar,
    receiver_volume: Scalar,
    receiver_apex: BaryPoint,
    donor_apex: BaryPoint,
    source_facet_point: FacetPoint,
    target_facet_point: FacetPoint,
    source: PairSubdivision,
    target: PairSubdivision,
    vertex_map: Vec<usize>,
    cell_map: Vec<usize>,
}

impl TransferMap {
    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn receiver(&self) -> usize {
        self.spec.receiver
    }

    pub fn donor(&self) -> usize {
        self.spec.donor
    }

    /// The donor's volume after the step.
    pub fn donor_new_volume(&self) -> &Scalar {
        &self.spec.donor_new_volume
    }

    /// Donor cocycle value the step was solved against.
    pub fn donor_volume(&self) -> &Scalar {
        &self.donor_volume
    }

    pub fn receiver_volume(&self) -> &Scalar {
        &self.receiver_volume
    }

    /// Receiver volume after the step.
    pub fn receiver_new_volume(&self) -> Scalar {
        &self.receiver_volume + &self.donor_volume - &self.spec.donor_new_volume
    }

    /// Interior point of the receiver whose cone over the shared facet
    /// absorbs the transferred volume.
    pub fn receiver_apex(&self) -> &BaryPoint {
        &self.receiver_apex
    }

    /// Interior point of the donor bounding the slab that leaves it.
    pub fn donor_apex(&self) -> &BaryPoint {
        &self.donor_apex
    }

    /// Facet point of the source subdivision (cones the donor).
    pub fn source_facet_point(&self) -> &FacetPoint {
        &self.source_facet_point
    }

    /// Facet point of the target subdivision (cones the receiver).
    pub fn target_facet_point(&self) -> &FacetPoint {
        &self.target_facet_point
    }

    pub fn shared_facet(&self) -> &[usize] {
        self.source.shared_facet()
    }

    pub fn source(&self) -> &PairSubdivision {
        &self.source
    }

    pub fn target(&self) -> &PairSubdivision {
        &self.target
    }

    /// Source child vertex id -> target child vertex id.
    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    /// Source child cell id -> target child cell id.
    pub fn cell_map(&self) -> &[usize] {
        &self.cell_map
    }

    /// Evaluates the map at an ambient point: locate the source piece
    /// containing it (lowest child cell id on ties), push the barycentric
    /// weights through the vertex correspondence. Identity outside the
    /// donor/receiver pair.
    pub fn apply(&self, p: &Point) -> Result<Point, TransferError> {
        apply_simplicial(self.source.child(), self.target.child(), &self.vertex_map, p)
    }

    /// Evaluates the inverse map (target subdivision back to source).
    pub fn apply_inverse(&self, p: &Point) -> Result<Point, TransferError> {
        let mut inverse = vec![0; self.vertex_map.len()];
        for (s, &t) in self.vertex_map.iter().enumerate() {
            inverse[t] = s;
        }
        apply_simplicial(self.target.child(), self.source.child(), &inverse, p)
    }

    /// Convenience: evaluate at a barycentric point of the original complex.
    pub fn apply_bary(&self, p: &BaryPoint) -> Result<Point, TransferError> {
        let ambient = self.complex.to_ambient(p)?;
        self.apply(&ambient)
    }
}

fn apply_simplicial(
    source: &Arc<Complex>,
    target: &Arc<Complex>,
    vertex_map: &[usize],
    p: &Point,
) -> Result<Point, TransferError> {
    let (cell, weights) = source
        .locate(p)?
        .ok_or(TransferError::PointOutsideComplex)?;
    let tuple = source.cell(cell)?.vertex_ids();
    let mut coords = vec![Scalar::from_integer(0.into()); target.ambient_dim()];
    for (w, &v) in weights.iter().zip(tuple) {
        let image = target.vertex(vertex_map[v]);
        for (acc, x) in coords.iter_mut().zip(image.coords()) {
            *acc += w * x;
        }
    }
    Ok(Point::new(coords))
}

/// Solves one transfer step against the given form.
pub fn solve_transfer(form: &PCForm, spec: &TransferSpec) -> Result<TransferMap, TransferError> {
    let complex = form.complex().clone();
    let n = complex.dim();
    if n < 2 {
        return Err(TransferError::DimensionUnsupported(n));
    }
    let donor = spec.donor;
    let receiver = spec.receiver;
    let shared = complex
        .shared_facet(receiver, donor)?
        .ok_or(TransferError::NotAdjacent { donor, receiver })?;
    let donor_volume = form.value(donor).clone();
    let receiver_volume = form.value(receiver).clone();
    let amount = spec.donor_new_volume.clone();
    if !amount.is_positive() || amount >= donor_volume {
        return Err(TransferError::SpecOutOfRange {
            amount: format_scalar(&amount),
            donor_volume: format_scalar(&donor_volume),
        });
    }
    // Combined volume of the pair after the step.
    let combined = &receiver_volume + &donor_volume - &amount;

    // Both facet points are the shared-facet barycenter: the cone volume
    // over the facet opposite a vertex equals that vertex's barycentric
    // weight, so the equal-split systems pin the barycenter exactly.
    let facet_barycenter = complex.face_barycenter(&shared)?;

    // Donor apex w: weight 1 - A/V(donor) on the vertex opposite the shared
    // facet, A/(n V(donor)) on the facet vertices.
    let donor_apex = apex_point(&complex, donor, &shared, &amount / (&donor_volume * Scalar::from_integer(n.into())))?;
    // Receiver apex v: facet weights V(receiver)/(n T), apex weight
    // (V(donor) - A)/T.
    let receiver_apex = apex_point(
        &complex,
        receiver,
        &shared,
        &receiver_volume / (&combined * Scalar::from_integer(n.into())),
    )?;

    let step = assemble_transfer(
        &complex,
        spec,
        donor_volume,
        receiver_volume,
        receiver_apex,
        donor_apex,
        facet_barycenter.clone(),
        facet_barycenter,
    )?;
    check_defining_constraints(&step).map_err(TransferError::DegenerateSolve)?;
    Ok(step)
}

/// Assembles a transfer map from already-solved data (as stored in a chain
/// document), without re-running the solver. The defining constraints are
/// NOT assumed; run [`verify_transfer`] on the result.
#[allow(clippy::too_many_arguments)]
pub fn assemble_transfer(
    complex: &Arc<Complex>,
    spec: &TransferSpec,
    donor_volume: Scalar,
    receiver_volume: Scalar,
    receiver_apex: BaryPoint,
    donor_apex: BaryPoint,
    source_facet_point: FacetPoint,
    target_facet_point: FacetPoint,
) -> Result<TransferMap, TransferError> {
    let source = pair_subdivision(complex, spec.receiver, spec.donor, &receiver_apex, &source_facet_point)?;
    let target = pair_subdivision(complex, spec.donor, spec.receiver, &donor_apex, &target_facet_point)?;

    // Vertex correspondence: identity on original vertices; the receiver
    // apex goes to the target facet point and the source facet point goes
    // to the donor apex.
    let mut vertex_map: Vec<usize> = (0..source.child().vertices().len()).collect();
    vertex_map[source.apex_vertex()] = target.facet_vertex();
    vertex_map[source.facet_vertex()] = target.apex_vertex();

    // Cell correspondence by image vertex sets; totality plus equal piece
    // counts make it a bijection.
    let mut target_index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for cell in target.child().cells() {
        let mut ids = cell.vertex_ids().to_vec();
        ids.sort_unstable();
        target_index.insert(ids, cell.id());
    }
    let mut cell_map = Vec::with_capacity(source.child().num_cells());
    for cell in source.child().cells() {
        let mut image: Vec<usize> = cell.vertex_ids().iter().map(|&v| vertex_map[v]).collect();
        image.sort_unstable();
        let t = *target_index
            .get(&image)
            .ok_or_else(|| TransferError::DegenerateSolve(format!("no target piece with vertices {image:?}")))?;
        cell_map.push(t);
    }
    debug_assert_eq!(
        {
            let mut seen = cell_map.clone();
            seen.sort_unstable();
            seen.dedup();
            seen.len()
        },
        cell_map.len(),
        "piece correspondence must be a bijection"
    );
    Ok(TransferMap {
        complex: complex.clone(),
        spec: spec.clone(),
        donor_volume,
        receiver_volume,
        receiver_apex,
        donor_apex,
        source_facet_point,
        target_facet_point,
        source,
        target,
        vertex_map,
        cell_map,
    })
}

/// Interior point of `cell` with weight `facet_weight` on each shared-facet
/// vertex and the remaining mass on the opposite vertex.
fn apex_point(
    complex: &Complex,
    cell: usize,
    shared: &[usize],
    facet_weight: Scalar,
) -> Result<BaryPoint, ComplexError> {
    let ids = complex.cell(cell)?.vertex_ids();
    let n = shared.len();
    let mut apex_weight = Scalar::one();
    for _ in 0..n {
        apex_weight -= &facet_weight;
    }
    let weights: Vec<Scalar> = ids
        .iter()
        .map(|v| if shared.contains(v) { facet_weight.clone() } else { apex_weight.clone() })
        .collect();
    BaryPoint::new(cell, weights)
}

/// Exact recheck of the solver's defining constraints (the equal-split
/// conditions and the two apex slices), through the independent
/// determinant-based volume path.
fn check_defining_constraints(step: &TransferMap) -> Result<(), String> {
    let n = step.complex.dim();
    let n_scalar = Scalar::from_integer(n.into());
    let one_over_n = Scalar::one() / &n_scalar;
    let combined = step.receiver_new_volume();

    // (a) source fan pieces split the donor equally.
    for &piece in step.source.fan_pieces() {
        let v = step.source.record().piece_relative_volume(piece).map_err(|e| e.to_string())?;
        if v != one_over_n {
            return Err(format!("source fan piece {piece} has relative volume {v}, want 1/{n}"));
        }
    }
    // (d) target fan pieces split the receiver equally.
    for &piece in step.target.fan_pieces() {
        let v = step.target.record().piece_relative_volume(piece).map_err(|e| e.to_string())?;
        if v != one_over_n {
            return Err(format!("target fan piece {piece} has relative volume {v}, want 1/{n}"));
        }
    }
    // (b) donor apex slices off exactly the transferred volume: each cone
    // over a non-shared facet gets (A / V(donor)) / n.
    let want_b = step.donor_new_volume() / (&step.donor_volume * &n_scalar);
    for &piece in step.target.star_pieces() {
        let v = step.target.record().piece_relative_volume(piece).map_err(|e| e.to_string())?;
        if v != want_b {
            return Err(format!("target star piece {piece} has relative volume {v}, want {want_b}"));
        }
    }
    // (c) receiver cone over the shared facet takes (V(donor) - A)/T of the
    // receiver, the other cones splitting the rest equally.
    let want_c_star = &step.receiver_volume / (&combined * &n_scalar);
    for &piece in step.source.star_pieces() {
        let v = step.source.record().piece_relative_volume(piece).map_err(|e| e.to_string())?;
        if v != want_c_star {
            return Err(format!("source star piece {piece} has relative volume {v}, want {want_c_star}"));
        }
    }
    let want_c_cone = (&step.donor_volume - step.donor_new_volume()) / &combined;
    let mut cone = Scalar::from_integer(0.into());
    for &piece in step.source.wedge_pieces() {
        cone += step.source.record().piece_relative_volume(piece).map_err(|e| e.to_string())?;
    }
    if cone != want_c_cone {
        return Err(format!("receiver cone over the shared facet has relative volume {cone}, want {want_c_cone}"));
    }
    Ok(())
}

/// One named exact check of a verification report.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: Option<String>) {
        self.checks.push(Check { name: name.into(), passed, detail });
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }
}

/// Re-verifies a transfer map against a form, from scratch and exactly:
///
/// (i) every original vertex is fixed by the map;
/// (ii) the ratio of image volume to source volume (in form-normalized
///      terms) is one constant across the donor's pieces and another across
///      the receiver's pieces (wedges included), with the constants forced
///      by the transferred amount;
/// (iii) the image volumes total the transferred target over the donor's
///      pieces and the absorbed total over the receiver's.
pub fn verify_transfer(step: &TransferMap, form: &PCForm) -> VerificationReport {
    let mut report = VerificationReport::default();
    let complex = form.complex();

    // Stale-solve guard: the step must describe this cocycle.
    let fresh = form.value(step.donor()) == step.donor_volume()
        && form.value(step.receiver()) == step.receiver_volume();
    report.push(
        "step solved against this cocycle",
        fresh,
        (!fresh).then(|| {
            format!(
                "step saw donor {} receiver {}, form has {} and {}",
                step.donor_volume(),
                step.receiver_volume(),
                form.value(step.donor()),
                form.value(step.receiver())
            )
        }),
    );
    if !fresh {
        return report;
    }

    // (i) Original vertices are fixed.
    let mut all_fixed = true;
    let mut detail = None;
    for (id, vertex) in complex.vertices().iter().enumerate() {
        match step.apply(vertex) {
            Ok(image) => {
                if &image != vertex {
                    all_fixed = false;
                    detail = Some(format!("vertex {id} moved"));
                    break;
                }
            }
            Err(e) => {
                all_fixed = false;
                detail = Some(format!("vertex {id}: {e}"));
                break;
            }
        }
    }
    report.push("(i) original vertices fixed", all_fixed, detail);

    // Ratio of a source piece's image volume to its own, both measured by
    // the form.
    let measure = |pair: &PairSubdivision, piece: usize| -> Result<Scalar, SubdivisionError> {
        let parent = pair.record().piece_map()[piece];
        Ok(form.value(parent) * pair.record().piece_relative_volume(piece)?)
    };
    let ratio_of = |source_piece: usize| -> Result<Scalar, SubdivisionError> {
        let image = step.cell_map[source_piece];
        Ok(measure(&step.target, image)? / measure(&step.source, source_piece)?)
    };

    let amount = step.donor_new_volume();
    let combined = step.receiver_new_volume();
    let donor_ratio = amount / step.donor_volume();
    let receiver_ratio = &combined / step.receiver_volume();

    let mut check_group = |name: &str, pieces: Vec<usize>, want: &Scalar| {
        let mut ok = true;
        let mut detail = None;
        for piece in pieces {
            match ratio_of(piece) {
                Ok(r) if &r == want => {}
                Ok(r) => {
                    ok = false;
                    detail = Some(format!("piece {piece}: ratio {r}, want {want}"));
                    break;
                }
                Err(e) => {
                    ok = false;
                    detail = Some(format!("piece {piece}: {e}"));
                    break;
                }
            }
        }
        report.push(name, ok, detail);
    };
    check_group(
        "(ii) pullback constant on the donor",
        step.source.fan_pieces().to_vec(),
        &donor_ratio,
    );
    let mut receiver_pieces = step.source.star_pieces().to_vec();
    receiver_pieces.extend_from_slice(step.source.wedge_pieces());
    check_group(
        "(ii) pullback constant on the receiver",
        receiver_pieces,
        &receiver_ratio,
    );

    // (iii) totals.
    let sum_images = |pieces: &[usize]| -> Result<Scalar, SubdivisionError> {
        let mut total = Scalar::from_integer(0.into());
        for &p in pieces {
            total += measure(&step.target, step.cell_map[p])?;
        }
        Ok(total)
    };
    match sum_images(step.source.fan_pieces()) {
        Ok(total) => {
            let ok = &total == amount;
            report.push(
                "(iii) donor keeps exactly the transferred target",
                ok,
                (!ok).then(|| format!("total {total}, want {amount}")),
            );
        }
        Err(e) => report.push("(iii) donor keeps exactly the transferred target", false, Some(e.to_string())),
    }
    let mut receiver_pieces = step.source.star_pieces().to_vec();
    receiver_pieces.extend_from_slice(step.source.wedge_pieces());
    match sum_images(&receiver_pieces) {
        Ok(total) => {
            let ok = total == combined;
            report.push(
                "(iii) receiver absorbs the rest",
                ok,
                (!ok).then(|| format!("total {total}, want {combined}")),
            );
        }
        Err(e) => report.push("(iii) receiver absorbs the rest", false, Some(e.to_string())),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{diff_cocycle, pullback_cocycle, FormError, PCForm};
    use crate::scalar::{ratio, scalar};

    fn pt(coords: &[i64]) -> Point {
        Point::new(coords.iter().map(|&c| scalar(c)).collect())
    }

    /// The worked pair: receiver <(0,0),(1,0),(0,1)> with volume 1, donor
    /// <(1,0),(0,1),(1,1)> with volume 1/2.
    fn worked_pair() -> (Arc<Complex>, PCForm) {
        let k = Arc::new(
            Complex::build(
                vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])],
                vec![vec![0, 1, 2], vec![1, 2, 3]],
            )
            .unwrap()
            .orient()
            .unwrap(),
        );
        let form = PCForm::from_cocycle(k.clone(), vec![scalar(1), ratio(1, 2)]).unwrap();
        (k, form)
    }

    fn worked_spec() -> TransferSpec {
        TransferSpec { receiver: 0, donor: 1, donor_new_volume: ratio(1, 4) }
    }

    #[test]
    fn worked_example_constants() {
        let (k, form) = worked_pair();
        let step = solve_transfer(&form, &worked_spec()).unwrap();

        // u_sigma = u_tau = midpoint of the shared edge.
        let u = step.source_facet_point();
        assert_eq!(u.weights, vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(k.facet_to_ambient(u).coords(), &[ratio(1, 2), ratio(1, 2)]);

        // w = (3/4, 3/4): barycentric (1/4, 1/4, 1/2) in the donor.
        assert_eq!(step.donor_apex().weights, vec![ratio(1, 4), ratio(1, 4), ratio(1, 2)]);
        assert_eq!(
            k.to_ambient(step.donor_apex()).unwrap().coords(),
            &[ratio(3, 4), ratio(3, 4)]
        );

        // v = (2/5, 2/5): barycentric (1/5, 2/5, 2/5) in the receiver.
        assert_eq!(step.receiver_apex().weights, vec![ratio(1, 5), ratio(2, 5), ratio(2, 5)]);
        assert_eq!(
            k.to_ambient(step.receiver_apex()).unwrap().coords(),
            &[ratio(2, 5), ratio(2, 5)]
        );

        // T = 5/4.
        assert_eq!(step.receiver_new_volume(), ratio(5, 4));
    }

    #[test]
    fn worked_example_verifies_exactly() {
        let (_, form) = worked_pair();
        let step = solve_transfer(&form, &worked_spec()).unwrap();
        let report = verify_transfer(&step, &form);
        assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn pullback_updates_exactly_two_cells() {
        let (_, form) = worked_pair();
        let step = solve_transfer(&form, &worked_spec()).unwrap();
        let pulled = pullback_cocycle(&step, &form).unwrap();
        assert_eq!(pulled.values(), &[ratio(5, 4), ratio(1, 4)]);
        assert_eq!(pulled.total_volume(), form.total_volume());
        let d = diff_cocycle(&form, &pulled).unwrap();
        assert_eq!(d.support(), vec![0, 1]);
    }

    #[test]
    fn pullback_rejects_stale_step() {
        let (k, form) = worked_pair();
        let step = solve_transfer(&form, &worked_spec()).unwrap();
        let other = PCForm::from_cocycle(k, vec![ratio(3, 4), ratio(3, 4)]).unwrap();
        assert!(matches!(pullback_cocycle(&step, &other), Err(FormError::StaleStep { .. })));
    }

    #[test]
    fn amount_bounds_are_enforced() {
        let (_, form) = worked_pair();
        for amount in [scalar(0), ratio(1, 2), scalar(1)] {
            let err = solve_transfer(
                &form,
                &TransferSpec { receiver: 0, donor: 1, donor_new_volume: amount },
            )
            .unwrap_err();
            assert!(matches!(err, TransferError::SpecOutOfRange { .. }));
        }
    }

    #[test]
    fn n1_is_rejected() {
        let k = Arc::new(
            Complex::build(vec![pt(&[0]), pt(&[1]), pt(&[2])], vec![vec![0, 1], vec![1, 2]])
                .unwrap()
                .orient()
                .unwrap(),
        );
        let form = PCForm::from_cocycle(k, vec![scalar(1), scalar(1)]).unwrap();
        let err = solve_transfer(
            &form,
            &TransferSpec { receiver: 0, donor: 1, donor_new_volume: ratio(1, 2) },
        )
        .unwrap_err();
        assert!(matches!(err, TransferError::DimensionUnsupported(1)));
    }

    #[test]
    fn map_sends_construction_points_per_the_statement() {
        let (k, form) = worked_pair();
        let step = solve_transfer(&form, &worked_spec()).unwrap();
        // v -> u_sigma and u_tau -> w; original vertices stay put.
        let v = k.to_ambient(step.receiver_apex()).unwrap();
        let u = k.facet_to_ambient(step.source_facet_point());
        let w = k.to_ambient(step.donor_apex()).unwrap();
        assert_eq!(step.apply(&v).unwrap(), u);
        assert_eq!(step.apply(&u).unwrap(), w);
        for vertex in k.vertices() {
            assert_eq!(&step.apply(vertex).unwrap(), vertex);
        }
        // The inverse map undoes both.
        assert_eq!(step.apply_inverse(&u).unwrap(), v);
        assert_eq!(step.apply_inverse(&w).unwrap(), u);
    }

    #[test]
    fn sampled_points_land_in_corresponding_pieces() {
        let (_, form) = worked_pair();
        let step = solve_transfer(&form, &worked_spec()).unwrap();
        let source = step.source().child();
        let target = step.target().child();
        for cell in 0..source.num_cells() {
            // A strictly interior rational point of the source piece.
            let ids = source.cell(cell).unwrap().vertex_ids().to_vec();
            let mut coords = vec![scalar(0); source.ambient_dim()];
            let mut total_weight = scalar(0);
            for (i, &v) in ids.iter().enumerate() {
                let w = ratio(i as i64 + 1, 1);
                total_weight += w.clone();
                for (acc, x) in coords.iter_mut().zip(source.vertex(v).coords()) {
                    *acc += &w * x;
                }
            }
            let p = Point::new(coords.iter().map(|c| c / &total_weight).collect());
            let image = step.apply(&p).unwrap();
            let (found, weights) = target.locate(&image).unwrap().unwrap();
            // Interior images locate uniquely in the corresponding piece.
            assert_eq!(found, step.cell_map()[cell], "source piece {cell}");
            assert!(weights.iter().all(|w| w.is_positive()));
        }
    }

    #[test]
    fn monotone_coupling_in_the_amount() {
        let (_, form) = worked_pair();
        let samples = [ratio(1, 16), ratio(1, 8), ratio(1, 4), ratio(3, 8), ratio(7, 16)];
        let mut last: Option<(Scalar, Scalar)> = None;
        for amount in samples {
            let step = solve_transfer(
                &form,
                &TransferSpec { receiver: 0, donor: 1, donor_new_volume: amount },
            )
            .unwrap();
            // Apex weight of w (position of the slice between the donor's
            // facet-opposite vertex and the facet barycenter) and of v.
            let w_apex = step.donor_apex().weights[2].clone();
            let v_apex = step.receiver_apex().weights[0].clone();
            if let Some((prev_w, prev_v)) = last {
                assert!(w_apex < prev_w, "donor apex weight must strictly decrease");
                assert!(v_apex < prev_v, "receiver apex weight must strictly decrease");
            }
            last = Some((w_apex, v_apex));
        }
        // Limits: amount -> 0 drives w to the donor's opposite vertex
        // (apex weight -> 1), amount -> V(donor) drives it to the facet
        // barycenter (apex weight -> 0).
        let near_zero = solve_transfer(
            &form,
            &TransferSpec { receiver: 0, donor: 1, donor_new_volume: ratio(1, 1000) },
        )
        .unwrap();
        assert!(near_zero.donor_apex().weights[2] > ratio(99, 100));
        let near_full = solve_transfer(
            &form,
            &TransferSpec { receiver: 0, donor: 1, donor_new_volume: ratio(499, 1000) },
        )
        .unwrap();
        assert!(near_full.donor_apex().weights[2] < ratio(1, 100));
    }

    #[test]
    fn verify_fails_when_donor_apex_is_miscomputed() {
        let (k, form) = worked_pair();
        let good = solve_transfer(&form, &worked_spec()).unwrap();
        // Replace w by the donor's barycenter: constancy on the donor breaks.
        let tampered = assemble_transfer(
            &k,
            &worked_spec(),
            good.donor_volume().clone(),
            good.receiver_volume().clone(),
            good.receiver_apex().clone(),
            k.barycenter(1).unwrap(),
            good.source_facet_point().clone(),
            good.target_facet_point().clone(),
        )
        .unwrap();
        let report = verify_transfer(&tampered, &form);
        assert!(!report.passed());
        let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        assert!(failed.iter().any(|n| n.contains("(ii)")), "{failed:?}");
    }

    #[test]
    fn apply_accepts_barycentric_points() {
        let (k, form) = worked_pair();
        let step = solve_transfer(&form, &worked_spec()).unwrap();
        let v = step.receiver_apex().clone();
        let u_ambient = k.facet_to_ambient(step.source_facet_point());
        assert_eq!(step.apply_bary(&v).unwrap(), u_ambient);
    }

    #[test]
    fn four_dimensional_pair_verifies() {
        // A fixed 4-simplex pair: shared facet spanned by four of the six
        // vertices, apexes on opposite sides of its hyperplane.
        let k = Arc::new(
            Complex::build(
                vec![
                    pt(&[1, 0, 0, 0]),
                    pt(&[-1, 1, -1, 2]),
                    pt(&[0, 2, 0, 0]),
                    pt(&[0, 0, 3, 0]),
                    pt(&[0, 0, 0, 4]),
                    pt(&[0, 1, 1, 1]),
                ],
                vec![vec![0, 2, 3, 4, 5], vec![1, 2, 3, 4, 5]],
            )
            .unwrap()
            .orient()
            .unwrap(),
        );
        let form = PCForm::from_cocycle(k, vec![ratio(4, 7), ratio(9, 2)]).unwrap();
        let step = solve_transfer(
            &form,
            &TransferSpec { receiver: 0, donor: 1, donor_new_volume: ratio(17, 6) },
        )
        .unwrap();
        assert_eq!(step.source().fan_pieces().len(), 4);
        assert_eq!(step.source().wedge_pieces().len(), 4);
        let report = verify_transfer(&step, &form);
        assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn random_three_dimensional_pair_verifies() {
        // A fixed non-symmetric tetrahedron pair with lopsided volumes.
        let k = Arc::new(
            Complex::build(
                vec![
                    pt(&[0, 0, 0]),
                    pt(&[3, 0, 0]),
                    pt(&[0, 2, 0]),
                    pt(&[1, 1, 5]),
                    pt(&[2, 2, -3]),
                ],
                vec![vec![0, 1, 2, 3], vec![1, 2, 3, 4]],
            )
            .unwrap()
            .orient()
            .unwrap(),
        );
        let form = PCForm::from_cocycle(k, vec![ratio(7, 3), ratio(11, 5)]).unwrap();
        let step = solve_transfer(
            &form,
            &TransferSpec { receiver: 0, donor: 1, donor_new_volume: ratio(13, 10) },
        )
        .unwrap();
        let report = verify_transfer(&step, &form);
        assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
    }
}

//! Stellar and pair subdivisions with exact piece bookkeeping.
//!
//! A [`SubdivisionRecord`] ties a child complex to its parent: every child
//! cell is contained in exactly one parent cell, and the relative volumes of
//! the pieces of each parent cell sum to one, exactly. The
//! [`PairSubdivision`] is the mixed subdivision of two adjacent top cells
//! used by volume transfer: the cell carrying the interior apex is stellar
//! subdivided, its cone over the shared facet is split again through a point
//! of that facet, and the neighbor is coned from the same facet point.

use crate::complex::{subsets_of_size, BaryPoint, Complex, ComplexError, FacetPoint, Point};
use crate::scalar::Scalar;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SubdivisionError {
    #[error("subdivision point is not interior")]
    NonInteriorPoint,
    #[error("cells {a} and {b} are not adjacent")]
    NotAdjacent { a: usize, b: usize },
    #[error("pair subdivision requires dimension >= 2, got {0}")]
    DimensionUnsupported(usize),
    #[error("point refers to cell {got}, expected {expected}")]
    WrongCell { expected: usize, got: usize },
    #[error("facet point lies on {got:?}, expected the shared facet {expected:?}")]
    WrongFacet { expected: Vec<usize>, got: Vec<usize> },
    #[error("records are not composable (child of the first is not the parent of the second)")]
    NotComposable,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Where a subdivision vertex sits inside the parent complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NewVertexLocation {
    InCell { cell: usize, weights: Vec<Scalar> },
    OnFacet { facet: Vec<usize>, weights: Vec<Scalar> },
}

#[derive(Debug, Clone)]
pub struct SubdivisionRecord {
    parent: Arc<Complex>,
    child: Arc<Complex>,
    piece_map: Vec<usize>,
    new_vertices: Vec<(usize, NewVertexLocation)>,
}

impl SubdivisionRecord {
    pub fn parent(&self) -> &Arc<Complex> {
        &self.parent
    }

    pub fn child(&self) -> &Arc<Complex> {
        &self.child
    }

    /// Child cell id -> id of the parent cell containing it.
    pub fn piece_map(&self) -> &[usize] {
        &self.piece_map
    }

    pub fn new_vertices(&self) -> &[(usize, NewVertexLocation)] {
        &self.new_vertices
    }

    /// Barycentric coordinates, with respect to the containing parent cell,
    /// of each vertex of a child cell (in the child cell's vertex order).
    pub fn child_cell_in_parent(&self, child_cell: usize) -> Result<Vec<BaryPoint>, SubdivisionError> {
        let parent_cell = *self
            .piece_map
            .get(child_cell)
            .ok_or(ComplexError::CellOutOfRange(child_cell))?;
        let parent_ids = self.parent.cell(parent_cell)?.vertex_ids().to_vec();
        let arity = parent_ids.len();
        let mut out = Vec::with_capacity(arity);
        for &v in self.child.cell(child_cell)?.vertex_ids() {
            if v < self.parent.vertices().len() {
                let pos = parent_ids
                    .iter()
                    .position(|&p| p == v)
                    .ok_or(ComplexError::FaceNotFound { face: vec![v] })?;
                let mut w = vec![Scalar::zero(); arity];
                w[pos] = num_traits::One::one();
                out.push(BaryPoint { cell: parent_cell, weights: w });
            } else {
                let location = &self
                    .new_vertices
                    .iter()
                    .find(|(id, _)| *id == v)
                    .ok_or(ComplexError::CellOutOfRange(v))?
                    .1;
                out.push(match location {
                    NewVertexLocation::InCell { cell, weights } => {
                        if *cell != parent_cell {
                            return Err(SubdivisionError::WrongCell { expected: parent_cell, got: *cell });
                        }
                        BaryPoint { cell: parent_cell, weights: weights.clone() }
                    }
                    NewVertexLocation::OnFacet { facet, weights } => {
                        FacetPoint { vertices: facet.clone(), weights: weights.clone() }
                            .to_bary_in(&self.parent, parent_cell)?
                    }
                });
            }
        }
        Ok(out)
    }

    /// Volume of a child cell relative to its containing parent cell.
    pub fn piece_relative_volume(&self, child_cell: usize) -> Result<Scalar, SubdivisionError> {
        let points = self.child_cell_in_parent(child_cell)?;
        Ok(self.parent.relative_volume(&points)?)
    }

    /// Exact covering check: per parent cell, the relative volumes of its
    /// pieces sum to one.
    pub fn verify_covering(&self) -> Result<bool, SubdivisionError> {
        let mut sums: BTreeMap<usize, Scalar> = BTreeMap::new();
        for child_cell in 0..self.child.num_cells() {
            let v = self.piece_relative_volume(child_cell)?;
            *sums.entry(self.piece_map[child_cell]).or_insert_with(Scalar::zero) += v;
        }
        Ok((0..self.parent.num_cells()).all(|p| sums.get(&p).map(num_traits::One::is_one).unwrap_or(false)))
    }

    /// Composes two subdivision records into one: pieces of pieces are
    /// pieces, and the second record's vertices are re-expressed in the
    /// first record's parent cells.
    pub fn compose(first: &SubdivisionRecord, second: &SubdivisionRecord) -> Result<SubdivisionRecord, SubdivisionError> {
        if !Arc::ptr_eq(&first.child, &second.parent) && first.child.as_ref() != second.parent.as_ref() {
            return Err(SubdivisionError::NotComposable);
        }
        let piece_map: Vec<usize> = second.piece_map.iter().map(|&mid| first.piece_map[mid]).collect();
        let mut new_vertices = first.new_vertices.clone();
        for (id, _) in &second.new_vertices {
            // Re-derive the location from ambient coordinates: the vertex
            // lies in some child cell of `second`, hence in that cell's
            // parent under the composite.
            let ambient = second.child.vertex(*id).clone();
            let (mid_cell, _) = second
                .parent
                .locate(&ambient)?
                .ok_or(ComplexError::PointOutsideComplex)?;
            let parent_cell = first.piece_map[mid_cell];
            let weights = first
                .parent
                .barycentric_in_cell(parent_cell, &ambient)?
                .ok_or(ComplexError::PointOutsideComplex)?;
            new_vertices.push((*id, NewVertexLocation::InCell { cell: parent_cell, weights }));
        }
        Ok(SubdivisionRecord {
            parent: first.parent.clone(),
            child: second.child.clone(),
            piece_map,
            new_vertices,
        })
    }
}

/// Stellar subdivision of every top cell: each cell is replaced by the n+1
/// cones from an interior point (the barycenter by default) over its
/// facets. Lower-dimensional faces are untouched.
pub fn stellar_subdivision(
    parent: &Arc<Complex>,
    at: Option<&BTreeMap<usize, BaryPoint>>,
) -> Result<SubdivisionRecord, SubdivisionError> {
    let n_old_vertices = parent.vertices().len();
    let mut vertices: Vec<Point> = parent.vertices().to_vec();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut piece_map = Vec::new();
    let mut new_vertices = Vec::new();
    for cell in parent.cells() {
        let point = match at.and_then(|m| m.get(&cell.id())) {
            Some(p) => {
                if p.cell != cell.id() {
                    return Err(SubdivisionError::WrongCell { expected: cell.id(), got: p.cell });
                }
                p.clone()
            }
            None => parent.barycenter(cell.id())?,
        };
        if !point.is_interior() {
            return Err(SubdivisionError::NonInteriorPoint);
        }
        let new_id = n_old_vertices + new_vertices.len();
        vertices.push(parent.to_ambient(&point)?);
        new_vertices.push((new_id, NewVertexLocation::InCell { cell: cell.id(), weights: point.weights }));
        for position in 0..cell.vertex_ids().len() {
            let mut tuple = cell.vertex_ids().to_vec();
            tuple[position] = new_id;
            cells.push(tuple);
            piece_map.push(cell.id());
        }
    }
    let child = Arc::new(Complex::build(vertices, cells)?);
    Ok(SubdivisionRecord { parent: parent.clone(), child, piece_map, new_vertices })
}

/// The pair subdivision of two adjacent top cells.
///
/// The `star_cell` is stellar subdivided at the interior `apex`, with its
/// cone over the shared facet split into wedges through `facet_point`; the
/// `fan_cell` is replaced by the cones from `facet_point` over its other
/// facets. All other cells are untouched.
#[derive(Debug, Clone)]
pub struct PairSubdivision {
    record: SubdivisionRecord,
    star_cell: usize,
    fan_cell: usize,
    shared_facet: Vec<usize>,
    apex_vertex: usize,
    facet_vertex: usize,
    fan_pieces: Vec<usize>,
    star_pieces: Vec<usize>,
    wedge_pieces: Vec<usize>,
}

impl PairSubdivision {
    pub fn record(&self) -> &SubdivisionRecord {
        &self.record
    }

    pub fn child(&self) -> &Arc<Complex> {
        &self.record.child
    }

    pub fn parent(&self) -> &Arc<Complex> {
        &self.record.parent
    }

    /// The cell that was stellar subdivided at the interior apex.
    pub fn star_cell(&self) -> usize {
        self.star_cell
    }

    /// The neighbor replaced by cones from the facet point.
    pub fn fan_cell(&self) -> usize {
        self.fan_cell
    }

    /// Sorted vertex ids of the shared facet.
    pub fn shared_facet(&self) -> &[usize] {
        &self.shared_facet
    }

    /// Child vertex id of the interior apex.
    pub fn apex_vertex(&self) -> usize {
        self.apex_vertex
    }

    /// Child vertex id of the facet point.
    pub fn facet_vertex(&self) -> usize {
        self.facet_vertex
    }

    /// Child ids of the fan pieces, indexed like the sorted shared facet.
    pub fn fan_pieces(&self) -> &[usize] {
        &self.fan_pieces
    }

    pub fn star_pieces(&self) -> &[usize] {
        &self.star_pieces
    }

    pub fn wedge_pieces(&self) -> &[usize] {
        &self.wedge_pieces
    }

    /// Child cells that are untouched copies of parent cells.
    pub fn untouched_pieces(&self) -> impl Iterator<Item = usize> + '_ {
        let count = self.record.child.num_cells() - 3 * self.shared_facet.len();
        0..count
    }
}

pub fn pair_subdivision(
    parent: &Arc<Complex>,
    star_cell: usize,
    fan_cell: usize,
    apex: &BaryPoint,
    facet_point: &FacetPoint,
) -> Result<PairSubdivision, SubdivisionError> {
    let n = parent.dim();
    if n < 2 {
        return Err(SubdivisionError::DimensionUnsupported(n));
    }
    let shared = parent
        .shared_facet(star_cell, fan_cell)?
        .ok_or(SubdivisionError::NotAdjacent { a: star_cell, b: fan_cell })?;
    if apex.cell != star_cell {
        return Err(SubdivisionError::WrongCell { expected: star_cell, got: apex.cell });
    }
    if !apex.is_interior() {
        return Err(SubdivisionError::NonInteriorPoint);
    }
    if facet_point.vertices != shared {
        return Err(SubdivisionError::WrongFacet { expected: shared, got: facet_point.vertices.clone() });
    }
    if !facet_point.is_interior() {
        return Err(SubdivisionError::NonInteriorPoint);
    }

    let n_old_vertices = parent.vertices().len();
    let apex_vertex = n_old_vertices;
    let facet_vertex = n_old_vertices + 1;
    let mut vertices = parent.vertices().to_vec();
    vertices.push(parent.to_ambient(apex)?);
    vertices.push(parent.facet_to_ambient(facet_point));

    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut piece_map: Vec<usize> = Vec::new();
    for cell in parent.cells() {
        if cell.id() != star_cell && cell.id() != fan_cell {
            cells.push(cell.vertex_ids().to_vec());
            piece_map.push(cell.id());
        }
    }
    let star_ids = parent.cell(star_cell)?.vertex_ids().to_vec();
    let fan_ids = parent.cell(fan_cell)?.vertex_ids().to_vec();
    let mut fan_pieces = Vec::with_capacity(n);
    let mut star_pieces = Vec::with_capacity(n);
    let mut wedge_pieces = Vec::with_capacity(n);
    // Fan pieces <u, nu_x>: substitute each shared-facet vertex by the
    // facet point in the fan cell's tuple.
    for &x in &shared {
        let pos = fan_ids.iter().position(|&v| v == x).expect("facet vertex in fan cell");
        let mut tuple = fan_ids.clone();
        tuple[pos] = facet_vertex;
        fan_pieces.push(cells.len());
        cells.push(tuple);
        piece_map.push(fan_cell);
    }
    // Star pieces <v, mu_x>.
    for &x in &shared {
        let pos = star_ids.iter().position(|&v| v == x).expect("facet vertex in star cell");
        let mut tuple = star_ids.clone();
        tuple[pos] = apex_vertex;
        star_pieces.push(cells.len());
        cells.push(tuple);
        piece_map.push(star_cell);
    }
    // Wedge pieces <v, u, gamma_x> splitting the cone <v, theta>.
    for &x in &shared {
        let gamma: Vec<usize> = shared.iter().copied().filter(|&v| v != x).collect();
        let mut tuple = Vec::with_capacity(n + 1);
        tuple.push(apex_vertex);
        tuple.push(facet_vertex);
        tuple.extend(gamma);
        wedge_pieces.push(cells.len());
        cells.push(tuple);
        piece_map.push(star_cell);
    }

    let child = Arc::new(Complex::build(vertices, cells)?);
    let mut new_vertices = Vec::with_capacity(2);
    new_vertices.push((apex_vertex, NewVertexLocation::InCell {
        cell: star_cell,
        weights: apex.weights.clone(),
    }));
    new_vertices.push((facet_vertex, NewVertexLocation::OnFacet {
        facet: shared.clone(),
        weights: facet_point.weights.clone(),
    }));
    let record = SubdivisionRecord { parent: parent.clone(), child, piece_map, new_vertices };
    Ok(PairSubdivision {
        record,
        star_cell,
        fan_cell,
        shared_facet: shared,
        apex_vertex,
        facet_vertex,
        fan_pieces,
        star_pieces,
        wedge_pieces,
    })
}

/// The faces of the boundary of the union of two adjacent cells: every face
/// of either cell that does not meet the interior, i.e. all faces of their
/// facets other than the shared one.
pub fn pair_boundary_faces(complex: &Complex, a: usize, b: usize) -> Result<Vec<Vec<usize>>, SubdivisionError> {
    let shared = complex
        .shared_facet(a, b)?
        .ok_or(SubdivisionError::NotAdjacent { a, b })?;
    let mut out = std::collections::BTreeSet::new();
    for &cell in &[a, b] {
        let mut ids = complex.cell(cell)?.vertex_ids().to_vec();
        ids.sort_unstable();
        for facet in subsets_of_size(&ids, ids.len() - 1) {
            if facet == shared {
                continue;
            }
            for k in 1..=facet.len() {
                for f in subsets_of_size(&facet, k) {
                    out.insert(f);
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, scalar};

    fn pt(coords: &[i64]) -> Point {
        Point::new(coords.iter().map(|&c| scalar(c)).collect())
    }

    fn square() -> Arc<Complex> {
        Arc::new(
            Complex::build(
                vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])],
                vec![vec![0, 1, 2], vec![1, 2, 3]],
            )
            .unwrap(),
        )
    }

    fn triangle() -> Arc<Complex> {
        Arc::new(Complex::build(vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])], vec![vec![0, 1, 2]]).unwrap())
    }

    fn two_tetrahedra() -> Arc<Complex> {
        Arc::new(
            Complex::build(
                vec![
                    pt(&[0, 0, 0]),
                    pt(&[1, 0, 0]),
                    pt(&[0, 1, 0]),
                    pt(&[0, 0, 1]),
                    pt(&[1, 1, 1]),
                ],
                vec![vec![0, 1, 2, 3], vec![1, 2, 3, 4]],
            )
            .unwrap(),
        )
    }

    #[test]
    fn stellar_default_splits_triangle_in_thirds() {
        let k = triangle();
        let record = stellar_subdivision(&k, None).unwrap();
        assert_eq!(record.child().num_cells(), 3);
        for c in 0..3 {
            assert_eq!(record.piece_relative_volume(c).unwrap(), ratio(1, 3));
        }
        assert!(record.verify_covering().unwrap());
    }

    #[test]
    fn stellar_at_interior_point_volumes_match_weights() {
        let k = triangle();
        let at = BTreeMap::from([(
            0usize,
            BaryPoint::new(0, vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap(),
        )]);
        let record = stellar_subdivision(&k, Some(&at)).unwrap();
        // Pieces are ordered by the substituted vertex position, so the
        // piece opposite vertex i has relative volume equal to weight i.
        let volumes: Vec<Scalar> = (0..3).map(|c| record.piece_relative_volume(c).unwrap()).collect();
        assert_eq!(volumes, vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]);
    }

    #[test]
    fn stellar_square_leaves_shared_edge_alone() {
        let k = square();
        let record = stellar_subdivision(&k, None).unwrap();
        assert_eq!(record.child().num_cells(), 6);
        assert_eq!(record.child().vertices().len(), 6);
        assert!(record.child().faces_of_dim(1).contains(&vec![1, 2]));
        assert!(record.verify_covering().unwrap());
    }

    #[test]
    fn stellar_rejects_boundary_point() {
        let k = triangle();
        let at = BTreeMap::from([(
            0usize,
            BaryPoint::new(0, vec![ratio(1, 2), ratio(1, 2), scalar(0)]).unwrap(),
        )]);
        assert_eq!(
            stellar_subdivision(&k, Some(&at)).unwrap_err(),
            SubdivisionError::NonInteriorPoint
        );
    }

    #[test]
    fn pair_subdivision_square_piece_inventory() {
        let k = square();
        let apex = k.barycenter(0).unwrap();
        let u = k.face_barycenter(&[1, 2]).unwrap();
        let pair = pair_subdivision(&k, 0, 1, &apex, &u).unwrap();
        assert_eq!(pair.fan_pieces().len(), 2);
        assert_eq!(pair.star_pieces().len(), 2);
        assert_eq!(pair.wedge_pieces().len(), 2);
        assert_eq!(pair.child().num_cells(), 6);
        let record = pair.record();
        for &c in pair.fan_pieces() {
            assert_eq!(record.piece_relative_volume(c).unwrap(), ratio(1, 2));
        }
        for &c in pair.star_pieces() {
            assert_eq!(record.piece_relative_volume(c).unwrap(), ratio(1, 3));
        }
        for &c in pair.wedge_pieces() {
            assert_eq!(record.piece_relative_volume(c).unwrap(), ratio(1, 6));
        }
        assert!(record.verify_covering().unwrap());
    }

    #[test]
    fn pair_subdivision_tetrahedra_counts_and_covering() {
        let k = two_tetrahedra();
        let apex = k.barycenter(0).unwrap();
        let u = k.face_barycenter(&[1, 2, 3]).unwrap();
        let pair = pair_subdivision(&k, 0, 1, &apex, &u).unwrap();
        assert_eq!(pair.fan_pieces().len(), 3);
        assert_eq!(pair.star_pieces().len(), 3);
        assert_eq!(pair.wedge_pieces().len(), 3);
        assert_eq!(pair.child().num_cells(), 9);
        assert!(pair.record().verify_covering().unwrap());
    }

    #[test]
    fn pair_subdivision_rejects_boundary_facet_point() {
        let k = square();
        let apex = k.barycenter(0).unwrap();
        let u = FacetPoint::new(vec![1, 2], vec![scalar(1), scalar(0)]).unwrap();
        assert_eq!(
            pair_subdivision(&k, 0, 1, &apex, &u).unwrap_err(),
            SubdivisionError::NonInteriorPoint
        );
    }

    #[test]
    fn pair_subdivision_rejects_non_adjacent_cells() {
        // Two triangles sharing only a vertex.
        let k = Arc::new(
            Complex::build(
                vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1]), pt(&[-1, 0]), pt(&[0, -1])],
                vec![vec![0, 1, 2], vec![0, 3, 4]],
            )
            .unwrap(),
        );
        let apex = k.barycenter(0).unwrap();
        let u = FacetPoint::new(vec![0, 1], vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        assert_eq!(
            pair_subdivision(&k, 0, 1, &apex, &u).unwrap_err(),
            SubdivisionError::NotAdjacent { a: 0, b: 1 }
        );
    }

    #[test]
    fn pair_subdivision_child_passes_strict_validation() {
        // The exact pairwise proper-intersection test over every pair of
        // child cells; cheap here and a strong consistency check on the
        // construction.
        let k = square();
        let apex = BaryPoint::new(0, vec![ratio(1, 5), ratio(2, 5), ratio(2, 5)]).unwrap();
        let u = FacetPoint::new(vec![1, 2], vec![ratio(1, 3), ratio(2, 3)]).unwrap();
        let pair = pair_subdivision(&k, 0, 1, &apex, &u).unwrap();
        assert!(pair.child().check_proper_intersections().is_ok());
    }

    #[test]
    fn pair_subdivision_keeps_union_boundary() {
        let k = square();
        let apex = k.barycenter(0).unwrap();
        let u = k.face_barycenter(&[1, 2]).unwrap();
        let pair = pair_subdivision(&k, 0, 1, &apex, &u).unwrap();
        for face in pair_boundary_faces(&k, 0, 1).unwrap() {
            assert!(
                pair.child().faces_of_dim(face.len() - 1).contains(&face),
                "boundary face {face:?} must survive"
            );
        }
    }

    #[test]
    fn compose_two_stellar_records() {
        let k = triangle();
        let first = stellar_subdivision(&k, None).unwrap();
        let second = stellar_subdivision(first.child(), None).unwrap();
        let composite = SubdivisionRecord::compose(&first, &second).unwrap();
        assert_eq!(composite.child().num_cells(), 9);
        assert!(composite.verify_covering().unwrap());
        assert!(Arc::ptr_eq(composite.parent(), &k));
    }

    #[test]
    fn compose_rejects_unrelated_records() {
        let first = stellar_subdivision(&triangle(), None).unwrap();
        let second = stellar_subdivision(&square(), None).unwrap();
        assert_eq!(
            SubdivisionRecord::compose(&first, &second).unwrap_err(),
            SubdivisionError::NotComposable
        );
    }
}

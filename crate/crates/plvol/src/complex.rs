//! Finite simplicial complexes with exact rational geometry.
//!
//! A [`Complex`] is a vertex table in some ambient `R^N` plus a list of
//! top-dimensional cells; the face lattice, the facet-to-cell incidence and
//! the dual adjacency graph are derived at build time. Interior points are
//! expressed in barycentric coordinates ([`BaryPoint`], [`FacetPoint`]) so
//! that every volume comparison stays a rational ratio inside a single
//! simplex, even for complexes embedded in higher-dimensional space.
//!
//! Complexes are immutable after build; all queries are pure.

use crate::linalg;
use crate::lp::{self, LpOutcome};
use crate::scalar::{scalar_to_f64, Scalar};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ComplexError {
    #[error("complex has no cells")]
    Empty,
    #[error("cell {cell} references vertex {vertex}, but only {count} vertices exist")]
    VertexOutOfRange { cell: usize, vertex: usize, count: usize },
    #[error("cell {cell} repeats vertex {vertex}")]
    RepeatedVertex { cell: usize, vertex: usize },
    #[error("cell {cell} has {got} vertices, expected {expected}")]
    MixedCellDimension { cell: usize, got: usize, expected: usize },
    #[error("vertex {a} and vertex {b} have identical coordinates")]
    DuplicateVertex { a: usize, b: usize },
    #[error("cells {a} and {b} span the same simplex")]
    DuplicateCell { a: usize, b: usize },
    #[error("vertex {vertex} has ambient dimension {got}, expected {expected}")]
    MixedAmbientDimension { vertex: usize, got: usize, expected: usize },
    #[error("cell dimension {dim} exceeds ambient dimension {ambient}")]
    DimensionExceedsAmbient { dim: usize, ambient: usize },
    #[error("cell {cell} is a degenerate simplex")]
    DegenerateSimplex { cell: usize },
    #[error("cells {a} and {b} intersect outside a common face")]
    ImproperIntersection { a: usize, b: usize },
    #[error("facet {facet:?} lies in {count} cells; a pseudomanifold allows at most 2")]
    NonPseudomanifold { facet: Vec<usize>, count: usize },
    #[error("complex has boundary facets but was required to be closed")]
    NotClosed,
    #[error("complex is not orientable")]
    NonOrientable,
    #[error("face {face:?} is not in the complex")]
    FaceNotFound { face: Vec<usize> },
    #[error("cell id {0} is out of range")]
    CellOutOfRange(usize),
    #[error("barycentric points refer to different cells")]
    MixedCells,
    #[error("expected {expected} barycentric entries, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("barycentric weights must be nonnegative and sum to 1")]
    InvalidWeights,
    #[error("point lies outside the complex")]
    PointOutsideComplex,
}

/// Requirements on the facet incidence imposed at build time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pseudomanifold {
    /// Every (n-1)-face lies in exactly two cells.
    Closed,
    /// Every (n-1)-face lies in one or two cells.
    WithBoundary,
}

#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    /// Run the exact pairwise proper-intersection test (O(cells^2) rational
    /// LPs). Off by default; intended for `check --strict` and small inputs.
    pub check_intersections: bool,
    /// Reject complexes that are not pseudomanifolds of the given kind.
    pub require_pseudomanifold: Option<Pseudomanifold>,
}

/// A point of the ambient space, with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Point {
    coords: Vec<Scalar>,
}

impl Point {
    pub fn new(coords: Vec<Scalar>) -> Self {
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.coords.iter().map(scalar_to_f64).collect()
    }
}

/// An oriented top-dimensional cell: n+1 distinct vertex ids in a fixed
/// order, plus a sign relative to that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    id: usize,
    vertex_ids: Vec<usize>,
    orientation_sign: i8,
}

impl Cell {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn vertex_ids(&self) -> &[usize] {
        &self.vertex_ids
    }

    pub fn orientation_sign(&self) -> i8 {
        self.orientation_sign
    }

    fn sorted_ids(&self) -> Vec<usize> {
        let mut ids = self.vertex_ids.clone();
        ids.sort_unstable();
        ids
    }
}

/// A point in barycentric coordinates of a named top cell. Weights are
/// nonnegative, sum to one, and follow the cell's stored vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaryPoint {
    pub cell: usize,
    pub weights: Vec<Scalar>,
}

impl BaryPoint {
    pub fn new(cell: usize, weights: Vec<Scalar>) -> Result<Self, ComplexError> {
        validate_weights(&weights)?;
        Ok(BaryPoint { cell, weights })
    }

    /// Interior means every weight strictly positive.
    pub fn is_interior(&self) -> bool {
        self.weights.iter().all(|w| w.is_positive())
    }
}

/// A point in barycentric coordinates of a face given by its sorted vertex
/// ids; weights align with that sorted order. Used for points on a shared
/// facet, whose coordinates are intrinsic to the facet and independent of
/// which incident cell they are read from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetPoint {
    pub vertices: Vec<usize>,
    pub weights: Vec<Scalar>,
}

impl FacetPoint {
    pub fn new(vertices: Vec<usize>, weights: Vec<Scalar>) -> Result<Self, ComplexError> {
        if vertices.len() != weights.len() {
            return Err(ComplexError::WrongArity { expected: vertices.len(), got: weights.len() });
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ComplexError::FaceNotFound { face: vertices });
        }
        validate_weights(&weights)?;
        Ok(FacetPoint { vertices, weights })
    }

    pub fn is_interior(&self) -> bool {
        self.weights.iter().all(|w| w.is_positive())
    }

    /// Re-expresses this point in the barycentric coordinates of a cell
    /// that contains the face (weight zero on the cell's other vertices).
    pub fn to_bary_in(&self, complex: &Complex, cell: usize) -> Result<BaryPoint, ComplexError> {
        let c = complex.cell(cell)?;
        let mut weights = vec![Scalar::zero(); c.vertex_ids.len()];
        for (v, w) in self.vertices.iter().zip(&self.weights) {
            let pos = c
                .vertex_ids
                .iter()
                .position(|x| x == v)
                .ok_or_else(|| ComplexError::FaceNotFound { face: self.vertices.clone() })?;
            weights[pos] = w.clone();
        }
        Ok(BaryPoint { cell, weights })
    }
}

fn validate_weights(weights: &[Scalar]) -> Result<(), ComplexError> {
    if weights.iter().any(|w| w.is_negative()) {
        return Err(ComplexError::InvalidWeights);
    }
    let total: Scalar = weights.iter().sum();
    if !total.is_one() {
        return Err(ComplexError::InvalidWeights);
    }
    Ok(())
}

/// A set of faces closed under taking faces, as returned by star and link.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SubComplex {
    faces: BTreeSet<Vec<usize>>,
}

impl SubComplex {
    pub fn faces(&self) -> &BTreeSet<Vec<usize>> {
        &self.faces
    }

    pub fn count_of_dim(&self, k: usize) -> usize {
        self.faces.iter().filter(|f| f.len() == k + 1).count()
    }

    pub fn contains(&self, face: &[usize]) -> bool {
        let mut f = face.to_vec();
        f.sort_unstable();
        self.faces.contains(&f)
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }
}

/// A finite simplicial complex: vertex table, oriented top cells, and the
/// derived face lattice, facet incidence and dual adjacency graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Complex {
    dim: usize,
    ambient_dim: usize,
    vertices: Vec<Point>,
    cells: Vec<Cell>,
    faces: Vec<BTreeSet<Vec<usize>>>,
    facet_cells: BTreeMap<Vec<usize>, Vec<usize>>,
    dual: Vec<Vec<usize>>,
    components: Vec<usize>,
    /// Per-cell coordinate bounds, a cheap reject before the exact
    /// barycentric solve in point location.
    bboxes: Vec<(Vec<Scalar>, Vec<Scalar>)>,
    oriented: bool,
}

impl Complex {
    /// Builds and validates a complex from a vertex table and top cells
    /// given as vertex-id lists, with default options.
    pub fn build(vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Self, ComplexError> {
        Self::build_with(vertices, cells, &BuildOptions::default())
    }

    pub fn build_with(
        vertices: Vec<Point>,
        cells: Vec<Vec<usize>>,
        options: &BuildOptions,
    ) -> Result<Self, ComplexError> {
        if cells.is_empty() {
            return Err(ComplexError::Empty);
        }
        let ambient_dim = vertices.first().map(Point::dim).unwrap_or(0);
        for (i, v) in vertices.iter().enumerate() {
            if v.dim() != ambient_dim {
                return Err(ComplexError::MixedAmbientDimension {
                    vertex: i,
                    got: v.dim(),
                    expected: ambient_dim,
                });
            }
        }
        {
            let mut seen: BTreeMap<&[Scalar], usize> = BTreeMap::new();
            for (i, v) in vertices.iter().enumerate() {
                if let Some(&first) = seen.get(v.coords()) {
                    return Err(ComplexError::DuplicateVertex { a: first, b: i });
                }
                seen.insert(v.coords(), i);
            }
        }
        let arity = cells[0].len();
        if arity == 0 {
            return Err(ComplexError::MixedCellDimension { cell: 0, got: 0, expected: 1 });
        }
        let dim = arity - 1;
        if dim > ambient_dim {
            return Err(ComplexError::DimensionExceedsAmbient { dim, ambient: ambient_dim });
        }
        let mut built = Vec::with_capacity(cells.len());
        let mut seen_sets: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for (id, ids) in cells.into_iter().enumerate() {
            if ids.len() != arity {
                return Err(ComplexError::MixedCellDimension { cell: id, got: ids.len(), expected: arity });
            }
            let mut sorted = ids.clone();
            sorted.sort_unstable();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return Err(ComplexError::RepeatedVertex { cell: id, vertex: w[0] });
                }
            }
            for &v in &ids {
                if v >= vertices.len() {
                    return Err(ComplexError::VertexOutOfRange { cell: id, vertex: v, count: vertices.len() });
                }
            }
            if let Some(&first) = seen_sets.get(&sorted) {
                return Err(ComplexError::DuplicateCell { a: first, b: id });
            }
            seen_sets.insert(sorted, id);
            built.push(Cell { id, vertex_ids: ids, orientation_sign: 1 });
        }
        // Nondegeneracy: the spanned edge vectors must have full rank.
        for cell in &built {
            let base = &vertices[cell.vertex_ids[0]];
            let rows: Vec<Vec<Scalar>> = cell.vertex_ids[1..]
                .iter()
                .map(|&v| {
                    vertices[v]
                        .coords()
                        .iter()
                        .zip(base.coords())
                        .map(|(a, b)| a - b)
                        .collect()
                })
                .collect();
            if dim > 0 && linalg::rank(&rows) != dim {
                return Err(ComplexError::DegenerateSimplex { cell: cell.id });
            }
        }

        let mut faces: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); dim + 1];
        for cell in &built {
            let sorted = cell.sorted_ids();
            for k in 0..=dim {
                for subset in subsets_of_size(&sorted, k + 1) {
                    faces[k].insert(subset);
                }
            }
        }
        let mut facet_cells: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        if dim > 0 {
            for cell in &built {
                let sorted = cell.sorted_ids();
                for facet in subsets_of_size(&sorted, dim) {
                    facet_cells.entry(facet).or_default().push(cell.id);
                }
            }
        }
        if let Some(kind) = options.require_pseudomanifold {
            let mut closed = true;
            for (facet, incident) in &facet_cells {
                if incident.len() > 2 {
                    return Err(ComplexError::NonPseudomanifold {
                        facet: facet.clone(),
                        count: incident.len(),
                    });
                }
                if incident.len() == 1 {
                    closed = false;
                }
            }
            if kind == Pseudomanifold::Closed && !closed {
                return Err(ComplexError::NotClosed);
            }
        }
        let mut dual: Vec<Vec<usize>> = vec![Vec::new(); built.len()];
        for incident in facet_cells.values() {
            for &a in incident {
                for &b in incident {
                    if a != b && !dual[a].contains(&b) {
                        dual[a].push(b);
                    }
                }
            }
        }
        for neighbors in &mut dual {
            neighbors.sort_unstable();
        }
        let components = label_components(&dual);
        let bboxes = built
            .iter()
            .map(|cell| {
                let mut lo = vertices[cell.vertex_ids[0]].coords().to_vec();
                let mut hi = lo.clone();
                for &v in &cell.vertex_ids[1..] {
                    for (k, c) in vertices[v].coords().iter().enumerate() {
                        if c < &lo[k] {
                            lo[k] = c.clone();
                        }
                        if c > &hi[k] {
                            hi[k] = c.clone();
                        }
                    }
                }
                (lo, hi)
            })
            .collect();

        let complex = Complex {
            dim,
            ambient_dim,
            vertices,
            cells: built,
            faces,
            facet_cells,
            dual,
            components,
            bboxes,
            oriented: false,
        };
        if options.check_intersections {
            complex.check_proper_intersections()?;
        }
        Ok(complex)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, id: usize) -> &Point {
        &self.vertices[id]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, id: usize) -> Result<&Cell, ComplexError> {
        self.cells.get(id).ok_or(ComplexError::CellOutOfRange(id))
    }

    /// All k-faces of the complex, as sorted vertex-id lists.
    pub fn faces_of_dim(&self, k: usize) -> &BTreeSet<Vec<usize>> {
        &self.faces[k]
    }

    /// Cells incident to an (n-1)-face.
    pub fn cells_of_facet(&self, facet: &[usize]) -> &[usize] {
        self.facet_cells.get(facet).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn facet_incidence(&self) -> &BTreeMap<Vec<usize>, Vec<usize>> {
        &self.facet_cells
    }

    /// Cells adjacent to `cell` across a shared facet, sorted by id.
    pub fn neighbors(&self, cell: usize) -> &[usize] {
        &self.dual[cell]
    }

    /// Facets lying in exactly one cell.
    pub fn boundary_facets(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.facet_cells.iter().filter(|(_, c)| c.len() == 1).map(|(f, _)| f)
    }

    pub fn has_boundary(&self) -> bool {
        self.facet_cells.values().any(|c| c.len() == 1)
    }

    /// Dual-graph component label per cell.
    pub fn components(&self) -> &[usize] {
        &self.components
    }

    pub fn num_components(&self) -> usize {
        self.components.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Pseudomanifold kind, if every facet lies in at most two cells.
    pub fn pseudomanifold(&self) -> Option<Pseudomanifold> {
        let mut closed = true;
        for incident in self.facet_cells.values() {
            match incident.len() {
                1 => closed = false,
                2 => {}
                _ => return None,
            }
        }
        Some(if closed { Pseudomanifold::Closed } else { Pseudomanifold::WithBoundary })
    }

    pub fn is_oriented(&self) -> bool {
        self.oriented
    }

    /// Exact pairwise proper-intersection validation: for every pair of
    /// cells, the convex intersection must equal the face spanned by their
    /// shared vertices. Decided by an exact LP that maximizes the total
    /// barycentric mass on non-shared vertices over all common points.
    pub fn check_proper_intersections(&self) -> Result<(), ComplexError> {
        let n1 = self.dim + 1;
        for a in 0..self.cells.len() {
            for b in a + 1..self.cells.len() {
                let ca = &self.cells[a];
                let cb = &self.cells[b];
                let shared: BTreeSet<usize> = ca
                    .vertex_ids
                    .iter()
                    .copied()
                    .filter(|v| cb.vertex_ids.contains(v))
                    .collect();
                let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(self.ambient_dim + 2);
                for coord in 0..self.ambient_dim {
                    let mut row = Vec::with_capacity(2 * n1);
                    for &v in &ca.vertex_ids {
                        row.push(self.vertices[v].coords()[coord].clone());
                    }
                    for &v in &cb.vertex_ids {
                        row.push(-self.vertices[v].coords()[coord].clone());
                    }
                    rows.push(row);
                }
                let mut suma = vec![Scalar::zero(); 2 * n1];
                let mut sumb = vec![Scalar::zero(); 2 * n1];
                for i in 0..n1 {
                    suma[i] = Scalar::one();
                    sumb[n1 + i] = Scalar::one();
                }
                rows.push(suma);
                rows.push(sumb);
                let mut rhs = vec![Scalar::zero(); self.ambient_dim];
                rhs.push(Scalar::one());
                rhs.push(Scalar::one());
                let mut objective = vec![Scalar::zero(); 2 * n1];
                for (i, &v) in ca.vertex_ids.iter().enumerate() {
                    if !shared.contains(&v) {
                        objective[i] = Scalar::one();
                    }
                }
                for (j, &v) in cb.vertex_ids.iter().enumerate() {
                    if !shared.contains(&v) {
                        objective[n1 + j] = Scalar::one();
                    }
                }
                match lp::maximize(&objective, &rows, &rhs) {
                    LpOutcome::Infeasible => {}
                    LpOutcome::Optimal(best) => {
                        if best.is_positive() {
                            return Err(ComplexError::ImproperIntersection { a, b });
                        }
                    }
                    LpOutcome::Unbounded => unreachable!("feasible region is a product of simplices"),
                }
            }
        }
        Ok(())
    }

    /// The closed star: all simplices containing `face`, plus their faces.
    pub fn star(&self, face: &[usize]) -> Result<SubComplex, ComplexError> {
        let key = self.checked_face(face)?;
        let mut out = BTreeSet::new();
        for dim_faces in &self.faces {
            for g in dim_faces {
                if key.iter().all(|v| g.contains(v)) {
                    for k in 0..g.len() {
                        for subset in subsets_of_size(g, k + 1) {
                            out.insert(subset);
                        }
                    }
                }
            }
        }
        Ok(SubComplex { faces: out })
    }

    /// The link: faces of the closed star disjoint from `face`.
    pub fn link(&self, face: &[usize]) -> Result<SubComplex, ComplexError> {
        let key = self.checked_face(face)?;
        let star = self.star(face)?;
        let faces = star
            .faces
            .into_iter()
            .filter(|g| g.iter().all(|v| !key.contains(v)))
            .collect();
        Ok(SubComplex { faces })
    }

    fn checked_face(&self, face: &[usize]) -> Result<Vec<usize>, ComplexError> {
        let mut key = face.to_vec();
        key.sort_unstable();
        if key.is_empty()
            || key.len() > self.dim + 1
            || !self.faces[key.len() - 1].contains(&key)
        {
            return Err(ComplexError::FaceNotFound { face: face.to_vec() });
        }
        Ok(key)
    }

    /// Returns a copy of the complex with cell orientation signs chosen so
    /// that the induced orientations on every interior facet are opposite.
    ///
    /// Deterministic: the lowest-id cell of each dual component is taken
    /// positive and the signs propagate by BFS, so orienting an already
    /// oriented complex is a no-op.
    pub fn orient(&self) -> Result<Complex, ComplexError> {
        for (facet, incident) in &self.facet_cells {
            if incident.len() > 2 {
                return Err(ComplexError::NonPseudomanifold {
                    facet: facet.clone(),
                    count: incident.len(),
                });
            }
        }
        let n_cells = self.cells.len();
        let mut sign = vec![0i8; n_cells];
        let mut queue = std::collections::VecDeque::new();
        for seed in 0..n_cells {
            if sign[seed] != 0 {
                continue;
            }
            sign[seed] = 1;
            queue.push_back(seed);
            while let Some(c) = queue.pop_front() {
                for &d in &self.dual[c] {
                    let needed = self.propagated_sign(c, sign[c], d);
                    if sign[d] == 0 {
                        sign[d] = needed;
                        queue.push_back(d);
                    } else if sign[d] != needed {
                        return Err(ComplexError::NonOrientable);
                    }
                }
            }
        }
        // Re-check every interior facet; BFS propagation covers each edge,
        // but an explicit sweep keeps the invariant independent of the
        // traversal.
        let mut cells = self.cells.clone();
        for (cell, s) in cells.iter_mut().zip(&sign) {
            cell.orientation_sign = *s;
        }
        let oriented = Complex { cells, oriented: true, ..self.clone() };
        for incident in oriented.facet_cells.values() {
            if incident.len() == 2 {
                let (a, b) = (incident[0], incident[1]);
                let facet = shared_facet_ids(&oriented.cells[a], &oriented.cells[b]);
                if oriented.induced_facet_sign(a, &facet) != -oriented.induced_facet_sign(b, &facet) {
                    return Err(ComplexError::NonOrientable);
                }
            }
        }
        Ok(oriented)
    }

    /// Sign cell `d` must take for its induced orientation on the facet
    /// shared with `c` to oppose the one induced by `c` with sign `sign_c`.
    fn propagated_sign(&self, c: usize, sign_c: i8, d: usize) -> i8 {
        let facet = shared_facet_ids(&self.cells[c], &self.cells[d]);
        let ind_c = sign_c * self.base_facet_sign(c, &facet);
        -ind_c * self.base_facet_sign(d, &facet)
    }

    fn induced_facet_sign(&self, cell: usize, facet: &[usize]) -> i8 {
        self.cells[cell].orientation_sign * self.base_facet_sign(cell, facet)
    }

    /// (-1)^position of the opposite vertex, times the parity taking the
    /// remaining tuple to the facet's sorted order.
    fn base_facet_sign(&self, cell: usize, facet: &[usize]) -> i8 {
        let ids = &self.cells[cell].vertex_ids;
        let pos = ids
            .iter()
            .position(|v| !facet.contains(v))
            .expect("facet must be a facet of the cell");
        let remaining: Vec<usize> = ids
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pos)
            .map(|(_, &v)| v)
            .collect();
        let parity = linalg::permutation_parity(&remaining, facet);
        if pos % 2 == 0 {
            parity
        } else {
            -parity
        }
    }

    /// Barycenter of a cell: all weights 1/(n+1).
    pub fn barycenter(&self, cell: usize) -> Result<BaryPoint, ComplexError> {
        let c = self.cell(cell)?;
        let k = c.vertex_ids.len();
        let w = Scalar::new(1.into(), (k as i64).into());
        Ok(BaryPoint { cell, weights: vec![w; k] })
    }

    /// Barycenter of a face, as a [`FacetPoint`].
    pub fn face_barycenter(&self, face: &[usize]) -> Result<FacetPoint, ComplexError> {
        let key = self.checked_face(face)?;
        let k = key.len();
        let w = Scalar::new(1.into(), (k as i64).into());
        Ok(FacetPoint { vertices: key, weights: vec![w; k] })
    }

    /// Volume of the simplex spanned by n+1 barycentric points of a cell,
    /// relative to that cell: the absolute determinant of the weight
    /// matrix. Zero exactly when the points are affinely dependent.
    pub fn relative_volume(&self, points: &[BaryPoint]) -> Result<Scalar, ComplexError> {
        let first = points.first().ok_or(ComplexError::WrongArity { expected: self.dim + 1, got: 0 })?;
        let cell = self.cell(first.cell)?;
        let arity = cell.vertex_ids.len();
        if points.len() != arity {
            return Err(ComplexError::WrongArity { expected: arity, got: points.len() });
        }
        let mut rows = Vec::with_capacity(arity);
        for p in points {
            if p.cell != first.cell {
                return Err(ComplexError::MixedCells);
            }
            if p.weights.len() != arity {
                return Err(ComplexError::WrongArity { expected: arity, got: p.weights.len() });
            }
            rows.push(p.weights.clone());
        }
        let det = linalg::determinant(&rows);
        Ok(if det.is_negative() { -det } else { det })
    }

    /// Ambient Euclidean volume of a cell, as a float: sqrt of the Gram
    /// determinant of the edge vectors over n!. Display and density only.
    pub fn euclidean_volume_approx(&self, cell: usize) -> Result<f64, ComplexError> {
        let c = self.cell(cell)?;
        let base = &self.vertices[c.vertex_ids[0]];
        let edges: Vec<Vec<Scalar>> = c.vertex_ids[1..]
            .iter()
            .map(|&v| {
                self.vertices[v]
                    .coords()
                    .iter()
                    .zip(base.coords())
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect();
        let n = edges.len();
        let mut gram = vec![vec![Scalar::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut dot = Scalar::zero();
                for k in 0..self.ambient_dim {
                    dot += &edges[i][k] * &edges[j][k];
                }
                gram[i][j] = dot;
            }
        }
        let det = linalg::determinant(&gram);
        let mut factorial = 1.0;
        for k in 2..=n {
            factorial *= k as f64;
        }
        Ok(scalar_to_f64(&det).max(0.0).sqrt() / factorial)
    }

    /// Exact ambient coordinates of a barycentric point.
    pub fn to_ambient(&self, p: &BaryPoint) -> Result<Point, ComplexError> {
        let c = self.cell(p.cell)?;
        if p.weights.len() != c.vertex_ids.len() {
            return Err(ComplexError::WrongArity { expected: c.vertex_ids.len(), got: p.weights.len() });
        }
        let mut coords = vec![Scalar::zero(); self.ambient_dim];
        for (w, &v) in p.weights.iter().zip(&c.vertex_ids) {
            for (acc, x) in coords.iter_mut().zip(self.vertices[v].coords()) {
                *acc += w * x;
            }
        }
        Ok(Point { coords })
    }

    /// Exact ambient coordinates of a facet point.
    pub fn facet_to_ambient(&self, p: &FacetPoint) -> Point {
        let mut coords = vec![Scalar::zero(); self.ambient_dim];
        for (w, &v) in p.weights.iter().zip(&p.vertices) {
            for (acc, x) in coords.iter_mut().zip(self.vertices[v].coords()) {
                *acc += w * x;
            }
        }
        Point { coords }
    }

    /// Barycentric coordinates of an ambient point with respect to a cell.
    /// `None` when the point is outside the cell's affine hull; weights may
    /// be negative when it is in the hull but outside the cell.
    pub fn barycentric_in_cell(&self, cell: usize, p: &Point) -> Result<Option<Vec<Scalar>>, ComplexError> {
        let c = self.cell(cell)?;
        if p.dim() != self.ambient_dim {
            return Err(ComplexError::MixedAmbientDimension {
                vertex: 0,
                got: p.dim(),
                expected: self.ambient_dim,
            });
        }
        let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(self.ambient_dim + 1);
        for coord in 0..self.ambient_dim {
            rows.push(c.vertex_ids.iter().map(|&v| self.vertices[v].coords()[coord].clone()).collect());
        }
        rows.push(vec![Scalar::one(); c.vertex_ids.len()]);
        let mut rhs: Vec<Scalar> = p.coords().to_vec();
        rhs.push(Scalar::one());
        Ok(linalg::solve_unique(&rows, &rhs))
    }

    /// Locates an ambient point in the complex: the lowest-id cell whose
    /// closed simplex contains it, with its barycentric coordinates there.
    pub fn locate(&self, p: &Point) -> Result<Option<(usize, Vec<Scalar>)>, ComplexError> {
        for cell in 0..self.cells.len() {
            let (lo, hi) = &self.bboxes[cell];
            if p.coords().iter().zip(lo).any(|(c, l)| c < l)
                || p.coords().iter().zip(hi).any(|(c, h)| c > h)
            {
                continue;
            }
            if let Some(weights) = self.barycentric_in_cell(cell, p)? {
                if weights.iter().all(|w| !w.is_negative()) {
                    return Ok(Some((cell, weights)));
                }
            }
        }
        Ok(None)
    }

    /// The sorted vertex ids of the facet shared by two adjacent cells.
    pub fn shared_facet(&self, a: usize, b: usize) -> Result<Option<Vec<usize>>, ComplexError> {
        let ca = self.cell(a)?;
        let cb = self.cell(b)?;
        if !self.dual[a].contains(&b) {
            return Ok(None);
        }
        Ok(Some(shared_facet_ids(ca, cb)))
    }
}

fn shared_facet_ids(a: &Cell, b: &Cell) -> Vec<usize> {
    let mut shared: Vec<usize> = a
        .vertex_ids
        .iter()
        .copied()
        .filter(|v| b.vertex_ids.contains(v))
        .collect();
    shared.sort_unstable();
    shared
}

fn label_components(dual: &[Vec<usize>]) -> Vec<usize> {
    let mut label = vec![usize::MAX; dual.len()];
    let mut next = 0;
    for seed in 0..dual.len() {
        if label[seed] != usize::MAX {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([seed]);
        label[seed] = next;
        while let Some(c) = queue.pop_front() {
            for &d in &dual[c] {
                if label[d] == usize::MAX {
                    label[d] = next;
                    queue.push_back(d);
                }
            }
        }
        next += 1;
    }
    label
}

/// All size-k subsets of a sorted slice, in lexicographic order.
pub fn subsets_of_size(set: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > set.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| set[i]).collect());
        // Advance the combination.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + set.len() - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

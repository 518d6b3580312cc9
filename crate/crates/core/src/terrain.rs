//! Terrains, viewpoint sets and the general-position checks the
//! colored and Voronoi constructions rely on.

use std::collections::HashMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{bisector, ExactX, Point2, QPoint, QuadExt, Rational};

/// An x-monotone polygonal chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Terrain {
    vertices: Vec<Point2>,
}

impl Terrain {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::TooFewVertices(vertices.len()));
        }
        for i in 1..vertices.len() {
            if vertices[i].x <= vertices[i - 1].x {
                return Err(Error::NotMonotone { index: i });
            }
        }
        Ok(Terrain { vertices })
    }

    pub fn from_ints(coords: &[(i64, i64)]) -> Result<Self> {
        Terrain::new(
            coords
                .iter()
                .map(|&(x, y)| Point2::from_ints(x, y))
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Point2 {
        &self.vertices[i]
    }

    pub fn x_min(&self) -> &Rational {
        &self.vertices[0].x
    }

    pub fn x_max(&self) -> &Rational {
        &self.vertices[self.n() - 1].x
    }

    /// Index `k` of the edge `v_k v_{k+1}` containing abscissa `x`. A vertex
    /// abscissa maps to the edge on its right, except the last vertex.
    pub fn edge_at(&self, x: &Rational) -> Option<usize> {
        if x < self.x_min() || x > self.x_max() {
            return None;
        }
        let k = self.vertices.partition_point(|v| &v.x <= x);
        Some(k.saturating_sub(1).min(self.n() - 2))
    }

    /// [`Terrain::edge_at`] for an exact abscissa.
    pub fn edge_at_exact(&self, x: &ExactX) -> Option<usize> {
        if let Some(r) = x.as_rational() {
            return self.edge_at(r);
        }
        let lo = QuadExt::from_rational(self.x_min().clone());
        let hi = QuadExt::from_rational(self.x_max().clone());
        if x < &lo || x > &hi {
            return None;
        }
        let k = self
            .vertices
            .partition_point(|v| QuadExt::from_rational(v.x.clone()) <= *x);
        Some(k.saturating_sub(1).min(self.n() - 2))
    }

    /// Height of the terrain at a rational abscissa.
    pub fn y_at(&self, x: &Rational) -> Result<Rational> {
        let k = self
            .edge_at(x)
            .ok_or_else(|| Error::OutOfRange(x.to_string()))?;
        let (a, b) = (&self.vertices[k], &self.vertices[k + 1]);
        Ok(&a.y + (&b.y - &a.y) * (x - &a.x) / (&b.x - &a.x))
    }

    /// The terrain point at abscissa `x`.
    pub fn point_at(&self, x: &ExactX) -> Result<QPoint> {
        let k = self
            .edge_at_exact(x)
            .ok_or_else(|| Error::OutOfRange(x.to_string()))?;
        let (a, b) = (&self.vertices[k], &self.vertices[k + 1]);
        let slope = (&b.y - &a.y) / (&b.x - &a.x);
        let y = x.add_rational(&-&a.x).scale(&slope).add_rational(&a.y);
        Ok(QPoint { x: x.clone(), y })
    }

    /// Reflection through the y-axis, with vertex `i` becoming `n - 1 - i`.
    pub fn mirrored(&self) -> Terrain {
        Terrain {
            vertices: self.vertices.iter().rev().map(Point2::mirrored).collect(),
        }
    }
}

/// Viewpoints placed on terrain vertices, with an optional common sight radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViewpointSet {
    indices: Vec<usize>,
    radius: Option<Rational>,
}

impl ViewpointSet {
    pub fn new(mut indices: Vec<usize>, radius: Option<Rational>, n: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::NoViewpoints);
        }
        indices.sort_unstable();
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateViewpoint(w[0]));
            }
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::ViewpointOutOfRange(bad));
        }
        if radius.as_ref().is_some_and(|r| !r.is_positive()) {
            return Err(Error::NonPositiveRadius);
        }
        Ok(ViewpointSet { indices, radius })
    }

    /// Vertex indices in increasing order; position in this list is the
    /// viewpoint's ordinal.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn m(&self) -> usize {
        self.indices.len()
    }

    pub fn radius(&self) -> Option<&Rational> {
        self.radius.as_ref()
    }

    pub fn with_radius(&self, radius: Option<Rational>) -> Result<Self> {
        ViewpointSet::new(self.indices.clone(), radius, usize::MAX)
    }

    pub fn unlimited(&self) -> Self {
        ViewpointSet {
            indices: self.indices.clone(),
            radius: None,
        }
    }

    /// Ordinal of the viewpoint sitting on vertex `v`, if any.
    pub fn ordinal_of_vertex(&self, v: usize) -> Option<usize> {
        self.indices.binary_search(&v).ok()
    }

    pub fn mirrored(&self, n: usize) -> ViewpointSet {
        ViewpointSet {
            indices: self.indices.iter().rev().map(|&i| n - 1 - i).collect(),
            radius: self.radius.clone(),
        }
    }
}

/// A terrain together with its viewpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub terrain: Terrain,
    pub viewpoints: ViewpointSet,
}

impl Instance {
    pub fn new(terrain: Terrain, viewpoints: ViewpointSet) -> Result<Self> {
        if let Some(&bad) = viewpoints.indices().iter().find(|&&i| i >= terrain.n()) {
            return Err(Error::ViewpointOutOfRange(bad));
        }
        Ok(Instance {
            terrain,
            viewpoints,
        })
    }

    /// Location of the viewpoint with the given ordinal.
    pub fn viewpoint(&self, ordinal: usize) -> &Point2 {
        self.terrain.vertex(self.viewpoints.indices()[ordinal])
    }

    pub fn viewpoint_points(&self) -> Vec<Point2> {
        self.viewpoints
            .indices()
            .iter()
            .map(|&i| self.terrain.vertex(i).clone())
            .collect()
    }

    pub fn with_radius(&self, radius: Option<Rational>) -> Result<Self> {
        Ok(Instance {
            terrain: self.terrain.clone(),
            viewpoints: self.viewpoints.with_radius(radius)?,
        })
    }

    /// Mirror image; viewpoint ordinal `i` becomes `m - 1 - i`.
    pub fn mirrored(&self) -> Instance {
        Instance {
            terrain: self.terrain.mirrored(),
            viewpoints: self.viewpoints.mirrored(self.terrain.n()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneralPositionReport {
    /// Vertex index triples `i < j < k` lying on one line.
    pub collinear_triples: Vec<(usize, usize, usize)>,
    /// `(vertex a, vertex b, edge k)`: the bisector of the viewpoints on
    /// vertices `a` and `b` contains edge `k`.
    pub bisector_edge_collinearities: Vec<(usize, usize, usize)>,
    /// Viewpoint vertex pairs at equal height.
    pub vertical_bisectors: Vec<(usize, usize)>,
}

impl GeneralPositionReport {
    pub fn is_empty(&self) -> bool {
        self.collinear_triples.is_empty()
            && self.bisector_edge_collinearities.is_empty()
            && self.vertical_bisectors.is_empty()
    }

    /// Refusal check for the colored-map constructions.
    pub fn require_colvis(&self) -> Result<()> {
        if self.collinear_triples.is_empty() {
            Ok(())
        } else {
            Err(Error::GeneralPosition(self.clone()))
        }
    }

    /// Refusal check for the Voronoi-map constructions. Vertical bisectors
    /// are handled by the algorithms and do not cause a refusal.
    pub fn require_vorvis(&self) -> Result<()> {
        if self.collinear_triples.is_empty() && self.bisector_edge_collinearities.is_empty() {
            Ok(())
        } else {
            Err(Error::GeneralPosition(self.clone()))
        }
    }
}

impl fmt::Display for GeneralPositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return writeln!(f, "general position: ok");
        }
        for (i, j, k) in &self.collinear_triples {
            writeln!(f, "collinear vertices {i} {j} {k}")?;
        }
        for (a, b, k) in &self.bisector_edge_collinearities {
            writeln!(f, "bisector of viewpoints {a} {b} contains edge {k}")?;
        }
        for (a, b) in &self.vertical_bisectors {
            writeln!(f, "vertical bisector between viewpoints {a} {b}")?;
        }
        Ok(())
    }
}

/// All collinear vertex triples, found by grouping equal slopes out of
/// every vertex.
fn collinear_triples(t: &Terrain) -> Vec<(usize, usize, usize)> {
    let v = t.vertices();
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut by_slope: HashMap<Rational, Vec<usize>> = HashMap::new();
        for (j, w) in v.iter().enumerate().skip(i + 1) {
            let slope = (&w.y - &v[i].y) / (&w.x - &v[i].x);
            by_slope.entry(slope).or_default().push(j);
        }
        for group in by_slope.values().filter(|g| g.len() > 1) {
            for a in 0..group.len() {
                for b in a + 1..group.len() {
                    out.push((i, group[a], group[b]));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn validate(t: &Terrain, p: &ViewpointSet) -> Result<GeneralPositionReport> {
    if let Some(&bad) = p.indices().iter().find(|&&i| i >= t.n()) {
        return Err(Error::ViewpointOutOfRange(bad));
    }
    let mut report = GeneralPositionReport {
        collinear_triples: collinear_triples(t),
        ..Default::default()
    };
    let idx = p.indices();
    for (a, &ia) in idx.iter().enumerate() {
        for &ib in &idx[a + 1..] {
            let (pa, pb) = (t.vertex(ia), t.vertex(ib));
            if pa.y == pb.y {
                report.vertical_bisectors.push((ia, ib));
            }
            let line = bisector(pa, pb)?;
            for k in 0..t.n() - 1 {
                if line.eval(t.vertex(k)).is_zero() && line.eval(t.vertex(k + 1)).is_zero() {
                    report.bisector_edge_collinearities.push((ia, ib, k));
                }
            }
        }
    }
    Ok(report)
}

pub fn validate_instance(inst: &Instance) -> Result<GeneralPositionReport> {
    validate(&inst.terrain, &inst.viewpoints)
}

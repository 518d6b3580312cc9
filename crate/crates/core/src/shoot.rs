//! First-hit queries of rightward rays and circular arcs against a terrain.
//!
//! Rays use a segment tree over the vertices whose nodes keep the upper
//! hull of their span: a node can only contain a vertex on or above a ray if
//! its hull's extreme vertex in the ray's normal direction is, which a
//! binary search over the hull decides. Arc queries scan the edges under
//! the arc's x-range.

use num_traits::{Signed, Zero};

use crate::geometry::{
    circle_edge_intersections_r2, ray_edge_intersection, ExactX, Point2, QPoint, QuadExt, Rational,
    Ray2,
};
use crate::terrain::Terrain;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcOrientation {
    Cw,
    Ccw,
}

struct Node {
    lo: usize,
    hi: usize,
    children: Option<(usize, usize)>,
    /// Upper hull of vertices `lo..=hi`, left to right.
    hull: Vec<u32>,
}

pub struct ShootIndex {
    pts: Vec<Point2>,
    nodes: Vec<Node>,
}

/// `dx·(v.y − o.y) − dy·(v.x − o.x)`: positive when `v` is above the ray's line.
fn height(ray: &Ray2, v: &Point2) -> Rational {
    &ray.dx * (&v.y - &ray.origin.y) - &ray.dy * (&v.x - &ray.origin.x)
}

fn turns_right_or_straight(a: &Point2, b: &Point2, c: &Point2) -> bool {
    crate::geometry::orient(a, b, c) <= 0
}

impl ShootIndex {
    pub fn new(t: &Terrain) -> Self {
        let mut idx = ShootIndex {
            pts: t.vertices().to_vec(),
            nodes: Vec::with_capacity(2 * t.n()),
        };
        idx.build(0, t.n() - 1);
        idx
    }

    fn build(&mut self, lo: usize, hi: usize) -> usize {
        if lo == hi {
            self.nodes.push(Node {
                lo,
                hi,
                children: None,
                hull: vec![lo as u32],
            });
            return self.nodes.len() - 1;
        }
        let mid = (lo + hi) / 2;
        let l = self.build(lo, mid);
        let r = self.build(mid + 1, hi);
        let mut hull: Vec<u32> = Vec::new();
        let merged = self.nodes[l]
            .hull
            .iter()
            .chain(&self.nodes[r].hull)
            .copied();
        for v in merged {
            while hull.len() >= 2 {
                let a = &self.pts[hull[hull.len() - 2] as usize];
                let b = &self.pts[hull[hull.len() - 1] as usize];
                if turns_right_or_straight(a, b, &self.pts[v as usize]) {
                    break;
                }
                hull.pop();
            }
            hull.push(v);
        }
        self.nodes.push(Node {
            lo,
            hi,
            children: Some((l, r)),
            hull,
        });
        self.nodes.len() - 1
    }

    fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Hull vertex maximizing the height above the ray's line.
    fn extreme(&self, node: &Node, ray: &Ray2) -> usize {
        let h = &node.hull;
        // along an upper hull the height rises while the edge is steeper
        // than the ray, then falls
        let (mut lo, mut hi) = (0, h.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let (a, b) = (&self.pts[h[mid] as usize], &self.pts[h[mid + 1] as usize]);
            let rise = &ray.dx * (&b.y - &a.y) - &ray.dy * (&b.x - &a.x);
            if rise.is_positive() {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        h[lo] as usize
    }

    /// Smallest vertex index `>= start` on or above the ray's line.
    fn first_not_below(&self, node: usize, ray: &Ray2, start: usize) -> Option<usize> {
        let nd = &self.nodes[node];
        if nd.hi < start {
            return None;
        }
        if nd.lo >= start && height(ray, &self.pts[self.extreme(nd, ray)]).is_negative() {
            return None;
        }
        match nd.children {
            None => (!height(ray, &self.pts[nd.lo]).is_negative()).then_some(nd.lo),
            Some((l, r)) => self
                .first_not_below(l, ray, start)
                .or_else(|| self.first_not_below(r, ray, start)),
        }
    }

    fn first_vertex_after(&self, from_x: &ExactX) -> usize {
        match from_x.as_rational() {
            Some(x) => self.pts.partition_point(|v| &v.x <= x),
            None => self.pts.partition_point(|v| QuadExt::from(&v.x) <= *from_x),
        }
    }

    /// First proper hit of a rightward ray with the terrain strictly right of
    /// `from_x`. The terrain must lie strictly below the ray just right of
    /// `from_x`. Touching a vertex while the terrain stays below is not a
    /// hit. Returns `None` for rays that are not rightward or that escape.
    pub fn shoot_ray(&self, ray: &Ray2, from_x: &ExactX) -> Option<Point2> {
        if !ray.dx.is_positive() {
            return None;
        }
        let n = self.pts.len();
        let mut start = self.first_vertex_after(from_x);
        loop {
            let k = self.first_not_below(self.root(), ray, start)?;
            let hk = height(ray, &self.pts[k]);
            if hk.is_positive() {
                if k == 0 {
                    return Some(self.pts[0].clone());
                }
                return ray_edge_intersection(ray, &self.pts[k - 1], &self.pts[k])
                    .or_else(|| Some(self.pts[k].clone()));
            }
            if k + 1 == n || !height(ray, &self.pts[k + 1]).is_negative() {
                return Some(self.pts[k].clone());
            }
            start = k + 1;
        }
    }

    /// Reference linear scan with the same contract as [`ShootIndex::shoot_ray`].
    pub fn shoot_ray_naive(&self, ray: &Ray2, from_x: &ExactX) -> Option<Point2> {
        if !ray.dx.is_positive() {
            return None;
        }
        let start = self.first_vertex_after(from_x);
        let n = self.pts.len();
        for k in start..n {
            let hk = height(ray, &self.pts[k]);
            if hk.is_positive() {
                if k == 0 {
                    return Some(self.pts[0].clone());
                }
                let (a, b) = (&self.pts[k - 1], &self.pts[k]);
                let ha = height(ray, a);
                let t = &ha / (&ha - &hk);
                return Some(Point2::new(
                    &a.x + &t * (&b.x - &a.x),
                    &a.y + &t * (&b.y - &a.y),
                ));
            }
            if hk.is_zero() && (k + 1 == n || !height(ray, &self.pts[k + 1]).is_negative()) {
                return Some(self.pts[k].clone());
            }
        }
        None
    }

    /// Parameter in `[0, 1)` where edge `k` enters the open disk, if it does.
    fn entry_param(&self, k: usize, center: &Point2, r2: &Rational) -> Option<QuadExt> {
        let (a, b) = (&self.pts[k], &self.pts[k + 1]);
        let (dx, dy) = b.sub(a);
        let (fx, fy) = a.sub(center);
        let qa = &dx * &dx + &dy * &dy;
        let qb = &dx * &fx + &dy * &fy;
        let qc = &fx * &fx + &fy * &fy - r2;
        // roots of qa·t² + 2·qb·t + qc
        let disc = &qb * &qb - &qa * &qc;
        if !disc.is_positive() {
            return None;
        }
        let t1 = QuadExt::sqrt_times(-Rational::from_integer(1.into()) / &qa, &disc)
            .add_rational(&(-&qb / &qa));
        let zero = QuadExt::from_int(0);
        let one = QuadExt::from_int(1);
        (t1 >= zero && t1 < one).then_some(t1)
    }

    fn better(orientation: ArcOrientation, cand: &QPoint, best: &Option<QPoint>) -> bool {
        match best {
            None => true,
            Some(b) => match orientation {
                ArcOrientation::Ccw => cand.y < b.y,
                ArcOrientation::Cw => cand.y > b.y,
            },
        }
    }

    fn admissible(
        orientation: ArcOrientation,
        center: &Point2,
        start: &QPoint,
        p: &QPoint,
    ) -> bool {
        let right_half = p.x >= QuadExt::from(&center.x);
        let ahead = match orientation {
            ArcOrientation::Ccw => p.y > start.y,
            ArcOrientation::Cw => p.y < start.y,
        };
        right_half && ahead && p.x > start.x
    }

    /// First point after `start`, moving along the right half of the circle
    /// of squared radius `r2` in the given orientation, at which the terrain
    /// enters the disk. Only terrain right of `start` is considered.
    pub fn shoot_arc(
        &self,
        center: &Point2,
        r2: &Rational,
        start: &QPoint,
        orientation: ArcOrientation,
    ) -> Option<QPoint> {
        let n = self.pts.len();
        let lo = if start.x > QuadExt::from(&center.x) {
            start.x.clone()
        } else {
            QuadExt::from(&center.x)
        };
        // edges meeting [lo, x_c + r]
        let first = self.first_vertex_after(&lo).saturating_sub(1);
        let mut best: Option<QPoint> = None;
        for k in first..n - 1 {
            let a = &self.pts[k];
            let dxc = &a.x - &center.x;
            if dxc.is_positive() && &dxc * &dxc > *r2 {
                break;
            }
            let Some(t) = self.entry_param(k, center, r2) else {
                continue;
            };
            let b = &self.pts[k + 1];
            let p = crate::geometry::point_on_segment(a, b, &t);
            if Self::admissible(orientation, center, start, &p)
                && Self::better(orientation, &p, &best)
            {
                best = Some(p);
            }
        }
        best
    }

    /// Reference scan over every edge with the same contract as
    /// [`ShootIndex::shoot_arc`].
    pub fn shoot_arc_naive(
        &self,
        center: &Point2,
        r2: &Rational,
        start: &QPoint,
        orientation: ArcOrientation,
    ) -> Option<QPoint> {
        let mut best: Option<QPoint> = None;
        for e in self.pts.windows(2) {
            let (dx, dy) = e[1].sub(&e[0]);
            for p in circle_edge_intersections_r2(center, r2, &e[0], &e[1]) {
                if p == QPoint::from(&e[1]) {
                    continue;
                }
                // moving along the edge must bring the point closer to the center
                let toward =
                    p.x.add_rational(&-&center.x)
                        .scale(&dx)
                        .add(&p.y.add_rational(&-&center.y).scale(&dy));
                if toward.signum() >= 0 {
                    continue;
                }
                if Self::admissible(orientation, center, start, &p)
                    && Self::better(orientation, &p, &best)
                {
                    best = Some(p);
                }
            }
        }
        best
    }

    /// First point after `start` along the right half of the circle, in the
    /// given orientation, where the terrain meets the circle at all
    /// (entering, leaving or touching).
    pub fn arc_contact(
        &self,
        center: &Point2,
        r2: &Rational,
        start: &QPoint,
        orientation: ArcOrientation,
    ) -> Option<QPoint> {
        let n = self.pts.len();
        let lo = if start.x > QuadExt::from(&center.x) {
            start.x.clone()
        } else {
            QuadExt::from(&center.x)
        };
        let first = self.first_vertex_after(&lo).saturating_sub(1);
        let mut best: Option<QPoint> = None;
        for k in first..n - 1 {
            let a = &self.pts[k];
            let dxc = &a.x - &center.x;
            if dxc.is_positive() && &dxc * &dxc > *r2 {
                break;
            }
            for p in circle_edge_intersections_r2(center, r2, a, &self.pts[k + 1]) {
                if Self::admissible(orientation, center, start, &p)
                    && Self::better(orientation, &p, &best)
                {
                    best = Some(p);
                }
            }
        }
        best
    }

    #[cfg(test)]
    fn arc_contact_naive(
        &self,
        center: &Point2,
        r2: &Rational,
        start: &QPoint,
        orientation: ArcOrientation,
    ) -> Option<QPoint> {
        let mut best: Option<QPoint> = None;
        for e in self.pts.windows(2) {
            for p in circle_edge_intersections_r2(center, r2, &e[0], &e[1]) {
                if Self::admissible(orientation, center, start, &p)
                    && Self::better(orientation, &p, &best)
                {
                    best = Some(p);
                }
            }
        }
        best
    }
}

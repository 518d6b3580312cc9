//! Brute-force reference maps.
//!
//! Every abscissa where some label can change is collected into a candidate
//! set; each gap between consecutive candidates is then labeled by testing
//! visibility and distance at one interior point straight from the
//! definitions. Only the geometric primitives are shared with the fast
//! constructions.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::{
    bisector, circle_edge_intersections, orient, ray_edge_intersection, sign, ExactX, Point2,
    QuadExt, Rational, Ray2,
};
use crate::intervals::{IntervalMap, MapBuilder, VisMap, VorVisMap};
use crate::terrain::{Instance, Terrain};

/// Whether the segment between two terrain points stays on or above the
/// terrain.
pub fn oracle_sees(t: &Terrain, a: &Point2, b: &Point2) -> Result<bool> {
    for p in [a, b] {
        if t.y_at(&p.x)? != p.y {
            return Err(Error::OutOfRange(format!("{p} is not on the terrain")));
        }
    }
    Ok(sees_unchecked(t, a, b))
}

fn sees_unchecked(t: &Terrain, a: &Point2, b: &Point2) -> bool {
    let (a, b) = if a.x <= b.x { (a, b) } else { (b, a) };
    t.vertices()
        .iter()
        .filter(|v| v.x > a.x && v.x < b.x)
        .all(|v| orient(a, b, v) <= 0)
}

/// The three reference maps of one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleMaps {
    pub vis: VisMap,
    pub colvis: IntervalMap<Vec<usize>>,
    pub vorvis: VorVisMap,
}

/// Every abscissa at which a label of any of the three maps may change.
pub fn candidate_breakpoints(inst: &Instance) -> Vec<ExactX> {
    candidates_until(inst, None).expect("no deadline")
}

fn candidates_until(inst: &Instance, deadline: Option<Instant>) -> Option<Vec<ExactX>> {
    let expired = || deadline.is_some_and(|d| Instant::now() >= d);
    let t = &inst.terrain;
    let v = t.vertices();
    let sites = inst.viewpoint_points();
    let mut xs: Vec<ExactX> = v.iter().map(|p| QuadExt::from(&p.x)).collect();
    for p in &sites {
        for w in v.iter().filter(|w| *w != p) {
            if expired() {
                return None;
            }
            let ray = Ray2::through(p, w);
            let beyond = |x: &Rational| if w.x > p.x { *x > w.x } else { *x < w.x };
            for e in v.windows(2) {
                if let Some(hit) = ray_edge_intersection(&ray, &e[0], &e[1]) {
                    if beyond(&hit.x) {
                        xs.push(QuadExt::from(hit.x));
                    }
                }
            }
        }
    }
    for (i, p) in sites.iter().enumerate() {
        for q in &sites[i + 1..] {
            let line = bisector(p, q).expect("viewpoints are distinct vertices");
            for e in v.windows(2) {
                let (s0, s1) = (line.eval(&e[0]), line.eval(&e[1]));
                if sign(&s0) * sign(&s1) > 0 || s0 == s1 {
                    continue;
                }
                // parameter where the signed value vanishes
                let s = &s0 / (&s0 - &s1);
                xs.push(QuadExt::from(&e[0].x + s * (&e[1].x - &e[0].x)));
            }
        }
    }
    if let Some(r) = inst.viewpoints.radius() {
        for p in &sites {
            for e in v.windows(2) {
                xs.extend(
                    circle_edge_intersections(p, r, &e[0], &e[1])
                        .into_iter()
                        .map(|q| q.x),
                );
            }
        }
    }
    let lo = QuadExt::from(t.x_min());
    let hi = QuadExt::from(t.x_max());
    let set: BTreeSet<ExactX> = xs.into_iter().filter(|x| *x >= lo && *x <= hi).collect();
    Some(set.into_iter().collect())
}

struct Labels {
    colvis: Vec<usize>,
    vorvis: Option<usize>,
}

fn label_point(inst: &Instance, sites: &[Point2], x: &Rational) -> Labels {
    let t = &inst.terrain;
    let q = Point2::new(x.clone(), t.y_at(x).expect("sample inside the domain"));
    let r2 = inst.viewpoints.radius().map(|r| r * r);
    let mut colvis = Vec::new();
    let mut best: Option<(usize, Rational)> = None;
    for (i, p) in sites.iter().enumerate() {
        let d = p.dist2(&q);
        if r2.as_ref().is_some_and(|r2| d > *r2) || !sees_unchecked(t, p, &q) {
            continue;
        }
        colvis.push(i);
        if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
            best = Some((i, d));
        }
    }
    Labels {
        colvis,
        vorvis: best.map(|(i, _)| i),
    }
}

/// Reference maps, labeling each gap between `candidates` at an interior
/// rational point. Returns `None` if `deadline` passes first.
pub fn oracle_maps_from(
    inst: &Instance,
    candidates: &[ExactX],
    deadline: Option<Instant>,
) -> Option<OracleMaps> {
    let sites = inst.viewpoint_points();
    let mut labels = Vec::with_capacity(candidates.len());
    for w in candidates.windows(2) {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return None;
        }
        let x = QuadExt::rational_between(&w[0], &w[1]);
        labels.push(label_point(inst, &sites, &x));
    }
    let hi = candidates[candidates.len() - 1].clone();
    let first = &labels[0];
    let mut vis = MapBuilder::new(candidates[0].clone(), !first.colvis.is_empty());
    let mut colvis = MapBuilder::new(candidates[0].clone(), first.colvis.clone());
    let mut vorvis = MapBuilder::new(candidates[0].clone(), first.vorvis);
    for (x, l) in candidates.iter().zip(&labels).skip(1) {
        vis.set(x.clone(), !l.colvis.is_empty());
        colvis.set(x.clone(), l.colvis.clone());
        vorvis.set(x.clone(), l.vorvis);
    }
    Some(OracleMaps {
        vis: vis.finish(hi.clone()),
        colvis: colvis.finish(hi.clone()),
        vorvis: vorvis.finish(hi),
    })
}

pub fn oracle_maps(inst: &Instance) -> OracleMaps {
    oracle_maps_from(inst, &candidate_breakpoints(inst), None).expect("no deadline")
}

/// [`oracle_maps`] abandoned once `deadline` passes.
pub fn oracle_maps_until(inst: &Instance, deadline: Instant) -> Option<OracleMaps> {
    let candidates = candidates_until(inst, Some(deadline))?;
    oracle_maps_from(inst, &candidates, Some(deadline))
}

//! Limited sight: every viewpoint sees only the part of the terrain inside a
//! closed disk of a common radius around it.
//!
//! The colored map comes from a left sweep whose active set holds the
//! viewpoints that are both unobstructed and in range, with one event queue
//! per edge. Besides vertex events there are three point events: a viewpoint
//! leaving its disk through the bottom right quadrant (it may come back, found
//! by a counterclockwise arc query), the first contact with the upper right
//! quadrant (nothing further right is visible), and activations.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use crate::error::Result;
use crate::geometry::{
    circle_edge_params, orient, point_on_segment, ExactX, Point2, QPoint, QuadExt, Rational, Ray2,
};
use crate::intervals::{ColVisBuilder, ColVisMap, VisMap};
use crate::shoot::{ArcOrientation, ShootIndex};
use crate::terrain::{validate_instance, Instance};
use crate::vorvis::{build_vorvis, VorVisOutput};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LimitedStats {
    pub vertex_events: usize,
    /// Exits through the bottom right quadrant.
    pub exits: usize,
    /// Viewpoints retired by an upper right contact.
    pub deaths: usize,
    pub activations: usize,
    /// Events dropped because the viewpoint changed state in between.
    pub stale_events: usize,
    pub ray_shots: usize,
    pub arc_shots: usize,
    /// Bottom right exits that a viewpoint further left still had in range.
    /// Only counted by audited runs.
    pub order_violations: usize,
}

impl LimitedStats {
    fn add(self, o: LimitedStats) -> LimitedStats {
        LimitedStats {
            vertex_events: self.vertex_events + o.vertex_events,
            exits: self.exits + o.exits,
            deaths: self.deaths + o.deaths,
            activations: self.activations + o.activations,
            stale_events: self.stale_events + o.stale_events,
            ray_shots: self.ray_shots + o.ray_shots,
            arc_shots: self.arc_shots + o.arc_shots,
            order_violations: self.order_violations + o.order_violations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitedOutput {
    pub map: ColVisMap,
    pub stats: LimitedStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Exit,
    Death,
    Activate,
}

struct Event {
    point: QPoint,
    vp: usize,
    kind: Kind,
    generation: u64,
}

struct Sweep<'a> {
    inst: &'a Instance,
    r2: Rational,
    shoot: ShootIndex,
    queues: Vec<BinaryHeap<Reverse<(ExactX, usize)>>>,
    events: Vec<Event>,
    active: BTreeSet<usize>,
    generation: Vec<u64>,
    dead: Vec<bool>,
    out: ColVisBuilder,
    stats: LimitedStats,
    audit: bool,
}

impl<'a> Sweep<'a> {
    fn new(inst: &'a Instance, r: &Rational, audit: bool) -> Self {
        let t = &inst.terrain;
        let m = inst.viewpoints.m();
        Sweep {
            inst,
            r2: r * r,
            shoot: ShootIndex::new(t),
            queues: (0..t.n() - 1).map(|_| BinaryHeap::new()).collect(),
            events: Vec::new(),
            active: BTreeSet::new(),
            generation: vec![0; m],
            dead: vec![false; m],
            out: ColVisBuilder::new(ExactX::from(t.x_min()), []),
            stats: LimitedStats::default(),
            audit,
        }
    }

    fn vertex(&self, k: usize) -> &Point2 {
        self.inst.terrain.vertex(k)
    }

    fn push(&mut self, point: QPoint, vp: usize, kind: Kind) {
        let k = self
            .inst
            .terrain
            .edge_at_exact(&point.x)
            .expect("event points lie on the terrain");
        let x = point.x.clone();
        self.events.push(Event {
            point,
            vp,
            kind,
            generation: self.generation[vp],
        });
        self.queues[k].push(Reverse((x, self.events.len() - 1)));
    }

    fn deactivate(&mut self, vp: usize, x: &ExactX) {
        self.active.remove(&vp);
        self.generation[vp] += 1;
        self.out.remove(x.clone(), vp);
    }

    fn activate(&mut self, vp: usize, at: &QPoint, k: usize) {
        self.stats.activations += 1;
        self.active.insert(vp);
        self.out.add(at.x.clone(), vp);
        self.schedule_exit(vp, k);
    }

    /// Schedules the bottom right exit of active `vp` from edge `k`, if any.
    /// Returns false when the rest of the edge stays in range.
    fn schedule_exit(&mut self, vp: usize, k: usize) -> bool {
        let p = self.inst.viewpoint(vp).clone();
        let (a, b) = (self.vertex(k).clone(), self.vertex(k + 1).clone());
        if p.dist2(&b) <= self.r2 {
            return false;
        }
        let Some(t) = circle_edge_params(&p, &self.r2, &a, &b).pop() else {
            debug_assert!(false, "active viewpoint out of range on edge {k}");
            return true;
        };
        let exit = point_on_segment(&a, &b, &t);
        if exit.y < QuadExt::from(&p.y) {
            self.push(exit, vp, Kind::Exit);
        }
        true
    }

    /// Finds where `vp`, just hidden by vertex `k`, becomes active again.
    fn reappear_after_vertex(&mut self, vp: usize, k: usize) {
        let p = self.inst.viewpoint(vp).clone();
        let v = self.vertex(k).clone();
        self.stats.ray_shots += 1;
        let hit = self
            .shoot
            .shoot_ray(&Ray2::through(&p, &v), &ExactX::from(&v.x));
        if let Some(h) = hit.as_ref().filter(|h| p.dist2(h) <= self.r2) {
            self.push(QPoint::from(h), vp, Kind::Activate);
            return;
        }
        // the point at distance r along the shadow ray
        let (dx, dy) = v.sub(&p);
        let scale = &self.r2 / (&dx * &dx + &dy * &dy);
        let start = QPoint {
            x: QuadExt::sqrt_times(dx, &scale).add_rational(&p.x),
            y: QuadExt::sqrt_times(dy, &scale).add_rational(&p.y),
        };
        self.reenter(vp, &p, &start);
    }

    fn reenter(&mut self, vp: usize, p: &Point2, start: &QPoint) {
        self.stats.arc_shots += 1;
        if let Some(q) = self
            .shoot
            .shoot_arc(p, &self.r2, start, ArcOrientation::Ccw)
        {
            self.push(q, vp, Kind::Activate);
        }
    }

    fn insert_viewpoint(&mut self, vp: usize, k: usize) {
        let p = self.inst.viewpoint(vp).clone();
        self.activate(vp, &QPoint::from(&p), k);
        let top = QPoint {
            x: QuadExt::from(&p.x),
            y: QuadExt::sqrt_times(Rational::from_integer(1.into()), &self.r2).add_rational(&p.y),
        };
        self.stats.arc_shots += 1;
        if let Some(c) = self
            .shoot
            .arc_contact(&p, &self.r2, &top, ArcOrientation::Cw)
        {
            if c.y >= QuadExt::from(&p.y) {
                self.push(c, vp, Kind::Death);
            }
        }
    }

    fn audit_exit(&mut self, vp: usize, at: &QPoint) {
        let bad = self
            .active
            .range(..vp)
            .any(|&i| at.dist2(self.inst.viewpoint(i)) < QuadExt::from(&self.r2));
        if bad {
            self.stats.order_violations += 1;
        }
    }

    fn handle(&mut self, idx: usize, k: usize) {
        let (vp, kind, generation) = {
            let e = &self.events[idx];
            (e.vp, e.kind, e.generation)
        };
        let point = self.events[idx].point.clone();
        let current = generation == self.generation[vp];
        match kind {
            Kind::Exit if current && self.active.contains(&vp) => {
                self.stats.exits += 1;
                if self.audit {
                    self.audit_exit(vp, &point);
                }
                self.deactivate(vp, &point.x);
                let p = self.inst.viewpoint(vp).clone();
                self.reenter(vp, &p, &point);
            }
            Kind::Death if !self.dead[vp] => {
                self.stats.deaths += 1;
                self.dead[vp] = true;
                if self.active.contains(&vp) {
                    self.deactivate(vp, &point.x);
                }
            }
            Kind::Activate if current && !self.dead[vp] && !self.active.contains(&vp) => {
                let v = self.vertex(k).clone();
                let hidden = point.x == QuadExt::from(&v.x)
                    && orient(self.inst.viewpoint(vp), &v, self.vertex(k + 1)) < 0;
                if hidden {
                    self.reappear_after_vertex(vp, k);
                } else {
                    self.activate(vp, &point, k);
                }
            }
            _ => self.stats.stale_events += 1,
        }
    }

    fn run(mut self) -> LimitedOutput {
        let n = self.inst.terrain.n();
        for k in 0..n - 1 {
            self.stats.vertex_events += 1;
            let (v, w) = (self.vertex(k).clone(), self.vertex(k + 1).clone());
            let at = ExactX::from(&v.x);
            let hidden: Vec<usize> = self
                .active
                .iter()
                .rev()
                .copied()
                .take_while(|&p| orient(self.inst.viewpoint(p), &v, &w) < 0)
                .collect();
            for p in hidden {
                self.deactivate(p, &at);
                self.reappear_after_vertex(p, k);
            }
            let own = self.inst.viewpoints.ordinal_of_vertex(k);
            if let Some(o) = own {
                self.insert_viewpoint(o, k);
            }
            let scan: Vec<usize> = self
                .active
                .iter()
                .copied()
                .filter(|&p| Some(p) != own)
                .collect();
            for p in scan {
                if !self.schedule_exit(p, k) {
                    break;
                }
            }
            while let Some(Reverse((_, idx))) = self.queues[k].pop() {
                self.handle(idx, k);
            }
        }
        LimitedOutput {
            map: self.out.finish(ExactX::from(self.inst.terrain.x_max())),
            stats: self.stats,
        }
    }
}

fn check(inst: &Instance) -> Result<()> {
    validate_instance(inst)?.require_colvis()
}

fn sweep_both(inst: &Instance, r: &Rational, audit: bool) -> Result<LimitedOutput> {
    let left = Sweep::new(inst, r, audit).run();
    let mirrored = inst.mirrored();
    let right = Sweep::new(&mirrored, r, audit).run();
    Ok(LimitedOutput {
        map: left.map.union(&right.map.mirrored(inst.viewpoints.m()))?,
        stats: left.stats.add(right.stats),
    })
}

/// Colored map under the instance's sight radius. Without a radius this is
/// the unlimited colored map.
pub fn build_colvis_limited(inst: &Instance) -> Result<LimitedOutput> {
    limited(inst, false)
}

/// [`build_colvis_limited`] that also checks, at every bottom right exit,
/// that no active viewpoint further left still has the exit point in range.
pub fn build_colvis_limited_audited(inst: &Instance) -> Result<LimitedOutput> {
    limited(inst, true)
}

fn limited(inst: &Instance, audit: bool) -> Result<LimitedOutput> {
    let Some(r) = inst.viewpoints.radius() else {
        let out = crate::colvis::build_colvis(inst)?;
        return Ok(LimitedOutput {
            map: out.map,
            stats: LimitedStats::default(),
        });
    };
    check(inst)?;
    sweep_both(inst, r, audit)
}

pub fn build_vis_limited(inst: &Instance) -> Result<VisMap> {
    Ok(build_colvis_limited(inst)?.map.coarsen())
}

pub fn build_vorvis_limited(inst: &Instance) -> Result<VorVisOutput> {
    let colvis = build_colvis_limited(inst)?;
    build_vorvis(inst, &colvis.map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generate::{gen_limited_witness, gen_random};
    use crate::geometry::{int, rat};
    use crate::intervals::IntervalMap;
    use crate::oracle::oracle_maps;
    use crate::terrain::{Terrain, ViewpointSet};

    fn q(n: i64) -> ExactX {
        ExactX::from(int(n))
    }

    #[test]
    fn flat_examples() {
        let both = fixtures::flat().with_radius(Some(int(3))).unwrap();
        let map = build_colvis_limited(&both).unwrap().map.materialize();
        assert_eq!(map.breaks(), &[q(0), q(3), q(7), q(10)]);
        assert_eq!(map.labels(), &[vec![0], vec![], vec![1]]);
        let vor = build_vorvis_limited(&both).unwrap().map;
        assert_eq!(vor.labels(), &[Some(0), None, Some(1)]);

        let t = fixtures::flat().terrain;
        let one = Instance::new(
            t.clone(),
            ViewpointSet::new(vec![0], Some(int(3)), t.n()).unwrap(),
        )
        .unwrap();
        let vis = build_vis_limited(&one).unwrap();
        assert_eq!(vis.breaks(), &[q(0), q(3), q(10)]);
        assert_eq!(vis.labels(), &[true, false]);
    }

    #[test]
    fn bowl_exit_and_reentry() {
        // a hump in range hides the dip behind it, which comes back on the
        // far slope exactly where the slope crosses the circle
        let t = Terrain::from_ints(&[(0, 0), (2, 1), (3, -3), (5, -1), (9, 5)]).unwrap();
        let inst = Instance::new(t, ViewpointSet::new(vec![0], Some(int(5)), 5).unwrap()).unwrap();
        let ours = build_colvis_limited(&inst).unwrap().map.materialize();
        assert_eq!(ours, oracle_maps(&inst).colvis);
    }

    #[test]
    fn huge_radius_is_unlimited() {
        for seed in 0..40 {
            let inst = gen_random(20, 4, seed, 30).unwrap();
            let far = inst.with_radius(Some(int(1_000_000))).unwrap();
            let unlimited = crate::colvis::build_colvis(&inst).unwrap().map;
            assert_eq!(build_colvis_limited(&far).unwrap().map, unlimited);
            assert_eq!(
                build_vorvis_limited(&far).unwrap().map,
                crate::vorvis::build_vorvis_dnc(&inst).unwrap()
            );
        }
    }

    #[test]
    fn single_viewpoint_vorvis_is_vis() {
        let inst = gen_random(25, 1, 7, 20)
            .unwrap()
            .with_radius(Some(rat(15, 2)))
            .unwrap();
        let vis = build_vis_limited(&inst).unwrap();
        let vor = build_vorvis_limited(&inst).unwrap().map;
        assert_eq!(vor.map_labels(|l| l.is_some()), vis);
    }

    #[test]
    fn random_instances_match_the_oracle() {
        let mut total = LimitedStats::default();
        for seed in 0..150u64 {
            let n = 6 + (seed as usize * 7) % 20;
            let m = 1 + (seed as usize) % 4;
            let inst = gen_random(n, m, seed, 20).unwrap();
            let r = rat(20 + (seed as i64 * 13) % 120, 10);
            let inst = inst.with_radius(Some(r)).unwrap();
            let out = build_colvis_limited_audited(&inst).unwrap();
            let oracle = oracle_maps(&inst);
            assert_eq!(out.map.materialize(), oracle.colvis, "seed {seed}");
            assert_eq!(out.map.coarsen(), oracle.vis, "seed {seed}");
            assert_eq!(
                build_vorvis_limited(&inst).unwrap().map,
                oracle.vorvis,
                "seed {seed}"
            );
            assert_eq!(out.stats.order_violations, 0, "seed {seed}");
            total = total.add(out.stats);
        }
        assert!(total.exits > 0 && total.deaths > 0 && total.activations > total.exits);
    }

    #[test]
    fn witness_reaches_m_times_t_intervals() {
        for (m, t) in [(1, 3), (2, 4), (3, 4), (4, 3)] {
            let inst = gen_limited_witness(m, t).unwrap();
            assert_eq!(inst.terrain.n(), m + 1 + 3 * t);
            let vis = build_vis_limited(&inst).unwrap();
            let visible = vis.labels().iter().filter(|&&l| l).count();
            assert!(visible >= m * t, "m = {m}, t = {t}: {visible}");
            assert_eq!(vis, oracle_maps(&inst).vis, "m = {m}, t = {t}");
        }
    }

    #[test]
    fn nonpositive_radius_is_rejected() {
        assert!(fixtures::flat().with_radius(Some(int(0))).is_err());
        let _: IntervalMap<bool> = build_vis_limited(&fixtures::flat()).unwrap();
    }
}

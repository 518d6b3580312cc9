//! Visibility map in `O(n + m log m)`: a left-to-right sweep that tracks
//! the leftmost visible viewpoint, one candidate shadow ray for the terrain
//! to re-cross, and the lower envelope of the remaining undominated shadow
//! rays; then the same sweep on the mirrored terrain, and a merge.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::geometry::{orient, ExactX, Point2, QuadExt, Rational};
use crate::intervals::{IntervalMap, VisMap};
use crate::terrain::Instance;

/// Counters a sweep reports for complexity auditing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VisStats {
    /// Rays inserted into the envelope structure.
    pub envelope_insertions: usize,
    /// Ray–ray crossings processed (envelope crossings and secondary swaps).
    pub ray_events: usize,
    /// Loop iterations, including the subdivisions at events and hits.
    pub iterations: usize,
}

impl VisStats {
    fn add(self, o: VisStats) -> VisStats {
        VisStats {
            envelope_insertions: self.envelope_insertions + o.envelope_insertions,
            ray_events: self.ray_events + o.ray_events,
            iterations: self.iterations + o.iterations,
        }
    }
}

/// A visibility map with, for each visible interval, viewpoints (ordinals)
/// that together see all of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VisOutput {
    pub map: VisMap,
    /// One entry per interval of `map`; empty for invisible intervals.
    pub witnesses: Vec<Vec<usize>>,
    pub stats: VisStats,
}

struct ShadowRay {
    owner: usize,
    origin: Point2,
    slope: Rational,
}

impl ShadowRay {
    fn y_at(&self, x: &Rational) -> Rational {
        &self.origin.y + &self.slope * (x - &self.origin.x)
    }

    /// Abscissa where `self`, currently below `upper`, rises above it.
    fn overtakes(&self, upper: &ShadowRay) -> Option<Rational> {
        if self.slope <= upper.slope {
            return None;
        }
        let num = &upper.origin.y - &self.origin.y + &self.slope * &self.origin.x
            - &upper.slope * &upper.origin.x;
        Some(num / (&self.slope - &upper.slope))
    }
}

/// Rays ordered bottom to top. New rays only ever enter at the bottom; two
/// neighbours that cross lose the lower one for good.
struct Envelope {
    rays: Vec<ShadowRay>,
    below: Vec<Option<usize>>,
    above: Vec<Option<usize>>,
    alive: Vec<bool>,
    bottom: Option<usize>,
    crossings: BinaryHeap<Reverse<(Rational, usize, usize)>>,
}

impl Envelope {
    fn new() -> Self {
        Envelope {
            rays: Vec::new(),
            below: Vec::new(),
            above: Vec::new(),
            alive: Vec::new(),
            bottom: None,
            crossings: BinaryHeap::new(),
        }
    }

    fn watch(&mut self, lower: usize, upper: usize) {
        if let Some(x) = self.rays[lower].overtakes(&self.rays[upper]) {
            self.crossings.push(Reverse((x, lower, upper)));
        }
    }

    fn push_bottom(&mut self, ray: ShadowRay) -> usize {
        let id = self.rays.len();
        self.rays.push(ray);
        self.below.push(None);
        self.above.push(self.bottom);
        self.alive.push(true);
        if let Some(b) = self.bottom {
            self.below[b] = Some(id);
            self.watch(id, b);
        }
        self.bottom = Some(id);
        id
    }

    fn remove(&mut self, id: usize) {
        debug_assert!(self.alive[id]);
        self.alive[id] = false;
        let (lo, hi) = (self.below[id], self.above[id]);
        if let Some(l) = lo {
            self.above[l] = hi;
        } else {
            self.bottom = hi;
        }
        if let Some(h) = hi {
            self.below[h] = lo;
        }
        if let (Some(l), Some(h)) = (lo, hi) {
            self.watch(l, h);
        }
    }

    fn pop_bottom(&mut self) -> Option<ShadowRay> {
        let b = self.bottom?;
        self.remove(b);
        let r = &self.rays[b];
        Some(ShadowRay {
            owner: r.owner,
            origin: r.origin.clone(),
            slope: r.slope.clone(),
        })
    }

    /// Earliest pending crossing of two current neighbours.
    fn next_crossing(&mut self) -> Option<(Rational, usize)> {
        while let Some(Reverse((x, lo, hi))) = self.crossings.peek() {
            if self.alive[*lo] && self.alive[*hi] && self.above[*lo] == Some(*hi) {
                return Some((x.clone(), *lo));
            }
            self.crossings.pop();
        }
        None
    }
}

/// Visible runs collected during a sweep, with their primaries.
struct Runs {
    runs: Vec<(Rational, Rational, Vec<usize>)>,
    open: Option<(Rational, Vec<usize>)>,
}

impl Runs {
    fn start(&mut self, x: &Rational, who: usize) {
        debug_assert!(self.open.is_none());
        self.open = Some((x.clone(), vec![who]));
    }

    fn witness(&mut self, who: usize) {
        if let Some((_, w)) = &mut self.open {
            if !w.contains(&who) {
                w.push(who);
            }
        }
    }

    fn end(&mut self, x: &Rational) {
        if let Some((s, w)) = self.open.take() {
            self.runs.push((s, x.clone(), w));
        }
    }
}

fn point_on(a: &Point2, b: &Point2, x: &Rational) -> Point2 {
    let y = &a.y + (&b.y - &a.y) * (x - &a.x) / (&b.x - &a.x);
    Point2::new(x.clone(), y)
}

/// Where the terrain piece `from`–`to` reaches `ray`, if it does.
fn meets(ray: &ShadowRay, from: &Point2, to: &Point2) -> Option<Point2> {
    let s_to = &to.y - ray.y_at(&to.x);
    if s_to.is_negative() {
        return None;
    }
    let s_from = &from.y - ray.y_at(&from.x);
    if !s_from.is_negative() {
        return Some(from.clone());
    }
    let t = &s_from / (&s_from - &s_to);
    Some(Point2::new(
        &from.x + &t * (&to.x - &from.x),
        &from.y + &t * (&to.y - &from.y),
    ))
}

fn shadow(owner: usize, p: &Point2, v: &Point2) -> ShadowRay {
    ShadowRay {
        owner,
        origin: p.clone(),
        slope: (&v.y - &p.y) / (&v.x - &p.x),
    }
}

/// Left-visibility runs: points seen by some viewpoint at or left of them.
fn left_runs(inst: &Instance) -> (Vec<(Rational, Rational, Vec<usize>)>, VisStats) {
    let t = &inst.terrain;
    let v = t.vertices();
    let n = v.len();
    let sites = inst.viewpoint_points();
    let mut stats = VisStats::default();
    let mut env = Envelope::new();
    let mut runs = Runs {
        runs: Vec::new(),
        open: None,
    };
    let mut visible = false;
    let mut primary = usize::MAX;
    let mut secondary: Option<ShadowRay> = None;

    if let Some(i) = inst.viewpoints.ordinal_of_vertex(0) {
        visible = true;
        primary = i;
        runs.start(&v[0].x, i);
    }

    for k in 1..n {
        let (w, vk) = (&v[k - 1], &v[k]);
        let mut cur = w.clone();
        loop {
            stats.iterations += 1;
            // the next ray–ray event on this edge
            let mut event: Option<(Rational, Option<usize>)> =
                env.next_crossing().map(|(x, lo)| (x, Some(lo)));
            if let (false, Some(rb), Some(b)) = (visible, &secondary, env.bottom) {
                if let Some(x) = rb.overtakes(&env.rays[b]) {
                    if event.as_ref().is_none_or(|(e, _)| x < *e) {
                        event = Some((x, None));
                    }
                }
            }
            let event = event.filter(|(x, _)| *x <= vk.x).map(|(x, lo)| {
                let x = if x < cur.x { cur.x.clone() } else { x };
                (x, lo)
            });
            let stop = match &event {
                Some((x, _)) => point_on(w, vk, x),
                None => vk.clone(),
            };

            if !visible {
                if let Some(rb) = &secondary {
                    if let Some(hit) = meets(rb, &cur, &stop) {
                        primary = rb.owner;
                        secondary = None;
                        visible = true;
                        runs.start(&hit.x, primary);
                        cur = hit;
                        continue;
                    }
                }
            } else if let Some(b) = env.bottom {
                if let Some(hit) = meets(&env.rays[b], &cur, &stop) {
                    let owner = env.rays[b].owner;
                    env.remove(b);
                    if owner < primary {
                        primary = owner;
                        runs.witness(owner);
                    }
                    cur = hit;
                    continue;
                }
            }

            match event {
                Some((x, Some(lower))) => {
                    stats.ray_events += 1;
                    env.remove(lower);
                    cur = point_on(w, vk, &x);
                }
                Some((x, None)) => {
                    // the secondary ray rises above the envelope's bottom,
                    // whose viewpoint takes over
                    stats.ray_events += 1;
                    secondary = env.pop_bottom();
                    cur = point_on(w, vk, &x);
                }
                None => break,
            }
        }

        if k + 1 == n {
            break;
        }
        let next = &v[k + 1];
        let keeps = |p: usize| orient(&sites[p], vk, next) >= 0;
        match inst.viewpoints.ordinal_of_vertex(k) {
            None => {
                if visible && !keeps(primary) {
                    secondary = Some(shadow(primary, &sites[primary], vk));
                    visible = false;
                    runs.end(&vk.x);
                }
            }
            Some(i) => {
                if !visible {
                    if let Some(rb) = secondary.take() {
                        env.push_bottom(rb);
                        stats.envelope_insertions += 1;
                    }
                    visible = true;
                    primary = i;
                    runs.start(&vk.x, i);
                } else if !keeps(primary) {
                    env.push_bottom(shadow(primary, &sites[primary], vk));
                    stats.envelope_insertions += 1;
                    primary = i;
                    runs.witness(i);
                }
            }
        }
    }
    runs.end(&v[n - 1].x);
    (runs.runs, stats)
}

/// Turns runs into a map, dropping zero-length runs and joining touching ones.
fn runs_to_output(
    lo: &Rational,
    hi: &Rational,
    runs: Vec<(Rational, Rational, Vec<usize>)>,
    stats: VisStats,
) -> VisOutput {
    let mut joined: Vec<(Rational, Rational, Vec<usize>)> = Vec::new();
    for (s, e, w) in runs.into_iter().filter(|(s, e, _)| s < e) {
        match joined.last_mut() {
            Some(last) if last.1 >= s => {
                if e > last.1 {
                    last.1 = e;
                }
                for x in w {
                    if !last.2.contains(&x) {
                        last.2.push(x);
                    }
                }
            }
            _ => joined.push((s, e, w)),
        }
    }
    let mut breaks = vec![QuadExt::from(lo)];
    let mut labels = Vec::new();
    let mut witnesses = Vec::new();
    let mut at = lo.clone();
    for (s, e, w) in joined {
        if s > at {
            breaks.push(QuadExt::from(&s));
            labels.push(false);
            witnesses.push(Vec::new());
        }
        if e > s {
            breaks.push(QuadExt::from(&e));
            labels.push(true);
            witnesses.push(w);
        }
        at = e;
    }
    if *hi > at {
        breaks.push(QuadExt::from(hi));
        labels.push(false);
        witnesses.push(Vec::new());
    }
    let map = IntervalMap::from_pieces(breaks, labels);
    debug_assert_eq!(map.len(), witnesses.len());
    VisOutput {
        map,
        witnesses,
        stats,
    }
}

fn require_unlimited(inst: &Instance) -> Result<()> {
    if inst.viewpoints.radius().is_some() {
        return Err(Error::LimitedSightUnsupported);
    }
    Ok(())
}

/// Left-visibility map: visible means seen by a viewpoint at or left of
/// the point.
pub fn build_left_vis(inst: &Instance) -> Result<VisOutput> {
    require_unlimited(inst)?;
    let (runs, stats) = left_runs(inst);
    Ok(runs_to_output(
        inst.terrain.x_min(),
        inst.terrain.x_max(),
        runs,
        stats,
    ))
}

/// Right-visibility map, computed on the mirrored instance.
pub fn build_right_vis(inst: &Instance) -> Result<VisOutput> {
    require_unlimited(inst)?;
    let m = inst.viewpoints.m();
    let (runs, stats) = left_runs(&inst.mirrored());
    let runs = runs
        .into_iter()
        .rev()
        .map(|(s, e, w)| (-e, -s, w.into_iter().map(|i| m - 1 - i).collect()))
        .collect();
    Ok(runs_to_output(
        inst.terrain.x_min(),
        inst.terrain.x_max(),
        runs,
        stats,
    ))
}

/// Union of two visibility maps; each visible interval lists the
/// witnesses of `left` before those of `right`.
pub fn merge_vis(left: &VisOutput, right: &VisOutput) -> Result<VisOutput> {
    let map = left.map.overlay(&right.map, |a, b| *a || *b)?;
    // both inputs are walked once, each with a cursor that only moves right
    let collect =
        |out: &VisOutput, from: &mut usize, lo: &ExactX, hi: &ExactX, acc: &mut Vec<usize>| {
            let breaks = out.map.breaks();
            while *from < out.map.len() && &breaks[*from + 1] <= lo {
                *from += 1;
            }
            let mut i = *from;
            while i < out.map.len() && &breaks[i] < hi {
                if out.map.labels()[i] {
                    for x in &out.witnesses[i] {
                        if !acc.contains(x) {
                            acc.push(*x);
                        }
                    }
                }
                i += 1;
            }
        };
    let mut witnesses = Vec::with_capacity(map.len());
    let (mut li, mut ri) = (0, 0);
    for (lo, hi, vis) in map.intervals() {
        let mut acc = Vec::new();
        if *vis {
            collect(left, &mut li, lo, hi, &mut acc);
            collect(right, &mut ri, lo, hi, &mut acc);
        }
        witnesses.push(acc);
    }
    Ok(VisOutput {
        map,
        witnesses,
        stats: left.stats.add(right.stats),
    })
}

/// Visibility map of the whole viewpoint set.
pub fn build_vis(inst: &Instance) -> Result<VisOutput> {
    merge_vis(&build_left_vis(inst)?, &build_right_vis(inst)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geometry::rat;
    use crate::terrain::{Terrain, ViewpointSet};

    fn q(n: i64, d: i64) -> ExactX {
        QuadExt::from(rat(n, d))
    }

    #[test]
    fn fixture_maps() {
        let peak = build_vis(&fixtures::peak()).unwrap();
        assert_eq!(peak.map.breaks(), &[q(0, 1), q(1, 1), q(2, 1)]);
        assert_eq!(peak.map.labels(), &[true, false]);

        let valley = build_left_vis(&fixtures::valley()).unwrap();
        assert_eq!(valley.map.breaks(), &[q(0, 1), q(2, 1), q(28, 9), q(4, 1)]);
        assert_eq!(valley.map.labels(), &[true, false, true]);

        let apex = build_vis(&fixtures::apex()).unwrap();
        assert_eq!(apex.map, IntervalMap::constant(q(0, 1), q(10, 1), true));

        let mut flat = fixtures::flat();
        flat.viewpoints = ViewpointSet::new(vec![0], None, 2).unwrap();
        let out = build_left_vis(&flat).unwrap();
        assert_eq!(out.map, IntervalMap::constant(q(0, 1), q(10, 1), true));
    }

    #[test]
    fn witnesses_cover_their_intervals() {
        let apex = build_vis(&fixtures::apex()).unwrap();
        assert_eq!(apex.witnesses, vec![vec![0, 1]]);
    }

    #[test]
    fn limited_sight_is_refused() {
        let inst = fixtures::flat()
            .with_radius(Some(crate::geometry::int(3)))
            .unwrap();
        assert!(matches!(
            build_vis(&inst),
            Err(Error::LimitedSightUnsupported)
        ));
    }

    #[test]
    fn crossing_rays_retire_the_right_viewpoint() {
        // two viewpoints cast shadows over the same notch
        let t = Terrain::from_ints(&[(0, 10), (1, 9), (2, 8), (3, 7), (4, 0), (9, 3), (30, 40)])
            .unwrap();
        let inst = Instance::new(t, ViewpointSet::new(vec![0, 2], None, 7).unwrap()).unwrap();
        let out = build_left_vis(&inst).unwrap();
        let oracle = crate::oracle::oracle_maps(&inst);
        let left_only = out.map.clone();
        assert!(left_only.len() >= 2);
        assert!(out.stats.envelope_insertions <= 2);
        assert_eq!(build_vis(&inst).unwrap().map, oracle.vis);
    }

    #[test]
    fn random_instances_match_the_oracle() {
        for seed in 0..150 {
            let n = 4 + (seed as usize * 7) % 30;
            let m = 1 + (seed as usize) % 6;
            let inst = crate::generate::gen_random(n, m.min(n), seed, 30).unwrap();
            let out = build_vis(&inst).unwrap();
            let oracle = crate::oracle::oracle_maps(&inst);
            assert_eq!(out.map, oracle.vis, "seed {seed}");
            assert!(out.stats.envelope_insertions <= 2 * m);
        }
    }
}

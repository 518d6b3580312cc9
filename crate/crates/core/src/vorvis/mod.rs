//! Voronoi visibility map, by divide and conquer over viewsheds, and by an
//! output-sensitive sweep over the colored map.

mod closer;

pub use closer::{first_region_change, is_always_closer, Contender, PruneStats};

use std::collections::BTreeSet;

use crate::colvis::build_colvis;
use crate::error::{Error, Result};
use crate::geometry::{ExactX, Point2, QuadExt, Rational};
use crate::intervals::{ColVisMap, MapBuilder, VorVisMap};
use crate::terrain::{validate_instance, Instance, Terrain};

use closer::{diff_on_edge, side_after};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VorVisStats {
    /// Regions started by the sweep, before merging equal neighbours.
    pub iterations: usize,
    pub forward_steps: usize,
    pub backward_steps: usize,
    /// Colored-map events deleted from the working copy.
    pub tombstones: usize,
    pub prune: PruneStats,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VorVisOutput {
    pub map: VorVisMap,
    pub stats: VorVisStats,
}

fn check(inst: &Instance) -> Result<()> {
    validate_instance(inst)?.require_vorvis()
}

/// Visible part of the terrain from vertex `i`, to its right, as closed
/// intervals.
fn right_viewshed(pts: &[Point2], i: usize) -> Vec<(Rational, Rational)> {
    let p = &pts[i];
    let mut out: Vec<(Rational, Rational)> = Vec::new();
    let mut push = |a: Rational, b: Rational| match out.last_mut() {
        Some(last) if last.1 == a => last.1 = b,
        _ => out.push((a, b)),
    };
    let slope = |v: &Point2| (&v.y - &p.y) / (&v.x - &p.x);
    let mut horizon: Option<Rational> = None;
    for k in i..pts.len().saturating_sub(1) {
        let (a, b) = (&pts[k], &pts[k + 1]);
        let sb = slope(b);
        match &horizon {
            None => push(a.x.clone(), b.x.clone()),
            Some(h) if sb > *h => {
                // where the sight line along the horizon meets the edge
                let m = (&b.y - &a.y) / (&b.x - &a.x);
                let x = (&a.y - &m * &a.x - &p.y + h * &p.x) / (h - &m);
                push(x, b.x.clone());
            }
            Some(_) => {}
        }
        if horizon.as_ref().is_none_or(|h| sb > *h) {
            horizon = Some(sb);
        }
    }
    out
}

/// Viewshed of viewpoint `ord` as a map labeled `Some(ord)` or `None`.
fn viewshed(inst: &Instance, ord: usize) -> VorVisMap {
    let t = &inst.terrain;
    let n = t.n();
    let i = inst.viewpoints.indices()[ord];
    let mut pieces = right_viewshed(t.vertices(), i);
    let mirrored: Vec<Point2> = t.vertices().iter().rev().map(Point2::mirrored).collect();
    let left = right_viewshed(&mirrored, n - 1 - i);
    for (a, b) in left {
        pieces.push((-b, -a));
    }
    pieces.sort();
    let mut out = MapBuilder::new(ExactX::from(t.x_min()), None);
    for (a, b) in pieces {
        if a < b {
            out.set(ExactX::from(a), Some(ord));
            out.set(ExactX::from(b), None);
        }
    }
    out.finish(ExactX::from(t.x_max()))
}

/// Splits the stretch `[lo, hi]` seen by both `a` and `b` between them.
fn split_shared(
    inst: &Instance,
    lo: &ExactX,
    hi: &ExactX,
    a: usize,
    b: usize,
    out: &mut MapBuilder<Option<usize>>,
) {
    let t = &inst.terrain;
    let (pa, pb) = (inst.viewpoint(a), inst.viewpoint(b));
    let mut k = t.edge_at_exact(lo).expect("inside the terrain");
    let mut s = lo.clone();
    while s < *hi {
        let vx = ExactX::from(&t.vertex(k + 1).x);
        let e = if vx < *hi { vx } else { hi.clone() };
        let ab = diff_on_edge(t, k, pa, pb);
        let ds = s.scale(&ab.0).add_rational(&ab.1).signum();
        let de = e.scale(&ab.0).add_rational(&ab.1).signum();
        let pick = |sg: i8| if sg > 0 { Some(b) } else { Some(a) };
        if ds * de < 0 {
            out.set(s.clone(), pick(ds));
            out.set(ExactX::from(-&ab.1 / &ab.0), pick(de));
        } else {
            out.set(s.clone(), pick(if ds != 0 { ds } else { de }));
        }
        s = e;
        k += 1;
    }
}

fn merge_pair(inst: &Instance, x: &VorVisMap, y: &VorVisMap) -> Result<VorVisMap> {
    let both = x.overlay(y, |a, b| (*a, *b))?;
    let mut out = MapBuilder::new(both.lo().clone(), None);
    for (lo, hi, labels) in both.intervals() {
        match *labels {
            (Some(a), Some(b)) => split_shared(inst, lo, hi, a, b, &mut out),
            (a, b) => out.set(lo.clone(), a.or(b)),
        }
    }
    Ok(out.finish(both.hi().clone()))
}

fn dnc(inst: &Instance, lo: usize, hi: usize) -> Result<VorVisMap> {
    if hi - lo == 1 {
        return Ok(viewshed(inst, lo));
    }
    let mid = (lo + hi) / 2;
    merge_pair(inst, &dnc(inst, lo, mid)?, &dnc(inst, mid, hi)?)
}

/// Divide and conquer: viewsheds of single viewpoints, merged pairwise by
/// splitting every commonly seen stretch at the bisector.
pub fn build_vorvis_dnc(inst: &Instance) -> Result<VorVisMap> {
    if inst.viewpoints.radius().is_some() {
        return Err(Error::LimitedSightUnsupported);
    }
    check(inst)?;
    dnc(inst, 0, inst.viewpoints.m())
}

struct Item {
    vp: usize,
    appear: bool,
    alive: bool,
}

struct Group {
    x: ExactX,
    items: Vec<Item>,
}

/// Working state of the sweep: the colored-map events with deletions, a
/// cursor, the visible set at the cursor and the anchors.
struct Sweep<'a> {
    t: &'a Terrain,
    sites: Vec<Point2>,
    groups: Vec<Group>,
    pos: usize,
    visible: BTreeSet<usize>,
    anchor: Vec<ExactX>,
    stats: VorVisStats,
}

impl Sweep<'_> {
    fn closest_after(&self, u: &ExactX) -> usize {
        let mut it = self.visible.iter().copied();
        let mut best = it.next().expect("nonempty");
        for c in it {
            if side_after(self.t, u, &self.sites[best], &self.sites[c]) > 0 {
                best = c;
            }
        }
        best
    }

    fn always(&mut self, i: usize, q: &ExactX, p1: usize) -> bool {
        self.stats.prune.always_closer_calls += 1;
        is_always_closer(self.t, &self.anchor[i], q, &self.sites[p1], &self.sites[i])
    }

    fn contenders(&self, set: impl Iterator<Item = usize>) -> Vec<Contender> {
        set.map(|i| Contender {
            site: self.sites[i].clone(),
            anchor: self.anchor[i].clone(),
        })
        .collect()
    }

    fn region_change(&mut self, u: &ExactX, q: &ExactX, p1: usize, others: &[Contender]) -> ExactX {
        first_region_change(self.t, u, q, &self.sites[p1], others, &mut self.stats.prune)
    }

    /// Undoes every group right of `v`. An appearance whose viewpoint is
    /// already absent lost its disappearance to a deletion, so it goes too.
    fn backtrack(&mut self, v: &ExactX) {
        while self.pos > 0 && self.groups[self.pos - 1].x > *v {
            self.pos -= 1;
            self.stats.backward_steps += 1;
            let g = &mut self.groups[self.pos];
            for item in g.items.iter_mut().rev().filter(|i| i.alive) {
                if !item.appear {
                    self.visible.insert(item.vp);
                } else if !self.visible.remove(&item.vp) {
                    item.alive = false;
                    self.stats.tombstones += 1;
                }
            }
        }
    }

    fn run(&mut self, lo: ExactX, hi: ExactX) -> VorVisMap {
        let mut out = MapBuilder::new(lo.clone(), None);
        let mut u = lo;
        'region: while u < hi {
            self.stats.iterations += 1;
            if self.visible.is_empty() {
                out.set(u.clone(), None);
                if self.pos == self.groups.len() {
                    break;
                }
                u = self.groups[self.pos].x.clone();
                self.apply_forward(&u);
                continue;
            }
            let p1 = self.closest_after(&u);
            for &i in &self.visible {
                self.anchor[i] = u.clone();
            }
            out.set(u.clone(), Some(p1));
            loop {
                if self.pos == self.groups.len() {
                    // end of the terrain
                    let others: Vec<usize> =
                        self.visible.iter().copied().filter(|&i| i != p1).collect();
                    if others.iter().all(|&i| self.always(i, &hi, p1)) {
                        break 'region;
                    }
                    let c = self.contenders(others.into_iter());
                    let v = self.region_change(&u, &hi, p1, &c);
                    self.backtrack(&v);
                    u = v;
                    continue 'region;
                }
                let q = self.groups[self.pos].x.clone();
                self.stats.forward_steps += 1;
                let mut change = false;
                let mut p1_gone = false;
                let mut gone = Vec::new();
                let pos = self.pos;
                for idx in 0..self.groups[pos].items.len() {
                    let (vp, appear, alive) = {
                        let it = &self.groups[pos].items[idx];
                        (it.vp, it.appear, it.alive)
                    };
                    if !alive || appear {
                        continue;
                    }
                    self.visible.remove(&vp);
                    if vp == p1 {
                        p1_gone = true;
                    } else if self.always(vp, &q, p1) {
                        self.groups[pos].items[idx].alive = false;
                        self.stats.tombstones += 1;
                    } else {
                        change = true;
                        gone.push(vp);
                    }
                }
                if p1_gone && !change {
                    let others: Vec<usize> = self.visible.iter().copied().collect();
                    change = !others.iter().all(|&i| self.always(i, &q, p1));
                }
                if change {
                    let set: Vec<usize> = self
                        .visible
                        .iter()
                        .copied()
                        .chain(gone)
                        .filter(|&i| i != p1)
                        .collect();
                    let c = self.contenders(set.into_iter());
                    let v = self.region_change(&u, &q, p1, &c);
                    self.add_appearances(pos, &q);
                    self.pos += 1;
                    self.backtrack(&v);
                    u = v;
                    continue 'region;
                }
                self.add_appearances(pos, &q);
                self.pos += 1;
                if p1_gone {
                    u = q;
                    continue 'region;
                }
            }
        }
        out.finish(hi)
    }

    fn add_appearances(&mut self, pos: usize, q: &ExactX) {
        for item in self.groups[pos]
            .items
            .iter()
            .filter(|i| i.alive && i.appear)
        {
            self.visible.insert(item.vp);
            self.anchor[item.vp] = q.clone();
        }
    }

    /// Applies the group at `x`, which must be the next one.
    fn apply_forward(&mut self, x: &ExactX) {
        let g = &self.groups[self.pos];
        debug_assert!(g.x == *x);
        for item in g.items.iter().filter(|i| i.alive) {
            if item.appear {
                self.visible.insert(item.vp);
                self.anchor[item.vp] = x.clone();
            } else {
                self.visible.remove(&item.vp);
            }
        }
        self.pos += 1;
        self.stats.forward_steps += 1;
    }
}

/// Output-sensitive construction from the colored map of the same
/// instance. Works for limited sight as well, given the limited colored map.
pub fn build_vorvis(inst: &Instance, colvis: &ColVisMap) -> Result<VorVisOutput> {
    check(inst)?;
    let t = &inst.terrain;
    if colvis.lo() != &ExactX::from(t.x_min()) || colvis.hi() != &ExactX::from(t.x_max()) {
        return Err(Error::DomainMismatch);
    }
    let m = inst.viewpoints.m();
    let groups = colvis
        .deltas()
        .iter()
        .zip(&colvis.breaks()[1..])
        .map(|(d, x)| Group {
            x: x.clone(),
            items: d
                .removed
                .iter()
                .map(|&vp| (vp, false))
                .chain(d.added.iter().map(|&vp| (vp, true)))
                .map(|(vp, appear)| Item {
                    vp,
                    appear,
                    alive: true,
                })
                .collect(),
        })
        .collect();
    let lo = colvis.lo().clone();
    let mut sweep = Sweep {
        t,
        sites: inst.viewpoint_points(),
        groups,
        pos: 0,
        visible: colvis.first().iter().copied().collect(),
        anchor: vec![lo.clone(); m],
        stats: VorVisStats::default(),
    };
    let map = sweep.run(lo, colvis.hi().clone());
    Ok(VorVisOutput {
        map,
        stats: sweep.stats,
    })
}

/// Colored map followed by the output-sensitive sweep.
pub fn build_vorvis_sweep(inst: &Instance) -> Result<VorVisOutput> {
    let colvis = build_colvis(inst)?;
    build_vorvis(inst, &colvis.map)
}

/// Interior breakpoints of `vorvis` that are not breakpoints of the colored
/// map, i.e. bisector crossings, per edge.
pub fn bisector_breaks_per_edge(t: &Terrain, vorvis: &VorVisMap, colvis: &ColVisMap) -> Vec<usize> {
    let own: BTreeSet<&QuadExt> = colvis.breaks().iter().collect();
    let filtered: Vec<ExactX> = vorvis
        .breaks()
        .iter()
        .filter(|x| !own.contains(x))
        .cloned()
        .collect();
    let mut counts = vec![0; t.n() - 1];
    for x in &filtered {
        if let Some(k) = t.edge_at_exact(x) {
            if ExactX::from(&t.vertex(k).x) != *x {
                counts[k] += 1;
            }
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generate::{gen_comb, gen_random};
    use crate::geometry::rat;
    use crate::oracle::oracle_maps;

    fn q(n: i64, d: i64) -> ExactX {
        ExactX::from(rat(n, d))
    }

    #[test]
    fn fixture_maps() {
        let flat = build_vorvis_dnc(&fixtures::flat()).unwrap();
        assert_eq!(flat.breaks(), &[q(0, 1), q(5, 1), q(10, 1)]);
        assert_eq!(flat.labels(), &[Some(0), Some(1)]);
        let apex = build_vorvis_dnc(&fixtures::apex()).unwrap();
        assert_eq!(apex.breaks(), &[q(0, 1), q(2, 1), q(10, 1)]);
        assert_eq!(apex.labels(), &[Some(0), Some(1)]);
        let peak = build_vorvis_dnc(&fixtures::peak()).unwrap();
        assert_eq!(peak.labels(), &[Some(0), None]);

        for inst in [
            fixtures::flat(),
            fixtures::apex(),
            fixtures::peak(),
            fixtures::valley(),
        ] {
            let sweep = build_vorvis_sweep(&inst).unwrap();
            assert_eq!(sweep.map, build_vorvis_dnc(&inst).unwrap());
            assert_eq!(sweep.map, oracle_maps(&inst).vorvis);
        }
    }

    #[test]
    fn viewsheds_match_single_viewpoint_oracle() {
        for seed in 0..40 {
            let inst = gen_random(15, 1, seed, 25).unwrap();
            assert_eq!(viewshed(&inst, 0), oracle_maps(&inst).vorvis, "seed {seed}");
        }
    }

    #[test]
    fn random_instances_match_the_oracle() {
        for seed in 0..150 {
            let n = 4 + (seed as usize * 7) % 30;
            let m = (1 + (seed as usize) % 6).min(n);
            let inst = gen_random(n, m, seed, 30).unwrap();
            let oracle = oracle_maps(&inst).vorvis;
            assert_eq!(build_vorvis_dnc(&inst).unwrap(), oracle, "dnc seed {seed}");
            let out = build_vorvis_sweep(&inst).unwrap();
            assert_eq!(out.map, oracle, "sweep seed {seed}");
            assert_eq!(out.stats.prune.short_rounds, 0);
            let per_edge = out.map.regions_per_edge(&inst.terrain);
            assert!(per_edge.iter().all(|&c| c <= 4 * m - 2), "seed {seed}");
        }
    }

    #[test]
    fn cross_algorithm_example() {
        let inst = gen_random(40, 6, 5, 50).unwrap();
        assert_eq!(
            build_vorvis_sweep(&inst).unwrap().map,
            build_vorvis_dnc(&inst).unwrap()
        );
    }

    #[test]
    fn comb_counts() {
        let comb = gen_comb(3, 4, 2).unwrap();
        let out = build_vorvis_sweep(&comb.instance).unwrap();
        assert!(out.map.len() >= comb.expected_vorvis);
        assert_eq!(out.map, build_vorvis_dnc(&comb.instance).unwrap());
    }
}

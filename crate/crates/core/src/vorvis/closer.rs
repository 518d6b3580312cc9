//! Which of two viewpoints is closer along a stretch of terrain.
//!
//! Along one edge, `D(X) = |X - p1|² - |X - p2|²` is affine in `x`, so every
//! question here reduces to signs of `D` at a few abscissas. `D > 0` means
//! `p2` is the closer one.

use num_traits::Signed;

use crate::geometry::{bisector, int, ExactX, Line2, Point2, QuadExt, Rational};
use crate::terrain::Terrain;

/// `D` on edge `k` as `(alpha, beta)`, with value `alpha * x + beta`.
pub(crate) fn diff_on_edge(
    t: &Terrain,
    k: usize,
    p1: &Point2,
    p2: &Point2,
) -> (Rational, Rational) {
    let (a, b) = (t.vertex(k), t.vertex(k + 1));
    let s = (&b.y - &a.y) / (&b.x - &a.x);
    let dx = &p2.x - &p1.x;
    let dy = &p2.y - &p1.y;
    let c = (&p1.x * &p1.x + &p1.y * &p1.y) - (&p2.x * &p2.x + &p2.y * &p2.y);
    let alpha = int(2) * (&dx + &s * &dy);
    let beta = int(2) * (&a.y - &s * &a.x) * &dy + c;
    (alpha, beta)
}

fn eval(ab: &(Rational, Rational), x: &ExactX) -> QuadExt {
    x.scale(&ab.0).add_rational(&ab.1)
}

fn right_edge(t: &Terrain, x: &ExactX) -> usize {
    t.edge_at_exact(x).expect("abscissa outside the terrain")
}

fn left_edge(t: &Terrain, x: &ExactX) -> usize {
    let k = right_edge(t, x);
    if k > 0 && ExactX::from(&t.vertex(k).x) == *x {
        k - 1
    } else {
        k
    }
}

pub(crate) fn diff_at(t: &Terrain, x: &ExactX, p1: &Point2, p2: &Point2) -> QuadExt {
    eval(&diff_on_edge(t, right_edge(t, x), p1, p2), x)
}

fn rsign(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of `D` just right of `x`.
pub(crate) fn side_after(t: &Terrain, x: &ExactX, p1: &Point2, p2: &Point2) -> i8 {
    let ab = diff_on_edge(t, right_edge(t, x), p1, p2);
    match eval(&ab, x).signum() {
        0 => rsign(&ab.0),
        s => s,
    }
}

/// Sign of `D` just left of `x`.
pub(crate) fn side_before(t: &Terrain, x: &ExactX, p1: &Point2, p2: &Point2) -> i8 {
    let ab = diff_on_edge(t, left_edge(t, x), p1, p2);
    match eval(&ab, x).signum() {
        0 => -rsign(&ab.0),
        s => s,
    }
}

/// Whether no point of the terrain between `r` and `t` is strictly closer
/// to `p2` than to `p1`, for viewpoints that both see all of it.
///
/// Some point is closer to `p2` exactly when an endpoint is (an endpoint on
/// the bisector is judged just inside the interval), or when `p2` itself
/// lies strictly between the endpoints.
pub fn is_always_closer(
    terrain: &Terrain,
    r: &ExactX,
    t: &ExactX,
    p1: &Point2,
    p2: &Point2,
) -> bool {
    if r == t {
        return diff_at(terrain, r, p1, p2).signum() <= 0;
    }
    if side_after(terrain, r, p1, p2) > 0 || side_before(terrain, t, p1, p2) > 0 {
        return false;
    }
    let x2 = ExactX::from(&p2.x);
    !(*r < x2 && x2 < *t)
}

/// First abscissa in `[from, until)` right after which the terrain is
/// closer to `p2`.
pub(crate) fn first_crossing(
    t: &Terrain,
    p1: &Point2,
    p2: &Point2,
    from: &ExactX,
    until: &ExactX,
    walked: &mut usize,
) -> Option<ExactX> {
    let mut k = right_edge(t, from);
    let mut s = from.clone();
    loop {
        if s >= *until {
            return None;
        }
        let vx = ExactX::from(&t.vertex(k + 1).x);
        let end = if vx < *until {
            vx.clone()
        } else {
            until.clone()
        };
        let ab = diff_on_edge(t, k, p1, p2);
        let ds = eval(&ab, &s).signum();
        if ds > 0 || (ds == 0 && ab.0.is_positive()) {
            return Some(s);
        }
        if eval(&ab, &end).signum() > 0 {
            return Some(ExactX::from(-&ab.1 / &ab.0));
        }
        *walked += 1;
        if end == *until || k + 2 == t.n() {
            return None;
        }
        k += 1;
        s = vx;
    }
}

/// Counters of [`first_region_change`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PruneStats {
    pub calls: usize,
    pub rounds: usize,
    pub discarded: usize,
    /// Rounds that discarded fewer than a quarter (rounded down) of the
    /// viewpoints they started with.
    pub short_rounds: usize,
    pub always_closer_calls: usize,
    pub walked_edges: usize,
}

/// A viewpoint that sees the terrain from `anchor` up to the end of the
/// query interval.
#[derive(Clone, Debug)]
pub struct Contender {
    pub site: Point2,
    pub anchor: ExactX,
}

struct Cand<'a> {
    site: &'a Point2,
    anchor: &'a ExactX,
    line: Line2,
}

struct Search<'a> {
    t: &'a Terrain,
    p1: &'a Point2,
    stats: &'a mut PruneStats,
}

impl Search<'_> {
    fn always(&mut self, r: &ExactX, q: &ExactX, p2: &Point2) -> bool {
        self.stats.always_closer_calls += 1;
        is_always_closer(self.t, r, q, self.p1, p2)
    }
}

fn max_x(a: &ExactX, b: &ExactX) -> ExactX {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Leftmost point of `[u, q]` where `p1` stops being the closest visible
/// viewpoint, given that it is visible throughout and closest just right of
/// `u`, and that each contender sees `[anchor, q]` with `anchor >= u`.
/// Returns `q` when `p1` stays closest.
///
/// Contenders are first filtered with [`is_always_closer`]: the leftmost
/// anchor where a contender is already closer caps the answer, and what
/// survives can only take over by the terrain crossing its bisector with
/// `p1`. Those are split by which side of `p1` they lie on and pruned in
/// pairs around the median of the pairwise bisector crossings, until one
/// per side is left; the two survivors are resolved by walking the terrain.
pub fn first_region_change(
    t: &Terrain,
    u: &ExactX,
    q: &ExactX,
    p1: &Point2,
    contenders: &[Contender],
    stats: &mut PruneStats,
) -> ExactX {
    stats.calls += 1;
    let mut s = Search { t, p1, stats };
    let mut best = q.clone();
    let mut rest: Vec<&Contender> = Vec::new();
    for c in contenders {
        if c.site.y == p1.y {
            // vertical bisector: the half-plane test is direct
            let b = ExactX::from((&p1.x + &c.site.x) / int(2));
            let cand = if c.site.x > p1.x {
                max_x(&c.anchor, &b)
            } else if c.anchor < b {
                c.anchor.clone()
            } else {
                continue;
            };
            if cand < best {
                best = cand;
            }
        } else if !s.always(&c.anchor, q, &c.site) {
            rest.push(c);
        }
    }
    for c in &rest {
        if side_after(t, &c.anchor, p1, &c.site) > 0 && c.anchor < best {
            best = c.anchor.clone();
        }
    }
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for c in rest {
        if c.anchor >= best || side_after(t, &c.anchor, p1, &c.site) > 0 {
            continue;
        }
        if s.always(&c.anchor, &best, &c.site) {
            continue;
        }
        let cand = Cand {
            site: &c.site,
            anchor: &c.anchor,
            line: bisector(p1, &c.site).expect("distinct viewpoints"),
        };
        if c.site.y > p1.y {
            upper.push(cand);
        } else {
            lower.push(cand);
        }
    }

    let mut lo = u.clone();
    let mut hi = best.clone();
    while upper.len() > 1 || lower.len() > 1 {
        let before = upper.len() + lower.len();
        s.stats.rounds += 1;
        let mut xs: Vec<Rational> = Vec::new();
        for group in [&upper, &lower] {
            for pair in group.chunks(2).filter(|p| p.len() == 2) {
                if let Some(x) = crossing_inside(&pair[0], &pair[1], &lo, &hi) {
                    xs.push(x);
                }
            }
        }
        if !xs.is_empty() {
            xs.sort();
            let mu = ExactX::from(xs[(xs.len() - 1) / 2].clone());
            let mut earlier = false;
            for c in upper.iter().chain(lower.iter()) {
                let a = max_x(c.anchor, &lo);
                if a < mu && !s.always(&a, &mu, c.site) {
                    earlier = true;
                    break;
                }
            }
            if earlier {
                hi = mu;
            } else {
                lo = mu;
            }
        }
        upper = prune(&mut s, upper, &lo, &hi, true);
        lower = prune(&mut s, lower, &lo, &hi, false);
        let gone = before - upper.len() - lower.len();
        s.stats.discarded += gone;
        if gone < before / 4 {
            s.stats.short_rounds += 1;
        }
    }
    for c in upper.iter().chain(lower.iter()) {
        let a = max_x(c.anchor, &lo);
        if let Some(x) = first_crossing(t, p1, c.site, &a, &hi, &mut s.stats.walked_edges) {
            if x < best {
                best = x;
            }
        }
    }
    best
}

/// Abscissa where the two bisectors cross, if strictly inside the part of
/// `(lo, hi)` both contenders see.
fn crossing_inside(a: &Cand, b: &Cand, lo: &ExactX, hi: &ExactX) -> Option<Rational> {
    let x = a.line.intersect_x(&b.line)?;
    let start = max_x(&max_x(a.anchor, b.anchor), lo);
    let xq = ExactX::from(&x);
    (start < xq && xq < *hi).then_some(x)
}

/// One pruning pass over consecutive pairs. On the upper side the terrain
/// reaches a lower bisector first, on the lower side a higher one.
fn prune<'a>(
    s: &mut Search,
    group: Vec<Cand<'a>>,
    lo: &ExactX,
    hi: &ExactX,
    upper: bool,
) -> Vec<Cand<'a>> {
    let mut kept = Vec::with_capacity(group.len());
    let mut it = group.into_iter();
    while let Some(a) = it.next() {
        let Some(b) = it.next() else {
            kept.push(a);
            break;
        };
        if crossing_inside(&a, &b, lo, hi).is_some() {
            kept.push(a);
            kept.push(b);
            continue;
        }
        let (ea, eb) = (max_x(a.anchor, lo), max_x(b.anchor, lo));
        let start = max_x(&ea, &eb);
        if start >= *hi {
            // whoever starts at or past `hi` cannot be first
            if ea < *hi {
                kept.push(a);
            } else if eb < *hi {
                kept.push(b);
            }
            continue;
        }
        let z = QuadExt::rational_between(&start, hi);
        let a_lower = a.line.y_at(&z) < b.line.y_at(&z);
        let a_easier = a_lower == upper;
        let (easy, hard, e_easy, e_hard) = if a_easier {
            (a, b, ea, eb)
        } else {
            (b, a, eb, ea)
        };
        if e_easy <= e_hard {
            kept.push(easy);
        } else if !s.always(&e_hard, &e_easy, hard.site) {
            kept.push(hard);
        } else {
            kept.push(easy);
        }
    }
    kept
}

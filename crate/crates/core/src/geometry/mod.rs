//! Exact geometric kernel: rational points, predicates, intersections,
//! distances and bisectors. No floating point is used in any decision.

mod quadext;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use quadext::QuadExt;

pub type Rational = num_rational::BigRational;

/// An exact abscissa on the terrain. Unlimited-sight breakpoints are always
/// rational; limited-sight ones may be quadratic irrationals.
pub type ExactX = QuadExt;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q`, an integer, or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("bad decimal {s:?}"));
        }
        let n: BigInt = digits.parse().map_err(|_| format!("bad decimal {s:?}"))?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let v = Rational::new(n, d);
        return Ok(if negative { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| format!("bad number {s:?}"))?;
    Ok(Rational::from_integer(n))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point2 {
    pub x: Rational,
    pub y: Rational,
}

impl Point2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point2::new(int(x), int(y))
    }

    pub fn sub(&self, o: &Point2) -> (Rational, Rational) {
        (&self.x - &o.x, &self.y - &o.y)
    }

    pub fn dist2(&self, o: &Point2) -> Rational {
        let (dx, dy) = self.sub(o);
        &dx * &dx + &dy * &dy
    }

    pub fn mirrored(&self) -> Point2 {
        Point2::new(-&self.x, self.y.clone())
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A point whose coordinates lie in a common quadratic extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoint {
    pub x: QuadExt,
    pub y: QuadExt,
}

impl QPoint {
    pub fn dist2(&self, p: &Point2) -> QuadExt {
        let dx = self.x.add_rational(&-&p.x);
        let dy = self.y.add_rational(&-&p.y);
        dx.mul(&dx).add(&dy.mul(&dy))
    }
}

impl From<&Point2> for QPoint {
    fn from(p: &Point2) -> Self {
        QPoint {
            x: QuadExt::from_rational(p.x.clone()),
            y: QuadExt::from_rational(p.y.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ray2 {
    pub origin: Point2,
    pub dx: Rational,
    pub dy: Rational,
}

impl Ray2 {
    pub fn new(origin: Point2, dx: Rational, dy: Rational) -> Self {
        assert!(!(dx.is_zero() && dy.is_zero()), "zero ray direction");
        Ray2 { origin, dx, dy }
    }

    pub fn through(origin: &Point2, target: &Point2) -> Self {
        let (dx, dy) = target.sub(origin);
        Ray2::new(origin.clone(), dx, dy)
    }

    /// Which side of the supporting line `p` is on: +1 left (above for a
    /// rightward ray), 0 on, -1 right.
    pub fn side(&self, p: &Point2) -> i8 {
        let (px, py) = p.sub(&self.origin);
        sign(&(&self.dx * &py - &self.dy * &px))
    }

    /// Same as [`Ray2::side`] for a point in a quadratic extension.
    pub fn side_q(&self, p: &QPoint) -> i8 {
        let px = p.x.add_rational(&-&self.origin.x);
        let py = p.y.add_rational(&-&self.origin.y);
        py.scale(&self.dx).sub(&px.scale(&self.dy)).signum()
    }

    /// Height of the supporting line at abscissa `x` (non-vertical rays only).
    pub fn y_at(&self, x: &Rational) -> Rational {
        &self.origin.y + &self.dy * (x - &self.origin.x) / &self.dx
    }

    pub fn slope(&self) -> Rational {
        &self.dy / &self.dx
    }

    pub fn mirrored(&self) -> Ray2 {
        Ray2::new(self.origin.mirrored(), -&self.dx, self.dy.clone())
    }
}

/// Line `a·x + b·y = c`, scaled so the leading nonzero coefficient is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line2 {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl Line2 {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Self {
        assert!(!(a.is_zero() && b.is_zero()), "degenerate line");
        let lead = if a.is_zero() { b.clone() } else { a.clone() };
        Line2 {
            a: a / &lead,
            b: b / &lead,
            c: c / &lead,
        }
    }

    /// The line through two distinct points.
    pub fn through(p: &Point2, q: &Point2) -> Self {
        let (dx, dy) = q.sub(p);
        Line2::new(dy.clone(), -dx.clone(), &dy * &p.x - &dx * &p.y)
    }

    pub fn eval(&self, p: &Point2) -> Rational {
        &self.a * &p.x + &self.b * &p.y - &self.c
    }

    pub fn is_vertical(&self) -> bool {
        self.b.is_zero()
    }

    /// `y` on the line at `x` (non-vertical lines only).
    pub fn y_at(&self, x: &Rational) -> Rational {
        (&self.c - &self.a * x) / &self.b
    }

    /// `x` on the line at `y`, unless the line is horizontal.
    pub fn x_at(&self, y: &Rational) -> Option<Rational> {
        (!self.a.is_zero()).then(|| (&self.c - &self.b * y) / &self.a)
    }

    /// Abscissa of the intersection with another line, if they cross.
    pub fn intersect_x(&self, o: &Line2) -> Option<Rational> {
        let det = &self.a * &o.b - &o.a * &self.b;
        if det.is_zero() {
            return None;
        }
        Some((&self.c * &o.b - &o.c * &self.b) / det)
    }
}

pub(crate) fn sign(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

pub(crate) fn cross(ax: &Rational, ay: &Rational, bx: &Rational, by: &Rational) -> Rational {
    ax * by - ay * bx
}

/// Sign of the cross product `(b - a) × (c - a)`.
pub fn orient(a: &Point2, b: &Point2, c: &Point2) -> i8 {
    let (bx, by) = b.sub(a);
    let (cx, cy) = c.sub(a);
    sign(&cross(&bx, &by, &cx, &cy))
}

/// Perpendicular bisector of `p` and `q`.
pub fn bisector(p: &Point2, q: &Point2) -> Result<Line2> {
    if p == q {
        return Err(Error::DegenerateBisector);
    }
    let two = int(2);
    let a = &two * (&q.x - &p.x);
    let b = &two * (&q.y - &p.y);
    let c = (&q.x * &q.x + &q.y * &q.y) - (&p.x * &p.x + &p.y * &p.y);
    Ok(Line2::new(a, b, c))
}

/// First point of segment `a`–`b` hit by `ray`, if any.
pub fn ray_edge_intersection(ray: &Ray2, a: &Point2, b: &Point2) -> Option<Point2> {
    let (ex, ey) = b.sub(a);
    let (ox, oy) = a.sub(&ray.origin);
    let denom = cross(&ray.dx, &ray.dy, &ex, &ey);
    if denom.is_zero() {
        if !cross(&ox, &oy, &ray.dx, &ray.dy).is_zero() {
            return None;
        }
        // collinear: nearest endpoint of the overlap
        let param = |p: &Point2| {
            let (px, py) = p.sub(&ray.origin);
            &px * &ray.dx + &py * &ray.dy
        };
        let (sa, sb) = (param(a), param(b));
        let zero = Rational::zero();
        return match (sa >= zero, sb >= zero) {
            (false, false) => None,
            (true, true) => Some(if sa <= sb { a.clone() } else { b.clone() }),
            _ => Some(ray.origin.clone()),
        };
    }
    let s = cross(&ox, &oy, &ex, &ey) / &denom;
    let t = cross(&ox, &oy, &ray.dx, &ray.dy) / &denom;
    if s.is_negative() || t.is_negative() || t > Rational::one() {
        return None;
    }
    Some(Point2::new(
        &ray.origin.x + &s * &ray.dx,
        &ray.origin.y + &s * &ray.dy,
    ))
}

/// Parameters `t ∈ [0, 1]` where segment `a + t(b - a)` meets the circle,
/// in increasing order. Tangencies give a single parameter.
pub(crate) fn circle_edge_params(
    center: &Point2,
    r2: &Rational,
    a: &Point2,
    b: &Point2,
) -> Vec<QuadExt> {
    let (dx, dy) = b.sub(a);
    let (fx, fy) = a.sub(center);
    let qa = &dx * &dx + &dy * &dy;
    let qb = int(2) * (&dx * &fx + &dy * &fy);
    let qc = &fx * &fx + &fy * &fy - r2;
    let disc = &qb * &qb - int(4) * &qa * &qc;
    if disc.is_negative() {
        return Vec::new();
    }
    let two_a = int(2) * &qa;
    let base = QuadExt::from_rational(-&qb / &two_a);
    let zero = QuadExt::from_int(0);
    let one = QuadExt::from_int(1);
    let in_range = |t: &QuadExt| *t >= zero && *t <= one;
    if disc.is_zero() {
        return if in_range(&base) {
            vec![base]
        } else {
            Vec::new()
        };
    }
    let root = QuadExt::sqrt_times(Rational::one() / &two_a, &disc);
    [base.sub(&root), base.add(&root)]
        .into_iter()
        .filter(in_range)
        .collect()
}

pub fn point_on_segment(a: &Point2, b: &Point2, t: &QuadExt) -> QPoint {
    let (dx, dy) = b.sub(a);
    QPoint {
        x: t.scale(&dx).add_rational(&a.x),
        y: t.scale(&dy).add_rational(&a.y),
    }
}

/// Exact intersections of the circle of squared radius `r2` with segment
/// `a`–`b`, ordered by x (then y).
pub fn circle_edge_intersections_r2(
    center: &Point2,
    r2: &Rational,
    a: &Point2,
    b: &Point2,
) -> Vec<QPoint> {
    let mut pts: Vec<QPoint> = circle_edge_params(center, r2, a, b)
        .iter()
        .map(|t| point_on_segment(a, b, t))
        .collect();
    pts.sort_by(|p, q| p.x.cmp(&q.x).then_with(|| p.y.cmp(&q.y)));
    pts
}

/// Exact intersections of the circle of radius `r` with segment `a`–`b`.
pub fn circle_edge_intersections(
    center: &Point2,
    r: &Rational,
    a: &Point2,
    b: &Point2,
) -> Vec<QPoint> {
    assert!(r.is_positive(), "radius must be positive");
    circle_edge_intersections_r2(center, &(r * r), a, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistOrder {
    CloserToP,
    Equidistant,
    CloserToQ,
}

/// Compares the distances from `x` to `p` and to `q`.
pub fn cmp_dist(x: &Point2, p: &Point2, q: &Point2) -> DistOrder {
    match x.dist2(p).cmp(&x.dist2(q)) {
        Ordering::Less => DistOrder::CloserToP,
        Ordering::Equal => DistOrder::Equidistant,
        Ordering::Greater => DistOrder::CloserToQ,
    }
}

/// [`cmp_dist`] for a point in a quadratic extension.
pub fn cmp_dist_q(x: &QPoint, p: &Point2, q: &Point2) -> DistOrder {
    match x.dist2(p).cmp(&x.dist2(q)) {
        Ordering::Less => DistOrder::CloserToP,
        Ordering::Equal => DistOrder::Equidistant,
        Ordering::Greater => DistOrder::CloserToQ,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: (i64, i64), y: (i64, i64)) -> Point2 {
        Point2::new(rat(x.0, x.1), rat(y.0, y.1))
    }

    #[test]
    fn orient_examples() {
        let o = Point2::from_ints(0, 0);
        assert_eq!(
            orient(&o, &Point2::from_ints(1, 0), &Point2::from_ints(0, 1)),
            1
        );
        assert_eq!(
            orient(&o, &Point2::from_ints(1, 1), &Point2::from_ints(2, 2)),
            0
        );
        assert_eq!(
            orient(
                &Point2::from_ints(0, 1),
                &p((2, 1), (1, 2)),
                &Point2::from_ints(3, 0)
            ),
            -1
        );
    }

    #[test]
    fn bisector_examples() {
        let l = bisector(&Point2::from_ints(0, 0), &Point2::from_ints(10, 0)).unwrap();
        assert!(l.is_vertical());
        assert_eq!(l.c, int(5));
        // crossing with the edge y = x/40 of FIX-APEX
        let l = bisector(&Point2::from_ints(0, 0), &p((4, 1), (1, 10))).unwrap();
        let edge = Line2::new(rat(1, 40), int(-1), int(0));
        assert_eq!(l.intersect_x(&edge), Some(int(2)));
        assert!(bisector(&Point2::from_ints(1, 1), &Point2::from_ints(1, 1)).is_err());
    }

    #[test]
    fn ray_edge_examples() {
        let ray = Ray2::new(p((2, 1), (1, 2)), int(2), rat(-1, 2));
        let hit = ray_edge_intersection(&ray, &Point2::from_ints(3, 0), &Point2::from_ints(4, 2));
        assert_eq!(hit, Some(p((28, 9), (2, 9))));
        let ray = Ray2::new(Point2::from_ints(0, 0), int(1), int(0));
        assert_eq!(
            ray_edge_intersection(&ray, &Point2::from_ints(2, 1), &Point2::from_ints(3, 1)),
            None
        );
        let ray = Ray2::new(Point2::from_ints(0, 0), int(1), int(1));
        assert_eq!(
            ray_edge_intersection(&ray, &Point2::from_ints(1, 0), &Point2::from_ints(1, 2)),
            Some(Point2::from_ints(1, 1))
        );
        // collinear overlap: nearest endpoint
        let ray = Ray2::new(Point2::from_ints(0, 0), int(1), int(0));
        assert_eq!(
            ray_edge_intersection(&ray, &Point2::from_ints(5, 0), &Point2::from_ints(3, 0)),
            Some(Point2::from_ints(3, 0))
        );
    }

    #[test]
    fn circle_edge_examples() {
        let o = Point2::from_ints(0, 0);
        let hits = circle_edge_intersections(&o, &int(3), &o, &Point2::from_ints(10, 0));
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].x, QuadExt::from_int(3));
        assert_eq!(hits[0].y, QuadExt::from_int(0));

        let hits = circle_edge_intersections(
            &o,
            &int(2),
            &Point2::from_ints(1, 0),
            &Point2::from_ints(1, 3),
        );
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].x, QuadExt::from_int(1));
        let sqrt3 = QuadExt::new(int(0), int(1), BigInt::from(3));
        assert_eq!(hits[0].y, sqrt3);

        let hits = circle_edge_intersections(
            &o,
            &int(1),
            &Point2::from_ints(5, 0),
            &Point2::from_ints(6, 0),
        );
        assert!(hits.is_empty());
    }

    #[test]
    fn cmp_dist_examples() {
        let o = Point2::from_ints(0, 0);
        assert_eq!(
            cmp_dist(&p((2, 1), (1, 20)), &o, &p((4, 1), (1, 10))),
            DistOrder::Equidistant
        );
        assert_eq!(
            cmp_dist(&Point2::from_ints(1, 0), &o, &Point2::from_ints(10, 0)),
            DistOrder::CloserToP
        );
        assert_eq!(
            cmp_dist(&o, &o, &Point2::from_ints(10, 0)),
            DistOrder::CloserToP
        );
    }

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse_rational("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_rational("-2.50").unwrap(), rat(-5, 2));
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}

//! Small named instances with hand-checkable maps.

use crate::geometry::{int, rat, Point2};
use crate::terrain::{Instance, Terrain, ViewpointSet};

fn build(vertices: Vec<Point2>, viewpoints: Vec<usize>) -> Instance {
    let n = vertices.len();
    Instance::new(
        Terrain::new(vertices).expect("fixture terrain"),
        ViewpointSet::new(viewpoints, None, n).expect("fixture viewpoints"),
    )
    .expect("fixture instance")
}

/// `(0,0)`–`(10,0)`, viewpoints on both ends.
pub fn flat() -> Instance {
    build(
        vec![Point2::from_ints(0, 0), Point2::from_ints(10, 0)],
        vec![0, 1],
    )
}

/// A single peak at `(1,2)` seen from the left end.
pub fn peak() -> Instance {
    build(
        vec![
            Point2::from_ints(0, 0),
            Point2::from_ints(1, 2),
            Point2::from_ints(2, 0),
        ],
        vec![0],
    )
}

/// Two valleys; the second is partly shadowed by `(2,1/2)`.
pub fn valley() -> Instance {
    build(
        vec![
            Point2::from_ints(0, 1),
            Point2::from_ints(1, 0),
            Point2::new(int(2), rat(1, 2)),
            Point2::from_ints(3, 0),
            Point2::from_ints(4, 2),
        ],
        vec![0],
    )
}

/// A shallow apex at `(4,1/10)` carrying the second viewpoint.
pub fn apex() -> Instance {
    build(
        vec![
            Point2::from_ints(0, 0),
            Point2::new(int(4), rat(1, 10)),
            Point2::from_ints(10, 0),
        ],
        vec![0, 1],
    )
}

pub fn by_name(name: &str) -> Option<Instance> {
    match name.to_ascii_lowercase().trim_start_matches("fix-") {
        "flat" => Some(flat()),
        "peak" => Some(peak()),
        "valley" => Some(valley()),
        "apex" => Some(apex()),
        _ => None,
    }
}

pub const NAMES: [&str; 4] = ["flat", "peak", "valley", "apex"];

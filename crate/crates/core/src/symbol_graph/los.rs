//! Line-of-sight edge proposal.
//!
//! From the bounding-box center of symbol `a`, symbol `b` is visible when some
//! direction inside the angular interval subtended by `b`'s hull reaches `b`
//! before any other symbol's hull. The interval is split at every angle where
//! the nearest-surface ordering can change (hull vertices and boundary
//! crossings), so testing one ray per piece decides visibility exactly.
//!
//! Occluders exclude symbols whose bbox contains the eye point (an enclosing
//! radical never hides its own radicand) and symbols whose bbox is nested in
//! `a`'s bbox (nor its right neighbour behind that radicand). Occluder hulls are shrunk slightly about their centroid
//! so that touching boundaries do not block.

use std::f64::consts::PI;

use super::{EdgeSet, GraphError, SymbolNode};
use crate::geom::{centroid, hull_contains, hull_edges, ray_hull_hit, segment_intersection, shrink};
use crate::ink_io::Point;

const MIN_PIECE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosOptions {
    /// Relative shrink applied to occluding hulls.
    pub shrink: f64,
    /// Ignore occluders whose bbox lies inside the viewer's bbox.
    pub skip_nested: bool,
}

impl Default for LosOptions {
    fn default() -> Self {
        LosOptions { shrink: 1e-6, skip_nested: true }
    }
}

/// Ordered pairs `(a, b)` such that `b` is at least partly visible from `a`.
pub fn build_los_edges(nodes: &[SymbolNode]) -> Result<EdgeSet, GraphError> {
    build_los_edges_with(nodes, &LosOptions::default())
}

pub fn build_los_edges_with(nodes: &[SymbolNode], opts: &LosOptions) -> Result<EdgeSet, GraphError> {
    if nodes.len() >= 2 {
        let first = nodes[0].hull.first().copied();
        let collapsed = nodes
            .iter()
            .flat_map(|n| n.hull.iter())
            .all(|p| Some(*p) == first);
        if collapsed {
            return Err(GraphError::DegenerateGeometry);
        }
    }
    let blockers: Vec<Vec<Point>> = nodes
        .iter()
        .map(|n| shrink(&n.hull, 1.0 - opts.shrink))
        .collect();

    let mut edges = EdgeSet::new();
    for a in 0..nodes.len() {
        for b in 0..nodes.len() {
            if a != b && visible(nodes, &blockers, a, b, opts) {
                edges.insert((nodes[a].symbol_id.clone(), nodes[b].symbol_id.clone()));
            }
        }
    }
    Ok(edges)
}

fn wrap(mut angle: f64) -> f64 {
    while angle > PI {
        angle -= 2.0 * PI;
    }
    while angle <= -PI {
        angle += 2.0 * PI;
    }
    angle
}

fn visible(nodes: &[SymbolNode], blockers: &[Vec<Point>], a: usize, b: usize, opts: &LosOptions) -> bool {
    let eye = nodes[a].bbox.center();
    let target = &nodes[b].hull;
    if target.is_empty() {
        return false;
    }
    if hull_contains(target, &eye) {
        return true;
    }
    let c = centroid(target);
    let base = (c.y - eye.y).atan2(c.x - eye.x);
    let rel = |p: &Point| wrap((p.y - eye.y).atan2(p.x - eye.x) - base);

    let (lo, hi) = target
        .iter()
        .map(rel)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)));

    let occluders: Vec<&[Point]> = (0..nodes.len())
        .filter(|&o| o != a && o != b)
        .filter(|&o| blockers[o].len() >= 2 && !nodes[o].bbox.contains_point(&eye))
        .filter(|&o| !(opts.skip_nested && nodes[a].bbox.contains_box(&nodes[o].bbox)))
        .map(|o| blockers[o].as_slice())
        .collect();

    let clear = |theta: f64| -> bool {
        let dir = ((base + theta).cos(), (base + theta).sin());
        let t_target = if target.len() == 1 {
            eye.dist(&target[0])
        } else {
            match ray_hull_hit(&eye, dir, target) {
                Some(t) => t,
                None => return false,
            }
        };
        occluders
            .iter()
            .all(|hull| ray_hull_hit(&eye, dir, hull).map_or(true, |t| t >= t_target))
    };

    if hi - lo <= MIN_PIECE {
        return clear(lo);
    }

    let mut cuts = vec![lo, hi];
    let target_edges = hull_edges(target);
    for hull in &occluders {
        cuts.extend(hull.iter().map(rel).filter(|t| *t > lo && *t < hi));
        for (p, q) in hull_edges(hull) {
            for (r, s) in &target_edges {
                if let Some(x) = segment_intersection(&p, &q, r, s) {
                    let t = rel(&x);
                    if t > lo && t < hi {
                        cuts.push(t);
                    }
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .filter(|w| w[1] - w[0] > MIN_PIECE)
        .any(|w| clear(0.5 * (w[0] + w[1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol_graph::tests::square;

    fn pair(a: &str, b: &str) -> (String, String) {
        (a.to_string(), b.to_string())
    }

    #[test]
    fn two_nodes_see_each_other() {
        let nodes = vec![square("a", 0.0, 0.0, 1.0), square("b", 5.0, 3.0, 0.5)];
        let e = build_los_edges(&nodes).unwrap();
        assert_eq!(e.len(), 2);
        assert!(e.contains(&pair("a", "b")) && e.contains(&pair("b", "a")));
    }

    #[test]
    fn aligned_squares_occlude() {
        let nodes = vec![
            square("l", 0.0, 0.0, 4.0),
            square("m", 10.0, 0.0, 4.0),
            square("r", 20.0, 0.0, 4.0),
        ];
        let e = build_los_edges(&nodes).unwrap();
        assert!(!e.contains(&pair("l", "r")));
        assert!(!e.contains(&pair("r", "l")));
        assert_eq!(e.len(), 4);
    }

    #[test]
    fn single_node_and_degenerate() {
        assert!(build_los_edges(&[square("a", 0.0, 0.0, 1.0)]).unwrap().is_empty());
        let p = |id: &str| {
            SymbolNode::from_points(id, "x", Default::default(), &[Point::new(1.0, 1.0)]).unwrap()
        };
        assert!(matches!(build_los_edges(&[p("a"), p("b")]), Err(GraphError::DegenerateGeometry)));
    }

    #[test]
    fn partial_view_past_smaller_occluder() {
        // the middle square is shorter than the far one, so its edges peek out
        let nodes = vec![
            square("l", 0.0, 0.0, 1.0),
            square("m", 5.0, 0.0, 1.0),
            square("r", 10.0, 0.0, 4.0),
        ];
        assert!(build_los_edges(&nodes).unwrap().contains(&pair("l", "r")));
    }
}

//! Small planar geometry helpers: bounding boxes, convex hulls and ray casts.

use serde::{Deserialize, Serialize};

use crate::ink_io::Point;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BBox {
    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a Point>) -> Option<BBox> {
        let mut it = pts.into_iter();
        let p = it.next()?;
        let mut b = BBox { min_x: p.x, min_y: p.y, max_x: p.x, max_y: p.y };
        for p in it {
            b.min_x = b.min_x.min(p.x);
            b.min_y = b.min_y.min(p.y);
            b.max_x = b.max_x.max(p.x);
            b.max_y = b.max_y.max(p.y);
        }
        Some(b)
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn center(&self) -> Point {
        Point::new((self.min_x + self.max_x) * 0.5, (self.min_y + self.max_y) * 0.5)
    }

    pub fn contains_box(&self, other: &BBox) -> bool {
        other.min_x >= self.min_x
            && other.max_x <= self.max_x
            && other.min_y >= self.min_y
            && other.max_y <= self.max_y
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }
}

fn cross(o: &Point, a: &Point, b: &Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Andrew's monotone chain. Returns the hull counter-clockwise without
/// collinear vertices: one vertex for coincident input, two for collinear.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub fn centroid(poly: &[Point]) -> Point {
    let n = poly.len() as f64;
    let (sx, sy) = poly.iter().fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
    Point::new(sx / n, sy / n)
}

/// Scales a polygon about its vertex centroid.
pub fn shrink(poly: &[Point], factor: f64) -> Vec<Point> {
    if poly.is_empty() {
        return Vec::new();
    }
    let c = centroid(poly);
    poly.iter()
        .map(|p| Point::new(c.x + (p.x - c.x) * factor, c.y + (p.y - c.y) * factor))
        .collect()
}

/// Whether `p` lies inside or on a convex counter-clockwise polygon. Segments
/// and single points count as containing only the points on them.
pub fn hull_contains(poly: &[Point], p: &Point) -> bool {
    match poly.len() {
        0 => false,
        1 => poly[0] == *p,
        2 => {
            let scale = poly[0].dist(&poly[1]).max(f64::MIN_POSITIVE);
            crate::ink_io::point_segment_distance(p, &poly[0], &poly[1]) <= 1e-12 * scale
        }
        n => (0..n).all(|i| cross(&poly[i], &poly[(i + 1) % n], p) >= 0.0),
    }
}

/// Parameter `t >= 0` at which the ray `origin + t*dir` first meets the
/// segment `a`–`b`.
pub fn ray_segment_hit(origin: &Point, dir: (f64, f64), a: &Point, b: &Point) -> Option<f64> {
    let (ex, ey) = (b.x - a.x, b.y - a.y);
    let denom = dir.0 * ey - dir.1 * ex;
    let (wx, wy) = (a.x - origin.x, a.y - origin.y);
    if denom.abs() < 1e-300 {
        // parallel: only a collinear overlap counts
        if (wx * dir.1 - wy * dir.0).abs() > 1e-12 * (wx.abs() + wy.abs()).max(1.0) {
            return None;
        }
        let ta = wx * dir.0 + wy * dir.1;
        let tb = (b.x - origin.x) * dir.0 + (b.y - origin.y) * dir.1;
        return match (ta >= 0.0, tb >= 0.0) {
            (true, true) => Some(ta.min(tb)),
            (false, false) => None,
            _ => Some(0.0),
        };
    }
    let t = (wx * ey - wy * ex) / denom;
    let s = (wx * dir.1 - wy * dir.0) / denom;
    (t >= 0.0 && (0.0..=1.0).contains(&s)).then_some(t)
}

/// First intersection of a ray with a convex hull boundary; zero when the
/// origin is inside. Single-vertex hulls are never hit by a ray.
pub fn ray_hull_hit(origin: &Point, dir: (f64, f64), hull: &[Point]) -> Option<f64> {
    match hull.len() {
        0 | 1 => None,
        2 => ray_segment_hit(origin, dir, &hull[0], &hull[1]),
        n => {
            if hull_contains(hull, origin) {
                return Some(0.0);
            }
            (0..n)
                .filter_map(|i| ray_segment_hit(origin, dir, &hull[i], &hull[(i + 1) % n]))
                .min_by(f64::total_cmp)
        }
    }
}

/// Intersection point of two closed segments, if they cross at a single point.
pub fn segment_intersection(a: &Point, b: &Point, c: &Point, d: &Point) -> Option<Point> {
    let (rx, ry) = (b.x - a.x, b.y - a.y);
    let (sx, sy) = (d.x - c.x, d.y - c.y);
    let denom = rx * sy - ry * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    let (qx, qy) = (c.x - a.x, c.y - a.y);
    let t = (qx * sy - qy * sx) / denom;
    let u = (qx * ry - qy * rx) / denom;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then(|| Point::new(a.x + t * rx, a.y + t * ry))
}

/// Closed polygon edges; a segment hull yields one edge, a point none.
pub fn hull_edges(hull: &[Point]) -> Vec<(Point, Point)> {
    match hull.len() {
        0 | 1 => Vec::new(),
        2 => vec![(hull[0], hull[1])],
        n => (0..n).map(|i| (hull[i], hull[(i + 1) % n])).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_square_with_interior_point() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
            Point::new(0.5, 0.5),
            Point::new(0.5, 0.0),
        ];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert!(hull_contains(&h, &Point::new(0.5, 0.5)));
        assert!(!hull_contains(&h, &Point::new(1.5, 0.5)));
    }

    #[test]
    fn degenerate_hulls() {
        assert_eq!(convex_hull(&[Point::new(2.0, 2.0); 3]).len(), 1);
        let seg = convex_hull(&[Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)]);
        assert_eq!(seg, vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0)]);
    }

    #[test]
    fn ray_hits_nearest_side() {
        let sq = convex_hull(&[
            Point::new(2.0, -1.0),
            Point::new(4.0, -1.0),
            Point::new(4.0, 1.0),
            Point::new(2.0, 1.0),
        ]);
        let t = ray_hull_hit(&Point::new(0.0, 0.0), (1.0, 0.0), &sq).unwrap();
        assert!((t - 2.0).abs() < 1e-12);
        assert!(ray_hull_hit(&Point::new(0.0, 0.0), (-1.0, 0.0), &sq).is_none());
        assert_eq!(ray_hull_hit(&Point::new(3.0, 0.0), (1.0, 0.0), &sq), Some(0.0));
    }
}

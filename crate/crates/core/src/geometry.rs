//! Heat-power feasible operation region geometry for CHP units.
//!
//! A region is a simple polygon in the (P, H) plane. Solvers work on its
//! convex hull; validation distinguishes points inside the original
//! polygon from points only inside the hull.

use std::fmt;

/// Default geometric tolerance (MW / MWth) for membership tests.
pub const GEOM_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryError {
    TooFewVertices(usize),
    RepeatedVertex(usize),
    ZeroArea,
    SelfIntersecting(usize, usize),
    NotConvex,
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::TooFewVertices(n) => {
                write!(f, "operation region needs at least 3 vertices, got {}", n)
            }
            GeometryError::RepeatedVertex(i) => {
                write!(f, "repeated consecutive vertex at position {}", i)
            }
            GeometryError::ZeroArea => write!(f, "operation region has zero area"),
            GeometryError::SelfIntersecting(i, j) => {
                write!(f, "operation region edges {} and {} intersect", i, j)
            }
            GeometryError::NotConvex => write!(f, "operation region is not convex"),
        }
    }
}

impl std::error::Error for GeometryError {}

/// A simple polygon of attainable (power, heat) pairs, stored
/// counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ForPolygon {
    vertices: Vec<(f64, f64)>,
}

impl ForPolygon {
    /// Builds a polygon from vertices in either orientation; the stored
    /// order is normalized to counter-clockwise.
    pub fn new(mut vertices: Vec<(f64, f64)>) -> Result<ForPolygon, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            if (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12 {
                return Err(GeometryError::RepeatedVertex(i));
            }
        }
        let area = signed_area(&vertices);
        if area.abs() < 1e-9 {
            return Err(GeometryError::ZeroArea);
        }
        if area < 0.0 {
            vertices.reverse();
        }
        // Simplicity: no two non-adjacent edges may intersect.
        for i in 0..n {
            for j in (i + 1)..n {
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let (a1, a2) = (vertices[i], vertices[(i + 1) % n]);
                let (b1, b2) = (vertices[j], vertices[(j + 1) % n]);
                if segments_intersect(a1, a2, b1, b2) {
                    return Err(GeometryError::SelfIntersecting(i, j));
                }
            }
        }
        Ok(ForPolygon { vertices })
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// True iff (p, h) lies inside the polygon or within `tol` of its
    /// boundary.
    pub fn contains(&self, p: f64, h: f64, tol: f64) -> bool {
        if self.boundary_distance(p, h) <= tol {
            return true;
        }
        self.strictly_inside(p, h)
    }

    /// Shortest distance from (p, h) to the polygon boundary.
    pub fn boundary_distance(&self, p: f64, h: f64) -> f64 {
        let n = self.vertices.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            best = best.min(point_segment_distance((p, h), a, b));
        }
        best
    }

    fn strictly_inside(&self, p: f64, h: f64) -> bool {
        // Crossing-number test with the half-open rule on H.
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let (px, py) = self.vertices[i];
            let (qx, qy) = self.vertices[(i + 1) % n];
            if (py > h) != (qy > h) {
                let x_cross = px + (h - py) * (qx - px) / (qy - py);
                if p < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Minimum and maximum heat over the vertices.
    pub fn heat_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(_, h) in &self.vertices {
            lo = lo.min(h);
            hi = hi.max(h);
        }
        (lo, hi)
    }

    /// Minimum and maximum power over the vertices.
    pub fn power_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(p, _) in &self.vertices {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        (lo, hi)
    }

    /// Intersection of the horizontal line H = h with the polygon, as
    /// maximal disjoint power intervals (possibly degenerate at a vertex
    /// touch). Empty when h lies outside the heat range.
    pub fn power_interval_at_heat(&self, h: f64) -> Vec<(f64, f64)> {
        let (h_lo, h_hi) = self.heat_range();
        if h < h_lo - 1e-12 || h > h_hi + 1e-12 {
            return Vec::new();
        }
        let n = self.vertices.len();
        let mut breaks: Vec<f64> = Vec::new();
        for i in 0..n {
            let (px, py) = self.vertices[i];
            let (qx, qy) = self.vertices[(i + 1) % n];
            if (py - h).abs() <= 1e-12 {
                breaks.push(px);
            }
            if (py - h).abs() <= 1e-12 && (qy - h).abs() <= 1e-12 {
                // Horizontal edge on the line.
                breaks.push(qx);
            } else if (py < h) != (qy < h) && (py - h).abs() > 1e-12 && (qy - h).abs() > 1e-12 {
                breaks.push(px + (h - py) * (qx - px) / (qy - py));
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
        if breaks.is_empty() {
            return Vec::new();
        }
        let mut intervals: Vec<(f64, f64)> = Vec::new();
        for w in breaks.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if self.contains(mid, h, 1e-9) {
                match intervals.last_mut() {
                    Some(last) if (last.1 - w[0]).abs() <= 1e-9 => last.1 = w[1],
                    _ => intervals.push((w[0], w[1])),
                }
            }
        }
        // Isolated boundary touches become degenerate intervals.
        for &b in &breaks {
            let covered = intervals
                .iter()
                .any(|&(lo, hi)| b >= lo - 1e-9 && b <= hi + 1e-9);
            if !covered && self.contains(b, h, 1e-9) {
                intervals.push((b, b));
            }
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        intervals
    }

    /// Convex hull of the vertices plus a flag telling whether the input
    /// was already convex (hull vertex set equals the input vertex set).
    pub fn convexify(&self) -> (ForPolygon, bool) {
        let hull = convex_hull(&self.vertices);
        let was_convex = hull.len() == self.vertices.len()
            && self
                .vertices
                .iter()
                .all(|v| hull.iter().any(|u| u == v));
        (
            ForPolygon { vertices: hull },
            was_convex,
        )
    }

    /// One inequality `alpha * P + beta * H <= gamma` per edge, scaled to
    /// unit normal length. The polygon must be convex.
    pub fn halfspace_form(&self) -> Result<Vec<(f64, f64, f64)>, GeometryError> {
        if !self.is_convex() {
            return Err(GeometryError::NotConvex);
        }
        let n = self.vertices.len();
        let mut planes = Vec::with_capacity(n);
        for i in 0..n {
            let (p1, h1) = self.vertices[i];
            let (p2, h2) = self.vertices[(i + 1) % n];
            let alpha = h2 - h1;
            let beta = p1 - p2;
            let norm = (alpha * alpha + beta * beta).sqrt();
            let gamma = alpha * p1 + beta * h1;
            planes.push((alpha / norm, beta / norm, gamma / norm));
        }
        Ok(planes)
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            if cross(a, b, c) < -1e-9 {
                return false;
            }
        }
        true
    }

    /// Maximum attainable power at heat level `h` (hull slice upper end);
    /// None when the slice is empty.
    pub fn max_power_at_heat(&self, h: f64) -> Option<f64> {
        self.power_interval_at_heat(h)
            .last()
            .map(|&(_, hi)| hi)
    }

    /// Upper-power boundary planes of a convex polygon: the edges with a
    /// positive P-normal, i.e. exactly those that bound P from above at a
    /// given heat level.
    pub fn upper_power_planes(&self) -> Result<Vec<(f64, f64, f64)>, GeometryError> {
        Ok(self
            .halfspace_form()?
            .into_iter()
            .filter(|&(alpha, _, _)| alpha > 1e-9)
            .collect())
    }
}

fn signed_area(vertices: &[(f64, f64)]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        let (x1, y1) = vertices[i];
        let (x2, y2) = vertices[(i + 1) % n];
        acc += x1 * y2 - x2 * y1;
    }
    0.5 * acc
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let ab = (b.0 - a.0, b.1 - a.1);
    let ap = (p.0 - a.0, p.1 - a.1);
    let len2 = ab.0 * ab.0 + ab.1 * ab.1;
    let t = if len2 <= 0.0 {
        0.0
    } else {
        ((ap.0 * ab.0 + ap.1 * ab.1) / len2).clamp(0.0, 1.0)
    };
    let proj = (a.0 + t * ab.0, a.1 + t * ab.1);
    ((p.0 - proj.0).powi(2) + (p.1 - proj.1).powi(2)).sqrt()
}

fn segments_intersect(a1: (f64, f64), a2: (f64, f64), b1: (f64, f64), b2: (f64, f64)) -> bool {
    let d1 = cross(b1, b2, a1);
    let d2 = cross(b1, b2, a2);
    let d3 = cross(a1, a2, b1);
    let d4 = cross(a1, a2, b2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    false
}

/// Andrew's monotone chain; collinear points are dropped so hull vertices
/// are extreme points only. Returns CCW order.
fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-12
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-12
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classic_quad() -> ForPolygon {
        ForPolygon::new(vec![(98.8, 0.0), (247.0, 0.0), (215.0, 180.0), (81.0, 104.8)]).unwrap()
    }

    fn reflex_hexagon() -> ForPolygon {
        ForPolygon::new(vec![
            (44.0, 0.0),
            (125.8, 0.0),
            (125.8, 32.4),
            (110.2, 135.6),
            (40.0, 75.0),
            (44.0, 15.9),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(ForPolygon::new(vec![(0.0, 0.0), (1.0, 0.0)]).is_err());
        assert!(ForPolygon::new(vec![(0.0, 0.0), (0.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(ForPolygon::new(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]).is_err());
        // Bow tie.
        assert!(
            ForPolygon::new(vec![(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]).is_err()
        );
    }

    #[test]
    fn normalizes_clockwise_input() {
        let ccw = classic_quad();
        let cw = ForPolygon::new(vec![(81.0, 104.8), (215.0, 180.0), (247.0, 0.0), (98.8, 0.0)])
            .unwrap();
        assert_eq!(ccw.vertices(), cw.vertices());
        assert!(signed_area(cw.vertices()) > 0.0);
    }

    #[test]
    fn contains_vertices_centroid_and_rejects_far_points() {
        let poly = classic_quad();
        for &(p, h) in poly.vertices() {
            assert!(poly.contains(p, h, GEOM_TOL));
        }
        let (cp, ch) = poly
            .vertices()
            .iter()
            .fold((0.0, 0.0), |acc, v| (acc.0 + v.0 / 4.0, acc.1 + v.1 / 4.0));
        assert!(poly.contains(cp, ch, GEOM_TOL));
        assert!(!poly.contains(247.0 + 1000.0, 0.0, GEOM_TOL));
    }

    #[test]
    fn heat_range_examples() {
        let rect =
            ForPolygon::new(vec![(10.0, 0.0), (50.0, 0.0), (50.0, 40.0), (10.0, 40.0)]).unwrap();
        assert_eq!(rect.heat_range(), (0.0, 40.0));
        assert_eq!(classic_quad().heat_range(), (0.0, 180.0));
    }

    #[test]
    fn power_intervals() {
        let rect =
            ForPolygon::new(vec![(10.0, 0.0), (50.0, 0.0), (50.0, 40.0), (10.0, 40.0)]).unwrap();
        let at20 = rect.power_interval_at_heat(20.0);
        assert_eq!(at20.len(), 1);
        assert!((at20[0].0 - 10.0).abs() < 1e-9 && (at20[0].1 - 50.0).abs() < 1e-9);

        // Bottom edge of the literature quadrilateral.
        let at0 = classic_quad().power_interval_at_heat(0.0);
        assert_eq!(at0.len(), 1);
        assert!((at0[0].0 - 98.8).abs() < 1e-9 && (at0[0].1 - 247.0).abs() < 1e-9);

        assert!(classic_quad().power_interval_at_heat(180.5).is_empty());

        // Top vertex: degenerate interval.
        let top = classic_quad().power_interval_at_heat(180.0);
        assert_eq!(top.len(), 1);
        assert!((top[0].0 - 215.0).abs() < 1e-9);
        assert!((top[0].1 - 215.0).abs() < 1e-9);
    }

    #[test]
    fn convexify_examples() {
        let quad = classic_quad();
        let (hull, was_convex) = quad.convexify();
        assert!(was_convex);
        assert_eq!(hull.vertices().len(), 4);

        let hexagon = reflex_hexagon();
        let (hull, was_convex) = hexagon.convexify();
        assert!(!was_convex);
        assert_eq!(hull.vertices().len(), 5);
        assert!(!hull.vertices().contains(&(44.0, 15.9)));

        let tri = ForPolygon::new(vec![(0.0, 0.0), (2.0, 0.0), (1.0, 1.0)]).unwrap();
        let (hull, was_convex) = tri.convexify();
        assert!(was_convex);
        assert_eq!(hull.vertices().len(), 3);
    }

    #[test]
    fn convexify_is_idempotent() {
        for poly in [classic_quad(), reflex_hexagon()] {
            let (hull1, _) = poly.convexify();
            let (hull2, again) = hull1.convexify();
            assert!(again);
            assert_eq!(hull1.vertices().len(), hull2.vertices().len());
        }
    }

    #[test]
    fn halfspace_form_unit_square() {
        let square =
            ForPolygon::new(vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap();
        let planes = square.halfspace_form().unwrap();
        assert_eq!(planes.len(), 4);
        // Every vertex satisfies every inequality with tiny residual.
        for &(p, h) in square.vertices() {
            for &(a, b, g) in &planes {
                assert!(a * p + b * h <= g + 1e-9);
            }
        }
        // Interior strictly satisfies, exterior violates at least one.
        assert!(planes.iter().all(|&(a, b, g)| a * 0.5 + b * 0.5 < g));
        assert!(planes.iter().any(|&(a, b, g)| a * 2.0 + b * 0.5 > g));
    }

    #[test]
    fn halfspace_rejects_nonconvex() {
        assert!(reflex_hexagon().halfspace_form().is_err());
    }

    #[test]
    fn halfspace_and_contains_agree_on_random_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for poly in [classic_quad(), reflex_hexagon().convexify().0] {
            let planes = poly.halfspace_form().unwrap();
            let (p_lo, p_hi) = poly.power_range();
            let (h_lo, h_hi) = poly.heat_range();
            for _ in 0..10_000 {
                let p = rng.gen_range((p_lo - 20.0)..(p_hi + 20.0));
                let h = rng.gen_range((h_lo - 20.0)..(h_hi + 20.0));
                let by_planes = planes.iter().all(|&(a, b, g)| a * p + b * h <= g + 1e-9);
                let by_contains = poly.contains(p, h, 1e-9);
                if by_planes != by_contains {
                    // Disagreement is only tolerable within a hair of the
                    // boundary.
                    assert!(
                        poly.boundary_distance(p, h) <= 1e-6,
                        "disagreement at ({}, {}) distance {}",
                        p,
                        h,
                        poly.boundary_distance(p, h)
                    );
                }
            }
        }
    }

    #[test]
    fn hull_contains_original_polygon_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let poly = reflex_hexagon();
        let (hull, _) = poly.convexify();
        let (p_lo, p_hi) = poly.power_range();
        let (h_lo, h_hi) = poly.heat_range();
        for _ in 0..5_000 {
            let p = rng.gen_range(p_lo..p_hi);
            let h = rng.gen_range(h_lo..h_hi);
            if poly.contains(p, h, 0.0) {
                assert!(hull.contains(p, h, 1e-9));
            }
        }
    }

    #[test]
    fn convex_slices_are_single_intervals() {
        let poly = classic_quad();
        let (h_lo, h_hi) = poly.heat_range();
        for k in 1..100 {
            let h = h_lo + (h_hi - h_lo) * (k as f64) / 100.0;
            let slice = poly.power_interval_at_heat(h);
            assert_eq!(slice.len(), 1, "at heat {}", h);
            assert!(slice[0].0 < slice[0].1);
        }
    }

    #[test]
    fn degenerate_flat_polygon_heat_range() {
        // All H equal is rejected (zero area), so the flat case is a thin
        // sliver: heat range collapses to essentially one value.
        let sliver = ForPolygon::new(vec![(0.0, 10.0), (5.0, 10.0), (2.5, 10.001)]).unwrap();
        let (lo, hi) = sliver.heat_range();
        assert!((lo - 10.0).abs() < 1e-9 && (hi - 10.001).abs() < 1e-9);
    }

    #[test]
    fn upper_power_planes_bound_max_power() {
        let poly = classic_quad();
        let planes = poly.upper_power_planes().unwrap();
        for k in 0..=20 {
            let h = 180.0 * (k as f64) / 20.0;
            if let Some(pmax) = poly.max_power_at_heat(h) {
                let bound = planes
                    .iter()
                    .map(|&(a, b, g)| (g - b * h) / a)
                    .fold(f64::INFINITY, f64::min);
                assert!((bound - pmax).abs() < 1e-6, "h {}: {} vs {}", h, bound, pmax);
            }
        }
    }
}

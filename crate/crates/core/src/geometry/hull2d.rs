//! Exact planar convex hull maintained under point insertion.
//!
//! Vertices are kept counterclockwise, starting from the lexicographically
//! smallest point, with collinear middle points dropped. A point is tested
//! against the current polygon first (an inscribed-disk check, then the edge
//! orientations); only points outside trigger a monotone-chain rebuild over
//! the current vertices plus the new point.

pub type Point2 = [f64; 2];

#[inline]
fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Hull2d {
    vertices: Vec<Point2>,
    // Radius of an origin-centred disk inside the polygon; 0 when unknown.
    inradius: f64,
}

impl Hull2d {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_points<I: IntoIterator<Item = Point2>>(points: I) -> Self {
        let mut hull = Self::new();
        for p in points {
            hull.insert(p);
        }
        hull
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn heap_bytes(&self) -> usize {
        self.vertices.capacity() * std::mem::size_of::<Point2>()
    }

    /// Whether `p` lies in the closed hull. Always false for hulls with fewer
    /// than three vertices.
    pub fn contains(&self, p: Point2) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        (0..n).all(|i| cross(self.vertices[i], self.vertices[(i + 1) % n], p) >= 0.0)
    }

    pub fn insert(&mut self, p: Point2) {
        if self.vertices.len() >= 3 {
            let r2 = p[0] * p[0] + p[1] * p[1];
            if r2 < self.inradius * self.inradius * (1.0 - 1e-9) || self.contains(p) {
                return;
            }
        }
        let mut pts = Vec::with_capacity(self.vertices.len() + 1);
        pts.extend_from_slice(&self.vertices);
        pts.push(p);
        self.vertices = monotone_chain(pts);
        self.inradius = self.origin_inradius();
    }

    fn origin_inradius(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let mut r = f64::INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            let dist = cross(a, b, [0.0, 0.0]) / len;
            if !(dist > 0.0) {
                return 0.0;
            }
            r = r.min(dist);
        }
        r
    }
}

/// Andrew's monotone chain; returns the strictly convex hull counterclockwise.
pub fn monotone_chain(mut pts: Vec<Point2>) -> Vec<Point2> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(pts.len() + 1);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Largest distance between two vertices.
pub fn diameter2d(vertices: &[Point2]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            best = best.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    best
}

/// Polygon area by the shoelace formula (absolute value).
pub fn area2d(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    0.5 * twice.abs()
}

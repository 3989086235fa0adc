//! Domains of the benchmark problems: balls, boxes, annuli and polygons
//! (L-shape, regular hexagon), with exact distance to the boundary.

use std::fmt::Debug;

use crate::error::{domain, Result};
use crate::sampling::RngStream;

/// An open, bounded domain `Ω ⊂ R^n`.
pub trait Domain: Send + Sync + Debug {
    fn dim(&self) -> usize;

    /// Open-set membership; boundary points are outside.
    fn contains(&self, x: &[f64]) -> bool;

    /// Euclidean distance from `x` to `∂Ω`, valid for any `x`.
    fn boundary_distance(&self, x: &[f64]) -> f64;

    /// A nearest point of `∂Ω`; ties go to the lexicographically smallest.
    fn project_boundary(&self, x: &[f64]) -> Vec<f64>;

    /// Axis-aligned box `(lo, hi)` containing the closure of `Ω`.
    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>);
}

/// Distance to the boundary for an interior point.
pub fn dist_boundary(dom: &dyn Domain, x: &[f64]) -> Result<f64> {
    if x.len() != dom.dim() {
        return domain(format!(
            "point has dimension {}, domain has {}",
            x.len(),
            dom.dim()
        ));
    }
    if !dom.contains(x) {
        return domain(format!("point {x:?} is not inside the domain"));
    }
    Ok(dom.boundary_distance(x))
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (p, q) in a.iter().zip(b) {
        if p != q {
            return p < q;
        }
    }
    false
}

/// Picks the nearest candidate, breaking exact ties lexicographically.
fn nearest(x: &[f64], candidates: Vec<Vec<f64>>) -> Vec<f64> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for c in candidates {
        let d: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
        best = match best {
            None => Some((d, c)),
            Some((bd, bc)) => {
                if d < bd || (d == bd && lex_less(&c, &bc)) {
                    Some((d, c))
                } else {
                    Some((bd, bc))
                }
            }
        };
    }
    best.expect("at least one candidate").1
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Point on the sphere `|y - c| = radius` along the ray from `c` through `x`;
/// at the center every direction is a tie and `c - radius e₁` is returned.
/// The result is nudged by a few ulps so that it sits on the requested side
/// (`outside`: `|y - c| >= radius`, else `<= radius`) after rounding.
fn radial_point(center: &[f64], radius: f64, x: &[f64], outside: bool) -> Vec<f64> {
    let mut rel: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
    let d = norm(&rel);
    if d == 0.0 {
        rel.iter_mut().for_each(|v| *v = 0.0);
        rel[0] = -radius;
    } else {
        rel.iter_mut().for_each(|v| *v *= radius / d);
    }
    let step = if outside { 1.0 + 2.0 * f64::EPSILON } else { 1.0 - 2.0 * f64::EPSILON };
    for _ in 0..16 {
        let p: Vec<f64> = center.iter().zip(&rel).map(|(c, v)| c + v).collect();
        let q: f64 = p.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
        if (outside && q >= radius) || (!outside && q <= radius) {
            return p;
        }
        rel.iter_mut().for_each(|v| *v *= step);
    }
    center.iter().zip(&rel).map(|(c, v)| c + v).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallDomain {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl BallDomain {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || !(radius > 0.0 && radius.is_finite()) {
            return domain("ball needs a nonempty center and a positive radius");
        }
        Ok(Self { center, radius })
    }

    pub fn unit(n: usize) -> Self {
        Self { center: vec![0.0; n], radius: 1.0 }
    }

    fn rel_norm(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt()
    }
}

impl Domain for BallDomain {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.rel_norm(x) < self.radius
    }

    fn boundary_distance(&self, x: &[f64]) -> f64 {
        (self.radius - self.rel_norm(x)).abs()
    }

    fn project_boundary(&self, x: &[f64]) -> Vec<f64> {
        radial_point(&self.center, self.radius, x, true)
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.center.iter().map(|c| c - self.radius).collect(),
            self.center.iter().map(|c| c + self.radius).collect(),
        )
    }
}

/// Axis-aligned box `Π (lo_i, hi_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return domain("box bounds must be nonempty and of equal length");
        }
        if lo.iter().zip(&hi).any(|(a, b)| !a.is_finite() || !b.is_finite() || a >= b) {
            return domain("box needs lo < hi on every axis");
        }
        Ok(Self { lo, hi })
    }

    /// The stripe `[-5, 5] × [-0.5, 0.5]`.
    pub fn stripe() -> Self {
        Self { lo: vec![-5.0, -0.5], hi: vec![5.0, 0.5] }
    }
}

impl Domain for BoxDomain {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *a < *v && *v < *b)
    }

    fn boundary_distance(&self, x: &[f64]) -> f64 {
        if self.contains(x) {
            return x
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .map(|(v, (a, b))| (v - a).min(b - v))
                .fold(f64::INFINITY, f64::min);
        }
        // outside or on the boundary: distance to the closed box
        let d2: f64 = x
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(v, (a, b))| {
                let e = (a - v).max(v - b).max(0.0);
                e * e
            })
            .sum();
        d2.sqrt()
    }

    fn project_boundary(&self, x: &[f64]) -> Vec<f64> {
        if !self.contains(x) {
            return x
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .map(|(v, (a, b))| v.clamp(*a, *b))
                .collect();
        }
        let mut cands = Vec::with_capacity(2 * x.len());
        for i in 0..x.len() {
            for face in [self.lo[i], self.hi[i]] {
                let mut p = x.to_vec();
                p[i] = face;
                cands.push(p);
            }
        }
        nearest(x, cands)
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        (self.lo.clone(), self.hi.clone())
    }
}

/// Spherical shell `inner < |x - c| < outer`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusDomain {
    pub center: Vec<f64>,
    pub inner: f64,
    pub outer: f64,
}

impl AnnulusDomain {
    pub fn new(center: Vec<f64>, inner: f64, outer: f64) -> Result<Self> {
        if center.is_empty() || !(inner > 0.0 && inner < outer && outer.is_finite()) {
            return domain("annulus needs 0 < inner < outer");
        }
        Ok(Self { center, inner, outer })
    }

    /// `0.3 < |x|² < 1` in the plane.
    pub fn standard() -> Self {
        Self { center: vec![0.0, 0.0], inner: 0.3f64.sqrt(), outer: 1.0 }
    }

    fn rel_norm(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt()
    }
}

impl Domain for AnnulusDomain {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        let d = self.rel_norm(x);
        self.inner < d && d < self.outer
    }

    fn boundary_distance(&self, x: &[f64]) -> f64 {
        let d = self.rel_norm(x);
        (d - self.inner).abs().min((self.outer - d).abs())
    }

    fn project_boundary(&self, x: &[f64]) -> Vec<f64> {
        nearest(
            x,
            vec![
                radial_point(&self.center, self.inner, x, false),
                radial_point(&self.center, self.outer, x, true),
            ],
        )
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.center.iter().map(|c| c - self.outer).collect(),
            self.center.iter().map(|c| c + self.outer).collect(),
        )
    }
}

/// Points this close to an edge are on the boundary; absorbs the rounding of
/// projected points.
const EDGE_TOL: f64 = 1e-14;

/// Simple polygon in the plane given by its vertices in order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonDomain {
    pub vertices: Vec<[f64; 2]>,
}

impl PolygonDomain {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return domain("polygon needs at least three vertices");
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return domain("polygon vertices must be finite");
        }
        Ok(Self { vertices })
    }

    /// `[-1, 1]² \ (0, 1]²`.
    pub fn l_shape() -> Self {
        Self {
            vertices: vec![
                [-1.0, -1.0],
                [1.0, -1.0],
                [1.0, 0.0],
                [0.0, 0.0],
                [0.0, 1.0],
                [-1.0, 1.0],
            ],
        }
    }

    /// Regular hexagon of circumradius 1 centered at the origin, with two
    /// horizontal edges (vertices at angles 0°, 60°, ..., 300°).
    pub fn regular_hexagon() -> Self {
        let vertices = (0..6)
            .map(|k| {
                let t = std::f64::consts::FRAC_PI_3 * k as f64;
                [t.cos(), t.sin()]
            })
            .collect();
        Self { vertices }
    }

    fn edges(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let m = self.vertices.len();
        (0..m).map(move |i| (self.vertices[i], self.vertices[(i + 1) % m]))
    }

    fn closest_on_edge(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len2 = dx * dx + dy * dy;
        let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0);
        if t == 0.0 {
            a
        } else if t == 1.0 {
            b
        } else {
            [a[0] + t * dx, a[1] + t * dy]
        }
    }

    fn edge_dist2(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
        let q = Self::closest_on_edge(p, a, b);
        (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
    }

    fn crossing_inside(&self, p: [f64; 2]) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

impl Domain for PolygonDomain {
    fn dim(&self) -> usize {
        2
    }

    fn contains(&self, x: &[f64]) -> bool {
        let p = [x[0], x[1]];
        self.crossing_inside(p) && self.boundary_distance(x) > EDGE_TOL
    }

    fn boundary_distance(&self, x: &[f64]) -> f64 {
        let p = [x[0], x[1]];
        self.edges()
            .map(|(a, b)| Self::edge_dist2(p, a, b))
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }

    fn project_boundary(&self, x: &[f64]) -> Vec<f64> {
        let p = [x[0], x[1]];
        let cands = self.edges().map(|(a, b)| Self::closest_on_edge(p, a, b).to_vec()).collect();
        nearest(x, cands)
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; 2];
        let mut hi = vec![f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for i in 0..2 {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }
}

/// Uniform points of `Ω` at distance at least `min_dist` from `∂Ω`, by
/// rejection from the bounding box.
pub fn random_interior_points(
    domain: &dyn Domain,
    count: usize,
    seed: u64,
    min_dist: f64,
) -> Result<Vec<Vec<f64>>> {
    let (lo, hi) = domain.bounding_box();
    let mut rng = RngStream::new(seed, u64::MAX);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0usize;
    while out.len() < count {
        tries += 1;
        if tries > 1000 * count.max(1000) {
            return Err(crate::Error::Sampling(format!(
                "could not place {count} points at distance {min_dist} from the boundary"
            )));
        }
        let x: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| a + (b - a) * rng.open01()).collect();
        if domain.contains(&x) && domain.boundary_distance(&x) >= min_dist {
            out.push(x);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_domains() -> Vec<Box<dyn Domain>> {
        vec![
            Box::new(BallDomain::unit(2)),
            Box::new(BallDomain::new(vec![0.5, -1.0, 2.0], 0.7).unwrap()),
            Box::new(BoxDomain::stripe()),
            Box::new(BoxDomain::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap()),
            Box::new(AnnulusDomain::standard()),
            Box::new(PolygonDomain::l_shape()),
            Box::new(PolygonDomain::regular_hexagon()),
        ]
    }

    #[test]
    fn distance_examples() {
        let ball = BallDomain::unit(2);
        assert_eq!(dist_boundary(&ball, &[0.0, 0.0]).unwrap(), 1.0);
        let ann = AnnulusDomain::standard();
        let d = dist_boundary(&ann, &[0.7, 0.0]).unwrap();
        assert!((d - (0.7 - 0.3f64.sqrt())).abs() < 1e-15);
        assert!((d - 0.152_277).abs() < 1e-6);
        let l = PolygonDomain::l_shape();
        assert!((dist_boundary(&l, &[-0.5, -0.5]).unwrap() - 0.5).abs() < 1e-15);
        assert!((dist_boundary(&l, &[-0.1, 0.1]).unwrap() - 0.1).abs() < 1e-15);
        assert!(dist_boundary(&l, &[0.5, 0.5]).is_err());
        assert!(dist_boundary(&ball, &[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn membership_examples() {
        let l = PolygonDomain::l_shape();
        assert!(!l.contains(&[0.5, 0.5]));
        assert!(l.contains(&[-0.5, 0.5]));
        assert!(!l.contains(&[0.0, 0.5]));
        assert!(!l.contains(&[-1.0, 0.0]));
        let h = PolygonDomain::regular_hexagon();
        assert!(h.contains(&[0.0, 0.0]));
        assert!(!h.contains(&[1.0, 1.0]));
        assert!(h.contains(&[0.0, 0.86]));
        assert!(!h.contains(&[0.0, 0.87]));
        let s = BoxDomain::stripe();
        assert!(s.contains(&[4.9, 0.49]));
        assert!(!s.contains(&[5.1, 0.0]));
        assert!(!s.contains(&[5.0, 0.0]));
    }

    #[test]
    fn projection_examples() {
        let ball = BallDomain::unit(2);
        let p = ball.project_boundary(&[0.999, 0.0]);
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15);
        assert_eq!(ball.project_boundary(&[0.0, 0.0]), vec![-1.0, 0.0]);
        let bx = BoxDomain::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(bx.project_boundary(&[0.95, 0.2]), vec![1.0, 0.2]);
        assert_eq!(bx.project_boundary(&[0.0, 0.0]), vec![-1.0, 0.0]);
        let ann = AnnulusDomain::standard();
        let p = ann.project_boundary(&[0.56, 0.0]);
        assert!((p[0] - 0.3f64.sqrt()).abs() < 1e-15 && p[1] == 0.0);
        let l = PolygonDomain::l_shape();
        assert_eq!(l.project_boundary(&[-0.1, -0.1]), vec![0.0, 0.0]);
        // equidistant from two edges: lexicographic tie-break
        assert_eq!(l.project_boundary(&[-0.5, -0.5]), vec![-1.0, -0.5]);
    }

    #[test]
    fn projection_matches_distance_and_leaves_domain() {
        for d in all_domains() {
            let pts = random_interior_points(d.as_ref(), 10_000, 17, 0.0).unwrap();
            for x in &pts {
                let p = d.project_boundary(x);
                let gap: f64 = x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                assert!((gap - d.boundary_distance(x)).abs() < 1e-9, "{d:?} {x:?}");
                assert!(!d.contains(&p), "{d:?} {p:?}");
            }
        }
    }

    #[test]
    fn inscribed_ball_avoids_exterior() {
        let mut rng = RngStream::new(23, 0);
        for d in all_domains() {
            let pts = random_interior_points(d.as_ref(), 200, 29, 0.0).unwrap();
            for x in &pts {
                let r = d.boundary_distance(x);
                for _ in 0..50 {
                    let u = crate::sampling::unit_direction(d.dim(), &mut rng);
                    let s = r * rng.open01().powf(1.0 / d.dim() as f64) * (1.0 - 1e-12);
                    let y: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + s * b).collect();
                    assert!(d.contains(&y), "{d:?} x={x:?} y={y:?}");
                }
            }
        }
    }

    #[test]
    fn random_points_respect_margin() {
        let l = PolygonDomain::l_shape();
        let pts = random_interior_points(&l, 500, 1, 0.05).unwrap();
        assert!(pts.iter().all(|x| l.contains(x) && l.boundary_distance(x) >= 0.05));
        assert_eq!(pts, random_interior_points(&l, 500, 1, 0.05).unwrap());
    }

    proptest! {
        #[test]
        fn distance_is_one_lipschitz(
            ax in -0.99f64..0.99, ay in -0.99f64..0.99,
            bx in -0.99f64..0.99, by in -0.99f64..0.99,
        ) {
            for d in all_domains().iter().filter(|d| d.dim() == 2) {
                let a = [ax, ay];
                let b = [bx, by];
                let gap = ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt();
                let da = d.boundary_distance(&a);
                let db = d.boundary_distance(&b);
                prop_assert!((da - db).abs() <= gap + 1e-12);
            }
        }
    }
}

//! Triangle geometry: areas, the diagonal area-preserving map, and the
//! surface of unit-area triangles with its two branches over `ab ≥ 2`.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack under which a triangle inequality counts as an equality.
pub const DEGENERATE_TOL: f64 = 1e-15;

/// `|ab − 2|` below this is treated as lying on the hyperbola `ab = 2`.
const HYPERBOLA_SLACK: f64 = 8.0 * f64::EPSILON;

/// `3^{1/4}`.
pub const FOURTH_ROOT_3: f64 = 1.316_074_012_952_492_5;

/// Side of the equilateral triangle of unit area, `2·3^{-1/4}`.
pub const EQUILATERAL_SIDE: f64 = 2.0 / FOURTH_ROOT_3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Triangle {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn area(&self) -> Result<f64> {
        heron_area(self)
    }

    pub fn is_strict(&self) -> bool {
        let Triangle { a, b, c } = *self;
        a > 0.0 && b > 0.0 && c > 0.0 && a + b > c && b + c > a && a + c > b
    }
}

/// Heron's formula in Kahan's cancellation-free arrangement.
///
/// Sides within [`DEGENERATE_TOL`] of violating a triangle inequality give
/// area 0; anything further out is [`Error::NotATriangle`].
pub fn heron_area(t: &Triangle) -> Result<f64> {
    for s in [t.a, t.b, t.c] {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Domain {
                what: "triangle sides must be positive and finite",
                value: s,
            });
        }
    }
    let mut s = [t.a, t.b, t.c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [x, y, z] = s;
    let slack = z - (x - y);
    if slack < -DEGENERATE_TOL * x {
        return Err(Error::NotATriangle { a: t.a, b: t.b, c: t.c });
    }
    if slack <= DEGENERATE_TOL * x {
        return Ok(0.0);
    }
    Ok(0.25 * ((x + (y + z)) * slack * (z + (x - y)) * (x + (y - z))).sqrt())
}

/// `½ab·sin(γ)` with `γ` the angle between sides `a` and `b`.
pub fn area_from_angle(a: f64, b: f64, gamma: f64) -> f64 {
    0.5 * a * b * gamma.sin()
}

/// `16 − (a+b+c)(−a+b+c)(a−b+c)(a+b−c)`; zero exactly on the unit-area surface.
pub fn quartic_residual(a: f64, b: f64, c: f64) -> f64 {
    16.0 - (a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c)
}

/// The map `(x, y) ↦ (r·x, y/r)`, i.e. `diag(r, 1/r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleMatrix {
    r: f64,
}

impl ScaleMatrix {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain {
                what: "scale r must be positive",
                value: r,
            });
        }
        Ok(Self { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.r, 0.0], [0.0, 1.0 / self.r]]
    }

    pub fn determinant(&self) -> f64 {
        let m = self.matrix();
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (self.r * x, y / self.r)
    }
}

pub fn mr_transform(m: &ScaleMatrix, point: (f64, f64)) -> (f64, f64) {
    m.apply(point)
}

/// Vertices `A, B, C` of the unit-area equilateral triangle centred at the
/// origin with `AB` horizontal.
pub fn equilateral_seed() -> [(f64, f64); 3] {
    let h = 1.0 / FOURTH_ROOT_3;
    let v = h / SQRT_3;
    [(h, -v), (-h, -v), (0.0, 2.0 * v)]
}

const SQRT_3: f64 = crate::lognormal::SQRT_3;

/// Shoelace area of a vertex triangle (unsigned).
pub fn vertex_area(p: &[(f64, f64); 3]) -> f64 {
    let [(x1, y1), (x2, y2), (x3, y3)] = *p;
    0.5 * ((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)).abs()
}

/// Sides `a = |C−B|`, `b = |C−A|`, `c = |B−A|`.
pub fn triangle_from_vertices(p: &[(f64, f64); 3]) -> Triangle {
    let d = |u: (f64, f64), v: (f64, f64)| (u.0 - v.0).hypot(u.1 - v.1);
    let [a_, b_, c_] = *p;
    Triangle::new(d(c_, b_), d(c_, a_), d(b_, a_))
}

/// Sides of the image of the equilateral seed under `diag(r, 1/r)`:
/// `a = b = √(r²/√3 + √3/r²)`, `c = 2r/3^{1/4}`.
pub fn isosceles_sides(r: f64) -> Triangle {
    let r2 = r * r;
    let a = (r2 / SQRT_3 + SQRT_3 / r2).sqrt();
    Triangle::new(a, a, 2.0 * r / FOURTH_ROOT_3)
}

/// Area error below which a triangle is left untouched by the polishers.
const POLISH_SKIP: f64 = 1e-13;

/// Largest relative side change a polisher may make.
const POLISH_LIMIT: f64 = 1e-3;

fn unit_area_error(t: &Triangle) -> f64 {
    heron_area(t).map_or(f64::INFINITY, |x| (x - 1.0).abs())
}

fn ulp(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1) - x
}

/// Nudge a nearly flat, nominally unit-area triangle so that its
/// double-precision sides enclose area 1.
///
/// Near-flat triangles are ill-conditioned: rounding one side by an ulp can
/// move the area by many orders of magnitude more than `ε`. With `p ≤ q ≤ z`, the
/// difference `s = z − q` is held on its floating-point grid and `q` is
/// solved from `(2q + s)² − p² = 16/(p² − s²)`, along which the area is well
/// conditioned. Sides move by at most [`POLISH_LIMIT`] relative; the input
/// is returned when no candidate improves on it.
pub fn polish_unit_area(t: &Triangle) -> Triangle {
    let before = unit_area_error(t);
    if before <= POLISH_SKIP {
        return *t;
    }
    let sides = [t.a, t.b, t.c];
    let mut idx = [0, 1, 2];
    idx.sort_by(|&i, &j| sides[i].total_cmp(&sides[j]));
    let (p, q, z) = (sides[idx[0]], sides[idx[1]], sides[idx[2]]);
    if !(z <= 2.0 * q) {
        return *t;
    }
    let s0 = z - q;
    let step = ulp(q);
    let mut best = (before, *t);
    for k in -4i32..=4 {
        let s = s0 + f64::from(k) * step;
        if !(s >= 0.0 && s < p) {
            continue;
        }
        let q0 = ((p * p + 16.0 / ((p + s) * (p - s))).sqrt() - s) / 2.0;
        // when z crosses into the next binade only every other q keeps z exact
        let Some(q1) = [q0, q0.next_up(), q0.next_down()]
            .into_iter()
            .find(|&v| (v + s) - v == s)
        else {
            continue;
        };
        let z1 = q1 + s;
        if (q1 - q).abs() > POLISH_LIMIT * q || (z1 - z).abs() > POLISH_LIMIT * z {
            continue;
        }
        let mut out = sides;
        out[idx[1]] = q1;
        out[idx[2]] = z1;
        let cand = Triangle::new(out[0], out[1], out[2]);
        let err = unit_area_error(&cand);
        if err < best.0 {
            best = (err, cand);
        }
    }
    best.1
}

/// [`polish_unit_area`] for isosceles triangles `(x, x, 2y)`, keeping the two
/// equal sides equal.
///
/// `d = x − y` is held on its grid and `y` solved from `y²·d·(2y + d) = 1`.
pub fn polish_isosceles(t: &Triangle) -> Triangle {
    let before = unit_area_error(t);
    if before <= POLISH_SKIP || t.a != t.b {
        return *t;
    }
    let (x, y) = (t.a, 0.5 * t.c);
    if !(y <= x && x <= 2.0 * y) {
        return *t;
    }
    let d0 = x - y;
    let step = ulp(y);
    let mut best = (before, *t);
    for k in -4i32..=4 {
        let d = d0 + f64::from(k) * step;
        if !(d > 0.0) {
            continue;
        }
        let mut y1 = y;
        for _ in 0..6 {
            let g = y1 * y1 * d * (2.0 * y1 + d) - 1.0;
            let dg = d * y1 * (6.0 * y1 + 2.0 * d);
            y1 -= g / dg;
        }
        let Some(y1) = [y1, y1.next_up(), y1.next_down()]
            .into_iter()
            .find(|&v| v.is_finite() && (v + d) - v == d)
        else {
            continue;
        };
        let x1 = y1 + d;
        if (y1 - y).abs() > POLISH_LIMIT * y {
            continue;
        }
        let cand = Triangle::new(x1, x1, 2.0 * y1);
        let err = unit_area_error(&cand);
        if err < best.0 {
            best = (err, cand);
        }
    }
    best.1
}

/// Sign in `c = √(a² + b² ± 2√(a²b² − 4))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchChoice {
    Minus,
    Plus,
}

impl BranchChoice {
    pub fn sign(self) -> f64 {
        match self {
            BranchChoice::Minus => -1.0,
            BranchChoice::Plus => 1.0,
        }
    }
}

fn on_hyperbola(ab: f64) -> bool {
    (ab - 2.0).abs() <= HYPERBOLA_SLACK
}

/// Both third sides `(c₋, c₊)` that make `(a, b, c)` a unit-area triangle.
///
/// `c₋` is computed as `√((a²−b²)² + 16)/c₊`, which is the same quantity
/// without the cancellation in `a² + b² − 2√(a²b² − 4)`. On the hyperbola
/// (to within a few ulps) both equal `√(a² + b²)`.
pub fn c_pair(a: f64, b: f64) -> Result<(f64, f64)> {
    for s in [a, b] {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Domain {
                what: "sides must be positive and finite",
                value: s,
            });
        }
    }
    let ab = a * b;
    if on_hyperbola(ab) {
        let c = a.hypot(b);
        return Ok((c, c));
    }
    if ab < 2.0 {
        return Err(Error::BelowHyperbola { a, b });
    }
    let d = ((ab - 2.0) * (ab + 2.0)).sqrt();
    let plus = (a * a + b * b + 2.0 * d).sqrt();
    let diff = (a - b) * (a + b);
    let minus = (diff * diff + 16.0).sqrt() / plus;
    Ok((minus, plus))
}

pub fn c_from_ab(a: f64, b: f64, branch: BranchChoice) -> Result<f64> {
    let (minus, plus) = c_pair(a, b)?;
    Ok(match branch {
        BranchChoice::Minus => minus,
        BranchChoice::Plus => plus,
    })
}

/// `(ã, b̃, c̃)` after the 45° rotation in the `(a, c)` plane:
/// `ã = (a + c)/√2`, `b̃ = b`, `c̃ = (c − a)/√2`.
pub fn rotate(t: &Triangle) -> (f64, f64, f64) {
    ((t.a + t.c) / SQRT_2, t.b, (t.c - t.a) / SQRT_2)
}

/// Whether `(ã, b̃)` lies in the projection of the unit-area surface onto
/// `c̃ = 0`, i.e. `(2ã² − b̃²)b̃² ≥ 16`. Isosceles triangles with `a = c`
/// sit exactly on the boundary, so a few ulps of slack are allowed.
pub fn rotated_region_contains(a_tilde: f64, b_tilde: f64) -> Result<bool> {
    for s in [a_tilde, b_tilde] {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Domain {
                what: "rotated coordinates must be positive",
                value: s,
            });
        }
    }
    let bb = b_tilde * b_tilde;
    let g = (2.0 * a_tilde * a_tilde - bb) * bb;
    Ok(g >= 16.0 * (1.0 - HYPERBOLA_SLACK))
}

/// Lower and upper boundary `b̃` at a given `ã` (which needs `ã ≥ 2`).
pub fn rotated_boundary(a_tilde: f64) -> Option<(f64, f64)> {
    if !(a_tilde >= 2.0 && a_tilde.is_finite()) {
        return None;
    }
    let aa = a_tilde * a_tilde;
    let root = ((aa - 4.0) * (aa + 4.0)).sqrt();
    let upper2 = aa + root;
    Some(((16.0 / upper2).sqrt(), upper2.sqrt()))
}

/// Grid for [`sigma_surface_mesh`]: `points × points` nodes on `[lo, hi]²`,
/// plus any explicitly requested `(a, b)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub extra: Vec<(f64, f64)>,
}

impl MeshSpec {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        Self {
            lo,
            hi,
            points,
            extra: Vec::new(),
        }
    }

    pub fn with_point(mut self, a: f64, b: f64) -> Self {
        self.extra.push((a, b));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshPoint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `None` on the hyperbola `ab = 2`, where the branches meet.
    pub branch: Option<BranchChoice>,
}

/// Points of the unit-area surface over the grid: two per interior node
/// (minus branch first), one per node on `ab = 2`. For every grid abscissa
/// whose hyperbola partner `2/a` falls inside the range, the right triangle
/// `(a, 2/a, √(a² + 4/a²))` is added as well.
pub fn sigma_surface_mesh(spec: &MeshSpec) -> Result<Vec<MeshPoint>> {
    if spec.points < 2 {
        return Err(Error::InvalidArgument(format!(
            "mesh needs at least 2 points per axis, got {}",
            spec.points
        )));
    }
    if !(spec.lo > 0.0 && spec.hi > spec.lo && spec.hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "mesh range must satisfy 0 < lo < hi, got [{}, {}]",
            spec.lo, spec.hi
        )));
    }
    let step = (spec.hi - spec.lo) / (spec.points - 1) as f64;
    let axis: Vec<f64> = (0..spec.points).map(|i| spec.lo + step * i as f64).collect();
    let mut out = Vec::new();
    let push = |a: f64, b: f64, out: &mut Vec<MeshPoint>| -> Result<()> {
        if a * b < 2.0 && !on_hyperbola(a * b) {
            return Ok(());
        }
        let (minus, plus) = c_pair(a, b)?;
        if on_hyperbola(a * b) {
            out.push(MeshPoint {
                a,
                b,
                c: minus,
                branch: None,
            });
        } else {
            out.push(MeshPoint {
                a,
                b,
                c: minus,
                branch: Some(BranchChoice::Minus),
            });
            out.push(MeshPoint {
                a,
                b,
                c: plus,
                branch: Some(BranchChoice::Plus),
            });
        }
        Ok(())
    };
    for &a in &axis {
        for &b in &axis {
            push(a, b, &mut out)?;
        }
    }
    for &a in &axis {
        let b = 2.0 / a;
        if b >= spec.lo && b <= spec.hi {
            push(a, b, &mut out)?;
        }
    }
    for &(a, b) in &spec.extra {
        push(a, b, &mut out)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn heron_examples() {
        let s = EQUILATERAL_SIDE;
        assert!(rel(heron_area(&Triangle::new(s, s, s)).unwrap(), 1.0) < 1e-15);
        assert!(rel(heron_area(&Triangle::new(1.0, 2.0, 5f64.sqrt())).unwrap(), 1.0) < 1e-15);
        assert_eq!(heron_area(&Triangle::new(1.0, 1.0, 2.0)).unwrap(), 0.0);
    }

    #[test]
    fn heron_rejects_non_triangles() {
        assert!(matches!(
            heron_area(&Triangle::new(1.0, 1.0, 3.0)),
            Err(Error::NotATriangle { .. })
        ));
        assert!(matches!(
            heron_area(&Triangle::new(0.0, 1.0, 1.0)),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn heron_agrees_with_sine_form() {
        for &(a, b, g) in &[
            (1.0f64, 2.0f64, FRAC_PI_2),
            (3.0, 0.7, 0.3),
            (0.2, 0.2, 2.9),
            (5.0, 4.0, 1.0),
        ] {
            let c = (a * a + b * b - 2.0 * a * b * f64::cos(g)).sqrt();
            let h = heron_area(&Triangle::new(a, b, c)).unwrap();
            assert!(rel(h, area_from_angle(a, b, g)) < 1e-12, "{a} {b} {g}");
        }
    }

    #[test]
    fn scale_matrix_examples() {
        let id = ScaleMatrix::new(1.0).unwrap();
        assert_eq!(mr_transform(&id, (0.3, -2.0)), (0.3, -2.0));
        let seed = equilateral_seed();
        let c = seed[2];
        assert!(rel(c.1, 2.0 / 3f64.powf(0.75)) < 1e-15);
        for r in [0.3, 1.0, 4.7] {
            let m = ScaleMatrix::new(r).unwrap();
            let (x, y) = mr_transform(&m, c);
            assert_eq!(x, 0.0);
            assert!(rel(y, 2.0 / (r * 3f64.powf(0.75))) < 1e-15);
            let image = seed.map(|p| m.apply(p));
            assert!(rel(vertex_area(&image), 1.0) < 1e-14, "r={r}");
            assert!((m.determinant() - 1.0).abs() <= 2.0 * f64::EPSILON);
            let t = triangle_from_vertices(&image);
            let s = isosceles_sides(r);
            assert!(rel(t.a, s.a) < 1e-14 && rel(t.b, s.b) < 1e-14 && rel(t.c, s.c) < 1e-14);
        }
        assert!(ScaleMatrix::new(0.0).is_err());
    }

    #[test]
    fn isosceles_at_unit_scale_is_equilateral() {
        let t = isosceles_sides(1.0);
        for s in [t.a, t.b, t.c] {
            assert!(rel(s, EQUILATERAL_SIDE) < 1e-15);
        }
        assert!(rel(t.area().unwrap(), 1.0) < 1e-15);
    }

    #[test]
    fn third_side_examples() {
        let s = EQUILATERAL_SIDE;
        assert!(rel(c_from_ab(s, s, BranchChoice::Minus).unwrap(), s) < 1e-15);
        assert!(rel(c_from_ab(s, s, BranchChoice::Plus).unwrap(), 2.0 * FOURTH_ROOT_3) < 1e-15);
        for a in [0.1f64, 0.9, 1.3, 7.0, 55.0] {
            let b = 2.0 / a;
            let expected = (a * a + 4.0 / (a * a)).sqrt();
            for br in [BranchChoice::Minus, BranchChoice::Plus] {
                assert!(rel(c_from_ab(a, b, br).unwrap(), expected) < 1e-15, "a={a}");
            }
        }
        assert!(matches!(
            c_from_ab(1.0, 1.0, BranchChoice::Plus),
            Err(Error::BelowHyperbola { .. })
        ));
    }

    #[test]
    fn third_side_gives_unit_area() {
        for &(a, b) in &[(1.5f64, 1.5f64), (3.0, 0.8), (20.0, 0.2), (9.0, 11.0), (0.05, 60.0)] {
            for br in [BranchChoice::Minus, BranchChoice::Plus] {
                let c = c_from_ab(a, b, br).unwrap();
                let area = heron_area(&Triangle::new(a, b, c)).unwrap();
                assert!(rel(area, 1.0) < 1e-12, "({a},{b}) {br:?}: {area}");
            }
        }
    }

    #[test]
    fn rotated_region_examples() {
        let s = EQUILATERAL_SIDE;
        let (at, bt, _) = rotate(&Triangle::new(s, s, s));
        assert!(rotated_region_contains(at, bt).unwrap());
        assert!(!rotated_region_contains(1.0, 1.0).unwrap());
        assert!(rotated_region_contains(0.0, 1.0).is_err());
        let (lo, hi) = rotated_boundary(100.0).unwrap();
        assert!(rel(hi, SQRT_2 * 100.0) < 0.01);
        assert!(rel(lo, 2.0 * SQRT_2 / 100.0) < 0.01);
        assert!(rotated_boundary(1.9).is_none());
        // 2ã² − b̃² cancels on the upper branch
        for (b, tol) in [(lo, 1e-12), (hi, 1e-6)] {
            let g = (2.0 * 1e4 - b * b) * b * b;
            assert!(rel(g, 16.0) < tol, "{b}: {g}");
        }
    }

    #[test]
    fn mesh_properties() {
        let s = EQUILATERAL_SIDE;
        let mesh = sigma_surface_mesh(&MeshSpec::new(0.5, 4.0, 12).with_point(s, s)).unwrap();
        assert!(!mesh.is_empty());
        for p in &mesh {
            assert!(quartic_residual(p.a, p.b, p.c).abs() < 1e-8, "{p:?}");
            let area = heron_area(&Triangle::new(p.a, p.b, p.c)).unwrap();
            assert!((area - 1.0).abs() < 1e-9);
            if p.branch.is_none() {
                assert!((p.a * p.b - 2.0).abs() < 1e-14);
            }
        }
        assert!(mesh.iter().any(|p| p.branch.is_none()));
        let at_seed: Vec<f64> = mesh.iter().filter(|p| p.a == s && p.b == s).map(|p| p.c).collect();
        assert_eq!(at_seed.len(), 2);
        assert!(rel(at_seed[0], s) < 1e-15);
        assert!(rel(at_seed[1], 2.0 * FOURTH_ROOT_3) < 1e-15);
        assert!(sigma_surface_mesh(&MeshSpec::new(0.5, 4.0, 1)).is_err());
    }

    #[test]
    fn polish_flat_isosceles() {
        for r in [60.0, 133.542_985_793_339_2, 500.0, 2000.0] {
            let raw = isosceles_sides(r);
            let t = polish_isosceles(&raw);
            assert_eq!(t.a, t.b);
            assert!((heron_area(&t).unwrap() - 1.0).abs() < 1e-12, "r={r}");
            assert!(rel(t.c, raw.c) < 1e-3 && rel(t.a, raw.a) < 1e-3);
        }
        let moderate = isosceles_sides(2.0);
        assert_eq!(polish_isosceles(&moderate), moderate);
    }

    #[test]
    fn polish_flat_scalene() {
        for t in [
            Triangle::new(106.682_954_887_367_53, 140.442_300_976_834_1, 33.759_350_043_524),
            Triangle::new(1_150.424_252_526_348_3, 73.516_507_020_701_7, 1_223.940_759_527_729_1),
        ] {
            let p = polish_unit_area(&t);
            assert!((heron_area(&p).unwrap() - 1.0).abs() < 1e-12, "{t:?}");
            for (x, y) in [(p.a, t.a), (p.b, t.b), (p.c, t.c)] {
                assert!(rel(x, y) < 1e-3);
            }
        }
        let right = Triangle::new(3.0, 2.0 / 3.0, 3f64.hypot(2.0 / 3.0));
        assert_eq!(polish_unit_area(&right), right);
    }
}

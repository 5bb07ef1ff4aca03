//! Okounkov bodies of big divisors on surfaces with respect to an
//! admissible flag, computed as exact rational polygons.
//!
//! The central tool is a parametric sweep of the Zariski decomposition of
//! `D − tC` for `t ∈ [0, μ]`: on each maximal interval where the negative
//! support is constant, the coefficients and the positive part are affine
//! in `t`, so every event — a coefficient vanishing, a new curve becoming
//! orthogonal to the positive part, the volume reaching zero — is the root
//! of an affine or quadratic rational polynomial and is found exactly.

use std::collections::BTreeSet;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cones::double_description;
use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, SurfaceDatum};
use crate::linalg::{kernel_basis, solve_linear, QMatrix, QVector, Rat};
use crate::minkowski::{Flag, PointModel};
use crate::zariski::{is_big, is_nef};

/// A continuous piecewise-linear function given by its breakpoints and the
/// values there; between consecutive breakpoints the function is the linear
/// interpolation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinear {
    /// Strictly increasing parameter values; the domain is
    /// `[breakpoints[0], breakpoints[last]]`.
    pub breakpoints: Vec<Rat>,
    /// Function value at each breakpoint.
    pub values: Vec<Rat>,
}

impl PiecewiseLinear {
    pub fn new(breakpoints: Vec<Rat>, values: Vec<Rat>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::DimensionMismatch(
                "piecewise-linear breakpoint and value counts differ".into(),
            ));
        }
        if breakpoints.is_empty() {
            return Err(Error::OutOfRange("piecewise-linear function needs a breakpoint".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::OutOfRange("breakpoints must increase strictly".into()));
        }
        Ok(PiecewiseLinear { breakpoints, values })
    }

    /// Value at `t`, or `None` outside the domain.
    pub fn eval(&self, t: &Rat) -> Option<Rat> {
        let first = self.breakpoints.first()?;
        let last = self.breakpoints.last()?;
        if t < first || t > last {
            return None;
        }
        let k = self.breakpoints.iter().rposition(|b| b <= t)?;
        if k + 1 == self.breakpoints.len() {
            return Some(self.values[k].clone());
        }
        let (t0, t1) = (&self.breakpoints[k], &self.breakpoints[k + 1]);
        let (v0, v1) = (&self.values[k], &self.values[k + 1]);
        Some(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
    }

    /// Slope on each interval between consecutive breakpoints.
    pub fn slopes(&self) -> Vec<Rat> {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, v)| (&v[1] - &v[0]) / (&t[1] - &t[0]))
            .collect()
    }
}

/// A convex polygon with exact rational vertices in counter-clockwise
/// order, starting at the lowest vertex (leftmost on ties), with no three
/// collinear.  One- and two-vertex degenerations (a point, a segment) are
/// allowed so that Minkowski summands of zero area can be represented.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon {
    vertices: Vec<(Rat, Rat)>,
}

fn cross3(o: &(Rat, Rat), a: &(Rat, Rat), b: &(Rat, Rat)) -> Rat {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

fn cross2(a: &(Rat, Rat), b: &(Rat, Rat)) -> Rat {
    &a.0 * &b.1 - &a.1 * &b.0
}

impl Polygon {
    /// Convex hull of the given points in canonical form.  Interior points,
    /// duplicates, and collinear boundary points are pruned exactly.
    pub fn from_points(points: Vec<(Rat, Rat)>) -> Result<Polygon> {
        if points.is_empty() {
            return Err(Error::OutOfRange("a polygon needs at least one point".into()));
        }
        let mut pts = points;
        pts.sort();
        pts.dedup();
        if pts.len() == 1 {
            return Ok(Polygon { vertices: pts });
        }
        let mut lower: Vec<(Rat, Rat)> = Vec::new();
        for p in &pts {
            while lower.len() >= 2
                && cross3(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= Rat::zero()
            {
                lower.pop();
            }
            lower.push(p.clone());
        }
        let mut upper: Vec<(Rat, Rat)> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2
                && cross3(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= Rat::zero()
            {
                upper.pop();
            }
            upper.push(p.clone());
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Ok(Polygon { vertices: canonical_rotation(lower) })
    }

    pub fn vertices(&self) -> &[(Rat, Rat)] {
        &self.vertices
    }

    /// Exact shoelace area (zero for a point or a segment).
    pub fn area(&self) -> Rat {
        if self.vertices.len() < 3 {
            return Rat::zero();
        }
        let mut twice = Rat::zero();
        for (a, b) in self.edge_pairs() {
            twice += cross2(a, b);
        }
        twice / (Rat::one() + Rat::one())
    }

    fn edge_pairs(&self) -> impl Iterator<Item = (&(Rat, Rat), &(Rat, Rat))> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    /// Dilation by a positive rational factor.
    pub fn scale(&self, k: &Rat) -> Polygon {
        assert!(*k > Rat::zero(), "polygon scale factor must be positive");
        Polygon {
            vertices: self.vertices.iter().map(|(x, y)| (x * k, y * k)).collect(),
        }
    }

    /// Translation by `(dx, dy)`.
    pub fn translate(&self, dx: &Rat, dy: &Rat) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|(x, y)| (x + dx, y + dy)).collect(),
        }
    }

    /// SVG document for the polygon in a y-up frame.  Geometry is rendered
    /// in floating point at `unit` pixels per coordinate unit; the exact
    /// rational vertices are carried verbatim in a `data-vertices`
    /// attribute.
    pub fn to_svg(&self, unit: f64) -> String {
        let approx = |r: &Rat| r.to_f64().unwrap_or(0.0);
        let pts: Vec<(f64, f64)> = self
            .vertices
            .iter()
            .map(|(x, y)| (approx(x) * unit, -approx(y) * unit))
            .collect();
        let (mut min_x, mut min_y, mut max_x, mut max_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for (x, y) in &pts {
            min_x = min_x.min(*x);
            min_y = min_y.min(*y);
            max_x = max_x.max(*x);
            max_y = max_y.max(*y);
        }
        let pad = 0.08 * ((max_x - min_x).max(max_y - min_y)).max(unit);
        let (x0, y0) = (min_x - pad, min_y - pad);
        let (w, h) = (max_x - min_x + 2.0 * pad, max_y - min_y + 2.0 * pad);
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.4},{y:.4}")).collect();
        let exact: Vec<String> = self.vertices.iter().map(|(x, y)| format!("{x},{y}")).collect();
        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{x0:.4} {y0:.4} {w:.4} {h:.4}\">\n"
        ));
        // Axes of the y-up frame (the x-axis is y = 0 after negation).
        if y0 <= 0.0 && y0 + h >= 0.0 {
            svg.push_str(&format!(
                "  <line x1=\"{x0:.4}\" y1=\"0\" x2=\"{:.4}\" y2=\"0\" stroke=\"#999\" stroke-width=\"{:.4}\"/>\n",
                x0 + w,
                0.01 * unit
            ));
        }
        if x0 <= 0.0 && x0 + w >= 0.0 {
            svg.push_str(&format!(
                "  <line x1=\"0\" y1=\"{y0:.4}\" x2=\"0\" y2=\"{:.4}\" stroke=\"#999\" stroke-width=\"{:.4}\"/>\n",
                y0 + h,
                0.01 * unit
            ));
        }
        svg.push_str(&format!(
            "  <polygon points=\"{}\" data-vertices=\"{}\" fill=\"#4a90d9\" fill-opacity=\"0.35\" stroke=\"#1f5fa8\" stroke-width=\"{:.4}\"/>\n",
            path.join(" "),
            exact.join(" "),
            0.02 * unit
        ));
        svg.push_str("</svg>\n");
        svg
    }
}

/// Rotate a CCW vertex list so it starts at the lowest vertex (leftmost on
/// ties): the lexicographic minimum by `(y, x)`.
fn canonical_rotation(vertices: Vec<(Rat, Rat)>) -> Vec<(Rat, Rat)> {
    let start = vertices
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| (&a.1, &a.0).cmp(&(&b.1, &b.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut out = Vec::with_capacity(vertices.len());
    out.extend_from_slice(&vertices[start..]);
    out.extend_from_slice(&vertices[..start]);
    out
}

/// Which half-turn an edge direction lies in: 0 for angles in `[0, π)`,
/// 1 for `[π, 2π)`.
fn edge_half(e: &(Rat, Rat)) -> u8 {
    if e.1 > Rat::zero() || (e.1.is_zero() && e.0 > Rat::zero()) {
        0
    } else {
        1
    }
}

fn edge_cmp(a: &(Rat, Rat), b: &(Rat, Rat)) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match edge_half(a).cmp(&edge_half(b)) {
        Ordering::Equal => {
            let c = cross2(a, b);
            if c > Rat::zero() {
                Ordering::Less
            } else if c.is_zero() {
                Ordering::Equal
            } else {
                Ordering::Greater
            }
        }
        other => other,
    }
}

/// Minkowski sum of two convex polygons by the exact angular merge of
/// their edge vectors; parallel co-directional edges are combined, so the
/// result is again canonical.  The area is superadditive:
/// `area(P + Q) ≥ area(P) + area(Q)`.
pub fn minkowski_sum(p: &Polygon, q: &Polygon) -> Polygon {
    if p.vertices.len() == 1 {
        return q.translate(&p.vertices[0].0, &p.vertices[0].1);
    }
    if q.vertices.len() == 1 {
        return p.translate(&q.vertices[0].0, &q.vertices[0].1);
    }
    let edges = |poly: &Polygon| -> Vec<(Rat, Rat)> {
        let n = poly.vertices.len();
        (0..n)
            .map(|i| {
                let a = &poly.vertices[i];
                let b = &poly.vertices[(i + 1) % n];
                (&b.0 - &a.0, &b.1 - &a.1)
            })
            .collect()
    };
    let pe = edges(p);
    let qe = edges(q);
    let mut merged: Vec<(Rat, Rat)> = Vec::with_capacity(pe.len() + qe.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < pe.len() || j < qe.len() {
        use std::cmp::Ordering;
        let next = if i == pe.len() {
            let e = qe[j].clone();
            j += 1;
            e
        } else if j == qe.len() {
            let e = pe[i].clone();
            i += 1;
            e
        } else {
            match edge_cmp(&pe[i], &qe[j]) {
                Ordering::Less => {
                    let e = pe[i].clone();
                    i += 1;
                    e
                }
                Ordering::Greater => {
                    let e = qe[j].clone();
                    j += 1;
                    e
                }
                Ordering::Equal => {
                    let e = (&pe[i].0 + &qe[j].0, &pe[i].1 + &qe[j].1);
                    i += 1;
                    j += 1;
                    e
                }
            }
        };
        merged.push(next);
    }
    let start = (&p.vertices[0].0 + &q.vertices[0].0, &p.vertices[0].1 + &q.vertices[0].1);
    let mut vertices = vec![start.clone()];
    let mut acc = start.clone();
    for e in &merged {
        acc = (&acc.0 + &e.0, &acc.1 + &e.1);
        vertices.push(acc.clone());
    }
    debug_assert_eq!(vertices.last(), Some(&start), "edge merge must close");
    vertices.pop();
    Polygon { vertices }
}

/// The threshold `μ = sup{t : D − tC pseudo-effective}` together with a
/// certifying nef extremal ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuValue {
    /// The supremum; `D − μC` is pseudo-effective and lies on the boundary
    /// of the pseudo-effective cone.
    pub mu: Rat,
    /// A primitive nef extremal ray `R` achieving the supremum:
    /// `(D − μC)·R = 0` with `C·R > 0`.  When the positive part of
    /// `D − μC` is nonzero it is the unique such ray; otherwise the
    /// lexicographically smallest one is chosen.
    pub binding_ray: DivisorClass,
}

/// One maximal sweep interval `[t0, t1]` on which the negative support of
/// `D − tC` is constant; coefficients and positive part are affine in the
/// local parameter `τ = t − t0`.
struct Segment {
    t0: Rat,
    t1: Rat,
    support: Vec<usize>,
    a0: Vec<Rat>,
    a1: Vec<Rat>,
    p0: DivisorClass,
    p1: DivisorClass,
}

impl Segment {
    fn coeff_at(&self, k: usize, t: &Rat) -> Rat {
        &self.a0[k] + &self.a1[k] * (t - &self.t0)
    }

    fn p_at(&self, t: &Rat) -> DivisorClass {
        self.p0.add(&self.p1.scale(&(t - &self.t0)))
    }
}

struct Sweep {
    segments: Vec<Segment>,
    mu: Rat,
    /// Positive part of `D − μC` (zero when the class is purely negative).
    p_mu: DivisorClass,
    /// Curves with strictly positive coefficient in `D − μC`.
    support_mu: Vec<usize>,
}

/// Zariski data of `D − tC` for `t` just above `t0`: the growing-support
/// loop run over first-order jets `value + ε·slope`, compared
/// lexicographically.  All solves are linear with constant Gram matrices,
/// so first-order arithmetic is exact.
fn stabilize(
    s: &SurfaceDatum,
    d: &DivisorClass,
    c: &DivisorClass,
    t0: &Rat,
    seed: &[usize],
) -> Result<(Vec<usize>, Vec<Rat>, Vec<Rat>, DivisorClass, DivisorClass)> {
    let negatives = s.negative_curves();
    let d0 = d.sub(&c.scale(t0));
    let mut support: BTreeSet<usize> = seed.iter().copied().collect();
    for _ in 0..(4 * negatives.len() + 8) {
        let sup: Vec<usize> = support.iter().copied().collect();
        let (a0v, a1v) = if sup.is_empty() {
            (Vec::new(), Vec::new())
        } else {
            let rows: Vec<Vec<Rat>> = sup
                .iter()
                .map(|&i| sup.iter().map(|&j| s.intersect(&negatives[i], &negatives[j])).collect())
                .collect();
            let gram = QMatrix::from_rows(rows)?;
            let g0 = QVector(sup.iter().map(|&i| s.intersect(&d0, &negatives[i])).collect());
            let g1 = QVector(sup.iter().map(|&i| -s.intersect(c, &negatives[i])).collect());
            let a0 = solve_linear(&gram, &g0).map_err(|_| {
                Error::Internal(format!("sweep support {sup:?} has a singular Gram matrix"))
            })?;
            let a1 = solve_linear(&gram, &g1).map_err(|_| {
                Error::Internal(format!("sweep support {sup:?} has a singular Gram matrix"))
            })?;
            (a0.0, a1.0)
        };
        // Curves whose coefficient is identically zero to first order sit
        // on the chamber wall, not in the support; removing them leaves
        // the solution on the remaining coordinates unchanged.
        let mut dropped = false;
        for (k, &i) in sup.iter().enumerate() {
            if a0v[k].is_zero() && a1v[k].is_zero() {
                support.remove(&i);
                dropped = true;
            }
        }
        if dropped {
            continue;
        }
        for (k, &i) in sup.iter().enumerate() {
            let ok = a0v[k] > Rat::zero() || (a0v[k].is_zero() && a1v[k] > Rat::zero());
            if !ok {
                return Err(Error::Internal(format!(
                    "sweep coefficient of curve {i} is negative to first order at t = {t0}"
                )));
            }
        }
        let mut p0 = d0.clone();
        let mut p1 = c.neg();
        for (k, &i) in sup.iter().enumerate() {
            p0 = p0.sub(&negatives[i].scale(&a0v[k]));
            p1 = p1.sub(&negatives[i].scale(&a1v[k]));
        }
        let mut grew = false;
        for (i, nc) in negatives.iter().enumerate() {
            if support.contains(&i) {
                continue;
            }
            let u = s.intersect(&p0, nc);
            let w = s.intersect(&p1, nc);
            if u < Rat::zero() || (u.is_zero() && w < Rat::zero()) {
                support.insert(i);
                grew = true;
            }
        }
        if !grew {
            return Ok((sup, a0v, a1v, p0, p1));
        }
    }
    Err(Error::Internal("sweep support failed to stabilize".into()))
}

/// Exact rational square root, if one exists.
fn rat_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let sn = x.numer().sqrt();
    let sd = x.denom().sqrt();
    if &(&sn * &sn) == x.numer() && &(&sd * &sd) == x.denom() {
        Some(Rat::new(sn, sd))
    } else {
        None
    }
}

/// Smallest positive root of `c0 + c1·τ + c2·τ²`, if the roots are
/// rational.  An irrational root means the volume does not reach zero on
/// the current segment (on rational polyhedral data the exit value of the
/// sweep is rational), so `None` is the correct answer there.
fn smallest_positive_root(c0: &Rat, c1: &Rat, c2: &Rat) -> Option<Rat> {
    if c2.is_zero() {
        if *c1 < Rat::zero() {
            return Some(-(c0 / c1));
        }
        return None;
    }
    let four = Rat::from_integer(4.into());
    let disc = c1 * c1 - four * c0 * c2;
    if disc < Rat::zero() {
        return None;
    }
    let sd = rat_sqrt(&disc)?;
    let two_c2 = c2 + c2;
    let r1 = (-c1 - &sd) / &two_c2;
    let r2 = (-c1 + &sd) / &two_c2;
    let mut best: Option<Rat> = None;
    for r in [r1, r2] {
        if r > Rat::zero() && best.as_ref().is_none_or(|b| r < *b) {
            best = Some(r);
        }
    }
    best
}

/// Run the full parametric sweep of `D − tC` from `t = 0` to the
/// pseudo-effective threshold.  Requires `D` big and `C` nef nonzero
/// (checked by the public callers).
fn sweep(s: &SurfaceDatum, d: &DivisorClass, c: &DivisorClass) -> Result<Sweep> {
    let negatives = s.negative_curves();
    let mut t0 = Rat::zero();
    let mut seed: Vec<usize> = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut segments: Vec<Segment> = Vec::new();
    loop {
        let (sup, a0, a1, p0, p1) = stabilize(s, d, c, &t0, &seed)?;
        if !seen.insert(sup.clone()) {
            return Err(Error::Internal("sweep revisited a Zariski chamber".into()));
        }
        // Support events: a coefficient falling to zero, or an outside
        // curve's pairing with the positive part falling to zero.
        let mut tau_support: Option<Rat> = None;
        let mut consider = |tau: Rat| {
            if tau > Rat::zero() && tau_support.as_ref().is_none_or(|t| tau < *t) {
                tau_support = Some(tau);
            }
        };
        for k in 0..sup.len() {
            if a1[k] < Rat::zero() {
                consider(-(&a0[k] / &a1[k]));
            }
        }
        for (i, nc) in negatives.iter().enumerate() {
            if sup.binary_search(&i).is_ok() {
                continue;
            }
            let w = s.intersect(&p1, nc);
            if w < Rat::zero() {
                consider(-(s.intersect(&p0, nc) / w));
            }
        }
        // Volume event: the squared positive part reaching zero.
        let c0 = s.intersect(&p0, &p0);
        let c1 = { let m = s.intersect(&p0, &p1); &m + &m };
        let c2 = s.intersect(&p1, &p1);
        if c0 <= Rat::zero() {
            return Err(Error::Internal(
                "sweep entered a segment with non-positive volume".into(),
            ));
        }
        let tau_q = smallest_positive_root(&c0, &c1, &c2);
        // The pseudo-effective boundary wins ties against support events:
        // the decomposition data at μ is the limit from the left either way.
        let q_wins = match (&tau_q, &tau_support) {
            (Some(tq), Some(ts)) => tq <= ts,
            (Some(_), None) => true,
            (None, _) => false,
        };
        if q_wins {
            let tq = tau_q.expect("q_wins implies a volume root");
            let mu = &t0 + &tq;
            let p_mu = p0.add(&p1.scale(&tq));
            let support_mu: Vec<usize> = sup
                .iter()
                .enumerate()
                .filter(|(k, _)| &a0[*k] + &a1[*k] * &tq > Rat::zero())
                .map(|(_, &i)| i)
                .collect();
            segments.push(Segment { t0, t1: mu.clone(), support: sup, a0, a1, p0, p1 });
            return Ok(Sweep { segments, mu, p_mu, support_mu });
        }
        let te = tau_support
            .ok_or_else(|| Error::Internal("sweep cannot advance toward the boundary".into()))?;
        let t1 = &t0 + &te;
        seed = sup
            .iter()
            .enumerate()
            .filter(|(k, _)| &a0[*k] + &a1[*k] * &te > Rat::zero())
            .map(|(_, &i)| i)
            .collect();
        segments.push(Segment {
            t0: t0.clone(),
            t1: t1.clone(),
            support: sup,
            a0,
            a1,
            p0,
            p1,
        });
        t0 = t1;
    }
}

/// Lexicographically smallest extremal ray of the nef-cone face orthogonal
/// to the given negative curves that pairs positively with `c`.  The face
/// is enumerated by double description inside the orthogonal subspace.
fn face_min_ray(s: &SurfaceDatum, support: &[usize], c: &DivisorClass) -> Result<DivisorClass> {
    let n = s.rank();
    let q = s.q();
    let negatives = s.negative_curves();
    let rows: Vec<Vec<Rat>> = support
        .iter()
        .map(|&i| q.mul_vec(negatives[i].coeffs()).map(|v| v.0))
        .collect::<Result<_>>()?;
    let basis = kernel_basis(&rows, n);
    if basis.is_empty() {
        return Err(Error::Internal("binding face has no directions".into()));
    }
    let dim = basis.len();
    let mut functionals: Vec<QVector> = Vec::new();
    for g in s.eff_generators() {
        let w = q.mul_vec(g.coeffs())?;
        let restricted: Vec<Rat> = basis
            .iter()
            .map(|k| {
                w.0.iter()
                    .zip(k)
                    .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect();
        if restricted.iter().any(|x| !x.is_zero()) {
            functionals.push(QVector(restricted));
        }
    }
    let rays = double_description(&QMatrix::identity(dim), &functionals)?;
    let mut best: Option<DivisorClass> = None;
    for y in rays {
        let mut x = vec![Rat::zero(); n];
        for (m, k) in basis.iter().enumerate() {
            for (xj, kj) in x.iter_mut().zip(k) {
                *xj += &y.0[m] * kj;
            }
        }
        let class = DivisorClass::new(QVector(x))
            .primitive()
            .ok_or_else(|| Error::Internal("binding face produced a zero ray".into()))?;
        if s.intersect(&class, c) <= Rat::zero() {
            continue;
        }
        if best.as_ref().is_none_or(|b| class < *b) {
            best = Some(class);
        }
    }
    best.ok_or_else(|| {
        Error::Internal("no extremal ray of the binding face pairs positively with the curve".into())
    })
}

/// The pseudo-effective threshold `μ = sup{t : D − tC ∈ Eff̄}` of a big
/// class against a nonzero nef class, with a certifying nef extremal ray:
/// `μ` equals the minimum of `(D·R)/(C·R)` over nef extremal rays `R` with
/// `C·R > 0`, and `binding_ray` achieves it.
pub fn mu_max(s: &SurfaceDatum, d: &DivisorClass, c: &DivisorClass) -> Result<MuValue> {
    if c.is_zero() {
        return Err(Error::ZeroCurve);
    }
    if !is_nef(s, c) {
        return Err(Error::NotNef(format!("{c}")));
    }
    if !is_big(s, d) {
        return Err(Error::NotBig(format!("{d}")));
    }
    let sw = sweep(s, d, c)?;
    let binding_ray = if !sw.p_mu.is_zero() {
        // The positive part survives to μ, where it is isotropic: it spans
        // the unique nef extremal ray orthogonal to D − μC.
        sw.p_mu.primitive().expect("nonzero class")
    } else {
        face_min_ray(s, &sw.support_mu, c)?
    };
    Ok(MuValue { mu: sw.mu, binding_ray })
}

fn incidence_set(flag: &Flag) -> BTreeSet<usize> {
    match flag.point() {
        PointModel::GeneralOnCurve => BTreeSet::new(),
        PointModel::Incidence(set) => set.clone(),
    }
}

/// The boundary functions of the Okounkov body of a big class `D` with
/// respect to the flag: `α(t)` is the multiplicity of the flag point in
/// the negative part of `D − tC` (the coefficient sum over the incidence
/// curves; identically zero for a general point), and
/// `β(t) = α(t) + P_{D−tC}·C`.
pub fn alpha_beta(
    s: &SurfaceDatum,
    d: &DivisorClass,
    flag: &Flag,
) -> Result<(PiecewiseLinear, PiecewiseLinear)> {
    if !is_big(s, d) {
        return Err(Error::NotBig(format!("{d}")));
    }
    let c = flag.curve();
    let sw = sweep(s, d, c)?;
    let inc = incidence_set(flag);
    let alpha_of = |seg: &Segment, t: &Rat| -> Rat {
        seg.support
            .iter()
            .enumerate()
            .filter(|&(_, i)| inc.contains(i))
            .fold(Rat::zero(), |acc, (k, _)| acc + seg.coeff_at(k, t))
    };
    let beta_of = |seg: &Segment, t: &Rat| -> Rat { alpha_of(seg, t) + s.intersect(&seg.p_at(t), c) };

    let mut breakpoints = vec![Rat::zero()];
    let first = &sw.segments[0];
    let mut alpha_values = vec![alpha_of(first, &first.t0)];
    let mut beta_values = vec![beta_of(first, &first.t0)];
    for (k, seg) in sw.segments.iter().enumerate() {
        if k > 0 {
            // Zariski decompositions vary continuously, so the parametric
            // data of adjacent segments must agree at the shared endpoint.
            let prev = &sw.segments[k - 1];
            if alpha_of(prev, &seg.t0) != alpha_of(seg, &seg.t0)
                || beta_of(prev, &seg.t0) != beta_of(seg, &seg.t0)
            {
                return Err(Error::Internal(format!(
                    "sweep data is discontinuous at t = {}",
                    seg.t0
                )));
            }
        }
        breakpoints.push(seg.t1.clone());
        alpha_values.push(alpha_of(seg, &seg.t1));
        beta_values.push(beta_of(seg, &seg.t1));
    }
    Ok((
        PiecewiseLinear::new(breakpoints.clone(), alpha_values)?,
        PiecewiseLinear::new(breakpoints, beta_values)?,
    ))
}

/// The Okounkov body of a big class with respect to the flag: the convex
/// region between the graphs of `α` and `β` over `[0, μ]`, as an exact
/// polygon.
pub fn okounkov_body(s: &SurfaceDatum, d: &DivisorClass, flag: &Flag) -> Result<Polygon> {
    let (alpha, beta) = alpha_beta(s, d, flag)?;
    let mut points: Vec<(Rat, Rat)> = Vec::with_capacity(2 * alpha.breakpoints.len());
    for (t, v) in alpha.breakpoints.iter().zip(&alpha.values) {
        points.push((t.clone(), v.clone()));
    }
    for (t, v) in beta.breakpoints.iter().zip(&beta.values) {
        points.push((t.clone(), v.clone()));
    }
    let body = Polygon::from_points(points)?;
    if body.area() <= Rat::zero() {
        return Err(Error::Internal("Okounkov body of a big class has zero area".into()));
    }
    Ok(body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SurfaceDatum;
    use crate::linalg::{rat, ratio};
    use crate::minkowski::decompose_nef;
    use crate::zariski::zariski_decompose;
    use std::collections::BTreeMap;

    fn dp(r: usize) -> SurfaceDatum {
        SurfaceDatum::del_pezzo(r).unwrap()
    }

    fn ab(a: i64, b: &[i64]) -> DivisorClass {
        DivisorClass::from_ab(a, b)
    }

    fn pt(x: Rat, y: Rat) -> (Rat, Rat) {
        (x, y)
    }

    fn ipts(coords: &[(i64, i64)]) -> Vec<(Rat, Rat)> {
        coords.iter().map(|&(x, y)| (rat(x), rat(y))).collect()
    }

    fn poly(coords: &[(i64, i64)]) -> Polygon {
        Polygon::from_points(ipts(coords)).unwrap()
    }

    #[test]
    fn hull_canonicalization_and_area() {
        // Shuffled square with interior and collinear boundary points.
        let square = Polygon::from_points(ipts(&[
            (2, 2),
            (0, 0),
            (1, 1),
            (2, 0),
            (0, 2),
            (1, 0),
            (0, 1),
            (2, 1),
        ]))
        .unwrap();
        assert_eq!(square.vertices(), ipts(&[(0, 0), (2, 0), (2, 2), (0, 2)]).as_slice());
        assert_eq!(square.area(), rat(4));

        let tri = poly(&[(0, 0), (1, 0), (0, 1)]);
        assert_eq!(tri.area(), ratio(1, 2));

        // Canonical start is the lowest vertex, leftmost on ties.
        let diamond = poly(&[(0, 1), (1, 0), (2, 1), (1, 2)]);
        assert_eq!(diamond.vertices()[0], (rat(1), rat(0)));

        let point = poly(&[(3, 4)]);
        assert_eq!(point.vertices().len(), 1);
        assert_eq!(point.area(), rat(0));

        let segment = Polygon::from_points(ipts(&[(0, 0), (2, 2), (1, 1)])).unwrap();
        assert_eq!(segment.vertices(), ipts(&[(0, 0), (2, 2)]).as_slice());
        assert_eq!(segment.area(), rat(0));

        assert!(Polygon::from_points(Vec::new()).is_err());
    }

    #[test]
    fn minkowski_sum_examples() {
        let unit = poly(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let two = minkowski_sum(&unit, &unit);
        assert_eq!(two, poly(&[(0, 0), (2, 0), (2, 2), (0, 2)]));
        assert_eq!(two.area(), rat(4));
        assert!(two.area() >= unit.area().clone() + unit.area());

        // Adding a point translates.
        let shift = poly(&[(5, 7)]);
        assert_eq!(minkowski_sum(&unit, &shift), unit.translate(&rat(5), &rat(7)));

        // Segment + segment: parallel stays a segment, skew spans a
        // parallelogram.
        let seg_a = poly(&[(0, 0), (1, 1)]);
        let seg_b = poly(&[(0, 0), (2, 2)]);
        assert_eq!(minkowski_sum(&seg_a, &seg_b), poly(&[(0, 0), (3, 3)]));
        let seg_c = poly(&[(0, 0), (1, 0)]);
        let para = minkowski_sum(&seg_a, &seg_c);
        assert_eq!(para, poly(&[(0, 0), (1, 0), (2, 1), (1, 1)]));
        assert_eq!(para.area(), rat(1));
    }

    #[test]
    fn scaling_and_svg() {
        let tri = poly(&[(0, 0), (1, 0), (0, 3)]);
        let tripled = tri.scale(&rat(3));
        assert_eq!(tripled, poly(&[(0, 0), (3, 0), (0, 9)]));
        assert_eq!(tripled.area(), rat(9) * tri.area());

        let s = dp(2);
        let flag = Flag::general(&s, ab(3, &[1, 1])).unwrap();
        let body = okounkov_body(&s, &ab(1, &[0, 0]), &flag).unwrap();
        let svg = body.to_svg(100.0);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<polygon"));
        assert!(svg.contains("data-vertices=\"0,0 1/3,0 0,3\""));
        // y-up frame: the vertex (0, 3) renders with a negative y.
        assert!(svg.contains("-300.0000"));
    }

    #[test]
    fn piecewise_linear_eval_and_validation() {
        let f = PiecewiseLinear::new(vec![rat(0), rat(1), rat(3)], vec![rat(0), rat(2), rat(2)])
            .unwrap();
        assert_eq!(f.eval(&ratio(1, 2)), Some(rat(1)));
        assert_eq!(f.eval(&rat(2)), Some(rat(2)));
        assert_eq!(f.eval(&rat(3)), Some(rat(2)));
        assert_eq!(f.eval(&rat(4)), None);
        assert_eq!(f.slopes(), vec![rat(2), rat(0)]);
        assert!(PiecewiseLinear::new(vec![rat(0), rat(0)], vec![rat(1), rat(2)]).is_err());
        assert!(PiecewiseLinear::new(vec![rat(0)], vec![rat(1), rat(2)]).is_err());
    }

    #[test]
    fn mu_examples_on_x2() {
        let s = dp(2);
        let h = ab(1, &[0, 0]);
        let anti_k = ab(3, &[1, 1]);

        let m = mu_max(&s, &h, &anti_k).unwrap();
        assert_eq!(m.mu, ratio(1, 3));
        assert_eq!(m.binding_ray, h, "positive part dies at a codimension-one face");

        let m = mu_max(&s, &anti_k, &anti_k).unwrap();
        assert_eq!(m.mu, rat(1));
        // Every nef ray achieves the bound for D = C; the smallest is
        // reported.
        assert_eq!(m.binding_ray, ab(1, &[1, 0]));

        let m = mu_max(&s, &h, &h).unwrap();
        assert_eq!(m.mu, rat(1));

        // The positive part survives when the ray exits through a facet.
        let m = mu_max(&s, &ab(2, &[1, 0]), &anti_k).unwrap();
        assert_eq!(m.mu, ratio(1, 2));
        assert_eq!(m.binding_ray, ab(1, &[1, 0]));

        assert!(matches!(mu_max(&s, &ab(1, &[1, 0]), &anti_k), Err(Error::NotBig(_))));
        assert!(matches!(
            mu_max(&s, &h, &DivisorClass::zero(3)),
            Err(Error::ZeroCurve)
        ));
        assert!(matches!(mu_max(&s, &h, &ab(0, &[-1, 0])), Err(Error::NotNef(_))));
    }

    #[test]
    fn mu_binding_ray_on_x1() {
        let s = dp(1);
        let m = mu_max(&s, &ab(1, &[0]), &ab(1, &[1])).unwrap();
        assert_eq!(m.mu, rat(1));
        assert_eq!(m.binding_ray, ab(1, &[0]), "H is the ray orthogonal to E1");
    }

    #[test]
    fn alpha_beta_h_against_anticanonical() {
        let s = dp(2);
        let flag = Flag::general(&s, ab(3, &[1, 1])).unwrap();
        let (alpha, beta) = alpha_beta(&s, &ab(1, &[0, 0]), &flag).unwrap();
        assert_eq!(alpha.breakpoints, vec![rat(0), ratio(1, 3)]);
        assert_eq!(alpha.values, vec![rat(0), rat(0)]);
        assert_eq!(beta.values, vec![rat(3), rat(0)], "beta(t) = 3 - 9t");
        // beta(0) - alpha(0) equals P_D · C.
        let p = zariski_decompose(&s, &ab(1, &[0, 0])).unwrap().p;
        assert_eq!(&beta.values[0] - &alpha.values[0], s.intersect(&p, &ab(3, &[1, 1])));
    }

    #[test]
    fn alpha_beta_anticanonical_self() {
        let s = dp(2);
        let anti_k = ab(3, &[1, 1]);
        let flag = Flag::general(&s, anti_k.clone()).unwrap();
        let (alpha, beta) = alpha_beta(&s, &anti_k, &flag).unwrap();
        assert_eq!(alpha.breakpoints, vec![rat(0), rat(1)]);
        assert_eq!(alpha.values, vec![rat(0), rat(0)]);
        assert_eq!(beta.values, vec![rat(7), rat(0)], "beta(t) = 7(1 - t)");
    }

    #[test]
    fn alpha_nonzero_for_incidence_flag() {
        // D = 3H - 2E1 - 2E2 has negative part H - E1 - E2 at t = 0; the
        // flag point lies on that curve, so alpha starts at 1.
        let s = dp(2);
        let l12 = s
            .negative_curves()
            .iter()
            .position(|c| *c == ab(1, &[1, 1]))
            .unwrap();
        let flag = Flag::incidence(&s, ab(1, &[0, 0]), [l12]).unwrap();
        let d = ab(3, &[2, 2]);
        let (alpha, beta) = alpha_beta(&s, &d, &flag).unwrap();
        assert_eq!(alpha.breakpoints, vec![rat(0), rat(1)]);
        assert_eq!(alpha.values, vec![rat(1), rat(2)], "alpha(t) = 1 + t");
        assert_eq!(beta.values, vec![rat(3), rat(2)], "beta(t) = 3 - t");

        let body = okounkov_body(&s, &d, &flag).unwrap();
        assert_eq!(
            body.vertices(),
            vec![pt(rat(0), rat(1)), pt(rat(1), rat(2)), pt(rat(0), rat(3))].as_slice()
        );
        // Area equals half the volume of D (the square of its positive
        // part), not half of D².
        let p = zariski_decompose(&s, &d).unwrap().p;
        assert_eq!(body.area() + body.area(), s.self_intersection(&p));
    }

    #[test]
    fn body_triangles_on_x2() {
        let s = dp(2);
        let h = ab(1, &[0, 0]);
        let anti_k = ab(3, &[1, 1]);

        let flag_h = Flag::general(&s, h.clone()).unwrap();
        let body = okounkov_body(&s, &h, &flag_h).unwrap();
        assert_eq!(
            body.vertices(),
            vec![pt(rat(0), rat(0)), pt(rat(1), rat(0)), pt(rat(0), rat(1))].as_slice()
        );
        assert_eq!(body.area(), ratio(1, 2));

        let flag_k = Flag::general(&s, anti_k.clone()).unwrap();
        let body = okounkov_body(&s, &h, &flag_k).unwrap();
        assert_eq!(
            body.vertices(),
            vec![pt(rat(0), rat(0)), pt(ratio(1, 3), rat(0)), pt(rat(0), rat(3))].as_slice()
        );
        assert_eq!(body.area(), ratio(1, 2));

        let body = okounkov_body(&s, &anti_k, &flag_k).unwrap();
        assert_eq!(
            body.vertices(),
            vec![pt(rat(0), rat(0)), pt(rat(1), rat(0)), pt(rat(0), rat(7))].as_slice()
        );
        assert_eq!(body.area(), ratio(7, 2));

        assert!(matches!(
            okounkov_body(&s, &ab(1, &[1, 0]), &flag_k),
            Err(Error::NotBig(_))
        ));
        assert!(matches!(
            okounkov_body(&s, &ab(0, &[-1, 0]), &flag_k),
            Err(Error::NotBig(_))
        ));
    }

    #[test]
    fn body_additivity_for_4h() {
        let s = dp(2);
        let anti_k = ab(3, &[1, 1]);
        let flag = Flag::general(&s, anti_k.clone()).unwrap();
        let d = ab(4, &[1, 1]);

        let direct = okounkov_body(&s, &d, &flag).unwrap();
        assert_eq!(
            direct.vertices(),
            vec![
                pt(rat(0), rat(0)),
                pt(ratio(4, 3), rat(0)),
                pt(rat(1), rat(3)),
                pt(rat(0), rat(10))
            ]
            .as_slice()
        );
        assert_eq!(direct.area(), rat(7), "area = D²/2");

        // The decomposition is (-K) + H; the body is the Minkowski sum of
        // the two bodies.
        let parts = decompose_nef(&s, &flag, &d).unwrap();
        assert_eq!(parts.len(), 2);
        let body_k = okounkov_body(&s, &anti_k, &flag).unwrap();
        let body_h = okounkov_body(&s, &ab(1, &[0, 0]), &flag).unwrap();
        let summed = minkowski_sum(&body_k, &body_h);
        assert_eq!(summed, direct);
        assert!(summed.area() >= body_k.area().clone() + body_h.area());
    }

    #[test]
    fn additivity_with_isotropic_piece() {
        // 2H - E1 decomposes as (3H - E1)/2 + (H - E1)/2; the body of the
        // isotropic ray degenerates to a vertical segment of length
        // (H - E1)·C.
        let s = dp(2);
        let anti_k = ab(3, &[1, 1]);
        let flag = Flag::general(&s, anti_k.clone()).unwrap();
        let d = ab(2, &[1, 0]);

        let parts = decompose_nef(&s, &flag, &d).unwrap();
        assert_eq!(
            parts,
            vec![(ab(3, &[1, 0]), ratio(1, 2)), (ab(1, &[1, 0]), ratio(1, 2))]
        );

        let mut summed = poly(&[(0, 0)]);
        for (piece, weight) in &parts {
            let piece_body = if s.self_intersection(piece) > Rat::zero() {
                okounkov_body(&s, piece, &flag).unwrap()
            } else {
                // Nef non-big piece: μ = 0 and the body is {0} × [0, P·C].
                Polygon::from_points(vec![
                    (rat(0), rat(0)),
                    (rat(0), s.intersect(piece, &anti_k)),
                ])
                .unwrap()
            };
            summed = minkowski_sum(&summed, &piece_body.scale(weight));
        }
        let direct = okounkov_body(&s, &d, &flag).unwrap();
        assert_eq!(
            direct.vertices(),
            vec![
                pt(rat(0), rat(0)),
                pt(ratio(1, 2), rat(0)),
                pt(ratio(1, 2), rat(1)),
                pt(rat(0), rat(5))
            ]
            .as_slice()
        );
        assert_eq!(summed, direct);
        assert_eq!(direct.area() + direct.area(), s.self_intersection(&d));
    }

    #[test]
    fn homogeneity() {
        let s = dp(2);
        let flag = Flag::general(&s, ab(3, &[1, 1])).unwrap();
        for d in [ab(1, &[0, 0]), ab(4, &[1, 1]), ab(2, &[1, 0])] {
            let body = okounkov_body(&s, &d, &flag).unwrap();
            for k in [2i64, 3] {
                let scaled = okounkov_body(&s, &d.scale(&rat(k)), &flag).unwrap();
                assert_eq!(scaled, body.scale(&rat(k)), "k = {k}");
            }
        }
    }

    #[test]
    fn volume_identity_on_small_surfaces() {
        // For nef D the body area is D²/2, for any admissible flag.
        for r in 1..=3usize {
            let s = dp(r);
            let anti_k = s.ample().clone();
            let h = ab(1, &vec![0; r]);
            let flags = [
                Flag::general(&s, anti_k.clone()).unwrap(),
                Flag::general(&s, h.clone()).unwrap(),
            ];
            let mut e1 = vec![0i64; r];
            e1[0] = 1;
            let rays = [h.clone(), anti_k.clone(), ab(1, &e1)];
            for x in 0..3i64 {
                for y in 0..3i64 {
                    for z in 0..2i64 {
                        let d = rays[0]
                            .scale(&rat(x))
                            .add(&rays[1].scale(&rat(y)))
                            .add(&rays[2].scale(&rat(z)));
                        if !is_big(&s, &d) {
                            continue;
                        }
                        for flag in &flags {
                            let body = okounkov_body(&s, &d, flag).unwrap();
                            assert_eq!(
                                body.area() + body.area(),
                                s.self_intersection(&d),
                                "rank {r}, D = {d}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sweep_matches_zariski_at_segment_midpoints() {
        let s = dp(2);
        let cases = [
            (ab(1, &[0, 0]), ab(3, &[1, 1])),
            (ab(4, &[1, 1]), ab(3, &[1, 1])),
            (ab(2, &[1, 0]), ab(3, &[1, 1])),
            (ab(3, &[2, 2]), ab(1, &[0, 0])),
            (ab(5, &[2, 1]), ab(2, &[1, 1])),
        ];
        for (d, c) in &cases {
            let sw = sweep(&s, d, c).unwrap();
            assert_eq!(sw.segments[0].t0, rat(0));
            assert_eq!(sw.segments.last().unwrap().t1, sw.mu);
            for seg in &sw.segments {
                let tm = (&seg.t0 + &seg.t1) / rat(2);
                let z = zariski_decompose(&s, &d.sub(&c.scale(&tm))).unwrap();
                let expected: BTreeMap<usize, Rat> = seg
                    .support
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| (i, seg.coeff_at(k, &tm)))
                    .collect();
                let got: BTreeMap<usize, Rat> = z
                    .support
                    .iter()
                    .zip(&z.coefficients)
                    .filter(|(_, a)| !a.is_zero())
                    .map(|(&i, a)| (i, a.clone()))
                    .collect();
                assert_eq!(got, expected, "support mismatch at t = {tm}");
                assert_eq!(z.p, seg.p_at(&tm), "positive part mismatch at t = {tm}");
            }
        }
    }

    #[test]
    fn boundary_functions_are_convex_and_concave() {
        let s = dp(3);
        let flag = Flag::general(&s, s.ample().clone()).unwrap();
        for d in [ab(4, &[1, 1, 1]), ab(5, &[2, 1, 1]), ab(2, &[1, 0, 0]), ab(7, &[3, 2, 1])] {
            if !is_big(&s, &d) {
                continue;
            }
            let (alpha, beta) = alpha_beta(&s, &d, &flag).unwrap();
            let sa = alpha.slopes();
            assert!(sa.windows(2).all(|w| w[0] <= w[1]), "alpha convex for {d}");
            assert!(
                sa.iter().all(|m| *m >= Rat::zero()),
                "alpha non-decreasing for {d}"
            );
            let sb = beta.slopes();
            assert!(sb.windows(2).all(|w| w[0] >= w[1]), "beta concave for {d}");
            let n = beta.values.len();
            assert!(beta.values[n - 1] >= alpha.values[n - 1], "beta(mu) >= alpha(mu)");
        }
    }
}

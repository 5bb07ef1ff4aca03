//! Divisor classes and surface lattice data.
//!
//! A [`DivisorClass`] is an exact rational coordinate vector over the ordered
//! basis `(H, E1, ..., Er)` of a blown-up plane (or over the declared basis
//! of a custom surface). A [`SurfaceDatum`] bundles the lattice rank, the
//! intersection form, an ample class, the canonical class, the negative
//! curves, and generators of the effective cone.
//!
//! Degree-multiplicity coordinates `(a; b1, ..., br)` denote the class
//! `a·H − Σ bj·Ej`; this is the convention used by the classical tables of
//! (−1)-curves and conic classes, and by the CLI boundary. Internally all
//! vectors are plain basis coordinates.

use crate::error::{Error, Result};
use crate::linalg::{self, rat, IntGram, QMatrix, QVector, Rat};
use num_traits::{One, Signed, Zero};
use serde_json::Value;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

/// A divisor class: exact rational coordinates over the lattice basis.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DivisorClass {
    coeffs: QVector,
}

impl DivisorClass {
    pub fn new(coeffs: QVector) -> Self {
        DivisorClass { coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        DivisorClass::new(QVector::zero(dim))
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        DivisorClass::new(QVector::from_i64(coeffs))
    }

    /// Class `a·H − Σ bj·Ej` from degree-multiplicity coordinates.
    pub fn from_ab(a: i64, b: &[i64]) -> Self {
        let mut c = Vec::with_capacity(b.len() + 1);
        c.push(a);
        c.extend(b.iter().map(|&x| -x));
        DivisorClass::from_i64(&c)
    }

    /// Rational variant of [`DivisorClass::from_ab`].
    pub fn from_ab_rat(a: Rat, b: Vec<Rat>) -> Self {
        let mut c = Vec::with_capacity(b.len() + 1);
        c.push(a);
        c.extend(b.into_iter().map(|x| -x));
        DivisorClass::new(QVector(c))
    }

    /// Degree-multiplicity coordinates `(a, [b1, ..., br])`.
    pub fn ab_coords(&self) -> (Rat, Vec<Rat>) {
        let a = self.coeffs.0[0].clone();
        let b = self.coeffs.0[1..].iter().map(|x| -x).collect();
        (a, b)
    }

    pub fn coeffs(&self) -> &QVector {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.is_integral()
    }

    pub fn is_primitive(&self) -> bool {
        self.coeffs
            .primitive_with_scale()
            .is_some_and(|(_, s)| s.is_one())
    }

    /// Primitive integral class on the same ray (None for the zero class).
    pub fn primitive(&self) -> Option<DivisorClass> {
        self.coeffs.primitive().map(DivisorClass::new)
    }

    pub fn add(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass::new(self.coeffs.add(&other.coeffs))
    }

    pub fn sub(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass::new(self.coeffs.sub(&other.coeffs))
    }

    pub fn scale(&self, k: &Rat) -> DivisorClass {
        DivisorClass::new(self.coeffs.scale(k))
    }

    pub fn neg(&self) -> DivisorClass {
        DivisorClass::new(self.coeffs.neg())
    }
}

impl fmt::Display for DivisorClass {
    /// Renders in the blowup-basis convention, e.g. `3H - E1 - E2`.
    /// Rational coefficients are parenthesized: `(1/2)H`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.dim())
            .map(|i| if i == 0 { "H".into() } else { format!("E{i}") })
            .collect();
        let mut wrote = false;
        for (i, c) in self.coeffs.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let coef = if mag.is_one() {
                String::new()
            } else if mag.is_integer() {
                mag.to_string()
            } else {
                format!("({mag})")
            };
            if !wrote {
                if c.is_negative() {
                    write!(f, "-{coef}{}", names[i])?;
                } else {
                    write!(f, "{coef}{}", names[i])?;
                }
            } else if c.is_negative() {
                write!(f, " - {coef}{}", names[i])?;
            } else {
                write!(f, " + {coef}{}", names[i])?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// How a surface was constructed; affects only presentation defaults.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SurfaceKind {
    /// Blowup of the plane in `r` general points.
    DelPezzo(usize),
    /// Loaded from user-provided lattice data.
    Custom,
}

/// Lattice data of a smooth projective surface with rational polyhedral
/// pseudo-effective cone.
pub struct SurfaceDatum {
    rank: usize,
    q: QMatrix,
    ample: DivisorClass,
    canonical: DivisorClass,
    negative_curves: Vec<DivisorClass>,
    eff_generators: Vec<DivisorClass>,
    kind: SurfaceKind,
    // Lazily built integer fast paths (present when all data is integral
    // and fits in i64) and the rational Gram matrix of negative curves.
    neg_gram_i64: OnceLock<Option<IntGram>>,
    neg_i64: OnceLock<Option<Vec<Vec<i64>>>>,
    neg_gram: OnceLock<QMatrix>,
}

impl Clone for SurfaceDatum {
    fn clone(&self) -> Self {
        SurfaceDatum {
            rank: self.rank,
            q: self.q.clone(),
            ample: self.ample.clone(),
            canonical: self.canonical.clone(),
            negative_curves: self.negative_curves.clone(),
            eff_generators: self.eff_generators.clone(),
            kind: self.kind,
            neg_gram_i64: OnceLock::new(),
            neg_i64: OnceLock::new(),
            neg_gram: OnceLock::new(),
        }
    }
}

impl fmt::Debug for SurfaceDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceDatum")
            .field("rank", &self.rank)
            .field("kind", &self.kind)
            .field("negative_curves", &self.negative_curves.len())
            .field("eff_generators", &self.eff_generators.len())
            .finish()
    }
}

impl SurfaceDatum {
    /// The blowup of the plane in `r` general points, `0 ≤ r ≤ 8`.
    ///
    /// Basis `(H, E1, ..., Er)`, intersection form `diag(1, −1, ..., −1)`,
    /// canonical class `K = −3H + ΣEj`, ample class `−K`. Negative curves
    /// are the (−1)-classes; the effective cone is generated by them
    /// together with the nef classes of self-intersection zero (redundant
    /// for `r ≥ 2` but kept so that `r = 0, 1` need no special casing).
    pub fn del_pezzo(r: usize) -> Result<SurfaceDatum> {
        if r > 8 {
            return Err(Error::OutOfRange(format!(
                "del Pezzo parameter r = {r} exceeds 8; beyond that the \
                 pseudo-effective cone is no longer rational polyhedral"
            )));
        }
        let rank = r + 1;
        let mut q = QMatrix::zero(rank, rank);
        q[(0, 0)] = rat(1);
        for i in 1..rank {
            q[(i, i)] = rat(-1);
        }
        let canonical = DivisorClass::from_i64(
            &std::iter::once(-3).chain(std::iter::repeat(1).take(r)).collect::<Vec<_>>(),
        );
        let ample = canonical.neg();
        let negative_curves = if r == 0 { Vec::new() } else { enumerate_negative_curves(r)? };
        let mut eff_generators = negative_curves.clone();
        if r == 0 {
            eff_generators.push(DivisorClass::from_i64(&[1]));
        } else {
            eff_generators.extend(enumerate_nef_nonbig(r)?);
        }
        eff_generators.sort();
        eff_generators.dedup();
        let s = SurfaceDatum {
            rank,
            q,
            ample,
            canonical,
            negative_curves,
            eff_generators,
            kind: SurfaceKind::DelPezzo(r),
            neg_gram_i64: OnceLock::new(),
            neg_i64: OnceLock::new(),
            neg_gram: OnceLock::new(),
        };
        s.validate()?;
        Ok(s)
    }

    /// Load a custom surface from its JSON description.
    ///
    /// Expected document shape:
    /// `{"rank": n, "intersection_matrix": [[...]], "ample": [...],
    ///   "canonical": [...], "negative_curves": [[...]],
    ///   "eff_generators": [[...]]}`
    /// with entries given as integers or `"p/q"` strings, all vectors in
    /// basis coordinates.
    pub fn from_json_str(text: &str) -> Result<SurfaceDatum> {
        let v: Value = serde_json::from_str(text)?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &Value) -> Result<SurfaceDatum> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidSurface("surface document must be a JSON object".into()))?;
        let rank = obj
            .get("rank")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidSurface("missing or non-integer \"rank\"".into()))?
            as usize;
        if rank == 0 {
            return Err(Error::InvalidSurface("\"rank\" must be positive".into()));
        }
        let q_rows = json_matrix(obj.get("intersection_matrix"), "intersection_matrix")?;
        let q = QMatrix::from_rows(q_rows)?;
        if q.rows != rank || q.cols != rank {
            return Err(Error::InvalidSurface(format!(
                "\"intersection_matrix\" must be {rank}x{rank}"
            )));
        }
        let ample = DivisorClass::new(QVector(json_vector(obj.get("ample"), "ample")?));
        let canonical = DivisorClass::new(QVector(json_vector(obj.get("canonical"), "canonical")?));
        let negative_curves = json_matrix(obj.get("negative_curves"), "negative_curves")?
            .into_iter()
            .map(|row| DivisorClass::new(QVector(row)))
            .collect::<Vec<_>>();
        let eff_generators = json_matrix(obj.get("eff_generators"), "eff_generators")?
            .into_iter()
            .map(|row| DivisorClass::new(QVector(row)))
            .collect::<Vec<_>>();
        let mut s = SurfaceDatum {
            rank,
            q,
            ample,
            canonical,
            negative_curves,
            eff_generators,
            kind: SurfaceKind::Custom,
            neg_gram_i64: OnceLock::new(),
            neg_i64: OnceLock::new(),
            neg_gram: OnceLock::new(),
        };
        s.validate()?;
        // An optional "delpezzo" label is honored only when the data really
        // is that surface, so a mislabeled document cannot masquerade.
        if let Some(label) = obj.get("delpezzo") {
            let r = label.as_u64().ok_or_else(|| {
                Error::InvalidSurface("\"delpezzo\" must be a non-negative integer".into())
            })? as usize;
            let reference = SurfaceDatum::del_pezzo(r)?;
            let same = s.rank == reference.rank
                && s.q == reference.q
                && s.ample == reference.ample
                && s.canonical == reference.canonical
                && sorted(&s.negative_curves) == sorted(&reference.negative_curves)
                && sorted(&s.eff_generators) == sorted(&reference.eff_generators);
            if !same {
                return Err(Error::InvalidSurface(format!(
                    "document labeled \"delpezzo\": {r} does not describe that surface"
                )));
            }
            s.kind = SurfaceKind::DelPezzo(r);
        }
        Ok(s)
    }

    /// Serialize in the same shape accepted by [`SurfaceDatum::from_json_value`].
    pub fn to_json_value(&self) -> Value {
        let vec_json = |d: &DivisorClass| {
            Value::Array(d.coeffs().0.iter().map(|x| Value::String(x.to_string())).collect())
        };
        let mat_json = |rows: &[DivisorClass]| Value::Array(rows.iter().map(vec_json).collect());
        let mut q_rows = Vec::with_capacity(self.rank);
        for i in 0..self.rank {
            q_rows.push(Value::Array(
                (0..self.rank)
                    .map(|j| Value::String(self.q[(i, j)].to_string()))
                    .collect(),
            ));
        }
        let mut doc = serde_json::json!({
            "rank": self.rank,
            "intersection_matrix": Value::Array(q_rows),
            "ample": vec_json(&self.ample),
            "canonical": vec_json(&self.canonical),
            "negative_curves": mat_json(&self.negative_curves),
            "eff_generators": mat_json(&self.eff_generators),
        });
        if let SurfaceKind::DelPezzo(r) = self.kind {
            doc["delpezzo"] = Value::from(r as u64);
        }
        doc
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSurface(msg));
        if !self.q.is_symmetric() {
            return bad("intersection matrix is not symmetric".into());
        }
        let (pos, neg, zero) = linalg::signature(&self.q)?;
        if (pos, neg, zero) != (1, self.rank - 1, 0) {
            return bad(format!(
                "intersection form must have signature (1, {}), found ({pos}, {neg}) with \
                 {zero}-dimensional radical",
                self.rank - 1
            ));
        }
        for d in [&self.ample, &self.canonical]
            .into_iter()
            .chain(&self.negative_curves)
            .chain(&self.eff_generators)
        {
            if d.dim() != self.rank {
                return bad(format!(
                    "class {d} has {} coordinates, expected {}",
                    d.dim(),
                    self.rank
                ));
            }
        }
        if !self.intersect(&self.ample, &self.ample).is_positive() {
            return bad("ample class must have positive self-intersection".into());
        }
        for g in &self.eff_generators {
            if !self.intersect(&self.ample, g).is_positive() {
                return bad(format!(
                    "ample class must pair positively with every effective generator; \
                     fails against {g}"
                ));
            }
        }
        for n in &self.negative_curves {
            if !self.intersect(n, n).is_negative() {
                return bad(format!("negative curve {n} must have negative self-intersection"));
            }
        }
        if self.eff_generators.is_empty() {
            return bad("effective cone needs at least one generator".into());
        }
        // Full-dimensionality: the generators must span the whole lattice.
        let mut rows: Vec<Vec<Rat>> =
            self.eff_generators.iter().map(|g| g.coeffs().0.clone()).collect();
        if linalg::rank_of_rows(&mut rows) != self.rank {
            return bad("effective generators do not span a full-dimensional cone".into());
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn q(&self) -> &QMatrix {
        &self.q
    }

    pub fn ample(&self) -> &DivisorClass {
        &self.ample
    }

    pub fn canonical(&self) -> &DivisorClass {
        &self.canonical
    }

    pub fn negative_curves(&self) -> &[DivisorClass] {
        &self.negative_curves
    }

    pub fn eff_generators(&self) -> &[DivisorClass] {
        &self.eff_generators
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    /// The intersection number `D1 · D2 = D1ᵀ Q D2`.
    pub fn intersect(&self, d1: &DivisorClass, d2: &DivisorClass) -> Rat {
        assert_eq!(d1.dim(), self.rank, "class dimension mismatch");
        assert_eq!(d2.dim(), self.rank, "class dimension mismatch");
        let mut acc = Rat::zero();
        for i in 0..self.rank {
            if d1.coeffs().0[i].is_zero() {
                continue;
            }
            for j in 0..self.rank {
                let qij = &self.q[(i, j)];
                if qij.is_zero() || d2.coeffs().0[j].is_zero() {
                    continue;
                }
                acc += &d1.coeffs().0[i] * qij * &d2.coeffs().0[j];
            }
        }
        acc
    }

    pub fn self_intersection(&self, d: &DivisorClass) -> Rat {
        self.intersect(d, d)
    }

    /// Gram matrix of the negative curves (rational, cached).
    pub fn neg_gram(&self) -> &QMatrix {
        self.neg_gram.get_or_init(|| {
            let n = self.negative_curves.len();
            let mut g = QMatrix::zero(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = self.intersect(&self.negative_curves[i], &self.negative_curves[j]);
                    g[(i, j)] = v.clone();
                    g[(j, i)] = v;
                }
            }
            g
        })
    }

    /// Integer Gram matrix of the negative curves, when the pairings are
    /// integral and fit in `i64`. Drives the fast chamber search.
    pub fn neg_gram_i64(&self) -> Option<&IntGram> {
        self.neg_gram_i64
            .get_or_init(|| {
                let g = self.neg_gram();
                let n = g.rows;
                let mut data = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        let v = &g[(i, j)];
                        if !v.is_integer() {
                            return None;
                        }
                        data.push(i64::try_from(v.numer()).ok()?);
                    }
                }
                IntGram::new(n, data).ok()
            })
            .as_ref()
    }

    /// Negative-curve coordinate vectors as `i64`, when integral.
    pub fn neg_i64(&self) -> Option<&Vec<Vec<i64>>> {
        self.neg_i64
            .get_or_init(|| {
                self.negative_curves
                    .iter()
                    .map(|c| {
                        c.coeffs()
                            .0
                            .iter()
                            .map(|x| {
                                if x.is_integer() {
                                    i64::try_from(x.numer()).ok()
                                } else {
                                    None
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .as_ref()
    }
}

fn json_rat(v: &Value, field: &str) -> Result<Rat> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(rat)
            .ok_or_else(|| Error::InvalidSurface(format!("\"{field}\" entries must be integers or \"p/q\" strings"))),
        Value::String(s) => linalg::parse_rat(s)
            .map_err(|_| Error::InvalidSurface(format!("\"{field}\" entry {s:?} is not a valid rational"))),
        _ => Err(Error::InvalidSurface(format!(
            "\"{field}\" entries must be integers or \"p/q\" strings"
        ))),
    }
}

fn sorted(classes: &[DivisorClass]) -> Vec<DivisorClass> {
    let mut out = classes.to_vec();
    out.sort();
    out
}

fn json_vector(v: Option<&Value>, field: &str) -> Result<Vec<Rat>> {
    v.and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidSurface(format!("missing or non-array \"{field}\"")))?
        .iter()
        .map(|x| json_rat(x, field))
        .collect()
}

fn json_matrix(v: Option<&Value>, field: &str) -> Result<Vec<Vec<Rat>>> {
    v.and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidSurface(format!("missing or non-array \"{field}\"")))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::InvalidSurface(format!("\"{field}\" rows must be arrays")))?
                .iter()
                .map(|x| json_rat(x, field))
                .collect()
        })
        .collect()
}

/// All (−1)-classes on the blowup of the plane in `r` general points,
/// `1 ≤ r ≤ 8`, sorted canonically.
///
/// These are the exceptional classes `Ej` together with the solutions of
/// `3a − Σbj = 1`, `Σbj² = a² + 1` with `a ≥ 1`, `bj ≥ 0` (only the `Ej`
/// have a negative multiplicity, namely −1 at their own point). The search
/// bound `a ≤ 7` follows from Cauchy–Schwarz:
/// `(3a−1)² = (Σb)² ≤ r·Σb² ≤ 8(a²+1)` forces `(a−7)(a+1) ≤ 0`.
pub fn enumerate_negative_curves(r: usize) -> Result<Vec<DivisorClass>> {
    enumerate_negative_curves_bounded(r, 7)
}

/// Same search with a caller-chosen degree bound (used by tests to verify
/// that no solutions exist beyond the proven bound).
pub fn enumerate_negative_curves_bounded(r: usize, a_max: i64) -> Result<Vec<DivisorClass>> {
    if !(1..=8).contains(&r) {
        return Err(Error::OutOfRange(format!(
            "negative-curve enumeration needs 1 <= r <= 8, got {r}"
        )));
    }
    let mut out = Vec::new();
    for j in 0..r {
        let mut b = vec![0i64; r];
        b[j] = -1;
        out.push(DivisorClass::from_ab(0, &b));
    }
    for a in 1..=a_max {
        let (sum, sumsq) = (3 * a - 1, a * a + 1);
        let mut b = vec![0i64; r];
        search_multiplicities(&mut b, 0, sum, sumsq, a, &mut |b| {
            out.push(DivisorClass::from_ab(a, b));
        });
    }
    out.sort();
    Ok(out)
}

/// All nef classes of self-intersection zero on the blowup of the plane in
/// `r` general points, `1 ≤ r ≤ 8`, sorted canonically.
///
/// Solutions of `3a − Σbj = 2`, `Σbj² = a²` with `a ≥ 1`, `bj ≥ 0` that
/// pair nonnegatively with every (−1)-class. Cauchy–Schwarz bounds the
/// degree: `(3a−2)² ≤ r·a²`, giving `a ≤ 5` for `r ≤ 7` and `a ≤ 11` for
/// `r = 8`. Every solution is automatically primitive: a proper divisor of
/// the class would pair with `K` in `{−1}`, impossible for an isotropic
/// class since `C² + K·C` is always even.
pub fn enumerate_nef_nonbig(r: usize) -> Result<Vec<DivisorClass>> {
    let a_max = if r == 8 { 11 } else { 5 };
    enumerate_nef_nonbig_bounded(r, a_max)
}

/// Same search with a caller-chosen degree bound (double-bound testing).
pub fn enumerate_nef_nonbig_bounded(r: usize, a_max: i64) -> Result<Vec<DivisorClass>> {
    if !(1..=8).contains(&r) {
        return Err(Error::OutOfRange(format!(
            "nef-non-big enumeration needs 1 <= r <= 8, got {r}"
        )));
    }
    let negs: Vec<Vec<i64>> = enumerate_negative_curves_bounded(r, a_max.max(7))?
        .iter()
        .map(|c| {
            let (a, b) = c.ab_coords();
            let mut v = vec![i64::try_from(a.numer()).unwrap()];
            v.extend(b.iter().map(|x| i64::try_from(x.numer()).unwrap()));
            v
        })
        .collect();
    let mut out = Vec::new();
    for a in 1..=a_max {
        let (sum, sumsq) = (3 * a - 2, a * a);
        if sum < 0 {
            continue;
        }
        let mut b = vec![0i64; r];
        search_multiplicities(&mut b, 0, sum, sumsq, a, &mut |b| {
            // Nefness against every negative curve: a·a' − Σ bj·bj' ≥ 0.
            let nef = negs.iter().all(|n| {
                let mut p = a * n[0];
                for (x, y) in b.iter().zip(&n[1..]) {
                    p -= x * y;
                }
                p >= 0
            });
            if nef {
                out.push(DivisorClass::from_ab(a, b));
            }
        });
    }
    out.sort();
    Ok(out)
}

/// Enumerate all `b` with `b[pos..]` free, `Σ b = sum`, `Σ b² = sumsq`,
/// `0 ≤ b[i] ≤ cap`, invoking `emit` on each complete solution.
fn search_multiplicities(
    b: &mut Vec<i64>,
    pos: usize,
    sum: i64,
    sumsq: i64,
    cap: i64,
    emit: &mut impl FnMut(&[i64]),
) {
    let slots = (b.len() - pos) as i64;
    if pos == b.len() {
        if sum == 0 && sumsq == 0 {
            emit(b);
        }
        return;
    }
    if sum < 0 || sumsq < 0 || sum > slots * cap {
        return;
    }
    // Remaining squares can't exceed sumsq, and (Σ remaining)² ≤ slots·Σ squares.
    if sum * sum > slots * sumsq {
        return;
    }
    let hi = cap.min(sum).min(int_sqrt(sumsq));
    for v in (0..=hi).rev() {
        b[pos] = v;
        search_multiplicities(b, pos + 1, sum - v, sumsq - v * v, cap, emit);
    }
    b[pos] = 0;
}

fn int_sqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as i64 + 1;
    while x * x > n {
        x -= 1;
    }
    x
}

/// The quadratic plane transformation based at three of the blown-up
/// points, as a lattice involution: `(a; b) ↦ (2a − bi − bj − bk; ...)`
/// with `bi ↦ a − bj − bk` etc. and all other coordinates fixed. Indices
/// are 1-based. Preserves the intersection form and the canonical class.
pub fn cremona(s: &SurfaceDatum, d: &DivisorClass, points: (usize, usize, usize)) -> Result<DivisorClass> {
    let SurfaceKind::DelPezzo(r) = s.kind() else {
        return Err(Error::OutOfRange("Cremona moves are defined on plane blowups only".into()));
    };
    let (i, j, k) = points;
    if r < 3 {
        return Err(Error::OutOfRange(format!(
            "Cremona moves need at least 3 blown-up points, surface has {r}"
        )));
    }
    if i == j || j == k || i == k || [i, j, k].iter().any(|&x| x < 1 || x > r) {
        return Err(Error::OutOfRange(format!(
            "Cremona indices must be distinct and in 1..={r}, got ({i}, {j}, {k})"
        )));
    }
    let (a, b) = d.ab_coords();
    let m = &b[i - 1] + &b[j - 1] + &b[k - 1];
    let a2 = rat(2) * &a - &m;
    let mut b2 = b.clone();
    b2[i - 1] = &a - &b[j - 1] - &b[k - 1];
    b2[j - 1] = &a - &b[i - 1] - &b[k - 1];
    b2[k - 1] = &a - &b[i - 1] - &b[j - 1];
    Ok(DivisorClass::from_ab_rat(a2, b2))
}

/// Closure of `{d}` under all Cremona moves and permutations of the
/// exceptional coordinates, computed by breadth-first search. Fails with
/// [`Error::OrbitBudgetExceeded`] once the orbit grows past `cap`.
pub fn weyl_orbit(s: &SurfaceDatum, d: &DivisorClass, cap: usize) -> Result<BTreeSet<DivisorClass>> {
    let SurfaceKind::DelPezzo(r) = s.kind() else {
        return Err(Error::OutOfRange("Weyl orbits are defined on plane blowups only".into()));
    };
    let mut seen: BTreeSet<DivisorClass> = BTreeSet::new();
    let mut queue: Vec<DivisorClass> = vec![d.clone()];
    seen.insert(d.clone());
    while let Some(cur) = queue.pop() {
        let push = |c: DivisorClass, seen: &mut BTreeSet<DivisorClass>, queue: &mut Vec<DivisorClass>| -> Result<()> {
            if seen.insert(c.clone()) {
                if seen.len() > cap {
                    return Err(Error::OrbitBudgetExceeded { cap, reached: seen.len() });
                }
                queue.push(c);
            }
            Ok(())
        };
        // Adjacent transpositions generate all permutations of the Ej.
        for t in 1..r {
            let (a, mut b) = cur.ab_coords();
            b.swap(t - 1, t);
            push(DivisorClass::from_ab_rat(a, b), &mut seen, &mut queue)?;
        }
        if r >= 3 {
            // One Cremona move plus permutations generates them all, but
            // applying every triple keeps the BFS shallow and is cheap.
            for i in 1..=r {
                for j in i + 1..=r {
                    for k in j + 1..=r {
                        push(cremona(s, &cur, (i, j, k))?, &mut seen, &mut queue)?;
                    }
                }
            }
        }
    }
    Ok(seen)
}

/// Arithmetic genus from adjunction: `(K·C + C²)/2 + 1`.
pub fn adjunction_genus(s: &SurfaceDatum, c: &DivisorClass) -> Rat {
    let two = rat(2);
    (s.intersect(s.canonical(), c) + s.self_intersection(c)) / two + Rat::one()
}

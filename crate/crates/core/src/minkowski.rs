//! Minkowski bases: the distinguished nef class of each Zariski chamber
//! with respect to a big and nef flag curve, the deduplicated basis those
//! classes form together with the nef non-big rays, basis cardinality
//! bookkeeping, and the greedy decomposition of nef divisors over the basis.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::cones::{face_lattice, ConeRep};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_nef_nonbig, DivisorClass, SurfaceDatum, SurfaceKind};
use crate::linalg::{cramer_i128, solve_linear, IntGram, QVector, Rat};
use crate::zariski::{count_chambers, is_nef, visit_chambers, ChamberSupport};

/// How the marked point of a flag sits on its curve.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PointModel {
    /// A general point of the curve: on no negative curve.  Basis
    /// construction requires this model.
    GeneralOnCurve,
    /// A special point lying on the listed negative curves (indices into
    /// the surface's negative-curve list).  Accepted for body sweeps;
    /// refused by basis construction.
    Incidence(BTreeSet<usize>),
}

/// An admissible flag `(C, x)`: a curve class together with a model of how
/// the point `x` sits on it.  The curve is validated to be nef with
/// `C² ≥ 0` at construction; operations that need bigness check it
/// themselves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    curve: DivisorClass,
    point: PointModel,
}

impl Flag {
    fn validate_curve(s: &SurfaceDatum, curve: &DivisorClass) -> Result<()> {
        if curve.is_zero() {
            return Err(Error::ZeroCurve);
        }
        if !is_nef(s, curve) || s.self_intersection(curve) < Rat::zero() {
            return Err(Error::NotNef(format!("{curve}")));
        }
        Ok(())
    }

    /// Flag with a general point on `curve`.
    pub fn general(s: &SurfaceDatum, curve: DivisorClass) -> Result<Flag> {
        Self::validate_curve(s, &curve)?;
        Ok(Flag { curve, point: PointModel::GeneralOnCurve })
    }

    /// Flag whose point lies on the given negative curves.
    pub fn incidence(
        s: &SurfaceDatum,
        curve: DivisorClass,
        on: impl IntoIterator<Item = usize>,
    ) -> Result<Flag> {
        Self::validate_curve(s, &curve)?;
        let mut set = BTreeSet::new();
        for i in on {
            if i >= s.negative_curves().len() {
                return Err(Error::OutOfRange(format!(
                    "incidence index {i} exceeds the negative-curve count {}",
                    s.negative_curves().len()
                )));
            }
            set.insert(i);
        }
        Ok(Flag { curve, point: PointModel::Incidence(set) })
    }

    pub fn curve(&self) -> &DivisorClass {
        &self.curve
    }

    pub fn point(&self) -> &PointModel {
        &self.point
    }

    pub fn is_general(&self) -> bool {
        matches!(self.point, PointModel::GeneralOnCurve)
    }
}

/// Where a basis element came from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    /// The primitive class of the flag curve itself.
    FlagCurve,
    /// A nef non-big extremal ray.
    NonBigRay,
    /// The distinguished element of the Zariski chamber with this negative
    /// support (sorted indices into the surface's negative-curve list).
    Chamber(Vec<usize>),
}

/// One element of a Minkowski basis with everything that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub class: DivisorClass,
    pub provenance: Vec<Provenance>,
}

/// A Minkowski basis: deduplicated, canonically sorted primitive integral
/// nef classes.
#[derive(Clone, Debug)]
pub struct MinkowskiBasis {
    elements: Vec<BasisElement>,
}

impl MinkowskiBasis {
    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn classes(&self) -> impl Iterator<Item = &DivisorClass> {
        self.elements.iter().map(|e| &e.class)
    }

    pub fn contains(&self, d: &DivisorClass) -> bool {
        self.position(d).is_some()
    }

    pub fn position(&self, d: &DivisorClass) -> Option<usize> {
        self.elements.binary_search_by(|e| e.class.cmp(d)).ok()
    }
}

/// Cardinality bookkeeping for a basis.  The two closed-form readings are
/// both reported; nothing is reconciled silently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CardinalityReport {
    /// Number of nef non-big extremal rays.
    pub nnb: u64,
    /// Number of Zariski chambers (the nef chamber included).
    pub zar: u64,
    /// Σ fᵢ of the nef slice, when faces were requested.
    pub sum_f: Option<u64>,
    /// Size of the deduplicated Minkowski basis.
    pub mb_count: u64,
    /// First closed-form reading: NnB + Zar.
    pub nnb_plus_zar: u64,
    /// Second closed-form reading: 1 + NnB + Zar.
    pub one_plus_nnb_plus_zar: u64,
}

fn require_big_nef(s: &SurfaceDatum, c: &DivisorClass) -> Result<()> {
    if !is_nef(s, c) || !(s.self_intersection(c) > Rat::zero()) {
        return Err(Error::NotBigNef(format!("{c}")));
    }
    Ok(())
}

fn require_general(flag: &Flag) -> Result<()> {
    if flag.is_general() {
        Ok(())
    } else {
        Err(Error::GeneralPointRequired)
    }
}

/// Chamber element for a validated big nef curve, without re-validating the
/// curve (hot path: called once per chamber).
fn element_for_support(
    s: &SurfaceDatum,
    curves: &[usize],
    curve: &DivisorClass,
) -> Result<DivisorClass> {
    if curves.is_empty() {
        return Ok(curve.primitive().expect("big classes are nonzero"));
    }
    let support = ChamberSupport::from_sorted_unchecked(curves.to_vec());
    let gram = support.gram(s);
    let rhs = QVector(
        curves.iter().map(|&i| -s.intersect(curve, &s.negative_curves()[i])).collect(),
    );
    let a = solve_linear(&gram, &rhs).map_err(|_| {
        Error::Internal(format!(
            "negative-definite Gram matrix of support {curves:?} reported as singular"
        ))
    })?;
    let mut m = curve.clone();
    for (k, &i) in curves.iter().enumerate() {
        if a.0[k] < Rat::zero() {
            return Err(Error::Internal(format!(
                "chamber element for support {curves:?} has negative coefficient {} on {}",
                a.0[k],
                s.negative_curves()[i]
            )));
        }
        m = m.add(&s.negative_curves()[i].scale(&a.0[k]));
    }
    // Orthogonality to the support is forced by the solve; nefness against
    // nef generators follows from a ≥ 0, but custom surfaces may pair
    // negative curves negatively, so check outright.
    if !is_nef(s, &m) {
        return Err(Error::Internal(format!("chamber element {m} is not nef")));
    }
    Ok(m.primitive().expect("chamber element of a big class is nonzero"))
}

/// The distinguished nef class of a Zariski chamber with respect to a big
/// and nef curve `C`.
///
/// Solving `Gram(c)·a = −d·(C·N₁, …, C·N_k)ᵀ` makes `M = d·C + Σ aᵢNᵢ`
/// orthogonal to every support curve; the scale `d` is chosen as the least
/// positive rational making `M` primitive integral.  The coefficients `aᵢ`
/// are nonnegative (the inverse of a negative-definite Gram matrix of
/// curves has nonpositive entries) and `M` is nef; both facts are checked
/// and a violation — possible only for inconsistent custom data — is an
/// internal error.
pub fn minkowski_element(
    s: &SurfaceDatum,
    c: &ChamberSupport,
    curve: &DivisorClass,
) -> Result<DivisorClass> {
    require_big_nef(s, curve)?;
    element_for_support(s, c.curves(), curve)
}

/// Nef non-big primitive classes of the surface: the isotropic extremal
/// rays of the nef cone.
fn nef_nonbig_classes(s: &SurfaceDatum) -> Result<Vec<DivisorClass>> {
    match s.kind() {
        // The projective plane has no isotropic nef rays.
        SurfaceKind::DelPezzo(0) => Ok(Vec::new()),
        SurfaceKind::DelPezzo(r) => enumerate_nef_nonbig(r),
        SurfaceKind::Custom => {
            let nef = ConeRep::nef(s)?;
            Ok(nef
                .generator_classes()
                .into_iter()
                .filter(|c| s.self_intersection(c).is_zero())
                .collect())
        }
    }
}

/// Fixed-size key for the integer fast path; ranks above this fall back to
/// exact rational classes.
const FAST_RANK_CAP: usize = 12;
type FastKey = [i64; FAST_RANK_CAP];

/// Precomputed context for computing chamber elements in pure `i128`
/// arithmetic (Cramer solves on the integer Gram matrix).  Only available
/// when the surface data, the flag curve, and all pairings fit in machine
/// integers, and when nefness of the produced elements is structurally
/// guaranteed or checkable in integers.
struct FastCtx<'a> {
    gram: &'a IntGram,
    neg: &'a [Vec<i64>],
    curve: Vec<i64>,
    curve_dot_neg: Vec<i64>,
    rank: usize,
    /// `Q·N_j` rows for explicit integer nef checks; `None` when every
    /// off-diagonal Gram entry is ≥ 0, which makes the checks redundant.
    qneg: Option<Vec<Vec<i64>>>,
}

fn rat_to_i64(x: &Rat) -> Option<i64> {
    if !x.is_integer() {
        return None;
    }
    x.to_integer().to_i64()
}

fn class_to_i64(d: &DivisorClass) -> Option<Vec<i64>> {
    d.coeffs().0.iter().map(rat_to_i64).collect()
}

fn build_fast_ctx<'a>(s: &'a SurfaceDatum, curve: &DivisorClass) -> Option<FastCtx<'a>> {
    let rank = s.rank();
    if rank > FAST_RANK_CAP {
        return None;
    }
    let gram = s.neg_gram_i64()?;
    let neg = s.neg_i64()?.as_slice();
    let curve_i64 = class_to_i64(curve)?;
    let curve_dot_neg: Vec<i64> = s
        .negative_curves()
        .iter()
        .map(|n| rat_to_i64(&s.intersect(curve, n)))
        .collect::<Option<Vec<_>>>()?;
    // The fast path skips pairing the produced element against nef
    // generators (aᵢ ≥ 0 plus nefness of C make those pairings
    // automatically ≥ 0), so every effective generator must be either nef
    // or a listed negative curve for the skip to be sound.
    let neg_set: BTreeSet<&DivisorClass> = s.negative_curves().iter().collect();
    for g in s.eff_generators() {
        if !neg_set.contains(g) && !is_nef(s, g) {
            return None;
        }
    }
    let n = gram.n();
    let mut all_offdiag_nonneg = true;
    'outer: for i in 0..n {
        for j in 0..n {
            if i != j && gram.at(i, j) < 0 {
                all_offdiag_nonneg = false;
                break 'outer;
            }
        }
    }
    let qneg = if all_offdiag_nonneg {
        // Distinct negative curves pair ≥ 0, so M·N = C·N + Σ aᵢ NᵢN ≥ 0
        // holds for every curve outside the support and exactly 0 inside:
        // no per-element check needed.
        None
    } else {
        let q = s.q();
        let mut rows = Vec::with_capacity(n);
        for c in s.negative_curves() {
            let qn = q.mul_vec(c.coeffs()).ok()?;
            rows.push(qn.0.iter().map(rat_to_i64).collect::<Option<Vec<i64>>>()?);
        }
        Some(rows)
    };
    Some(FastCtx { gram, neg, curve: curve_i64, curve_dot_neg, rank, qneg })
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    a.abs().gcd(&b.abs())
}

impl FastCtx<'_> {
    /// Chamber element as a primitive integral coordinate vector, or
    /// `Ok(None)` when `i128` overflowed and the caller must fall back to
    /// rational arithmetic.
    fn element(&self, curves: &[usize]) -> Result<Option<Vec<i64>>> {
        let k = curves.len();
        let mut v: Vec<i128>;
        if k == 0 {
            v = self.curve.iter().map(|&x| x as i128).collect();
        } else {
            let a: Vec<Vec<i128>> = curves
                .iter()
                .map(|&i| curves.iter().map(|&j| self.gram.at(i, j) as i128).collect())
                .collect();
            let b: Vec<i128> = curves.iter().map(|&i| -(self.curve_dot_neg[i] as i128)).collect();
            let Some((nums, mut det)) = cramer_i128(&a, &b) else {
                return Ok(None);
            };
            let mut nums = nums;
            if det < 0 {
                det = -det;
                for x in &mut nums {
                    *x = -*x;
                }
            }
            for (t, &i) in nums.iter().zip(curves) {
                if *t < 0 {
                    return Err(Error::Internal(format!(
                        "chamber element for support {curves:?} has negative coefficient \
                         {t}/{det} on {}",
                        self.neg[i].iter().map(i64::to_string).collect::<Vec<_>>().join(",")
                    )));
                }
            }
            // det·C + Σ numsᵢ·Nᵢ, a positive multiple of the element.
            v = Vec::with_capacity(self.rank);
            for j in 0..self.rank {
                let mut acc = det.checked_mul(self.curve[j] as i128);
                for (t, &i) in nums.iter().zip(curves) {
                    acc = acc.and_then(|x| {
                        t.checked_mul(self.neg[i][j] as i128).and_then(|y| x.checked_add(y))
                    });
                }
                match acc {
                    Some(x) => v.push(x),
                    None => return Ok(None),
                }
            }
        }
        let g = v.iter().fold(0i128, |acc, &x| gcd_i128(acc, x));
        if g == 0 {
            return Err(Error::Internal("chamber element vanished".to_string()));
        }
        for x in &mut v {
            *x /= g;
        }
        if let Some(qneg) = &self.qneg {
            for (j, qn) in qneg.iter().enumerate() {
                let mut acc: i128 = 0;
                for (x, &c) in v.iter().zip(qn) {
                    match x.checked_mul(c as i128).and_then(|y| acc.checked_add(y)) {
                        Some(s) => acc = s,
                        None => return Ok(None),
                    }
                }
                if acc < 0 && !curves.contains(&j) {
                    return Err(Error::Internal(format!(
                        "chamber element for support {curves:?} is not nef against curve {j}"
                    )));
                }
            }
        }
        // i128 → i64 narrowing can fail after large intermediate values;
        // fall back to rational arithmetic in that case.
        Ok(v.iter().map(|&x| x.to_i64()).collect::<Option<Vec<i64>>>())
    }
}

fn key_of(coords: &[i64]) -> FastKey {
    let mut k = [0i64; FAST_RANK_CAP];
    k[..coords.len()].copy_from_slice(coords);
    k
}

/// The Minkowski basis of the surface with respect to a general-point flag:
/// the primitive class of the flag curve, every nef non-big primitive
/// class, and the distinguished element of every Zariski chamber,
/// deduplicated and sorted, each with full provenance.
pub fn minkowski_basis(s: &SurfaceDatum, flag: &Flag) -> Result<MinkowskiBasis> {
    require_general(flag)?;
    require_big_nef(s, flag.curve())?;
    let curve = flag.curve();

    let mut by_class: BTreeMap<DivisorClass, Vec<Provenance>> = BTreeMap::new();
    let mut by_key: BTreeMap<FastKey, Vec<Provenance>> = BTreeMap::new();
    let fast = build_fast_ctx(s, curve);

    let prim_c = curve.primitive().expect("big classes are nonzero");
    match &fast {
        Some(_) => by_key
            .entry(key_of(&class_to_i64(&prim_c).expect("integral in fast mode")))
            .or_default()
            .push(Provenance::FlagCurve),
        None => by_class.entry(prim_c.clone()).or_default().push(Provenance::FlagCurve),
    }
    for nnb in nef_nonbig_classes(s)? {
        match &fast {
            Some(_) => by_key
                .entry(key_of(&class_to_i64(&nnb).ok_or_else(|| {
                    Error::Internal(format!("nef non-big class {nnb} is not machine-integral"))
                })?))
                .or_default()
                .push(Provenance::NonBigRay),
            None => by_class.entry(nnb).or_default().push(Provenance::NonBigRay),
        }
    }

    visit_chambers(s, |sup| {
        let prov = Provenance::Chamber(sup.to_vec());
        if let Some(ctx) = &fast {
            if let Some(coords) = ctx.element(sup)? {
                by_key.entry(key_of(&coords)).or_default().push(prov);
                return Ok(());
            }
        }
        let class = element_for_support(s, sup, curve)?;
        by_class.entry(class).or_default().push(prov);
        Ok(())
    })?;

    for (key, prov) in by_key {
        by_class.entry(DivisorClass::from_i64(&key[..s.rank()])).or_default().extend(prov);
    }
    let mut elements: Vec<BasisElement> = by_class
        .into_iter()
        .map(|(class, mut provenance)| {
            provenance.sort();
            provenance.dedup();
            BasisElement { class, provenance }
        })
        .collect();
    elements.sort_by(|a, b| a.class.cmp(&b.class));
    Ok(MinkowskiBasis { elements })
}

/// Basis cardinality together with the chamber and ray counts and both
/// closed-form readings.  `with_faces` additionally computes Σ fᵢ of the
/// nef slice (feasible for small rank only).
pub fn cardinality_report(s: &SurfaceDatum, flag: &Flag, with_faces: bool) -> Result<CardinalityReport> {
    require_general(flag)?;
    require_big_nef(s, flag.curve())?;
    let curve = flag.curve();

    let nnb_classes = nef_nonbig_classes(s)?;
    let nnb = nnb_classes.len() as u64;
    let zar = count_chambers(s)?;

    // Deduplicated element count, streamed without provenance.
    let fast = build_fast_ctx(s, curve);
    let mb_count: u64 = match &fast {
        Some(ctx) => {
            let mut keys: Vec<FastKey> = Vec::with_capacity(zar as usize + nnb as usize + 1);
            let prim_c = curve.primitive().expect("big classes are nonzero");
            keys.push(key_of(&class_to_i64(&prim_c).expect("integral in fast mode")));
            for c in &nnb_classes {
                keys.push(key_of(&class_to_i64(c).ok_or_else(|| {
                    Error::Internal(format!("nef non-big class {c} is not machine-integral"))
                })?));
            }
            let mut slow_classes: BTreeSet<DivisorClass> = BTreeSet::new();
            visit_chambers(s, |sup| {
                match ctx.element(sup)? {
                    Some(coords) => keys.push(key_of(&coords)),
                    None => {
                        slow_classes.insert(element_for_support(s, sup, curve)?);
                    }
                }
                Ok(())
            })?;
            keys.sort_unstable();
            keys.dedup();
            for k in &keys {
                slow_classes.remove(&DivisorClass::from_i64(&k[..s.rank()]));
            }
            keys.len() as u64 + slow_classes.len() as u64
        }
        None => {
            let mut set: BTreeSet<DivisorClass> = BTreeSet::new();
            set.insert(curve.primitive().expect("big classes are nonzero"));
            set.extend(nnb_classes.iter().cloned());
            visit_chambers(s, |sup| {
                set.insert(element_for_support(s, sup, curve)?);
                Ok(())
            })?;
            set.len() as u64
        }
    };

    let sum_f = if with_faces {
        let lat = face_lattice(s, s.ample())?;
        Some(lat.f_vector.iter().sum())
    } else {
        None
    };

    Ok(CardinalityReport {
        nnb,
        zar,
        sum_f,
        mb_count,
        nnb_plus_zar: nnb + zar,
        one_plus_nnb_plus_zar: 1 + nnb + zar,
    })
}

/// Greedy decomposition of a nef divisor over the Minkowski basis of the
/// flag: `D = Σ tᵢ·Pᵢ` with `tᵢ ≥ 0`, at most ρ terms, reconstructing `D`
/// exactly.
///
/// Each round takes the distinguished element `M` of the chamber whose
/// support is `Null(D) = {N : D·N = 0}` and strips `t* = max{t : D − t·M`
/// nef`}`; the face of the nef cone containing the remainder strictly
/// shrinks, so the loop ends.  A square-zero remainder lies on a nef
/// non-big extremal ray, which is always a basis element.
pub fn decompose_nef(
    s: &SurfaceDatum,
    flag: &Flag,
    d: &DivisorClass,
) -> Result<Vec<(DivisorClass, Rat)>> {
    require_general(flag)?;
    require_big_nef(s, flag.curve())?;
    if !is_nef(s, d) {
        return Err(Error::NotNef(format!("{d}")));
    }
    let curve = flag.curve();
    let nnb_set: BTreeSet<DivisorClass> = nef_nonbig_classes(s)?.into_iter().collect();

    let mut rest = d.clone();
    let mut out: Vec<(DivisorClass, Rat)> = Vec::new();
    for _ in 0..=s.rank() {
        if rest.is_zero() {
            return Ok(out);
        }
        let sq = s.self_intersection(&rest);
        if sq < Rat::zero() {
            return Err(Error::Internal(format!(
                "nef remainder {rest} acquired negative self-intersection"
            )));
        }
        if sq.is_zero() {
            // The remainder is nef with square zero, hence lies on an
            // isotropic extremal ray of the nef cone.
            let (prim_vec, scale) =
                rest.coeffs().primitive_with_scale().expect("nonzero remainder");
            let prim = DivisorClass::new(prim_vec);
            if !nnb_set.contains(&prim) {
                return Err(Error::NonBasisRay(format!("{prim}")));
            }
            out.push((prim, scale));
            return Ok(out);
        }
        // Null(D): negative curves orthogonal to the (big) remainder; its
        // Gram matrix is negative definite because rest² > 0.
        let null: Vec<usize> = (0..s.negative_curves().len())
            .filter(|&i| s.intersect(&rest, &s.negative_curves()[i]).is_zero())
            .collect();
        let m = element_for_support(s, &null, curve)?;
        let mut tstar: Option<Rat> = None;
        for g in s.eff_generators() {
            let mg = s.intersect(&m, g);
            if mg > Rat::zero() {
                let candidate = s.intersect(&rest, g) / mg;
                if tstar.as_ref().is_none_or(|t| candidate < *t) {
                    tstar = Some(candidate);
                }
            }
        }
        let Some(t) = tstar else {
            return Err(Error::Internal(format!(
                "chamber element {m} pairs to zero with every effective generator"
            )));
        };
        if t <= Rat::zero() {
            return Err(Error::Internal(format!(
                "decomposition stalled: stripping coefficient {t} of {m}"
            )));
        }
        rest = rest.sub(&m.scale(&t));
        out.push((m, t));
    }
    Err(Error::Internal(format!(
        "decomposition of {d} did not terminate within rank+1 rounds"
    )))
}

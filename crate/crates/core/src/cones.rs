//! Exact polyhedral cone computations in the Néron–Severi space: cone
//! duality by the double description method, membership tests against an
//! H-description, and the face lattice of the compact nef slice.
//!
//! All cones here live under the ambient intersection pairing `Q` of a
//! [`SurfaceDatum`]: an inequality vector `v` means `x` satisfies
//! `v·Q·x ≥ 0`, and generators are rays under the same pairing.  Everything
//! is exact rational arithmetic; there is no epsilon anywhere.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, SurfaceDatum};
use crate::linalg::{solve_linear, QMatrix, QVector, Rat};

/// Default cap on the number of faces `face_lattice` will enumerate before
/// reporting a budget error.  Chamber counting, not the face lattice, is the
/// intended tool at high rank, so the cap only needs to be generous for
/// small ranks.
pub const DEFAULT_FACE_BUDGET: usize = 200_000;

/// Pairing of two coordinate vectors under `q`, skipping zero entries.
fn pair(q: &QMatrix, a: &QVector, b: &QVector) -> Rat {
    let mut acc = Rat::zero();
    for i in 0..q.rows {
        if a.0[i].is_zero() {
            continue;
        }
        for j in 0..q.cols {
            if q[(i, j)].is_zero() || b.0[j].is_zero() {
                continue;
            }
            acc += &a.0[i] * &q[(i, j)] * &b.0[j];
        }
    }
    acc
}

/// A rational polyhedral cone attached to a surface's pairing.
///
/// The V-description (`generators`) is always present, canonicalized to
/// primitive integral vectors, sorted, and deduplicated.  The H-description
/// (`inequalities`) is optional and computed on demand; each inequality
/// vector `v` constrains `x` by `v·Q·x ≥ 0`.  When both descriptions are
/// supplied at construction they are cross-validated (every generator must
/// satisfy every inequality).
#[derive(Clone, Debug)]
pub struct ConeRep<'a> {
    ambient: &'a SurfaceDatum,
    generators: Vec<QVector>,
    inequalities: Option<Vec<QVector>>,
}

/// Result of a membership test against a cone's H-description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Strictly inside: every inequality holds strictly.
    Interior,
    /// On the boundary: the listed inequality vectors are tight (pair to
    /// exactly zero), all others hold strictly.
    Boundary { tight: Vec<QVector> },
    /// At least one inequality is violated.
    Outside,
}

fn canonicalize_rays(mut rays: Vec<QVector>) -> Vec<QVector> {
    let mut out: Vec<QVector> = Vec::with_capacity(rays.len());
    for v in rays.drain(..) {
        if let Some(p) = v.primitive() {
            out.push(p);
        }
    }
    out.sort();
    out.dedup();
    out
}

impl<'a> ConeRep<'a> {
    /// Cone spanned by the given coordinate vectors.  Zero vectors are
    /// dropped; the rest are primitivized, sorted, and deduplicated.
    pub fn from_qvectors(ambient: &'a SurfaceDatum, generators: Vec<QVector>) -> Result<ConeRep<'a>> {
        let n = ambient.rank();
        for g in &generators {
            if g.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "cone generator has length {}, ambient rank is {}",
                    g.len(),
                    n
                )));
            }
        }
        Ok(ConeRep { ambient, generators: canonicalize_rays(generators), inequalities: None })
    }

    /// Cone spanned by the given divisor classes.
    pub fn from_generators(ambient: &'a SurfaceDatum, generators: &[DivisorClass]) -> Result<ConeRep<'a>> {
        Self::from_qvectors(ambient, generators.iter().map(|d| d.coeffs().clone()).collect())
    }

    /// Cone with both descriptions supplied.  The descriptions are
    /// cross-validated for consistency: every generator must satisfy every
    /// inequality.
    pub fn with_inequalities(
        ambient: &'a SurfaceDatum,
        generators: Vec<QVector>,
        inequalities: Vec<QVector>,
    ) -> Result<ConeRep<'a>> {
        let mut cone = Self::from_qvectors(ambient, generators)?;
        let n = ambient.rank();
        for v in &inequalities {
            if v.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "inequality vector has length {}, ambient rank is {}",
                    v.len(),
                    n
                )));
            }
            for g in &cone.generators {
                if pair(ambient.q(), v, g) < Rat::zero() {
                    return Err(Error::InvalidSurface(format!(
                        "cone descriptions disagree: generator {:?} violates inequality {:?}",
                        g.0, v.0
                    )));
                }
            }
        }
        cone.inequalities = Some(canonicalize_rays(inequalities));
        Ok(cone)
    }

    /// The pseudo-effective cone of the surface, spanned by its declared
    /// effective generators.
    pub fn effective(ambient: &'a SurfaceDatum) -> Result<ConeRep<'a>> {
        Self::from_generators(ambient, ambient.eff_generators())
    }

    /// The nef cone of the surface: the dual of the effective cone, with
    /// the effective generators preinstalled as its H-description.
    pub fn nef(ambient: &'a SurfaceDatum) -> Result<ConeRep<'a>> {
        let mut dual = dual_cone(&Self::effective(ambient)?)?;
        // The dual of the dual would reproduce only the extremal effective
        // rays; the full declared generator list is an equally valid (if
        // redundant) H-description and is cheaper to keep.
        dual.inequalities =
            Some(canonicalize_rays(ambient.eff_generators().iter().map(|d| d.coeffs().clone()).collect()));
        Ok(dual)
    }

    pub fn ambient(&self) -> &'a SurfaceDatum {
        self.ambient
    }

    /// Extremal ray / generator list (primitive, sorted).
    pub fn generators(&self) -> &[QVector] {
        &self.generators
    }

    /// Generators as divisor classes.
    pub fn generator_classes(&self) -> Vec<DivisorClass> {
        self.generators.iter().map(|v| DivisorClass::new(v.clone())).collect()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient.rank()
    }

    /// Dimension of the linear span of the cone.
    pub fn dim(&self) -> usize {
        let mut rows: Vec<Vec<Rat>> = self.generators.iter().map(|g| g.0.clone()).collect();
        crate::linalg::rank_of_rows(&mut rows)
    }

    /// The H-description, computing it via [`dual_cone`] on first use.
    pub fn inequalities(&mut self) -> Result<&[QVector]> {
        if self.inequalities.is_none() {
            let dual = dual_cone(self)?;
            self.inequalities = Some(dual.generators);
        }
        Ok(self.inequalities.as_ref().expect("just installed").as_slice())
    }

    /// Classify `x` against this cone.  Requires an H-description, which is
    /// computed on demand (hence `&mut self`).
    pub fn membership(&mut self, x: &QVector) -> Result<Membership> {
        if x.len() != self.ambient.rank() {
            return Err(Error::DimensionMismatch(format!(
                "point has length {}, ambient rank is {}",
                x.len(),
                self.ambient.rank()
            )));
        }
        let ambient: &'a SurfaceDatum = self.ambient;
        let q = ambient.q();
        let ineqs = self.inequalities()?;
        let mut tight = Vec::new();
        for v in ineqs {
            let p = pair(q, v, x);
            if p < Rat::zero() {
                return Ok(Membership::Outside);
            }
            if p.is_zero() {
                tight.push(v.clone());
            }
        }
        if tight.is_empty() {
            Ok(Membership::Interior)
        } else {
            Ok(Membership::Boundary { tight })
        }
    }
}

/// One ray of an intermediate double-description pair, with the set of
/// already-processed inequalities it is tight against.
struct DdRay {
    v: QVector,
    tight: Vec<u64>,
}

fn bit_set(words: &mut [u64], i: usize) {
    words[i / 64] |= 1u64 << (i % 64);
}

fn bit_and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bit_is_subset(sub: &[u64], sup: &[u64]) -> bool {
    sub.iter().zip(sup).all(|(x, y)| x & !y == 0)
}

/// The dual cone `{x : x·Q·g ≥ 0 for every generator g of c}`, computed by
/// incremental double description over exact rationals.
///
/// The input must span the ambient space: a lower-dimensional span would
/// make the dual non-pointed (it would contain the span's orthogonal
/// complement as lineality), and non-pointed cones are out of scope.  The
/// returned cone's extremal rays are primitive integral vectors, sorted;
/// its H-description is set to the input generators.
pub fn dual_cone<'a>(c: &ConeRep<'a>) -> Result<ConeRep<'a>> {
    let rays = double_description(c.ambient.q(), &c.generators)?;
    Ok(ConeRep { ambient: c.ambient, generators: rays, inequalities: Some(c.generators.clone()) })
}

/// Double-description core: extremal rays of `{x : g·Q·x ≥ 0 ∀ g}` for an
/// arbitrary symmetric nonsingular pairing `q`.  Kept separate from
/// [`dual_cone`] so the polyhedral machinery can be exercised under
/// pairings (such as the standard inner product) that no surface datum can
/// carry.
pub(crate) fn double_description(q: &QMatrix, generators: &[QVector]) -> Result<Vec<QVector>> {
    let n = q.rows;
    if generators.is_empty() {
        return Err(Error::DegenerateCone("cone has no nonzero generators".to_string()));
    }
    // Functionals of the halfspaces: f_i(x) = g_i·Q·x, i.e. the covector
    // Q·g_i (Q is symmetric).
    let funcs: Vec<QVector> =
        generators.iter().map(|g| q.mul_vec(g)).collect::<Result<Vec<_>>>()?;
    let m = funcs.len();
    let words = m.div_ceil(64);

    // Select n linearly independent functionals for the initial simplicial
    // cone, tracking which original indices supplied pivots.
    let mut reduced: Vec<QVector> = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    for (i, f) in funcs.iter().enumerate() {
        if reduced.len() == n {
            break;
        }
        let mut v = f.clone();
        for r in &reduced {
            let pivot = r.0.iter().position(|x| !x.is_zero()).expect("reduced rows are nonzero");
            if !v.0[pivot].is_zero() {
                let factor = &v.0[pivot] / &r.0[pivot];
                for k in 0..n {
                    let t = &r.0[k] * &factor;
                    v.0[k] -= t;
                }
            }
        }
        if !v.is_zero() {
            reduced.push(v);
            chosen.push(i);
        }
    }
    if chosen.len() < n {
        return Err(Error::DegenerateCone(format!(
            "generators span a {}-dimensional subspace of the rank-{} lattice; \
             the dual would not be pointed",
            chosen.len(),
            n
        )));
    }

    // Initial rays: columns of B⁻¹ where B stacks the chosen functionals,
    // so ray j satisfies f_chosen[k](r_j) = δ_{kj} ≥ 0.
    let b = QMatrix::from_rows(
        chosen.iter().map(|&i| funcs[i].0.clone()).collect::<Vec<_>>(),
    )?;
    let mut rays: Vec<DdRay> = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = QVector::zero(n);
        e.0[j] = Rat::from_integer(1.into());
        let r = solve_linear(&b, &e)?;
        let prim = r.primitive().expect("basis solution is nonzero");
        let mut tight = vec![0u64; words];
        for (k, &orig) in chosen.iter().enumerate() {
            if k != j {
                bit_set(&mut tight, orig);
            }
        }
        rays.push(DdRay { v: prim, tight });
    }

    // Insert the remaining halfspaces one at a time.
    let mut chosen_mask = vec![false; m];
    for &i in &chosen {
        chosen_mask[i] = true;
    }
    for (i, f) in funcs.iter().enumerate() {
        if chosen_mask[i] {
            continue;
        }
        let vals: Vec<Rat> = rays.iter().map(|r| f.dot(&r.v)).collect();
        let mut pos = Vec::new();
        let mut zero = Vec::new();
        let mut neg = Vec::new();
        for (k, val) in vals.iter().enumerate() {
            if val.is_zero() {
                zero.push(k);
            } else if *val > Rat::zero() {
                pos.push(k);
            } else {
                neg.push(k);
            }
        }
        if neg.is_empty() {
            for &k in &zero {
                bit_set(&mut rays[k].tight, i);
            }
            continue;
        }
        let mut next: Vec<DdRay> = Vec::with_capacity(pos.len() + zero.len());
        // New rays arise only from adjacent (positive, negative) pairs:
        // the pair is adjacent iff no third ray is tight on everything the
        // pair is jointly tight on.
        let mut created: Vec<DdRay> = Vec::new();
        for &p in &pos {
            for &ng in &neg {
                let common = bit_and(&rays[p].tight, &rays[ng].tight);
                let adjacent = rays.iter().enumerate().all(|(t, r)| {
                    t == p || t == ng || !bit_is_subset(&common, &r.tight)
                });
                if !adjacent {
                    continue;
                }
                // val(p)·r_ng − val(ng)·r_p: kills f, stays inside all
                // inequalities both parents satisfy.
                let w = rays[ng].v.scale(&vals[p]).sub(&rays[p].v.scale(&vals[ng]));
                let prim = w.primitive().expect("combination of adjacent rays is nonzero");
                // Recompute honest tight bits against every processed
                // inequality; the combinatorial adjacency test above needs
                // them exact.
                let mut tight = vec![0u64; words];
                for (j2, f2) in funcs.iter().enumerate() {
                    let processed = j2 < i || chosen_mask[j2];
                    if processed && f2.dot(&prim).is_zero() {
                        bit_set(&mut tight, j2);
                    }
                }
                bit_set(&mut tight, i);
                created.push(DdRay { v: prim, tight });
            }
        }
        for k in (0..rays.len()).rev() {
            if neg.contains(&k) {
                rays.remove(k);
            }
        }
        for r in &mut rays {
            if f.dot(&r.v).is_zero() {
                bit_set(&mut r.tight, i);
            }
        }
        next.append(&mut rays);
        next.append(&mut created);
        rays = next;
        // Coincident directions (the same new ray found via two adjacent
        // pairs) would poison later adjacency tests; keep one copy.
        let mut seen_dirs: BTreeSet<QVector> = BTreeSet::new();
        rays.retain(|r| seen_dirs.insert(r.v.clone()));
    }

    Ok(canonicalize_rays(rays.into_iter().map(|r| r.v).collect()))
}

/// One face of the compact nef slice `Nef_H(X) = {D nef : D·H = 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    /// Dimension of the face inside the slice (vertices have dimension 0;
    /// the whole slice has dimension ρ−1).
    pub dim: usize,
    /// Indices into the surface's negative-curve list of the curves
    /// orthogonal to this entire face.
    pub negatives: Vec<usize>,
    /// Indices into [`FaceLattice::rays`] of the extremal rays spanning the
    /// face.
    pub rays: Vec<usize>,
}

/// The faces of the compact nef slice, with its f-vector and the big /
/// non-big split of the vertices.
#[derive(Clone, Debug)]
pub struct FaceLattice {
    /// Extremal rays of the nef cone (primitive integral, sorted); these
    /// are the vertices of the slice.
    pub rays: Vec<DivisorClass>,
    /// Every face of the slice, sorted by (dimension, ray set).  The whole
    /// slice appears as the unique face of dimension ρ−1.
    pub faces: Vec<Face>,
    /// `f_vector[i]` counts faces of slice dimension `i`, for i = 0..ρ−1.
    pub f_vector: Vec<u64>,
    /// Number of vertices `v` with `v² > 0`.
    pub big_vertices: u64,
    /// Number of vertices `v` with `v² ≤ 0` (for nef rays, `v² = 0`).
    pub nonbig_vertices: u64,
}

/// Face lattice of the nef slice with the default face budget.
pub fn face_lattice(s: &SurfaceDatum, h: &DivisorClass) -> Result<FaceLattice> {
    face_lattice_with_budget(s, h, DEFAULT_FACE_BUDGET)
}

/// Face lattice of the nef slice `Nef_H(X)`.
///
/// `h` must be ample in the sense that it pairs strictly positively with
/// every effective generator; this makes the slice compact, and its face
/// poset is independent of which ample class cuts it.  Faces are found by
/// tight-set closure: facets are the effective generators whose orthogonal
/// ray sets have rank ρ−1, and every face is an intersection of facets.
/// Enumeration aborts with a budget error once `max_faces` is exceeded.
pub fn face_lattice_with_budget(
    s: &SurfaceDatum,
    h: &DivisorClass,
    max_faces: usize,
) -> Result<FaceLattice> {
    for g in s.eff_generators() {
        if s.intersect(h, g) <= Rat::zero() {
            return Err(Error::NotAmple(format!(
                "{h} pairs nonpositively with the effective generator {g}"
            )));
        }
    }
    let nef = ConeRep::nef(s)?;
    let rays = nef.generators().to_vec();
    let nray = rays.len();
    let q = s.q();

    // Tight ray set of every effective generator, and of every negative
    // curve (the latter indexes the per-face orthogonal-curve lists).
    let words = nray.div_ceil(64);
    let gen_tight: Vec<Vec<u64>> = s
        .eff_generators()
        .iter()
        .map(|g| {
            let mut bits = vec![0u64; words];
            for (i, r) in rays.iter().enumerate() {
                if pair(q, r, g.coeffs()).is_zero() {
                    bit_set(&mut bits, i);
                }
            }
            bits
        })
        .collect();
    let neg_tight: Vec<Vec<u64>> = s
        .negative_curves()
        .iter()
        .map(|c| {
            let mut bits = vec![0u64; words];
            for (i, r) in rays.iter().enumerate() {
                if pair(q, r, c.coeffs()).is_zero() {
                    bit_set(&mut bits, i);
                }
            }
            bits
        })
        .collect();

    let rank_of = |bits: &[u64]| -> usize {
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for w in 0..words {
            let mut word = bits[w];
            while word != 0 {
                let t = word.trailing_zeros() as usize;
                rows.push(rays[w * 64 + t].0.clone());
                word &= word - 1;
            }
        }
        crate::linalg::rank_of_rows(&mut rows)
    };

    // Facets: generators whose tight set has rank exactly ρ−1
    // (deduplicated by tight set — distinct generators can cut the same
    // facet).
    let rho = s.rank();
    let mut facet_sets: Vec<Vec<u64>> = Vec::new();
    let mut seen_facets: BTreeSet<Vec<u64>> = BTreeSet::new();
    for bits in &gen_tight {
        if rank_of(bits) == rho.saturating_sub(1) && seen_facets.insert(bits.clone()) {
            facet_sets.push(bits.clone());
        }
    }

    // Closure under intersection, seeded with the full slice.
    let full: Vec<u64> = {
        let mut b = vec![0u64; words];
        for i in 0..nray {
            bit_set(&mut b, i);
        }
        b
    };
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut queue: VecDeque<Vec<u64>> = VecDeque::new();
    seen.insert(full.clone());
    queue.push_back(full);
    while let Some(face) = queue.pop_front() {
        for facet in &facet_sets {
            let cut = bit_and(&face, facet);
            if cut.iter().all(|&w| w == 0) || cut == face || seen.contains(&cut) {
                continue;
            }
            if seen.len() >= max_faces {
                return Err(Error::BudgetExceeded(format!(
                    "face lattice exceeds the cap of {max_faces} faces; \
                     use chamber counting instead at this rank"
                )));
            }
            seen.insert(cut.clone());
            queue.push_back(cut);
        }
    }

    // Assemble face records.
    let mut faces: Vec<Face> = Vec::with_capacity(seen.len());
    for bits in &seen {
        let ray_idx: Vec<usize> = (0..nray).filter(|&i| bits[i / 64] >> (i % 64) & 1 == 1).collect();
        let cone_dim = rank_of(bits);
        debug_assert!(cone_dim >= 1);
        let negatives: Vec<usize> = neg_tight
            .iter()
            .enumerate()
            .filter(|(_, t)| bit_is_subset(bits, t))
            .map(|(j, _)| j)
            .collect();
        faces.push(Face { dim: cone_dim - 1, negatives, rays: ray_idx });
    }
    faces.sort_by(|a, b| (a.dim, &a.rays).cmp(&(b.dim, &b.rays)));

    let mut f_vector = vec![0u64; rho];
    for f in &faces {
        f_vector[f.dim] += 1;
    }
    let mut big = 0u64;
    let mut nonbig = 0u64;
    for r in &rays {
        if pair(q, r, r) > Rat::zero() {
            big += 1;
        } else {
            nonbig += 1;
        }
    }
    Ok(FaceLattice {
        rays: rays.into_iter().map(DivisorClass::new).collect(),
        faces,
        f_vector,
        big_vertices: big,
        nonbig_vertices: nonbig,
    })
}

/// Group the faces of a lattice by dimension (used by reporting code).
pub fn faces_by_dim(lat: &FaceLattice) -> BTreeMap<usize, Vec<&Face>> {
    let mut map: BTreeMap<usize, Vec<&Face>> = BTreeMap::new();
    for f in &lat.faces {
        map.entry(f.dim).or_default().push(f);
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::enumerate_nef_nonbig;

    fn dp(r: usize) -> SurfaceDatum {
        SurfaceDatum::del_pezzo(r).unwrap()
    }

    fn qv(coords: &[i64]) -> QVector {
        QVector::from_i64(coords)
    }

    /// A rank-3 custom surface whose cone data is simplicial: three
    /// independent negative curves spanning the effective cone (the same
    /// lattice shape as the two-point blow-up, but fed through the custom
    /// JSON path).
    fn custom_simplex_surface() -> SurfaceDatum {
        SurfaceDatum::from_json_str(
            r#"{
                "rank": 3,
                "intersection_matrix": [[1,0,0],[0,-1,0],[0,0,-1]],
                "ample": ["3","-1","-1"],
                "canonical": ["-3","1","1"],
                "negative_curves": [["0","1","0"],["0","0","1"],["1","-1","-1"]],
                "eff_generators": [["0","1","0"],["0","0","1"],["1","-1","-1"]]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn orthant_is_self_dual() {
        // The positive orthant under the standard inner product is its own
        // dual.  No surface can carry a positive definite pairing, so this
        // exercises the double-description core directly.
        let q = QMatrix::identity(3);
        let orthant = vec![qv(&[0, 0, 1]), qv(&[0, 1, 0]), qv(&[1, 0, 0])];
        let rays = double_description(&q, &orthant).unwrap();
        assert_eq!(rays, orthant);
    }

    #[test]
    fn dual_of_effective_is_nef_for_small_del_pezzo() {
        let s1 = dp(1);
        let nef1 = dual_cone(&ConeRep::effective(&s1).unwrap()).unwrap();
        assert_eq!(nef1.generators(), &[qv(&[1, -1]), qv(&[1, 0])], "Nef(X1) = <H-E1, H>");

        let s2 = dp(2);
        let nef2 = dual_cone(&ConeRep::effective(&s2).unwrap()).unwrap();
        assert_eq!(
            nef2.generators(),
            &[qv(&[1, -1, 0]), qv(&[1, 0, -1]), qv(&[1, 0, 0])],
            "Nef(X2) = <H-E1, H-E2, H>"
        );
    }

    #[test]
    fn dual_dual_recovers_extremal_rays() {
        // On the one-point blow-up the effective cone needs the isotropic
        // ray H−E1 alongside the single negative curve E1; from two points
        // on, the negative curves span and the declared nef non-big
        // generators are redundant.  The double dual keeps exactly the
        // extremal rays either way.
        let s1 = dp(1);
        let double1 =
            dual_cone(&dual_cone(&ConeRep::effective(&s1).unwrap()).unwrap()).unwrap();
        assert_eq!(double1.generators(), &[qv(&[0, 1]), qv(&[1, -1])]);

        for r in 2..=3 {
            let s = dp(r);
            let eff = ConeRep::effective(&s).unwrap();
            let double = dual_cone(&dual_cone(&eff).unwrap()).unwrap();
            let mut curves: Vec<QVector> =
                s.negative_curves().iter().map(|c| c.coeffs().clone()).collect();
            curves.sort();
            assert_eq!(double.generators(), curves.as_slice(), "rank {r}");
        }
    }

    #[test]
    fn degenerate_input_is_rejected() {
        let s = dp(2);
        // A single ray spans a line, not the whole rank-3 lattice.
        let thin = ConeRep::from_qvectors(&s, vec![qv(&[1, 0, 0])]).unwrap();
        match dual_cone(&thin) {
            Err(Error::DegenerateCone(_)) => {}
            other => panic!("expected DegenerateCone, got {other:?}"),
        }
        let empty = ConeRep::from_qvectors(&s, vec![QVector::zero(3)]).unwrap();
        assert!(matches!(dual_cone(&empty), Err(Error::DegenerateCone(_))));
    }

    #[test]
    fn membership_examples_on_x2() {
        let s = dp(2);
        let mut nef = ConeRep::nef(&s).unwrap();

        let h = qv(&[1, 0, 0]);
        match nef.membership(&h).unwrap() {
            Membership::Boundary { tight } => {
                // Inequalities are kept in sorted order, so E2 < E1.
                assert_eq!(tight, vec![qv(&[0, 0, 1]), qv(&[0, 1, 0])], "H is tight against E1, E2");
            }
            other => panic!("H should be on the boundary, got {other:?}"),
        }

        let anti_k = qv(&[3, -1, -1]);
        assert_eq!(nef.membership(&anti_k).unwrap(), Membership::Interior);

        let neg_h = qv(&[-1, 0, 0]);
        assert_eq!(nef.membership(&neg_h).unwrap(), Membership::Outside);

        let bad = qv(&[1, 0]);
        assert!(matches!(nef.membership(&bad), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn membership_boundary_against_redundant_inequality() {
        // H−E1 is tight against the redundant nef non-big inequality H−E1
        // as well as the curves E2 and H−E1−E2; all three are reported.
        let s = dp(2);
        let mut nef = ConeRep::nef(&s).unwrap();
        match nef.membership(&qv(&[1, -1, 0])).unwrap() {
            Membership::Boundary { tight } => {
                assert_eq!(tight, vec![qv(&[0, 0, 1]), qv(&[1, -1, -1]), qv(&[1, -1, 0])]);
            }
            other => panic!("H-E1 should be on the boundary, got {other:?}"),
        }
    }

    #[test]
    fn face_lattice_x1() {
        let s = dp(1);
        let lat = face_lattice(&s, s.ample()).unwrap();
        assert_eq!(lat.f_vector, vec![2, 1]);
        assert_eq!(lat.big_vertices, 1);
        assert_eq!(lat.nonbig_vertices, 1);
        assert_eq!(lat.faces.len(), 3);
        let vertex_classes: Vec<String> = lat.rays.iter().map(|r| r.to_string()).collect();
        assert_eq!(vertex_classes, vec!["H - E1", "H"]);
    }

    #[test]
    fn face_lattice_x2() {
        let s = dp(2);
        let lat = face_lattice(&s, s.ample()).unwrap();
        assert_eq!(lat.f_vector, vec![3, 3, 1]);
        assert_eq!(lat.big_vertices, 1);
        assert_eq!(lat.nonbig_vertices, 2);
        assert_eq!(lat.faces.iter().map(|f| f.dim).collect::<Vec<_>>(), vec![0, 0, 0, 1, 1, 1, 2]);

        // Rays sort as H−E1 < H−E2 < H.  The vertex H is orthogonal to E1
        // and E2; the vertex H−E1 to E2 and H−E1−E2; the edge {H−E1, H} to
        // E2 alone; the whole slice to nothing.
        let names: Vec<String> = lat.rays.iter().map(|r| r.to_string()).collect();
        assert_eq!(names, vec!["H - E1", "H - E2", "H"]);
        let curve_names: Vec<String> = s.negative_curves().iter().map(|c| c.to_string()).collect();
        let face_with_rays = |rays: &[usize]| {
            lat.faces.iter().find(|f| f.rays == rays).unwrap_or_else(|| panic!("face {rays:?}"))
        };
        let vertex_h = face_with_rays(&[2]);
        let tight: Vec<&str> = vertex_h.negatives.iter().map(|&j| curve_names[j].as_str()).collect();
        // Negative curves are stored sorted, which puts E2 before E1.
        assert_eq!(tight, vec!["E2", "E1"]);
        let vertex_h_e1 = face_with_rays(&[0]);
        let tight: Vec<&str> =
            vertex_h_e1.negatives.iter().map(|&j| curve_names[j].as_str()).collect();
        assert_eq!(tight, vec!["E2", "H - E1 - E2"]);
        let edge = face_with_rays(&[0, 2]);
        let tight: Vec<&str> = edge.negatives.iter().map(|&j| curve_names[j].as_str()).collect();
        assert_eq!(tight, vec!["E2"]);
        let slice = face_with_rays(&[0, 1, 2]);
        assert!(slice.negatives.is_empty());
        assert_eq!(slice.dim, 2);
    }

    #[test]
    fn face_lattice_simplex_cone() {
        // A simplicial effective cone over three independent rays gives the
        // combinatorial triangle, through the custom-surface path.
        let s = custom_simplex_surface();
        let lat = face_lattice(&s, s.ample()).unwrap();
        assert_eq!(lat.f_vector, vec![3, 3, 1]);
        assert_eq!(lat.big_vertices + lat.nonbig_vertices, 3);
    }

    #[test]
    fn face_lattice_rejects_non_ample_slice() {
        let s = dp(2);
        // H is nef but pairs to zero with E1, so it is not ample.
        let h = DivisorClass::from_i64(&[1, 0, 0]);
        assert!(matches!(face_lattice(&s, &h), Err(Error::NotAmple(_))));
    }

    #[test]
    fn face_budget_is_enforced() {
        let s = dp(3);
        match face_lattice_with_budget(&s, s.ample(), 4) {
            Err(Error::BudgetExceeded(_)) => {}
            other => panic!("expected BudgetExceeded, got {other:?}"),
        }
    }

    #[test]
    fn euler_poincare_and_ray_support_up_to_rank_four() {
        for r in 1..=4 {
            let s = dp(r);
            let lat = face_lattice(&s, s.ample()).unwrap();
            let d = s.rank() - 1;
            assert_eq!(*lat.f_vector.last().unwrap(), 1, "whole slice counted once at rank {r}");
            if d >= 1 {
                let mut alt = 0i64;
                for i in 0..d {
                    let term = lat.f_vector[i] as i64;
                    alt += if i % 2 == 0 { term } else { -term };
                }
                let expected = 1 + if (d - 1) % 2 == 0 { 1 } else { -1 };
                assert_eq!(alt, expected, "Euler–Poincaré at rank {r}");
            }

            // Every nef extremal ray pairs ≥ 0 with every effective
            // generator and vanishes against at least ρ−1 independent ones.
            for ray in &lat.rays {
                let mut tight_rows: Vec<Vec<Rat>> = Vec::new();
                for g in s.eff_generators() {
                    let p = s.intersect(ray, g);
                    assert!(p >= Rat::zero());
                    if p.is_zero() {
                        tight_rows.push(g.coeffs().0.clone());
                    }
                }
                assert!(
                    crate::linalg::rank_of_rows(&mut tight_rows) >= s.rank() - 1,
                    "ray {ray} is extremal"
                );
            }
        }
    }

    #[test]
    fn nonbig_vertices_match_nef_nonbig_enumeration() {
        for r in 1..=4 {
            let s = dp(r);
            let lat = face_lattice(&s, s.ample()).unwrap();
            let nnb = enumerate_nef_nonbig(r).unwrap();
            assert_eq!(lat.nonbig_vertices as usize, nnb.len(), "rank {r}");
            let nnb_set: std::collections::BTreeSet<&DivisorClass> = nnb.iter().collect();
            for ray in &lat.rays {
                if s.self_intersection(ray).is_zero() {
                    assert!(nnb_set.contains(ray), "non-big vertex {ray} is a listed class");
                }
            }
        }
    }

    #[test]
    fn cross_validation_rejects_inconsistent_descriptions() {
        let s = dp(1);
        let gens = vec![qv(&[0, 1]), qv(&[1, -1])];
        // E1 violates the proposed inequality H−E1 (pairing (H−E1)·E1 = 1 ≥ 0
        // is fine, but against E1 itself the pairing is −1).
        let bad = ConeRep::with_inequalities(&s, gens.clone(), vec![qv(&[0, 1])]);
        assert!(matches!(bad, Err(Error::InvalidSurface(_))));
        let good = ConeRep::with_inequalities(&s, gens, vec![qv(&[1, 0])]);
        assert!(good.is_ok());
    }
}

//! Zariski decompositions and Zariski chambers.
//!
//! Every pseudo-effective class `D` splits uniquely as `D = P + N` with `P`
//! nef, `N = Σ aᵢNᵢ` an effective combination of negative curves whose Gram
//! matrix is negative definite, and `P·Nᵢ = 0` for every support curve. The
//! big cone decomposes into chambers on which the support of `N` is
//! constant; on the surfaces handled here the chambers correspond to the
//! negative-definite subsets of the negative-curve set (the empty subset
//! being the nef chamber).

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, SurfaceDatum};
use crate::linalg::{self, QMatrix, QVector, Rat};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use std::collections::BTreeSet;

/// The decomposition `D = P + N` of a pseudo-effective class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZariskiDecomposition {
    /// Positive (nef) part.
    pub p: DivisorClass,
    /// Negative part `N = Σ aᵢ Nᵢ`.
    pub n: DivisorClass,
    /// Indices of the support curves into `surface.negative_curves()`.
    pub support: Vec<usize>,
    /// The coefficients `aᵢ`, all strictly positive, parallel to `support`.
    pub coefficients: Vec<Rat>,
}

/// A set of negative curves with negative-definite Gram matrix; the empty
/// set denotes the nef chamber.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChamberSupport {
    curves: Vec<usize>,
}

impl ChamberSupport {
    /// Build from curve indices; sorts and deduplicates, and verifies the
    /// indices are in range and the Gram matrix is negative definite.
    pub fn new(s: &SurfaceDatum, curves: impl IntoIterator<Item = usize>) -> Result<ChamberSupport> {
        let set: BTreeSet<usize> = curves.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&i| i >= s.negative_curves().len()) {
            return Err(Error::OutOfRange(format!(
                "curve index {bad} exceeds the negative-curve count {}",
                s.negative_curves().len()
            )));
        }
        let curves: Vec<usize> = set.into_iter().collect();
        let gram = s.neg_gram().principal_submatrix(&curves);
        if !linalg::is_negative_definite(&gram)? {
            return Err(Error::OutOfRange(
                "chamber support must have a negative-definite Gram matrix".into(),
            ));
        }
        Ok(ChamberSupport { curves })
    }

    /// Internal constructor for supports already known to be valid.
    pub(crate) fn from_sorted_unchecked(curves: Vec<usize>) -> ChamberSupport {
        ChamberSupport { curves }
    }

    pub fn curves(&self) -> &[usize] {
        &self.curves
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    /// Gram matrix of the support curves.
    pub fn gram(&self, s: &SurfaceDatum) -> QMatrix {
        s.neg_gram().principal_submatrix(&self.curves)
    }

    /// The support as classes.
    pub fn classes<'a>(&self, s: &'a SurfaceDatum) -> Vec<&'a DivisorClass> {
        self.curves.iter().map(|&i| &s.negative_curves()[i]).collect()
    }
}

/// Is `D` in the closure of the effective cone? Decided constructively: the
/// growing-support loop of [`zariski_decompose`] either produces a valid
/// decomposition (a witness of pseudo-effectivity, since nef + effective is
/// pseudo-effective) or fails one of its exact checks, which refutes it.
pub fn is_pseudoeffective(s: &SurfaceDatum, d: &DivisorClass) -> bool {
    zariski_decompose(s, d).is_ok()
}

/// Is `D` big (positive volume)? Equivalent to `D` pseudo-effective with
/// `P² > 0` for its positive part.
pub fn is_big(s: &SurfaceDatum, d: &DivisorClass) -> bool {
    zariski_decompose(s, d).is_ok_and(|z| s.self_intersection(&z.p).is_positive())
}

/// Is `D` nef? Exact pairing test against every effective generator.
pub fn is_nef(s: &SurfaceDatum, d: &DivisorClass) -> bool {
    s.eff_generators().iter().all(|g| !s.intersect(d, g).is_negative())
}

/// Zariski decomposition of a pseudo-effective class.
///
/// Growing-support loop: starting from the empty support, solve
/// `Gram·a = (D·Nᵢ)ᵢ` so that `(D − N)·Nᵢ = 0` on the support, then add
/// *all* curves pairing negatively with `P = D − N` and repeat. The support
/// only grows, so the loop terminates; for pseudo-effective `D` it converges
/// to the unique decomposition, and any exact check failing along the way
/// (support too large, singular or indefinite Gram, a negative coefficient,
/// or a final `P` that is not nef) proves `D` is not pseudo-effective.
pub fn zariski_decompose(s: &SurfaceDatum, d: &DivisorClass) -> Result<ZariskiDecomposition> {
    if d.dim() != s.rank() {
        return Err(Error::DimensionMismatch(format!(
            "class has {} coordinates, surface rank is {}",
            d.dim(),
            s.rank()
        )));
    }
    let curves = s.negative_curves();
    let not_pseff = || Err(Error::NotPseudoEffective);

    let mut support: Vec<usize> = Vec::new();
    let mut in_support = vec![false; curves.len()];
    let mut coeffs: Vec<Rat> = Vec::new();
    let mut p = d.clone();
    loop {
        let violators: Vec<usize> = (0..curves.len())
            .filter(|&j| !in_support[j] && s.intersect(&p, &curves[j]).is_negative())
            .collect();
        if violators.is_empty() {
            break;
        }
        support.extend(&violators);
        support.sort_unstable();
        for j in violators {
            in_support[j] = true;
        }
        // A negative-definite set is linearly independent, so a genuine
        // support never exceeds rank − 1 curves.
        if support.len() >= s.rank() {
            return not_pseff();
        }
        let gram = s.neg_gram().principal_submatrix(&support);
        let rhs = QVector(
            support.iter().map(|&i| s.intersect(d, &curves[i])).collect(),
        );
        let Ok(a) = linalg::solve_linear(&gram, &rhs) else {
            return not_pseff();
        };
        let mut n = QVector::zero(s.rank());
        for (&i, ai) in support.iter().zip(&a.0) {
            n = n.add(&curves[i].coeffs().scale(ai));
        }
        coeffs = a.0;
        p = DivisorClass::new(d.coeffs().sub(&n));
    }
    if coeffs.iter().any(Rat::is_negative) {
        return not_pseff();
    }
    // Drop (defensively) any zero coefficients; they cannot occur for
    // curves that were added by a strict violation, but the invariant
    // demands strictly positive coefficients.
    let kept: Vec<(usize, Rat)> = support
        .iter()
        .cloned()
        .zip(coeffs)
        .filter(|(_, a)| !a.is_zero())
        .collect();
    let support: Vec<usize> = kept.iter().map(|(i, _)| *i).collect();
    let coefficients: Vec<Rat> = kept.into_iter().map(|(_, a)| a).collect();
    if !linalg::is_negative_definite(&s.neg_gram().principal_submatrix(&support))? {
        return not_pseff();
    }
    // The loop only guarantees P·N ≥ 0 against negative curves; nefness
    // against the remaining effective generators is the final gate.
    if !is_nef(s, &p) {
        return not_pseff();
    }
    let n = DivisorClass::new(d.coeffs().sub(p.coeffs()));
    Ok(ZariskiDecomposition { p, n, support, coefficients })
}

/// The Zariski chamber of a big class: the support of its negative part.
pub fn neg_support(s: &SurfaceDatum, d: &DivisorClass) -> Result<ChamberSupport> {
    let z = zariski_decompose(s, d)?;
    if !s.self_intersection(&z.p).is_positive() {
        return Err(Error::NotBig(format!("{d} has volume 0")));
    }
    Ok(ChamberSupport { curves: z.support })
}

/// Visit every negative-definite subset of the negative curves (including
/// the empty one) in canonical order — lexicographic on the sorted index
/// vectors — and return how many there are. The visitor may abort the walk
/// by returning an error.
///
/// The search is a depth-first walk extending each subset only by curves of
/// larger index. A candidate must be pairwise-compatible (2×2 negative
/// definite) with everything chosen, which is tracked with bitsets; the
/// exact definiteness test runs only when pairwise compatibility does not
/// already force it (it does whenever the new curve has self-intersection
/// −1 and is orthogonal to the chosen set, which covers the (−1)-curve
/// case entirely — there pairwise compatibility *is* orthogonality).
pub fn visit_chambers(
    s: &SurfaceDatum,
    mut visit: impl FnMut(&[usize]) -> Result<()>,
) -> Result<u64> {
    let walker = ChamberWalker::new(s)?;
    let mut count: u64 = 0;
    let mut stack: Vec<usize> = Vec::new();
    walker.walk(&mut stack, &walker.initial_candidates(), &mut |sup| {
        count = count
            .checked_add(1)
            .ok_or_else(|| Error::Overflow("chamber counter".into()))?;
        visit(sup)
    })?;
    Ok(count)
}

/// Count the Zariski chambers. Equivalent to `visit_chambers` with a no-op
/// visitor, but splits the top-level branches across threads.
pub fn count_chambers(s: &SurfaceDatum) -> Result<u64> {
    let walker = ChamberWalker::new(s)?;
    let init = walker.initial_candidates();
    let firsts: Vec<usize> = init.ones().collect();
    let subtotals: Vec<Result<u64>> = firsts
        .par_iter()
        .map(|&first| {
            let mut stack = vec![first];
            let mut cands = init.and(&walker.compat[first]);
            cands.clear_upto(first);
            let mut cnt: u64 = 0;
            walker.walk(&mut stack, &cands, &mut |_| {
                cnt = cnt
                    .checked_add(1)
                    .ok_or_else(|| Error::Overflow("chamber counter".into()))?;
                Ok(())
            })?;
            Ok(cnt)
        })
        .collect();
    let mut total: u64 = 1; // the empty (nef) chamber
    for sub in subtotals {
        total = total
            .checked_add(sub?)
            .ok_or_else(|| Error::Overflow("chamber counter".into()))?;
    }
    Ok(total)
}

/// Enumerate all chambers, canonically ordered. Fails with
/// [`Error::BudgetExceeded`] once more than `budget` chambers exist.
pub fn enumerate_chambers(s: &SurfaceDatum, budget: usize) -> Result<Vec<ChamberSupport>> {
    let mut out = Vec::new();
    visit_chambers(s, |sup| {
        if out.len() >= budget {
            return Err(Error::BudgetExceeded(format!(
                "more than {budget} Zariski chambers; raise the budget to list them"
            )));
        }
        out.push(ChamberSupport { curves: sup.to_vec() });
        Ok(())
    })?;
    Ok(out)
}

/// Fixed-width bitset over curve indices.
#[derive(Clone, Debug)]
pub(crate) struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn empty(n: usize) -> Bits {
        Bits { words: vec![0; n.div_ceil(64)] }
    }

    fn full(n: usize) -> Bits {
        let mut b = Bits::empty(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    /// Clear all bits at positions `<= i`.
    fn clear_upto(&mut self, i: usize) {
        let w = i / 64;
        for k in 0..w {
            self.words[k] = 0;
        }
        let r = i % 64;
        if r == 63 {
            self.words[w] = 0;
        } else {
            self.words[w] &= !((1u64 << (r + 1)) - 1);
        }
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            let mut rest = bits;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let t = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(w * 64 + t)
                }
            })
        })
    }
}

/// Shared state of the chamber DFS.
struct ChamberWalker<'a> {
    s: &'a SurfaceDatum,
    n: usize,
    /// `compat[i]`: curves forming a negative-definite pair with curve `i`.
    compat: Vec<Bits>,
    /// Integer Gram fast path (always present on plane blowups).
    gram_i64: Option<&'a linalg::IntGram>,
}

impl<'a> ChamberWalker<'a> {
    fn new(s: &'a SurfaceDatum) -> Result<ChamberWalker<'a>> {
        let n = s.negative_curves().len();
        let gram_i64 = s.neg_gram_i64();
        let mut compat = vec![Bits::empty(n); n];
        for i in 0..n {
            for j in i + 1..n {
                let ok = match gram_i64 {
                    Some(g) => g.pair_neg_def(i, j),
                    None => {
                        let g = s.neg_gram().principal_submatrix(&[i, j]);
                        linalg::is_negative_definite(&g)?
                    }
                };
                if ok {
                    compat[i].set(j);
                    compat[j].set(i);
                }
            }
        }
        Ok(ChamberWalker { s, n, compat, gram_i64 })
    }

    fn initial_candidates(&self) -> Bits {
        Bits::full(self.n)
    }

    /// Does adding `j` keep the chosen set negative definite? Pairwise
    /// compatibility is already guaranteed by the candidate bitsets.
    fn extension_is_neg_def(&self, chosen: &[usize], j: usize) -> Result<bool> {
        match self.gram_i64 {
            Some(g) => {
                // Orthogonal extension by a (−1)-class keeps the Gram
                // matrix diagonal −1: no exact test needed.
                if g.at(j, j) == -1 && chosen.iter().all(|&i| g.at(i, j) == 0) {
                    return Ok(true);
                }
                let mut idx = chosen.to_vec();
                idx.push(j);
                g.subset_neg_def(&idx)
            }
            None => {
                let mut idx = chosen.to_vec();
                idx.push(j);
                let g = self.s.neg_gram().principal_submatrix(&idx);
                linalg::is_negative_definite(&g)
            }
        }
    }

    fn walk(
        &self,
        chosen: &mut Vec<usize>,
        candidates: &Bits,
        emit: &mut impl FnMut(&[usize]) -> Result<()>,
    ) -> Result<()> {
        emit(chosen)?;
        for j in candidates.ones() {
            if !self.extension_is_neg_def(chosen, j)? {
                continue;
            }
            chosen.push(j);
            let mut next = candidates.and(&self.compat[j]);
            next.clear_upto(j);
            self.walk(chosen, &next, emit)?;
            chosen.pop();
        }
        Ok(())
    }
}

/// A big class whose Zariski chamber is exactly `c`.
///
/// Construction: solve `Gram·a = −(A·Nᵢ)ᵢ` for the ample class `A`, so that
/// `M = A + Σ aᵢNᵢ` pairs to zero with each support curve; then
/// `W = M + Σ Nᵢ` decomposes as `P = M`, `N = Σ Nᵢ` by uniqueness, provided
/// `M` is nef and big — guaranteed on plane blowups (the coefficients are
/// nonnegative because the negated Gram matrix has nonnegative inverse, and
/// distinct negative curves pair nonnegatively), and verified exactly here
/// in any case. Fails with [`Error::NotRealizable`] when the verification
/// does not round-trip (possible on custom surfaces).
pub fn chamber_witness(s: &SurfaceDatum, c: &ChamberSupport) -> Result<DivisorClass> {
    let a_cls = s.ample();
    if c.is_empty() {
        return Ok(a_cls.clone());
    }
    let gram = c.gram(s);
    let rhs = QVector(
        c.curves
            .iter()
            .map(|&i| -s.intersect(a_cls, &s.negative_curves()[i]))
            .collect(),
    );
    let a = linalg::solve_linear(&gram, &rhs).map_err(|_| {
        Error::Internal("negative-definite Gram matrix cannot be singular".into())
    })?;
    let mut w = a_cls.coeffs().clone();
    for (&i, ai) in c.curves.iter().zip(&a.0) {
        let ni = s.negative_curves()[i].coeffs();
        // M-part coefficient plus the unit push into the chamber interior.
        w = w.add(&ni.scale(&(ai + Rat::from_integer(1.into()))));
    }
    let w = DivisorClass::new(w);
    let z = zariski_decompose(s, &w).map_err(|_| {
        Error::NotRealizable(format!("candidate witness {w} is not pseudo-effective"))
    })?;
    if z.support != c.curves {
        return Err(Error::NotRealizable(format!(
            "no big class with negative support exactly on the given {} curves",
            c.len()
        )));
    }
    if !s.self_intersection(&z.p).is_positive() {
        return Err(Error::NotRealizable(format!("witness candidate {w} is not big")));
    }
    Ok(w)
}

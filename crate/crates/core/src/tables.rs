//! Published reference counts for the del Pezzo family, the recomputation
//! harness that checks this artifact against them, and the census of
//! nef non-big classes by solution type.
//!
//! The embedded rows reproduce the reference tables verbatim.  Where this
//! artifact's exhaustive searches disagree with a printed value, the
//! disagreement is carried in [`KNOWN_DISCREPANCIES`] with the recomputed
//! value and a short account of the independent evidence; the verifier
//! treats exactly those rows as expected mismatches.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::lattice::{enumerate_nef_nonbig, SurfaceDatum};
use crate::minkowski::{cardinality_report, Flag};
use crate::zariski::count_chambers;

/// One reference row for `X_r`: negative-curve count, Zariski-chamber
/// count, nef non-big count, and Minkowski-basis cardinality for an ample
/// flag, exactly as printed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReferenceRow {
    pub r: usize,
    pub negative_curves: u64,
    pub zar: u64,
    pub nnb: u64,
    pub mb: u64,
}

/// The printed reference table for `r = 1..8`.
pub const REFERENCE: [ReferenceRow; 8] = [
    ReferenceRow { r: 1, negative_curves: 1, zar: 2, nnb: 1, mb: 3 },
    ReferenceRow { r: 2, negative_curves: 3, zar: 5, nnb: 2, mb: 7 },
    ReferenceRow { r: 3, negative_curves: 6, zar: 18, nnb: 3, mb: 21 },
    ReferenceRow { r: 4, negative_curves: 10, zar: 76, nnb: 5, mb: 81 },
    ReferenceRow { r: 5, negative_curves: 16, zar: 393, nnb: 10, mb: 403 },
    ReferenceRow { r: 6, negative_curves: 27, zar: 2764, nnb: 27, mb: 2797 },
    ReferenceRow { r: 7, negative_curves: 56, zar: 33645, nnb: 119, mb: 33764 },
    ReferenceRow { r: 8, negative_curves: 240, zar: 1501681, nnb: 2040, mb: 1503721 },
];

/// Which column of a reference row a value belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    NegativeCurves,
    Zar,
    Nnb,
    Mb,
}

impl std::fmt::Display for Column {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Column::NegativeCurves => "negative curves",
            Column::Zar => "Zar",
            Column::Nnb => "NnB",
            Column::Mb => "#MB",
        };
        f.write_str(name)
    }
}

/// A reference value that this artifact's recomputation contradicts, with
/// the evidence for the recomputed value.
#[derive(Clone, Copy, Debug)]
pub struct KnownDiscrepancy {
    pub r: usize,
    pub column: Column,
    pub reference: u64,
    pub computed: u64,
    pub note: &'static str,
}

/// Every known disagreement with the printed rows.  All five trace back to
/// two facts: the printed `#MB` entry for `X_6` contradicts the printed
/// `NnB` and `Zar` entries in the same table, and the printed census of
/// isotropic solution types is missing four orbits (one visible at
/// `r = 7`, three more at `r = 8`), which shifts `NnB` and therefore `#MB`
/// at `r = 7, 8`.
pub const KNOWN_DISCREPANCIES: [KnownDiscrepancy; 5] = [
    KnownDiscrepancy {
        r: 6,
        column: Column::Mb,
        reference: 2797,
        computed: 2791,
        note: "the printed row is internally inconsistent: its own counts give \
               NnB + Zar = 27 + 2764 = 2791",
    },
    KnownDiscrepancy {
        r: 7,
        column: Column::Nnb,
        reference: 119,
        computed: 126,
        note: "bounded exhaustive search finds the solution type (5; 2,2,2,2,2,2,1), \
               an orbit of 7 classes missing from the printed census; cross-check: \
               the classes -K + v with v a root of E7 are exactly the isotropic nef \
               classes, and E7 has 126 roots",
    },
    KnownDiscrepancy {
        r: 7,
        column: Column::Mb,
        reference: 33764,
        computed: 33771,
        note: "follows from the NnB correction: 126 + 33645 = 33771",
    },
    KnownDiscrepancy {
        r: 8,
        column: Column::Nnb,
        reference: 2040,
        computed: 2160,
        note: "bounded exhaustive search finds three solution types missing from the \
               printed census, (4; 3,1,1,1,1,1,1,1), (5; 2,2,2,2,2,2,1) and \
               (7; 4,3,2,2,2,2,2,2), orbits of 8 + 56 + 56 = 120 classes; \
               cross-check: the classes -2K + v with v of norm -4 in E8 are exactly \
               the isotropic nef classes, and E8 has 2160 norm -4 vectors",
    },
    KnownDiscrepancy {
        r: 8,
        column: Column::Mb,
        reference: 1503721,
        computed: 1503841,
        note: "follows from the NnB correction: 2160 + 1501681 = 1503841",
    },
];

/// Look up the documented discrepancy for a row and column, if any.
pub fn known_discrepancy(r: usize, column: Column) -> Option<&'static KnownDiscrepancy> {
    KNOWN_DISCREPANCIES.iter().find(|d| d.r == r && d.column == column)
}

/// One solution type of the isotropic system `3a − Σbⱼ = 2`,
/// `a² = Σbⱼ²`: a degree together with the multiplicities in
/// non-increasing order, padded with zeros to eight entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolutionType {
    pub label: &'static str,
    pub a: i64,
    pub b: [i64; 8],
}

impl SolutionType {
    /// Number of blown-up points the type needs: its nonzero entries.
    pub fn min_r(&self) -> usize {
        self.b.iter().filter(|&&x| x != 0).count()
    }
}

/// The twelve solution types of the printed census.
pub const PRINTED_SOLUTION_TYPES: [SolutionType; 12] = [
    SolutionType { label: "C(1)", a: 1, b: [1, 0, 0, 0, 0, 0, 0, 0] },
    SolutionType { label: "C(2)", a: 2, b: [1, 1, 1, 1, 0, 0, 0, 0] },
    SolutionType { label: "C(3)", a: 3, b: [2, 1, 1, 1, 1, 1, 0, 0] },
    SolutionType { label: "C(4)", a: 4, b: [2, 2, 2, 1, 1, 1, 1, 0] },
    SolutionType { label: "C(5)", a: 5, b: [3, 2, 2, 2, 1, 1, 1, 1] },
    SolutionType { label: "C(6)", a: 6, b: [3, 3, 2, 2, 2, 2, 1, 1] },
    SolutionType { label: "C(7)", a: 7, b: [3, 3, 3, 3, 2, 2, 2, 1] },
    SolutionType { label: "C(8a)", a: 8, b: [4, 3, 3, 3, 3, 2, 2, 2] },
    SolutionType { label: "C(8b)", a: 8, b: [3, 3, 3, 3, 3, 3, 3, 1] },
    SolutionType { label: "C(9)", a: 9, b: [4, 4, 3, 3, 3, 3, 3, 2] },
    SolutionType { label: "C(10)", a: 10, b: [4, 4, 4, 4, 3, 3, 3, 3] },
    SolutionType { label: "C(11)", a: 11, b: [4, 4, 4, 4, 4, 4, 4, 3] },
];

/// The three solution types the printed census omits, found by the same
/// bounded exhaustive search that reproduces the printed twelve.
pub const EXTRA_SOLUTION_TYPES: [SolutionType; 3] = [
    SolutionType { label: "D(4)", a: 4, b: [3, 1, 1, 1, 1, 1, 1, 1] },
    SolutionType { label: "D(5)", a: 5, b: [2, 2, 2, 2, 2, 2, 1, 0] },
    SolutionType { label: "D(7)", a: 7, b: [4, 3, 2, 2, 2, 2, 2, 2] },
];

/// Distinct coordinate vectors obtained by distributing the type's
/// multiplicities over `r` slots: the multinomial `r! / Π mᵥ!` over the
/// value multiplicities `mᵥ` (zeros included).  Zero when the type does
/// not fit in `r` slots.
pub fn type_orbit_size(b: &[i64], r: usize) -> u64 {
    let nonzero = b.iter().filter(|&&x| x != 0).count();
    if nonzero > r {
        return 0;
    }
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    for &x in b.iter().filter(|&&x| x != 0) {
        *counts.entry(x).or_insert(0) += 1;
    }
    *counts.entry(0).or_insert(0) += (r - nonzero) as u64;
    let factorial = |n: u64| (1..=n).product::<u64>();
    counts.values().fold(factorial(r as u64), |acc, &m| acc / factorial(m))
}

/// Census of the nef non-big classes on `X_r` by type: for each pair
/// `(a, nonzero multiplicities in non-increasing order)` realized by the
/// enumeration, the number of classes of that type, sorted by type.
pub fn nnb_type_census(r: usize) -> Result<Vec<(i64, Vec<i64>, u64)>> {
    let classes = enumerate_nef_nonbig(r)?;
    let mut census: BTreeMap<(i64, Vec<i64>), u64> = BTreeMap::new();
    for class in &classes {
        let (a, b) = class.ab_coords();
        let a = a
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::Overflow("nef non-big degree exceeds i64".into()))?;
        let mut b: Vec<i64> = b
            .iter()
            .map(|x| x.to_integer().to_i64())
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Overflow("nef non-big multiplicity exceeds i64".into()))?;
        b.sort_unstable_by(|x, y| y.cmp(x));
        b.retain(|&x| x != 0);
        *census.entry((a, b)).or_insert(0) += 1;
    }
    Ok(census.into_iter().map(|((a, b), n)| (a, b, n)).collect())
}

/// The type census `X_r` should show according to a list of solution
/// types: each fitting type with its orbit size, sorted by type.
pub fn expected_census(types: &[SolutionType], r: usize) -> Vec<(i64, Vec<i64>, u64)> {
    let mut rows: Vec<(i64, Vec<i64>, u64)> = types
        .iter()
        .filter(|t| t.min_r() <= r)
        .map(|t| {
            let b: Vec<i64> = t.b.iter().copied().filter(|&x| x != 0).collect();
            (t.a, b, type_orbit_size(&t.b, r))
        })
        .collect();
    rows.sort();
    rows
}

/// One row of the verification report: each column as
/// `(computed, reference)`.
#[derive(Clone, Copy, Debug)]
pub struct VerifiedRow {
    pub r: usize,
    pub negative_curves: (u64, u64),
    pub zar: (u64, u64),
    pub nnb: (u64, u64),
    pub mb: (u64, u64),
}

impl VerifiedRow {
    /// The columns whose recomputation disagrees with the reference.
    pub fn mismatches(&self) -> Vec<(Column, u64, u64)> {
        let mut out = Vec::new();
        for (column, (computed, reference)) in [
            (Column::NegativeCurves, self.negative_curves),
            (Column::Zar, self.zar),
            (Column::Nnb, self.nnb),
            (Column::Mb, self.mb),
        ] {
            if computed != reference {
                out.push((column, computed, reference));
            }
        }
        out
    }
}

/// Recompute one reference row from scratch: negative curves by bounded
/// search, chambers by the pruned walk, NnB by bounded search, and the
/// basis cardinality from the chamber/ray census for an ample flag.
pub fn verify_row(r: usize) -> Result<VerifiedRow> {
    let reference = REFERENCE
        .get(r.wrapping_sub(1))
        .ok_or_else(|| Error::OutOfRange(format!("table verification covers 1 <= r <= 8, got {r}")))?;
    let s = SurfaceDatum::del_pezzo(r)?;
    let negative_curves = s.negative_curves().len() as u64;
    let zar = count_chambers(&s)?;
    let nnb = enumerate_nef_nonbig(r)?.len() as u64;
    let flag = Flag::general(&s, s.ample().clone())?;
    let mb = cardinality_report(&s, &flag, false)?.mb_count;
    Ok(VerifiedRow {
        r,
        negative_curves: (negative_curves, reference.negative_curves),
        zar: (zar, reference.zar),
        nnb: (nnb, reference.nnb),
        mb: (mb, reference.mb),
    })
}

/// Recompute every column for `r = 1..max_r` and pair it with the
/// reference value.  The caller decides how to gate the slow rows; the
/// `r = 7` row takes well under a second and `r = 8` takes under two
/// minutes on a single core.
pub fn verify_rows(max_r: usize) -> Result<Vec<VerifiedRow>> {
    if !(1..=8).contains(&max_r) {
        return Err(Error::OutOfRange(format!(
            "table verification covers 1 <= r <= 8, got {max_r}"
        )));
    }
    (1..=max_r).map(verify_row).collect()
}

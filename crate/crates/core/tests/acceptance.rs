//! End-to-end acceptance suite.
//!
//! Each test prints exactly one `ACCEPTANCE <n>: PASS/FAIL` line for its
//! criterion and then asserts, so a plain `cargo test --test acceptance --
//! --nocapture` doubles as a checklist. All comparisons are exact (integer
//! or rational equality); the only tolerances anywhere are wall-clock
//! budgets, which are stated inline in each detail line.
//!
//! Two checks are expected to FAIL honestly: the reference values for the
//! nef-non-big census at r = 7, 8 (criterion 3) and the basis cardinalities
//! at r = 7, 8 (slow half of criterion 4) disagree with what exact
//! recomputation — confirmed by three independent cross-checks (orbit
//! census, root-system counts, and the tables' own internal sums) — gives.
//! The embedded reference values are reproduced as stated, so those
//! assertions fail rather than being weakened to match.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;

use surfcone::cones::face_lattice;
use surfcone::lattice::{
    enumerate_nef_nonbig, enumerate_nef_nonbig_bounded, enumerate_negative_curves_bounded,
};
use surfcone::minkowski::{decompose_nef, minkowski_basis, Flag};
use surfcone::okounkov::{alpha_beta, minkowski_sum, okounkov_body, Polygon};
use surfcone::tables::{
    expected_census, known_discrepancy, nnb_type_census, Column, PRINTED_SOLUTION_TYPES,
};
use surfcone::zariski::{
    chamber_witness, count_chambers, enumerate_chambers, is_big, is_nef, neg_support,
    zariski_decompose, ChamberSupport,
};
use surfcone::{DivisorClass, Rat, SurfaceDatum};

fn rat(n: i64) -> Rat {
    surfcone::linalg::rat(n)
}

fn dp(r: usize) -> SurfaceDatum {
    SurfaceDatum::del_pezzo(r).expect("del Pezzo surface")
}

fn ab(a: i64, b: &[i64]) -> DivisorClass {
    DivisorClass::from_ab(a, b)
}

/// Print the single checklist line for criterion `n`, then assert.
fn report(n: &str, ok: bool, detail: &str) {
    println!("ACCEPTANCE {n}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "ACCEPTANCE {n} failed — {detail}");
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

// ---------------------------------------------------------------------------
// Criterion 1: negative-curve counts, double-bound search, < 1 s total.
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_negative_curve_counts() {
    const EXPECTED: [usize; 8] = [1, 3, 6, 10, 16, 27, 56, 240];
    const BUDGET: Duration = Duration::from_secs(1);
    let start = Instant::now();
    let mut failures = Vec::new();
    for r in 1..=8 {
        let stored = dp(r).negative_curves().len();
        let proven = enumerate_negative_curves_bounded(r, 7).unwrap();
        let relaxed = enumerate_negative_curves_bounded(r, 10).unwrap();
        if proven != relaxed {
            failures.push(format!("r={r}: degree bounds 7 and 10 disagree"));
        }
        if stored != EXPECTED[r - 1] || proven.len() != EXPECTED[r - 1] {
            failures.push(format!(
                "r={r}: counted {} (bounded search {}), expected {}",
                stored,
                proven.len(),
                EXPECTED[r - 1]
            ));
        }
    }
    let took = start.elapsed();
    if took > BUDGET {
        failures.push(format!("took {} over the 1s budget", secs(took)));
    }
    report(
        "1",
        failures.is_empty(),
        &if failures.is_empty() {
            format!(
                "negative-curve counts (1, 3, 6, 10, 16, 27, 56, 240) with degree bounds 7 and 10 in {} (budget 1s)",
                secs(took)
            )
        } else {
            failures.join("; ")
        },
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: Zariski-chamber counts. Fast tier r ≤ 6; slow tier r = 7, 8.
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_chamber_counts() {
    let mut failures = Vec::new();

    let start = Instant::now();
    let mut small = Vec::new();
    for r in 1..=5 {
        small.push(count_chambers(&dp(r)).unwrap());
    }
    let small_took = start.elapsed();
    if small != [2, 5, 18, 76, 393] {
        failures.push(format!("r=1..5 counts {small:?}, expected [2, 5, 18, 76, 393]"));
    }
    if small_took > Duration::from_secs(5) {
        failures.push(format!("r=1..5 took {} over the 5s budget", secs(small_took)));
    }

    let start = Instant::now();
    let six = count_chambers(&dp(6)).unwrap();
    let six_took = start.elapsed();
    if six != 2764 {
        failures.push(format!("r=6 count {six}, expected 2764"));
    }
    if six_took > Duration::from_secs(30) {
        failures.push(format!("r=6 took {} over the 30s budget", secs(six_took)));
    }

    report(
        "2",
        failures.is_empty(),
        &if failures.is_empty() {
            format!(
                "chamber counts (2, 5, 18, 76, 393) in {} (budget 5s) and 2764 at r=6 in {} (budget 30s)",
                secs(small_took),
                secs(six_took)
            )
        } else {
            failures.join("; ")
        },
    );
}

#[test]
#[ignore = "slow tier: run with -- --ignored"]
fn criterion_2_chamber_counts_slow() {
    let mut failures = Vec::new();

    let start = Instant::now();
    let seven = count_chambers(&dp(7)).unwrap();
    let seven_took = start.elapsed();
    if seven != 33645 {
        failures.push(format!("r=7 count {seven}, expected 33645"));
    }
    if seven_took > Duration::from_secs(120) {
        failures.push(format!("r=7 took {} over the 2min budget", secs(seven_took)));
    }

    let start = Instant::now();
    let eight = count_chambers(&dp(8)).unwrap();
    let eight_took = start.elapsed();
    if eight != 1501681 {
        failures.push(format!("r=8 count {eight}, expected 1501681"));
    }
    if eight_took > Duration::from_secs(900) {
        failures.push(format!("r=8 took {} over the 15min budget", secs(eight_took)));
    }

    report(
        "2 (slow tier)",
        failures.is_empty(),
        &if failures.is_empty() {
            format!(
                "33645 chambers at r=7 in {} (budget 2min) and 1501681 at r=8 in {} (budget 15min)",
                secs(seven_took),
                secs(eight_took)
            )
        } else {
            failures.join("; ")
        },
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: nef-non-big ray counts and the r = 8 solution-type census.
//
// The reference row (…, 119, 2040) and its 12-type census are reproduced
// here exactly as stated. Exact recomputation finds three additional
// solution types — (4; 3, 1^7), (5; 2^6, 1), (7; 4, 3, 2^6), each solving
// 3a − Σb = 2 and a² = Σb² — giving 126 at r = 7 (the E₇ root count) and
// 2160 at r = 8 (the E₈ norm-4 vector count). This test therefore FAILS
// honestly; see the README's discrepancy section.
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_nef_nonbig_counts() {
    const EXPECTED: [usize; 8] = [1, 2, 3, 5, 10, 27, 119, 2040];
    let mut failures = Vec::new();
    for r in 1..=8 {
        let rays = enumerate_nef_nonbig(r).unwrap();
        let bound = if r == 8 { 11 } else { 5 };
        let relaxed = enumerate_nef_nonbig_bounded(r, bound + 3).unwrap();
        if rays != relaxed {
            failures.push(format!("r={r}: degree bounds {bound} and {} disagree", bound + 3));
        }
        if rays.len() != EXPECTED[r - 1] {
            failures.push(format!("r={r}: counted {}, expected {}", rays.len(), EXPECTED[r - 1]));
        }
    }
    let census = nnb_type_census(8).unwrap();
    let printed = expected_census(&PRINTED_SOLUTION_TYPES, 8);
    if census != printed {
        let extra: Vec<String> = census
            .iter()
            .filter(|row| !printed.contains(row))
            .map(|(a, b, orbit)| format!("({a}; {b:?}) with orbit {orbit}"))
            .collect();
        failures.push(format!(
            "r=8 census has {} types, the reference table prints 12; additional solution types: {}",
            census.len(),
            extra.join(", ")
        ));
    }
    report(
        "3",
        failures.is_empty(),
        &if failures.is_empty() {
            "nef-non-big counts (1, 2, 3, 5, 10, 27, 119, 2040) and the 12-type census at r=8".into()
        } else {
            failures.join("; ")
        },
    );
}

// ---------------------------------------------------------------------------
// Criterion 4: Minkowski-basis cardinalities for an ample flag.
//
// Fast tier: r = 1..5 must match (3, 7, 21, 81, 403), and r = 6 must come
// out as 2791 — the reference table prints 2797 there, but its own row sums
// to 27 + 2764 = 2791, so agreement with 2797 is itself a failure. The
// discrepancy must be on record in the documented-discrepancy table.
// ---------------------------------------------------------------------------

fn ample_basis_len(r: usize) -> usize {
    let s = dp(r);
    let flag = Flag::general(&s, s.ample().clone()).unwrap();
    minkowski_basis(&s, &flag).unwrap().len()
}

#[test]
fn criterion_4_basis_cardinalities() {
    let mut failures = Vec::new();
    let start = Instant::now();
    for (r, expected) in [(1, 3), (2, 7), (3, 21), (4, 81), (5, 403)] {
        let got = ample_basis_len(r);
        if got != expected {
            failures.push(format!("r={r}: {got} elements, expected {expected}"));
        }
    }
    let six = ample_basis_len(6);
    if six == 2797 {
        failures.push("r=6: 2797 elements would match the reference row, which is internally inconsistent (its own columns sum to 2791)".into());
    } else if six != 2791 {
        failures.push(format!("r=6: {six} elements, expected 2791"));
    }
    match known_discrepancy(6, Column::Mb) {
        Some(doc) if doc.computed == 2791 && doc.reference == 2797 => {}
        _ => failures.push("r=6: the 2791-vs-2797 discrepancy is not documented".into()),
    }
    let took = start.elapsed();
    report(
        "4",
        failures.is_empty(),
        &if failures.is_empty() {
            format!(
                "ample-flag basis sizes (3, 7, 21, 81, 403), and 2791 at r=6 with the 2797 reference value flagged as a documented discrepancy, in {}",
                secs(took)
            )
        } else {
            failures.join("; ")
        },
    );
}

#[test]
#[ignore = "slow tier: run with -- --ignored"]
fn criterion_4_basis_cardinalities_slow() {
    // The reference values 33764 and 1503721 are asserted exactly as
    // stated. Recomputation gives 33771 and 1503841 — the same +7 and +120
    // offsets as the three missing solution types of criterion 3 (7 extra
    // rays at r = 7; 8 + 56 + 56 = 120 at r = 8), so this FAILS honestly.
    let mut failures = Vec::new();
    let start = Instant::now();
    let seven = ample_basis_len(7);
    let seven_took = start.elapsed();
    if seven != 33764 {
        failures.push(format!("r=7: {seven} elements, expected 33764"));
    }
    let start = Instant::now();
    let eight = ample_basis_len(8);
    let eight_took = start.elapsed();
    if eight != 1503721 {
        failures.push(format!("r=8: {eight} elements, expected 1503721"));
    }
    report(
        "4 (slow tier)",
        failures.is_empty(),
        &if failures.is_empty() {
            format!(
                "ample-flag basis sizes 33764 at r=7 in {} and 1503721 at r=8 in {}",
                secs(seven_took),
                secs(eight_took)
            )
        } else {
            failures.join("; ")
        },
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: the four flag examples on the two-point blowup, compared as
// sets of primitive classes.
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_flag_example_bases() {
    let s = dp(2);
    let cases: [(DivisorClass, Vec<DivisorClass>); 4] = [
        (
            ab(1, &[0, 0]),
            vec![ab(1, &[0, 0]), ab(1, &[1, 0]), ab(1, &[0, 1]), ab(2, &[1, 1])],
        ),
        (
            ab(2, &[1, 0]),
            vec![ab(2, &[1, 0]), ab(1, &[1, 0]), ab(1, &[0, 1]), ab(1, &[0, 0]), ab(3, &[2, 1])],
        ),
        (
            ab(2, &[1, 1]),
            vec![
                ab(2, &[1, 1]),
                ab(1, &[1, 0]),
                ab(1, &[0, 1]),
                ab(1, &[0, 0]),
                ab(2, &[1, 0]),
                ab(2, &[0, 1]),
            ],
        ),
        (
            ab(3, &[1, 1]),
            vec![
                ab(3, &[1, 1]),
                ab(1, &[0, 0]),
                ab(1, &[1, 0]),
                ab(1, &[0, 1]),
                ab(2, &[1, 1]),
                ab(3, &[1, 0]),
                ab(3, &[0, 1]),
            ],
        ),
    ];
    let mut failures = Vec::new();
    let mut sizes = Vec::new();
    for (curve, expected) in cases {
        let label = format!("{curve}");
        let flag = Flag::general(&s, curve).unwrap();
        let basis = minkowski_basis(&s, &flag).unwrap();
        let got: BTreeSet<DivisorClass> = basis.classes().cloned().collect();
        for class in &got {
            if !class.is_primitive() {
                failures.push(format!("flag {label}: element {class} is not primitive"));
            }
        }
        let want: BTreeSet<DivisorClass> = expected.iter().cloned().collect();
        if got != want {
            failures.push(format!(
                "flag {label}: got {{{}}}, expected {{{}}}",
                got.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "),
                want.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
            ));
        }
        sizes.push(got.len());
    }
    report(
        "5",
        failures.is_empty(),
        &if failures.is_empty() {
            format!("the four flag-example bases match as sets of primitive classes ({} elements)",
                sizes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", "))
        } else {
            failures.join("; ")
        },
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: Σfᵢ = NnB + Zar = #MB on r ≤ 4, each side from a different
// module (face enumeration / ray + chamber counting / basis construction).
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_census_identities() {
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for r in 1..=4 {
        let s = dp(r);
        let sum_f: u64 = face_lattice(&s, s.ample()).unwrap().f_vector.iter().sum();
        let nnb = enumerate_nef_nonbig(r).unwrap().len() as u64;
        let zar = count_chambers(&s).unwrap();
        let flag = Flag::general(&s, s.ample().clone()).unwrap();
        let mb = minkowski_basis(&s, &flag).unwrap().len() as u64;
        if sum_f != nnb + zar || nnb + zar != mb {
            failures.push(format!(
                "r={r}: Σf = {sum_f}, NnB + Zar = {} + {} = {}, #MB = {mb}",
                nnb,
                zar,
                nnb + zar
            ));
        }
        rows.push(format!("r={r}: {sum_f}"));
    }
    report(
        "6",
        failures.is_empty(),
        &if failures.is_empty() {
            format!("Σf = NnB + Zar = #MB on r ≤ 4 ({})", rows.join(", "))
        } else {
            failures.join("; ")
        },
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: randomized Zariski-decomposition property suite, plus the
// brute-force support oracle on r ≤ 2.
// ---------------------------------------------------------------------------

/// A random nonzero, nonnegative integer combination of the effective-cone
/// generators: integral and pseudo-effective by construction.
fn random_pseff(s: &SurfaceDatum, rng: &mut ChaCha8Rng) -> DivisorClass {
    loop {
        let mut d = DivisorClass::zero(s.rank());
        for g in s.eff_generators() {
            let c: i64 = rng.gen_range(0..=3);
            if c > 0 {
                d = d.add(&g.scale(&rat(c)));
            }
        }
        if !d.is_zero() {
            return d;
        }
    }
}

/// Determinant of a small rational matrix (cofactor expansion; the oracle
/// only ever sees systems of size ≤ 3).
fn det(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    match n {
        0 => Rat::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Rat::zero();
            for (j, pivot) in m[0].iter().enumerate() {
                if pivot.is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Rat>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != j)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let term = pivot * det(&minor);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

/// Solve `m x = rhs` by Cramer's rule; `None` when `m` is singular.
fn solve_cramer(m: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let d = det(m);
    if d.is_zero() {
        return None;
    }
    let n = m.len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut replaced = m.to_vec();
        for i in 0..n {
            replaced[i][j] = rhs[i].clone();
        }
        out.push(det(&replaced) / &d);
    }
    Some(out)
}

/// Brute-force Zariski decomposition: try every subset of negative curves
/// as the support, solve the orthogonality system, and keep the unique
/// candidate with positive coefficients, negative-definite Gram matrix,
/// and nef positive part.
fn oracle_decompose(s: &SurfaceDatum, d: &DivisorClass) -> Option<(DivisorClass, Vec<usize>)> {
    let curves = s.negative_curves();
    let mut found: Option<(DivisorClass, Vec<usize>)> = None;
    for mask in 0u32..(1 << curves.len()) {
        let support: Vec<usize> =
            (0..curves.len()).filter(|i| mask & (1 << i) != 0).collect();
        let gram: Vec<Vec<Rat>> = support
            .iter()
            .map(|&i| support.iter().map(|&j| s.intersect(&curves[i], &curves[j])).collect())
            .collect();
        // Negative-definiteness via leading principal minors: sign (−1)^k.
        let neg_def = (1..=support.len()).all(|k| {
            let minor: Vec<Vec<Rat>> =
                gram[..k].iter().map(|row| row[..k].to_vec()).collect();
            let dk = det(&minor);
            if k % 2 == 1 {
                dk.is_negative()
            } else {
                dk.is_positive()
            }
        });
        if !neg_def {
            continue;
        }
        let rhs: Vec<Rat> = support.iter().map(|&i| s.intersect(d, &curves[i])).collect();
        let Some(coeffs) = solve_cramer(&gram, &rhs) else { continue };
        if !coeffs.iter().all(Rat::is_positive) {
            continue;
        }
        let mut p = d.clone();
        for (&i, a) in support.iter().zip(&coeffs) {
            p = p.sub(&curves[i].scale(a));
        }
        if !is_nef(s, &p) {
            continue;
        }
        if found.is_some() {
            return None; // ambiguous — should never happen
        }
        found = Some((p, support));
    }
    found
}

/// The same surface with its negative-curve and generator lists shuffled.
fn permuted_surface(s: &SurfaceDatum, rng: &mut ChaCha8Rng) -> SurfaceDatum {
    let mut doc = s.to_json_value();
    for field in ["negative_curves", "eff_generators"] {
        let rows = doc[field].as_array_mut().unwrap();
        rows.shuffle(rng);
    }
    SurfaceDatum::from_json_value(&doc).unwrap()
}

#[test]
fn criterion_7_zariski_property_suite() {
    const PER_SURFACE: usize = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(701);
    let mut failures = Vec::new();
    let mut total = 0usize;
    for r in 1..=4 {
        let s = dp(r);
        let shuffled = permuted_surface(&s, &mut rng);
        for _ in 0..PER_SURFACE {
            let d = random_pseff(&s, &mut rng);
            total += 1;
            let z = match zariski_decompose(&s, &d) {
                Ok(z) => z,
                Err(e) => {
                    failures.push(format!("r={r}, D={d}: decomposition failed: {e}"));
                    continue;
                }
            };
            if !is_nef(&s, &z.p) {
                failures.push(format!("r={r}, D={d}: P={} is not nef", z.p));
            }
            if ChamberSupport::new(&s, z.support.clone()).is_err() {
                failures.push(format!(
                    "r={r}, D={d}: support {:?} is not negative-definite",
                    z.support
                ));
            }
            let mut n = DivisorClass::zero(s.rank());
            for (&i, a) in z.support.iter().zip(&z.coefficients) {
                if !a.is_positive() {
                    failures.push(format!("r={r}, D={d}: coefficient {a} not positive"));
                }
                if !s.intersect(&z.p, &s.negative_curves()[i]).is_zero() {
                    failures.push(format!("r={r}, D={d}: P meets support curve {i}"));
                }
                n = n.add(&s.negative_curves()[i].scale(a));
            }
            if n != z.n || z.p.add(&z.n) != d {
                failures.push(format!("r={r}, D={d}: P + N does not reconstruct D"));
            }
            // Idempotence: decomposing P again must leave it untouched.
            let again = zariski_decompose(&s, &z.p).unwrap();
            if again.p != z.p || !again.n.is_zero() {
                failures.push(format!("r={r}, D={d}: decomposition of P is not (P, 0)"));
            }
            // Order-independence: the curve list's order must not matter.
            let other = zariski_decompose(&shuffled, &d).unwrap();
            if other.p != z.p || other.n != z.n {
                failures.push(format!("r={r}, D={d}: permuted surface gives a different P"));
            }
            // Brute-force support oracle over all subsets (r ≤ 2).
            if r <= 2 {
                match oracle_decompose(&s, &d) {
                    Some((p, support)) if p == z.p && support == z.support => {}
                    Some((p, _)) => {
                        failures.push(format!("r={r}, D={d}: oracle P={p} differs from {}", z.p))
                    }
                    None => failures.push(format!("r={r}, D={d}: oracle found no decomposition")),
                }
            }
            if failures.len() > 8 {
                break;
            }
        }
        if failures.len() > 8 {
            break;
        }
    }
    report(
        "7",
        failures.is_empty(),
        &if failures.is_empty() {
            format!(
                "{total} randomized pseudo-effective classes on r ≤ 4 (200 per surface): P nef, negative-definite support, P·Nᵢ = 0, exact reconstruction, idempotence, order-independence; all-subset oracle agreement on r ≤ 2"
            )
        } else {
            failures.join("; ")
        },
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: Okounkov-body suite — area identity, basis additivity,
// homogeneity, and midpoint cross-checks of the sweep.
// ---------------------------------------------------------------------------

/// A random integral nef class: a nonnegative combination of the extremal
/// nef rays (the vertices of the ample slice).
fn random_nef(s: &SurfaceDatum, rays: &[DivisorClass], rng: &mut ChaCha8Rng) -> DivisorClass {
    loop {
        let mut d = DivisorClass::zero(s.rank());
        for ray in rays {
            let c: i64 = rng.gen_range(0..=2);
            if c > 0 {
                d = d.add(&ray.scale(&rat(c)));
            }
        }
        if !d.is_zero() {
            return d;
        }
    }
}

/// Δ of one weighted piece of a nef decomposition: big pieces via the body,
/// isotropic (non-big) pieces as the vertical segment {0} × [0, a·(P·C)].
fn piece_body(
    s: &SurfaceDatum,
    piece: &DivisorClass,
    weight: &Rat,
    flag: &Flag,
) -> Polygon {
    if is_big(s, piece) {
        okounkov_body(s, piece, flag).unwrap().scale(weight)
    } else {
        let top = weight * s.intersect(piece, flag.curve());
        Polygon::from_points(vec![(Rat::zero(), Rat::zero()), (Rat::zero(), top)]).unwrap()
    }
}

#[test]
fn criterion_8_okounkov_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(801);
    let mut failures = Vec::new();

    // Area identity: area(Δ(D)) = D²/2 for ≥ 100 random nef D per surface,
    // under both flag styles (a line-class flag and an anticanonical flag).
    let mut areas = 0usize;
    for r in 1..=4 {
        let s = dp(r);
        let rays = face_lattice(&s, s.ample()).unwrap().rays;
        let line = ab(1, &vec![0; r]);
        for flag_curve in [line, s.ample().clone()] {
            let flag = Flag::general(&s, flag_curve).unwrap();
            let mut done = 0;
            while done < 50 {
                let d = random_nef(&s, &rays, &mut rng);
                if !is_big(&s, &d) {
                    continue; // isotropic sample: the body degenerates
                }
                done += 1;
                areas += 1;
                let body = okounkov_body(&s, &d, &flag).unwrap();
                let two_area = body.area() * rat(2);
                if two_area != s.intersect(&d, &d) {
                    failures.push(format!(
                        "r={r}, D={d}, flag {}: 2·area = {two_area} ≠ D² = {}",
                        flag.curve(),
                        s.intersect(&d, &d)
                    ));
                }
                // Homogeneity on the same samples: Δ(2D) = 2Δ(D).
                let doubled = okounkov_body(&s, &d.scale(&rat(2)), &flag).unwrap();
                if doubled != body.scale(&rat(2)) {
                    failures.push(format!("r={r}, D={d}: Δ(2D) ≠ 2Δ(D)"));
                }
                // Midpoint cross-check: between consecutive breakpoints the
                // boundary functions must match a from-scratch decomposition
                // of D − tC.
                let (alpha, beta) = alpha_beta(&s, &d, &flag).unwrap();
                for w in alpha.breakpoints.windows(2) {
                    let m = (&w[0] + &w[1]) / rat(2);
                    let dt = d.sub(&flag.curve().scale(&m));
                    let z = zariski_decompose(&s, &dt).unwrap();
                    if alpha.eval(&m) != Some(Rat::zero()) {
                        failures.push(format!("r={r}, D={d}: α({m}) ≠ 0 for a general flag"));
                    }
                    if beta.eval(&m) != Some(s.intersect(&z.p, flag.curve())) {
                        failures.push(format!("r={r}, D={d}: β({m}) ≠ P·C at the midpoint"));
                    }
                }
                if failures.len() > 8 {
                    break;
                }
            }
            if failures.len() > 8 {
                break;
            }
        }
    }

    // Additivity: Δ(D) = Σ aᵢ Δ(Pᵢ) for the nef decomposition over the
    // Minkowski basis, ≥ 50 random nef D per surface on r ≤ 3.
    let mut sums = 0usize;
    for r in 1..=3 {
        let s = dp(r);
        let rays = face_lattice(&s, s.ample()).unwrap().rays;
        let flag = Flag::general(&s, s.ample().clone()).unwrap();
        let mut done = 0;
        while done < 50 {
            let d = random_nef(&s, &rays, &mut rng);
            if !is_big(&s, &d) {
                continue;
            }
            done += 1;
            sums += 1;
            let pieces = decompose_nef(&s, &flag, &d).unwrap();
            let mut reconstructed =
                Polygon::from_points(vec![(Rat::zero(), Rat::zero())]).unwrap();
            for (piece, weight) in &pieces {
                reconstructed = minkowski_sum(&reconstructed, &piece_body(&s, piece, weight, &flag));
            }
            let direct = okounkov_body(&s, &d, &flag).unwrap();
            if reconstructed != direct {
                failures.push(format!("r={r}, D={d}: Σ aᵢΔ(Pᵢ) ≠ Δ(D)"));
            }
            if failures.len() > 8 {
                break;
            }
        }
    }

    report(
        "8",
        failures.is_empty(),
        &if failures.is_empty() {
            format!(
                "area = D²/2, Δ(2D) = 2Δ(D), and per-segment midpoint cross-checks on {areas} random nef bodies (two flag styles, r ≤ 4); exact Minkowski-sum additivity on {sums} nef decompositions (r ≤ 3)"
            )
        } else {
            failures.join("; ")
        },
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: chamber witnesses round-trip — exhaustively for r ≤ 5 and on
// 1000 random chambers at r = 6.
// ---------------------------------------------------------------------------

#[test]
fn criterion_9_witness_round_trip() {
    let mut failures = Vec::new();
    let mut exhaustive = 0usize;
    for r in 1..=5 {
        let s = dp(r);
        for chamber in enumerate_chambers(&s, 1 << 20).unwrap() {
            exhaustive += 1;
            match chamber_witness(&s, &chamber) {
                Ok(w) => {
                    let back = neg_support(&s, &w).unwrap();
                    if back.curves() != chamber.curves() {
                        failures.push(format!(
                            "r={r}: witness of {:?} lands in {:?}",
                            chamber.curves(),
                            back.curves()
                        ));
                    }
                }
                Err(e) => failures.push(format!("r={r}: no witness for {:?}: {e}", chamber.curves())),
            }
            if failures.len() > 8 {
                break;
            }
        }
    }

    let s = dp(6);
    let chambers = enumerate_chambers(&s, 1 << 20).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(901);
    let mut indices: Vec<usize> = (0..chambers.len()).collect();
    indices.shuffle(&mut rng);
    for &k in indices.iter().take(1000) {
        match chamber_witness(&s, &chambers[k]) {
            Ok(w) => {
                let back = neg_support(&s, &w).unwrap();
                if back.curves() != chambers[k].curves() {
                    failures.push(format!(
                        "r=6: witness of {:?} lands in {:?}",
                        chambers[k].curves(),
                        back.curves()
                    ));
                }
            }
            Err(e) => failures.push(format!("r=6: no witness for {:?}: {e}", chambers[k].curves())),
        }
        if failures.len() > 8 {
            break;
        }
    }

    report(
        "9",
        failures.is_empty(),
        &if failures.is_empty() {
            format!(
                "witness round-trips on all {exhaustive} chambers for r ≤ 5 and 1000 random chambers at r = 6"
            )
        } else {
            failures.join("; ")
        },
    );
}

//! Enumeration of the distinguished class families of a del Pezzo lattice:
//! (-1)-classes, conic classes, and root classes, all found by a bounded
//! exhaustive search over `aH - sum b_i E_i`.
//!
//! Completeness of the search window: writing `s = c.c` and `t = c.K`, a
//! solution has `sum b_i = 3a + t` and `sum b_i^2 = a^2 - s`, so by
//! Cauchy-Schwarz `(3a + t)^2 <= n (a^2 - s)` with `n = rank - 1 <= 8`.
//! That quadratic in `a` has positive leading coefficient `9 - n`, hence a
//! finite integer window, and each `|b_i| <= sqrt(a^2 - s)`.

use crate::error::{Error, Result};
use crate::lattice::{DivClass, Kind, PicLattice};

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All classes `c` with `c.c = self_int` and `c.K = k_int` in a blow-up
/// lattice, in lexicographic coefficient order.
pub fn classes_with_invariants(
    lattice: &PicLattice,
    self_int: i64,
    k_int: i64,
) -> Result<Vec<DivClass>> {
    if lattice.kind() != Kind::Blowup {
        return Err(Error::KindMismatch {
            expected: Kind::Blowup,
            found: lattice.kind(),
        });
    }
    let n = lattice.rank() - 1;
    let (s, t) = (self_int, k_int);
    let mut out = Vec::new();

    // (9-n) a^2 + 6 t a + (t^2 + n s) <= 0
    let qa = (9 - n as i64) as f64;
    let qb = (6 * t) as f64;
    let qc = (t * t + n as i64 * s) as f64;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Ok(out);
    }
    let lo = ((-qb - disc.sqrt()) / (2.0 * qa)).floor() as i64 - 1;
    let hi = ((-qb + disc.sqrt()) / (2.0 * qa)).ceil() as i64 + 1;

    for a in lo..=hi {
        // exact re-check of the window predicate
        if (9 - n as i64) * a * a + 6 * t * a + t * t + n as i64 * s > 0 {
            continue;
        }
        let sum = 3 * a + t;
        let sq = a * a - s;
        if sq < 0 {
            continue;
        }
        if n == 0 {
            if sum == 0 && sq == 0 {
                out.push(DivClass(vec![a]));
            }
            continue;
        }
        let mut prefix = Vec::with_capacity(n);
        descending_solutions(n, sum, sq, isqrt(sq), &mut prefix, &mut |b| {
            emit_arrangements(a, b, &mut out);
        });
    }
    out.sort();
    Ok(out)
}

/// Enumerate non-increasing integer sequences of the given length with the
/// prescribed sum and sum of squares.
fn descending_solutions(
    slots: usize,
    sum: i64,
    sq: i64,
    max_v: i64,
    prefix: &mut Vec<i64>,
    emit: &mut impl FnMut(&[i64]),
) {
    if slots == 0 {
        if sum == 0 && sq == 0 {
            emit(prefix);
        }
        return;
    }
    // Cauchy-Schwarz prune on the remaining slots.
    if sum * sum > slots as i64 * sq {
        return;
    }
    let top = max_v.min(isqrt(sq));
    let bot = -isqrt(sq);
    for v in (bot..=top).rev() {
        prefix.push(v);
        descending_solutions(slots - 1, sum - v, sq - v * v, v, prefix, emit);
        prefix.pop();
    }
}

/// Expand a non-increasing multiset `b` into every distinct arrangement and
/// push the corresponding class `aH - sum b_i E_i`.
fn emit_arrangements(a: i64, b: &[i64], out: &mut Vec<DivClass>) {
    // group equal values
    let mut groups: Vec<(i64, usize)> = Vec::new();
    for &v in b {
        match groups.last_mut() {
            Some((gv, c)) if *gv == v => *c += 1,
            _ => groups.push((v, 1)),
        }
    }
    let n = b.len();
    let mut slot = vec![0i64; n];
    fn place(
        groups: &mut Vec<(i64, usize)>,
        slot: &mut Vec<i64>,
        pos: usize,
        a: i64,
        out: &mut Vec<DivClass>,
    ) {
        if pos == slot.len() {
            let mut coeffs = Vec::with_capacity(slot.len() + 1);
            coeffs.push(a);
            coeffs.extend(slot.iter().map(|&v| -v));
            out.push(DivClass(coeffs));
            return;
        }
        for i in 0..groups.len() {
            if groups[i].1 == 0 {
                continue;
            }
            groups[i].1 -= 1;
            slot[pos] = groups[i].0;
            place(groups, slot, pos + 1, a, out);
            groups[i].1 += 1;
        }
    }
    place(&mut groups, &mut slot, 0, a, out);
}

/// The (-1)-classes (`c.c = c.K = -1`): exceptional curves of the surface.
///
/// Product lattices have none, which is an empty result rather than an
/// error.
pub fn exceptional_classes(lattice: &PicLattice) -> Result<Vec<DivClass>> {
    if lattice.kind() == Kind::Product {
        return Ok(Vec::new());
    }
    classes_with_invariants(lattice, -1, -1)
}

/// Componentwise sum of all (-1)-classes.
pub fn sum_exceptional(lattice: &PicLattice) -> Result<DivClass> {
    if lattice.kind() == Kind::Product {
        return Err(Error::KindMismatch {
            expected: Kind::Blowup,
            found: Kind::Product,
        });
    }
    let mut acc = DivClass::zero(lattice.rank());
    for c in exceptional_classes(lattice)? {
        acc = &acc + &c;
    }
    Ok(acc)
}

/// Conic classes: `c.c = 0`, `c.K = -2`, filtered by the effectivity proxy
/// `c.H > 0` and `c.e >= 0` for every (-1)-class `e`.
pub fn conic_classes(lattice: &PicLattice) -> Result<Vec<DivClass>> {
    if lattice.kind() == Kind::Product {
        return Err(Error::KindMismatch {
            expected: Kind::Blowup,
            found: Kind::Product,
        });
    }
    let lines = exceptional_classes(lattice)?;
    let cands = classes_with_invariants(lattice, 0, -2)?;
    Ok(cands
        .into_iter()
        .filter(|c| c.0[0] > 0 && lines.iter().all(|e| lattice.pair_raw(c, e) >= 0))
        .collect())
}

/// Root classes: `c.c = -2`, `c.K = 0`. Their reflections generate the
/// symmetry group of the lattice.
pub fn root_classes(lattice: &PicLattice) -> Result<Vec<DivClass>> {
    if lattice.kind() == Kind::Product {
        return Err(Error::KindMismatch {
            expected: Kind::Blowup,
            found: Kind::Product,
        });
    }
    classes_with_invariants(lattice, -2, 0)
}

/// All `k`-element subsets of `classes` that are pairwise orthogonal
/// (`pair = 0`), i.e. simultaneously contractible curve collections.
pub fn disjoint_tuples(
    lattice: &PicLattice,
    classes: &[DivClass],
    k: usize,
) -> Result<Vec<Vec<DivClass>>> {
    for c in classes {
        lattice.check_rank(c)?;
    }
    let n = classes.len();
    let mut adj = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            adj[i * n + j] = i != j && lattice.pair_raw(&classes[i], &classes[j]) == 0;
        }
    }
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn rec(
        n: usize,
        k: usize,
        start: usize,
        adj: &[bool],
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if stack.len() == k {
            out.push(stack.clone());
            return;
        }
        for i in start..n {
            if stack.iter().all(|&j| adj[j * n + i]) {
                stack.push(i);
                rec(n, k, i + 1, adj, stack, out);
                stack.pop();
            }
        }
    }
    let mut idx_out = Vec::new();
    rec(n, k, 0, &adj, &mut stack, &mut idx_out);
    for idxs in idx_out {
        out.push(idxs.into_iter().map(|i| classes[i].clone()).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Kind, PicLattice};

    fn blowup(d: i64) -> PicLattice {
        PicLattice::new(d, Kind::Blowup).unwrap()
    }

    #[test]
    fn line_counts_by_degree() {
        let expected = [
            (8, 1),
            (7, 3),
            (6, 6),
            (5, 10),
            (4, 16),
            (3, 27),
            (2, 56),
            (1, 240),
        ];
        for (d, n) in expected {
            assert_eq!(
                exceptional_classes(&blowup(d)).unwrap().len(),
                n,
                "degree {d}"
            );
        }
        assert!(exceptional_classes(&blowup(9)).unwrap().is_empty());
        let p = PicLattice::new(8, Kind::Product).unwrap();
        assert!(exceptional_classes(&p).unwrap().is_empty());
    }

    #[test]
    fn degree_six_lines_are_the_hexagon_classes() {
        let l = blowup(6);
        let got = exceptional_classes(&l).unwrap();
        let mut expected = vec![
            DivClass(vec![0, 1, 0, 0]),
            DivClass(vec![0, 0, 1, 0]),
            DivClass(vec![0, 0, 0, 1]),
            DivClass(vec![1, 0, -1, -1]),
            DivClass(vec![1, -1, 0, -1]),
            DivClass(vec![1, -1, -1, 0]),
        ];
        expected.sort();
        assert_eq!(got, expected);
    }

    /// Independent oracle for the search window: a plain box scan over a
    /// wider coefficient range than the pruned search uses.
    fn brute_scan(l: &PicLattice, s: i64, t: i64, box_radius: i64) -> Vec<DivClass> {
        let r = l.rank();
        let mut out = Vec::new();
        let mut c = vec![-box_radius; r];
        loop {
            let d = DivClass(c.clone());
            if l.pair_raw(&d, &d) == s && l.pair_raw(&d, l.canonical()) == t {
                out.push(d);
            }
            let mut i = 0;
            loop {
                if i == r {
                    out.sort();
                    return out;
                }
                c[i] += 1;
                if c[i] <= box_radius {
                    break;
                }
                c[i] = -box_radius;
                i += 1;
            }
        }
    }

    #[test]
    fn bounded_search_matches_brute_scan_up_to_degree_five() {
        for d in [5, 6, 7, 8, 9] {
            let l = blowup(d);
            for (s, t) in [(-1, -1), (0, -2), (-2, 0)] {
                let fast = classes_with_invariants(&l, s, t).unwrap();
                let brute = brute_scan(&l, s, t, 7);
                assert_eq!(fast, brute, "degree {d}, invariants ({s},{t})");
            }
        }
    }

    #[test]
    fn sum_of_lines_matches_table() {
        // degree -> (H coefficient, E coefficient)
        let rows = [
            (8, 0, 1),
            (7, 1, 0),
            (6, 3, -1),
            (5, 6, -2),
            (4, 12, -4),
            (3, 27, -9),
            (2, 84, -28),
            (1, 720, -240),
        ];
        for (d, h, e) in rows {
            let l = blowup(d);
            let sum = sum_exceptional(&l).unwrap();
            let mut expected = vec![e; l.rank()];
            expected[0] = h;
            if d == 8 {
                // single line E1
                expected = vec![0, 1];
            }
            assert_eq!(sum.0, expected, "degree {d}");
        }
        assert!(sum_exceptional(&blowup(9)).unwrap().is_zero());
    }

    #[test]
    fn conic_classes_by_degree() {
        let l6 = blowup(6);
        let got: Vec<String> = conic_classes(&l6)
            .unwrap()
            .iter()
            .map(|c| c.name())
            .collect();
        assert_eq!(got, vec!["H-E1", "H-E2", "H-E3"]);

        let l8 = blowup(8);
        let got: Vec<String> = conic_classes(&l8)
            .unwrap()
            .iter()
            .map(|c| c.name())
            .collect();
        assert_eq!(got, vec!["H-E1"]);

        assert!(conic_classes(&blowup(9)).unwrap().is_empty());

        let counts = [(7, 2), (5, 5), (4, 10), (3, 27), (2, 126), (1, 2160)];
        for (d, n) in counts {
            assert_eq!(conic_classes(&blowup(d)).unwrap().len(), n, "degree {d}");
        }
    }

    #[test]
    fn root_classes_by_degree() {
        let l7 = blowup(7);
        let got = root_classes(&l7).unwrap();
        assert_eq!(got.len(), 2);
        assert!(got.contains(&DivClass(vec![0, 1, -1])));
        assert!(got.contains(&DivClass(vec![0, -1, 1])));

        // Root system sizes A1, A2xA1, A4, D5, E6, E7, E8.
        let counts = [
            (7, 2),
            (6, 8),
            (5, 20),
            (4, 40),
            (3, 72),
            (2, 126),
            (1, 240),
        ];
        for (d, n) in counts {
            assert_eq!(root_classes(&blowup(d)).unwrap().len(), n, "degree {d}");
        }
        assert!(root_classes(&blowup(8)).unwrap().is_empty());
    }

    #[test]
    fn lines_meet_the_rest_of_the_line_divisor_nonnegatively() {
        for d in 1..=8 {
            let l = blowup(d);
            let lines = exceptional_classes(&l).unwrap();
            let total = sum_exceptional(&l).unwrap();
            for c in &lines {
                let rest = &total - c;
                assert!(l.pair_raw(c, &rest) >= 0, "degree {d}, line {c}");
            }
        }
    }

    #[test]
    fn degree_six_incidence_is_the_hexagon() {
        let l = blowup(6);
        let lines = exceptional_classes(&l).unwrap();
        // cyclic order E1, E2', E3, E1', E2, E3'
        let cycle = ["E1", "H-E1-E3", "E3", "H-E2-E3", "E2", "H-E1-E2"];
        let get = |n: &str| {
            lines
                .iter()
                .find(|c| c.name() == n)
                .unwrap_or_else(|| panic!("line {n} missing"))
        };
        for i in 0..6 {
            for j in 0..6 {
                if i == j {
                    continue;
                }
                let expect_edge = (i + 1) % 6 == j || (j + 1) % 6 == i;
                let p = l.pair_raw(get(cycle[i]), get(cycle[j]));
                assert_eq!(p == 1, expect_edge, "{} vs {}", cycle[i], cycle[j]);
            }
        }
    }

    #[test]
    fn degree_five_line_graph_is_petersen() {
        // The 10 lines form the Petersen graph: labelling lines by 2-subsets
        // of {1..5}, two lines meet (pair = 1) iff their labels are
        // disjoint, so the meeting graph is 3-regular and the disjointness
        // graph (pair = 0) is its 6-regular complement.
        let l = blowup(5);
        let lines = exceptional_classes(&l).unwrap();
        assert_eq!(lines.len(), 10);
        for c in &lines {
            let meets = lines
                .iter()
                .filter(|o| *o != c && l.pair_raw(c, o) == 1)
                .count();
            let disjoint = lines
                .iter()
                .filter(|o| *o != c && l.pair_raw(c, o) == 0)
                .count();
            assert_eq!((meets, disjoint), (3, 6), "{c}");
        }
    }

    #[test]
    fn disjoint_tuple_counts() {
        let l5 = blowup(5);
        let lines5 = exceptional_classes(&l5).unwrap();
        assert_eq!(disjoint_tuples(&l5, &lines5, 4).unwrap().len(), 5);

        let l3 = blowup(3);
        let lines3 = exceptional_classes(&l3).unwrap();
        assert_eq!(disjoint_tuples(&l3, &lines3, 6).unwrap().len(), 72);
    }
}

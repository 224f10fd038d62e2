//! Exact integer linear algebra: Smith normal form with unimodular
//! witnesses, Hermite reduction, integer kernels and exact solves.
//!
//! Everything runs over `BigInt`, except the row-echelon prefilter used by
//! the cohomology paths, which works in checked `i128` and falls back to
//! `BigInt` if a product would overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense column-major-free integer matrix, row major storage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigInt>,
}

impl IMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        assert_eq!(rows * cols, data.len());
        IMat {
            rows,
            cols,
            data: data.iter().map(|&v| BigInt::from(v)).collect(),
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, rhs: &IMat) -> IMat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = IMat::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if !b.is_zero() {
                        let cur = out.at(i, j) + a * b;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[a] += q * row[b]
    fn add_row(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.at(a, j) + q * self.at(b, j);
            self.set(a, j, v);
        }
    }

    /// col[a] += q * col[b]
    fn add_col(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.at(i, a) + q * self.at(i, b);
            self.set(i, a, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.at(r, j);
            self.set(r, j, v);
        }
    }
}

/// Smith normal form `U * A * V = D` with unimodular `U`, `V` and the
/// divisibility chain `d_1 | d_2 | ...` along the diagonal of `D`.
pub struct Snf {
    pub d: IMat,
    pub u: IMat,
    pub v: IMat,
}

impl Snf {
    /// Nonzero diagonal entries, each dividing the next.
    pub fn invariants(&self) -> Vec<BigInt> {
        let n = self.d.rows.min(self.d.cols);
        (0..n)
            .map(|i| self.d.at(i, i).clone())
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariants().len()
    }
}

pub fn snf(a: &IMat) -> Snf {
    let mut d = a.clone();
    let mut u = IMat::identity(a.rows);
    let mut v = IMat::identity(a.cols);
    let (rows, cols) = (a.rows, a.cols);
    let n = rows.min(cols);

    for t in 0..n {
        loop {
            // find the nonzero entry of least magnitude in the working block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !d.at(i, j).is_zero() {
                        match best {
                            Some((bi, bj)) if d.at(bi, bj).abs() <= d.at(i, j).abs() => {}
                            _ => best = Some((i, j)),
                        }
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return normalize(Snf { d, u, v }, t);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut done = true;
            for i in t + 1..rows {
                if !d.at(i, t).is_zero() {
                    let q = -(d.at(i, t) / d.at(t, t));
                    d.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                    if !d.at(i, t).is_zero() {
                        done = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !d.at(t, j).is_zero() {
                    let q = -(d.at(t, j) / d.at(t, t));
                    d.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                    if !d.at(t, j).is_zero() {
                        done = false;
                    }
                }
            }
            if !done {
                continue;
            }
            // divisibility sweep: pivot must divide every remaining entry
            let mut fixed = true;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(d.at(i, j) % d.at(t, t)).is_zero() {
                        let one = BigInt::one();
                        d.add_col(t, j, &one);
                        v.add_col(t, j, &one);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
    }
    normalize(Snf { d, u, v }, n)
}

fn normalize(mut s: Snf, upto: usize) -> Snf {
    for i in 0..upto {
        if s.d.at(i, i).is_negative() {
            s.d.negate_row(i);
            s.u.negate_row(i);
        }
    }
    s
}

/// Integer kernel of `A`: columns form a basis of `{ x : A x = 0 }`.
pub fn kernel(a: &IMat) -> IMat {
    let s = snf(a);
    let r = s.rank();
    // A V = U^-1 D, so the last cols - r columns of V span the kernel.
    let mut out = IMat::zero(a.cols, a.cols - r);
    for j in r..a.cols {
        for i in 0..a.cols {
            out.set(i, j - r, s.v.at(i, j).clone());
        }
    }
    out
}

/// Solve `A X = B` exactly over the integers. Errors if no integral
/// solution exists.
pub fn solve_exact(a: &IMat, b: &IMat) -> Result<IMat> {
    assert_eq!(a.rows, b.rows);
    let s = snf(a);
    let ub = s.u.mul(b);
    let r = s.rank();
    let mut y = IMat::zero(a.cols, b.cols);
    for j in 0..b.cols {
        for i in 0..a.rows {
            let rhs = ub.at(i, j);
            if i < r {
                let dii = s.d.at(i, i);
                let (q, rem) = rhs.div_rem(dii);
                if !rem.is_zero() {
                    return Err(Error::InvalidInput(
                        "system has no integral solution".into(),
                    ));
                }
                y.set(i, j, q);
            } else if !rhs.is_zero() {
                return Err(Error::InvalidInput(
                    "system has no integral solution".into(),
                ));
            }
        }
    }
    Ok(s.v.mul(&y))
}

/// Invariant factors (entries != 1, in divisibility order) of the quotient
/// `Z^n / colspan(A)`, including `0` entries for free summands.
pub fn quotient_invariants(a: &IMat) -> Vec<BigInt> {
    let s = snf(a);
    let mut inv: Vec<BigInt> = s.invariants();
    while inv.len() < a.rows {
        inv.push(BigInt::zero());
    }
    inv.into_iter().filter(|x| !x.is_one()).collect()
}

/// Column Hermite form used to canonicalize lattice bases: result spans the
/// same column lattice, is column-reduced, and is unique for a given span.
pub fn hnf_basis(a: &IMat) -> IMat {
    // Work on the transpose with row operations, then transpose back.
    let mut m = IMat::zero(a.cols, a.rows);
    for i in 0..a.rows {
        for j in 0..a.cols {
            m.set(j, i, a.at(i, j).clone());
        }
    }
    let (rows, cols) = (m.rows, m.cols);
    let mut pivot_row = 0;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        // clear the column below via gcd steps
        loop {
            let mut idx: Option<usize> = None;
            for i in pivot_row..rows {
                if !m.at(i, col).is_zero() {
                    match idx {
                        Some(k) if m.at(k, col).abs() <= m.at(i, col).abs() => {}
                        _ => idx = Some(i),
                    }
                }
            }
            let Some(k) = idx else { break };
            m.swap_rows(pivot_row, k);
            let mut clean = true;
            for i in pivot_row + 1..rows {
                if !m.at(i, col).is_zero() {
                    let q = -(m.at(i, col) / m.at(pivot_row, col));
                    m.add_row(i, pivot_row, &q);
                    if !m.at(i, col).is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if !m.at(pivot_row, col).is_zero() {
            if m.at(pivot_row, col).is_negative() {
                m.negate_row(pivot_row);
            }
            // reduce the rows above
            for i in 0..pivot_row {
                let q = -(m.at(i, col).div_floor(m.at(pivot_row, col)));
                m.add_row(i, pivot_row, &q);
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }
    }
    // transpose the nonzero rows back into columns
    let mut out = IMat::zero(a.rows, pivot_row);
    for i in 0..pivot_row {
        for j in 0..a.rows {
            out.set(j, i, m.at(i, j).clone());
        }
    }
    out
}

/// Row-echelon prefilter: feed arbitrarily many rows, keep at most `cols`
/// pivot rows spanning the same row space. `i128` with overflow checks,
/// `BigInt` fallback.
pub struct Echelon {
    cols: usize,
    // (leading column, row) sorted by leading column
    rows_small: Vec<(usize, Vec<i128>)>,
    rows_big: Option<Vec<(usize, Vec<BigInt>)>>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon {
            cols,
            rows_small: Vec::new(),
            rows_big: None,
        }
    }

    /// Force the BigInt path immediately (exercises the fallback in tests).
    #[doc(hidden)]
    pub fn force_big(&mut self) {
        if self.rows_big.is_none() {
            let big = self
                .rows_small
                .iter()
                .map(|(l, r)| (*l, r.iter().map(|&v| BigInt::from(v)).collect()))
                .collect();
            self.rows_big = Some(big);
            self.rows_small.clear();
        }
    }

    #[doc(hidden)]
    pub fn is_big(&self) -> bool {
        self.rows_big.is_some()
    }

    pub fn insert(&mut self, row: &[i64]) {
        assert_eq!(row.len(), self.cols);
        if self.rows_big.is_none() {
            let r: Vec<i128> = row.iter().map(|&v| v as i128).collect();
            if self.insert_small(r).is_ok() {
                return;
            }
            // overflow: migrate everything to BigInt and retry
            let big = self
                .rows_small
                .iter()
                .map(|(l, r)| (*l, r.iter().map(|&v| BigInt::from(v)).collect()))
                .collect();
            self.rows_big = Some(big);
        }
        let r: Vec<BigInt> = row.iter().map(|&v| BigInt::from(v)).collect();
        self.insert_big(r);
    }

    fn insert_small(&mut self, mut row: Vec<i128>) -> std::result::Result<(), ()> {
        loop {
            let Some(lead) = row.iter().position(|&v| v != 0) else {
                return Ok(());
            };
            let pos = self.rows_small.partition_point(|(l, _)| *l < lead);
            if pos < self.rows_small.len() && self.rows_small[pos].0 == lead {
                let piv = self.rows_small[pos].1.clone();
                let a = piv[lead];
                let b = row[lead];
                let g = gcd_i128(a, b);
                let (ca, cb) = (a / g, b / g);
                for j in 0..self.cols {
                    let x = ca.checked_mul(row[j]).ok_or(())?;
                    let y = cb.checked_mul(piv[j]).ok_or(())?;
                    row[j] = x.checked_sub(y).ok_or(())?;
                }
                normalize_row_i128(&mut row);
            } else {
                normalize_row_i128(&mut row);
                self.rows_small.insert(pos, (lead, row));
                return Ok(());
            }
        }
    }

    fn insert_big(&mut self, mut row: Vec<BigInt>) {
        let rows = self.rows_big.as_mut().unwrap();
        loop {
            let Some(lead) = row.iter().position(|v| !v.is_zero()) else {
                return;
            };
            let pos = rows.partition_point(|(l, _)| *l < lead);
            if pos < rows.len() && rows[pos].0 == lead {
                let piv = rows[pos].1.clone();
                let a = piv[lead].clone();
                let b = row[lead].clone();
                let g = a.gcd(&b);
                let (ca, cb) = (&a / &g, &b / &g);
                for j in 0..self.cols {
                    row[j] = &ca * &row[j] - &cb * &piv[j];
                }
                normalize_row_big(&mut row);
            } else {
                normalize_row_big(&mut row);
                rows.insert(pos, (lead, row));
                return;
            }
        }
    }

    /// The retained rows as a BigInt matrix (row space equals that of all
    /// inserted rows).
    pub fn matrix(&self) -> IMat {
        match &self.rows_big {
            Some(rows) => {
                let mut m = IMat::zero(rows.len(), self.cols);
                for (i, (_, r)) in rows.iter().enumerate() {
                    for j in 0..self.cols {
                        m.set(i, j, r[j].clone());
                    }
                }
                m
            }
            None => {
                let mut m = IMat::zero(self.rows_small.len(), self.cols);
                for (i, (_, r)) in self.rows_small.iter().enumerate() {
                    for j in 0..self.cols {
                        m.set(i, j, BigInt::from(r[j]));
                    }
                }
                m
            }
        }
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn normalize_row_i128(row: &mut [i128]) {
    let mut g: i128 = 0;
    for &v in row.iter() {
        g = gcd_i128(g, v);
        if g == 1 {
            return;
        }
    }
    if g > 1 {
        for v in row.iter_mut() {
            *v /= g;
        }
    }
}

fn normalize_row_big(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for v in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for v in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_witnesses(a: &IMat) {
        let s = snf(a);
        let lhs = s.u.mul(a).mul(&s.v);
        assert_eq!(lhs, s.d);
        let inv = s.invariants();
        for w in inv.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "divisibility chain broken");
        }
    }

    #[test]
    fn snf_examples() {
        let id = IMat::identity(3);
        assert_eq!(
            snf(&id).invariants(),
            vec![BigInt::from(1), BigInt::from(1), BigInt::from(1)]
        );

        let d = IMat::from_i64(2, 2, &[2, 0, 0, 4]);
        assert_eq!(snf(&d).invariants(), vec![BigInt::from(2), BigInt::from(4)]);

        let m = IMat::from_i64(2, 2, &[2, 4, 6, 8]);
        assert_eq!(snf(&m).invariants(), vec![BigInt::from(2), BigInt::from(4)]);
        check_witnesses(&m);
    }

    #[test]
    fn snf_witnesses_on_handpicked_matrices() {
        for data in [
            vec![0, 0, 0, 0, 0, 0],
            vec![1, 2, 3, 4, 5, 6],
            vec![-3, 1, 4, -1, 5, 9],
            vec![6, 10, 15, 35, 21, 14],
        ] {
            let a = IMat::from_i64(2, 3, &data);
            check_witnesses(&a);
            let b = IMat::from_i64(3, 2, &data);
            check_witnesses(&b);
        }
    }

    #[test]
    fn kernel_and_solve() {
        // x + y + z = 0 has kernel of rank 2
        let a = IMat::from_i64(1, 3, &[1, 1, 1]);
        let k = kernel(&a);
        assert_eq!(k.cols, 2);
        let prod = a.mul(&k);
        assert!(prod.data.iter().all(|v| v.is_zero()));

        let a = IMat::from_i64(2, 2, &[1, 2, 3, 4]);
        let b = IMat::from_i64(2, 1, &[5, 11]);
        let x = solve_exact(&a, &b).unwrap();
        assert_eq!(a.mul(&x), b);

        let b_bad = IMat::from_i64(2, 1, &[1, 0]);
        assert!(solve_exact(&a, &b_bad).is_err());
    }

    #[test]
    fn quotient_invariants_examples() {
        // Z^2 / <(2,2)> = Z + Z/2
        let a = IMat::from_i64(2, 1, &[2, 2]);
        assert_eq!(
            quotient_invariants(&a),
            vec![BigInt::from(2), BigInt::from(0)]
        );
        // Z^2 / <(1,0),(0,1)> = 0
        let b = IMat::identity(2);
        assert!(quotient_invariants(&b).is_empty());
    }

    #[test]
    fn echelon_overflow_migrates_to_bigint_and_agrees() {
        // entries near 2^61 whose elimination coefficients compound
        // quadratically, then cubically, past i128: the small path must
        // hand over to BigInt mid-stream
        let m: i64 = (1 << 61) + 1;
        let rows: Vec<Vec<i64>> = vec![
            vec![m, m + 1, m + 3, 1],
            vec![m + 1, 1, 0, 2],
            vec![m + 2, 0, 1, 4],
            vec![m + 3, 5, 2, 8],
        ];
        let mut fast = Echelon::new(4);
        let mut big = Echelon::new(4);
        big.force_big();
        for r in &rows {
            fast.insert(r);
            big.insert(r);
        }
        assert!(big.is_big());
        assert!(
            fast.is_big(),
            "the small path never overflowed; weaken the inputs"
        );
        // both reductions must present the same row space: equal kernels
        let kf = kernel(&fast.matrix());
        let kb = kernel(&big.matrix());
        assert_eq!(kf.cols, kb.cols);
        let mut full = IMat::zero(rows.len(), 4);
        for (i, r) in rows.iter().enumerate() {
            for j in 0..4 {
                full.set(i, j, BigInt::from(r[j]));
            }
        }
        assert!(full.mul(&kf).data.iter().all(|v| v.is_zero()));
        assert!(full.mul(&kb).data.iter().all(|v| v.is_zero()));
        assert_eq!(kernel(&full).cols, kf.cols);
    }

    #[test]
    fn echelon_matches_direct_kernel() {
        let rows: Vec<Vec<i64>> = vec![
            vec![1, 2, 3, 4],
            vec![2, 4, 6, 8],
            vec![0, 1, 1, 0],
            vec![1, 3, 4, 4],
            vec![5, 0, 0, 5],
        ];
        let mut ech = Echelon::new(4);
        for r in &rows {
            ech.insert(r);
        }
        let reduced = ech.matrix();
        let mut full = IMat::zero(rows.len(), 4);
        for (i, r) in rows.iter().enumerate() {
            for j in 0..4 {
                full.set(i, j, BigInt::from(r[j]));
            }
        }
        let k1 = kernel(&reduced);
        let k2 = kernel(&full);
        assert_eq!(k1.cols, k2.cols);
        // both must actually be kernels of the full matrix
        assert!(full.mul(&k1).data.iter().all(|v| v.is_zero()));
    }
}

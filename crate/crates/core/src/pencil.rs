//! Degeneracy locus of a pencil of quadrics in five variables: the binary
//! quintic `det(t0 Q0 + t1 Q1)` and its squarefreeness over the rationals.
//!
//! A quartic del Pezzo surface is the base locus of such a pencil; the
//! degeneracy scheme is etale of length 5 exactly when the quintic is
//! squarefree (counting the root at infinity).

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PENCIL_SIZE: usize = 5;

/// `det(t0 Q0 + t1 Q1)` as a binary quintic plus the etale flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    /// Coefficient of `t0^(5-i) t1^i`, for i = 0..=5, as decimal strings.
    pub quintic: Vec<String>,
    /// Squarefree over Q, including the point at infinity.
    pub etale: bool,
}

fn check_symmetric(q: &[Vec<i64>], name: &str) -> Result<()> {
    if q.len() != PENCIL_SIZE || q.iter().any(|r| r.len() != PENCIL_SIZE) {
        return Err(Error::InvalidInput(format!("{name} must be 5x5")));
    }
    for i in 0..PENCIL_SIZE {
        for j in 0..i {
            if q[i][j] != q[j][i] {
                return Err(Error::InvalidInput(format!(
                    "{name} is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    Ok(())
}

/// Dense univariate polynomial over BigInt, index = degree.
type Poly = Vec<BigInt>;

fn poly_trim(p: &mut Poly) {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    poly_trim(&mut out);
    out
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let neg: Poly = b.iter().map(|c| -c).collect();
    poly_add(a, &neg)
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.iter().all(|c| c.is_zero()) || b.iter().all(|c| c.is_zero()) {
        return vec![BigInt::zero()];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            if !cb.is_zero() {
                out[i + j] += ca * cb;
            }
        }
    }
    poly_trim(&mut out);
    out
}

fn poly_is_zero(p: &Poly) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn poly_deg(p: &Poly) -> usize {
    let mut d = p.len();
    while d > 1 && p[d - 1].is_zero() {
        d -= 1;
    }
    d - 1
}

/// Determinant of a matrix of polynomials by Laplace expansion.
fn poly_det(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = vec![BigInt::zero()];
    for j in 0..n {
        if poly_is_zero(&m[0][j]) {
            continue;
        }
        let minor: Vec<Vec<Poly>> = (1..n)
            .map(|i| {
                (0..n)
                    .filter(|&c| c != j)
                    .map(|c| m[i][c].clone())
                    .collect()
            })
            .collect();
        let term = poly_mul(&m[0][j], &poly_det(&minor));
        acc = if j % 2 == 0 {
            poly_add(&acc, &term)
        } else {
            poly_sub(&acc, &term)
        };
    }
    acc
}

fn content(p: &Poly) -> BigInt {
    let mut g = BigInt::zero();
    for c in p {
        g = num_integer::Integer::gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    if g.is_zero() {
        BigInt::one()
    } else {
        g
    }
}

fn primitive_part(p: &Poly) -> Poly {
    let g = content(p);
    p.iter().map(|c| c / &g).collect()
}

/// gcd over Q via the primitive pseudo-remainder sequence.
fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut f = primitive_part(a);
    let mut g = primitive_part(b);
    poly_trim(&mut f);
    poly_trim(&mut g);
    if poly_is_zero(&f) {
        return g;
    }
    if poly_is_zero(&g) {
        return f;
    }
    loop {
        if poly_deg(&f) < poly_deg(&g) {
            std::mem::swap(&mut f, &mut g);
        }
        if poly_is_zero(&g) {
            poly_trim(&mut f);
            return f;
        }
        // pseudo-remainder of f by g
        let mut r = f.clone();
        let lead_g = g[poly_deg(&g)].clone();
        while !poly_is_zero(&r) && poly_deg(&r) >= poly_deg(&g) {
            let shift = poly_deg(&r) - poly_deg(&g);
            let lead_r = r[poly_deg(&r)].clone();
            // r = lead_g * r - lead_r * x^shift * g
            let mut scaled_g = vec![BigInt::zero(); shift];
            scaled_g.extend(g.iter().map(|c| c * &lead_r));
            let scaled_r: Poly = r.iter().map(|c| c * &lead_g).collect();
            r = poly_sub(&scaled_r, &scaled_g);
            poly_trim(&mut r);
            if poly_is_zero(&r) {
                break;
            }
        }
        if poly_is_zero(&r) {
            poly_trim(&mut g);
            return primitive_part(&g);
        }
        f = g;
        g = primitive_part(&r);
    }
}

fn poly_derivative(p: &Poly) -> Poly {
    if p.len() <= 1 {
        return vec![BigInt::zero()];
    }
    let mut out: Poly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    poly_trim(&mut out);
    out
}

/// Squarefreeness over Q of the dehomogenized quintic, with the root at
/// infinity accounted for by the degree drop.
fn binary_form_squarefree(coeffs: &[BigInt]) -> bool {
    // g(x) = sum coeffs[i] x^i; multiplicity of [0:1] is 5 - deg g
    let g: Poly = coeffs.to_vec();
    let mut gg = g.clone();
    poly_trim(&mut gg);
    let deg = poly_deg(&gg);
    if coeffs.len() - 1 - deg >= 2 {
        return false;
    }
    if deg == 0 {
        return true;
    }
    let gcd = poly_gcd(&gg, &poly_derivative(&gg));
    poly_deg(&gcd) == 0
}

/// Compute the degeneracy quintic of the pencil `t0 Q0 + t1 Q1` and decide
/// whether its zero scheme is etale of length 5.
pub fn degeneracy_quintic(q0: &[Vec<i64>], q1: &[Vec<i64>]) -> Result<DegeneracyReport> {
    check_symmetric(q0, "Q0")?;
    check_symmetric(q1, "Q1")?;
    // entry (i,j) is the linear form q0[i][j] * t0 + q1[i][j] * t1; in the
    // dehomogenized variable x = t1/t0 it is q0 + q1 x, and homogeneity
    // restores the t0 powers afterwards
    let m: Vec<Vec<Poly>> = (0..PENCIL_SIZE)
        .map(|i| {
            (0..PENCIL_SIZE)
                .map(|j| vec![BigInt::from(q0[i][j]), BigInt::from(q1[i][j])])
                .collect()
        })
        .collect();
    let det = poly_det(&m);
    let mut coeffs = vec![BigInt::zero(); PENCIL_SIZE + 1];
    for (i, c) in det.iter().enumerate() {
        coeffs[i] = c.clone();
    }
    if coeffs.iter().all(|c| c.is_zero()) {
        return Err(Error::InvalidInput(
            "pencil is everywhere singular: the quintic vanishes identically".into(),
        ));
    }
    let etale = binary_form_squarefree(&coeffs);
    Ok(DegeneracyReport {
        quintic: coeffs.iter().map(|c| c.to_string()).collect(),
        etale,
    })
}

/// Independent oracle route for the tests: squarefreeness via the Sylvester
/// resultant of the dehomogenized quintic and its derivative.
pub fn squarefree_by_resultant(coeffs: &[BigInt]) -> bool {
    let mut g = coeffs.to_vec();
    poly_trim(&mut g);
    let deg = poly_deg(&g);
    if coeffs.len() - 1 - deg >= 2 {
        return false;
    }
    if deg <= 1 {
        return true;
    }
    let dg = poly_derivative(&g);
    let ddeg = poly_deg(&dg);
    let n = deg + ddeg;
    // Sylvester matrix, rows are shifted coefficient vectors
    let mut syl = vec![vec![BigInt::zero(); n]; n];
    for r in 0..ddeg {
        for (i, c) in g.iter().enumerate() {
            syl[r][r + (deg - i)] = c.clone();
        }
    }
    for r in 0..deg {
        for (i, c) in dg.iter().enumerate() {
            syl[ddeg + r][r + (ddeg - i)] = c.clone();
        }
    }
    !bigint_det(&syl).is_zero()
}

fn bigint_det(m: &[Vec<BigInt>]) -> BigInt {
    // fraction-free Bareiss elimination
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

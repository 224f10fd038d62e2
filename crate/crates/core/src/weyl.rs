//! Lattice automorphisms: integer matrices preserving the intersection
//! form and fixing the canonical class, together with their induced
//! permutation of the distinguished classes.

use std::collections::HashMap;

use crate::classes::exceptional_classes;
use crate::error::{Error, Result};
use crate::lattice::{DivClass, Kind, PicLattice};

/// The permutation domain of a lattice: the (-1)-classes for blow-up
/// lattices, the two rulings for the product lattice.
#[derive(Clone, Debug)]
pub struct PermDomain {
    pub classes: Vec<DivClass>,
    index: HashMap<DivClass, usize>,
    /// Indices of a subset of `classes` forming a lattice basis, with the
    /// inverse of that basis matrix; present iff the domain action is
    /// faithful (the classes span the lattice).
    span: Option<(Vec<usize>, Vec<i64>)>,
    rank: usize,
}

impl PermDomain {
    pub fn for_lattice(lattice: &PicLattice) -> Result<PermDomain> {
        let classes = match lattice.kind() {
            Kind::Blowup => exceptional_classes(lattice)?,
            Kind::Product => vec![DivClass(vec![0, 1]), DivClass(vec![1, 0])],
        };
        let rank = lattice.rank();
        let index = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        let span = find_unimodular_subset(&classes, rank);
        Ok(PermDomain {
            classes,
            index,
            span,
            rank,
        })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn position(&self, c: &DivClass) -> Option<usize> {
        self.index.get(c).copied()
    }

    /// Whether permutations of the domain determine the matrix.
    pub fn is_faithful(&self) -> bool {
        self.span.is_some()
    }

    /// Reconstruct the automorphism matrix from a permutation of the domain.
    pub fn matrix_from_perm(&self, perm: &[u8]) -> Result<Vec<i64>> {
        let Some((basis_idx, binv)) = &self.span else {
            // the only group acting here is trivial
            return if perm.iter().enumerate().all(|(i, &p)| p as usize == i) {
                Ok(identity_matrix(self.rank))
            } else {
                Err(Error::NotAnAutomorphism(
                    "nontrivial permutation on a non-spanning domain".into(),
                ))
            };
        };
        let r = self.rank;
        // columns of IMG are images of the chosen basis classes
        let mut img = vec![0i64; r * r];
        for (col, &bi) in basis_idx.iter().enumerate() {
            let target = &self.classes[perm[bi] as usize];
            for row in 0..r {
                img[row * r + col] = target.0[row];
            }
        }
        Ok(mat_mul(&img, binv, r))
    }
}

/// Find `rank` classes whose coefficient matrix has determinant +-1, and
/// return (their indices, the inverse matrix).
fn find_unimodular_subset(classes: &[DivClass], rank: usize) -> Option<(Vec<usize>, Vec<i64>)> {
    if classes.len() < rank {
        return None;
    }
    // Greedy: extend an independent set in order; then check unimodularity.
    let mut chosen: Vec<usize> = Vec::new();
    for (i, _) in classes.iter().enumerate() {
        if chosen.len() == rank {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(i);
        if subset_rank(classes, &trial) == trial.len() {
            chosen = trial;
        }
    }
    if chosen.len() < rank {
        return None;
    }
    let mut basis = vec![0i64; rank * rank];
    for (col, &ci) in chosen.iter().enumerate() {
        for row in 0..rank {
            basis[row * rank + col] = classes[ci].0[row];
        }
    }
    let (det, adj) = det_and_adjugate(&basis, rank);
    if det == 1 {
        Some((chosen, adj))
    } else if det == -1 {
        Some((chosen, adj.iter().map(|v| -v).collect()))
    } else {
        // Exceptional-class bases of del Pezzo lattices are unimodular
        // whenever they span; a non-unit determinant would mean the greedy
        // pick failed, so fall back to a small search.
        search_unimodular(classes, rank)
    }
}

fn search_unimodular(classes: &[DivClass], rank: usize) -> Option<(Vec<usize>, Vec<i64>)> {
    let n = classes.len().min(12);
    let mut idx: Vec<usize> = Vec::new();
    fn rec(
        classes: &[DivClass],
        rank: usize,
        n: usize,
        start: usize,
        idx: &mut Vec<usize>,
    ) -> Option<(Vec<usize>, Vec<i64>)> {
        if idx.len() == rank {
            let mut basis = vec![0i64; rank * rank];
            for (col, &ci) in idx.iter().enumerate() {
                for row in 0..rank {
                    basis[row * rank + col] = classes[ci].0[row];
                }
            }
            let (det, adj) = det_and_adjugate(&basis, rank);
            return match det {
                1 => Some((idx.clone(), adj)),
                -1 => Some((idx.clone(), adj.iter().map(|v| -v).collect())),
                _ => None,
            };
        }
        for i in start..n {
            idx.push(i);
            if let Some(hit) = rec(classes, rank, n, i + 1, idx) {
                return Some(hit);
            }
            idx.pop();
        }
        None
    }
    rec(classes, rank, n, 0, &mut idx)
}

fn subset_rank(classes: &[DivClass], idx: &[usize]) -> usize {
    // rank over Q via fraction-free elimination in i128
    let rows = idx.len();
    let cols = classes[0].0.len();
    let mut m: Vec<Vec<i128>> = idx
        .iter()
        .map(|&i| classes[i].0.iter().map(|&v| v as i128).collect())
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let (a, b) = (m[rank][c], m[r][c]);
                for j in 0..cols {
                    m[r][j] = a * m[r][j] - b * m[rank][j];
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub(crate) fn identity_matrix(rank: usize) -> Vec<i64> {
    let mut m = vec![0i64; rank * rank];
    for i in 0..rank {
        m[i * rank + i] = 1;
    }
    m
}

pub(crate) fn mat_mul(a: &[i64], b: &[i64], r: usize) -> Vec<i64> {
    let mut out = vec![0i64; r * r];
    for i in 0..r {
        for k in 0..r {
            let av = a[i * r + k];
            if av == 0 {
                continue;
            }
            for j in 0..r {
                out[i * r + j] += av * b[k * r + j];
            }
        }
    }
    out
}

pub(crate) fn mat_apply(m: &[i64], x: &[i64], r: usize) -> Vec<i64> {
    let mut out = vec![0i64; r];
    for i in 0..r {
        let mut acc = 0i64;
        for j in 0..r {
            acc += m[i * r + j] * x[j];
        }
        out[i] = acc;
    }
    out
}

/// Determinant and adjugate of a small integer matrix (so `m * adj = det * I`).
fn det_and_adjugate(m: &[i64], r: usize) -> (i64, Vec<i64>) {
    fn det(m: &[i128], r: usize) -> i128 {
        if r == 0 {
            return 1;
        }
        if r == 1 {
            return m[0];
        }
        let mut acc = 0i128;
        for j in 0..r {
            if m[j] == 0 {
                continue;
            }
            let minor: Vec<i128> = (1..r)
                .flat_map(|i| (0..r).filter(|&c| c != j).map(move |c| (i, c)))
                .map(|(i, c)| m[i * r + c])
                .collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            acc += s * m[j] * det(&minor, r - 1);
        }
        acc
    }
    let big: Vec<i128> = m.iter().map(|&v| v as i128).collect();
    let d = det(&big, r);
    let mut adj = vec![0i64; r * r];
    for i in 0..r {
        for j in 0..r {
            let minor: Vec<i128> = (0..r)
                .filter(|&a| a != i)
                .flat_map(|a| (0..r).filter(|&b| b != j).map(move |b| (a, b)))
                .map(|(a, b)| big[a * r + b])
                .collect();
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            // adjugate is the transposed cofactor matrix
            adj[j * r + i] = (s * det(&minor, r - 1)) as i64;
        }
    }
    (d as i64, adj)
}

/// An automorphism of the Picard lattice: preserves the Gram matrix, fixes
/// the canonical class, and therefore permutes the (-1)-classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeAut {
    rank: usize,
    mat: Vec<i64>,
    perm: Vec<u8>,
}

impl LatticeAut {
    /// Validate a matrix as a lattice automorphism and cache its permutation
    /// of the domain classes.
    pub fn new(lattice: &PicLattice, domain: &PermDomain, mat: Vec<i64>) -> Result<LatticeAut> {
        let r = lattice.rank();
        if mat.len() != r * r {
            return Err(Error::DimensionMismatch {
                expected: r * r,
                found: mat.len(),
            });
        }
        // M^T G M = G
        let gram = lattice.gram();
        for i in 0..r {
            for j in 0..r {
                let mut acc = 0i64;
                for k in 0..r {
                    for l in 0..r {
                        acc += mat[k * r + i] * gram[k * r + l] * mat[l * r + j];
                    }
                }
                if acc != gram[i * r + j] {
                    return Err(Error::NotAnAutomorphism(format!(
                        "does not preserve the intersection form at ({i},{j})"
                    )));
                }
            }
        }
        let k_img = mat_apply(&mat, &lattice.canonical().0, r);
        if k_img != lattice.canonical().0 {
            return Err(Error::NotAnAutomorphism(
                "does not fix the canonical class".into(),
            ));
        }
        let mut perm = vec![0u8; domain.len()];
        for (i, c) in domain.classes.iter().enumerate() {
            let img = DivClass(mat_apply(&mat, &c.0, r));
            let Some(j) = domain.position(&img) else {
                return Err(Error::NotAnAutomorphism(format!(
                    "image {img} of {c} is not a distinguished class"
                )));
            };
            perm[i] = j as u8;
        }
        Ok(LatticeAut { rank: r, mat, perm })
    }

    pub fn from_perm(lattice: &PicLattice, domain: &PermDomain, perm: &[u8]) -> Result<LatticeAut> {
        let mat = domain.matrix_from_perm(perm)?;
        let aut = LatticeAut::new(lattice, domain, mat)?;
        if aut.perm != perm {
            return Err(Error::NotAnAutomorphism(
                "permutation is not induced by any lattice automorphism".into(),
            ));
        }
        Ok(aut)
    }

    pub fn identity(lattice: &PicLattice, domain: &PermDomain) -> LatticeAut {
        LatticeAut {
            rank: lattice.rank(),
            mat: identity_matrix(lattice.rank()),
            perm: (0..domain.len() as u8).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &[i64] {
        &self.mat
    }

    pub fn perm(&self) -> &[u8] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.mat == identity_matrix(self.rank)
    }

    pub fn apply(&self, c: &DivClass) -> Result<DivClass> {
        if c.rank() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: c.rank(),
            });
        }
        Ok(DivClass(mat_apply(&self.mat, &c.0, self.rank)))
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &LatticeAut) -> LatticeAut {
        assert_eq!(self.rank, other.rank);
        LatticeAut {
            rank: self.rank,
            mat: mat_mul(&self.mat, &other.mat, self.rank),
            perm: other.perm.iter().map(|&i| self.perm[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> LatticeAut {
        let (det, adj) = det_and_adjugate(&self.mat, self.rank);
        debug_assert!(det == 1 || det == -1);
        let mat = if det == 1 {
            adj
        } else {
            adj.iter().map(|v| -v).collect()
        };
        let mut perm = vec![0u8; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p as usize] = i as u8;
        }
        LatticeAut {
            rank: self.rank,
            mat,
            perm,
        }
    }
}

/// Reflections in the simple roots: `s_r(x) = x + (x.r) r`.
///
/// Simple roots of a blow-up lattice: `E_i - E_{i+1}` and, when at least
/// three exceptional classes exist, `H - E1 - E2 - E3`. The product lattice
/// gets the factor swap.
pub fn simple_reflections(lattice: &PicLattice, domain: &PermDomain) -> Result<Vec<LatticeAut>> {
    match lattice.kind() {
        Kind::Product => {
            let swap = vec![0, 1, 1, 0];
            Ok(vec![LatticeAut::new(lattice, domain, swap)?])
        }
        Kind::Blowup => {
            let r = lattice.rank();
            let n = r - 1;
            let mut roots: Vec<DivClass> = Vec::new();
            for i in 1..n {
                let mut v = vec![0i64; r];
                v[i] = 1;
                v[i + 1] = -1;
                roots.push(DivClass(v));
            }
            if n >= 3 {
                let mut v = vec![0i64; r];
                v[0] = 1;
                v[1] = -1;
                v[2] = -1;
                v[3] = -1;
                roots.push(DivClass(v));
            }
            roots
                .iter()
                .map(|root| {
                    let mut mat = vec![0i64; r * r];
                    for j in 0..r {
                        let mut basis = vec![0i64; r];
                        basis[j] = 1;
                        let b = DivClass(basis);
                        let coeff = lattice.pair_raw(&b, root);
                        for i in 0..r {
                            mat[i * r + j] = b.0[i] + coeff * root.0[i];
                        }
                    }
                    LatticeAut::new(lattice, domain, mat)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(d: i64, kind: Kind) -> (PicLattice, PermDomain) {
        let l = PicLattice::new(d, kind).unwrap();
        let dom = PermDomain::for_lattice(&l).unwrap();
        (l, dom)
    }

    #[test]
    fn degree_seven_has_one_simple_reflection() {
        let (l, dom) = setup(7, Kind::Blowup);
        let refl = simple_reflections(&l, &dom).unwrap();
        assert_eq!(refl.len(), 1);
        let s = &refl[0];
        let e1 = DivClass(vec![0, 1, 0]);
        let e2 = DivClass(vec![0, 0, 1]);
        let line = DivClass(vec![1, -1, -1]);
        assert_eq!(s.apply(&e1).unwrap(), e2);
        assert_eq!(s.apply(&e2).unwrap(), e1);
        assert_eq!(s.apply(&line).unwrap(), line);
    }

    #[test]
    fn degree_six_has_three_simple_reflections() {
        let (l, dom) = setup(6, Kind::Blowup);
        assert_eq!(simple_reflections(&l, &dom).unwrap().len(), 3);
    }

    #[test]
    fn product_reflection_is_the_factor_swap() {
        let (l, dom) = setup(8, Kind::Product);
        let refl = simple_reflections(&l, &dom).unwrap();
        assert_eq!(refl.len(), 1);
        let l1 = DivClass(vec![1, 0]);
        let l2 = DivClass(vec![0, 1]);
        assert_eq!(refl[0].apply(&l1).unwrap(), l2);
        assert_eq!(refl[0].apply(&l2).unwrap(), l1);
    }

    #[test]
    fn empty_root_set_means_no_reflections() {
        let (l8, dom8) = setup(8, Kind::Blowup);
        assert!(simple_reflections(&l8, &dom8).unwrap().is_empty());
        let (l9, dom9) = setup(9, Kind::Blowup);
        assert!(simple_reflections(&l9, &dom9).unwrap().is_empty());
    }

    #[test]
    fn reflections_preserve_pairing_and_canonical() {
        for d in [3, 5, 6, 7] {
            let (l, dom) = setup(d, Kind::Blowup);
            for s in simple_reflections(&l, &dom).unwrap() {
                let k = l.canonical().clone();
                assert_eq!(s.apply(&k).unwrap(), k);
                for a in dom.classes.iter().take(4) {
                    for b in dom.classes.iter().take(4) {
                        let lhs = l.pair_raw(&s.apply(a).unwrap(), &s.apply(b).unwrap());
                        assert_eq!(lhs, l.pair_raw(a, b));
                    }
                }
            }
        }
    }

    #[test]
    fn product_perm_round_trip() {
        let (l, dom) = setup(8, Kind::Product);
        let swap = LatticeAut::from_perm(&l, &dom, &[1, 0]).unwrap();
        assert_eq!(swap.matrix(), &[0, 1, 1, 0]);
        let id = LatticeAut::from_perm(&l, &dom, &[0, 1]).unwrap();
        assert!(id.is_identity());
    }

    #[test]
    fn perm_round_trip() {
        let (l, dom) = setup(6, Kind::Blowup);
        for s in simple_reflections(&l, &dom).unwrap() {
            let back = LatticeAut::from_perm(&l, &dom, s.perm()).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn compose_matches_perm_composition() {
        let (l, dom) = setup(6, Kind::Blowup);
        let refl = simple_reflections(&l, &dom).unwrap();
        let (a, b) = (&refl[0], &refl[2]);
        let ab = a.compose(b);
        for (i, c) in dom.classes.iter().enumerate() {
            let img = a.apply(&b.apply(c).unwrap()).unwrap();
            assert_eq!(dom.position(&img).unwrap(), ab.perm()[i] as usize);
        }
        let inv = ab.inverse();
        assert!(ab.compose(&inv).is_identity());
    }

    #[test]
    fn faithfulness_of_the_line_action() {
        // the action on the (-1)-classes determines the matrix exactly when
        // the classes span, i.e. for blow-up degrees <= 7 and the product
        for d in 1..=7 {
            let (_, dom) = setup(d, Kind::Blowup);
            assert!(dom.is_faithful(), "degree {d}");
        }
        let (_, dom) = setup(8, Kind::Product);
        assert!(dom.is_faithful());
        let (_, dom8) = setup(8, Kind::Blowup);
        assert!(!dom8.is_faithful());
        let (_, dom9) = setup(9, Kind::Blowup);
        assert!(!dom9.is_faithful());
    }

    #[test]
    fn rejects_non_automorphisms() {
        let (l, dom) = setup(6, Kind::Blowup);
        // negation fixes the form but not the canonical class
        let mut neg = identity_matrix(4);
        for v in neg.iter_mut() {
            *v = -*v;
        }
        assert!(LatticeAut::new(&l, &dom, neg).is_err());
        // a permutation not induced by any automorphism: swap E1 with E1'
        // but fix everything else (breaks linearity)
        let lines = &dom.classes;
        let e1 = lines.iter().position(|c| c.name() == "E1").unwrap();
        let e1p = lines.iter().position(|c| c.name() == "H-E2-E3").unwrap();
        let mut perm: Vec<u8> = (0..lines.len() as u8).collect();
        perm.swap(e1, e1p);
        assert!(LatticeAut::from_perm(&l, &dom, &perm).is_err());
    }
}

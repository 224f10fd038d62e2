//! Finite subgroups of the lattice symmetry group: closure from
//! generators, orbits on class sets, Sylow subgroups, and conjugacy
//! canonicalization.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::lattice::{DivClass, PicLattice};
use crate::weyl::{simple_reflections, LatticeAut, PermDomain};

type Perm = Vec<u8>;

fn perm_mul(a: &[u8], b: &[u8]) -> Perm {
    // (a*b)(x) = a(b(x))
    b.iter().map(|&i| a[i as usize]).collect()
}

fn perm_inv(a: &[u8]) -> Perm {
    let mut out = vec![0u8; a.len()];
    for (i, &p) in a.iter().enumerate() {
        out[p as usize] = i as u8;
    }
    out
}

fn perm_id(n: usize) -> Perm {
    (0..n as u8).collect()
}

/// Greedy generating set for a sorted, closed element list.
fn greedy_generators(domain_len: usize, elems: &[Perm]) -> Vec<Perm> {
    let id = perm_id(domain_len);
    let mut gens: Vec<Perm> = Vec::new();
    let mut have: HashSet<Perm> = HashSet::from([id]);
    for e in elems {
        if have.len() == elems.len() {
            break;
        }
        if have.contains(e) {
            continue;
        }
        gens.push(e.clone());
        let mut queue: VecDeque<Perm> = have.iter().cloned().collect();
        have.insert(e.clone());
        queue.push_back(e.clone());
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = perm_mul(g, &x);
                if have.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
    }
    gens
}

/// A finite group of lattice automorphisms, closed under composition and
/// inverse, with the full element set materialized.
///
/// Elements are stored as permutations of the lattice's distinguished-class
/// domain; matrices are reconstructed on demand. For the two lattices whose
/// domain does not span (blow-up degrees 8 and 9) the full symmetry group
/// is trivial, so nothing is lost.
#[derive(Clone, Debug)]
pub struct GaloisSubgroup {
    lattice: PicLattice,
    domain: PermDomain,
    gens: Vec<LatticeAut>,
    elems: Vec<Perm>,
    enlarged: bool,
}

impl GaloisSubgroup {
    /// Close a generator list into the group it generates.
    pub fn generate(lattice: &PicLattice, gens: &[LatticeAut]) -> Result<GaloisSubgroup> {
        let domain = PermDomain::for_lattice(lattice)?;
        for g in gens {
            if g.rank() != lattice.rank() {
                return Err(Error::DimensionMismatch {
                    expected: lattice.rank(),
                    found: g.rank(),
                });
            }
            // re-validate against this lattice
            LatticeAut::new(lattice, &domain, g.matrix().to_vec())?;
        }
        let n = domain.len();
        let id = perm_id(n);
        let mut seen: HashSet<Perm> = HashSet::new();
        let mut queue: VecDeque<Perm> = VecDeque::new();
        seen.insert(id.clone());
        queue.push_back(id.clone());
        let gen_perms: Vec<Perm> = gens.iter().map(|g| g.perm().to_vec()).collect();
        while let Some(p) = queue.pop_front() {
            for g in &gen_perms {
                let q = perm_mul(g, &p);
                if seen.insert(q.clone()) {
                    queue.push_back(q);
                }
            }
        }
        let mut elems: Vec<Perm> = seen.into_iter().collect();
        elems.sort();
        let mut input: HashSet<Perm> = gen_perms.iter().cloned().collect();
        input.insert(id);
        let enlarged = elems.len() > input.len();
        Ok(GaloisSubgroup {
            lattice: lattice.clone(),
            domain,
            gens: gens.to_vec(),
            elems,
            enlarged,
        })
    }

    pub fn trivial(lattice: &PicLattice) -> Result<GaloisSubgroup> {
        GaloisSubgroup::generate(lattice, &[])
    }

    /// The full symmetry group of the lattice, generated by the simple
    /// reflections (plus the factor swap in the product case).
    pub fn weyl(lattice: &PicLattice) -> Result<GaloisSubgroup> {
        let domain = PermDomain::for_lattice(lattice)?;
        let gens = simple_reflections(lattice, &domain)?;
        GaloisSubgroup::generate(lattice, &gens)
    }

    pub(crate) fn from_perms(
        lattice: &PicLattice,
        domain: &PermDomain,
        mut elems: Vec<Perm>,
        gens: Vec<LatticeAut>,
    ) -> GaloisSubgroup {
        elems.sort();
        GaloisSubgroup {
            lattice: lattice.clone(),
            domain: domain.clone(),
            gens,
            elems,
            enlarged: false,
        }
    }

    pub fn lattice(&self) -> &PicLattice {
        &self.lattice
    }

    pub fn domain(&self) -> &PermDomain {
        &self.domain
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn generators(&self) -> &[LatticeAut] {
        &self.gens
    }

    /// Sorted element permutations; index order is the canonical element
    /// order of the group.
    pub fn element_perms(&self) -> &[Perm] {
        &self.elems
    }

    /// Whether closure added elements beyond the supplied generators.
    pub fn closure_enlarged_input(&self) -> bool {
        self.enlarged
    }

    pub fn is_trivial(&self) -> bool {
        self.elems.len() == 1
    }

    pub fn element(&self, i: usize) -> Result<LatticeAut> {
        LatticeAut::from_perm(&self.lattice, &self.domain, &self.elems[i])
    }

    /// All elements as automorphisms, in canonical order.
    pub fn element_auts(&self) -> Result<Vec<LatticeAut>> {
        (0..self.elems.len()).map(|i| self.element(i)).collect()
    }

    pub fn contains_perm(&self, p: &[u8]) -> bool {
        self.elems.binary_search_by(|e| e.as_slice().cmp(p)).is_ok()
    }

    /// Generator matrices, or the identity if the group is trivial (so the
    /// invariant-lattice computation always has at least one constraint).
    pub fn generator_matrices(&self) -> Vec<Vec<i64>> {
        if self.gens.is_empty() {
            vec![crate::weyl::identity_matrix(self.lattice.rank())]
        } else {
            self.gens.iter().map(|g| g.matrix().to_vec()).collect()
        }
    }

    /// A small generating set, found greedily over the sorted element list.
    /// Deterministic, and usually much smaller than an accumulated
    /// generator list; the cohomology paths scale with generator count.
    pub fn reduced_generators(&self) -> Result<Vec<LatticeAut>> {
        greedy_generators(self.domain.len(), &self.elems)
            .iter()
            .map(|p| LatticeAut::from_perm(&self.lattice, &self.domain, p))
            .collect()
    }

    /// Orbit partition of a class set closed under the group.
    ///
    /// Orbits are ordered by their least member; classes inside an orbit
    /// are sorted. A class whose image leaves the set is an error.
    pub fn orbits(&self, set: &[DivClass]) -> Result<Vec<Vec<DivClass>>> {
        for c in set {
            self.lattice.check_rank(c)?;
        }
        let index: HashMap<&DivClass, usize> =
            set.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let gens: Vec<&LatticeAut> = self.gens.iter().collect();
        let mut assigned = vec![false; set.len()];
        let mut orbits: Vec<Vec<DivClass>> = Vec::new();
        let mut order: Vec<usize> = (0..set.len()).collect();
        order.sort_by(|&a, &b| set[a].cmp(&set[b]));
        for &start in &order {
            if assigned[start] {
                continue;
            }
            let mut orbit = vec![start];
            assigned[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for g in &gens {
                    let img = g.apply(&set[i])?;
                    match index.get(&img) {
                        Some(&j) => {
                            if !assigned[j] {
                                assigned[j] = true;
                                orbit.push(j);
                                queue.push_back(j);
                            }
                        }
                        None => return Err(Error::NotClosed(img.name())),
                    }
                }
            }
            let mut classes: Vec<DivClass> = orbit.into_iter().map(|i| set[i].clone()).collect();
            classes.sort();
            orbits.push(classes);
        }
        Ok(orbits)
    }

    /// Orbit partition of the (-1)-classes (rulings for the product kind).
    pub fn line_orbits(&self) -> Result<Vec<Vec<DivClass>>> {
        self.orbits(&self.domain.classes.clone())
    }

    /// Is the class fixed by the whole group?
    pub fn fixes(&self, c: &DivClass) -> Result<bool> {
        for g in &self.gens {
            if g.apply(c)? != *c {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn p_part(mut n: usize, p: usize) -> usize {
        let mut out = 1;
        while n % p == 0 {
            out *= p;
            n /= p;
        }
        out
    }

    fn perm_order(p: &[u8]) -> usize {
        let id = perm_id(p.len());
        let mut q = p.to_vec();
        let mut k = 1;
        while q != id {
            q = perm_mul(p, &q);
            k += 1;
        }
        k
    }

    /// A Sylow p-subgroup, chosen deterministically: grow a p-subgroup by
    /// normalizing elements of p-power order, in element order.
    pub fn sylow_subgroup(&self, p: usize) -> Result<GaloisSubgroup> {
        let target = Self::p_part(self.order(), p);
        let n = self.domain.len();
        let mut current: Vec<Perm> = vec![perm_id(n)];
        let mut gens: Vec<Perm> = Vec::new();
        while current.len() < target {
            let cur_set: HashSet<&Perm> = current.iter().collect();
            let mut extended = false;
            for g in &self.elems {
                if cur_set.contains(g) {
                    continue;
                }
                let o = Self::perm_order(g);
                if o == 1 || o % p != 0 || o != Self::p_part(o, p) {
                    continue;
                }
                // must normalize the current subgroup
                let ginv = perm_inv(g);
                let normalizes = current
                    .iter()
                    .all(|h| cur_set.contains(&perm_mul(&perm_mul(g, h), &ginv)));
                if !normalizes {
                    continue;
                }
                gens.push(g.clone());
                // close
                let mut seen: HashSet<Perm> = current.iter().cloned().collect();
                let mut queue: VecDeque<Perm> = current.clone().into();
                seen.insert(g.clone());
                queue.push_back(g.clone());
                while let Some(x) = queue.pop_front() {
                    for gg in &gens {
                        let y = perm_mul(gg, &x);
                        if seen.insert(y.clone()) {
                            queue.push_back(y);
                        }
                    }
                }
                current = seen.into_iter().collect();
                current.sort();
                extended = true;
                break;
            }
            if !extended {
                return Err(Error::InvalidInput(format!(
                    "sylow growth stalled at order {} of {}",
                    current.len(),
                    target
                )));
            }
        }
        let gen_auts = gens
            .iter()
            .map(|p| LatticeAut::from_perm(&self.lattice, &self.domain, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(GaloisSubgroup::from_perms(
            &self.lattice,
            &self.domain,
            current,
            gen_auts,
        ))
    }

    /// Replace the group by the lexicographically least subgroup conjugate
    /// to it under the full lattice symmetry group.
    ///
    /// Conjugate inputs therefore produce identical downstream reports.
    pub fn canonicalize(&self) -> Result<GaloisSubgroup> {
        let weyl_gens = simple_reflections(&self.lattice, &self.domain)?;
        if weyl_gens.is_empty() {
            return Ok(self.clone());
        }
        let gen_pairs: Vec<(Perm, Perm)> = weyl_gens
            .iter()
            .map(|g| (g.perm().to_vec(), perm_inv(g.perm())))
            .collect();
        let mut best = self.elems.clone();
        let mut seen: HashSet<Vec<Perm>> = HashSet::from([self.elems.clone()]);
        let mut queue = VecDeque::from([self.elems.clone()]);
        while let Some(cur) = queue.pop_front() {
            for (g, ginv) in &gen_pairs {
                let mut conj: Vec<Perm> = cur
                    .iter()
                    .map(|e| perm_mul(&perm_mul(g, e), ginv))
                    .collect();
                conj.sort();
                if conj < best {
                    best = conj.clone();
                }
                if seen.insert(conj.clone()) {
                    queue.push_back(conj);
                }
            }
        }
        if best == self.elems {
            return Ok(self.clone());
        }
        let gens = greedy_generators(self.domain.len(), &best)
            .iter()
            .map(|p| LatticeAut::from_perm(&self.lattice, &self.domain, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(GaloisSubgroup::from_perms(
            &self.lattice,
            &self.domain,
            best,
            gens,
        ))
    }

    /// Conjugate the group by `w`.
    pub fn conjugate_by(&self, w: &LatticeAut) -> Result<GaloisSubgroup> {
        let winv = w.inverse();
        let gens = self
            .gens
            .iter()
            .map(|g| w.compose(g).compose(&winv))
            .collect::<Vec<_>>();
        GaloisSubgroup::generate(&self.lattice, &gens)
    }
}

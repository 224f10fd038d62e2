//! Enumeration of subgroup conjugacy classes of a finite permutation
//! group, by the cyclic extension method.
//!
//! Every subgroup has a chain down to its perfect residual in which each
//! step is normal of prime index, so starting from the perfect subgroups
//! (plus the trivial group) and repeatedly adjoining normalizing elements
//! `g` with `g^p` inside reaches every class. Perfect groups of order at
//! most 200 are exactly A5, SL(2,5) and PSL(2,7), found here from their
//! two-generator presentations; larger perfect subgroups are picked up as
//! derived residuals, which covers every group the surveys visit.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::group::GaloisSubgroup;
use crate::weyl::LatticeAut;

/// Default bound on the ambient group order for subgroup surveys.
pub const DEFAULT_AMBIENT_LIMIT: usize = 2000;

type Perm = Vec<u8>;

fn perm_mul(a: &[u8], b: &[u8]) -> Perm {
    b.iter().map(|&i| a[i as usize]).collect()
}

fn perm_inv(a: &[u8]) -> Perm {
    let mut out = vec![0u8; a.len()];
    for (i, &p) in a.iter().enumerate() {
        out[p as usize] = i as u8;
    }
    out
}

/// Index-level machinery over the full element list of an ambient group.
pub struct PermGroup {
    ambient: GaloisSubgroup,
    elems: Vec<Perm>,
    index: HashMap<Perm, u32>,
    inv: Vec<u32>,
    orders: Vec<u32>,
    gen_idx: Vec<u32>,
    /// conj_by_gen[k][e] = g_k e g_k^-1
    conj_by_gen: Vec<Vec<u32>>,
    id: u32,
}

impl PermGroup {
    pub fn new(ambient: &GaloisSubgroup) -> PermGroup {
        let elems: Vec<Perm> = ambient.element_perms().to_vec();
        let index: HashMap<Perm, u32> = elems
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as u32))
            .collect();
        let inv: Vec<u32> = elems.iter().map(|p| index[&perm_inv(p)]).collect();
        let id_perm: Perm = (0..elems[0].len() as u8).collect();
        let id = index[&id_perm];
        let mut orders = vec![0u32; elems.len()];
        for (i, p) in elems.iter().enumerate() {
            let mut q = p.clone();
            let mut k = 1;
            while q != id_perm {
                q = perm_mul(p, &q);
                k += 1;
            }
            orders[i] = k;
        }
        let mut gen_idx: Vec<u32> = ambient
            .generators()
            .iter()
            .map(|g| index[&g.perm().to_vec()])
            .collect();
        if gen_idx.is_empty() {
            gen_idx.push(id);
        }
        let conj_by_gen = gen_idx
            .iter()
            .map(|&g| {
                let gp = &elems[g as usize];
                let gpi = perm_inv(gp);
                elems
                    .iter()
                    .map(|e| index[&perm_mul(&perm_mul(gp, e), &gpi)])
                    .collect()
            })
            .collect();
        PermGroup {
            ambient: ambient.clone(),
            elems,
            index,
            inv,
            orders,
            gen_idx,
            conj_by_gen,
            id,
        }
    }

    pub fn ambient(&self) -> &GaloisSubgroup {
        &self.ambient
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn identity_index(&self) -> u32 {
        self.id
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.index[&perm_mul(&self.elems[a as usize], &self.elems[b as usize])]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn elem_order(&self, a: u32) -> u32 {
        self.orders[a as usize]
    }

    pub fn pow(&self, a: u32, mut k: u32) -> u32 {
        let mut acc = self.id;
        let mut base = a;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(base, acc);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn conj(&self, g: u32, x: u32) -> u32 {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn commutator(&self, a: u32, b: u32) -> u32 {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    /// Closure of generator indices, sorted.
    pub fn close(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen: HashSet<u32> = HashSet::from([self.id]);
        let mut queue: VecDeque<u32> = VecDeque::from([self.id]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(g, x);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<u32> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// Element conjugacy class representatives (least index per class).
    pub fn element_class_reps(&self) -> Vec<u32> {
        let mut seen = vec![false; self.order()];
        let mut reps = Vec::new();
        for start in 0..self.order() as u32 {
            if seen[start as usize] {
                continue;
            }
            reps.push(start);
            let mut queue = VecDeque::from([start]);
            seen[start as usize] = true;
            while let Some(x) = queue.pop_front() {
                for table in &self.conj_by_gen {
                    let y = table[x as usize];
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        reps
    }

    /// Normal closure of `seed` under conjugation by `ambient_gens`,
    /// intersected with nothing: the subgroup generated by all conjugates.
    fn normal_closure(&self, seed: &[u32], ambient_gens: &[u32]) -> Vec<u32> {
        let mut gens: Vec<u32> = seed.to_vec();
        loop {
            let sub = self.close(&gens);
            let set: HashSet<u32> = sub.iter().copied().collect();
            let mut new = Vec::new();
            for &u in ambient_gens {
                for &d in &gens {
                    let c = self.conj(u, d);
                    if !set.contains(&c) {
                        new.push(c);
                    }
                }
            }
            if new.is_empty() {
                return sub;
            }
            gens.extend(new);
        }
    }

    /// Derived subgroup of the subgroup generated by `gens`.
    fn derived(&self, gens: &[u32]) -> Vec<u32> {
        let mut comms = Vec::new();
        for &a in gens {
            for &b in gens {
                if a != b {
                    let c = self.commutator(a, b);
                    if c != self.id {
                        comms.push(c);
                    }
                }
            }
        }
        if comms.is_empty() {
            return vec![self.id];
        }
        self.normal_closure(&comms, gens)
    }

    /// Perfect residual: last term of the derived series.
    fn perfect_residual(&self, gens: &[u32]) -> Vec<u32> {
        let mut current_gens: Vec<u32> = gens.to_vec();
        let mut current = self.close(&current_gens);
        loop {
            let next = self.derived(&current_gens);
            if next.len() == current.len() {
                return current;
            }
            current_gens = small_generating_set(self, &next);
            current = next;
        }
    }
}

/// A small generating set for a subgroup given by its sorted element list.
fn small_generating_set(pg: &PermGroup, elems: &[u32]) -> Vec<u32> {
    let mut gens: Vec<u32> = Vec::new();
    let mut have: HashSet<u32> = HashSet::from([pg.id]);
    for &e in elems {
        if !have.contains(&e) {
            gens.push(e);
            have = pg.close(&gens).into_iter().collect();
            if have.len() == elems.len() {
                break;
            }
        }
    }
    gens
}

/// One conjugacy class of subgroups: the lexicographically least element
/// set in the class, and generators for it.
#[derive(Clone, Debug)]
pub struct SubgroupClass {
    pub key: Vec<u32>,
    pub gens: Vec<u32>,
    pub order: usize,
}

struct Enumerator<'a> {
    pg: &'a PermGroup,
    max_order: usize,
    discovered: HashSet<Box<[u32]>>,
    classes: Vec<SubgroupClass>,
}

impl<'a> Enumerator<'a> {
    /// Register a subgroup (element list sorted). Computes the full
    /// conjugation orbit, keeps the least member as representative.
    fn insert(&mut self, elems: Vec<u32>, gens: Vec<u32>) {
        if elems.len() > self.max_order {
            return;
        }
        let key: Box<[u32]> = elems.clone().into();
        if self.discovered.contains(&key) {
            return;
        }
        // orbit BFS with a conjugator per node so generators can be moved
        // to the representative
        let mut orbit: HashMap<Box<[u32]>, u32> = HashMap::new();
        orbit.insert(key.clone(), self.pg.id);
        let mut queue: VecDeque<Box<[u32]>> = VecDeque::from([key.clone()]);
        let mut best = key.clone();
        while let Some(cur) = queue.pop_front() {
            let w = orbit[&cur];
            for (k, table) in self.pg.conj_by_gen.iter().enumerate() {
                let mut moved: Vec<u32> = cur.iter().map(|&e| table[e as usize]).collect();
                moved.sort_unstable();
                let mkey: Box<[u32]> = moved.into();
                if !orbit.contains_key(&mkey) {
                    let gw = self.pg.mul(self.pg.gen_idx[k], w);
                    if mkey < best {
                        best = mkey.clone();
                    }
                    orbit.insert(mkey.clone(), gw);
                    queue.push_back(mkey);
                }
            }
        }
        let w = orbit[&best];
        let rep_gens: Vec<u32> = gens.iter().map(|&g| self.pg.conj(w, g)).collect();
        let order = best.len();
        self.discovered.extend(orbit.into_keys());
        self.classes.push(SubgroupClass {
            key: best.to_vec(),
            gens: rep_gens,
            order,
        });
    }
}

/// All subgroup conjugacy classes of the ambient group with order at most
/// `max_order`, sorted by (order, element set).
pub fn subgroup_classes(
    pg: &PermGroup,
    max_order: usize,
    ambient_limit: usize,
) -> Result<Vec<SubgroupClass>> {
    if pg.order() > ambient_limit {
        return Err(Error::Infeasible(format!(
            "ambient group order {} exceeds the limit {}",
            pg.order(),
            ambient_limit
        )));
    }
    let max_order = max_order.min(pg.order());
    let mut en = Enumerator {
        pg,
        max_order,
        discovered: HashSet::new(),
        classes: Vec::new(),
    };
    en.insert(vec![pg.id], vec![]);
    for (elems, gens) in perfect_seeds(pg, max_order) {
        en.insert(elems, gens);
    }

    let primes = prime_divisors(pg.order());
    let mut cursor = 0;
    loop {
        while cursor < en.classes.len() {
            let class = en.classes[cursor].clone();
            cursor += 1;
            extend_class(&mut en, &class, &primes);
        }
        // residual sweep: perfect residuals may reveal seeds the
        // presentation searches could not (orders above 200)
        let mut added = false;
        for i in 0..en.classes.len() {
            let class = en.classes[i].clone();
            if class.gens.is_empty() {
                continue;
            }
            let res = pg.perfect_residual(&class.gens);
            if res.len() > 1 && res.len() <= en.max_order {
                let key: Box<[u32]> = res.clone().into();
                if !en.discovered.contains(&key) {
                    let gens = small_generating_set(pg, &res);
                    en.insert(res, gens);
                    added = true;
                }
            }
        }
        if !added && cursor == en.classes.len() {
            break;
        }
    }

    let mut out = en.classes;
    out.sort_by(|a, b| (a.order, &a.key).cmp(&(b.order, &b.key)));
    Ok(out)
}

fn extend_class(en: &mut Enumerator, class: &SubgroupClass, primes: &[usize]) {
    let pg = en.pg;
    let uset: HashSet<u32> = class.key.iter().copied().collect();
    let order = class.order;
    let viable: Vec<usize> = primes
        .iter()
        .copied()
        .filter(|p| order * p <= en.max_order && pg.order() % (order * p) == 0)
        .collect();
    if viable.is_empty() {
        return;
    }
    // normalizer scan: g normalizes U iff it conjugates every generator
    // (or, for the trivial group, always)
    let check: Vec<u32> = if class.gens.is_empty() {
        vec![]
    } else {
        class.gens.clone()
    };
    // Once <U, g> = V is built, every other h in V \ U with h^p in U
    // generates the same V, so members of found extensions are skipped.
    let mut found: HashMap<usize, Vec<HashSet<u32>>> = HashMap::new();
    for g in 0..pg.order() as u32 {
        if uset.contains(&g) {
            continue;
        }
        let normalizes = check.iter().all(|&u| uset.contains(&pg.conj(g, u)));
        if !normalizes {
            continue;
        }
        for &p in &viable {
            if !uset.contains(&pg.pow(g, p as u32)) {
                continue;
            }
            let absorbed = found
                .get(&p)
                .map_or(false, |vs| vs.iter().any(|v| v.contains(&g)));
            if absorbed {
                continue;
            }
            let mut gens = class.gens.clone();
            gens.push(g);
            let elems = pg.close(&gens);
            debug_assert_eq!(elems.len(), order * p);
            found
                .entry(p)
                .or_default()
                .push(elems.iter().copied().collect());
            en.insert(elems, gens);
        }
    }
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Perfect subgroups found from two-generator presentations. Complete for
/// orders up to 200 (trivial, A5, SL(2,5), PSL(2,7) are the only perfect
/// groups there); together with the derived-residual sweep this covers the
/// survey range.
fn perfect_seeds(pg: &PermGroup, max_order: usize) -> Vec<(Vec<u32>, Vec<u32>)> {
    let mut out: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    let n = pg.order();
    let reps = pg.element_class_reps();

    // A5 = <a,b | a^2 = b^3 = (ab)^5 = 1>
    if max_order >= 60 && n % 60 == 0 {
        for &a in reps.iter().filter(|&&r| pg.elem_order(r) == 2) {
            for b in 0..n as u32 {
                if pg.elem_order(b) != 3 {
                    continue;
                }
                if pg.elem_order(pg.mul(a, b)) == 5 {
                    let elems = pg.close(&[a, b]);
                    debug_assert_eq!(elems.len(), 60);
                    out.push((elems, vec![a, b]));
                }
            }
        }
    }

    // SL(2,5) = <s,t | s^3 = t^5 = (st)^2>, with |s| = 6, |t| = 10
    if max_order >= 120 && n % 120 == 0 {
        for &s in reps.iter().filter(|&&r| pg.elem_order(r) == 6) {
            let z = pg.pow(s, 3);
            for t in 0..n as u32 {
                if pg.elem_order(t) != 10 || pg.pow(t, 5) != z {
                    continue;
                }
                if pg.pow(pg.mul(s, t), 2) == z {
                    let elems = pg.close(&[s, t]);
                    debug_assert_eq!(elems.len(), 120);
                    out.push((elems, vec![s, t]));
                }
            }
        }
    }

    // PSL(2,7) = <a,b | a^2 = b^3 = (ab)^7 = [a,b]^4 = 1>
    if max_order >= 168 && n % 168 == 0 {
        for &a in reps.iter().filter(|&&r| pg.elem_order(r) == 2) {
            for b in 0..n as u32 {
                if pg.elem_order(b) != 3 {
                    continue;
                }
                if pg.elem_order(pg.mul(a, b)) == 7 && 4 % pg.elem_order(pg.commutator(a, b)) == 0 {
                    let elems = pg.close(&[a, b]);
                    debug_assert_eq!(elems.len(), 168);
                    out.push((elems, vec![a, b]));
                }
            }
        }
    }

    // derived residual of the ambient group itself
    let ambient_gens: Vec<u32> = pg.gen_idx.clone();
    let res = pg.perfect_residual(&ambient_gens);
    if res.len() > 1 && res.len() <= max_order {
        let gens = small_generating_set(pg, &res);
        out.push((res, gens));
    }
    out
}

/// One representative per conjugacy class of subgroups of `group` with
/// order at most `max_order`, sorted by (order, element set), each
/// representative being the least element set in its class.
pub fn subgroups_up_to_conjugacy(
    group: &GaloisSubgroup,
    max_order: usize,
) -> Result<Vec<GaloisSubgroup>> {
    let pg = PermGroup::new(group);
    let classes = subgroup_classes(&pg, max_order, DEFAULT_AMBIENT_LIMIT)?;
    classes.iter().map(|c| class_to_subgroup(&pg, c)).collect()
}

/// Materialize a class representative as a `GaloisSubgroup`.
pub fn class_to_subgroup(pg: &PermGroup, class: &SubgroupClass) -> Result<GaloisSubgroup> {
    let ambient = pg.ambient();
    let lattice = ambient.lattice();
    let domain = ambient.domain();
    let perms: Vec<Perm> = class
        .key
        .iter()
        .map(|&i| pg.elems[i as usize].clone())
        .collect();
    let gens: Vec<LatticeAut> = class
        .gens
        .iter()
        .map(|&g| LatticeAut::from_perm(lattice, domain, &pg.elems[g as usize]))
        .collect::<Result<Vec<_>>>()?;
    Ok(GaloisSubgroup::from_perms(lattice, domain, perms, gens))
}

/// Slow but simple oracle: every subgroup, by repeatedly adjoining single
/// elements, then grouped into conjugacy classes. Only usable for small
/// ambient groups; the tests compare it against the cyclic extension
/// method. Returns (all subgroups, class representatives).
pub fn brute_force_subgroups(pg: &PermGroup) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
    let mut all: HashSet<Box<[u32]>> = HashSet::new();
    let trivial: Box<[u32]> = vec![pg.id].into();
    all.insert(trivial.clone());
    let mut gens_of: HashMap<Box<[u32]>, Vec<u32>> = HashMap::new();
    gens_of.insert(trivial.clone(), vec![]);
    let mut queue: VecDeque<Box<[u32]>> = VecDeque::from([trivial]);
    while let Some(cur) = queue.pop_front() {
        let gens = gens_of[&cur].clone();
        for g in 0..pg.order() as u32 {
            if cur.binary_search(&g).is_ok() {
                continue;
            }
            let mut ng = gens.clone();
            ng.push(g);
            let sub: Box<[u32]> = pg.close(&ng).into();
            if !all.contains(&sub) {
                all.insert(sub.clone());
                gens_of.insert(sub.clone(), ng);
                queue.push_back(sub);
            }
        }
    }
    let mut all_sorted: Vec<Vec<u32>> = all.iter().map(|k| k.to_vec()).collect();
    all_sorted.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    // conjugacy classes by orbit of keys
    let mut class_reps: Vec<Vec<u32>> = Vec::new();
    let mut seen: HashSet<Box<[u32]>> = HashSet::new();
    let mut keys: Vec<Box<[u32]>> = all.into_iter().collect();
    keys.sort();
    for key in keys {
        if seen.contains(&key) {
            continue;
        }
        let mut queue: VecDeque<Box<[u32]>> = VecDeque::from([key.clone()]);
        seen.insert(key.clone());
        let mut best = key.clone();
        while let Some(cur) = queue.pop_front() {
            for table in &pg.conj_by_gen {
                let mut moved: Vec<u32> = cur.iter().map(|&e| table[e as usize]).collect();
                moved.sort_unstable();
                let mkey: Box<[u32]> = moved.into();
                if seen.insert(mkey.clone()) {
                    if mkey < best {
                        best = mkey.clone();
                    }
                    queue.push_back(mkey);
                }
            }
        }
        class_reps.push(best.to_vec());
    }
    (all_sorted, class_reps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Kind, PicLattice};

    fn weyl_pg(d: i64, kind: Kind) -> PermGroup {
        let l = PicLattice::new(d, kind).unwrap();
        let w = GaloisSubgroup::weyl(&l).unwrap();
        PermGroup::new(&w)
    }

    #[test]
    fn trivial_and_order_two_ambients() {
        let pg9 = weyl_pg(9, Kind::Blowup);
        let classes = subgroup_classes(&pg9, 10, DEFAULT_AMBIENT_LIMIT).unwrap();
        assert_eq!(classes.len(), 1);

        let pg7 = weyl_pg(7, Kind::Blowup);
        let classes = subgroup_classes(&pg7, 10, DEFAULT_AMBIENT_LIMIT).unwrap();
        assert_eq!(classes.len(), 2);
    }

    #[test]
    fn hexagon_group_subgroups() {
        let pg = weyl_pg(6, Kind::Blowup);
        let classes = subgroup_classes(&pg, 12, DEFAULT_AMBIENT_LIMIT).unwrap();
        let (all, brute_classes) = brute_force_subgroups(&pg);
        // the order-12 hexagon group has 16 subgroups in 10 conjugacy classes
        assert_eq!(all.len(), 16);
        assert_eq!(brute_classes.len(), 10);
        let keys: Vec<Vec<u32>> = classes.iter().map(|c| c.key.clone()).collect();
        let mut brute = brute_classes;
        brute.sort_by_key(|k| (k.len(), k.clone()));
        assert_eq!(keys, brute);
    }

    #[test]
    fn s5_has_19_subgroup_classes() {
        let pg = weyl_pg(5, Kind::Blowup);
        let classes = subgroup_classes(&pg, 120, DEFAULT_AMBIENT_LIMIT).unwrap();
        assert_eq!(classes.len(), 19);
        let (_, brute_classes) = brute_force_subgroups(&pg);
        assert_eq!(brute_classes.len(), 19);
        let keys: Vec<Vec<u32>> = classes.iter().map(|c| c.key.clone()).collect();
        let mut brute = brute_classes;
        brute.sort_by_key(|k| (k.len(), k.clone()));
        assert_eq!(keys, brute);
    }

    #[test]
    fn convenience_wrapper_matches_class_enumeration() {
        let l = PicLattice::new(5, Kind::Blowup).unwrap();
        let w = GaloisSubgroup::weyl(&l).unwrap();
        let subs = subgroups_up_to_conjugacy(&w, 120).unwrap();
        assert_eq!(subs.len(), 19);
        // sorted by (order, element set), every one closed and distinct
        for pair in subs.windows(2) {
            assert!(
                (pair[0].order(), pair[0].element_perms())
                    < (pair[1].order(), pair[1].element_perms())
            );
        }
        let bounded = subgroups_up_to_conjugacy(&w, 2).unwrap();
        assert!(bounded.iter().all(|s| s.order() <= 2));
    }

    #[test]
    fn ambient_limit_is_enforced() {
        let pg = weyl_pg(3, Kind::Blowup);
        assert!(matches!(
            subgroup_classes(&pg, 200, DEFAULT_AMBIENT_LIMIT),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn degree_four_enumeration_terminates_and_contains_known_classes() {
        let pg = weyl_pg(4, Kind::Blowup);
        let classes = subgroup_classes(&pg, 1920, DEFAULT_AMBIENT_LIMIT).unwrap();
        // the whole group and the trivial group are classes
        assert_eq!(classes.first().unwrap().order, 1);
        assert_eq!(classes.last().unwrap().order, 1920);
        // perfect subgroups of W(D5): A5 classes and the derived residual;
        // the abelianization is Z/2, so the index-2 subgroup is unique
        assert!(classes.iter().any(|c| c.order == 60));
        assert_eq!(classes.iter().filter(|c| c.order == 960).count(), 1);
        // element-order sanity: some subgroup of every prime order dividing 1920
        for p in [2, 3, 5] {
            assert!(classes.iter().any(|c| c.order == p));
        }
    }
}

//! Per-degree decision procedures: map a (degree, kind, Galois image)
//! triple to descent flags, Picard rank, cohomology, and Amitsur-group
//! constraints, with every flag carrying its theorem tag.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::classes::{conic_classes, disjoint_tuples, exceptional_classes};
use crate::cohomology::{h1_with_fallback, invariant_lattice, CohGroup, H1Result, IntegerRep};
use crate::error::{Error, Result};
use crate::group::GaloisSubgroup;
use crate::intlin::{self, IMat};
use crate::lattice::{DivClass, Kind};

/// Options for `classify`.
#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    /// Replace the group by its conjugacy-class representative first, so
    /// conjugate inputs produce identical reports. Skipped below degree 3
    /// where the symmetry group is not surveyable.
    pub canonicalize: bool,
    /// Order bound for the exact H^1 computation.
    pub h1_bound: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            canonicalize: true,
            h1_bound: crate::cohomology::DEFAULT_H1_BOUND,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentFlag {
    pub name: String,
    pub theorem: String,
    pub holds: bool,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmitsurConstraint {
    /// Every element of Am(X) has order dividing this.
    pub order_divisor: u64,
    /// Largest group Am(X) can be, as derived from the lattice.
    pub upper_bound: CohGroup,
    /// Exact value when a theorem pins it down.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_if_known: Option<CohGroup>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldExtensionData {
    pub k_eq_k_field: bool,
    pub k_eq_l: bool,
    pub k_eq_m: bool,
    pub phi1_image_order: usize,
    pub phi2_image_order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub order: usize,
    pub orbit_sizes_on_lines: Vec<usize>,
    pub closure_enlarged_input: bool,
    pub canonicalized: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub degree: i64,
    pub kind: Kind,
    pub group: GroupSummary,
    pub rho: usize,
    pub invariant_basis: Vec<String>,
    pub h1: H1Result,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub has_k_rational_point: Option<bool>,
    pub descent_flags: Vec<DescentFlag>,
    pub amitsur: AmitsurConstraint,
    pub case_label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_extensions: Option<FieldExtensionData>,
    pub notes: Vec<String>,
}

/// Degree-6 sub-report: the two splitting homomorphisms and the case data
/// of the hexagon analysis.
#[derive(Clone, Debug)]
pub struct Dp6Data {
    pub k_eq_k_field: bool,
    pub k_eq_l: bool,
    pub k_eq_m: bool,
    pub phi1_image_order: usize,
    pub phi2_image_order: usize,
    pub case1: bool,
    pub case2: bool,
    pub case3: bool,
    pub rho: usize,
    /// Least Gamma-invariant exceptional class, if any.
    pub invariant_line: Option<DivClass>,
    /// Case (1): the two blow-down classes H and -K-H (a Cremona pair).
    pub case1_witnesses: Vec<DivClass>,
    /// Case (2): least invariant pair sum E_i + E_i'.
    pub case2_witness: Option<DivClass>,
    /// Case (2): Picard rank of the contracted product-type surface.
    pub rho_y: Option<usize>,
    /// Case (2): what the contraction target is.
    pub y_description: Option<String>,
}

/// Degree-5 descent data: invariant blow-down class and invariant conic.
#[derive(Clone, Debug)]
pub struct Dp5Descent {
    pub f_class: Option<DivClass>,
    pub conic: Option<DivClass>,
}

fn rho_of(group: &GaloisSubgroup) -> (Vec<Vec<i64>>, usize) {
    invariant_lattice(&IntegerRep::of_subgroup(group))
}

fn least_fixed(group: &GaloisSubgroup, classes: &[DivClass]) -> Result<Option<DivClass>> {
    for c in classes {
        if group.fixes(c)? {
            return Ok(Some(c.clone()));
        }
    }
    Ok(None)
}

fn least_invariant_sum(
    group: &GaloisSubgroup,
    tuples: &[Vec<DivClass>],
) -> Result<Option<DivClass>> {
    let mut sums: Vec<DivClass> = tuples
        .iter()
        .map(|t| {
            let mut acc = DivClass::zero(group.lattice().rank());
            for c in t {
                acc = &acc + c;
            }
            acc
        })
        .collect();
    sums.sort();
    sums.dedup();
    least_fixed(group, &sums)
}

/// The hexagon analysis for degree-6 surfaces.
pub fn classify_dp6(group: &GaloisSubgroup) -> Result<Dp6Data> {
    let lattice = group.lattice();
    if lattice.degree() != 6 || lattice.kind() != Kind::Blowup {
        return Err(Error::InvalidInput(
            "classify_dp6 requires the degree-6 blow-up lattice".into(),
        ));
    }
    let e: Vec<DivClass> = (1..=3)
        .map(|i| {
            let mut v = vec![0i64; 4];
            v[i] = 1;
            DivClass(v)
        })
        .collect();
    let eprime: Vec<DivClass> = (1..=3)
        .map(|i| {
            let mut v = vec![-1i64; 4];
            v[0] = 1;
            v[i] = 0;
            DivClass(v)
        })
        .collect();

    // phi1: does the action swap {E_i} with {E_i'}? phi2: permutation of the
    // three antipodal pairs {E_i, E_i'}.
    let mut phi1_nontrivial = false;
    let mut phi2_gens: Vec<[usize; 3]> = Vec::new();
    for g in group.generators() {
        let img = g.apply(&e[0])?;
        if img.0[0] != 0 {
            phi1_nontrivial = true;
        }
        let mut sigma = [0usize; 3];
        for i in 0..3 {
            let img = g.apply(&e[i])?;
            let j = (0..3)
                .find(|&j| img == e[j] || img == eprime[j])
                .expect("line image must stay in a pair");
            sigma[i] = j;
        }
        phi2_gens.push(sigma);
    }
    let phi1_image_order = if phi1_nontrivial { 2 } else { 1 };
    let phi2_image_order = close_s3(&phi2_gens).len();

    let k_eq_k_field = phi1_image_order == 1;
    let k_eq_l = phi2_image_order % 3 != 0;
    let k_eq_m = phi2_image_order == 1;
    let case1 = k_eq_k_field;
    let case2 = k_eq_l;
    let case3 = !case1 && !case2;

    let (_, rho) = rho_of(group);
    let lines = exceptional_classes(lattice)?;
    let invariant_line = least_fixed(group, &lines)?;

    let mut case1_witnesses = Vec::new();
    if case1 {
        let h = DivClass(vec![1, 0, 0, 0]);
        let hprime = &-(lattice.canonical()) - &h;
        debug_assert!(group.fixes(&h)? && group.fixes(&hprime)?);
        case1_witnesses = vec![h, hprime];
    }

    let mut case2_witness = None;
    let mut rho_y = None;
    let mut y_description = None;
    if case2 {
        // least invariant antipodal pair sum
        for i in 0..3 {
            let sum = &e[i] + &eprime[i];
            if group.fixes(&sum)? {
                let pointwise = group.fixes(&e[i])?;
                case2_witness = Some(sum);
                let ry = rho - if pointwise { 2 } else { 1 };
                rho_y = Some(ry);
                y_description = Some(if invariant_line.is_some() && ry == 2 {
                    "P1 x P1 (X has a k-rational point)".to_string()
                } else if ry == 2 {
                    "product of two Brauer-Severi curves".to_string()
                } else {
                    "twisted self-product of a Brauer-Severi curve".to_string()
                });
                break;
            }
        }
        debug_assert!(case2_witness.is_some());
    }

    Ok(Dp6Data {
        k_eq_k_field,
        k_eq_l,
        k_eq_m,
        phi1_image_order,
        phi2_image_order,
        case1,
        case2,
        case3,
        rho,
        invariant_line,
        case1_witnesses,
        case2_witness,
        rho_y,
        y_description,
    })
}

fn close_s3(gens: &[[usize; 3]]) -> Vec<[usize; 3]> {
    let id = [0usize, 1, 2];
    let mut elems = vec![id];
    loop {
        let mut added = false;
        let snapshot = elems.clone();
        for g in gens {
            for e in &snapshot {
                let prod = [g[e[0]], g[e[1]], g[e[2]]];
                if !elems.contains(&prod) {
                    elems.push(prod);
                    added = true;
                }
            }
        }
        if !added {
            return elems;
        }
    }
}

/// Degree-5 blow-down and conic descent (the two lattice-visible conditions
/// of the four-way equivalence).
pub fn descent_dp5(group: &GaloisSubgroup) -> Result<Dp5Descent> {
    let lattice = group.lattice();
    if lattice.degree() != 5 || lattice.kind() != Kind::Blowup {
        return Err(Error::InvalidInput(
            "descent_dp5 requires the degree-5 blow-up lattice".into(),
        ));
    }
    let lines = exceptional_classes(lattice)?;
    let quadruples = disjoint_tuples(lattice, &lines, 4)?;
    let f_class = least_invariant_sum(group, &quadruples)?;
    let conic = least_fixed(group, &conic_classes(lattice)?)?;
    Ok(Dp5Descent { f_class, conic })
}

/// Degree-4 quasi-splitness: a Galois-fixed exceptional class.
pub fn quasi_split_dp4(group: &GaloisSubgroup) -> Result<Option<DivClass>> {
    let lattice = group.lattice();
    if lattice.degree() != 4 || lattice.kind() != Kind::Blowup {
        return Err(Error::InvalidInput(
            "quasi_split_dp4 requires the degree-4 blow-up lattice".into(),
        ));
    }
    least_fixed(group, &exceptional_classes(lattice)?)
}

/// Degree-4 conic-class criterion.
pub fn conic_dp4(group: &GaloisSubgroup) -> Result<Option<DivClass>> {
    let lattice = group.lattice();
    if lattice.degree() != 4 || lattice.kind() != Kind::Blowup {
        return Err(Error::InvalidInput(
            "conic_dp4 requires the degree-4 blow-up lattice".into(),
        ));
    }
    least_fixed(group, &conic_classes(lattice)?)
}

/// Degree-3 blow-down: an invariant sum of six pairwise disjoint lines
/// (one of the 72 sixers of the 27 lines).
pub fn blowdown_dp3(group: &GaloisSubgroup) -> Result<Option<DivClass>> {
    let lattice = group.lattice();
    if lattice.degree() != 3 || lattice.kind() != Kind::Blowup {
        return Err(Error::InvalidInput(
            "blowdown_dp3 requires the degree-3 blow-up lattice".into(),
        ));
    }
    let lines = exceptional_classes(lattice)?;
    let sixers = disjoint_tuples(lattice, &lines, 6)?;
    least_invariant_sum(group, &sixers)
}

fn gcd64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd64(b, a % b)
    }
}

/// The delta-trivial quotient: invariant classes modulo the sublattice
/// generated by the canonical class and all orbit sums of exceptional
/// classes, then killed by the order divisor. Am(X) is a quotient of the
/// result.
fn amitsur_upper_bound(
    group: &GaloisSubgroup,
    rho_basis: &[Vec<i64>],
    order_divisor: u64,
    notes: &mut Vec<String>,
) -> Result<CohGroup> {
    let lattice = group.lattice();
    let r = lattice.rank();
    let rho = rho_basis.len();
    let mut sub: Vec<DivClass> = vec![lattice.canonical().clone()];
    for orbit in group.line_orbits()? {
        if lattice.kind() == Kind::Product {
            break; // rulings are not delta-trivial
        }
        let mut acc = DivClass::zero(r);
        for c in &orbit {
            acc = &acc + c;
        }
        sub.push(acc);
    }
    let mut basis = IMat::zero(r, rho);
    for (j, col) in rho_basis.iter().enumerate() {
        for i in 0..r {
            basis.set(i, j, BigInt::from(col[i]));
        }
    }
    let mut target = IMat::zero(r, sub.len());
    for (j, c) in sub.iter().enumerate() {
        for i in 0..r {
            target.set(i, j, BigInt::from(c.0[i]));
        }
    }
    let coords = intlin::solve_exact(&basis, &target)?;
    // quotient Z^rho / (coords + divisor * Z^rho)
    let mut augmented = IMat::zero(rho, coords.cols + rho);
    for i in 0..rho {
        for j in 0..coords.cols {
            augmented.set(i, j, coords.at(i, j).clone());
        }
        augmented.set(i, coords.cols + i, BigInt::from(order_divisor));
    }
    let factors = intlin::quotient_invariants(&augmented);
    let raw = CohGroup::from_big_factors(&factors)?;
    Ok(clamp_to_ctkm(raw, notes))
}

/// Reduce a p-primary bound to the largest member of the CTKM list
/// {0, Z/2, (Z/2)^2, Z/3} that dominates it. Sound exactly because the
/// bound is killed by 2 or by 3 whenever it is nontrivial.
fn clamp_to_ctkm(raw: CohGroup, notes: &mut Vec<String>) -> CohGroup {
    let f = &raw.invariant_factors;
    let in_list = f.is_empty() || f == &[2] || f == &[2, 2] || f == &[3];
    if in_list {
        return raw;
    }
    let clamped = if f.iter().all(|&x| x == 2) {
        Some(vec![2, 2])
    } else if f.iter().all(|&x| x == 3) {
        Some(vec![3])
    } else {
        None
    };
    match clamped {
        Some(factors) => {
            notes.push(format!(
                "upper bound {} reduced to the largest possible group in the Thm 4.5 list",
                raw
            ));
            CohGroup {
                invariant_factors: factors,
            }
        }
        None => {
            notes.push(format!(
                "upper bound {} is outside the Thm 4.5 list and admits no sound reduction",
                raw
            ));
            raw
        }
    }
}

struct DegreeData {
    dp6: Option<Dp6Data>,
    dp5: Option<Dp5Descent>,
    dp4_line: Option<Option<DivClass>>,
    dp4_conic: Option<Option<DivClass>>,
    dp3_sixer: Option<Option<DivClass>>,
}

/// Order-divisor and exactness analysis for Am(X).
fn amitsur_branch(
    group: &GaloisSubgroup,
    rho: usize,
    data: &DegreeData,
) -> (u64, bool, Vec<String>) {
    let lattice = group.lattice();
    let d = lattice.degree() as u64;
    let mut notes = Vec::new();
    if lattice.kind() == Kind::Product {
        notes.push("every element has order dividing 8 (Lemma 7.1(2))".into());
        notes.push(
            "Am(X) is generated by the ruling classes, each of period dividing 2 (Prop 5.3, Thm 2.14)"
                .into(),
        );
        let exact0 = rho == 1;
        if exact0 {
            notes.push(
                "rho = 1: the twisted self-product contains a Brauer-Severi curve as a hyperplane section, so Am(X) = 0 (Prop 5.3(2), Cor 5.4)"
                    .into(),
            );
        }
        return (2, exact0, notes);
    }

    let mut divisor = gcd64(d, 6);
    notes.push(format!(
        "every element has order dividing {d} (Lemma 7.1(2)), and exponents in the Thm 4.5 list divide 6: order divides gcd({d}, 6) = {divisor}"
    ));
    let mut exact0 = false;
    match d {
        9 => {
            divisor = gcd64(divisor, 3);
            notes.push(
                "the surface is a Brauer-Severi surface: Am(X) = Z/per with per | 3 (Thm 3.7, Thm 2.14)"
                    .into(),
            );
        }
        7 | 8 => {
            divisor = gcd64(divisor, 3);
            notes.push(
                "birational morphism to a Brauer-Severi surface: Am(X) cyclic of order dividing 3 (Thm 5.2, Thm 2.14)"
                    .into(),
            );
            exact0 = true;
            notes.push("gcd(d, 3) = 1 forces Am(X) = 0; X has a k-rational point (Cor 5.5)".into());
        }
        6 => {
            let dp6 = data.dp6.as_ref().expect("degree-6 data");
            if dp6.case2 {
                if dp6.invariant_line.is_some() {
                    divisor = 1;
                    exact0 = true;
                    notes.push(
                        "an exceptional class is invariant, giving a rational curve and a k-rational point: Am(X) = 0 (Thm 6.1(2))"
                            .into(),
                    );
                } else if dp6.rho_y == Some(1) {
                    divisor = 1;
                    exact0 = true;
                    notes.push(
                        "contraction to a twisted self-product with rho(Y) = 1: Am(X) = Am(Y) = 0 (Thm 6.1(2), Cor 5.4)"
                            .into(),
                    );
                } else {
                    divisor = gcd64(divisor, 2);
                    notes.push(
                        "contraction to a product-type surface: Am(X) = Am(Y) has exponent dividing 2 (Thm 6.1(2), Cor 5.4)"
                            .into(),
                    );
                }
            } else if dp6.case1 {
                divisor = gcd64(divisor, 3);
                notes.push(
                    "blow-down to a Brauer-Severi surface P: Am(X) = Am(P) cyclic of order dividing 3 (Thm 6.1(1), Thm 2.14)"
                        .into(),
                );
            } else {
                notes.push("case (3): rho = 1 and Am(X) = 0 (Thm 6.1(3))".into());
            }
        }
        5 => {
            exact0 = true;
            notes.push("gcd(5, 6) = 1: Am(X) = 0 (Lemma 7.1(2), Thm 4.5)".into());
        }
        4 => {
            if data.dp4_line.as_ref().map_or(false, |l| l.is_some()) {
                divisor = 1;
                exact0 = true;
                notes.push("quasi-split: X has a k-rational point, so Am(X) = 0 (Thm 7.7)".into());
            }
        }
        3 => {
            if data.dp3_sixer.as_ref().map_or(false, |s| s.is_some()) {
                notes.push(
                    "birational morphism to a Brauer-Severi surface: Am(X) cyclic of order dividing 3 (Thm 7.11, Thm 2.14)"
                        .into(),
                );
            }
            if rho == 1 {
                notes.push("rho = 1: X is minimal and Am(X) = 0".into());
            }
        }
        1 => {
            exact0 = true;
            notes
                .push("a zero-cycle of degree 1 exists: Am(X) = 0 (Lemma 7.1(2), Cor 2.16)".into());
        }
        _ => {}
    }
    if divisor == 1 {
        exact0 = true;
    }
    (divisor, exact0, notes)
}

/// Amitsur constraints for a (degree, kind, group) triple.
pub fn amitsur_constraints(group: &GaloisSubgroup) -> Result<AmitsurConstraint> {
    let (basis, rho) = rho_of(group);
    let data = degree_data(group)?;
    amitsur_from_parts(group, &basis, rho, &data)
}

fn amitsur_from_parts(
    group: &GaloisSubgroup,
    basis: &[Vec<i64>],
    rho: usize,
    data: &DegreeData,
) -> Result<AmitsurConstraint> {
    let (order_divisor, exact0, mut notes) = amitsur_branch(group, rho, data);
    let upper_bound = amitsur_upper_bound(group, basis, order_divisor, &mut notes)?;
    let exact_if_known = if exact0 || upper_bound.is_trivial() {
        Some(CohGroup::trivial())
    } else {
        None
    };
    Ok(AmitsurConstraint {
        order_divisor,
        upper_bound,
        exact_if_known,
        notes,
    })
}

fn degree_data(group: &GaloisSubgroup) -> Result<DegreeData> {
    let lattice = group.lattice();
    let mut data = DegreeData {
        dp6: None,
        dp5: None,
        dp4_line: None,
        dp4_conic: None,
        dp3_sixer: None,
    };
    if lattice.kind() == Kind::Blowup {
        match lattice.degree() {
            6 => data.dp6 = Some(classify_dp6(group)?),
            5 => data.dp5 = Some(descent_dp5(group)?),
            4 => {
                data.dp4_line = Some(quasi_split_dp4(group)?);
                data.dp4_conic = Some(conic_dp4(group)?);
            }
            3 => data.dp3_sixer = Some(blowdown_dp3(group)?),
            _ => {}
        }
    }
    Ok(data)
}

/// Full report for a (degree, kind, Galois image) triple.
pub fn classify(group: &GaloisSubgroup, opts: &ClassifyOptions) -> Result<SurfaceReport> {
    let lattice = group.lattice().clone();
    let canonical_allowed = lattice.degree() >= 3;
    let canonicalized = opts.canonicalize && canonical_allowed;
    // input provenance, independent of the canonical representative
    let enlarged = group.closure_enlarged_input();
    let owned;
    let group = if canonicalized {
        owned = group.canonicalize()?;
        &owned
    } else {
        group
    };

    let (basis, rho) = rho_of(group);
    let data = degree_data(group)?;
    let h1 = h1_with_fallback(group, opts.h1_bound)?;
    let amitsur = amitsur_from_parts(group, &basis, rho, &data)?;

    let orbits = group.line_orbits()?;
    let mut orbit_sizes: Vec<usize> = orbits.iter().map(|o| o.len()).collect();
    orbit_sizes.sort_unstable();

    let mut flags: Vec<DescentFlag> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    let mut point: Option<bool> = None;
    let name_of = |c: &DivClass| lattice.class_name(c);
    let case_label;

    match (lattice.kind(), lattice.degree()) {
        (Kind::Product, _) => {
            let half = DivClass(vec![1, 1]);
            flags.push(DescentFlag {
                name: "embeds_in_brauer_severi_threefold".into(),
                theorem: "Thm 5.1".into(),
                holds: true,
                witnesses: vec![name_of(&half)],
            });
            if rho == 2 {
                case_label = "P'xP''".to_string();
                flags.push(DescentFlag {
                    name: "splits_as_product_of_brauer_severi_curves".into(),
                    theorem: "Prop 5.3(1)".into(),
                    holds: true,
                    witnesses: vec!["L1".into(), "L2".into()],
                });
            } else {
                case_label = "twisted self-product".to_string();
                flags.push(DescentFlag {
                    name: "twisted_self_product".into(),
                    theorem: "Prop 5.3(2)".into(),
                    holds: true,
                    witnesses: vec![name_of(&half)],
                });
                notes.push(
                    "the ambient Brauer-Severi threefold is trivial: P = P3 (Prop 5.3(2))".into(),
                );
            }
        }
        (Kind::Blowup, 9) => {
            case_label = "Brauer-Severi surface".to_string();
            flags.push(DescentFlag {
                name: "is_brauer_severi_surface".into(),
                theorem: "Sec 4.1".into(),
                holds: true,
                witnesses: vec![name_of(&DivClass(vec![1]))],
            });
        }
        (Kind::Blowup, d @ (7 | 8)) => {
            case_label = "blow-down to a Brauer-Severi surface".to_string();
            let h = {
                let mut v = vec![0i64; lattice.rank()];
                v[0] = 1;
                DivClass(v)
            };
            flags.push(DescentFlag {
                name: "birational_morphism_to_brauer_severi_surface".into(),
                theorem: "Thm 5.2".into(),
                holds: true,
                witnesses: vec![name_of(&h)],
            });
            flags.push(DescentFlag {
                name: "birational_morphism_to_p2".into(),
                theorem: "Cor 5.5".into(),
                holds: true,
                witnesses: vec![name_of(&h)],
            });
            point = Some(true);
            notes.push(format!(
                "degree {d} >= 7: X has a k-rational point (Cor 5.5)"
            ));
        }
        (Kind::Blowup, 6) => {
            let dp6 = data.dp6.as_ref().unwrap();
            let mut cases = Vec::new();
            if dp6.case1 {
                cases.push("(1)");
            }
            if dp6.case2 {
                cases.push("(2)");
            }
            if dp6.case3 {
                cases.push("(3)");
            }
            case_label = format!("Thm 6.1 case {}", cases.join("+"));
            flags.push(DescentFlag {
                name: "birational_morphism_to_brauer_severi_surface".into(),
                theorem: "Thm 6.1(1)".into(),
                holds: dp6.case1,
                witnesses: dp6.case1_witnesses.iter().map(&name_of).collect(),
            });
            if dp6.case1 {
                notes.push(
                    "the two blow-down classes H and -K-H are a Cremona-related pair of Brauer-Severi targets (Remark 6.2)"
                        .into(),
                );
            }
            flags.push(DescentFlag {
                name: "birational_morphism_to_product_type".into(),
                theorem: "Thm 6.1(2)".into(),
                holds: dp6.case2,
                witnesses: dp6.case2_witness.iter().map(&name_of).collect(),
            });
            flags.push(DescentFlag {
                name: "invariant_exceptional_curve".into(),
                theorem: "Thm 6.1(2)".into(),
                holds: dp6.invariant_line.is_some(),
                witnesses: dp6.invariant_line.iter().map(&name_of).collect(),
            });
            flags.push(DescentFlag {
                name: "minimal_of_rank_one".into(),
                theorem: "Thm 6.1(3)".into(),
                holds: dp6.case3,
                witnesses: if dp6.case3 {
                    vec![name_of(lattice.canonical())]
                } else {
                    vec![]
                },
            });
            if let Some(desc) = &dp6.y_description {
                notes.push(format!("contraction target Y: {desc}"));
            }
            if dp6.invariant_line.is_some() {
                point = Some(true);
            }
        }
        (Kind::Blowup, 5) => {
            let dp5 = data.dp5.as_ref().unwrap();
            let holds = dp5.f_class.is_some();
            case_label = if holds {
                "Thm 7.3 descent".to_string()
            } else {
                "no invariant blow-down".to_string()
            };
            flags.push(DescentFlag {
                name: "blow_down_four_disjoint_lines".into(),
                theorem: "Thm 7.3(3)".into(),
                holds,
                witnesses: dp5.f_class.iter().map(&name_of).collect(),
            });
            flags.push(DescentFlag {
                name: "invariant_conic_class".into(),
                theorem: "Thm 7.3(4)".into(),
                holds: dp5.conic.is_some(),
                witnesses: dp5.conic.iter().map(&name_of).collect(),
            });
            let blowdown_class = dp5.f_class.as_ref().map(|f| {
                let three_h = &-(lattice.canonical()) + f;
                debug_assert!(three_h.0.iter().all(|c| c % 3 == 0));
                DivClass(three_h.0.iter().map(|c| c / 3).collect())
            });
            flags.push(DescentFlag {
                name: "birational_morphism_to_p2".into(),
                theorem: "Thm 7.3(2)".into(),
                holds,
                witnesses: blowdown_class.iter().map(&name_of).collect(),
            });
            if holds {
                point = Some(true);
                notes.push(
                    "the equivalent descent conditions hold, so X has a k-rational point (Thm 7.3)"
                        .into(),
                );
            }
        }
        (Kind::Blowup, 4) => {
            let line = data.dp4_line.as_ref().unwrap();
            let conic = data.dp4_conic.as_ref().unwrap();
            case_label = if line.is_some() {
                "quasi-split".to_string()
            } else {
                "not quasi-split".to_string()
            };
            flags.push(DescentFlag {
                name: "invariant_exceptional_class".into(),
                theorem: "Thm 7.7(4)".into(),
                holds: line.is_some(),
                witnesses: line.iter().map(&name_of).collect(),
            });
            let target_class = line.as_ref().map(|e| &-(lattice.canonical()) - e);
            flags.push(DescentFlag {
                name: "birational_morphism_to_p2".into(),
                theorem: "Thm 7.7(2)".into(),
                holds: line.is_some(),
                witnesses: target_class.iter().map(&name_of).collect(),
            });
            flags.push(DescentFlag {
                name: "invariant_conic_class".into(),
                theorem: "Prop 7.10(1)".into(),
                holds: conic.is_some(),
                witnesses: conic.iter().map(&name_of).collect(),
            });
            if line.is_some() {
                point = Some(true);
                notes.push("quasi-split: X has a k-rational point (Thm 7.7)".into());
            }
            if conic.is_some() {
                notes.push(
                    "the conic class gives a finite degree-2 morphism to P' x P'' with P' isomorphic to P'' (Prop 7.10)"
                        .into(),
                );
            }
        }
        (Kind::Blowup, 3) => {
            let sixer = data.dp3_sixer.as_ref().unwrap();
            case_label = if sixer.is_some() {
                "invariant sixer".to_string()
            } else if rho == 1 {
                "minimal".to_string()
            } else {
                "no invariant sixer".to_string()
            };
            flags.push(DescentFlag {
                name: "blow_down_six_disjoint_lines".into(),
                theorem: "Thm 7.11(2)".into(),
                holds: sixer.is_some(),
                witnesses: sixer.iter().map(&name_of).collect(),
            });
            let blowdown_class = sixer.as_ref().map(|f| {
                let three_h = &-(lattice.canonical()) + f;
                debug_assert!(three_h.0.iter().all(|c| c % 3 == 0));
                DivClass(three_h.0.iter().map(|c| c / 3).collect())
            });
            flags.push(DescentFlag {
                name: "birational_morphism_to_brauer_severi_surface".into(),
                theorem: "Thm 7.11(1)".into(),
                holds: sixer.is_some(),
                witnesses: blowdown_class.iter().map(&name_of).collect(),
            });
            if rho == 1 {
                notes.push("rho = 1: X is minimal".into());
            }
        }
        (Kind::Blowup, d) => {
            case_label = format!("degree {d}");
        }
    }

    let field_extensions = data.dp6.as_ref().map(|dp6| FieldExtensionData {
        k_eq_k_field: dp6.k_eq_k_field,
        k_eq_l: dp6.k_eq_l,
        k_eq_m: dp6.k_eq_m,
        phi1_image_order: dp6.phi1_image_order,
        phi2_image_order: dp6.phi2_image_order,
    });

    Ok(SurfaceReport {
        degree: lattice.degree(),
        kind: lattice.kind(),
        group: GroupSummary {
            order: group.order(),
            orbit_sizes_on_lines: orbit_sizes,
            closure_enlarged_input: enlarged,
            canonicalized,
        },
        rho,
        invariant_basis: basis
            .iter()
            .map(|c| lattice.class_name(&DivClass(c.clone())))
            .collect(),
        h1,
        has_k_rational_point: point,
        descent_flags: flags,
        amitsur,
        case_label,
        field_extensions,
        notes,
    })
}

/// Target dimension of the Veronese-type embedding of a Brauer-Severi
/// variety of the given dimension and period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KangEmbedding {
    /// binom(dim + per, per) - 1, the projective dimension of the target.
    pub dimension: i64,
    /// The printed value binom(dim + per, per), kept for comparison.
    pub printed_value: i64,
    pub warnings: Vec<String>,
}

pub fn kang_dimension(dim: u32, per: u32) -> KangEmbedding {
    let binom = |n: u64, k: u64| -> i64 {
        let k = k.min(n - k);
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
        }
        acc as i64
    };
    let b = binom((dim + per) as u64, per as u64);
    let mut warnings = vec![
        "Cor 3.8 prints N = binom(dim+per, per); the plane-conic anchor of Example 3.9 forces the target dimension binom(dim+per, per) - 1, which is the value reported here"
            .to_string(),
    ];
    if per != 0 && (dim + 1) % per != 0 {
        warnings.push(format!(
            "period {per} does not divide dim + 1 = {} (Thm 2.14)",
            dim + 1
        ));
    }
    KangEmbedding {
        dimension: b - 1,
        printed_value: b,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GaloisSubgroup;
    use crate::lattice::PicLattice;
    use crate::weyl::{simple_reflections, PermDomain};

    fn lattice(d: i64, kind: Kind) -> PicLattice {
        PicLattice::new(d, kind).unwrap()
    }

    fn subgroup_from_perm_names(l: &PicLattice, images: &[(&str, &str)]) -> GaloisSubgroup {
        // build a single generator from a full line permutation
        let dom = PermDomain::for_lattice(l).unwrap();
        let mut perm: Vec<u8> = (0..dom.len() as u8).collect();
        for (from, to) in images {
            let f = DivClass::parse(from, l).unwrap();
            let t = DivClass::parse(to, l).unwrap();
            perm[dom.position(&f).unwrap()] = dom.position(&t).unwrap() as u8;
        }
        let aut = crate::weyl::LatticeAut::from_perm(l, &dom, &perm).unwrap();
        GaloisSubgroup::generate(l, &[aut]).unwrap()
    }

    #[test]
    fn dp6_trivial_group() {
        let l = lattice(6, Kind::Blowup);
        let g = GaloisSubgroup::trivial(&l).unwrap();
        let d = classify_dp6(&g).unwrap();
        assert!(d.k_eq_k_field && d.k_eq_l && d.k_eq_m);
        assert_eq!(d.rho, 4);
        assert!(d.case1 && d.case2 && !d.case3);
        assert_eq!(
            d.y_description.as_deref(),
            Some("P1 x P1 (X has a k-rational point)")
        );
    }

    #[test]
    fn dp6_rotation_of_order_three() {
        let l = lattice(6, Kind::Blowup);
        let g = subgroup_from_perm_names(
            &l,
            &[
                ("E1", "E2"),
                ("E2", "E3"),
                ("E3", "E1"),
                ("H-E2-E3", "H-E1-E3"),
                ("H-E1-E3", "H-E1-E2"),
                ("H-E1-E2", "H-E2-E3"),
            ],
        );
        assert_eq!(g.order(), 3);
        let d = classify_dp6(&g).unwrap();
        assert!(d.k_eq_k_field);
        assert!(!d.k_eq_l);
        assert!(d.case1 && !d.case2 && !d.case3);
        assert_eq!(d.rho, 2);
        // the Cremona-paired witnesses H and -K-H, both invariant
        assert_eq!(
            d.case1_witnesses,
            vec![DivClass(vec![1, 0, 0, 0]), DivClass(vec![2, -1, -1, -1])]
        );
        for wcl in &d.case1_witnesses {
            assert!(g.fixes(wcl).unwrap());
        }
    }

    #[test]
    fn dp6_full_weyl_group() {
        let l = lattice(6, Kind::Blowup);
        let w = GaloisSubgroup::weyl(&l).unwrap();
        let d = classify_dp6(&w).unwrap();
        assert!(!d.k_eq_k_field && !d.k_eq_l);
        assert!(d.case3);
        assert_eq!(d.rho, 1);
        let am = amitsur_constraints(&w).unwrap();
        assert!(am.upper_bound.is_trivial());
        assert_eq!(am.exact_if_known, Some(CohGroup::trivial()));
    }

    #[test]
    fn dp5_trivial_and_full() {
        let l = lattice(5, Kind::Blowup);
        let t = GaloisSubgroup::trivial(&l).unwrap();
        let d = descent_dp5(&t).unwrap();
        assert!(d.f_class.is_some() && d.conic.is_some());

        let w = GaloisSubgroup::weyl(&l).unwrap();
        let d = descent_dp5(&w).unwrap();
        assert!(d.f_class.is_none() && d.conic.is_none());
    }

    #[test]
    fn dp5_five_cycle() {
        let l = lattice(5, Kind::Blowup);
        let w = GaloisSubgroup::weyl(&l).unwrap();
        // find an element of order 5
        let auts = w.element_auts().unwrap();
        let five = auts
            .iter()
            .find(|a| {
                let mut p = (*a).clone();
                let mut k = 1;
                while !p.is_identity() {
                    p = p.compose(a);
                    k += 1;
                }
                k == 5
            })
            .unwrap();
        let g = GaloisSubgroup::generate(&l, &[five.clone()]).unwrap();
        let d = descent_dp5(&g).unwrap();
        // exhaustive search result: both conditions agree
        assert_eq!(d.f_class.is_some(), d.conic.is_some());
        assert!(d.f_class.is_none(), "an order-5 action fixes no blow-down");
    }

    #[test]
    fn dp4_examples() {
        let l = lattice(4, Kind::Blowup);
        let t = GaloisSubgroup::trivial(&l).unwrap();
        assert_eq!(
            quasi_split_dp4(&t).unwrap().unwrap(),
            DivClass(vec![0, 0, 0, 0, 0, 1])
        );
        assert!(conic_dp4(&t).unwrap().is_some());

        let w = GaloisSubgroup::weyl(&l).unwrap();
        assert!(quasi_split_dp4(&w).unwrap().is_none());
        assert!(conic_dp4(&w).unwrap().is_none());

        // a reflection fixing some lines: still quasi-split
        let dom = PermDomain::for_lattice(&l).unwrap();
        let refl = simple_reflections(&l, &dom).unwrap();
        let g = GaloisSubgroup::generate(&l, &refl[..1]).unwrap();
        assert!(quasi_split_dp4(&g).unwrap().is_some());
    }

    #[test]
    fn quasi_split_iff_singleton_orbit() {
        let l = lattice(4, Kind::Blowup);
        let w = GaloisSubgroup::weyl(&l).unwrap();
        let auts = w.element_auts().unwrap();
        for i in (0..auts.len()).step_by(97) {
            let g = GaloisSubgroup::generate(&l, &[auts[i].clone()]).unwrap();
            let has_fixed_line = g.line_orbits().unwrap().iter().any(|o| o.len() == 1);
            assert_eq!(quasi_split_dp4(&g).unwrap().is_some(), has_fixed_line);
        }
    }

    #[test]
    fn dp3_examples() {
        let l = lattice(3, Kind::Blowup);
        let t = GaloisSubgroup::trivial(&l).unwrap();
        assert!(blowdown_dp3(&t).unwrap().is_some());

        let dom = PermDomain::for_lattice(&l).unwrap();
        let refl = simple_reflections(&l, &dom).unwrap();
        // a single reflection still leaves an invariant sixer
        let g = GaloisSubgroup::generate(&l, &refl[..1]).unwrap();
        assert!(blowdown_dp3(&g).unwrap().is_some());

        // the full symmetry group has rho = 1, so no sixer sum survives
        let w = GaloisSubgroup::weyl(&l).unwrap();
        assert!(blowdown_dp3(&w).unwrap().is_none());
    }

    #[test]
    fn classify_handles_low_degrees() {
        // degrees 1 and 2 have no per-degree decision procedures, but the
        // rank, cohomology and Amitsur machinery still applies
        let l2 = lattice(2, Kind::Blowup);
        let dom = PermDomain::for_lattice(&l2).unwrap();
        let refl = simple_reflections(&l2, &dom).unwrap();
        let g = GaloisSubgroup::generate(&l2, &refl[..1]).unwrap();
        let rep = classify(&g, &ClassifyOptions::default()).unwrap();
        assert_eq!(rep.rho, 7);
        assert_eq!(rep.amitsur.order_divisor, 2);
        assert_eq!(rep.case_label, "degree 2");

        let l1 = lattice(1, Kind::Blowup);
        let t = GaloisSubgroup::trivial(&l1).unwrap();
        let rep = classify(&t, &ClassifyOptions::default()).unwrap();
        assert_eq!(rep.rho, 9);
        assert_eq!(rep.amitsur.order_divisor, 1);
        assert_eq!(rep.amitsur.exact_if_known, Some(CohGroup::trivial()));
    }

    #[test]
    fn amitsur_examples() {
        // (7, blowup): Am = 0
        let l7 = lattice(7, Kind::Blowup);
        let t7 = GaloisSubgroup::trivial(&l7).unwrap();
        let am = amitsur_constraints(&t7).unwrap();
        assert_eq!(am.order_divisor, 1);
        assert!(am.upper_bound.is_trivial());

        // (9, blowup): Am in {0, Z/3}
        let l9 = lattice(9, Kind::Blowup);
        let t9 = GaloisSubgroup::trivial(&l9).unwrap();
        let am = amitsur_constraints(&t9).unwrap();
        assert_eq!(am.order_divisor, 3);
        assert_eq!(am.upper_bound.invariant_factors, vec![3]);
        assert_eq!(am.exact_if_known, None);

        // (8, product, trivial): upper bound (Z/2)^2
        let lp = lattice(8, Kind::Product);
        let tp = GaloisSubgroup::trivial(&lp).unwrap();
        let am = amitsur_constraints(&tp).unwrap();
        assert_eq!(am.upper_bound.invariant_factors, vec![2, 2]);

        // (8, product, swap): exact 0
        let wp = GaloisSubgroup::weyl(&lp).unwrap();
        let am = amitsur_constraints(&wp).unwrap();
        assert_eq!(am.exact_if_known, Some(CohGroup::trivial()));
    }

    #[test]
    fn classify_product_cases() {
        let lp = lattice(8, Kind::Product);
        let t = GaloisSubgroup::trivial(&lp).unwrap();
        let rep = classify(&t, &ClassifyOptions::default()).unwrap();
        assert_eq!(rep.rho, 2);
        assert_eq!(rep.case_label, "P'xP''");

        let w = GaloisSubgroup::weyl(&lp).unwrap();
        let rep = classify(&w, &ClassifyOptions::default()).unwrap();
        assert_eq!(rep.rho, 1);
        assert_eq!(rep.case_label, "twisted self-product");
        assert!(rep.notes.iter().any(|n| n.contains("P = P3")));
    }

    #[test]
    fn classify_degree_nine_is_a_brauer_severi_surface() {
        let l = lattice(9, Kind::Blowup);
        let t = GaloisSubgroup::trivial(&l).unwrap();
        let rep = classify(&t, &ClassifyOptions::default()).unwrap();
        assert_eq!(rep.case_label, "Brauer-Severi surface");
        assert_eq!(rep.rho, 1);
        assert_eq!(rep.amitsur.order_divisor, 3);
        assert_eq!(rep.amitsur.upper_bound.invariant_factors, vec![3]);
        assert_eq!(rep.has_k_rational_point, None);
    }

    #[test]
    fn classify_degree_seven_has_point() {
        let l = lattice(7, Kind::Blowup);
        let w = GaloisSubgroup::weyl(&l).unwrap();
        let rep = classify(&w, &ClassifyOptions::default()).unwrap();
        assert_eq!(rep.has_k_rational_point, Some(true));
        assert!(rep.amitsur.upper_bound.is_trivial());
    }

    #[test]
    fn kang_examples() {
        let k = kang_dimension(1, 2);
        assert_eq!(k.dimension, 2); // plane conic
        assert_eq!(k.printed_value, 3);
        assert!(!k.warnings.is_empty());
        for n in 1..=10 {
            assert_eq!(kang_dimension(n, 1).dimension, n as i64);
        }
        assert_eq!(kang_dimension(2, 3).dimension, 9);
        assert!(kang_dimension(3, 3)
            .warnings
            .iter()
            .any(|w| w.contains("does not divide")));
    }

    #[test]
    fn ctkm_clamp_branches() {
        let mk = |f: &[u64]| CohGroup {
            invariant_factors: f.to_vec(),
        };
        // already in the list: untouched, no note
        for f in [&[][..], &[2], &[2, 2], &[3]] {
            let mut notes = Vec::new();
            assert_eq!(clamp_to_ctkm(mk(f), &mut notes), mk(f));
            assert!(notes.is_empty());
        }
        // pure 2-groups and 3-groups reduce soundly
        let mut notes = Vec::new();
        assert_eq!(clamp_to_ctkm(mk(&[2, 2, 2]), &mut notes), mk(&[2, 2]));
        assert_eq!(clamp_to_ctkm(mk(&[3, 3]), &mut notes), mk(&[3]));
        assert_eq!(notes.len(), 2);
        // mixed torsion admits no sound reduction and passes through
        let mut notes = Vec::new();
        assert_eq!(clamp_to_ctkm(mk(&[6]), &mut notes), mk(&[6]));
        assert!(notes[0].contains("no sound reduction"));
    }

    #[test]
    fn conic_dp4_with_a_setwise_pencil_pair() {
        // conics come in pencil pairs {c, -K-c}; take an involution that
        // stabilizes such a pair setwise without fixing either member and
        // compare conic_dp4 against a full-element search
        let l = lattice(4, Kind::Blowup);
        let conics = crate::classes::conic_classes(&l).unwrap();
        let w = GaloisSubgroup::weyl(&l).unwrap();
        let auts = w.element_auts().unwrap();
        let mut found = false;
        for a in &auts {
            let Some(c) = conics.iter().find(|c| {
                let img = a.apply(c).unwrap();
                img != **c && img == &-(l.canonical()) - *c
            }) else {
                continue;
            };
            let _ = c;
            let g = GaloisSubgroup::generate(&l, &[a.clone()]).unwrap();
            let fast = conic_dp4(&g).unwrap();
            let slow = conics
                .iter()
                .find(|c| {
                    g.element_auts()
                        .unwrap()
                        .iter()
                        .all(|e| e.apply(c).unwrap() == **c)
                })
                .cloned();
            assert_eq!(fast, slow);
            found = true;
            break;
        }
        assert!(found, "no pencil-pair swapping element located");
    }

    #[test]
    fn conjugation_gives_identical_reports() {
        let l = lattice(6, Kind::Blowup);
        let w = GaloisSubgroup::weyl(&l).unwrap();
        let auts = w.element_auts().unwrap();
        let g = GaloisSubgroup::generate(&l, &[auts[5].clone()]).unwrap();
        let base = classify(&g, &ClassifyOptions::default()).unwrap();
        for conj in &auts {
            let moved = g.conjugate_by(conj).unwrap();
            let rep = classify(&moved, &ClassifyOptions::default()).unwrap();
            assert_eq!(rep, base);
        }
    }
}

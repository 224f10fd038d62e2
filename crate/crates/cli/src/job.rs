//! Job documents: a single JSON schema for every CLI mode, with generator
//! specifications resolved and validated against the lattice.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use delpezzo::error::{Error, Result};
use delpezzo::group::GaloisSubgroup;
use delpezzo::lattice::{DivClass, Kind, PicLattice};
use delpezzo::weyl::{LatticeAut, PermDomain};

pub const JOB_SCHEMA: &str = "delpezzo/job/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Analyze,
    Survey,
    Lines,
    H1,
    Degeneracy,
}

/// One generator of the Galois image: the product-lattice factor swap, a
/// permutation of named exceptional classes, or an explicit matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GenSpec {
    Named(String),
    Perm { perm: BTreeMap<String, String> },
    Matrix { matrix: Vec<Vec<i64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    #[serde(default = "job_schema")]
    pub schema: String,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GenSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q1: Option<Vec<Vec<i64>>>,
}

fn job_schema() -> String {
    JOB_SCHEMA.to_string()
}

/// Parse and structurally validate a job document.
pub fn parse_job(text: &str) -> Result<Job> {
    let job: Job = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("job document: {e}")))?;
    if job.schema != JOB_SCHEMA {
        return Err(Error::InvalidInput(format!(
            "schema: expected {JOB_SCHEMA}, got {}",
            job.schema
        )));
    }
    match job.mode {
        Mode::Degeneracy => {
            if job.q0.is_none() || job.q1.is_none() {
                return Err(Error::InvalidInput(
                    "q0, q1: required for mode=degeneracy".into(),
                ));
            }
        }
        Mode::Lines => {
            if job.degree.is_none() {
                return Err(Error::InvalidInput(
                    "degree: required for mode=lines".into(),
                ));
            }
        }
        _ => {
            if job.degree.is_none() {
                return Err(Error::InvalidInput(format!(
                    "degree: required for mode={:?}",
                    job.mode
                )));
            }
        }
    }
    Ok(job)
}

/// Serialize a job back to its document form (round-trips through
/// `parse_job` exactly).
pub fn emit_job(job: &Job) -> String {
    let mut s = serde_json::to_string_pretty(job).expect("job serialization");
    s.push('\n');
    s
}

/// The lattice a job addresses.
pub fn job_lattice(job: &Job) -> Result<PicLattice> {
    let degree = job
        .degree
        .ok_or_else(|| Error::InvalidInput("degree: missing".into()))?;
    PicLattice::new(degree, job.kind.unwrap_or(Kind::Blowup))
}

/// Resolve generator specifications into validated lattice automorphisms.
///
/// Permutations may be partial: they are completed to the unique symmetry
/// consistent with the named images, preferring the one that fixes every
/// unnamed class when several are consistent.
pub fn resolve_generators(lattice: &PicLattice, specs: &[GenSpec]) -> Result<Vec<LatticeAut>> {
    let domain = PermDomain::for_lattice(lattice)?;
    let mut out = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        let gen = match spec {
            GenSpec::Named(name) => {
                if name != "swap" {
                    return Err(Error::InvalidInput(format!(
                        "generators[{i}]: unknown name `{name}` (only \"swap\")"
                    )));
                }
                if lattice.kind() != Kind::Product {
                    return Err(Error::InvalidInput(format!(
                        "generators[{i}]: \"swap\" requires the product lattice"
                    )));
                }
                LatticeAut::new(lattice, &domain, vec![0, 1, 1, 0])?
            }
            GenSpec::Matrix { matrix } => {
                let r = lattice.rank();
                if matrix.len() != r || matrix.iter().any(|row| row.len() != r) {
                    return Err(Error::InvalidInput(format!(
                        "generators[{i}].matrix: expected {r}x{r}"
                    )));
                }
                let flat: Vec<i64> = matrix.iter().flatten().copied().collect();
                LatticeAut::new(lattice, &domain, flat)
                    .map_err(|e| Error::InvalidInput(format!("generators[{i}].matrix: {e}")))?
            }
            GenSpec::Perm { perm } => resolve_perm(lattice, &domain, perm)
                .map_err(|e| Error::InvalidInput(format!("generators[{i}].perm: {e}")))?,
        };
        out.push(gen);
    }
    Ok(out)
}

fn resolve_perm(
    lattice: &PicLattice,
    domain: &PermDomain,
    named: &BTreeMap<String, String>,
) -> Result<LatticeAut> {
    let mut partial: Vec<Option<u8>> = vec![None; domain.len()];
    for (from, to) in named {
        let f = DivClass::parse(from, lattice)?;
        let t = DivClass::parse(to, lattice)?;
        let fi = domain
            .position(&f)
            .ok_or_else(|| Error::InvalidInput(format!("`{from}` is not a distinguished class")))?;
        let ti = domain
            .position(&t)
            .ok_or_else(|| Error::InvalidInput(format!("`{to}` is not a distinguished class")))?;
        partial[fi] = Some(ti as u8);
    }
    // fully specified: validate directly
    if partial.iter().all(|p| p.is_some()) {
        let perm: Vec<u8> = partial.into_iter().map(|p| p.unwrap()).collect();
        return LatticeAut::from_perm(lattice, domain, &perm);
    }
    // partial: search the full symmetry group for consistent completions
    let weyl = GaloisSubgroup::weyl(lattice)?;
    let mut matches: Vec<&[u8]> = Vec::new();
    for p in weyl.element_perms() {
        if partial
            .iter()
            .enumerate()
            .all(|(i, req)| req.map_or(true, |t| p[i] == t))
        {
            matches.push(p);
        }
    }
    match matches.len() {
        0 => Err(Error::NotAnAutomorphism(
            "permutation is not induced by any lattice automorphism".into(),
        )),
        1 => LatticeAut::from_perm(lattice, domain, matches[0]),
        _ => {
            // prefer the completion fixing every unnamed class
            let identity_pref: Vec<&&[u8]> = matches
                .iter()
                .filter(|p| {
                    partial
                        .iter()
                        .enumerate()
                        .all(|(i, req)| req.is_some() || p[i] as usize == i)
                })
                .collect();
            if identity_pref.len() == 1 {
                LatticeAut::from_perm(lattice, domain, identity_pref[0])
            } else {
                Err(Error::InvalidInput(format!(
                    "permutation is ambiguous: {} symmetries are consistent",
                    matches.len()
                )))
            }
        }
    }
}

/// Build the Galois image of an analyze/h1 job.
pub fn job_group(job: &Job) -> Result<GaloisSubgroup> {
    let lattice = job_lattice(job)?;
    let gens = resolve_generators(&lattice, &job.generators)?;
    GaloisSubgroup::generate(&lattice, &gens)
}

//! The survey driver: one classified row per subgroup conjugacy class of
//! the lattice symmetry group.

use delpezzo::classifier::{classify, ClassifyOptions};
use delpezzo::error::{Error, Result};
use delpezzo::group::GaloisSubgroup;
use delpezzo::lattice::{Kind, PicLattice};
use delpezzo::subgroups::{class_to_subgroup, subgroup_classes, PermGroup, DEFAULT_AMBIENT_LIMIT};

use crate::report::{SurveyDoc, SURVEY_SCHEMA};

/// Ambient-order override for the bounded degree-3 survey.
const DEGREE_THREE_AMBIENT: usize = 60_000;
/// Largest per-subgroup order allowed in the degree-3 survey.
const DEGREE_THREE_MAX_ORDER: usize = 200;

/// Survey every subgroup conjugacy class (of order at most `max_order`) of
/// the symmetry group at the given degree and kind.
///
/// Full surveys need degree >= 4; degree 3 is allowed with an explicit
/// `max_order` of at most 200 (the symmetry group there has 51840 elements,
/// so only the bounded walk is feasible).
pub fn run_survey(degree: i64, kind: Kind, max_order: Option<usize>) -> Result<SurveyDoc> {
    let lattice = PicLattice::new(degree, kind)?;
    if degree < 3 && kind == Kind::Blowup {
        return Err(Error::Infeasible(format!(
            "surveys are infeasible at degree {degree}: the symmetry group is not enumerable at desk scale"
        )));
    }
    let (ambient_limit, max_order) = if degree == 3 {
        let Some(mo) = max_order else {
            return Err(Error::Infeasible(
                "degree-3 surveys need an explicit max_order of at most 200".into(),
            ));
        };
        if mo > DEGREE_THREE_MAX_ORDER {
            return Err(Error::Infeasible(format!(
                "degree-3 surveys are bounded by max_order {DEGREE_THREE_MAX_ORDER}, got {mo}"
            )));
        }
        (DEGREE_THREE_AMBIENT, mo)
    } else {
        (DEFAULT_AMBIENT_LIMIT, max_order.unwrap_or(usize::MAX))
    };

    let weyl = GaloisSubgroup::weyl(&lattice)?;
    let pg = PermGroup::new(&weyl);
    let classes = subgroup_classes(&pg, max_order.min(pg.order()), ambient_limit)?;
    let opts = ClassifyOptions {
        // class representatives are already the lexicographically least
        // conjugates, which is exactly what canonicalization would produce
        canonicalize: false,
        ..ClassifyOptions::default()
    };
    let mut rows = Vec::with_capacity(classes.len());
    for class in &classes {
        let subgroup = class_to_subgroup(&pg, class)?;
        rows.push(classify(&subgroup, &opts)?);
    }
    Ok(SurveyDoc {
        schema: SURVEY_SCHEMA,
        degree,
        kind,
        max_order: max_order.min(pg.order()),
        row_count: rows.len(),
        rows,
    })
}

//! Report documents: deterministic, byte-stable JSON for every mode.

use serde::Serialize;

use delpezzo::classifier::SurfaceReport;
use delpezzo::cohomology::H1Result;
use delpezzo::lattice::Kind;
use delpezzo::pencil::DegeneracyReport;

pub const REPORT_SCHEMA: &str = "delpezzo/report/v1";
pub const SURVEY_SCHEMA: &str = "delpezzo/survey/v1";
pub const LINES_SCHEMA: &str = "delpezzo/lines/v1";
pub const H1_SCHEMA: &str = "delpezzo/h1/v1";
pub const DEGENERACY_SCHEMA: &str = "delpezzo/degeneracy/v1";

#[derive(Serialize)]
pub struct ReportDoc {
    pub schema: &'static str,
    pub report: SurfaceReport,
}

#[derive(Serialize)]
pub struct SurveyDoc {
    pub schema: &'static str,
    pub degree: i64,
    pub kind: Kind,
    pub max_order: usize,
    pub row_count: usize,
    pub rows: Vec<SurfaceReport>,
}

#[derive(Serialize)]
pub struct NamedClass {
    pub name: String,
    pub coeffs: Vec<i64>,
}

#[derive(Serialize)]
pub struct LinesDoc {
    pub schema: &'static str,
    pub degree: i64,
    pub kind: Kind,
    pub count: usize,
    pub classes: Vec<NamedClass>,
    pub sum: NamedClass,
    pub conic_classes: Vec<NamedClass>,
    pub root_classes: Vec<NamedClass>,
}

#[derive(Serialize)]
pub struct H1Doc {
    pub schema: &'static str,
    pub degree: i64,
    pub kind: Kind,
    pub group_order: usize,
    pub rho: usize,
    pub invariant_basis: Vec<String>,
    pub h1: H1Result,
}

#[derive(Serialize)]
pub struct DegeneracyDoc {
    pub schema: &'static str,
    #[serde(flatten)]
    pub report: DegeneracyReport,
}

/// All emission goes through one deterministic serializer.
pub fn emit<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serialization");
    s.push('\n');
    s
}

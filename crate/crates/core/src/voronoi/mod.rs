//! Nearest-site diagrams over 1-qubit states.
//!
//! Six modes share one classification interface: Fubini-Study, Bures,
//! geodesic and Euclidean-section diagrams on pure states, and the two
//! divergence diagrams on mixed states: V_D with the site in the second
//! argument of D(query || site), and V_D* with the site in the first,
//! D(site || query).
//!
//! Every mode reduces to pairwise affine tests: the four pure-state modes
//! are monotone functions of the central angle, so their bisectors are
//! central planes; the divergence modes differ between sites by affine
//! functions of the query (in Bloch coordinates for V_D, in dual
//! coordinates for V_D*), courtesy of the closed-form divergence. Cells
//! are therefore intersections of halfspaces and classification is exact
//! up to floating-point noise, which the margin band absorbs.
//!
//! Sites are compared by nearest distance/divergence, ties break to the
//! lowest site index, and queries with margin below [`MARGIN_BAND`] are
//! flagged ambiguous.

mod mesh;
mod sphere;

pub use mesh::{build_cell_mesh, export_cells, CellMesh, ExportFormat};
pub use sphere::{spherical_diagram, SphericalDiagram, SphericalEdge, SphericalVertex};

use crate::error::{Error, Result};
use crate::geometry::{conjugate_potential, grad_potential};
use crate::state::{dot3, norm3, potential, sub3, BlochVector, INTERIOR_GUARD};

/// Queries whose winner-margin falls below this are flagged ambiguous and
/// excluded from diagram-equality comparisons.
pub const MARGIN_BAND: f64 = 1e-9;

/// Sites closer than this are rejected as duplicates.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// The six diagram modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramMode {
    FubiniStudy,
    Bures,
    Geodesic,
    EuclideanSection,
    /// V_D: nearest site under D(query || site); sites must be interior.
    DivergencePrimal,
    /// V_D*: nearest site under D(site || query); queries must be interior.
    DivergenceDual,
}

impl DiagramMode {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "fubini-study" | "fubini_study" | "fs" => Some(Self::FubiniStudy),
            "bures" => Some(Self::Bures),
            "geodesic" => Some(Self::Geodesic),
            "euclidean" | "euclidean-section" => Some(Self::EuclideanSection),
            "divergence-primal" | "divergence_primal" => Some(Self::DivergencePrimal),
            "divergence-dual" | "divergence_dual" => Some(Self::DivergenceDual),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::FubiniStudy => "fubini-study",
            Self::Bures => "bures",
            Self::Geodesic => "geodesic",
            Self::EuclideanSection => "euclidean",
            Self::DivergencePrimal => "divergence-primal",
            Self::DivergenceDual => "divergence-dual",
        }
    }

    /// True for the angle-based pure-state modes.
    pub fn requires_pure_sites(&self) -> bool {
        matches!(self, Self::FubiniStudy | Self::Bures | Self::Geodesic)
    }

    pub fn is_divergence(&self) -> bool {
        matches!(self, Self::DivergencePrimal | Self::DivergenceDual)
    }
}

/// An ordered set of distinct sites with per-site purity flags.
#[derive(Debug, Clone)]
pub struct SiteSet {
    sites: Vec<BlochVector>,
    pure: Vec<bool>,
}

impl SiteSet {
    pub fn new(sites: Vec<BlochVector>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::EmptySites);
        }
        for i in 0..sites.len() {
            for j in i + 1..sites.len() {
                if crate::geometry::euclidean(&sites[i], &sites[j]) <= DUPLICATE_TOLERANCE {
                    return Err(Error::DuplicateSites {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(Self::new_trusted(sites))
    }

    /// Skip the duplicate scan; used for radial rescalings of an already
    /// validated set.
    pub(crate) fn new_trusted(sites: Vec<BlochVector>) -> Self {
        let pure = sites.iter().map(BlochVector::is_pure).collect();
        Self { sites, pure }
    }

    pub fn from_coords(coords: &[[f64; 3]]) -> Result<Self> {
        let sites = coords
            .iter()
            .map(|c| BlochVector::new(c[0], c[1], c[2]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sites)
    }

    /// Parse the site file format: one `x,y,z` line per site, `#` comments
    /// and blank lines skipped, a single non-numeric header line allowed.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut sites = Vec::new();
        let mut saw_data = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse::<f64>().ok()).collect();
            match parsed {
                Some(nums) if nums.len() == 3 => {
                    saw_data = true;
                    let v = BlochVector::new(nums[0], nums[1], nums[2]).map_err(|e| {
                        Error::InvalidSiteFile {
                            line: lineno + 1,
                            reason: e.to_string(),
                        }
                    })?;
                    sites.push(v);
                }
                _ if !saw_data => {
                    // Header line.
                    continue;
                }
                _ => {
                    return Err(Error::InvalidSiteFile {
                        line: lineno + 1,
                        reason: format!("expected three comma-separated numbers, got '{line}'"),
                    });
                }
            }
        }
        Self::new(sites)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[BlochVector] {
        &self.sites
    }

    pub fn site(&self, i: usize) -> &BlochVector {
        &self.sites[i]
    }

    pub fn is_pure(&self, i: usize) -> bool {
        self.pure[i]
    }

    pub fn all_pure(&self) -> bool {
        self.pure.iter().all(|&p| p)
    }

    /// Radial rescaling of every site by `factor`.
    pub fn scaled(&self, factor: f64) -> SiteSet {
        let sites = self
            .sites
            .iter()
            .map(|s| BlochVector::new_unchecked(s.x() * factor, s.y() * factor, s.z() * factor))
            .collect();
        SiteSet::new_trusted(sites)
    }
}

/// One classified query.
#[derive(Debug, Clone, Copy)]
pub struct AssignmentEntry {
    pub query: BlochVector,
    pub site: usize,
    /// Runner-up value minus winner value, in the mode's own units;
    /// infinite for a single site.
    pub margin: f64,
    pub ambiguous: bool,
}

/// Classification of a query batch under one mode.
#[derive(Debug, Clone)]
pub struct DiagramAssignment {
    pub mode: DiagramMode,
    pub epsilon: Option<f64>,
    pub entries: Vec<AssignmentEntry>,
}

impl DiagramAssignment {
    /// CSV with header `qx,qy,qz,site,margin`, floats at 12 significant
    /// digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("qx,qy,qz,site,margin\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                crate::fmt_sig12(e.query.x()),
                crate::fmt_sig12(e.query.y()),
                crate::fmt_sig12(e.query.z()),
                e.site,
                crate::fmt_sig12(e.margin),
            ));
        }
        out
    }
}

/// Per-mode site preprocessing; comparisons only ever need terms that
/// differ between sites, so shared query terms (phi of the query, the
/// conjugate potential of its dual image) are dropped.
enum SiteEval {
    /// Pure-state modes: monotone transforms of the dot product, evaluated
    /// per site in the mode's own metric.
    Angle(DiagramMode),
    /// V_D: value_i(q) = phi*(d_i) - q . d_i with d_i = grad phi(s_i).
    Primal {
        duals: Vec<[f64; 3]>,
        conj: Vec<f64>,
    },
    /// V_D*: value_i(u) = phi(s_i) - s_i . u with u = grad phi(q).
    Dual { phis: Vec<f64> },
}

fn mode_misuse(reason: impl Into<String>) -> Error {
    Error::ModeMisuse {
        reason: reason.into(),
    }
}

fn prepare_sites(mode: DiagramMode, sites: &SiteSet) -> Result<SiteEval> {
    match mode {
        DiagramMode::FubiniStudy | DiagramMode::Bures | DiagramMode::Geodesic => {
            if !sites.all_pure() {
                return Err(mode_misuse(format!("{} requires pure sites", mode.name())));
            }
            Ok(SiteEval::Angle(mode))
        }
        DiagramMode::EuclideanSection => Ok(SiteEval::Angle(mode)),
        DiagramMode::DivergencePrimal => {
            let mut duals = Vec::with_capacity(sites.len());
            let mut conj = Vec::with_capacity(sites.len());
            for (i, s) in sites.sites().iter().enumerate() {
                let d = grad_potential(s).map_err(|_| {
                    mode_misuse(format!(
                        "divergence-primal requires interior sites (site {i} has radius {})",
                        s.radius()
                    ))
                })?;
                conj.push(conjugate_potential(&d));
                duals.push(d.components());
            }
            Ok(SiteEval::Primal { duals, conj })
        }
        DiagramMode::DivergenceDual => Ok(SiteEval::Dual {
            phis: sites.sites().iter().map(potential).collect(),
        }),
    }
}

fn angle_metric(mode: DiagramMode, query: &BlochVector, site: &BlochVector) -> f64 {
    match mode {
        DiagramMode::FubiniStudy => {
            let t = (0.5 * (1.0 + query.dot(site))).clamp(0.0, 1.0);
            t.sqrt().acos()
        }
        DiagramMode::Bures => {
            let t = (0.5 * (1.0 - query.dot(site))).max(0.0);
            t.sqrt()
        }
        DiagramMode::Geodesic => query.dot(site).clamp(-1.0, 1.0).acos(),
        DiagramMode::EuclideanSection => crate::geometry::euclidean(query, site),
        _ => unreachable!("angle_metric is only called for pure-state modes"),
    }
}

fn check_query(mode: DiagramMode, query: &BlochVector) -> Result<()> {
    match mode {
        DiagramMode::FubiniStudy | DiagramMode::Bures | DiagramMode::Geodesic => {
            if !query.is_pure() {
                return Err(mode_misuse(format!(
                    "{} requires pure queries (radius {})",
                    mode.name(),
                    query.radius()
                )));
            }
        }
        DiagramMode::DivergenceDual => {
            if query.radius() > 1.0 - INTERIOR_GUARD {
                return Err(mode_misuse(format!(
                    "divergence-dual requires interior queries (radius {})",
                    query.radius()
                )));
            }
        }
        DiagramMode::EuclideanSection | DiagramMode::DivergencePrimal => {}
    }
    Ok(())
}

fn classify_prepared(eval: &SiteEval, sites: &SiteSet, query: &BlochVector) -> (usize, f64) {
    let mut best = f64::INFINITY;
    let mut second = f64::INFINITY;
    let mut winner = 0usize;
    let mut consider = |i: usize, v: f64| {
        if v < best {
            second = best;
            best = v;
            winner = i;
        } else if v < second {
            second = v;
        }
    };
    match eval {
        SiteEval::Angle(mode) => {
            for (i, s) in sites.sites().iter().enumerate() {
                consider(i, angle_metric(*mode, query, s));
            }
        }
        SiteEval::Primal { duals, conj } => {
            let q = query.coords();
            for i in 0..duals.len() {
                consider(i, conj[i] - dot3(q, duals[i]));
            }
        }
        SiteEval::Dual { phis } => {
            let u = grad_potential(query)
                .expect("query interiority checked before classification")
                .components();
            for (i, s) in sites.sites().iter().enumerate() {
                consider(i, phis[i] - dot3(s.coords(), u));
            }
        }
    }
    (winner, second - best)
}

/// Classify one query: the index of the nearest site under the mode's
/// distance or divergence, plus the runner-up margin. Ties break to the
/// lowest index.
pub fn classify(mode: DiagramMode, sites: &SiteSet, query: &BlochVector) -> Result<(usize, f64)> {
    let eval = prepare_sites(mode, sites)?;
    check_query(mode, query)?;
    Ok(classify_prepared(&eval, sites, query))
}

/// Classify a batch of queries under one mode.
pub fn classify_batch(
    mode: DiagramMode,
    sites: &SiteSet,
    queries: &[BlochVector],
) -> Result<DiagramAssignment> {
    let eval = prepare_sites(mode, sites)?;
    let mut entries = Vec::with_capacity(queries.len());
    for q in queries {
        check_query(mode, q)?;
        let (site, margin) = classify_prepared(&eval, sites, q);
        entries.push(AssignmentEntry {
            query: *q,
            site,
            margin,
            ambiguous: margin < MARGIN_BAND,
        });
    }
    Ok(DiagramAssignment {
        mode,
        epsilon: None,
        entries,
    })
}

/// The coordinate frame a bisector lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BisectorFrame {
    Bloch,
    Dual,
}

/// The affine bisector of an ordered site pair: the halfspace
/// `normal . coords(p) <= offset` is exactly where the first site wins or
/// ties.
#[derive(Debug, Clone, Copy)]
pub struct AffineBisector {
    pub normal: [f64; 3],
    pub offset: f64,
    pub frame: BisectorFrame,
}

impl AffineBisector {
    /// Signed side value of a point: negative or zero means the first site
    /// wins or ties. Dual-frame bisectors evaluate at grad phi(p), so p
    /// must be interior there.
    pub fn side(&self, p: &BlochVector) -> Result<f64> {
        let coords = match self.frame {
            BisectorFrame::Bloch => p.coords(),
            BisectorFrame::Dual => grad_potential(p)?.components(),
        };
        Ok(dot3(self.normal, coords) - self.offset)
    }

    pub fn prefers_first(&self, p: &BlochVector) -> Result<bool> {
        Ok(self.side(p)? <= 0.0)
    }
}

/// Bisector of sites i and j under a mode. For the pure-state modes this
/// is the central plane through the origin; for V_D the difference of the
/// closed-form divergences is affine in the query with normal
/// grad phi(s_j) - grad phi(s_i); for V_D* it is affine in the dual image
/// of the query with normal s_j - s_i.
pub fn bisector(mode: DiagramMode, sites: &SiteSet, i: usize, j: usize) -> Result<AffineBisector> {
    if i >= sites.len() || j >= sites.len() {
        return Err(mode_misuse("bisector site index out of range"));
    }
    if i == j {
        return Err(Error::CoincidentSites);
    }
    let si = sites.site(i);
    let sj = sites.site(j);
    let diff = sub3(sj.coords(), si.coords());
    if norm3(diff) <= DUPLICATE_TOLERANCE {
        return Err(Error::CoincidentSites);
    }
    match mode {
        DiagramMode::FubiniStudy | DiagramMode::Bures | DiagramMode::Geodesic => {
            if !(sites.is_pure(i) && sites.is_pure(j)) {
                return Err(mode_misuse(format!("{} requires pure sites", mode.name())));
            }
            Ok(AffineBisector {
                normal: diff,
                offset: 0.0,
                frame: BisectorFrame::Bloch,
            })
        }
        DiagramMode::EuclideanSection => Ok(AffineBisector {
            normal: diff,
            offset: 0.5 * (dot3(sj.coords(), sj.coords()) - dot3(si.coords(), si.coords())),
            frame: BisectorFrame::Bloch,
        }),
        DiagramMode::DivergencePrimal => {
            let di = grad_potential(si)
                .map_err(|_| mode_misuse("divergence-primal bisector requires interior sites"))?;
            let dj = grad_potential(sj)
                .map_err(|_| mode_misuse("divergence-primal bisector requires interior sites"))?;
            Ok(AffineBisector {
                normal: sub3(dj.components(), di.components()),
                offset: conjugate_potential(&dj) - conjugate_potential(&di),
                frame: BisectorFrame::Bloch,
            })
        }
        DiagramMode::DivergenceDual => Ok(AffineBisector {
            normal: diff,
            offset: potential(sj) - potential(si),
            frame: BisectorFrame::Dual,
        }),
    }
}

/// Section of a divergence diagram of pure sites at radius 1 - epsilon:
/// sites and queries are radially rescaled, classified under the requested
/// divergence mode, and reported against the original pure queries. Both
/// divergence diagrams of equal-radius sites have central-plane bisectors,
/// so the section reproduces the spherical diagram at every epsilon.
pub fn pure_limit_section(
    sites: &SiteSet,
    epsilon: f64,
    mode: DiagramMode,
    queries: &[BlochVector],
) -> Result<DiagramAssignment> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::EpsilonOutOfRange { epsilon });
    }
    if !mode.is_divergence() {
        return Err(mode_misuse(format!(
            "pure limit sections are defined for the divergence modes, not {}",
            mode.name()
        )));
    }
    if !sites.all_pure() {
        return Err(mode_misuse("pure limit sections require pure sites"));
    }
    for q in queries {
        if !q.is_pure() {
            return Err(mode_misuse(format!(
                "pure limit sections require pure queries (radius {})",
                q.radius()
            )));
        }
    }
    let factor = 1.0 - epsilon;
    let scaled_sites = sites.scaled(factor);
    let scaled_queries: Vec<BlochVector> = queries
        .iter()
        .map(|q| BlochVector::new_unchecked(q.x() * factor, q.y() * factor, q.z() * factor))
        .collect();
    let mut assignment = classify_batch(mode, &scaled_sites, &scaled_queries)?;
    for (entry, original) in assignment.entries.iter_mut().zip(queries) {
        entry.query = *original;
    }
    assignment.epsilon = Some(epsilon);
    Ok(assignment)
}

/// A query where two assignments disagree outside the margin band.
#[derive(Debug, Clone, Copy)]
pub struct Mismatch {
    pub index: usize,
    pub site_a: usize,
    pub margin_a: f64,
    pub site_b: usize,
    pub margin_b: f64,
}

/// Compare two assignments over the same query list: equal when the
/// winning indices agree on every query whose margin clears
/// [`MARGIN_BAND`] in both.
pub fn diagrams_equal(
    a: &DiagramAssignment,
    b: &DiagramAssignment,
) -> Result<(bool, Vec<Mismatch>)> {
    if a.entries.len() != b.entries.len() {
        return Err(Error::QueryListMismatch);
    }
    for (ea, eb) in a.entries.iter().zip(&b.entries) {
        if ea.query.coords() != eb.query.coords() {
            return Err(Error::QueryListMismatch);
        }
    }
    let mut mismatches = Vec::new();
    for (idx, (ea, eb)) in a.entries.iter().zip(&b.entries).enumerate() {
        if ea.site != eb.site && ea.margin >= MARGIN_BAND && eb.margin >= MARGIN_BAND {
            mismatches.push(Mismatch {
                index: idx,
                site_a: ea.site,
                margin_a: ea.margin,
                site_b: eb.site,
                margin_b: eb.margin,
            });
        }
    }
    Ok((mismatches.is_empty(), mismatches))
}

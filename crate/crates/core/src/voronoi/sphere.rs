//! Explicit spherical Voronoi diagrams for pure sites.
//!
//! Cells are intersections of central-plane halfspaces with the sphere.
//! For each site pair the bisector is a great circle; the edge shared by
//! the two cells is the part of that circle on the winning side of every
//! other site's constraint. Each constraint cuts the circle to a closed
//! half-circle arc, so the edge is an exact intersection of arcs,
//! computed by 1-D interval clipping on the circle parameter, no general
//! 3-D arrangement machinery required.
//!
//! Vertices are arc endpoints: points geodesically equidistant to three or
//! more sites.

use super::{classify, DiagramMode, SiteSet};
use crate::error::{Error, Result};
use crate::state::{cross3, dot3, norm3, scale3, sub3, BlochVector};

const TAU: f64 = std::f64::consts::TAU;
/// Arcs shorter than this are degenerate contacts, not edges.
const ARC_EPSILON: f64 = 1e-9;

/// An edge of the spherical diagram: one or more arcs of the bisector
/// great circle of a site pair. Angles parameterize points as
/// `cos(t) e1 + sin(t) e2`.
#[derive(Debug, Clone)]
pub struct SphericalEdge {
    pub sites: (usize, usize),
    pub basis: ([f64; 3], [f64; 3]),
    /// Disjoint (start, length) intervals; a single `(0, 2 pi)` entry is a
    /// full circle.
    pub arcs: Vec<(f64, f64)>,
}

impl SphericalEdge {
    pub fn point_at(&self, angle: f64) -> BlochVector {
        let (e1, e2) = self.basis;
        let (s, c) = angle.sin_cos();
        BlochVector::new_unchecked(
            c * e1[0] + s * e2[0],
            c * e1[1] + s * e2[1],
            c * e1[2] + s * e2[2],
        )
    }

    pub fn total_length(&self) -> f64 {
        self.arcs.iter().map(|a| a.1).sum()
    }

    pub fn is_full_circle(&self) -> bool {
        self.arcs.len() == 1 && (self.arcs[0].1 - TAU).abs() < 1e-12
    }
}

/// A diagram vertex: a sphere point equidistant to at least three sites
/// (all listed), none closer.
#[derive(Debug, Clone)]
pub struct SphericalVertex {
    pub position: BlochVector,
    pub sites: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SphericalDiagram {
    pub n_sites: usize,
    pub edges: Vec<SphericalEdge>,
    pub vertices: Vec<SphericalVertex>,
    /// Sorted neighbor lists; `adjacency[i]` holds every j sharing an edge
    /// with i.
    pub adjacency: Vec<Vec<usize>>,
}

fn normalize_angle(a: f64) -> f64 {
    let mut a = a % TAU;
    if a < 0.0 {
        a += TAU;
    }
    a
}

/// Intersect a set of disjoint arcs with the closed arc [c, c + len].
fn clip_arcs(region: &[(f64, f64)], c: f64, len: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let c = normalize_angle(c);
    for &(s, l) in region {
        // Work on the line: target [s, s+l], constraint shifted by full
        // turns to catch wraparound overlaps.
        for shift in [-TAU, 0.0, TAU] {
            let lo = s.max(c + shift);
            let hi = (s + l).min(c + shift + len);
            if hi - lo > 1e-13 {
                out.push((normalize_angle(lo), hi - lo));
            }
        }
    }
    out
}

fn orthonormal_basis(w: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let n = norm3(w);
    let what = scale3(w, 1.0 / n);
    // Seed with the axis least aligned with w.
    let seed = if what[0].abs() <= what[1].abs() && what[0].abs() <= what[2].abs() {
        [1.0, 0.0, 0.0]
    } else if what[1].abs() <= what[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let mut e1 = sub3(seed, scale3(what, dot3(seed, what)));
    e1 = scale3(e1, 1.0 / norm3(e1));
    let e2 = cross3(what, e1);
    (e1, e2)
}

/// Build the spherical Voronoi diagram of at least two pure sites: edge
/// arcs, vertices and cell adjacency.
pub fn spherical_diagram(sites: &SiteSet) -> Result<SphericalDiagram> {
    let n = sites.len();
    if n < 2 {
        return Err(Error::TooFewSites { count: n });
    }
    if !sites.all_pure() {
        return Err(Error::ModeMisuse {
            reason: "spherical diagrams require pure sites".to_string(),
        });
    }

    let mut edges = Vec::new();
    let mut vertex_candidates: Vec<BlochVector> = Vec::new();

    for i in 0..n {
        for j in i + 1..n {
            let si = sites.site(i).coords();
            let sj = sites.site(j).coords();
            let w = sub3(si, sj);
            if norm3(w) <= super::DUPLICATE_TOLERANCE {
                return Err(Error::CoincidentSites);
            }
            let (e1, e2) = orthonormal_basis(w);
            // On the bisector circle, q . s_i = q . s_j; the cell condition
            // against site m is q . (s_i - s_m) >= 0, an A cos t + B sin t
            // >= 0 half-circle in the parameter.
            let mut region = vec![(0.0, TAU)];
            for m in 0..n {
                if m == i || m == j {
                    continue;
                }
                let v = sub3(si, sites.site(m).coords());
                let a = dot3(e1, v);
                let b = dot3(e2, v);
                let amp = (a * a + b * b).sqrt();
                if amp < 1e-12 {
                    // s_m is equidistant along the whole circle; never
                    // excludes anything.
                    continue;
                }
                let alpha = b.atan2(a);
                region = clip_arcs(
                    &region,
                    alpha - std::f64::consts::FRAC_PI_2,
                    std::f64::consts::PI,
                );
                if region.is_empty() {
                    break;
                }
            }
            region.retain(|&(_, l)| l > ARC_EPSILON);
            if region.is_empty() {
                continue;
            }
            region.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let edge = SphericalEdge {
                sites: (i, j),
                basis: (e1, e2),
                arcs: region.clone(),
            };
            if !edge.is_full_circle() {
                for &(s, l) in &region {
                    vertex_candidates.push(edge.point_at(s));
                    vertex_candidates.push(edge.point_at(s + l));
                }
            }
            edges.push(edge);
        }
    }

    // Cluster endpoint candidates into vertices and attach their
    // equidistant nearest-site sets.
    let mut vertices: Vec<SphericalVertex> = Vec::new();
    'candidates: for pos in vertex_candidates {
        for v in &vertices {
            if crate::geometry::euclidean(&v.position, &pos) < 1e-8 {
                continue 'candidates;
            }
        }
        let dists: Vec<f64> = sites
            .sites()
            .iter()
            .map(|s| pos.dot(s).clamp(-1.0, 1.0).acos())
            .collect();
        let best = dists.iter().cloned().fold(f64::INFINITY, f64::min);
        let incident: Vec<usize> = (0..n).filter(|&m| dists[m] <= best + 1e-7).collect();
        if incident.len() < 3 {
            continue;
        }
        // Cross-check with the classifier: the winner must be among the
        // incident sites, otherwise the endpoint was numerical debris.
        let (winner, _) = classify(DiagramMode::Geodesic, sites, &pos)?;
        if !incident.contains(&winner) {
            continue;
        }
        vertices.push(SphericalVertex {
            position: pos,
            sites: incident,
        });
    }

    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &edges {
        adjacency[e.sites.0].push(e.sites.1);
        adjacency[e.sites.1].push(e.sites.0);
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }

    Ok(SphericalDiagram {
        n_sites: n,
        edges,
        vertices,
        adjacency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::sample_sphere;
    use crate::testutil::random_pure;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pure(x: f64, y: f64, z: f64) -> BlochVector {
        BlochVector::new(x, y, z).unwrap()
    }

    #[test]
    fn antipodal_pair_gives_equator_and_no_vertices() {
        let sites = SiteSet::new(vec![pure(0.0, 0.0, 1.0), pure(0.0, 0.0, -1.0)]).unwrap();
        let d = spherical_diagram(&sites).unwrap();
        assert_eq!(d.edges.len(), 1);
        assert!(d.edges[0].is_full_circle());
        assert!(d.vertices.is_empty());
        assert_eq!(d.adjacency, vec![vec![1], vec![0]]);
        // Points on the edge sit on the equator.
        let p = d.edges[0].point_at(1.234);
        assert!(p.z().abs() < 1e-12);
    }

    #[test]
    fn tetrahedron_diagram_structure() {
        let s = 1.0 / 3.0f64.sqrt();
        let corners = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
        let sites = SiteSet::new(corners.iter().map(|c| pure(c[0], c[1], c[2])).collect()).unwrap();
        let d = spherical_diagram(&sites).unwrap();
        assert_eq!(d.edges.len(), 6);
        for (i, list) in d.adjacency.iter().enumerate() {
            let expect: Vec<usize> = (0..4).filter(|&j| j != i).collect();
            assert_eq!(list, &expect, "cell {i} adjacency");
        }
        // Four vertices at the antipodes of the sites, each equidistant to
        // the other three.
        assert_eq!(d.vertices.len(), 4, "vertices: {:?}", d.vertices);
        for v in &d.vertices {
            assert_eq!(v.sites.len(), 3);
            let anti = corners
                .iter()
                .map(|c| crate::geometry::euclidean(&v.position, &pure(-c[0], -c[1], -c[2])))
                .fold(f64::INFINITY, f64::min);
            assert!(
                anti < 1e-7,
                "vertex {:?} not at a site antipode",
                v.position
            );
        }
    }

    #[test]
    fn tetrahedron_adjacency_matches_brute_force_sampling() {
        let s = 1.0 / 3.0f64.sqrt();
        let sites = SiteSet::new(vec![
            pure(s, s, s),
            pure(s, -s, -s),
            pure(-s, s, -s),
            pure(-s, -s, s),
        ])
        .unwrap();
        let d = spherical_diagram(&sites).unwrap();

        // Brute force: classify a dense sample; neighboring samples with
        // different winners witness adjacency.
        let samples = sample_sphere(100_000, 0).unwrap();
        let winners: Vec<usize> = samples
            .iter()
            .map(|q| classify(DiagramMode::Geodesic, &sites, q).unwrap().0)
            .collect();
        let mut seen = std::collections::BTreeSet::new();
        for (a, qa) in samples.iter().enumerate() {
            for b in a + 1..samples.len().min(a + 200) {
                if winners[a] != winners[b] && crate::geometry::euclidean(qa, &samples[b]) < 0.03 {
                    let pair = (winners[a].min(winners[b]), winners[a].max(winners[b]));
                    seen.insert(pair);
                }
            }
        }
        let from_diagram: std::collections::BTreeSet<(usize, usize)> =
            d.edges.iter().map(|e| e.sites).collect();
        assert_eq!(seen, from_diagram);
    }

    #[test]
    fn three_sites_on_great_circle() {
        let sites = SiteSet::new(vec![
            pure(1.0, 0.0, 0.0),
            pure(-0.5, 3.0f64.sqrt() / 2.0, 0.0),
            pure(-0.5, -(3.0f64.sqrt()) / 2.0, 0.0),
        ])
        .unwrap();
        let d = spherical_diagram(&sites).unwrap();
        // Three lune-like cells, all mutually adjacent, two polar vertices.
        assert_eq!(d.edges.len(), 3);
        for list in &d.adjacency {
            assert_eq!(list.len(), 2);
        }
        assert_eq!(d.vertices.len(), 2, "vertices {:?}", d.vertices);
        for v in &d.vertices {
            assert!(v.position.z().abs() > 1.0 - 1e-9);
            assert_eq!(v.sites, vec![0, 1, 2]);
        }
        // Brute-force confirmation of the cell structure on a dense grid.
        let samples = sample_sphere(20_000, 3).unwrap();
        let mut counts = [0usize; 3];
        for q in &samples {
            counts[classify(DiagramMode::Geodesic, &sites, q).unwrap().0] += 1;
        }
        for c in counts {
            let frac = c as f64 / samples.len() as f64;
            assert!((frac - 1.0 / 3.0).abs() < 0.02, "cell fraction {frac}");
        }
    }

    #[test]
    fn vertices_verified_by_classifier_on_random_sites() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        for _ in 0..5 {
            let sites = SiteSet::new((0..7).map(|_| random_pure(&mut rng)).collect()).unwrap();
            let d = spherical_diagram(&sites).unwrap();
            assert!(!d.edges.is_empty());
            for v in &d.vertices {
                assert!(v.sites.len() >= 3);
                let (winner, _) = classify(DiagramMode::Geodesic, &sites, &v.position).unwrap();
                assert!(v.sites.contains(&winner));
                // Listed sites really are equidistant.
                let d0 = v.position.dot(sites.site(v.sites[0])).acos();
                for &m in &v.sites[1..] {
                    let dm = v.position.dot(sites.site(m)).acos();
                    assert!((dm - d0).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn rejects_single_site_and_mixed_sites() {
        let single = SiteSet::new(vec![pure(0.0, 0.0, 1.0)]).unwrap();
        assert!(matches!(
            spherical_diagram(&single),
            Err(Error::TooFewSites { count: 1 })
        ));
        let mixed = SiteSet::new(vec![
            pure(0.0, 0.0, 1.0),
            BlochVector::new(0.0, 0.0, 0.4).unwrap(),
        ])
        .unwrap();
        assert!(matches!(
            spherical_diagram(&mixed),
            Err(Error::ModeMisuse { .. })
        ));
    }

    #[test]
    fn edge_arcs_classify_to_their_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let sites = SiteSet::new((0..6).map(|_| random_pure(&mut rng)).collect()).unwrap();
        let d = spherical_diagram(&sites).unwrap();
        for e in &d.edges {
            for &(s, l) in &e.arcs {
                let mid = e.point_at(s + 0.5 * l);
                let (winner, _) = classify(DiagramMode::Geodesic, &sites, &mid).unwrap();
                assert!(
                    winner == e.sites.0 || winner == e.sites.1,
                    "edge {:?} midpoint classifies to {winner}",
                    e.sites
                );
            }
        }
    }
}

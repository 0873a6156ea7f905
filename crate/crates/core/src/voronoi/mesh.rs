//! Cell export: triangle meshes of the sphere with per-face site
//! ownership, as OFF text or a stereographic SVG picture.

use std::collections::BTreeMap;

use super::{classify_batch, DiagramMode, SiteSet};
use crate::error::{Error, Result};
use crate::state::{norm3, BlochVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Off,
    Svg,
}

impl ExportFormat {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "off" => Some(Self::Off),
            "svg" => Some(Self::Svg),
            _ => None,
        }
    }
}

/// A sphere triangulation with one owning site per face.
#[derive(Debug, Clone)]
pub struct CellMesh {
    pub vertices: Vec<[f64; 3]>,
    /// (corner indices, owning site).
    pub faces: Vec<([usize; 3], usize)>,
    pub n_sites: usize,
}

/// Subdivided icosahedron with 20 f^2 faces, deterministic ordering.
fn icosphere(frequency: usize) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let raw: [[f64; 3]; 12] = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let base: Vec<[f64; 3]> = raw
        .iter()
        .map(|v| {
            let n = norm3(*v);
            [v[0] / n, v[1] / n, v[2] / n]
        })
        .collect();
    let base_faces: [[usize; 3]; 20] = [
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    let f = frequency.max(1);
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut index: BTreeMap<[i64; 3], usize> = BTreeMap::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();

    let mut intern = |p: [f64; 3]| -> usize {
        let n = norm3(p);
        let q = [p[0] / n, p[1] / n, p[2] / n];
        let key = [
            (q[0] * 1e7).round() as i64,
            (q[1] * 1e7).round() as i64,
            (q[2] * 1e7).round() as i64,
        ];
        *index.entry(key).or_insert_with(|| {
            vertices.push(q);
            vertices.len() - 1
        })
    };

    for bf in base_faces {
        let (a, b, c) = (base[bf[0]], base[bf[1]], base[bf[2]]);
        let lattice = |i: usize, j: usize| -> [f64; 3] {
            let (wi, wj) = (i as f64 / f as f64, j as f64 / f as f64);
            let wa = 1.0 - wi - wj;
            [
                wa * a[0] + wi * b[0] + wj * c[0],
                wa * a[1] + wi * b[1] + wj * c[1],
                wa * a[2] + wi * b[2] + wj * c[2],
            ]
        };
        for i in 0..f {
            for j in 0..(f - i) {
                let v00 = intern(lattice(i, j));
                let v10 = intern(lattice(i + 1, j));
                let v01 = intern(lattice(i, j + 1));
                faces.push([v00, v10, v01]);
                if i + j < f - 1 {
                    let v11 = intern(lattice(i + 1, j + 1));
                    faces.push([v10, v11, v01]);
                }
            }
        }
    }
    (vertices, faces)
}

/// Triangulate the sphere and classify each face by its centroid.
/// `subdivisions` is the icosphere frequency (20 f^2 faces). Dual-mode
/// centroids are pulled to radius 0.999 where the divergence second
/// argument is defined; everything else is classified on the sphere.
pub fn build_cell_mesh(
    sites: &SiteSet,
    mode: DiagramMode,
    subdivisions: usize,
) -> Result<CellMesh> {
    if sites.is_empty() {
        return Err(Error::EmptySites);
    }
    let (vertices, faces) = icosphere(subdivisions);
    let queries: Vec<BlochVector> = faces
        .iter()
        .map(|f| {
            let mut c = [0.0f64; 3];
            for &vi in f {
                for k in 0..3 {
                    c[k] += vertices[vi][k] / 3.0;
                }
            }
            let n = norm3(c);
            let scale = if mode == DiagramMode::DivergenceDual {
                0.999 / n
            } else {
                1.0 / n
            };
            BlochVector::new_unchecked(c[0] * scale, c[1] * scale, c[2] * scale)
        })
        .collect();
    let assignment = classify_batch(mode, sites, &queries)?;
    let faces = faces
        .into_iter()
        .zip(assignment.entries)
        .map(|(f, e)| (f, e.site))
        .collect();
    Ok(CellMesh {
        vertices,
        faces,
        n_sites: sites.len(),
    })
}

impl CellMesh {
    /// Spherical face areas grouped by owning site (via L'Huilier on each
    /// triangle), normalized to the total sphere area.
    pub fn area_fractions(&self) -> Vec<f64> {
        let mut areas = vec![0.0f64; self.n_sites];
        for (f, site) in &self.faces {
            let (a, b, c) = (
                self.vertices[f[0]],
                self.vertices[f[1]],
                self.vertices[f[2]],
            );
            let ang = |p: [f64; 3], q: [f64; 3]| -> f64 {
                (p[0] * q[0] + p[1] * q[1] + p[2] * q[2])
                    .clamp(-1.0, 1.0)
                    .acos()
            };
            let (la, lb, lc) = (ang(b, c), ang(a, c), ang(a, b));
            let s = 0.5 * (la + lb + lc);
            let t = (s / 2.0).tan()
                * ((s - la) / 2.0).tan()
                * ((s - lb) / 2.0).tan()
                * ((s - lc) / 2.0).tan();
            areas[*site] += 4.0 * t.max(0.0).sqrt().atan();
        }
        let total: f64 = areas.iter().sum();
        areas.iter().map(|a| a / total).collect()
    }

    /// OFF text; each face line carries the owning site index as a
    /// trailing value.
    pub fn to_off(&self) -> String {
        let mut out = String::new();
        out.push_str("OFF\n");
        out.push_str("# per-face trailing value: owning site index\n");
        out.push_str(&format!("{} {} 0\n", self.vertices.len(), self.faces.len()));
        for v in &self.vertices {
            out.push_str(&format!(
                "{} {} {}\n",
                crate::fmt_sig12(v[0]),
                crate::fmt_sig12(v[1]),
                crate::fmt_sig12(v[2])
            ));
        }
        for (f, site) in &self.faces {
            out.push_str(&format!("3 {} {} {} {}\n", f[0], f[1], f[2], site));
        }
        out
    }

    /// Stereographic projection from (0, 0, 1): cells colored by site
    /// index, the unit circle marking the equator image. Faces projecting
    /// outside the viewport are dropped.
    pub fn to_svg(&self) -> String {
        const LIMIT: f64 = 3.0;
        let palette = [
            "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
            "#9c755f", "#bab0ac", "#1b9e77", "#7570b3",
        ];
        let project = |v: [f64; 3]| -> Option<(f64, f64)> {
            if v[2] > 0.995 {
                return None;
            }
            let d = 1.0 - v[2];
            let p = (v[0] / d, v[1] / d);
            if p.0.abs() > LIMIT || p.1.abs() > LIMIT {
                return None;
            }
            Some(p)
        };
        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
            -LIMIT,
            -LIMIT,
            2.0 * LIMIT,
            2.0 * LIMIT
        ));
        out.push_str("<rect x=\"-3\" y=\"-3\" width=\"6\" height=\"6\" fill=\"white\"/>\n");
        for (f, site) in &self.faces {
            let pts: Vec<(f64, f64)> = f
                .iter()
                .filter_map(|&vi| project(self.vertices[vi]))
                .collect();
            if pts.len() < 3 {
                continue;
            }
            let color = palette[site % palette.len()];
            out.push_str(&format!(
                "<polygon points=\"{:.4},{:.4} {:.4},{:.4} {:.4},{:.4}\" fill=\"{}\" stroke=\"none\"/>\n",
                pts[0].0, pts[0].1, pts[1].0, pts[1].1, pts[2].0, pts[2].1, color
            ));
        }
        out.push_str(
            "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"black\" stroke-width=\"0.01\"/>\n",
        );
        out.push_str("</svg>\n");
        out
    }
}

/// Export diagram cells in the requested format. Default mesh frequency 32
/// gives 20480 faces.
pub fn export_cells(
    sites: &SiteSet,
    mode: DiagramMode,
    subdivisions: usize,
    format: ExportFormat,
) -> Result<String> {
    let mesh = build_cell_mesh(sites, mode, subdivisions)?;
    Ok(match format {
        ExportFormat::Off => mesh.to_off(),
        ExportFormat::Svg => mesh.to_svg(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure(x: f64, y: f64, z: f64) -> BlochVector {
        BlochVector::new(x, y, z).unwrap()
    }

    #[test]
    fn icosphere_counts() {
        let (v, f) = icosphere(1);
        assert_eq!(v.len(), 12);
        assert_eq!(f.len(), 20);
        let (v, f) = icosphere(4);
        assert_eq!(f.len(), 20 * 16);
        // Euler characteristic of the sphere: V - E + F = 2, E = 3F/2.
        assert_eq!(v.len(), 2 + f.len() / 2);
        for p in v {
            assert!((norm3(p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_site_mesh_has_two_groups() {
        // Antipodal pair in generic position: axes aligned with the
        // icosphere's own mirror planes produce exact centroid ties that
        // all break toward site 0 and skew the split.
        let d = [0.48, 0.6, 0.64];
        let sites = SiteSet::new(vec![pure(d[0], d[1], d[2]), pure(-d[0], -d[1], -d[2])]).unwrap();
        let mesh = build_cell_mesh(&sites, DiagramMode::Geodesic, 8).unwrap();
        let mut seen = [false; 2];
        for (_, s) in &mesh.faces {
            seen[*s] = true;
        }
        assert!(seen[0] && seen[1]);
        let fractions = mesh.area_fractions();
        assert!((fractions[0] - 0.5).abs() < 0.01, "fractions {fractions:?}");
    }

    #[test]
    fn tetrahedron_mesh_groups_equal_area() {
        let s = 1.0 / 3.0f64.sqrt();
        let sites = SiteSet::new(vec![
            pure(s, s, s),
            pure(s, -s, -s),
            pure(-s, s, -s),
            pure(-s, -s, s),
        ])
        .unwrap();
        // Frequency 32 = 20480 faces.
        let mesh = build_cell_mesh(&sites, DiagramMode::Geodesic, 32).unwrap();
        assert_eq!(mesh.faces.len(), 20480);
        let fractions = mesh.area_fractions();
        assert_eq!(fractions.len(), 4);
        for f in fractions {
            assert!((f - 0.25).abs() < 0.005, "area fraction {f}");
        }
    }

    #[test]
    fn off_export_shape_and_determinism() {
        let sites = SiteSet::new(vec![pure(0.0, 0.0, 1.0), pure(1.0, 0.0, 0.0)]).unwrap();
        let a = export_cells(&sites, DiagramMode::Geodesic, 4, ExportFormat::Off).unwrap();
        let b = export_cells(&sites, DiagramMode::Geodesic, 4, ExportFormat::Off).unwrap();
        assert_eq!(a, b);
        let mut lines = a.lines();
        assert_eq!(lines.next(), Some("OFF"));
        let _comment = lines.next().unwrap();
        let counts = lines.next().unwrap();
        let parts: Vec<usize> = counts
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(parts[1], 20 * 16);
        // Every face line ends with a valid site index.
        for line in a.lines().skip(3 + parts[0]) {
            let toks: Vec<&str> = line.split_whitespace().collect();
            assert_eq!(toks.len(), 5);
            let site: usize = toks[4].parse().unwrap();
            assert!(site < 2);
        }
    }

    #[test]
    fn svg_export_basics() {
        let sites = SiteSet::new(vec![pure(0.0, 0.0, 1.0), pure(0.0, 0.0, -1.0)]).unwrap();
        let svg = export_cells(&sites, DiagramMode::Geodesic, 8, ExportFormat::Svg).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("<polygon"));
    }

    #[test]
    fn dual_mode_mesh_export_works() {
        let sites = SiteSet::new(vec![
            BlochVector::new(0.0, 0.0, 0.3).unwrap(),
            BlochVector::new(0.2, 0.0, -0.4).unwrap(),
        ])
        .unwrap();
        let mesh = build_cell_mesh(&sites, DiagramMode::DivergenceDual, 6).unwrap();
        assert_eq!(mesh.faces.len(), 20 * 36);
    }

    #[test]
    fn format_parse() {
        assert_eq!(ExportFormat::parse("off"), Some(ExportFormat::Off));
        assert_eq!(ExportFormat::parse("svg"), Some(ExportFormat::Svg));
        assert_eq!(ExportFormat::parse("obj"), None);
    }
}

//! Distances, divergences and Voronoi diagrams over 1-qubit quantum states
//! (the Bloch ball), and the Holevo capacity of 1-qubit affine channels as
//! a smallest enclosing divergence ball.
//!
//! The crate is organized around five areas:
//!
//! - [`state`]: exact state algebra: Bloch/matrix conversion, spectra,
//!   matrix logarithm, von Neumann entropy and the convex potential
//!   phi = -S.
//! - [`geometry`]: Fubini-Study, Bures, geodesic and Euclidean distances on
//!   pure states; the quantum divergence in matrix and closed form; the
//!   Legendre dual coordinate system in which divergence bisectors are
//!   affine.
//! - [`channels`]: 1-qubit channels as affine maps v -> Mv + b on Bloch
//!   coordinates, validated so the image ellipsoid stays inside the ball.
//! - [`voronoi`]: six nearest-site diagram modes over the ball and sphere,
//!   sections at radius 1 - epsilon, and diagram comparison.
//! - [`capacity`]: smallest enclosing divergence balls (exact, iterative
//!   and grid solvers) and the Holevo capacity of a channel via sphere
//!   sampling.
//!
//! All divergences and entropies are in nats; capacities are reported in
//! both nats and bits. The [`verify`] module packages the crate's property
//! suites for the CLI and the acceptance tests.

pub mod capacity;
pub mod channels;
pub mod error;
pub mod geometry;
pub mod state;
pub mod verify;
pub mod voronoi;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use state::{BlochVector, DensityMatrix};

/// Format a float with 12 significant digits, the crate-wide convention
/// for machine-readable text output.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // Trim trailing zeros but keep at least one digit after the point.
        if s.contains('.') {
            let t = s.trim_end_matches('0');
            let t = t.strip_suffix('.').unwrap_or(t);
            t.to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_sig12;

    #[test]
    fn fmt_sig12_examples() {
        assert_eq!(fmt_sig12(0.0), "0");
        assert_eq!(fmt_sig12(1.0), "1");
        assert_eq!(fmt_sig12(0.5), "0.5");
        assert_eq!(fmt_sig12(std::f64::consts::LN_2), "0.69314718056");
        assert_eq!(fmt_sig12(f64::INFINITY), "inf");
        assert_eq!(fmt_sig12(1.5e-9), "1.50000000000e-9");
        assert_eq!(fmt_sig12(-2.25), "-2.25");
    }
}

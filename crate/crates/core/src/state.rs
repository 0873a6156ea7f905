//! Exact 1-qubit state algebra on Bloch coordinates.
//!
//! A 1-qubit state is a 2x2 Hermitian, positive semi-definite, trace-1
//! matrix rho, parameterized by a point (x, y, z) of the closed unit ball:
//!
//! ```text
//! rho = (1/2) [[1 + z, x - iy], [x + iy, 1 - z]]
//! ```
//!
//! Points on the boundary sphere are pure states (rank 1), interior points
//! are mixed states (rank 2). All logarithms are natural; conversion to
//! bits happens only at reporting boundaries.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for accepting points on the closed unit ball.
pub const BALL_TOLERANCE: f64 = 1e-12;

/// States with radius above `1 - INTERIOR_GUARD` are rejected by operations
/// that need `log lambda_2` finite (matrix logarithm, divergence second
/// argument, dual coordinates).
pub const INTERIOR_GUARD: f64 = 1e-12;

/// A site or query counts as pure when its radius is within this tolerance
/// of 1.
pub const PURITY_TOLERANCE: f64 = 1e-9;

/// The canonical Euclidean norm routine. Every radius in the crate is
/// computed by this single function so that derived radii are reproducible
/// bit for bit.
#[inline]
pub fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[inline]
pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub(crate) fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// `artanh(r) / r`, the radial factor of the potential gradient, evaluated
/// by its Maclaurin series below 1e-4 to avoid 0/0 at the origin.
#[inline]
pub(crate) fn artanh_over_r(r: f64) -> f64 {
    if r < 1e-4 {
        let r2 = r * r;
        1.0 + r2 / 3.0 + r2 * r2 / 5.0
    } else {
        r.atanh() / r
    }
}

/// A point of the closed Bloch ball. Construction rejects points whose
/// radius exceeds 1 beyond [`BALL_TOLERANCE`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let r = norm3([x, y, z]);
        if !r.is_finite() || r > 1.0 + BALL_TOLERANCE {
            return Err(Error::OutOfBall { radius: r });
        }
        Ok(Self { x, y, z })
    }

    /// The maximally mixed state.
    pub const fn origin() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            z: 0.0,
        }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.z
    }

    #[inline]
    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Radius via the canonical norm routine.
    #[inline]
    pub fn radius(&self) -> f64 {
        norm3(self.coords())
    }

    /// Whether the state is pure within [`PURITY_TOLERANCE`].
    #[inline]
    pub fn is_pure(&self) -> bool {
        (self.radius() - 1.0).abs() <= PURITY_TOLERANCE
    }

    /// Whether operations requiring a finite `log lambda_2` accept this
    /// state as second argument.
    #[inline]
    pub fn is_interior(&self) -> bool {
        self.radius() <= 1.0 - INTERIOR_GUARD
    }

    #[inline]
    pub fn dot(&self, other: &BlochVector) -> f64 {
        dot3(self.coords(), other.coords())
    }

    /// Radially rescale onto radius at most `max_radius`. Used to keep
    /// candidate ball centers strictly inside the sphere.
    pub(crate) fn clamped_to_radius(&self, max_radius: f64) -> Self {
        let r = self.radius();
        if r <= max_radius {
            *self
        } else {
            let s = max_radius / r;
            Self {
                x: self.x * s,
                y: self.y * s,
                z: self.z * s,
            }
        }
    }

    /// Construct without the ball check. Callers guarantee the coordinates
    /// were produced from an in-ball point (scaling, clamping, channel
    /// application).
    pub(crate) fn new_unchecked(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// A 2x2 complex matrix stored row major.
pub type Matrix2 = [[Complex64; 2]; 2];

pub(crate) fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

#[cfg(test)]
pub(crate) fn mat_adjoint(a: &Matrix2) -> Matrix2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

pub(crate) fn mat_trace(a: &Matrix2) -> Complex64 {
    a[0][0] + a[1][1]
}

/// A density matrix: Hermitian, trace 1, positive semi-definite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    entries: Matrix2,
}

impl DensityMatrix {
    /// Validate and wrap raw entries. Hermiticity and unit trace are
    /// checked at 1e-14, eigenvalues at -1e-12.
    pub fn new(entries: Matrix2) -> Result<Self> {
        let herm_dev = (entries[1][0] - entries[0][1].conj())
            .norm()
            .max(entries[0][0].im.abs())
            .max(entries[1][1].im.abs());
        if herm_dev > 1e-14 {
            return Err(Error::NotHermitian {
                deviation: herm_dev,
            });
        }
        let trace = entries[0][0].re + entries[1][1].re;
        if (trace - 1.0).abs() > 1e-14 {
            return Err(Error::TraceNotOne { trace });
        }
        let rho = Self { entries };
        let r = rho.to_bloch_coords();
        let min_eig = (1.0 - norm3(r)) / 2.0;
        if min_eig < -1e-12 {
            return Err(Error::NotPositive {
                min_eigenvalue: min_eig,
            });
        }
        Ok(rho)
    }

    /// rho = (1/2)(I + x sigma_x + y sigma_y + z sigma_z).
    pub fn from_bloch(v: &BlochVector) -> Self {
        let (x, y, z) = (v.x(), v.y(), v.z());
        Self {
            entries: [
                [
                    Complex64::new((1.0 + z) / 2.0, 0.0),
                    Complex64::new(x / 2.0, -y / 2.0),
                ],
                [
                    Complex64::new(x / 2.0, y / 2.0),
                    Complex64::new((1.0 - z) / 2.0, 0.0),
                ],
            ],
        }
    }

    fn to_bloch_coords(&self) -> [f64; 3] {
        [
            2.0 * self.entries[1][0].re,
            2.0 * self.entries[1][0].im,
            self.entries[0][0].re - self.entries[1][1].re,
        ]
    }

    /// Inverse of the Bloch parameterization.
    pub fn to_bloch(&self) -> BlochVector {
        let [x, y, z] = self.to_bloch_coords();
        BlochVector::new_unchecked(x, y, z)
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i][j]
    }

    #[inline]
    pub fn entries(&self) -> &Matrix2 {
        &self.entries
    }
}

/// Eigenvalues of rho(x, y, z): ((1 + r)/2, (1 - r)/2).
pub fn eigenvalues(v: &BlochVector) -> (f64, f64) {
    let r = v.radius();
    ((1.0 + r) / 2.0, (1.0 - r) / 2.0)
}

/// Eigendecomposition rho = U diag(lambda1, lambda2) U*.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub lambda1: f64,
    pub lambda2: f64,
    pub unitary: Matrix2,
    /// Set when the spectrum is (1/2, 1/2); any basis diagonalizes rho and
    /// the identity is returned.
    pub degenerate: bool,
}

const IDENTITY2: Matrix2 = [
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
];

const SWAP2: Matrix2 = [
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
];

/// Diagonalize rho(v). The column for lambda1 = (1 + r)/2 always comes
/// first; for x = y = 0 the off-axis closed form is undefined and the
/// identity (z >= 0) or the basis swap (z < 0) is used instead.
pub fn spectral(v: &BlochVector) -> SpectralDecomposition {
    let r = v.radius();
    let (lambda1, lambda2) = eigenvalues(v);
    if r < 1e-15 {
        return SpectralDecomposition {
            lambda1,
            lambda2,
            unitary: IDENTITY2,
            degenerate: true,
        };
    }
    let (x, y, z) = (v.x(), v.y(), v.z());
    let s = (x * x + y * y).sqrt();
    let unitary = if s == 0.0 {
        if z >= 0.0 {
            IDENTITY2
        } else {
            SWAP2
        }
    } else {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let phase = Complex64::new(x / s, -y / s);
        let cp = ((r + z) / r).sqrt();
        let cm = ((r - z) / r).sqrt();
        [
            [phase * (inv_sqrt2 * cp), phase * (inv_sqrt2 * cm)],
            [
                Complex64::new(inv_sqrt2 * cm, 0.0),
                Complex64::new(-inv_sqrt2 * cp, 0.0),
            ],
        ]
    };
    SpectralDecomposition {
        lambda1,
        lambda2,
        unitary,
        degenerate: false,
    }
}

/// Matrix logarithm of rho(v) for strictly mixed states:
///
/// ```text
/// log rho = (1/2)(log lambda1 + log lambda2) I + artanh(r)/r (x sx + y sy + z sz)
/// ```
///
/// which equals U diag(log lambda1, log lambda2) U* entry for entry.
/// Rejects radii within [`INTERIOR_GUARD`] of the sphere, where
/// log lambda2 diverges.
pub fn log_density(v: &BlochVector) -> Result<Matrix2> {
    let r = v.radius();
    if r > 1.0 - INTERIOR_GUARD {
        return Err(Error::SingularLogarithm { radius: r });
    }
    let (lambda1, lambda2) = eigenvalues(v);
    let mean = 0.5 * (lambda1.ln() + lambda2.ln());
    // (log lambda1 - log lambda2) / (2 r) = artanh(r) / r, finite as r -> 0.
    let c = artanh_over_r(r);
    let (x, y, z) = (v.x(), v.y(), v.z());
    Ok([
        [
            Complex64::new(mean + c * z, 0.0),
            Complex64::new(c * x, -c * y),
        ],
        [
            Complex64::new(c * x, c * y),
            Complex64::new(mean - c * z, 0.0),
        ],
    ])
}

/// Von Neumann entropy in nats: the Shannon entropy of the eigenvalues,
/// with 0 log 0 = 0. Zero for pure states, log 2 at the center.
pub fn entropy(v: &BlochVector) -> f64 {
    -potential(v)
}

/// The convex potential phi = -S over the Bloch ball, in nats. Minimum
/// -log 2 at the origin, 0 on the sphere.
pub fn potential(v: &BlochVector) -> f64 {
    let (lambda1, lambda2) = eigenvalues(v);
    xlnx(lambda1) + xlnx(lambda2)
}

#[inline]
fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_in_ball, random_unit};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// exp(a I + b . sigma) = e^a (cosh|b| I + sinh|b|/|b| b . sigma)
    /// for Hermitian arguments; independent oracle for the log round trip.
    fn mat_exp_hermitian(m: &Matrix2) -> Matrix2 {
        let a = 0.5 * (m[0][0].re + m[1][1].re);
        let b = [m[1][0].re, m[1][0].im, 0.5 * (m[0][0].re - m[1][1].re)];
        let n = norm3(b);
        let (cosh, sinhc) = if n < 1e-12 {
            (1.0, 1.0)
        } else {
            (n.cosh(), n.sinh() / n)
        };
        let ea = a.exp();
        [
            [
                Complex64::new(ea * (cosh + sinhc * b[2]), 0.0),
                Complex64::new(ea * sinhc * b[0], -ea * sinhc * b[1]),
            ],
            [
                Complex64::new(ea * sinhc * b[0], ea * sinhc * b[1]),
                Complex64::new(ea * (cosh - sinhc * b[2]), 0.0),
            ],
        ]
    }

    fn mat_max_dev(a: &Matrix2, b: &Matrix2) -> f64 {
        let mut max = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                max = max.max((a[i][j] - b[i][j]).norm());
            }
        }
        max
    }

    #[test]
    fn from_bloch_reference_points() {
        let center = DensityMatrix::from_bloch(&BlochVector::origin());
        assert_eq!(center.entry(0, 0), Complex64::new(0.5, 0.0));
        assert_eq!(center.entry(1, 1), Complex64::new(0.5, 0.0));
        assert_eq!(center.entry(0, 1), Complex64::new(0.0, 0.0));

        let plus_x = DensityMatrix::from_bloch(&BlochVector::new(1.0, 0.0, 0.0).unwrap());
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(plus_x.entry(i, j), Complex64::new(0.5, 0.0));
            }
        }

        let up = DensityMatrix::from_bloch(&BlochVector::new(0.0, 0.0, 1.0).unwrap());
        assert_eq!(up.entry(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(up.entry(1, 1), Complex64::new(0.0, 0.0));
        assert_eq!(up.entry(0, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn to_bloch_reference_points() {
        let center = DensityMatrix::from_bloch(&BlochVector::origin()).to_bloch();
        assert_eq!(center.coords(), [0.0, 0.0, 0.0]);

        let up = DensityMatrix::new([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
        ])
        .unwrap()
        .to_bloch();
        assert_eq!(up.coords(), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn construction_rejects_out_of_ball() {
        assert!(matches!(
            BlochVector::new(1.0, 1.0, 1.0),
            Err(Error::OutOfBall { .. })
        ));
        assert!(BlochVector::new(0.0, 0.0, 1.0 + 5e-13).is_ok());
        assert!(BlochVector::new(0.0, 0.0, 1.0 + 1e-11).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        let bad_herm = DensityMatrix::new([
            [Complex64::new(0.5, 0.0), Complex64::new(0.1, 0.0)],
            [Complex64::new(0.2, 0.0), Complex64::new(0.5, 0.0)],
        ]);
        assert!(matches!(bad_herm, Err(Error::NotHermitian { .. })));

        let bad_trace = DensityMatrix::new([
            [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
        ]);
        assert!(matches!(bad_trace, Err(Error::TraceNotOne { .. })));

        let bad_psd = DensityMatrix::new([
            [Complex64::new(1.2, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(-0.2, 0.0)],
        ]);
        assert!(matches!(bad_psd, Err(Error::NotPositive { .. })));
    }

    #[test]
    fn round_trip_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut max_err = 0.0f64;
        for _ in 0..10_000 {
            let v = random_in_ball(&mut rng);
            let back = DensityMatrix::from_bloch(&v).to_bloch();
            max_err = max_err
                .max((back.x() - v.x()).abs())
                .max((back.y() - v.y()).abs())
                .max((back.z() - v.z()).abs());
        }
        assert!(max_err < 1e-14, "round trip error {max_err}");
    }

    #[test]
    fn eigenvalue_reference_points() {
        assert_eq!(eigenvalues(&BlochVector::origin()), (0.5, 0.5));
        assert_eq!(
            eigenvalues(&BlochVector::new(0.0, 0.0, 1.0).unwrap()),
            (1.0, 0.0)
        );
        let (l1, l2) = eigenvalues(&BlochVector::new(0.0, 0.0, 0.5).unwrap());
        assert!((l1 - 0.75).abs() < 1e-15);
        assert!((l2 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn eigenvalues_sum_to_one_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10_000 {
            let v = random_in_ball(&mut rng);
            let (l1, l2) = eigenvalues(&v);
            assert_eq!(l1 + l2, 1.0);
            assert!(l1 >= l2);
        }
    }

    #[test]
    fn spectral_diagonal_case() {
        let d = spectral(&BlochVector::new(0.0, 0.0, 0.9).unwrap());
        assert!(!d.degenerate);
        assert_eq!(d.unitary, IDENTITY2);
        assert!((d.lambda1 - 0.95).abs() < 1e-15);
        assert!((d.lambda2 - 0.05).abs() < 1e-15);

        let down = spectral(&BlochVector::new(0.0, 0.0, -0.9).unwrap());
        assert_eq!(down.unitary, SWAP2);
        assert!((down.lambda1 - 0.95).abs() < 1e-15);
    }

    #[test]
    fn spectral_degenerate_center() {
        let d = spectral(&BlochVector::origin());
        assert!(d.degenerate);
        assert_eq!(d.lambda1, 0.5);
        assert_eq!(d.lambda2, 0.5);
        assert_eq!(d.unitary, IDENTITY2);
    }

    #[test]
    fn spectral_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut max_err = 0.0f64;
        for _ in 0..10_000 {
            let v = random_in_ball(&mut rng);
            let d = spectral(&v);
            let lam = [
                [Complex64::new(d.lambda1, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(d.lambda2, 0.0)],
            ];
            let rebuilt = mat_mul(&mat_mul(&d.unitary, &lam), &mat_adjoint(&d.unitary));
            let rho = DensityMatrix::from_bloch(&v);
            max_err = max_err.max(mat_max_dev(&rebuilt, rho.entries()));

            // U U* = I
            let uu = mat_mul(&d.unitary, &mat_adjoint(&d.unitary));
            max_err = max_err.max(mat_max_dev(&uu, &IDENTITY2));
        }
        assert!(max_err < 1e-12, "spectral reconstruction error {max_err}");
    }

    #[test]
    fn spectral_matches_displayed_closed_form() {
        // Off-axis states: U is (1/sqrt2) times
        // [ (x-iy)/s sqrt((r+z)/r),  (x-iy)/s sqrt((r-z)/r) ]
        // [ sqrt((r-z)/r),          -sqrt((r+z)/r)          ].
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let v = random_in_ball(&mut rng);
            let (x, y, z) = (v.x(), v.y(), v.z());
            let s = (x * x + y * y).sqrt();
            if s < 1e-6 {
                continue;
            }
            let r = v.radius();
            let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
            let phase = Complex64::new(x / s, -y / s);
            let expected: Matrix2 = [
                [
                    phase * (inv_sqrt2 * ((r + z) / r).sqrt()),
                    phase * (inv_sqrt2 * ((r - z) / r).sqrt()),
                ],
                [
                    Complex64::new(inv_sqrt2 * ((r - z) / r).sqrt(), 0.0),
                    Complex64::new(-inv_sqrt2 * ((r + z) / r).sqrt(), 0.0),
                ],
            ];
            let got = spectral(&v).unitary;
            assert!(mat_max_dev(&got, &expected) < 1e-14);
        }
    }

    #[test]
    fn spectral_oblique_reconstruction() {
        let c = 0.9 / 3.0f64.sqrt();
        let v = BlochVector::new(c, c, c).unwrap();
        let d = spectral(&v);
        let lam = [
            [Complex64::new(d.lambda1, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(d.lambda2, 0.0)],
        ];
        let rebuilt = mat_mul(&mat_mul(&d.unitary, &lam), &mat_adjoint(&d.unitary));
        assert!(mat_max_dev(&rebuilt, DensityMatrix::from_bloch(&v).entries()) < 1e-12);
    }

    #[test]
    fn log_density_reference_points() {
        let center = log_density(&BlochVector::origin()).unwrap();
        let expected = 0.5f64.ln();
        assert!((center[0][0].re - expected).abs() < 1e-15);
        assert!((center[1][1].re - expected).abs() < 1e-15);
        assert!(center[0][1].norm() < 1e-15);

        let half = log_density(&BlochVector::new(0.0, 0.0, 0.5).unwrap()).unwrap();
        assert!((half[0][0].re - 0.75f64.ln()).abs() < 1e-14);
        assert!((half[1][1].re - 0.25f64.ln()).abs() < 1e-14);
        assert!(half[0][1].norm() < 1e-15);
    }

    #[test]
    fn log_density_matches_paperform_expansion() {
        // The explicit (1/2r)[...] expansion, valid for r > 0.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let dir = random_unit(&mut rng);
            let r = 0.1 + 0.89 * rng.gen::<f64>();
            let v = BlochVector::new(dir[0] * r, dir[1] * r, dir[2] * r).unwrap();
            let got = log_density(&v).unwrap();

            let rr = v.radius();
            let (l1, l2) = eigenvalues(&v);
            let (ln1, ln2) = (l1.ln(), l2.ln());
            let (x, y, z) = (v.x(), v.y(), v.z());
            let expansion: Matrix2 = [
                [
                    Complex64::new(((rr + z) * ln1 + (rr - z) * ln2) / (2.0 * rr), 0.0),
                    Complex64::new(x, -y) * ((ln1 - ln2) / (2.0 * rr)),
                ],
                [
                    Complex64::new(x, y) * ((ln1 - ln2) / (2.0 * rr)),
                    Complex64::new(((rr - z) * ln1 + (rr + z) * ln2) / (2.0 * rr), 0.0),
                ],
            ];
            assert!(mat_max_dev(&got, &expansion) < 1e-12);
        }
    }

    #[test]
    fn log_density_exp_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut max_err = 0.0f64;
        for _ in 0..10_000 {
            let dir = random_unit(&mut rng);
            let r = 0.999 * rng.gen::<f64>();
            let v = BlochVector::new(dir[0] * r, dir[1] * r, dir[2] * r).unwrap();
            let log = log_density(&v).unwrap();
            let back = mat_exp_hermitian(&log);
            max_err = max_err.max(mat_max_dev(&back, DensityMatrix::from_bloch(&v).entries()));
        }
        assert!(max_err < 1e-10, "exp(log rho) error {max_err}");

        // Spot check close to the sphere.
        let v = BlochVector::new(0.0, 0.99, 0.0).unwrap();
        let back = mat_exp_hermitian(&log_density(&v).unwrap());
        assert!(mat_max_dev(&back, DensityMatrix::from_bloch(&v).entries()) < 1e-10);
    }

    #[test]
    fn log_density_rejects_near_pure() {
        let v = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            log_density(&v),
            Err(Error::SingularLogarithm { .. })
        ));
        let near = BlochVector::new(0.0, 0.0, 1.0 - 1e-13).unwrap();
        assert!(log_density(&near).is_err());
    }

    #[test]
    fn entropy_reference_points() {
        assert_eq!(entropy(&BlochVector::new(0.0, 0.0, 1.0).unwrap()), 0.0);
        assert!((entropy(&BlochVector::origin()) - std::f64::consts::LN_2).abs() < 1e-15);
        let expected = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert!((entropy(&BlochVector::new(0.0, 0.0, 0.5).unwrap()) - expected).abs() < 1e-15);
    }

    #[test]
    fn entropy_concave_on_segments() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..2000 {
            let a = random_in_ball(&mut rng);
            let b = random_in_ball(&mut rng);
            let mid = BlochVector::new(
                (a.x() + b.x()) / 2.0,
                (a.y() + b.y()) / 2.0,
                (a.z() + b.z()) / 2.0,
            )
            .unwrap();
            assert!(entropy(&mid) >= 0.5 * (entropy(&a) + entropy(&b)) - 1e-12);
        }
    }

    #[test]
    fn potential_reference_and_symmetry() {
        assert!((potential(&BlochVector::origin()) + std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(potential(&BlochVector::new(1.0, 0.0, 0.0).unwrap()), 0.0);

        // phi depends on the radius only.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let v = random_in_ball(&mut rng);
            let r = v.radius();
            let dir = random_unit(&mut rng);
            let rotated = BlochVector::new(dir[0] * r, dir[1] * r, dir[2] * r).unwrap();
            assert!((potential(&v) - potential(&rotated)).abs() < 1e-14);
        }
    }
}

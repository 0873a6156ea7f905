//! Distances and divergences between 1-qubit states, and the Legendre dual
//! coordinate system of the potential phi = -S.
//!
//! The quantum (Umegaki) divergence D(rho||sigma) = Tr rho (log rho - log sigma)
//! is the Bregman divergence of phi on Bloch coordinates. Two independent
//! evaluation routes are provided: [`divergence_matrix`] works through the
//! spectral matrix logarithm, [`divergence_closed`] through the closed form
//!
//! ```text
//! D(rho||sigma) = Tr(rho log rho) - (1/2) log((1 - r~^2)/4)
//!                 - (artanh r~ / r~) (x x~ + y y~ + z z~)
//! ```
//!
//! where (x~, y~, z~) and r~ belong to the second argument. Their agreement
//! is one of the crate's acceptance gates.
//!
//! The gradient map v |-> grad phi(v) sends the open ball onto all of R^3.
//! In the image ("dual") coordinates the divergence becomes affine in the
//! second argument, which is what makes equi-divergence loci linear and
//! Voronoi bisectors flat.

use crate::error::{Error, Result};
use crate::state::{
    artanh_over_r, dot3, eigenvalues, mat_mul, mat_trace, norm3, potential, spectral,
    BlochVector, DensityMatrix, Matrix2, INTERIOR_GUARD, PURITY_TOLERANCE,
};

/// The Legendre image (u, v, w) = grad phi of an interior Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualCoordinates {
    u: f64,
    v: f64,
    w: f64,
}

impl DualCoordinates {
    pub fn new(u: f64, v: f64, w: f64) -> Result<Self> {
        if !(u.is_finite() && v.is_finite() && w.is_finite()) {
            return Err(Error::NonFiniteDual);
        }
        Ok(Self { u, v, w })
    }

    pub const fn origin() -> Self {
        Self {
            u: 0.0,
            v: 0.0,
            w: 0.0,
        }
    }

    #[inline]
    pub fn u(&self) -> f64 {
        self.u
    }

    #[inline]
    pub fn v(&self) -> f64 {
        self.v
    }

    #[inline]
    pub fn w(&self) -> f64 {
        self.w
    }

    #[inline]
    pub fn components(&self) -> [f64; 3] {
        [self.u, self.v, self.w]
    }

    /// Magnitude s = |(u, v, w)|, via the canonical norm routine.
    #[inline]
    pub fn magnitude(&self) -> f64 {
        norm3(self.components())
    }

    pub(crate) fn from_components(c: [f64; 3]) -> Self {
        Self {
            u: c[0],
            v: c[1],
            w: c[2],
        }
    }
}

/// A nonnegative divergence in nats. Values within 1e-12 below zero are
/// rounded up to 0; anything more negative is preserved so that property
/// tests can catch it.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DivergenceValue {
    nats: f64,
}

impl DivergenceValue {
    pub(crate) fn new(nats: f64) -> Self {
        let nats = if nats < 0.0 && nats >= -1e-12 {
            0.0
        } else {
            nats
        };
        Self { nats }
    }

    #[inline]
    pub fn nats(&self) -> f64 {
        self.nats
    }

    #[inline]
    pub fn bits(&self) -> f64 {
        self.nats / std::f64::consts::LN_2
    }
}

impl From<DivergenceValue> for f64 {
    fn from(d: DivergenceValue) -> f64 {
        d.nats
    }
}

/// Tr(rho sigma) = (1/2)(1 + a . b), valid for every pair of 1-qubit states.
pub fn trace_inner(a: &BlochVector, b: &BlochVector) -> f64 {
    0.5 * (1.0 + a.dot(b))
}

fn require_pure(v: &BlochVector) -> Result<()> {
    let r = v.radius();
    if (r - 1.0).abs() > PURITY_TOLERANCE {
        return Err(Error::PureStateRequired { radius: r });
    }
    Ok(())
}

/// Fubini-Study distance between pure states: arccos sqrt(Tr rho sigma),
/// in [0, pi/2]. Equals half the central angle on the sphere.
pub fn fubini_study(a: &BlochVector, b: &BlochVector) -> Result<f64> {
    require_pure(a)?;
    require_pure(b)?;
    let t = trace_inner(a, b).clamp(0.0, 1.0);
    Ok(t.sqrt().acos())
}

/// Bures distance between pure states: sqrt(1 - Tr rho sigma).
///
/// On unit Bloch vectors this equals sin(theta/2), i.e. half the Euclidean
/// chord length. (The convention sqrt(2 (1 - Tr rho sigma)) found in some
/// texts instead gives chord/sqrt(2); either is a strictly increasing
/// function of the chord, so nearest-site diagrams are unaffected.)
pub fn bures(a: &BlochVector, b: &BlochVector) -> Result<f64> {
    require_pure(a)?;
    require_pure(b)?;
    let t = trace_inner(a, b).clamp(0.0, 1.0);
    Ok((1.0 - t).sqrt())
}

/// Central angle between unit Bloch vectors, in [0, pi].
pub fn geodesic(a: &BlochVector, b: &BlochVector) -> Result<f64> {
    require_pure(a)?;
    require_pure(b)?;
    Ok(a.dot(b).clamp(-1.0, 1.0).acos())
}

/// Three-dimensional Euclidean distance |a - b|.
pub fn euclidean(a: &BlochVector, b: &BlochVector) -> f64 {
    norm3(sub3_coords(a, b))
}

fn sub3_coords(a: &BlochVector, b: &BlochVector) -> [f64; 3] {
    [a.x() - b.x(), a.y() - b.y(), a.z() - b.z()]
}

fn require_interior_second(b: &BlochVector) -> Result<f64> {
    let r = b.radius();
    if r > 1.0 - INTERIOR_GUARD {
        return Err(Error::DivergenceUndefined { radius: r });
    }
    Ok(r)
}

/// Matrix logarithm assembled from the eigendecomposition itself:
/// U diag(log lambda1, log lambda2) U*. Shares nothing with the closed
/// form beyond the eigenvalues, so the two divergence routes stay
/// independent.
fn log_via_spectral(v: &BlochVector) -> Matrix2 {
    let d = spectral(v);
    let (l1, l2) = (d.lambda1.ln(), d.lambda2.ln());
    let u = d.unitary;
    let mut out = [[num_complex::Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = u[i][0] * l1 * u[j][0].conj() + u[i][1] * l2 * u[j][1].conj();
        }
    }
    out
}

/// Quantum divergence via spectral matrix logarithms:
/// D = Tr(rho log rho) - Tr(rho log sigma), with each logarithm built as
/// U diag(log lambda) U*. The first argument may be pure (0 log 0 = 0);
/// the second must be interior.
pub fn divergence_matrix(a: &BlochVector, b: &BlochVector) -> Result<DivergenceValue> {
    require_interior_second(b)?;
    let rho = DensityMatrix::from_bloch(a);
    let log_sigma = log_via_spectral(b);
    let cross = mat_trace(&mat_mul(rho.entries(), &log_sigma)).re;
    let self_term = if a.radius() <= 1.0 - INTERIOR_GUARD {
        let log_rho = log_via_spectral(a);
        mat_trace(&mat_mul(rho.entries(), &log_rho)).re
    } else {
        // Pure or nearly pure first argument: Tr(rho log rho) through the
        // eigenvalue sum, where the vanishing eigenvalue contributes 0.
        neg_entropy_term(a)
    };
    Ok(DivergenceValue::new(self_term - cross))
}

/// Tr(rho log rho) = sum lambda_i log lambda_i with 0 log 0 = 0.
fn neg_entropy_term(a: &BlochVector) -> f64 {
    let (l1, l2) = eigenvalues(a);
    let mut t = 0.0;
    if l1 > 0.0 {
        t += l1 * l1.ln();
    }
    if l2 > 0.0 {
        t += l2 * l2.ln();
    }
    t
}

/// Quantum divergence through the closed form. Agrees with
/// [`divergence_matrix`] to 1e-10 and extends continuously to the origin
/// (second argument at the center contributes log 2).
pub fn divergence_closed(a: &BlochVector, b: &BlochVector) -> Result<DivergenceValue> {
    let rb = require_interior_second(b)?;
    let self_term = neg_entropy_term(a);
    // -1/2 log((1 - r~^2)/4) = log 2 - (log1p(r~) + log1p(-r~)) / 2
    let log_term = std::f64::consts::LN_2 - 0.5 * (rb.ln_1p() + (-rb).ln_1p());
    let coeff = artanh_over_r(rb);
    Ok(DivergenceValue::new(
        self_term + log_term - coeff * a.dot(b),
    ))
}

/// Dual coordinates grad phi(v) = (artanh(r)/r) (x, y, z). Diverges on the
/// sphere; inputs within [`INTERIOR_GUARD`] of it are rejected.
pub fn grad_potential(v: &BlochVector) -> Result<DualCoordinates> {
    let r = v.radius();
    if r > 1.0 - INTERIOR_GUARD {
        return Err(Error::DualDiverges { radius: r });
    }
    let c = artanh_over_r(r);
    Ok(DualCoordinates::from_components([
        c * v.x(),
        c * v.y(),
        c * v.z(),
    ]))
}

/// Inverse of the gradient map: r = tanh(s) along the same direction.
pub fn inverse_grad(d: &DualCoordinates) -> BlochVector {
    let s = d.magnitude();
    if s < 1e-300 {
        return BlochVector::origin();
    }
    let scale = s.tanh() / s;
    BlochVector::new_unchecked(d.u() * scale, d.v() * scale, d.w() * scale)
}

/// Convex conjugate phi*(u, v, w) = log(2 cosh s), s = |(u, v, w)|,
/// evaluated in overflow-safe form s + log1p(exp(-2s)). The Fenchel
/// identity phi(v) + phi*(grad phi(v)) = v . grad phi(v) pins it down and
/// is enforced by the verification suite.
pub fn conjugate_potential(d: &DualCoordinates) -> f64 {
    let s = d.magnitude();
    s + (-2.0 * s).exp().ln_1p()
}

/// Divergence in mixed representation: the first argument in Bloch
/// coordinates, the second as dual coordinates d = grad phi(b):
///
/// ```text
/// D(a || b) = phi(a) + phi*(d) - a . d
/// ```
pub fn divergence_dual(a: &BlochVector, d: &DualCoordinates) -> DivergenceValue {
    let value = potential(a) + conjugate_potential(d) - dot3(a.coords(), d.components());
    DivergenceValue::new(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::entropy;
    use crate::testutil::{
        random_in_ball, random_pure, random_rotation, random_with_radius_up_to, rotate,
    };
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};

    #[test]
    fn trace_inner_reference_pairs() {
        let up = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let down = BlochVector::new(0.0, 0.0, -1.0).unwrap();
        let x = BlochVector::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(trace_inner(&up, &down), 0.0);
        assert_eq!(trace_inner(&up, &up), 1.0);
        assert_eq!(trace_inner(&up, &x), 0.5);
        assert_eq!(trace_inner(&x, &up), 0.5);
    }

    #[test]
    fn trace_inner_matches_matrix_product_for_mixed_states() {
        // The (1 + a.b)/2 expression holds for every state pair, not just
        // pure ones; Tr(rho sigma) via explicit matrix product is the
        // oracle.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..1000 {
            let a = random_in_ball(&mut rng);
            let b = random_in_ball(&mut rng);
            let product = crate::state::mat_mul(
                DensityMatrix::from_bloch(&a).entries(),
                DensityMatrix::from_bloch(&b).entries(),
            );
            let trace = (product[0][0] + product[1][1]).re;
            assert!((trace_inner(&a, &b) - trace).abs() < 1e-15);
        }
    }

    #[test]
    fn dual_divergence_convex_in_dual_argument() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..1000 {
            let a = random_in_ball(&mut rng);
            let d1 = grad_potential(&random_with_radius_up_to(&mut rng, 0.99)).unwrap();
            let d2 = grad_potential(&random_with_radius_up_to(&mut rng, 0.99)).unwrap();
            let mid = DualCoordinates::new(
                0.5 * (d1.u() + d2.u()),
                0.5 * (d1.v() + d2.v()),
                0.5 * (d1.w() + d2.w()),
            )
            .unwrap();
            let lhs = divergence_dual(&a, &mid).nats();
            let rhs = 0.5 * (divergence_dual(&a, &d1).nats() + divergence_dual(&a, &d2).nats());
            assert!(lhs <= rhs + 1e-12, "not convex: {lhs} > {rhs}");
        }
    }

    #[test]
    fn fubini_study_reference_pairs() {
        let up = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let down = BlochVector::new(0.0, 0.0, -1.0).unwrap();
        let x = BlochVector::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(fubini_study(&up, &up).unwrap(), 0.0);
        assert!((fubini_study(&up, &down).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((fubini_study(&up, &x).unwrap() - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn pure_state_distances_reject_mixed_input() {
        let mixed = BlochVector::new(0.0, 0.0, 0.5).unwrap();
        let up = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            fubini_study(&mixed, &up),
            Err(Error::PureStateRequired { .. })
        ));
        assert!(matches!(
            bures(&up, &mixed),
            Err(Error::PureStateRequired { .. })
        ));
        assert!(matches!(
            geodesic(&mixed, &mixed),
            Err(Error::PureStateRequired { .. })
        ));
    }

    #[test]
    fn bures_reference_pairs_and_chord_identity() {
        let up = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let down = BlochVector::new(0.0, 0.0, -1.0).unwrap();
        assert_eq!(bures(&up, &up).unwrap(), 0.0);
        assert!((bures(&up, &down).unwrap() - 1.0).abs() < 1e-15);

        // sqrt((1 - cos theta)/2) = chord / 2
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a = random_pure(&mut rng);
            let b = random_pure(&mut rng);
            let db = bures(&a, &b).unwrap();
            let de = euclidean(&a, &b);
            assert!(
                (db - de / 2.0).abs() < 1e-12,
                "db {db} vs de/2 {}",
                de / 2.0
            );
        }
    }

    #[test]
    fn geodesic_euclidean_reference_pairs() {
        let up = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let down = BlochVector::new(0.0, 0.0, -1.0).unwrap();
        assert!((geodesic(&up, &down).unwrap() - PI).abs() < 1e-15);
        assert_eq!(euclidean(&up, &down), 2.0);
        assert_eq!(geodesic(&up, &up).unwrap(), 0.0);
        assert_eq!(euclidean(&up, &up), 0.0);
    }

    #[test]
    fn fubini_study_is_half_geodesic() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let a = random_pure(&mut rng);
            let b = random_pure(&mut rng);
            let theta = geodesic(&a, &b).unwrap();
            let dfs = fubini_study(&a, &b).unwrap();
            assert!((theta - 2.0 * dfs).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_distances_sort_identically() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let pairs: Vec<_> = (0..1000)
            .map(|_| (random_pure(&mut rng), random_pure(&mut rng)))
            .collect();
        let order = |vals: Vec<f64>| {
            let mut idx: Vec<usize> = (0..vals.len()).collect();
            idx.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
            idx
        };
        let fs = order(
            pairs
                .iter()
                .map(|(a, b)| fubini_study(a, b).unwrap())
                .collect(),
        );
        let bu = order(pairs.iter().map(|(a, b)| bures(a, b).unwrap()).collect());
        let ge = order(pairs.iter().map(|(a, b)| geodesic(a, b).unwrap()).collect());
        let eu = order(pairs.iter().map(|(a, b)| euclidean(a, b)).collect());
        assert_eq!(fs, bu);
        assert_eq!(fs, ge);
        assert_eq!(fs, eu);
    }

    #[test]
    fn divergence_reference_values() {
        let p = BlochVector::new(0.0, 0.0, 0.3).unwrap();
        assert_eq!(divergence_matrix(&p, &p).unwrap().nats(), 0.0);
        assert_eq!(divergence_closed(&p, &p).unwrap().nats(), 0.0);

        let up = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let origin = BlochVector::origin();
        assert!((divergence_matrix(&up, &origin).unwrap().nats() - LN_2).abs() < 1e-14);
        assert!((divergence_closed(&up, &origin).unwrap().nats() - LN_2).abs() < 1e-14);
    }

    #[test]
    fn divergence_rejects_pure_second_argument() {
        let up = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let origin = BlochVector::origin();
        assert!(matches!(
            divergence_matrix(&origin, &up),
            Err(Error::DivergenceUndefined { .. })
        ));
        assert!(matches!(
            divergence_closed(&origin, &up),
            Err(Error::DivergenceUndefined { .. })
        ));
    }

    #[test]
    fn closed_form_matches_matrix_form() {
        let a = BlochVector::new(0.0, 0.0, 0.5).unwrap();
        let b = BlochVector::new(0.0, 0.0, -0.5).unwrap();
        let dm = divergence_matrix(&a, &b).unwrap().nats();
        let dc = divergence_closed(&a, &b).unwrap().nats();
        assert!((dm - dc).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut max_dev = 0.0f64;
        for _ in 0..10_000 {
            let a = random_in_ball(&mut rng);
            let b = random_with_radius_up_to(&mut rng, 0.999);
            let dm = divergence_matrix(&a, &b).unwrap().nats();
            let dc = divergence_closed(&a, &b).unwrap().nats();
            max_dev = max_dev.max((dm - dc).abs());
        }
        assert!(max_dev < 1e-10, "max closed-vs-matrix deviation {max_dev}");
    }

    #[test]
    fn divergence_nonnegative_and_faithful() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..20_000 {
            let a = random_in_ball(&mut rng);
            let b = random_with_radius_up_to(&mut rng, 0.999);
            let d = divergence_closed(&a, &b).unwrap().nats();
            assert!(d >= 0.0, "negative divergence {d}");
            if d < 1e-10 {
                assert!(euclidean(&a, &b) < 1e-4);
            }
        }
    }

    #[test]
    fn tangent_plane_identity() {
        // D(a||b) is the vertical gap between phi(a) and the tangent plane
        // of the phi graph at b.
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let mut max_dev = 0.0f64;
        for _ in 0..10_000 {
            let a = random_in_ball(&mut rng);
            let b = random_with_radius_up_to(&mut rng, 0.999);
            let d = divergence_closed(&a, &b).unwrap().nats();
            let g = grad_potential(&b).unwrap();
            let plane = potential(&b) + dot3(g.components(), sub3_coords(&a, &b));
            max_dev = max_dev.max((d - (potential(&a) - plane)).abs());
        }
        assert!(max_dev < 1e-10, "tangent plane deviation {max_dev}");
    }

    #[test]
    fn divergence_rotationally_covariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..2000 {
            let a = random_in_ball(&mut rng);
            let b = random_with_radius_up_to(&mut rng, 0.99);
            let rot = random_rotation(&mut rng);
            let d0 = divergence_closed(&a, &b).unwrap().nats();
            let d1 = divergence_closed(&rotate(&rot, &a), &rotate(&rot, &b))
                .unwrap()
                .nats();
            assert!((d0 - d1).abs() < 1e-10);
        }
    }

    #[test]
    fn divergence_is_asymmetric() {
        let a = BlochVector::new(0.0, 0.0, 0.1).unwrap();
        let b = BlochVector::new(0.0, 0.0, 0.9).unwrap();
        let fwd = divergence_closed(&a, &b).unwrap().nats();
        let rev = divergence_closed(&b, &a).unwrap().nats();
        assert!((fwd - rev).abs() > 0.01, "divergence looks symmetric");
    }

    #[test]
    fn grad_reference_points() {
        let g0 = grad_potential(&BlochVector::origin()).unwrap();
        assert_eq!(g0.components(), [0.0, 0.0, 0.0]);

        let g = grad_potential(&BlochVector::new(0.0, 0.0, 0.5).unwrap()).unwrap();
        assert!(g.u().abs() < 1e-15 && g.v().abs() < 1e-15);
        assert!((g.w() - 0.5 * 3.0f64.ln()).abs() < 1e-15);

        let pure = BlochVector::new(1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            grad_potential(&pure),
            Err(Error::DualDiverges { .. })
        ));
    }

    #[test]
    fn grad_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let h = 1e-5;
        for _ in 0..1000 {
            let v = random_with_radius_up_to(&mut rng, 0.95);
            let g = grad_potential(&v).unwrap();
            let c = v.coords();
            let mut fd = [0.0f64; 3];
            for k in 0..3 {
                let mut plus = c;
                let mut minus = c;
                plus[k] += h;
                minus[k] -= h;
                let vp = BlochVector::new(plus[0], plus[1], plus[2]).unwrap();
                let vm = BlochVector::new(minus[0], minus[1], minus[2]).unwrap();
                fd[k] = (potential(&vp) - potential(&vm)) / (2.0 * h);
            }
            let scale = norm3(g.components()).max(1e-3);
            for k in 0..3 {
                assert!(
                    (fd[k] - g.components()[k]).abs() / scale < 1e-6,
                    "finite difference mismatch at {:?}: {:?} vs {:?}",
                    c,
                    fd,
                    g.components()
                );
            }
        }
    }

    #[test]
    fn inverse_grad_reference_and_round_trip() {
        assert_eq!(
            inverse_grad(&DualCoordinates::origin()).coords(),
            [0.0, 0.0, 0.0]
        );

        let d = DualCoordinates::new(0.0, 0.0, 0.5 * 3.0f64.ln()).unwrap();
        let v = inverse_grad(&d);
        assert!((v.z() - 0.5).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let mut max_err = 0.0f64;
        for _ in 0..10_000 {
            let v = random_with_radius_up_to(&mut rng, 0.999);
            let back = inverse_grad(&grad_potential(&v).unwrap());
            max_err = max_err.max(euclidean(&v, &back));
        }
        assert!(max_err < 1e-10, "grad round trip error {max_err}");
    }

    #[test]
    fn conjugate_reference_and_fenchel_identity() {
        assert!((conjugate_potential(&DualCoordinates::origin()) - 2.0f64.ln()).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let mut max_err = 0.0f64;
        for _ in 0..10_000 {
            let v = random_with_radius_up_to(&mut rng, 0.999);
            let g = grad_potential(&v).unwrap();
            let gap = potential(&v) + conjugate_potential(&g) - dot3(v.coords(), g.components());
            max_err = max_err.max(gap.abs());
        }
        assert!(max_err < 1e-10, "Fenchel identity error {max_err}");
    }

    #[test]
    fn conjugate_asymptote_decreases_to_zero() {
        let mut prev = f64::INFINITY;
        for k in 1..40 {
            let s = 0.5 * k as f64;
            let d = DualCoordinates::new(s, 0.0, 0.0).unwrap();
            let gap = conjugate_potential(&d) - s;
            // log(2 cosh s) - s = log1p(exp(-2s)): nonincreasing to 0,
            // reaching it once the tail drops below the ulp of s.
            assert!(gap >= 0.0 && gap <= prev);
            prev = gap;
        }
        assert!(prev < 1e-14);
    }

    #[test]
    fn dual_divergence_reference_points() {
        let a = BlochVector::new(0.2, -0.1, 0.4).unwrap();
        let d = grad_potential(&a).unwrap();
        assert!(divergence_dual(&a, &d).nats().abs() < 1e-12);

        let up = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        assert!((divergence_dual(&up, &DualCoordinates::origin()).nats() - LN_2).abs() < 1e-14);
    }

    #[test]
    fn dual_divergence_matches_matrix_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut max_dev = 0.0f64;
        for _ in 0..10_000 {
            let a = random_in_ball(&mut rng);
            let b = random_with_radius_up_to(&mut rng, 0.999);
            let d = grad_potential(&b).unwrap();
            let dd = divergence_dual(&a, &d).nats();
            let dm = divergence_matrix(&a, &b).unwrap().nats();
            max_dev = max_dev.max((dd - dm).abs());
        }
        assert!(max_dev < 1e-10, "dual-vs-matrix deviation {max_dev}");
    }

    #[test]
    fn entropy_and_potential_are_negatives() {
        let v = BlochVector::new(0.3, 0.2, -0.4).unwrap();
        assert_eq!(entropy(&v), -potential(&v));
    }
}

//! Smallest enclosing divergence balls and Holevo capacity.
//!
//! The Holevo capacity of a 1-qubit channel is the radius of the smallest
//! ball, in quantum divergence, enclosing the image of the Bloch sphere:
//!
//! ```text
//! C(Gamma) = inf_theta sup_rho D(Gamma(rho) || Gamma(theta))
//! ```
//!
//! Plotting enough sphere points and enclosing their images approximates
//! the capacity arbitrarily well. All minimization happens in dual
//! coordinates u = grad phi(center), where each point's divergence
//!
//! ```text
//! f_i(u) = phi(p_i) + phi*(u) - p_i . u
//! ```
//!
//! is convex in u and differs between points by an affine function, so
//! equi-divergence loci are linear and the exact solver reduces to small
//! linear systems. Three solvers are provided and cross-checked: a
//! combinatorial exact solver over support subsets, a subgradient descent
//! on the minimax objective, and a grid-plus-refinement oracle that knows
//! nothing about duality.

use crate::channels::AffineChannel;
use crate::error::{Error, Result};
use crate::geometry::{divergence_closed, inverse_grad, DualCoordinates};
use crate::state::{dot3, norm3, potential, scale3, sub3, BlochVector};

/// Candidate centers are kept at radius <= 1 - 1e-12, where the divergence
/// second argument stays valid.
const CENTER_CLAMP: f64 = 1.0 - 1e-12;

/// Points attaining the radius within this band are support candidates.
const SUPPORT_BAND: f64 = 1e-9;

/// A smallest enclosing divergence ball: center (Bloch and dual
/// coordinates), radius in nats, and a support certificate of at most four
/// point indices. At the optimum the center lies in the convex hull of the
/// support points.
#[derive(Debug, Clone)]
pub struct EnclosingBall {
    pub center: BlochVector,
    pub center_dual: DualCoordinates,
    pub radius: f64,
    pub support: Vec<usize>,
}

/// Result of a capacity computation.
#[derive(Debug, Clone)]
pub struct CapacityReport {
    pub label: String,
    pub n_samples: usize,
    pub capacity_nats: f64,
    pub capacity_bits: f64,
    pub center: [f64; 3],
    pub support: Vec<usize>,
    /// Agreement gap between the iterative radius and an exact re-solve on
    /// the support neighborhood.
    pub solver_gap: f64,
}

impl CapacityReport {
    /// Serialize with the crate's 12-significant-digit float convention.
    pub fn to_json(&self) -> String {
        let f = crate::fmt_sig12;
        let support: Vec<String> = self.support.iter().map(|i| i.to_string()).collect();
        format!(
            "{{\"label\": \"{}\", \"n_samples\": {}, \"capacity_nats\": {}, \"capacity_bits\": {}, \"center\": [{}, {}, {}], \"support\": [{}], \"solver_gap\": {}}}",
            self.label,
            self.n_samples,
            f(self.capacity_nats),
            f(self.capacity_bits),
            f(self.center[0]),
            f(self.center[1]),
            f(self.center[2]),
            support.join(", "),
            f(self.solver_gap),
        )
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Deterministic low-discrepancy sphere sample: a Fibonacci lattice whose
/// azimuthal phase is derived from the seed. The covering radius shrinks
/// as O(1/sqrt(n)).
pub fn sample_sphere(n: usize, seed: u64) -> Result<Vec<BlochVector>> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: 0.0,
        });
    }
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    let phase = splitmix64(seed) as f64 / u64::MAX as f64 * std::f64::consts::TAU;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
        let rho = (1.0 - z * z).max(0.0).sqrt();
        let theta = golden * i as f64 + phase;
        out.push(BlochVector::new(rho * theta.cos(), rho * theta.sin(), z)?);
    }
    Ok(out)
}

/// Point data shared by the solvers: Bloch coordinates plus the potential
/// phi(p_i), which is finite even at purity.
struct Prepared {
    coords: Vec<[f64; 3]>,
    phis: Vec<f64>,
}

impl Prepared {
    fn new(points: &[BlochVector]) -> Self {
        Self {
            coords: points.iter().map(|p| p.coords()).collect(),
            phis: points.iter().map(potential).collect(),
        }
    }

    fn len(&self) -> usize {
        self.coords.len()
    }

    /// phi*(u) evaluated overflow-safe.
    fn conjugate(u: [f64; 3]) -> f64 {
        let s = norm3(u);
        s + (-2.0 * s).exp().ln_1p()
    }

    /// max_i f_i(u) together with the attaining index.
    fn objective(&self, u: [f64; 3]) -> (f64, usize) {
        let conj = Self::conjugate(u);
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for i in 0..self.len() {
            let v = self.phis[i] + conj - dot3(self.coords[i], u);
            if v > best {
                best = v;
                arg = i;
            }
        }
        (best, arg)
    }

    /// Divergence values of every point against dual center u.
    fn values(&self, u: [f64; 3]) -> Vec<f64> {
        let conj = Self::conjugate(u);
        (0..self.len())
            .map(|i| self.phis[i] + conj - dot3(self.coords[i], u))
            .collect()
    }
}

/// grad phi*(u) = tanh(s)/s u: the Bloch center for a dual iterate.
fn dual_to_bloch(u: [f64; 3]) -> [f64; 3] {
    let s = norm3(u);
    if s < 1e-300 {
        return [0.0, 0.0, 0.0];
    }
    scale3(u, s.tanh() / s)
}

fn grad_clamped(coords: [f64; 3]) -> [f64; 3] {
    let v =
        BlochVector::new_unchecked(coords[0], coords[1], coords[2]).clamped_to_radius(CENTER_CLAMP);
    let r = v.radius();
    let c = crate::state::artanh_over_r(r);
    scale3(v.coords(), c)
}

/// A solved support-subset candidate: the dual center satisfying the
/// equi-divergence equations, the common divergence value, and the convex
/// weights placing the Bloch center inside the subset hull.
struct SubsetCandidate {
    u: [f64; 3],
    value: f64,
    weights: Vec<f64>,
}

fn solve2(a: [[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1e-300);
    if det.abs() < 1e-13 * scale * scale {
        return None;
    }
    Some([
        (b[0] * a[1][1] - b[1] * a[0][1]) / det,
        (a[0][0] * b[1] - a[1][0] * b[0]) / det,
    ])
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let mut pivot = col;
        for row in col + 1..3 {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < 1e-13 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0f64; 3];
    for col in (0..3).rev() {
        let mut s = b[col];
        for k in col + 1..3 {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

/// Solve the equi-divergence system of one subset of 1 to 4 points
/// together with the hull condition grad phi*(u) in conv(subset).
fn solve_subset(prep: &Prepared, subset: &[usize]) -> Option<SubsetCandidate> {
    let pts: Vec<[f64; 3]> = subset.iter().map(|&i| prep.coords[i]).collect();
    let phis: Vec<f64> = subset.iter().map(|&i| prep.phis[i]).collect();
    match subset.len() {
        1 => {
            let u = grad_clamped(pts[0]);
            let value = phis[0] + Prepared::conjugate(u) - dot3(pts[0], u);
            Some(SubsetCandidate {
                u,
                value,
                weights: vec![1.0],
            })
        }
        2 => {
            // Center on the segment mu p + (1 - mu) q; the equi-divergence
            // residual g(mu) brackets a root: g(0) = D(p||q) >= 0 and
            // g(1) = -D(q||p) <= 0.
            let (p, q) = (pts[0], pts[1]);
            let g = |mu: f64| {
                let x = [
                    mu * p[0] + (1.0 - mu) * q[0],
                    mu * p[1] + (1.0 - mu) * q[1],
                    mu * p[2] + (1.0 - mu) * q[2],
                ];
                let u = grad_clamped(x);
                dot3(sub3(q, p), u) - (phis[1] - phis[0])
            };
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let (glo, ghi) = (g(lo), g(hi));
            if !(glo >= -1e-12 && ghi <= 1e-12) {
                return None;
            }
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if g(mid) >= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mu = 0.5 * (lo + hi);
            let x = [
                mu * p[0] + (1.0 - mu) * q[0],
                mu * p[1] + (1.0 - mu) * q[1],
                mu * p[2] + (1.0 - mu) * q[2],
            ];
            let u = grad_clamped(x);
            let conj = Prepared::conjugate(u);
            let v0 = phis[0] + conj - dot3(p, u);
            let v1 = phis[1] + conj - dot3(q, u);
            Some(SubsetCandidate {
                u,
                value: v0.max(v1),
                weights: vec![mu, 1.0 - mu],
            })
        }
        3 => {
            let e1 = sub3(pts[1], pts[0]);
            let e2 = sub3(pts[2], pts[0]);
            let b = [phis[1] - phis[0], phis[2] - phis[0]];
            // Least-norm particular solution of the two linear
            // equi-divergence equations; the solution line runs along the
            // triangle normal.
            let gram = [[dot3(e1, e1), dot3(e1, e2)], [dot3(e1, e2), dot3(e2, e2)]];
            let lambda = solve2(gram, b)?;
            let u0 = [
                lambda[0] * e1[0] + lambda[1] * e2[0],
                lambda[0] * e1[1] + lambda[1] * e2[1],
                lambda[0] * e1[2] + lambda[1] * e2[2],
            ];
            let n = crate::state::cross3(e1, e2);
            let nn = norm3(n);
            if nn < 1e-12 {
                return None;
            }
            let nhat = scale3(n, 1.0 / nn);
            // Root of h(t): the Bloch image of u0 + t nhat crosses the
            // plane of the three points.
            let h = |t: f64| {
                let u = [
                    u0[0] + t * nhat[0],
                    u0[1] + t * nhat[1],
                    u0[2] + t * nhat[2],
                ];
                dot3(n, sub3(dual_to_bloch(u), pts[0]))
            };
            let t_max = 16.0;
            let steps = 320;
            let mut roots = Vec::new();
            let mut prev_t = -t_max;
            let mut prev_h = h(prev_t);
            for k in 1..=steps {
                let t = -t_max + 2.0 * t_max * k as f64 / steps as f64;
                let ht = h(t);
                if prev_h == 0.0 || prev_h.signum() != ht.signum() {
                    let (mut lo, mut hi) = (prev_t, t);
                    let mut hlo = prev_h;
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        let hm = h(mid);
                        if hm == 0.0 || hm.signum() == hlo.signum() {
                            lo = mid;
                            hlo = hm;
                        } else {
                            hi = mid;
                        }
                    }
                    roots.push(0.5 * (lo + hi));
                }
                prev_t = t;
                prev_h = ht;
            }
            let mut best: Option<SubsetCandidate> = None;
            for t in roots {
                let u = [
                    u0[0] + t * nhat[0],
                    u0[1] + t * nhat[1],
                    u0[2] + t * nhat[2],
                ];
                let x = dual_to_bloch(u);
                let d = sub3(x, pts[0]);
                let rhs = [dot3(e1, d), dot3(e2, d)];
                let Some(ab) = solve2(gram, rhs) else {
                    continue;
                };
                let w = vec![1.0 - ab[0] - ab[1], ab[0], ab[1]];
                if w.iter().any(|&wi| wi < -1e-7) {
                    continue;
                }
                let conj = Prepared::conjugate(u);
                let value = (0..3)
                    .map(|i| phis[i] + conj - dot3(pts[i], u))
                    .fold(f64::NEG_INFINITY, f64::max);
                if best.as_ref().map_or(true, |b| value < b.value) {
                    best = Some(SubsetCandidate {
                        u,
                        value,
                        weights: w,
                    });
                }
            }
            best
        }
        4 => {
            let rows = [
                sub3(pts[1], pts[0]),
                sub3(pts[2], pts[0]),
                sub3(pts[3], pts[0]),
            ];
            let b = [phis[1] - phis[0], phis[2] - phis[0], phis[3] - phis[0]];
            let u = solve3(rows, b)?;
            if norm3(u) > 20.0 {
                return None;
            }
            let x = dual_to_bloch(u);
            let cols = [
                sub3(pts[1], pts[0]),
                sub3(pts[2], pts[0]),
                sub3(pts[3], pts[0]),
            ];
            let m = [
                [cols[0][0], cols[1][0], cols[2][0]],
                [cols[0][1], cols[1][1], cols[2][1]],
                [cols[0][2], cols[1][2], cols[2][2]],
            ];
            let abc = solve3(m, sub3(x, pts[0]))?;
            let w = vec![1.0 - abc[0] - abc[1] - abc[2], abc[0], abc[1], abc[2]];
            if w.iter().any(|&wi| wi < -1e-7) {
                return None;
            }
            let conj = Prepared::conjugate(u);
            let value = (0..4)
                .map(|i| phis[i] + conj - dot3(pts[i], u))
                .fold(f64::NEG_INFINITY, f64::max);
            Some(SubsetCandidate {
                u,
                value,
                weights: w,
            })
        }
        _ => None,
    }
}

/// Lawson-Hanson nonnegative least squares for the 4 x m system
/// [p_x; p_y; p_z; 1] mu = [center; 1]. The passive set never exceeds four
/// columns, so the solution is automatically a <= 4-point certificate.
fn nnls_support(columns: &[[f64; 4]], target: [f64; 4]) -> (Vec<usize>, Vec<f64>, f64) {
    let m = columns.len();
    let mut mu = vec![0.0f64; m];
    let mut passive: Vec<usize> = Vec::new();
    let residual = |mu: &[f64]| {
        let mut r = target;
        for (j, col) in columns.iter().enumerate() {
            if mu[j] != 0.0 {
                for k in 0..4 {
                    r[k] -= col[k] * mu[j];
                }
            }
        }
        r
    };
    for _outer in 0..200 {
        let r = residual(&mu);
        // Gradient of the objective: pick the most improving inactive column.
        let mut best_j = None;
        let mut best_w = 1e-12;
        for (j, col) in columns.iter().enumerate() {
            if passive.contains(&j) {
                continue;
            }
            let w: f64 = (0..4).map(|k| col[k] * r[k]).sum();
            if w > best_w {
                best_w = w;
                best_j = Some(j);
            }
        }
        let Some(j) = best_j else { break };
        passive.push(j);
        loop {
            // Unconstrained least squares on the passive set via normal
            // equations (at most 4 x 4).
            let p = passive.len();
            let mut gram = vec![vec![0.0f64; p]; p];
            let mut rhs = vec![0.0f64; p];
            for a in 0..p {
                for bb in 0..p {
                    gram[a][bb] = (0..4)
                        .map(|k| columns[passive[a]][k] * columns[passive[bb]][k])
                        .sum();
                }
                rhs[a] = (0..4).map(|k| columns[passive[a]][k] * target[k]).sum();
            }
            let z = match solve_dense(&mut gram, &mut rhs) {
                Some(z) => z,
                None => {
                    passive.pop();
                    break;
                }
            };
            if z.iter().all(|&zi| zi > 1e-12) {
                for (a, &idx) in passive.iter().enumerate() {
                    mu[idx] = z[a];
                }
                break;
            }
            // Step toward z until the first coefficient hits zero, then
            // drop it from the passive set.
            let mut alpha = 1.0f64;
            for (a, &idx) in passive.iter().enumerate() {
                if z[a] <= 1e-12 {
                    let denom = mu[idx] - z[a];
                    if denom > 1e-300 {
                        alpha = alpha.min(mu[idx] / denom);
                    }
                }
            }
            for (a, &idx) in passive.iter().enumerate() {
                mu[idx] += alpha * (z[a] - mu[idx]);
            }
            let before = passive.len();
            passive.retain(|&idx| mu[idx] > 1e-12);
            for idx in 0..m {
                if !passive.contains(&idx) {
                    mu[idx] = 0.0;
                }
            }
            if passive.len() == before {
                // Numerical stagnation; accept current iterate.
                break;
            }
        }
    }
    let r = residual(&mu);
    let support: Vec<usize> = passive.into_iter().filter(|&j| mu[j] > 1e-12).collect();
    let weights: Vec<f64> = support.iter().map(|&j| mu[j]).collect();
    (support, weights, norm3([r[0], r[1], r[2]]).hypot(r[3]))
}

fn solve_dense(gram: &mut [Vec<f64>], rhs: &mut [f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if gram[row][col].abs() > gram[pivot][col].abs() {
                pivot = row;
            }
        }
        if gram[pivot][col].abs() < 1e-14 {
            return None;
        }
        gram.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let f = gram[row][col] / gram[col][col];
            for k in col..n {
                gram[row][k] -= f * gram[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for col in (0..n).rev() {
        let mut s = rhs[col];
        for k in col + 1..n {
            s -= gram[col][k] * x[k];
        }
        x[col] = s / gram[col][col];
    }
    Some(x)
}

/// Pick a <= 4-point support certificate among the points attaining the
/// radius: express the center as a convex combination of band points. When
/// the hull condition cannot be met (non-optimal center), fall back to the
/// top attaining points.
fn extract_support(prep: &Prepared, values: &[f64], radius: f64, center: [f64; 3]) -> Vec<usize> {
    let band: Vec<usize> = (0..prep.len())
        .filter(|&i| values[i] >= radius - SUPPORT_BAND)
        .collect();
    if band.len() <= 1 {
        return band;
    }
    let columns: Vec<[f64; 4]> = band
        .iter()
        .map(|&i| {
            let c = prep.coords[i];
            [c[0], c[1], c[2], 1.0]
        })
        .collect();
    let (sup, _w, resid) = nnls_support(&columns, [center[0], center[1], center[2], 1.0]);
    if resid <= 1e-6 && !sup.is_empty() {
        let mut out: Vec<usize> = sup.into_iter().map(|j| band[j]).collect();
        out.sort_unstable();
        out.truncate(4);
        return out;
    }
    let mut ranked = band;
    ranked.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
    ranked.truncate(4);
    ranked.sort_unstable();
    ranked
}

/// Residual of expressing the center as a convex combination of the given
/// support points: the optimality-certificate quantity. Zero (up to
/// rounding) at a true optimum.
pub fn hull_distance(points: &[BlochVector], support: &[usize], center: &BlochVector) -> f64 {
    if support.is_empty() {
        return f64::INFINITY;
    }
    let columns: Vec<[f64; 4]> = support
        .iter()
        .map(|&i| {
            let c = points[i].coords();
            [c[0], c[1], c[2], 1.0]
        })
        .collect();
    let c = center.coords();
    let (_s, _w, resid) = nnls_support(&columns, [c[0], c[1], c[2], 1.0]);
    resid
}

fn ball_from_dual(prep: &Prepared, u: [f64; 3]) -> EnclosingBall {
    let values = prep.values(u);
    let radius = values
        .iter()
        .fold(f64::NEG_INFINITY, |m, &v| m.max(v))
        .max(0.0);
    let center_dual = DualCoordinates::from_components(u);
    let center = inverse_grad(&center_dual);
    let support = extract_support(prep, &values, radius, center.coords());
    EnclosingBall {
        center,
        center_dual,
        radius,
        support,
    }
}

fn degenerate_ball(points: &[BlochVector]) -> EnclosingBall {
    let p = points[0].clamped_to_radius(CENTER_CLAMP);
    EnclosingBall {
        center: p,
        center_dual: DualCoordinates::from_components(grad_clamped(p.coords())),
        radius: 0.0,
        support: vec![0],
    }
}

fn all_coincident(points: &[BlochVector]) -> bool {
    points
        .iter()
        .all(|p| crate::geometry::euclidean(p, &points[0]) <= 1e-12)
}

/// Exact smallest enclosing divergence ball by support-subset enumeration.
///
/// Every subset of 1 to 4 points yields a linear equi-divergence system in
/// dual coordinates; a candidate is feasible when the center falls in the
/// subset hull and no other point exceeds the common value. A feasible
/// candidate is a certified global optimum. Beyond 16 points, probing plus
/// violation augmentation keeps the subset enumeration small.
pub fn meb_exact(points: &[BlochVector]) -> Result<EnclosingBall> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let prep = Prepared::new(points);
    if all_coincident(points) {
        return Ok(degenerate_ball(points));
    }
    let n = prep.len();
    if n <= 16 {
        return Ok(exact_enumerate(&prep, &(0..n).collect::<Vec<_>>()));
    }
    // Farthest-point filtering: probe dual directions to collect points on
    // the lifted upper envelope, then augment with any violated point.
    let mut active: Vec<usize> = Vec::new();
    let mut probe_dirs = vec![[0.0, 0.0, 0.0]];
    let probes = sample_sphere(26, 1).expect("probe sampling");
    for p in &probes {
        probe_dirs.push(scale3(p.coords(), 2.0));
    }
    for dir in probe_dirs {
        let (_, arg) = prep.objective(dir);
        if !active.contains(&arg) {
            active.push(arg);
        }
    }
    for _round in 0..32 {
        active.sort_unstable();
        let ball = exact_enumerate(&prep, &active);
        let u = ball.center_dual.components();
        let (worst, arg) = prep.objective(u);
        if worst <= ball.radius + 1e-10 || active.contains(&arg) {
            let values = prep.values(u);
            let support =
                extract_support(&prep, &values, worst.max(ball.radius), ball.center.coords());
            return Ok(EnclosingBall {
                radius: worst.max(ball.radius).max(0.0),
                support,
                ..ball
            });
        }
        active.push(arg);
    }
    Ok(exact_enumerate(&prep, &(0..n).collect::<Vec<_>>()))
}

fn exact_enumerate(prep: &Prepared, indices: &[usize]) -> EnclosingBall {
    let m = indices.len();
    let mut feasible: Option<(f64, [f64; 3], Vec<usize>)> = None;
    let mut fallback: Option<(f64, [f64; 3], Vec<usize>)> = None;

    let mut consider = |subset: &[usize]| {
        let Some(cand) = solve_subset(prep, subset) else {
            return;
        };
        let (max_all, _) = prep.objective(cand.u);
        let entry = (max_all, cand.u, subset.to_vec());
        if fallback.as_ref().map_or(true, |f| max_all < f.0) {
            fallback = Some(entry.clone());
        }
        let attains = max_all <= cand.value + 1e-9;
        let hull_ok = cand.weights.iter().all(|&w| w >= -1e-7);
        if attains && hull_ok && feasible.as_ref().map_or(true, |f| max_all < f.0) {
            feasible = Some(entry);
        }
    };

    for a in 0..m {
        consider(&[indices[a]]);
        for b in a + 1..m {
            consider(&[indices[a], indices[b]]);
            for c in b + 1..m {
                consider(&[indices[a], indices[b], indices[c]]);
                for d in c + 1..m {
                    consider(&[indices[a], indices[b], indices[c], indices[d]]);
                }
            }
        }
    }

    let (_, u, _subset) = feasible
        .or(fallback)
        .expect("subset enumeration yields at least the singleton candidates");
    ball_from_dual(prep, u)
}

/// Smallest enclosing ball by subgradient descent on the dual minimax
/// objective, with Polyak-style steps toward an adaptive target and
/// periodic exact re-solves of the active support subset (which also
/// supply certified lower bounds). Stops when the radius improves by less
/// than tol/10 over 50 iterations or the bound gap closes below tol.
pub fn meb_iterative(points: &[BlochVector], tol: f64, max_iter: usize) -> Result<EnclosingBall> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if tol <= 0.0 {
        return Err(Error::ParameterOutOfRange {
            name: "tol",
            value: tol,
        });
    }
    let prep = Prepared::new(points);
    if all_coincident(points) {
        return Ok(degenerate_ball(points));
    }
    let n = prep.len();

    let centroid = {
        let mut c = [0.0f64; 3];
        for p in &prep.coords {
            for k in 0..3 {
                c[k] += p[k];
            }
        }
        scale3(c, 1.0 / n as f64)
    };
    let mut u = grad_clamped(centroid);
    let (g0, far0) = prep.objective(u);
    let mut best_val = g0;
    let mut best_u = u;
    let mut lower = 0.0f64;

    // Seed the lower bound with two-point subproblems around the farthest
    // point; any subset's optimal value bounds the full problem from below.
    {
        let opposite = prep.objective(grad_clamped(prep.coords[far0])).1;
        for pair in [[far0, opposite]] {
            if pair[0] != pair[1] {
                if let Some(c) = solve_subset(&prep, &pair) {
                    lower = lower.max(c.value - 1e-12);
                    let (val, _) = prep.objective(c.u);
                    if val < best_val {
                        best_val = val;
                        best_u = c.u;
                    }
                }
            }
        }
    }

    let u_cap = CENTER_CLAMP.atanh();
    let mut delta = (best_val - lower).max(tol);
    let mut stall = 0usize;
    let mut converged = false;
    for iter in 0..max_iter {
        if best_val - lower <= tol {
            converged = true;
            break;
        }
        if iter % 20 == 0 {
            // Exact re-solve of the current active set: a jump candidate
            // and a certified lower bound.
            let values = prep.values(best_u);
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
            let active: Vec<usize> = order.into_iter().take(4.min(n)).collect();
            for size in 2..=active.len() {
                let subset = &active[..size];
                if let Some(cand) = solve_subset(&prep, subset) {
                    let hull_ok = cand.weights.iter().all(|&w| w >= -1e-7);
                    if hull_ok {
                        lower = lower.max(cand.value - 1e-12);
                    }
                    let (val, _) = prep.objective(cand.u);
                    if val < best_val {
                        best_val = val;
                        best_u = cand.u;
                        u = cand.u;
                        stall = 0;
                    }
                }
            }
            if best_val - lower <= tol {
                converged = true;
                break;
            }
        }

        let (gk, far) = prep.objective(u);
        if gk < best_val - tol / 10.0 {
            best_val = gk;
            best_u = u;
            stall = 0;
        } else {
            stall += 1;
        }
        if stall >= 50 {
            if delta <= tol / 10.0 {
                converged = true;
                break;
            }
            delta /= 2.0;
            stall = 0;
        }

        let grad = sub3(dual_to_bloch(u), prep.coords[far]);
        let gn2 = dot3(grad, grad);
        if gn2 < 1e-28 {
            converged = true;
            break;
        }
        let target = lower.max(best_val - delta);
        let mut step = (gk - target) / gn2;
        let max_step = 2.0 / gn2.sqrt();
        if step > max_step {
            step = max_step;
        }
        if step <= 0.0 {
            step = tol / gn2.sqrt();
        }
        u = sub3(u, scale3(grad, step));
        let s = norm3(u);
        if s > u_cap {
            u = scale3(u, u_cap / s);
        }
    }

    let ball = ball_from_dual(&prep, best_u);
    if converged || best_val - lower <= tol {
        Ok(ball)
    } else {
        Err(Error::SolverStalled {
            iterations: max_iter,
            partial: Box::new(ball),
        })
    }
}

/// Brute-force oracle: evaluate the max-divergence objective on a radial
/// grid of interior centers (resolution^3 cells, radius <= 1 - 1e-6), then
/// refine the best cell with a Nelder-Mead simplex. Upper-bounds the true
/// radius by construction and knows nothing about dual coordinates.
pub fn meb_grid(points: &[BlochVector], resolution: usize) -> Result<EnclosingBall> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if resolution < 8 {
        return Err(Error::ParameterOutOfRange {
            name: "resolution",
            value: resolution as f64,
        });
    }
    let prep = Prepared::new(points);
    if all_coincident(points) {
        return Ok(degenerate_ball(points));
    }
    let r_max = 1.0 - 1e-6;
    let objective = |c: [f64; 3]| -> f64 {
        if norm3(c) > r_max {
            return f64::INFINITY;
        }
        let center = BlochVector::new_unchecked(c[0], c[1], c[2]);
        let mut worst = f64::NEG_INFINITY;
        for i in 0..prep.len() {
            let p =
                BlochVector::new_unchecked(prep.coords[i][0], prep.coords[i][1], prep.coords[i][2]);
            let d = divergence_closed(&p, &center)
                .map(|d| d.nats())
                .unwrap_or(f64::INFINITY);
            worst = worst.max(d);
        }
        worst
    };

    let mut best_c = [0.0f64; 3];
    let mut best_v = objective(best_c);
    for ir in 0..resolution {
        let r = (ir as f64 + 0.5) / resolution as f64 * r_max;
        for it in 0..resolution {
            let theta = std::f64::consts::PI * (it as f64 + 0.5) / resolution as f64;
            for ip in 0..resolution {
                let phi = std::f64::consts::TAU * ip as f64 / resolution as f64;
                let c = [
                    r * theta.sin() * phi.cos(),
                    r * theta.sin() * phi.sin(),
                    r * theta.cos(),
                ];
                let v = objective(c);
                if v < best_v {
                    best_v = v;
                    best_c = c;
                }
            }
        }
    }

    let scale = r_max / resolution as f64;
    let (refined, value) = nelder_mead(&objective, best_c, scale, 600);
    let (center_c, radius) = if value <= best_v {
        (refined, value)
    } else {
        (best_c, best_v)
    };
    let center = BlochVector::new_unchecked(center_c[0], center_c[1], center_c[2]);
    let values = prep.values(grad_clamped(center_c));
    let mut support = vec![values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0)];
    support.dedup();
    Ok(EnclosingBall {
        center,
        center_dual: DualCoordinates::from_components(grad_clamped(center_c)),
        radius: radius.max(0.0),
        support,
    })
}

fn nelder_mead(
    f: &dyn Fn([f64; 3]) -> f64,
    start: [f64; 3],
    scale: f64,
    iters: usize,
) -> ([f64; 3], f64) {
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((start, f(start)));
    for k in 0..3 {
        let mut p = start;
        p[k] += scale;
        if norm3(p) > 1.0 - 1e-6 {
            p[k] -= 2.0 * scale;
        }
        simplex.push((p, f(p)));
    }
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let spread = simplex[3].1 - simplex[0].1;
        if spread.abs() < 1e-14 {
            break;
        }
        let mut centroid = [0.0f64; 3];
        for v in &simplex[..3] {
            for k in 0..3 {
                centroid[k] += v.0[k] / 3.0;
            }
        }
        let worst = simplex[3];
        let reflect = |alpha: f64| {
            let mut p = [0.0f64; 3];
            for k in 0..3 {
                p[k] = centroid[k] + alpha * (centroid[k] - worst.0[k]);
            }
            p
        };
        let pr = reflect(1.0);
        let fr = f(pr);
        if fr < simplex[0].1 {
            let pe = reflect(2.0);
            let fe = f(pe);
            simplex[3] = if fe < fr { (pe, fe) } else { (pr, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (pr, fr);
        } else {
            let pc = reflect(-0.5);
            let fc = f(pc);
            if fc < worst.1 {
                simplex[3] = (pc, fc);
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    for k in 0..3 {
                        v.0[k] = best[k] + 0.5 * (v.0[k] - best[k]);
                    }
                    v.1 = f(v.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    (simplex[0].0, simplex[0].1)
}

/// Holevo capacity of a validated channel: sample the sphere, push the
/// samples through the channel, clamp image radii to 1 - 1e-12, and take
/// the radius of the smallest enclosing divergence ball. An exact re-solve
/// on the support neighborhood provides the reported solver gap.
pub fn holevo_capacity(
    channel: &AffineChannel,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> Result<CapacityReport> {
    if n_samples < 16 {
        return Err(Error::ParameterOutOfRange {
            name: "n_samples",
            value: n_samples as f64,
        });
    }
    let label = channel.label().unwrap_or("channel").to_string();
    let inputs = sample_sphere(n_samples, seed)?;
    let images: Vec<BlochVector> = inputs
        .iter()
        .map(|v| channel.apply(v).clamped_to_radius(CENTER_CLAMP))
        .collect();

    if all_coincident(&images) {
        let c = images[0];
        return Ok(CapacityReport {
            label,
            n_samples,
            capacity_nats: 0.0,
            capacity_bits: 0.0,
            center: c.coords(),
            support: vec![0],
            solver_gap: 0.0,
        });
    }

    let ball = meb_iterative(&images, tol, 50_000)?;

    // Cross-check: exact solve restricted to the support neighborhood
    // (support plus the next-farthest points) lower-bounds the radius.
    let prep = Prepared::new(&images);
    let values = prep.values(ball.center_dual.components());
    let mut order: Vec<usize> = (0..images.len()).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
    let mut subset: Vec<usize> = ball.support.clone();
    for i in order.into_iter().take(8) {
        if !subset.contains(&i) {
            subset.push(i);
        }
    }
    subset.sort_unstable();
    let subset_points: Vec<BlochVector> = subset.iter().map(|&i| images[i]).collect();
    let exact = meb_exact(&subset_points)?;
    let solver_gap = (ball.radius - exact.radius).abs();

    Ok(CapacityReport {
        label,
        n_samples,
        capacity_nats: ball.radius,
        capacity_bits: ball.radius / std::f64::consts::LN_2,
        center: ball.center.coords(),
        support: ball.support,
        solver_gap,
    })
}

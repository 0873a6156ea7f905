//! Python bindings: the main types and operations of the bloch-voronoi
//! library. Bloch vectors and dual coordinates travel as (x, y, z) tuples,
//! density matrices as nested lists of Python complex numbers.
//!
//! Build with `cargo build -p bloch-voronoi-py --release`; the resulting
//! `libblochvoronoi.so` imports as the `blochvoronoi` module once renamed
//! to `blochvoronoi.so` (see python/smoke_test.py).

use num_complex::Complex;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use bloch_voronoi::capacity as cap;
use bloch_voronoi::channels::AffineChannel;
use bloch_voronoi::geometry;
use bloch_voronoi::state::{self, BlochVector};
use bloch_voronoi::voronoi;

type Triple = (f64, f64, f64);

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vector(t: Triple) -> PyResult<BlochVector> {
    BlochVector::new(t.0, t.1, t.2).map_err(err)
}

fn vectors(ts: Vec<Triple>) -> PyResult<Vec<BlochVector>> {
    ts.into_iter().map(vector).collect()
}

fn triple(v: &BlochVector) -> Triple {
    (v.x(), v.y(), v.z())
}

fn dual(t: Triple) -> PyResult<geometry::DualCoordinates> {
    geometry::DualCoordinates::new(t.0, t.1, t.2).map_err(err)
}

fn mode(name: &str) -> PyResult<voronoi::DiagramMode> {
    voronoi::DiagramMode::parse(name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown diagram mode '{name}'")))
}

/// Von Neumann entropy of the state at Bloch point v, in nats.
#[pyfunction]
fn entropy(v: Triple) -> PyResult<f64> {
    Ok(state::entropy(&vector(v)?))
}

/// The convex potential phi = -S.
#[pyfunction]
fn potential(v: Triple) -> PyResult<f64> {
    Ok(state::potential(&vector(v)?))
}

/// Eigenvalues ((1+r)/2, (1-r)/2) of the state at v.
#[pyfunction]
fn eigenvalues(v: Triple) -> PyResult<(f64, f64)> {
    Ok(state::eigenvalues(&vector(v)?))
}

/// The 2x2 density matrix of v as nested lists of complex numbers.
#[pyfunction]
fn density_matrix(v: Triple) -> PyResult<Vec<Vec<Complex<f64>>>> {
    let rho = state::DensityMatrix::from_bloch(&vector(v)?);
    Ok((0..2)
        .map(|i| (0..2).map(|j| rho.entry(i, j)).collect())
        .collect())
}

/// Bloch coordinates of a density matrix given as nested lists.
#[pyfunction]
fn to_bloch(rho: Vec<Vec<Complex<f64>>>) -> PyResult<Triple> {
    if rho.len() != 2 || rho.iter().any(|r| r.len() != 2) {
        return Err(PyValueError::new_err("expected a 2x2 matrix"));
    }
    let entries = [[rho[0][0], rho[0][1]], [rho[1][0], rho[1][1]]];
    let dm = state::DensityMatrix::new(entries).map_err(err)?;
    Ok(triple(&dm.to_bloch()))
}

/// Tr(rho sigma) = (1 + a.b)/2.
#[pyfunction]
fn trace_inner(a: Triple, b: Triple) -> PyResult<f64> {
    Ok(geometry::trace_inner(&vector(a)?, &vector(b)?))
}

/// Fubini-Study distance between pure states, in [0, pi/2].
#[pyfunction]
fn fubini_study(a: Triple, b: Triple) -> PyResult<f64> {
    geometry::fubini_study(&vector(a)?, &vector(b)?).map_err(err)
}

/// Bures distance sqrt(1 - Tr rho sigma) between pure states.
#[pyfunction]
fn bures(a: Triple, b: Triple) -> PyResult<f64> {
    geometry::bures(&vector(a)?, &vector(b)?).map_err(err)
}

/// Central angle between unit Bloch vectors.
#[pyfunction]
fn geodesic_distance(a: Triple, b: Triple) -> PyResult<f64> {
    geometry::geodesic(&vector(a)?, &vector(b)?).map_err(err)
}

/// Euclidean distance |a - b|.
#[pyfunction]
fn euclidean_distance(a: Triple, b: Triple) -> PyResult<f64> {
    Ok(geometry::euclidean(&vector(a)?, &vector(b)?))
}

/// Quantum divergence D(a || b) in nats, via the closed form. The second
/// argument must be interior.
#[pyfunction]
fn divergence(a: Triple, b: Triple) -> PyResult<f64> {
    Ok(geometry::divergence_closed(&vector(a)?, &vector(b)?)
        .map_err(err)?
        .nats())
}

/// Quantum divergence evaluated through spectral matrix logarithms; agrees
/// with `divergence` to 1e-10.
#[pyfunction]
fn divergence_matrix(a: Triple, b: Triple) -> PyResult<f64> {
    Ok(geometry::divergence_matrix(&vector(a)?, &vector(b)?)
        .map_err(err)?
        .nats())
}

/// Dual (Legendre) coordinates grad phi(v) of an interior point.
#[pyfunction]
fn grad_potential(v: Triple) -> PyResult<Triple> {
    let d = geometry::grad_potential(&vector(v)?).map_err(err)?;
    Ok((d.u(), d.v(), d.w()))
}

/// Inverse of the gradient map.
#[pyfunction]
fn inverse_grad(u: Triple) -> PyResult<Triple> {
    Ok(triple(&geometry::inverse_grad(&dual(u)?)))
}

/// Convex conjugate phi*(u) = log(2 cosh |u|).
#[pyfunction]
fn conjugate_potential(u: Triple) -> PyResult<f64> {
    Ok(geometry::conjugate_potential(&dual(u)?))
}

/// Deterministic Fibonacci-lattice sample of the sphere.
#[pyfunction]
#[pyo3(signature = (n, seed = 0))]
fn sample_sphere(n: usize, seed: u64) -> PyResult<Vec<Triple>> {
    Ok(cap::sample_sphere(n, seed)
        .map_err(err)?
        .iter()
        .map(triple)
        .collect())
}

/// Nearest site under a diagram mode: (site index, margin). Modes:
/// fubini-study, bures, geodesic, euclidean, divergence-primal,
/// divergence-dual.
#[pyfunction]
fn classify(mode_name: &str, sites: Vec<Triple>, query: Triple) -> PyResult<(usize, f64)> {
    let set = voronoi::SiteSet::new(vectors(sites)?).map_err(err)?;
    voronoi::classify(mode(mode_name)?, &set, &vector(query)?).map_err(err)
}

/// Classify a batch of queries: list of (site index, margin).
#[pyfunction]
fn classify_batch(
    mode_name: &str,
    sites: Vec<Triple>,
    queries: Vec<Triple>,
) -> PyResult<Vec<(usize, f64)>> {
    let set = voronoi::SiteSet::new(vectors(sites)?).map_err(err)?;
    let assignment =
        voronoi::classify_batch(mode(mode_name)?, &set, &vectors(queries)?).map_err(err)?;
    Ok(assignment
        .entries
        .iter()
        .map(|e| (e.site, e.margin))
        .collect())
}

/// Section of a divergence diagram of pure sites at radius 1 - epsilon,
/// reported against the original pure queries.
#[pyfunction]
fn pure_limit_section(
    sites: Vec<Triple>,
    epsilon: f64,
    mode_name: &str,
    queries: Vec<Triple>,
) -> PyResult<Vec<(usize, f64)>> {
    let set = voronoi::SiteSet::new(vectors(sites)?).map_err(err)?;
    let assignment =
        voronoi::pure_limit_section(&set, epsilon, mode(mode_name)?, &vectors(queries)?)
            .map_err(err)?;
    Ok(assignment
        .entries
        .iter()
        .map(|e| (e.site, e.margin))
        .collect())
}

/// Smallest enclosing divergence ball of a point set:
/// ((cx, cy, cz), radius_nats, support_indices). Solvers: "iterative"
/// (default), "exact" (subset enumeration), "grid" (brute-force oracle).
#[pyfunction]
#[pyo3(signature = (points, solver = "iterative"))]
fn smallest_enclosing_ball(
    points: Vec<Triple>,
    solver: &str,
) -> PyResult<(Triple, f64, Vec<usize>)> {
    let pts = vectors(points)?;
    let ball = match solver {
        "iterative" => cap::meb_iterative(&pts, 1e-9, 50_000),
        "exact" => cap::meb_exact(&pts),
        "grid" => cap::meb_grid(&pts, 16),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown solver '{other}'; expected iterative, exact or grid"
            )))
        }
    }
    .map_err(err)?;
    Ok((triple(&ball.center), ball.radius, ball.support))
}

/// A 1-qubit channel as an affine map on Bloch coordinates, validated so
/// the image of the ball stays inside the ball.
#[pyclass(name = "Channel", skip_from_py_object)]
#[derive(Clone)]
struct PyChannel {
    inner: AffineChannel,
}

#[pymethods]
impl PyChannel {
    #[new]
    #[pyo3(signature = (matrix, offset, label = None))]
    fn new(matrix: [[f64; 3]; 3], offset: [f64; 3], label: Option<String>) -> PyResult<Self> {
        Ok(Self {
            inner: AffineChannel::new(matrix, offset, label).map_err(err)?,
        })
    }

    #[staticmethod]
    fn identity() -> Self {
        Self {
            inner: AffineChannel::identity(),
        }
    }

    #[staticmethod]
    fn depolarizing(t: f64) -> PyResult<Self> {
        Ok(Self {
            inner: AffineChannel::depolarizing(t).map_err(err)?,
        })
    }

    #[staticmethod]
    fn planar(tx: f64, ty: f64) -> PyResult<Self> {
        Ok(Self {
            inner: AffineChannel::planar(tx, ty).map_err(err)?,
        })
    }

    #[staticmethod]
    fn amplitude_damping(gamma: f64) -> PyResult<Self> {
        Ok(Self {
            inner: AffineChannel::amplitude_damping(gamma).map_err(err)?,
        })
    }

    #[staticmethod]
    fn phase_damping(lambda: f64) -> PyResult<Self> {
        Ok(Self {
            inner: AffineChannel::phase_damping(lambda).map_err(err)?,
        })
    }

    #[staticmethod]
    fn rotation(axis: Triple, angle: f64) -> PyResult<Self> {
        Ok(Self {
            inner: AffineChannel::rotation([axis.0, axis.1, axis.2], angle).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: AffineChannel::from_json(text).map_err(err)?,
        })
    }

    fn apply(&self, v: Triple) -> PyResult<Triple> {
        Ok(triple(&self.inner.apply(&vector(v)?)))
    }

    /// Max over the sphere of |M v + b| - 1; <= 1e-9 for a valid channel.
    fn validate_image(&self) -> f64 {
        self.inner.validate_image()
    }

    fn matrix(&self) -> [[f64; 3]; 3] {
        *self.inner.matrix()
    }

    fn offset(&self) -> [f64; 3] {
        *self.inner.offset()
    }

    fn label(&self) -> Option<String> {
        self.inner.label().map(str::to_string)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "Channel(label={:?}, overflow={:.3e})",
            self.inner.label().unwrap_or("None"),
            self.inner.validate_image()
        )
    }
}

/// Result of a Holevo capacity computation.
#[pyclass(name = "CapacityReport", skip_from_py_object)]
#[derive(Clone)]
struct PyCapacityReport {
    #[pyo3(get)]
    label: String,
    #[pyo3(get)]
    n_samples: usize,
    #[pyo3(get)]
    capacity_nats: f64,
    #[pyo3(get)]
    capacity_bits: f64,
    #[pyo3(get)]
    center: Triple,
    #[pyo3(get)]
    support: Vec<usize>,
    #[pyo3(get)]
    solver_gap: f64,
    json: String,
}

#[pymethods]
impl PyCapacityReport {
    fn to_json(&self) -> String {
        self.json.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "CapacityReport(label={:?}, capacity_nats={}, capacity_bits={})",
            self.label, self.capacity_nats, self.capacity_bits
        )
    }
}

/// Holevo capacity of a channel: the radius, in divergence, of the
/// smallest enclosing ball of the channel's image of the sampled sphere.
#[pyfunction]
#[pyo3(signature = (channel, samples = 2000, seed = 0, tol = 1e-9))]
fn holevo_capacity(
    channel: &PyChannel,
    samples: usize,
    seed: u64,
    tol: f64,
) -> PyResult<PyCapacityReport> {
    let report = cap::holevo_capacity(&channel.inner, samples, seed, tol).map_err(err)?;
    Ok(PyCapacityReport {
        label: report.label.clone(),
        n_samples: report.n_samples,
        capacity_nats: report.capacity_nats,
        capacity_bits: report.capacity_bits,
        center: (report.center[0], report.center[1], report.center[2]),
        support: report.support.clone(),
        solver_gap: report.solver_gap,
        json: report.to_json(),
    })
}

#[pymodule]
fn blochvoronoi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyChannel>()?;
    m.add_class::<PyCapacityReport>()?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(potential, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(density_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(to_bloch, m)?)?;
    m.add_function(wrap_pyfunction!(trace_inner, m)?)?;
    m.add_function(wrap_pyfunction!(fubini_study, m)?)?;
    m.add_function(wrap_pyfunction!(bures, m)?)?;
    m.add_function(wrap_pyfunction!(geodesic_distance, m)?)?;
    m.add_function(wrap_pyfunction!(euclidean_distance, m)?)?;
    m.add_function(wrap_pyfunction!(divergence, m)?)?;
    m.add_function(wrap_pyfunction!(divergence_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(grad_potential, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_grad, m)?)?;
    m.add_function(wrap_pyfunction!(conjugate_potential, m)?)?;
    m.add_function(wrap_pyfunction!(sample_sphere, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(classify_batch, m)?)?;
    m.add_function(wrap_pyfunction!(pure_limit_section, m)?)?;
    m.add_function(wrap_pyfunction!(smallest_enclosing_ball, m)?)?;
    m.add_function(wrap_pyfunction!(holevo_capacity, m)?)?;
    Ok(())
}

//! 1-qubit channels as affine maps on Bloch coordinates.
//!
//! A channel is v -> M v + b with a 3x3 real matrix M and an offset b. The
//! image of the closed unit ball is an ellipsoid; construction validates
//! that it stays inside the ball (to 1e-9), which is all the capacity
//! machinery needs. Complete positivity is deliberately not checked.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{dot3, norm3, scale3, BlochVector};

/// Channels whose image ellipsoid pokes out of the ball by more than this
/// are rejected at construction.
pub const IMAGE_TOLERANCE: f64 = 1e-9;

/// An affine channel on Bloch coordinates, immutable after validation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "ChannelSpec")]
pub struct AffineChannel {
    matrix: [[f64; 3]; 3],
    offset: [f64; 3],
    label: Option<String>,
}

/// Raw serde mirror of the channel JSON file format:
/// `{"matrix": [[..],[..],[..]], "offset": [..], "label": "..."}` with a
/// row-major matrix. Deserialization goes through [`AffineChannel::new`],
/// so files describing out-of-ball channels are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub matrix: [[f64; 3]; 3],
    pub offset: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl From<AffineChannel> for ChannelSpec {
    fn from(c: AffineChannel) -> Self {
        ChannelSpec {
            matrix: c.matrix,
            offset: c.offset,
            label: c.label,
        }
    }
}

impl TryFrom<ChannelSpec> for AffineChannel {
    type Error = Error;

    fn try_from(spec: ChannelSpec) -> Result<Self> {
        AffineChannel::new(spec.matrix, spec.offset, spec.label)
    }
}

impl AffineChannel {
    /// Validate and build a channel. Fails with the measured overflow when
    /// the image of the ball leaves it by more than [`IMAGE_TOLERANCE`].
    pub fn new(matrix: [[f64; 3]; 3], offset: [f64; 3], label: Option<String>) -> Result<Self> {
        let candidate = Self {
            matrix,
            offset,
            label,
        };
        let overflow = candidate.validate_image();
        if overflow > IMAGE_TOLERANCE {
            return Err(Error::InvalidChannel { overflow });
        }
        Ok(candidate)
    }

    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.matrix
    }

    pub fn offset(&self) -> &[f64; 3] {
        &self.offset
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    fn map(&self, v: [f64; 3]) -> [f64; 3] {
        [
            dot3(self.matrix[0], v) + self.offset[0],
            dot3(self.matrix[1], v) + self.offset[1],
            dot3(self.matrix[2], v) + self.offset[2],
        ]
    }

    /// Apply the channel. The result is clamped onto the closed ball; for a
    /// validated channel the clamp can only absorb rounding at the 1e-9
    /// tolerance level.
    pub fn apply(&self, v: &BlochVector) -> BlochVector {
        let w = self.map(v.coords());
        let r = norm3(w);
        if r > 1.0 {
            let s = 1.0 / r;
            BlochVector::new_unchecked(w[0] * s, w[1] * s, w[2] * s)
        } else {
            BlochVector::new_unchecked(w[0], w[1], w[2])
        }
    }

    /// Maximum of |M v + b| - 1 over the unit sphere (attained there since
    /// the norm is convex over the ball): 4096 Fibonacci directions
    /// followed by monotone local ascent. Negative means the image is
    /// strictly inside the ball.
    pub fn validate_image(&self) -> f64 {
        let mut best_dir = [0.0, 0.0, 1.0];
        let mut best = f64::NEG_INFINITY;
        let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
        let n = 4096;
        for i in 0..n {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let theta = golden * i as f64;
            let dir = [rho * theta.cos(), rho * theta.sin(), z];
            let val = norm3(self.map(dir));
            if val > best {
                best = val;
                best_dir = dir;
            }
        }
        // |M v + b| is convex, so v <- normalize(M^T (M v + b)) is an
        // ascent step on the sphere; iterate from the best sample. The
        // step ratio degrades when singular values nearly coincide, so it
        // only does the coarse work.
        let mut v = best_dir;
        for _ in 0..100 {
            let w = self.map(v);
            let g = [
                self.matrix[0][0] * w[0] + self.matrix[1][0] * w[1] + self.matrix[2][0] * w[2],
                self.matrix[0][1] * w[0] + self.matrix[1][1] * w[1] + self.matrix[2][1] * w[2],
                self.matrix[0][2] * w[0] + self.matrix[1][2] * w[1] + self.matrix[2][2] * w[2],
            ];
            let gn = norm3(g);
            if gn < 1e-15 {
                break;
            }
            let next = scale3(g, 1.0 / gn);
            let val = norm3(self.map(next));
            if val <= best + 1e-16 {
                break;
            }
            best = val;
            v = next;
        }
        // Shrinking-step hill climb in the tangent plane: the positional
        // error tracks the final step size and the value error is second
        // order in it, independent of the spectrum.
        let mut step = 0.05;
        let mut evals = 0;
        while step > 1e-9 && evals < 20_000 {
            let (t1, t2) = tangent_basis(v);
            let mut moved = false;
            for dir in [t1, t2, scale3(t1, -1.0), scale3(t2, -1.0)] {
                let cand = [
                    v[0] + step * dir[0],
                    v[1] + step * dir[1],
                    v[2] + step * dir[2],
                ];
                let n = norm3(cand);
                let cand = scale3(cand, 1.0 / n);
                let val = norm3(self.map(cand));
                evals += 1;
                if val > best {
                    best = val;
                    v = cand;
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        best - 1.0
    }

    /// The identity channel.
    pub fn identity() -> Self {
        Self::diagonal([1.0, 1.0, 1.0], [0.0, 0.0, 0.0], "identity")
    }

    /// Uniform shrink toward the center: M = t I, b = 0. t = 1 is the
    /// identity, t = 0 sends everything to the maximally mixed state.
    pub fn depolarizing(t: f64) -> Result<Self> {
        check_unit_range("t", t)?;
        Ok(Self::diagonal(
            [t, t, t],
            [0.0, 0.0, 0.0],
            format!("depolarizing(t={t})"),
        ))
    }

    /// Squash onto the xy-plane with independent contractions. |tx| and
    /// |ty| up to 1.
    pub fn planar(tx: f64, ty: f64) -> Result<Self> {
        if !(tx.is_finite() && tx.abs() <= 1.0) {
            return Err(Error::ParameterOutOfRange {
                name: "tx",
                value: tx,
            });
        }
        if !(ty.is_finite() && ty.abs() <= 1.0) {
            return Err(Error::ParameterOutOfRange {
                name: "ty",
                value: ty,
            });
        }
        Ok(Self::diagonal(
            [tx, ty, 0.0],
            [0.0, 0.0, 0.0],
            format!("planar(tx={tx},ty={ty})"),
        ))
    }

    /// Amplitude damping toward the north pole:
    /// M = diag(sqrt(1-g), sqrt(1-g), 1-g), b = (0, 0, g).
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        check_unit_range("gamma", gamma)?;
        let s = (1.0 - gamma).sqrt();
        Ok(Self::diagonal(
            [s, s, 1.0 - gamma],
            [0.0, 0.0, gamma],
            format!("amplitude_damping(gamma={gamma})"),
        ))
    }

    /// Phase damping: the equatorial components shrink by sqrt(1-l), the
    /// z-axis is untouched.
    pub fn phase_damping(lambda: f64) -> Result<Self> {
        check_unit_range("lambda", lambda)?;
        let s = (1.0 - lambda).sqrt();
        Ok(Self::diagonal(
            [s, s, 1.0],
            [0.0, 0.0, 0.0],
            format!("phase_damping(lambda={lambda})"),
        ))
    }

    /// Rotation about an axis by an angle (radians), via the Rodrigues
    /// formula. An isometry of the ball.
    pub fn rotation(axis: [f64; 3], angle: f64) -> Result<Self> {
        let n = norm3(axis);
        if !(n.is_finite() && n > 1e-12) {
            return Err(Error::ParameterOutOfRange {
                name: "axis",
                value: n,
            });
        }
        if !angle.is_finite() {
            return Err(Error::ParameterOutOfRange {
                name: "angle",
                value: angle,
            });
        }
        let k = scale3(axis, 1.0 / n);
        let (s, c) = angle.sin_cos();
        let mut m = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let eye = if i == j { 1.0 } else { 0.0 };
                m[i][j] = eye * c + k[i] * k[j] * (1.0 - c);
            }
        }
        // + sin(theta) [k]_x
        m[0][1] -= s * k[2];
        m[0][2] += s * k[1];
        m[1][0] += s * k[2];
        m[1][2] -= s * k[0];
        m[2][0] -= s * k[1];
        m[2][1] += s * k[0];
        let label = format!("rotation(axis=[{},{},{}],angle={angle})", k[0], k[1], k[2]);
        AffineChannel::new(m, [0.0, 0.0, 0.0], Some(label))
    }

    fn diagonal(diag: [f64; 3], offset: [f64; 3], label: impl Into<String>) -> Self {
        Self {
            matrix: [
                [diag[0], 0.0, 0.0],
                [0.0, diag[1], 0.0],
                [0.0, 0.0, diag[2]],
            ],
            offset,
            label: Some(label.into()),
        }
    }

    /// Parse the channel JSON file format.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ChannelSpec = serde_json::from_str(text).map_err(|e| Error::ModeMisuse {
            reason: format!("invalid channel JSON: {e}"),
        })?;
        spec.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ChannelSpec::from(self.clone()))
            .expect("channel serialization cannot fail")
    }
}

fn tangent_basis(v: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let seed = if v[0].abs() <= v[1].abs() && v[0].abs() <= v[2].abs() {
        [1.0, 0.0, 0.0]
    } else if v[1].abs() <= v[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let d = dot3(seed, v);
    let mut t1 = [seed[0] - d * v[0], seed[1] - d * v[1], seed[2] - d * v[2]];
    let n = norm3(t1);
    t1 = scale3(t1, 1.0 / n);
    let t2 = crate::state::cross3(v, t1);
    (t1, t2)
}

fn check_unit_range(name: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
        return Err(Error::ParameterOutOfRange { name, value });
    }
    Ok(())
}

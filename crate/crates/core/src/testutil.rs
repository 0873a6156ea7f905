//! Shared helpers for unit tests: seeded sampling in the ball, on the
//! sphere, and random rotations.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::state::{norm3, BlochVector};

pub fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
        ];
        let n = norm3(v);
        if n > 1e-3 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

pub fn random_pure(rng: &mut ChaCha8Rng) -> BlochVector {
    let d = random_unit(rng);
    BlochVector::new(d[0], d[1], d[2]).unwrap()
}

pub fn random_in_ball(rng: &mut ChaCha8Rng) -> BlochVector {
    let dir = random_unit(rng);
    let r = rng.gen::<f64>().cbrt();
    BlochVector::new(dir[0] * r, dir[1] * r, dir[2] * r).unwrap()
}

/// Uniform over radius in [0, max_radius]; handy for interior-only draws.
pub fn random_with_radius_up_to(rng: &mut ChaCha8Rng, max_radius: f64) -> BlochVector {
    let dir = random_unit(rng);
    let r = max_radius * rng.gen::<f64>().cbrt();
    BlochVector::new(dir[0] * r, dir[1] * r, dir[2] * r).unwrap()
}

/// Rotation matrix from a uniformly random unit quaternion.
pub fn random_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let mut q = [0.0f64; 4];
    loop {
        for c in q.iter_mut() {
            *c = rng.gen::<f64>() * 2.0 - 1.0;
        }
        let n = (q.iter().map(|c| c * c).sum::<f64>()).sqrt();
        if n > 1e-3 && n <= 1.0 {
            for c in q.iter_mut() {
                *c /= n;
            }
            break;
        }
    }
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

pub fn rotate(m: &[[f64; 3]; 3], v: &BlochVector) -> BlochVector {
    let c = v.coords();
    let out = [
        m[0][0] * c[0] + m[0][1] * c[1] + m[0][2] * c[2],
        m[1][0] * c[0] + m[1][1] * c[1] + m[1][2] * c[2],
        m[2][0] * c[0] + m[2][1] * c[1] + m[2][2] * c[2],
    ];
    // A rotation of an in-ball point can exceed the ball only by rounding.
    BlochVector::new(out[0], out[1], out[2]).unwrap_or_else(|_| {
        BlochVector::new_unchecked(out[0], out[1], out[2]).clamped_to_radius(1.0)
    })
}

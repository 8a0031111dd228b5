//! Degree-one self-maps of S² built from a pair (G₁′, G₂′), their homotopy to the identity,
//! and a discretized degree.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SphereMapChoice {
    /// G₂′(x) = 1 − 2|x|, G₁′(x) = (4x/(1+x))^{1/4} for x ≥ 0. Not differentiable at 0.
    Special,
    /// G₂′(x) = cos(π s(|x|)), s(a) = a²/(a² + (1−a)^{5/2}): flat to order 4 at 0 and 5 at 1.
    Smoothed,
}

impl std::str::FromStr for SphereMapChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "special" => Ok(SphereMapChoice::Special),
            "smoothed" => Ok(SphereMapChoice::Smoothed),
            _ => Err(Error::Parse(format!("unknown sphere map '{s}' (special|smoothed)"))),
        }
    }
}

/// The family F_λ; λ = 1 is the map itself.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SphereMapFunctions {
    pub choice: SphereMapChoice,
    pub lambda: f64,
}

impl SphereMapFunctions {
    pub fn new(choice: SphereMapChoice) -> Self {
        SphereMapFunctions { choice, lambda: 1.0 }
    }

    pub fn homotopy(choice: SphereMapChoice, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Domain(format!("homotopy parameter {lambda} outside [0,1]")));
        }
        Ok(SphereMapFunctions { choice, lambda })
    }

    /// x ≤ threshold is where G₁′_λ vanishes.
    pub fn threshold(&self) -> f64 {
        self.lambda - 1.0
    }

    /// 1 − y for the rescaled argument y = 1 − (1−x)/(2−λ).
    fn u(&self, x: f64) -> f64 {
        (1.0 - x) / (2.0 - self.lambda)
    }

    /// Base G₂′ at |y|, written through u = 1 − y (y ≥ 0) to keep precision near y = 1.
    fn base_g2(&self, a: f64, u: f64) -> f64 {
        match self.choice {
            SphereMapChoice::Special => 1.0 - 2.0 * a,
            SphereMapChoice::Smoothed => {
                if a >= 1.0 {
                    return -1.0;
                }
                let q = u.powf(2.5);
                (PI * a * a / (a * a + q)).cos()
            }
        }
    }

    /// 1 − G₂′(y)², for y = 1 − u ≥ 0.
    fn base_one_minus_g2sq(&self, a: f64, u: f64) -> f64 {
        match self.choice {
            SphereMapChoice::Special => 4.0 * a * u,
            SphereMapChoice::Smoothed => {
                let q = u.powf(2.5);
                let d = a * a + q;
                if d == 0.0 {
                    return 0.0;
                }
                (PI * q / d).sin().powi(2)
            }
        }
    }

    pub fn g2p(&self, x: f64) -> f64 {
        let u = self.u(x);
        let y = 1.0 - u;
        if y >= 0.0 {
            self.base_g2(y, u)
        } else {
            self.base_g2(-y, 1.0 + y)
        }
    }

    pub fn g1p(&self, x: f64) -> f64 {
        if x <= self.threshold() {
            return 0.0;
        }
        let u = self.u(x);
        let y = 1.0 - u;
        let g4 = match self.choice {
            // 4y(1−y)/((1−x)(1+x)) with 1−y = (1−x)/(2−λ)
            SphereMapChoice::Special => 4.0 * y / ((2.0 - self.lambda) * (1.0 + x)),
            SphereMapChoice::Smoothed => {
                let den = (1.0 - x) * (1.0 + x);
                if den <= 0.0 {
                    0.0
                } else {
                    self.base_one_minus_g2sq(y, u) / den
                }
            }
        };
        g4.max(0.0).powf(0.25)
    }

    /// χ(x < λ−1)·(1 − G₂′_λ(x)²)^{1/2}; ties go to the ≥ side.
    pub fn south_arch(&self, x: f64) -> f64 {
        if x < self.threshold() {
            (1.0 - self.g2p(x).powi(2)).max(0.0).sqrt()
        } else {
            0.0
        }
    }

    /// G₁(x) = G₁′(√(1−x²)) on [0,1].
    pub fn g1(&self, x: f64) -> f64 {
        self.g1p((1.0 - x * x).max(0.0).sqrt())
    }

    /// G₂(x) = G₂′(√(1−x²)) on [0,1].
    pub fn g2(&self, x: f64) -> f64 {
        self.g2p((1.0 - x * x).max(0.0).sqrt())
    }

    /// max |(1−x²)G₁′(x)⁴ + G₂′(x)² − 1| over x ∈ [0,1].
    pub fn identity_residual(&self, points: usize) -> f64 {
        (0..points)
            .map(|i| {
                let x = i as f64 / (points - 1).max(1) as f64;
                ((1.0 - x * x) * self.g1p(x).powi(4) + self.g2p(x).powi(2) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// max |x²G₁(x)⁴ + G₂(x)² − 1| over x ∈ [0,1].
    pub fn dual_identity_residual(&self, points: usize) -> f64 {
        (0..points)
            .map(|i| {
                let x = i as f64 / (points - 1).max(1) as f64;
                (x * x * self.g1(x).powi(4) + self.g2(x).powi(2) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// F_λ(x) for x ∈ S².
    pub fn map_point(&self, x: [f64; 3]) -> Result<[f64; 3]> {
        let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("point {x:?} is not on the unit sphere (|x| = {n})")));
        }
        Ok(self.map_unchecked(x))
    }

    fn map_unchecked(&self, x: [f64; 3]) -> [f64; 3] {
        let g = self.g1p(x[2]).powi(2);
        [g * x[0] + self.south_arch(x[2]), -g * x[1], self.g2p(x[2])]
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DegreeResult {
    pub degree: i64,
    /// Pulled-back area over 4π before rounding.
    pub raw: f64,
    pub residual: f64,
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Signed solid angle of the geodesic triangle (a, b, c).
fn solid_angle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let num = dot(a, cross(b, c));
    let den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    2.0 * num.atan2(den)
}

/// Degree of a map S² → S² from the oriented area of the image of an n_phi × n_theta triangulation.
pub fn mapping_degree(map: impl Fn([f64; 3]) -> [f64; 3] + Sync, n_phi: usize, n_theta: usize) -> Result<DegreeResult> {
    if n_phi < 3 || n_theta < 2 {
        return Err(Error::Resolution(format!("grid {n_phi}x{n_theta} too coarse")));
    }
    let point = |i: usize, j: usize| -> [f64; 3] {
        let th = PI * i as f64 / n_theta as f64;
        let ph = 2.0 * PI * (j % n_phi) as f64 / n_phi as f64;
        [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]
    };
    let normalize = |z: [f64; 3]| {
        let n = dot(z, z).sqrt();
        [z[0] / n, z[1] / n, z[2] / n]
    };
    let images: Vec<Vec<[f64; 3]>> = (0..=n_theta).map(|i| (0..n_phi).map(|j| normalize(map(point(i, j)))).collect()).collect();
    let mut total = 0.0;
    for i in 0..n_theta {
        for j in 0..n_phi {
            let jn = (j + 1) % n_phi;
            let (a, b, c, d) = (images[i][j], images[i + 1][j], images[i + 1][jn], images[i][jn]);
            total += solid_angle(a, b, c) + solid_angle(a, c, d);
        }
    }
    let raw = total / (4.0 * PI);
    let degree = raw.round();
    let residual = (raw - degree).abs();
    if residual > 0.2 {
        return Err(Error::Resolution(format!("degree integral {raw:.4} is not near an integer")));
    }
    Ok(DegreeResult { degree: degree as i64, raw, residual })
}

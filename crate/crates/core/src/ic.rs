//! Built-in initial conditions for the simulation experiments.

use serde::{Deserialize, Serialize};

use crate::state::StateVector;

/// Named initial conditions. Riemann-type cases put the jump at x = 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum InitialCondition {
    /// u = -1 for x < 0, +1 for x >= 0 (symmetric rarefaction).
    BurgersCase1,
    /// u = 0.5 for x < 0, -2.5 for x >= 0 (left-moving shock).
    BurgersCase2,
    /// u = 0.2 + sin(2 pi x) / pi, 1-periodic.
    BurgersViscousSine,
    /// h = 1, u = -0.5 / +0.5.
    SweCase1,
    /// h = 2 / 1, u = -0.5 / +0.5.
    SweCase2,
    /// h = 1, u = -1 / +1 (strong expansion toward a near-dry middle).
    SweCase3,
    /// Radial cosine bump (cos(8 pi r) + 1) e^r / (1 + e^r), frozen at its
    /// cutoff value beyond r_max.
    #[serde(rename = "burgers2d_cosbump")]
    Burgers2DCosBump {
        #[serde(default = "default_r_max")]
        r_max: f64,
    },
    /// Circular dam break: h = h_inner inside the disc, h_outer outside,
    /// fluid at rest.
    #[serde(rename = "swe2d_dambreak")]
    Swe2DDamBreak {
        #[serde(default = "default_h_inner")]
        h_inner: f64,
        #[serde(default = "default_h_outer")]
        h_outer: f64,
        #[serde(default = "default_center")]
        center: [f64; 2],
        #[serde(default = "default_radius")]
        radius: f64,
    },
}

fn default_r_max() -> f64 {
    0.4
}
fn default_h_inner() -> f64 {
    3.0
}
fn default_h_outer() -> f64 {
    0.25
}
fn default_center() -> [f64; 2] {
    [5.0, 5.0]
}
fn default_radius() -> f64 {
    2.5
}

impl InitialCondition {
    /// Defaults from the dam-break configuration: column of height 3 and
    /// radius 2.5 centered in (0,10)^2 over a 0.25 background.
    pub fn dam_break_default() -> Self {
        InitialCondition::Swe2DDamBreak {
            h_inner: default_h_inner(),
            h_outer: default_h_outer(),
            center: default_center(),
            radius: default_radius(),
        }
    }

    /// Number of conserved variables of the states this IC produces.
    pub fn state_dim(&self) -> usize {
        match self {
            InitialCondition::BurgersCase1
            | InitialCondition::BurgersCase2
            | InitialCondition::BurgersViscousSine
            | InitialCondition::Burgers2DCosBump { .. } => 1,
            InitialCondition::SweCase1 | InitialCondition::SweCase2 | InitialCondition::SweCase3 => 2,
            InitialCondition::Swe2DDamBreak { .. } => 3,
        }
    }

    pub fn eval(&self, x: [f64; 2]) -> StateVector {
        match *self {
            InitialCondition::BurgersCase1 => {
                StateVector::scalar(if x[0] < 0.0 { -1.0 } else { 1.0 })
            }
            InitialCondition::BurgersCase2 => {
                StateVector::scalar(if x[0] < 0.0 { 0.5 } else { -2.5 })
            }
            InitialCondition::BurgersViscousSine => {
                StateVector::scalar(0.2 + (std::f64::consts::TAU * x[0]).sin() / std::f64::consts::PI)
            }
            InitialCondition::SweCase1 => {
                StateVector::pair(1.0, if x[0] < 0.0 { -0.5 } else { 0.5 })
            }
            InitialCondition::SweCase2 => {
                let h = if x[0] < 0.0 { 2.0 } else { 1.0 };
                let u = if x[0] < 0.0 { -0.5 } else { 0.5 };
                StateVector::pair(h, h * u)
            }
            InitialCondition::SweCase3 => {
                StateVector::pair(1.0, if x[0] < 0.0 { -1.0 } else { 1.0 })
            }
            InitialCondition::Burgers2DCosBump { r_max } => {
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt().min(r_max);
                let u = ((8.0 * std::f64::consts::PI * r).cos() + 1.0) * r.exp() / (1.0 + r.exp());
                StateVector::scalar(u)
            }
            InitialCondition::Swe2DDamBreak { h_inner, h_outer, center, radius } => {
                let dx = x[0] - center[0];
                let dy = x[1] - center[1];
                let h = if dx * dx + dy * dy <= radius * radius { h_inner } else { h_outer };
                StateVector::triple(h, 0.0, 0.0)
            }
        }
    }
}

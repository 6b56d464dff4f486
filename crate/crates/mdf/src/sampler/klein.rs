//! The classical "bottle" immersion of the Klein bottle in R^3 and the
//! quadrature tables used to sample it.
//!
//! With `r(u) = 4 (1 - cos(u) / 2)`, the immersion over
//! `(u, v) in [0, 2pi)^2` is
//!
//! ```text
//! 0 <= u < pi:   x = 6 cos u (1 + sin u) + r cos u cos v
//!                y = 16 sin u + r sin u cos v
//! pi <= u < 2pi: x = 6 cos u (1 + sin u) - r cos v
//!                y = 16 sin u
//! both:          z = r sin v
//! ```
//!
//! The two pieces agree at u = pi, and the parameterization closes up as a
//! Klein bottle via the orientation-reversing identification in v at
//! u = 2pi. The surface-area element `J(u, v) = |sigma_u x sigma_v|` below
//! uses the analytic partial derivatives of these formulas.

use std::f64::consts::PI;
use std::sync::OnceLock;

const TWO_PI: f64 = 2.0 * PI;

/// Maps parameters to a point of the immersed surface.
pub fn immerse(u: f64, v: f64) -> [f64; 3] {
    let r = 4.0 - 2.0 * u.cos();
    let (su, cu) = u.sin_cos();
    let (sv, cv) = v.sin_cos();
    if u < PI {
        [
            6.0 * cu * (1.0 + su) + r * cu * cv,
            16.0 * su + r * su * cv,
            r * sv,
        ]
    } else {
        [6.0 * cu * (1.0 + su) - r * cv, 16.0 * su, r * sv]
    }
}

/// Analytic partial derivatives (sigma_u, sigma_v) of the immersion.
pub fn partials(u: f64, v: f64) -> ([f64; 3], [f64; 3]) {
    let (su, cu) = u.sin_cos();
    let (sv, cv) = v.sin_cos();
    let r = 4.0 - 2.0 * cu;
    let dr = 2.0 * su;
    if u < PI {
        let du = [
            -6.0 * su * (1.0 + su) + 6.0 * cu * cu + (dr * cu - r * su) * cv,
            16.0 * cu + (dr * su + r * cu) * cv,
            dr * sv,
        ];
        let dv = [-r * cu * sv, -r * su * sv, r * cv];
        (du, dv)
    } else {
        let du = [
            -6.0 * su * (1.0 + su) + 6.0 * cu * cu - dr * cv,
            16.0 * cu,
            dr * sv,
        ];
        let dv = [r * sv, 0.0, r * cv];
        (du, dv)
    }
}

/// Surface-area element `|sigma_u x sigma_v|`.
pub fn jacobian(u: f64, v: f64) -> f64 {
    let (du, dv) = partials(u, v);
    let cx = du[1] * dv[2] - du[2] * dv[1];
    let cy = du[2] * dv[0] - du[0] * dv[2];
    let cz = du[0] * dv[1] - du[1] * dv[0];
    (cx * cx + cy * cy + cz * cz).sqrt()
}

/// Density weight of the sine-wave variant before normalization.
pub fn sine_weight(u: f64) -> f64 {
    0.5 * (1.0 + u.sin())
}

/// Speed along the cross curve {v = pi}.
pub fn cross_u_speed(u: f64) -> f64 {
    let (du, _) = partials(u, PI);
    (du[0] * du[0] + du[1] * du[1] + du[2] * du[2]).sqrt()
}

/// Speed along the cross curve {u = pi}: the circle of radius
/// r(pi) = 6, so the speed is constant.
pub fn cross_v_speed() -> f64 {
    6.0
}

/// Quadrature tables for the immersion, computed once per process on
/// fixed midpoint grids so every consumer sees identical constants.
#[derive(Debug)]
pub struct KleinTables {
    /// Surface area from midpoint quadrature of the Jacobian.
    pub area: f64,
    /// Grid maximum of the Jacobian, inflated by the 1.05 safety margin.
    pub jacobian_envelope: f64,
    /// Grid maximum of Jacobian * sine weight, inflated by 1.05.
    pub sine_envelope: f64,
    /// Length of the cross curve {u = pi} (a circle of radius 6).
    pub cross_v_length: f64,
    /// Length of the cross curve {v = pi}.
    pub cross_u_length: f64,
    /// Grid maximum of the {v = pi} curve speed, inflated by 1.05.
    pub cross_u_speed_envelope: f64,
}

const GRID_N: usize = 768;

fn compute_tables() -> KleinTables {
    let cell = TWO_PI / GRID_N as f64;
    let mut area = 0.0;
    let mut j_max: f64 = 0.0;
    let mut sine_max: f64 = 0.0;
    for i in 0..GRID_N {
        let u = (i as f64 + 0.5) * cell;
        for j in 0..GRID_N {
            let v = (j as f64 + 0.5) * cell;
            let jac = jacobian(u, v);
            area += jac;
            j_max = j_max.max(jac);
            sine_max = sine_max.max(jac * sine_weight(u));
        }
    }
    area *= cell * cell;

    let mut cross_u_length = 0.0;
    let mut speed_max: f64 = 0.0;
    for i in 0..(GRID_N * GRID_N / 64) {
        let u = (i as f64 + 0.5) * TWO_PI / (GRID_N * GRID_N / 64) as f64;
        let s = cross_u_speed(u);
        cross_u_length += s;
        speed_max = speed_max.max(s);
    }
    cross_u_length *= TWO_PI / (GRID_N * GRID_N / 64) as f64;

    KleinTables {
        area,
        jacobian_envelope: 1.05 * j_max,
        sine_envelope: 1.05 * sine_max,
        cross_v_length: TWO_PI * 6.0,
        cross_u_length,
        cross_u_speed_envelope: 1.05 * speed_max,
    }
}

pub fn tables() -> &'static KleinTables {
    static TABLES: OnceLock<KleinTables> = OnceLock::new();
    TABLES.get_or_init(compute_tables)
}

/// Quadrature mass of the parameter region `[u0, u1] x [v0, v1]` under the
/// Jacobian; test oracle for region counts.
pub fn region_mass(u0: f64, u1: f64, v0: f64, v1: f64) -> f64 {
    let n = 512;
    let du = (u1 - u0) / n as f64;
    let dv = (v1 - v0) / n as f64;
    let mut mass = 0.0;
    for i in 0..n {
        let u = u0 + (i as f64 + 0.5) * du;
        for j in 0..n {
            let v = v0 + (j as f64 + 0.5) * dv;
            mass += jacobian(u, v);
        }
    }
    mass * du * dv
}

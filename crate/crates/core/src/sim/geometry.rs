//! Square region with wrap-around (minimal image) distances.
//!
//! Coordinates are stored as fixed-point `u64` fractions of the side, so the
//! torus wrap is plain wrapping integer arithmetic and displacements are
//! exactly invariant under translation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusPoint {
    pub x: u64,
    pub y: u64,
}

impl TorusPoint {
    /// Translate by a grid offset, wrapping around the torus.
    pub fn translated(self, by: TorusPoint) -> TorusPoint {
        TorusPoint {
            x: self.x.wrapping_add(by.x),
            y: self.y.wrapping_add(by.y),
        }
    }
}

const GRID: f64 = 18_446_744_073_709_551_616.0; // 2^64

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Torus {
    side: f64,
    metres_per_unit: f64,
}

impl Torus {
    pub fn new(side: f64) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::invalid("area_side", format!("{side} m must be positive")));
        }
        Ok(Self {
            side,
            metres_per_unit: side / GRID,
        })
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    /// Grid point nearest to `(x, y)` metres, wrapped into the square.
    pub fn point(&self, x: f64, y: f64) -> TorusPoint {
        TorusPoint {
            x: self.to_units(x),
            y: self.to_units(y),
        }
    }

    fn to_units(&self, v: f64) -> u64 {
        let frac = (v / self.side).rem_euclid(1.0);
        // `as` saturates, and a fraction that rounds up to 1.0 wraps to 0
        let units = (frac * GRID).round();
        if units >= GRID {
            0
        } else {
            units as u64
        }
    }

    /// Position in metres within `[0, side)`.
    pub fn coords(&self, p: TorusPoint) -> (f64, f64) {
        (p.x as f64 * self.metres_per_unit, p.y as f64 * self.metres_per_unit)
    }

    /// Minimal-image displacement `to - from` in metres.
    #[inline]
    pub fn displacement(&self, from: TorusPoint, to: TorusPoint) -> (f64, f64) {
        let dx = to.x.wrapping_sub(from.x) as i64 as f64;
        let dy = to.y.wrapping_sub(from.y) as i64 as f64;
        (dx * self.metres_per_unit, dy * self.metres_per_unit)
    }

    pub fn distance(&self, a: TorusPoint, b: TorusPoint) -> f64 {
        let (dx, dy) = self.displacement(a, b);
        dx.hypot(dy)
    }

    /// `p` moved by `(dx, dy)` metres; offsets must be below half the side.
    pub fn offset(&self, p: TorusPoint, dx: f64, dy: f64) -> TorusPoint {
        let ux = (dx / self.metres_per_unit).round() as i64;
        let uy = (dy / self.metres_per_unit).round() as i64;
        TorusPoint {
            x: p.x.wrapping_add_signed(ux),
            y: p.y.wrapping_add_signed(uy),
        }
    }
}

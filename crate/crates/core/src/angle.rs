//! Measurement and preparation angles restricted to multiples of π/4.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `e^{ikπ/4}` for k in 0..8.
const PHASES: [Complex64; 8] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(H, H),
    Complex64::new(0.0, 1.0),
    Complex64::new(-H, H),
    Complex64::new(-1.0, 0.0),
    Complex64::new(-H, -H),
    Complex64::new(0.0, -1.0),
    Complex64::new(H, -H),
];

/// An element of ℤ₈, read as the angle `index · π/4`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(u8);

impl Angle {
    pub const ZERO: Angle = Angle(0);
    pub const HALF_PI: Angle = Angle(2);
    pub const PI: Angle = Angle(4);

    /// Reduces `index` mod 8.
    pub const fn new(index: u8) -> Self {
        Angle(index % 8)
    }

    pub const fn index(self) -> u8 {
        self.0
    }

    /// `π` when `bit` is set, zero otherwise.
    pub const fn pi_if(bit: bool) -> Self {
        if bit {
            Angle::PI
        } else {
            Angle::ZERO
        }
    }

    /// `-self` when `bit` is set.
    pub fn negate_if(self, bit: bool) -> Self {
        if bit {
            -self
        } else {
            self
        }
    }

    pub fn radians(self) -> f64 {
        f64::from(self.0) * std::f64::consts::FRAC_PI_4
    }

    /// `e^{iθ}` from the precomputed table.
    pub fn phase(self) -> Complex64 {
        PHASES[self.0 as usize]
    }

    pub fn all() -> impl Iterator<Item = Angle> {
        (0..8).map(Angle)
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle((self.0 + rhs.0) % 8)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        Angle((self.0 + 8 - rhs.0) % 8)
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle((8 - self.0) % 8)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}π/4", self.0)
    }
}

impl TryFrom<u8> for Angle {
    type Error = u8;
    fn try_from(value: u8) -> Result<Self, u8> {
        if value < 8 {
            Ok(Angle(value))
        } else {
            Err(value)
        }
    }
}

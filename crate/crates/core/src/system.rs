//! Family descriptors and momentum-map values shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Ellipsoidal,
    Prolate,
    Oblate,
    Lame,
    Spherical23,
    Cylindrical,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Ellipsoidal,
        Family::Prolate,
        Family::Oblate,
        Family::Lame,
        Family::Spherical23,
        Family::Cylindrical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Ellipsoidal => "ellipsoidal",
            Family::Prolate => "prolate",
            Family::Oblate => "oblate",
            Family::Lame => "lame",
            Family::Spherical23 => "spherical",
            Family::Cylindrical => "cylindrical",
        }
    }

    /// Labels of the two reduced integrals, in `IntegralValues` order.
    pub fn integral_names(self) -> [&'static str; 2] {
        match self {
            Family::Ellipsoidal => ["eta1", "eta2"],
            Family::Prolate => ["l23", "g_pro"],
            Family::Oblate => ["l34", "g_obl"],
            Family::Lame => ["f_lame", "g_lame"],
            Family::Spherical23 => ["l34", "g23"],
            Family::Cylindrical => ["l12", "l34"],
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ellipsoidal" => Ok(Family::Ellipsoidal),
            "prolate" => Ok(Family::Prolate),
            "oblate" => Ok(Family::Oblate),
            "lame" | "lamé" => Ok(Family::Lame),
            "spherical" | "spherical23" => Ok(Family::Spherical23),
            "cylindrical" => Ok(Family::Cylindrical),
            other => Err(Error::Domain(format!("unknown family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Params {
    Ellipsoidal([f64; 4]),
    Prolate { b: f64 },
    Oblate { a: f64 },
    Lame([f64; 3]),
    Spherical23,
    Cylindrical,
}

/// One of the six separable families together with its Casimir level 2h.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    params: Params,
    two_h: f64,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1])
}

impl SystemSpec {
    pub fn new(params: Params) -> Result<Self> {
        match params {
            Params::Ellipsoidal(e) if !strictly_increasing(&e) => {
                return Err(Error::Ordering(format!(
                    "e1 < e2 < e3 < e4 required, got {e:?}"
                )))
            }
            Params::Prolate { b } if !(b > 1.0 && b.is_finite()) => {
                return Err(Error::Ordering(format!("b > 1 required, got {b}")))
            }
            Params::Oblate { a } if !(a > 1.0 && a.is_finite()) => {
                return Err(Error::Ordering(format!("a > 1 required, got {a}")))
            }
            Params::Lame(f) if !strictly_increasing(&f) => {
                return Err(Error::Ordering(format!("f1 < f2 < f3 required, got {f:?}")))
            }
            _ => {}
        }
        Ok(SystemSpec { params, two_h: 1.0 })
    }

    pub fn ellipsoidal(e: [f64; 4]) -> Result<Self> {
        Self::new(Params::Ellipsoidal(e))
    }

    pub fn prolate(b: f64) -> Result<Self> {
        Self::new(Params::Prolate { b })
    }

    pub fn oblate(a: f64) -> Result<Self> {
        Self::new(Params::Oblate { a })
    }

    pub fn lame(f: [f64; 3]) -> Result<Self> {
        Self::new(Params::Lame(f))
    }

    pub fn spherical23() -> Self {
        SystemSpec { params: Params::Spherical23, two_h: 1.0 }
    }

    pub fn cylindrical() -> Self {
        SystemSpec { params: Params::Cylindrical, two_h: 1.0 }
    }

    /// Sets the Casimir level 2h.
    pub fn with_level(mut self, two_h: f64) -> Result<Self> {
        if !(two_h > 0.0 && two_h.is_finite()) {
            return Err(Error::Domain(format!("casimir level 2h must be positive, got {two_h}")));
        }
        self.two_h = two_h;
        Ok(self)
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn two_h(&self) -> f64 {
        self.two_h
    }

    pub fn family(&self) -> Family {
        match self.params {
            Params::Ellipsoidal(_) => Family::Ellipsoidal,
            Params::Prolate { .. } => Family::Prolate,
            Params::Oblate { .. } => Family::Oblate,
            Params::Lame(_) => Family::Lame,
            Params::Spherical23 => Family::Spherical23,
            Params::Cylindrical => Family::Cylindrical,
        }
    }

    /// The ellipsoidal parameters, or an error for the other families.
    pub fn ellipsoidal_params(&self) -> Result<[f64; 4]> {
        match self.params {
            Params::Ellipsoidal(e) => Ok(e),
            _ => Err(Error::Unsupported(format!(
                "{} spec where an ellipsoidal one is required",
                self.family().name()
            ))),
        }
    }

    /// Pole positions of the family seen as an ellipsoidal system with
    /// coincident parameters. Lame and the corner families have none.
    pub fn pole_spectrum(&self) -> Option<[f64; 4]> {
        match self.params {
            Params::Ellipsoidal(e) => Some(e),
            Params::Prolate { b } => Some([0.0, 1.0, 1.0, b]),
            Params::Oblate { a } => Some([0.0, 1.0, a, a]),
            _ => None,
        }
    }
}

/// A point in the image of the momentum map, in the family's own integral
/// order (see [`Family::integral_names`]), at Casimir level 2h.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralValues {
    pub first: f64,
    pub second: f64,
    pub two_h: f64,
}

impl IntegralValues {
    pub fn new(first: f64, second: f64) -> Self {
        IntegralValues { first, second, two_h: 1.0 }
    }

    pub fn at_level(first: f64, second: f64, two_h: f64) -> Self {
        IntegralValues { first, second, two_h }
    }
}

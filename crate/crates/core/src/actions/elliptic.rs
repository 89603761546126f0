//! Complete elliptic integrals of the first and third kind in Carlson form.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EllipticKind {
    K,
    Pi,
}

/// K(k) and Pi(alpha, k) at modulus k and characteristic alpha.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticValue {
    pub k_value: f64,
    pub pi_value: f64,
    pub modulus: f64,
    pub characteristic: f64,
}

fn carlson(r: std::result::Result<f64, &'static str>) -> Result<f64> {
    r.map_err(|e| Error::Domain(format!("Carlson integral: {e}")))
}

/// K(k) = R_F(0, 1 - k^2, 1) and
/// Pi(n, k) = K(k) + n/3 R_J(0, 1 - k^2, 1, 1 - n).
pub fn complete_elliptic(kind: EllipticKind, modulus: f64, characteristic: Option<f64>) -> Result<f64> {
    if !(0.0..1.0).contains(&modulus) {
        return domain(format!("modulus {modulus} outside [0, 1)"));
    }
    let kc2 = 1.0 - modulus * modulus;
    let k = carlson(ellip::elliprf(0.0, kc2, 1.0))?;
    match kind {
        EllipticKind::K => Ok(k),
        EllipticKind::Pi => {
            let n = characteristic.unwrap_or(0.0);
            if !(n < 1.0) {
                return domain(format!("characteristic {n} must be below 1"));
            }
            if n == 0.0 {
                return Ok(k);
            }
            Ok(k + n / 3.0 * carlson(ellip::elliprj(0.0, kc2, 1.0, 1.0 - n))?)
        }
    }
}

pub fn elliptic_value(modulus: f64, characteristic: f64) -> Result<EllipticValue> {
    Ok(EllipticValue {
        k_value: complete_elliptic(EllipticKind::K, modulus, None)?,
        pi_value: complete_elliptic(EllipticKind::Pi, modulus, Some(characteristic))?,
        modulus,
        characteristic,
    })
}

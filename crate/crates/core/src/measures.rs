//! Vector dissimilarities used as the error term between context averages.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MeasureKind {
    L1,
    #[default]
    L2,
    LInf,
    /// One minus the normalized scalar product.
    Cosine,
    Canberra,
    Tanimoto,
    /// `u pinv(v) + v pinv(u)`; an energy ratio rather than a distance.
    PinvEnergy,
}

impl MeasureKind {
    pub const DISTANCES: [MeasureKind; 6] = [
        MeasureKind::L1,
        MeasureKind::L2,
        MeasureKind::LInf,
        MeasureKind::Cosine,
        MeasureKind::Canberra,
        MeasureKind::Tanimoto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::L1 => "l1",
            MeasureKind::L2 => "l2",
            MeasureKind::LInf => "linf",
            MeasureKind::Cosine => "cosine",
            MeasureKind::Canberra => "canberra",
            MeasureKind::Tanimoto => "tanimoto",
            MeasureKind::PinvEnergy => "pinv-energy",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(MeasureKind::L1),
            "l2" => Ok(MeasureKind::L2),
            "linf" => Ok(MeasureKind::LInf),
            "cosine" => Ok(MeasureKind::Cosine),
            "canberra" => Ok(MeasureKind::Canberra),
            "tanimoto" => Ok(MeasureKind::Tanimoto),
            "pinv-energy" | "pinv" => Ok(MeasureKind::PinvEnergy),
            other => Err(Error::InvalidConfig(format!("unknown measure {other:?}"))),
        }
    }
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn dist(u: &[f64], v: &[f64], kind: MeasureKind) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    let diffs = u.iter().zip(v).map(|(a, b)| (a - b).abs());
    let d = match kind {
        MeasureKind::L1 => diffs.sum(),
        MeasureKind::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        MeasureKind::LInf => diffs.fold(0.0, f64::max),
        MeasureKind::Cosine => {
            let (nu, nv) = (dot(u, u).sqrt(), dot(v, v).sqrt());
            if nu == 0.0 || nv == 0.0 {
                0.0
            } else {
                1.0 - dot(u, v) / (nu * nv)
            }
        }
        MeasureKind::Canberra => u
            .iter()
            .zip(v)
            .map(|(a, b)| {
                let den = a.abs() + b.abs();
                if den == 0.0 {
                    0.0
                } else {
                    (a - b).abs() / den
                }
            })
            .sum(),
        MeasureKind::Tanimoto => {
            let uv = dot(u, v);
            let den = dot(u, u) + dot(v, v) - uv;
            if den == 0.0 {
                0.0
            } else {
                1.0 - uv / den
            }
        }
        MeasureKind::PinvEnergy => return pinv_energy(u, v),
    };
    Ok(d)
}

/// `E(u, v) = u pinv(v) + v pinv(u)` with `pinv(v) = v^T / (v . v)`.
///
/// Equals `c + 1/c` when `u = c v`, so 2 at equal energy and larger for any
/// energy ratio away from one.
pub fn pinv_energy(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    let (uu, vv) = (dot(u, u), dot(v, v));
    if uu == 0.0 || vv == 0.0 {
        return Err(Error::ZeroVector);
    }
    let uv = dot(u, v);
    Ok(uv / vv + uv / uu)
}

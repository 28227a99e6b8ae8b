//! Shape functions for inhomogeneous exponential LPP with finitely supported parameter measures.

use serde::{Deserialize, Serialize};

use crate::error::{LppError, Result};

/// Finite subprobability measure on the real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct FiniteMeasure {
    atoms: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for FiniteMeasure {
    type Error = LppError;
    fn try_from(atoms: Vec<(f64, f64)>) -> Result<Self> {
        FiniteMeasure::new(atoms)
    }
}

impl From<FiniteMeasure> for Vec<(f64, f64)> {
    fn from(m: FiniteMeasure) -> Self {
        m.atoms
    }
}

impl FiniteMeasure {
    /// Atoms as `(location, mass)`.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(LppError::invalid("a measure needs at least one atom"));
        }
        if atoms.iter().any(|&(l, m)| !l.is_finite() || !(m > 0.0 && m.is_finite())) {
            return Err(LppError::invalid("atom locations must be finite and masses positive"));
        }
        atoms.sort_by(|x, y| x.0.total_cmp(&y.0));
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(LppError::invalid("atom locations must be distinct"));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if total > 1.0 + 1e-12 {
            return Err(LppError::invalid(format!("total mass {total} exceeds 1")));
        }
        Ok(FiniteMeasure { atoms })
    }

    pub fn dirac(location: f64) -> Self {
        FiniteMeasure { atoms: vec![(location, 1.0)] }
    }

    /// Empirical measure of a parameter sequence.
    pub fn empirical(values: &[f64]) -> Result<Self> {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let w = 1.0 / values.len() as f64;
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        for v in sorted {
            match atoms.last_mut() {
                Some(last) if last.0 == v => last.1 += w,
                _ => atoms.push((v, w)),
            }
        }
        FiniteMeasure::new(atoms)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Infimum of the support.
    pub fn min_location(&self) -> f64 {
        self.atoms[0].0
    }
}

/// `A(z) = Σ m / (a + z)`, defined for `z > -min supp α`.
pub fn a_integral(alpha: &FiniteMeasure, z: f64) -> Result<f64> {
    if !(z > -alpha.min_location()) {
        return Err(LppError::domain(format!("A is defined for z > {}, got {z}", -alpha.min_location())));
    }
    Ok(alpha.atoms.iter().map(|&(a, m)| m / (a + z)).sum())
}

/// `B(z) = Σ m / (b - z)`, defined for `z < min supp β`.
pub fn b_integral(beta: &FiniteMeasure, z: f64) -> Result<f64> {
    if !(z < beta.min_location()) {
        return Err(LppError::domain(format!("B is defined for z < {}, got {z}", beta.min_location())));
    }
    Ok(beta.atoms.iter().map(|&(b, m)| m / (b - z)).sum())
}

fn second_moment(mu: &FiniteMeasure, shift: impl Fn(f64) -> f64) -> f64 {
    mu.atoms.iter().map(|&(x, m)| m / shift(x).powi(2)).sum()
}

/// `ρ(z) = Σ_β m / (b - z)^2  /  Σ_α m / (a + z)^2`, on `(-min supp α, min supp β)`.
pub fn rho(alpha: &FiniteMeasure, beta: &FiniteMeasure, z: f64) -> Result<f64> {
    if !(z > -alpha.min_location() && z < beta.min_location()) {
        return Err(LppError::domain(format!(
            "ρ is defined on ({}, {}), got {z}",
            -alpha.min_location(),
            beta.min_location()
        )));
    }
    Ok(second_moment(beta, |b| b - z) / second_moment(alpha, |a| a + z))
}

/// Limit measures plus the tail infima of the parameter sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawShape")]
pub struct ShapeProfile {
    alpha: FiniteMeasure,
    beta: FiniteMeasure,
    inf_a: f64,
    inf_b: f64,
}

#[derive(Deserialize)]
struct RawShape {
    alpha: FiniteMeasure,
    beta: FiniteMeasure,
    inf_a: f64,
    inf_b: f64,
}

impl TryFrom<RawShape> for ShapeProfile {
    type Error = LppError;
    fn try_from(r: RawShape) -> Result<Self> {
        ShapeProfile::new(r.alpha, r.beta, r.inf_a, r.inf_b)
    }
}

impl ShapeProfile {
    pub fn new(alpha: FiniteMeasure, beta: FiniteMeasure, inf_a: f64, inf_b: f64) -> Result<Self> {
        if !(inf_a + inf_b > 0.0) {
            return Err(LppError::invalid(format!("need inf_a + inf_b > 0, got {inf_a} + {inf_b}")));
        }
        if inf_a > alpha.min_location() || inf_b > beta.min_location() {
            return Err(LppError::invalid("tail infima cannot exceed the support infima"));
        }
        Ok(ShapeProfile { alpha, beta, inf_a, inf_b })
    }

    /// `α = δ_0`, `β = δ_1` with the given tail infima.
    pub fn homogeneous(inf_a: f64, inf_b: f64) -> Result<Self> {
        ShapeProfile::new(FiniteMeasure::dirac(0.0), FiniteMeasure::dirac(1.0), inf_a, inf_b)
    }

    pub fn alpha(&self) -> &FiniteMeasure {
        &self.alpha
    }

    pub fn beta(&self) -> &FiniteMeasure {
        &self.beta
    }

    pub fn inf_a(&self) -> f64 {
        self.inf_a
    }

    pub fn inf_b(&self) -> f64 {
        self.inf_b
    }

    fn rho_interior(&self, z: f64) -> f64 {
        second_moment(&self.beta, |b| b - z) / second_moment(&self.alpha, |a| a + z)
    }
}

/// `(c_ver, c_hor) = (ρ(-inf_a), ρ(inf_b))`; an α-atom at `inf_a` forces `c_ver = 0` and a
/// β-atom at `inf_b` forces `c_hor = ∞`.
pub fn critical_directions(profile: &ShapeProfile) -> (f64, f64) {
    let (ia, ib) = (profile.inf_a, profile.inf_b);
    let c_ver = if profile.alpha.atoms.iter().any(|&(a, _)| a == ia) {
        0.0
    } else {
        profile.rho_interior(-ia)
    };
    let c_hor = if profile.beta.atoms.iter().any(|&(b, _)| b == ib) {
        f64::INFINITY
    } else {
        profile.rho_interior(ib)
    };
    (c_ver, c_hor)
}

/// Shape minimiser: `-inf_a` for `r <= c_ver`, `inf_b` for `r >= c_hor`, `ρ^{-1}(r)` between.
pub fn zeta_ab(profile: &ShapeProfile, r: f64) -> Result<f64> {
    if r.is_nan() || r < 0.0 {
        return Err(LppError::invalid(format!("direction {r} must be nonnegative")));
    }
    let (c_ver, c_hor) = critical_directions(profile);
    if r <= c_ver {
        return Ok(-profile.inf_a);
    }
    if r >= c_hor {
        return Ok(profile.inf_b);
    }
    let (mut lo, mut hi) = (-profile.inf_a, profile.inf_b);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if profile.rho_interior(mid) < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `B(-min a)`: the almost-sure limit of `L_{(i,j),(m,n)} / n` as `n → ∞` with `m` fixed.
pub fn lln_slope_vertical(beta: &FiniteMeasure, min_a: f64) -> Result<f64> {
    b_integral(beta, -min_a)
}

//! Four-band tight-binding model of a quantum spin Hall device on a
//! rectangular lattice, with gate potentials and local Zeeman impurities.
//!
//! Basis ordering is spin ⊗ orbital: component c = 2·spin + orbital with
//! spin 0 = up, and the global index of component c on site (x, y) is
//! 4·(y·nx + x) + c. All positions and shape parameters are in nm,
//! energies in eV.

mod assemble;
mod bloch;

pub use assemble::{assemble, assemble_capped, SparseHamiltonian, DEFAULT_DIMENSION_CAP};
pub use bloch::{
    analytic_dispersion, bloch_hamiltonian, dispersion_levels, gamma5, gamma_x, gamma_y, hop_x,
    hop_y, onsite_block, zeeman_block,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BhzError {
    #[error("lattice constant must be positive, got {0}")]
    NonPositiveLatticeConstant(f64),
    #[error("parameter {name} is not finite")]
    NonFiniteParameter { name: &'static str },
    #[error("continuum map is degenerate: B = 0 leaves no hopping scale")]
    DegenerateContinuumMap,
    #[error("device needs nx, ny >= 2, got {nx} x {ny}")]
    GeometryTooSmall { nx: usize, ny: usize },
    #[error("gate potential is not finite")]
    NonFinitePotential,
    #[error("local field is invalid: {reason}")]
    InvalidLocalField { reason: &'static str },
    #[error("device dimension {dim} exceeds cap {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },
    #[error("shape parameter {name} must be positive, got {value}")]
    NonPositiveShape { name: &'static str, value: f64 },
}

/// Lattice-model parameters. `epsilon` and `lambda` may be zero (useful
/// degenerate limits); all entries must be finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BhzParams {
    pub epsilon: f64,
    pub mass: f64,
    pub lambda: f64,
    pub lattice_constant: f64,
}

impl BhzParams {
    pub fn new(epsilon: f64, mass: f64, lambda: f64, lattice_constant: f64) -> Result<Self, BhzError> {
        for (name, v) in [("epsilon", epsilon), ("mass", mass), ("lambda", lambda)] {
            if !v.is_finite() {
                return Err(BhzError::NonFiniteParameter { name });
            }
        }
        if !(lattice_constant > 0.0) || !lattice_constant.is_finite() {
            return Err(BhzError::NonPositiveLatticeConstant(lattice_constant));
        }
        Ok(BhzParams { epsilon, mass, lambda, lattice_constant })
    }

    /// HgTe/CdTe quantum well parameter set on a 0.65 nm grid.
    pub fn hgte() -> Self {
        continuum_map(0.55, -1.87, -0.0146, 0.65).expect("reference parameters are valid")
    }

    /// Inverse of [`continuum_map`]: (A, B, M_cont).
    pub fn continuum_params(&self) -> (f64, f64, f64) {
        (self.lambda, -self.epsilon / 2.0, self.mass - 2.0 * self.epsilon)
    }
}

/// Map continuum model coefficients (A, B, M_cont) onto lattice-model
/// parameters on a grid of spacing `a`: epsilon = -2B, mass = -4B + M_cont,
/// lambda = A.
pub fn continuum_map(a_coef: f64, b_coef: f64, m_cont: f64, a: f64) -> Result<BhzParams, BhzError> {
    for (name, v) in [("A", a_coef), ("B", b_coef), ("M_cont", m_cont)] {
        if !v.is_finite() {
            return Err(BhzError::NonFiniteParameter { name });
        }
    }
    if b_coef == 0.0 {
        return Err(BhzError::DegenerateContinuumMap);
    }
    BhzParams::new(-2.0 * b_coef, -4.0 * b_coef + m_cont, a_coef, a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeviceGeometry {
    pub nx: usize,
    pub ny: usize,
    pub boundary_x: Boundary,
    pub boundary_y: Boundary,
}

impl DeviceGeometry {
    pub fn new(nx: usize, ny: usize, boundary_x: Boundary, boundary_y: Boundary) -> Result<Self, BhzError> {
        if nx < 2 || ny < 2 {
            return Err(BhzError::GeometryTooSmall { nx, ny });
        }
        Ok(DeviceGeometry { nx, ny, boundary_x, boundary_y })
    }

    pub fn num_sites(&self) -> usize {
        self.nx * self.ny
    }

    /// Four components per site.
    pub fn dimension(&self) -> usize {
        4 * self.num_sites()
    }

    pub fn site_index(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.nx && y < self.ny);
        y * self.nx + x
    }
}

/// Half-plane kept by a half-disk, named by the direction of its interior
/// as seen from the disk center.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HalfDiskSide {
    PosX,
    NegX,
    PosY,
    NegY,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    /// Closed axis-aligned rectangle [x0, x1] x [y0, y1] in nm.
    Rectangle { x0: f64, y0: f64, x1: f64, y1: f64 },
    Disk { cx: f64, cy: f64, radius: f64 },
    HalfDisk { cx: f64, cy: f64, radius: f64, side: HalfDiskSide },
}

impl Shape {
    fn validate(&self) -> Result<(), BhzError> {
        let finite = |v: f64, name: &'static str| {
            if v.is_finite() { Ok(()) } else { Err(BhzError::NonFiniteParameter { name }) }
        };
        match *self {
            Shape::Rectangle { x0, y0, x1, y1 } => {
                finite(x0, "x0")?;
                finite(y0, "y0")?;
                finite(x1, "x1")?;
                finite(y1, "y1")
            }
            Shape::Disk { cx, cy, radius } | Shape::HalfDisk { cx, cy, radius, .. } => {
                finite(cx, "cx")?;
                finite(cy, "cy")?;
                if radius > 0.0 && radius.is_finite() {
                    Ok(())
                } else {
                    Err(BhzError::NonPositiveShape { name: "radius", value: radius })
                }
            }
        }
    }

    /// Site membership: the site center must lie inside the closed shape.
    pub fn contains(&self, px: f64, py: f64) -> bool {
        match *self {
            Shape::Rectangle { x0, y0, x1, y1 } => {
                let (xa, xb) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
                let (ya, yb) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
                px >= xa && px <= xb && py >= ya && py <= yb
            }
            Shape::Disk { cx, cy, radius } => {
                let (dx, dy) = (px - cx, py - cy);
                dx * dx + dy * dy <= radius * radius
            }
            Shape::HalfDisk { cx, cy, radius, side } => {
                let (dx, dy) = (px - cx, py - cy);
                if dx * dx + dy * dy > radius * radius {
                    return false;
                }
                match side {
                    HalfDiskSide::PosX => dx >= 0.0,
                    HalfDiskSide::NegX => dx <= 0.0,
                    HalfDiskSide::PosY => dy >= 0.0,
                    HalfDiskSide::NegY => dy <= 0.0,
                }
            }
        }
    }
}

/// Electrostatic gate: a scalar onsite energy added uniformly inside the
/// shape. Parts outside the device clip away by rasterization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateRegion {
    pub shape: Shape,
    pub potential: f64,
}

impl GateRegion {
    pub fn new(shape: Shape, potential: f64) -> Result<Self, BhzError> {
        shape.validate()?;
        if !potential.is_finite() {
            return Err(BhzError::NonFinitePotential);
        }
        Ok(GateRegion { shape, potential })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldProfile {
    /// Uniform inside a disk of the given radius (nm).
    Disk { radius: f64 },
    /// exp(-d^2 / 2 width^2) falloff from the center.
    Gaussian { width: f64 },
}

/// Local Zeeman impurity: energy b_vec · (sigma ⊗ I2) applied per site with
/// the profile weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalField {
    pub center: (f64, f64),
    pub profile: FieldProfile,
    pub b_vec: [f64; 3],
}

impl LocalField {
    pub fn new(center: (f64, f64), profile: FieldProfile, b_vec: [f64; 3]) -> Result<Self, BhzError> {
        if !center.0.is_finite() || !center.1.is_finite() {
            return Err(BhzError::InvalidLocalField { reason: "center not finite" });
        }
        if b_vec.iter().any(|b| !b.is_finite()) {
            return Err(BhzError::InvalidLocalField { reason: "b_vec not finite" });
        }
        let scale = match profile {
            FieldProfile::Disk { radius } => radius,
            FieldProfile::Gaussian { width } => width,
        };
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(BhzError::InvalidLocalField { reason: "profile scale must be positive" });
        }
        Ok(LocalField { center, profile, b_vec })
    }

    /// Zeeman weight at distance d from the center.
    pub fn weight(&self, d: f64) -> f64 {
        match self.profile {
            FieldProfile::Disk { radius } => {
                if d <= radius {
                    1.0
                } else {
                    0.0
                }
            }
            FieldProfile::Gaussian { width } => (-0.5 * (d / width) * (d / width)).exp(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continuum_map_reference_values() {
        let p = continuum_map(0.55, -1.87, -0.0146, 0.65).unwrap();
        assert!((p.epsilon - 3.74).abs() < 1e-12);
        assert!((p.mass - 7.4654).abs() < 1e-12);
        assert!((p.lambda - 0.55).abs() < 1e-12);
    }

    #[test]
    fn continuum_map_direct_substitution() {
        let p = continuum_map(0.0, -0.5, 0.0, 1.0).unwrap();
        assert_eq!(p.epsilon, 1.0);
        assert_eq!(p.mass, 2.0);
        assert_eq!(p.lambda, 0.0);
    }

    #[test]
    fn continuum_map_round_trip() {
        let p = BhzParams::hgte();
        let (a, b, m) = p.continuum_params();
        let q = continuum_map(a, b, m, p.lattice_constant).unwrap();
        assert!((q.epsilon - p.epsilon).abs() / p.epsilon.abs() < 1e-12);
        assert!((q.mass - p.mass).abs() / p.mass.abs() < 1e-12);
        assert!((q.lambda - p.lambda).abs() / p.lambda.abs() < 1e-12);
    }

    #[test]
    fn continuum_map_rejects_zero_b() {
        assert!(matches!(
            continuum_map(0.55, 0.0, 0.1, 0.65),
            Err(BhzError::DegenerateContinuumMap)
        ));
    }

    #[test]
    fn bar_lattice_constant_matches_site_count() {
        // 130 nm over 200 sites
        assert!((130.0 / 200.0 - BhzParams::hgte().lattice_constant).abs() < 1e-12);
    }

    #[test]
    fn geometry_rejects_thin_devices() {
        assert!(DeviceGeometry::new(1, 50, Boundary::Open, Boundary::Open).is_err());
        assert!(DeviceGeometry::new(4, 2, Boundary::Periodic, Boundary::Open).is_ok());
    }

    #[test]
    fn half_disk_membership() {
        let s = Shape::HalfDisk { cx: 0.0, cy: 0.0, radius: 2.0, side: HalfDiskSide::PosY };
        assert!(s.contains(0.0, 1.5));
        assert!(s.contains(1.0, 0.0));
        assert!(!s.contains(0.0, -0.5));
        assert!(!s.contains(0.0, 2.5));
    }

    #[test]
    fn field_profiles_weight() {
        let f = LocalField::new((0.0, 0.0), FieldProfile::Disk { radius: 1.0 }, [0.0, 0.0, 0.1]).unwrap();
        assert_eq!(f.weight(0.5), 1.0);
        assert_eq!(f.weight(1.5), 0.0);
        let g =
            LocalField::new((0.0, 0.0), FieldProfile::Gaussian { width: 2.0 }, [0.1, 0.0, 0.0]).unwrap();
        assert!((g.weight(2.0) - (-0.5f64).exp()).abs() < 1e-15);
    }
}

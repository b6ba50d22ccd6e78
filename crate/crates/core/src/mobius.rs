//! Linear fractional transformations of the Riemann sphere and their
//! behaviour on the unit disk.
//!
//! A [`MobiusMap`] stores the coefficients of `z ↦ (az+b)/(cz+d)` scaled so
//! that the largest modulus among them is one. All geometric predicates use
//! [`DEFAULT_TOL`] unless a tolerance is passed explicitly.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance shared by every geometric predicate in this module.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest iterate examined when looking for the order of an elliptic map.
pub const MAX_ORDER: u32 = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MobiusError {
    #[error("degenerate coefficients: |ad - bc| = {0:e} is numerically zero")]
    Degenerate(f64),
    #[error("coefficient overflow while composing maps")]
    NumericOverflow,
    #[error("derivative requested at the pole {0}")]
    PoleDerivative(Complex64),
    #[error("involution parameter must satisfy |a| < 1, got |a| = {0}")]
    OutsideDisk(f64),
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(re: f64, im: f64) -> Self {
        SpherePoint::Finite(Complex64::new(re, im))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    /// Modulus, with `f64::INFINITY` for the point at infinity.
    pub fn modulus(&self) -> f64 {
        match self {
            SpherePoint::Finite(z) => z.norm(),
            SpherePoint::Infinity => f64::INFINITY,
        }
    }

    /// Chordal distance on the sphere; bounded by 2 and finite at infinity.
    pub fn chordal_distance(&self, other: &SpherePoint) -> f64 {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
            (SpherePoint::Finite(z), SpherePoint::Infinity)
            | (SpherePoint::Infinity, SpherePoint::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
            (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
            }
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::Finite(z)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{z}"),
            SpherePoint::Infinity => write!(f, "∞"),
        }
    }
}

/// Fixed-point configuration of a linear fractional map on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FixedPointData {
    DistinctPair(SpherePoint, SpherePoint),
    Repeated(SpherePoint),
    Identity,
}

impl FixedPointData {
    pub fn points(&self) -> Vec<SpherePoint> {
        match *self {
            FixedPointData::DistinctPair(p, q) => vec![p, q],
            FixedPointData::Repeated(p) => vec![p],
            FixedPointData::Identity => Vec::new(),
        }
    }
}

/// Order of an elliptic automorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(q) => write!(f, "{q}"),
            Order::Infinite => write!(f, "∞"),
        }
    }
}

/// Geometric class of a linear fractional map relative to the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SymbolClass {
    /// The identity map, which fixes every point.
    RotationLike,
    EllipticAut { order: Order, center: Complex64 },
    HyperbolicAut,
    ParabolicAut,
    NonAutInteriorFixed { center: Complex64 },
    NonAutBoundaryFixed,
    NotSelfMap,
}

impl SymbolClass {
    pub fn is_automorphism(&self) -> bool {
        matches!(
            self,
            SymbolClass::RotationLike
                | SymbolClass::EllipticAut { .. }
                | SymbolClass::HyperbolicAut
                | SymbolClass::ParabolicAut
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            SymbolClass::RotationLike => "rotation_like",
            SymbolClass::EllipticAut { .. } => "elliptic_aut",
            SymbolClass::HyperbolicAut => "hyperbolic_aut",
            SymbolClass::ParabolicAut => "parabolic_aut",
            SymbolClass::NonAutInteriorFixed { .. } => "non_aut_interior_fixed",
            SymbolClass::NonAutBoundaryFixed => "non_aut_boundary_fixed",
            SymbolClass::NotSelfMap => "not_self_map",
        }
    }
}

/// Image of the unit circle under a map: a circle or a straight line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryImage {
    Circle { center: Complex64, radius: f64 },
    Line,
}

/// Outcome of the self-map test together with the tangency flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfMapTest {
    pub is_self_map: bool,
    /// `|m| + r` lies within tolerance of one: the image touches the circle.
    pub boundary_contact: bool,
    pub image: BoundaryImage,
}

/// `z ↦ (az+b)/(cz+d)` with `ad − bc ≠ 0`, normalized to max-modulus one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl MobiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, MobiusError> {
        let scale = [a, b, c, d].iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        if !scale.is_finite() {
            return Err(MobiusError::NumericOverflow);
        }
        if scale == 0.0 {
            return Err(MobiusError::Degenerate(0.0));
        }
        let (a, b, c, d) = (a / scale, b / scale, c / scale, d / scale);
        let det = a * d - b * c;
        if det.norm() <= DEFAULT_TOL {
            return Err(MobiusError::Degenerate(det.norm()));
        }
        Ok(MobiusMap { a, b, c, d })
    }

    /// Convenience constructor from real coefficients.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MobiusError> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        MobiusMap { a: ONE, b: ZERO, c: ZERO, d: ONE }
    }

    /// `z ↦ s·z`.
    pub fn scaling(s: Complex64) -> Result<Self, MobiusError> {
        Self::new(s, ZERO, ZERO, ONE)
    }

    /// Rotation by `e^{2πi·p/q}`.
    pub fn rotation(p: i64, q: u32) -> Self {
        let theta = 2.0 * PI * p as f64 / q as f64;
        Self::scaling(Complex64::from_polar(1.0, theta)).expect("unit rotation is invertible")
    }

    /// `z ↦ s·z + t`.
    pub fn affine(s: Complex64, t: Complex64) -> Result<Self, MobiusError> {
        Self::new(s, t, ZERO, ONE)
    }

    /// `z ↦ bz/(1 − cz)`, the general linear fractional map fixing zero.
    pub fn fixing_zero(b: Complex64, c: Complex64) -> Result<Self, MobiusError> {
        Self::new(b, ZERO, -c, ONE)
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Finite pole `−d/c`, if any.
    pub fn pole(&self) -> Option<Complex64> {
        if self.c.norm() <= DEFAULT_TOL {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    pub fn compose(&self, g: &MobiusMap) -> Result<MobiusMap, MobiusError> {
        let f = self;
        MobiusMap::new(
            f.a * g.a + f.b * g.c,
            f.a * g.b + f.b * g.d,
            f.c * g.a + f.d * g.c,
            f.c * g.b + f.d * g.d,
        )
        .map_err(|e| match e {
            MobiusError::Degenerate(_) => MobiusError::NumericOverflow,
            other => other,
        })
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap::new(self.d, -self.b, -self.c, self.a).expect("inverse of a valid map is valid")
    }

    /// `n`-th iterate; `iterate(0)` is the identity.
    pub fn iterate(&self, n: u32) -> Result<MobiusMap, MobiusError> {
        let mut out = MobiusMap::identity();
        for _ in 0..n {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    pub fn apply(&self, z: SpherePoint) -> SpherePoint {
        match z {
            SpherePoint::Infinity => {
                if self.c.norm() == 0.0 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.a / self.c)
                }
            }
            SpherePoint::Finite(z) => {
                let num = self.a * z + self.b;
                let den = self.c * z + self.d;
                let scale = self.c.norm() * z.norm() + self.d.norm();
                if den.norm() <= 1e-15 * scale {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(num / den)
                }
            }
        }
    }

    /// Evaluation at a finite point known not to be the pole.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn derivative_at(&self, z: Complex64) -> Result<Complex64, MobiusError> {
        let den = self.c * z + self.d;
        if self.at_pole(z) {
            return Err(MobiusError::PoleDerivative(z));
        }
        Ok(self.determinant() / (den * den))
    }

    pub fn second_derivative_at(&self, z: Complex64) -> Result<Complex64, MobiusError> {
        let den = self.c * z + self.d;
        if self.at_pole(z) {
            return Err(MobiusError::PoleDerivative(z));
        }
        Ok(-2.0 * self.c * self.determinant() / (den * den * den))
    }

    fn at_pole(&self, z: Complex64) -> bool {
        let den = self.c * z + self.d;
        den.norm() <= 1e-15 * (self.c.norm() * z.norm() + self.d.norm())
    }

    /// Coefficients proportional to those of the identity.
    pub fn is_identity(&self) -> bool {
        self.b.norm() <= DEFAULT_TOL && self.c.norm() <= DEFAULT_TOL && (self.a - self.d).norm() <= DEFAULT_TOL
    }

    pub fn fixed_points(&self) -> FixedPointData {
        if self.is_identity() {
            return FixedPointData::Identity;
        }
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        if c.norm() <= DEFAULT_TOL {
            // affine: (a − d) z = −b, with ∞ always fixed
            if (a - d).norm() <= DEFAULT_TOL {
                return FixedPointData::Repeated(SpherePoint::Infinity);
            }
            return FixedPointData::DistinctPair(SpherePoint::Finite(b / (d - a)), SpherePoint::Infinity);
        }
        // c z² + (d − a) z − b = 0
        let p = d - a;
        let disc = p * p + 4.0 * b * c;
        if disc.norm() <= DEFAULT_TOL {
            return FixedPointData::Repeated(SpherePoint::Finite((a - d) / (2.0 * c)));
        }
        let sq = disc.sqrt();
        let (plus, minus) = (p + sq, p - sq);
        let q = if plus.norm() >= minus.norm() { -0.5 * plus } else { -0.5 * minus };
        let r1 = q / c;
        let r2 = -b / q;
        FixedPointData::DistinctPair(SpherePoint::Finite(r1), SpherePoint::Finite(r2))
    }

    /// Image of the unit circle, from the images of 1, i and −1.
    pub fn boundary_image(&self) -> BoundaryImage {
        if let Some(p) = self.pole() {
            if (p.norm() - 1.0).abs() <= DEFAULT_TOL {
                return BoundaryImage::Line;
            }
        }
        let pts = [ONE, Complex64::i(), -ONE].map(|z| self.apply(z.into()));
        let [Some(z1), Some(z2), Some(z3)] = pts.map(|p| p.as_finite()) else {
            return BoundaryImage::Line;
        };
        match circumcircle(z1, z2, z3) {
            Some((center, radius)) => BoundaryImage::Circle { center, radius },
            None => BoundaryImage::Line,
        }
    }

    pub fn self_map_test(&self, tol: f64) -> SelfMapTest {
        let image = self.boundary_image();
        let BoundaryImage::Circle { center, radius } = image else {
            return SelfMapTest { is_self_map: false, boundary_contact: false, image };
        };
        let reach = center.norm() + radius;
        // the disk maps to the inside of the image circle iff 0 does
        let inside = match self.apply(SpherePoint::Finite(ZERO)) {
            SpherePoint::Finite(w) => (w - center).norm() < radius,
            SpherePoint::Infinity => false,
        };
        SelfMapTest {
            is_self_map: inside && reach <= 1.0 + tol,
            boundary_contact: (reach - 1.0).abs() <= tol,
            image,
        }
    }

    pub fn is_disk_selfmap(&self) -> bool {
        self.self_map_test(DEFAULT_TOL).is_self_map
    }

    /// Self-map whose boundary image is the unit circle itself.
    pub fn is_disk_automorphism(&self) -> bool {
        let t = self.self_map_test(DEFAULT_TOL);
        match t.image {
            BoundaryImage::Circle { center, radius } if t.is_self_map => {
                center.norm() <= DEFAULT_TOL && (radius - 1.0).abs() <= DEFAULT_TOL
            }
            _ => false,
        }
    }

    pub fn classify(&self) -> SymbolClass {
        if !self.is_disk_selfmap() {
            return SymbolClass::NotSelfMap;
        }
        let fixed = self.fixed_points();
        if matches!(fixed, FixedPointData::Identity) {
            return SymbolClass::RotationLike;
        }
        let interior = fixed
            .points()
            .into_iter()
            .filter_map(|p| p.as_finite())
            .find(|z| z.norm() < 1.0 - DEFAULT_TOL);
        if self.is_disk_automorphism() {
            if let Some(center) = interior {
                let multiplier = self.derivative_at(center).expect("interior fixed point is not a pole");
                return SymbolClass::EllipticAut { order: multiplier_order(multiplier, DEFAULT_TOL), center };
            }
            return match fixed {
                FixedPointData::Repeated(_) => SymbolClass::ParabolicAut,
                _ => SymbolClass::HyperbolicAut,
            };
        }
        match interior {
            Some(center) => SymbolClass::NonAutInteriorFixed { center },
            None => SymbolClass::NonAutBoundaryFixed,
        }
    }

    /// `φ_a ∘ self ∘ φ_a`.
    pub fn conjugate_by_involution(&self, a: Complex64) -> Result<MobiusMap, MobiusError> {
        let phi = involution(a)?;
        phi.compose(self)?.compose(&phi)
    }

    /// Pointwise distance to another map, measured chordally at `points`.
    pub fn chordal_gap(&self, other: &MobiusMap, points: &[SpherePoint]) -> f64 {
        points
            .iter()
            .map(|&z| self.apply(z).chordal_distance(&other.apply(z)))
            .fold(0.0, f64::max)
    }

    /// Maps `z` by `λ·(a,b,c,d)`; the result denotes the same transformation.
    pub fn rescaled(&self, lambda: Complex64) -> Result<MobiusMap, MobiusError> {
        MobiusMap::new(lambda * self.a, lambda * self.b, lambda * self.c, lambda * self.d)
    }
}

/// `re`, `im i` or `re±im i`, dropping parts below `1e-15` of the modulus.
fn fmt_complex(z: Complex64) -> String {
    let cut = 1e-15 * z.norm();
    let (re, im) = (if z.re.abs() <= cut { 0.0 } else { z.re }, if z.im.abs() <= cut { 0.0 } else { z.im });
    match (re == 0.0, im == 0.0) {
        (_, true) => format!("{}", re + 0.0),
        (true, false) => format!("{im}i"),
        (false, false) => format!("{re}{}{}i", if im < 0.0 { "-" } else { "+" }, im.abs()),
    }
}

impl fmt::Display for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.coefficients().map(fmt_complex);
        write!(f, "(({a})z + ({b})) / (({c})z + ({d}))")
    }
}

/// The involutive automorphism `φ_a(z) = (a − z)/(1 − āz)` exchanging 0 and `a`.
pub fn involution(a: Complex64) -> Result<MobiusMap, MobiusError> {
    if a.norm() >= 1.0 {
        return Err(MobiusError::OutsideDisk(a.norm()));
    }
    MobiusMap::new(-ONE, a, -a.conj(), ONE)
}

/// The elliptic automorphism of order `q` centred at `a`:
/// `φ_a ∘ (e^{2πi p/q} z) ∘ φ_a`.
pub fn elliptic(a: Complex64, p: i64, q: u32) -> Result<MobiusMap, MobiusError> {
    MobiusMap::rotation(p, q).conjugate_by_involution(a)
}

/// Smallest `q ≤ MAX_ORDER` with `|λ^q − 1| ≤ tol`.
pub fn multiplier_order(lambda: Complex64, tol: f64) -> Order {
    let mut power = ONE;
    for q in 1..=MAX_ORDER {
        power *= lambda;
        if (power - ONE).norm() <= tol {
            return Order::Finite(q);
        }
    }
    Order::Infinite
}

fn circumcircle(z1: Complex64, z2: Complex64, z3: Complex64) -> Option<(Complex64, f64)> {
    let (b, c) = (z2 - z1, z3 - z1);
    let cross = b.re * c.im - b.im * c.re;
    let scale = b.norm() * c.norm();
    if cross.abs() <= 1e-12 * scale || scale == 0.0 {
        return None;
    }
    let (b2, c2) = (b.norm_sqr(), c.norm_sqr());
    let ux = (c.im * b2 - b.im * c2) / (2.0 * cross);
    let uy = (b.re * c2 - c.re * b2) / (2.0 * cross);
    let offset = Complex64::new(ux, uy);
    Some((z1 + offset, offset.norm()))
}

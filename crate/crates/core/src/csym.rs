//! Decision procedure for complex symmetry of `C_φ` on H²(D) when `φ` is a
//! non-constant linear fractional self-map of the disk.
//!
//! `C_φ` is complex symmetric iff at least one of
//!
//! 1. the fixed points of `φ` on the sphere are `0` and a point outside the
//!    closed disk,
//! 2. the fixed points are `∞` and a point inside the disk,
//! 3. `φ` is an involutive automorphism.
//!
//! For automorphisms this reduces to: `φ` is a rotation or elliptic of order two.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mobius::{FixedPointData, MobiusMap, Order, SpherePoint, SymbolClass, DEFAULT_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CsymError {
    #[error("symbol is not a self-map of the unit disk")]
    NotSelfMap,
    #[error("symbol is not an automorphism of the unit disk (class {0})")]
    NotAutomorphism(&'static str),
}

/// Which condition certifies complex symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Witness {
    /// Fixed points `{0, p}` with `|p| > 1` (`p = ∞` allowed).
    FixZeroAndExterior,
    /// Fixed points `{∞, p}` with `|p| < 1`.
    FixInfinityAndInterior,
    InvolutiveAutomorphism,
}

impl Witness {
    pub fn label(&self) -> &'static str {
        match self {
            Witness::FixZeroAndExterior => "fix_zero_and_exterior",
            Witness::FixInfinityAndInterior => "fix_infinity_and_interior",
            Witness::InvolutiveAutomorphism => "involutive_automorphism",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsVerdict {
    pub is_cs: bool,
    pub witnesses: BTreeSet<Witness>,
    pub fixed_points: FixedPointData,
    pub class: SymbolClass,
    pub notes: Vec<String>,
}

impl CsVerdict {
    fn new(fixed_points: FixedPointData, class: SymbolClass, witnesses: BTreeSet<Witness>, notes: Vec<String>) -> Self {
        CsVerdict { is_cs: !witnesses.is_empty(), witnesses, fixed_points, class, notes }
    }
}

fn is_zero(p: &SpherePoint) -> bool {
    p.as_finite().is_some_and(|z| z.norm() <= DEFAULT_TOL)
}

fn is_interior(p: &SpherePoint) -> bool {
    p.modulus() < 1.0 - DEFAULT_TOL
}

fn is_exterior(p: &SpherePoint) -> bool {
    p.modulus() > 1.0 + DEFAULT_TOL
}

fn on_boundary(p: &SpherePoint) -> bool {
    (p.modulus() - 1.0).abs() <= DEFAULT_TOL
}

fn is_involution(class: &SymbolClass) -> bool {
    matches!(class, SymbolClass::EllipticAut { order: Order::Finite(2), .. })
}

/// Evaluates the three fixed-point conditions directly.
pub fn decide(phi: &MobiusMap) -> Result<CsVerdict, CsymError> {
    let class = phi.classify();
    if class == SymbolClass::NotSelfMap {
        return Err(CsymError::NotSelfMap);
    }
    let fixed = phi.fixed_points();
    let mut witnesses = BTreeSet::new();
    let mut notes = Vec::new();

    match fixed {
        FixedPointData::Identity => {
            // the identity is the rotation by 1, which fixes 0 and ∞
            witnesses.insert(Witness::FixZeroAndExterior);
            witnesses.insert(Witness::FixInfinityAndInterior);
            notes.push("identity map".to_string());
        }
        FixedPointData::Repeated(p) => {
            notes.push(format!("repeated fixed point {p}"));
        }
        FixedPointData::DistinctPair(p, q) => {
            for (x, y) in [(p, q), (q, p)] {
                if is_zero(&x) && is_exterior(&y) {
                    witnesses.insert(Witness::FixZeroAndExterior);
                }
                if x.is_infinity() && is_interior(&y) {
                    witnesses.insert(Witness::FixInfinityAndInterior);
                }
            }
        }
    }
    if is_involution(&class) {
        witnesses.insert(Witness::InvolutiveAutomorphism);
    }
    if fixed.points().iter().any(on_boundary) {
        notes.push("boundary fixed point".to_string());
        witnesses.clear();
    }
    Ok(CsVerdict::new(fixed, class, witnesses, notes))
}

/// Automorphism-only decision: rotations and order-two elliptics.
pub fn decide_automorphism(phi: &MobiusMap) -> Result<CsVerdict, CsymError> {
    let class = phi.classify();
    if !class.is_automorphism() {
        return Err(CsymError::NotAutomorphism(class.name()));
    }
    let fixed = phi.fixed_points();
    let mut witnesses = BTreeSet::new();
    let mut notes = Vec::new();
    match class {
        SymbolClass::RotationLike => {
            witnesses.insert(Witness::FixZeroAndExterior);
            notes.push("identity map".to_string());
        }
        SymbolClass::EllipticAut { order, center } => {
            if center.norm() <= DEFAULT_TOL {
                witnesses.insert(Witness::FixZeroAndExterior);
                notes.push("rotation".to_string());
            }
            match order {
                Order::Finite(2) => {
                    witnesses.insert(Witness::InvolutiveAutomorphism);
                }
                Order::Finite(3) if witnesses.is_empty() => {
                    notes.push("order-3 elliptic, not a rotation".to_string());
                }
                _ if witnesses.is_empty() => {
                    notes.push(format!("elliptic of order {order}, not a rotation"));
                }
                _ => {}
            }
        }
        SymbolClass::HyperbolicAut => notes.push("hyperbolic automorphism".to_string()),
        SymbolClass::ParabolicAut => notes.push("parabolic automorphism".to_string()),
        _ => unreachable!("non-automorphism classes rejected above"),
    }
    Ok(CsVerdict::new(fixed, class, witnesses, notes))
}

/// Both decision paths agree on an automorphism.
pub fn cross_check(phi: &MobiusMap) -> Result<bool, CsymError> {
    Ok(decide(phi)?.is_cs == decide_automorphism(phi)?.is_cs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::{elliptic, involution};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dilate_translate_with_interior_fixed_point() {
        let v = decide(&MobiusMap::affine(c(0.5, 0.0), c(0.25, 0.0)).unwrap()).unwrap();
        assert!(v.is_cs);
        assert!(v.witnesses.contains(&Witness::FixInfinityAndInterior));
    }

    #[test]
    fn boundary_fixed_point_kills_symmetry() {
        let f = MobiusMap::real(1.0, 0.0, -1.0, 2.0).unwrap();
        let v = decide(&f).unwrap();
        assert!(!v.is_cs);
        assert!(v.notes.iter().any(|n| n == "boundary fixed point"));
    }

    #[test]
    fn order_three_elliptic_is_not_symmetric() {
        let f = elliptic(c(0.5, 0.0), 1, 3).unwrap();
        assert!(!decide(&f).unwrap().is_cs);
        assert!(!decide_automorphism(&f).unwrap().is_cs);
    }

    #[test]
    fn involution_is_symmetric() {
        let v = decide(&involution(c(0.5, 0.0)).unwrap()).unwrap();
        assert!(v.is_cs);
        assert_eq!(v.witnesses.iter().copied().collect::<Vec<_>>(), vec![Witness::InvolutiveAutomorphism]);
    }

    #[test]
    fn rotation_by_i_is_symmetric() {
        let v = decide(&MobiusMap::scaling(Complex64::i()).unwrap()).unwrap();
        assert!(v.is_cs);
        assert!(v.witnesses.contains(&Witness::FixZeroAndExterior));
        assert!(decide_automorphism(&MobiusMap::scaling(Complex64::i()).unwrap()).unwrap().is_cs);
    }

    #[test]
    fn identity_is_symmetric() {
        assert!(decide(&MobiusMap::identity()).unwrap().is_cs);
        assert!(decide_automorphism(&MobiusMap::identity()).unwrap().is_cs);
    }

    #[test]
    fn automorphism_examples() {
        let hyp = MobiusMap::real(2.0, 1.0, 1.0, 2.0).unwrap();
        assert!(!decide_automorphism(&hyp).unwrap().is_cs);
        assert!(!decide(&hyp).unwrap().is_cs);
        let five = elliptic(c(0.3, 0.0), 1, 5).unwrap();
        assert!(!decide_automorphism(&five).unwrap().is_cs);
        let non_aut = MobiusMap::affine(c(0.5, 0.0), c(0.25, 0.0)).unwrap();
        assert!(matches!(decide_automorphism(&non_aut), Err(CsymError::NotAutomorphism(_))));
    }

    #[test]
    fn not_self_map_is_an_error() {
        assert_eq!(decide(&MobiusMap::real(2.0, 0.0, 0.0, 1.0).unwrap()), Err(CsymError::NotSelfMap));
    }

    #[test]
    fn cross_check_on_rotations_and_involutions() {
        for q in 1..=12 {
            assert!(cross_check(&MobiusMap::rotation(1, q)).unwrap(), "q={q}");
        }
        for i in 0..9 {
            for j in 0..9 {
                let a = c(-0.8 + 0.2 * i as f64, -0.8 + 0.2 * j as f64);
                if a.norm() < 0.95 {
                    assert!(cross_check(&involution(a).unwrap()).unwrap(), "a={a}");
                }
            }
        }
    }
}

//! The five gate kinds used by the networks.
//!
//! `PaperCx`, `PaperCy` and `PaperCz` are the two-wire matrices exactly as the
//! model defines them, which do not follow the textbook naming:
//!
//! * `PaperCx` is `diag(1, 1, 1, -1)`, i.e. the textbook controlled-Z.
//! * `PaperCy` applies Y to the first wire when the second wire is `|1>`.
//! * `PaperCz` exchanges basis states `|01>` and `|11>`, i.e. a controlled-NOT
//!   with the second wire as control and the first wire as target.
//!
//! Two-wire matrices are indexed with the first wire as the most significant
//! bit, so `wires = [target, control]` reads naturally for all three.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat2 = [[Complex64; 2]; 2];
pub type Mat4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Rx,
    Ry,
    PaperCx,
    PaperCy,
    PaperCz,
}

impl GateKind {
    pub const ALL: [GateKind; 5] = [
        GateKind::Rx,
        GateKind::Ry,
        GateKind::PaperCx,
        GateKind::PaperCy,
        GateKind::PaperCz,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry => 1,
            _ => 2,
        }
    }

    pub fn is_rotation(self) -> bool {
        self.arity() == 1
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::PaperCx => "CX",
            GateKind::PaperCy => "CY",
            GateKind::PaperCz => "CZ",
        };
        f.write_str(s)
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if theta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("rotation angle must be finite, got {theta}")))
    }
}

/// Rotation about the X axis.
pub fn rx_matrix(theta: f64) -> Result<Mat2> {
    check_angle(theta)?;
    Ok(rx_unchecked(theta))
}

/// Rotation about the Y axis; used for data encoding.
pub fn ry_matrix(theta: f64) -> Result<Mat2> {
    check_angle(theta)?;
    Ok(ry_unchecked(theta))
}

pub(crate) fn rx_unchecked(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let c = Complex64::new(c, 0.0);
    let mis = Complex64::new(0.0, -s);
    [[c, mis], [mis, c]]
}

pub(crate) fn ry_unchecked(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// A 4x4 matrix with exactly one nonzero entry per row: row `r` maps
/// amplitude `src[r]` scaled by `phase[r]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Monomial4 {
    pub src: [usize; 4],
    pub phase: [Complex64; 4],
}

impl Monomial4 {
    pub fn conj(&self) -> Self {
        Monomial4 {
            src: self.src,
            phase: self.phase.map(|p| p.conj()),
        }
    }

    pub fn to_dense(self) -> Mat4 {
        let mut m = [[ZERO; 4]; 4];
        for r in 0..4 {
            m[r][self.src[r]] = self.phase[r];
        }
        m
    }
}

pub(crate) fn fixed_monomial(kind: GateKind) -> Option<Monomial4> {
    let m = match kind {
        GateKind::PaperCx => Monomial4 {
            src: [0, 1, 2, 3],
            phase: [ONE, ONE, ONE, -ONE],
        },
        GateKind::PaperCy => Monomial4 {
            src: [0, 3, 2, 1],
            phase: [ONE, -I, ONE, I],
        },
        GateKind::PaperCz => Monomial4 {
            src: [0, 3, 2, 1],
            phase: [ONE, ONE, ONE, ONE],
        },
        GateKind::Rx | GateKind::Ry => return None,
    };
    Some(m)
}

/// The fixed two-wire matrices, entry for entry.
pub fn fixed_gate_matrix(kind: GateKind) -> Result<Mat4> {
    fixed_monomial(kind)
        .map(Monomial4::to_dense)
        .ok_or_else(|| Error::invalid(format!("{kind} is a rotation, not a fixed two-wire gate")))
}

/// The realized single-wire matrix for a rotation kind.
pub fn rotation_matrix(kind: GateKind, theta: f64) -> Result<Mat2> {
    match kind {
        GateKind::Rx => rx_matrix(theta),
        GateKind::Ry => ry_matrix(theta),
        _ => Err(Error::invalid(format!("{kind} is not a rotation"))),
    }
}

/// `max |(U^dagger U - I)_ij|` for a square matrix given as rows.
pub fn unitarity_defect<const N: usize>(u: &[[Complex64; N]; N]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..N {
        for j in 0..N {
            let mut acc: Complex64 = u.iter().map(|row| row[i].conj() * row[j]).sum();
            if i == j {
                acc -= ONE;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close2(a: &Mat2, b: &Mat2) -> bool {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn rx_reference_angles() {
        assert!(close2(&rx_matrix(0.0).unwrap(), &[[ONE, ZERO], [ZERO, ONE]]));
        assert!(close2(&rx_matrix(PI).unwrap(), &[[ZERO, -I], [-I, ZERO]]));
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let hi = Complex64::new(0.0, -FRAC_1_SQRT_2);
        assert!(close2(&rx_matrix(PI / 2.0).unwrap(), &[[h, hi], [hi, h]]));
    }

    #[test]
    fn non_finite_angle_rejected() {
        assert!(matches!(rx_matrix(f64::NAN), Err(Error::InvalidArgument(_))));
        assert!(matches!(ry_matrix(f64::INFINITY), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn fixed_matrices_match_definition() {
        let cx = fixed_gate_matrix(GateKind::PaperCx).unwrap();
        for (r, row) in cx.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let want = match (r, c) {
                    (3, 3) => -ONE,
                    (r, c) if r == c => ONE,
                    _ => ZERO,
                };
                assert_eq!(*v, want, "CX[{r}][{c}]");
            }
        }

        let cy = fixed_gate_matrix(GateKind::PaperCy).unwrap();
        let want_cy = [
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ZERO, ZERO, -I],
            [ZERO, ZERO, ONE, ZERO],
            [ZERO, I, ZERO, ZERO],
        ];
        assert_eq!(cy, want_cy);

        let cz = fixed_gate_matrix(GateKind::PaperCz).unwrap();
        let want_cz = [
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ZERO, ZERO, ONE],
            [ZERO, ZERO, ONE, ZERO],
            [ZERO, ONE, ZERO, ZERO],
        ];
        assert_eq!(cz, want_cz);
    }

    #[test]
    fn rotation_kinds_have_no_fixed_matrix() {
        assert!(fixed_gate_matrix(GateKind::Rx).is_err());
        assert!(rotation_matrix(GateKind::PaperCz, 0.1).is_err());
    }

    #[test]
    fn all_kinds_unitary() {
        for theta in [0.0, 0.3, 1.0, PI, -2.5, 7.0] {
            assert!(unitarity_defect(&rx_matrix(theta).unwrap()) < 1e-12);
            assert!(unitarity_defect(&ry_matrix(theta).unwrap()) < 1e-12);
        }
        for kind in [GateKind::PaperCx, GateKind::PaperCy, GateKind::PaperCz] {
            assert!(unitarity_defect(&fixed_gate_matrix(kind).unwrap()) < 1e-12);
        }
    }
}

use num_complex::Complex64;

use super::gates::{fixed_monomial, rotation_matrix, GateKind};
use super::kernel::{apply_1q, apply_2q_monomial};
use super::plan::CircuitPlan;
use crate::error::{Error, Result};

/// Largest width the dense pure-state simulator will allocate.
pub const MAX_PURE_WIRES: usize = 26;

/// Exact state vector. Wire 0 is the most significant bit of the basis index,
/// so two wires are ordered `|00>, |01>, |10>, |11>` with wire 0 first.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_wires: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// `|0...0>` on `n_wires` wires.
    pub fn zero(n_wires: usize) -> Result<Self> {
        if n_wires > MAX_PURE_WIRES {
            return Err(Error::ResourceLimit {
                peak: n_wires,
                cap: MAX_PURE_WIRES,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_wires];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(PureState { n_wires, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two and the norm 1
    /// within 1e-10.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::invalid(format!("amplitude count {len} is not a power of two")));
        }
        let state = PureState {
            n_wires: len.trailing_zeros() as usize,
            amps,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("state norm^2 is {norm}, expected 1")));
        }
        Ok(state)
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn bit_of(&self, wire: usize) -> Result<usize> {
        if wire >= self.n_wires {
            return Err(Error::invalid(format!(
                "wire {wire} out of range for {}-wire state",
                self.n_wires
            )));
        }
        Ok(self.n_wires - 1 - wire)
    }

    /// Applies `kind` on `wires` with the resolved `angle` (ignored for fixed
    /// gates).
    pub fn apply(&mut self, kind: GateKind, wires: &[usize], angle: f64) -> Result<()> {
        if wires.len() != kind.arity() {
            return Err(Error::invalid(format!(
                "{kind} takes {} wire(s), got {}",
                kind.arity(),
                wires.len()
            )));
        }
        match kind {
            GateKind::Rx | GateKind::Ry => {
                let m = rotation_matrix(kind, angle)?;
                let bit = self.bit_of(wires[0])?;
                apply_1q(&mut self.amps, bit, &m);
            }
            _ => {
                if wires[0] == wires[1] {
                    return Err(Error::invalid(format!("{kind} needs two distinct wires")));
                }
                let m = fixed_monomial(kind).expect("fixed kind");
                let b0 = self.bit_of(wires[0])?;
                let b1 = self.bit_of(wires[1])?;
                apply_2q_monomial(&mut self.amps, b0, b1, &m);
            }
        }
        Ok(())
    }

    /// Probability of measuring `1` on `wire`.
    pub fn prob_one(&self, wire: usize) -> Result<f64> {
        let bit = self.bit_of(wire)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> bit) & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Runs every gate of `plan` from `|0...0>` with the given resolved angles.
    pub fn run(plan: &CircuitPlan, angles: &[f64]) -> Result<Self> {
        if angles.len() != plan.gates().len() {
            return Err(Error::invalid(format!(
                "{} angles for {} gates",
                angles.len(),
                plan.gates().len()
            )));
        }
        let mut state = PureState::zero(plan.n_wires())?;
        for (g, &a) in plan.gates().iter().zip(angles) {
            state.apply(g.kind, g.wires(), a)?;
        }
        Ok(state)
    }
}

/// Readout probability by full state-vector simulation.
pub fn pure_run(plan: &CircuitPlan, angles: &[f64]) -> Result<f64> {
    PureState::run(plan, angles)?.prob_one(plan.readout())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rx_pi_flips_zero() {
        let mut s = PureState::zero(1).unwrap();
        s.apply(GateKind::Rx, &[0], PI).unwrap();
        assert!((s.amplitudes()[0] - c(0.0, 0.0)).norm() < 1e-12);
        assert!((s.amplitudes()[1] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((s.prob_one(0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rx_half_pi_balances() {
        let mut s = PureState::zero(1).unwrap();
        s.apply(GateKind::Rx, &[0], PI / 2.0).unwrap();
        assert!((s.amplitudes()[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        assert!((s.amplitudes()[1] - c(0.0, -FRAC_1_SQRT_2)).norm() < 1e-12);
        assert!((s.prob_one(0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rx_zero_is_identity() {
        let amps = vec![c(0.5, 0.1), c(-0.3, 0.2), c(0.1, -0.6), c(0.0, 0.0)];
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let amps: Vec<_> = amps.into_iter().map(|a| a / n.sqrt()).collect();
        let mut s = PureState::from_amplitudes(amps).unwrap();
        let before = s.clone();
        s.apply(GateKind::Rx, &[1], 0.0).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn prob_one_examples() {
        let s = PureState::zero(1).unwrap();
        assert_eq!(s.prob_one(0).unwrap(), 0.0);

        let mut s = PureState::zero(1).unwrap();
        s.apply(GateKind::Ry, &[0], PI * 255.0 / 255.0).unwrap();
        assert!((s.prob_one(0).unwrap() - 1.0).abs() < 1e-12);

        let s = PureState::from_amplitudes(vec![c(0.5, 0.0); 4]).unwrap();
        assert!((s.prob_one(0).unwrap() - 0.5).abs() < 1e-12);
        assert!((s.prob_one(1).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn wire_ordering_is_msb_first() {
        // flip wire 0 of two: basis index 0b10
        let mut s = PureState::zero(2).unwrap();
        s.apply(GateKind::Rx, &[0], PI).unwrap();
        assert!((s.amplitudes()[2].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn paper_cz_flips_first_wire_when_second_set() {
        let mut s = PureState::zero(2).unwrap();
        s.apply(GateKind::Rx, &[1], PI).unwrap(); // |01>
        s.apply(GateKind::PaperCz, &[0, 1], 0.0).unwrap(); // -> |11>
        assert!((s.prob_one(0).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.prob_one(1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_wires_rejected() {
        let mut s = PureState::zero(2).unwrap();
        assert!(s.apply(GateKind::Rx, &[2], 0.1).is_err());
        assert!(s.apply(GateKind::PaperCy, &[1, 1], 0.0).is_err());
        assert!(s.prob_one(5).is_err());
        assert!(PureState::from_amplitudes(vec![c(1.0, 0.0); 3]).is_err());
        assert!(PureState::from_amplitudes(vec![c(1.0, 0.0); 2]).is_err());
    }
}

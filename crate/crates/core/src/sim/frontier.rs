//! Exact evaluation of wide circuits by keeping only live wires.
//!
//! A wire enters the density matrix as `|0><0|` right before its first gate
//! and is traced out right after its last one, so memory follows the
//! plan's peak live width rather than its total width.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::gates::{fixed_monomial, rotation_matrix, GateKind, Mat2};
use super::kernel::{apply_1q, apply_2q_monomial, conj2, insert_zero_bit, matmul2};
use super::plan::CircuitPlan;
use crate::error::{Error, Result};

pub const DEFAULT_WIDTH_CAP: usize = 12;

/// Density matrix over the currently active wires.
///
/// Slot `s` of the active list is bit `s` of the row/column index; the
/// matrix is stored row-major as one flat buffer, so column bits occupy flat
/// bits `0..w` and row bits `w..2w`.
#[derive(Debug, Clone)]
pub struct FrontierState {
    cap: usize,
    active: Vec<usize>,
    slot_of: Vec<Option<usize>>,
    rho: Vec<Complex64>,
}

impl FrontierState {
    pub fn new(n_wires: usize, cap: usize) -> Self {
        FrontierState {
            cap,
            active: Vec::new(),
            slot_of: vec![None; n_wires],
            rho: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn active_wires(&self) -> &[usize] {
        &self.active
    }

    pub fn width(&self) -> usize {
        self.active.len()
    }

    fn dim(&self) -> usize {
        1 << self.active.len()
    }

    pub fn is_active(&self, wire: usize) -> bool {
        self.slot_of.get(wire).copied().flatten().is_some()
    }

    fn check_wire(&self, wire: usize) -> Result<()> {
        if wire >= self.slot_of.len() {
            return Err(Error::invalid(format!(
                "wire {wire} outside circuit width {}",
                self.slot_of.len()
            )));
        }
        Ok(())
    }

    /// Adds `wire` in state `|0>`.
    pub fn allocate(&mut self, wire: usize) -> Result<()> {
        self.check_wire(wire)?;
        if self.is_active(wire) {
            return Err(Error::invalid(format!("wire {wire} is already active")));
        }
        if self.active.len() + 1 > self.cap {
            return Err(Error::ResourceLimit {
                peak: self.active.len() + 1,
                cap: self.cap,
            });
        }
        let d = self.dim();
        let mut next = vec![Complex64::new(0.0, 0.0); 4 * d * d];
        for r in 0..d {
            next[r * 2 * d..r * 2 * d + d].copy_from_slice(&self.rho[r * d..(r + 1) * d]);
        }
        self.rho = next;
        self.slot_of[wire] = Some(self.active.len());
        self.active.push(wire);
        Ok(())
    }

    /// Adds `wire` in the pure state `psi`.
    pub(crate) fn allocate_pure(&mut self, wire: usize, psi: [Complex64; 2]) -> Result<()> {
        self.allocate(wire)?;
        let w = self.width() - 1;
        let d = 1usize << w;
        let outer = [
            [psi[0] * psi[0].conj(), psi[0] * psi[1].conj()],
            [psi[1] * psi[0].conj(), psi[1] * psi[1].conj()],
        ];
        let dd = 2 * d;
        for r in 0..d {
            for c in 0..d {
                let v = self.rho[r * dd + c];
                for (br, row) in outer.iter().enumerate() {
                    for (bc, o) in row.iter().enumerate() {
                        self.rho[(r | br << w) * dd + (c | bc << w)] = v * o;
                    }
                }
            }
        }
        Ok(())
    }

    /// `rho -> U rho U^dagger` for a one-wire matrix on an active wire.
    pub(crate) fn apply_matrix(&mut self, wire: usize, m: &Mat2) -> Result<()> {
        self.check_wire(wire)?;
        let s = self.slot_of[wire].ok_or_else(|| Error::invalid(format!("wire {wire} is not active")))?;
        let w = self.width();
        apply_1q(&mut self.rho, w + s, m);
        apply_1q(&mut self.rho, s, &conj2(m));
        Ok(())
    }

    fn slot(&mut self, wire: usize) -> Result<usize> {
        self.check_wire(wire)?;
        if !self.is_active(wire) {
            self.allocate(wire)?;
        }
        Ok(self.slot_of[wire].expect("active"))
    }

    /// `rho -> U rho U^dagger`, allocating untouched wires first.
    pub fn apply(&mut self, kind: GateKind, wires: &[usize], angle: f64) -> Result<()> {
        if wires.len() != kind.arity() {
            return Err(Error::invalid(format!(
                "{kind} takes {} wire(s), got {}",
                kind.arity(),
                wires.len()
            )));
        }
        if kind.is_rotation() {
            let m = rotation_matrix(kind, angle)?;
            let s = self.slot(wires[0])?;
            let w = self.width();
            apply_1q(&mut self.rho, w + s, &m);
            apply_1q(&mut self.rho, s, &conj2(&m));
        } else {
            if wires[0] == wires[1] {
                return Err(Error::invalid(format!("{kind} needs two distinct wires")));
            }
            let m = fixed_monomial(kind).expect("fixed kind");
            let s0 = self.slot(wires[0])?;
            let s1 = self.slot(wires[1])?;
            let w = self.width();
            apply_2q_monomial(&mut self.rho, w + s0, w + s1, &m);
            apply_2q_monomial(&mut self.rho, s0, s1, &m.conj());
        }
        Ok(())
    }

    /// Partial trace over `wire`.
    pub fn trace_out(&mut self, wire: usize) -> Result<()> {
        self.check_wire(wire)?;
        let s = self.slot_of[wire].ok_or_else(|| Error::invalid(format!("wire {wire} is not active")))?;
        let d = self.dim();
        let half = d / 2;
        let mut next = vec![Complex64::new(0.0, 0.0); half * half];
        let bit = 1usize << s;
        for r in 0..half {
            let r0 = insert_zero_bit(r, s);
            let r1 = r0 | bit;
            for c in 0..half {
                let c0 = insert_zero_bit(c, s);
                next[r * half + c] = self.rho[r0 * d + c0] + self.rho[r1 * d + (c0 | bit)];
            }
        }
        self.rho = next;
        self.active.remove(s);
        self.slot_of[wire] = None;
        for (slot, &w) in self.active.iter().enumerate().skip(s) {
            self.slot_of[w] = Some(slot);
        }
        Ok(())
    }

    pub fn prob_one(&self, wire: usize) -> Result<f64> {
        self.check_wire(wire)?;
        let s = self.slot_of[wire].ok_or_else(|| Error::invalid(format!("wire {wire} is not active")))?;
        let d = self.dim();
        Ok((0..d)
            .filter(|r| (r >> s) & 1 == 1)
            .map(|r| self.rho[r * d + r].re)
            .sum())
    }

    pub fn trace(&self) -> Complex64 {
        let d = self.dim();
        (0..d).map(|r| self.rho[r * d + r]).sum()
    }

    /// `max |rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.rho[r * d + c] - self.rho[c * d + r].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part of the density matrix, or
    /// `-inf` if the eigensolver fails to converge. O(d^3); meant for
    /// checks, not the hot path.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |r, c| (self.rho[r * d + c] + self.rho[c * d + r].conj()) * 0.5);
        SymmetricEigen::try_new(m, 1e-14, 10_000).map_or(f64::NEG_INFINITY, |e| {
            e.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
        })
    }

    /// Entry `(row, col)` in the local slot basis.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.rho[row * self.dim() + col]
    }
}

/// Frontier evaluator with a configurable active-width cap.
#[derive(Debug, Clone, Copy)]
pub struct FrontierSim {
    pub cap: usize,
}

impl Default for FrontierSim {
    fn default() -> Self {
        FrontierSim { cap: DEFAULT_WIDTH_CAP }
    }
}

impl FrontierSim {
    pub fn with_cap(cap: usize) -> Self {
        FrontierSim { cap }
    }

    fn check(&self, plan: &CircuitPlan, angles: &[f64]) -> Result<()> {
        if angles.len() != plan.gates().len() {
            return Err(Error::invalid(format!(
                "{} angles for {} gates",
                angles.len(),
                plan.gates().len()
            )));
        }
        let peak = plan.peak_width();
        if peak > self.cap {
            return Err(Error::ResourceLimit { peak, cap: self.cap });
        }
        Ok(())
    }

    /// Readout probability of `plan` with resolved per-gate `angles`.
    ///
    /// One-wire gates are held back and merged until the wire next meets a
    /// two-wire gate: a fresh wire then enters directly in the merged pure
    /// state, and pending gates on a wire about to be traced out are
    /// dropped.
    pub fn run(&self, plan: &CircuitPlan, angles: &[f64]) -> Result<f64> {
        self.check(plan, angles)?;
        let mut state = FrontierState::new(plan.n_wires(), self.cap);
        let mut pending: Vec<Option<Mat2>> = vec![None; plan.n_wires()];
        let flush = |state: &mut FrontierState, pending: &mut [Option<Mat2>], w: usize| -> Result<()> {
            let m = pending[w].take();
            if state.is_active(w) {
                if let Some(m) = m {
                    state.apply_matrix(w, &m)?;
                }
            } else {
                let psi = m.map_or([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], |m| {
                    [m[0][0], m[1][0]]
                });
                state.allocate_pure(w, psi)?;
            }
            Ok(())
        };
        for (pos, (g, &a)) in plan.gates().iter().zip(angles).enumerate() {
            let wires = g.wires();
            if g.kind.is_rotation() {
                let m = rotation_matrix(g.kind, a)?;
                let w = wires[0];
                pending[w] = Some(pending[w].map_or(m, |p| matmul2(&m, &p)));
            } else {
                for &w in wires {
                    flush(&mut state, &mut pending, w)?;
                }
                state.apply(g.kind, wires, a)?;
            }
            for &w in plan.retire_after(pos) {
                pending[w] = None;
                if state.is_active(w) {
                    state.trace_out(w)?;
                }
            }
        }
        flush(&mut state, &mut pending, plan.readout())?;
        Ok(state.prob_one(plan.readout())?.clamp(0.0, 1.0))
    }

    /// Gate-by-gate evaluation without merging, calling `observe` after
    /// every gate (and its retirements).
    pub fn run_observed(
        &self,
        plan: &CircuitPlan,
        angles: &[f64],
        mut observe: impl FnMut(&FrontierState),
    ) -> Result<f64> {
        self.check(plan, angles)?;
        let mut state = FrontierState::new(plan.n_wires(), self.cap);
        for (pos, (g, &a)) in plan.gates().iter().zip(angles).enumerate() {
            state.apply(g.kind, g.wires(), a)?;
            for &w in plan.retire_after(pos) {
                state.trace_out(w)?;
            }
            debug_assert!((state.trace().re - 1.0).abs() < 1e-8);
            observe(&state);
        }
        if !state.is_active(plan.readout()) {
            state.allocate(plan.readout())?;
        }
        if cfg!(debug_assertions) && state.width() <= 6 {
            debug_assert!(state.min_eigenvalue() >= -1e-8);
        }
        Ok(state.prob_one(plan.readout())?.clamp(0.0, 1.0))
    }
}

/// [`FrontierSim::run`] with the default width cap.
pub fn frontier_run(plan: &CircuitPlan, angles: &[f64]) -> Result<f64> {
    FrontierSim::default().run(plan, angles)
}

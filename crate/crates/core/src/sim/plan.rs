//! Circuits as data: gate templates with symbolic angles, plus the
//! bookkeeping the frontier engine needs (first use and retirement).

use std::collections::BTreeSet;

use super::gates::GateKind;
use crate::error::{Error, Result};

/// Where a rotation gate gets its angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleSource {
    Constant(f64),
    /// Index into the plan's data angles (encoded pixels or re-encoded
    /// probabilities).
    Data(usize),
    /// A trainable angle, shared by every gate that names the same slot.
    Param {
        layer: usize,
        index: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    wires: [usize; 2],
    /// Meaningful only for rotation kinds.
    pub angle: AngleSource,
}

impl GateOp {
    pub fn rx(wire: usize, angle: AngleSource) -> Self {
        GateOp {
            kind: GateKind::Rx,
            wires: [wire, usize::MAX],
            angle,
        }
    }

    pub fn ry(wire: usize, angle: AngleSource) -> Self {
        GateOp {
            kind: GateKind::Ry,
            wires: [wire, usize::MAX],
            angle,
        }
    }

    /// A fixed two-wire gate; `first` is the matrix's most significant wire.
    pub fn fixed(kind: GateKind, first: usize, second: usize) -> Self {
        debug_assert!(!kind.is_rotation());
        GateOp {
            kind,
            wires: [first, second],
            angle: AngleSource::Constant(0.0),
        }
    }

    pub fn wires(&self) -> &[usize] {
        &self.wires[..self.kind.arity()]
    }

    pub(crate) fn remap(&self, map: impl Fn(usize) -> usize) -> Self {
        let mut g = *self;
        for w in 0..self.kind.arity() {
            g.wires[w] = map(self.wires[w]);
        }
        g
    }
}

/// Flat view of trainable angles: `layer * 4 + index`.
pub const ANGLES_PER_LAYER: usize = 4;

pub fn param_flat_index(layer: usize, index: usize) -> usize {
    layer * ANGLES_PER_LAYER + index
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitPlan {
    n_wires: usize,
    gates: Vec<GateOp>,
    readout: usize,
    data: Vec<f64>,
    /// `retire[i]`: wires whose last gate is `i` (never the readout wire).
    retire: Vec<Vec<usize>>,
    /// `first_use[i]`: wires first touched by gate `i`.
    first_use: Vec<Vec<usize>>,
}

impl CircuitPlan {
    pub fn new(n_wires: usize, gates: Vec<GateOp>, readout: usize, data: Vec<f64>) -> Result<Self> {
        if readout >= n_wires {
            return Err(Error::invalid(format!(
                "readout wire {readout} outside circuit width {n_wires}"
            )));
        }
        for (i, g) in gates.iter().enumerate() {
            let ws = g.wires();
            if let Some(&w) = ws.iter().find(|&&w| w >= n_wires) {
                return Err(Error::invalid(format!(
                    "gate {i} ({}) uses wire {w} outside circuit width {n_wires}",
                    g.kind
                )));
            }
            if ws.len() == 2 && ws[0] == ws[1] {
                return Err(Error::invalid(format!("gate {i} ({}) repeats wire {}", g.kind, ws[0])));
            }
            if g.kind.is_rotation() {
                match g.angle {
                    AngleSource::Data(slot) if slot >= data.len() => {
                        return Err(Error::invalid(format!(
                            "gate {i} reads data slot {slot} but only {} provided",
                            data.len()
                        )))
                    }
                    AngleSource::Param { index, .. } if index >= ANGLES_PER_LAYER => {
                        return Err(Error::invalid(format!("gate {i} names param index {index}")))
                    }
                    _ => {}
                }
            }
        }

        let mut first_seen = vec![usize::MAX; n_wires];
        let mut last_seen = vec![usize::MAX; n_wires];
        for (i, g) in gates.iter().enumerate() {
            for &w in g.wires() {
                if first_seen[w] == usize::MAX {
                    first_seen[w] = i;
                }
                last_seen[w] = i;
            }
        }
        let mut retire = vec![Vec::new(); gates.len()];
        let mut first_use = vec![Vec::new(); gates.len()];
        for w in 0..n_wires {
            if first_seen[w] != usize::MAX {
                first_use[first_seen[w]].push(w);
                if w != readout {
                    retire[last_seen[w]].push(w);
                }
            }
        }

        Ok(CircuitPlan {
            n_wires,
            gates,
            readout,
            data,
            retire,
            first_use,
        })
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn readout(&self) -> usize {
        self.readout
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Wires that are dead once gate `pos` has been applied.
    pub fn retire_after(&self, pos: usize) -> &[usize] {
        &self.retire[pos]
    }

    /// Checks the retire schedule against the gate list.
    pub fn retire_schedule_consistent(&self) -> bool {
        let mut dead = vec![false; self.n_wires];
        for (i, g) in self.gates.iter().enumerate() {
            if g.wires().iter().any(|&w| dead[w]) {
                return false;
            }
            for &w in &self.retire[i] {
                if w == self.readout {
                    return false;
                }
                dead[w] = true;
            }
        }
        true
    }

    /// Largest number of simultaneously live wires under lazy allocation and
    /// immediate retirement.
    pub fn peak_width(&self) -> usize {
        let mut live = 0usize;
        let mut peak = 0usize;
        for i in 0..self.gates.len() {
            live += self.first_use[i].len();
            peak = peak.max(live);
            live -= self.retire[i].len();
        }
        // an untouched readout wire is allocated at the end
        if !self.gates.iter().any(|g| g.wires().contains(&self.readout)) {
            peak = peak.max(live + 1);
        }
        peak
    }

    /// Resolves every gate's angle. Fixed gates get 0.
    pub fn resolve(&self, params: &[f64]) -> Result<Vec<f64>> {
        self.gates
            .iter()
            .map(|g| {
                if !g.kind.is_rotation() {
                    return Ok(0.0);
                }
                let theta = match g.angle {
                    AngleSource::Constant(t) => t,
                    AngleSource::Data(slot) => self.data[slot],
                    AngleSource::Param { layer, index } => {
                        let flat = param_flat_index(layer, index);
                        *params.get(flat).ok_or_else(|| {
                            Error::invalid(format!(
                                "plan needs param ({layer}, {index}) but only {} angles given",
                                params.len()
                            ))
                        })?
                    }
                };
                if theta.is_finite() {
                    Ok(theta)
                } else {
                    Err(Error::invalid(format!("non-finite angle {theta}")))
                }
            })
            .collect()
    }

    /// Positions of every gate reading the flat trainable slot `flat`.
    pub fn param_positions(&self, flat: usize) -> Vec<usize> {
        self.gates
            .iter()
            .enumerate()
            .filter(|(_, g)| {
                g.kind.is_rotation()
                    && matches!(g.angle, AngleSource::Param { layer, index }
                        if param_flat_index(layer, index) == flat)
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Same gates and data with a different readout wire.
    pub fn with_readout(&self, readout: usize) -> Result<Self> {
        CircuitPlan::new(self.n_wires, self.gates.clone(), readout, self.data.clone())
    }

    /// Mask of gates in the backward light cone of the readout wire. Gates
    /// outside it act only on wires that are traced out without ever
    /// influencing the readout, so dropping them leaves the result unchanged.
    pub fn light_cone_mask(&self) -> Vec<bool> {
        let mut in_cone = vec![false; self.n_wires];
        in_cone[self.readout] = true;
        let mut keep = vec![false; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate().rev() {
            if g.wires().iter().any(|&w| in_cone[w]) {
                keep[i] = true;
                for &w in g.wires() {
                    in_cone[w] = true;
                }
            }
        }
        keep
    }

    /// Keeps the gates selected by `mask` (with their resolved angles) and
    /// renumbers the surviving wires densely, preserving their order.
    pub fn restrict(&self, mask: &[bool], angles: &[f64]) -> Result<(CircuitPlan, Vec<f64>)> {
        let mut used = BTreeSet::new();
        used.insert(self.readout);
        for (g, &k) in self.gates.iter().zip(mask) {
            if k {
                used.extend(g.wires().iter().copied());
            }
        }
        let mut relabel = vec![usize::MAX; self.n_wires];
        for (new, &old) in used.iter().enumerate() {
            relabel[old] = new;
        }
        let mut gates = Vec::new();
        let mut kept_angles = Vec::new();
        for ((g, &k), &a) in self.gates.iter().zip(mask).zip(angles) {
            if k {
                gates.push(g.remap(|w| relabel[w]));
                kept_angles.push(a);
            }
        }
        let plan = CircuitPlan::new(used.len(), gates, relabel[self.readout], self.data.clone())?;
        Ok((plan, kept_angles))
    }
}

/// Reorders gates depth-first from the circuit's sinks so each sub-tree is
/// finished (and its wires retired) before the next one starts. Only gates
/// on disjoint wires are exchanged, so the circuit is unchanged.
pub fn schedule_depth_first(gates: &[GateOp]) -> Vec<GateOp> {
    let n = gates.len();
    let mut deps: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut has_successor = vec![false; n];
    let mut last_on_wire = std::collections::HashMap::new();
    for (i, g) in gates.iter().enumerate() {
        let mut d = Vec::with_capacity(2);
        for &w in g.wires() {
            if let Some(p) = last_on_wire.insert(w, i) {
                if !d.contains(&p) {
                    d.push(p);
                }
                has_successor[p] = true;
            }
        }
        deps.push(d);
    }

    let mut emitted = vec![false; n];
    let mut order = Vec::with_capacity(n);
    // explicit stack: (gate, next dependency to visit)
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in (0..n).filter(|&i| !has_successor[i]) {
        if emitted[root] {
            continue;
        }
        stack.push((root, 0));
        while let Some(top) = stack.last_mut() {
            let g = top.0;
            if top.1 < deps[g].len() {
                let d = deps[g][top.1];
                top.1 += 1;
                if !emitted[d] {
                    stack.push((d, 0));
                }
            } else {
                stack.pop();
                if !emitted[g] {
                    emitted[g] = true;
                    order.push(gates[g]);
                }
            }
        }
    }
    debug_assert_eq!(order.len(), n);
    order
}

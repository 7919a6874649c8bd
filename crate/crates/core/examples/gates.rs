//! The gate set and a few hand-checkable state-vector runs.
//!
//! ```bash
//! cargo run -p qcnn --example gates
//! ```

use std::f64::consts::PI;

use qcnn::sim::gates::unitarity_defect;
use qcnn::sim::{fixed_gate_matrix, rx_matrix, GateKind, PureState};

fn main() -> qcnn::Result<()> {
    for kind in [GateKind::PaperCx, GateKind::PaperCy, GateKind::PaperCz] {
        let m = fixed_gate_matrix(kind)?;
        println!("{kind}:");
        for row in &m {
            let cells: Vec<String> = row.iter().map(|z| format!("{:>5}", format!("{z}"))).collect();
            println!("  [{}]", cells.join(" "));
        }
        println!("  unitarity defect {:.1e}", unitarity_defect(&m));
    }
    println!(
        "RX(pi/3) unitarity defect {:.1e}",
        unitarity_defect(&rx_matrix(PI / 3.0)?)
    );

    // wire 0 is the most significant bit
    let mut st = PureState::zero(2)?;
    st.apply(GateKind::Rx, &[1], PI)?;
    println!("RX(pi) on wire 1: amplitudes {:?}", st.amplitudes());
    st.apply(GateKind::PaperCz, &[0, 1], 0.0)?;
    println!(
        "after CZ(0, 1): P(wire0 = 1) = {:.3}, P(wire1 = 1) = {:.3}",
        st.prob_one(0)?,
        st.prob_one(1)?
    );
    Ok(())
}

//! Evaluates the same circuits with the dense state vector and with the
//! frontier density-matrix engine, and shows the width the frontier needs.
//!
//! ```bash
//! cargo run --release -p qcnn --example frontier_vs_statevector
//! ```

use std::time::Instant;

use qcnn::dataset::gen_dataset;
use qcnn::network::init_params;
use qcnn::sim::{pure_run, readout_probability, FrontierSim};
use qcnn::{build_plan, Architecture, InitScheme};

fn main() -> qcnn::Result<()> {
    for arch in [Architecture::Conv, Architecture::ConvPoolPool] {
        let sample = &gen_dataset(1, arch.side(), 7)?[0];
        let net = build_plan(arch, &sample.angle_image())?;
        let plan = net.plan();
        let angles = plan.resolve(&init_params(arch, 7, InitScheme::Uniform).flat())?;

        let t = Instant::now();
        let dense = pure_run(plan, &angles)?;
        let t_dense = t.elapsed();
        let t = Instant::now();
        let frontier = FrontierSim::default().run(plan, &angles)?;
        let t_frontier = t.elapsed();
        let mut widest = 0;
        FrontierSim::default().run_observed(plan, &angles, |st| widest = widest.max(st.width()))?;

        println!(
            "{arch}: {} wires, state vector {dense:.12} ({t_dense:.1?}), frontier {frontier:.12} ({t_frontier:.1?}), widest frontier {widest}",
            plan.n_wires()
        );
    }

    let arch = Architecture::ConvPoolConvPool;
    let sample = &gen_dataset(1, 8, 7)?[0];
    let net = build_plan(arch, &sample.angle_image())?;
    let angles = net.plan().resolve(&init_params(arch, 7, InitScheme::Uniform).flat())?;
    let p = readout_probability(net.plan(), &angles, &FrontierSim::default())?;
    println!(
        "{arch}: {} wires (too wide for a state vector), peak frontier width {}, p1 = {p:.12}",
        net.plan().n_wires(),
        net.plan().peak_width()
    );
    match FrontierSim::with_cap(4).run(net.plan(), &angles) {
        Err(e) => println!("with a cap of 4: {e}"),
        Ok(_) => unreachable!("plan is wider than 4"),
    }
    Ok(())
}

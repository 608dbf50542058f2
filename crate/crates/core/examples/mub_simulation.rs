//! Weyl-operator MUBs and simulated two-qudit counts.

use pcn_qst::measurements::{
    ground_truth_state, mub_bases, simulate_counts, two_qudit_mub_measurements, CountsFile, GroundTruth,
};

fn main() -> pcn_qst::Result<()> {
    for d in [2, 3, 5] {
        let bases = mub_bases(d)?;
        let mut worst: f64 = 0.0;
        for (a, ba) in bases.iter().enumerate() {
            for bb in &bases[a + 1..] {
                let overlaps = ba.adjoint() * bb;
                for v in overlaps.iter() {
                    worst = worst.max((v.norm_sqr() - 1.0 / d as f64).abs());
                }
            }
        }
        println!("d = {d}: {} bases, max | |<a|b>|² − 1/d | = {worst:.2e}", bases.len());
    }

    let d = 3;
    let m = two_qudit_mub_measurements(d)?;
    let truth = ground_truth_state(d, 0.9)?;
    let data = simulate_counts(&truth, &m, 500, 42)?;
    println!(
        "{} settings × {} outcomes, N = {}",
        m.num_settings(),
        data.counts()[0].len(),
        data.grand_total()
    );
    println!("setting {}: {:?}", m.setting_id(0), data.counts()[0]);
    let file = CountsFile::new(&m, &data, Some(GroundTruth { lambda: 0.9 }))?;
    let path = std::env::temp_dir().join("pcn_qst_counts_d3.json");
    file.write(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

use std::io::Write;

use crate::sb_plan::{ghz_descriptor, MeasurementPlan, ShotAllocation};

/// Group table: `x(hex),part,member_count,max_abs_coeff,cnot_count,shots`.
///
/// `comments` are written first as `#` lines.
pub fn write_plan_csv<W: Write>(
    mut w: W,
    plan: &MeasurementPlan,
    allocation: Option<&ShotAllocation>,
    comments: &[String],
) -> std::io::Result<()> {
    for c in comments {
        for line in c.lines() {
            writeln!(w, "# {line}")?;
        }
    }
    writeln!(w, "x,part,member_count,max_abs_coeff,cnot_count,shots")?;
    let width = plan.n_qubits.div_ceil(4).max(1);
    for g in &plan.groups {
        let shots = allocation
            .and_then(|a| a.shots_for(g.key()))
            .map(|m| m.to_string())
            .unwrap_or_default();
        writeln!(
            w,
            "0x{:0width$x},{},{},{:e},{},{}",
            g.x,
            g.part,
            g.members.len(),
            g.max_abs_coeff(),
            ghz_descriptor(g).cnot_count(),
            shots,
        )?;
    }
    Ok(())
}

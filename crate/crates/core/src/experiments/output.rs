use std::io::{self, Write};

use crate::dynamics::TrajectoryRecord;
use crate::model::{FieldState, Grid};
use crate::scalar::{to_f64, Real};

fn coords_header<T: Real>(grid: &Grid<T>) -> &'static str {
    if grid.dim() == 2 {
        "x,y"
    } else {
        "x"
    }
}

fn write_coords<T: Real>(out: &mut impl Write, grid: &Grid<T>, k: usize) -> io::Result<()> {
    let p = grid.coords(k);
    write!(out, "{:.16e}", to_f64(p[0]))?;
    if grid.dim() == 2 {
        write!(out, ",{:.16e}", to_f64(p[1]))?;
    }
    Ok(())
}

/// One row per sample:
/// `t,lyapunov,l2_v,l2_vt,l2_w,linf_v,linf_vt,linf_w,l1_vt,l1_wt,diss_l2,diss_l1`.
pub fn write_diagnostics_csv<T: Real>(record: &TrajectoryRecord<T>, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "t,lyapunov,l2_v,l2_vt,l2_w,linf_v,linf_vt,linf_w,l1_vt,l1_wt,diss_l2,diss_l1")?;
    for s in &record.samples {
        let d = &s.diagnostics;
        let row = [
            d.t, d.lyapunov, d.l2_v, d.l2_vt, d.l2_w, d.linf_v, d.linf_vt, d.linf_w, d.l1_vt, d.l1_wt, s.diss_l2, s.diss_l1,
        ];
        let cells: Vec<String> = row.iter().map(|&x| format!("{:.16e}", to_f64(x))).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// `x[,y],v,vt,w` at every node.
pub fn write_state_csv<T: Real>(grid: &Grid<T>, state: &FieldState<T>, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{},v,vt,w", coords_header(grid))?;
    for k in 0..grid.node_count() {
        write_coords(&mut out, grid, k)?;
        writeln!(
            out,
            ",{:.16e},{:.16e},{:.16e}",
            to_f64(state.v[k]),
            to_f64(state.vt[k]),
            to_f64(state.w[k])
        )?;
    }
    Ok(())
}

/// `t,h,seminorm_v,seminorm_vt`, one row per sample and separation.
pub fn write_seminorm_csv<T: Real>(record: &TrajectoryRecord<T>, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "t,h,seminorm_v,seminorm_vt")?;
    for s in &record.samples {
        for m in &s.diagnostics.seminorms {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                to_f64(s.t()),
                to_f64(m.h),
                to_f64(m.v),
                to_f64(m.vt)
            )?;
        }
    }
    Ok(())
}

/// `node,t,v,vt,vtt,wt,int_abs_vtt,int_abs_vt,int_abs_wt` for every probed node.
pub fn write_node_csv<T: Real>(record: &TrajectoryRecord<T>, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "node,t,v,vt,vtt,wt,int_abs_vtt,int_abs_vt,int_abs_wt")?;
    for s in &record.samples {
        for n in &s.nodes {
            let cells: Vec<String> = [n.v, n.vt, n.vtt, n.wt, n.int_abs_vtt, n.int_abs_vt, n.int_abs_wt]
                .iter()
                .map(|&x| format!("{:.16e}", to_f64(x)))
                .collect();
            writeln!(out, "{},{:.16e},{}", n.node, to_f64(s.t()), cells.join(","))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{simulate, Probes, StepperConfig};
    use crate::model::{NonlinearitySpec, SystemParams};

    #[test]
    fn zero_state_writes_zero_rows() {
        let g = Grid::<f64>::interval(1.0, 9).unwrap();
        let p = SystemParams::new(0.5, NonlinearitySpec::monotone_cubic(), g.clone()).unwrap();
        let probes = Probes { seminorm_h: vec![0.25], nodes: vec![4], keep_snapshots: false };
        let rec = simulate(&FieldState::zeros(&g), &p, &StepperConfig::new(0.1).with_stride(5), 1.0, &probes).unwrap();
        let mut buf = Vec::new();
        write_diagnostics_csv(&rec, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 1 + rec.samples.len());
        for row in &rows[1..] {
            assert!(row.split(',').skip(1).all(|c| c.parse::<f64>().unwrap() == 0.0));
        }
        let mut buf = Vec::new();
        write_state_csv(&g, &rec.final_state, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 10);
        let mut buf = Vec::new();
        write_seminorm_csv(&rec, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t,h,seminorm_v,seminorm_vt\n"));
    }
}

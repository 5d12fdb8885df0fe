use crate::error::{Error, Result};
use crate::model::Grid;
use crate::scalar::{from_usize, lit, Real};

fn check_separation<T: Real>(grid: &Grid<T>, h: T) -> Result<()> {
    let dx = grid.min_spacing();
    if !(h >= dx * (T::one() - lit(1e-9))) {
        return Err(Error::Domain(format!("separation {h} is below the grid spacing {dx}")));
    }
    Ok(())
}

/// Largest difference quotient `|u(x₁) − u(x₂)| / |x₁ − x₂|` over node pairs
/// at distance at least `h`.
pub fn lip_seminorm<T: Real>(field: &[T], grid: &Grid<T>, h: T) -> Result<T> {
    grid.check_len(field)?;
    check_separation(grid, h)?;
    let cutoff = h * (T::one() - lit(1e-9));
    let n = grid.node_count();
    let mut best = T::zero();
    if grid.dim() == 1 {
        let dx = grid.spacing()[0];
        let first = (cutoff / dx).ceil().to_usize().unwrap_or(1).max(1);
        for sep in first..n {
            let dist = from_usize::<T>(sep) * dx;
            let mut m = T::zero();
            for i in 0..n - sep {
                m = m.max((field[i + sep] - field[i]).abs());
            }
            best = best.max(m / dist);
        }
        return Ok(best);
    }
    for a in 0..n {
        for b in a + 1..n {
            let dist = grid.distance(a, b);
            if dist >= cutoff {
                best = best.max((field[a] - field[b]).abs() / dist);
            }
        }
    }
    Ok(best)
}

/// Hat-kernel average of radius `h`; kernel weights are renormalized near
/// the boundary so they sum to one at every node.
pub fn mollify<T: Real>(field: &[T], grid: &Grid<T>, h: T) -> Result<Vec<T>> {
    grid.check_len(field)?;
    check_separation(grid, h)?;
    let nodes = grid.nodes_per_axis();
    let spacing = grid.spacing();
    let reach: Vec<usize> = spacing
        .iter()
        .map(|&dx| (h / dx).floor().to_usize().unwrap_or(0))
        .collect();
    let weights = grid.weights();
    let nx = nodes[0];
    let ny = if grid.dim() == 2 { nodes[1] } else { 1 };
    let ry = if grid.dim() == 2 { reach[1] } else { 0 };

    let mut out = vec![T::zero(); field.len()];
    for (k, slot) in out.iter_mut().enumerate() {
        let (i, j) = grid.multi_index(k);
        let mut num = T::zero();
        let mut den = T::zero();
        for jj in j.saturating_sub(ry)..=(j + ry).min(ny - 1) {
            for ii in i.saturating_sub(reach[0])..=(i + reach[0]).min(nx - 1) {
                let q = jj * nx + ii;
                let r = grid.distance(k, q) / h;
                if r < T::one() {
                    let kw = (T::one() - r) * weights[q];
                    num += kw * field[q];
                    den += kw;
                }
            }
        }
        *slot = num / den;
    }
    Ok(out)
}

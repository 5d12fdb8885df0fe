use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real};

/// Uniform tensor grid on an interval or a rectangle with trapezoidal
/// quadrature weights. Nodes are stored x-fastest: `index = j * nx + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    extents: Vec<T>,
    nodes: Vec<usize>,
    spacing: Vec<T>,
    axis_weights: Vec<Vec<T>>,
    weights: Vec<T>,
}

impl<T: Real> Grid<T> {
    pub fn new(dim: usize, extents: &[T], nodes_per_axis: &[usize]) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if extents.len() != dim || nodes_per_axis.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "expected {dim} extents and node counts, got {} and {}",
                extents.len(),
                nodes_per_axis.len()
            )));
        }
        for (axis, (&e, &n)) in extents.iter().zip(nodes_per_axis).enumerate() {
            if !(e > T::zero()) || !e.is_finite() {
                return Err(Error::InvalidGrid(format!("extent on axis {axis} must be positive, got {e}")));
            }
            if n < 3 {
                return Err(Error::InvalidGrid(format!("axis {axis} needs at least 3 nodes, got {n}")));
            }
        }

        let spacing: Vec<T> = extents
            .iter()
            .zip(nodes_per_axis)
            .map(|(&e, &n)| e / from_usize::<T>(n - 1))
            .collect();
        let axis_weights: Vec<Vec<T>> = spacing
            .iter()
            .zip(nodes_per_axis)
            .map(|(&h, &n)| {
                let mut w = vec![h; n];
                w[0] = h * lit(0.5);
                w[n - 1] = h * lit(0.5);
                w
            })
            .collect();
        let weights = if dim == 1 {
            axis_weights[0].clone()
        } else {
            let (wx, wy) = (&axis_weights[0], &axis_weights[1]);
            wy.iter().flat_map(|&b| wx.iter().map(move |&a| a * b)).collect()
        };

        Ok(Self {
            extents: extents.to_vec(),
            nodes: nodes_per_axis.to_vec(),
            spacing,
            axis_weights,
            weights,
        })
    }

    pub fn interval(extent: T, nodes: usize) -> Result<Self> {
        Self::new(1, &[extent], &[nodes])
    }

    pub fn rectangle(extents: [T; 2], nodes: [usize; 2]) -> Result<Self> {
        Self::new(2, &extents, &nodes)
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[T] {
        &self.extents
    }

    pub fn nodes_per_axis(&self) -> &[usize] {
        &self.nodes
    }

    pub fn spacing(&self) -> &[T] {
        &self.spacing
    }

    /// Smallest spacing over all axes.
    pub fn min_spacing(&self) -> T {
        self.spacing.iter().fold(T::infinity(), |m, &h| m.min(h))
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub(crate) fn axis_weights(&self, axis: usize) -> &[T] {
        &self.axis_weights[axis]
    }

    /// Lebesgue measure of the domain.
    pub fn measure(&self) -> T {
        self.extents.iter().fold(T::one(), |p, &e| p * e)
    }

    /// Multi-index `(i, j)` of a node; `j = 0` in 1D.
    pub fn multi_index(&self, index: usize) -> (usize, usize) {
        let nx = self.nodes[0];
        (index % nx, index / nx)
    }

    /// Coordinates of a node; the second entry is zero in 1D.
    pub fn coords(&self, index: usize) -> [T; 2] {
        let (i, j) = self.multi_index(index);
        let x = from_usize::<T>(i) * self.spacing[0];
        let y = if self.dim() == 2 { from_usize::<T>(j) * self.spacing[1] } else { T::zero() };
        [x, y]
    }

    pub fn distance(&self, a: usize, b: usize) -> T {
        let (ia, ja) = self.multi_index(a);
        let (ib, jb) = self.multi_index(b);
        let dx = from_usize::<T>(ia.abs_diff(ib)) * self.spacing[0];
        if self.dim() == 1 {
            dx
        } else {
            let dy = from_usize::<T>(ja.abs_diff(jb)) * self.spacing[1];
            dx.hypot(dy)
        }
    }

    /// Samples `f` at every node.
    pub fn sample(&self, f: impl Fn([T; 2]) -> T) -> Vec<T> {
        (0..self.node_count()).map(|k| f(self.coords(k))).collect()
    }

    pub fn check_len(&self, field: &[T]) -> Result<()> {
        if field.len() != self.node_count() {
            return Err(Error::Shape { expected: self.node_count(), found: field.len() });
        }
        Ok(())
    }

    /// Trapezoidal integral of a nodal field.
    pub fn integrate(&self, field: &[T]) -> T {
        self.weights.iter().zip(field).map(|(&w, &f)| w * f).sum()
    }

    /// Quadrature inner product.
    pub fn inner(&self, a: &[T], b: &[T]) -> T {
        self.weights
            .iter()
            .zip(a.iter().zip(b))
            .map(|(&w, (&x, &y))| w * x * y)
            .sum()
    }

    /// Quadrature measure of the nodes selected by `mask`.
    pub fn masked_measure(&self, mask: &[bool]) -> T {
        self.weights
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(&w, _)| w)
            .sum()
    }

    /// Index of the node closest to `point`.
    pub fn nearest_node(&self, point: [T; 2]) -> usize {
        let axis_index = |axis: usize, x: T| {
            let r = (x / self.spacing[axis]).round();
            let r = r.max(T::zero()).min(from_usize(self.nodes[axis] - 1));
            r.to_usize().unwrap_or(0)
        };
        let i = axis_index(0, point[0]);
        let j = if self.dim() == 2 { axis_index(1, point[1]) } else { 0 };
        j * self.nodes[0] + i
    }
}

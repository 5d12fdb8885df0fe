use crate::scalar::{from_usize, Real};

/// Dense polynomial with coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last() == Some(&T::zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Self { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(T::zero());
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * from_usize::<T>(k))
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(T::zero());
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / from_usize::<T>(k + 1)),
        );
        Self::new(out)
    }

    /// Product with the monomial `x`.
    pub fn shift_up(&self) -> Self {
        let mut out = vec![T::zero()];
        out.extend_from_slice(&self.coeffs);
        Self::new(out)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or_else(T::zero)
                        + other.coeffs.get(k).copied().unwrap_or_else(T::zero)
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calculus_on_cubic() {
        let p = Polynomial::<f64>::new(vec![0.0, -1.0, 0.0, 1.0]);
        assert_eq!(p.eval(2.0), 6.0);
        assert_eq!(p.derivative().coeffs(), &[-1.0, 0.0, 3.0]);
        let anti = p.antiderivative();
        assert!((anti.eval(1.0) - (0.25 - 0.5)).abs() < 1e-15);
        assert_eq!(p.shift_up().degree(), 4);
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = Polynomial::new(vec![1.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 0);
        assert_eq!(p.derivative().eval(3.0), 0.0);
    }
}

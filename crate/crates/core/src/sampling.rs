//! Matrix functions sampled on the unit circle.
//!
//! Nodes are midpoint-shifted, `theta_m = -pi + (2m+1) pi / M`, so no sample
//! sits at `theta = 0` or `theta = +-pi` where the Szegő weight and the sum-rule
//! integrands may vanish or blow up. All circle integrals `int . dtheta/2pi`
//! are the plain node average.

use std::f64::consts::PI;

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg::{kernels, op_norm, CMatrix, MatField, C64, ZERO};

/// Node `m` of the `M`-point midpoint grid.
pub fn node(m: usize, count: usize) -> f64 {
    -PI + (2 * m + 1) as f64 * PI / count as f64
}

/// Index of the node `theta -> -theta` maps `m` onto.
pub fn mirror(m: usize, count: usize) -> usize {
    count - 1 - m
}

pub fn check_node_count(count: usize) -> Result<()> {
    if count < 4 || !count.is_power_of_two() {
        return Err(Error::InvalidSampling(format!(
            "node count {count} must be a power of two and at least 4"
        )));
    }
    Ok(())
}

/// Samples `f(theta_m)` of an `l x l` matrix function on the midpoint grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySampling {
    values: MatField,
}

impl BoundarySampling {
    pub fn new(values: MatField) -> Result<Self> {
        check_node_count(values.len())?;
        Ok(BoundarySampling { values })
    }

    pub fn from_fn(count: usize, dim: usize, mut f: impl FnMut(f64) -> CMatrix) -> Result<Self> {
        check_node_count(count)?;
        let values = MatField::from_fn(dim, count, |m| f(node(m, count)));
        Ok(BoundarySampling { values })
    }

    /// Synthesizes samples from Fourier coefficients `f(theta) = sum_k c_k e^{ik theta}`.
    pub fn from_coefficients(coeffs: &FourierCoefficients) -> Self {
        let count = coeffs.node_count();
        let dim = coeffs.dim();
        let mut values = MatField::zeros(dim, count);
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_inverse(count);
        let mut buf = vec![ZERO; count];
        for e in 0..dim * dim {
            for j in 0..count {
                let k = signed_index(j, count);
                buf[j] = coeffs.raw_slot(j)[e] / phase(k, count);
            }
            fft.process(&mut buf);
            for (m, v) in buf.iter().enumerate() {
                values.slot_mut(m)[e] = *v;
            }
        }
        BoundarySampling { values }
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    pub fn dim(&self) -> usize {
        self.values.dim()
    }

    pub fn theta(&self, m: usize) -> f64 {
        node(m, self.node_count())
    }

    pub fn value(&self, m: usize) -> CMatrix {
        self.values.get(m)
    }

    pub fn values(&self) -> &MatField {
        &self.values
    }

    pub fn into_values(self) -> MatField {
        self.values
    }

    /// Node average of `f(theta)^* g(theta)`, the discrete `<<f, g>>_{L^2}`.
    pub fn inner(&self, other: &BoundarySampling) -> Result<CMatrix> {
        self.same_shape(other)?;
        let l = self.dim();
        let mut acc = vec![ZERO; l * l];
        for m in 0..self.node_count() {
            kernels::adj_mul_acc(l, self.values.slot(m), other.values.slot(m), &mut acc);
        }
        let scale = 1.0 / self.node_count() as f64;
        Ok(CMatrix::from_column_slice(l, l, &acc).scale(scale))
    }

    /// `(avg ||f(theta)||^2)^{1/2}` with the operator norm.
    pub fn norm_l2_1(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| op_norm(&v).powi(2)).sum();
        (sum / self.node_count() as f64).sqrt()
    }

    /// `||avg f(theta)^* f(theta)||^{1/2}`.
    pub fn norm_l2_2(&self) -> f64 {
        let gram = self.inner(self).expect("same shape");
        op_norm(&gram).sqrt()
    }

    /// The `n`-th matrix Fourier coefficient `avg e^{-in theta} f(theta)`.
    pub fn fourier_coeff(&self, n: i64) -> Result<CMatrix> {
        let count = self.node_count();
        if n.unsigned_abs() as usize >= count / 2 {
            return Err(Error::AliasedIndex {
                index: n,
                nodes: count,
            });
        }
        let l = self.dim();
        let mut acc = CMatrix::zeros(l, l);
        for m in 0..count {
            let t = self.theta(m);
            let e = C64::from_polar(1.0, -(n as f64) * t);
            acc += self.value(m) * e;
        }
        Ok(acc.unscale(count as f64))
    }

    /// All coefficients at once by FFT.
    pub fn fourier_coefficients(&self) -> FourierCoefficients {
        let count = self.node_count();
        let dim = self.dim();
        let mut out = MatField::zeros(dim, count);
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(count);
        let mut buf = vec![ZERO; count];
        let scale = 1.0 / count as f64;
        for e in 0..dim * dim {
            for (m, b) in buf.iter_mut().enumerate() {
                *b = self.values.slot(m)[e];
            }
            fft.process(&mut buf);
            for (j, v) in buf.iter().enumerate() {
                let k = signed_index(j, count);
                out.slot_mut(j)[e] = *v * phase(k, count) * scale;
            }
        }
        FourierCoefficients { coeffs: out }
    }

    fn same_shape(&self, other: &BoundarySampling) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if self.node_count() != other.node_count() {
            return Err(Error::DimensionMismatch {
                expected: self.node_count(),
                found: other.node_count(),
            });
        }
        Ok(())
    }

    pub fn map(&self, mut f: impl FnMut(usize, &CMatrix) -> CMatrix) -> BoundarySampling {
        let values = MatField::from_fn(self.dim(), self.node_count(), |m| f(m, &self.value(m)));
        BoundarySampling { values }
    }

    /// Largest node-wise operator norm.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| op_norm(&v)).fold(0.0, f64::max)
    }
}

/// `e^{-ik theta_m} = phase(k) * e^{-2 pi i k m / M}` for the midpoint grid.
fn phase(k: i64, count: usize) -> C64 {
    let count = count as f64;
    C64::from_polar(1.0, k as f64 * PI * (count - 1.0) / count)
}

fn signed_index(j: usize, count: usize) -> i64 {
    if j < count / 2 {
        j as i64
    } else {
        j as i64 - count as i64
    }
}

/// Matrix Fourier coefficients `c_k`, `-M/2 <= k < M/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    coeffs: MatField,
}

impl FourierCoefficients {
    pub fn zeros(dim: usize, count: usize) -> Self {
        FourierCoefficients {
            coeffs: MatField::zeros(dim, count),
        }
    }

    pub fn node_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    fn slot_index(&self, k: i64) -> usize {
        let count = self.node_count() as i64;
        assert!(
            k >= -count / 2 && k < count / 2,
            "Fourier index {k} out of range"
        );
        k.rem_euclid(count) as usize
    }

    pub fn get(&self, k: i64) -> CMatrix {
        self.coeffs.get(self.slot_index(k))
    }

    pub fn set(&mut self, k: i64, value: &CMatrix) {
        let j = self.slot_index(k);
        self.coeffs.set(j, value);
    }

    pub(crate) fn raw_slot(&self, j: usize) -> &[C64] {
        self.coeffs.slot(j)
    }

    /// Largest `||c_k||` over `k` in `range`.
    pub fn max_norm(&self, range: impl IntoIterator<Item = i64>) -> f64 {
        range
            .into_iter()
            .map(|k| op_norm(&self.get(k)))
            .fold(0.0, f64::max)
    }
}

/// `e^{i theta}` at node `m`.
pub fn unit_point(m: usize, count: usize) -> C64 {
    C64::from_polar(1.0, node(m, count))
}

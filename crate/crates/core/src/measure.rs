//! Matrix-valued measures on the real line with essential support `[-2, 2]`.
//!
//! A measure is an absolutely continuous density `f(x)` on `[-2, 2]` plus a
//! finite list of Hermitian PSD point masses `w_j` at energies `|E_j| > 2`.
//! The density is never integrated in `x`. Under `x = 2 cos(theta)` every
//! integral becomes a circle average against the weight
//! `w(theta) = 2 pi |sin theta| f(2 cos theta)`, which is even in `theta`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{
    c64, det, diag, hermitian_defect, hermitian_eigen, identity, inverse_sqrt, kernels, op_norm,
    rank, CMatrix, MatField, Tolerances, C64, ZERO,
};
use crate::sampling::{check_node_count, node, BoundarySampling, FourierCoefficients};

/// Default number of circle nodes for the absolutely continuous part.
pub const DEFAULT_QUAD_ORDER: usize = 4096;

/// Edge behavior of a scalar density at `x = +-2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    /// `sqrt(4 - x^2) / (2 pi)`, the free (semicircle) law.
    Semicircle,
    /// `1 / (pi sqrt(4 - x^2))`, the equilibrium (arcsine) law.
    Arcsine,
}

impl Edge {
    /// Circle weight of the unperturbed law; exact in `theta`.
    fn weight(self, theta: f64) -> f64 {
        match self {
            Edge::Semicircle => 2.0 * theta.sin().powi(2),
            Edge::Arcsine => 1.0,
        }
    }
}

/// `edge(x) * poly(x)` with `poly` given by ascending real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarDensity {
    pub edge: Edge,
    pub poly: Vec<f64>,
}

impl ScalarDensity {
    pub fn new(edge: Edge, poly: Vec<f64>) -> Self {
        ScalarDensity { edge, poly }
    }

    pub fn semicircle() -> Self {
        ScalarDensity {
            edge: Edge::Semicircle,
            poly: vec![1.0],
        }
    }

    pub fn arcsine() -> Self {
        ScalarDensity {
            edge: Edge::Arcsine,
            poly: vec![1.0],
        }
    }

    fn weight(&self, theta: f64) -> f64 {
        let x = 2.0 * theta.cos();
        self.edge.weight(theta) * horner(&self.poly, x)
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Density families for the absolutely continuous part.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    /// `f(x) * 1` in dimension `dim`.
    Scalar { density: ScalarDensity, dim: usize },
    /// `U^* diag(f_1, .., f_l) U` for a constant unitary `U`.
    Diagonal {
        entries: Vec<ScalarDensity>,
        unitary: CMatrix,
    },
    /// `edge(x) * sum_k C_k x^k` with Hermitian `C_k`.
    MatrixPolynomial { edge: Edge, coeffs: Vec<CMatrix> },
    /// `R(rate x)^T diag(f_1, f_2) R(rate x)` with `R` the plane rotation; `l = 2`.
    Twisted {
        entries: [ScalarDensity; 2],
        rate: f64,
    },
    /// Circle weight `w(theta)` tabulated on a midpoint grid, trigonometrically
    /// interpolated elsewhere.
    Table { samples: BoundarySampling },
    /// No absolutely continuous part.
    Zero { dim: usize },
}

impl Density {
    pub fn dim(&self) -> usize {
        match self {
            Density::Scalar { dim, .. } | Density::Zero { dim } => *dim,
            Density::Diagonal { entries, .. } => entries.len(),
            Density::MatrixPolynomial { coeffs, .. } => coeffs.first().map_or(0, |c| c.nrows()),
            Density::Twisted { .. } => 2,
            Density::Table { samples } => samples.dim(),
        }
    }

    fn validate(&self) -> Result<()> {
        let l = self.dim();
        if l == 0 {
            return Err(Error::Validation(
                "density: dimension must be at least 1".into(),
            ));
        }
        match self {
            Density::Diagonal { unitary, .. } => {
                if unitary.nrows() != l || unitary.ncols() != l {
                    return Err(Error::DimensionMismatch {
                        expected: l,
                        found: unitary.nrows(),
                    });
                }
                let defect = crate::linalg::unitarity_defect(unitary);
                if defect > 1e-12 {
                    return Err(Error::Validation(format!(
                        "density: conjugating matrix is not unitary (defect {defect:.3e})"
                    )));
                }
            }
            Density::MatrixPolynomial { coeffs, .. } => {
                for (k, c) in coeffs.iter().enumerate() {
                    if c.nrows() != l || c.ncols() != l {
                        return Err(Error::DimensionMismatch {
                            expected: l,
                            found: c.nrows(),
                        });
                    }
                    let defect = hermitian_defect(c);
                    if defect > 1e-10 * (1.0 + op_norm(c)) {
                        return Err(Error::Validation(format!(
                            "density: coefficient {k} is not Hermitian (defect {defect:.3e})"
                        )));
                    }
                }
            }
            Density::Table { samples } => {
                let count = samples.node_count();
                let scale = 1.0 + samples.sup_norm();
                for m in 0..count {
                    let a = samples.value(m);
                    let b = samples.value(crate::sampling::mirror(m, count));
                    if op_norm(&(&a - &b)) > 1e-10 * scale {
                        return Err(Error::Validation(format!(
                            "density: table is not even in theta at node {m}"
                        )));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Circle weight at an arbitrary angle.
    pub fn weight_at(&self, theta: f64) -> CMatrix {
        match self {
            Density::Scalar { density, dim } => identity(*dim).scale(density.weight(theta)),
            Density::Diagonal { entries, unitary } => {
                let d: Vec<f64> = entries.iter().map(|e| e.weight(theta)).collect();
                unitary.adjoint() * crate::linalg::diag(&d) * unitary
            }
            Density::MatrixPolynomial { edge, coeffs } => {
                let x = 2.0 * theta.cos();
                let l = coeffs[0].nrows();
                let q = coeffs
                    .iter()
                    .rev()
                    .fold(CMatrix::zeros(l, l), |acc, c| acc * c64(x, 0.0) + c);
                crate::linalg::hermitian_part(&q).scale(edge.weight(theta))
            }
            Density::Twisted { entries, rate } => {
                let a = rate * 2.0 * theta.cos();
                let r = rotation(a);
                let d = crate::linalg::diag(&[entries[0].weight(theta), entries[1].weight(theta)]);
                r.transpose() * d * r
            }
            Density::Table { samples } => {
                let coeffs = samples.fourier_coefficients();
                let half = (samples.node_count() / 2) as i64;
                let l = samples.dim();
                let mut acc = CMatrix::zeros(l, l);
                for k in -half..half {
                    let c = split_nyquist(&coeffs, k, half);
                    acc += c * C64::from_polar(1.0, k as f64 * theta);
                }
                crate::linalg::hermitian_part(&acc)
            }
            Density::Zero { dim } => CMatrix::zeros(*dim, *dim),
        }
    }

    /// Circle weight on the `count`-node midpoint grid, made exactly even by
    /// averaging each node with its mirror.
    pub fn sample(&self, count: usize) -> Result<BoundarySampling> {
        let raw = self.sample_raw(count)?;
        Ok(raw.map(|m, v| {
            let u = raw.value(crate::sampling::mirror(m, count));
            (v + u).scale(0.5)
        }))
    }

    fn sample_raw(&self, count: usize) -> Result<BoundarySampling> {
        check_node_count(count)?;
        match self {
            Density::Table { samples } => {
                let src = samples.fourier_coefficients();
                let half_src = (samples.node_count() / 2) as i64;
                let half_dst = (count / 2) as i64;
                let mut dst = FourierCoefficients::zeros(samples.dim(), count);
                let top = half_src.min(half_dst);
                for k in -top..top {
                    // Trigonometric interpolant keeps the Nyquist mode symmetric.
                    let c = split_nyquist(&src, k, half_src);
                    dst.set(k, &c);
                }
                if half_dst > half_src {
                    let c = split_nyquist(&src, -half_src, half_src);
                    dst.set(half_src, &c);
                }
                let out = BoundarySampling::from_coefficients(&dst);
                Ok(out.map(|_, v| crate::linalg::hermitian_part(v)))
            }
            _ => BoundarySampling::from_fn(count, self.dim(), |t| self.weight_at(t)),
        }
    }
}

fn split_nyquist(coeffs: &FourierCoefficients, k: i64, half: i64) -> CMatrix {
    if k.abs() == half {
        coeffs.get(-half).scale(0.5)
    } else {
        coeffs.get(k)
    }
}

fn rotation(a: f64) -> CMatrix {
    let (s, c) = a.sin_cos();
    crate::linalg::from_rows(&[vec![c, -s], vec![s, c]], None)
}

/// A point mass `w` at energy `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mass {
    pub energy: f64,
    pub weight: CMatrix,
}

/// How the constructor treats total mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Rescale, then congruence by `X^{-1/2}` so that the total mass is exactly `1`.
    #[default]
    Auto,
    /// Reject measures whose total mass differs from `1` by more than `tol.norm`.
    Strict,
}

/// Disk coordinate of a point mass.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub energy: f64,
    pub z: C64,
    pub multiplicity: usize,
    pub weight: CMatrix,
}

/// Disk preimage `z` of `E`, `|z| < 1`, `z + 1/z = E`.
pub fn disk_coordinate(energy: f64) -> f64 {
    let s = energy.signum();
    // Written to avoid cancellation for large |E|.
    2.0 / (energy + s * (energy * energy - 4.0).sqrt())
}

/// Preimage of `zeta` under `z -> z + 1/z` inside the unit disk.
pub fn disk_preimage(zeta: C64) -> C64 {
    let r = (zeta * zeta - 4.0).sqrt();
    let a = (zeta - r) * 0.5;
    let b = (zeta + r) * 0.5;
    if a.norm() <= b.norm() {
        a
    } else {
        b
    }
}

/// Points and matrix weights of the discretized measure.
///
/// The first `ac_len` points are `x_m = 2 cos(theta_m)` over the nodes with
/// `theta_m > 0` (the weight is even, so each carries twice the node weight);
/// the rest are the point masses.
///
/// Values at a mass point `E_j` are stored as `Q_j^* f(E_j)`, where `Q_j`
/// diagonalizes the mass with its kernel columns weighted by exactly zero.
/// Polynomial recurrences act on the right, so the kernel rows (which may
/// grow geometrically) never feed into inner products.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub points: Vec<f64>,
    pub weights: MatField,
    pub ac_len: usize,
    pub frames: Vec<CMatrix>,
}

impl Discretization {
    pub fn dim(&self) -> usize {
        self.weights.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Stored value of the constant function `1`.
    pub fn unit_values(&self) -> MatField {
        let l = self.dim();
        let mut out = MatField::identity(l, self.len());
        for (j, q) in self.frames.iter().enumerate() {
            out.set(self.ac_len + j, &q.adjoint());
        }
        out
    }

    /// Undoes the frame rotation at point `i`.
    pub fn true_value(&self, i: usize, stored: &CMatrix) -> CMatrix {
        match i.checked_sub(self.ac_len) {
            Some(j) => &self.frames[j] * stored,
            None => stored.clone(),
        }
    }

    /// `sum_i f_i^* W_i g_i` over per-point values.
    pub fn inner(&self, f: &MatField, g: &MatField) -> CMatrix {
        let l = self.dim();
        let mut acc = vec![ZERO; l * l];
        let mut tmp = vec![ZERO; l * l];
        for i in 0..self.len() {
            kernels::sandwich_acc(
                l,
                f.slot(i),
                self.weights.slot(i),
                g.slot(i),
                &mut tmp,
                &mut acc,
            );
        }
        CMatrix::from_column_slice(l, l, &acc)
    }
}

/// A normalized matrix measure.
#[derive(Debug)]
pub struct MatrixMeasure {
    density: Density,
    /// Hermitian `C` with effective density `C f C`.
    congruence: CMatrix,
    masses: Vec<Mass>,
    quad_order: usize,
    tol: Tolerances,
    coefficients: OnceLock<FourierCoefficients>,
    discretization: OnceLock<Discretization>,
}

impl Clone for MatrixMeasure {
    fn clone(&self) -> Self {
        MatrixMeasure {
            density: self.density.clone(),
            congruence: self.congruence.clone(),
            masses: self.masses.clone(),
            quad_order: self.quad_order,
            tol: self.tol,
            coefficients: OnceLock::new(),
            discretization: OnceLock::new(),
        }
    }
}

/// Builder for [`MatrixMeasure`].
#[derive(Debug, Clone)]
pub struct MeasureBuilder {
    density: Density,
    masses: Vec<Mass>,
    quad_order: usize,
    normalization: Normalization,
    tol: Tolerances,
    require_szego: bool,
}

impl MeasureBuilder {
    pub fn mass(mut self, energy: f64, weight: CMatrix) -> Self {
        self.masses.push(Mass { energy, weight });
        self
    }

    pub fn masses(mut self, masses: impl IntoIterator<Item = Mass>) -> Self {
        self.masses.extend(masses);
        self
    }

    pub fn quad_order(mut self, m: usize) -> Self {
        self.quad_order = m;
        self
    }

    pub fn normalization(mut self, n: Normalization) -> Self {
        self.normalization = n;
        self
    }

    pub fn tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    /// Skip the `log det w > -inf` check. Only meaningful for degenerate test measures.
    pub fn allow_non_szego(mut self) -> Self {
        self.require_szego = false;
        self
    }

    pub fn build(self) -> Result<MatrixMeasure> {
        let tol = self.tol;
        check_node_count(self.quad_order)?;
        self.density.validate()?;
        let l = self.density.dim();

        for (j, m) in self.masses.iter().enumerate() {
            let j = j + 1;
            if m.weight.nrows() != l || m.weight.ncols() != l {
                return Err(Error::DimensionMismatch {
                    expected: l,
                    found: m.weight.nrows(),
                });
            }
            if !m.energy.is_finite() || m.energy.abs() <= 2.0 {
                return Err(Error::MassOnSupport { energy: m.energy });
            }
            let scale = 1.0 + op_norm(&m.weight);
            let defect = hermitian_defect(&m.weight);
            if defect > tol.herm * scale {
                return Err(Error::Validation(format!(
                    "mass {j}: weight is not Hermitian (defect {defect:.3e})"
                )));
            }
            let min = hermitian_eigen(&m.weight).0[0];
            if min < -tol.herm * scale {
                return Err(Error::Validation(format!(
                    "mass {j}: weight has negative eigenvalue {min:.3e}"
                )));
            }
        }
        for a in 0..self.masses.len() {
            for b in a + 1..self.masses.len() {
                if self.masses[a].energy == self.masses[b].energy {
                    return Err(Error::Validation(format!(
                        "masses {} and {}: energies coincide at E = {}",
                        a + 1,
                        b + 1,
                        self.masses[a].energy
                    )));
                }
            }
        }

        let w = self.density.sample(self.quad_order)?;
        let scale = 1.0 + w.sup_norm();
        for m in 0..w.node_count() {
            let v = w.value(m);
            let defect = hermitian_defect(&v);
            if defect > tol.herm * scale {
                return Err(Error::Validation(format!(
                    "density: not Hermitian at node {m} (defect {defect:.3e})"
                )));
            }
            let min = hermitian_eigen(&v).0[0];
            if min < -tol.herm * scale {
                return Err(Error::Validation(format!(
                    "density: negative eigenvalue {min:.3e} at node {m}"
                )));
            }
        }

        let ac = crate::linalg::hermitian_part(&w.fourier_coeff(0)?);
        let total = self.masses.iter().fold(ac, |acc, m| acc + &m.weight);
        let congruence = match self.normalization {
            Normalization::Strict => {
                let err = op_norm(&(&total - identity(l)));
                if err > tol.norm {
                    return Err(Error::Validation(format!(
                        "total mass differs from identity by {err:.3e}"
                    )));
                }
                identity(l)
            }
            Normalization::Auto => {
                let s = total.trace().re / l as f64;
                if !(s > 0.0) {
                    return Err(Error::Validation("total mass is zero".into()));
                }
                let rescaled = total.unscale(s);
                inverse_sqrt(&rescaled, &tol)
                    .map_err(|_| Error::Validation("total mass is singular".into()))?
                    .unscale(s.sqrt())
            }
        };

        let masses: Vec<Mass> = self
            .masses
            .into_iter()
            .map(|m| Mass {
                energy: m.energy,
                weight: crate::linalg::hermitian_part(&(&congruence * &m.weight * &congruence)),
            })
            .collect();
        let measure = MatrixMeasure {
            density: self.density,
            congruence,
            masses,
            quad_order: self.quad_order,
            tol,
            coefficients: OnceLock::new(),
            discretization: OnceLock::new(),
        };

        if self.require_szego {
            let w = measure.szego_weight_at(measure.quad_order)?;
            for m in 0..w.node_count() {
                let d = det(&w.value(m)).re;
                if !(d > 0.0) || !d.ln().is_finite() {
                    return Err(Error::Validation(format!(
                        "Szegő condition: log det w is -inf at node {m} (det {d:.3e})"
                    )));
                }
            }
        }
        Ok(measure)
    }
}

impl MatrixMeasure {
    pub fn builder(density: Density) -> MeasureBuilder {
        MeasureBuilder {
            density,
            masses: Vec::new(),
            quad_order: DEFAULT_QUAD_ORDER,
            normalization: Normalization::Auto,
            tol: Tolerances::default(),
            require_szego: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn masses(&self) -> &[Mass] {
        &self.masses
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Hermitian `C` with the stored density scaled to `C f C`.
    pub fn congruence(&self) -> &CMatrix {
        &self.congruence
    }

    /// `U^* mu U` for a constant unitary `U`, keeping the density family.
    pub fn conjugated(&self, u: &CMatrix) -> Result<MatrixMeasure> {
        let w = self.szego_weight()?;
        let samples = w.map(|_, v| u.adjoint() * v * u);
        let masses = self.masses.iter().map(|m| Mass {
            energy: m.energy,
            weight: u.adjoint() * &m.weight * u,
        });
        MatrixMeasure::builder(Density::Table { samples })
            .masses(masses)
            .quad_order(self.quad_order)
            .normalization(Normalization::Strict)
            .tolerances(self.tol)
            .build()
    }

    /// Effective circle weight at one angle.
    pub fn weight_at(&self, theta: f64) -> CMatrix {
        let raw = self.density.weight_at(theta);
        crate::linalg::hermitian_part(&(&self.congruence * raw * &self.congruence))
    }

    /// Szegő-mapped weight on the measure's own grid.
    pub fn szego_weight(&self) -> Result<BoundarySampling> {
        self.szego_weight_at(self.quad_order)
    }

    /// Szegő-mapped weight `w(theta) = 2 pi |sin theta| f(2 cos theta)` on any grid.
    pub fn szego_weight_at(&self, count: usize) -> Result<BoundarySampling> {
        let raw = self.density.sample(count)?;
        let c = &self.congruence;
        Ok(raw.map(|_, v| crate::linalg::hermitian_part(&(c * v * c))))
    }

    /// `f(x)` for `x` in `(-2, 2)`.
    pub fn density_at(&self, x: f64) -> CMatrix {
        let theta = (x / 2.0).clamp(-1.0, 1.0).acos();
        self.weight_at(theta).unscale(2.0 * PI * theta.sin().abs())
    }

    fn coefficients(&self) -> &FourierCoefficients {
        self.coefficients.get_or_init(|| {
            self.szego_weight()
                .expect("validated at construction")
                .fourier_coefficients()
        })
    }

    /// The quadrature used for all inner products.
    pub fn discretization(&self) -> &Discretization {
        self.discretization.get_or_init(|| {
            let count = self.quad_order;
            let half = count / 2;
            let w = self.szego_weight().expect("validated at construction");
            let l = self.dim();
            let len = half + self.masses.len();
            let mut points = Vec::with_capacity(len);
            let mut weights = MatField::zeros(l, len);
            for i in 0..half {
                let m = half + i;
                points.push(2.0 * node(m, count).cos());
                weights.set(i, &w.value(m).scale(2.0 / count as f64));
            }
            let mut frames = Vec::with_capacity(self.masses.len());
            for (j, mass) in self.masses.iter().enumerate() {
                let (mut lam, q) = hermitian_eigen(&mass.weight);
                let r = rank(&mass.weight, self.tol.rank);
                for v in &mut lam[..l - r] {
                    *v = 0.0;
                }
                points.push(mass.energy);
                weights.set(half + j, &diag(&lam));
                frames.push(q);
            }
            Discretization {
                points,
                weights,
                ac_len: half,
                frames,
            }
        })
    }

    /// `int f(x)^* dmu(x) g(x)` for matrix functions of `x`.
    pub fn inner_product(
        &self,
        f: impl Fn(f64) -> CMatrix,
        g: impl Fn(f64) -> CMatrix,
    ) -> Result<CMatrix> {
        let d = self.discretization();
        let l = self.dim();
        let fv = eval_on(d, l, &f)?;
        let gv = eval_on(d, l, &g)?;
        Ok(d.inner(&fv, &gv))
    }

    /// Total mass `mu(R)`.
    pub fn total_mass(&self) -> CMatrix {
        let l = self.dim();
        self.inner_product(|_| identity(l), |_| identity(l))
            .expect("square identity")
    }

    /// `m(zeta) = int dmu(x) / (x - zeta)` off `[-2, 2]` and the masses.
    pub fn m_function(&self, zeta: C64) -> Result<CMatrix> {
        let dist = if zeta.re.abs() <= 2.0 {
            zeta.im.abs()
        } else {
            (C64::new(zeta.re.signum() * 2.0, 0.0) - zeta).norm()
        };
        if dist <= self.tol.pole_radius {
            return Err(Error::PoleProximity { distance: dist });
        }
        for m in &self.masses {
            let d = (C64::new(m.energy, 0.0) - zeta).norm();
            if d <= self.tol.pole_radius {
                return Err(Error::PoleProximity { distance: d });
            }
        }
        let z = disk_preimage(zeta);
        let mut out = -self.ac_disk_series(z);
        for m in &self.masses {
            out += m.weight.clone() / (C64::new(m.energy, 0.0) - zeta);
        }
        Ok(out)
    }

    /// `M(z) = -m(z + 1/z)` for `|z| < 1`.
    pub fn big_m_function(&self, z: C64) -> Result<CMatrix> {
        if z.norm() >= 1.0 {
            return Err(Error::RadiusExceeded {
                modulus: z.norm(),
                limit: 1.0,
            });
        }
        if z.norm() == 0.0 {
            return Ok(CMatrix::zeros(self.dim(), self.dim()));
        }
        Ok(-self.m_function(z + z.inv())?)
    }

    /// `-m_ac(z + 1/z) = z (c_0 + 2 sum_{k>=1} c_k z^k) / (1 - z^2)`, with `c_k`
    /// the Fourier coefficients of the even weight.
    fn ac_disk_series(&self, z: C64) -> CMatrix {
        let c = self.coefficients();
        let half = (c.node_count() / 2) as i64;
        let l = self.dim();
        let mut acc = CMatrix::zeros(l, l);
        // Horner in z over k = half-1 .. 1.
        for k in (1..half).rev() {
            acc = acc * z + c.get(k).scale(2.0);
        }
        acc = acc * z + c.get(0);
        acc * (z / (C64::new(1.0, 0.0) - z * z))
    }

    /// Bound states sorted by `|z|`, ties by ascending argument.
    pub fn bound_states(&self) -> Vec<BoundState> {
        let mut states: Vec<BoundState> = self
            .masses
            .iter()
            .map(|m| {
                let z = disk_coordinate(m.energy);
                BoundState {
                    energy: m.energy,
                    z: C64::new(z, 0.0),
                    multiplicity: rank(&m.weight, self.tol.rank),
                    weight: m.weight.clone(),
                }
            })
            .collect();
        states.sort_by(|a, b| {
            a.z.norm()
                .total_cmp(&b.z.norm())
                .then(a.z.arg().total_cmp(&b.z.arg()))
        });
        states
    }
}

fn eval_on(d: &Discretization, l: usize, f: &impl Fn(f64) -> CMatrix) -> Result<MatField> {
    let mut out = MatField::zeros(l, d.len());
    for (i, &x) in d.points.iter().enumerate() {
        let mut v = f(x);
        if v.nrows() != l || v.ncols() != l {
            return Err(Error::DimensionMismatch {
                expected: l,
                found: v.nrows(),
            });
        }
        if let Some(j) = i.checked_sub(d.ac_len) {
            v = d.frames[j].adjoint() * v;
        }
        out.set(i, &v);
    }
    Ok(out)
}

/// `sum m_k (1 - |z_k|)` and `sum (|E_k| - 2)^{1/2}` over the bound states.
pub fn bound_state_sums(states: &[BoundState]) -> (f64, f64) {
    let blaschke = states
        .iter()
        .map(|s| s.multiplicity as f64 * (1.0 - s.z.norm()))
        .sum();
    let lieb = states.iter().map(|s| (s.energy.abs() - 2.0).sqrt()).sum();
    (blaschke, lieb)
}

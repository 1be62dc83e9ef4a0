//! Dense complex linear algebra over a small tensor-product factor layout.
//!
//! Basis indices are row-major over the layout's factor order: the last
//! factor varies fastest. The scenario layout is `(L, A, M, B, N, C)` with
//! three-level laboratories and two-level electrons, 216 amplitudes in total.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Amplitude = Complex64;

/// Tolerance for unitarity and normalization checks.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance on mixture weight sums.
pub const MIXTURE_TOL: f64 = 1e-12;

const ZERO: Amplitude = Complex64::new(0.0, 0.0);
const ONE: Amplitude = Complex64::new(1.0, 0.0);

/// One tensor factor of the global wavefunction.
///
/// `L`, `M`, `N` are the sealed laboratories (three levels each) and `A`,
/// `B`, `C` the electrons measured inside them (spin only, two levels).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Factor {
    L,
    A,
    M,
    B,
    N,
    C,
}

impl Factor {
    pub const CANONICAL: [Factor; 6] = [Factor::L, Factor::A, Factor::M, Factor::B, Factor::N, Factor::C];
    pub const ELECTRONS: [Factor; 3] = [Factor::A, Factor::B, Factor::C];
    pub const LABS: [Factor; 3] = [Factor::L, Factor::M, Factor::N];

    pub fn dim(self) -> usize {
        if self.is_lab() {
            3
        } else {
            2
        }
    }

    pub fn is_lab(self) -> bool {
        matches!(self, Factor::L | Factor::M | Factor::N)
    }

    pub fn name(self) -> &'static str {
        match self {
            Factor::L => "L",
            Factor::A => "A",
            Factor::M => "M",
            Factor::B => "B",
            Factor::N => "N",
            Factor::C => "C",
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered list of distinct factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactorLayout {
    factors: Vec<Factor>,
}

impl FactorLayout {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        for (i, f) in factors.iter().enumerate() {
            if factors[..i].contains(f) {
                return Err(Error::DuplicateFactor(*f));
            }
        }
        Ok(Self { factors })
    }

    /// The global `(L, A, M, B, N, C)` layout.
    pub fn canonical() -> Self {
        Self { factors: Factor::CANONICAL.to_vec() }
    }

    pub fn single(factor: Factor) -> Self {
        Self { factors: vec![factor] }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim()).product()
    }

    pub fn position(&self, factor: Factor) -> Option<usize> {
        self.factors.iter().position(|&f| f == factor)
    }

    pub fn contains(&self, factor: Factor) -> bool {
        self.position(factor).is_some()
    }

    /// Row-major stride of each factor.
    pub fn strides(&self) -> Vec<usize> {
        let dims = self.dims();
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        strides
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let dims = self.dims();
        let mut digits = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            digits[k] = index % dims[k];
            index /= dims[k];
        }
        digits
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(self.dims()).fold(0, |acc, (&d, dim)| acc * dim + d)
    }

    pub fn concat(&self, other: &FactorLayout) -> Result<FactorLayout> {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        FactorLayout::new(factors)
    }

    fn positions_of(&self, targets: &[Factor]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(targets.len());
        for (i, &t) in targets.iter().enumerate() {
            if targets[..i].contains(&t) {
                return Err(Error::DuplicateFactor(t));
            }
            out.push(self.position(t).ok_or_else(|| Error::UnknownFactor(t, self.to_string()))?);
        }
        Ok(out)
    }
}

impl fmt::Display for FactorLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{factor}")?;
        }
        f.write_str(")")
    }
}

/// Amplitude array over a factor layout.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    layout: FactorLayout,
    amps: Vec<Amplitude>,
}

impl StateVector {
    pub fn new(layout: FactorLayout, amps: Vec<Amplitude>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch { expected: layout.total_dim(), found: amps.len() });
        }
        if let Some(i) = amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { layout, amps })
    }

    /// Single-factor state from its amplitudes.
    pub fn on_factor(factor: Factor, amps: &[Amplitude]) -> Result<Self> {
        Self::new(FactorLayout::single(factor), amps.to_vec())
    }

    /// Computational basis state with the given per-factor digits.
    pub fn basis(layout: FactorLayout, digits: &[usize]) -> Result<Self> {
        let dims = layout.dims();
        if digits.len() != dims.len() {
            return Err(Error::DimensionMismatch { expected: dims.len(), found: digits.len() });
        }
        for (&d, &dim) in digits.iter().zip(&dims) {
            if d >= dim {
                return Err(Error::DimensionMismatch { expected: dim, found: d });
            }
        }
        let mut amps = vec![ZERO; layout.total_dim()];
        amps[layout.index(digits)] = ONE;
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> &FactorLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn amplitude(&self, digits: &[usize]) -> Amplitude {
        self.amps[self.layout.index(digits)]
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: Amplitude) -> Self {
        Self { layout: self.layout.clone(), amps: self.amps.iter().map(|a| a * c).collect() }
    }

    /// Componentwise sum; layouts must match.
    pub fn add(&self, other: &StateVector) -> Result<Self> {
        self.check_same_layout(other)?;
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect();
        Ok(Self { layout: self.layout.clone(), amps })
    }

    /// Largest amplitude-wise difference; layouts must match.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.check_same_layout(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Same state expressed over a permutation of its factors.
    pub fn reorder(&self, target: &FactorLayout) -> Result<Self> {
        if target.len() != self.layout.len() {
            return Err(Error::LayoutMismatch(self.layout.to_string(), target.to_string()));
        }
        let perm = target.positions_of(self.layout.factors())?;
        let mut amps = vec![ZERO; self.amps.len()];
        let mut new_digits = vec![0; target.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            for (k, d) in self.layout.digits(i).into_iter().enumerate() {
                new_digits[perm[k]] = d;
            }
            amps[target.index(&new_digits)] = a;
        }
        Ok(Self { layout: target.clone(), amps })
    }

    fn check_same_layout(&self, other: &StateVector) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch(self.layout.to_string(), other.layout.to_string()));
        }
        Ok(())
    }
}

/// Kronecker product; the result's layout is `a`'s factors followed by `b`'s.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let layout = a.layout.concat(&b.layout)?;
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amps {
        amps.extend(b.amps.iter().map(|y| x * y));
    }
    Ok(StateVector { layout, amps })
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner(a: &StateVector, b: &StateVector) -> Result<Amplitude> {
    a.check_same_layout(b)?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<Amplitude>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.data[i * dim + i] = ONE;
        }
        op
    }

    pub fn from_rows(dim: usize, data: Vec<Amplitude>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Amplitude) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Rank-one `|ket⟩⟨bra|`.
    pub fn outer(ket: &[Amplitude], bra: &[Amplitude]) -> Result<Self> {
        if ket.len() != bra.len() {
            return Err(Error::DimensionMismatch { expected: ket.len(), found: bra.len() });
        }
        Ok(Self::from_fn(ket.len(), |i, j| ket[i] * bra[j].conj()))
    }

    /// Projector onto a single (assumed normalized) vector.
    pub fn projector(v: &[Amplitude]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Amplitude {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Amplitude) {
        self.data[row * self.dim + col] = value;
    }

    pub fn column(&self, col: usize) -> Vec<Amplitude> {
        (0..self.dim).map(|r| self.get(r, col)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn matmul(&self, rhs: &Operator) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rhs.dim });
        }
        let n = self.dim;
        Ok(Self::from_fn(n, |i, j| (0..n).map(|k| self.get(i, k) * rhs.get(k, j)).sum()))
    }

    pub fn apply(&self, v: &[Amplitude]) -> Result<Vec<Amplitude>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        Ok((0..self.dim).map(|i| (0..self.dim).map(|k| self.get(i, k) * v[k]).sum()).collect())
    }

    pub fn kron(&self, rhs: &Operator) -> Self {
        let (m, n) = (self.dim, rhs.dim);
        Self::from_fn(m * n, |i, j| self.get(i / n, j / n) * rhs.get(i % n, j % n))
    }

    pub fn add(&self, rhs: &Operator) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rhs.dim });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn scale(&self, c: Amplitude) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn max_abs_diff(&self, rhs: &Operator) -> f64 {
        if self.dim != rhs.dim {
            return f64::INFINITY;
        }
        self.data.iter().zip(&rhs.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Amplitude {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) < tol
    }
}

/// `‖U†U − I‖_max`.
pub fn unitarity_defect(op: &Operator) -> f64 {
    match op.adjoint().matmul(op) {
        Ok(p) => p.max_abs_diff(&Operator::identity(op.dim())),
        Err(_) => f64::INFINITY,
    }
}

pub fn check_unitary(op: &Operator, tol: f64) -> bool {
    unitarity_defect(op) < tol
}

/// Applies `op ⊗ I` where `op` acts on `targets` (row-major in the order given).
pub fn apply_local(op: &Operator, targets: &[Factor], state: &StateVector) -> Result<StateVector> {
    let layout = state.layout();
    let positions = layout.positions_of(targets)?;
    let dims = layout.dims();
    let strides = layout.strides();
    let target_dims: Vec<usize> = positions.iter().map(|&p| dims[p]).collect();
    let sub_dim: usize = target_dims.iter().product();
    if op.dim() != sub_dim {
        return Err(Error::DimensionMismatch { expected: sub_dim, found: op.dim() });
    }

    // full-index offset contributed by each target sub-index
    let offsets: Vec<usize> = (0..sub_dim)
        .map(|mut s| {
            let mut off = 0;
            for k in (0..positions.len()).rev() {
                off += (s % target_dims[k]) * strides[positions[k]];
                s /= target_dims[k];
            }
            off
        })
        .collect();

    let mut out = vec![ZERO; state.dim()];
    for (i, &amp) in state.amps.iter().enumerate() {
        if amp == ZERO {
            continue;
        }
        let digits = layout.digits(i);
        let sub = positions.iter().zip(&target_dims).fold(0, |acc, (&p, &d)| acc * d + digits[p]);
        let base = i - offsets[sub];
        for (row, off) in offsets.iter().enumerate() {
            let c = op.get(row, sub);
            if c != ZERO {
                out[base + off] += c * amp;
            }
        }
    }
    Ok(StateVector { layout: layout.clone(), amps: out })
}

/// Reduced density matrix on `keep` (row-major in the order given), tracing out the rest.
pub fn reduced_density(state: &StateVector, keep: &[Factor]) -> Result<Operator> {
    let layout = state.layout();
    let positions = layout.positions_of(keep)?;
    let dims = layout.dims();
    let keep_dim: usize = positions.iter().map(|&p| dims[p]).product();
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !positions.contains(k)).collect();
    let rest_dim: usize = rest.iter().map(|&p| dims[p]).product();

    // columns[r][k] = ψ(k, r)
    let mut columns = vec![vec![ZERO; keep_dim]; rest_dim];
    for (i, &amp) in state.amps.iter().enumerate() {
        let digits = layout.digits(i);
        let k = positions.iter().fold(0, |acc, &p| acc * dims[p] + digits[p]);
        let r = rest.iter().fold(0, |acc, &p| acc * dims[p] + digits[p]);
        columns[r][k] = amp;
    }
    let mut rho = Operator::zeros(keep_dim);
    for col in &columns {
        for i in 0..keep_dim {
            if col[i] == ZERO {
                continue;
            }
            for j in 0..keep_dim {
                let v = rho.get(i, j) + col[i] * col[j].conj();
                rho.set(i, j, v);
            }
        }
    }
    Ok(rho)
}

/// Proper mixture given as an explicit weighted ensemble of pure states.
#[derive(Clone, Debug)]
pub struct MixedState {
    components: Vec<(f64, StateVector)>,
}

impl MixedState {
    pub fn new(components: Vec<(f64, StateVector)>) -> Result<Self> {
        let first = components.first().ok_or_else(|| Error::InvalidMixture("empty ensemble".into()))?;
        let layout = first.1.layout().clone();
        for (w, s) in &components {
            if !(0.0..=1.0).contains(w) {
                return Err(Error::InvalidMixture(format!("weight {w} outside [0, 1]")));
            }
            if s.layout() != &layout {
                return Err(Error::LayoutMismatch(layout.to_string(), s.layout().to_string()));
            }
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > MIXTURE_TOL {
            return Err(Error::InvalidMixture(format!("weights sum to {total}")));
        }
        Ok(Self { components })
    }

    pub fn pure(state: StateVector) -> Self {
        Self { components: vec![(1.0, state)] }
    }

    pub fn components(&self) -> &[(f64, StateVector)] {
        &self.components
    }

    pub fn layout(&self) -> &FactorLayout {
        self.components[0].1.layout()
    }
}

/// Haar-distributed unitary: Gram-Schmidt on the columns of a complex
/// Gaussian matrix. The positive diagonal of the implied `R` fixes the phases.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    let mut cols: Vec<Vec<Amplitude>> = (0..dim)
        .map(|_| (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect())
        .collect();
    for j in 0..dim {
        for k in 0..j {
            let proj: Amplitude = cols[k].iter().zip(&cols[j]).map(|(q, v)| q.conj() * v).sum();
            let qk = cols[k].clone();
            for (v, q) in cols[j].iter_mut().zip(&qk) {
                *v -= proj * q;
            }
        }
        let n: f64 = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= n;
        }
    }
    Operator::from_fn(dim, |i, j| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Amplitude {
        Complex64::new(re, im)
    }

    fn electron(f: Factor, a: f64, b: f64) -> StateVector {
        StateVector::on_factor(f, &[c(a, 0.0), c(b, 0.0)]).unwrap()
    }

    #[test]
    fn tensor_of_basis_vectors() {
        let s = tensor(&electron(Factor::A, 1.0, 0.0), &electron(Factor::B, 1.0, 0.0)).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(s.layout().factors(), &[Factor::A, Factor::B]);
    }

    #[test]
    fn tensor_rejects_duplicate_factor() {
        let a = electron(Factor::A, 1.0, 0.0);
        assert!(matches!(tensor(&a, &a), Err(Error::DuplicateFactor(Factor::A))));
    }

    #[test]
    fn tensor_norm_is_multiplicative() {
        let a = electron(Factor::A, 0.3, 1.2);
        let b = electron(Factor::B, -2.0, 0.5);
        let ab = tensor(&a, &b).unwrap();
        assert!((ab.norm() - a.norm() * b.norm()).abs() < 1e-14);
    }

    #[test]
    fn inner_on_basis_is_kronecker_delta() {
        let layout = FactorLayout::new(vec![Factor::L, Factor::A]).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let ei = StateVector::basis(layout.clone(), &layout.digits(i)).unwrap();
                let ej = StateVector::basis(layout.clone(), &layout.digits(j)).unwrap();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_eq!(inner(&ei, &ej).unwrap(), c(expected, 0.0));
            }
        }
    }

    #[test]
    fn inner_rejects_layout_mismatch() {
        assert!(inner(&electron(Factor::A, 1.0, 0.0), &electron(Factor::B, 1.0, 0.0)).is_err());
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_argument() {
        let a = StateVector::on_factor(Factor::A, &[c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let b = electron(Factor::A, 1.0, 0.0);
        assert_eq!(inner(&a, &b).unwrap(), c(0.0, -1.0));
    }

    #[test]
    fn identity_application_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let layout = FactorLayout::canonical();
        let amps = (0..216).map(|_| c(rng.random(), rng.random())).collect();
        let s = StateVector::new(layout, amps).unwrap().normalized().unwrap();
        let out = apply_local(&Operator::identity(6), &[Factor::M, Factor::B], &s).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn apply_local_matches_kronecker_embedding() {
        // op on B of (A, B) equals I ⊗ op on the full space
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_unitary(2, &mut rng);
        let s = tensor(&electron(Factor::A, 0.6, 0.8), &electron(Factor::B, FRAC_1_SQRT_2, FRAC_1_SQRT_2)).unwrap();
        let via_local = apply_local(&u, &[Factor::B], &s).unwrap();
        let full = Operator::identity(2).kron(&u);
        let direct = full.apply(s.amplitudes()).unwrap();
        for (x, y) in via_local.amplitudes().iter().zip(&direct) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn apply_local_respects_target_order() {
        // a swap-like op on (B, A) listed in reverse order
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(4, &mut rng);
        let s = tensor(&electron(Factor::A, 0.6, 0.8), &electron(Factor::B, 1.0, 0.0)).unwrap();
        let reversed = apply_local(&u, &[Factor::B, Factor::A], &s).unwrap();
        let swapped = s.reorder(&FactorLayout::new(vec![Factor::B, Factor::A]).unwrap()).unwrap();
        let expected = StateVector::new(swapped.layout().clone(), u.apply(swapped.amplitudes()).unwrap())
            .unwrap()
            .reorder(s.layout())
            .unwrap();
        assert!(reversed.max_abs_diff(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn apply_local_errors() {
        let s = tensor(&electron(Factor::A, 1.0, 0.0), &electron(Factor::B, 1.0, 0.0)).unwrap();
        assert!(matches!(
            apply_local(&Operator::identity(3), &[Factor::A], &s),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
        assert!(matches!(apply_local(&Operator::identity(2), &[Factor::C], &s), Err(Error::UnknownFactor(..))));
    }

    #[test]
    fn check_unitary_cases() {
        assert!(check_unitary(&Operator::identity(6), UNITARY_TOL));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut u = random_unitary(6, &mut rng);
        assert!(check_unitary(&u, UNITARY_TOL));
        for j in 0..6 {
            u.set(2, j, c(0.0, 0.0));
        }
        assert!(!check_unitary(&u, UNITARY_TOL));
    }

    #[test]
    fn reorder_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let amps = (0..216).map(|_| c(rng.random(), rng.random())).collect();
        let s = StateVector::new(FactorLayout::canonical(), amps).unwrap();
        let other = FactorLayout::new(vec![Factor::C, Factor::L, Factor::B, Factor::A, Factor::N, Factor::M]).unwrap();
        let back = s.reorder(&other).unwrap().reorder(&FactorLayout::canonical()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn reduced_density_of_product_state() {
        let a = electron(Factor::A, 0.6, 0.8);
        let b = electron(Factor::B, 1.0, 0.0);
        let rho = reduced_density(&tensor(&a, &b).unwrap(), &[Factor::A]).unwrap();
        let expected = Operator::projector(a.amplitudes());
        assert!(rho.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn mixture_weights_must_sum_to_one() {
        let a = electron(Factor::A, 1.0, 0.0);
        assert!(MixedState::new(vec![(0.5, a.clone()), (0.4, a.clone())]).is_err());
        assert!(MixedState::new(vec![(0.5, a.clone()), (0.5, a)]).is_ok());
        assert!(MixedState::new(vec![]).is_err());
    }

    #[test]
    fn new_rejects_non_finite() {
        let layout = FactorLayout::single(Factor::A);
        assert!(matches!(StateVector::new(layout, vec![c(f64::NAN, 0.0), c(0.0, 0.0)]), Err(Error::NonFinite(0))));
    }
}

//! Dense operators on truncated Fock spaces.
//!
//! Truncating the boson ladder at `dim` levels keeps |0> .. |dim-1>. The
//! annihilation operator carries <n-1| a |n> = sqrt(n) on the superdiagonal
//! and the creation operator is its adjoint. Canonical identities survive
//! truncation only away from the edge: on `dim` levels
//!
//! ```text
//! [a, a^dag] = diag(1, 1, .., 1, -(dim-1))
//! ```
//!
//! so checks that rely on exact algebra must restrict to an interior block
//! ([`Operator::interior`]). One dropped level suffices for single-photon
//! identities; products containing two-photon operators (a^2, a^dag^2, x^2)
//! are exact only two levels below the edge.
//!
//! Two-mode spaces order mode-1 factors first: |n1, n2> sits at basis index
//! `n1 * dim2 + n2`, consistent with `embed_two_mode(a, b) = a (x) b`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::lindblad::DensityMatrix;
use crate::{Error, Result};

/// Dense complex matrix type used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest entry modulus; the norm used by all residual checks.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// tr(a b) in O(dim^2), without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    let n = a.nrows();
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..a.ncols() {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

/// Truncated mode structure of an operator or state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HilbertSpace {
    /// One bosonic mode truncated to `dim` levels.
    Single { dim: usize },
    /// Two modes; mode 1 varies slowest in the tensor-product basis.
    Two { dim1: usize, dim2: usize },
}

impl HilbertSpace {
    pub fn single(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(HilbertSpace::Single { dim })
    }

    pub fn two_mode(dim1: usize, dim2: usize) -> Result<Self> {
        if dim1 == 0 || dim2 == 0 {
            return Err(Error::InvalidDimension(dim1.min(dim2)));
        }
        Ok(HilbertSpace::Two { dim1, dim2 })
    }

    pub fn total_dim(&self) -> usize {
        match *self {
            HilbertSpace::Single { dim } => dim,
            HilbertSpace::Two { dim1, dim2 } => dim1 * dim2,
        }
    }

    pub fn mode_count(&self) -> usize {
        match self {
            HilbertSpace::Single { .. } => 1,
            HilbertSpace::Two { .. } => 2,
        }
    }

    /// Basis indices whose every mode lies at least `drop` levels below the
    /// truncation edge. Empty when `drop` exhausts a mode.
    pub fn interior_indices(&self, drop: usize) -> Vec<usize> {
        match *self {
            HilbertSpace::Single { dim } => (0..dim.saturating_sub(drop)).collect(),
            HilbertSpace::Two { dim1, dim2 } => {
                let (k1, k2) = (dim1.saturating_sub(drop), dim2.saturating_sub(drop));
                let mut idx = Vec::with_capacity(k1 * k2);
                for n1 in 0..k1 {
                    for n2 in 0..k2 {
                        idx.push(n1 * dim2 + n2);
                    }
                }
                idx
            }
        }
    }

    /// Basis indices with some mode at its top level; their total population
    /// is the truncation-tail diagnostic.
    pub(crate) fn edge_indices(&self) -> Vec<usize> {
        match *self {
            HilbertSpace::Single { dim } => vec![dim - 1],
            HilbertSpace::Two { dim1, dim2 } => {
                let mut idx = Vec::new();
                for n1 in 0..dim1 {
                    for n2 in 0..dim2 {
                        if n1 == dim1 - 1 || n2 == dim2 - 1 {
                            idx.push(n1 * dim2 + n2);
                        }
                    }
                }
                idx
            }
        }
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            HilbertSpace::Single { dim } => write!(f, "Fock({dim})"),
            HilbertSpace::Two { dim1, dim2 } => write!(f, "Fock({dim1})xFock({dim2})"),
        }
    }
}

/// Dense operator bound to a declared space. Algebra only combines
/// operators on identical spaces; the std-ops impls assert this, the named
/// methods report it as an error.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    m: CMatrix,
}

impl Operator {
    pub fn from_matrix(space: HilbertSpace, m: CMatrix) -> Result<Self> {
        let dim = space.total_dim();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::ShapeMismatch {
                rows: m.nrows(),
                cols: m.ncols(),
                dim,
            });
        }
        Ok(Operator { space, m })
    }

    /// Internal constructor for matrices whose shape is correct by build.
    pub(crate) fn raw(space: HilbertSpace, m: CMatrix) -> Self {
        debug_assert_eq!(m.nrows(), space.total_dim());
        debug_assert_eq!(m.ncols(), space.total_dim());
        Operator { space, m }
    }

    pub fn zeros(space: &HilbertSpace) -> Self {
        let d = space.total_dim();
        Operator::raw(space.clone(), CMatrix::zeros(d, d))
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let d = space.total_dim();
        Operator::raw(space.clone(), CMatrix::identity(d, d))
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn adjoint(&self) -> Self {
        Operator::raw(self.space.clone(), self.m.adjoint())
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Operator::raw(self.space.clone(), &self.m * z)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.m - self.m.adjoint()))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.m)
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch {
                left: self.space.clone(),
                right: other.space.clone(),
            });
        }
        Ok(())
    }

    /// [self, other]. Errors on mismatched spaces.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let m = &self.m * &other.m - &other.m * &self.m;
        Ok(Operator::raw(self.space.clone(), m))
    }

    /// {self, other}. Errors on mismatched spaces.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let m = &self.m * &other.m + &other.m * &self.m;
        Ok(Operator::raw(self.space.clone(), m))
    }

    /// tr(A rho). Errors on mismatched spaces.
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<Complex64> {
        if self.space != *rho.space() {
            return Err(Error::SpaceMismatch {
                left: self.space.clone(),
                right: rho.space().clone(),
            });
        }
        Ok(trace_product(&self.m, rho.matrix()))
    }

    /// Entries restricted to basis states `drop` levels below the truncation
    /// edge in every mode. Identities destroyed by truncation hold on this
    /// block when `drop` covers the photon number the products can add.
    pub fn interior(&self, drop: usize) -> CMatrix {
        let idx = self.space.interior_indices(drop);
        self.m.select_rows(idx.iter()).select_columns(idx.iter())
    }

    pub fn interior_max_abs(&self, drop: usize) -> f64 {
        max_abs(&self.interior(drop))
    }
}

macro_rules! op_binop {
    ($trait:ident, $method:ident, $sym:tt) => {
        impl $trait<&Operator> for &Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                assert_eq!(
                    self.space, rhs.space,
                    "operator algebra requires identical spaces"
                );
                Operator::raw(self.space.clone(), &self.m $sym &rhs.m)
            }
        }
    };
}

op_binop!(Add, add, +);
op_binop!(Sub, sub, -);

impl Mul<&Operator> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(
            self.space, rhs.space,
            "operator algebra requires identical spaces"
        );
        Operator::raw(self.space.clone(), &self.m * &rhs.m)
    }
}

impl Mul<Complex64> for &Operator {
    type Output = Operator;
    fn mul(self, z: Complex64) -> Operator {
        self.scale(z)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, x: f64) -> Operator {
        self.scale(c(x))
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator::raw(self.space.clone(), -&self.m)
    }
}

/// Annihilation operator on `dim` levels: <n-1| a |n> = sqrt(n).
pub fn annihilation(dim: usize) -> Result<Operator> {
    let space = HilbertSpace::single(dim)?;
    let mut m = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = c((n as f64).sqrt());
    }
    Ok(Operator::raw(space, m))
}

/// Creation operator, the adjoint of [`annihilation`].
pub fn creation(dim: usize) -> Result<Operator> {
    Ok(annihilation(dim)?.adjoint())
}

/// Number operator diag(0, 1, .., dim-1).
pub fn number(dim: usize) -> Result<Operator> {
    let space = HilbertSpace::single(dim)?;
    let m = CMatrix::from_fn(dim, dim, |i, j| if i == j { c(i as f64) } else { c(0.0) });
    Ok(Operator::raw(space, m))
}

/// Quadrature pair x = (a + a^dag)/sqrt(2), p = i (a^dag - a)/sqrt(2).
/// Both are Hermitian by construction; [x, p] = i holds on the interior.
pub fn quadratures(dim: usize) -> Result<(Operator, Operator)> {
    let a = annihilation(dim)?;
    let ad = a.adjoint();
    let inv_sqrt2 = c(1.0 / std::f64::consts::SQRT_2);
    let x = (&a + &ad).scale(inv_sqrt2);
    let p = (&ad - &a).scale(inv_sqrt2 * Complex64::i());
    Ok((x, p))
}

/// Tensor embedding a (x) b with mode-1 factors ordered first. Both inputs
/// must be single-mode operators.
pub fn embed_two_mode(a: &Operator, b: &Operator) -> Result<Operator> {
    let (d1, d2) = match (a.space(), b.space()) {
        (&HilbertSpace::Single { dim: d1 }, &HilbertSpace::Single { dim: d2 }) => (d1, d2),
        _ => {
            return Err(Error::SpaceMismatch {
                left: a.space().clone(),
                right: b.space().clone(),
            })
        }
    };
    let space = HilbertSpace::two_mode(d1, d2)?;
    Ok(Operator::raw(space, a.matrix().kronecker(b.matrix())))
}

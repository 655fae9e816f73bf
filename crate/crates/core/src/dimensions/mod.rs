//! Exact-arithmetic dimensional analysis.
//!
//! A physical variable is described by its vector of base-dimension
//! exponents (e.g. a viscosity is `M^1 L^-1 T^-1`). Stacking those vectors
//! as columns gives the dimension matrix `D`; its nullspace spans the
//! exponent vectors of all dimensionless power products of the variables.
//! Everything here is computed over the rationals, so ranks, nullspace
//! bases, and non-dimensionalizing vectors are exact and reproducible.

mod rational;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use rational::{rat, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimError {
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse `{0}` as a rational (expected `n` or `n/d`)")]
    ParseRational(String),
    #[error("dimension basis mismatch: {0} vs {1}")]
    BasisMismatch(String, String),
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("no non-dimensionalizing factor exists (missing dimensions: {missing:?})")]
    NotHomogeneous { missing: Vec<String> },
    #[error("pinned dimension matrix spans all base dimensions; detection is impossible")]
    FullRankPinned,
}

/// Ordered set of base-dimension labels shared by the vectors of one system.
///
/// Cheap to clone; equality is by label content.
#[derive(Clone, Eq)]
pub struct DimBasis(Arc<Vec<String>>);

impl DimBasis {
    pub fn new<S: Into<String>>(labels: Vec<S>) -> Self {
        DimBasis(Arc::new(labels.into_iter().map(Into::into).collect()))
    }

    /// The default mechanical basis: mass, length, time.
    pub fn mlt() -> Self {
        DimBasis::new(vec!["M", "L", "T"])
    }

    /// The full SI basis of seven base dimensions.
    pub fn si() -> Self {
        DimBasis::new(vec!["M", "L", "T", "I", "Θ", "N", "J"])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.0
    }
}

impl PartialEq for DimBasis {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl fmt::Debug for DimBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.join(","))
    }
}

/// Exponent vector of one physical quantity over a [`DimBasis`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimVector {
    exponents: Vec<Rational>,
    basis: DimBasis,
}

impl DimVector {
    pub fn new(exponents: Vec<Rational>, basis: DimBasis) -> Result<Self, DimError> {
        if exponents.len() != basis.len() {
            return Err(DimError::LengthMismatch {
                expected: basis.len(),
                got: exponents.len(),
            });
        }
        Ok(DimVector { exponents, basis })
    }

    /// Convenience constructor from integer exponents.
    pub fn from_ints(exponents: &[i64], basis: DimBasis) -> Result<Self, DimError> {
        DimVector::new(
            exponents.iter().copied().map(Rational::from_int).collect(),
            basis,
        )
    }

    pub fn zero(basis: DimBasis) -> Self {
        DimVector {
            exponents: vec![Rational::ZERO; basis.len()],
            basis,
        }
    }

    pub fn exponents(&self) -> &[Rational] {
        &self.exponents
    }

    pub fn basis(&self) -> &DimBasis {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.iter().all(Rational::is_zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.exponents.iter().map(Rational::to_f64).collect()
    }
}

/// Dimension matrix: one column of exponents per physical variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimMatrix {
    columns: Vec<DimVector>,
    variable_names: Vec<String>,
    basis: DimBasis,
}

impl DimMatrix {
    pub fn new<S: Into<String>>(
        names: Vec<S>,
        columns: Vec<DimVector>,
        basis: DimBasis,
    ) -> Result<Self, DimError> {
        let variable_names: Vec<String> = names.into_iter().map(Into::into).collect();
        if variable_names.len() != columns.len() {
            return Err(DimError::LengthMismatch {
                expected: variable_names.len(),
                got: columns.len(),
            });
        }
        for (i, name) in variable_names.iter().enumerate() {
            if variable_names[..i].contains(name) {
                return Err(DimError::DuplicateVariable(name.clone()));
            }
        }
        for col in &columns {
            if col.basis() != &basis {
                return Err(DimError::BasisMismatch(
                    format!("{:?}", col.basis()),
                    format!("{basis:?}"),
                ));
            }
        }
        Ok(DimMatrix {
            columns,
            variable_names,
            basis,
        })
    }

    /// Build from integer exponent columns in declaration order.
    pub fn from_ints<S: Into<String> + Clone>(
        names: &[S],
        columns: &[&[i64]],
        basis: DimBasis,
    ) -> Result<Self, DimError> {
        let cols = columns
            .iter()
            .map(|c| DimVector::from_ints(c, basis.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        DimMatrix::new(names.to_vec(), cols, basis)
    }

    /// Number of base dimensions (rows).
    pub fn dims(&self) -> usize {
        self.basis.len()
    }

    /// Number of variables (columns).
    pub fn num_vars(&self) -> usize {
        self.columns.len()
    }

    pub fn basis(&self) -> &DimBasis {
        &self.basis
    }

    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    pub fn column(&self, j: usize) -> &DimVector {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[DimVector] {
        &self.columns
    }

    pub fn entry(&self, row: usize, col: usize) -> Rational {
        self.columns[col].exponents()[row]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, DimError> {
        self.variable_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| DimError::UnknownVariable(name.to_string()))
    }

    /// Submatrix keeping the given columns, in the given order.
    pub fn select(&self, indices: &[usize]) -> DimMatrix {
        DimMatrix {
            columns: indices.iter().map(|&j| self.columns[j].clone()).collect(),
            variable_names: indices
                .iter()
                .map(|&j| self.variable_names[j].clone())
                .collect(),
            basis: self.basis.clone(),
        }
    }

    /// Exact matrix-vector product `D v`.
    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, DimError> {
        if v.len() != self.num_vars() {
            return Err(DimError::LengthMismatch {
                expected: self.num_vars(),
                got: v.len(),
            });
        }
        Ok((0..self.dims())
            .map(|i| (0..self.num_vars()).map(|j| self.entry(i, j) * v[j]).sum())
            .collect())
    }

    /// Columns converted to floats, as a `dims x num_vars` row-major matrix.
    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dims())
            .map(|i| {
                (0..self.num_vars())
                    .map(|j| self.entry(i, j).to_f64())
                    .collect()
            })
            .collect()
    }

    fn rows(&self) -> Vec<Vec<Rational>> {
        (0..self.dims())
            .map(|i| (0..self.num_vars()).map(|j| self.entry(i, j)).collect())
            .collect()
    }
}

/// Outcome of the analytic homogeneity check.
///
/// `homogeneous` is false exactly when the quantity of interest cannot be
/// built as a power product of the exposed variables; in that case any base
/// dimension that no exposed variable carries, while the quantity does, is
/// named in `missing_dimensions`. Rank-level inconsistencies that cannot be
/// pinned on a single dimension leave the list empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneityVerdict {
    pub homogeneous: bool,
    pub missing_dimensions: Vec<String>,
}

// ---------------------------------------------------------------------------
// Exact elimination machinery
// ---------------------------------------------------------------------------

/// Reduced row echelon form in place; returns pivot column indices.
///
/// Pivot selection is fixed: scan columns left to right, take the first row
/// (in declared order) with a nonzero entry. No magnitude pivoting is needed
/// over the rationals, and the fixed order keeps outputs reproducible.
#[allow(clippy::needless_range_loop)]
fn rref(mat: &mut [Vec<Rational>]) -> Vec<usize> {
    let nrows = mat.len();
    let ncols = if nrows == 0 { 0 } else { mat[0].len() };
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..ncols {
        if next_row == nrows {
            break;
        }
        let Some(pivot_row) = (next_row..nrows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(next_row, pivot_row);
        let inv = mat[next_row][col].recip().expect("pivot nonzero");
        for x in mat[next_row].iter_mut() {
            *x *= inv;
        }
        for r in 0..nrows {
            if r != next_row && !mat[r][col].is_zero() {
                let factor = mat[r][col];
                for c in 0..ncols {
                    let sub = mat[next_row][c] * factor;
                    mat[r][c] -= sub;
                }
            }
        }
        pivots.push(col);
        next_row += 1;
    }
    pivots
}

fn rank_of_rows(mut rows: Vec<Vec<Rational>>) -> usize {
    rref(&mut rows).len()
}

/// Exact rank of a dimension matrix.
pub fn rank(d: &DimMatrix) -> usize {
    rank_of_rows(d.rows())
}

/// Deterministic exact basis for the nullspace of `D`.
///
/// Free variables are taken in column order; each basis vector sets one free
/// variable to 1 and the rest to 0, with pivot variables filled by
/// back-substitution from the reduced echelon form. Returns `num_vars - rank`
/// vectors with `D v = 0` exactly.
pub fn nullspace_basis(d: &DimMatrix) -> Vec<Vec<Rational>> {
    let p = d.num_vars();
    let mut rows = d.rows();
    let pivots = rref(&mut rows);
    let free: Vec<usize> = (0..p).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::ZERO; p];
            v[f] = Rational::ONE;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[row][f];
            }
            v
        })
        .collect()
}

/// Analytic lurking-variable check: can `dq` be formed from the columns of
/// `d_ex`?
///
/// Solvability of `D_EX u = d(q)` is decided by exact elimination on the
/// augmented system. On failure, dimensions carried by the quantity of
/// interest but by none of the exposed variables are reported by name.
pub fn check_homogeneity(d_ex: &DimMatrix, dq: &DimVector) -> Result<HomogeneityVerdict, DimError> {
    if dq.basis() != d_ex.basis() {
        return Err(DimError::BasisMismatch(
            format!("{:?}", dq.basis()),
            format!("{:?}", d_ex.basis()),
        ));
    }
    let mut aug = d_ex.rows();
    for (row, &e) in aug.iter_mut().zip(dq.exponents()) {
        row.push(e);
    }
    let pivots = rref(&mut aug);
    // A pivot in the augmented column means the system is inconsistent.
    let homogeneous = !pivots.contains(&d_ex.num_vars());
    let mut missing = Vec::new();
    if !homogeneous {
        for (i, label) in d_ex.basis().labels().iter().enumerate() {
            let row_all_zero = (0..d_ex.num_vars()).all(|j| d_ex.entry(i, j).is_zero());
            if row_all_zero && !dq.exponents()[i].is_zero() {
                missing.push(label.clone());
            }
        }
    }
    Ok(HomogeneityVerdict {
        homogeneous,
        missing_dimensions: missing,
    })
}

/// The unique non-dimensionalizing vector orthogonal to the pi subspace.
///
/// Solves the stacked system `[D_EX; V^T] u = [d(q); 0]` exactly, where `V`
/// is any nullspace basis of `D_EX`. The stacked matrix has full column
/// rank, so the solution is unique; orthogonality to the nullspace makes it
/// independent of the basis choice. Fails with [`DimError::NotHomogeneous`]
/// when no solution exists, which is itself the analytic signal that a
/// lurking variable must carry the unmatched dimensions.
pub fn nondim_vector(d_ex: &DimMatrix, dq: &DimVector) -> Result<Vec<Rational>, DimError> {
    let verdict = check_homogeneity(d_ex, dq)?;
    if !verdict.homogeneous {
        return Err(DimError::NotHomogeneous {
            missing: verdict.missing_dimensions,
        });
    }
    let p = d_ex.num_vars();
    let nullspace = nullspace_basis(d_ex);
    let mut stacked = d_ex.rows();
    for (row, &e) in stacked.iter_mut().zip(dq.exponents()) {
        row.push(e);
    }
    for v in &nullspace {
        let mut row = v.clone();
        row.push(Rational::ZERO);
        stacked.push(row);
    }
    let pivots = rref(&mut stacked);
    debug_assert_eq!(
        pivots,
        (0..p).collect::<Vec<_>>(),
        "stacked system is full column rank"
    );
    let mut u = vec![Rational::ZERO; p];
    for (row, &col) in pivots.iter().enumerate() {
        u[col] = stacked[row][p];
    }
    Ok(u)
}

/// Orthonormal basis `W` for the orthogonal complement of the pinned
/// columns, as `dims` rows by `dims - rank(D_PI)` columns.
///
/// The rank of the pinned block is established exactly first; the basis is
/// then built by modified Gram-Schmidt over the pinned columns followed by
/// the identity columns, in fixed order, keeping the identity-derived
/// directions. An empty pin set yields the identity. Errors with
/// [`DimError::FullRankPinned`] when the pinned columns already span every
/// base dimension, in which case no test statistic survives the projection.
pub fn pinned_complement(d_pin: &DimMatrix) -> Result<Vec<Vec<f64>>, DimError> {
    let d = d_pin.dims();
    let r_pin = rank(d_pin);
    if r_pin == d {
        return Err(DimError::FullRankPinned);
    }

    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    let orthogonalize = |mut v: Vec<f64>, basis: &[Vec<f64>]| -> Option<Vec<f64>> {
        // Two projection passes to push round-off below 1e-14.
        for _ in 0..2 {
            for q in basis {
                let c = dot(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-9 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            Some(v)
        } else {
            None
        }
    };

    for j in 0..d_pin.num_vars() {
        let col: Vec<f64> = (0..d).map(|i| d_pin.entry(i, j).to_f64()).collect();
        let scale = dot(&col, &col).sqrt().max(1.0);
        let scaled: Vec<f64> = col.iter().map(|x| x / scale).collect();
        if let Some(q) = orthogonalize(scaled, &basis) {
            basis.push(q);
        }
    }
    debug_assert_eq!(basis.len(), r_pin, "float span agrees with exact rank");

    let mut complement_cols: Vec<Vec<f64>> = Vec::with_capacity(d - r_pin);
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        if let Some(q) = orthogonalize(e, &basis) {
            basis.push(q.clone());
            complement_cols.push(q);
        }
    }
    debug_assert_eq!(complement_cols.len(), d - r_pin);

    // Return as a d x (d - r_pin) row-major matrix.
    Ok((0..d)
        .map(|i| complement_cols.iter().map(|c| c[i]).collect())
        .collect())
}

/// True when the two sets of exact vectors span the same subspace.
pub fn same_span(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> bool {
    let rank_rows = |rows: Vec<Vec<Rational>>| rank_of_rows(rows);
    let ra = rank_rows(a.to_vec());
    let rb = rank_rows(b.to_vec());
    let mut stacked = a.to_vec();
    stacked.extend_from_slice(b);
    ra == rb && rank_rows(stacked) == ra
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pipe_full() -> DimMatrix {
        // Columns: rho_F, U_F, d_P, mu_F, eps_P over (M, L, T).
        DimMatrix::from_ints(
            &["rho_F", "U_F", "d_P", "mu_F", "eps_P"],
            &[
                &[1, -3, 0],
                &[0, 1, -1],
                &[0, 1, 0],
                &[1, -1, -1],
                &[0, 1, 0],
            ],
            DimBasis::mlt(),
        )
        .unwrap()
    }

    fn pipe_no_roughness() -> DimMatrix {
        DimMatrix::from_ints(
            &["rho_F", "U_F", "d_P", "mu_F"],
            &[&[1, -3, 0], &[0, 1, -1], &[0, 1, 0], &[1, -1, -1]],
            DimBasis::mlt(),
        )
        .unwrap()
    }

    fn rv(ints: &[i64]) -> Vec<Rational> {
        ints.iter().copied().map(Rational::from_int).collect()
    }

    #[test]
    fn rank_of_pipe_matrix_is_three() {
        assert_eq!(rank(&pipe_full()), 3);
    }

    #[test]
    fn full_si_basis_is_supported() {
        let basis = DimBasis::si();
        assert_eq!(basis.len(), 7);
        // A charge flow: current * time has dimensions I^1 T^1.
        let d = DimMatrix::from_ints(
            &["I", "t"],
            &[&[0, 0, 0, 1, 0, 0, 0], &[0, 0, 1, 0, 0, 0, 0]],
            basis.clone(),
        )
        .unwrap();
        let dq = DimVector::from_ints(&[0, 0, 1, 1, 0, 0, 0], basis).unwrap();
        assert_eq!(nondim_vector(&d, &dq).unwrap(), rv(&[1, 1]));
    }

    #[test]
    fn rank_of_zero_matrix_is_zero() {
        let z =
            DimMatrix::from_ints(&["a", "b"], &[&[0, 0, 0], &[0, 0, 0]], DimBasis::mlt()).unwrap();
        assert_eq!(rank(&z), 0);
    }

    #[test]
    fn rank_of_identity_columns_is_three() {
        let id = DimMatrix::from_ints(
            &["m", "l", "t"],
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]],
            DimBasis::mlt(),
        )
        .unwrap();
        assert_eq!(rank(&id), 3);
    }

    #[test]
    fn pipe_nullspace_spans_reynolds_and_relative_roughness() {
        let d = pipe_full();
        let basis = nullspace_basis(&d);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(d.mul_vec(v).unwrap().iter().all(Rational::is_zero));
        }
        // Reynolds number rho*U*d/mu and relative roughness eps/d.
        let expected = vec![rv(&[1, 1, 1, -1, 0]), rv(&[0, 0, -1, 0, 1])];
        assert!(same_span(&basis, &expected));
    }

    #[test]
    fn four_variable_pipe_nullspace_is_reynolds_line() {
        let d = pipe_no_roughness();
        let basis = nullspace_basis(&d);
        assert!(same_span(&basis, &[rv(&[1, 1, 1, -1])]));
    }

    #[test]
    fn full_rank_square_matrix_has_empty_nullspace() {
        let id = DimMatrix::from_ints(
            &["m", "l", "t"],
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]],
            DimBasis::mlt(),
        )
        .unwrap();
        assert!(nullspace_basis(&id).is_empty());
    }

    #[test]
    fn diameter_velocity_cannot_form_a_pressure() {
        // Exposed {d_P, U_F} against Delta P = (1,-1,-2): no Mass available.
        let d_ex = pipe_full().select(&[2, 1]);
        let dq = DimVector::from_ints(&[1, -1, -2], DimBasis::mlt()).unwrap();
        let verdict = check_homogeneity(&d_ex, &dq).unwrap();
        assert!(!verdict.homogeneous);
        assert_eq!(verdict.missing_dimensions, vec!["M".to_string()]);
    }

    #[test]
    fn density_velocity_form_a_dynamic_pressure() {
        let d_ex = pipe_full().select(&[0, 1]);
        let dq = DimVector::from_ints(&[1, -1, -2], DimBasis::mlt()).unwrap();
        let verdict = check_homogeneity(&d_ex, &dq).unwrap();
        assert!(verdict.homogeneous);
        assert!(verdict.missing_dimensions.is_empty());
        assert_eq!(nondim_vector(&d_ex, &dq).unwrap(), rv(&[1, 2]));
    }

    #[test]
    fn dimensionless_qoi_is_always_homogeneous() {
        let d_ex = pipe_full().select(&[2, 1]);
        let dq = DimVector::zero(DimBasis::mlt());
        assert!(check_homogeneity(&d_ex, &dq).unwrap().homogeneous);
        assert_eq!(nondim_vector(&d_ex, &dq).unwrap(), rv(&[0, 0]));
    }

    #[test]
    fn basis_mismatch_is_rejected() {
        let d_ex = pipe_full().select(&[0, 1]);
        let dq = DimVector::from_ints(&[1, -1], DimBasis::new(vec!["M", "L"])).unwrap();
        assert!(matches!(
            check_homogeneity(&d_ex, &dq),
            Err(DimError::BasisMismatch(_, _))
        ));
    }

    #[test]
    fn full_pipe_nondim_vector_solves_both_systems() {
        let d = pipe_full();
        let dq = DimVector::from_ints(&[1, -2, -2], DimBasis::mlt()).unwrap();
        let u = nondim_vector(&d, &dq).unwrap();
        assert_eq!(
            u,
            vec![rat(2, 7), rat(9, 7), rat(-6, 7), rat(5, 7), rat(-6, 7)]
        );
        assert_eq!(d.mul_vec(&u).unwrap(), dq.exponents().to_vec());
        for v in nullspace_basis(&d) {
            let dp: Rational = v.iter().zip(&u).map(|(a, b)| *a * *b).sum();
            assert!(dp.is_zero());
        }
    }

    #[test]
    fn nondim_vector_is_invariant_to_nullspace_basis_choice() {
        // Re-solve the stacked system with a sheared basis; the orthogonal
        // solution must not move.
        let d = pipe_full();
        let dq = DimVector::from_ints(&[1, -2, -2], DimBasis::mlt()).unwrap();
        let u = nondim_vector(&d, &dq).unwrap();

        let basis = nullspace_basis(&d);
        let sheared: Vec<Vec<Rational>> = vec![
            basis[0]
                .iter()
                .zip(&basis[1])
                .map(|(a, b)| *a + *b)
                .collect(),
            basis[1].clone(),
        ];
        let p = d.num_vars();
        let mut stacked = (0..d.dims())
            .map(|i| {
                let mut row: Vec<Rational> = (0..p).map(|j| d.entry(i, j)).collect();
                row.push(dq.exponents()[i]);
                row
            })
            .collect::<Vec<_>>();
        for v in &sheared {
            let mut row = v.clone();
            row.push(Rational::ZERO);
            stacked.push(row);
        }
        let pivots = rref(&mut stacked);
        let mut u2 = vec![Rational::ZERO; p];
        for (row, &col) in pivots.iter().enumerate() {
            u2[col] = stacked[row][p];
        }
        assert_eq!(u, u2);
    }

    #[test]
    fn nondim_vector_fails_loudly_when_not_homogeneous() {
        let d_ex = pipe_full().select(&[2, 1]);
        let dq = DimVector::from_ints(&[1, -1, -2], DimBasis::mlt()).unwrap();
        assert_eq!(
            nondim_vector(&d_ex, &dq),
            Err(DimError::NotHomogeneous {
                missing: vec!["M".to_string()]
            })
        );
    }

    #[test]
    fn pinned_complement_of_a_lengthscale() {
        let d_pin = DimMatrix::from_ints(&["H"], &[&[0, 1, 0]], DimBasis::mlt()).unwrap();
        let w = pinned_complement(&d_pin).unwrap();
        // Rows M, L, T; columns span {(1,0,0), (0,0,1)}.
        assert_eq!(w.len(), 3);
        assert_eq!(w[0].len(), 2);
        let expected = [[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]];
        for (row, exp) in w.iter().zip(expected.iter()) {
            for (a, b) in row.iter().zip(exp.iter()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn pinned_complement_of_nothing_is_identity() {
        let d_pin = DimMatrix::new(Vec::<String>::new(), vec![], DimBasis::mlt()).unwrap();
        let w = pinned_complement(&d_pin).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((w[i][j] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn pinned_complement_rejects_full_rank_pins() {
        let d_pin = DimMatrix::from_ints(
            &["a", "b", "c"],
            &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 1]],
            DimBasis::mlt(),
        )
        .unwrap();
        assert_eq!(pinned_complement(&d_pin), Err(DimError::FullRankPinned));
    }

    #[test]
    fn pinned_complement_two_columns_matches_cross_product() {
        let d_pin =
            DimMatrix::from_ints(&["a", "b"], &[&[1, 0, 1], &[0, 1, 1]], DimBasis::mlt()).unwrap();
        let w = pinned_complement(&d_pin).unwrap();
        assert_eq!(w[0].len(), 1);
        // Cross product (1,0,1) x (0,1,1) = (-1,-1,1), normalized.
        let s = 3.0_f64.sqrt();
        let expected = [-1.0 / s, -1.0 / s, 1.0 / s];
        let sign = if w[0][0] * expected[0] < 0.0 {
            -1.0
        } else {
            1.0
        };
        for (row, e) in w.iter().zip(expected.iter()) {
            assert!((row[0] - sign * e).abs() < 1e-12);
        }
    }

    #[test]
    fn select_by_name_round_trips() {
        let d = pipe_full();
        let idx = d.index_of("mu_F").unwrap();
        assert_eq!(idx, 3);
        assert!(d.index_of("nope").is_err());
        let sub = d.select(&[idx, 0]);
        assert_eq!(
            sub.variable_names(),
            &["mu_F".to_string(), "rho_F".to_string()]
        );
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let err = DimMatrix::from_ints(&["x", "x"], &[&[1, 0, 0], &[0, 1, 0]], DimBasis::mlt())
            .unwrap_err();
        assert_eq!(err, DimError::DuplicateVariable("x".to_string()));
    }
}

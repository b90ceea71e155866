#pragma once

#include <vector>

#include "kyfan/matrix.hpp"

namespace kyfan {

enum class Field { Real, Complex };

/// A real- or complex-linear span of m x n matrices.  The user basis is kept for
/// reporting; an orthonormal basis (modified Gram-Schmidt under the field's inner
/// product) is used for every computation.  An empty basis denotes {0}.
class MatrixSubspace {
public:
  MatrixSubspace(Index rows, Index cols, std::vector<CMatrix> basis, Field field);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index dim() const { return static_cast<Index>(basis_.size()); }
  Field field() const { return field_; }
  /// Number of real parameters: dim for a real span, 2 * dim for a complex span.
  Index real_dim() const { return field_ == Field::Real ? dim() : 2 * dim(); }

  const std::vector<CMatrix>& basis() const { return basis_; }
  const std::vector<CMatrix>& orthonormal() const { return ortho_; }

  /// Field inner product <X, Q> (real part only for a real span).
  cplx field_inner(const CMatrix& X, const CMatrix& Q) const;

  /// Coordinates of the orthogonal projection of X in the orthonormal basis.
  CVector ortho_coordinates(const CMatrix& X) const;
  CMatrix from_ortho(const CVector& coords) const;
  CMatrix from_user(const CVector& coeffs) const;
  CVector ortho_to_user(const CVector& coords) const { return transform_ * coords; }

  /// Packing of orthonormal coordinates into real optimizer parameters.
  CVector coords_from_params(const RVector& x) const;
  RVector params_from_coords(const CVector& c) const;

  void check_shape(const CMatrix& X, const char* what) const;

private:
  Index rows_;
  Index cols_;
  Field field_;
  std::vector<CMatrix> basis_;
  std::vector<CMatrix> ortho_;
  CMatrix transform_; // ortho_[j] = sum_i basis_[i] * transform_(i, j)
};

struct Projection {
  CMatrix onto;
  CMatrix perp;
};

Projection project_subspace(const CMatrix& X, const MatrixSubspace& M);

} // namespace kyfan

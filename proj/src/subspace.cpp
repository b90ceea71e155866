#include "kyfan/subspace.hpp"

#include <cmath>

namespace kyfan {

MatrixSubspace::MatrixSubspace(Index rows, Index cols, std::vector<CMatrix> basis, Field field)
  : rows_(rows), cols_(cols), field_(field), basis_(std::move(basis))
{
  require(rows > 0 && cols > 0, "subspace matrices must have positive shape");
  for (const auto& b : basis_) {
    check_shape(b, "subspace basis element");
    require_finite(b, "subspace basis element");
  }

  const Index d = dim();
  if (d > 0) {
    CMatrix gram(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) gram(i, j) = field_inner(basis_[j], basis_[i]);
    const RVector ev = herm_eig(gram).values;
    if (!(ev[d - 1] > 1e-12 * std::max(ev[0], 1e-300)))
      fail(ErrorCode::InvalidInput, "subspace basis is linearly dependent over the declared field");
  }

  transform_ = CMatrix::Zero(d, d);
  for (Index j = 0; j < d; ++j) {
    CMatrix w = basis_[j];
    CVector t = CVector::Zero(d);
    t[j] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < j; ++i) {
        const cplx c = field_inner(w, ortho_[i]);
        w -= c * ortho_[i];
        t -= c * transform_.col(i);
      }
    }
    const double nrm = w.norm();
    ortho_.push_back(w / nrm);
    transform_.col(j) = t / nrm;
  }
}

cplx MatrixSubspace::field_inner(const CMatrix& X, const CMatrix& Q) const
{
  const cplx v = inner(X, Q);
  return field_ == Field::Real ? cplx(v.real(), 0.0) : v;
}

CVector MatrixSubspace::ortho_coordinates(const CMatrix& X) const
{
  check_shape(X, "projected matrix");
  CVector c(dim());
  for (Index j = 0; j < dim(); ++j) c[j] = field_inner(X, ortho_[j]);
  return c;
}

CMatrix MatrixSubspace::from_ortho(const CVector& coords) const
{
  CMatrix out = CMatrix::Zero(rows_, cols_);
  for (Index j = 0; j < dim(); ++j) out += coords[j] * ortho_[j];
  return out;
}

CMatrix MatrixSubspace::from_user(const CVector& coeffs) const
{
  require(coeffs.size() == dim(), "coefficient count does not match subspace dimension");
  CMatrix out = CMatrix::Zero(rows_, cols_);
  for (Index j = 0; j < dim(); ++j) out += coeffs[j] * basis_[j];
  return out;
}

CVector MatrixSubspace::coords_from_params(const RVector& x) const
{
  CVector c(dim());
  for (Index j = 0; j < dim(); ++j)
    c[j] = field_ == Field::Real ? cplx(x[j], 0.0) : cplx(x[2 * j], x[2 * j + 1]);
  return c;
}

RVector MatrixSubspace::params_from_coords(const CVector& c) const
{
  RVector x(real_dim());
  for (Index j = 0; j < dim(); ++j) {
    if (field_ == Field::Real) {
      x[j] = c[j].real();
    } else {
      x[2 * j] = c[j].real();
      x[2 * j + 1] = c[j].imag();
    }
  }
  return x;
}

void MatrixSubspace::check_shape(const CMatrix& X, const char* what) const
{
  if (X.rows() != rows_ || X.cols() != cols_)
    fail(ErrorCode::InvalidInput, std::string(what) + " has shape " + std::to_string(X.rows()) + "x" +
                                      std::to_string(X.cols()) + ", subspace expects " + std::to_string(rows_) +
                                      "x" + std::to_string(cols_));
}

Projection project_subspace(const CMatrix& X, const MatrixSubspace& M)
{
  M.check_shape(X, "projected matrix");
  Projection out;
  out.onto = M.from_ortho(M.ortho_coordinates(X));
  out.perp = X - out.onto;
  // one correction sweep removes the rounding left by the first pass
  const CMatrix fix = M.from_ortho(M.ortho_coordinates(out.perp));
  out.onto += fix;
  out.perp -= fix;
  return out;
}

} // namespace kyfan

#pragma once

#include "fdswipt/types.hpp"

namespace fdswipt {
namespace detail {

/// Real coordinates over the Hermitian n x n matrices: n diagonal entries,
/// then (Re, Im) per off-diagonal pair (i < j), n^2 coordinates total.
struct HermBasis {
  int n = 0;

  int dim() const { return n * n; }

  VecD pack(const MatC& m) const {
    VecD z(dim());
    int k = 0;
    for (int i = 0; i < n; ++i) z(k++) = m(i, i).real();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        z(k++) = m(i, j).real();
        z(k++) = m(i, j).imag();
      }
    return z;
  }

  MatC unpack(const Eigen::Ref<const VecD>& z) const {
    MatC m = MatC::Zero(n, n);
    int k = 0;
    for (int i = 0; i < n; ++i) m(i, i) = z(k++);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Cplx val(z(k), z(k + 1));
        k += 2;
        m(i, j) = val;
        m(j, i) = std::conj(val);
      }
    return m;
  }

  MatC basis_mat(int k) const {
    VecD z = VecD::Zero(dim());
    z(k) = 1.0;
    return unpack(z);
  }

  /// a_k = Re Tr(A B_k), so that Tr(A M) = a . pack(M) for Hermitian A, M.
  VecD affine_coeffs(const MatC& a) const {
    VecD out(dim());
    int k = 0;
    for (int i = 0; i < n; ++i) out(k++) = a(i, i).real();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        out(k++) = 2.0 * a(i, j).real();
        out(k++) = 2.0 * a(i, j).imag();
      }
    return out;
  }
};

}  // namespace detail
}  // namespace fdswipt

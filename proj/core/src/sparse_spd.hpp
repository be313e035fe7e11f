#pragma once

#include <Eigen/Sparse>

#if SLIPFSI_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#else
#include <Eigen/SparseCholesky>
#endif

namespace slipfsi::detail {

/// Sparse symmetric positive-definite direct factorization.
#if SLIPFSI_HAVE_CHOLMOD
// The supernodal kernels depend on the system LAPACK build; the simplicial
// factorization does not and is still faster than Eigen's own.
class SpdFactorization
    : public Eigen::CholmodDecomposition<Eigen::SparseMatrix<double>, Eigen::Lower> {
 public:
  SpdFactorization() {
    cholmod().supernodal = CHOLMOD_SIMPLICIAL;
    cholmod().nmethods = 1;
    cholmod().method[0].ordering = CHOLMOD_METIS;
  }
};
#else
using SpdFactorization = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>;
#endif

}  // namespace slipfsi::detail

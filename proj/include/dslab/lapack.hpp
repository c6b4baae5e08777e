#pragma once

#include "dslab/common.hpp"

// Thin wrappers over the LAPACK routines we rely on. All matrices are
// column-major Eigen objects.
//
// Every decomposition is spot-checked on a handful of eigenpairs. Some
// optimised BLAS builds pick CPU kernels that return wrong eigenvectors
// without an error code; when the check fails the wrapper recomputes with
// Eigen's solvers and warns once on stderr.
namespace dslab::lapack {

// Eigenpairs of a real symmetric matrix, ascending.
void syevd(const MatR& a, VecR& evals, MatR& evecs);
// Eigenpairs of a complex hermitian matrix, ascending.
void heevd(const MatC& a, VecR& evals, MatC& evecs);
// Right eigenvectors of a general complex matrix.
void geev(const MatC& a, VecC& evals, MatC& evecs);

// Number of decompositions that failed the spot check and were recomputed.
long fallback_count();

}  // namespace dslab::lapack

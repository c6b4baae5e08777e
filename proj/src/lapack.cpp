#include "dslab/lapack.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <vector>

#include <Eigen/Eigenvalues>

extern "C" {
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda,
             double* w, double* work, const int* lwork, int* iwork, const int* liwork,
             int* info);
void zheevd_(const char* jobz, const char* uplo, const int* n, std::complex<double>* a,
             const int* lda, double* w, std::complex<double>* work, const int* lwork,
             double* rwork, const int* lrwork, int* iwork, const int* liwork, int* info);
void zgeev_(const char* jobvl, const char* jobvr, const int* n, std::complex<double>* a,
            const int* lda, std::complex<double>* w, std::complex<double>* vl, const int* ldvl,
            std::complex<double>* vr, const int* ldvr, std::complex<double>* work,
            const int* lwork, double* rwork, int* info);
}

namespace dslab::lapack {

namespace {

std::atomic<long> g_fallbacks{0};
std::once_flag g_warned;

void note_fallback(const char* routine) {
  ++g_fallbacks;
  std::call_once(g_warned, [routine] {
    std::fprintf(stderr,
                 "dslab: %s returned inaccurate eigenpairs; using Eigen solvers instead "
                 "(for OpenBLAS, setting OPENBLAS_CORETYPE may help)\n",
                 routine);
  });
}

// Spot-check up to 8 evenly spread eigenpairs: residual, normalisation and
// mutual orthogonality (the last only for normal problems).
template <class Mat, class Vals>
bool pairs_ok(const Mat& a, const Vals& evals, const Mat& evecs, bool orthonormal) {
  const Eigen::Index n = a.rows();
  if (n == 0) return true;
  if (!evecs.allFinite()) return false;
  const double scale = std::max(a.cwiseAbs().maxCoeff() * std::sqrt(double(n)), 1e-300);
  const double tol = 1e-9;
  const Eigen::Index k = std::min<Eigen::Index>(8, n);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < k; ++i) cols.push_back(k == 1 ? 0 : i * (n - 1) / (k - 1));
  for (Eigen::Index c : cols) {
    const auto v = evecs.col(c);
    const double vn = v.norm();
    if (!(vn > 0)) return false;
    if ((a * v - evals[c] * v).norm() > tol * scale * vn) return false;
    if (orthonormal && std::abs(vn - 1.0) > 1e-8) return false;
  }
  if (orthonormal)
    for (std::size_t i = 0; i < cols.size(); ++i)
      for (std::size_t j = i + 1; j < cols.size(); ++j)
        if (cols[i] != cols[j] && std::abs(evecs.col(cols[i]).dot(evecs.col(cols[j]))) > 1e-8)
          return false;
  return true;
}

}  // namespace

long fallback_count() { return g_fallbacks.load(); }

void syevd(const MatR& a, VecR& evals, MatR& evecs) {
  const int n = static_cast<int>(a.rows());
  evecs = a;
  evals.resize(n);
  int info = 0, lwork = -1, liwork = -1, iwq = 0;
  double wq = 0;
  dsyevd_("V", "L", &n, evecs.data(), &n, evals.data(), &wq, &lwork, &iwq, &liwork, &info);
  lwork = static_cast<int>(wq);
  liwork = iwq;
  std::vector<double> work(lwork);
  std::vector<int> iwork(liwork);
  dsyevd_("V", "L", &n, evecs.data(), &n, evals.data(), work.data(), &lwork, iwork.data(),
          &liwork, &info);
  if (info != 0) throw DiagonalizationFailed("dsyevd info=" + std::to_string(info));
  if (pairs_ok(a, evals, evecs, true)) return;
  note_fallback("dsyevd");
  const Eigen::SelfAdjointEigenSolver<MatR> es(a);
  if (es.info() != Eigen::Success) throw DiagonalizationFailed("symmetric eigensolver failed");
  evals = es.eigenvalues();
  evecs = es.eigenvectors();
}

void heevd(const MatC& a, VecR& evals, MatC& evecs) {
  const int n = static_cast<int>(a.rows());
  evecs = a;
  evals.resize(n);
  int info = 0, lwork = -1, lrwork = -1, liwork = -1, iwq = 0;
  cplx wq;
  double rwq = 0;
  zheevd_("V", "L", &n, evecs.data(), &n, evals.data(), &wq, &lwork, &rwq, &lrwork, &iwq,
          &liwork, &info);
  lwork = static_cast<int>(wq.real());
  lrwork = static_cast<int>(rwq);
  liwork = iwq;
  std::vector<cplx> work(lwork);
  std::vector<double> rwork(lrwork);
  std::vector<int> iwork(liwork);
  zheevd_("V", "L", &n, evecs.data(), &n, evals.data(), work.data(), &lwork, rwork.data(),
          &lrwork, iwork.data(), &liwork, &info);
  if (info != 0) throw DiagonalizationFailed("zheevd info=" + std::to_string(info));
  if (pairs_ok(a, evals, evecs, true)) return;
  note_fallback("zheevd");
  const Eigen::SelfAdjointEigenSolver<MatC> es(a);
  if (es.info() != Eigen::Success) throw DiagonalizationFailed("hermitian eigensolver failed");
  evals = es.eigenvalues();
  evecs = es.eigenvectors();
}

void geev(const MatC& a, VecC& evals, MatC& evecs) {
  const int n = static_cast<int>(a.rows());
  MatC work_a = a;
  evals.resize(n);
  evecs.resize(n, n);
  int info = 0, lwork = -1, one = 1;
  cplx wq, dummy;
  std::vector<double> rwork(2 * static_cast<std::size_t>(n));
  zgeev_("N", "V", &n, work_a.data(), &n, evals.data(), &dummy, &one, evecs.data(), &n, &wq,
         &lwork, rwork.data(), &info);
  lwork = static_cast<int>(wq.real());
  std::vector<cplx> work(lwork);
  zgeev_("N", "V", &n, work_a.data(), &n, evals.data(), &dummy, &one, evecs.data(), &n,
         work.data(), &lwork, rwork.data(), &info);
  if (info != 0) throw DiagonalizationFailed("zgeev info=" + std::to_string(info));
  if (pairs_ok(a, evals, evecs, false)) return;
  note_fallback("zgeev");
  const Eigen::ComplexEigenSolver<MatC> es(a);
  if (es.info() != Eigen::Success) throw DiagonalizationFailed("complex eigensolver failed");
  evals = es.eigenvalues();
  evecs = es.eigenvectors();
}

}  // namespace dslab::lapack

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace dslab {

using cplx = std::complex<double>;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;

inline constexpr cplx I{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// Every failure mode raised by the library derives from Error so callers can
// catch broadly; the kind() tag is what the CLI prints.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define DSLAB_ERROR(Name)                                               \
  struct Name : Error {                                                 \
    explicit Name(const std::string& m) : Error(#Name, m) {}            \
  }

DSLAB_ERROR(StepBlowup);
DSLAB_ERROR(ToleranceExceeded);
DSLAB_ERROR(UndeterminedStatus);
DSLAB_ERROR(EmptyShell);
DSLAB_ERROR(ResolutionError);
DSLAB_ERROR(SymbolDecayError);
DSLAB_ERROR(SingularSystem);
DSLAB_ERROR(PowerIterationStall);
DSLAB_ERROR(PreconditionViolated);
DSLAB_ERROR(NoConvergence);
DSLAB_ERROR(ConvergenceGateFailed);
DSLAB_ERROR(DiagonalizationFailed);
DSLAB_ERROR(TailNotNegligible);
DSLAB_ERROR(TruncationError);
DSLAB_ERROR(FrontReachedBoundary);
DSLAB_ERROR(ConfigError);
DSLAB_ERROR(GateFailure);

#undef DSLAB_ERROR

}  // namespace dslab

#ifndef MEDSTREAM_SPD_HPP
#define MEDSTREAM_SPD_HPP

#include <Eigen/Dense>
#include <sstream>
#include <string>

#include "medstream/errors.hpp"

namespace medstream {

// Cholesky solver for the accumulated information matrices. Refuses systems
// whose spectral condition number exceeds kMaxCondition instead of silently
// regularizing: the renewable algebra is exact and a hidden ridge term would
// break the equality with full-data fits.
class SpdSolver {
 public:
  static constexpr double kMaxCondition = 1e12;

  SpdSolver(const Eigen::MatrixXd& a, const std::string& design_name) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(a, Eigen::EigenvaluesOnly);
    const double lo = eigs.eigenvalues().minCoeff();
    const double hi = eigs.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxCondition) {
      std::ostringstream msg;
      msg << design_name << " is rank deficient or ill-conditioned";
      if (lo > 0.0) msg << " (condition estimate " << hi / lo << ")";
      throw RankDeficiencyError(msg.str());
    }
    llt_.compute(a);
    if (llt_.info() != Eigen::Success) {
      throw RankDeficiencyError(design_name + ": Cholesky factorization failed");
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const { return llt_.solve(b); }

  // Diagonal of the inverse, for standard-error extraction.
  Eigen::VectorXd inverse_diagonal() const {
    const Eigen::Index d = llt_.matrixL().rows();
    return llt_.solve(Eigen::MatrixXd::Identity(d, d)).diagonal();
  }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

}  // namespace medstream

#endif  // MEDSTREAM_SPD_HPP

#pragma once

#include <algorithm>
#include <string>

#include <Eigen/Cholesky>

#include "teleop/errors.hpp"

namespace teleop {

inline constexpr double kSymmetryTolerance = 1e-10;

template <typename Derived>
bool is_spd(const Eigen::MatrixBase<Derived>& m) {
  if (!m.allFinite()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) return false;
  Eigen::LLT<typename Derived::PlainObject> llt(m);
  return llt.info() == Eigen::Success;
}

template <typename Derived>
void require_spd(const Eigen::MatrixBase<Derived>& m, const std::string& what) {
  if (!is_spd(m)) throw NotSPD(what + " is not symmetric positive definite");
}

}  // namespace teleop

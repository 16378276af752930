// Copyright 2026 The twinlink Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "twinlink/errors.hpp"

namespace twinlink {

// A second-order policy in a task space: desired acceleration plus the
// metric that weights it, and the Jacobian that pulls it back to joints.
template <typename Scalar>
struct TaskPolicy {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix jacobian;  // task_dim x n
  Vector desired_accel;
  Matrix metric;  // task_dim x task_dim, symmetric PSD

  Eigen::Index task_dim() const { return desired_accel.size(); }
  Eigen::Index joint_dim() const { return jacobian.cols(); }
};

using TaskPolicyd = TaskPolicy<double>;

// Relative cutoff below which eigenvalues of the pulled-back metric are
// treated as zero.
inline constexpr double kPseudoInverseCutoff = 1e-8;

// Metric-weighted combination of pulled-back policies:
//   a = (sum J^T M J)^+ (sum J^T M a_i)
// The pseudo-inverse drops eigen-directions below kPseudoInverseCutoff
// times the largest eigenvalue. It is evaluated as the minimum-norm solution
// of the stacked problem min sum |L_i^T (J_i a - a_i)|^2 with M_i = L_i L_i^T,
// whose singular values are the square roots of those eigenvalues.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> Resolve(const std::vector<TaskPolicy<Scalar>>& policies) {
  using Matrix = typename TaskPolicy<Scalar>::Matrix;
  using Vector = typename TaskPolicy<Scalar>::Vector;
  if (policies.empty()) throw DimensionError("resolve needs at least one policy");
  const Eigen::Index n = policies.front().joint_dim();
  Eigen::Index rows = 0;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const TaskPolicy<Scalar>& p = policies[i];
    if (p.joint_dim() != n) {
      throw DimensionError("policy " + std::to_string(i) + " has " +
                           std::to_string(p.joint_dim()) + " jacobian columns, expected " +
                           std::to_string(n));
    }
    if (p.jacobian.rows() != p.task_dim() || p.metric.rows() != p.task_dim() ||
        p.metric.cols() != p.task_dim()) {
      throw DimensionError("policy " + std::to_string(i) +
                           " has inconsistent task dimensions");
    }
    rows += p.task_dim();
  }

  Matrix stacked(rows, n);
  Vector target(rows);
  Eigen::Index row = 0;
  for (const TaskPolicy<Scalar>& p : policies) {
    const Eigen::Index m = p.task_dim();
    Matrix root_t;  // L^T
    if (p.metric.isDiagonal(Scalar(0))) {
      root_t = p.metric.diagonal().cwiseMax(Scalar(0)).cwiseSqrt().asDiagonal();
    } else {
      const Matrix symmetric = Scalar(0.5) * (p.metric + p.metric.transpose());
      const Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric);
      root_t = eig.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt().asDiagonal() *
               eig.eigenvectors().transpose();
    }
    stacked.middleRows(row, m).noalias() = root_t * p.jacobian;
    target.segment(row, m).noalias() = root_t * p.desired_accel;
    row += m;
  }

  const Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  if (sigma.size() == 0 || !(sigma(0) > Scalar(0))) return Vector::Zero(n);
  const Scalar cutoff = Scalar(kPseudoInverseCutoff) * sigma(0) * sigma(0);
  Vector projected = svd.matrixU().transpose() * target;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    projected(k) = sigma(k) * sigma(k) > cutoff ? projected(k) / sigma(k) : Scalar(0);
  }
  return svd.matrixV() * projected;
}

}  // namespace twinlink

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

#include <cmath>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "twinlink/errors.hpp"
#include "twinlink/kinematics/arm_description.hpp"
#include "twinlink/kinematics/forward_kinematics.hpp"

namespace twinlink {
namespace {

using testing::FiniteDifferenceJacobian;
using testing::OraclePoint;
using testing::PlanarArm;
using testing::RandomArm;
using testing::SourceDir;

std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

TEST(Pose, CompositionIsAssociativeAndInverts) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto random_pose = [&] {
    return Posed::FromXyzRpy({u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)});
  };
  for (int i = 0; i < 100; ++i) {
    const Posed a = random_pose(), b = random_pose(), c = random_pose();
    const Posed left = (a * b) * c, right = a * (b * c);
    EXPECT_LT((left.position - right.position).norm(), 1e-12);
    EXPECT_LT(left.orientation.angularDistance(right.orientation), 1e-9);
    const Posed id = a.inverse() * a;
    EXPECT_LT(id.position.norm(), 1e-12);
    EXPECT_NEAR(std::abs(id.orientation.w()), 1.0, 1e-12);
  }
}

TEST(Pose, QuaternionStaysNormalizedOverLongChains) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  Posed p;
  for (int i = 0; i < 20000; ++i) {
    p = p * Posed::FromXyzRpy({u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)});
  }
  EXPECT_NEAR(p.orientation.norm(), 1.0, 1e-9);
}

TEST(Pose, RpyMatchesRotationMatrixProduct) {
  const Eigen::Vector3d rpy(0.3, -0.4, 1.1);
  const Eigen::Matrix3d expected = testing::Rodrigues(Eigen::Vector3d::UnitZ(), rpy.z()) *
                                   testing::Rodrigues(Eigen::Vector3d::UnitY(), rpy.y()) *
                                   testing::Rodrigues(Eigen::Vector3d::UnitX(), rpy.x());
  EXPECT_LT((Posed::FromXyzRpy({0, 0, 0}, rpy).rotation() - expected).norm(), 1e-12);
}

TEST(ForwardKinematics, PlanarTwoLinkAnalyticCases) {
  const ArmModel arm = PlanarArm({1.0, 1.0});
  struct Case {
    double q0, q1;
    Eigen::Vector3d expected;
  };
  const Case cases[] = {
      {0.0, 0.0, {2.0, 0.0, 0.0}},
      {M_PI / 2, 0.0, {0.0, 2.0, 0.0}},
      {M_PI / 2, -M_PI / 2, {1.0, 1.0, 0.0}},
  };
  for (const Case& c : cases) {
    // Hand evaluation: x = cos q0 + cos(q0 + q1), y = sin q0 + sin(q0 + q1).
    const Eigen::Vector3d analytic(std::cos(c.q0) + std::cos(c.q0 + c.q1),
                                   std::sin(c.q0) + std::sin(c.q0 + c.q1), 0.0);
    EXPECT_LT((analytic - c.expected).norm(), 1e-12);
    const auto fk = ForwardKinematics(arm, Eigen::Vector2d(c.q0, c.q1));
    EXPECT_LT((fk.control_point.position - c.expected).norm(), 1e-12)
        << "q=(" << c.q0 << ", " << c.q1 << ")";
  }
}

TEST(ForwardKinematics, RejectsWrongJointCount) {
  const ArmModel arm = PlanarArm({1.0, 1.0});
  EXPECT_THROW(ForwardKinematics(arm, Eigen::Vector3d::Zero()), DimensionError);
}

TEST(ForwardKinematics, MatchesHomogeneousMatrixOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const ArmModel arm = RandomArm(rng, 1 + trial % 7);
    Eigen::VectorXd q(arm.joint_count());
    for (int j = 0; j < q.size(); ++j) q(j) = u(rng);
    const auto fk = ForwardKinematics(arm, q);
    for (int link = 0; link < arm.link_count(); ++link) {
      const Eigen::Matrix4d t = testing::OracleLinkTransform(arm, q, link);
      EXPECT_LT((fk.link_poses[link].position - t.topRightCorner<3, 1>()).norm(), 1e-12);
      EXPECT_LT((fk.link_poses[link].rotation() - t.topLeftCorner<3, 3>()).norm(), 1e-12);
    }
  }
}

// Hand-derived home poses of the bundled arms. Both chains are stacks of
// z-offsets with pitch joints about y, so the control point is a sum of
// segment lengths times (sin, 0, cos) of the accumulated pitch.
TEST(ForwardKinematics, BundledArmsAtHome) {
  struct Segment {
    double length;
    double pitch;  // accumulated pitch of the segment
  };
  auto sum = [](double base_z, const std::vector<Segment>& segments) {
    Eigen::Vector3d p(0, 0, base_z);
    for (const Segment& s : segments) {
      p += s.length * Eigen::Vector3d(std::sin(s.pitch), 0, std::cos(s.pitch));
    }
    return p;
  };
  {
    const ArmModel arm = LoadArmDescriptionFile(SourceDir() / "data/arms/ur3_like.yaml");
    const Eigen::VectorXd& q = arm.home_configuration;
    const double t1 = q(1), t2 = t1 + q(2), t3 = t2 + q(3);
    // shoulder 0.15 up; upper arm 0.25; forearm 0.22; wrist 0.085 + 0.06 + tool 0.10
    const Eigen::Vector3d expected = sum(0.15, {{0.25, t1}, {0.22, t2}, {0.245, t3}});
    const auto fk = ForwardKinematics(arm, q);
    EXPECT_LT((fk.control_point.position - expected).norm(), 1e-12);
    const Eigen::Matrix3d rot = testing::Rodrigues(Eigen::Vector3d::UnitY(), t3);
    EXPECT_LT((fk.control_point.rotation() - rot).norm(), 1e-12);
  }
  {
    const ArmModel arm = LoadArmDescriptionFile(SourceDir() / "data/arms/baxter_like.yaml");
    const Eigen::VectorXd& q = arm.home_configuration;
    const double t1 = q(1), t2 = t1 + q(3), t3 = t2 + q(5);
    // s0 0.30 + s1 0.07 up; e0 0.10 + e1 0.27; w0 0.10 + w1 0.27; w2 0.10 + tool 0.12
    const Eigen::Vector3d expected = sum(0.37, {{0.37, t1}, {0.37, t2}, {0.22, t3}});
    const auto fk = ForwardKinematics(arm, q);
    EXPECT_LT((fk.control_point.position - expected).norm(), 1e-12);
  }
}

TEST(Jacobian, SingleLinkTipColumn) {
  const ArmModel arm = PlanarArm({1.0});
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
  const LinkPoint tip{1, {1.0, 0.0, 0.0}};
  const Eigen::MatrixXd jac = Jacobian(arm, q, tip);
  const Eigen::MatrixXd fd = FiniteDifferenceJacobian(arm, q, 1, tip.local_offset);
  EXPECT_LT((fd.block<3, 1>(0, 0) - Eigen::Vector3d(0, 1, 0)).norm(), 1e-6);
  EXPECT_LT((jac.block<3, 1>(0, 0) - Eigen::Vector3d(0, 1, 0)).norm(), 1e-12);
}

TEST(Jacobian, BaseLinkPointIsZero) {
  std::mt19937_64 rng(2);
  const ArmModel arm = RandomArm(rng, 4);
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(4, 0.3);
  EXPECT_EQ(Jacobian(arm, q, LinkPoint{0, {0.2, 0.1, 0.0}}).norm(), 0.0);
}

TEST(Jacobian, ColumnsAfterThePointLinkAreZero) {
  std::mt19937_64 rng(4);
  const ArmModel arm = RandomArm(rng, 5);
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(5, -0.7);
  const Eigen::MatrixXd jac = Jacobian(arm, q, LinkPoint{2, {0.1, 0.0, 0.0}});
  EXPECT_EQ(jac.rightCols(3).norm(), 0.0);
}

TEST(Jacobian, RejectsBadLinkAndDimension) {
  const ArmModel arm = PlanarArm({1.0, 1.0});
  EXPECT_THROW(Jacobian(arm, Eigen::Vector2d::Zero().eval(), LinkPoint{3, {}}), DimensionError);
  EXPECT_THROW(Jacobian(arm, Eigen::Vector3d::Zero().eval(), LinkPoint{1, {}}), DimensionError);
}

TEST(Jacobian, MatchesFiniteDifferencesOnRandomChains) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const ArmModel arm = RandomArm(rng, 5);
    Eigen::VectorXd q(5);
    for (int j = 0; j < 5; ++j) q(j) = u(rng);
    const LinkPoint point{1 + trial % 5, 0.2 * Eigen::Vector3d(u(rng), u(rng), u(rng))};
    const Eigen::MatrixXd fd = FiniteDifferenceJacobian(arm, q, point.link_index,
                                                        point.local_offset);
    worst = std::max(worst, (Jacobian(arm, q, point) - fd).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Jacobian, ControlPointJacobianOnBundledArm) {
  const ArmModel arm = LoadArmDescriptionFile(SourceDir() / "data/arms/baxter_like.yaml");
  const Eigen::VectorXd q = arm.home_configuration;
  const auto fk = ForwardKinematics(arm, q);
  const Eigen::Vector3d local = arm.control_point_offset.position;
  const Eigen::MatrixXd fd = FiniteDifferenceJacobian(arm, q, arm.link_count() - 1, local);
  EXPECT_LT((ControlPointJacobian(arm, fk) - fd).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(ClampJoints, ClampsAndIsIdempotent) {
  const ArmModel arm = LoadArmDescriptionFile(SourceDir() / "data/arms/ur3_like.yaml");
  const Eigen::VectorXd inside = arm.home_configuration;
  EXPECT_EQ(ClampJoints(arm, inside), inside);
  Eigen::VectorXd above = inside;
  above(2) = arm.joints[2].upper_limit + 1.0;
  EXPECT_EQ(ClampJoints(arm, above)(2), arm.joints[2].upper_limit);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd q(arm.joint_count());
    for (int j = 0; j < q.size(); ++j) q(j) = u(rng);
    const Eigen::VectorXd once = ClampJoints(arm, q);
    EXPECT_EQ(ClampJoints(arm, once), once);
    EXPECT_TRUE((once.array() >= arm.lower_limits().array()).all());
    EXPECT_TRUE((once.array() <= arm.upper_limits().array()).all());
  }
  EXPECT_THROW(ClampJoints(arm, Eigen::VectorXd::Zero(2)), DimensionError);
}

constexpr const char* kTwoJointPlanar = R"(name: planar
joints:
  - name: shoulder
    origin: {xyz: [0, 0, 0]}
    axis: [0, 0, 1]
    lower: -3.1
    upper: 3.1
    max_velocity: 1.5
  - name: elbow
    origin: {xyz: [1, 0, 0]}
    axis: [0, 0, 1]
    lower: -3.1
    upper: 3.1
    max_velocity: 1.5
spheres:
  - link: 2
    offset: [0.5, 0, 0]
    radius: 0.1
control_point: {xyz: [1, 0, 0]}
home: [0, 0]
)";

TEST(ArmDescription, ParsesTwoJointDocumentInOrder) {
  const ArmModel arm = LoadArmDescription(kTwoJointPlanar);
  ASSERT_EQ(arm.joint_count(), 2);
  EXPECT_EQ(arm.joints[0].name, "shoulder");
  EXPECT_EQ(arm.joints[1].name, "elbow");
  ASSERT_EQ(arm.spheres.size(), 1u);
  EXPECT_EQ(arm.spheres[0].link_index, 2);
  EXPECT_DOUBLE_EQ(arm.joints[1].max_velocity, 1.5);
  const auto fk = ForwardKinematics(arm, Eigen::Vector2d(M_PI / 2, 0));
  EXPECT_LT((fk.control_point.position - Eigen::Vector3d(0, 2, 0)).norm(), 1e-12);
}

TEST(ArmDescription, LowerAboveUpperIsAValidationError) {
  std::string text = kTwoJointPlanar;
  text.replace(text.find("lower: -3.1"), 11, "lower: 3.5");
  try {
    LoadArmDescription(text);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("shoulder"), std::string::npos) << e.what();
  }
}

TEST(ArmDescription, SyntaxErrorsCarryALineNumber) {
  const std::string text = "name: x\njoints:\n  - name: [unclosed\n";
  try {
    LoadArmDescription(text);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_GT(e.line(), 0);
  }
}

TEST(ArmDescription, UnknownKeyIsRejectedWithItsLine) {
  std::string text = kTwoJointPlanar;
  text.replace(text.find("    max_velocity: 1.5\n  - name: elbow"), 0, "    damping: 3\n");
  try {
    LoadArmDescription(text);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 8) << e.what();
  }
}

TEST(ArmDescription, OtherInvariants) {
  auto expect_invalid = [](std::string text, const std::string& from, const std::string& to) {
    text.replace(text.find(from), from.size(), to);
    EXPECT_THROW(LoadArmDescription(text), ValidationError) << to;
  };
  expect_invalid(kTwoJointPlanar, "radius: 0.1", "radius: 0");
  expect_invalid(kTwoJointPlanar, "link: 2", "link: 3");
  expect_invalid(kTwoJointPlanar, "home: [0, 0]", "home: [0, 4]");
  expect_invalid(kTwoJointPlanar, "home: [0, 0]", "home: [0]");
  expect_invalid(kTwoJointPlanar, "max_velocity: 1.5", "max_velocity: 0");
  std::string zero_axis = kTwoJointPlanar;
  zero_axis.replace(zero_axis.find("axis: [0, 0, 1]"), 15, "axis: [0, 0, 0]");
  try {
    LoadArmDescription(zero_axis);
    FAIL() << "expected a zero axis to be rejected";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5) << e.what();
  }
}

// The sphere count is checked against a line scan of the file that knows
// nothing about the parser: sphere entries are the "- link:" items.
TEST(ArmDescription, BundledSevenJointSphereCountMatchesTextScan) {
  const auto path = SourceDir() / "data/arms/baxter_like.yaml";
  const std::string text = ReadText(path);
  const std::regex sphere_item(R"(^\s*-\s*link\s*:)");
  std::istringstream lines(text);
  std::string line;
  std::size_t scanned = 0;
  while (std::getline(lines, line)) {
    if (std::regex_search(line, sphere_item)) ++scanned;
  }
  const ArmModel arm = LoadArmDescriptionFile(path);
  EXPECT_EQ(arm.joint_count(), 7);
  EXPECT_GT(scanned, 0u);
  EXPECT_EQ(arm.spheres.size(), scanned);
}

TEST(ArmDescription, MissingFileIsAnError) {
  EXPECT_THROW(LoadArmDescriptionFile("/nonexistent/arm.yaml"), Error);
}

}  // namespace
}  // namespace twinlink

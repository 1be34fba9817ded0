#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rapidtail/errors.hpp"
#include "rapidtail/tailasym.hpp"
#include "rapidtail/verify.hpp"

using namespace rapidtail;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
const std::vector<double> kSurvivalGrid = {3, 4, 5, 6};
const std::vector<double> kTailGrid = {3, 4, 5, 6, 8};
}  // namespace

TEST(JointSurvival, IndependentProduct) {
  const auto s = make_bivariate_skew_normal(0.0, 0.0, 0.0);
  const auto r = joint_survival(s, Eigen::Vector2d(2, 2));
  EXPECT_EQ(r.method, SurvivalMethod::quadrature);
  const double ref = 2.0 * std::log(oracle::normal_sf(2.0));
  EXPECT_NEAR(std::expm1(r.log_prob - ref), 0.0, 1e-5);
  EXPECT_NEAR(std::exp(ref / 2.0), 0.0227501319481792, 1e-15);
}

TEST(JointSurvival, WholeSpace) {
  const auto s = make_bivariate_skew_normal(0.5, 0.6, 0.3);
  EXPECT_NEAR(joint_survival(s, Eigen::Vector2d(-30, -30)).log_prob, 0.0, 1e-6);
  EXPECT_NEAR(joint_survival(s, Eigen::Vector2d(-kInf, -kInf)).log_prob, 0.0, 1e-9);
}

TEST(JointSurvival, Monotone) {
  const auto s = make_bivariate_skew_normal(0.5, 0.6, 0.3);
  EXPECT_LT(joint_survival(s, Eigen::Vector2d(3, 3)).log_prob, joint_survival(s, Eigen::Vector2d(2, 2)).log_prob);
}

TEST(JointSurvival, MatchesHandWrittenSkewNormal) {
  for (const auto& [rho, d1, d2] : std::vector<std::tuple<double, double, double>>{
           {0.5, 0.6, 0.3}, {0.5, 0.6, 0.6}, {0.2, 0.0, 0.7}}) {
    const oracle::SkewBivariate ref(rho, d1, d2);
    const auto s = make_bivariate_skew_normal(rho, d1, d2);
    for (const auto& a : {Eigen::Vector2d(1.0, 0.5), Eigen::Vector2d(3.0, 3.0), Eigen::Vector2d(-1.0, 4.0)}) {
      const double p = std::exp(joint_survival(s, a).log_prob);
      EXPECT_NEAR(p / ref.survival(a[0], a[1]), 1.0, 1e-7) << rho << " " << a.transpose();
    }
  }
}

TEST(JointSurvival, FreeCoordinateGivesMargin) {
  const auto s = make_bivariate_skew_normal(0.5, 0.6, 0.3);
  const double p = std::exp(joint_survival(s, Eigen::Vector2d(1.5, -kInf)).log_prob);
  EXPECT_NEAR(p / oracle::skew_normal_sf(1.5, s.theta_bar()[0]), 1.0, 1e-8);
}

TEST(JointSurvival, ThreeDimensionalProduct) {
  const auto s = build_spec(Eigen::Vector3d::Zero(), Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero(),
                            make_normal_generator(4));
  const Eigen::Vector3d a(1.0, 2.0, 0.5);
  double ref = 0.0;
  for (int i = 0; i < 3; ++i) ref += std::log(oracle::normal_sf(a[i]));
  EXPECT_NEAR(std::expm1(joint_survival(s, a).log_prob - ref), 0.0, 1e-6);
}

TEST(JointSurvival, ImportanceSamplingAgreesWithQuadrature) {
  const auto s = make_bivariate_skew_normal(0.5, 0.6, 0.3);
  const Eigen::Vector2d a(4, 4);
  const auto q = joint_survival_quadrature(s, a);
  const auto is = joint_survival_importance(s, a);
  EXPECT_EQ(is.method, SurvivalMethod::importance_sampling);
  const double diff = std::abs(std::exp(is.log_prob - q.log_prob) - 1.0);
  EXPECT_LT(diff, 3.0 * is.rel_error);
}

TEST(JointSurvival, ImportanceSamplingIsDeterministic) {
  const auto s = make_bivariate_skew_normal(0.5, 0.6, 0.3);
  ImportanceOptions opts;
  opts.samples = 20000;
  const auto a = joint_survival_importance(s, Eigen::Vector2d(3, 3), opts);
  const auto b = joint_survival_importance(s, Eigen::Vector2d(3, 3), opts);
  EXPECT_EQ(a.log_prob, b.log_prob);
  EXPECT_EQ(a.rel_error, b.rel_error);
  opts.seed += 1;
  EXPECT_NE(joint_survival_importance(s, Eigen::Vector2d(3, 3), opts).log_prob, a.log_prob);
}

TEST(JointSurvival, ImportanceSamplingHigherDimension) {
  const int d = 5;
  const auto s = build_spec(Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d),
                            make_normal_generator(d + 1));
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(d, 1.0);
  const auto r = joint_survival(s, a);
  EXPECT_EQ(r.method, SurvivalMethod::importance_sampling);
  const double ref = d * std::log(oracle::normal_sf(1.0));
  EXPECT_LT(std::abs(std::exp(r.log_prob - ref) - 1.0), 4.0 * r.rel_error);
}

TEST(JointSurvival, InconclusiveCarriesPartialEstimate) {
  const auto s = make_bivariate_skew_normal(0.5, 0.6, 0.3);
  ImportanceOptions opts;
  opts.samples = 16;
  opts.streams = 2;
  opts.max_rel_error = 1e-6;
  try {
    joint_survival_importance(s, Eigen::Vector2d(2, 2), opts);
    FAIL() << "expected InconclusiveEstimate";
  } catch (const InconclusiveEstimate& e) {
    EXPECT_TRUE(std::isfinite(e.log_estimate()));
    EXPECT_GT(e.rel_std_error(), 1e-6);
  }
}

TEST(JointSurvival, DimensionLimits) {
  const int d = 4;
  const auto s = build_spec(Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d),
                            make_normal_generator(d + 1));
  EXPECT_THROW(joint_survival_quadrature(s, Eigen::VectorXd::Zero(d)), InvalidDimension);
  const int big = 9;
  const auto t = build_spec(Eigen::VectorXd::Zero(big), Eigen::MatrixXd::Identity(big, big),
                            Eigen::VectorXd::Zero(big), make_normal_generator(big + 1));
  EXPECT_THROW(joint_survival(t, Eigen::VectorXd::Zero(big)), InvalidDimension);
}

TEST(RapidVariation, IndependentNormalLimitIsOne) {
  const auto r = verify_rapid_variation(make_bivariate_skew_normal(0.0, 0.0, 0.0), Eigen::Vector2d::Zero(),
                                        kSurvivalGrid);
  ASSERT_TRUE(r.target.has_value());
  EXPECT_NEAR(*r.target, 1.0, 1e-15);
  EXPECT_LT(r.final_rel_error(), 5e-3);
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_EQ(r.method, Extrapolator::richardson);
}

TEST(RapidVariation, SkewedCorrelatedTarget) {
  const auto r = verify_rapid_variation(make_bivariate_skew_normal(0.5, 0.6, 0.6), Eigen::Vector2d(1, 1),
                                        kSurvivalGrid);
  const double target = 2.0 * 1.5 * 1.5 / std::sqrt(0.75) * std::exp(-2.0 / 1.5);
  EXPECT_NEAR(*r.target / target, 1.0, 1e-14);
  EXPECT_EQ(r.verdict, Verdict::pass);
}

TEST(RapidVariation, TargetShift) {
  const auto s = make_bivariate_skew_normal(0.5, 0.6, 0.6);
  const auto etd = closed_form_tail_density(s);
  const Eigen::Vector2d x(0.2, -0.4);
  const double base = std::exp(log_upper_integral(etd, x));
  const double shifted = std::exp(log_upper_integral(etd, x.array() + 1.0));
  EXPECT_NEAR(shifted / (base * std::exp(-s.kappa_u())), 1.0, 1e-14);
}

TEST(RapidVariation, Preconditions) {
  const auto s = make_bivariate_skew_normal(0.5, 0.3, -0.3);
  EXPECT_THROW(verify_rapid_variation(s, Eigen::Vector2d::Zero(), kSurvivalGrid), PreconditionError);
  const auto ok = make_bivariate_skew_normal(0.0, 0.0, 0.0);
  const std::vector<double> low = {1, 2, 3};
  const std::vector<double> unordered = {3, 5, 4};
  EXPECT_THROW(verify_rapid_variation(ok, Eigen::Vector2d::Zero(), low), DomainError);
  EXPECT_THROW(verify_rapid_variation(ok, Eigen::Vector2d::Zero(), unordered), DomainError);
}

TEST(RapidVariation, Deterministic) {
  const auto s = make_bivariate_skew_normal(0.5, 0.6, 0.6);
  const auto a = verify_rapid_variation(s, Eigen::Vector2d(1, 1), kSurvivalGrid);
  const auto b = verify_rapid_variation(s, Eigen::Vector2d(1, 1), kSurvivalGrid);
  EXPECT_EQ(a.raw_values, b.raw_values);
  EXPECT_EQ(a.extrapolated, b.extrapolated);
}

TEST(TailDensityReport, IndependentAtOrigin) {
  const auto r = verify_tail_density(make_bivariate_skew_normal(0.0, 0.0, 0.0), Eigen::Vector2d::Zero(), kTailGrid);
  EXPECT_NEAR(*r.target, 1.0, 1e-15);
  EXPECT_EQ(r.verdict, Verdict::pass);
}

TEST(TailDensityReport, CorrelatedSymmetricBranch) {
  const auto r = verify_tail_density(make_bivariate_skew_normal(0.5, 0.0, 0.0), Eigen::Vector2d(1, 1), kTailGrid);
  EXPECT_NEAR(*r.target / (std::exp(-4.0 / 3.0) / std::sqrt(0.75)), 1.0, 1e-14);
  EXPECT_EQ(r.verdict, Verdict::pass);
}

TEST(TailDensityReport, UniformityProbe) {
  std::vector<Eigen::VectorXd> grid;
  for (double a : {-1.0, 0.0, 1.0})
    for (double b : {-1.0, 0.0, 1.0}) grid.push_back(Eigen::Vector2d(a, b));
  const std::vector<double> ts = {4, 6, 8};
  const auto probe = probe_tail_density_uniformity(make_bivariate_skew_normal(0.5, 0.6, 0.6), grid, ts);
  ASSERT_EQ(probe.sup_defect.size(), 3u);
  EXPECT_TRUE(probe.decreasing);
  EXPECT_LT(probe.sup_defect.back(), 0.1);
}

TEST(Report, VerdictWithoutTarget) {
  // log values 0.5 * 2^-k converge geometrically to 0 on a doubling grid.
  const std::vector<double> raw = {std::exp(0.5), std::exp(0.25), std::exp(0.125), std::exp(0.0625)};
  const auto r = make_report("x", {10, 20, 40, 80}, raw, std::nullopt, 1e-3, Extrapolator::aitken);
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_NEAR(r.extrapolated, 1.0, 1e-9);
  EXPECT_TRUE(std::isnan(r.final_rel_error()));
}

TEST(Report, VerdictWithTarget) {
  const std::vector<double> raw = {std::exp(0.5), std::exp(0.25), std::exp(0.125)};
  const auto pass = make_report("x", {10, 20, 40}, raw, 1.0, 1e-6, Extrapolator::aitken);
  EXPECT_EQ(pass.verdict, Verdict::pass);
  const auto fail = make_report("x", {10, 20, 40}, raw, 1.1, 1e-3, Extrapolator::aitken);
  EXPECT_EQ(fail.verdict, Verdict::fail);
  EXPECT_NEAR(fail.rel_errors.front(), std::exp(0.5) / 1.1 - 1.0, 1e-15);
}

TEST(Report, DegenerateSequencesAreFlagged) {
  const auto r = make_report("x", {10, 20, 40}, {0.5, 0.5, 0.5}, 0.5, 1e-3, Extrapolator::aitken);
  EXPECT_TRUE(r.degenerate_extrapolation);
  EXPECT_EQ(r.verdict, Verdict::pass);
}

TEST(Report, RejectsBadInput) {
  EXPECT_THROW(make_report("x", {1, 2, 3}, {1.0, std::nan(""), 1.0}, 1.0, 1e-3, Extrapolator::aitken), NumericFailure);
  EXPECT_THROW(make_report("x", {1, 3, 2}, {1.0, 1.0, 1.0}, 1.0, 1e-3, Extrapolator::aitken), DomainError);
  EXPECT_THROW(make_report("x", {1, 2}, {1.0}, 1.0, 1e-3, Extrapolator::aitken), ShapeError);
}

TEST(BivariateBundle, IndependentCaseAllPass) {
  const auto b = verify_example31(0.0, Eigen::Vector2d::Zero());
  for (const auto* r : b.reports()) EXPECT_EQ(r->verdict, Verdict::pass) << r->name;
  EXPECT_TRUE(b.all_pass());
}

TEST(BivariateBundle, TailConstantTable) {
  EXPECT_EQ(verify_example31(0.0, Eigen::Vector2d(0.6, 0.0)).tail_constant.target, 0.5);
  EXPECT_EQ(verify_example31(0.3, Eigen::Vector2d(0.0, 0.6)).tail_constant.target, 2.0);
  EXPECT_EQ(bivariate_tail_constant(0.0, 0.0), 1.0);
  EXPECT_EQ(bivariate_tail_constant(0.4, 0.2), 1.0);
}

TEST(BivariateBundle, KappaTarget) {
  const auto b = verify_example31(0.9, Eigen::Vector2d::Zero());
  EXPECT_EQ(*b.kappa.target, 2.0 / 1.9);
  EXPECT_EQ(b.kappa.verdict, Verdict::pass);
}

TEST(BivariateBundle, OutOfCaseParameters) {
  EXPECT_THROW(verify_example31(-0.2, Eigen::Vector2d::Zero()), PreconditionError);
  EXPECT_THROW(verify_example31(0.2, Eigen::Vector2d(0.3, -0.1)), PreconditionError);
}

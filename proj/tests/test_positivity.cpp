#include <doctest.h>

#include <cmath>
#include <vector>

#include "hcert/errors.hpp"
#include "hcert/positivity.hpp"
#include "support.hpp"

using namespace hcert;
using namespace hcert::positivity;

TEST_CASE("column sums of the three-state example") {
  const auto cfg = support::golden("positive_three_state.json");
  const DelaySystem sys = cfg.system();
  const StructureCheck st = structure_check(sys, cfg.scan);
  CHECK(st.metzler_ok);
  CHECK(st.nonneg_ok);

  const ColumnSums cs = column_sums(sys, cfg.scan);
  REQUIRE(cs.t.size() == 1001);
  for (std::size_t k = 0; k < cs.t.size(); ++k) {
    const double t = cs.t[k];
    CHECK(cs.a[k] == doctest::Approx(0.2 + 0.002 * t).epsilon(1e-12));
    CHECK(cs.b[k] == doctest::Approx(0.1 + 0.0015 * t).epsilon(1e-12));
  }
}

TEST_CASE("three-state example certifies by the ratio route") {
  const auto cfg = support::golden("positive_three_state.json");
  const PositivityResult r = certify_positive(cfg.system(), cfg.scan, cfg.a_bounded, cfg.amplitude);
  CHECK(r.verdict.case_tag == halanay::ConditionCase::Ratio);
  CHECK(r.verdict.ratio_route_ok);
  CHECK_FALSE(r.verdict.a_bounded);
  CHECK(r.verdict.a0 == doctest::Approx(0.2));
  CHECK(r.verdict.p <= 0.75);
  CHECK(r.M_sampled == doctest::Approx(std::abs(0.2 - 0.4 * std::cos(2.0)) + 0.1 + 0.5).epsilon(1e-6));
  REQUIRE(r.certificate);
  CHECK(r.certificate->M == 1.2);
  CHECK(r.certificate->lambda_star >= 0.075);
}

TEST_CASE("two-state example certifies by the gap route") {
  const auto cfg = support::golden("positive_two_state.json");
  const DelaySystem sys = cfg.system();
  const ColumnSums cs = column_sums(sys, cfg.scan);
  for (std::size_t k = 0; k < cs.t.size(); ++k) {
    const double t = cs.t[k];
    CHECK(cs.a[k] == doctest::Approx(1.6 + 1.2 / std::sqrt(1 + t)).epsilon(1e-12));
    CHECK(cs.b[k] == doctest::Approx(1.5 + t * std::sin(t) * std::sin(t) / (1 + t * t)).epsilon(1e-12));
  }
  const PositivityResult r = certify_positive(sys, cfg.scan, cfg.a_bounded);
  CHECK(r.verdict.case_tag == halanay::ConditionCase::BoundedGap);
  CHECK(r.verdict.sigma >= 0.1);
  REQUIRE(r.certificate);
  CHECK(r.certificate->lambda_star >= 0.02);

  // the heuristic alone also finds a(t) bounded here
  const PositivityResult h = certify_positive(sys, cfg.scan);
  CHECK(h.verdict.a_bounded);
}

TEST_CASE("structure failures are input errors") {
  const DelaySystem not_metzler = support::make_system(0.5, 2, {"-1", "-0.1", "0", "-1"}, {"0", "0", "0", "0"}, "1", 1.0, {"1", "1"});
  CHECK_FALSE(structure_check(not_metzler, ScanGrid{10.0, 11}).metzler_ok);
  CHECK_THROWS_AS(certify_positive(not_metzler, ScanGrid{10.0, 11}), InputError);

  const DelaySystem negative_b = support::make_system(0.5, 1, {"-1"}, {"-0.1*sin(t)^2"}, "1", 1.0, {"1"});
  CHECK_FALSE(structure_check(negative_b, ScanGrid{10.0, 11}).nonneg_ok);
  CHECK_THROWS_AS(certify_positive(negative_b, ScanGrid{10.0, 11}), InputError);

  // tiny negative entries inside the tolerance still count
  const DelaySystem tiny = support::make_system(0.5, 1, {"-1"}, {"-1e-14"}, "1", 1.0, {"1"});
  CHECK(structure_check(tiny, ScanGrid{10.0, 11}).ok());
}

TEST_CASE("unstable column sums give no certificate") {
  const DelaySystem sys = support::make_system(0.5, 1, {"0.1"}, {"0"}, "1", 1.0, {"1"});
  const PositivityResult r = certify_positive(sys, ScanGrid{10.0, 11});
  CHECK_FALSE(r.certificate);
  CHECK(r.verdict.case_tag == halanay::ConditionCase::None);
  CHECK_FALSE(r.diagnostics.empty());

  const DelaySystem strong_delay = support::make_system(0.5, 1, {"-1"}, {"1.2"}, "1", 1.0, {"1"});
  const PositivityResult r2 = certify_positive(strong_delay, ScanGrid{10.0, 11});
  CHECK_FALSE(r2.certificate);
  CHECK_FALSE(r2.verdict.ratio_route_ok);
  CHECK_FALSE(r2.verdict.gap_route_ok);
}

TEST_CASE("amplitude override must bound the initial data") {
  const auto cfg = support::golden("positive_three_state.json");
  CHECK_THROWS_AS(certify_positive(cfg.system(), cfg.scan, std::nullopt, 0.5), InputError);
  const PositivityResult r = certify_positive(cfg.system(), cfg.scan);
  REQUIRE(r.certificate);
  CHECK(r.certificate->M == r.M_sampled);
}

TEST_CASE("delay outside [0, tau] is rejected") {
  const DelaySystem sys = support::make_system(0.5, 1, {"-1"}, {"0.1"}, "2", 1.0, {"1"});
  CHECK_THROWS_AS(certify_positive(sys, ScanGrid{10.0, 11}), InputError);
}

TEST_CASE("initial split brackets phi") {
  std::vector<Eigen::VectorXd> samples;
  for (double s = -2.0; s <= 0.0; s += 0.25) samples.push_back(Eigen::Vector2d(std::sin(3 * s), s + 0.5));
  const SplitInitial sp = split_initial(samples);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK((sp.minus[i].array() <= samples[i].array()).all());
    CHECK((samples[i].array() <= sp.plus[i].array()).all());
    CHECK((sp.plus[i].array() >= 0.0).all());
    CHECK((sp.minus[i].array() <= 0.0).all());
  }

  const auto cfg = support::golden("positive_two_state.json");
  const auto [plus, minus] = split_initial_exprs(cfg.phi);
  REQUIRE(plus.size() == 2);
  for (double s = -1.0; s <= 0.0; s += 0.1) {
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(plus[i](s) == std::abs(cfg.phi[i](s)));
      CHECK(minus[i](s) == -std::abs(cfg.phi[i](s)));
    }
  }
}

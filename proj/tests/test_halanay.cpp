#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <boost/math/special_functions/lambert_w.hpp>

#include "bisection.hpp"
#include "hcert/errors.hpp"
#include "hcert/halanay.hpp"
#include "hcert/mlf.hpp"

using namespace hcert;
using namespace hcert::halanay;

namespace {

HalanayInput scalar_input(double alpha, const char* a, std::vector<const char*> b,
                          std::vector<const char*> q, const char* c, double tau) {
  HalanayInput in;
  in.alpha = FractionalOrder(alpha);
  in.a = TimeExpr::parse(a);
  for (const char* s : b) in.b.push_back(TimeExpr::parse(s));
  for (const char* s : q) in.q.push_back(TimeExpr::parse(s));
  in.c = TimeExpr::parse(c);
  in.tau = tau;
  in.scan = ScanGrid{100.0, 1001};
  return in;
}

}  // namespace

TEST_CASE("root of the characteristic function") {
  const FractionalOrder a(0.65);
  const std::vector<double> b{0.2};
  const std::vector<double> q{1.5};
  const double lam = lambda_at(a, 0.3, b, q);
  CHECK(lam > 0.0);
  CHECK(std::abs(h_value(a, 0.3, b, q, lam)) < 1e-14);
  CHECK(h_value(a, 0.3, b, q, 0.0) == doctest::Approx(-0.1));
  CHECK(h_derivative(a, b, q, lam) >= 1.0);
}

TEST_CASE("classical order matches the Lambert W closed form") {
  // alpha = 1: lambda - a + b e^{lambda q} = 0  =>  lambda = a - W(b q e^{a q}) / q
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ua(0.1, 3.0);
  std::uniform_real_distribution<double> ufrac(0.0, 0.95);
  std::uniform_real_distribution<double> uq(0.05, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double av = ua(rng);
    const double bv = ufrac(rng) * av;
    const double qv = uq(rng);
    const std::vector<double> b{bv};
    const std::vector<double> q{qv};
    const double want = av - boost::math::lambert_w0(bv * qv * std::exp(av * qv)) / qv;
    CHECK(lambda_at(FractionalOrder(1.0), av, b, q) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("agrees with plain bisection") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ual(0.1, 1.0);
  std::uniform_real_distribution<double> ua(0.05, 5.0);
  std::uniform_real_distribution<double> uf(0.0, 0.3);
  std::uniform_real_distribution<double> uq(0.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double al = ual(rng);
    const double av = ua(rng);
    std::vector<double> b{uf(rng) * av, uf(rng) * av, uf(rng) * av};
    std::vector<double> q{uq(rng), uq(rng), uq(rng)};
    CHECK(lambda_at(FractionalOrder(al), av, b, q) ==
          doctest::Approx(oracle::lambda_bisect(al, av, b, q)).epsilon(1e-10));
  }
}

TEST_CASE("root lies below a - sum b and tends to it as delays vanish") {
  const FractionalOrder al(0.5);
  const std::vector<double> b{0.3, 0.2};
  double prev = 0.0;
  for (double qv : {3.0, 1.0, 0.1, 1e-3, 0.0}) {
    const std::vector<double> q{qv, qv};
    const double lam = lambda_at(al, 1.0, b, q);
    CHECK(lam <= 0.5 + 1e-15);
    CHECK(lam >= prev);
    prev = lam;
  }
  CHECK(prev == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("root decreases as the delayed gain grows") {
  const FractionalOrder al(0.7);
  const std::vector<double> q{1.0};
  double prev = 1.0;
  for (double bv : {0.0, 0.1, 0.3, 0.6, 0.9}) {
    const std::vector<double> b{bv};
    const double lam = lambda_at(al, 1.0, b, q);
    CHECK(lam <= prev);
    prev = lam;
  }
}

TEST_CASE("lambda_at input checks") {
  const FractionalOrder al(0.5);
  const std::vector<double> one{1.0};
  const std::vector<double> two{1.0, 1.0};
  const std::vector<double> neg{-0.1};
  CHECK_THROWS_AS(lambda_at(al, 1.0, one, one), InfeasibleError);  // a == sum b
  CHECK_THROWS_AS(lambda_at(al, 1.0, two, one), DomainError);
  CHECK_THROWS_AS(lambda_at(al, 1.0, neg, one), DomainError);
  CHECK_THROWS_AS(lambda_at(al, 1.0, std::vector<double>{0.1}, neg), DomainError);
  CHECK_THROWS_AS(lambda_at(al, -1.0, std::vector<double>{0.1}, one), DomainError);
}

TEST_CASE("growing coefficients take the ratio route") {
  // a and b from the column sums of the three-state positive example
  const HalanayInput in = scalar_input(0.45, "0.2 + 0.002*t", {"0.1 + 0.0015*t"}, {"2 - cos(t)^4"}, "0", 2.0);
  const ConditionVerdict v = classify_conditions(in);
  CHECK(v.case_tag == ConditionCase::Ratio);
  CHECK_FALSE(v.a_bounded);
  CHECK(v.a0 == doctest::Approx(0.2));
  CHECK(v.p <= 0.75);
  const HalanayCertificate c = certify(in, 1.2);
  CHECK(c.lambda_star >= 0.075);
  CHECK(c.w0 == 0.0);
  CHECK(c.M == 1.2);
  CHECK(c.residual_max < 1e-12);
  CHECK(to_string(c.verdict.case_tag) == "RATIO");

  // the hand check: h(0.075) <= 0 at every grid point
  const SampledCoefficients s = sample(in);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::vector<double> b{s.b[0][i]};
    const std::vector<double> q{s.q[0][i]};
    CHECK(h_value(in.alpha, s.a[i], b, q, 0.075) <= 0.0);
  }
}

TEST_CASE("bounded coefficients take the gap route and set the offset") {
  HalanayInput in = scalar_input(0.6, "1 + 0.5*sin(t)^2", {"0.2", "0.1"}, {"1", "2 - cos(t)^2"}, "0.01", 2.0);
  const ConditionVerdict v = classify_conditions(in);
  CHECK(v.case_tag == ConditionCase::BoundedGap);
  CHECK(v.sigma == doctest::Approx(0.7));
  CHECK(v.c_star == doctest::Approx(0.01));
  const HalanayCertificate c = certify(in, 1.0);
  CHECK(c.w0 == doctest::Approx(0.01 / 0.7));
  REQUIRE(c.w0_ratio);
  CHECK(*c.w0_ratio == doctest::Approx(0.01 / ((1.0 - 0.3) * 1.0)));
  CHECK(envelope(c, in.alpha, 0.0) == doctest::Approx(1.0 + c.w0));
  CHECK(envelope(c, in.alpha, 1e6) < c.w0 + 0.05);
  CHECK_THROWS_AS(envelope(c, in.alpha, -1.0), DomainError);
}

TEST_CASE("user assertion overrides the boundedness heuristic") {
  HalanayInput in = scalar_input(0.5, "1 + 0.1*t", {"0.5 + 0.1*t"}, {"1"}, "0", 1.0);
  CHECK(classify_conditions(in).case_tag == ConditionCase::Ratio);
  in.a_bounded = true;
  CHECK(classify_conditions(in).case_tag == ConditionCase::BoundedGap);

  HalanayInput flat = scalar_input(0.5, "2", {"1"}, {"1"}, "0", 1.0);
  CHECK(classify_conditions(flat).a_bounded);
  flat.a_bounded = false;
  CHECK(classify_conditions(flat).case_tag == ConditionCase::Ratio);
}

TEST_CASE("no hypothesis holds when the delayed gain catches up") {
  const HalanayInput in = scalar_input(0.5, "1", {"0.5 + 0.01*t"}, {"1"}, "0", 1.0);
  const ConditionVerdict v = classify_conditions(in);
  CHECK(v.case_tag == ConditionCase::None);
  CHECK_FALSE(v.gap_holds);
  CHECK_FALSE(v.ratio_holds);
  CHECK(v.sigma < 0.0);
  CHECK_THROWS_AS(certify(in, 1.0), InfeasibleError);
}

TEST_CASE("envelope is nonincreasing") {
  const HalanayInput in = scalar_input(0.75, "2", {"1"}, {"0.5"}, "0", 1.0);
  const HalanayCertificate c = certify(in, 2.0);
  double prev = INFINITY;
  for (double t = 0.0; t <= 200.0; t += 0.5) {
    const double e = envelope(c, in.alpha, t);
    CHECK(e <= prev);
    prev = e;
  }
}

TEST_CASE("certificate is reproducible") {
  const HalanayInput in = scalar_input(0.45, "0.2 + 0.002*t", {"0.1 + 0.0015*t"}, {"2 - cos(t)^4"}, "0", 2.0);
  const HalanayCertificate c1 = certify(in, 1.0);
  const HalanayCertificate c2 = certify(in, 1.0);
  CHECK(c1.lambda_star == c2.lambda_star);
  CHECK(c1.grid_argmin == c2.grid_argmin);
}

TEST_CASE("sampled coefficient validation") {
  CHECK_THROWS_AS(sample(scalar_input(0.5, "-1", {"0.1"}, {"1"}, "0", 1.0)), InputError);
  CHECK_THROWS_AS(sample(scalar_input(0.5, "1", {"-0.1"}, {"1"}, "0", 1.0)), InputError);
  CHECK_THROWS_AS(sample(scalar_input(0.5, "1", {"0.1"}, {"2"}, "0", 1.0)), InputError);
  CHECK_THROWS_AS(sample(scalar_input(0.5, "1", {"0.1"}, {"1"}, "-0.5", 1.0)), InputError);
  CHECK_THROWS_AS(sample(scalar_input(0.5, "1", {"0.1", "0.2"}, {"1"}, "0", 1.0)), InputError);
  HalanayInput bad_grid = scalar_input(0.5, "1", {"0.1"}, {"1"}, "0", 1.0);
  bad_grid.scan.n_points = 1;
  CHECK_THROWS_AS(sample(bad_grid), InputError);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "orbitsym/geometry.hpp"
#include "orbitsym/jacobi_oracle.hpp"

using namespace orbitsym;

namespace {
constexpr double kPi = 3.14159265358979323846;
const SpaceBackend kCh2 = SpaceBackend::complex_hyperbolic2();
}  // namespace

TEST_CASE("killing norm closed forms") {
  CHECK(killing_norm(SpaceBackend::euclidean(3), {1.7, 0.0}) == 1.0);
  CHECK(killing_norm(SpaceBackend::euclidean(5), {0.0, 0.0}) == 1.0);
  CHECK(killing_norm(SpaceBackend::real_hyperbolic(3), {1.0, 0.0}) ==
        doctest::Approx(std::cosh(1.0)).epsilon(1e-15));
  CHECK(killing_norm(kCh2, {0.0, 0.3}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(killing_norm(kCh2, {0.0, 1.2}) == doctest::Approx(1.0).epsilon(1e-14));
  // t = 1, theta = pi/4: sqrt(cosh^2(2)/2 + cosh^2(1)/2)
  const double expected =
      std::sqrt(0.5 * std::cosh(2.0) * std::cosh(2.0) + 0.5 * std::cosh(1.0) * std::cosh(1.0));
  CHECK(killing_norm(kCh2, {1.0, kPi / 4.0}) == doctest::Approx(expected).epsilon(1e-14));

  CHECK_THROWS_AS(killing_norm(kCh2, {-0.1, 0.0}), DomainError);
  CHECK_THROWS_AS(killing_norm(kCh2, {std::nan(""), 0.0}), DomainError);
}

TEST_CASE("hor_w vanishes in the flat directions and for constant curvature") {
  for (double t : {0.0, 0.5, 1.0, 2.5}) {
    CHECK(hor_w(kCh2, {t, 0.0}).norm() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(hor_w(kCh2, {t, kPi / 2.0}).norm() <= 1e-15);
    CHECK(hor_w(SpaceBackend::euclidean(3), {t, 0.0}).norm() == 0.0);
    CHECK(hor_w(SpaceBackend::real_hyperbolic(4), {t, 0.0}).norm() == 0.0);
  }
}

TEST_CASE("normal inner product closed forms") {
  CHECK(normal_inner(kCh2, {0.0, 0.7}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(normal_inner(kCh2, {1.0, 0.0}) == doctest::Approx(std::cosh(2.0)).epsilon(1e-14));
  CHECK(normal_inner(SpaceBackend::real_hyperbolic(3), {1.0, 0.0}) ==
        doctest::Approx(std::cosh(1.0)).epsilon(1e-14));
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> ut(0.0, 3.0), uth(0.0, kPi / 2.0);
  for (int i = 0; i < 1000; ++i) {
    const RadialCoord p{ut(gen), uth(gen)};
    CHECK(normal_inner(kCh2, p) > 0.0);
  }
}

TEST_CASE("w norm and tilt identities") {
  CHECK(w_norm_sq(kCh2, {0.0, 1.0}) == 0.0);
  CHECK(w_norm_sq(SpaceBackend::euclidean(3), {2.0, 0.0}) == 0.0);
  CHECK(w_norm_sq(kCh2, {1.5, 0.0}) <= 1e-15);
  CHECK(w_norm_sq(kCh2, {1.5, kPi / 2.0}) <= 1e-15);

  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> ut(0.01, 3.0), uth(0.01, kPi / 2.0 - 0.01);
  for (int i = 0; i < 2000; ++i) {
    const RadialCoord p{ut(gen), uth(gen)};
    const double k = killing_norm(kCh2, p);
    const double w2 = w_norm_sq(kCh2, p);
    // the two expressions for the tilt agree
    const double direct = std::sqrt(1.0 + k * k * w2);
    CHECK(direct == doctest::Approx(area_tilt(kCh2, p)).epsilon(1e-12));
    // |Hor W|^2 in the parallel frame equals the closed form
    CHECK(hor_w(kCh2, p).squaredNorm() == doctest::Approx(w2).epsilon(1e-10));
  }
}

TEST_CASE("k >= 1 with equality exactly on the axis") {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> ut(0.0, 4.0), uth(0.0, kPi / 2.0);
  for (int i = 0; i < 10000; ++i) {
    const double t = ut(gen);
    const RadialCoord p{t, uth(gen)};
    for (const SpaceBackend& b :
         {SpaceBackend::euclidean(3), SpaceBackend::real_hyperbolic(3), kCh2}) {
      const double k = killing_norm(b, p);
      CHECK(k >= 1.0 - 1e-15);
      if (b.kind != SpaceKind::Euclidean && t > 1e-3) CHECK(k > 1.0);
    }
    CHECK(killing_norm(kCh2, {0.0, p.theta}) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("radial convexity of k") {
  // nonnegative second differences along radial lines
  const double dt = 1e-3;
  for (double theta : {0.0, 0.4, 0.9, kPi / 2.0}) {
    for (double t = dt; t < 3.0; t += 0.05) {
      const double a = killing_norm(kCh2, {t - dt, theta});
      const double b = killing_norm(kCh2, {t, theta});
      const double c = killing_norm(kCh2, {t + dt, theta});
      CHECK(a + c - 2.0 * b >= -1e-10 * b);
    }
  }
  for (double t = dt; t < 3.0; t += 0.05) {
    const double a = killing_norm(SpaceBackend::real_hyperbolic(3), {t - dt, 0.0});
    const double b = killing_norm(SpaceBackend::real_hyperbolic(3), {t, 0.0});
    const double c = killing_norm(SpaceBackend::real_hyperbolic(3), {t + dt, 0.0});
    CHECK(a + c - 2.0 * b >= -1e-10 * b);
  }
}

TEST_CASE("hor_w decays monotonically past the bulge") {
  for (double theta : {0.2, 0.7, 1.1, 1.4}) {
    double prev = hor_w(kCh2, {2.5, theta}).norm();
    for (double t = 2.6; t <= 6.0; t += 0.1) {
      const double cur = hor_w(kCh2, {t, theta}).norm();
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("reflection equivariance of W") {
  // flipping the X2 frame vector corresponds to theta -> -theta:
  // the X1 component is even, the X2 component odd
  for (double t : {0.3, 1.0, 2.2}) {
    for (double theta : {0.3, 0.8, 1.3}) {
      const Eigen::Vector2d wp = hor_w(kCh2, {t, theta});
      const Eigen::Vector2d wm = hor_w(kCh2, {t, -theta});
      CHECK(wm[0] == doctest::Approx(wp[0]).epsilon(1e-14));
      CHECK(wm[1] == doctest::Approx(-wp[1]).epsilon(1e-14));
    }
  }
}

TEST_CASE("section and orbit metrics") {
  CHECK(section_metric(SpaceBackend::euclidean(4), {0.7, 0.0})
            .isApprox(Eigen::MatrixXd::Identity(3, 3)));
  CHECK(orbit_metric(SpaceBackend::euclidean(3), {0.2, 0.0})
            .isApprox(Eigen::MatrixXd::Identity(2, 2)));

  // constant curvature: orbit metric equals the section metric (w = 0)
  const SpaceBackend rh = SpaceBackend::real_hyperbolic(3);
  CHECK(orbit_metric(rh, {1.1, 0.0}).isApprox(section_metric(rh, {1.1, 0.0})));

  // radial-radial entry is 1, theta = 0 ray keeps the section metric
  const Eigen::MatrixXd sg = section_metric(kCh2, {1.0, 0.4});
  CHECK(sg(0, 0) == 1.0);
  CHECK(sg(1, 1) == doctest::Approx(std::sinh(1.0) * std::sinh(1.0)).epsilon(1e-14));
  CHECK(orbit_metric(kCh2, {1.0, 0.0}).isApprox(section_metric(kCh2, {1.0, 0.0}), 1e-14));

  CHECK_THROWS_AS(section_metric(kCh2, {0.0, 0.4}), DomainError);
}

TEST_CASE("closed forms match the jacobi oracle") {
  // light version of the full verification check: coarser step, fewer angles
  std::vector<double> ts;
  for (int i = 1; i <= 10; ++i) ts.push_back(0.3 * i);
  for (double theta : {0.0, 0.35, 0.8, 1.2, kPi / 2.0}) {
    const auto samples = ch2_oracle(theta, ts, 1e-3);
    for (const auto& s : samples) {
      const RadialCoord p{s.t, theta};
      CHECK(s.k == doctest::Approx(killing_norm(kCh2, p)).epsilon(1e-9));
      CHECK(s.normal_inner == doctest::Approx(normal_inner(kCh2, p)).epsilon(1e-9));
      CHECK((s.hor_w - hor_w(kCh2, p)).norm() <= 1e-9);
      const Eigen::MatrixXd gram = section_metric(kCh2, p);
      CHECK(s.section_gram[1] == doctest::Approx(gram(1, 1)).epsilon(1e-8));
      CHECK(s.section_gram[2] ==
            doctest::Approx(gram(2, 2)).epsilon(1e-8).scale(std::max(gram(2, 2), 1.0)));
      CHECK(s.w_frame ==
            doctest::Approx(section_w(kCh2, p)[2]).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("oracle keeps hor_w orthogonal to the radial direction") {
  std::vector<double> ts{0.5, 1.0, 2.0};
  for (double theta : {0.3, 1.0}) {
    const auto samples = ch2_oracle(theta, ts, 1e-3);
    for (const auto& s : samples) {
      const RadialCoord p{s.t, theta};
      CHECK(std::abs(s.hor_w_radial) <= 1e-10);
      CHECK(s.hor_w.squaredNorm() ==
            doctest::Approx(w_norm_sq(kCh2, p)).epsilon(1e-8).scale(1.0));
    }
  }
}

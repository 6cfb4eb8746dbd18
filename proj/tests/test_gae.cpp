#include <doctest.h>

#include <vector>

#include "arbsim/errors.hpp"
#include "arbsim/gae.hpp"
#include "arbsim/rng.hpp"

using namespace arbsim;

namespace {

// brute-force oracle: explicit summation A_t = sum_k (gamma lambda)^k delta_{t+k},
// truncated at the first done at or after t
std::vector<double> gae_oracle(const std::vector<double>& r, const std::vector<double>& v,
                               const std::vector<uint8_t>& d, double bootstrap, double gamma,
                               double lambda) {
  const std::size_t n = r.size();
  std::vector<double> adv(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    double w = 1.0;
    for (std::size_t k = t; k < n; ++k) {
      const double vnext = k + 1 < n ? v[k + 1] : bootstrap;
      const double delta = r[k] + gamma * (d[k] ? 0.0 : 1.0) * vnext - v[k];
      acc += w * delta;
      if (d[k]) break;
      w *= gamma * lambda;
    }
    adv[t] = acc;
  }
  return adv;
}

}  // namespace

TEST_CASE("lambda = 0 reduces to the one-step TD error") {
  std::vector<double> r{1.0, -0.5, 2.0};
  std::vector<double> v{0.3, 0.1, -0.2};
  std::vector<uint8_t> d{0, 0, 0};
  const GaeResult g = compute_gae(r, v, d, 0.7, 0.99, 0.0);
  for (std::size_t t = 0; t < r.size(); ++t) {
    const double vnext = t + 1 < r.size() ? v[t + 1] : 0.7;
    CHECK(g.advantages[t] == doctest::Approx(r[t] + 0.99 * vnext - v[t]).epsilon(1e-12));
  }
}

TEST_CASE("gamma = lambda = 1 on one episode gives the Monte Carlo residual") {
  std::vector<double> r{1.0, 2.0, 3.0, 4.0};
  std::vector<double> v{0.5, -0.5, 1.0, 0.0};
  std::vector<uint8_t> d{0, 0, 0, 1};  // terminal at the end: no bootstrap
  const GaeResult g = compute_gae(r, v, d, 123.0, 1.0, 1.0);
  for (std::size_t t = 0; t < r.size(); ++t) {
    double tail = 0.0;
    for (std::size_t k = t; k < r.size(); ++k) tail += r[k];
    CHECK(g.advantages[t] == doctest::Approx(tail - v[t]).epsilon(1e-12));
  }
}

TEST_CASE("hand-set length-4 sequence matches the explicit expansion") {
  std::vector<double> r{0.5, -1.0, 2.0, 0.25};
  std::vector<double> v{1.0, 0.5, -0.5, 2.0};
  std::vector<uint8_t> d{0, 1, 0, 0};
  const double bootstrap = -0.75;
  const GaeResult g = compute_gae(r, v, d, bootstrap, 0.99, 0.98);
  const auto oracle = gae_oracle(r, v, d, bootstrap, 0.99, 0.98);
  for (std::size_t t = 0; t < r.size(); ++t)
    CHECK(g.advantages[t] == doctest::Approx(oracle[t]).epsilon(1e-12));
}

TEST_CASE("recursion equals the summation form on random sequences") {
  Rng rng(321);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(10);
    std::vector<double> r(n), v(n);
    std::vector<uint8_t> d(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = rng.uniform(-2, 2);
      v[i] = rng.uniform(-2, 2);
      d[i] = trial % 2 == 0 ? (rng.uniform() < 0.25 ? 1 : 0) : 0;
    }
    const double bootstrap = rng.uniform(-2, 2);
    const GaeResult g = compute_gae(r, v, d, bootstrap, 0.99, 0.98);
    const auto oracle = gae_oracle(r, v, d, bootstrap, 0.99, 0.98);
    for (std::size_t t = 0; t < n; ++t) {
      CHECK(std::abs(g.advantages[t] - oracle[t]) < 1e-10);
      CHECK(g.returns[t] == doctest::Approx(g.advantages[t] + v[t]).epsilon(1e-12));
    }
  }
}

TEST_CASE("ragged inputs raise LengthMismatch") {
  std::vector<double> r{1.0, 2.0};
  std::vector<double> v{0.0};
  std::vector<uint8_t> d{0, 0};
  CHECK_THROWS_AS(compute_gae(r, v, d, 0.0, 0.99, 0.95), LengthMismatch);
}

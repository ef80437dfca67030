#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ccsched/analytics.hpp"
#include "ccsched/capacity.hpp"
#include "ccsched/policies.hpp"
#include "oracles.hpp"

using namespace ccsched;

namespace {

ChannelRealization chan(std::vector<double> h) {
  return {Eigen::Map<Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()))};
}

std::uint32_t mask_of(const std::vector<int>& group) {
  std::uint32_t m = 0;
  for (int i : group) m |= 1u << i;
  return m;
}

Eigen::VectorXd weights(const Eigen::VectorXd& u, double alpha) {
  return alpha == 0 ? Eigen::VectorXd::Ones(u.size()) : Eigen::VectorXd(u.array().pow(-alpha));
}

}  // namespace

TEST_CASE("schedule_baseline examples") {
  const CacheParams p3(0.5, 3);
  auto d = schedule_baseline(chan({3, 2, 1}), p3);
  CHECK(d.selected_group == std::vector<int>{0, 1, 2});
  for (int i = 0; i < 3; ++i) CHECK(d.per_user_rate[i] == doctest::Approx(0.792168).epsilon(1e-6));
  d = schedule_baseline(chan({3, 0, 1}), p3);
  CHECK(d.per_user_rate.sum() == 0.0);
  d = schedule_baseline(chan({4}), CacheParams(0.5, 1));
  CHECK(d.per_user_rate[0] == doctest::Approx(3.218876).epsilon(1e-6));
  CHECK_THROWS_AS(schedule_baseline(chan({1, 2}), p3), DomainError);
}

TEST_CASE("schedule_threshold examples") {
  const CacheParams p(0.5, 3);
  auto d = schedule_threshold(chan({0.5, 2, 3}), 1.0, p);
  CHECK(d.selected_group == std::vector<int>{1, 2});
  CHECK(d.per_user_rate[0] == 0.0);
  CHECK(d.per_user_rate[1] == doctest::Approx(1.464816).epsilon(1e-6));
  CHECK(d.per_user_rate[2] == doctest::Approx(1.464816).epsilon(1e-6));
  d = schedule_threshold(chan({0.5, 0.2, 0.3}), 1.0, p);
  CHECK(d.selected_group.empty());
  CHECK(d.per_user_rate.sum() == 0.0);
  const auto h = chan({0.5, 2, 0});
  const auto a = schedule_threshold(h, 0.0, p);
  const auto b = schedule_baseline(h, p);
  CHECK(a.selected_group == b.selected_group);
  CHECK(a.per_user_rate == b.per_user_rate);
  // the threshold itself is admitted
  CHECK(schedule_threshold(chan({1, 1, 1}), 1.0, p).selected_group.size() == 3);
}

TEST_CASE("schedule_full_csit examples") {
  const CacheParams p(0.5, 3);
  const auto d = schedule_full_csit(chan({3, 2, 0.1}), Eigen::Vector3d::Ones(), 0.0, p);
  CHECK(d.selected_group == std::vector<int>{0, 1});
  const Eigen::VectorXd w = Eigen::Vector3d::Ones();
  const auto h = chan({3, 2, 0.1}).h;
  CHECK(oracle::group_objective(h, w, 0b011, 0.5) == doctest::Approx(2.929633).epsilon(1e-6));
  CHECK(oracle::group_objective(h, w, 0b001, 0.5) == doctest::Approx(2.772589).epsilon(1e-6));
  // 3 log(1.1) / 0.875 = 0.3267778
  CHECK(std::abs(oracle::group_objective(h, w, 0b111, 0.5) - 0.326776) < 5e-6);
  CHECK(oracle::group_objective(h, w, 0b111, 0.5) == doctest::Approx(3 * std::log(1.1) / 0.875).epsilon(1e-14));

  const auto single = schedule_full_csit(chan({0.3}), Eigen::VectorXd::Constant(1, 2.0), 1.0, CacheParams(0.5, 1));
  CHECK(single.selected_group == std::vector<int>{0});
  CHECK_THROWS_AS(schedule_full_csit(chan({1, 2, 3}), Eigen::Vector3d(1, 0, 1), 1.0, p), DomainError);
}

TEST_CASE("full-CSIT selection equals the exhaustive subset maximum") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> U(0, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    const int K = 1 + trial % 12;
    const double alpha = trial % 3;
    const double m = 0.05 + 0.9 * U(gen);
    Eigen::VectorXd h(K), u(K);
    for (int i = 0; i < K; ++i) {
      h[i] = -std::log(1 - U(gen)) * (1 + 9 * U(gen));
      u[i] = 0.05 + 2 * U(gen);
    }
    if (trial % 7 == 0) h[K - 1] = h[0];  // exercise equal gains
    const auto d = schedule_full_csit(ChannelRealization{h}, u, alpha, CacheParams(m, K));
    const Eigen::VectorXd w = weights(u, alpha);
    const double got = oracle::group_objective(h, w, mask_of(d.selected_group), m);
    const double best = oracle::best_group(h, w, m).value;
    CHECK(got >= best * (1 - 1e-13));

    // group structure: the s heaviest users among those at least as strong as the worst
    const int worst = *std::min_element(d.selected_group.begin(), d.selected_group.end(),
                                        [&](int a, int b) { return h[a] < h[b]; });
    std::vector<double> eligible;
    for (int i = 0; i < K; ++i)
      if (i != worst && h[i] >= h[worst]) eligible.push_back(w[i]);
    std::sort(eligible.rbegin(), eligible.rend());
    double top = w[worst];
    for (std::size_t j = 0; j + 1 < d.selected_group.size(); ++j) top += eligible[j];
    double chosen = 0;
    for (int i : d.selected_group) chosen += w[i];
    CHECK(chosen == doctest::Approx(top).epsilon(1e-12));
  }
}

TEST_CASE("full-CSIT selection is invariant to a common scaling of u") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> U(0.1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 2 + trial % 9;
    Eigen::VectorXd h(K), u(K);
    for (int i = 0; i < K; ++i) {
      h[i] = U(gen);
      u[i] = U(gen);
    }
    const CacheParams p(0.3, K);
    for (double alpha : {1.0, 2.0}) {
      const auto a = schedule_full_csit(ChannelRealization{h}, u, alpha, p);
      const auto b = schedule_full_csit(ChannelRealization{h}, u * 4.0, alpha, p);
      CHECK(a.selected_group == b.selected_group);
    }
    const auto z1 = schedule_full_csit(ChannelRealization{h}, u, 0.0, p);
    const auto z2 = schedule_full_csit(ChannelRealization{h}, Eigen::VectorXd::Ones(K), 0.0, p);
    CHECK(z1.selected_group == z2.selected_group);
  }
}

TEST_CASE("schedule_superposition examples") {
  const CacheParams p1(0.5, 1);
  const auto sup = schedule_superposition(chan({2.0}), Eigen::VectorXd::Constant(1, 0.7), 1.0, p1);
  const auto base = schedule_baseline(chan({2.0}), p1);
  CHECK(sup.per_user_rate[0] == doctest::Approx(base.per_user_rate[0]));

  const CacheParams p2(0.5, 2);
  const auto h = chan({4, 1});
  const Eigen::Vector2d u(1, 1);
  const auto d = schedule_superposition(h, u, 1.0, p2);
  const auto sorted = capacity::sort_channel(h);
  const auto reduced = capacity::reduce_weights(Eigen::Vector2d(1, 1), 0.5);
  const auto layers = capacity::layer_rates(sorted, capacity::allocate_power(sorted, reduced));
  const double value = reduced.theta_tilde.dot(layers.C);
  CHECK(value == doctest::Approx(oracle::wsr_grid_max(sorted.h_sorted, oracle::reduced_weights(Eigen::Vector2d(1, 1), 0.5), 1e-4)).epsilon(1e-9));
  CHECK(d.per_user_rate[0] == doctest::Approx(std::log(5.0) / 0.5));

  // alpha = 0 ignores u
  const auto a = schedule_superposition(chan({3, 1, 0.2}), Eigen::Vector3d(0.1, 5, 2), 0.0, CacheParams(0.4, 3));
  const auto b = schedule_superposition(chan({3, 1, 0.2}), Eigen::Vector3d::Ones(), 0.0, CacheParams(0.4, 3));
  CHECK(a.per_user_rate == b.per_user_rate);
}

TEST_CASE("superposition never does worse than the best single group") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> U(0, 1);
  for (int trial = 0; trial < 300; ++trial) {
    const int K = 1 + trial % 8;
    const double m = 0.05 + 0.9 * U(gen);
    Eigen::VectorXd h(K), u(K);
    for (int i = 0; i < K; ++i) {
      h[i] = -std::log(1 - U(gen)) * 10;
      u[i] = 0.1 + U(gen);
    }
    const double alpha = trial % 3;
    const Eigen::VectorXd w = weights(u, alpha);
    const auto sup = schedule_superposition(ChannelRealization{h}, u, alpha, CacheParams(m, K));
    const double best = oracle::best_group(h, w, m).value;
    CHECK(w.dot(sup.per_user_rate) >= best * (1 - 1e-12));
  }
}

TEST_CASE("rate ledger recursion is exact") {
  RateLedger ledger(3, 0.1);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> U(0, 4);
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd before = ledger.u;
    const Eigen::Vector3d r(U(gen), U(gen), 0.0);
    ledger.update(r);
    const Eigen::VectorXd recovered = (t + 1.0) * ledger.u - double(t) * before;
    for (int i = 0; i < 3; ++i) CHECK(recovered[i] == doctest::Approx(r[i]).epsilon(1e-12).scale(1));
  }
  CHECK(ledger.t == 100);
}

TEST_CASE("run_gradient with one user converges to the baseline closed form") {
  const ChannelStats stats(Eigen::VectorXd::Constant(1, 1.0));
  const CacheParams p(0.5, 1);
  for (double alpha : {0.0, 1.0, 2.0}) {
    Rng rng(17, 0);
    const GradientRun run = run_gradient(PolicyKind::full_csit(), 100000, stats, p, alpha, rng);
    CHECK(std::abs(run.ledger.u[0] - 1.192695) < 0.02 * 1.192695);
  }
}

TEST_CASE("run_gradient bookkeeping") {
  const ChannelStats stats(Eigen::Vector3d(1, 2, 3));
  const CacheParams p(0.3, 3);
  SUBCASE("a single slot stores that slot's rate") {
    Rng rng(1, 0), replay(1, 0);
    const GradientRun run = run_gradient(PolicyKind::full_csit(), 1, stats, p, 0.0, rng, 1.0);
    const auto h = sample_channels(stats, replay);
    const auto d = schedule_full_csit(h, Eigen::Vector3d::Ones(), 0.0, p);
    CHECK(run.ledger.u == d.per_user_rate);
    CHECK(run.utility_trace.size() == 1);
  }
  SUBCASE("same seed, same trajectory") {
    for (auto kind : {PolicyKind::full_csit(), PolicyKind::superposition()}) {
      Rng a(4, 2), b(4, 2);
      const auto ra = run_gradient(kind, 2000, stats, p, 1.0, a);
      const auto rb = run_gradient(kind, 2000, stats, p, 1.0, b);
      CHECK(ra.ledger.u == rb.ledger.u);
      CHECK(ra.utility_trace == rb.utility_trace);
      CHECK(ra.group_sizes == rb.group_sizes);
      CHECK((ra.stats.rate - ra.ledger.u).norm() < 1e-12);
    }
  }
  Rng rng(1, 0);
  CHECK_THROWS_AS(run_gradient(PolicyKind::baseline(), 10, stats, p, 0.0, rng), DomainError);
  CHECK_THROWS_AS(run_gradient(PolicyKind::full_csit(), 0, stats, p, 0.0, rng), DomainError);
  CHECK_THROWS_AS(run_gradient(PolicyKind::full_csit(), 10, stats, p, 0.0, rng, 0.0), DomainError);
}

TEST_CASE("run_fixed examples") {
  const CacheParams p(0.5, 1);
  const ChannelStats stats(Eigen::VectorXd::Constant(1, 10.0));
  const RunStats rs = run_fixed(PolicyKind::baseline(), 100000, stats, p, Rng(3, 0));
  const double closed = baseline_rate_closed_form(1, 10.0, 0.5);
  CHECK(closed == doctest::Approx(4.0292850894169).epsilon(1e-12));
  CHECK(std::abs(rs.rate[0] - closed) < 3 * rs.rate_stderr[0]);

  const ChannelStats s3(Eigen::Vector3d(1, 4, 9));
  const CacheParams p3(0.2, 3);
  const RunStats a = run_fixed(PolicyKind::baseline(), 5000, s3, p3, Rng(8, 1));
  const RunStats b = run_fixed(PolicyKind::threshold(0.0), 5000, s3, p3, Rng(8, 1));
  CHECK(a.rate == b.rate);
  const RunStats off = run_fixed(PolicyKind::threshold(1e9), 5000, s3, p3, Rng(8, 1));
  CHECK(off.rate.sum() == 0.0);
  CHECK_THROWS_AS(run_fixed(PolicyKind::full_csit(), 10, s3, p3, Rng(1, 0)), DomainError);
}

TEST_CASE("run_fixed does not depend on the worker count") {
  const ChannelStats stats(Eigen::Vector4d(1, 2, 5, 10));
  const CacheParams p(0.3, 4);
  const RunStats one = run_fixed(PolicyKind::threshold(0.8), 12345, stats, p, Rng(2, 5), 1);
  for (int w : {2, 3, 8, 100}) {
    const RunStats many = run_fixed(PolicyKind::threshold(0.8), 12345, stats, p, Rng(2, 5), w);
    CHECK(many.rate == one.rate);
    CHECK(many.rate_stderr == one.rate_stderr);
  }
  CHECK(one.slots == 12345);
  const RunStats tiny = run_fixed(PolicyKind::baseline(), 3, stats, p, Rng(2, 5));
  CHECK(tiny.batch_means.cols() == 3);
}

TEST_CASE("utility standard error via batch means") {
  const ChannelStats stats(Eigen::Vector2d(2, 8));
  const CacheParams p(0.4, 2);
  const RunStats rs = run_fixed(PolicyKind::baseline(), 64000, stats, p, Rng(6, 0));
  const UtilityEstimate e0 = estimate_utility(rs, 0.0);
  CHECK(e0.value == doctest::Approx(utility_objective(rs.rate, 0.0)));
  // alpha = 0: the utility is the mean rate, so its error is the error of that mean
  const Eigen::VectorXd lin = rs.batch_means.colwise().mean().transpose();
  const double mu = lin.mean();
  const double se = std::sqrt((lin.array() - mu).square().sum() / 63 / 64);
  CHECK(e0.std_error == doctest::Approx(se).epsilon(1e-10));
  CHECK(estimate_utility(rs, 1.0).std_error > 0.0);
}

#include <doctest.h>

#include <cmath>

#include "aggmarket/oracle.hpp"
#include "aggmarket/rng.hpp"
#include "aggmarket/welfare.hpp"

using namespace aggmarket;

namespace {

TaskValues random_task(Rng& rng, std::size_t n) {
  TaskValues task;
  for (std::size_t i = 0; i < n; ++i) {
    task.values.emplace_back(rng.uniform(0.0, 10.0));
  }
  return task;
}

}  // namespace

TEST_SUITE_BEGIN("welfare");

TEST_CASE("swish basics and the welfare-delta curve shape") {
  CHECK(swish(0.0, 1.0) == 0.0);
  // from -4 toward -1 the curve becomes more negative; the strict fall runs
  // until the single minimum near -1.2785
  CHECK(swish(-1.0, 1.0) < swish(-4.0, 1.0));
  double prev = swish(-4.0, 1.0);
  for (double d = -3.9; d <= -1.3 + 1e-12; d += 0.1) {
    double cur = swish(d, 1.0);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(swish(-1.2785, 1.0) < swish(-1.0, 1.0));
  CHECK_THROWS_AS(swish(1.0, 0.0), Error);
}

TEST_CASE("swish numerical derivative changes sign exactly once on x < 0") {
  // dense scan of the central difference of swish over [-40, 0)
  int sign_changes = 0;
  double prev = fd_check([](double x) { return swish(x, 1.0); }, -40.0, 1e-6);
  for (double x = -39.99; x < -1e-3; x += 0.01) {
    double cur = fd_check([](double x2) { return swish(x2, 1.0); }, x, 1e-6);
    if ((prev < 0.0) != (cur < 0.0)) ++sign_changes;
    prev = cur;
  }
  CHECK(sign_changes == 1);
}

TEST_CASE("swish derivative matches the analytic form") {
  double d = -2.0, beta = 1.0;
  double s = detail::sigmoid(d / beta);
  double analytic = s * (1.0 + d * (1.0 - s));
  double numeric = fd_check([&](double x) { return swish(x, beta); }, d, 1e-6);
  CHECK(numeric == doctest::Approx(analytic).epsilon(1e-6));
}

TEST_CASE("add_model_delta worked examples") {
  CHECK(add_model_delta(TaskValues{5.0}, 5.0, ChoiceSpec::btl(2.0)) == 0.0);
  double d = add_model_delta(TaskValues{5.0}, 4.0, ChoiceSpec::btl(1.0));
  CHECK(d == doctest::Approx(-0.269).epsilon(0.005 / 0.269));
  CHECK(d == doctest::Approx(4.7310586 - 5.0).epsilon(1e-6));
  // [5,5] + 8: p_new = 1/(1 + 2 e^-3) = 0.9094430, direct delta 2.7283290
  double d2 = add_model_delta(TaskValues{5.0, 5.0}, 8.0, ChoiceSpec::btl(1.0));
  double direct = task_welfare(TaskValues{5.0, 5.0, 8.0}, ChoiceSpec::btl(1.0)) -
                  task_welfare(TaskValues{5.0, 5.0}, ChoiceSpec::btl(1.0));
  CHECK(d2 == doctest::Approx(direct).epsilon(1e-9));
  CHECK(d2 == doctest::Approx(2.7283290).epsilon(1e-6));
  CHECK_THROWS_AS(
      add_model_delta(TaskValues{5.0}, 4.0, ChoiceSpec::pairwise_monotone(1.0)),
      Error);
}

TEST_CASE("add_model_delta equals the direct welfare difference") {
  Rng rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    TaskValues task = random_task(rng, 1 + rng.integer(5));
    double v = rng.uniform(0.0, 10.0);
    double beta = std::pow(10.0, rng.uniform(-2.0, 2.0));
    ChoiceSpec spec = ChoiceSpec::btl(beta);
    double closed = add_model_delta(task, v, spec);
    double direct =
        task_welfare(task.with_appended(v), spec) - task_welfare(task, spec);
    CHECK(closed == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("pairwise_benefit worked examples") {
  double a[] = {6.0, 8.0};
  double b[] = {7.0, 5.0};
  auto r1 = pairwise_benefit(a, b, 1.0);
  CHECK(r1.beneficial);
  CHECK(r1.delta == doctest::Approx(14.58878 - 14.0).epsilon(1e-4));
  auto r5 = pairwise_benefit(a, b, 5.0);
  CHECK_FALSE(r5.beneficial);
  CHECK(r5.delta == doctest::Approx(13.48680 - 14.0).epsilon(1e-4));
  double short_row[] = {1.0};
  CHECK_THROWS_AS(pairwise_benefit(a, short_row, 1.0), Error);
}

TEST_CASE("pairwise_benefit equals the two-model welfare difference") {
  Rng rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t t_count = 1 + rng.integer(5);
    std::vector<double> a(t_count), b(t_count);
    std::vector<Cell> ca(t_count), cb(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
      a[t] = rng.uniform(0.0, 10.0);
      b[t] = rng.uniform(0.0, 10.0);
      ca[t] = a[t];
      cb[t] = b[t];
    }
    double beta = std::pow(10.0, rng.uniform(-1.0, 1.0));
    auto r = pairwise_benefit(a, b, beta);
    ValueMatrix both = ValueMatrix::from_rows({{"A", ca}, {"B", cb}});
    ValueMatrix alone = ValueMatrix::from_rows({{"A", ca}});
    double direct = total_welfare(both, ChoiceSpec::btl(beta)) -
                    total_welfare(alone, ChoiceSpec::btl(beta));
    CHECK(r.delta == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("a weakly better model always helps a single incumbent") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t t_count = 1 + rng.integer(5);
    std::vector<double> a(t_count), b(t_count);
    double sum_a = 0.0, sum_b = 0.0;
    for (std::size_t t = 0; t < t_count; ++t) {
      a[t] = rng.uniform(0.0, 10.0);
      b[t] = rng.uniform(0.0, 10.0);
      sum_a += a[t];
      sum_b += b[t];
    }
    if (sum_b < sum_a) {
      std::swap(a, b);  // ensure B has the weakly higher total
    }
    double beta = std::pow(10.0, rng.uniform(-2.0, 2.0));
    CHECK(pairwise_benefit(a, b, beta).beneficial);
  }
}

TEST_CASE("welfare_derivative signs on the worked example") {
  CHECK(welfare_derivative(TaskValues{1.0, 5.0}, 0, 1.0) < 0.0);
  CHECK(welfare_derivative(TaskValues{1.0, 5.0}, 1, 1.0) > 0.0);
  // beta above beta* = 3 guarantees a nonnegative derivative
  CHECK(welfare_derivative(TaskValues{1.0, 3.0, 5.0, 2.0}, 3, 4.0) >= 0.0);
  CHECK_THROWS_AS(welfare_derivative(TaskValues{1.0}, 3, 1.0), Error);
  TaskValues abst{std::vector<Cell>{kAbstain, 1.0}};
  CHECK_THROWS_AS(welfare_derivative(abst, 0, 1.0), Error);
}

TEST_CASE("welfare_derivative matches central finite differences") {
  Rng rng(37);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 2 + rng.integer(5);
    TaskValues task = random_task(rng, n);
    std::size_t agent = rng.integer(n);
    double beta = std::pow(10.0, rng.uniform(-1.0, 1.0));
    double closed = welfare_derivative(task, agent, beta);
    double fd = fd_check(
        [&](double x) {
          TaskValues t2 = task;
          *t2.values[agent] = x;
          return task_welfare(t2, ChoiceSpec::btl(beta));
        },
        *task.values[agent], 1e-5);
    CHECK(closed == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("monotone_report: beta_star and the sufficiency bound") {
  auto r = monotone_report(TaskValues{1.0, 3.0, 5.0, 2.0}, 3, 0.5);
  CHECK(r.beta_star == 3.0);
  auto sufficient = monotone_report(TaskValues{1.0, 3.0, 5.0, 2.0}, 3, 3.01);
  CHECK(sufficient.in_monotone_region);
  // the max-holding agent is monotone at every temperature
  for (double beta : {0.05, 0.5, 5.0}) {
    auto top = monotone_report(TaskValues{1.0, 3.0, 5.0, 2.0}, 2, beta);
    CHECK(top.beta_star <= 0.0);
    CHECK(top.in_monotone_region);
  }
}

TEST_CASE("monotone region flag agrees with finite differences on a grid") {
  // the [1, 3, 5, v] family over a (v, beta) grid; region flags must match
  // the finite-difference sign, and above beta* the flag is always on
  for (double v = 0.25; v <= 10.0; v += 0.25) {
    for (double beta : {0.25, 0.5, 1.0, 2.0, 4.0, 6.0}) {
      TaskValues task{1.0, 3.0, 5.0, v};
      auto rep = monotone_report(task, 3, beta);
      double fd = fd_check(
          [&](double x) {
            TaskValues t2 = task;
            *t2.values[3] = x;
            return task_welfare(t2, ChoiceSpec::btl(beta));
          },
          v, 1e-5);
      if (std::abs(fd) > 1e-7) {
        CHECK(rep.in_monotone_region == (fd > 0.0));
      }
      if (beta > rep.beta_star) CHECK(rep.in_monotone_region);
    }
  }
}

TEST_CASE("beta-star sufficiency holds on random instances") {
  Rng rng(41);
  for (int trial = 0; trial < 2000; ++trial) {
    std::size_t n = 2 + rng.integer(5);
    TaskValues task = random_task(rng, n);
    std::size_t agent = rng.integer(n);
    auto probe = monotone_report(task, agent, 1.0);
    double beta = std::max(probe.beta_star, 0.0) + rng.uniform(0.01, 10.0);
    CHECK(welfare_derivative(task, agent, beta) >= -1e-12);
  }
}

TEST_CASE("find_nonmonotone_witness finds a btl witness quickly") {
  auto w = find_nonmonotone_witness(ChoiceSpec::btl(1.0), 2, 1000, 2024);
  REQUIRE(w.has_value());
  // verified independently: the finite difference is negative there
  double fd = fd_check(
      [&](double x) {
        TaskValues t2 = w->values;
        *t2.values[w->agent] = x;
        return task_welfare(t2, ChoiceSpec::btl(w->beta));
      },
      *w->values.values[w->agent], 1e-5);
  CHECK(fd < -1e-9);
  // and the closed-form derivative agrees
  CHECK(welfare_derivative(w->values, w->agent, w->beta) < -1e-9);
}

TEST_CASE("find_nonmonotone_witness is deterministic in the seed") {
  auto a = find_nonmonotone_witness(ChoiceSpec::btl(1.0), 3, 500, 7);
  auto b = find_nonmonotone_witness(ChoiceSpec::btl(1.0), 3, 500, 7);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->agent == b->agent);
  CHECK(a->beta == b->beta);
  for (std::size_t i = 0; i < a->values.size(); ++i) {
    CHECK(*a->values.values[i] == *b->values.values[i]);
  }
}

TEST_CASE("monotone rules admit no witness") {
  CHECK_FALSE(
      find_nonmonotone_witness(ChoiceSpec::pairwise_monotone(1.0), 3, 10000, 5)
          .has_value());
  CHECK_FALSE(find_nonmonotone_witness(ChoiceSpec::optimal(), 2, 2000, 5)
                  .has_value());
  CHECK_FALSE(find_nonmonotone_witness(ChoiceSpec::random(), 2, 2000, 5)
                  .has_value());
}

TEST_CASE("mutual exclusivity probe") {
  auto btl = mutual_exclusivity_probe(ChoiceSpec::btl(1.0), 500, 99);
  CHECK(btl.monotone_violations > 0);

  auto pw = mutual_exclusivity_probe(ChoiceSpec::pairwise_monotone(1.0), 500, 99);
  CHECK(pw.monotone_violations == 0);
  CHECK(pw.entry_harm_violations > 0);

  auto opt = mutual_exclusivity_probe(ChoiceSpec::optimal(), 500, 99);
  CHECK(opt.entry_harm_violations == 0);
}

TEST_CASE("a better model can hurt an established set") {
  ValueMatrix ab = ValueMatrix::from_rows({{"A", {8.0, 5.0}}, {"B", {5.0, 8.0}}});
  ValueMatrix abc = ab.with_row("C", {6.0, 8.1});
  ChoiceSpec spec = ChoiceSpec::btl(2.0);
  // C beats A and B in isolation, yet lowers the set's welfare
  CHECK(abc.total_value(2) > abc.total_value(0));
  CHECK(abc.total_value(2) > abc.total_value(1));
  CHECK(total_welfare(abc, spec) < total_welfare(ab, spec));
}

TEST_SUITE_END();

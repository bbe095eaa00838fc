#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "molcap/channel.hpp"

using namespace molcap;

namespace {
const LigandParams kPaperRates{0.0004, 0.1};
}

TEST_CASE("binomial rows: degenerate and symmetric cases") {
  const auto zero = binomial_row(0.0, 4);
  REQUIRE(zero.size() == 5);
  CHECK(zero[0] == 1.0);
  for (int y = 1; y <= 4; ++y) CHECK(zero[y] == 0.0);

  const auto one = binomial_row(1.0, 3);
  CHECK(one[3] == 1.0);
  CHECK(one[0] == 0.0);

  const auto half = binomial_row(0.5, 2);
  CHECK(half[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(half[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(half[2] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("binomial rows are stochastic with the right mean at scale") {
  const double p = 80.0 / 330.0;
  const auto row = binomial_row(p, 80);
  double sum = 0.0, mean = 0.0;
  for (std::size_t y = 0; y < row.size(); ++y) {
    CHECK(row[y] >= 0.0);
    sum += row[y];
    mean += static_cast<double>(y) * row[y];
  }
  CHECK(std::abs(sum - 1.0) <= 1e-12);
  CHECK(mean == doctest::Approx(80.0 * p).epsilon(1e-9 / (80.0 * p)));
}

TEST_CASE("binomial row rejects bad arguments") {
  CHECK_THROWS_AS(binomial_row(-0.1, 4), std::domain_error);
  CHECK_THROWS_AS(binomial_row(1.1, 4), std::domain_error);
  CHECK_THROWS_AS(binomial_row(0.5, 0), std::invalid_argument);
}

TEST_CASE("scenario config invariants") {
  ScenarioConfig bad;
  bad.types = 3;  // does not divide 16
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = ScenarioConfig{};
  bad.budget = 100.0;  // above peak
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = ScenarioConfig{};
  bad.noise = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  CHECK_NOTHROW(ScenarioConfig{}.validate());
}

TEST_CASE("single-type channel construction") {
  ScenarioConfig config;  // n=16, N=5, peak 80
  SUBCASE("two-point grid keeps both endpoints") {
    const DiscreteChannel ch = build_channel(config, kPaperRates, 2);
    REQUIRE(ch.axes.size() == 1);
    CHECK(ch.axes[0] == std::vector<double>{0.0, 80.0});
    CHECK(ch.output_size == 81);  // n*N receptors
    CHECK_NOTHROW(ch.validate());
  }
  SUBCASE("fine grid rows are stochastic") {
    const DiscreteChannel ch = build_channel(config, kPaperRates, 101);
    CHECK(ch.num_inputs() == 101);
    CHECK_NOTHROW(ch.validate());
    for (std::size_t x = 0; x < ch.num_inputs(); ++x) {
      double sum = 0.0;
      for (std::size_t y = 0; y < ch.output_size; ++y) sum += ch.row(x)[y];
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
  SUBCASE("zero peak collapses the grid") {
    config.peak = 0.0;
    config.budget = 0.0;
    const DiscreteChannel ch = build_channel(config, kPaperRates, 11);
    CHECK(ch.num_inputs() == 1);
    CHECK(ch.row(0)[0] == 1.0);
  }
  SUBCASE("grid needs two points") {
    CHECK_THROWS_AS(build_channel(config, kPaperRates, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("blocking channel construction") {
  ScenarioConfig config;
  config.types = 2;
  BlockingParams rates;
  rates.colonies.assign(2, ColonyRates{{0.0004, 0.1}, {0.0005, 0.01}});

  SUBCASE("joint alphabet size and stochasticity") {
    const DiscreteChannel ch = build_blocking_channel(config, rates, 3);
    CHECK(ch.dims() == 2);
    CHECK(ch.num_inputs() == 9);
    CHECK(ch.output_size == 41 * 41);  // (nN/m + 1)^2
    CHECK_NOTHROW(ch.validate());
    // silent input produces the all-zero output with certainty
    CHECK(ch.row(0)[0] == 1.0);
    // per-dimension peak defaults to peak/m
    CHECK(ch.axes[0].back() == doctest::Approx(40.0));
    CHECK(ch.axes[1].back() == doctest::Approx(40.0));
  }

  SUBCASE("zero blocking rate factorizes the joint law") {
    rates.colonies.assign(2, ColonyRates{{0.0004, 0.1}, {0.0, 0.01}});
    const DiscreteChannel ch = build_blocking_channel(config, rates, 3);
    // row of (x1, x2) must equal the tensor product of single-type rows
    const ScenarioConfig colony{8, 5, 1, 40.0, 20.0, 0.0};
    const DiscreteChannel single = build_channel(colony, kPaperRates, 3);
    for (std::size_t k = 0; k < ch.num_inputs(); ++k) {
      const std::size_t i = k / 3, j = k % 3;
      for (std::size_t y = 0; y < ch.output_size; ++y) {
        const std::size_t y1 = y / 41, y2 = y % 41;
        CHECK(ch.row(k)[y] == doctest::Approx(single.row(i)[y1] *
                                              single.row(j)[y2])
                                  .epsilon(1e-12));
      }
    }
  }

  SUBCASE("argument checks") {
    ScenarioConfig one_type = config;
    one_type.types = 1;
    CHECK_THROWS_AS(build_blocking_channel(one_type, rates, 3),
                    std::invalid_argument);
    BlockingParams short_rates;
    short_rates.colonies.assign(1, rates.colonies[0]);
    CHECK_THROWS_AS(build_blocking_channel(config, short_rates, 3),
                    std::invalid_argument);
  }
}

TEST_CASE("channel validation catches malformed matrices") {
  DiscreteChannel ch;
  ch.axes = {{0.0, 1.0}};
  ch.costs = ch.axes;
  ch.output_size = 2;
  ch.transition = {0.9, 0.1, 0.2, 0.9};  // second row sums to 1.1
  CHECK_THROWS_AS(ch.validate(), std::invalid_argument);
  ch.transition = {0.9, 0.1, 0.1, 0.9};
  CHECK_NOTHROW(ch.validate());
  ch.axes[0] = {1.0, 0.5};  // not increasing
  CHECK_THROWS_AS(ch.validate(), std::invalid_argument);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "diploid/params.hpp"
#include "diploid/population.hpp"
#include "diploid/rng.hpp"

using namespace diploid;

TEST_CASE("defaults validate and reproduce the closed-form constants") {
  ModelParams p;
  AnalysisParams a;
  CHECK_NOTHROW(validate(p, a));

  const Derived d = derived(p, a);
  CHECK(d.nbar_a == doctest::Approx(2.7).epsilon(1e-15));
  CHECK(d.nbar_A == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(d.s_mut_in_res == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(d.s_res_in_mut == doctest::Approx(-0.3).epsilon(1e-15));
  CHECK(d.pfix == doctest::Approx(0.075).epsilon(1e-15));

  // Independently computed reference values for the default parameters.
  CHECK(d.gamma_delta == doctest::Approx(0.0804263565891473).epsilon(1e-14));
  CHECK(d.x_ladder == doctest::Approx(0.988303691203524).epsilon(1e-14));
  CHECK(d.h1 == doctest::Approx(0.041144901610018).epsilon(1e-14));
  CHECK(d.h2 == doctest::Approx(0.0775193798449612).epsilon(1e-14));
  CHECK(d.flow_coeff == doctest::Approx(0.0465116279069767).epsilon(1e-14));
}

TEST_CASE("resolved_rho substitutes the midpoint for rho = 0") {
  ModelParams p;
  AnalysisParams a;
  CHECK(resolved_rho(p, a) == doctest::Approx(0.6).epsilon(1e-15));
  a.rho = 0.25;
  CHECK(resolved_rho(p, a) == 0.25);
}

TEST_CASE("h1 is NaN when the background death rate vanishes") {
  ModelParams p;
  p.D = 0;
  AnalysisParams a;
  const Derived d = derived(p, a);
  CHECK(std::isnan(d.h1));
  CHECK(std::isfinite(d.h2));
}

TEST_CASE("validation names the first violated invariant") {
  AnalysisParams a;
  auto model_throws = [&](auto&& tweak, const char* msg) {
    ModelParams p;
    tweak(p);
    CHECK_THROWS_WITH_AS(validate(p, a), msg, std::invalid_argument);
  };
  model_throws([](ModelParams& p) { p.f = 0; }, "f must be > 0");
  model_throws([](ModelParams& p) { p.D = -1; }, "D must be >= 0");
  model_throws([](ModelParams& p) { p.delta = 0; }, "delta must be > 0");
  model_throws([](ModelParams& p) { p.c = 0; }, "c must be > 0");
  model_throws([](ModelParams& p) { p.K = 0.5; }, "K must be >= 1");
  model_throws([](ModelParams& p) { p.mu = 1.5; }, "mu must be in [0, 1]");
  model_throws([](ModelParams& p) { p.D = 4; }, "f - D must be > 0");
  model_throws([](ModelParams& p) { p.delta = 3.2; },
               "f - D - delta must be > 0");

  ModelParams p;
  auto analysis_throws = [&](auto&& tweak, const char* msg) {
    AnalysisParams bad;
    tweak(bad);
    CHECK_THROWS_WITH_AS(validate(p, bad), msg, std::invalid_argument);
  };
  analysis_throws([](AnalysisParams& x) { x.eps = 0; }, "eps must be > 0");
  analysis_throws([](AnalysisParams& x) { x.eps = 0.15; },
                  "eps must be < delta/2");
  analysis_throws([](AnalysisParams& x) { x.theta = 0.1; },
                  "theta must be > delta/2");
  analysis_throws([](AnalysisParams& x) { x.theta = 0.3; },
                  "theta must be < delta");
  analysis_throws([](AnalysisParams& x) { x.alpha = 0.25; },
                  "alpha must be in (0, 1/4)");
  analysis_throws([](AnalysisParams& x) { x.rho = 1.2; },
                  "rho must be in (0, f*delta)");
  analysis_throws([](AnalysisParams& x) { x.rho = -0.1; },
                  "rho must be in (0, f*delta)");
  analysis_throws([](AnalysisParams& x) { x.delta_fix = 3.0; },
                  "delta_fix must be in (0, nbar_A)");
}

TEST_CASE("counting helpers") {
  const PopCount n{3, 5, 2};
  CHECK(n.total() == 10);
  CHECK(n.mutant_alleles() == 9);
  CHECK(PopCount{0, 0, 0}.total() == 0);

  ModelParams p;
  p.K = 100;
  const PopDensity v = density(n, p);
  CHECK(v.aa == doctest::Approx(0.03).epsilon(1e-15));
  CHECK(v.aA == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(v.AA == doctest::Approx(0.02).epsilon(1e-15));
}

TEST_CASE("allele frequency of A") {
  CHECK(allele_frequency({1, 2, 1}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(allele_frequency({4, 0, 0}) == 0.0);
  CHECK(allele_frequency({0, 0, 7}) == 1.0);
  CHECK(allele_frequency({0, 3, 0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_WITH_AS(allele_frequency({0, 0, 0}),
                       "allele_frequency undefined for empty population",
                       std::domain_error);
}

TEST_CASE("birth rates follow Mendelian random mating") {
  ModelParams p;
  p.f = 1;
  p.D = 0.2;
  p.delta = 0.1;
  p.K = 50;

  // Two aa and two aA parents: allele weights wa = 3, wA = 1, N = 4.
  RateBundle r = rates({2, 2, 0}, p);
  CHECK(r.b_aa == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(r.b_aA == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(r.b_AA == doctest::Approx(0.25).epsilon(1e-15));

  // One aa and one AA parent: heterozygotes dominate the offspring.
  r = rates({1, 0, 1}, p);
  CHECK(r.b_aa == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.b_aA == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.b_AA == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("death rates combine the baseline, the aa penalty, and crowding") {
  ModelParams p;  // f=4, D=1, delta=0.3, c=1, K=1000
  const PopCount n{300, 200, 100};
  const RateBundle r = rates(n, p);
  const double crowd = 1.0 * 600 / 1000;
  CHECK(r.d_aa == doctest::Approx(300 * (1 + 0.3 + crowd)).epsilon(1e-14));
  CHECK(r.d_aA == doctest::Approx(200 * (1 + crowd)).epsilon(1e-14));
  CHECK(r.d_AA == doctest::Approx(100 * (1 + crowd)).epsilon(1e-14));
}

TEST_CASE("the empty population has zero rates") {
  ModelParams p;
  const RateBundle r = rates({0, 0, 0}, p);
  CHECK(r.total() == 0.0);
  CHECK(r.b_aa == 0.0);
  CHECK(r.d_AA == 0.0);
}

TEST_CASE("random states: birth conservation and Hardy-Weinberg shape") {
  ModelParams p;
  p.K = 500;
  Xoshiro256pp rng(123);
  for (int trial = 0; trial < 1000; ++trial) {
    const PopCount n{static_cast<std::int64_t>(rng.next() % 800),
                     static_cast<std::int64_t>(rng.next() % 800),
                     static_cast<std::int64_t>(rng.next() % 800)};
    if (n.total() == 0) continue;
    const RateBundle r = rates(n, p);

    // Total birth rate is f * N regardless of composition.
    CHECK(r.total_birth() ==
          doctest::Approx(p.f * n.total()).epsilon(1e-12));

    // Offspring genotype frequencies are Hardy-Weinberg: b_aA^2 = 4 b_aa b_AA.
    CHECK(r.b_aA * r.b_aA ==
          doctest::Approx(4 * r.b_aa * r.b_AA).epsilon(1e-12));

    // All rates are nonnegative.
    CHECK(r.b_aa >= 0);
    CHECK(r.b_aA >= 0);
    CHECK(r.b_AA >= 0);
    CHECK(r.d_aa >= 0);
    CHECK(r.d_aA >= 0);
    CHECK(r.d_AA >= 0);
  }
}

TEST_CASE("summed rates match the per-genotype bundle") {
  ModelParams p;
  p.K = 300;
  Xoshiro256pp rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const PopCount n{static_cast<std::int64_t>(rng.next() % 500),
                     static_cast<std::int64_t>(rng.next() % 500),
                     static_cast<std::int64_t>(rng.next() % 500)};
    const RateBundle r = rates(n, p);
    const SumMutantRates s = sum_mutant_rates(n, p);

    CHECK(s.b_sigma == doctest::Approx(r.total_birth()).epsilon(1e-9));
    CHECK(s.d_sigma == doctest::Approx(r.total_death()).epsilon(1e-9));

    // Allele bookkeeping: births add one A per aA and two per AA birth,
    // deaths remove them likewise.
    CHECK(s.b_A == doctest::Approx(r.b_aA + 2 * r.b_AA).epsilon(1e-9));
    CHECK(s.d_A == doctest::Approx(r.d_aA + 2 * r.d_AA).epsilon(1e-9));
  }
}

TEST_CASE("replica streams are the documented reseeded generators") {
  const std::uint64_t base = 42;
  for (std::int64_t i : {0, 1, 7, 1000}) {
    Xoshiro256pp a = replica_stream(base, i);
    Xoshiro256pp b(
        mix64(base + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(i + 1)));
    for (int k = 0; k < 16; ++k) CHECK(a.next() == b.next());
  }

  // Distinct replicas get distinct streams.
  Xoshiro256pp s0 = replica_stream(base, 0);
  Xoshiro256pp s1 = replica_stream(base, 1);
  CHECK(s0.next() != s1.next());
}

TEST_CASE("uniform stays in [0,1) and uniform_pos in (0,1]") {
  Xoshiro256pp rng(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rng.uniform_pos();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

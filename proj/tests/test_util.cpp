#include <doctest.h>

#include <atomic>
#include <limits>
#include <set>
#include <stdexcept>

#include "affect/error.hpp"
#include "affect/rng.hpp"
#include "affect/util.hpp"

using namespace affect;

TEST_CASE("format_double round-trips exactly") {
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<int>(rng.index(40)) - 20);
    double back = 0.0;
    REQUIRE(parse_double(format_double(v), back));
    CHECK(back == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("format_fixed never prints negative zero") {
  CHECK(format_fixed(-0.0001, 3) == "0.000");
  CHECK(format_fixed(1.23456, 2) == "1.23");
}

TEST_CASE("parse_double is strict") {
  double v = 0.0;
  CHECK(parse_double(" 1.5 ", v));
  CHECK(v == 1.5);
  CHECK(parse_double("+2", v));
  CHECK(v == 2.0);
  CHECK_FALSE(parse_double("", v));
  CHECK_FALSE(parse_double("1.5x", v));
  CHECK_FALSE(parse_double("abc", v));
}

TEST_CASE("split keeps empty fields") {
  const auto parts = split("a,,b,", ',');
  REQUIRE(parts.size() == 4);
  CHECK(parts[1].empty());
  CHECK(parts[3].empty());
  CHECK(trim("  x \r") == "x");
  CHECK(to_lower("StRoNg") == "strong");
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("parallel_for visits every index once and rethrows the lowest failure") {
  for (unsigned jobs : {1u, 2u, 4u}) {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(100, jobs, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    try {
      parallel_for(50, jobs, [](std::size_t i) {
        if (i == 7 || i == 31) throw std::runtime_error(std::to_string(i));
      });
      FAIL("expected throw");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "7");
    }
  }
}

TEST_CASE("rng streams are deterministic and in range") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(3);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    REQUIRE(r.index(7) < 7);
  }
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
  std::set<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 100; ++s) seeds.insert(derive_seed(9, s));
  CHECK(seeds.size() == 100);
}

TEST_CASE("normal draws have unit variance") {
  Rng r(5);
  double m = 0.0, m2 = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    REQUIRE(std::isfinite(z));
    m += z;
    m2 += z * z;
  }
  m /= n;
  CHECK(std::abs(m) < 0.02);
  CHECK(m2 / n - m * m == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("error codes map to categories and exit statuses") {
  CHECK(category_of(ErrorCode::MalformedHeader) == ErrorCategory::Input);
  CHECK(category_of(ErrorCode::NonFiniteValue) == ErrorCategory::DataValidation);
  CHECK(category_of(ErrorCode::InternalInvariant) == ErrorCategory::Internal);
  CHECK(exit_status(ErrorCategory::Input) == 2);
  CHECK(exit_status(ErrorCategory::DataValidation) == 3);
  CHECK(exit_status(ErrorCategory::Internal) == 4);
  const Error e(ErrorCode::TooFewPeaks, "x");
  CHECK(e.code() == ErrorCode::TooFewPeaks);
  CHECK(to_string(e.code()) == "TooFewPeaks");
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hfl/rng.hpp"

using hfl::RngStream;
using hfl::StreamKind;

TEST_CASE("identical keys replay identical sequences") {
  RngStream a = RngStream::keyed(7, StreamKind::Channel, 3, 9);
  RngStream b = RngStream::keyed(7, StreamKind::Channel, 3, 9);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct key components produce distinct streams") {
  RngStream base = RngStream::keyed(7, StreamKind::Channel, 3, 9);
  RngStream seed = RngStream::keyed(8, StreamKind::Channel, 3, 9);
  RngStream kind = RngStream::keyed(7, StreamKind::SlotNoise, 3, 9);
  RngStream a = RngStream::keyed(7, StreamKind::Channel, 4, 9);
  RngStream b = RngStream::keyed(7, StreamKind::Channel, 3, 10);
  const std::uint64_t x = base.next_u64();
  CHECK(x != seed.next_u64());
  CHECK(x != kind.next_u64());
  CHECK(x != a.next_u64());
  CHECK(x != b.next_u64());
}

TEST_CASE("uniform stays in [0,1) with the right mean") {
  RngStream rng = RngStream::keyed(1, StreamKind::Synthetic);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal moments") {
  RngStream rng = RngStream::keyed(2, StreamKind::Synthetic);
  double sum = 0.0, sumsq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.02);
  CHECK(sumsq / n - mean * mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("complex normal has unit power split evenly") {
  RngStream rng = RngStream::keyed(3, StreamKind::Synthetic);
  double power = 0.0, re_var = 0.0, im_var = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto z = rng.complex_normal();
    power += std::norm(z);
    re_var += z.real() * z.real();
    im_var += z.imag() * z.imag();
  }
  CHECK(power / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(re_var / n == doctest::Approx(0.5).epsilon(0.03));
  CHECK(im_var / n == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("uniform_index covers the range uniformly") {
  RngStream rng = RngStream::keyed(4, StreamKind::Synthetic);
  int counts[10] = {};
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_index(10)];
  for (int c : counts) CHECK(c == doctest::Approx(n / 10).epsilon(0.05));
}

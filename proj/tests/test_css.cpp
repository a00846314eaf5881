#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "dcpd/css.hpp"
#include "dcpd/error.hpp"
#include "oracles.hpp"

using namespace dcpd;

namespace {

constexpr int kSf = 7;
constexpr int kM = 128;

CVec random_window(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVec w(static_cast<std::size_t>(m));
  for (auto& v : w) v = {g(rng), g(rng)};
  return w;
}

double max_abs_excluding(const CVec& v, std::initializer_list<int> skip) {
  double worst = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    bool skipped = false;
    for (const int s : skip) skipped = skipped || static_cast<int>(k) == s;
    if (!skipped) worst = std::max(worst, std::abs(v[k]));
  }
  return worst;
}

}  // namespace

TEST_CASE("chirp table samples match the closed form") {
  const ChirpTable table(kSf);
  CHECK(table.m() == kM);
  CHECK(table.sample(0, 0) == cplx(1.0, 0.0));
  for (int k = 0; k < kM; ++k) {
    for (int i = 0; i < kM; ++i) {
      const auto want = oracle::chirp_sample(k, i, kM);
      const cplx got = table.sample(k, i);
      REQUIRE(std::abs(std::abs(got) - 1.0) < 1e-12);
      REQUIRE(std::abs(got - cplx(want)) < 1e-12);
    }
  }
}

TEST_CASE("chirp k is the basic chirp cyclically shifted by k") {
  const ChirpTable table(kSf);
  const CVec c5 = table.chirp(5);
  const CVec c0 = table.chirp(0);
  for (int i = 0; i < kM; ++i) CHECK(c5[static_cast<std::size_t>(i)] == c0[static_cast<std::size_t>((i + 5) % kM)]);
}

TEST_CASE("spreading factor outside 5..12 is rejected") {
  CHECK_THROWS_AS(ChirpTable(4), Error);
  CHECK_THROWS_AS(ChirpTable(13), Error);
  try {
    ChirpTable bad(3);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
  }
  CHECK(ChirpTable::shared(7) == ChirpTable::shared(7));
}

TEST_CASE("dechirp") {
  const ChirpTable table(kSf);
  SUBCASE("basic chirp becomes a constant") {
    const CVec d = dechirp(table.chirp(0), table);
    for (const auto& v : d) CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-12);
  }
  SUBCASE("chirp k becomes a tone at frequency k") {
    const CVec d = dechirp(table.chirp(9), table);
    for (int i = 1; i < kM; ++i) {
      const cplx step = d[static_cast<std::size_t>(i)] / d[static_cast<std::size_t>(i - 1)];
      CHECK(std::abs(step - std::polar(1.0, 2.0 * std::numbers::pi * 9 / kM)) < 1e-12);
    }
  }
  SUBCASE("length mismatch") {
    CVec shortw(kM - 1);
    try {
      dechirp(shortw, table);
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::dimension);
    }
    CHECK_THROWS_AS(demod_bins(shortw, table), Error);
  }
}

TEST_CASE("demod_bins: every chirp lands on its own bin with magnitude sqrt(M)") {
  const ChirpTable table(kSf);
  for (int k = 0; k < kM; ++k) {
    const auto spec = demod_bins(table.chirp(k), table);
    const auto uk = static_cast<std::size_t>(k);
    REQUIRE(std::abs(spec.corrected[uk] - cplx(std::sqrt(double(kM)), 0.0)) < 1e-9);
    REQUIRE(max_abs_excluding(spec.corrected, {k}) < 1e-9);
    for (std::size_t b = 0; b < spec.values.size(); ++b) {
      REQUIRE(std::abs(std::abs(spec.values[b]) - std::abs(spec.corrected[b])) < 1e-12);
    }
  }
}

TEST_CASE("demod_bins recovers a complex channel gain") {
  const ChirpTable table(kSf);
  const cplx h = 0.5 * std::polar(1.0, std::numbers::pi / 3.0);
  CVec w = table.chirp(17);
  for (auto& v : w) v *= h;
  const auto spec = demod_bins(w, table);
  CHECK(std::abs(spec.corrected[17] - std::sqrt(double(kM)) * h) < 1e-9);
  CHECK(std::abs(std::arg(spec.corrected[17]) - std::arg(h)) < 1e-9);
}

TEST_CASE("demod_bins of zeros is exactly zero") {
  const ChirpTable table(kSf);
  const auto spec = demod_bins(CVec(kM), table);
  for (const auto& v : spec.values) CHECK(v == cplx(0.0, 0.0));
}

TEST_CASE("demod_bins equals a direct dechirped DFT") {
  const ChirpTable table(kSf);
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 5; ++rep) {
    const CVec w = random_window(rng, kM);
    const auto spec = demod_bins(w, table);
    const auto ref = oracle::dechirped_dft(w);
    for (int k = 0; k < kM; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      REQUIRE(std::abs(spec.values[uk] - cplx(ref[uk])) < 1e-10);
      const auto corr = ref[uk] / oracle::bin_rotation(k, kM);
      REQUIRE(std::abs(spec.corrected[uk] - cplx(corr)) < 1e-10);
      REQUIRE(std::abs(demod_bin(w, table, k) - cplx(corr)) < 1e-10);
    }
  }
}

TEST_CASE("unitary transform preserves energy") {
  const ChirpTable table(kSf);
  std::mt19937_64 rng(12);
  const CVec w = random_window(rng, kM);
  const auto spec = demod_bins(w, table);
  double e_time = 0.0, e_freq = 0.0;
  for (const auto& v : w) e_time += std::norm(v);
  for (const auto& v : spec.values) e_freq += std::norm(v);
  CHECK(std::abs(e_freq - e_time) / e_time < 1e-9);
}

TEST_CASE("one-sample slide of a repeated chirp moves the peak up one bin") {
  const ChirpTable table(kSf);
  const CVec c = table.chirp(20);
  CVec slid(c.begin() + 1, c.end());
  slid.push_back(c.front());
  const auto spec = demod_bins(slid, table);
  CHECK(std::abs(std::abs(spec.corrected[21]) - std::sqrt(double(kM))) < 1e-9);
  CHECK(max_abs_excluding(spec.corrected, {21}) < 1e-9);
}

TEST_CASE("window straddling two chirps shows two fragments") {
  // Tail of chirp m1 from index tau, then the head of chirp m2: tones at
  // m1 + tau and m2 + tau with amplitudes proportional to their lengths.
  const ChirpTable table(kSf);
  const int m1 = 10, m2 = 50, tau = 32;
  CVec w;
  const CVec a = table.chirp(m1), b = table.chirp(m2);
  w.insert(w.end(), a.begin() + tau, a.end());
  w.insert(w.end(), b.begin(), b.begin() + tau);
  const auto spec = demod_bins(w, table);
  const double rm = std::sqrt(double(kM));
  CHECK(std::abs(std::abs(spec.values[(m1 + tau) % kM]) - (kM - tau) / rm) < 1e-9);
  CHECK(std::abs(std::abs(spec.values[(m2 + tau) % kM]) - tau / rm) < 1e-9);
}

TEST_CASE("bin phase matches the closed form") {
  for (int k = 0; k < kM; ++k) {
    const auto want = oracle::bin_rotation(k, kM);
    CHECK(std::abs(std::polar(1.0, bin_phase(k, kM)) - cplx(want)) < 1e-12);
  }
}

TEST_CASE("square-law combining") {
  const ChirpTable table(kSf);
  SUBCASE("single antenna") {
    const std::vector<BinSpectrum> s{demod_bins(table.chirp(3), table)};
    const auto p = square_law_combine(s);
    CHECK(p.powers[3] == doctest::Approx(kM).epsilon(1e-12));
    for (std::size_t k = 0; k < p.powers.size(); ++k) {
      if (k != 3) CHECK(p.powers[k] < 1e-18);
    }
  }
  SUBCASE("identical antennas scale linearly") {
    const auto one = demod_bins(table.chirp(3), table);
    const std::vector<BinSpectrum> s(6, one);
    CHECK(square_law_combine(s).powers[3] == doctest::Approx(6.0 * kM).epsilon(1e-12));
  }
  SUBCASE("hand example") {
    BinSpectrum a, b;
    a.corrected = {cplx(1, 1)};
    b.corrected = {cplx(1, -1)};
    const std::vector<BinSpectrum> s{a, b};
    CHECK(square_law_combine(s).powers[0] == 4.0);
  }
  SUBCASE("no antennas") {
    const std::vector<BinSpectrum> none;
    CHECK_THROWS_AS(square_law_combine(none), Error);
  }
}

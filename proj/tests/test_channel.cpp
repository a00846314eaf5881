#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "dcpd/channel.hpp"
#include "dcpd/error.hpp"
#include "oracles.hpp"

using namespace dcpd;

namespace {

constexpr int kM = 128;

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

}  // namespace

TEST_CASE("channel energy has mean and variance L") {
  Rng rng(1);
  constexpr int kL = 8;
  std::vector<double> energy;
  for (int i = 0; i < 100000; ++i) energy.push_back(draw_channel(kL, rng).norm_sq());
  const auto s = oracle::summarize(energy);
  CHECK(std::abs(s.mean - kL) / kL < 0.02);
  CHECK(std::abs(s.var - kL) / kL < 0.05);
}

TEST_CASE("channel draws replay from the seed") {
  Rng a(5), b(5);
  const auto ha = draw_channel(4, a);
  const auto hb = draw_channel(4, b);
  CHECK(ha.gains == hb.gains);
  CHECK(code_of([] {
          Rng r(1);
          draw_channel(0, r);
        }) == ErrorCode::config);
}

TEST_CASE("times of arrival") {
  Rng rng(2);
  SUBCASE("single ED sits at the offset") {
    const auto t = draw_toas(1, kM, rng, 1024);
    REQUIRE(t.size() == 1);
    CHECK(t[0] == 1024);
  }
  SUBCASE("exponential gaps of mean M") {
    const auto t = draw_toas(10001, kM, rng, 0);
    CHECK(std::is_sorted(t.begin(), t.end()));
    CHECK(t.front() >= 0);
    const double mean_gap = static_cast<double>(t.back() - t.front()) / 10000.0;
    CHECK(std::abs(mean_gap - kM) / kM < 0.03);
  }
  SUBCASE("custom mean gap") {
    const auto t = draw_toas(10001, kM, rng, 0, 500.0);
    CHECK(std::abs(static_cast<double>(t.back()) / 10000.0 - 500.0) / 500.0 < 0.03);
  }
}

TEST_CASE("packet layout") {
  const auto table = ChirpTable::shared(7);
  Rng rng(3);
  const auto a = make_assignment(1, 0, 30, kM);
  const CVec x = build_packet(a, 8, 20, rng, *table);
  CHECK(x.size() == 3584);
  for (std::size_t i = kM; i < 8u * kM; ++i) REQUIRE(x[i] == x[i - kM]);
  const auto sym = build_preamble_symbol(a, *table);
  for (std::size_t i = 0; i < static_cast<std::size_t>(kM); ++i) REQUIRE(x[i] == sym[i]);
  // payload chirps have unit power
  double p = 0.0;
  for (std::size_t i = 8u * kM; i < x.size(); ++i) p += std::norm(x[i]);
  CHECK(p / (20.0 * kM) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("payload symbols are uniform") {
  Rng rng(4);
  const auto a = make_assignment(1, 0, 30, kM);
  std::vector<int> counts(kM, 0);
  constexpr int kDraws = 2000;
  for (int i = 0; i < kDraws; ++i) {
    const auto p = draw_packet(a, 8, 20, 0, rng, kM);
    for (const int s : p.payload) ++counts[static_cast<std::size_t>(s)];
  }
  const double expect = kDraws * 20.0 / kM;
  double chi2 = 0.0;
  for (const int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  // 127 degrees of freedom, 0.999 quantile
  CHECK(chi2 < 181.99);
}

TEST_CASE("synthesis") {
  const auto table = ChirpTable::shared(7);
  SUBCASE("nothing in, nothing out") {
    Rng rng(5);
    const auto s = synthesize({}, {}, 0.0, 4, 1000, rng, *table);
    for (const auto& y : s.samples) {
      for (const auto& v : y) REQUIRE(v == cplx(0.0, 0.0));
    }
  }
  SUBCASE("one ED, unit channel, no noise") {
    Rng rng(6);
    const auto pkt = draw_packet(make_assignment(1, 0, 30, kM), 8, 5, 333, rng, kM);
    const ChannelVector h{{cplx(1.0, 0.0)}};
    const auto s = synthesize(std::vector{pkt}, std::vector{h}, 0.0, 1, 333 + pkt.length(kM) + 50, rng, *table);
    const CVec x = build_packet(pkt, *table);
    for (std::size_t i = 0; i < s.length(); ++i) {
      const cplx want = (i >= 333 && i < 333 + x.size()) ? x[i - 333] : cplx(0.0, 0.0);
      REQUIRE(s.samples[0][i] == want);
    }
  }
  SUBCASE("superposition is linear") {
    Rng rng(7);
    const auto p1 = draw_packet(make_assignment(1, 0, 30, kM), 8, 10, 100, rng, kM);
    const auto p2 = draw_packet(make_assignment(2, 8, 24, kM), 8, 10, 700, rng, kM);
    const auto h1 = draw_channel(4, rng);
    const auto h2 = draw_channel(4, rng);
    const std::size_t len = 700 + p2.length(kM);
    const auto both = superpose(std::vector{p1, p2}, std::vector{h1, h2}, 4, len, *table);
    const auto a = superpose(std::vector{p1}, std::vector{h1}, 4, len, *table);
    const auto b = superpose(std::vector{p2}, std::vector{h2}, 4, len, *table);
    for (std::size_t l = 0; l < 4; ++l) {
      for (std::size_t i = 0; i < len; ++i) REQUIRE(std::abs(both.samples[l][i] - a.samples[l][i] - b.samples[l][i]) < 1e-12);
    }
  }
  SUBCASE("overrun") {
    Rng rng(8);
    const auto p = draw_packet(make_assignment(1, 0, 30, kM), 8, 10, 100, rng, kM);
    const auto h = draw_channel(2, rng);
    CHECK(code_of([&] { superpose(std::vector{p}, std::vector{h}, 2, 100 + p.length(kM) - 1, *table); }) ==
          ErrorCode::config);
    CHECK(code_of([&] { superpose(std::vector{p}, std::vector<ChannelVector>{}, 2, 5000, *table); }) ==
          ErrorCode::dimension);
  }
}

TEST_CASE("noise has the configured per-sample variance") {
  const auto table = ChirpTable::shared(7);
  Rng rng(9);
  const auto s = synthesize({}, {}, 2.5, 4, 50000, rng, *table);
  CHECK(s.noise_var == 2.5);
  std::vector<double> re, im;
  for (const auto& y : s.samples) {
    for (const auto& v : y) {
      re.push_back(v.real());
      im.push_back(v.imag());
    }
  }
  const auto sr = oracle::summarize(re), si = oracle::summarize(im);
  CHECK(std::abs(sr.mean) < 3 * sr.se);
  CHECK(std::abs(si.mean) < 3 * si.se);
  CHECK(std::abs(sr.var + si.var - 2.5) / 2.5 < 0.02);
  CHECK(std::abs(oracle::covariance(re, im)) < 3 * oracle::covariance_se(re, im));
}

TEST_CASE("received power over noise matches the SNR") {
  // One ED at 0 dB: per antenna, the active span carries unit signal power.
  const auto table = ChirpTable::shared(7);
  constexpr int kL = 16;
  double ratio_sum = 0.0;
  constexpr int kTrials = 200;
  Rng rng(10);
  for (int t = 0; t < kTrials; ++t) {
    const auto p = draw_packet(make_assignment(1, 0, 30, kM), 8, 20, 0, rng, kM);
    const auto h = draw_channel(kL, rng);
    const auto s = superpose(std::vector{p}, std::vector{h}, kL, p.length(kM), *table);
    double e = 0.0;
    for (const auto& y : s.samples) {
      for (const auto& v : y) e += std::norm(v);
    }
    ratio_sum += e / (static_cast<double>(kL) * static_cast<double>(p.length(kM)));
  }
  CHECK(std::abs(ratio_sum / kTrials - 1.0) < 0.03);
}

TEST_CASE("synthesis equals superposition plus time-major noise") {
  const auto table = ChirpTable::shared(7);
  Rng a(11), b(11);
  const auto p = draw_packet(make_assignment(1, 0, 30, kM), 8, 3, 50, a, kM);
  (void)draw_packet(make_assignment(1, 0, 30, kM), 8, 3, 50, b, kM);
  const auto h = draw_channel(3, a);
  (void)draw_channel(3, b);
  const std::size_t len = 50 + p.length(kM) + 10;
  const auto full = synthesize(std::vector{p}, std::vector{h}, 0.7, 3, len, a, *table);
  auto clean = superpose(std::vector{p}, std::vector{h}, 3, len, *table);
  NoiseSource noise(0.7, b);
  CVec instant(3);
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t l = 0; l < 3; ++l) instant[l] = clean.samples[l][t];
    noise.add(instant);
    for (std::size_t l = 0; l < 3; ++l) REQUIRE(full.samples[l][t] == instant[l]);
  }
}

TEST_CASE("stream file round trip") {
  const auto table = ChirpTable::shared(7);
  Rng rng(12);
  const auto p = draw_packet(make_assignment(1, 0, 30, kM), 8, 2, 10, rng, kM);
  const auto h = draw_channel(2, rng);
  const auto s = synthesize(std::vector{p}, std::vector{h}, 0.1, 2, 10 + p.length(kM), rng, *table);
  const auto path = temp_path("dcpd_test_stream.cniq");
  write_stream(s, path);
  CHECK(std::filesystem::file_size(path) == 32 + 2 * s.length() * 16);
  {
    std::ifstream in(path, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "CNIQ");
  }
  const auto back = read_stream(path);
  CHECK(back.l == 2);
  CHECK(back.m == kM);
  CHECK(back.noise_var == 0.1);
  CHECK(back.samples == s.samples);

  {
    std::ofstream junk(path, std::ios::binary | std::ios::trunc);
    junk << "NOPE and some more bytes to fill the header";
  }
  CHECK(code_of([&] { read_stream(path); }) == ErrorCode::io);
  std::filesystem::remove(path);
  CHECK(code_of([&] { read_stream(path); }) == ErrorCode::io);
  CHECK(code_of([&] { write_stream(s, "/nonexistent-dir/x.cniq"); }) == ErrorCode::io);
}

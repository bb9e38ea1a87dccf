#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "helpers.hpp"
#include "irs/channel.hpp"
#include "irs/rng.hpp"
#include "irs/transforms.hpp"
#include "oracles.hpp"

using namespace irs;

TEST_SUITE("core") {

TEST_CASE("dims validation") {
  CHECK_NOTHROW(SystemDims::make(500, 20, 4096));
  CHECK_THROWS_AS(SystemDims::make(20, 20, 4), DimensionError);
  CHECK_THROWS_AS(SystemDims::make(16, 0, 4), DimensionError);
  CHECK_THROWS_AS(SystemDims::make(16, 4, 12), DimensionError);
  CHECK_THROWS_AS(SystemDims::make(16, 4, 0), DimensionError);
  CHECK(SystemDims::make(500, 20, 16).block_length() == 519);
}

TEST_CASE("configuration accepts only +/-1") {
  CHECK_THROWS_AS(IrsConfiguration({1, 0, -1}), ValidationError);
  CHECK_THROWS_AS(IrsConfiguration({1, 2}), ValidationError);
  IrsConfiguration c({1, -1, 1});
  c.flip(1);
  CHECK(c == IrsConfiguration::all_ones(3));
  CHECK(c.negated() == IrsConfiguration({-1, -1, -1}));
}

TEST_CASE("sylvester entries match the recursive construction") {
  for (std::size_t r = 0; r < 64; ++r)
    for (std::size_t c = 0; c < 64; ++c) REQUIRE(sylvester_entry(r, c) == oracle::hadamard(r, c));
}

TEST_CASE("fwht equals the dense Hadamard product") {
  Rng rng(11);
  for (std::size_t n : {1u, 2u, 4u, 8u, 64u, 256u}) {
    const CVector v = testing::random_vector(rng, n);
    CHECK(testing::rel_err(fwht(v), oracle::hadamard_multiply(v)) < 1e-13);
  }
}

TEST_CASE("fwht twice scales by N") {
  Rng rng(12);
  const CVector v = testing::random_vector(rng, 1024);
  CHECK(testing::rel_err(fwht(fwht(v)) / 1024.0, v) < 1e-14);
}

TEST_CASE("fwht rejects non power of two lengths") {
  CVector v = CVector::Zero(12);
  CHECK_THROWS_AS(fwht(v), DimensionError);
  CHECK_THROWS_AS(fwht(CVector()), DimensionError);
}

TEST_CASE("twiddle reduces its index") {
  CHECK(std::abs(twiddle(7, 5) - twiddle(2, 5)) == 0.0);
  CHECK(std::abs(twiddle(0, 9) - Complex(1.0, 0.0)) == 0.0);
  CHECK(std::abs(twiddle(1, 4) - Complex(0.0, -1.0)) < 1e-16);
}

TEST_CASE("signal DFT is unitary and matches the literal sum") {
  Rng rng(13);
  const auto dims = SystemDims::make(48, 5, 4);
  const CVector x = testing::random_vector(rng, 48);
  const auto X = dft_signal({x}, dims);
  CHECK(testing::rel_err(X.bins, oracle::unitary_dft(x)) < 1e-13);
  CHECK(std::abs(X.bins.squaredNorm() - x.squaredNorm()) / x.squaredNorm() < 1e-13);
  CHECK(testing::rel_err(idft_signal(X, dims).samples, x) < 1e-13);
  CHECK_THROWS_AS(dft_signal({CVector::Zero(47)}, dims), DimensionError);
}

TEST_CASE("channel DFT has no 1/sqrt(K) and matches the literal sum") {
  Rng rng(14);
  const auto dims = SystemDims::make(40, 6, 4);
  const CVector h = testing::random_vector(rng, 6);
  CHECK(testing::rel_err(dft_channel({h}, dims).bins, oracle::channel_dft(h, 40)) < 1e-13);
  CVector impulse = CVector::Zero(6);
  impulse[0] = 1.0;
  CHECK((dft_channel({impulse}, dims).bins - CVector::Ones(40)).norm() < 1e-15);
}

TEST_CASE("delay DFT matrix satisfies F^H F = K I") {
  const CMatrix F = delay_dft_matrix(50, 7);
  CHECK((F.adjoint() * F - 50.0 * CMatrix::Identity(7, 7)).norm() < 1e-11);
}

TEST_CASE("cyclic prefix is the tail of the body") {
  const auto dims = SystemDims::make(8, 3, 2);
  CVector body(8);
  for (int i = 0; i < 8; ++i) body[i] = Complex(i, -i);
  const auto x = add_cyclic_prefix({body}, dims);
  REQUIRE(x.samples.size() == 10);
  CHECK(x.samples[0] == body[6]);
  CHECK(x.samples[1] == body[7]);
  CHECK(x.samples.tail(8) == body);
}

TEST_CASE("M = 1 has no prefix") {
  const auto dims = SystemDims::make(4, 1, 1);
  const CVector body = CVector::Ones(4);
  CHECK(add_cyclic_prefix({body}, dims).samples.size() == 4);
}

TEST_CASE("time-domain block equals the per-subcarrier product model") {
  Rng rng(15);
  const auto dims = SystemDims::make(64, 8, 4);
  for (int trial = 0; trial < 10; ++trial) {
    const CVector h = testing::random_vector(rng, dims.M);
    const CVector xbar = testing::random_vector(rng, dims.K);
    const auto block = make_ofdm_block({xbar}, dims);
    const auto z = convolve_block({h}, block, dims);
    const auto zbar = dft_signal(z, dims);
    const auto model = apply_frequency_model(dft_channel({h}, dims), {xbar}, {CVector::Zero(64)});
    CHECK(testing::rel_err(zbar.bins, model.bins) < 1e-12);
    const CVector literal = oracle::received_body(h, oracle::unitary_idft(xbar));
    CHECK(testing::rel_err(z.samples, literal) < 1e-12);
  }
}

TEST_CASE("compose_channel is the affine combination") {
  Rng rng(16);
  const auto dims = SystemDims::make(16, 4, 8);
  const auto model = testing::random_model(rng, dims);
  const auto theta = random_configuration(rng, 8);
  const std::vector<std::int8_t> states(theta.states().begin(), theta.states().end());
  CHECK(testing::rel_err(compose_channel(model, theta).taps, oracle::compose(model.direct, model.elements, states)) <
        1e-14);
  CHECK_THROWS_AS(compose_channel(model, IrsConfiguration::all_ones(4)), DimensionError);
}

TEST_CASE("element frequency responses are row-wise channel DFTs") {
  Rng rng(17);
  const auto dims = SystemDims::make(20, 5, 4);
  const auto model = testing::random_model(rng, dims);
  const CMatrix G = element_frequency_responses(model, dims);
  for (Eigen::Index n = 0; n < 4; ++n)
    CHECK(testing::rel_err(G.row(n).transpose(), oracle::channel_dft(model.elements.row(n).transpose(), 20)) < 1e-13);
}

TEST_CASE("achievable rate matches the literal formula") {
  Rng rng(18);
  const auto dims = SystemDims::make(30, 4, 2);
  const CVector hbar = testing::random_vector(rng, 30);
  CHECK(achievable_rate(hbar, dims, 3.5, 2e6) == doctest::Approx(oracle::rate(hbar, 4, 3.5, 2e6)).epsilon(1e-14));
  CHECK(achievable_rate(CVector::Zero(30), dims, 3.5, 2e6) == 0.0);
  CHECK_THROWS_AS(achievable_rate(CVector::Zero(29), dims, 1.0, 1.0), DimensionError);
}

TEST_CASE("rate grows with SNR") {
  Rng rng(19);
  const auto dims = SystemDims::make(30, 4, 2);
  const CVector hbar = testing::random_vector(rng, 30);
  double last = -1.0;
  for (double s : {0.0, 0.1, 1.0, 10.0, 100.0}) {
    const double r = achievable_rate(hbar, dims, s, 1e6);
    CHECK(r > last);
    last = r;
  }
}

TEST_CASE("stream seeds separate tags and indices") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t tag : {stream_tag::noise, stream_tag::calibration, stream_tag::random_baseline})
    for (std::uint64_t i = 0; i < 100; ++i) seen.insert(stream_seed(7, tag, i));
  CHECK(seen.size() == 300);
  CHECK(stream_seed(7, stream_tag::noise, 3) == stream_seed(7, stream_tag::noise, 3));
  CHECK(stream_seed(7, stream_tag::noise, 3) != stream_seed(8, stream_tag::noise, 3));
}

TEST_CASE("complex gaussian has the requested power") {
  Rng rng(20);
  double power = 0.0, re2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const Complex z = complex_gaussian(rng, 2.0);
    power += std::norm(z);
    re2 += z.real() * z.real();
  }
  CHECK(power / n == doctest::Approx(2.0).epsilon(0.02));
  CHECK(re2 / n == doctest::Approx(1.0).epsilon(0.02));
}

}  // TEST_SUITE

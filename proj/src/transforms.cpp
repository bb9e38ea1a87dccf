#include "irs/transforms.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace irs {

void SystemDims::validate() const {
  if (M < 1) throw DimensionError("M must be at least 1");
  if (K <= M) {
    std::ostringstream os;
    os << "need K > M, got K=" << K << " M=" << M;
    throw DimensionError(os.str());
  }
  if (!is_power_of_two(N)) {
    std::ostringstream os;
    os << "N must be a power of two, got " << N;
    throw DimensionError(os.str());
  }
}

SystemDims SystemDims::make(std::size_t K, std::size_t M, std::size_t N) {
  SystemDims d{K, M, N};
  d.validate();
  return d;
}

std::string to_string(const SystemDims& dims) {
  std::ostringstream os;
  os << "K=" << dims.K << " M=" << dims.M << " N=" << dims.N;
  return os.str();
}

IrsConfiguration::IrsConfiguration(std::vector<std::int8_t> states) : states_(std::move(states)) {
  for (std::size_t n = 0; n < states_.size(); ++n) {
    if (states_[n] != 1 && states_[n] != -1) {
      throw ValidationError("configuration entry " + std::to_string(n) + " is " + std::to_string(states_[n]) +
                            ", expected +1 or -1");
    }
  }
}

IrsConfiguration IrsConfiguration::all_ones(std::size_t n) {
  return IrsConfiguration(std::vector<std::int8_t>(n, 1));
}

IrsConfiguration IrsConfiguration::negated() const {
  IrsConfiguration out = *this;
  for (auto& s : out.states_) s = static_cast<std::int8_t>(-s);
  return out;
}

std::int8_t sylvester_entry(std::size_t row, std::size_t col) {
  return (std::popcount(row & col) & 1) ? std::int8_t{-1} : std::int8_t{1};
}

void fwht_inplace(std::span<Complex> v) {
  const std::size_t n = v.size();
  if (!is_power_of_two(n)) throw DimensionError("fwht length " + std::to_string(n) + " is not a power of two");
  for (std::size_t half = 1; half < n; half <<= 1) {
    for (std::size_t base = 0; base < n; base += 2 * half) {
      for (std::size_t i = base; i < base + half; ++i) {
        const Complex a = v[i];
        const Complex b = v[i + half];
        v[i] = a + b;
        v[i + half] = a - b;
      }
    }
  }
}

CVector fwht(const CVector& v) {
  CVector out = v;
  fwht_inplace(std::span<Complex>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

Complex twiddle(std::size_t m, std::size_t K) {
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(m % K) / static_cast<double>(K);
  return {std::cos(angle), std::sin(angle)};
}

namespace {

CVector unitary_dft(const CVector& x, bool inverse) {
  const auto K = static_cast<std::size_t>(x.size());
  CVector table(static_cast<Eigen::Index>(K));
  for (std::size_t m = 0; m < K; ++m) table[static_cast<Eigen::Index>(m)] = twiddle(m, K);
  CVector out(static_cast<Eigen::Index>(K));
  const double scale = 1.0 / std::sqrt(static_cast<double>(K));
  for (std::size_t nu = 0; nu < K; ++nu) {
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < K; ++k) {
      const Complex w = table[static_cast<Eigen::Index>((k * nu) % K)];
      acc += x[static_cast<Eigen::Index>(k)] * (inverse ? std::conj(w) : w);
    }
    out[static_cast<Eigen::Index>(nu)] = acc * scale;
  }
  return out;
}

}  // namespace

FrequencySignal dft_signal(const TimeSignal& s, const SystemDims& dims) {
  if (static_cast<std::size_t>(s.samples.size()) != dims.K) {
    throw DimensionError("dft_signal expects " + std::to_string(dims.K) + " samples, got " +
                         std::to_string(s.samples.size()));
  }
  return {unitary_dft(s.samples, false)};
}

TimeSignal idft_signal(const FrequencySignal& s, const SystemDims& dims) {
  if (static_cast<std::size_t>(s.bins.size()) != dims.K) {
    throw DimensionError("idft_signal expects " + std::to_string(dims.K) + " bins, got " +
                         std::to_string(s.bins.size()));
  }
  return {unitary_dft(s.bins, true)};
}

CMatrix delay_dft_matrix(std::size_t K, std::size_t M) {
  CMatrix F(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(M));
  for (std::size_t l = 0; l < M; ++l)
    for (std::size_t nu = 0; nu < K; ++nu)
      F(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(l)) = twiddle(l * nu, K);
  return F;
}

ChannelFrequencyResponse dft_channel(const ChannelImpulseResponse& h, const SystemDims& dims) {
  if (static_cast<std::size_t>(h.taps.size()) != dims.M) {
    throw DimensionError("impulse response has " + std::to_string(h.taps.size()) + " taps, expected " +
                         std::to_string(dims.M));
  }
  if (dims.M >= dims.K) throw DimensionError("dft_channel needs M < K");
  CVector bins(static_cast<Eigen::Index>(dims.K));
  for (std::size_t nu = 0; nu < dims.K; ++nu) {
    Complex acc{0.0, 0.0};
    for (std::size_t l = 0; l < dims.M; ++l) acc += h.taps[static_cast<Eigen::Index>(l)] * twiddle(l * nu, dims.K);
    bins[static_cast<Eigen::Index>(nu)] = acc;
  }
  return {bins};
}

}  // namespace irs

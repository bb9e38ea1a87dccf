#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace irs {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a configuration would flip the element whose response is
// confounded with the direct path.
struct AliasingError : std::logic_error {
  using std::logic_error::logic_error;
};

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Subcarriers K, channel taps M, surface elements N.
struct SystemDims {
  std::size_t K = 0;
  std::size_t M = 0;
  std::size_t N = 0;

  /// Throws DimensionError unless K > M >= 1 and N is a power of two.
  void validate() const;
  static SystemDims make(std::size_t K, std::size_t M, std::size_t N);

  /// Time-domain samples in one OFDM block including the cyclic prefix.
  std::size_t block_length() const { return K + M - 1; }

  bool operator==(const SystemDims&) const = default;
};

std::string to_string(const SystemDims& dims);

struct ChannelImpulseResponse {
  CVector taps;
};

struct ChannelFrequencyResponse {
  CVector bins;
};

struct FrequencySignal {
  CVector bins;
};

struct TimeSignal {
  CVector samples;
};

/// Element states over {-1, +1}.
class IrsConfiguration {
 public:
  IrsConfiguration() = default;
  /// Throws ValidationError naming the first entry outside {-1, +1}.
  explicit IrsConfiguration(std::vector<std::int8_t> states);

  static IrsConfiguration all_ones(std::size_t n);

  std::size_t size() const { return states_.size(); }
  std::int8_t operator[](std::size_t n) const { return states_[n]; }
  std::span<const std::int8_t> states() const { return states_; }

  void flip(std::size_t n) { states_[n] = static_cast<std::int8_t>(-states_[n]); }
  IrsConfiguration negated() const;

  bool operator==(const IrsConfiguration&) const = default;

 private:
  std::vector<std::int8_t> states_;
};

/// h_theta = direct + sum_n theta_n * elements.row(n), in the tap domain.
struct AffineChannelModel {
  CVector direct;    // M taps
  CMatrix elements;  // N x M, row n is element n in state +1

  std::size_t num_elements() const { return static_cast<std::size_t>(elements.rows()); }
  std::size_t num_taps() const { return static_cast<std::size_t>(direct.size()); }
};

/// Dense column-major matrix of int8 entries, used for +/-1 pilot and
/// submission matrices.
struct SignMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int8_t> values;

  SignMatrix() = default;
  SignMatrix(std::size_t r, std::size_t c, std::int8_t fill = 1) : rows(r), cols(c), values(r * c, fill) {}

  std::int8_t& operator()(std::size_t r, std::size_t c) { return values[c * rows + r]; }
  std::int8_t operator()(std::size_t r, std::size_t c) const { return values[c * rows + r]; }
  std::span<const std::int8_t> column(std::size_t c) const { return {values.data() + c * rows, rows}; }

  bool operator==(const SignMatrix&) const = default;
};

}  // namespace irs

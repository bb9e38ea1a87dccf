#pragma once

// IRSD1 container.
//
//   offset 0   "IRSD1" (5 bytes)
//   offset 5   header length L, uint32 little-endian
//   offset 9   L bytes of UTF-8 JSON:
//                {"format":"IRSD1","role":...,"dims":{"K","M","N"},
//                 "arrays":[{"name","shape","dtype","offset","bytes"}...],
//                 "meta":{...}}
//   offset 9+L payload; array offsets are relative to the payload start and
//              arrays appear in manifest order, column-major, little-endian.
//              c128 is an interleaved (real, imag) pair of float64.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "irs/types.hpp"

namespace irs {

enum class Dtype { c128, i8, f64 };

std::string_view to_string(Dtype dtype);
std::size_t element_size(Dtype dtype);

inline constexpr std::string_view kMagic = "IRSD1";
inline constexpr std::size_t kPreambleSize = 9;

struct DatasetArray {
  std::string name;
  std::vector<std::size_t> shape;
  std::variant<std::vector<Complex>, std::vector<std::int8_t>, std::vector<double>> data;

  Dtype dtype() const;
  std::size_t element_count() const;
};

struct DatasetFile {
  std::string role;  // scenario | pilots | estimate | submission | report
  SystemDims dims;
  nlohmann::json meta = nlohmann::json::object();
  std::vector<DatasetArray> arrays;

  void add(std::string name, std::vector<std::size_t> shape, std::vector<Complex> data);
  void add(std::string name, std::vector<std::size_t> shape, std::vector<std::int8_t> data);
  void add(std::string name, std::vector<std::size_t> shape, std::vector<double> data);

  bool has(std::string_view name) const;
  /// Throws FormatError when the array is missing or has another dtype.
  const DatasetArray& array(std::string_view name) const;
  const std::vector<Complex>& complex_data(std::string_view name) const;
  const std::vector<std::int8_t>& int8_data(std::string_view name) const;
  const std::vector<double>& real_data(std::string_view name) const;
};

bool is_known_role(std::string_view role);

/// Serializes to the exact on-disk byte layout.
std::string encode(const DatasetFile& file);

struct DecodeOptions {
  // Reject i8 arrays holding anything but +1/-1. Submission validation turns
  // this off so it can report every bad coordinate itself.
  bool require_signs = true;
};

/// Parses and validates the container; FormatError messages name the byte
/// offset of the first problem.
DatasetFile decode(std::string_view bytes, const DecodeOptions& options = {});

/// Atomic write: temporary file in the same directory, then rename.
void write_bytes_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_bytes(const std::filesystem::path& path);

void write_dataset(const std::filesystem::path& path, const DatasetFile& file);
DatasetFile read_dataset(const std::filesystem::path& path, const DecodeOptions& options = {});

/// 64-bit FNV-1a digest as 16 hex digits.
std::string digest_hex(std::string_view bytes);

/// digest_hex of a file's contents, streamed.
std::string digest_file(const std::filesystem::path& path);

}  // namespace irs

#include "irs/dataset_file.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace irs {

namespace {

constexpr std::size_t kChunk = 1 << 20;

FormatError format_error(std::uint64_t offset, const std::string& what) {
  return FormatError("byte " + std::to_string(offset) + ": " + what);
}

template <typename T>
void byteswap_in_place(T* data, std::size_t count) {
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto* bytes = reinterpret_cast<unsigned char*>(data);
    for (std::size_t i = 0; i < count; ++i) std::reverse(bytes + i * sizeof(T), bytes + (i + 1) * sizeof(T));
  } else {
    (void)data;
    (void)count;
  }
}

// Writes `count` scalars of type T as little-endian bytes.
template <typename T>
void write_scalars(std::ostream& os, const T* data, std::size_t count) {
  if constexpr (std::endian::native == std::endian::little || sizeof(T) == 1) {
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
  } else {
    std::vector<T> buf;
    for (std::size_t i = 0; i < count; i += kChunk) {
      const std::size_t n = std::min(kChunk, count - i);
      buf.assign(data + i, data + i + n);
      byteswap_in_place(buf.data(), n);
      os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n * sizeof(T)));
    }
  }
}

Dtype parse_dtype(const std::string& s, std::uint64_t offset) {
  if (s == "c128") return Dtype::c128;
  if (s == "i8") return Dtype::i8;
  if (s == "f64") return Dtype::f64;
  throw format_error(offset, "unknown dtype '" + s + "'");
}

std::size_t product(const std::vector<std::size_t>& shape) {
  std::size_t p = 1;
  for (auto s : shape) p *= s;
  return p;
}

nlohmann::json build_header(const DatasetFile& file) {
  nlohmann::json header;
  header["format"] = std::string(kMagic);
  header["role"] = file.role;
  header["dims"] = {{"K", file.dims.K}, {"M", file.dims.M}, {"N", file.dims.N}};
  header["meta"] = file.meta;
  nlohmann::json manifest = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& a : file.arrays) {
    if (a.element_count() != product(a.shape))
      throw ValidationError("array '" + a.name + "' has " + std::to_string(a.element_count()) +
                            " values but its shape holds " + std::to_string(product(a.shape)));
    const std::uint64_t bytes = a.element_count() * element_size(a.dtype());
    manifest.push_back({{"name", a.name},
                        {"shape", a.shape},
                        {"dtype", std::string(to_string(a.dtype()))},
                        {"offset", offset},
                        {"bytes", bytes}});
    offset += bytes;
  }
  header["arrays"] = manifest;
  return header;
}

void write_to(std::ostream& os, const DatasetFile& file) {
  if (!is_known_role(file.role)) throw ValidationError("unknown dataset role '" + file.role + "'");
  const std::string header = build_header(file).dump();
  os.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
  const auto len = static_cast<std::uint32_t>(header.size());
  const std::array<unsigned char, 4> len_bytes{static_cast<unsigned char>(len & 0xff),
                                               static_cast<unsigned char>((len >> 8) & 0xff),
                                               static_cast<unsigned char>((len >> 16) & 0xff),
                                               static_cast<unsigned char>((len >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(len_bytes.data()), 4);
  os.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const auto& a : file.arrays) {
    std::visit(
        [&](const auto& v) {
          using T = typename std::decay_t<decltype(v)>::value_type;
          if constexpr (std::is_same_v<T, Complex>) {
            write_scalars(os, reinterpret_cast<const double*>(v.data()), 2 * v.size());
          } else {
            write_scalars(os, v.data(), v.size());
          }
        },
        a.data);
  }
}

void read_exact(std::istream& is, char* out, std::size_t n, std::uint64_t offset, const char* what) {
  is.read(out, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) throw format_error(offset, std::string("truncated ") + what);
}

DatasetFile decode_stream(std::istream& is, std::uint64_t total, const DecodeOptions& options) {
  if (total < kPreambleSize) throw format_error(0, "file shorter than the 9-byte preamble");
  std::array<char, kPreambleSize> pre{};
  read_exact(is, pre.data(), pre.size(), 0, "preamble");
  if (std::string_view(pre.data(), kMagic.size()) != kMagic) throw format_error(0, "bad magic, expected IRSD1");
  const auto* lb = reinterpret_cast<const unsigned char*>(pre.data() + 5);
  const std::uint64_t header_len = std::uint64_t{lb[0]} | (std::uint64_t{lb[1]} << 8) | (std::uint64_t{lb[2]} << 16) |
                                   (std::uint64_t{lb[3]} << 24);
  if (kPreambleSize + header_len > total)
    throw format_error(5, "header length " + std::to_string(header_len) + " runs past end of file");
  std::string header_text(header_len, '\0');
  read_exact(is, header_text.data(), header_len, kPreambleSize, "header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw format_error(kPreambleSize + (e.byte > 0 ? e.byte - 1 : 0), std::string("header is not valid JSON: ") + e.what());
  }

  DatasetFile file;
  const std::uint64_t hoff = kPreambleSize;
  try {
    if (!header.is_object() || header.value("format", "") != kMagic) throw format_error(hoff, "header format is not IRSD1");
    file.role = header.at("role").get<std::string>();
    if (!is_known_role(file.role)) throw format_error(hoff, "unknown role '" + file.role + "'");
    const auto& dims = header.at("dims");
    file.dims = {dims.at("K").get<std::size_t>(), dims.at("M").get<std::size_t>(), dims.at("N").get<std::size_t>()};
    if (header.contains("meta")) file.meta = header.at("meta");
  } catch (const nlohmann::json::exception& e) {
    throw format_error(hoff, std::string("malformed header: ") + e.what());
  }
  try {
    file.dims.validate();
  } catch (const DimensionError& e) {
    throw ValidationError(std::string("header dims: ") + e.what());
  }

  const std::uint64_t payload_start = kPreambleSize + header_len;
  const std::uint64_t payload_size = total - payload_start;
  std::uint64_t cursor = 0;
  const auto& manifest = header.contains("arrays") ? header.at("arrays") : nlohmann::json::array();
  if (!manifest.is_array()) throw format_error(hoff, "manifest is not an array");
  for (const auto& entry : manifest) {
    DatasetArray a;
    Dtype dtype{};
    std::uint64_t offset = 0, bytes = 0;
    try {
      a.name = entry.at("name").get<std::string>();
      a.shape = entry.at("shape").get<std::vector<std::size_t>>();
      dtype = parse_dtype(entry.at("dtype").get<std::string>(), hoff);
      offset = entry.at("offset").get<std::uint64_t>();
      bytes = entry.at("bytes").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw format_error(hoff, std::string("malformed manifest entry: ") + e.what());
    }
    const std::size_t count = product(a.shape);
    if (bytes != count * element_size(dtype))
      throw format_error(payload_start + offset, "array '" + a.name + "' declares " + std::to_string(bytes) +
                                                     " bytes but its shape needs " +
                                                     std::to_string(count * element_size(dtype)));
    if (offset < cursor)
      throw format_error(payload_start + offset, "array '" + a.name + "' overlaps the previous array");
    if (offset + bytes > payload_size)
      throw format_error(payload_start + offset, "array '" + a.name + "' runs past end of file");
    if (offset > cursor) is.ignore(static_cast<std::streamsize>(offset - cursor));
    const std::uint64_t abs = payload_start + offset;
    switch (dtype) {
      case Dtype::c128: {
        std::vector<Complex> v(count);
        read_exact(is, reinterpret_cast<char*>(v.data()), bytes, abs, "array payload");
        byteswap_in_place(reinterpret_cast<double*>(v.data()), 2 * count);
        a.data = std::move(v);
        break;
      }
      case Dtype::i8: {
        std::vector<std::int8_t> v(count);
        read_exact(is, reinterpret_cast<char*>(v.data()), bytes, abs, "array payload");
        for (std::size_t i = 0; options.require_signs && i < count; ++i)
          if (v[i] != 1 && v[i] != -1)
            throw format_error(abs + i, "array '" + a.name + "' holds " + std::to_string(v[i]) + ", expected +1/-1");
        a.data = std::move(v);
        break;
      }
      case Dtype::f64: {
        std::vector<double> v(count);
        read_exact(is, reinterpret_cast<char*>(v.data()), bytes, abs, "array payload");
        byteswap_in_place(v.data(), count);
        a.data = std::move(v);
        break;
      }
    }
    cursor = offset + bytes;
    file.arrays.push_back(std::move(a));
  }
  if (cursor != payload_size) throw format_error(payload_start + cursor, "unexpected trailing bytes");
  return file;
}

}  // namespace

std::string_view to_string(Dtype dtype) {
  switch (dtype) {
    case Dtype::c128: return "c128";
    case Dtype::i8: return "i8";
    case Dtype::f64: return "f64";
  }
  return "?";
}

std::size_t element_size(Dtype dtype) {
  switch (dtype) {
    case Dtype::c128: return 16;
    case Dtype::i8: return 1;
    case Dtype::f64: return 8;
  }
  return 0;
}

Dtype DatasetArray::dtype() const {
  return static_cast<Dtype>(data.index());
}

std::size_t DatasetArray::element_count() const {
  return std::visit([](const auto& v) { return v.size(); }, data);
}

void DatasetFile::add(std::string name, std::vector<std::size_t> shape, std::vector<Complex> data) {
  arrays.push_back({std::move(name), std::move(shape), std::move(data)});
}
void DatasetFile::add(std::string name, std::vector<std::size_t> shape, std::vector<std::int8_t> data) {
  arrays.push_back({std::move(name), std::move(shape), std::move(data)});
}
void DatasetFile::add(std::string name, std::vector<std::size_t> shape, std::vector<double> data) {
  arrays.push_back({std::move(name), std::move(shape), std::move(data)});
}

bool DatasetFile::has(std::string_view name) const {
  return std::any_of(arrays.begin(), arrays.end(), [&](const auto& a) { return a.name == name; });
}

const DatasetArray& DatasetFile::array(std::string_view name) const {
  for (const auto& a : arrays)
    if (a.name == name) return a;
  throw FormatError("missing array '" + std::string(name) + "' in " + role + " file");
}

const std::vector<Complex>& DatasetFile::complex_data(std::string_view name) const {
  const auto& a = array(name);
  if (a.dtype() != Dtype::c128) throw FormatError("array '" + a.name + "' is not c128");
  return std::get<std::vector<Complex>>(a.data);
}

const std::vector<std::int8_t>& DatasetFile::int8_data(std::string_view name) const {
  const auto& a = array(name);
  if (a.dtype() != Dtype::i8) throw FormatError("array '" + a.name + "' is not i8");
  return std::get<std::vector<std::int8_t>>(a.data);
}

const std::vector<double>& DatasetFile::real_data(std::string_view name) const {
  const auto& a = array(name);
  if (a.dtype() != Dtype::f64) throw FormatError("array '" + a.name + "' is not f64");
  return std::get<std::vector<double>>(a.data);
}

bool is_known_role(std::string_view role) {
  return role == "scenario" || role == "pilots" || role == "estimate" || role == "submission" || role == "report";
}

std::string encode(const DatasetFile& file) {
  std::ostringstream os(std::ios::binary);
  write_to(os, file);
  return std::move(os).str();
}

DatasetFile decode(std::string_view bytes, const DecodeOptions& options) {
  std::istringstream is(std::string(bytes), std::ios::binary);
  return decode_stream(is, bytes.size(), options);
}

void write_bytes_atomic(const std::filesystem::path& path, std::string_view bytes) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << is.rdbuf();
  return std::move(os).str();
}

void write_dataset(const std::filesystem::path& path, const DatasetFile& file) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    write_to(os, file);
    if (!os) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

DatasetFile read_dataset(const std::filesystem::path& path, const DecodeOptions& options) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return decode_stream(is, std::filesystem::file_size(path), options);
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex16(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace

std::string digest_hex(std::string_view bytes) {
  return hex16(fnv1a(kFnvOffset, bytes));
}

std::string digest_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::vector<char> buf(kChunk);
  std::uint64_t h = kFnvOffset;
  while (is) {
    is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h = fnv1a(h, std::string_view(buf.data(), static_cast<std::size_t>(is.gcount())));
  }
  return hex16(h);
}

}  // namespace irs

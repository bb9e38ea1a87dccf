#include <doctest.h>

#include <cstring>
#include <fstream>
#include <string>

#include "helpers.hpp"
#include "irs/dataset_file.hpp"
#include "irs/serialize.hpp"
#include "oracles.hpp"

using namespace irs;

namespace {

DatasetFile tiny() {
  DatasetFile f;
  f.role = "pilots";
  f.dims = {4, 2, 2};
  f.meta = {{"seed", 3}};
  f.add("pilotMatrix", {2, 2}, std::vector<std::int8_t>{1, -1, 1, 1});
  f.add("transmitSignal", {4, 1}, std::vector<Complex>{{1.0, -2.0}, {0.5, 0.25}, {0, 0}, {-1, 1e-300}});
  f.add("w", {3}, std::vector<double>{1.5, -0.0, 1e308});
  return f;
}

std::uint32_t header_length(const std::string& bytes) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + 5);
  return p[0] | (p[1] << 8) | (p[2] << 16) | (std::uint32_t{p[3]} << 24);
}

std::string message_of(const std::string& bytes, DecodeOptions opt = {}) {
  try {
    decode(bytes, opt);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

nlohmann::json header_of(const std::string& bytes) { return nlohmann::json::parse(bytes.substr(9, header_length(bytes))); }

std::string with_header(const std::string& bytes, const nlohmann::json& header) {
  const std::string text = header.dump();
  std::string out = "IRSD1";
  const auto n = static_cast<std::uint32_t>(text.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((n >> (8 * i)) & 0xff));
  return out + text + bytes.substr(9 + header_length(bytes));
}

}  // namespace

TEST_SUITE("dataset_file") {

TEST_CASE("byte layout") {
  const std::string bytes = encode(tiny());
  CHECK(bytes.substr(0, 5) == "IRSD1");
  const std::uint32_t L = header_length(bytes);
  const auto header = header_of(bytes);
  CHECK(header.at("format") == "IRSD1");
  CHECK(header.at("role") == "pilots");
  CHECK(header.at("dims") == nlohmann::json({{"K", 4}, {"M", 2}, {"N", 2}}));
  const auto& arrays = header.at("arrays");
  REQUIRE(arrays.size() == 3);
  CHECK(arrays[0].at("dtype") == "i8");
  CHECK(arrays[0].at("offset") == 0);
  CHECK(arrays[0].at("bytes") == 4);
  CHECK(arrays[1].at("dtype") == "c128");
  CHECK(arrays[1].at("offset") == 4);
  CHECK(arrays[1].at("bytes") == 64);
  CHECK(arrays[2].at("offset") == 68);
  CHECK(arrays[2].at("shape") == nlohmann::json::array({3}));

  const std::size_t p = 9 + L;
  REQUIRE(bytes.size() == p + 4 + 64 + 24);
  CHECK(static_cast<std::int8_t>(bytes[p + 1]) == -1);
  // Complex values are interleaved little-endian (re, im) doubles.
  double re = 0, im = 0;
  std::memcpy(&re, bytes.data() + p + 4, 8);
  std::memcpy(&im, bytes.data() + p + 12, 8);
  CHECK(re == 1.0);
  CHECK(im == -2.0);
  const unsigned char one_point_five[8] = {0, 0, 0, 0, 0, 0, 0xf8, 0x3f};
  CHECK(std::memcmp(bytes.data() + p + 68, one_point_five, 8) == 0);
}

TEST_CASE("round trip is byte identical") {
  const auto f = tiny();
  const std::string bytes = encode(f);
  const auto back = decode(bytes);
  CHECK(back.role == f.role);
  CHECK(back.dims == f.dims);
  CHECK(back.meta == f.meta);
  CHECK(back.int8_data("pilotMatrix") == f.int8_data("pilotMatrix"));
  CHECK(back.complex_data("transmitSignal") == f.complex_data("transmitSignal"));
  CHECK(std::signbit(back.real_data("w")[1]));
  CHECK(encode(back) == bytes);
}

TEST_CASE("files are written atomically and read back") {
  const auto dir = testing::scratch("dataset_file");
  const auto path = dir / "a.irsd";
  write_dataset(path, tiny());
  CHECK_FALSE(std::filesystem::exists(dir / "a.irsd.tmp"));
  CHECK(read_bytes(path) == encode(tiny()));
  CHECK(encode(read_dataset(path)) == encode(tiny()));
  write_bytes_atomic(dir / "b.bin", "xyz");
  CHECK(read_bytes(dir / "b.bin") == "xyz");
  CHECK_THROWS(read_dataset(dir / "missing.irsd"));
}

TEST_CASE("digest is FNV-1a 64") {
  CHECK(digest_hex("") == "cbf29ce484222325");
  CHECK(digest_hex("a") == "af63dc4c8601ec8c");
  const std::string bytes = encode(tiny());
  char want[17];
  std::snprintf(want, sizeof want, "%016llx", static_cast<unsigned long long>(oracle::fnv1a(bytes)));
  CHECK(digest_hex(bytes) == want);
  const auto dir = testing::scratch("digest");
  write_bytes_atomic(dir / "d.bin", bytes);
  CHECK(digest_file(dir / "d.bin") == want);
}

TEST_CASE("bad magic names byte 0") {
  std::string bytes = encode(tiny());
  bytes[2] = 'X';
  CHECK(message_of(bytes).rfind("byte 0:", 0) == 0);
  CHECK(message_of("IRS").rfind("byte 0:", 0) == 0);
}

TEST_CASE("header length past the end names byte 5") {
  std::string bytes = encode(tiny());
  bytes[8] = 0x7f;
  CHECK(message_of(bytes).rfind("byte 5:", 0) == 0);
}

TEST_CASE("invalid header JSON names an offset inside the header") {
  std::string bytes = encode(tiny());
  bytes[9] = '[';
  bytes[10] = '}';
  const auto msg = message_of(bytes);
  CHECK(msg.rfind("byte ", 0) == 0);
  CHECK(std::stoul(msg.substr(5)) >= 9);
}

TEST_CASE("manifest violations") {
  const std::string bytes = encode(tiny());
  const std::size_t payload = 9 + header_length(bytes);

  auto h = header_of(bytes);
  h["arrays"][1]["offset"] = 2;
  CHECK(message_of(with_header(bytes, h)).find("overlaps") != std::string::npos);
  CHECK(message_of(with_header(bytes, h)).rfind("byte ", 0) == 0);

  h = header_of(bytes);
  h["arrays"][2]["offset"] = 80;
  const std::string past = with_header(bytes, h);
  CHECK(message_of(past).find("past end") != std::string::npos);

  h = header_of(bytes);
  h["arrays"][1]["bytes"] = 63;
  CHECK(message_of(with_header(bytes, h)).find("declares") != std::string::npos);

  h = header_of(bytes);
  h["arrays"][0]["dtype"] = "u8";
  CHECK(message_of(with_header(bytes, h)).find("dtype") != std::string::npos);

  h = header_of(bytes);
  h["role"] = "weights";
  CHECK(message_of(with_header(bytes, h)).find("role") != std::string::npos);

  h = header_of(bytes);
  h.erase("dims");
  CHECK(message_of(with_header(bytes, h)).find("malformed header") != std::string::npos);

  h = header_of(bytes);
  h["dims"]["N"] = 3;
  CHECK_THROWS_AS(decode(with_header(bytes, h)), ValidationError);

  CHECK(message_of(bytes + "zz").find("byte " + std::to_string(payload + 92)) == 0);
  CHECK(message_of(bytes.substr(0, bytes.size() - 3)).rfind("byte ", 0) == 0);
}

TEST_CASE("gaps between arrays are allowed") {
  const std::string bytes = encode(tiny());
  auto h = header_of(bytes);
  h["arrays"][2]["offset"] = 72;
  std::string body = bytes.substr(9 + header_length(bytes));
  body.insert(68, 4, '\0');
  std::string out = with_header(bytes, h);
  out = out.substr(0, out.size() - (bytes.size() - 9 - header_length(bytes))) + body;
  CHECK(decode(out).real_data("w")[0] == 1.5);
}

TEST_CASE("sign arrays reject other values with the exact byte") {
  auto f = tiny();
  std::get<std::vector<std::int8_t>>(f.arrays[0].data)[2] = 0;
  const std::string bytes = encode(f);
  const std::size_t payload = 9 + header_length(bytes);
  CHECK(message_of(bytes).rfind("byte " + std::to_string(payload + 2) + ":", 0) == 0);
  CHECK(message_of(bytes, {.require_signs = false}).empty());
}

TEST_CASE("typed accessors") {
  const auto f = tiny();
  CHECK(f.has("w"));
  CHECK_FALSE(f.has("v"));
  CHECK_THROWS_AS(f.array("v"), FormatError);
  CHECK_THROWS_AS(f.complex_data("w"), FormatError);
  CHECK_THROWS_AS(f.int8_data("w"), FormatError);
  CHECK_THROWS_AS(f.real_data("pilotMatrix"), FormatError);
  CHECK(element_size(Dtype::c128) == 16);
  CHECK(to_string(Dtype::f64) == "f64");
}

TEST_CASE("encode rejects inconsistent arrays and roles") {
  auto f = tiny();
  f.arrays[2].shape = {4};
  CHECK_THROWS_AS(encode(f), ValidationError);
  f = tiny();
  f.role = "other";
  CHECK_THROWS_AS(encode(f), ValidationError);
}

TEST_CASE("role schemas") {
  ScenarioConfig c;
  c.dims = {16, 4, 8};
  c.num_users = 3;
  c.seed = 2;
  const auto s = generate_scenario(c);
  auto sf = scenario_to_file(s);
  CHECK_NOTHROW(validate_schema(sf));
  const auto back = scenario_from_file(decode(encode(sf)));
  CHECK(back.config.noise_psd == s.config.noise_psd);
  CHECK(back.users[2].model.elements == s.users[2].model.elements);
  CHECK(back.users[1].los == s.users[1].los);
  sf.dims = {16, 4, 16};
  CHECK_THROWS_AS(validate_schema(sf), ValidationError);

  const auto P = build_hadamard_pilots(c.dims, 4);
  const auto pd = simulate_pilot_phase(s, P, 1.0, false);
  const auto pf = pilots_to_file(pd);
  CHECK_NOTHROW(validate_schema(pf));
  const auto pback = pilots_from_file(decode(encode(pf)));
  CHECK(pback.received[1] == pd.received[1]);
  CHECK(pback.pilot_matrix == pd.pilot_matrix);
  CHECK(pback.noise_psd == pd.noise_psd);

  std::vector<ChannelEstimate> est;
  for (std::size_t u = 0; u < 3; ++u) est.push_back(estimate_channel(pd, u));
  const auto ef = estimates_to_file(est, {{"seed", 2}});
  CHECK_NOTHROW(validate_schema(ef));
  const auto eback = estimates_from_file(decode(encode(ef)));
  CHECK(eback[2].element_taps == est[2].element_taps);
  CHECK(testing::rel_err(eback[2].element_freq, est[2].element_freq) < 1e-14);
  CHECK(eback[0].aliasing_resolved);
  CHECK(eback[0].noise_variance_estimate == est[0].noise_variance_estimate);

  OptimizationSettings st;
  st.snr_scale = 1.0 / (s.config.noise_psd * c.bandwidth);
  std::vector<ConfigurationResult> res;
  for (const auto& e : est) res.push_back(optimize_wideband(e, st));
  const auto rf = results_to_file(c.dims, res);
  CHECK_NOTHROW(validate_schema(rf));
  const auto rback = results_from_file(decode(encode(rf)));
  CHECK(rback[1].theta == res[1].theta);
  CHECK(rback[1].method == res[1].method);

  const auto sub = submission_to_file(c.dims, export_submission(res, {8, 3}));
  CHECK(validate_submission(decode(encode(sub)), 3).empty());
  CHECK_FALSE(validate_submission(sub).empty());
  CHECK_THROWS_AS(results_from_file(sub), ValidationError);

  const auto report = compare_report(s, res, {});
  const auto repf = report_to_file(c.dims, report);
  CHECK_NOTHROW(validate_schema(repf));
  CHECK(decode(encode(repf)).meta.at("report").at("weightedAverage") == report.weighted_average);

  DatasetFile missing = ef;
  missing.arrays.pop_back();
  CHECK_THROWS_AS(validate_schema(missing), ValidationError);
}

TEST_CASE("config JSON round trip and overrides") {
  ScenarioConfig c;
  c.dims = {64, 8, 16};
  c.seed = 99;
  c.minus_state_gain = {-0.9, 0.1};
  const auto back = config_from_json(config_to_json(c));
  CHECK(back.dims == c.dims);
  CHECK(back.seed == 99);
  CHECK(back.minus_state_gain == c.minus_state_gain);
  const auto partial = config_from_json({{"users", 7}});
  CHECK(partial.num_users == 7);
  CHECK(partial.dims == ScenarioConfig{}.dims);
  CHECK_THROWS_AS(config_from_json({{"users", "many"}}), ValidationError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), ValidationError);
}

}  // TEST_SUITE

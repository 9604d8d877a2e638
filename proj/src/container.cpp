#include "mwt/container.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "mwt/errors.hpp"

namespace mwt {

namespace {

constexpr char kMagic[4] = {'M', 'W', 'T', 'G'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kPayloadMatrix = 1;
constexpr std::uint32_t kPayloadVector = 2;

struct Header {
  std::uint32_t payload = 0;
  int n = 1, m = 1, bits = 0;
  bool periodic = false;
  Box domain;
};

Grid grid_of(const Header& h) {
  if (h.n < 1 || h.n > kMaxSpaceDim) throw FormatError("container: space dimension must be 1..3");
  if (h.m < 1 || h.m > kMaxMatrixDim) throw FormatError("container: component count must be 1..4");
  if (h.bits < 0 || h.bits * h.n > 30) throw FormatError("container: grid too large");
  if (!(h.domain.edge() > 0.0)) throw FormatError("container: domain edge must be positive");
  return Grid{h.n, h.bits, h.domain};
}

nlohmann::json header_json(const Grid& g, int m, bool periodic, const char* kind) {
  nlohmann::json lo = nlohmann::json::array();
  for (int i = 0; i < g.n; ++i) lo.push_back(g.domain.lo[static_cast<std::size_t>(i)]);
  return {{"format", "mwt-grid"}, {"version", kVersion}, {"kind", kind},   {"n", g.n},
          {"m", m},               {"bits", g.bits},      {"periodic", periodic},
          {"domain", {{"lo", lo}, {"edge", g.domain.edge()}}}};
}

Header header_from_json(const nlohmann::json& j, const char* kind) {
  try {
    if (j.at("format") != "mwt-grid") throw FormatError("container: not an mwt-grid document");
    if (j.at("version").get<std::uint32_t>() != kVersion) throw FormatError("container: unsupported version");
    if (j.at("kind") != kind) throw FormatError(std::string("container: expected kind ") + kind);
    Header h;
    h.n = j.at("n").get<int>();
    h.m = j.at("m").get<int>();
    h.bits = j.at("bits").get<int>();
    h.periodic = j.value("periodic", false);
    const auto& lo = j.at("domain").at("lo");
    if (!lo.is_array() || static_cast<int>(lo.size()) != h.n) throw FormatError("container: domain.lo has wrong length");
    Point p{};
    for (int i = 0; i < h.n; ++i) p[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)].get<double>();
    if (h.n < 1 || h.n > kMaxSpaceDim) throw FormatError("container: space dimension must be 1..3");
    h.domain = Box::cube(h.n, p, j.at("domain").at("edge").get<double>());
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("container: ") + e.what());
  }
}

std::vector<cplx> data_from_json(const nlohmann::json& j, std::size_t expected) {
  try {
    const auto& d = j.at("data");
    if (!d.is_array() || d.size() != expected) throw FormatError("container: data has the wrong length");
    std::vector<cplx> out;
    out.reserve(expected);
    for (const auto& e : d) out.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("container: ") + e.what());
  }
}

template <typename T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(const std::string& buf, std::size_t& pos) {
  if (pos + sizeof(T) > buf.size()) throw FormatError("container: truncated binary file");
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

void write_binary(const std::filesystem::path& path, std::uint32_t payload, const Grid& g, int m, bool periodic,
                  const std::vector<cplx>& data) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  put(os, kVersion);
  put(os, payload);
  put(os, static_cast<std::uint32_t>(g.n));
  put(os, static_cast<std::uint32_t>(m));
  put(os, static_cast<std::uint32_t>(g.bits));
  put(os, static_cast<std::uint32_t>(periodic ? 1 : 0));
  for (std::size_t i = 0; i < 3; ++i) put(os, static_cast<int>(i) < g.n ? g.domain.lo[i] : 0.0);
  put(os, g.domain.edge());
  for (const cplx& c : data) {
    put(os, c.real());
    put(os, c.imag());
  }
  if (!os) throw FormatError("write failed for " + path.string());
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

bool is_binary(const std::string& buf) { return buf.size() >= 4 && std::memcmp(buf.data(), kMagic, 4) == 0; }

Header read_binary(const std::string& buf, std::uint32_t payload, std::vector<cplx>& data, std::size_t per_node) {
  std::size_t pos = 4;
  if (get<std::uint32_t>(buf, pos) != kVersion) throw FormatError("container: unsupported version");
  Header h;
  h.payload = get<std::uint32_t>(buf, pos);
  if (h.payload != payload) throw FormatError("container: payload kind mismatch");
  h.n = static_cast<int>(get<std::uint32_t>(buf, pos));
  h.m = static_cast<int>(get<std::uint32_t>(buf, pos));
  h.bits = static_cast<int>(get<std::uint32_t>(buf, pos));
  h.periodic = get<std::uint32_t>(buf, pos) != 0;
  Point lo{};
  for (std::size_t i = 0; i < 3; ++i) lo[i] = get<double>(buf, pos);
  const double edge = get<double>(buf, pos);
  if (h.n < 1 || h.n > kMaxSpaceDim) throw FormatError("container: space dimension must be 1..3");
  h.domain = Box::cube(h.n, lo, edge);
  const Grid g = grid_of(h);
  const std::size_t count = g.size() * per_node * static_cast<std::size_t>(payload == kPayloadMatrix ? h.m * h.m : h.m);
  if (buf.size() - pos != count * 16) throw FormatError("container: payload size does not match header");
  data.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double re = get<double>(buf, pos);
    const double im = get<double>(buf, pos);
    data[k] = {re, im};
  }
  return h;
}

std::vector<cplx> flatten(const WeightSamples& s) {
  std::vector<cplx> out;
  out.reserve(s.matrices.size() * static_cast<std::size_t>(s.m * s.m));
  for (const Matrix& a : s.matrices)
    for (int r = 0; r < s.m; ++r)
      for (int c = 0; c < s.m; ++c) out.push_back(a(r, c));
  return out;
}

WeightSamples unflatten(const Grid& g, int m, const std::vector<cplx>& data) {
  WeightSamples s{g, m, {}};
  s.matrices.reserve(g.size());
  std::size_t k = 0;
  for (std::size_t node = 0; node < g.size(); ++node) {
    Matrix a(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) a(r, c) = data[k++];
    s.matrices.push_back(a);
  }
  return s;
}

nlohmann::json data_json(const std::vector<cplx>& data) {
  nlohmann::json d = nlohmann::json::array();
  for (const cplx& c : data) d.push_back({c.real(), c.imag()});
  return d;
}

}  // namespace

ContainerFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".json" ? ContainerFormat::json : ContainerFormat::binary;
}

nlohmann::json to_json(const WeightSamples& s) {
  nlohmann::json j = header_json(s.grid, s.m, false, "weight");
  j["data"] = data_json(flatten(s));
  return j;
}

WeightSamples weight_samples_from_json(const nlohmann::json& j) {
  const Header h = header_from_json(j, "weight");
  const Grid g = grid_of(h);
  return unflatten(g, h.m, data_from_json(j, g.size() * static_cast<std::size_t>(h.m * h.m)));
}

nlohmann::json to_json(const GridFunction& f) {
  nlohmann::json j = header_json(f.grid, f.m, f.periodic, "function");
  j["data"] = data_json(f.values);
  return j;
}

GridFunction grid_function_from_json(const nlohmann::json& j) {
  const Header h = header_from_json(j, "function");
  const Grid g = grid_of(h);
  GridFunction f{g, h.m, h.periodic, data_from_json(j, g.size() * static_cast<std::size_t>(h.m))};
  return f;
}

void save(const WeightSamples& s, const std::filesystem::path& path) {
  if (format_for(path) == ContainerFormat::json) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open " + path.string() + " for writing");
    os << to_json(s).dump() << '\n';
    return;
  }
  write_binary(path, kPayloadMatrix, s.grid, s.m, false, flatten(s));
}

void save(const GridFunction& f, const std::filesystem::path& path) {
  if (format_for(path) == ContainerFormat::json) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open " + path.string() + " for writing");
    os << to_json(f).dump() << '\n';
    return;
  }
  write_binary(path, kPayloadVector, f.grid, f.m, f.periodic, f.values);
}

WeightSamples load_weight_samples(const std::filesystem::path& path) {
  const std::string buf = slurp(path);
  if (is_binary(buf)) {
    std::vector<cplx> data;
    const Header h = read_binary(buf, kPayloadMatrix, data, 1);
    return unflatten(grid_of(h), h.m, data);
  }
  try {
    return weight_samples_from_json(nlohmann::json::parse(buf));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("container: ") + e.what());
  }
}

GridFunction load_grid_function(const std::filesystem::path& path) {
  const std::string buf = slurp(path);
  if (is_binary(buf)) {
    std::vector<cplx> data;
    const Header h = read_binary(buf, kPayloadVector, data, 1);
    return GridFunction{grid_of(h), h.m, h.periodic, std::move(data)};
  }
  try {
    return grid_function_from_json(nlohmann::json::parse(buf));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("container: ") + e.what());
  }
}

WeightSamples sample_weight(const MatrixWeight& w, const Grid& grid) {
  if (grid.n != w.space_dim()) throw InvalidArgumentError("grid dimension does not match the weight");
  WeightSamples s{grid, w.matrix_dim(), {}};
  s.matrices.reserve(grid.size());
  for (std::size_t node = 0; node < grid.size(); ++node) s.matrices.push_back(w.power(grid.midpoint(node), 1.0));
  return s;
}

}  // namespace mwt

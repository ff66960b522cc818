#include "memstep/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "memstep/errors.hpp"

namespace memstep {

std::string format_double(double value, int significant) {
  std::array<char, 64> buffer{};
  const auto [end, ec] =
      std::to_chars(buffer.data(), buffer.data() + buffer.size(), value, std::chars_format::general, significant);
  if (ec != std::errc()) throw Error("cannot format floating-point value");
  return std::string(buffer.data(), end);
}

void write_snapshot(std::ostream& out, const GridFunction& w) {
  const Grid2D& grid = w.grid();
  out << "x1,x2,value\n";
  for (int i2 = 1; i2 < grid.n2(); ++i2) {
    for (int i1 = 1; i1 < grid.n1(); ++i1) {
      out << format_double(i1 * grid.h1()) << ',' << format_double(i2 * grid.h2()) << ','
          << format_double(w.at(i1, i2)) << '\n';
    }
  }
}

void write_snapshot(const std::filesystem::path& path, const GridFunction& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_snapshot(out, w);
}

namespace {

double parse_number(std::string_view text, int line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw FormatError("line " + std::to_string(line) + ": cannot parse '" + std::string(text) + "'", line);
  return value;
}

}  // namespace

GridFunction read_snapshot(std::istream& in, const Grid2D& grid) {
  GridFunction w(grid);
  std::string raw;
  int line = 0;
  if (!std::getline(in, raw) || raw != "x1,x2,value") throw FormatError("missing header 'x1,x2,value'", 1);
  ++line;
  std::size_t k = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (raw.empty()) continue;
    if (k >= w.size()) throw FormatError("more rows than interior nodes", line);
    const auto c1 = raw.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : raw.find(',', c1 + 1);
    if (c2 == std::string::npos) throw FormatError("line " + std::to_string(line) + ": expected x1,x2,value", line);
    const std::string_view view(raw);
    const double x1 = parse_number(view.substr(0, c1), line);
    const double x2 = parse_number(view.substr(c1 + 1, c2 - c1 - 1), line);
    const int i1 = static_cast<int>(k % grid.interior_n1()) + 1;
    const int i2 = static_cast<int>(k / grid.interior_n1()) + 1;
    if (std::abs(x1 - i1 * grid.h1()) > 1e-12 || std::abs(x2 - i2 * grid.h2()) > 1e-12)
      throw FormatError("line " + std::to_string(line) + ": node does not match the grid", line);
    w[k++] = parse_number(view.substr(c2 + 1), line);
  }
  if (k != w.size()) throw FormatError("snapshot has " + std::to_string(k) + " rows, expected " +
                                           std::to_string(w.size()), line);
  return w;
}

GridFunction read_snapshot(const std::filesystem::path& path, const Grid2D& grid) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open snapshot " + path.string());
  return read_snapshot(in, grid);
}

void write_checkpoint(const std::filesystem::path& directory, const SoeState& state) {
  std::filesystem::create_directories(directory);
  nlohmann::ordered_json manifest;
  manifest["format"] = "memstep-checkpoint/1";
  manifest["step"] = state.step;
  manifest["time"] = state.time;
  manifest["grid"] = {state.y.grid().n1(), state.y.grid().n2()};
  auto fields = nlohmann::ordered_json::array();
  write_snapshot(directory / "y.csv", state.y);
  fields.push_back("y.csv");
  for (std::size_t i = 0; i < state.aux.size(); ++i) {
    std::ostringstream name;
    name << "aux_" << std::setw(2) << std::setfill('0') << i + 1 << ".csv";
    write_snapshot(directory / name.str(), state.aux[i]);
    fields.push_back(name.str());
  }
  manifest["fields"] = fields;
  std::ofstream out(directory / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << '\n';
}

SoeState read_checkpoint(const std::filesystem::path& directory) {
  std::ifstream in(directory / "manifest.json");
  if (!in) throw NotFoundError("no checkpoint manifest in " + directory.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint manifest: ") + e.what(), 0);
  }
  if (manifest.value("format", "") != "memstep-checkpoint/1") throw FormatError("not a checkpoint manifest", 0);
  const Grid2D grid(manifest.at("grid").at(0).get<int>(), manifest.at("grid").at(1).get<int>());
  const auto& fields = manifest.at("fields");
  if (fields.empty()) throw FormatError("checkpoint lists no fields", 0);
  SoeState state{read_snapshot(directory / fields.at(0).get<std::string>(), grid), {},
                 manifest.at("step").get<long>(), manifest.at("time").get<double>()};
  for (std::size_t i = 1; i < fields.size(); ++i)
    state.aux.push_back(read_snapshot(directory / fields.at(i).get<std::string>(), grid));
  return state;
}

}  // namespace memstep

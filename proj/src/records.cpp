#include "asqg/records.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "asqg/analysis.hpp"
#include "asqg/errors.hpp"
#include "json.hpp"

#ifndef ASQG_VERSION
#define ASQG_VERSION "dev"
#endif

namespace asqg {

std::vector<std::size_t> RunRecord::tracked() const {
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < tracers.size(); ++i)
    if (tracers[i].bubble) ids.push_back(i);
  std::stable_sort(ids.begin(), ids.end(),
                   [&](std::size_t a, std::size_t b) { return *tracers[a].bubble < *tracers[b].bubble; });
  return ids;
}

void write_series(std::ostream& out, const SeriesTable& table) {
  out << "t,holder_est,riesz_dist";
  for (int n : table.bubbles) out << ",ratio_" << n;
  for (int n : table.bubbles) out << ",witness_" << n;
  out << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < table.times.size(); ++k) {
    out << table.times[k] << ',' << table.holder[k] << ',' << table.riesz[k];
    for (const auto& col : table.ratio) out << ',' << col[k];
    for (const auto& col : table.witness) out << ',' << col[k];
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_cell(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw NumericalError("series.csv: malformed number '" + s + "'");
  return v;
}

}  // namespace

SeriesTable read_series(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw NumericalError("series.csv: empty file");
  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "t" || header[1] != "holder_est" || header[2] != "riesz_dist" ||
      (header.size() - 3) % 2 != 0)
    throw NumericalError("series.csv: unexpected header '" + line + "'");
  SeriesTable t;
  const std::size_t nb = (header.size() - 3) / 2;
  for (std::size_t b = 0; b < nb; ++b) {
    const std::string& h = header[3 + b];
    if (h.rfind("ratio_", 0) != 0 || header[3 + nb + b] != "witness_" + h.substr(6))
      throw NumericalError("series.csv: unexpected column '" + h + "'");
    t.bubbles.push_back(std::stoi(h.substr(6)));
  }
  t.ratio.resize(nb);
  t.witness.resize(nb);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw NumericalError("series.csv: row has wrong column count");
    t.times.push_back(parse_cell(cells[0]));
    t.holder.push_back(parse_cell(cells[1]));
    t.riesz.push_back(parse_cell(cells[2]));
    for (std::size_t b = 0; b < nb; ++b) {
      t.ratio[b].push_back(parse_cell(cells[3 + b]));
      t.witness[b].push_back(parse_cell(cells[3 + nb + b]));
    }
  }
  return t;
}

std::string manifest_json(const RunRecord& record) {
  nlohmann::json config;
  std::istringstream lines(save_config(record.config));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find(" = ");
    config[line.substr(0, eq)] = line.substr(eq + 3);
  }
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream stamp;
  stamp << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  nlohmann::json j = {{"version", ASQG_VERSION},
                      {"config", config},
                      {"dt", record.dt},
                      {"steps", record.steps},
                      {"outputs", record.times.size()},
                      {"axis_crossings", record.axis_crossings},
                      {"truncated", record.truncated},
                      {"wall_seconds", record.wall_seconds},
                      {"timestamp", stamp.str()}};
  return j.dump(2);
}

void write_tracks(std::ostream& out, const RunRecord& record) {
  out << "t,tracer,bubble,theta0,x1,x2\n" << std::setprecision(17);
  for (std::size_t k = 0; k < record.times.size(); ++k)
    for (const TracerSeries& tr : record.tracers) {
      out << record.times[k] << ',' << tr.id << ',';
      if (tr.bubble) out << *tr.bubble;
      out << ',' << tr.theta0 << ',' << tr.positions[k].x1 << ',' << tr.positions[k].x2 << '\n';
    }
}

namespace {

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return in;
}

}  // namespace

RunRecord read_run(const std::filesystem::path& dir) {
  RunRecord rec;
  {
    auto in = open_in(dir / "manifest.json");
    const auto j = nlohmann::json::parse(in);
    std::ostringstream text;
    for (const auto& [key, value] : j.at("config").items()) text << key << " = " << value.get<std::string>() << '\n';
    std::istringstream cfg(text.str());
    rec.config = parse_config(cfg);
    rec.dt = j.value("dt", 0.0);
    rec.steps = j.value("steps", 0L);
    rec.axis_crossings = j.value("axis_crossings", 0L);
    rec.truncated = j.value("truncated", false);
    rec.wall_seconds = j.value("wall_seconds", 0.0);
  }
  {
    auto in = open_in(dir / "series.csv");
    const SeriesTable t = read_series(in);
    rec.times = t.times;
    rec.holder_estimate = t.holder;
    rec.riesz_to_initial = t.riesz;
  }
  auto in = open_in(dir / "tracks.csv");
  std::string line;
  if (!std::getline(in, line) || line != "t,tracer,bubble,theta0,x1,x2")
    throw NumericalError("tracks.csv: unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 6) throw NumericalError("tracks.csv: row has wrong column count");
    const auto id = static_cast<std::size_t>(std::stoul(c[1]));
    if (id >= rec.tracers.size()) rec.tracers.resize(id + 1);
    TracerSeries& tr = rec.tracers[id];
    tr.id = static_cast<int>(id);
    if (!c[2].empty()) tr.bubble = std::stoi(c[2]);
    tr.theta0 = parse_cell(c[3]);
    const Vec2 x{parse_cell(c[4]), parse_cell(c[5])};
    if (tr.positions.empty()) tr.x0 = x;
    tr.positions.push_back(x);
  }
  for (const TracerSeries& tr : rec.tracers)
    if (tr.positions.size() != rec.times.size()) throw NumericalError("tracks.csv: inconsistent with series.csv");
  return rec;
}

void write_series(const RunRecord& record, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  {
    std::ofstream out(dir / "series.csv");
    if (!out) throw std::runtime_error("cannot write " + (dir / "series.csv").string());
    write_series(out, tabulate(record));
    if (!out) throw std::runtime_error("write failed for " + (dir / "series.csv").string());
  }
  {
    std::ofstream out(dir / "tracks.csv");
    if (!out) throw std::runtime_error("cannot write " + (dir / "tracks.csv").string());
    write_tracks(out, record);
    if (!out) throw std::runtime_error("write failed for " + (dir / "tracks.csv").string());
  }
  std::ofstream man(dir / "manifest.json");
  if (!man) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  man << manifest_json(record) << '\n';
  if (!man) throw std::runtime_error("write failed for " + (dir / "manifest.json").string());
}

}  // namespace asqg

#include "asqg/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <vector>

#include "asqg/errors.hpp"

namespace asqg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError(key, "expected a finite number, got '" + text + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  long long v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

struct Field {
  std::string key;  // dotted
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename M>
Field real_field(std::string key, M member) {
  return {key, [key, member](ExperimentConfig& c, const std::string& v) { c.*member = parse_double(key, v); },
          [member](const ExperimentConfig& c) { return format_double(c.*member); }};
}

template <typename M>
Field int_field(std::string key, M member) {
  return {key,
          [key, member](ExperimentConfig& c, const std::string& v) {
            using T = std::remove_reference_t<decltype(c.*member)>;
            const long long x = parse_int(key, v);
            if constexpr (std::is_unsigned_v<T>) {
              if (x < 0) throw ConfigError(key, "must be >= 0");
            }
            c.*member = static_cast<T>(x);
          },
          [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> all = {
      real_field("data.alpha", &ExperimentConfig::alpha),
      real_field("data.beta_amp", &ExperimentConfig::beta_amp),
      int_field("data.n0", &ExperimentConfig::n0),
      int_field("data.N", &ExperimentConfig::N),
      real_field("data.amplitude_scale", &ExperimentConfig::amplitude_scale),
      int_field("particles.nodes_per_bubble", &ExperimentConfig::nodes_per_bubble),
      real_field("particles.eps_kappa", &ExperimentConfig::eps_kappa),
      real_field("flow.dt_max", &ExperimentConfig::dt_max),
      real_field("flow.cfl", &ExperimentConfig::cfl),
      real_field("flow.T", &ExperimentConfig::T),
      real_field("flow.output_cadence", &ExperimentConfig::output_cadence),
      real_field("flow.wall_budget", &ExperimentConfig::wall_budget),
      {"tracers.spec", [](ExperimentConfig& c, const std::string& v) { c.tracer_spec = v; },
       [](const ExperimentConfig& c) { return c.tracer_spec; }},
      {"diagnostics.riesz", [](ExperimentConfig& c, const std::string& v) { c.riesz = parse_bool("diagnostics.riesz", v); },
       [](const ExperimentConfig& c) { return std::string(c.riesz ? "true" : "false"); }},
      int_field("diagnostics.riesz_cells", &ExperimentConfig::riesz_cells),
      int_field("diagnostics.holder_pairs", &ExperimentConfig::holder_pairs),
      int_field("diagnostics.pair_budget", &ExperimentConfig::pair_budget),
      real_field("stability.perturbation", &ExperimentConfig::perturbation),
      int_field("run.seed", &ExperimentConfig::seed),
      {"run.output_dir", [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; },
       [](const ExperimentConfig& c) { return c.output_dir; }},
  };
  return all;
}

const Field* find_field(const std::string& key) {
  const Field* bare_match = nullptr;
  int bare_count = 0;
  for (const Field& f : fields()) {
    if (f.key == key) return &f;
    if (f.key.substr(f.key.find('.') + 1) == key) {
      bare_match = &f;
      ++bare_count;
    }
  }
  if (key == "tracer_spec") return find_field("tracers.spec");
  return bare_count == 1 ? bare_match : nullptr;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("data.alpha", "must lie in (0, 1)");
  if (!(beta_amp > 0.0 && beta_amp < 0.25)) throw ConfigError("data.beta_amp", "must lie in (0, 1/4)");
  if (n0 < 1) throw ConfigError("data.n0", "must be >= 1");
  if (N < n0) throw ConfigError("data.N", "must be >= data.n0");
  if (N > 24) throw ConfigError("data.N", "must be <= 24 (finest scale 4^-N near double resolution)");
  if (!(amplitude_scale >= 0.0)) throw ConfigError("data.amplitude_scale", "must be >= 0");
  const int g = static_cast<int>(std::lround(std::sqrt(static_cast<double>(std::max(nodes_per_bubble, 0)))));
  if (g * g != nodes_per_bubble || g < 8)
    throw ConfigError("particles.nodes_per_bubble", "must be G^2 with G >= 8");
  if (!(eps_kappa > 0.0)) throw ConfigError("particles.eps_kappa", "must be > 0");
  if (!(dt_max > 0.0)) throw ConfigError("flow.dt_max", "must be > 0");
  if (!(cfl > 0.0)) throw ConfigError("flow.cfl", "must be > 0");
  if (!(T >= 0.0)) throw ConfigError("flow.T", "must be >= 0");
  if (!(output_cadence > 0.0)) throw ConfigError("flow.output_cadence", "must be > 0");
  if (!(wall_budget >= 0.0)) throw ConfigError("flow.wall_budget", "must be >= 0");
  if (tracer_spec.empty()) throw ConfigError("tracers.spec", "must not be empty");
  if (riesz_cells < 2) throw ConfigError("diagnostics.riesz_cells", "must be >= 2");
  if (holder_pairs < 1) throw ConfigError("diagnostics.holder_pairs", "must be >= 1");
  if (pair_budget < 100) throw ConfigError("diagnostics.pair_budget", "must be >= 100");
  if (!(perturbation >= 0.0)) throw ConfigError("stability.perturbation", "must be >= 0");
  if (output_dir.empty()) throw ConfigError("run.output_dir", "must not be empty");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", "line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    const Field* f = find_field(key);
    if (f == nullptr) throw ConfigError(key, "unknown key");
    f->set(cfg, value);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  if (path == "default") {
    ExperimentConfig cfg;
    cfg.validate();
    return cfg;
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  return parse_config(in);
}

std::string save_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  for (const Field& f : fields()) out << f.key << " = " << f.get(cfg) << '\n';
  return out.str();
}

}  // namespace asqg

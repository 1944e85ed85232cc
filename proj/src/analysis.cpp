#include "asqg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "json.hpp"

#include "asqg/errors.hpp"

namespace asqg {

double quadrant_integral(const ParticleEnsemble& ens, Vec2 x, Region region) {
  const double e = -(4.0 + ens.params.alpha) / 2.0;
  double s = 0.0;
  for (std::size_t j = 0; j < ens.size(); ++j) {
    const Vec2 p = ens.nodes[j];
    if (p.x1 < 2.0 * x.x1) continue;
    if (region == Region::Q && p.x2 < 2.0 * x.x2) continue;
    s += ens.weights[j] * ens.values[j] * p.x1 * p.x2 * std::pow(norm2(p), e);
  }
  return s;
}

namespace {

// Mirror image of Region::R for the second component: [0, inf) x [2x2, inf).
double upper_strip_integral(const ParticleEnsemble& ens, Vec2 x) {
  const double e = -(4.0 + ens.params.alpha) / 2.0;
  double s = 0.0;
  for (std::size_t j = 0; j < ens.size(); ++j) {
    const Vec2 p = ens.nodes[j];
    if (p.x2 < 2.0 * x.x2) continue;
    s += ens.weights[j] * ens.values[j] * p.x1 * p.x2 * std::pow(norm2(p), e);
  }
  return s;
}

}  // namespace

HolderEstimate ensemble_holder_estimate(const ParticleEnsemble& ens, double exponent, int pair_budget,
                                        std::uint64_t seed) {
  if (!(exponent > 0.0 && exponent <= 1.0)) throw DomainError("holder exponent must lie in (0, 1]");
  HolderEstimate best;
  best.exponent = exponent;
  auto consider = [&](Vec2 a, double va, Vec2 b, double vb) {
    const double d = norm(a - b);
    if (d == 0.0) return;
    const double q = std::abs(va - vb) / std::pow(d, exponent);
    if (q > best.value) {
      best.value = q;
      best.witness_pair = {a, b};
    }
  };
  for (std::size_t j = 0; j < ens.size(); ++j) {
    const Vec2 p = ens.nodes[j];
    consider(p, ens.values[j], {p.x1, 0.0}, 0.0);
    consider(p, ens.values[j], {0.0, p.x2}, 0.0);
  }
  if (ens.size() < 2) return best;

  std::map<int, std::vector<std::size_t>> by_bubble;
  for (std::size_t j = 0; j < ens.size(); ++j) by_bubble[ens.bubble[j]].push_back(j);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, ens.size() - 1);
  for (int k = 0; k < pair_budget; ++k) {
    const std::size_t a = pick(rng);
    const auto& group = by_bubble[ens.bubble[a]];
    const std::size_t b = group[std::uniform_int_distribution<std::size_t>(0, group.size() - 1)(rng)];
    consider(ens.nodes[a], ens.values[a], ens.nodes[b], ens.values[b]);
  }
  return best;
}

ThetaNorm holder_norm(const ParticleEnsemble& ens, int pair_budget, std::uint64_t seed) {
  ThetaNorm n;
  for (double v : ens.values) n.linf = std::max(n.linf, std::abs(v));
  n.seminorm = ensemble_holder_estimate(ens, ens.params.alpha, pair_budget, seed).value;
  return n;
}

Residual velocity_residual(const ParticleEnsemble& ens, Vec2 x, const ThetaNorm& norm_theta, Region region) {
  if (!(x.x1 > 0.0 && x.x2 > 0.0)) throw DomainError("velocity_residual: x must be off the axes");
  const double total = norm_theta.total();
  if (total == 0.0) return {};
  const double a = ens.params.alpha;
  const Vec2 u = velocity_at(ens, x);
  const double i1 = quadrant_integral(ens, x, region);
  const double i2 = region == Region::Q ? i1 : upper_strip_integral(ens, x);
  const double r2 = norm2(x);
  Residual r;
  r.r1 = std::abs(u.x1 / x.x1 - 4.0 * (2.0 + a) * i1) / (total * (1.0 + std::log(r2 / (x.x1 * x.x1))));
  r.r2 = std::abs(u.x2 / x.x2 + 4.0 * (2.0 + a) * i2) / (total * (1.0 + std::log(r2 / (x.x2 * x.x2))));
  return r;
}

Residual velocity_residual(const ParticleEnsemble& ens, Vec2 x, Region region) {
  return velocity_residual(ens, x, holder_norm(ens), region);
}

std::vector<double> ratio_series(const RunRecord& record, std::size_t tracer_id) {
  const TracerSeries& tr = record.tracers.at(tracer_id);
  if (!(tr.x0.x1 > 0.0 && tr.x0.x2 > 0.0)) throw DomainError("ratio_series: tracer starts on an axis");
  const double r0 = tr.x0.x2 / tr.x0.x1;
  std::vector<double> out;
  out.reserve(tr.positions.size());
  for (const Vec2& p : tr.positions) out.push_back((p.x2 / p.x1) / r0);
  return out;
}

std::vector<double> witness_quotient(const RunRecord& record, std::size_t tracer_id, double alpha) {
  const TracerSeries& tr = record.tracers.at(tracer_id);
  std::vector<double> out;
  out.reserve(tr.positions.size());
  for (const Vec2& p : tr.positions) {
    if (!(p.x2 > 0.0)) throw NumericalError("witness_quotient: tracer reached the x1-axis");
    out.push_back(tr.theta0 / std::pow(p.x2, alpha));
  }
  return out;
}

ScheduleValue tn_schedule(const ScheduleParams& params, int n) {
  if (n < 1) throw DomainError("tn_schedule: n must be >= 1");
  const double b = params.beta_amp;
  ScheduleValue v;
  v.uncapped = params.c_fit * (1.0 - b) / std::pow(static_cast<double>(n), 1.0 - b);
  double sum = 0.0;
  for (int m = 1; m < n; ++m) sum += std::pow(static_cast<double>(m), -b);
  v.capped = sum > 0.0 ? std::min(params.T, params.c_fit / sum) : params.T;
  v.capped = std::min(v.capped, v.uncapped);
  return v;
}

double fit_schedule_constant(const RunRecord& record, double gamma) {
  const double b = record.config.beta_amp;
  const double t_end = record.times.empty() ? 0.0 : record.times.back();
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t id : record.tracked()) {
    const TracerSeries& tr = record.tracers[id];
    double exit_time = t_end;
    for (std::size_t k = 0; k < tr.positions.size(); ++k) {
      const double s1 = tr.positions[k].x1 / tr.x0.x1;
      const double s2 = tr.positions[k].x2 / tr.x0.x2;
      if (s1 > gamma || s1 < 1.0 / gamma || s2 > gamma || s2 < 1.0 / gamma) {
        // last output still inside the band
        exit_time = record.times[k - 1];
        break;
      }
    }
    const double n = static_cast<double>(*tr.bubble);
    c = std::min(c, exit_time * std::pow(n, 1.0 - b) / (1.0 - b));
  }
  return std::isfinite(c) ? c : 0.0;
}

double ordering_margin(const RunRecord& record, int n_prime) {
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < record.times.size(); ++k) {
    double outer_inf = std::numeric_limits<double>::infinity();
    double inner_sup = 0.0;
    bool have_outer = false;
    for (std::size_t id : record.tracked()) {
      const TracerSeries& tr = record.tracers[id];
      const double phi1 = tr.positions[k].x1;
      if (*tr.bubble == n_prime) {
        outer_inf = std::min(outer_inf, phi1);
        have_outer = true;
      } else if (*tr.bubble > n_prime) {
        inner_sup = std::max(inner_sup, phi1);
      }
    }
    if (!have_outer) throw DomainError("ordering_margin: no tracer for the reference bubble");
    margin = std::min(margin, (outer_inf - 2.0 * inner_sup) / outer_inf);
  }
  return margin;
}

SeriesTable tabulate(const RunRecord& record) {
  SeriesTable t;
  t.times = record.times;
  t.holder = record.holder_estimate;
  t.riesz = record.riesz_to_initial;
  for (std::size_t id : record.tracked()) {
    t.bubbles.push_back(*record.tracers[id].bubble);
    t.ratio.push_back(ratio_series(record, id));
    t.witness.push_back(witness_quotient(record, id, record.config.alpha));
  }
  return t;
}

InflationReport inflation_report(const SeriesTable& table, double alpha, bool truncated) {
  InflationReport rep;
  rep.truncated = truncated;
  if (!table.holder.empty()) {
    rep.h0 = table.holder.front();
    rep.hT = table.holder.back();
  }
  for (std::size_t b = 0; b < table.bubbles.size(); ++b) {
    const auto& w = table.witness[b];
    const auto& r = table.ratio[b];
    if (w.empty()) continue;
    TracerGrowth g;
    g.n = table.bubbles[b];
    g.q0 = w.front();
    g.qT = w.back();
    g.growth = g.q0 != 0.0 ? g.qT / g.q0 : 1.0;
    g.phi2_decay = g.qT != 0.0 ? std::pow(g.q0 / g.qT, 1.0 / alpha) : 1.0;
    g.ratio_max = *std::max_element(r.begin(), r.end());
    rep.ratio_max = std::max(rep.ratio_max, g.ratio_max);
    rep.tracers.push_back(g);
  }
  std::sort(rep.tracers.begin(), rep.tracers.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
  if (!rep.tracers.empty()) {
    const int inner_n = rep.tracers.back().n;
    const auto col = static_cast<std::size_t>(
        std::find(table.bubbles.begin(), table.bubbles.end(), inner_n) - table.bubbles.begin());
    const auto& w = table.witness[col];
    const double half = 0.5 * table.times.back();
    for (std::size_t k = 1; k < w.size() && table.times[k] <= half; ++k) {
      // 1% slack against the running maximum
      const double running = *std::max_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
      if (w[k] < running * (1.0 - 1e-2)) rep.innermost_monotone = false;
    }
    rep.innermost_exceeds_outermost = rep.tracers.back().growth > rep.tracers.front().growth;
  }
  return rep;
}

InflationReport inflation_report(const RunRecord& record) {
  InflationReport rep = inflation_report(tabulate(record), record.config.alpha, record.truncated);
  const auto tracked = record.tracked();
  const bool has_n0 = std::any_of(tracked.begin(), tracked.end(),
                                  [&](std::size_t id) { return *record.tracers[id].bubble == record.config.n0; });
  if (has_n0 && !record.times.empty()) rep.ordering_margin = ordering_margin(record, record.config.n0);
  return rep;
}

std::string report_json(const InflationReport& report) {
  using nlohmann::json;
  json j;
  j["tracers"] = json::array();
  for (const TracerGrowth& g : report.tracers) {
    j["tracers"].push_back({{"n", g.n},
                            {"q0", g.q0},
                            {"qT", g.qT},
                            {"growth", g.growth},
                            {"phi2_decay", g.phi2_decay},
                            {"ratio_max", g.ratio_max}});
  }
  j["holder"] = {{"h0", report.h0}, {"hT", report.hT}, {"growth", report.h0 != 0.0 ? report.hT / report.h0 : 1.0}};
  j["ratios"] = {{"max", report.ratio_max}};
  j["flags"] = {{"innermost_monotone", report.innermost_monotone},
                {"innermost_exceeds_outermost", report.innermost_exceeds_outermost},
                {"truncated", report.truncated}};
  if (report.ordering_margin) {
    j["flags"]["ordering_holds"] = *report.ordering_margin >= 0.0;
    j["ratios"]["ordering_margin"] = *report.ordering_margin;
  }
  return j.dump(2);
}

}  // namespace asqg

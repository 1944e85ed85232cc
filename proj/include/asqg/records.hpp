#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "asqg/config.hpp"
#include "asqg/vec2.hpp"

namespace asqg {

/// Positions of one passive tracer at every output time of a run.
struct TracerSeries {
  int id = 0;
  std::optional<int> bubble;  ///< set for bubble-center tracers
  Vec2 x0;
  double theta0 = 0.0;
  std::vector<Vec2> positions;
};

/// Output of one integration: diagnostics sampled on a shared time axis.
struct RunRecord {
  std::vector<double> times;
  std::vector<TracerSeries> tracers;
  std::vector<double> holder_estimate;
  std::vector<double> riesz_to_initial;  ///< NaN when disabled

  ExperimentConfig config;
  double dt = 0.0;
  long steps = 0;
  long axis_crossings = 0;
  bool truncated = false;
  double wall_seconds = 0.0;

  /// Indices of tracers that carry a bubble index, ordered by bubble.
  std::vector<std::size_t> tracked() const;
};

/// Flat per-time table written to series.csv.
struct SeriesTable {
  std::vector<double> times;
  std::vector<double> holder;
  std::vector<double> riesz;
  std::vector<int> bubbles;                  ///< one column pair per tracked bubble
  std::vector<std::vector<double>> ratio;    ///< [bubble][time]
  std::vector<std::vector<double>> witness;  ///< [bubble][time]
};

/// Header `t,holder_est,riesz_dist,ratio_<n>...,witness_<n>...`, 17 significant digits.
void write_series(std::ostream& out, const SeriesTable& table);
SeriesTable read_series(std::istream& in);

/// Tracer positions, one row per tracer and output time: `t,tracer,bubble,theta0,x1,x2`.
/// `bubble` is empty for tracers not tied to a bubble center.
void write_tracks(std::ostream& out, const RunRecord& record);

/// Writes series.csv, tracks.csv and manifest.json into `dir` (created if missing).
/// Throws std::runtime_error on I/O failure.
void write_series(const RunRecord& record, const std::filesystem::path& dir);

/// Rebuilds a record from the files written by write_series. Wall time and
/// diagnostics not stored in the files are left at their defaults.
RunRecord read_run(const std::filesystem::path& dir);

/// Manifest: config echo, code version, timing and run metadata as JSON text.
std::string manifest_json(const RunRecord& record);

}  // namespace asqg

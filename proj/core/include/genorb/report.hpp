#pragma once

// Batch front end: run configuration, table and dump builders, CSV/JSON output.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genorb/arcs.hpp"
#include "genorb/continuation.hpp"

namespace genorb {

enum class TableMode { fixed_theta_scan, fixed_theta, fixed_b, fixed_energy };

std::string to_string(TableMode mode);
std::string to_string(Frame frame);
std::string to_string(Rotation rotation);
TableMode parse_table_mode(std::string_view text);
Frame parse_frame(std::string_view text);
Rotation parse_rotation(std::string_view text);

/// first:last:step in degrees; a single value has step 0.
struct AngleRange {
  double first = 0.0;
  double last = 0.0;
  double step = 0.0;

  std::vector<double> values() const;
  bool operator==(const AngleRange&) const = default;
};

struct IndexRange {
  int first = 1;
  int last = 1;

  std::vector<int> values() const;
  bool operator==(const IndexRange&) const = default;
};

AngleRange parse_angle_range(std::string_view text);
IndexRange parse_index_range(std::string_view text);
/// Comma-separated mass ratios; also accepts sun-jupiter, earth-moon, pluto-charon.
std::vector<double> parse_mu_list(std::string_view text);

std::string to_string(const AngleRange& range);
std::string to_string(const IndexRange& range);
std::string mu_list_string(const std::vector<double>& mus);

/// Shortest decimal text that reads back to the same double.
std::string shortest(double value);

inline constexpr double kSunJupiter = 0.000953;
inline constexpr double kEarthMoon = 0.012143;
inline constexpr double kPlutoCharon = 0.108511;

/// Column suffix for a mass ratio: the system name for the astronomical
/// values, "mu<value>" otherwise.
std::string mu_label(double mu);

struct RunConfig {
  std::string command;
  TableMode mode = TableMode::fixed_theta_scan;
  AngleRange theta_deg{10.0, 10.0, 0.0};
  IndexRange I{1, 1};
  std::optional<double> b;
  std::optional<double> c0;
  std::vector<double> mu;
  Frame frame = Frame::barycentric;
  Rotation rotation = Rotation::direct;
  double rtol = 1e-12;
  double atol = 1e-12;
  std::size_t samples = 2001;
  std::string out;
  std::string fixtures;

  /// Sets one key from its text form; throws ConfigError on unknown keys or
  /// malformed values.
  void set(std::string_view key, std::string_view value);

  /// key=value lines in a fixed key order.
  std::string canonical() const;

  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::string& path);

  IntegratorOptions integrator() const;

  bool operator==(const RunConfig&) const = default;
};

/// One row of a generating-orbit table; `arc` is empty for infeasible rows.
struct TableRow {
  double key = 0.0;
  std::optional<GeneratingArc> arc;
  std::string note;
};

struct Table {
  std::string key_name;  // "theta_deg" or "I"
  std::vector<TableRow> rows;
};

/// Arcs selected by the config's mode, one row per theta (scan) or per I.
Table generating_table(const RunConfig& config);

struct ContinuationTable {
  Table arcs;
  std::vector<double> mus;
  std::vector<std::vector<SweepCell>> cells;  // [row][mu]
};

ContinuationTable continuation_table(const RunConfig& config);

void write_generating_csv(std::ostream& out, const Table& table);
void write_continuation_csv(std::ostream& out, const ContinuationTable& table);
std::string generating_json(const Table& table, const RunConfig& config);
std::string continuation_json(const ContinuationTable& table, const RunConfig& config);

struct OrbitDump {
  GeneratingArc arc;
  double mu = 0.0;
  Frame frame = Frame::barycentric;
  Trajectory trajectory;
  std::optional<ContinuedOrbit> orbit;  // set when mu > 0
};

/// Resolves the orbit for a single (theta, I, mu). Throws NotFoundError when
/// the continuation does not reach mu.
OrbitDump orbit_dump(const RunConfig& config);

/// t, rotating-frame state, energy and inertial state at `samples` equally
/// spaced times over one period.
void write_dump_csv(std::ostream& out, const OrbitDump& dump, std::size_t samples);
std::string dump_json(const OrbitDump& dump, const RunConfig& config);

/// Path with its extension replaced by .json.
std::string sidecar_path(const std::string& csv_path);

}  // namespace genorb

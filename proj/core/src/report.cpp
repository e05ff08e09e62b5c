#include "genorb/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "genorb/errors.hpp"

namespace genorb {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kDeg = std::numbers::pi / 180.0;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError(std::string(what) + ": not a number: '" + std::string(text) + "'");
  }
  return value;
}

long parse_integer(std::string_view text, std::string_view what) {
  text = trim(text);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(what) + ": not an integer: '" + std::string(text) + "'");
  }
  return value;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  // "-0.000000" would not diff cleanly against a "0.000000" fixture
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}

std::string full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json key_json(const Table& table, double key) {
  if (table.key_name == "I") return static_cast<int>(key);
  return key;
}

Json config_json(const RunConfig& config) {
  Json j = Json::object();
  std::istringstream lines(config.canonical());
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    j[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return j;
}

Json arc_json(const GeneratingArc& arc) {
  return {{"a", arc.ellipse.a},
          {"eps", arc.ellipse.eps},
          {"theta", arc.ellipse.theta},
          {"theta_deg", arc.ellipse.theta / kDeg},
          {"I", arc.I},
          {"J", arc.J},
          {"rotation", to_string(arc.ellipse.rotation)},
          {"q0", arc.q0()},
          {"H0", arc.H0},
          {"action", arc.action},
          {"tau", arc.tau},
          {"sigma", arc.sigma}};
}

Json winding_json(const WindingData& w) { return {{"rot", w.rot}, {"w1", w.w1}, {"w2", w.w2}}; }

Json orbit_json(const ContinuedOrbit& orbit) {
  return {{"q0", orbit.q0},
          {"action", orbit.action},
          {"energy", orbit.energy},
          {"period", orbit.period},
          {"beta0", orbit.beta0},
          {"winding", winding_json(orbit.winding)},
          {"energy_drift", orbit.energy_drift},
          {"closure", orbit.closure},
          {"residual", orbit.residual}};
}

double single_angle(const RunConfig& config) {
  if (config.theta_deg.step != 0.0) throw ConfigError("theta_deg: a single angle is required in this mode");
  return config.theta_deg.first * kDeg;
}

int single_index(const RunConfig& config) {
  if (config.I.first != config.I.last) throw ConfigError("I: a single index is required in this mode");
  return config.I.first;
}

}  // namespace

std::string to_string(TableMode mode) {
  switch (mode) {
    case TableMode::fixed_theta_scan: return "fixed-theta-scan";
    case TableMode::fixed_theta: return "fixed-theta";
    case TableMode::fixed_b: return "fixed-b";
    case TableMode::fixed_energy: return "fixed-energy";
  }
  return {};
}

std::string to_string(Frame frame) { return frame == Frame::barycentric ? "barycentric" : "m1"; }

std::string to_string(Rotation rotation) { return rotation == Rotation::direct ? "direct" : "retrograde"; }

TableMode parse_table_mode(std::string_view text) {
  text = trim(text);
  for (TableMode m : {TableMode::fixed_theta_scan, TableMode::fixed_theta, TableMode::fixed_b, TableMode::fixed_energy}) {
    if (text == to_string(m)) return m;
  }
  throw ConfigError("mode: expected fixed-theta-scan, fixed-theta, fixed-b or fixed-energy, got '" + std::string(text) +
                    "'");
}

Frame parse_frame(std::string_view text) {
  text = trim(text);
  if (text == "barycentric") return Frame::barycentric;
  if (text == "m1") return Frame::m1_centered;
  throw ConfigError("frame: expected m1 or barycentric, got '" + std::string(text) + "'");
}

Rotation parse_rotation(std::string_view text) {
  text = trim(text);
  if (text == "direct" || text == "+1" || text == "1") return Rotation::direct;
  if (text == "retrograde" || text == "-1") return Rotation::retrograde;
  throw ConfigError("rotation: expected direct or retrograde, got '" + std::string(text) + "'");
}

std::vector<double> AngleRange::values() const {
  if (step == 0.0) return {first};
  const double span = (last - first) / step;
  const long n = std::lround(span);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n + 1));
  for (long i = 0; i <= n; ++i) out.push_back(first + static_cast<double>(i) * step);
  return out;
}

std::vector<int> IndexRange::values() const {
  std::vector<int> out;
  for (int i = first; i <= last; ++i) out.push_back(i);
  return out;
}

AngleRange parse_angle_range(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) {
    const double v = parse_double(parts[0], "theta_deg");
    return {v, v, 0.0};
  }
  if (parts.size() != 3) throw ConfigError("theta_deg: expected 'value' or 'first:last:step'");
  AngleRange r{parse_double(parts[0], "theta_deg"), parse_double(parts[1], "theta_deg"),
               parse_double(parts[2], "theta_deg")};
  if (!(r.step > 0.0) || r.last < r.first) throw ConfigError("theta_deg: need step > 0 and first <= last");
  const double span = (r.last - r.first) / r.step;
  if (std::abs(span - std::round(span)) > 1e-9 * std::max(1.0, span)) {
    throw ConfigError("theta_deg: range is not a whole number of steps");
  }
  if (r.first == r.last) r.step = 0.0;
  return r;
}

IndexRange parse_index_range(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() > 2) throw ConfigError("I: expected 'n' or 'first:last'");
  const long first = parse_integer(parts[0], "I");
  const long last = parts.size() == 2 ? parse_integer(parts[1], "I") : first;
  if (first < 1 || last < first || last > 100000) throw ConfigError("I: need 1 <= first <= last");
  return {static_cast<int>(first), static_cast<int>(last)};
}

std::vector<double> parse_mu_list(std::string_view text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (std::string_view part : split(text, ',')) {
    double mu = 0.0;
    if (part == "sun-jupiter") {
      mu = kSunJupiter;
    } else if (part == "earth-moon") {
      mu = kEarthMoon;
    } else if (part == "pluto-charon") {
      mu = kPlutoCharon;
    } else {
      mu = parse_double(part, "mu");
    }
    if (!(mu >= 0.0 && mu < 1.0)) throw ConfigError("mu: mass ratio outside [0, 1)");
    out.push_back(mu);
  }
  return out;
}

std::string shortest(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string to_string(const AngleRange& range) {
  if (range.step == 0.0) return shortest(range.first);
  return shortest(range.first) + ":" + shortest(range.last) + ":" + shortest(range.step);
}

std::string to_string(const IndexRange& range) {
  if (range.first == range.last) return std::to_string(range.first);
  return std::to_string(range.first) + ":" + std::to_string(range.last);
}

std::string mu_list_string(const std::vector<double>& mus) {
  std::string out;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    if (i) out += ',';
    out += shortest(mus[i]);
  }
  return out;
}

std::string mu_label(double mu) {
  if (mu == kSunJupiter) return "sun_jupiter";
  if (mu == kEarthMoon) return "earth_moon";
  if (mu == kPlutoCharon) return "pluto_charon";
  return "mu" + shortest(mu);
}

void RunConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "command") {
    command = std::string(value);
  } else if (key == "mode") {
    mode = parse_table_mode(value);
  } else if (key == "theta_deg") {
    theta_deg = parse_angle_range(value);
  } else if (key == "I") {
    I = parse_index_range(value);
  } else if (key == "b") {
    b = value.empty() ? std::nullopt : std::optional(parse_double(value, "b"));
  } else if (key == "c0") {
    c0 = value.empty() ? std::nullopt : std::optional(parse_double(value, "c0"));
  } else if (key == "mu") {
    mu = parse_mu_list(value);
  } else if (key == "frame") {
    frame = parse_frame(value);
  } else if (key == "rotation") {
    rotation = parse_rotation(value);
  } else if (key == "rtol" || key == "atol") {
    const double v = parse_double(value, key);
    if (!(v > 0.0)) throw ConfigError(std::string(key) + ": must be positive");
    (key == "rtol" ? rtol : atol) = v;
  } else if (key == "samples") {
    const long n = parse_integer(value, "samples");
    if (n < 2) throw ConfigError("samples: need at least 2");
    samples = static_cast<std::size_t>(n);
  } else if (key == "out") {
    out = std::string(value);
  } else if (key == "fixtures") {
    fixtures = std::string(value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

std::string RunConfig::canonical() const {
  std::ostringstream s;
  s << "command=" << command << '\n'
    << "mode=" << to_string(mode) << '\n'
    << "theta_deg=" << to_string(theta_deg) << '\n'
    << "I=" << to_string(I) << '\n'
    << "b=" << (b ? shortest(*b) : "") << '\n'
    << "c0=" << (c0 ? shortest(*c0) : "") << '\n'
    << "mu=" << mu_list_string(mu) << '\n'
    << "frame=" << to_string(frame) << '\n'
    << "rotation=" << to_string(rotation) << '\n'
    << "rtol=" << shortest(rtol) << '\n'
    << "atol=" << shortest(atol) << '\n'
    << "samples=" << samples << '\n'
    << "out=" << out << '\n'
    << "fixtures=" << fixtures << '\n';
  return s.str();
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig config;
  std::vector<std::string> seen;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    seen.push_back(key);
    config.set(key, line.substr(eq + 1));
  }
  return config;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

IntegratorOptions RunConfig::integrator() const {
  IntegratorOptions options;
  options.rtol = rtol;
  options.atol = atol;
  return options;
}

Table generating_table(const RunConfig& config) {
  Table table;
  if (config.mode == TableMode::fixed_theta_scan) {
    table.key_name = "theta_deg";
    const int I = single_index(config);
    for (double deg : config.theta_deg.values()) {
      TableRow row{deg, std::nullopt, {}};
      try {
        row.arc = generating_arc(deg * kDeg, I, config.rotation);
      } catch (const std::exception& e) {
        row.note = e.what();
      }
      table.rows.push_back(std::move(row));
    }
    return table;
  }

  table.key_name = "I";
  SequenceSpec spec;
  spec.I_first = config.I.first;
  spec.I_last = config.I.last;
  spec.rotation = config.rotation;
  switch (config.mode) {
    case TableMode::fixed_theta:
      spec.mode = SequenceMode::fixed_theta;
      spec.value = single_angle(config);
      break;
    case TableMode::fixed_b:
      if (!config.b) throw ConfigError("fixed-b mode needs b");
      spec.mode = SequenceMode::fixed_b;
      spec.value = *config.b;
      break;
    case TableMode::fixed_energy:
      if (!config.c0) throw ConfigError("fixed-energy mode needs c0");
      spec.mode = SequenceMode::fixed_energy;
      spec.value = *config.c0;
      break;
    case TableMode::fixed_theta_scan:
      break;
  }
  Sequence seq;
  try {
    seq = build_sequence(spec);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  for (int I : config.I.values()) {
    TableRow row{static_cast<double>(I), std::nullopt, {}};
    const auto arc = std::find_if(seq.arcs.begin(), seq.arcs.end(), [I](const GeneratingArc& a) { return a.I == I; });
    if (arc != seq.arcs.end()) {
      row.arc = *arc;
    } else {
      const auto skip = std::find_if(seq.skipped.begin(), seq.skipped.end(), [I](const SkippedArc& s) { return s.I == I; });
      row.note = skip != seq.skipped.end() ? skip->reason : "no arc";
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ContinuationTable continuation_table(const RunConfig& config) {
  if (config.mu.empty()) throw ConfigError("continue needs at least one mass ratio (mu)");
  for (double mu : config.mu) {
    if (!(mu > 0.0)) throw ConfigError("continue: mass ratios must be positive");
  }
  ContinuationTable result;
  result.arcs = generating_table(config);
  result.mus = config.mu;

  std::vector<GeneratingArc> arcs;
  for (const auto& row : result.arcs.rows) {
    if (row.arc) arcs.push_back(*row.arc);
  }
  SweepOptions options;
  options.frame = config.frame;
  options.integrator = config.integrator();
  const auto swept = continuation_sweep(arcs, config.mu, options);

  std::size_t next = 0;
  for (const auto& row : result.arcs.rows) {
    if (row.arc) {
      result.cells.push_back(swept[next++]);
      continue;
    }
    std::vector<SweepCell> missing(config.mu.size());
    for (std::size_t j = 0; j < missing.size(); ++j) {
      missing[j].mu = config.mu[j];
      missing[j].failure = "no generating arc: " + row.note;
    }
    result.cells.push_back(std::move(missing));
  }
  return result;
}

void write_generating_csv(std::ostream& out, const Table& table) {
  out << table.key_name << ",a,q0,H0,A\n";
  for (const auto& row : table.rows) {
    out << shortest(row.key);
    if (row.arc) {
      out << ',' << fixed6(row.arc->ellipse.a) << ',' << fixed6(row.arc->q0()) << ',' << fixed6(row.arc->H0) << ','
          << fixed6(row.arc->action);
    } else {
      out << ",x,x,x,x";
    }
    out << '\n';
  }
}

void write_continuation_csv(std::ostream& out, const ContinuationTable& table) {
  out << table.arcs.key_name;
  for (double mu : table.mus) out << ",q0_" << mu_label(mu) << ",A_" << mu_label(mu);
  out << '\n';
  for (std::size_t i = 0; i < table.arcs.rows.size(); ++i) {
    out << shortest(table.arcs.rows[i].key);
    for (const auto& cell : table.cells[i]) {
      if (cell.orbit) {
        out << ',' << fixed6(std::abs(cell.orbit->q0)) << ',' << fixed6(cell.orbit->action);
      } else {
        out << ",x,x";
      }
    }
    out << '\n';
  }
}

std::string generating_json(const Table& table, const RunConfig& config) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r = {{table.key_name, key_json(table, row.key)}};
    if (row.arc) {
      r["arc"] = arc_json(*row.arc);
    } else {
      r["arc"] = nullptr;
      r["reason"] = row.note;
    }
    rows.push_back(std::move(r));
  }
  Json doc = {{"config", config_json(config)}, {"key", table.key_name}, {"rows", std::move(rows)}};
  return doc.dump(2) + "\n";
}

std::string continuation_json(const ContinuationTable& table, const RunConfig& config) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < table.arcs.rows.size(); ++i) {
    const auto& row = table.arcs.rows[i];
    Json r = {{table.arcs.key_name, key_json(table.arcs, row.key)}};
    r["arc"] = row.arc ? arc_json(*row.arc) : Json(nullptr);
    Json cells = Json::array();
    for (const auto& cell : table.cells[i]) {
      Json c = {{"mu", cell.mu}, {"label", mu_label(cell.mu)}, {"found", cell.orbit.has_value()}};
      if (cell.orbit) {
        c["orbit"] = orbit_json(*cell.orbit);
      } else {
        c["reason"] = cell.failure;
      }
      cells.push_back(std::move(c));
    }
    r["cells"] = std::move(cells);
    rows.push_back(std::move(r));
  }
  Json doc = {{"config", config_json(config)}, {"key", table.arcs.key_name}, {"rows", std::move(rows)}};
  return doc.dump(2) + "\n";
}

OrbitDump orbit_dump(const RunConfig& config) {
  if (config.mu.size() > 1) throw ConfigError("orbit-dump takes a single mass ratio");
  OrbitDump dump;
  dump.mu = config.mu.empty() ? 0.0 : config.mu.front();
  dump.frame = config.frame;
  try {
    dump.arc = generating_arc(single_angle(config), single_index(config), config.rotation);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (dump.mu == 0.0) {
    dump.trajectory = generating_orbit(dump.arc, config.frame);
    return dump;
  }
  SweepOptions options;
  options.frame = config.frame;
  options.integrator = config.integrator();
  auto cells = continue_arc(dump.arc, {dump.mu}, options);
  if (!cells.front().orbit) throw NotFoundError("orbit-dump: " + cells.front().failure);
  dump.orbit = std::move(cells.front().orbit);
  dump.trajectory = dump.orbit->trajectory;
  return dump;
}

void write_dump_csv(std::ostream& out, const OrbitDump& dump, std::size_t samples) {
  if (samples < 2) throw ConfigError("samples: need at least 2");
  const Trajectory& tr = dump.trajectory;
  const double t0 = tr.t_begin();
  const double span = tr.t_end() - t0;
  out << "t,q1,q2,p1,p2,H,Q1,Q2,P1,P2\n";
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = i + 1 == samples ? tr.t_end() : t0 + span * static_cast<double>(i) / static_cast<double>(samples - 1);
    const PhaseState s = tr.state_at(t);
    const PhaseState f = to_inertial(s, tr.params());
    out << full(t) << ',' << full(s.q1) << ',' << full(s.q2) << ',' << full(s.p1) << ',' << full(s.p2) << ','
        << full(tr.energy_at(t)) << ',' << full(f.q1) << ',' << full(f.q2) << ',' << full(f.p1) << ',' << full(f.p2)
        << '\n';
  }
}

std::string dump_json(const OrbitDump& dump, const RunConfig& config) {
  const GeneratingArc& arc = dump.arc;
  Json doc = {{"a", arc.ellipse.a},
              {"eps", arc.ellipse.eps},
              {"theta", arc.ellipse.theta},
              {"theta_deg", arc.ellipse.theta / kDeg},
              {"I", arc.I},
              {"mu", dump.mu},
              {"frame", to_string(dump.frame)},
              {"rotation", to_string(arc.ellipse.rotation)}};
  if (dump.orbit) {
    const ContinuedOrbit& o = *dump.orbit;
    doc["c"] = o.energy;
    doc["action"] = o.action;
    doc["beta0"] = o.beta0;
    doc["q0"] = o.q0;
    doc["period"] = o.period;
    doc["winding"] = winding_json(o.winding);
    doc["energy_drift"] = o.energy_drift;
    doc["closure"] = o.closure;
    doc["residual"] = o.residual;
  } else {
    // the mu = 0 orbit passes through the second primary, so its winding is undefined
    doc["c"] = arc.H0;
    doc["action"] = arc.action;
    doc["beta0"] = nullptr;
    doc["q0"] = generating_start(arc, dump.frame).q1;
    doc["period"] = arc.tau;
    doc["energy_drift"] = dump.trajectory.energy_drift();
  }
  doc["generating"] = arc_json(arc);
  doc["samples"] = config.samples;
  doc["columns"] = {"t", "q1", "q2", "p1", "p2", "H", "Q1", "Q2", "P1", "P2"};
  doc["config"] = config_json(config);
  return doc.dump(2) + "\n";
}

std::string sidecar_path(const std::string& csv_path) {
  const auto slash = csv_path.find_last_of('/');
  const auto dot = csv_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return csv_path + ".json";
  return csv_path.substr(0, dot) + ".json";
}

}  // namespace genorb

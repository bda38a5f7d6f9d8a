#include "octaframe/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "octaframe/error.hpp"

namespace octaframe {

namespace {

std::string shortest(double x) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, r.ptr};
}

std::string valence_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return std::to_string(a) + std::to_string(b);
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

void RunReport::set(const std::string& key, const std::string& value) {
  auto it = index_.find(key);
  if (it != index_.end()) {
    entries_[it->second].second = one_line(value);
    return;
  }
  index_.emplace(key, entries_.size());
  entries_.emplace_back(key, one_line(value));
}

void RunReport::set(const std::string& key, double value) { set(key, shortest(value)); }
void RunReport::set(const std::string& key, int value) { set(key, std::to_string(value)); }
void RunReport::set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

void RunReport::warn(const std::string& message) { warnings_.push_back(one_line(message)); }

void RunReport::time(const std::string& stage, double seconds) { timings_.emplace_back(stage, seconds); }

std::optional<std::string> RunReport::get(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].second;
}

std::string RunReport::to_text(bool with_timings) const {
  std::ostringstream out;
  for (const auto& [k, v] : entries_) out << k << ": " << v << '\n';
  out << "warnings: " << warnings_.size() << '\n';
  for (std::size_t i = 0; i < warnings_.size(); ++i) out << "warning_" << i << ": " << warnings_[i] << '\n';
  if (with_timings) {
    for (const auto& [stage, s] : timings_) out << "time." << stage << ": " << shortest(s) << '\n';
  }
  return out.str();
}

void RunReport::write(const std::filesystem::path& path, bool with_timings) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << to_text(with_timings);
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::vector<std::pair<std::string, std::string>> parse_report(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto pos = line.find(": ");
    if (pos == std::string::npos) {
      throw Error(ErrorKind::ParseError, "report line " + std::to_string(n) + ": missing ': '");
    }
    out.emplace_back(line.substr(0, pos), line.substr(pos + 2));
  }
  return out;
}

std::map<std::string, std::string> read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::map<std::string, std::string> out;
  for (auto& [k, v] : parse_report(in)) out.emplace(std::move(k), std::move(v));
  return out;
}

std::map<std::string, int> valence_histogram(const SingularityGraph& graph) {
  std::map<std::string, int> h;
  for (const SingularChain& c : graph.chains) ++h[valence_key(c.valence_start, c.valence_end)];
  return h;
}

std::map<std::string, int> valence_histogram(const std::vector<Polyline>& lines) {
  std::map<std::string, int> h;
  for (const Polyline& l : lines) ++h[valence_key(l.valence / 10, l.valence % 10)];
  return h;
}

void add_graph_summary(RunReport& report, const std::string& prefix, const SingularityGraph& graph) {
  report.set(prefix + ".chains", graph.chains.size());
  report.set(prefix + ".chains_35", graph.num_35());
  for (const auto& [k, n] : valence_histogram(graph)) report.set(prefix + ".valence_" + k, n);
  report.set(prefix + ".junctions", graph.junctions.size());
  report.set(prefix + ".boundary_nodes", graph.boundary_nodes.size());
  report.set(prefix + ".singular_faces", graph.faces.size());
  report.set(prefix + ".hot_spots", graph.hot_spots.size());
  if (!graph.unprojectable.empty()) {
    report.warn(prefix + ": " + std::to_string(graph.unprojectable.size()) + " vertices could not be projected");
  }
}

void add_smoothing_summary(RunReport& report, const std::string& prefix, const SmoothReport& smoothing) {
  report.set(prefix + ".sweeps", smoothing.sweeps);
  report.set(prefix + ".converged", smoothing.converged);
  report.set(prefix + ".max_change", smoothing.max_change);
  report.set(prefix + ".energy", smoothing.energy);
}

void add_plan_summary(RunReport& report, const std::string& prefix, const CorrectionPlan& plan) {
  report.set(prefix + ".strategy", to_string(plan.strategy));
  report.set(prefix + ".applicable", plan.applicable);
  report.set(prefix + ".constraints", plan.constraints.size());
  report.set(prefix + ".streamlines", plan.streamlines.size());
  report.set(prefix + ".snapped_chains", plan.snaps.size());
  if (plan.strategy == Strategy::Snap) report.set(prefix + ".snap_iterations", plan.snap_iterations);
  report.set(prefix + ".failures", plan.failures.size());
  report.set(prefix + ".diagnostics", plan.diagnostics.size());
  for (std::size_t i = 0; i < plan.diagnostics.size(); ++i) {
    report.set(prefix + ".diagnostic_" + std::to_string(i), plan.diagnostics[i]);
  }
}

}  // namespace octaframe

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "octaframe/correction.hpp"
#include "octaframe/io.hpp"

namespace octaframe {

/// Ordered `key: value` record of a pipeline run. Keys keep their first
/// insertion position; setting an existing key replaces its value.
class RunReport {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value);
  void set(const std::string& key, int value);
  void set(const std::string& key, std::size_t value) { set(key, static_cast<int>(value)); }
  void set(const std::string& key, bool value);
  void warn(const std::string& message);
  void time(const std::string& stage, double seconds);

  [[nodiscard]] std::optional<std::string> get(const std::string& key) const;
  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }
  [[nodiscard]] const std::vector<std::pair<std::string, double>>& timings() const { return timings_; }

  /// Timings are written only on request.
  [[nodiscard]] std::string to_text(bool with_timings = false) const;
  void write(const std::filesystem::path& path, bool with_timings = false) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::string> warnings_;
  std::vector<std::pair<std::string, double>> timings_;
};

/// Key/value pairs of a report file, in file order. Throws ParseError on a
/// line without `: `.
std::vector<std::pair<std::string, std::string>> parse_report(std::istream& in);
std::map<std::string, std::string> read_report(const std::filesystem::path& path);

/// Chain count per unordered end-valence pair, keyed "33", "35", "55", "0x", ...
std::map<std::string, int> valence_histogram(const SingularityGraph& graph);
std::map<std::string, int> valence_histogram(const std::vector<Polyline>& lines);

/// `<prefix>.chains`, `<prefix>.chains_35`, `<prefix>.valence_<pair>`,
/// `<prefix>.junctions`, `<prefix>.boundary_nodes`, `<prefix>.hot_spots`.
void add_graph_summary(RunReport& report, const std::string& prefix, const SingularityGraph& graph);

void add_smoothing_summary(RunReport& report, const std::string& prefix, const SmoothReport& smoothing);

/// Strategy, applicability, counts and one `<prefix>.diagnostic_<i>` per message.
void add_plan_summary(RunReport& report, const std::string& prefix, const CorrectionPlan& plan);

}  // namespace octaframe

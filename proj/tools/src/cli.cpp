#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "octaframe/correction.hpp"
#include "octaframe/error.hpp"
#include "octaframe/io.hpp"
#include "octaframe/report.hpp"

namespace octaframe::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string command;
  std::string mesh;
  std::string out = ".";
  std::string field;
  double angle_threshold = 30.0;
  double lambda = 0.95;
  int sweeps = 50;
  double step = 0.0;
  double snap_radius = 0.0;
  long long seed_rng = 0;
  bool verbose = false;
  bool timings = false;
  std::string strategy;
  std::vector<double> seed;
  std::vector<double> dir;
};

class Stopwatch {
 public:
  Stopwatch(RunReport& report, std::ostream& log, bool verbose) : report_(report), log_(log), verbose_(verbose) {}
  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    report_.time(stage, s);
    if (verbose_) log_ << "[octaframe] " << stage << " " << s << " s\n";
  }

 private:
  RunReport& report_;
  std::ostream& log_;
  bool verbose_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonApplicable: return kExitNonApplicable;
    case ErrorKind::CGDiverged:
    case ErrorKind::DegenerateTet:
    case ErrorKind::ConflictingConstraint:
    case ErrorKind::NotARotation: return kExitSolver;
    default: return kExitFailure;
  }
}

Vec3 to_vec(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

Polyline streamline_polyline(const Streamline& s) {
  Polyline l;
  l.points = s.points;
  return l;
}

class Pipeline {
 public:
  Pipeline(const Options& o, std::ostream& out, std::ostream& err)
      : o_(o), out_(out), err_(err), clock_(report_, err, o.verbose) {}

  int run() {
    fs::create_directories(o_.out);
    report_.set("command", o_.command);
    report_.set("mesh", o_.mesh);
    report_.set("angle_threshold", o_.angle_threshold);
    report_.set("lambda", o_.lambda);
    report_.set("sweeps", o_.sweeps);
    report_.set("seed_rng", std::to_string(o_.seed_rng));
    load();
    if (o_.command == "solve") return solve_cmd();
    if (o_.command == "graph") return graph_cmd(false);
    if (o_.command == "detect35") return graph_cmd(true);
    if (o_.command == "correct") return correct_cmd();
    if (o_.command == "trace") return trace_cmd();
    return report_cmd();
  }

  void write_report() { report_.write(path("report.txt"), o_.timings); }

  RunReport& report() { return report_; }

 private:
  fs::path path(const char* name) const { return fs::path(o_.out) / name; }

  void load() {
    TetMesh mesh = read_medit(o_.mesh);
    clock_.lap("read");
    domain_ = Domain::build(std::move(mesh), o_.angle_threshold);
    clock_.lap("domain");
    const TetMesh& m = domain_->mesh;
    report_.set("vertices", m.num_vertices());
    report_.set("tets", m.num_tets());
    report_.set("feature_curves", domain_->features.curves.size());
    report_.set("corners", domain_->features.corners.size());
    config_.relaxation = o_.lambda;
    config_.smoothing_sweeps = o_.sweeps;
    bcs_ = build_boundary_conditions(*domain_);
    report_.set("bc.dirichlet", bcs_.dirichlet.size());
    report_.set("bc.tangency", bcs_.tangency.size());
  }

  void field() {
    if (!o_.field.empty()) {
      field_ = read_field(o_.field, domain_->mesh);
      field_.bcs = bcs_;
      report_.set("field.source", o_.field);
      clock_.lap("read_field");
      return;
    }
    SmoothReport smoothing;
    field_ = compute_field(*domain_, bcs_, config_, &smoothing);
    report_.set("field.source", "solved");
    add_smoothing_summary(report_, "solve", smoothing);
    clock_.lap("solve");
  }

  void graph() {
    graph_ = extract_graph(*domain_, field_);
    add_graph_summary(report_, "graph", graph_);
    clock_.lap("graph");
  }

  int solve_cmd() {
    field();
    write_field(field_, path("field.txt"));
    write_report();
    return kExitOk;
  }

  int graph_cmd(bool list_35) {
    field();
    graph();
    if (list_35) {
      const auto chains = detect_35(graph_);
      report_.set("detect35.chains", chains.size());
      for (std::size_t i = 0; i < chains.size(); ++i) {
        const SingularChain& c = chains[i];
        std::ostringstream s;
        s << "chain " << c.id << " faces " << c.faces.size() << " valence " << c.valence_start << "-" << c.valence_end;
        report_.set("detect35.chain_" + std::to_string(i), s.str());
      }
      for (const SingularChain& c : chains) out_ << "chain " << c.id << " " << c.valence_start << "-" << c.valence_end << '\n';
    }
    write_field(field_, path("field.txt"));
    write_vtk_graph(domain_->mesh, graph_, path("graph.vtk"));
    write_report();
    return kExitOk;
  }

  CorrectionPlan plan(Strategy s) {
    ExtrusionOptions ext;
    ext.tracer.step = o_.step;
    SnapOptions snap;
    snap.free_radius = o_.snap_radius;
    switch (s) {
      case Strategy::ExtrudeCurves: return extrude_feature_curves(*domain_, field_, ext);
      case Strategy::ExtrudeNodes: return extrude_singular_nodes(*domain_, field_, graph_, ext);
      case Strategy::Snap: return snap_35_curves(*domain_, field_, graph_, snap);
    }
    return {};
  }

  void write_streamlines(const CorrectionPlan& p) {
    std::vector<Polyline> lines;
    for (const TracedLine& t : p.streamlines) lines.push_back(streamline_polyline(t.line));
    write_vtk_polylines(lines, path("streamlines.vtk"), "octaframe streamlines");
  }

  int correct_cmd() {
    Strategy s = Strategy::Snap;
    if (o_.strategy == "extrude-curve") s = Strategy::ExtrudeCurves;
    if (o_.strategy == "extrude-node") s = Strategy::ExtrudeNodes;
    field();
    graph();
    report_.set("before.chains", graph_.chains.size());
    report_.set("before.chains_35", graph_.num_35());
    const CorrectionPlan p = plan(s);
    clock_.lap("plan");
    add_plan_summary(report_, "plan", p);
    if (s != Strategy::Snap) write_streamlines(p);
    if (!p.applicable) {
      report_.set("status", "non-applicable");
      write_vtk_graph(domain_->mesh, graph_, path("graph.vtk"));
      write_report();
      err_ << "octaframe: " << to_string(s) << " is not applicable";
      if (!p.failures.empty()) err_ << ": " << p.failures.front();
      err_ << '\n';
      return kExitNonApplicable;
    }
    const CorrectionResult r = apply_plan(*domain_, field_, p, config_);
    clock_.lap("correct");
    add_smoothing_summary(report_, "correct", r.smoothing);
    add_graph_summary(report_, "after", r.graph);
    report_.set("after.chains_35", r.graph.num_35());
    const bool complete = r.graph.num_35() == 0;
    report_.set("correction.complete", complete);
    if (!complete) report_.warn(std::to_string(r.graph.num_35()) + " 3-5 chains remain after correction");
    report_.set("status", "ok");
    write_field(r.field, path("field.txt"));
    write_vtk_graph(domain_->mesh, r.graph, path("graph.vtk"));
    write_report();
    return kExitOk;
  }

  int trace_cmd() {
    field();
    TracerConfig cfg;
    cfg.step = o_.step;
    const Streamline s = trace(*domain_, field_, to_vec(o_.seed), to_vec(o_.dir), cfg);
    clock_.lap("trace");
    report_.set("trace.termination", to_string(s.termination));
    report_.set("trace.points", s.size());
    report_.set("trace.length", s.length);
    report_.set("trace.min_quality", s.min_quality);
    const Vec3& e = s.points.back();
    report_.set("trace.end", std::to_string(e.x()) + "," + std::to_string(e.y()) + "," + std::to_string(e.z()));
    write_vtk_polylines({streamline_polyline(s)}, path("streamline.vtk"), "octaframe streamline");
    write_report();
    return kExitOk;
  }

  int report_cmd() {
    field();
    graph();
    for (Strategy s : {Strategy::ExtrudeCurves, Strategy::ExtrudeNodes, Strategy::Snap}) {
      const std::string key = std::string("strategy.") + to_string(s);
      try {
        const CorrectionPlan p = plan(s);
        report_.set(key + ".applicable", p.applicable);
        report_.set(key + ".failures", p.failures.size());
        if (!p.applicable && !p.failures.empty()) report_.set(key + ".reason", p.failures.front());
      } catch (const Error& e) {
        report_.set(key + ".applicable", false);
        report_.set(key + ".reason", e.what());
      }
    }
    clock_.lap("plans");
    const SurfaceIndices idx = surface_cross_indices(*domain_, field_);
    report_.set("surface.components", idx.components.size());
    for (std::size_t i = 0; i < idx.components.size(); ++i) {
      const auto& c = idx.components[i];
      report_.set("surface.component_" + std::to_string(i), std::to_string(c.total_quarters) + "/4 (euler " +
                                                                 std::to_string(c.euler_characteristic) + ")");
    }
    write_field(field_, path("field.txt"));
    write_vtk_graph(domain_->mesh, graph_, path("graph.vtk"));
    write_report();
    return kExitOk;
  }

  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
  RunReport report_;
  Stopwatch clock_;
  std::optional<Domain> domain_;
  SolverConfig config_;
  BoundaryConditionSet bcs_;
  FrameField field_;
  SingularityGraph graph_;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--mesh", o.mesh, "MEDIT tetrahedral mesh")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory")->capture_default_str();
  sub->add_option("--field", o.field, "precomputed field.txt instead of solving")->check(CLI::ExistingFile);
  sub->add_option("--angle-threshold", o.angle_threshold, "feature dihedral threshold (deg)")
      ->check(CLI::Range(0.0, 180.0))
      ->capture_default_str();
  sub->add_option("--lambda", o.lambda, "projection weight of the smoothing sweeps")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_option("--sweeps", o.sweeps, "nonlinear smoothing sweeps")->check(CLI::NonNegativeNumber)->capture_default_str();
  sub->add_option("--step", o.step, "streamline step (0: half the mean edge length)")->check(CLI::NonNegativeNumber);
  sub->add_option("--snap-radius", o.snap_radius, "free-boundary radius (0: 3 mean edge lengths)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--seed-rng", o.seed_rng, "reserved; the pipeline is deterministic");
  sub->add_flag("--verbose", o.verbose, "stage timings on stderr");
  sub->add_flag("--timings", o.timings, "append stage timings to the report");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Octahedral frame fields: solve, singularity graphs and 3-5 corrections", "octaframe"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"solve", "compute the frame field"},
      {"graph", "extract the singularity graph"},
      {"detect35", "list the 3-5 singular chains"},
      {"correct", "apply a correction strategy"},
      {"trace", "trace one streamline"},
      {"report", "full pipeline summary with strategy applicability"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    sub->callback([&o, n = std::string(name)] { o.command = n; });
    if (std::string(name) == "correct") {
      sub->add_option("--strategy", o.strategy, "correction strategy")
          ->required()
          ->check(CLI::IsMember({"extrude-curve", "extrude-node", "snap"}));
    }
    if (std::string(name) == "trace") {
      sub->add_option("--seed", o.seed, "seed point x,y,z")->required()->delimiter(',')->expected(3);
      sub->add_option("--dir", o.dir, "initial direction dx,dy,dz")->required()->delimiter(',')->expected(3);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "octaframe: " << e.what() << '\n';
    return kExitUsage;
  }
  if (o.command == "trace" && (o.seed.size() != 3 || o.dir.size() != 3)) {
    err << "octaframe: --seed and --dir take three comma-separated numbers\n";
    return kExitUsage;
  }

  try {
    SolverConfig c;
    c.relaxation = o.lambda;
    c.smoothing_sweeps = o.sweeps;
    c.validate();
  } catch (const Error& e) {
    err << "octaframe: " << e.what() << '\n';
    return kExitUsage;
  }

  Pipeline p(o, out, err);
  try {
    return p.run();
  } catch (const Error& e) {
    err << "octaframe: " << to_string(e.kind()) << ": " << e.what() << '\n';
    p.report().set("status", std::string("error ") + std::string(to_string(e.kind())));
    p.report().warn(e.what());
    try {
      p.write_report();
    } catch (const Error&) {
    }
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "octaframe: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace octaframe::cli

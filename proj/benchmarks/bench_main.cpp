#include <random>

#include <benchmark/benchmark.h>

#include "octaframe/correction.hpp"
#include "octaframe/generate.hpp"
#include "octaframe/io.hpp"

using namespace octaframe;

namespace {

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)).normalized().toRotationMatrix();
}

const Domain& notch() {
  static const Domain d = Domain::build(read_medit(std::string(OCTAFRAME_FIXTURE_DIR) + "/notch.mesh"));
  return d;
}

const FrameField& notch_field() {
  static const FrameField f = compute_field(notch(), build_boundary_conditions(notch()), SolverConfig{});
  return f;
}

void BM_CoeffsFromRotation(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Mat3 R = random_rotation(rng);
  for (auto _ : state) benchmark::DoNotOptimize(coeffs_from_rotation(R));
}
BENCHMARK(BM_CoeffsFromRotation);

void BM_ProjectCold(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  Coeffs q = coeffs_from_rotation(random_rotation(rng));
  for (int i = 0; i < 9; ++i) q[i] += 0.1 * n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(project_to_octahedral(q));
}
BENCHMARK(BM_ProjectCold);

void BM_ProjectWarm(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const Mat3 R = random_rotation(rng);
  const Mat3 near = R * Eigen::AngleAxisd(0.05, Vec3::UnitX()).toRotationMatrix();
  const Coeffs q = coeffs_from_rotation(R);
  for (auto _ : state) benchmark::DoNotOptimize(project_to_octahedral(q, &near));
}
BENCHMARK(BM_ProjectWarm);

void BM_AssembleStiffness(benchmark::State& state) {
  const TetMesh m = generate_box(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)),
                                 static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(m));
}
BENCHMARK(BM_AssembleStiffness)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_ComputeFieldNotch(benchmark::State& state) {
  const Domain& d = notch();
  const BoundaryConditionSet bcs = build_boundary_conditions(d);
  for (auto _ : state) benchmark::DoNotOptimize(compute_field(d, bcs, SolverConfig{}));
}
BENCHMARK(BM_ComputeFieldNotch)->Unit(benchmark::kSecond)->Iterations(1);

void BM_ExtractGraphNotch(benchmark::State& state) {
  const FrameField& f = notch_field();
  for (auto _ : state) benchmark::DoNotOptimize(extract_graph(notch(), f));
}
BENCHMARK(BM_ExtractGraphNotch)->Unit(benchmark::kMillisecond);

void BM_TraceNotch(benchmark::State& state) {
  const FrameField& f = notch_field();
  for (auto _ : state) benchmark::DoNotOptimize(trace(notch(), f, Vec3(0.3, 0.3, 0.5), Vec3::UnitX()));
}
BENCHMARK(BM_TraceNotch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mep {

struct BenchmarkInstance {
  std::string label;  // e.g. "Exponential/30/2"
  std::string group;  // e.g. "Exponential-30"
  std::filesystem::path scenario;
};

struct BenchmarkReference {
  double gb_mep = 0.0;
  double ga_mep_best = 0.0;
  double semi_lagrangian = 0.0;

  /// Best of the two published competitor exposures.
  double reference() const { return std::min(gb_mep, ga_mep_best); }
};

struct BenchmarkRecord {
  std::string label;
  std::string group;
  std::optional<double> exposure;
  double wall_time = 0.0;
  std::optional<BenchmarkReference> reference;
  std::string error;
};

struct GroupSummary {
  std::string group;
  std::size_t count = 0;
  double mean_improvement = 0.0;
  /// Sample standard deviation (n - 1).
  double std_improvement = 0.0;
};

/// {"instances": [{"label", "group", "scenario"}]}; scenario paths are relative to the manifest.
std::vector<BenchmarkInstance> load_manifest(const std::filesystem::path& file);

/// CSV with header label,group,gb_mep,ga_mep_best,semi_lagrangian.
std::map<std::string, BenchmarkReference> load_references(const std::filesystem::path& file);
std::map<std::string, BenchmarkReference> parse_references(const std::string& text);

/// 100 (ref - ours) / ref.
double improvement_percent(double reference, double ours);

std::vector<GroupSummary> summarize(const std::vector<BenchmarkRecord>& records);

/// Job count from MEP_JOBS, else the hardware concurrency.
unsigned default_jobs();

/// Runs every instance, up to `jobs` at a time; failures are recorded, not thrown.
std::vector<BenchmarkRecord> run_benchmark(
    const std::vector<BenchmarkInstance>& instances,
    const std::map<std::string, BenchmarkReference>& references, unsigned jobs,
    const std::optional<std::filesystem::path>& out_dir = std::nullopt);

std::string benchmark_report(const std::vector<BenchmarkRecord>& records,
                             const std::vector<GroupSummary>& groups);

}  // namespace mep

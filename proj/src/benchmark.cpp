#include "mep/benchmark.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mep/errors.hpp"
#include "mep/runner.hpp"
#include "mep/scenario.hpp"

namespace mep {

std::vector<BenchmarkInstance> load_manifest(const std::filesystem::path& file) {
  using nlohmann::json;
  const std::string text = read_text(file);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object() || !doc.contains("instances") || !doc["instances"].is_array()) {
    throw ParseError("manifest needs an 'instances' list");
  }
  std::vector<BenchmarkInstance> out;
  for (const json& item : doc["instances"]) {
    if (!item.is_object() || !item.contains("label") || !item.contains("scenario")) {
      throw ParseError("manifest instance needs 'label' and 'scenario'");
    }
    BenchmarkInstance inst;
    inst.label = item["label"].get<std::string>();
    inst.group = item.value("group", std::string());
    inst.scenario = file.parent_path() / item["scenario"].get<std::string>();
    out.push_back(std::move(inst));
  }
  return out;
}

std::map<std::string, BenchmarkReference> parse_references(const std::string& text) {
  std::map<std::string, BenchmarkReference> out;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream row(line);
    for (std::string c; std::getline(row, c, ',');) cols.push_back(c);
    if (cols.size() != 5) throw ParseError("expected 5 columns", lineno);
    try {
      out[cols[0]] = {std::stod(cols[2]), std::stod(cols[3]), std::stod(cols[4])};
    } catch (const std::exception&) {
      throw ParseError("malformed number", lineno);
    }
  }
  return out;
}

std::map<std::string, BenchmarkReference> load_references(const std::filesystem::path& file) {
  return parse_references(read_text(file));
}

double improvement_percent(double reference, double ours) {
  return 100.0 * (reference - ours) / reference;
}

std::vector<GroupSummary> summarize(const std::vector<BenchmarkRecord>& records) {
  std::map<std::string, std::vector<double>> by_group;
  for (const auto& r : records) {
    if (r.exposure && r.reference) {
      by_group[r.group].push_back(improvement_percent(r.reference->reference(), *r.exposure));
    }
  }
  std::vector<GroupSummary> out;
  for (const auto& [group, v] : by_group) {
    GroupSummary s{group, v.size()};
    for (double x : v) s.mean_improvement += x;
    s.mean_improvement /= static_cast<double>(v.size());
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - s.mean_improvement) * (x - s.mean_improvement);
      s.std_improvement = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    out.push_back(s);
  }
  return out;
}

unsigned default_jobs() {
  if (const char* env = std::getenv("MEP_JOBS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<BenchmarkRecord> run_benchmark(
    const std::vector<BenchmarkInstance>& instances,
    const std::map<std::string, BenchmarkReference>& references, unsigned jobs,
    const std::optional<std::filesystem::path>& out_dir) {
  std::vector<BenchmarkRecord> records(instances.size());
  jobs = std::max(1u, jobs);
  // Split the hardware between concurrent instances.
  const unsigned inner = std::max(1u, std::thread::hardware_concurrency() / jobs);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < instances.size();) {
      const BenchmarkInstance& inst = instances[k];
      BenchmarkRecord& rec = records[k];
      rec.label = inst.label;
      rec.group = inst.group;
      if (auto it = references.find(inst.label); it != references.end()) rec.reference = it->second;
      try {
        RunOptions opts;
        opts.workers = inner;
        if (out_dir) {
          std::string dir = inst.label;
          for (char& c : dir) {
            if (c == '/') c = '_';
          }
          opts.out_dir = *out_dir / dir;
        }
        const RunReport report = run_solve(load_scenario(inst.scenario), opts);
        const SourceOutcome& first = report.sources.front();
        if (first.result) {
          rec.exposure = first.result->exposure;
          rec.wall_time = first.result->wall_time;
        } else {
          rec.error = first.error;
        }
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < std::min<std::size_t>(jobs, instances.size()); ++j) {
    pool.emplace_back(worker);
  }
  for (auto& t : pool) t.join();
  return records;
}

std::string benchmark_report(const std::vector<BenchmarkRecord>& records,
                             const std::vector<GroupSummary>& groups) {
  std::ostringstream out;
  out.precision(17);
  out << "label,group,exposure,wall_time,reference,improvement,status\n";
  for (const auto& r : records) {
    out << r.label << ',' << r.group << ',';
    if (r.exposure) out << *r.exposure;
    out << ',' << r.wall_time << ',';
    if (r.reference) out << r.reference->reference();
    out << ',';
    if (r.reference && r.exposure) out << improvement_percent(r.reference->reference(), *r.exposure);
    out << ',' << (r.error.empty() ? "ok" : "failed: " + r.error) << '\n';
  }
  out << "\ngroup,count,mean_improvement,std_improvement\n";
  for (const auto& g : groups) {
    out << g.group << ',' << g.count << ',' << g.mean_improvement << ',' << g.std_improvement
        << '\n';
  }
  return out.str();
}

}  // namespace mep

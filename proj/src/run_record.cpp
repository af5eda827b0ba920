#include "ude/run_record.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace ude {

void RunRecord::record_improvement(std::uint64_t eval_count, double fitness,
                                   bool parent_successful) {
  if (trajectory.empty()) {
    trajectory.push_back({eval_count, fitness});
    final_best = fitness;
    return;  // baseline point; counters start with the next update
  }
  if (!trajectory.empty() && trajectory.back().eval_count == eval_count) {
    trajectory.back().best_so_far = fitness;
  } else {
    trajectory.push_back({eval_count, fitness});
  }
  final_best = fitness;
  ++total_bsf_updates;
  if (!parent_successful) ++failed_parent_updates;
}

void RunRecord::record_initial(std::uint64_t eval_count, double fitness) {
  if (!trajectory.empty() && trajectory.back().eval_count == eval_count) {
    trajectory.back().best_so_far = fitness;
  } else {
    trajectory.push_back({eval_count, fitness});
  }
  final_best = fitness;
}

void RunRecord::record_checkpoint(std::uint64_t eval_count) {
  if (trajectory.empty()) return;
  if (trajectory.back().eval_count >= eval_count) return;
  trajectory.push_back({eval_count, trajectory.back().best_so_far});
}

double RunRecord::best_at(std::uint64_t eval_count) const {
  // Last point with eval_count <= query.
  auto it = std::upper_bound(
      trajectory.begin(), trajectory.end(), eval_count,
      [](std::uint64_t e, const TrajectoryPoint& p) { return e < p.eval_count; });
  if (it == trajectory.begin()) return std::numeric_limits<double>::infinity();
  return std::prev(it)->best_so_far;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_record_csv(const RunRecord& record, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "trial_id,eval_count,best_so_far\n";
  for (const auto& p : record.trajectory) {
    out << record.trial << ',' << p.eval_count << ',' << format_double(p.best_so_far)
        << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_record_json(const RunRecord& record, const std::string& path) {
  nlohmann::json j;
  j["algorithm"] = record.algorithm;
  j["problem"] = record.problem;
  j["trial"] = record.trial;
  j["seed"] = record.seed;
  j["config_hash"] = record.config_hash;
  j["dimension"] = record.dimension;
  j["budget"] = record.budget;
  j["final_best"] = record.final_best;
  j["total_bsf_updates"] = record.total_bsf_updates;
  j["failed_parent_updates"] = record.failed_parent_updates;
  if (!record.t_trace.empty()) {
    // The in-memory trace holds one entry per offspring; files keep a
    // uniformly thinned view (plus the final entry) to bound their size.
    const std::size_t n = record.t_trace.size();
    const std::size_t step = n <= 512 ? 1 : (n + 511) / 512;
    auto& arr = j["t_trace"] = nlohmann::json::array();
    for (std::size_t i = 0; i < n; i += step) {
      const auto& p = record.t_trace[i];
      arr.push_back({p.eval_count, p.best_so_far});
    }
    if ((n - 1) % step != 0) {
      const auto& p = record.t_trace[n - 1];
      arr.push_back({p.eval_count, p.best_so_far});
    }
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

RunRecord read_record(const std::string& csv_path, const std::string& json_path) {
  RunRecord r;
  {
    std::ifstream in(json_path);
    if (!in) throw std::runtime_error("cannot read " + json_path);
    nlohmann::json j;
    in >> j;
    r.algorithm = j.at("algorithm").get<std::string>();
    r.problem = j.at("problem").get<std::string>();
    r.trial = j.at("trial").get<std::uint32_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.dimension = j.at("dimension").get<std::uint32_t>();
    r.budget = j.at("budget").get<std::uint64_t>();
    r.final_best = j.at("final_best").get<double>();
    r.total_bsf_updates = j.at("total_bsf_updates").get<std::uint64_t>();
    r.failed_parent_updates = j.at("failed_parent_updates").get<std::uint64_t>();
    if (j.contains("t_trace")) {
      for (const auto& e : j["t_trace"]) {
        r.t_trace.push_back({e.at(0).get<std::uint64_t>(), e.at(1).get<double>()});
      }
    }
  }
  {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot read " + csv_path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos) {
        throw std::runtime_error("malformed row in " + csv_path + ": " + line);
      }
      TrajectoryPoint p;
      p.eval_count = std::stoull(line.substr(c1 + 1, c2 - c1 - 1));
      p.best_so_far = std::stod(line.substr(c2 + 1));
      r.trajectory.push_back(p);
    }
  }
  return r;
}

}  // namespace ude

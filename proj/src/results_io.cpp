#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "broad/simharness.hpp"
#include "json.hpp"

namespace broad {

namespace {

constexpr const char* kCsvHeader =
    "algorithm,sweep_variable,sweep_value,trial,seed,satisfied_count,backhaul_util,access_util,dbs_x_m,dbs_y_m,dbs_h_m,"
    "runtime_ms";

std::string sig6(double v) {
  if (v == 0) v = 0;  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double round_sig6(double v) { return std::stod(sig6(v)); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::optional<ResultFormat> parse_result_format(const std::string& name) {
  if (name == "csv") return ResultFormat::kCsv;
  if (name == "json-lines" || name == "jsonl") return ResultFormat::kJsonLines;
  return std::nullopt;
}

void emit_results(const std::vector<TrialResult>& results, ResultFormat format, std::ostream& out) {
  if (format == ResultFormat::kCsv) {
    out << kCsvHeader << '\n';
    for (const auto& r : results) {
      out << r.algorithm << ',' << r.sweep_variable << ',' << sig6(r.sweep_value) << ',' << r.trial << ',' << r.seed
          << ',' << r.satisfied_count << ',' << sig6(r.backhaul_utilization) << ',' << sig6(r.access_utilization)
          << ',' << sig6(r.dbs_position.x) << ',' << sig6(r.dbs_position.y) << ',' << sig6(r.dbs_position.h) << ','
          << sig6(r.runtime_ms) << '\n';
    }
    return;
  }
  for (const auto& r : results) {
    nlohmann::ordered_json j;
    j["algorithm"] = r.algorithm;
    j["sweep_variable"] = r.sweep_variable;
    j["sweep_value"] = round_sig6(r.sweep_value);
    j["trial"] = r.trial;
    j["seed"] = r.seed;
    j["satisfied_count"] = r.satisfied_count;
    j["backhaul_util"] = round_sig6(r.backhaul_utilization);
    j["access_util"] = round_sig6(r.access_utilization);
    j["dbs_x_m"] = round_sig6(r.dbs_position.x);
    j["dbs_y_m"] = round_sig6(r.dbs_position.y);
    j["dbs_h_m"] = round_sig6(r.dbs_position.h);
    j["runtime_ms"] = round_sig6(r.runtime_ms);
    out << j.dump() << '\n';
  }
}

void emit_results(const std::vector<TrialResult>& results, ResultFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  emit_results(results, format, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::vector<TrialResult> parse_results(std::istream& in, ResultFormat format) {
  std::vector<TrialResult> results;
  std::string line;
  if (format == ResultFormat::kCsv) {
    if (!std::getline(in, line) || line != kCsvHeader) {
      throw std::invalid_argument("missing or unexpected CSV header");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      if (f.size() != 12) throw std::invalid_argument("CSV row has " + std::to_string(f.size()) + " fields");
      TrialResult r;
      r.algorithm = f[0];
      r.sweep_variable = f[1];
      r.sweep_value = std::stod(f[2]);
      r.trial = std::stoull(f[3]);
      r.seed = std::stoull(f[4]);
      r.satisfied_count = std::stoull(f[5]);
      r.backhaul_utilization = std::stod(f[6]);
      r.access_utilization = std::stod(f[7]);
      r.dbs_position = {std::stod(f[8]), std::stod(f[9]), std::stod(f[10])};
      r.runtime_ms = std::stod(f[11]);
      results.push_back(r);
    }
    return results;
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    TrialResult r;
    r.algorithm = j.at("algorithm").get<std::string>();
    r.sweep_variable = j.at("sweep_variable").get<std::string>();
    r.sweep_value = j.at("sweep_value").get<double>();
    r.trial = j.at("trial").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.satisfied_count = j.at("satisfied_count").get<std::size_t>();
    r.backhaul_utilization = j.at("backhaul_util").get<double>();
    r.access_utilization = j.at("access_util").get<double>();
    r.dbs_position = {j.at("dbs_x_m").get<double>(), j.at("dbs_y_m").get<double>(), j.at("dbs_h_m").get<double>()};
    r.runtime_ms = j.at("runtime_ms").get<double>();
    results.push_back(r);
  }
  return results;
}

}  // namespace broad

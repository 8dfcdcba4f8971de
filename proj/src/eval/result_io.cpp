#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bcgnn/result_io.hpp"

namespace bcgnn::eval {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string results_to_json(const ProposalResults& results) {
  ordered_json doc = ordered_json::object();
  for (const auto& [id, proposals] : results) {
    ordered_json list = ordered_json::array();
    for (const auto& p : proposals)
      list.push_back(ordered_json{{"start", p.start}, {"end", p.end}, {"score", p.score}});
    doc[id] = std::move(list);
  }
  return doc.dump(1) + "\n";
}

ProposalResults parse_results(const std::string& json_text) {
  ProposalResults out;
  try {
    const json doc = json::parse(json_text);
    if (!doc.is_object()) throw ValidationError("results: top level must be an object");
    for (const auto& [id, list] : doc.items()) {
      auto& proposals = out[id];
      for (const auto& p : list) {
        ScoredProposal s{p.at("start").get<double>(), p.at("end").get<double>(),
                         p.at("score").get<double>()};
        if (!(s.start < s.end) || !(s.score >= 0.0)) {
          throw ValidationError("results: invalid proposal in video " + id);
        }
        proposals.push_back(s);
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("results: ") + e.what());
  }
  return out;
}

void save_results(const std::filesystem::path& path, const ProposalResults& results) {
  std::ofstream out(path, std::ios::trunc);
  if (!(out << results_to_json(results))) throw ValidationError("cannot write " + path.string());
}

ProposalResults load_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open results file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_results(ss.str());
}

MetricsReport make_report(const std::map<std::string, VideoResult>& per_video,
                          std::span<const double> thresholds, std::string config_hash) {
  MetricsReport r;
  r.config_hash = std::move(config_hash);
  r.thresholds.assign(thresholds.begin(), thresholds.end());
  r.curve = ar_curve(per_video, thresholds);
  r.auc = auc(r.curve);
  return r;
}

std::string report_to_json(const MetricsReport& report) {
  ordered_json doc;
  doc["config_hash"] = report.config_hash;
  for (std::size_t an : {1, 10, 50, 100}) doc["AR@" + std::to_string(an)] = report.ar_at(an);
  doc["AUC"] = report.auc;
  doc["thresholds"] = report.thresholds;
  doc["curve"] = report.curve;
  return doc.dump(2) + "\n";
}

}  // namespace bcgnn::eval

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bcgnn/data.hpp"

namespace bcgnn::data {

using nlohmann::json;

std::vector<VideoAnnotation> parse_annotations(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("annotations: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("videos") || !doc["videos"].is_array()) {
    throw ValidationError("annotations: expected an object with a \"videos\" array");
  }
  std::vector<VideoAnnotation> videos;
  try {
    for (const auto& v : doc["videos"]) {
      VideoAnnotation a;
      a.id = v.at("id").get<std::string>();
      a.duration_snippets = v.at("duration_snippets").get<std::size_t>();
      for (const auto& inst : v.at("instances")) {
        GroundTruthInstance g{inst.at("start").get<double>(), inst.at("end").get<double>()};
        if (!(g.start >= 0.0 && g.start < g.end &&
              g.end <= static_cast<double>(a.duration_snippets))) {
          throw ValidationError("annotations: instance (" + std::to_string(g.start) + ", " +
                                std::to_string(g.end) + ") of video " + a.id +
                                " violates 0 <= start < end <= duration");
        }
        a.instances.push_back(g);
      }
      videos.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("annotations: ") + e.what());
  }
  return videos;
}

std::string annotations_to_json(std::span<const VideoAnnotation> videos) {
  json list = json::array();
  for (const auto& v : videos) {
    json inst = json::array();
    for (const auto& g : v.instances) inst.push_back({{"start", g.start}, {"end", g.end}});
    list.push_back({{"id", v.id}, {"duration_snippets", v.duration_snippets}, {"instances", inst}});
  }
  return json{{"videos", list}}.dump(2) + "\n";
}

std::vector<VideoAnnotation> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open annotation file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_annotations(ss.str());
}

void save_annotations(const std::filesystem::path& path, std::span<const VideoAnnotation> videos) {
  std::ofstream out(path, std::ios::trunc);
  if (!(out << annotations_to_json(videos))) throw ValidationError("cannot write " + path.string());
}

}  // namespace bcgnn::data

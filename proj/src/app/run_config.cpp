#include "bcgnn/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "bcgnn/errors.hpp"

namespace bcgnn::app {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format(bool v) { return v ? "true" : "false"; }
std::string format(std::uint64_t v) { return std::to_string(v); }
std::string format(std::uint32_t v) { return std::to_string(v); }
std::string format(const std::string& v) { return v; }

void parse_into(const std::string& key, const std::string& text, double& out) {
  std::size_t used = 0;
  try {
    out = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw ValidationError("config: " + key + " expects a number, got '" + text + "'");
}

void parse_into(const std::string& key, const std::string& text, bool& out) {
  if (text == "true" || text == "1") {
    out = true;
  } else if (text == "false" || text == "0") {
    out = false;
  } else {
    throw ValidationError("config: " + key + " expects true or false, got '" + text + "'");
  }
}

template <typename T>
  requires std::is_unsigned_v<T>
void parse_into(const std::string& key, const std::string& text, T& out) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ValidationError("config: " + key + " expects a nonnegative integer, got '" + text + "'");
  out = value;
}

void parse_into(const std::string&, const std::string& text, std::string& out) { out = text; }

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename T>
Field field(const char* key, T RunConfig::*member) {
  return {[member](const RunConfig& c) { return format(c.*member); },
          [member, key](RunConfig& c, const std::string& v) { parse_into(key, v, c.*member); }};
}

// Order here is the serialization order.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"seed", field("seed", &RunConfig::seed)},
      {"n_videos", field("n_videos", &RunConfig::n_videos)},
      {"video_length", field("video_length", &RunConfig::video_length)},
      {"feature_dim", field("feature_dim", &RunConfig::feature_dim)},
      {"min_instances", field("min_instances", &RunConfig::min_instances)},
      {"max_instances", field("max_instances", &RunConfig::max_instances)},
      {"synth_min_duration", field("synth_min_duration", &RunConfig::synth_min_duration)},
      {"synth_max_duration", field("synth_max_duration", &RunConfig::synth_max_duration)},
      {"noise", field("noise", &RunConfig::noise)},
      {"snippet_interval", field("snippet_interval", &RunConfig::snippet_interval)},
      {"window", field("window", &RunConfig::window)},
      {"stride", field("stride", &RunConfig::stride)},
      {"max_duration", field("max_duration", &RunConfig::max_duration)},
      {"content_samples", field("content_samples", &RunConfig::content_samples)},
      {"base_dim", field("base_dim", &RunConfig::base_dim)},
      {"graph_dim", field("graph_dim", &RunConfig::graph_dim)},
      {"content_dim", field("content_dim", &RunConfig::content_dim)},
      {"rescale_to", field("rescale_to", &RunConfig::rescale_to)},
      {"directed", field("directed", &RunConfig::directed)},
      {"edge_update", field("edge_update", &RunConfig::edge_update)},
      {"gcn_baseline", field("gcn_baseline", &RunConfig::gcn_baseline)},
      {"learning_rate", field("learning_rate", &RunConfig::learning_rate)},
      {"weight_decay", field("weight_decay", &RunConfig::weight_decay)},
      {"max_epochs", field("max_epochs", &RunConfig::max_epochs)},
      {"patience", field("patience", &RunConfig::patience)},
      {"validation_fraction", field("validation_fraction", &RunConfig::validation_fraction)},
      {"soft_nms_sigma", field("soft_nms_sigma", &RunConfig::soft_nms_sigma)},
      {"soft_nms_floor", field("soft_nms_floor", &RunConfig::soft_nms_floor)},
      {"top_k", field("top_k", &RunConfig::top_k)},
      {"tiou_preset", field("tiou_preset", &RunConfig::tiou_preset)},
  };
  return table;
}

const Field* find_field(const std::string& key) {
  for (const auto& [name, f] : fields())
    if (name == key) return &f;
  return nullptr;
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError("config: " + msg); };
  if (n_videos < 1) fail("n_videos must be at least 1");
  if (feature_dim < 1) fail("feature_dim must be at least 1");
  if (min_instances > max_instances) fail("min_instances exceeds max_instances");
  if (synth_min_duration < 1 || synth_min_duration > synth_max_duration)
    fail("synth durations must satisfy 1 <= synth_min_duration <= synth_max_duration");
  if (!(noise >= 0.0)) fail("noise must be nonnegative");
  if (snippet_interval < 1) fail("snippet_interval must be at least 1");
  if (window < 2) fail("window must be at least 2");
  if (stride > window) fail("stride must not exceed window");
  if (max_duration >= window) fail("max_duration must be below window");
  if (rescale_to == 1) fail("rescale_to must be 0 or at least 2");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
    fail("validation_fraction must lie in [0, 1)");
  if (!(soft_nms_sigma > 0.0)) fail("soft_nms_sigma must be positive");
  if (!(soft_nms_floor >= 0.0)) fail("soft_nms_floor must be nonnegative");
  if (top_k < 1) fail("top_k must be at least 1");
  if (tiou_preset != "activitynet" && tiou_preset != "thumos")
    fail("tiou_preset must be activitynet or thumos");
  model_config().validate();
  train_config().validate();
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& [name, f] : fields()) out += name + "=" + f.get(*this) + "\n";
  return out;
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::size_t RunConfig::effective_stride() const {
  if (stride > 0) return stride;
  return std::max<std::size_t>(1, window / 2);
}

ModelConfig RunConfig::model_config() const {
  ModelConfig m;
  m.window = window;
  m.max_duration = max_duration > 0 ? max_duration : window - 1;
  m.content_samples = content_samples;
  m.input_dim = feature_dim;
  m.base_dim = base_dim;
  m.graph_dim = graph_dim;
  m.content_dim = content_dim;
  m.ablation = {directed, edge_update, gcn_baseline};
  return m;
}

data::SynthOptions RunConfig::synth_options() const {
  data::SynthOptions o;
  o.seed = seed;
  o.videos = n_videos;
  o.length = video_length;
  o.channels = feature_dim;
  o.min_instances = min_instances;
  o.max_instances = max_instances;
  o.min_duration = synth_min_duration;
  o.max_duration = synth_max_duration;
  o.noise = noise;
  o.snippet_interval = snippet_interval;
  return o;
}

train::TrainConfig RunConfig::train_config() const {
  train::TrainConfig t;
  t.learning_rate = learning_rate;
  t.weight_decay = weight_decay;
  t.max_epochs = max_epochs;
  t.patience = patience;
  t.seed = seed;
  return t;
}

eval::SoftNmsOptions RunConfig::nms_options() const {
  return {soft_nms_sigma, soft_nms_floor, top_k};
}

std::vector<double> RunConfig::thresholds() const {
  return tiou_preset == "thumos" ? eval::thumos_thresholds() : eval::activitynet_thresholds();
}

RunConfig parse_run_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const Field* f = find_field(key);
    if (!f) throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    f->set(base, trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), std::move(base));
}

void apply_ablation(RunConfig& config, const std::string& spec) {
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    const std::string key = trim(item.substr(0, eq));
    if (eq == std::string::npos || (key != "directed" && key != "edge_update" && key != "gcn_baseline"))
      throw ValidationError("--ablation: expected directed|edge_update|gcn_baseline=<bool>, got '" +
                            item + "'");
    find_field(key)->set(config, trim(item.substr(eq + 1)));
  }
}

bool same_model(const RunConfig& a, const RunConfig& b) {
  return a.model_config() == b.model_config() && a.effective_stride() == b.effective_stride() &&
         a.rescale_to == b.rescale_to;
}

}  // namespace bcgnn::app

#include "jscc/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace jscc {

namespace {

using nlohmann::json;

void validate(const ScenarioConfig& c) {
  if (c.source_probs.empty())
    throw std::invalid_argument("config: source.probs missing or empty");
  double sum = 0.0;
  for (double v : c.source_probs) {
    if (!(v >= 0.0)) throw std::invalid_argument("config: negative source probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kStochasticTol)
    throw std::invalid_argument("config: source.probs sum to " + std::to_string(sum));
  if (!(c.t > 0.0)) throw std::invalid_argument("config: t must be > 0");
  if (c.channel_rows.empty())
    throw std::invalid_argument("config: channel.rows missing or empty");
  const size_t cols = c.channel_rows.front().size();
  for (size_t i = 0; i < c.channel_rows.size(); ++i) {
    const auto& row = c.channel_rows[i];
    if (row.empty() || row.size() != cols)
      throw std::invalid_argument("config: channel row " + std::to_string(i) +
                                  " has inconsistent length");
    double rs = 0.0;
    for (double v : row) {
      if (!(v >= 0.0))
        throw std::invalid_argument("config: negative entry in channel row " +
                                    std::to_string(i));
      rs += v;
    }
    if (std::abs(rs - 1.0) > kStochasticTol)
      throw std::invalid_argument("config: channel row " + std::to_string(i) +
                                  " sums to " + std::to_string(rs));
  }
  if (c.grids.rho_max < 1.0 || c.grids.rho_points < 2 || c.grids.r_points < 2)
    throw std::invalid_argument("config: bad grids");
  if (c.grids.q_resolution < 0.0 || c.grids.q_resolution > 0.5)
    throw std::invalid_argument("config: q_resolution outside [0, 0.5]");
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  ScenarioConfig c;
  if (j.contains("source")) {
    const auto& s = j.at("source");
    c.source_probs = s.value("probs", std::vector<double>{});
    c.t = s.value("t", 1.0);
  }
  if (j.contains("channel"))
    c.channel_rows =
        j.at("channel").value("rows", std::vector<std::vector<double>>{});
  if (j.contains("grids")) {
    const auto& g = j.at("grids");
    c.grids.rho_max = g.value("rho_max", c.grids.rho_max);
    c.grids.rho_points = g.value("rho_points", c.grids.rho_points);
    c.grids.r_points = g.value("r_points", c.grids.r_points);
    c.grids.q_resolution = g.value("q_resolution", c.grids.q_resolution);
  }
  if (j.contains("sim")) {
    const auto& s = j.at("sim");
    c.sim.k = s.value("k", 0);
    c.sim.n_list = s.value("n_list", std::vector<int>{});
    c.sim.trials = s.value("trials", c.sim.trials);
    c.sim.best_of = s.value("best_of", c.sim.best_of);
    c.sim.seed = s.value("seed", c.sim.seed);
  }
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string resolve_preset(const std::string& name) {
  namespace fs = std::filesystem;
  if (fs::exists(name)) return name;
  const std::string with_ext = name.size() > 5 && name.ends_with(".json")
                                   ? name
                                   : name + ".json";
  const std::string local = "presets/" + with_ext;
  if (fs::exists(local)) return local;
  if (const char* dir = std::getenv("JSCC_PRESETS")) {
    const std::string env_path = std::string(dir) + "/" + with_ext;
    if (fs::exists(env_path)) return env_path;
  }
  throw std::invalid_argument("preset not found: " + name);
}

}  // namespace jscc

#include "pinn/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>

#include "pinn/csv.hpp"
#include "pinn/errors.hpp"

namespace pinn {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  return out;
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return out;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::uint64_t v = parse_count(key, text);
  if (v > 1000000) throw ConfigError(key + ": value too large");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

/// "lo, hi"; an empty value clears the interval.
std::optional<Interval> parse_interval(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  if (v.empty()) return std::nullopt;
  const auto comma = v.find(',');
  if (comma == std::string::npos) throw ConfigError(key + ": expected 'lo, hi', got '" + text + "'");
  return Interval{parse_real(key, v.substr(0, comma)), parse_real(key, v.substr(comma + 1))};
}

std::string interval_text(const std::optional<Interval>& i) {
  return i ? format_real(i->lo) + ", " + format_real(i->hi) : std::string();
}

const std::vector<std::string> kProblemParams = {"omega0", "epsilon", "y0", "v0", "t_end"};

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"problem.name", [](RunConfig& c, const std::string& v) { c.problem_name = trim(v); },
                 [](const RunConfig& c) { return c.problem_name; }});
    for (const std::string& p : kProblemParams) {
      f.push_back({"problem." + p,
                   [p](RunConfig& c, const std::string& v) { c.problem_params[p] = parse_real("problem." + p, v); },
                   [p](const RunConfig& c) {
                     const auto it = c.problem_params.find(p);
                     return it == c.problem_params.end() ? std::string() : format_real(it->second);
                   }});
    }
    auto real = [&f](const std::string& key, auto member) {
      f.push_back({key, [key, member](RunConfig& c, const std::string& v) { member(c) = parse_real(key, v); },
                   [member](const RunConfig& c) { return format_real(member(c)); }});
    };
    auto count = [&f](const std::string& key, auto member) {
      f.push_back({key,
                   [key, member](RunConfig& c, const std::string& v) {
                     member(c) = static_cast<std::remove_cvref_t<decltype(member(c))>>(parse_count(key, v));
                   },
                   [member](const RunConfig& c) { return std::to_string(member(c)); }});
    };
    auto integer = [&f](const std::string& key, auto member) {
      f.push_back({key, [key, member](RunConfig& c, const std::string& v) { member(c) = parse_int(key, v); },
                   [member](const RunConfig& c) { return std::to_string(member(c)); }});
    };
    integer("network.hidden_layers", [](auto& c) -> auto& { return c.training.network.hidden_layers; });
    integer("network.neurons_per_layer", [](auto& c) -> auto& { return c.training.network.neurons_per_layer; });
    f.push_back({"network.normalize_input",
                 [](RunConfig& c, const std::string& v) {
                   c.training.normalize_input = parse_bool("network.normalize_input", v);
                 },
                 [](const RunConfig& c) { return std::string(c.training.normalize_input ? "true" : "false"); }});
    count("training.n_data", [](auto& c) -> auto& { return c.training.n_data; });
    f.push_back({"training.data_interval",
                 [](RunConfig& c, const std::string& v) {
                   c.training.data_interval = parse_interval("training.data_interval", v);
                 },
                 [](const RunConfig& c) { return interval_text(c.training.data_interval); }});
    count("training.n_c", [](auto& c) -> auto& { return c.training.n_c; });
    f.push_back({"training.collocation_interval",
                 [](RunConfig& c, const std::string& v) {
                   c.training.collocation_interval = parse_interval("training.collocation_interval", v);
                 },
                 [](const RunConfig& c) { return interval_text(c.training.collocation_interval); }});
    real("training.eta", [](auto& c) -> auto& { return c.training.eta; });
    count("training.n_epochs", [](auto& c) -> auto& { return c.training.n_epochs; });
    count("training.seed", [](auto& c) -> auto& { return c.training.seed; });
    count("training.mse_every", [](auto& c) -> auto& { return c.training.mse_every; });
    count("training.n_eval", [](auto& c) -> auto& { return c.training.n_eval; });
    real("training.weights.data", [](auto& c) -> auto& { return c.training.weights.data; });
    real("training.weights.boundary", [](auto& c) -> auto& { return c.training.weights.boundary; });
    real("training.weights.physics", [](auto& c) -> auto& { return c.training.weights.physics; });
    real("training.weights.energy", [](auto& c) -> auto& { return c.training.weights.energy; });
    f.push_back({"output_dir", [](RunConfig& c, const std::string& v) { c.output_dir = trim(v); },
                 [](const RunConfig& c) { return c.output_dir.string(); }});
    return f;
  }();
  return table;
}

void finish(RunConfig& config) {
  if (config.problem_name.empty()) throw ConfigError("problem.name is required");
  const OdeProblem problem = config.make();
  config.training.validate(problem);
}

}  // namespace

const std::vector<std::string>& run_config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Field& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void set_run_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (f.key == key) {
      f.set(config, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_run_config(std::istream& in, std::span<const std::string> overrides, const std::string& source) {
  RunConfig config;
  std::set<std::string> seen;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const std::string where = source + ":" + std::to_string(number) + ": ";
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      set_run_config_value(config, key, body.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not of the form key=value");
    set_run_config_value(config, trim(o.substr(0, eq)), o.substr(eq + 1));
  }
  finish(config);
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_run_config(in, overrides, path.string());
}

void write_run_config(const RunConfig& config, std::ostream& out) {
  for (const Field& f : fields()) {
    const std::string v = f.get(config);
    const bool optional = f.key.starts_with("problem.") && f.key != "problem.name";
    if (v.empty() && (optional || f.key == "output_dir")) continue;
    out << f.key << " = " << v << '\n';
  }
}

std::filesystem::path default_output_root() {
  if (const char* root = std::getenv("PINN_OUTPUT_ROOT"); root != nullptr && *root != '\0') return root;
  return "runs";
}

}  // namespace pinn

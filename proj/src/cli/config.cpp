//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "molforge/chemio.h"
#include "molforge/error.h"

namespace molforge {
namespace {
using Type = ConfigKey::Type;
using FieldRef = std::variant<std::string *, int *, double *, bool *,
                              std::vector<std::string> *, std::uint64_t *>;

FieldRef field(EngineConfig &c, const std::string &key) {
  auto &d = c.diffusion;
  auto &p = c.planner;
  auto &r = c.predictor;
  auto &o = c.orchestrator;
  if (key == "seed") return &c.seed;
  if (key == "diffusion.family") return &d.family;
  if (key == "diffusion.schedule") return &d.schedule;
  if (key == "diffusion.steps") return &d.steps;
  if (key == "diffusion.guidance_w") return &d.guidance_w;
  if (key == "diffusion.node_vocabulary") return &d.node_vocabulary;
  if (key == "diffusion.max_nodes") return &d.max_nodes;
  if (key == "diffusion.condition_dim") return &d.condition_dim;
  if (key == "diffusion.denoiser") return &d.denoiser;
  if (key == "diffusion.oracle_smiles") return &d.oracle_smiles;
  if (key == "diffusion.n_nodes") return &d.n_nodes;
  if (key == "planner.k") return &p.k;
  if (key == "planner.max_iterations") return &p.max_iterations;
  if (key == "planner.max_seconds") return &p.max_seconds;
  if (key == "planner.stock") return &p.stock;
  if (key == "planner.templates") return &p.templates;
  if (key == "planner.heuristic") return &p.heuristic;
  if (key == "planner.stop_at_first_route") return &p.stop_at_first_route;
  if (key == "predictor.mode") return &r.mode;
  if (key == "predictor.table") return &r.table;
  if (key == "predictor.command") return &r.command;
  if (key == "predictor.address") return &r.address;
  if (key == "predictor.timeout") return &r.timeout;
  if (key == "orchestrator.lm") return &o.lm;
  if (key == "orchestrator.design_retries") return &o.design_retries;
  if (key == "orchestrator.max_tokens") return &o.max_tokens;
  if (key == "orchestrator.greedy") return &o.greedy;
  if (key == "orchestrator.temperature") return &o.temperature;
  throw ConfigError("unknown config key '" + key + "'");
}

const ConfigKey *find_key(const std::string &name) {
  for (const ConfigKey &k: config_keys()) {
    if (k.name == name)
      return &k;
  }
  return nullptr;
}

std::string quote(const std::string &s) {
  std::string out = "\"";
  for (char ch: s) {
    switch (ch) {
    case '"': out += "\\\""; break;
    case '\\': out += "\\\\"; break;
    case '\n': out += "\\n"; break;
    case '\t': out += "\\t"; break;
    default: out += ch;
    }
  }
  return out + "\"";
}

std::string real_text(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  std::string s = out.str();
  if (s.find_first_of(".eEn") == std::string::npos)
    s += ".0";
  return s;
}

// A parsed TOML value.
using Value = std::variant<std::string, long long, double, bool, std::vector<std::string>>;

long long parse_int(std::string_view s, const std::string &what) {
  long long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty())
    throw ConfigError(what + ": expected an integer, got '" + std::string(s) + "'");
  return v;
}

double parse_real(std::string_view s, const std::string &what) {
  const std::string text(s);
  char *end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v))
    throw ConfigError(what + ": expected a number, got '" + text + "'");
  return v;
}

bool parse_bool(std::string_view s, const std::string &what) {
  if (s == "true")
    return true;
  if (s == "false")
    return false;
  throw ConfigError(what + ": expected true or false, got '" + std::string(s) + "'");
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Reads a quoted string starting at s[pos] == '"'; advances pos past it.
std::string read_string(std::string_view s, std::size_t &pos, const std::string &what) {
  std::string out;
  for (++pos; pos < s.size(); ++pos) {
    const char ch = s[pos];
    if (ch == '"') {
      ++pos;
      return out;
    }
    if (ch != '\\') {
      out += ch;
      continue;
    }
    if (++pos >= s.size())
      break;
    switch (s[pos]) {
    case '"': out += '"'; break;
    case '\\': out += '\\'; break;
    case 'n': out += '\n'; break;
    case 't': out += '\t'; break;
    default: throw ConfigError(what + ": unsupported escape '\\" + std::string(1, s[pos]) + "'");
    }
  }
  throw ConfigError(what + ": unterminated string");
}

// Drops a trailing comment that is outside any string.
std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (in_string && s[i] == '\\') {
      ++i;
    } else if (s[i] == '"') {
      in_string = !in_string;
    } else if (s[i] == '#' && !in_string) {
      return s.substr(0, i);
    }
  }
  return s;
}

Value parse_value(std::string_view s, const std::string &what) {
  if (s.empty())
    throw ConfigError(what + ": missing value");
  if (s.front() == '"') {
    std::size_t pos = 0;
    std::string v = read_string(s, pos, what);
    if (!trim(s.substr(pos)).empty())
      throw ConfigError(what + ": trailing text after string");
    return v;
  }
  if (s.front() == '[') {
    if (s.back() != ']')
      throw ConfigError(what + ": unterminated array");
    std::vector<std::string> items;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    std::size_t pos = 0;
    while (pos < body.size()) {
      if (body[pos] != '"')
        throw ConfigError(what + ": arrays hold strings only");
      items.push_back(read_string(body, pos, what));
      const std::string_view rest = trim(body.substr(pos));
      if (rest.empty())
        break;
      if (rest.front() != ',')
        throw ConfigError(what + ": expected ',' in array");
      body = trim(rest.substr(1));
      pos = 0;
    }
    return items;
  }
  if (s == "true" || s == "false")
    return s == "true";
  if (s.find_first_of(".eE") != std::string_view::npos && s.find_first_of("0123456789") != std::string_view::npos)
    return parse_real(s, what);
  return parse_int(s, what);
}

void assign(EngineConfig &c, const ConfigKey &key, Value v, const std::string &what,
            const std::filesystem::path &base_dir) {
  const FieldRef ref = field(c, key.name);
  const auto type_error = [&](const char *expected) {
    return ConfigError(what + ": " + key.name + " expects " + expected);
  };
  switch (key.type) {
  case Type::kString: {
    auto *s = std::get_if<std::string>(&v);
    if (!s)
      throw type_error("a string");
    std::filesystem::path p(*s);
    if (key.is_path && !s->empty() && p.is_relative() && !base_dir.empty())
      *s = (base_dir / p).lexically_normal().string();
    *std::get<std::string *>(ref) = std::move(*s);
    break;
  }
  case Type::kInt: {
    auto *i = std::get_if<long long>(&v);
    if (!i || *i < std::numeric_limits<int>::min() || *i > std::numeric_limits<int>::max())
      throw type_error("an integer");
    *std::get<int *>(ref) = static_cast<int>(*i);
    break;
  }
  case Type::kSeed: {
    auto *i = std::get_if<long long>(&v);
    if (!i || *i < 0)
      throw type_error("a non-negative integer");
    *std::get<std::uint64_t *>(ref) = static_cast<std::uint64_t>(*i);
    break;
  }
  case Type::kReal: {
    double x;
    if (auto *d = std::get_if<double>(&v))
      x = *d;
    else if (auto *i = std::get_if<long long>(&v))
      x = static_cast<double>(*i);
    else
      throw type_error("a number");
    *std::get<double *>(ref) = x;
    break;
  }
  case Type::kBool: {
    auto *b = std::get_if<bool>(&v);
    if (!b)
      throw type_error("true or false");
    *std::get<bool *>(ref) = *b;
    break;
  }
  case Type::kList: {
    auto *l = std::get_if<std::vector<std::string>>(&v);
    if (!l)
      throw type_error("an array of strings");
    *std::get<std::vector<std::string> *>(ref) = std::move(*l);
    break;
  }
  }
}

void check(bool ok, const std::string &message) {
  if (!ok)
    throw ConfigError(message);
}
}  // namespace

const std::vector<ConfigKey> &config_keys() {
  static const std::vector<ConfigKey> keys = {
    { "seed", Type::kSeed, false, "seed for every random stream (MOLFORGE_SEED overrides)" },
    { "diffusion.family", Type::kString, false, "transition family: uniform | marginal" },
    { "diffusion.schedule", Type::kString, false, "noise schedule: cosine | linear" },
    { "diffusion.steps", Type::kInt, false, "number of diffusion steps T" },
    { "diffusion.guidance_w", Type::kReal, false, "guidance weight w" },
    { "diffusion.node_vocabulary", Type::kList, false, "node categories (F_V is its length)" },
    { "diffusion.max_nodes", Type::kInt, false, "maximum graph size N_G" },
    { "diffusion.condition_dim", Type::kInt, false, "text condition dimension" },
    { "diffusion.denoiser", Type::kString, false, "denoiser: uniform | oracle | wire" },
    { "diffusion.oracle_smiles", Type::kString, false, "molecule the oracle denoiser plants" },
    { "diffusion.n_nodes", Type::kInt, false, "nodes per sample; 0 picks automatically" },
    { "planner.k", Type::kInt, false, "templates proposed per expansion" },
    { "planner.max_iterations", Type::kInt, false, "planner iteration budget" },
    { "planner.max_seconds", Type::kReal, false, "planner wall-clock budget" },
    { "planner.stock", Type::kString, true, "building-block SMILES file" },
    { "planner.templates", Type::kString, true, "template library JSONL" },
    { "planner.heuristic", Type::kString, false, "plan heuristic: zero | predictor" },
    { "planner.stop_at_first_route", Type::kBool, false, "return the first route found" },
    { "predictor.mode", Type::kString, false, "builtin-table | subprocess | tcp" },
    { "predictor.table", Type::kString, true, "proposal table JSONL; empty uses template priors" },
    { "predictor.command", Type::kString, false, "provider command for subprocess mode" },
    { "predictor.address", Type::kString, false, "host:port for tcp mode" },
    { "predictor.timeout", Type::kReal, false, "seconds to wait for a provider reply" },
    { "orchestrator.lm", Type::kString, true, "scripted language model JSON" },
    { "orchestrator.design_retries", Type::kInt, false, "sampling attempts per design" },
    { "orchestrator.max_tokens", Type::kInt, false, "model token budget per session" },
    { "orchestrator.greedy", Type::kBool, false, "greedy decoding" },
    { "orchestrator.temperature", Type::kReal, false, "sampling temperature when not greedy" },
  };
  return keys;
}

std::string config_value_text(const EngineConfig &c, const std::string &key) {
  EngineConfig copy = c;
  return std::visit(
      [](auto *p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return quote(*p);
        } else if constexpr (std::is_same_v<T, bool>) {
          return *p ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return real_text(*p);
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
          std::string out = "[";
          for (std::size_t i = 0; i < p->size(); ++i)
            out += (i ? ", " : "") + quote((*p)[i]);
          return out + "]";
        } else {
          return std::to_string(*p);
        }
      },
      field(copy, key));
}

void set_config_value(EngineConfig &c, const std::string &key, const std::string &text) {
  const ConfigKey *k = find_key(key);
  if (!k)
    throw ConfigError("unknown config key '" + key + "'");
  const std::string what = "--" + key;
  Value v;
  switch (k->type) {
  case Type::kString: v = text; break;
  case Type::kInt:
  case Type::kSeed: v = parse_int(text, what); break;
  case Type::kReal: v = parse_real(text, what); break;
  case Type::kBool: v = parse_bool(text, what); break;
  case Type::kList: {
    std::vector<std::string> items;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
      items.emplace_back(trim(item));
    v = items;
    break;
  }
  }
  assign(c, *k, std::move(v), what, {});
}

void apply_config_text(EngineConfig &c, std::string_view text, const std::string &origin,
                       const std::filesystem::path &base_dir) {
  std::string section;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    const std::string_view raw =
        text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string what = origin + ":" + std::to_string(line_no);
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(what + ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "diffusion" && section != "planner" && section != "predictor"
          && section != "orchestrator")
        throw ConfigError(what + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(what + ": expected key = value");
    const std::string name(trim(line.substr(0, eq)));
    const std::string key = section.empty() ? name : section + "." + name;
    const ConfigKey *k = find_key(key);
    if (!k)
      throw ConfigError(what + ": unknown key '" + key + "'");
    assign(c, *k, parse_value(trim(line.substr(eq + 1)), what), what, base_dir);
  }
}

EngineConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  EngineConfig c;
  apply_config_text(c, buffer.str(), path.string(), path.parent_path());
  return c;
}

EngineConfig resolve_config(const std::optional<std::filesystem::path> &file,
                            const std::vector<std::pair<std::string, std::string>> &flags,
                            const char *env_seed) {
  EngineConfig c = file ? load_config(*file) : EngineConfig {};
  if (env_seed && *env_seed)
    c.seed = static_cast<std::uint64_t>(parse_int(env_seed, "MOLFORGE_SEED"));
  for (const auto &[key, value]: flags)
    set_config_value(c, key, value);
  validate_config(c);
  return c;
}

void validate_config(const EngineConfig &c) {
  const auto &d = c.diffusion;
  try {
    transition_family_from_string(d.family);
    schedule_family_from_string(d.schedule);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(std::string("diffusion: ") + e.what());
  }
  check(d.steps > 0, "diffusion.steps must be positive");
  check(d.guidance_w >= 0, "diffusion.guidance_w must be non-negative");
  check(!d.node_vocabulary.empty(), "diffusion.node_vocabulary is empty");
  for (const std::string &s: d.node_vocabulary)
    check(element_from_symbol(s).has_value(), "diffusion.node_vocabulary: unknown element '" + s + "'");
  check(d.max_nodes > 0, "diffusion.max_nodes must be positive");
  check(d.condition_dim > 0, "diffusion.condition_dim must be positive");
  check(d.denoiser == "uniform" || d.denoiser == "oracle" || d.denoiser == "wire",
        "diffusion.denoiser must be uniform, oracle or wire");
  check(d.n_nodes >= 0 && d.n_nodes <= d.max_nodes, "diffusion.n_nodes must be in [0, max_nodes]");
  const auto &p = c.planner;
  check(p.k > 0, "planner.k must be positive");
  check(p.max_iterations > 0, "planner.max_iterations must be positive");
  check(p.max_seconds > 0, "planner.max_seconds must be positive");
  check(p.heuristic == "zero" || p.heuristic == "predictor",
        "planner.heuristic must be zero or predictor");
  const auto &r = c.predictor;
  check(r.mode == "builtin-table" || r.mode == "subprocess" || r.mode == "tcp",
        "predictor.mode must be builtin-table, subprocess or tcp");
  check(r.mode != "subprocess" || !r.command.empty(), "predictor.command is required in subprocess mode");
  check(r.mode != "tcp" || !r.address.empty(), "predictor.address is required in tcp mode");
  check(r.timeout > 0, "predictor.timeout must be positive");
  check(p.heuristic != "predictor" || r.mode != "builtin-table",
        "planner.heuristic = predictor needs a subprocess or tcp provider");
  check(d.denoiser != "wire" || r.mode != "builtin-table",
        "diffusion.denoiser = wire needs a subprocess or tcp provider");
  const auto &o = c.orchestrator;
  check(o.design_retries > 0, "orchestrator.design_retries must be positive");
  check(o.max_tokens > 0, "orchestrator.max_tokens must be positive");
  check(o.temperature > 0, "orchestrator.temperature must be positive");
}

std::string dump_config(const EngineConfig &c) {
  std::ostringstream out;
  std::string section;
  for (const ConfigKey &k: config_keys()) {
    const auto dot = k.name.find('.');
    const std::string s = dot == std::string::npos ? "" : k.name.substr(0, dot);
    if (s != section) {
      out << "\n[" << s << "]\n";
      section = s;
      if (s == "diffusion") {
        out << "# F_V = " << c.diffusion.node_vocabulary.size() << ", F_E = " << kEdgeCategories
            << "\n";
      }
    }
    out << k.name.substr(dot == std::string::npos ? 0 : dot + 1) << " = "
        << config_value_text(c, k.name) << "\n";
  }
  return out.str();
}

DiffusionConfig EngineConfig::diffusion_config() const {
  DiffusionConfig d;
  d.family = transition_family_from_string(diffusion.family);
  d.schedule = schedule_family_from_string(diffusion.schedule);
  d.steps = diffusion.steps;
  d.guidance_weight = diffusion.guidance_w;
  d.tokenization.node_vocabulary.clear();
  for (const std::string &s: diffusion.node_vocabulary) {
    const auto e = element_from_symbol(s);
    if (!e)
      throw ConfigError("diffusion.node_vocabulary: unknown element '" + s + "'");
    d.tokenization.node_vocabulary.push_back(*e);
  }
  d.tokenization.max_nodes = diffusion.max_nodes;
  return d;
}

PlannerConfig EngineConfig::planner_config() const {
  PlannerConfig p;
  p.k = planner.k;
  p.max_iterations = planner.max_iterations;
  p.max_seconds = planner.max_seconds;
  p.stop_at_first_route = planner.stop_at_first_route;
  return p;
}

OrchestratorConfig EngineConfig::orchestrator_config() const {
  OrchestratorConfig o;
  o.design_retries = orchestrator.design_retries;
  o.max_tokens = orchestrator.max_tokens;
  o.greedy = orchestrator.greedy;
  o.temperature = orchestrator.temperature;
  o.seed = seed;
  o.planner = planner_config();
  return o;
}

}  // namespace molforge

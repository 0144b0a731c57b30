//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <fstream>
#include <iomanip>
#include <sstream>

#include "molforge/chemio.h"
#include "molforge/error.h"
#include "molforge/eval.h"
#include "molforge/orchestrator.h"
#include "molforge/templates.h"

namespace molforge {
namespace {
std::string where(int line) {
  return line > 0 ? "line " + std::to_string(line) + ": " : std::string();
}

PropertyKind kind_from_string(const std::string &s, int line) {
  if (s == "categorical")
    return PropertyKind::kCategorical;
  if (s == "continuous")
    return PropertyKind::kContinuous;
  throw ConfigError(where(line) + "unknown property kind '" + s + "'");
}

Category category_from_string(const std::string &s, int line) {
  if (s == "drug")
    return Category::kDrug;
  if (s == "material")
    return Category::kMaterial;
  throw ConfigError(where(line) + "unknown category '" + s + "'");
}

void collect_leaves(const RouteNode &node, std::vector<const RouteNode *> &out) {
  if (node.reaction.empty()) {
    out.push_back(&node);
    return;
  }
  for (const RouteReaction &r: node.reaction) {
    for (const RouteNode &c: r.reactants)
      collect_leaves(c, out);
  }
}

bool steps_derive(const RouteNode &node, const TemplateLibrary &library) {
  for (const RouteReaction &r: node.reaction) {
    const RetroTemplate *t = library.find(r.template_id);
    if (!t)
      return false;
    std::vector<MolecularGraph> reactants;
    for (const RouteNode &c: r.reactants)
      reactants.push_back(parse_smiles(c.smiles));
    if (!validate_forward(*t, reactants, parse_smiles(node.smiles)))
      return false;
    for (const RouteNode &c: r.reactants) {
      if (!steps_derive(c, library))
        return false;
    }
  }
  return true;
}

std::string format_number(double v) {
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}
}  // namespace

std::string to_string(PropertyKind k) {
  return k == PropertyKind::kCategorical ? "categorical" : "continuous";
}

std::string to_string(Category c) {
  return c == Category::kDrug ? "drug" : "material";
}

// ---------------------------------------------------------------------------
// Records

BenchmarkRecord record_from_json(const nlohmann::json &j, int line) {
  if (!j.is_object())
    throw ConfigError(where(line) + "record must be a JSON object");
  BenchmarkRecord r;
  try {
    r.id = j.contains("id") ? j["id"].get<std::string>() : "r" + std::to_string(line);
    r.question = j.at("question").get<std::string>();
    r.ref_smiles = j.at("ref_smiles").get<std::string>();
    r.answer = j.value("answer", std::string());
    r.category = category_from_string(j.value("category", std::string("drug")), line);
    if (j.contains("properties")) {
      for (const auto &[name, p]: j["properties"].items()) {
        PropertyValue v;
        v.value = p.at("value").get<double>();
        v.kind = kind_from_string(p.at("kind").get<std::string>(), line);
        if (v.kind == PropertyKind::kCategorical && v.value != 0.0 && v.value != 1.0)
          throw ConfigError(where(line) + "categorical property " + name
                            + " must be 0 or 1");
        r.properties.emplace(name, v);
      }
    }
    if (j.contains("ref_route") && !j["ref_route"].is_null()) {
      route_from_json(j["ref_route"]);
      r.ref_route = j["ref_route"];
    }
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(where(line) + e.what());
  } catch (const ConfigError &) {
    throw;
  } catch (const Error &e) {
    throw ConfigError(where(line) + e.what());
  }
  try {
    parse_smiles(r.ref_smiles);
  } catch (const Error &e) {
    throw ConfigError(where(line) + "reference SMILES: " + e.what());
  }
  return r;
}

nlohmann::json record_to_json(const BenchmarkRecord &r) {
  nlohmann::json props = nlohmann::json::object();
  for (const auto &[name, v]: r.properties)
    props[name] = { { "value", v.value }, { "kind", to_string(v.kind) } };
  return { { "id", r.id },
           { "question", r.question },
           { "properties", props },
           { "ref_smiles", r.ref_smiles },
           { "ref_route", r.ref_route ? *r.ref_route : nlohmann::json(nullptr) },
           { "answer", r.answer },
           { "category", to_string(r.category) } };
}

std::vector<BenchmarkRecord> load_benchmark(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open " + path.string());
  std::vector<BenchmarkRecord> out;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
      throw ConfigError(path.string() + ":" + std::to_string(line)
                        + ": malformed JSON: " + e.what());
    }
    try {
      out.push_back(record_from_json(j, line));
    } catch (const ConfigError &e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Oracle

TableOracle TableOracle::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open " + path.string());
  TableOracle oracle;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    const std::string at = path.string() + ":" + std::to_string(line) + ": ";
    try {
      const auto j = nlohmann::json::parse(text);
      const std::string key = j.at("canonical_key").get<std::string>();
      const auto props = j.at("properties").get<std::map<std::string, double>>();
      if (key.find('|') != std::string::npos)
        oracle.table_[key] = props;
      else
        oracle.add(parse_smiles(key), props);
    } catch (const nlohmann::json::exception &e) {
      throw ConfigError(at + e.what());
    } catch (const Error &e) {
      throw ConfigError(at + e.what());
    }
  }
  return oracle;
}

void TableOracle::add(const MolecularGraph &g, std::map<std::string, double> properties) {
  table_[canonical_key(g)] = std::move(properties);
}

std::optional<std::map<std::string, double>>
TableOracle::lookup(const std::string &canonical) const {
  const auto it = table_.find(canonical);
  if (it == table_.end())
    return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Systems

nlohmann::json EchoSystem::transcript(const BenchmarkRecord &record) {
  nlohmann::json elements = nlohmann::json::array();
  elements.push_back({ { "kind", "molecule" }, { "smiles", record.ref_smiles } });
  if (!record.answer.empty())
    elements.push_back({ { "kind", "text" }, { "text", record.answer } });
  nlohmann::json t = { { "elements", elements } };
  if (record.ref_route)
    t["route"] = *record.ref_route;
  return t;
}

nlohmann::json TranscriptDirectory::transcript(const BenchmarkRecord &record) {
  const auto path = dir_ / (record.id + ".json");
  std::ifstream in(path);
  if (!in)
    return { { "missing", true }, { "elements", nlohmann::json::array() } };
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Benchmark

bool route_is_valid(const Route &route, const MolecularGraph &designed,
                    const Stock &stock, const TemplateLibrary *library) {
  try {
    if (canonical_key(parse_smiles(route.root.smiles)) != canonical_key(designed))
      return false;
    std::vector<const RouteNode *> leaves;
    collect_leaves(route.root, leaves);
    for (const RouteNode *leaf: leaves) {
      if (!stock.contains(parse_smiles(leaf->smiles)))
        return false;
    }
    return !library || steps_derive(route.root, *library);
  } catch (const Error &) {
    return false;
  }
}

MetricReport run_benchmark(const std::vector<BenchmarkRecord> &records,
                           BenchmarkSystem &system, const PropertyOracle &oracle,
                           const BenchmarkOptions &options) {
  MetricReport report;
  report.records = static_cast<int>(records.size());
  std::map<std::string, std::vector<std::pair<int, int>>> labels;
  std::map<std::string, std::vector<std::pair<double, double>>> values;

  for (const BenchmarkRecord &rec: records) {
    RecordResult rr;
    rr.id = rec.id;
    nlohmann::json t = nlohmann::json::object();
    try {
      t = system.transcript(rec);
    } catch (const std::exception &e) {
      rr.error = e.what();
      ++report.errors;
    }
    if (t.is_object() && t.value("missing", false))
      ++report.missing_transcripts;

    const std::optional<MolecularGraph> mol = transcript_molecule(t);
    rr.has_molecule = mol.has_value();
    rr.valid = mol && is_valid(*mol, rec.category);
    if (rr.valid) {
      rr.similarity = tanimoto(morgan_fingerprint(*mol),
                               morgan_fingerprint(parse_smiles(rec.ref_smiles)));
    }
    const std::string text = transcript_text(t);
    rr.bleu4 = bleu4(text, rec.answer);
    rr.rouge_l = rouge_l(text, rec.answer);
    if (mol && options.stock) {
      if (const auto route = transcript_route(t))
        rr.retro_success = route_is_valid(*route, *mol, *options.stock, options.library);
    }

    std::optional<std::map<std::string, double>> predicted;
    if (rr.valid)
      predicted = oracle.lookup(canonical_key(*mol));
    for (const auto &[name, truth]: rec.properties) {
      PropertyResult &pr = report.properties[name];
      pr.kind = truth.kind;
      if (!predicted || !predicted->count(name)) {
        ++pr.missing;
        continue;
      }
      ++pr.pairs;
      const double guess = predicted->at(name);
      if (truth.kind == PropertyKind::kCategorical)
        labels[name].emplace_back(static_cast<int>(truth.value), guess >= 0.5 ? 1 : 0);
      else
        values[name].emplace_back(truth.value, guess);
    }
    report.per_record.push_back(std::move(rr));
  }

  const double n = report.records > 0 ? report.records : 1.0;
  for (const RecordResult &rr: report.per_record) {
    report.validity += rr.valid ? 1.0 : 0.0;
    report.similarity += rr.similarity;
    report.bleu4 += rr.bleu4;
    report.rouge_l += rr.rouge_l;
    report.retro_success += rr.retro_success ? 1.0 : 0.0;
  }
  report.validity /= n;
  report.similarity /= n;
  report.bleu4 /= n;
  report.rouge_l /= n;
  report.retro_success /= n;

  for (auto &[name, pr]: report.properties) {
    try {
      if (pr.kind == PropertyKind::kCategorical)
        pr.value = balanced_accuracy(labels[name]);
      else
        pr.value = mae(values[name]);
    } catch (const Error &e) {
      pr.note = e.what();
    }
    if (pr.missing > 0) {
      report.warnings.push_back(name + ": " + std::to_string(pr.missing) + " of "
                                + std::to_string(pr.missing + pr.pairs)
                                + " records have no valid molecule covered by the oracle");
    }
  }
  if (report.records == 0)
    report.warnings.push_back("no records");
  if (report.missing_transcripts > 0)
    report.warnings.push_back(std::to_string(report.missing_transcripts)
                              + " transcripts missing");
  if (report.errors > 0)
    report.warnings.push_back(std::to_string(report.errors) + " records failed");
  return report;
}

nlohmann::json report_to_json(const MetricReport &r) {
  nlohmann::json props = nlohmann::json::object();
  for (const auto &[name, p]: r.properties) {
    props[name] = { { "kind", to_string(p.kind) },
                    { "metric", p.kind == PropertyKind::kCategorical
                                    ? "balanced_accuracy" : "mae" },
                    { "value", p.value ? nlohmann::json(*p.value) : nlohmann::json(nullptr) },
                    { "pairs", p.pairs },
                    { "missing", p.missing } };
    if (!p.note.empty())
      props[name]["note"] = p.note;
  }
  nlohmann::json per = nlohmann::json::array();
  for (const RecordResult &rr: r.per_record) {
    nlohmann::json j = { { "id", rr.id },
                         { "has_molecule", rr.has_molecule },
                         { "valid", rr.valid },
                         { "similarity", rr.similarity },
                         { "bleu4", rr.bleu4 },
                         { "rouge_l", rr.rouge_l },
                         { "retro_success", rr.retro_success } };
    if (!rr.error.empty())
      j["error"] = rr.error;
    per.push_back(std::move(j));
  }
  return { { "records", r.records },
           { "tokenizer", kTextTokenizer },
           { "validity", r.validity },
           { "similarity", r.similarity },
           { "bleu4", r.bleu4 },
           { "rouge_l", r.rouge_l },
           { "retro_success", r.retro_success },
           { "properties", props },
           { "coverage", { { "missing_transcripts", r.missing_transcripts },
                           { "errors", r.errors } } },
           { "warnings", r.warnings },
           { "per_record", per } };
}

std::string report_to_csv(const MetricReport &r) {
  std::ostringstream out;
  out << "metric,value\n";
  out << "records," << r.records << "\n";
  out << "validity," << format_number(r.validity) << "\n";
  out << "similarity," << format_number(r.similarity) << "\n";
  out << "bleu4," << format_number(r.bleu4) << "\n";
  out << "rouge_l," << format_number(r.rouge_l) << "\n";
  out << "retro_success," << format_number(r.retro_success) << "\n";
  for (const auto &[name, p]: r.properties) {
    out << (p.kind == PropertyKind::kCategorical ? "ba_" : "mae_") << name << ",";
    if (p.value)
      out << format_number(*p.value);
    out << "\n";
  }
  return out.str();
}

}  // namespace molforge

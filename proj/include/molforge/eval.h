//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_EVAL_H_
#define MOLFORGE_EVAL_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "molforge/molgraph.h"
#include "molforge/retro.h"

namespace molforge {

// ---------------------------------------------------------------------------
// Records

enum class PropertyKind { kCategorical, kContinuous };
enum class Category { kDrug, kMaterial };

std::string to_string(PropertyKind k);
std::string to_string(Category c);

struct PropertyValue {
  double value = 0.0;
  PropertyKind kind = PropertyKind::kContinuous;
};

struct BenchmarkRecord {
  std::string id;
  std::string question;
  std::map<std::string, PropertyValue> properties;
  std::string ref_smiles;
  std::optional<nlohmann::json> ref_route;  // Route JSON
  std::string answer;                        // reference answer text
  Category category = Category::kDrug;
};

/// {"id", "question", "properties": {name: {"value", "kind"}}, "ref_smiles",
///  "ref_route": Route JSON | null, "answer", "category": "drug" | "material"}.
/// Missing ids become "r<line>". Throws ConfigError naming the line for
/// malformed JSON, unknown kinds, categorical values outside {0, 1} and
/// reference SMILES that do not parse.
BenchmarkRecord record_from_json(const nlohmann::json &j, int line = 0);
nlohmann::json record_to_json(const BenchmarkRecord &r);
std::vector<BenchmarkRecord> load_benchmark(const std::filesystem::path &path);

// ---------------------------------------------------------------------------
// Metrics

// drug: parses and passes the valence check; material: additionally at
// least two '*' attachment points.
bool is_valid(const MolecularGraph &g, Category c);
bool is_valid(std::string_view smiles, Category c);

// Lowercased tokens split on whitespace, with every punctuation character a
// token of its own.
std::vector<std::string> text_tokens(std::string_view text);
inline constexpr std::string_view kTextTokenizer =
    "lowercase; split on whitespace; each punctuation character is a token";

// Geometric mean of 1..4-gram clipped precisions (add-one smoothing for
// zero-match orders above 1) times the brevity penalty. 0 for empty input.
double bleu4(std::string_view candidate, std::string_view reference);
// LCS F1. 0 for empty input or no common subsequence.
double rouge_l(std::string_view candidate, std::string_view reference);
std::size_t lcs_length(const std::vector<std::string> &a,
                       const std::vector<std::string> &b);

// (true, predicted) binary labels; (TPR + TNR) / 2. Throws UndefinedMetric
// when either true class is absent.
double balanced_accuracy(const std::vector<std::pair<int, int>> &pairs);
// Throws EmptyList.
double mae(const std::vector<std::pair<double, double>> &pairs);

// ---------------------------------------------------------------------------
// Property oracle

class PropertyOracle {
public:
  virtual ~PropertyOracle() = default;
  // std::nullopt for molecules the oracle does not cover.
  virtual std::optional<std::map<std::string, double>>
  lookup(const std::string &canonical) const = 0;
};

/// JSONL {"canonical_key", "properties": {name: value}}. The key may be a
/// raw canonical key or any SMILES of the molecule.
class TableOracle: public PropertyOracle {
public:
  static TableOracle load(const std::filesystem::path &path);
  void add(const MolecularGraph &g, std::map<std::string, double> properties);
  std::optional<std::map<std::string, double>>
  lookup(const std::string &canonical) const override;
  std::size_t size() const { return table_.size(); }

private:
  std::map<std::string, std::map<std::string, double>> table_;
};

// ---------------------------------------------------------------------------
// Benchmark

// Produces a session transcript (see session_to_json) for a record.
class BenchmarkSystem {
public:
  virtual ~BenchmarkSystem() = default;
  virtual nlohmann::json transcript(const BenchmarkRecord &record) = 0;
};

// Answers every record with its own reference molecule, text and route.
class EchoSystem: public BenchmarkSystem {
public:
  nlohmann::json transcript(const BenchmarkRecord &record) override;
};

// Reads <dir>/<id>.json; a missing file yields an empty transcript.
class TranscriptDirectory: public BenchmarkSystem {
public:
  explicit TranscriptDirectory(std::filesystem::path dir): dir_(std::move(dir)) { }
  nlohmann::json transcript(const BenchmarkRecord &record) override;

private:
  std::filesystem::path dir_;
};

struct RecordResult {
  std::string id;
  bool has_molecule = false;
  bool valid = false;
  double similarity = 0.0;
  double bleu4 = 0.0;
  double rouge_l = 0.0;
  bool retro_success = false;
  std::string error;
};

struct PropertyResult {
  PropertyKind kind = PropertyKind::kContinuous;
  std::optional<double> value;  // BA or MAE; empty when undefined
  int pairs = 0;
  int missing = 0;              // molecules the oracle did not cover
  std::string note;
};

struct MetricReport {
  int records = 0;
  double validity = 0.0;
  double similarity = 0.0;
  double bleu4 = 0.0;
  double rouge_l = 0.0;
  double retro_success = 0.0;
  std::map<std::string, PropertyResult> properties;
  int missing_transcripts = 0;
  int errors = 0;
  std::vector<std::string> warnings;
  std::vector<RecordResult> per_record;
};

struct BenchmarkOptions {
  const Stock *stock = nullptr;              // required for retro success
  const TemplateLibrary *library = nullptr;  // optional step validation
};

// Records are evaluated in order; a failing record is logged in its result
// and the run continues.
MetricReport run_benchmark(const std::vector<BenchmarkRecord> &records,
                           BenchmarkSystem &system, const PropertyOracle &oracle,
                           const BenchmarkOptions &options);

// A route counts when its target is the designed molecule, every leaf is in
// stock and, with a library, every step re-derives forward.
bool route_is_valid(const Route &route, const MolecularGraph &designed,
                    const Stock &stock, const TemplateLibrary *library);

nlohmann::json report_to_json(const MetricReport &r);
// metric,value rows.
std::string report_to_csv(const MetricReport &r);

}  // namespace molforge

#endif  // MOLFORGE_EVAL_H_

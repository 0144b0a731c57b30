//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cctype>
#include <cmath>
#include <map>

#include "molforge/chemio.h"
#include "molforge/error.h"
#include "molforge/eval.h"

namespace molforge {

bool is_valid(const MolecularGraph &g, Category c) {
  if (!check_valence(g).valid)
    return false;
  if (c == Category::kMaterial)
    return descriptors(g).attachment_points >= 2;
  return true;
}

bool is_valid(std::string_view smiles, Category c) {
  try {
    return is_valid(parse_smiles(smiles), c);
  } catch (const Error &) {
    return false;
  }
}

std::vector<std::string> text_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&]() {
    if (!word.empty())
      out.push_back(std::move(word));
    word.clear();
  };
  for (char ch: text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else if (std::ispunct(c)) {
      flush();
      out.emplace_back(1, ch);
    } else {
      word += static_cast<char>(std::tolower(c));
    }
  }
  flush();
  return out;
}

namespace {
using Ngrams = std::map<std::vector<std::string>, int>;

Ngrams count_ngrams(const std::vector<std::string> &tokens, std::size_t n) {
  Ngrams counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
  return counts;
}
}  // namespace

double bleu4(std::string_view candidate, std::string_view reference) {
  const auto c = text_tokens(candidate);
  const auto r = text_tokens(reference);
  if (c.empty() || r.empty())
    return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const Ngrams cand = count_ngrams(c, n);
    const Ngrams ref = count_ngrams(r, n);
    int matched = 0, total = 0;
    for (const auto &[gram, count]: cand) {
      total += count;
      const auto it = ref.find(gram);
      if (it != ref.end())
        matched += std::min(count, it->second);
    }
    double p;
    if (matched > 0) {
      p = static_cast<double>(matched) / total;
    } else if (n == 1) {
      return 0.0;
    } else {
      p = 1.0 / (total + 1.0);
    }
    log_sum += std::log(p);
  }
  const double cl = static_cast<double>(c.size()), rl = static_cast<double>(r.size());
  const double bp = cl < rl ? std::exp(1.0 - rl / cl) : 1.0;
  return bp * std::exp(log_sum / 4.0);
}

std::size_t lcs_length(const std::vector<std::string> &a,
                       const std::vector<std::string> &b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(std::string_view candidate, std::string_view reference) {
  const auto c = text_tokens(candidate);
  const auto r = text_tokens(reference);
  if (c.empty() || r.empty())
    return 0.0;
  const auto lcs = static_cast<double>(lcs_length(c, r));
  if (lcs == 0.0)
    return 0.0;
  const double p = lcs / c.size(), rec = lcs / r.size();
  return 2.0 * p * rec / (p + rec);
}

double balanced_accuracy(const std::vector<std::pair<int, int>> &pairs) {
  long tp = 0, fn = 0, tn = 0, fp = 0;
  for (const auto &[truth, pred]: pairs) {
    if ((truth != 0 && truth != 1) || (pred != 0 && pred != 1))
      throw UndefinedMetric("balanced accuracy needs binary labels");
    if (truth == 1)
      pred == 1 ? ++tp : ++fn;
    else
      pred == 0 ? ++tn : ++fp;
  }
  if (tp + fn == 0 || tn + fp == 0)
    throw UndefinedMetric("balanced accuracy needs both true classes");
  const double tpr = static_cast<double>(tp) / (tp + fn);
  const double tnr = static_cast<double>(tn) / (tn + fp);
  return (tpr + tnr) / 2.0;
}

double mae(const std::vector<std::pair<double, double>> &pairs) {
  if (pairs.empty())
    throw EmptyList("mean absolute error of an empty list");
  double sum = 0.0;
  for (const auto &[truth, pred]: pairs)
    sum += std::abs(truth - pred);
  return sum / static_cast<double>(pairs.size());
}

}  // namespace molforge

//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cctype>

#include "molforge/error.h"
#include "molforge/orchestrator.h"

namespace molforge {
namespace {
constexpr std::array<std::string_view, kSpecialTokenCount> kSpecialTexts = {
  "<design_start>", "<design_body>", "<design_end>",
  "<retro_start>",  "<retro_body>",  "<retro_end>",
  "<molecule>",     "<callback_start>", "<callback_end>",
};

bool has_space(std::string_view w) {
  for (char c: w) {
    if (std::isspace(static_cast<unsigned char>(c)))
      return true;
  }
  return false;
}
}  // namespace

std::string_view special_text(SpecialToken t) {
  return kSpecialTexts[static_cast<std::size_t>(t)];
}

TokenVocabulary::TokenVocabulary() {
  for (int i = 0; i < kSpecialTokenCount; ++i)
    index_.emplace(std::string(kSpecialTexts[i]), i);
  eos_ = add_word(kEndOfSequence);
  unk_ = add_word(kUnknownWord);
  for (const char *letter: { "A", "B", "C", "D", "E" })
    add_word(letter);
}

TokenVocabulary::TokenVocabulary(const std::vector<std::string> &words)
    : TokenVocabulary() {
  for (const auto &w: words)
    add_word(w);
}

int TokenVocabulary::add_word(std::string_view word) {
  if (word.empty() || has_space(word))
    throw ConfigError("vocabulary words must be non-empty and space-free: '"
                      + std::string(word) + "'");
  const auto it = index_.find(word);
  if (it != index_.end()) {
    if (is_special(it->second))
      throw ConfigError(std::string(word) + " is a special token, not a word");
    return it->second;
  }
  const int id = size();
  words_.emplace_back(word);
  index_.emplace(std::string(word), id);
  return id;
}

std::optional<SpecialToken> TokenVocabulary::as_special(int id) const {
  if (!is_special(id))
    return std::nullopt;
  return static_cast<SpecialToken>(id);
}

std::optional<int> TokenVocabulary::find(std::string_view text) const {
  const auto it = index_.find(text);
  if (it == index_.end())
    return std::nullopt;
  return it->second;
}

int TokenVocabulary::id(std::string_view text) const {
  return find(text).value_or(unk_);
}

std::string_view TokenVocabulary::text(int id) const {
  if (is_special(id))
    return kSpecialTexts[id];
  if (id < 0 || id >= size())
    throw ConfigError("token id " + std::to_string(id) + " outside the vocabulary");
  return words_[id - kSpecialTokenCount];
}

std::vector<int> TokenVocabulary::encode_words(std::string_view text) const {
  std::vector<int> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    if (i > start) {
      // A special spelling inside plain text is just an unknown word.
      const auto found = find(text.substr(start, i - start));
      out.push_back(found && !is_special(*found) ? *found : unk_);
    }
  }
  return out;
}

std::string TokenVocabulary::detokenize(std::span<const int> ids) const {
  std::string out;
  for (int id: ids) {
    if (is_special(id))
      continue;
    if (!out.empty())
      out += ' ';
    out += text(id);
  }
  return out;
}

}  // namespace molforge

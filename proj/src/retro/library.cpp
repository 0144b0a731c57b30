//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/chemio.h"
#include "molforge/error.h"
#include "molforge/retro.h"

namespace molforge {

Stock Stock::load(const std::filesystem::path &path) {
  Stock stock;
  stock.source_ = path;
  for (const SmilesLine &line: read_smiles_lines(path)) {
    try {
      stock.insert(parse_smiles(line.smiles));
    } catch (const Error &e) {
      throw Error(path.filename().string() + ":"
                  + std::to_string(line.line_number) + ": " + e.what());
    }
  }
  return stock;
}

Stock Stock::from_smiles(std::span<const std::string> smiles) {
  Stock stock;
  for (const std::string &s: smiles)
    stock.insert(parse_smiles(s));
  return stock;
}

void Stock::insert(const MolecularGraph &g) { keys_.insert(canonical_key(g)); }

bool Stock::contains(const MolecularGraph &g) const {
  return contains_key(canonical_key(g));
}

TemplateLibrary::TemplateLibrary(std::vector<RetroTemplate> templates) {
  for (RetroTemplate &t: templates)
    add(std::move(t));
}

TemplateLibrary TemplateLibrary::load(const std::filesystem::path &path) {
  return TemplateLibrary(load_templates(path));
}

void TemplateLibrary::add(RetroTemplate t) {
  if (index_.count(t.id))
    throw TemplateUnsupported("duplicate template id " + t.id);
  index_.emplace(t.id, templates_.size());
  templates_.push_back(std::move(t));
}

const RetroTemplate *TemplateLibrary::find(const std::string &id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &templates_[it->second];
}

}  // namespace molforge

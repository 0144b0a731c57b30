//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "molforge/error.h"
#include "molforge/templates.h"

namespace molforge {

RetroTemplate make_template(std::string id, std::string_view product,
                            std::span<const std::string> reactants,
                            double prior) {
  RetroTemplate t;
  t.id = std::move(id);
  t.prior = prior;
  if (!(prior > 0.0 && prior <= 1.0))
    throw TemplateUnsupported("template " + t.id + ": prior must be in (0, 1]");

  t.product = parse_pattern(product);
  if (reactants.empty())
    throw TemplateUnsupported("template " + t.id + " has no reactants");

  std::set<int> product_maps;
  for (const AtomQuery &q: t.product.atoms()) {
    if (q.map == 0)
      throw TemplateUnsupported("template " + t.id
                                + ": every product atom needs a map label");
    product_maps.insert(q.map);
  }

  std::set<int> reactant_maps;
  for (const std::string &text: reactants) {
    PatternGraph r = parse_pattern(text);
    for (const AtomQuery &q: r.atoms()) {
      if (q.map == 0) {
        if (!q.element)
          throw TemplateUnsupported("template " + t.id
                                    + ": new reactant atoms need an element");
        continue;
      }
      if (!product_maps.count(q.map))
        throw TemplateUnsupported("template " + t.id + ": map label "
                                  + std::to_string(q.map)
                                  + " is missing from the product");
      if (!reactant_maps.insert(q.map).second)
        throw TemplateUnsupported("template " + t.id + ": map label "
                                  + std::to_string(q.map)
                                  + " appears in two reactants");
    }
    t.reactants.push_back(std::move(r));
  }
  return t;
}

namespace {
template <class E>
[[noreturn]] void rethrow_at(const E &e, const std::string &where) {
  throw E(e.position(), where + ": " + e.reason());
}
}  // namespace

std::vector<RetroTemplate> load_templates(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open template file " + path.string());

  std::vector<RetroTemplate> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    const std::string where = path.filename().string() + ":"
                              + std::to_string(number);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception &e) {
      throw TemplateUnsupported(where + ": malformed JSON: " + e.what());
    }
    try {
      const std::vector<std::string> reactants = j.at("reactants");
      out.push_back(make_template(j.at("id").get<std::string>(),
                                  j.at("product").get<std::string>(),
                                  reactants, j.value("prior", 1.0)));
    } catch (const SyntaxError &e) {
      rethrow_at(e, where);
    } catch (const UnsupportedFeature &e) {
      rethrow_at(e, where);
    } catch (const TemplateUnsupported &e) {
      throw TemplateUnsupported(where + ": " + e.what());
    } catch (const nlohmann::json::exception &e) {
      throw TemplateUnsupported(where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace molforge

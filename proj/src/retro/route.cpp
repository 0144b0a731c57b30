//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>

#include "molforge/chemio.h"
#include "molforge/error.h"
#include "molforge/retro.h"

namespace molforge {
namespace {
void collect(const RouteNode &node, std::vector<const RouteReaction *> &out) {
  for (const RouteReaction &r: node.reaction) {
    out.push_back(&r);
    for (const RouteNode &child: r.reactants)
      collect(child, out);
  }
}

nlohmann::json node_to_json(const RouteNode &node, const char *name_key) {
  nlohmann::json j;
  j[name_key] = node.smiles;
  j["in_stock"] = node.in_stock;
  if (!node.reaction.empty()) {
    const RouteReaction &r = node.reaction.front();
    nlohmann::json reactants = nlohmann::json::array();
    for (const RouteNode &child: r.reactants)
      reactants.push_back(node_to_json(child, "smiles"));
    j["reaction"] = { { "template_id", r.template_id },
                      { "prob", r.prob },
                      { "cost", r.cost },
                      { "reactants", std::move(reactants) } };
  }
  return j;
}

RouteNode node_from_json(const nlohmann::json &j, const char *name_key) {
  RouteNode node;
  node.smiles = j.at(name_key).get<std::string>();
  node.in_stock = j.at("in_stock").get<bool>();
  if (j.contains("reaction")) {
    const auto &rj = j.at("reaction");
    RouteReaction r;
    r.template_id = rj.at("template_id").get<std::string>();
    r.prob = rj.at("prob").get<double>();
    r.cost = rj.value("cost", -std::log(r.prob));
    for (const auto &c: rj.at("reactants"))
      r.reactants.push_back(node_from_json(c, "smiles"));
    if (r.reactants.empty())
      throw Error("route reaction " + r.template_id + " has no reactants");
    node.reaction.push_back(std::move(r));
  }
  return node;
}

double subtree_cost(const RouteNode &node) {
  double cost = 0.0;
  for (const RouteReaction &r: node.reaction) {
    cost = r.cost;
    for (const RouteNode &c: r.reactants)
      cost += subtree_cost(c);
  }
  return cost;
}
}  // namespace

std::vector<const RouteReaction *> route_reactions(const Route &route) {
  std::vector<const RouteReaction *> out;
  collect(route.root, out);
  return out;
}

bool route_leaves_in_stock(const RouteNode &node, const Stock &stock) {
  if (node.reaction.empty())
    return stock.contains(parse_smiles(node.smiles));
  for (const RouteNode &c: node.reaction.front().reactants) {
    if (!route_leaves_in_stock(c, stock))
      return false;
  }
  return true;
}

nlohmann::json route_to_json(const Route &route) {
  nlohmann::json j = node_to_json(route.root, "target");
  if (route.steps > 0) {
    j["steps"] = route.steps;
    j["total_cost"] = route.total_cost;
  }
  return j;
}

Route route_from_json(const nlohmann::json &j) {
  Route route;
  route.root = node_from_json(j, "target");
  route.steps = static_cast<int>(route_reactions(route).size());
  route.total_cost = subtree_cost(route.root);
  return route;
}

nlohmann::json plan_result_to_json(const PlanResult &r) {
  if (r.route)
    return route_to_json(*r.route);
  const Failure f = r.failure.value_or(Failure {});
  return { { "target", r.target },
           { "failure",
             { { "reason", to_string(f.reason) },
               { "iterations", r.stats.iterations },
               { "expansions", r.stats.expansions },
               { "predictor_calls", r.stats.expansion.predictor_calls } } } };
}

}  // namespace molforge

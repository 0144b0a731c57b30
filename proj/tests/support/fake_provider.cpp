//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Minimal provider speaking the line protocol, for transport tests. Serves
// expand from a proposal table, a fixed heuristic, and uniform denoise rows.
//
//   fake_provider [--table F] [--templates F] [--heuristic a,b,c,d,e]
//                 [--crash-after N] [--error-on TYPE] [--bad-id]
//                 [--node-categories N] [--edge-categories N] [--tcp PORTFILE]

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "molforge/chemio.h"
#include "molforge/molgraph.h"

namespace {
struct Options {
  std::string table;
  std::string templates;
  std::vector<double> heuristic = { 1, 0, 0, 0, 0 };
  long crash_after = -1;
  std::string error_on;
  bool bad_id = false;
  int node_categories = 10;
  int edge_categories = 5;
  std::string port_file;
};

std::map<std::string, nlohmann::json> load_table(const std::string &path) {
  std::map<std::string, nlohmann::json> table;
  if (path.empty())
    return table;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    const auto j = nlohmann::json::parse(line);
    table[molforge::canonical_key(
        molforge::parse_smiles(j.at("product").get<std::string>()))] =
        j.at("proposals");
  }
  return table;
}

std::map<std::string, nlohmann::json> load_templates(const std::string &path) {
  std::map<std::string, nlohmann::json> out;
  if (path.empty())
    return out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    const auto j = nlohmann::json::parse(line);
    out[j.at("id").get<std::string>()] = {
      { "product", j.at("product") }, { "reactants", j.at("reactants") }
    };
  }
  return out;
}

nlohmann::json answer(const nlohmann::json &req, const Options &opt,
                      const std::map<std::string, nlohmann::json> &table,
                      const std::map<std::string, nlohmann::json> &templates) {
  const std::string type = req.value("type", "");
  nlohmann::json reply = { { "id", req.at("id") } };
  if (opt.bad_id)
    reply["id"] = req.at("id").get<long>() + 1;
  if (type == opt.error_on) {
    reply["error"] = "refusing " + type;
    return reply;
  }
  if (type == "expand") {
    nlohmann::json proposals = nlohmann::json::array();
    try {
      const auto key = molforge::canonical_key(
          molforge::parse_smiles(req.at("product").get<std::string>()));
      if (const auto it = table.find(key); it != table.end())
        proposals = it->second;
    } catch (const std::exception &e) {
      reply["error"] = e.what();
      return reply;
    }
    const int k = req.value("k", 50);
    if (static_cast<int>(proposals.size()) > k)
      proposals.erase(proposals.begin() + k, proposals.end());
    for (auto &p: proposals) {
      const auto it = templates.find(p.at("template_id").get<std::string>());
      if (it != templates.end())
        p["template"] = it->second;
    }
    reply["proposals"] = proposals;
  } else if (type == "heuristic") {
    reply["probs"] = opt.heuristic;
  } else if (type == "denoise") {
    const auto &tokens = req.at("tokens");
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &row: tokens) {
      const int max_nodes = static_cast<int>(row.size()) - 1;
      std::vector<double> out(opt.node_categories, 1.0 / opt.node_categories);
      for (int j = 0; j < max_nodes; ++j) {
        for (int e = 0; e < opt.edge_categories; ++e)
          out.push_back(1.0 / opt.edge_categories);
      }
      rows.push_back(out);
    }
    reply["x0_probs"] = rows;
  } else {
    reply["error"] = "unknown request type '" + type + "'";
  }
  return reply;
}

class Server {
public:
  explicit Server(const Options &opt)
      : opt_(opt), table_(load_table(opt.table)),
        templates_(load_templates(opt.templates)) { }

  std::string handle(const std::string &line) {
    if (opt_.crash_after >= 0 && served_ >= opt_.crash_after)
      std::_Exit(3);
    ++served_;
    nlohmann::json reply;
    try {
      reply = answer(nlohmann::json::parse(line), opt_, table_, templates_);
    } catch (const std::exception &e) {
      reply = { { "id", nullptr }, { "error", e.what() } };
    }
    return reply.dump() + "\n";
  }

private:
  const Options &opt_;
  std::map<std::string, nlohmann::json> table_, templates_;
  long served_ = 0;
};

int serve_stdio(const Options &opt) {
  Server server(opt);
  std::string line;
  while (std::getline(std::cin, line))
    std::cout << server.handle(line) << std::flush;
  return 0;
}

int serve_tcp(const Options &opt) {
  Server server(opt);
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr {};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (::bind(listener, reinterpret_cast<sockaddr *>(&addr), sizeof addr) != 0
      || ::listen(listener, 1) != 0)
    return 2;
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr *>(&addr), &len);
  {
    // Write then rename so a reader never sees a half-written port.
    const std::string tmp = opt.port_file + ".tmp";
    std::ofstream(tmp) << ntohs(addr.sin_port) << '\n';
    std::rename(tmp.c_str(), opt.port_file.c_str());
  }
  const int fd = ::accept(listener, nullptr, nullptr);
  ::close(listener);
  if (fd < 0)
    return 2;
  std::string buffer;
  char chunk[4096];
  while (true) {
    const ssize_t n = ::read(fd, chunk, sizeof chunk);
    if (n <= 0)
      break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t nl;
    while ((nl = buffer.find('\n')) != std::string::npos) {
      const std::string text = server.handle(buffer.substr(0, nl));
      buffer.erase(0, nl + 1);
      if (::write(fd, text.data(), text.size()) < 0)
        return 2;
    }
  }
  ::close(fd);
  return 0;
}
}  // namespace

int main(int argc, char **argv) {
  Options opt;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "missing value for " << a << "\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (a == "--table") {
      opt.table = next();
    } else if (a == "--templates") {
      opt.templates = next();
    } else if (a == "--heuristic") {
      opt.heuristic.clear();
      std::stringstream ss(next());
      std::string part;
      while (std::getline(ss, part, ','))
        opt.heuristic.push_back(std::stod(part));
    } else if (a == "--crash-after") {
      opt.crash_after = std::stol(next());
    } else if (a == "--error-on") {
      opt.error_on = next();
    } else if (a == "--bad-id") {
      opt.bad_id = true;
    } else if (a == "--node-categories") {
      opt.node_categories = std::stoi(next());
    } else if (a == "--edge-categories") {
      opt.edge_categories = std::stoi(next());
    } else if (a == "--tcp") {
      opt.port_file = next();
    } else {
      std::cerr << "unknown option " << a << "\n";
      return 2;
    }
  }
  if (!opt.port_file.empty())
    return serve_tcp(opt);
  return serve_stdio(opt);
}

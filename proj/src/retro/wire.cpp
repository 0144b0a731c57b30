//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/wire.h"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>

#include "molforge/chemio.h"
#include "molforge/error.h"

namespace molforge {
namespace {
std::string errno_text() { return std::strerror(errno); }

void write_all(int fd, std::string_view data, bool socket) {
  while (!data.empty()) {
    const ssize_t n = socket ? ::send(fd, data.data(), data.size(), MSG_NOSIGNAL)
                             : ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR)
        continue;
      throw PredictorUnavailable("provider write failed: " + errno_text());
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::string read_line(int fd, std::string &buffer, double timeout) {
  using clock = std::chrono::steady_clock;
  const auto deadline =
      clock::now() + std::chrono::duration_cast<clock::duration>(
                         std::chrono::duration<double>(timeout));
  while (true) {
    const auto nl = buffer.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                          deadline - clock::now())
                          .count();
    if (left <= 0)
      throw PredictorUnavailable("provider did not answer within "
                                 + std::to_string(timeout) + " s");
    pollfd p { fd, POLLIN, 0 };
    const int ready = ::poll(&p, 1, static_cast<int>(left));
    if (ready < 0) {
      if (errno == EINTR)
        continue;
      throw PredictorUnavailable("poll failed: " + errno_text());
    }
    if (ready == 0)
      continue;
    char chunk[4096];
    const ssize_t n = ::read(fd, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR)
        continue;
      throw PredictorUnavailable("provider read failed: " + errno_text());
    }
    if (n == 0)
      throw PredictorUnavailable("provider closed the connection");
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

void check_line(std::string_view line) {
  if (line.find('\n') != std::string_view::npos)
    throw PredictorUnavailable("request contains a raw newline");
}
}  // namespace

// ---------------------------------------------------------------------------
// Transports

SubprocessTransport::SubprocessTransport(const std::string &command,
                                         double timeout_seconds)
    : timeout_(timeout_seconds) {
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2], out_pipe[2];
  if (::pipe(in_pipe) != 0)
    throw PredictorUnavailable("pipe failed: " + errno_text());
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw PredictorUnavailable("pipe failed: " + errno_text());
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd: { in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1] })
      ::close(fd);
    throw PredictorUnavailable("fork failed: " + errno_text());
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    for (int fd: { in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1] })
      ::close(fd);
    ::signal(SIGPIPE, SIG_DFL);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char *>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::fcntl(in_pipe[1], F_SETFD, FD_CLOEXEC);
  ::fcntl(out_pipe[0], F_SETFD, FD_CLOEXEC);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

SubprocessTransport::~SubprocessTransport() {
  if (to_child_ >= 0)
    ::close(to_child_);
  if (from_child_ >= 0)
    ::close(from_child_);
  if (pid_ > 0) {
    // Closing stdin asks a well-behaved provider to exit; give it a moment
    // before forcing the issue.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) == pid_)
        return;
      ::usleep(10000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }
}

void SubprocessTransport::send_line(std::string_view line) {
  check_line(line);
  std::string data(line);
  data.push_back('\n');
  write_all(to_child_, data, false);
}

std::string SubprocessTransport::receive_line() {
  return read_line(from_child_, buffer_, timeout_);
}

TcpTransport::TcpTransport(const std::string &host, int port,
                           double timeout_seconds)
    : timeout_(timeout_seconds) {
  addrinfo hints {};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo *found = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(),
                               &hints, &found);
  if (rc != 0)
    throw PredictorUnavailable("cannot resolve " + host + ": "
                               + ::gai_strerror(rc));
  for (addrinfo *a = found; a; a = a->ai_next) {
    const int fd = ::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC,
                            a->ai_protocol);
    if (fd < 0)
      continue;
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
      fd_ = fd;
      break;
    }
    ::close(fd);
  }
  ::freeaddrinfo(found);
  if (fd_ < 0)
    throw PredictorUnavailable("cannot connect to " + host + ":"
                               + std::to_string(port));
}

std::unique_ptr<TcpTransport> TcpTransport::connect(const std::string &address,
                                                    double timeout_seconds) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon + 1 == address.size())
    throw ConfigError("TCP address must look like host:port, got " + address);
  int port = 0;
  try {
    port = std::stoi(address.substr(colon + 1));
  } catch (const std::exception &) {
    throw ConfigError("bad port in " + address);
  }
  return std::make_unique<TcpTransport>(address.substr(0, colon), port,
                                        timeout_seconds);
}

TcpTransport::~TcpTransport() {
  if (fd_ >= 0)
    ::close(fd_);
}

void TcpTransport::send_line(std::string_view line) {
  check_line(line);
  std::string data(line);
  data.push_back('\n');
  write_all(fd_, data, true);
}

std::string TcpTransport::receive_line() {
  return read_line(fd_, buffer_, timeout_);
}

// ---------------------------------------------------------------------------
// Client

nlohmann::json WireClient::call(nlohmann::json request) {
  const long id = next_id_++;
  request["id"] = id;
  transport_->send_line(request.dump());
  const std::string line = transport_->receive_line();
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception &) {
    throw PredictorUnavailable("provider sent malformed JSON: " + line);
  }
  if (!reply.is_object())
    throw PredictorUnavailable("provider reply is not an object");
  if (reply.contains("error")) {
    const auto &e = reply["error"];
    throw PredictorUnavailable("provider error for request "
                               + std::to_string(id) + ": "
                               + (e.is_string() ? e.get<std::string>() : e.dump()));
  }
  if (!reply.contains("id") || !reply["id"].is_number_integer()
      || reply["id"].get<long>() != id)
    throw PredictorUnavailable("provider reply out of order: expected id "
                               + std::to_string(id));
  return reply;
}

std::vector<Proposal> WirePredictor::propose(const MolecularGraph &product,
                                             std::string_view context, int k) {
  const nlohmann::json reply = client_.call({ { "type", "expand" },
                                              { "product", write_smiles(product) },
                                              { "context", context },
                                              { "k", k } });
  std::vector<Proposal> out;
  try {
    for (const auto &p: reply.at("proposals")) {
      Proposal proposal;
      proposal.template_id = p.at("template_id").get<std::string>();
      proposal.prob = p.at("prob").get<double>();
      if (p.contains("template") && !p["template"].is_null()) {
        const auto &t = p["template"];
        const std::vector<std::string> reactants = t.at("reactants");
        proposal.inline_template =
            make_template(proposal.template_id,
                          t.at("product").get<std::string>(), reactants,
                          proposal.prob);
      }
      out.push_back(std::move(proposal));
    }
  } catch (const nlohmann::json::exception &e) {
    throw PredictorUnavailable(std::string("bad expand reply: ") + e.what());
  } catch (const PositionedError &e) {
    throw PredictorUnavailable(std::string("bad inline template: ") + e.what());
  } catch (const TemplateUnsupported &e) {
    throw PredictorUnavailable(std::string("bad inline template: ") + e.what());
  }
  check_proposals(out);
  if (out.size() > static_cast<std::size_t>(k))
    out.resize(k);
  return out;
}

std::array<double, kHeuristicChoices>
WirePredictor::probabilities(const HeuristicQuery &q) {
  nlohmann::json request = { { "type", "heuristic" },
                             { "target", q.target },
                             { "step", q.step },
                             { "template", nullptr },
                             { "reactants", nullptr } };
  if (q.template_id)
    request["template"] = *q.template_id;
  if (q.reactants)
    request["reactants"] = *q.reactants;
  const nlohmann::json reply = client_.call(std::move(request));
  std::array<double, kHeuristicChoices> probs {};
  try {
    const auto &p = reply.at("probs");
    if (!p.is_array() || p.size() != probs.size())
      throw PredictorUnavailable("heuristic reply needs 5 probabilities");
    for (std::size_t i = 0; i < probs.size(); ++i)
      probs[i] = p[i].get<double>();
    heuristic_score(probs);
  } catch (const nlohmann::json::exception &e) {
    throw PredictorUnavailable(std::string("bad heuristic reply: ") + e.what());
  } catch (const BadDistribution &e) {
    throw PredictorUnavailable(std::string("bad heuristic reply: ") + e.what());
  }
  return probs;
}

// ---------------------------------------------------------------------------
// Denoiser messages

nlohmann::json tokens_to_json(const TokenGraph &x) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < x.n_nodes; ++i) {
    nlohmann::json row = nlohmann::json::array();
    row.push_back(x.nodes[i]);
    for (int j = 0; j < x.max_nodes; ++j)
      row.push_back(x.edge(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json condition_to_json(const ConditionVector &c) {
  nlohmann::json categorical = nlohmann::json::array();
  for (const auto &v: c.categorical)
    categorical.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  nlohmann::json continuous = nlohmann::json::array();
  for (const auto &v: c.continuous)
    continuous.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  return { { "categorical", categorical },
           { "continuous", continuous },
           { "text", c.text ? nlohmann::json(*c.text) : nlohmann::json(nullptr) } };
}

ConditionVector condition_from_json(const nlohmann::json &j) {
  ConditionVector c;
  for (const auto &v: j.value("categorical", nlohmann::json::array()))
    c.categorical.push_back(v.is_null() ? std::nullopt
                                        : std::optional<int>(v.get<int>()));
  for (const auto &v: j.value("continuous", nlohmann::json::array()))
    c.continuous.push_back(v.is_null() ? std::nullopt
                                       : std::optional<double>(v.get<double>()));
  if (j.contains("text") && !j["text"].is_null())
    c.text = j["text"].get<std::vector<double>>();
  return c;
}

TokenDistributions distributions_from_json(const nlohmann::json &rows,
                                           const TokenGraph &xt,
                                           const GraphTokenization &tok) {
  const int fv = tok.node_categories(), fe = tok.edge_categories();
  if (!rows.is_array() || static_cast<int>(rows.size()) != xt.n_nodes)
    throw DenoiserContract("x0_probs needs one row per node");
  TokenDistributions p;
  p.nodes.resize(xt.n_nodes);
  p.edges.resize(static_cast<std::size_t>(xt.n_nodes) * xt.max_nodes);
  for (int i = 0; i < xt.n_nodes; ++i) {
    const auto &row = rows[i];
    if (!row.is_array()
        || static_cast<int>(row.size()) != fv + xt.max_nodes * fe)
      throw DenoiserContract("x0_probs row " + std::to_string(i)
                             + " has the wrong width");
    const std::vector<double> values = row.get<std::vector<double>>();
    p.nodes[i].assign(values.begin(), values.begin() + fv);
    for (int j = 0; j < xt.max_nodes; ++j) {
      const auto begin = values.begin() + fv + j * fe;
      p.edges[i * xt.max_nodes + j].assign(begin, begin + fe);
    }
  }
  return p;
}

TokenDistributions WireDenoiser::predict(const TokenGraph &xt, int t,
                                         const ConditionVector &c) {
  const nlohmann::json reply = client_.call({ { "type", "denoise" },
                                              { "tokens", tokens_to_json(xt) },
                                              { "t", t },
                                              { "conditions",
                                                condition_to_json(c) } });
  try {
    return distributions_from_json(reply.at("x0_probs"), xt, tok_);
  } catch (const nlohmann::json::exception &e) {
    throw PredictorUnavailable(std::string("bad denoise reply: ") + e.what());
  }
}

}  // namespace molforge

//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_WIRE_H_
#define MOLFORGE_WIRE_H_

#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "molforge/diffusion.h"
#include "molforge/retro.h"

namespace molforge {

// A bidirectional line channel. Implementations throw PredictorUnavailable
// on EOF, timeouts and I/O errors.
class Transport {
public:
  virtual ~Transport() = default;
  virtual void send_line(std::string_view line) = 0;
  virtual std::string receive_line() = 0;
};

// Spawns `/bin/sh -c command` and talks over its stdin/stdout. The child's
// stderr is inherited. SIGPIPE is ignored process-wide so a dead child shows
// up as a write error instead of killing the caller.
class SubprocessTransport: public Transport {
public:
  explicit SubprocessTransport(const std::string &command,
                               double timeout_seconds = 60.0);
  ~SubprocessTransport() override;
  SubprocessTransport(const SubprocessTransport &) = delete;
  SubprocessTransport &operator=(const SubprocessTransport &) = delete;

  void send_line(std::string_view line) override;
  std::string receive_line() override;

private:
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  double timeout_;
  std::string buffer_;
};

// Connects to host:port.
class TcpTransport: public Transport {
public:
  TcpTransport(const std::string &host, int port,
               double timeout_seconds = 60.0);
  // "host:port".
  static std::unique_ptr<TcpTransport> connect(const std::string &address,
                                               double timeout_seconds = 60.0);
  ~TcpTransport() override;
  TcpTransport(const TcpTransport &) = delete;
  TcpTransport &operator=(const TcpTransport &) = delete;

  void send_line(std::string_view line) override;
  std::string receive_line() override;

private:
  int fd_ = -1;
  double timeout_;
  std::string buffer_;
};

/// Request/response over newline-delimited JSON. Each call stamps a strictly
/// increasing id and expects the reply with the same id next; an "error"
/// member, a mismatched id or malformed JSON raise PredictorUnavailable.
class WireClient {
public:
  explicit WireClient(std::unique_ptr<Transport> transport)
      : transport_(std::move(transport)) { }

  nlohmann::json call(nlohmann::json request);
  long last_id() const { return next_id_ - 1; }

private:
  std::unique_ptr<Transport> transport_;
  long next_id_ = 1;
};

// Predictor and heuristic provider backed by the "expand" and "heuristic"
// messages.
class WirePredictor: public Predictor, public HeuristicProvider {
public:
  explicit WirePredictor(WireClient &client): client_(client) { }

  std::vector<Proposal> propose(const MolecularGraph &product,
                                std::string_view context, int k) override;
  std::array<double, kHeuristicChoices>
  probabilities(const HeuristicQuery &q) override;

private:
  WireClient &client_;
};

// Token rows for the "denoise" message: per node, the node category followed
// by its max_nodes edge categories.
nlohmann::json tokens_to_json(const TokenGraph &x);
nlohmann::json condition_to_json(const ConditionVector &c);
ConditionVector condition_from_json(const nlohmann::json &j);

// Splits x0_probs rows (token_width entries each) back into distributions.
TokenDistributions distributions_from_json(const nlohmann::json &rows,
                                           const TokenGraph &xt,
                                           const GraphTokenization &tok);

class WireDenoiser: public Denoiser {
public:
  WireDenoiser(WireClient &client, GraphTokenization tok)
      : client_(client), tok_(std::move(tok)) { }
  TokenDistributions predict(const TokenGraph &xt, int t,
                             const ConditionVector &c) override;

private:
  WireClient &client_;
  GraphTokenization tok_;
};

}  // namespace molforge

#endif  // MOLFORGE_WIRE_H_

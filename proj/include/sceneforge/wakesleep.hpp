#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sceneforge/compression.hpp"
#include "sceneforge/dsl.hpp"
#include "sceneforge/interp.hpp"
#include "sceneforge/io.hpp"
#include "sceneforge/library.hpp"

namespace sceneforge {

inline constexpr double kDefaultAcceptThreshold = 0.95;

enum class RecognitionSource { kHeuristic, kRemote };

struct RecognitionResult {
  dsl::Program program;
  double miou = 0.0;
  bool accepted = false;
  RecognitionSource source = RecognitionSource::kHeuristic;
  /// Attempts that did not parse, did not execute, or missed the threshold.
  int failures = 0;
};

/// Deterministic pattern miner: grids, rows, symmetric quadruples, clusters
/// and aligned pairs (in that priority), then plain furniture for the rest.
/// Only patterns whose built-in is enabled in `library` are used; learned
/// library functions are applied afterwards by verified rewriting.
dsl::Program recognize_heuristic(const Layout& layout, const Library& library);

/// Runs `program` in the layout's room and scores it against the layout.
RecognitionResult score_recognition(const Layout& layout, const dsl::Program& program, const Library& library,
                                    double accept_threshold, RecognitionSource source);

// Wire types of the remote proposal model.
struct ProposalRequest {
  std::string mode;  // "recognize", "abstract" or "generate"
  std::string library;
  Json payload;
  std::optional<std::string> feedback;
};

struct ProposalResponse {
  std::string text;
  std::string finish_reason;
};

Json to_json(const ProposalRequest& request);

class ProposalClient {
 public:
  virtual ~ProposalClient() = default;
  /// Throws RemoteUnavailable on transport failure or timeout.
  virtual ProposalResponse send(const ProposalRequest& request) = 0;
};

class HttpProposalClient : public ProposalClient {
 public:
  HttpProposalClient(std::string url, std::string token, double timeout_seconds = 60.0);
  ProposalResponse send(const ProposalRequest& request) override;

  /// Client for SCENEFORGE_PROPOSER_URL / SCENEFORGE_PROPOSER_TOKEN, or null
  /// when the URL is unset.
  static std::unique_ptr<HttpProposalClient> from_environment(double timeout_seconds = 60.0);

 private:
  std::string url_;
  std::string token_;
  double timeout_;
};

/// Asks the client for a program up to `max_attempts` times, feeding back
/// the previous error. Returns the best attempt. Throws RemoteUnavailable
/// when every attempt failed in transport.
RecognitionResult recognize_remote(const Layout& layout, const Library& library, ProposalClient& client,
                                   int max_attempts = 3, double accept_threshold = kDefaultAcceptThreshold);

/// Candidate definitions proposed by the client for the corpus.
std::vector<dsl::FuncDef> propose_remote(std::span<const dsl::Program> corpus, const Library& library,
                                         ProposalClient& client, int max_attempts = 3);

/// Anti-unification of repeated same-category furniture statements: runs
/// and lattices whose coordinates step arithmetically are generalised into
/// loop functions; slots equal across all instances become literals and
/// slots with identical values share one parameter.
std::vector<dsl::FuncDef> mine_abstractions(std::span<const dsl::Program> corpus, const Library& library);

struct WakeSleepConfig {
  int iterations = 2;
  double accept_threshold = kDefaultAcceptThreshold;
  long long min_gain = kDefaultMinGain;
  int max_admissions_per_iteration = 3;
  int max_attempts = 3;
  bool heuristic_fallback = true;
};

struct IterationStats {
  int iteration = 0;
  double acceptance_rate = 0.0;
  /// Corpus after the wake stage.
  double wake_funcs_per_program = 0.0;
  double wake_mean_description_length = 0.0;
  /// Corpus after the sleep stage.
  double funcs_per_program = 0.0;
  double mean_description_length = 0.0;
  std::vector<std::string> admitted;
  std::vector<CompressionReport> reports;
};

struct WakeSleepResult {
  Library library;
  /// One program per input layout, with the acceptance flag of its parse.
  std::vector<dsl::Program> programs;
  std::vector<bool> accepted;
  std::vector<IterationStats> stats;
};

WakeSleepResult run_wake_sleep(std::span<const Layout> corpus, const Library& initial, const WakeSleepConfig& config,
                               ProposalClient* remote = nullptr);

}  // namespace sceneforge

#include <algorithm>
#include <future>
#include <thread>

#include "sceneforge/error.hpp"
#include "sceneforge/wakesleep.hpp"

namespace sceneforge {

namespace {

template <class F>
void parallel_for(std::size_t n, F fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(8, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    }));
  }
  for (auto& j : jobs) j.get();
}

RecognitionResult recognize_one(const Layout& layout, const Library& library, const WakeSleepConfig& config,
                                ProposalClient* remote) {
  std::optional<RecognitionResult> best;
  if (remote) {
    try {
      best = recognize_remote(layout, library, *remote, config.max_attempts, config.accept_threshold);
    } catch (const RemoteUnavailable&) {
      if (!config.heuristic_fallback) throw;
    }
    if (best && best->accepted) return *best;
    if (!config.heuristic_fallback) return *best;
  }
  RecognitionResult h = score_recognition(layout, recognize_heuristic(layout, library), library,
                                          config.accept_threshold, RecognitionSource::kHeuristic);
  if (best) h.failures = best->failures;
  return h;
}

void wake(std::span<const Layout> corpus, const Library& library, const WakeSleepConfig& config,
          ProposalClient* remote, WakeSleepResult& state) {
  std::vector<RecognitionResult> results(corpus.size());
  if (remote) {
    // Remote clients need not be thread safe.
    for (std::size_t i = 0; i < corpus.size(); ++i) results[i] = recognize_one(corpus[i], library, config, remote);
  } else {
    parallel_for(corpus.size(), [&](std::size_t i) { results[i] = recognize_one(corpus[i], library, config, nullptr); });
  }
  const bool first = state.programs.empty();
  if (first) {
    state.programs.resize(corpus.size());
    state.accepted.assign(corpus.size(), false);
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    RecognitionResult& r = results[i];
    const bool keep_old = !first && state.accepted[i] &&
                          (!r.accepted || dsl::description_length(r.program) >
                                              dsl::description_length(state.programs[i]));
    if (keep_old) continue;
    state.programs[i] = std::move(r.program);
    state.accepted[i] = r.accepted;
  }
}

void sleep(const WakeSleepConfig& config, ProposalClient* remote, WakeSleepResult& state, IterationStats& stats) {
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < state.programs.size(); ++i) {
    if (state.accepted[i]) index.push_back(i);
  }
  if (index.empty()) return;
  const auto gather = [&] {
    std::vector<dsl::Program> c;
    for (std::size_t i : index) c.push_back(state.programs[i]);
    return c;
  };

  std::vector<dsl::Program> corpus = gather();
  std::vector<dsl::FuncDef> candidates;
  bool mined = false;
  if (remote) {
    try {
      candidates = propose_remote(corpus, state.library, *remote, config.max_attempts);
    } catch (const RemoteUnavailable&) {
      if (!config.heuristic_fallback) throw;
    }
    mined = !candidates.empty();
  }
  if (!mined) candidates = mine_abstractions(corpus, state.library);

  // First score every candidate on the current corpus, then admit greedily,
  // rescoring because each admission changes the corpus.
  std::vector<std::pair<long long, dsl::FuncDef>> ranked;
  for (dsl::FuncDef& c : candidates) {
    if (state.library.resolves(c.name)) continue;
    try {
      ranked.emplace_back(rewrite_corpus(corpus, c, state.library).report.gain, std::move(c));
    } catch (const Error&) {
      // Candidates that cannot run are dropped.
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  int admitted = 0;
  for (auto& [gain, candidate] : ranked) {
    if (admitted >= config.max_admissions_per_iteration) break;
    if (gain < config.min_gain) break;
    RewriteResult out = rewrite_corpus(corpus, candidate, state.library);
    stats.reports.push_back(out.report);
    if (!accept_candidate(out.report, config.min_gain)) continue;
    state.library = state.library.with_function(candidate);
    for (std::size_t k = 0; k < index.size(); ++k) state.programs[index[k]] = out.corpus[k];
    corpus = std::move(out.corpus);
    stats.admitted.push_back(candidate.name);
    ++admitted;
  }
}

}  // namespace

WakeSleepResult run_wake_sleep(std::span<const Layout> corpus, const Library& initial, const WakeSleepConfig& config,
                               ProposalClient* remote) {
  if (corpus.empty()) throw Error("wake-sleep needs a non-empty corpus");
  if (config.iterations < 0) throw Error("iterations must be >= 0");
  WakeSleepResult state;
  state.library = initial;
  if (config.iterations == 0) {
    wake(corpus, initial, config, remote, state);
    return state;
  }
  for (int it = 1; it <= config.iterations; ++it) {
    IterationStats stats;
    stats.iteration = it;
    wake(corpus, state.library, config, remote, state);
    stats.acceptance_rate = static_cast<double>(std::count(state.accepted.begin(), state.accepted.end(), true)) /
                            static_cast<double>(corpus.size());
    stats.wake_funcs_per_program = funcs_per_program(state.programs);
    stats.wake_mean_description_length = mean_description_length(state.programs);
    sleep(config, remote, state, stats);
    stats.funcs_per_program = funcs_per_program(state.programs);
    stats.mean_description_length = mean_description_length(state.programs);
    state.stats.push_back(std::move(stats));
  }
  return state;
}

}  // namespace sceneforge

#include <deque>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "sceneforge/error.hpp"
#include "sceneforge/interp.hpp"
#include "sceneforge/synth.hpp"
#include "sceneforge/verify.hpp"
#include "sceneforge/wakesleep.hpp"

using namespace sceneforge;

namespace {

const Room kRoom = Room::rectangular({-10, -10, 10, 10});

PlacedObject object(int id, const std::string& category, Aabb box) {
  PlacedObject o;
  o.id = id;
  o.category = category;
  o.box = box;
  return o;
}

Layout layout_of(std::vector<PlacedObject> objects) {
  Layout l;
  l.objects = std::move(objects);
  l.room_bounds = kRoom.bounds;
  l.walls = kRoom.walls;
  return l;
}

std::vector<std::string> callees(const dsl::Program& p) {
  std::vector<std::string> out;
  for (const dsl::Stmt& s : p.statements) {
    if (const auto* a = std::get_if<dsl::Assign>(&s.node)) {
      if (const auto* c = std::get_if<dsl::Call>(&a->value.node)) out.push_back(c->callee);
    }
  }
  return out;
}

// Replays a fixed script; an empty entry means a transport failure.
class ScriptedClient : public ProposalClient {
 public:
  explicit ScriptedClient(std::deque<std::optional<std::string>> script) : script_(std::move(script)) {}

  ProposalResponse send(const ProposalRequest& request) override {
    requests.push_back(request);
    if (script_.empty()) throw RemoteUnavailable("script exhausted");
    std::optional<std::string> next = script_.front();
    script_.pop_front();
    if (!next) throw RemoteUnavailable("timed out");
    return {*next, "stop"};
  }

  std::vector<ProposalRequest> requests;

 private:
  std::deque<std::optional<std::string>> script_;
};

}  // namespace

TEST_CASE("one box becomes one furniture statement") {
  const Layout l = layout_of({object(0, "bed", {0, 0, 2, 1.5})});
  const dsl::Program p = recognize_heuristic(l, Library::standard());
  CHECK(dsl::format(p) == "bed_1 = furniture(0.0, 0.0, 2.0, 1.5)\n");
}

TEST_CASE("three evenly spaced chairs become an align row") {
  const Layout l = layout_of({object(0, "chair", {0, 0, 0.5, 0.5}), object(1, "chair", {2, 0, 2.5, 0.5}),
                              object(2, "chair", {4, 0, 4.5, 0.5})});
  const dsl::Program p = recognize_heuristic(l, Library::standard());
  CHECK(dsl::format(p) ==
        "chair_1 = furniture(0.0, 0.0, 0.5, 0.5)\nchair_2 = align(chair_1, 3.0, 2.0, 4.0)\n");
  CHECK(execute(p, Library::standard(), kRoom).objects.size() == 3);
  CHECK(verify(l, execute(p, Library::standard(), kRoom)) == 1.0);
}

TEST_CASE("stools ringing a table become a cluster") {
  const Aabb table{-1, -1, 1, 1};
  std::vector<PlacedObject> objs{object(0, "table", table)};
  const Vec2 offs[] = {{1.5, 0}, {0, 1.5}, {-1.5, 0}, {0, -1.5}};
  int id = 1;
  for (Vec2 o : offs) objs.push_back(object(id++, "stool", Aabb::from_center(o, 0.4, 0.4)));
  const Layout l = layout_of(objs);
  const dsl::Program p = recognize_heuristic(l, Library::standard());
  const auto cs = callees(p);
  CHECK(cs == std::vector<std::string>{"furniture", "cluster_placement"});
  const dsl::Program expected = dsl::parse(
      "table_1 = furniture(-1, -1, 1, 1)\n"
      "stool_1 = cluster_placement(table_1, [(1.5, 0), (0, 1.5), (-1.5, 0), (0, -1.5)], (0.4, 0.4))\n");
  CHECK(dsl::format(p) == dsl::format(expected));
  const Layout back = execute(p, Library::standard(), kRoom);
  CHECK(verify(l, back) >= kExactMiou);
}

TEST_CASE("a lattice becomes a grid and a shifted lattice grid_with_offset") {
  std::vector<PlacedObject> objs;
  int id = 0;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) {
      const double x = c * 1.5 + (r == 1 ? 0.25 : 0.0);
      objs.push_back(object(id++, "desk", {x, r * 2.0, x + 1.0, r * 2.0 + 0.5}));
    }
  }
  const Layout shifted = layout_of(objs);
  dsl::Program p = recognize_heuristic(shifted, Library::standard());
  CHECK(callees(p) == std::vector<std::string>{"furniture", "grid_with_offset"});
  CHECK(verify(shifted, execute(p, Library::standard(), kRoom)) >= kExactMiou);

  for (auto& o : objs) {
    if (o.box.y_min > 1) o.box = o.box.translated({-0.25, 0});
  }
  const Layout plain = layout_of(objs);
  p = recognize_heuristic(plain, Library::standard());
  CHECK(callees(p) == std::vector<std::string>{"furniture", "grid"});
  CHECK(verify(plain, execute(p, Library::standard(), kRoom)) >= kExactMiou);

  // Without grid built-ins the same boxes fall back to rows.
  Library rows_only = Library::bootstrap();
  rows_only.builtins.insert("align");
  p = recognize_heuristic(plain, rows_only);
  CHECK(verify(plain, execute(p, rows_only, kRoom)) >= kExactMiou);
  for (const std::string& c : callees(p)) CHECK(rows_only.has_builtin(c));
}

TEST_CASE("verify matches within categories") {
  const Layout a = layout_of({object(0, "chair", {0, 0, 2, 2})});
  CHECK(verify(a, a) == 1.0);
  CHECK(verify(a, layout_of({})) == 0.0);
  CHECK(verify(layout_of({}), layout_of({})) == 1.0);
  const Layout pred = layout_of({object(0, "chair", {1, 0, 3, 2}), object(1, "chair", {10, 10, 11, 11})});
  // IoU of the overlap is 2 / 6; the stray box matches nothing.
  CHECK(verify(a, pred) == doctest::Approx((2.0 / 6.0) / 2.0).epsilon(1e-15));
  CHECK(verify(pred, a) == verify(a, pred));
  CHECK(verify(a, layout_of({object(0, "table", {0, 0, 2, 2})})) == 0.0);
}

TEST_CASE("assignment oracle agrees with brute force") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 5, m = 1 + (trial / 5) % 5;
    std::vector<std::vector<double>> w(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(m)));
    for (auto& row : w) {
      for (double& x : row) x = u(rng);
    }
    const std::vector<int> a = max_weight_assignment(w);
    double got = 0.0;
    std::vector<bool> used(static_cast<std::size_t>(m), false);
    for (int i = 0; i < n; ++i) {
      if (a[static_cast<std::size_t>(i)] < 0) continue;
      CHECK_FALSE(used[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])]);
      used[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])] = true;
      got += w[static_cast<std::size_t>(i)][static_cast<std::size_t>(a[static_cast<std::size_t>(i)])];
    }
    // Exhaustive search over injective partial maps.
    std::function<double(int, std::vector<bool>&)> best = [&](int i, std::vector<bool>& taken) -> double {
      if (i == n) return 0.0;
      double b = best(i + 1, taken);
      for (int j = 0; j < m; ++j) {
        if (taken[static_cast<std::size_t>(j)]) continue;
        taken[static_cast<std::size_t>(j)] = true;
        b = std::max(b, w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] + best(i + 1, taken));
        taken[static_cast<std::size_t>(j)] = false;
      }
      return b;
    };
    std::vector<bool> taken(static_cast<std::size_t>(m), false);
    CHECK(got == doctest::Approx(best(0, taken)).epsilon(1e-12));
  }
}

TEST_CASE("heuristic recognizer reconstructs generated stdlib layouts") {
  std::mt19937_64 rng(11);
  const Library lib = Library::standard();
  int exact = 0;
  const int n = 60;
  for (int i = 0; i < n; ++i) {
    const dsl::Program src = synth::stdlib_program(rng);
    const Layout layout = execute(src, lib, synth::room());
    const dsl::Program parsed = recognize_heuristic(layout, lib);
    const RecognitionResult r = score_recognition(layout, parsed, lib, kDefaultAcceptThreshold,
                                                  RecognitionSource::kHeuristic);
    CHECK(r.accepted == (r.miou >= kDefaultAcceptThreshold));
    exact += r.miou >= kExactMiou;
    CHECK(dsl::parse(dsl::format(parsed)) == parsed);
  }
  CHECK(exact == n);
}

TEST_CASE("remote recognition with scripted clients") {
  const Layout l = layout_of({object(0, "chair", {0, 0, 0.5, 0.5}), object(1, "chair", {2, 0, 2.5, 0.5}),
                              object(2, "chair", {4, 0, 4.5, 0.5})});
  const Library lib = Library::standard();
  const std::string good = dsl::format(recognize_heuristic(l, lib));

  SUBCASE("oracle") {
    ScriptedClient client({good});
    const RecognitionResult r = recognize_remote(l, lib, client);
    CHECK(r.accepted);
    CHECK(r.miou == 1.0);
    CHECK(r.source == RecognitionSource::kRemote);
    CHECK(r.failures == 0);
    REQUIRE(client.requests.size() == 1);
    CHECK(client.requests[0].mode == "recognize");
    CHECK(to_json(client.requests[0]).at("payload").at("objects").size() == 3);
  }
  SUBCASE("garbage then valid") {
    ScriptedClient client({std::string("this is ( not a program"), good});
    const RecognitionResult r = recognize_remote(l, lib, client);
    CHECK(r.accepted);
    CHECK(r.failures == 1);
    REQUIRE(client.requests.size() == 2);
    CHECK_FALSE(client.requests[0].feedback.has_value());
    CHECK(client.requests[1].feedback.has_value());
  }
  SUBCASE("wrong program is scored but not accepted") {
    ScriptedClient client({std::string("chair_1 = furniture(0, 0, 0.5, 0.5)"), std::string("x = 1"),
                           std::string("chair_1 = nowhere(1)")});
    const RecognitionResult r = recognize_remote(l, lib, client);
    CHECK_FALSE(r.accepted);
    CHECK(r.miou == doctest::Approx(1.0 / 3.0));
    CHECK(r.failures == 3);
  }
  SUBCASE("always timing out") {
    ScriptedClient client({std::nullopt, std::nullopt, std::nullopt});
    CHECK_THROWS_AS(recognize_remote(l, lib, client, 3), RemoteUnavailable);
    CHECK(client.requests.size() == 3);
  }
  SUBCASE("wake-sleep falls back to the heuristic") {
    ScriptedClient client({});
    WakeSleepConfig cfg;
    cfg.iterations = 1;
    const std::vector<Layout> corpus{l};
    const WakeSleepResult out = run_wake_sleep(corpus, lib, cfg, &client);
    CHECK(out.accepted[0]);
    cfg.heuristic_fallback = false;
    ScriptedClient dead({});
    CHECK_THROWS_AS(run_wake_sleep(corpus, lib, cfg, &dead), RemoteUnavailable);
  }
}

TEST_CASE("remote abstraction proposals") {
  const std::vector<dsl::Program> corpus{dsl::parse("a_1 = furniture(0, 0, 1, 1)")};
  ScriptedClient client({std::string("not code ("), std::string("def pair(o) {\n    return align(o, 2, 1, 4)\n}")});
  const auto defs = propose_remote(corpus, Library::standard(), client);
  REQUIRE(defs.size() == 1);
  CHECK(defs[0].name == "pair");
  CHECK(client.requests[0].mode == "abstract");
  CHECK(client.requests[0].payload.size() == 1);
}

TEST_CASE("miner generalises rows across programs") {
  std::vector<dsl::Program> corpus;
  for (int k = 0; k < 3; ++k) {
    std::string src;
    for (int i = 0; i < 4; ++i) {
      const double x = k + i * (1.0 + 0.5 * k);
      src += "desk_" + std::to_string(i + 1) + " = furniture(" + dsl::format_number(x) + ", " +
             dsl::format_number(2.0 * k) + ", " + dsl::format_number(x + 0.75) + ", " +
             dsl::format_number(2.0 * k + 0.5) + ")\n";
    }
    corpus.push_back(dsl::parse(src));
  }
  const auto defs = mine_abstractions(corpus, Library::bootstrap());
  const dsl::FuncDef* row_sized = nullptr;
  for (const auto& d : defs) {
    if (d.name == "repeat_row_sized") row_sized = &d;
  }
  REQUIRE(row_sized != nullptr);
  // Width and height are shared by every instance so they become literals.
  CHECK(row_sized->params == std::vector<std::string>{"x_min", "y_min", "dx"});
  CHECK(dsl::format(dsl::Program{{}, {*row_sized}}).find("0.75") != std::string::npos);
  const RewriteResult out = rewrite_corpus(corpus, *row_sized, Library::bootstrap());
  CHECK(out.report.programs_rewritten == 3);
  CHECK(accept_candidate(out.report));
}

TEST_CASE("wake-sleep learns a grid-like abstraction from the bootstrap library") {
  std::mt19937_64 rng(5);
  std::vector<Layout> corpus;
  for (int i = 0; i < 12; ++i) {
    corpus.push_back(execute(synth::grid_row_program(rng), Library::standard(), synth::room()));
  }
  WakeSleepConfig cfg;
  cfg.iterations = 2;
  const WakeSleepResult out = run_wake_sleep(corpus, Library::bootstrap(), cfg);
  REQUIRE(out.stats.size() == 2);
  CHECK(out.library.functions.size() >= 1);
  CHECK(out.stats.back().mean_description_length < out.stats.front().wake_mean_description_length);
  CHECK(out.stats.back().funcs_per_program > out.stats.front().wake_funcs_per_program);
  for (const auto& s : out.stats) {
    CHECK(s.acceptance_rate == 1.0);
    CHECK(s.mean_description_length <= s.wake_mean_description_length);
  }
  CHECK(out.stats[1].mean_description_length <= out.stats[0].mean_description_length);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(verify(corpus[i], execute(out.programs[i], out.library, synth::room())) >= kExactMiou);
  }

  SUBCASE("rerunning on its own output admits nothing") {
    WakeSleepConfig again = cfg;
    again.iterations = 1;
    const WakeSleepResult second = run_wake_sleep(corpus, out.library, again);
    CHECK(second.stats[0].admitted.empty());
    CHECK(second.library == out.library);
    CHECK(second.stats[0].mean_description_length == second.stats[0].wake_mean_description_length);
  }
}

TEST_CASE("zero iterations return the library unchanged") {
  std::mt19937_64 rng(1);
  const std::vector<Layout> corpus{execute(synth::grid_row_program(rng), Library::standard(), synth::room())};
  WakeSleepConfig cfg;
  cfg.iterations = 0;
  const WakeSleepResult out = run_wake_sleep(corpus, Library::bootstrap(), cfg);
  CHECK(out.library == Library::bootstrap());
  CHECK(out.stats.empty());
  CHECK_THROWS_AS(run_wake_sleep(std::vector<Layout>{}, Library::bootstrap(), cfg), Error);
}

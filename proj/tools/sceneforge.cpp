#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sceneforge/assemble.hpp"
#include "sceneforge/compression.hpp"
#include "sceneforge/dsl.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/eval.hpp"
#include "sceneforge/interp.hpp"
#include "sceneforge/io.hpp"
#include "sceneforge/library.hpp"
#include "sceneforge/pose.hpp"
#include "sceneforge/synth.hpp"
#include "sceneforge/verify.hpp"
#include "sceneforge/wakesleep.hpp"

namespace fs = std::filesystem;
using namespace sceneforge;

namespace {

// Settings shared by every command; each one can also come from the config file.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string library;
  std::string corpus;
  std::string catalog;
  std::string model;
  WakeSleepConfig wakesleep;
  TrainConfig train;
  PoseHyper hyper;
  int retries = 3;
  double timeout = 60.0;
  std::vector<std::string> examples;
  bool json = false;
};

void emit(const RunConfig& run, const Json& result, const std::string& text) {
  if (run.json)
    std::cout << dump_json(result);
  else if (!text.empty())
    std::cout << text << "\n";
}

Library load_library(const std::string& path, Library fallback) {
  if (path.empty()) return fallback;
  return parse_library(read_file(path));
}

Layout load_layout(const fs::path& path) { return layout_from_json(parse_json(read_file(path), path.string())); }

dsl::Program load_program(const fs::path& path) {
  try {
    return dsl::parse(read_file(path));
  } catch (const SyntaxError& e) {
    throw Error(path.string() + ":" + e.what());
  }
}

// Layout files named directly, or every *.json layout inside a directory
// (sorted; thetas sidecars are skipped).
std::vector<fs::path> expand_layouts(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (in.empty()) continue;
    if (!fs::is_directory(in)) {
      out.emplace_back(in);
      continue;
    }
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(in)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && entry.path().extension() == ".json" && !name.ends_with(".thetas.json"))
        found.push_back(entry.path());
    }
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  if (out.empty()) throw CLI::ValidationError("layouts", "no layout files given");
  return out;
}

fs::path sidecar(const fs::path& layout, const std::string& suffix) {
  return layout.parent_path() / (layout.stem().string() + suffix);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir.string() + "': " + ec.message());
}

Json stats_json(const IterationStats& s) {
  Json admitted = Json::array();
  for (const auto& a : s.admitted) admitted.push_back(a);
  return {{"iteration", s.iteration},
          {"acceptance_rate", s.acceptance_rate},
          {"funcs_per_program", s.funcs_per_program},
          {"mean_dl", s.mean_description_length},
          {"wake_funcs_per_program", s.wake_funcs_per_program},
          {"wake_mean_dl", s.wake_mean_description_length},
          {"admitted", admitted}};
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// --- commands --------------------------------------------------------------

struct ParseArgs {
  std::string program;
  std::string out;
};

void cmd_parse(const RunConfig& run, const ParseArgs& a) {
  const dsl::Program p = load_program(a.program);
  const std::string canonical = dsl::format(p);
  if (!a.out.empty()) write_file(a.out, canonical);
  emit(run,
       {{"statements", p.statements.size()},
        {"defs", p.defs.size()},
        {"description_length", dsl::description_length(p)},
        {"high_level_calls", count_high_level_calls(p)}},
       a.out.empty() ? canonical : "description length " + std::to_string(dsl::description_length(p)));
}

struct ExecArgs {
  std::string program;
  std::string room;
  std::string out;
};

void cmd_exec(const RunConfig& run, const ExecArgs& a) {
  const dsl::Program p = load_program(a.program);
  const Library lib = load_library(run.library, Library::standard());
  const Room room = room_from_json(parse_json(read_file(a.room), a.room));
  const Layout layout = execute(p, lib, room);
  write_file(a.out, dump_json(to_json(layout)));
  emit(run, {{"objects", layout.objects.size()}, {"out", a.out}},
       std::to_string(layout.objects.size()) + " objects -> " + a.out);
}

struct VerifyArgs {
  std::string target;
  std::string pred;
};

void cmd_verify(const RunConfig& run, const VerifyArgs& a) {
  const double m = verify(load_layout(a.target), load_layout(a.pred));
  emit(run, {{"miou", m}}, "miou " + fixed(m));
}

struct MineArgs {
  std::vector<std::string> layouts;
  std::string out_dir;
};

void cmd_mine(const RunConfig& run, const MineArgs& a) {
  const Library lib = load_library(run.library, Library::standard());
  ensure_dir(a.out_dir);
  Json results = Json::array();
  std::string text;
  std::size_t accepted = 0;
  for (const fs::path& path : expand_layouts(a.layouts.empty() ? std::vector{run.corpus} : a.layouts)) {
    const Layout layout = load_layout(path);
    const dsl::Program p = recognize_heuristic(layout, lib);
    const RecognitionResult r =
        score_recognition(layout, p, lib, run.wakesleep.accept_threshold, RecognitionSource::kHeuristic);
    const fs::path out = fs::path(a.out_dir) / (path.stem().string() + ".scene");
    write_file(out, dsl::format(p));
    accepted += r.accepted;
    results.push_back({{"layout", path.string()}, {"program", out.string()}, {"miou", r.miou}, {"accepted", r.accepted}});
    text += path.filename().string() + ": miou " + fixed(r.miou) + (r.accepted ? "" : " (rejected)") + "\n";
  }
  text += std::to_string(accepted) + "/" + std::to_string(results.size()) + " accepted";
  emit(run, {{"results", results}, {"accepted", accepted}}, text);
}

struct LearnArgs {
  std::vector<std::string> layouts;
  std::string out_library;
  std::string out_dir;
};

void cmd_learn(const RunConfig& run, const LearnArgs& a) {
  const Library initial = load_library(run.library, Library::bootstrap());
  const auto paths = expand_layouts(a.layouts.empty() ? std::vector{run.corpus} : a.layouts);
  std::vector<Layout> corpus;
  for (const auto& p : paths) corpus.push_back(load_layout(p));
  WakeSleepConfig config = run.wakesleep;
  config.max_attempts = run.retries;
  const auto remote = HttpProposalClient::from_environment(run.timeout);
  const WakeSleepResult result = run_wake_sleep(corpus, initial, config, remote.get());

  write_file(a.out_library, serialize_library(result.library));
  if (!a.out_dir.empty()) {
    ensure_dir(a.out_dir);
    for (std::size_t i = 0; i < paths.size(); ++i)
      write_file(fs::path(a.out_dir) / (paths[i].stem().string() + ".scene"), dsl::format(result.programs[i]));
  }
  Json stats = Json::array();
  std::string text;
  for (const auto& s : result.stats) {
    stats.push_back(stats_json(s));
    text += "iteration " + std::to_string(s.iteration) + ": accepted " + fixed(s.acceptance_rate) + ", funcs/program " +
            fixed(s.funcs_per_program) + ", mean dl " + fixed(s.mean_description_length) + ", admitted " +
            std::to_string(s.admitted.size()) + "\n";
  }
  Json functions = Json::array();
  for (const auto& f : result.library.functions) functions.push_back(f.name);
  text += std::to_string(result.library.functions.size()) + " learned functions -> " + a.out_library;
  emit(run, {{"stats", stats}, {"functions", functions}, {"library", a.out_library}}, text);
}

struct GenArgs {
  int count = 10;
  std::string room;
  std::string out_dir;
};

// Asks the proposer for one program, feeding execution errors back on retries.
dsl::Program generate_remote(ProposalClient& client, const Library& lib, const Room& room,
                             const std::vector<std::string>& examples, int attempts) {
  ProposalRequest req{"generate", serialize_library(lib), Json::object(), std::nullopt};
  Json ex = Json::array();
  for (const auto& e : examples) ex.push_back(read_file(e));
  req.payload = {{"examples", ex}, {"room", to_json(room)}};
  std::string last = "no attempts";
  for (int i = 0; i < attempts; ++i) {
    const ProposalResponse r = client.send(req);
    try {
      dsl::Program p = dsl::parse(r.text);
      execute(p, lib, room);
      return p;
    } catch (const Error& e) {
      last = e.what();
      req.feedback = last;
    }
  }
  throw RemoteUnavailable("proposer produced no executable program: " + last);
}

// Offline sampling: a random grid/row layout, re-expressed with the library's
// built-ins and compressed with every learned function.
dsl::Program generate_offline(std::mt19937_64& rng, const Library& lib, const Room& room) {
  const Layout sample = execute(synth::grid_row_program(rng), Library::standard(), room);
  dsl::Program p = recognize_heuristic(sample, lib);
  for (const auto& f : lib.functions) p = rewrite_program(p, f.name, lib);
  return p;
}

void cmd_gen(const RunConfig& run, const GenArgs& a) {
  const Library lib = load_library(run.library, Library::standard());
  const Room room = a.room.empty() ? synth::room() : room_from_json(parse_json(read_file(a.room), a.room));
  const auto remote = HttpProposalClient::from_environment(run.timeout);
  ensure_dir(a.out_dir);
  std::mt19937_64 rng(run.seed);
  Json files = Json::array();
  for (int i = 0; i < a.count; ++i) {
    const dsl::Program p =
        remote ? generate_remote(*remote, lib, room, run.examples, run.retries) : generate_offline(rng, lib, room);
    char stem[32];
    std::snprintf(stem, sizeof stem, "gen_%03d", i);
    const fs::path base = fs::path(a.out_dir) / stem;
    write_file(base.string() + ".scene", dsl::format(p));
    write_file(base.string() + ".json", dump_json(to_json(execute(p, lib, room))));
    files.push_back(base.string() + ".json");
  }
  emit(run, {{"layouts", files}, {"source", remote ? "remote" : "offline"}},
       std::to_string(a.count) + " programs -> " + a.out_dir);
}

struct ExtractArgs {
  std::string scan;
  std::string out;
};

void cmd_extract_gt(const RunConfig& run, const ExtractArgs& a) {
  const Json j = parse_json(read_file(a.scan), a.scan);
  if (!j.contains("objects") || !j["objects"].is_array()) throw FormatError(a.scan + ": expected an 'objects' array");
  std::vector<ScanObject> objects;
  for (const auto& o : j["objects"]) {
    if (!o.contains("category") || !o.contains("points")) throw FormatError(a.scan + ": objects need category and points");
    ScanObject s{o["category"].get<std::string>(), {}};
    for (const auto& p : o["points"]) s.points.push_back(vec2_from_json(p));
    objects.push_back(std::move(s));
  }
  std::vector<std::string> warnings;
  const auto gt = extract_gt(objects, &warnings);
  Json out = Json::array();
  std::size_t found = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt[i]) {
      out.push_back(nullptr);
      continue;
    }
    ++found;
    out.push_back({{"category", objects[i].category},
                   {"theta", gt[i]->theta},
                   {"bin", gt[i]->bin.index()},
                   {"box", to_json(gt[i]->box)},
                   {"low_confidence", gt[i]->low_confidence}});
  }
  const Json doc{{"objects", out}, {"warnings", warnings}};
  write_file(a.out, dump_json(doc));
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  emit(run, {{"extracted", found}, {"skipped", gt.size() - found}, {"out", a.out}},
       std::to_string(found) + "/" + std::to_string(gt.size()) + " orientations -> " + a.out);
}

struct TrainArgs {
  std::string dataset;
  int synthetic = 0;
  bool no_dependency = false;
  std::string out;
};

void cmd_train_pose(const RunConfig& run, const TrainArgs& a) {
  if (a.dataset.empty() == (a.synthetic == 0)) throw CLI::ValidationError("--dataset", "give exactly one of --dataset or --synthetic");
  const auto data = a.dataset.empty() ? synthetic_pose_dataset(static_cast<std::size_t>(a.synthetic), run.seed)
                                      : pose_dataset_from_jsonl(read_file(a.dataset));
  PoseHyper hyper = run.hyper;
  hyper.dependency_conditioning = !a.no_dependency;
  TrainConfig config = run.train;
  config.seed = run.seed;
  TrainLog log;
  const PoseModel model = train_pose(data, hyper, config, &log);
  const std::string out = a.out.empty() ? run.model : a.out;
  if (out.empty()) throw CLI::ValidationError("-o", "an output model path is required");
  model.save(out);
  const double final_loss = log.losses.empty() ? 0.0 : log.losses.back();
  emit(run,
       {{"scenes", data.size()},
        {"steps", config.steps},
        {"parameters", model.parameter_count()},
        {"final_loss", final_loss},
        {"model", out}},
       "trained " + std::to_string(config.steps) + " steps on " + std::to_string(data.size()) + " scenes, final loss " +
           fixed(final_loss) + " -> " + out);
}

struct PredictArgs {
  std::string layout;
  std::string out;
};

void cmd_predict_pose(const RunConfig& run, const PredictArgs& a) {
  if (run.model.empty()) throw CLI::ValidationError("--model", "a pose model is required");
  const PoseModel model = PoseModel::load(run.model);
  const auto thetas = predict_pose(model, load_layout(a.layout));
  write_file(a.out, dump_json(thetas_to_json(thetas)));
  emit(run, thetas_to_json(thetas), std::to_string(thetas.size()) + " orientations -> " + a.out);
}

struct AssembleArgs {
  std::string layout;
  std::string thetas;
  std::string out;
};

void cmd_assemble(const RunConfig& run, const AssembleArgs& a) {
  if (run.catalog.empty()) throw CLI::ValidationError("--catalog", "an asset catalog is required");
  const AssetCatalog catalog = catalog_from_json(parse_json(read_file(run.catalog), run.catalog));
  const auto thetas = thetas_from_json(parse_json(read_file(a.thetas), a.thetas));
  const AssembledScene scene = assemble(load_layout(a.layout), thetas, catalog);
  write_file(a.out, dump_json(to_json(scene)));
  emit(run, {{"placements", scene.placements.size()}, {"out", a.out}},
       std::to_string(scene.placements.size()) + " placements -> " + a.out);
}

struct RenderArgs {
  std::vector<std::string> layouts;
  std::string thetas;
  std::string out;
};

void cmd_render(const RunConfig& run, const RenderArgs& a) {
  const auto paths = expand_layouts(a.layouts);
  std::string svg;
  if (paths.size() == 1) {
    const Layout l = load_layout(paths[0]);
    std::optional<std::map<int, double>> thetas;
    if (!a.thetas.empty()) thetas = thetas_from_json(parse_json(read_file(a.thetas), a.thetas));
    svg = render_svg(l, thetas ? &*thetas : nullptr);
  } else {
    if (!a.thetas.empty()) throw CLI::ValidationError("--thetas", "only valid with a single layout");
    std::vector<Layout> layouts;
    for (const auto& p : paths) layouts.push_back(load_layout(p));
    svg = render_panel(layouts);
  }
  write_file(a.out, svg);
  emit(run, {{"layouts", paths.size()}, {"out", a.out}}, "svg -> " + a.out);
}

struct EvalArgs {
  std::vector<std::string> generated;
  std::vector<std::string> reference;
  std::string out;
  std::string svg;
};

// A layout plus its optional <stem>.thetas.json and <stem>.scene sidecars.
std::vector<EvalItem> load_items(const std::vector<std::string>& inputs) {
  std::vector<EvalItem> items;
  for (const auto& path : expand_layouts(inputs)) {
    EvalItem item;
    item.layout = load_layout(path);
    const fs::path thetas = sidecar(path, ".thetas.json"), program = sidecar(path, ".scene");
    if (fs::exists(thetas)) item.thetas = thetas_from_json(parse_json(read_file(thetas), thetas.string()));
    if (fs::exists(program)) item.program = load_program(program);
    items.push_back(std::move(item));
  }
  return items;
}

void cmd_eval(const RunConfig& run, const EvalArgs& a) {
  const auto gen = load_items(a.generated);
  const auto ref = load_items(a.reference);
  const Json report = eval_report(gen, ref);
  if (!a.out.empty()) write_file(a.out, dump_json(report));
  if (!a.svg.empty()) {
    std::vector<Layout> layouts;
    std::vector<std::map<int, double>> thetas;
    for (const auto& item : gen) {
      layouts.push_back(item.layout);
      thetas.push_back(item.thetas);
    }
    write_file(a.svg, render_panel(layouts, thetas));
  }
  std::string text = "mmd " + (report["mmd"].is_null() ? std::string("n/a") : fixed(report["mmd"].get<double>()));
  text += ", funcs/program " + fixed(report["generated"]["funcs_per_program"].get<double>()) + " vs " +
          fixed(report["reference"]["funcs_per_program"].get<double>());
  emit(run, report, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sceneforge: program-based indoor layout toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key = value settings file (see README)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  RunConfig run;
  app.add_flag("--json", run.json, "Machine-readable output on stdout");
  app.add_option("--seed", run.seed, "Seed for every stochastic step");
  app.add_option("--library", run.library, "Library file (.scenelib)")->check(CLI::ExistingFile);
  app.add_option("--corpus", run.corpus, "Default layout directory for mine and learn")->check(CLI::ExistingPath);
  app.add_option("--catalog", run.catalog, "Asset catalog JSON")->check(CLI::ExistingFile);
  app.add_option("--model", run.model, "Pose model file");
  app.add_option("--iterations", run.wakesleep.iterations, "Wake-sleep iterations")->check(CLI::NonNegativeNumber);
  app.add_option("--accept-threshold", run.wakesleep.accept_threshold, "mIoU needed to accept a parse")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--min-gain", run.wakesleep.min_gain, "Token gain needed to admit an abstraction");
  app.add_option("--lr", run.train.learning_rate, "Pose learning rate")->check(CLI::PositiveNumber);
  app.add_option("--steps", run.train.steps, "Pose training steps")->check(CLI::NonNegativeNumber);
  app.add_option("--batch-size", run.train.batch_size, "Scenes per training step")->check(CLI::PositiveNumber);
  app.add_option("--upsample-threshold", run.train.upsample_threshold, "Rare-category frequency threshold");
  app.add_option("--upsample-factor", run.train.upsample_factor, "Rare-category repeat factor")
      ->check(CLI::PositiveNumber);
  app.add_option("--d-model", run.hyper.d, "Pose model width")->check(CLI::PositiveNumber);
  app.add_option("--heads", run.hyper.heads, "Attention heads")->check(CLI::PositiveNumber);
  app.add_option("--layers", run.hyper.layers, "Attention layers")->check(CLI::NonNegativeNumber);
  app.add_option("--ffn", run.hyper.ffn, "Feed-forward width")->check(CLI::PositiveNumber);
  app.add_option("--retries", run.retries, "Proposer attempts per request")->check(CLI::PositiveNumber);
  app.add_option("--timeout", run.timeout, "Proposer timeout in seconds")->check(CLI::PositiveNumber);
  app.add_option("--examples", run.examples, "Few-shot example programs sent to the proposer")
      ->check(CLI::ExistingFile);

  ParseArgs parse_args;
  auto* parse = app.add_subcommand("parse", "Parse a program and print it in canonical form");
  parse->add_option("program", parse_args.program, "Program file")->required()->check(CLI::ExistingFile);
  parse->add_option("-o,--out", parse_args.out, "Write the canonical program here");

  ExecArgs exec_args;
  auto* exec = app.add_subcommand("exec", "Execute a program into a layout");
  exec->add_option("program", exec_args.program, "Program file")->required()->check(CLI::ExistingFile);
  exec->add_option("--room", exec_args.room, "Room JSON")->required()->check(CLI::ExistingFile);
  exec->add_option("-o,--out", exec_args.out, "Layout JSON to write")->required();

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Mean IoU between two layouts");
  verify_cmd->add_option("--target", verify_args.target, "Target layout")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--pred", verify_args.pred, "Predicted layout")->required()->check(CLI::ExistingFile);

  MineArgs mine_args;
  auto* mine = app.add_subcommand("mine", "Parse layouts into programs with the heuristic recognizer");
  mine->add_option("layouts", mine_args.layouts, "Layout files or directories")->check(CLI::ExistingPath);
  mine->add_option("--out-dir", mine_args.out_dir, "Directory for <stem>.scene programs")->required();

  LearnArgs learn_args;
  auto* learn = app.add_subcommand("learn", "Run wake-sleep library learning over a layout corpus");
  learn->add_option("layouts", learn_args.layouts, "Layout files or directories")->check(CLI::ExistingPath);
  learn->add_option("--out-library", learn_args.out_library, "Learned library file")->required();
  learn->add_option("--out-dir", learn_args.out_dir, "Directory for the compressed programs");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Sample programs and their layouts");
  gen->add_option("--count", gen_args.count, "Number of programs")->check(CLI::PositiveNumber);
  gen->add_option("--room", gen_args.room, "Room JSON (default 20 x 20 m)")->check(CLI::ExistingFile);
  gen->add_option("--out-dir", gen_args.out_dir, "Directory for gen_NNN.scene and gen_NNN.json")->required();

  ExtractArgs extract_args;
  auto* extract = app.add_subcommand("extract-gt", "Orientation ground truth from object footprints");
  extract->add_option("--scan", extract_args.scan, "Scan JSON")->required()->check(CLI::ExistingFile);
  extract->add_option("-o,--out", extract_args.out, "Ground-truth JSON to write")->required();

  TrainArgs train_args;
  auto* train = app.add_subcommand("train-pose", "Train the pose model");
  train->add_option("--dataset", train_args.dataset, "Pose dataset (JSON lines)")->check(CLI::ExistingFile);
  train->add_option("--synthetic", train_args.synthetic, "Train on this many synthetic scenes instead")
      ->check(CLI::PositiveNumber);
  train->add_flag("--no-dependency-conditioning", train_args.no_dependency, "Ablation without target orientations");
  train->add_option("-o,--out", train_args.out, "Model file to write (default --model)");

  PredictArgs predict_args;
  auto* predict = app.add_subcommand("predict-pose", "Predict object orientations for a layout");
  predict->add_option("--layout", predict_args.layout, "Layout JSON")->required()->check(CLI::ExistingFile);
  predict->add_option("-o,--out", predict_args.out, "Thetas JSON to write")->required();

  AssembleArgs assemble_args;
  auto* assemble_cmd = app.add_subcommand("assemble", "Retrieve and place assets");
  assemble_cmd->add_option("--layout", assemble_args.layout, "Layout JSON")->required()->check(CLI::ExistingFile);
  assemble_cmd->add_option("--thetas", assemble_args.thetas, "Thetas JSON")->required()->check(CLI::ExistingFile);
  assemble_cmd->add_option("-o,--out", assemble_args.out, "Scene JSON to write")->required();

  RenderArgs render_args;
  auto* render = app.add_subcommand("render", "Draw layouts as SVG");
  render->add_option("layouts", render_args.layouts, "Layout files or directories")
      ->required()
      ->check(CLI::ExistingPath);
  render->add_option("--thetas", render_args.thetas, "Thetas JSON for a single layout")->check(CLI::ExistingFile);
  render->add_option("-o,--out", render_args.out, "SVG file to write")->required();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Compare generated layouts with a reference set");
  eval->add_option("--generated", eval_args.generated, "Layout files or directories")
      ->required()
      ->check(CLI::ExistingPath);
  eval->add_option("--reference", eval_args.reference, "Layout files or directories")
      ->required()
      ->check(CLI::ExistingPath);
  eval->add_option("-o,--out", eval_args.out, "Report JSON to write");
  eval->add_option("--svg", eval_args.svg, "Panel of the generated layouts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*parse) cmd_parse(run, parse_args);
    else if (*exec) cmd_exec(run, exec_args);
    else if (*verify_cmd) cmd_verify(run, verify_args);
    else if (*mine) cmd_mine(run, mine_args);
    else if (*learn) cmd_learn(run, learn_args);
    else if (*gen) cmd_gen(run, gen_args);
    else if (*extract) cmd_extract_gt(run, extract_args);
    else if (*train) cmd_train_pose(run, train_args);
    else if (*predict) cmd_predict_pose(run, predict_args);
    else if (*assemble_cmd) cmd_assemble(run, assemble_args);
    else if (*render) cmd_render(run, render_args);
    else if (*eval) cmd_eval(run, eval_args);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

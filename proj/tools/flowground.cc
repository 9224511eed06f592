// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0
//
// flowground: command-line front end for graph tooling, tSort construction,
// grounding, benchmarking, synthesis, training and evaluation.

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flowground/align.h"
#include "flowground/brute_force.h"
#include "flowground/flow_graph.h"
#include "flowground/io.h"
#include "flowground/metrics.h"
#include "flowground/soft.h"
#include "flowground/synth.h"
#include "flowground/tsort_graph.h"
#include "json.hpp"
#include "schema.h"

namespace flowground::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode { kOk = 0, kValidation = 1, kInfeasible = 2 };

// Outputs are collected here and written only after the command succeeded.
class Outputs {
 public:
  void add(const std::string& path, std::string data) {
    files_.emplace_back(path, std::move(data));
  }
  // An empty path means stdout.
  void add_or_print(const std::string& path, std::string data) {
    if (path.empty()) {
      stdout_ += data;
    } else {
      add(path, std::move(data));
    }
  }
  void commit() const {
    for (const auto& [path, data] : files_) write_file(path, data);
    std::fwrite(stdout_.data(), 1, stdout_.size(), stdout);
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
  std::string stdout_;
};

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json big_count(const BigInt& v) {
  if (v <= std::numeric_limits<std::uint64_t>::max()) {
    return static_cast<std::uint64_t>(v);
  }
  return v.str();
}

FlowGraph load_graph(const std::string& path) {
  return normalize(read_flow_graph(path));
}

TSortAlgorithm parse_algorithm(const std::string& name) {
  return name == "backward" ? TSortAlgorithm::kBackward : TSortAlgorithm::kForward;
}

DropMode parse_drop_mode(const std::string& name) {
  return name == "column" ? DropMode::kColumn : DropMode::kMatrix;
}

EmbeddingSequence load_embeddings(const std::string& path,
                                  EmbeddingSequence::Kind kind) {
  return {read_matrix(path), kind};
}

// --- graph -----------------------------------------------------------------

struct GraphArgs {
  std::string in;
  std::string out;
  std::string spec;
  std::size_t cap = kDefaultSortCap;
};

void graph_validate(const GraphArgs& a, Outputs& out) {
  const FlowGraph raw = read_flow_graph(a.in);
  json doc;
  doc["nodes"] = raw.size();
  doc["edges"] = raw.num_edges();
  doc["steps"] = raw.num_steps();
  doc["normalized"] = raw.is_normalized();
  out.add_or_print(a.out, dump(doc));
}

void graph_sorts(const GraphArgs& a, Outputs& out) {
  const auto sorts = enumerate_topological_sorts(load_graph(a.in), a.cap);
  json doc;
  doc["count"] = sorts.size();
  doc["sorts"] = sorts;
  out.add_or_print(a.out, dump(doc));
}

void graph_counts(const GraphArgs& a, Outputs& out) {
  const ThreadSpec spec = ThreadSpec::parse(a.spec);
  json doc;
  doc["spec"] = spec.sizes();
  doc["n_sorts"] = big_count(count_tsorts_closed_form(spec));
  doc["n_tsort_nodes"] = big_count(count_tsort_nodes_closed_form(spec));
  doc["rho"] = complexity_ratio(spec);
  out.add_or_print(a.out, dump(doc));
}

void graph_model(const GraphArgs& a, Outputs& out) {
  out.add_or_print(a.out, to_json(model_problem(ThreadSpec::parse(a.spec))));
}

void graph_normalize(const GraphArgs& a, Outputs& out) {
  out.add_or_print(a.out, to_json(load_graph(a.in)));
}

void graph_dot(const GraphArgs& a, Outputs& out) {
  out.add_or_print(a.out, to_dot(read_flow_graph(a.in)));
}

// --- tsort -----------------------------------------------------------------

struct TSortArgs {
  std::string in;
  std::string algo = "forward";
  std::size_t node_cap = kDefaultTSortNodeCap;
  std::string out;
  std::string dot;
};

void run_tsort(const TSortArgs& a, Outputs& out) {
  const TSortGraph s =
      build_tsort(load_graph(a.in), parse_algorithm(a.algo), {a.node_cap});
  out.add_or_print(a.out, to_json(s));
  if (!a.dot.empty()) out.add(a.dot, to_dot(s));
}

// --- ground / bench --------------------------------------------------------

struct CostArgs {
  std::string graph;
  std::string costs;
  std::string steps;
  std::string clips;
  double temperature = 0.1;
  double drop_percentile = kDefaultDropPercentile;
  std::string drop_mode = "matrix";
};

struct GroundArgs {
  CostArgs cost;
  std::string algo = "forward";
  bool emit_labels = false;
  std::string out;
};

CostMatrix load_costs(const CostArgs& a, const FlowGraph& g) {
  const auto ids = g.step_ids();
  if (!a.costs.empty()) return CostMatrix(read_matrix(a.costs), ids);
  if (a.steps.empty() || a.clips.empty()) {
    throw ValidationError("give --costs, or both --steps and --clips");
  }
  return compute_cost_matrix(
      load_embeddings(a.steps, EmbeddingSequence::Kind::kStep),
      load_embeddings(a.clips, EmbeddingSequence::Kind::kClip), a.temperature,
      ids);
}

void run_ground(const GroundArgs& a, Outputs& out) {
  const FlowGraph g = load_graph(a.cost.graph);
  const CostMatrix c = load_costs(a.cost, g);
  const DropCosts d = compute_drop_costs(c, a.cost.drop_percentile,
                                         parse_drop_mode(a.cost.drop_mode));
  const Alignment al = graph_drop_dtw(build_tsort(g, parse_algorithm(a.algo)), c, d);
  out.add_or_print(a.out, alignment_to_json(al, a.emit_labels));
}

struct BenchArgs {
  CostArgs cost;
  std::size_t repeats = 20;
  std::string algo = "forward";
  std::string out;
};

void run_bench(const BenchArgs& a, Outputs& out) {
  const FlowGraph g = load_graph(a.cost.graph);
  const CostMatrix c = load_costs(a.cost, g);
  const DropCosts d = compute_drop_costs(c, a.cost.drop_percentile,
                                         parse_drop_mode(a.cost.drop_mode));
  out.add_or_print(a.out, bench_report_to_json(
                              bench_compare(g, c, d, a.repeats, parse_algorithm(a.algo))));
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string graph;
  int n = 1;
  SynthParams params;
  std::string format = "csv";
  std::string out;
};

std::string instance_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", i);
  return buf;
}

void run_synth(const SynthArgs& a, Outputs& out) {
  if (a.n < 1) throw ValidationError("--n must be >= 1");
  const FlowGraph g = load_graph(a.graph);
  const auto instances = generate_many(g, a.params, a.n);
  const fs::path dir(a.out);
  const std::string ext = a.format == "bin" ? ".bin" : ".csv";
  auto matrix_bytes = [&](const Matrix& m) {
    return a.format == "bin" ? matrix_to_binary(m) : matrix_to_csv(m);
  };
  out.add((dir / "graph.json").string(), to_json(g));
  json manifest;
  manifest["count"] = a.n;
  manifest["instances"] = json::array();
  manifest["params"] = {{"dim", a.params.dim},
                        {"min_clips_per_step", a.params.min_clips_per_step},
                        {"max_clips_per_step", a.params.max_clips_per_step},
                        {"background_ratio", a.params.background_ratio},
                        {"noise_sigma", a.params.noise_sigma},
                        {"seed", a.params.seed},
                        {"format", a.format}};
  for (int i = 0; i < a.n; ++i) {
    const auto& inst = instances[i];
    const fs::path sub = dir / instance_name(i);
    out.add((sub / ("steps" + ext)).string(), matrix_bytes(inst.step_embeddings.vectors));
    out.add((sub / ("clips" + ext)).string(), matrix_bytes(inst.clips.vectors));
    out.add((sub / "gt.json").string(), ground_truth_to_json(inst.gt_labels, inst.gt_sort));
    manifest["instances"].push_back(instance_name(i));
  }
  out.add((dir / "manifest.json").string(), dump(manifest));
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string data;
  TrainingOptions options;
  std::string trace;
  std::string out;
};

fs::path find_matrix(const fs::path& dir, const std::string& stem) {
  for (const char* ext : {".csv", ".bin"}) {
    const fs::path p = dir / (stem + ext);
    if (fs::exists(p)) return p;
  }
  throw ValidationError("missing " + stem + ".csv or " + stem + ".bin in " +
                        dir.string());
}

std::vector<TrainingInstance> load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw ValidationError("data directory " + dir.string() + " does not exist");
  }
  const FlowGraph g = load_graph((dir / "graph.json").string());
  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "gt.json")) {
      subdirs.push_back(entry.path());
    }
  }
  std::sort(subdirs.begin(), subdirs.end());
  if (subdirs.empty()) {
    throw ValidationError("no instance directories under " + dir.string());
  }
  std::vector<TrainingInstance> data;
  for (const auto& sub : subdirs) {
    TrainingInstance inst;
    inst.graph = g;
    inst.steps = load_embeddings(find_matrix(sub, "steps"), EmbeddingSequence::Kind::kStep);
    inst.clips = load_embeddings(find_matrix(sub, "clips"), EmbeddingSequence::Kind::kClip);
    inst.gt_labels = labels_from_json(read_file(sub / "gt.json"));
    if (inst.gt_labels.size() != inst.clips.count()) {
      throw ValidationError(sub.string() + ": gt.json has " +
                            std::to_string(inst.gt_labels.size()) + " labels for " +
                            std::to_string(inst.clips.count()) + " clips");
    }
    data.push_back(std::move(inst));
  }
  return data;
}

void run_train(const TrainArgs& a, Outputs& out) {
  const auto data = load_dataset(a.data);
  const std::size_t dim = data.front().clips.dim();
  const TrainingResult r =
      train_projection(data, ProjectionModel::identity(dim), a.options);
  std::string csv = "epoch,loss,accuracy\n";
  for (const auto& e : r.trace) {
    char line[96];
    std::snprintf(line, sizeof line, "%d,%.10g,%.10g\n", e.epoch, e.loss, e.accuracy);
    csv += line;
  }
  out.add_or_print(a.trace, csv);
  if (!a.out.empty()) {
    json model;
    model["weight"] = json::array();
    for (std::size_t o = 0; o < r.model.weight.rows(); ++o) {
      const auto row = r.model.weight.row(o);
      model["weight"].push_back(std::vector<double>(row.begin(), row.end()));
    }
    model["bias"] = r.model.bias;
    out.add(a.out, dump(model));
  }
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string gt;
  bool steps_only = false;
  std::string out;
};

void run_eval(const EvalArgs& a, Outputs& out) {
  const auto pred = labels_from_json(read_file(a.pred));
  const auto gt = labels_from_json(read_file(a.gt));
  json doc;
  doc["accuracy"] = framewise_accuracy(
      pred, gt,
      a.steps_only ? AccuracyDenominator::kStepFrames : AccuracyDenominator::kAllFrames);
  doc["iou"] = iou(pred, gt);
  doc["denominator"] = a.steps_only ? "steps" : "all";
  out.add_or_print(a.out, dump(doc));
}

// --- wiring ----------------------------------------------------------------

void add_cost_options(CLI::App* cmd, CostArgs& a) {
  cmd->add_option("--graph", a.graph, "Flow graph JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--costs", a.costs, "Cost matrix (CSV or binary), rows = steps by id")
      ->check(CLI::ExistingFile);
  cmd->add_option("--steps", a.steps, "Step embeddings, instead of --costs")
      ->check(CLI::ExistingFile);
  cmd->add_option("--clips", a.clips, "Clip embeddings, instead of --costs")
      ->check(CLI::ExistingFile);
  cmd->add_option("--temperature", a.temperature, "Cost softmax temperature")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--drop-percentile", a.drop_percentile, "Drop cost percentile in (0, 100]")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 100.0));
  cmd->add_option("--drop-mode", a.drop_mode, "Percentile over the whole matrix or per clip")
      ->capture_default_str()
      ->check(CLI::IsMember({"matrix", "column"}));
}

CLI::Option* add_algo(CLI::App* cmd, std::string& algo) {
  return cmd->add_option("--algo", algo, "tSort construction")
      ->capture_default_str()
      ->check(CLI::IsMember({"forward", "backward"}));
}

int run(int argc, char** argv) {
  CLI::App app{"Ground procedure flow graphs in sequences of observations."};
  app.set_version_flag("--version", std::string("flowground ") + FLOWGROUND_VERSION);
  bool schema = false;
  app.add_flag("--schema", schema, "Print JSON schemas of all formats and exit");
  app.require_subcommand(0, 1);

  std::function<void(Outputs&)> action;

  GraphArgs graph_args;
  auto* graph = app.add_subcommand("graph", "Flow-graph tooling");
  graph->require_subcommand(1);
  auto graph_in = [&](CLI::App* cmd) {
    cmd->add_option("--in", graph_args.in, "Flow graph JSON")
        ->required()
        ->check(CLI::ExistingFile);
  };
  auto graph_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", graph_args.out, "Output file (default: stdout)");
  };
  auto graph_spec = [&](CLI::App* cmd) {
    cmd->add_option("--spec", graph_args.spec, "Thread sizes, e.g. 3,3,3")->required();
  };
  struct GraphCommand {
    const char* name;
    const char* help;
    void (*fn)(const GraphArgs&, Outputs&);
    bool needs_in;
  };
  for (const GraphCommand& gc : {
           GraphCommand{"validate", "Check a flow graph and summarize it", graph_validate, true},
           GraphCommand{"sorts", "Enumerate topological sorts", graph_sorts, true},
           GraphCommand{"normalize", "Attach a virtual root and sink", graph_normalize, true},
           GraphCommand{"dot", "Graphviz rendering", graph_dot, true},
           GraphCommand{"counts", "Closed-form counts for a model problem", graph_counts, false},
           GraphCommand{"model", "Emit a model-problem flow graph", graph_model, false},
       }) {
    auto* cmd = graph->add_subcommand(gc.name, gc.help);
    if (gc.needs_in) {
      graph_in(cmd);
    } else {
      graph_spec(cmd);
    }
    graph_out(cmd);
    if (std::string(gc.name) == "sorts") {
      cmd->add_option("--cap", graph_args.cap, "Abort past this many sorts")
          ->capture_default_str();
    }
    auto fn = gc.fn;
    cmd->callback([&action, &graph_args, fn] {
      action = [&graph_args, fn](Outputs& o) { fn(graph_args, o); };
    });
  }

  TSortArgs tsort_args;
  auto* tsort = app.add_subcommand("tsort", "Build the tSort meta-graph");
  tsort->add_option("--in", tsort_args.in, "Flow graph JSON")
      ->required()
      ->check(CLI::ExistingFile);
  add_algo(tsort, tsort_args.algo);
  tsort->add_option("--node-cap", tsort_args.node_cap, "Abort past this many states")
      ->capture_default_str();
  tsort->add_option("--out", tsort_args.out, "Meta-graph JSON (default: stdout)");
  tsort->add_option("--dot", tsort_args.dot, "Also write a Graphviz file");
  tsort->callback([&] { action = [&](Outputs& o) { run_tsort(tsort_args, o); }; });

  GroundArgs ground_args;
  auto* ground = app.add_subcommand("ground", "Ground a flow graph in a sequence");
  add_cost_options(ground, ground_args.cost);
  add_algo(ground, ground_args.algo);
  ground->add_flag("--emit-labels", ground_args.emit_labels, "Include per-clip labels");
  ground->add_option("--out", ground_args.out, "Alignment JSON (default: stdout)");
  ground->callback([&] { action = [&](Outputs& o) { run_ground(ground_args, o); }; });

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Time brute force against graph grounding");
  add_cost_options(bench, bench_args.cost);
  add_algo(bench, bench_args.algo);
  bench->add_option("--repeats", bench_args.repeats, "Timed repetitions per method")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_args.out, "Report JSON (default: stdout)");
  bench->callback([&] { action = [&](Outputs& o) { run_bench(bench_args, o); }; });

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate synthetic grounded instances");
  synth->add_option("--graph", synth_args.graph, "Flow graph JSON")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--n", synth_args.n, "Number of instances")->capture_default_str();
  synth->add_option("--dim", synth_args.params.dim, "Embedding dimension")
      ->capture_default_str();
  synth->add_option("--noise", synth_args.params.noise_sigma, "Gaussian noise sigma")
      ->capture_default_str();
  synth->add_option("--bg", synth_args.params.background_ratio,
                    "Background fraction in [0, 1)")
      ->capture_default_str();
  synth->add_option("--min-clips", synth_args.params.min_clips_per_step,
                    "Fewest clips per step")
      ->capture_default_str();
  synth->add_option("--max-clips", synth_args.params.max_clips_per_step,
                    "Most clips per step")
      ->capture_default_str();
  synth->add_option("--seed", synth_args.params.seed, "Random seed")->capture_default_str();
  synth->add_option("--format", synth_args.format, "Matrix file format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "bin"}));
  synth->add_option("--out", synth_args.out, "Output directory")->required();
  synth->callback([&] { action = [&](Outputs& o) { run_synth(synth_args, o); }; });

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a clip projection on a synthetic set");
  train->add_option("--data", train_args.data, "Directory written by synth")->required();
  train->add_option("--gamma", train_args.options.loss.smoothing.gamma, "Smooth-min gamma")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train->add_option("--lr", train_args.options.learning_rate, "Learning rate")
      ->capture_default_str();
  train->add_option("--epochs", train_args.options.epochs, "Epochs")->capture_default_str();
  train->add_option("--temperature", train_args.options.loss.temperature,
                    "Cost softmax temperature")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train->add_option("--drop-percentile", train_args.options.loss.drop_percentile,
                    "Drop cost percentile")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 100.0));
  train->add_option("--clustering-weight", train_args.options.loss.clustering_weight,
                    "Weight of the clustering loss")
      ->capture_default_str();
  train->add_option("--trace", train_args.trace, "Loss trace CSV (default: stdout)");
  train->add_option("--out", train_args.out, "Trained model JSON");
  train->callback([&] { action = [&](Outputs& o) { run_train(train_args, o); }; });

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Framewise accuracy and IoU");
  eval->add_option("--pred", eval_args.pred, "JSON with a labels array")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--gt", eval_args.gt, "JSON with a labels array")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_flag("--steps-only-denominator", eval_args.steps_only,
                 "Count only ground-truth step frames in the accuracy denominator");
  eval->add_option("--out", eval_args.out, "Output file (default: stdout)");
  eval->callback([&] { action = [&](Outputs& o) { run_eval(eval_args, o); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }
  if (schema) {
    std::cout << schema_document();
    return kOk;
  }
  if (!action) {
    std::cerr << app.help();
    return kValidation;
  }
  try {
    Outputs outputs;
    action(outputs);
    outputs.commit();
  } catch (const InfeasibleError& e) {
    std::cerr << "flowground: infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const CapExceededError& e) {
    std::cerr << "flowground: limit exceeded: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "flowground: error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}

}  // namespace
}  // namespace flowground::cli

int main(int argc, char** argv) { return flowground::cli::run(argc, argv); }

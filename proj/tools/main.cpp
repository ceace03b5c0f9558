#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plankit/cmp_model.hpp"
#include "plankit/errors.hpp"
#include "plankit/irl.hpp"
#include "plankit/pipeline.hpp"
#include "plankit/render.hpp"
#include "plankit/scenario_io.hpp"
#include "plankit/synth.hpp"

namespace {

using namespace plankit;

struct CommonOpts {
  std::string data;
  std::string out;
  std::string predictor = "ctrv";
  std::string fusion = "early";
  std::string weights;
  std::string params;
  std::uint64_t seed = 1;
};

PredictorConfig make_predictor_config(const CommonOpts& o, int embed_dim) {
  PredictorConfig cfg;
  cfg.backend = backend_from_string(o.predictor);
  cfg.fusion = fusion_from_string(o.fusion);
  cfg.embed_dim = embed_dim;
  cfg.rng_seed = o.seed;
  return cfg;
}

// Loads parameters when the learned backend is requested; the stored model
// config wins over flag defaults so files are self-describing.
std::optional<CmpModelParams> maybe_load_params(PredictorConfig& cfg,
                                                const std::string& path) {
  if (cfg.backend != PredictorBackend::kLearned) return std::nullopt;
  if (path.empty())
    throw ValidationError("--predictor learned requires --params <file>");
  auto [stored_cfg, params] = load_cmp_params(path);
  cfg.fusion = stored_cfg.fusion;
  cfg.num_modes = stored_cfg.num_modes;
  cfg.max_agents = stored_cfg.max_agents;
  cfg.embed_dim = stored_cfg.embed_dim;
  return params;
}

int cmd_synthesize(const std::string& tmpl, int count, std::uint64_t seed,
                   const std::string& out) {
  std::vector<Scenario> scenarios =
      tmpl == "mixed" ? synthesize_mixed(count, seed)
                      : synthesize_scenarios(template_from_string(tmpl), count, seed);
  save_scenarios(out, scenarios);
  std::cout << "wrote " << scenarios.size() << " scenarios to " << out << "\n";
  return 0;
}

int cmd_train_cmp(const CommonOpts& o, const CmpTrainConfig& train_cfg, int embed_dim) {
  std::vector<Scenario> scenarios = load_scenarios(o.data);
  PredictorConfig cfg = make_predictor_config(o, embed_dim);
  cfg.backend = PredictorBackend::kLearned;
  auto [params, history] = cmp_train(scenarios, cfg, train_cfg);
  save_cmp_params(o.out, cfg, params);
  save_loss_csv(o.out + ".loss.csv", history);
  std::cout << "trained on " << scenarios.size() << " scenarios, "
            << history.size() << " steps, final loss "
            << (history.empty() ? 0.0 : history.back().loss) << "\n"
            << "params: " << o.out << "\n";
  return 0;
}

int cmd_train_irl(const CommonOpts& o, const IrlTrainConfig& train_cfg) {
  std::vector<Scenario> scenarios = filter_for_irl(load_scenarios(o.data));
  if (scenarios.empty())
    throw ValidationError("no scenarios left after the low-speed filter");
  PlannerConfig cfg;
  cfg.predictor = make_predictor_config(o, PredictorConfig{}.embed_dim);
  std::optional<CmpModelParams> params = maybe_load_params(cfg.predictor, o.params);
  std::vector<LabeledScenario> dataset =
      build_irl_dataset(scenarios, cfg, params ? &*params : nullptr);
  auto [weights, history] = train_irl(dataset, train_cfg);
  save_cost_weights(o.out, weights);
  save_loss_csv(o.out + ".loss.csv", history);
  std::cout << "trained on " << dataset.size() << " scenarios, final nll "
            << (history.empty() ? 0.0 : history.back().loss) << "\n"
            << "weights: " << o.out << "\n";
  return 0;
}

int cmd_evaluate(const CommonOpts& o, bool batched) {
  std::vector<Scenario> scenarios = load_scenarios(o.data);
  PlannerConfig cfg;
  cfg.predictor = make_predictor_config(o, PredictorConfig{}.embed_dim);
  cfg.batched_inference = batched;
  if (!o.weights.empty()) cfg.weights = load_cost_weights(o.weights);
  std::optional<CmpModelParams> params = maybe_load_params(cfg.predictor, o.params);

  std::vector<ScenarioRow> rows;
  EvalReport report =
      evaluate_planner(scenarios, cfg, params ? &*params : nullptr, &rows);
  if (!o.out.empty()) save_eval_csv(o.out, report, rows, cfg.thresholds);
  std::cout << "scenarios=" << report.scenario_count
            << " plan_min_fde=" << report.plan_min_fde
            << " top3_accuracy=" << report.top3_accuracy
            << " speed_intent_accuracy=" << report.speed_intent_accuracy
            << " lane_intent_accuracy=" << report.lane_intent_accuracy
            << " min_ade=" << report.min_ade << " min_fde=" << report.min_fde << "\n";
  return 0;
}

int cmd_plot(const CommonOpts& o, int index, bool with_proposals) {
  std::vector<Scenario> scenarios = load_scenarios(o.data);
  if (index < 0 || index >= static_cast<int>(scenarios.size()))
    throw ValidationError("--index out of range: file has " +
                          std::to_string(scenarios.size()) + " scenarios");
  const Scenario& scenario = scenarios[static_cast<std::size_t>(index)];

  std::string svg;
  if (with_proposals) {
    PlannerConfig cfg;
    cfg.predictor = make_predictor_config(o, PredictorConfig{}.embed_dim);
    if (!o.weights.empty()) cfg.weights = load_cost_weights(o.weights);
    std::optional<CmpModelParams> params = maybe_load_params(cfg.predictor, o.params);
    PlanResult plan = plan_scenario(scenario, cfg, params ? &*params : nullptr);
    svg = render_svg(scenario, plan.proposals, plan.scored.order);
  } else {
    svg = render_svg(scenario, {}, {});
  }
  std::ofstream out(o.out);
  if (!out) throw IoError("cannot write " + o.out);
  out << svg;
  std::cout << "wrote " << o.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frenet-frame behavior planning toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read option defaults from an INI/TOML file");

  CommonOpts o;
  std::string tmpl = "mixed";
  int count = 100;
  int index = 0;
  int embed_dim = PredictorConfig{}.embed_dim;
  bool batched = true;
  bool with_proposals = true;
  CmpTrainConfig cmp_cfg;
  IrlTrainConfig irl_cfg;

  const std::string backends = "ctrv|idm|learned|oracle";

  CLI::App* syn = app.add_subcommand("synthesize", "Generate a synthetic scenario file");
  syn->add_option("--template", tmpl,
                  "car_follow|cut_in|lane_change|intersection_yield|curved_road|mixed");
  syn->add_option("--count", count, "Number of scenarios");
  syn->add_option("--seed", o.seed, "Root random seed");
  syn->add_option("--out", o.out, "Output scenario file")->required();

  CLI::App* tc = app.add_subcommand("train-cmp", "Train the learned predictor");
  tc->add_option("--data", o.data, "Scenario file")->required();
  tc->add_option("--out", o.out, "Output parameter file")->required();
  tc->add_option("--fusion", o.fusion, "early|late");
  tc->add_option("--seed", o.seed, "Init and shuffle seed");
  tc->add_option("--embed-dim", embed_dim, "Embedding width");
  tc->add_option("--lr", cmp_cfg.learning_rate, "Initial learning rate");
  tc->add_option("--steps", cmp_cfg.steps, "Optimizer steps");
  tc->add_option("--batch-size", cmp_cfg.batch_size, "Minibatch size");

  CLI::App* ti = app.add_subcommand("train-irl", "Train cost weights from demonstrations");
  ti->add_option("--data", o.data, "Scenario file")->required();
  ti->add_option("--out", o.out, "Output weights file")->required();
  ti->add_option("--predictor", o.predictor, backends);
  ti->add_option("--fusion", o.fusion, "early|late (learned predictor)");
  ti->add_option("--params", o.params, "Learned predictor parameters");
  ti->add_option("--seed", o.seed, "Shuffle seed");
  ti->add_option("--lr", irl_cfg.lr, "Initial learning rate");
  ti->add_option("--steps", irl_cfg.steps, "Optimizer steps");
  ti->add_option("--batch-size", irl_cfg.batch_size, "Minibatch size");

  CLI::App* ev = app.add_subcommand("evaluate", "Run the planner and report metrics");
  ev->add_option("--data", o.data, "Scenario file")->required();
  ev->add_option("--out", o.out, "Per-scenario CSV (optional)");
  ev->add_option("--predictor", o.predictor, backends);
  ev->add_option("--fusion", o.fusion, "early|late (learned predictor)");
  ev->add_option("--params", o.params, "Learned predictor parameters");
  ev->add_option("--weights", o.weights, "Cost weights file (default: zeros)");
  ev->add_option("--seed", o.seed, "Random seed");
  auto* batch_flag = ev->add_flag("--batch", "Batched prediction (default)");
  auto* single_flag = ev->add_flag("--single", "Per-plan prediction");

  CLI::App* pl = app.add_subcommand("plot", "Render one scenario to SVG");
  pl->add_option("--data", o.data, "Scenario file")->required();
  pl->add_option("--out", o.out, "Output SVG file")->required();
  pl->add_option("--index", index, "Scenario index in the file");
  pl->add_option("--predictor", o.predictor, backends);
  pl->add_option("--fusion", o.fusion, "early|late (learned predictor)");
  pl->add_option("--params", o.params, "Learned predictor parameters");
  pl->add_option("--weights", o.weights, "Cost weights used for ranking");
  pl->add_flag("--no-proposals", "Draw the scene without candidates");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  if (single_flag->count() > 0 && batch_flag->count() == 0) batched = false;
  if (pl->count("--no-proposals") > 0) with_proposals = false;

  try {
    if (syn->parsed()) return cmd_synthesize(tmpl, count, o.seed, o.out);
    if (tc->parsed()) {
      cmp_cfg.rng_seed = o.seed;
      return cmd_train_cmp(o, cmp_cfg, embed_dim);
    }
    if (ti->parsed()) {
      irl_cfg.rng_seed = o.seed;
      return cmd_train_irl(o, irl_cfg);
    }
    if (ev->parsed()) return cmd_evaluate(o, batched);
    if (pl->parsed()) return cmd_plot(o, index, with_proposals);
  } catch (const NonFiniteLoss& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const SingularSystem& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const CurvatureSingularity& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sidl/pipeline.hpp"

namespace {

sidl::ExperimentConfig resolve(const std::string& config_path,
                               const std::string& out_dir, bool have_seed,
                               std::uint64_t seed) {
  sidl::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = sidl::load_config(config_path);
  if (const char* env = std::getenv("SIDL_OUT")) cfg.out_dir = env;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (have_seed) cfg.seed = seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toy identity-preserving diffusion customization"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool have_seed = false;
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", seed, "seed override");

  auto* pretrain = app.add_subcommand("pretrain", "train the frozen fixture");

  int identity_id = 64;
  std::string tag = "run";
  auto* customize =
      app.add_subcommand("customize", "learn embeddings for one identity");
  customize->add_option("--identity", identity_id, "identity id");
  customize->add_option("--tag", tag, "run tag");

  int context_id = 0, count = 8;
  std::string sample_tag = "run";
  auto* sample = app.add_subcommand("sample", "generate images for a tag");
  sample->add_option("--tag", sample_tag, "customization tag");
  sample->add_option("--context", context_id, "context id");
  sample->add_option("--count", count, "number of samples");

  std::string protocol = "standard", eval_tag;
  auto* evaluate = app.add_subcommand("evaluate", "run the metric battery");
  evaluate->add_option("--protocol", protocol,
                       "standard | ablation | alpha_sweep");
  evaluate->add_option("--tag", eval_tag, "evaluate a stored tag instead");

  std::vector<std::string> embedding_csvs;
  auto* analyze = app.add_subcommand("analyze", "embedding statistics");
  analyze->add_option("--embeddings", embedding_csvs,
                      "embeddings.csv files from customize runs");

  CLI11_PARSE(app, argc, argv);
  have_seed = seed_opt->count() > 0;

  try {
    sidl::ExperimentConfig cfg =
        resolve(config_path, out_dir, have_seed, seed);
    if (pretrain->parsed()) {
      auto b = sidl::cmd_pretrain(cfg);
      std::printf("pretrain ok: loss %.4f -> %.4f, heldout %.4f -> %.4f, "
                  "probe %.3f (chance %.3f)\n",
                  b.loss_start, b.loss_end, b.heldout_loss_initial,
                  b.heldout_loss_final, b.probe_accuracy, b.probe_chance);
    } else if (customize->parsed()) {
      std::printf("wrote %s\n",
                  sidl::cmd_customize(cfg, identity_id, tag).c_str());
    } else if (sample->parsed()) {
      std::printf("wrote %s\n",
                  sidl::cmd_sample(cfg, sample_tag, context_id, count).c_str());
    } else if (evaluate->parsed()) {
      if (!eval_tag.empty()) {
        std::printf("wrote %s\n", sidl::cmd_evaluate_tag(cfg, eval_tag).c_str());
      } else {
        sidl::EvalProtocol p;
        if (protocol == "standard")
          p = sidl::EvalProtocol::Standard;
        else if (protocol == "ablation")
          p = sidl::EvalProtocol::Ablation;
        else if (protocol == "alpha_sweep")
          p = sidl::EvalProtocol::AlphaSweep;
        else
          throw std::invalid_argument("unknown protocol: " + protocol);
        std::printf("wrote %s\n", sidl::cmd_evaluate(cfg, p).c_str());
      }
    } else if (analyze->parsed()) {
      std::printf("wrote %s\n", sidl::cmd_analyze(cfg, embedding_csvs).c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sidl/config.hpp"
#include "sidl/customizer.hpp"
#include "sidl/denoiser.hpp"
#include "sidl/metrics.hpp"
#include "sidl/priorspace.hpp"
#include "sidl/schedule.hpp"
#include "sidl/toyworld.hpp"

namespace sidl {

// Measured baselines recorded in the pretrain manifest.
struct PretrainBaselines {
  double loss_start = 0.0;
  double loss_end = 0.0;
  double heldout_loss_initial = 0.0;
  double heldout_loss_final = 0.0;
  double probe_accuracy = 0.0;
  double probe_chance = 0.0;
  double same_id_cosine = 0.0;
  double diff_id_cosine = 0.0;
};

// Frozen pretraining artifacts loaded back from disk.
struct Fixture {
  WorldConfig world;
  Schedule schedule;
  TokenDict dict;
  ContextMixer mixer;
  Denoiser denoiser;
  Mlp extractor;  // frozen identity feature network
  Mlp probe;      // frozen context classifier
  std::uint64_t pretrain_manifest_fnv = 0;
};

std::string pretrain_dir(const ExperimentConfig& cfg);

PretrainBaselines cmd_pretrain(const ExperimentConfig& cfg);

Fixture load_fixture(const ExperimentConfig& cfg);

std::vector<PriorSpace> fixture_priors(const Fixture& f, PriorMode mode);

// Assembles the head used for a customization run; the extractor is the
// fixture's identity network or a frozen random one (generic_features).
IdentityHead make_run_head(const Fixture& f, EncoderMode mode,
                           std::uint64_t run_seed);

struct CustomizeOutput {
  CustomizeResult result;
  IdentityHead head;
  double elapsed_s = 0.0;
};

CustomizeOutput run_customization(Fixture& f, const ToySample& input,
                                  const TrainConfig& tc, EncoderMode enc,
                                  PriorMode prior_mode);

// Writes head checkpoint, loss trace CSV, embeddings CSV and manifest
// under <out>/customize/<tag>; returns the run directory.
std::string cmd_customize(const ExperimentConfig& cfg, int identity_id,
                          const std::string& tag);

// Deterministic DDIM sampling with classifier-free guidance; per-sample
// seed is base_seed XOR sample index.
std::vector<Tensor> sample_images(const Fixture& f,
                                  const std::vector<double>& v1,
                                  const std::vector<double>& v2,
                                  int context_id, int count,
                                  double guidance_scale, int ddim_steps,
                                  std::uint64_t base_seed);

std::string cmd_sample(const ExperimentConfig& cfg, const std::string& tag,
                       int context_id, int count);

struct IdentityEval {
  EvalReport report;
  std::vector<double> v_star_1;
  std::vector<double> v_star_2;
};

// Full per-identity protocol: customize, sample one image per context,
// run the metric battery against the reference.
IdentityEval evaluate_identity(Fixture& f, const ExperimentConfig& cfg,
                               const TrainConfig& tc, int identity_id);

enum class EvalProtocol { Standard, Ablation, AlphaSweep };

std::string cmd_evaluate(const ExperimentConfig& cfg, EvalProtocol protocol);

// Loads a stored customization, refusing it when its recorded pretrain
// manifest hash no longer matches the pretrain artifacts.
struct StoredCustomization {
  std::vector<double> v_star_1;
  std::vector<double> v_star_2;
  int identity_id = 0;
  double elapsed_s = 0.0;
};
StoredCustomization load_customization(const ExperimentConfig& cfg,
                                       const std::string& tag);

// Evaluates a stored customization tag against its reference identity.
std::string cmd_evaluate_tag(const ExperimentConfig& cfg,
                             const std::string& tag);

std::string cmd_analyze(const ExperimentConfig& cfg,
                        const std::vector<std::string>& embedding_csvs);

// Helpers shared with tests.
ToySample reference_sample(const Fixture& f, const ExperimentConfig& cfg,
                           int identity_id);
std::vector<std::vector<double>> read_embedding_csv(const std::string& path);

}  // namespace sidl

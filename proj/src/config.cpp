#include "sidl/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sidl {

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig t;
  t.alpha = alpha;
  t.beta_hair = beta_hair;
  t.steps = steps;
  t.learning_rate = learning_rate;
  t.batch = batch;
  t.guidance_scale = guidance_scale;
  t.seed = seed;
  if (optimizer == "sgd")
    t.optimizer = OptimizerKind::Sgd;
  else if (optimizer == "adam")
    t.optimizer = OptimizerKind::Adam;
  else
    throw std::invalid_argument("config: unknown optimizer " + optimizer);
  if (loss_mode == "two_phase")
    t.loss_mode = LossMode::TwoPhase;
  else if (loss_mode == "noise_only")
    t.loss_mode = LossMode::NoiseOnly;
  else if (loss_mode == "rec_only")
    t.loss_mode = LossMode::RecOnly;
  else
    throw std::invalid_argument("config: unknown loss_mode " + loss_mode);
  if (prompt_mode == "context")
    t.prompt_mode = PromptMode::Context;
  else if (prompt_mode == "bare")
    t.prompt_mode = PromptMode::Bare;
  else
    throw std::invalid_argument("config: unknown prompt_mode " + prompt_mode);
  t.use_adain = use_adain;
  t.use_mask = use_mask;
  t.mask_normalized = mask_normalized;
  return t;
}

WorldConfig ExperimentConfig::world_config() const {
  WorldConfig w;
  w.width = image_size;
  w.height = image_size;
  w.train_identities = identities;
  w.num_identities = identities + eval_identities;
  w.num_contexts = contexts;
  w.embed_dim = embed_dim;
  w.world_seed = world_seed;
  return w;
}

EncoderMode ExperimentConfig::encoder() const {
  if (encoder_mode == "identity_extractor") return EncoderMode::IdentityExtractor;
  if (encoder_mode == "generic_features") return EncoderMode::GenericFeatures;
  throw std::invalid_argument("config: unknown encoder_mode " + encoder_mode);
}

PriorMode ExperimentConfig::prior() const {
  if (prior_mode == "shared") return PriorMode::Shared;
  if (prior_mode == "slot") return PriorMode::SlotSeparated;
  throw std::invalid_argument("config: unknown prior_mode " + prior_mode);
}

namespace {

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

std::uint64_t parse_u64(const std::string& v) {
  std::size_t pos = 0;
  auto r = std::stoull(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("bad integer: " + v);
  return r;
}

int parse_int(const std::string& v) {
  std::size_t pos = 0;
  int r = std::stoi(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("bad integer: " + v);
  return r;
}

double parse_double(const std::string& v) {
  std::size_t pos = 0;
  double r = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("bad number: " + v);
  return r;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("bad bool: " + v);
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s = {
      {"seed", [](auto& c, const auto& v) { c.seed = parse_u64(v); }},
      {"out_dir", [](auto& c, const auto& v) { c.out_dir = v; }},
      {"timesteps", [](auto& c, const auto& v) { c.timesteps = parse_int(v); }},
      {"beta_start", [](auto& c, const auto& v) { c.beta_start = parse_double(v); }},
      {"beta_end", [](auto& c, const auto& v) { c.beta_end = parse_double(v); }},
      {"identities", [](auto& c, const auto& v) { c.identities = parse_int(v); }},
      {"eval_identities", [](auto& c, const auto& v) { c.eval_identities = parse_int(v); }},
      {"contexts", [](auto& c, const auto& v) { c.contexts = parse_int(v); }},
      {"embed_dim", [](auto& c, const auto& v) { c.embed_dim = parse_int(v); }},
      {"image_size", [](auto& c, const auto& v) { c.image_size = parse_int(v); }},
      {"world_seed", [](auto& c, const auto& v) { c.world_seed = parse_u64(v); }},
      {"pretrain_steps", [](auto& c, const auto& v) { c.pretrain_steps = parse_int(v); }},
      {"pretrain_batch", [](auto& c, const auto& v) { c.pretrain_batch = parse_int(v); }},
      {"pretrain_lr", [](auto& c, const auto& v) { c.pretrain_lr = parse_double(v); }},
      {"cond_dropout", [](auto& c, const auto& v) { c.cond_dropout = parse_double(v); }},
      {"denoiser_hidden", [](auto& c, const auto& v) { c.denoiser_hidden = parse_int(v); }},
      {"denoiser_layers", [](auto& c, const auto& v) { c.denoiser_layers = parse_int(v); }},
      {"extractor_steps", [](auto& c, const auto& v) { c.extractor_steps = parse_int(v); }},
      {"extractor_batch", [](auto& c, const auto& v) { c.extractor_batch = parse_int(v); }},
      {"extractor_lr", [](auto& c, const auto& v) { c.extractor_lr = parse_double(v); }},
      {"probe_steps", [](auto& c, const auto& v) { c.probe_steps = parse_int(v); }},
      {"probe_batch", [](auto& c, const auto& v) { c.probe_batch = parse_int(v); }},
      {"probe_lr", [](auto& c, const auto& v) { c.probe_lr = parse_double(v); }},
      {"alpha", [](auto& c, const auto& v) { c.alpha = parse_double(v); }},
      {"beta_hair", [](auto& c, const auto& v) { c.beta_hair = parse_double(v); }},
      {"steps", [](auto& c, const auto& v) { c.steps = parse_int(v); }},
      {"learning_rate", [](auto& c, const auto& v) { c.learning_rate = parse_double(v); }},
      {"batch", [](auto& c, const auto& v) { c.batch = parse_int(v); }},
      {"guidance_scale", [](auto& c, const auto& v) { c.guidance_scale = parse_double(v); }},
      {"optimizer", [](auto& c, const auto& v) { c.optimizer = v; }},
      {"loss_mode", [](auto& c, const auto& v) { c.loss_mode = v; }},
      {"prompt_mode", [](auto& c, const auto& v) { c.prompt_mode = v; }},
      {"prior_mode", [](auto& c, const auto& v) { c.prior_mode = v; }},
      {"encoder_mode", [](auto& c, const auto& v) { c.encoder_mode = v; }},
      {"use_adain", [](auto& c, const auto& v) { c.use_adain = parse_bool(v); }},
      {"use_mask", [](auto& c, const auto& v) { c.use_mask = parse_bool(v); }},
      {"mask_normalized", [](auto& c, const auto& v) { c.mask_normalized = parse_bool(v); }},
      {"ddim_steps", [](auto& c, const auto& v) { c.ddim_steps = parse_int(v); }},
      {"sample_count", [](auto& c, const auto& v) { c.sample_count = parse_int(v); }},
      {"eval_seeds", [](auto& c, const auto& v) { c.eval_seeds = parse_int(v); }},
  };
  return s;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
    it->second(c, val);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "alpha=" << c.alpha << "\n"
    << "batch=" << c.batch << "\n"
    << "beta_end=" << c.beta_end << "\n"
    << "beta_hair=" << c.beta_hair << "\n"
    << "beta_start=" << c.beta_start << "\n"
    << "cond_dropout=" << c.cond_dropout << "\n"
    << "contexts=" << c.contexts << "\n"
    << "ddim_steps=" << c.ddim_steps << "\n"
    << "denoiser_hidden=" << c.denoiser_hidden << "\n"
    << "denoiser_layers=" << c.denoiser_layers << "\n"
    << "embed_dim=" << c.embed_dim << "\n"
    << "encoder_mode=" << c.encoder_mode << "\n"
    << "eval_identities=" << c.eval_identities << "\n"
    << "eval_seeds=" << c.eval_seeds << "\n"
    << "extractor_batch=" << c.extractor_batch << "\n"
    << "extractor_lr=" << c.extractor_lr << "\n"
    << "extractor_steps=" << c.extractor_steps << "\n"
    << "guidance_scale=" << c.guidance_scale << "\n"
    << "identities=" << c.identities << "\n"
    << "image_size=" << c.image_size << "\n"
    << "learning_rate=" << c.learning_rate << "\n"
    << "loss_mode=" << c.loss_mode << "\n"
    << "mask_normalized=" << (c.mask_normalized ? "true" : "false") << "\n"
    << "optimizer=" << c.optimizer << "\n"
    << "out_dir=" << c.out_dir << "\n"
    << "pretrain_batch=" << c.pretrain_batch << "\n"
    << "pretrain_lr=" << c.pretrain_lr << "\n"
    << "pretrain_steps=" << c.pretrain_steps << "\n"
    << "prior_mode=" << c.prior_mode << "\n"
    << "probe_batch=" << c.probe_batch << "\n"
    << "probe_lr=" << c.probe_lr << "\n"
    << "probe_steps=" << c.probe_steps << "\n"
    << "prompt_mode=" << c.prompt_mode << "\n"
    << "sample_count=" << c.sample_count << "\n"
    << "seed=" << c.seed << "\n"
    << "steps=" << c.steps << "\n"
    << "timesteps=" << c.timesteps << "\n"
    << "use_adain=" << (c.use_adain ? "true" : "false") << "\n"
    << "use_mask=" << (c.use_mask ? "true" : "false") << "\n"
    << "world_seed=" << c.world_seed << "\n";
  return o.str();
}

}  // namespace sidl

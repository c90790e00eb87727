#include "sidl/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sidl/analytics.hpp"
#include "sidl/checkpoint.hpp"
#include "sidl/checksum.hpp"
#include "sidl/pgm.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace sidl {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  f << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void put_mlp(Checkpoint& ck, const std::string& prefix, const Mlp& m) {
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    ck.put(prefix + ".w" + std::to_string(l), m.weights[l]);
    ck.put(prefix + ".b" + std::to_string(l), m.biases[l]);
  }
}

Mlp get_mlp(const Checkpoint& ck, const std::string& prefix) {
  Mlp m;
  for (std::size_t l = 0;; ++l) {
    std::string wn = prefix + ".w" + std::to_string(l);
    if (!ck.has(wn)) break;
    m.weights.push_back(ck.get(wn).detach());
    m.biases.push_back(ck.get(prefix + ".b" + std::to_string(l)).detach());
  }
  if (m.weights.empty())
    throw std::runtime_error("checkpoint: no layers under " + prefix);
  return m;
}

Mlp train_classifier(Mlp net, const WorldConfig& world, bool identity_task,
                     int steps, int batch, double lr, Rng& rng) {
  net.set_trainable(true);
  auto params = net.params();
  AdamOptimizer opt(lr);
  std::size_t L = net.in_dim();
  for (int step = 0; step < steps; ++step) {
    std::vector<double> xs(static_cast<std::size_t>(batch) * L);
    std::vector<std::size_t> labels(batch);
    for (int b = 0; b < batch; ++b) {
      int id = static_cast<int>(rng.uniform_int(0, world.train_identities));
      int ctx = static_cast<int>(rng.uniform_int(0, world.num_contexts));
      ToySample s = gen_sample(world, id, ctx, rng);
      bool masked = identity_task && rng.uniform() < 0.5;
      for (std::size_t i = 0; i < L; ++i) {
        double v = s.z0.values()[i];
        if (masked && !s.mask_face[i]) v = 0.0;
        xs[static_cast<std::size_t>(b) * L + i] = v;
      }
      labels[static_cast<std::size_t>(b)] =
          static_cast<std::size_t>(identity_task ? id : ctx);
    }
    Tensor x = Tensor::from({static_cast<std::size_t>(batch), L}, std::move(xs));
    Tensor loss = cross_entropy(net.forward(x), labels);
    backward(loss);
    opt.step(params);
    zero_grads(params);
  }
  net.set_trainable(false);
  return net;
}

}  // namespace

std::string pretrain_dir(const ExperimentConfig& cfg) {
  return (fs::path(cfg.out_dir) / "pretrain").string();
}

PretrainBaselines cmd_pretrain(const ExperimentConfig& cfg) {
  WorldConfig world = cfg.world_config();
  Schedule sched = make_schedule(cfg.timesteps, cfg.beta_start, cfg.beta_end);
  std::size_t L = static_cast<std::size_t>(world.width) * world.height;

  Rng rng(cfg.seed);
  TokenDict dict = build_dict(world, rng);
  ContextMixer mixer = make_mixer(8, rng);
  Denoiser model = make_denoiser(
      L, static_cast<std::size_t>(world.embed_dim),
      static_cast<std::size_t>(cfg.denoiser_hidden), cfg.denoiser_layers, rng);

  PretrainConfig pc;
  pc.steps = cfg.pretrain_steps;
  pc.batch = cfg.pretrain_batch;
  pc.lr = cfg.pretrain_lr;
  pc.cond_dropout = cfg.cond_dropout;
  PretrainResult pr = pretrain_denoiser(model, dict, mixer, world, sched, pc, rng);

  PretrainBaselines base;
  base.loss_start = pr.loss_start;
  base.loss_end = pr.loss_end;
  base.heldout_loss_initial = pr.heldout_loss_initial;
  base.heldout_loss_final = pr.heldout_loss_final;

  // Identity extractor with a classification head; the head is dropped
  // after training, the feature trunk is what ships.
  Rng erng(mix_seed(cfg.seed, 0xE17));
  Mlp trunk_and_head = Mlp::create(
      {L, 128, 64, static_cast<std::size_t>(world.train_identities)}, erng);
  trunk_and_head = train_classifier(trunk_and_head, world, true,
                                    cfg.extractor_steps, cfg.extractor_batch,
                                    cfg.extractor_lr, erng);
  Mlp extractor;
  extractor.weights = {trunk_and_head.weights[0], trunk_and_head.weights[1]};
  extractor.biases = {trunk_and_head.biases[0], trunk_and_head.biases[1]};

  // Cosine margins of face-region features, recorded as fixture baselines.
  {
    IdentityHead h;
    h.extractor = extractor;
    h.feature_dim = 64;
    h.embed_dim = static_cast<std::size_t>(world.embed_dim);
    Rng mr(mix_seed(cfg.seed, 0x3A6));
    std::vector<std::vector<double>> feats_a, feats_b;
    int nprobe = std::min(16, world.train_identities);
    for (int i = 0; i < nprobe; ++i) {
      ToySample a = gen_sample(world, i, 0, mr);
      ToySample b = gen_sample(world, i, world.num_contexts - 1, mr);
      feats_a.push_back(face_features(a.z0, a.mask_face, h));
      feats_b.push_back(face_features(b.z0, b.mask_face, h));
    }
    double same = 0.0, diff = 0.0;
    int nd = 0;
    for (int i = 0; i < nprobe; ++i) {
      same += cosine_similarity(feats_a[i], feats_b[i]);
      for (int j = 0; j < nprobe; ++j)
        if (j != i) {
          diff += cosine_similarity(feats_a[i], feats_b[j]);
          ++nd;
        }
    }
    base.same_id_cosine = same / nprobe;
    base.diff_id_cosine = diff / nd;
  }

  // Context probe.
  Rng prng(mix_seed(cfg.seed, 0x9B0B));
  Mlp probe = Mlp::create(
      {L, 64, static_cast<std::size_t>(world.num_contexts)}, prng);
  probe = train_classifier(probe, world, false, cfg.probe_steps,
                           cfg.probe_batch, cfg.probe_lr, prng);
  {
    Rng vr(mix_seed(cfg.seed, 0xACC));
    int correct = 0, total = 200;
    for (int k = 0; k < total; ++k) {
      int id = static_cast<int>(vr.uniform_int(0, world.train_identities));
      int ctx = static_cast<int>(vr.uniform_int(0, world.num_contexts));
      ToySample s = gen_sample(world, id, ctx, vr);
      Tensor logits = probe.forward(reshape(s.z0, {1, L}));
      auto p = softmax_row(logits.values());
      int arg = 0;
      for (std::size_t j = 1; j < p.size(); ++j)
        if (p[j] > p[static_cast<std::size_t>(arg)]) arg = static_cast<int>(j);
      if (arg == ctx) ++correct;
    }
    base.probe_accuracy = static_cast<double>(correct) / total;

    double chance = 0.0;
    for (int k = 0; k < 64; ++k) {
      std::vector<double> noise(L);
      for (auto& v : noise) v = vr.uniform(-1.0, 1.0);
      Tensor logits = probe.forward(Tensor::from({1, L}, std::move(noise)));
      auto p = softmax_row(logits.values());
      chance += p[static_cast<std::size_t>(k % world.num_contexts)];
    }
    base.probe_chance = chance / 64;
  }

  // Fixture quality gates.
  if (!(base.loss_end < base.loss_start))
    throw std::runtime_error("pretrain: denoiser loss did not decrease");
  if (!(pr.heldout_loss_final < pr.heldout_loss_initial))
    throw std::runtime_error("pretrain: held-out loss did not decrease");
  if (!(base.probe_accuracy > 0.9))
    throw std::runtime_error("pretrain: probe accuracy gate failed (" +
                             fmt(base.probe_accuracy) + " <= 0.9)");
  if (!(base.same_id_cosine > base.diff_id_cosine))
    throw std::runtime_error("pretrain: extractor margin gate failed");

  fs::path dir = pretrain_dir(cfg);
  fs::create_directories(dir);

  Checkpoint ck;
  ck.put("schedule.beta", Tensor::from({sched.beta.size()}, sched.beta));
  ck.put("dict.embeddings", dict.embeddings);
  ck.put("mixer.pos", mixer.pos_weights);
  put_mlp(ck, "denoiser", model.net);
  put_mlp(ck, "extractor", extractor);
  put_mlp(ck, "probe", probe);
  std::string ck_path = (dir / "checkpoint.sidl").string();
  save_checkpoint(ck, ck_path);

  json manifest;
  manifest["config"] = dump_config(cfg);
  manifest["checkpoint_fnv"] = file_checksum(ck_path);
  manifest["checksums"] = {{"denoiser", model.checksum()},
                           {"dict", dict.checksum()},
                           {"mixer", mixer.checksum()},
                           {"extractor", extractor.checksum()},
                           {"probe", probe.checksum()}};
  manifest["baselines"] = {{"loss_start", base.loss_start},
                           {"loss_end", base.loss_end},
                           {"heldout_loss_initial", base.heldout_loss_initial},
                           {"heldout_loss_final", base.heldout_loss_final},
                           {"probe_accuracy", base.probe_accuracy},
                           {"probe_chance", base.probe_chance},
                           {"same_id_cosine", base.same_id_cosine},
                           {"diff_id_cosine", base.diff_id_cosine}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return base;
}

Fixture load_fixture(const ExperimentConfig& cfg) {
  fs::path dir = pretrain_dir(cfg);
  std::string ck_path = (dir / "checkpoint.sidl").string();
  std::string mf_path = (dir / "manifest.json").string();
  json manifest = json::parse(read_text(mf_path));
  if (manifest.at("checkpoint_fnv").get<std::uint64_t>() !=
      file_checksum(ck_path))
    throw std::runtime_error("fixture: checkpoint/manifest checksum mismatch");

  Checkpoint ck = load_checkpoint(ck_path);
  Fixture f;
  f.world = cfg.world_config();
  f.schedule = make_schedule(cfg.timesteps, cfg.beta_start, cfg.beta_end);
  {
    const Tensor& beta = ck.get("schedule.beta");
    if (beta.values() != f.schedule.beta)
      throw std::runtime_error("fixture: schedule differs from checkpoint");
  }
  Rng dummy(0);
  f.dict = build_dict(f.world, dummy);
  f.dict.embeddings = ck.get("dict.embeddings").detach();
  f.mixer.pos_weights = ck.get("mixer.pos").detach();
  std::size_t L = static_cast<std::size_t>(f.world.width) * f.world.height;
  f.denoiser.net = get_mlp(ck, "denoiser");
  f.denoiser.latent_size = L;
  f.denoiser.cond_dim = static_cast<std::size_t>(f.world.embed_dim);
  f.denoiser.frozen = true;
  f.extractor = get_mlp(ck, "extractor");
  f.probe = get_mlp(ck, "probe");
  f.pretrain_manifest_fnv = file_checksum(mf_path);
  return f;
}

std::vector<PriorSpace> fixture_priors(const Fixture& f, PriorMode mode) {
  return dictionary_priors(f.dict, mode);
}

IdentityHead make_run_head(const Fixture& f, EncoderMode mode,
                           std::uint64_t run_seed) {
  std::size_t L = static_cast<std::size_t>(f.world.width) * f.world.height;
  IdentityHead h;
  h.feature_dim = 64;
  h.embed_dim = static_cast<std::size_t>(f.world.embed_dim);
  if (mode == EncoderMode::IdentityExtractor) {
    h.extractor = f.extractor;
  } else {
    // Generic high-level features: a frozen random network, the toy
    // analog of an off-the-shelf semantic encoder.
    Rng gr(mix_seed(f.world.world_seed, 0x6E7E71C));
    h.extractor = Mlp::create({L, 128, h.feature_dim}, gr);
  }
  h.extractor.set_trainable(false);
  Rng pr(mix_seed(run_seed, 0x930));
  h.projector = Mlp::create({h.feature_dim, 64, 64, 2 * h.embed_dim}, pr);
  return h;
}

CustomizeOutput run_customization(Fixture& f, const ToySample& input,
                                  const TrainConfig& tc, EncoderMode enc,
                                  PriorMode prior_mode) {
  CustomizeOutput out;
  out.head = make_run_head(f, enc, tc.seed);
  auto priors = fixture_priors(f, prior_mode);
  auto t0 = std::chrono::steady_clock::now();
  out.result = train_customizer(input, f.denoiser, priors, f.dict, f.mixer,
                                f.schedule, out.head, tc);
  out.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

ToySample reference_sample(const Fixture& f, const ExperimentConfig& cfg,
                           int identity_id) {
  Rng r(mix_seed(cfg.world_seed, 0x5EF0 + static_cast<std::uint64_t>(identity_id)));
  return gen_sample(f.world, identity_id, 0, r);
}

namespace {

std::string trace_csv(const CustomizeResult& r) {
  std::string s = "step,t,branch,loss\n";
  for (const auto& row : r.trace)
    s += std::to_string(row.step) + "," + std::to_string(row.t) + "," +
         branch_name(row.branch) + "," + fmt(row.loss) + "\n";
  return s;
}

std::string embeddings_csv(const CustomizeResult& r) {
  std::string s = "label";
  for (std::size_t j = 0; j < r.v_star_1.size(); ++j)
    s += ",x" + std::to_string(j);
  s += "\nv_star_1";
  for (double v : r.v_star_1) s += "," + fmt(v);
  s += "\nv_star_2";
  for (double v : r.v_star_2) s += "," + fmt(v);
  s += "\n";
  return s;
}

}  // namespace

std::string cmd_customize(const ExperimentConfig& cfg, int identity_id,
                          const std::string& tag) {
  Fixture f = load_fixture(cfg);
  ToySample input = reference_sample(f, cfg, identity_id);
  TrainConfig tc = cfg.train_config();
  CustomizeOutput out =
      run_customization(f, input, tc, cfg.encoder(), cfg.prior());

  fs::path dir = fs::path(cfg.out_dir) / "customize" / tag;
  fs::create_directories(dir);

  Checkpoint ck;
  put_mlp(ck, "projector", out.head.projector);
  ck.put("embeddings.v1", Tensor::from({out.result.v_star_1.size()},
                                       out.result.v_star_1));
  ck.put("embeddings.v2", Tensor::from({out.result.v_star_2.size()},
                                       out.result.v_star_2));
  std::string head_path = (dir / "head.sidl").string();
  save_checkpoint(ck, head_path);

  write_text(dir / "trace.csv", trace_csv(out.result));
  write_text(dir / "embeddings.csv", embeddings_csv(out.result));

  json manifest;
  manifest["config"] = dump_config(cfg);
  manifest["identity_id"] = identity_id;
  manifest["pretrain_manifest_fnv"] = f.pretrain_manifest_fnv;
  manifest["head_fnv"] = file_checksum(head_path);
  manifest["projector_checksum"] = out.head.projector.checksum();
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  json timing;
  timing["training_time_s"] = out.elapsed_s;
  write_text(dir / "timing.json", timing.dump(2) + "\n");
  return dir.string();
}

StoredCustomization load_customization(const ExperimentConfig& cfg,
                                       const std::string& tag) {
  fs::path dir = fs::path(cfg.out_dir) / "customize" / tag;
  json manifest = json::parse(read_text(dir / "manifest.json"));
  std::uint64_t expected =
      manifest.at("pretrain_manifest_fnv").get<std::uint64_t>();
  std::uint64_t actual =
      file_checksum((fs::path(pretrain_dir(cfg)) / "manifest.json").string());
  if (expected != actual)
    throw std::runtime_error(
        "customization " + tag +
        ": pretrain manifest hash mismatch; refusing stale checkpoints");
  std::string head_path = (dir / "head.sidl").string();
  if (manifest.at("head_fnv").get<std::uint64_t>() != file_checksum(head_path))
    throw std::runtime_error("customization " + tag + ": head checksum mismatch");
  Checkpoint ck = load_checkpoint(head_path);
  StoredCustomization s;
  s.v_star_1 = ck.get("embeddings.v1").values();
  s.v_star_2 = ck.get("embeddings.v2").values();
  s.identity_id = manifest.at("identity_id").get<int>();
  if (fs::exists(dir / "timing.json"))
    s.elapsed_s = json::parse(read_text(dir / "timing.json"))
                      .at("training_time_s")
                      .get<double>();
  return s;
}

std::vector<Tensor> sample_images(const Fixture& f,
                                  const std::vector<double>& v1,
                                  const std::vector<double>& v2,
                                  int context_id, int count,
                                  double guidance_scale, int ddim_steps,
                                  std::uint64_t base_seed) {
  std::size_t L = f.denoiser.latent_size;
  std::size_t d = static_cast<std::size_t>(f.world.embed_dim);
  if (v1.size() != d || v2.size() != d)
    throw std::invalid_argument("sample_images: embedding dimension mismatch");

  TokenDict dict = f.dict;  // local copy; placeholders are per-sampler state
  dict.set_placeholders(Tensor::from({d}, v1), Tensor::from({d}, v2));
  std::vector<int> tokens = {dict.placeholder1, dict.placeholder2,
                             dict.context_token(context_id)};
  Tensor cond = context_condition(compose_prompt(tokens, dict), f.mixer).detach();
  Tensor uncond = Tensor::zeros({d});

  std::vector<int> ladder = ddim_timesteps(f.schedule, ddim_steps);
  std::vector<Tensor> images;
  for (int k = 0; k < count; ++k) {
    Rng r(base_seed ^ static_cast<std::uint64_t>(k));
    std::vector<double> z(L);
    for (auto& v : z) v = r.normal();
    Tensor zt = Tensor::from({L}, std::move(z));
    for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
      int t = ladder[i], t_prev = ladder[i + 1];
      Tensor eps_c = f.denoiser.denoise(zt, t, cond, f.schedule);
      Tensor eps;
      if (guidance_scale == 1.0) {
        eps = eps_c;
      } else {
        Tensor eps_u = f.denoiser.denoise(zt, t, uncond, f.schedule);
        eps = cfg_combine(eps_u, eps_c, guidance_scale);
      }
      // Static thresholding: clamp the denoised estimate each hop so the
      // guided trajectory stays inside the data range.
      std::vector<double> z0h = predict_z0(zt, eps, t, f.schedule).values();
      for (auto& v : z0h) v = std::clamp(v, -1.0, 1.0);
      double ap = f.schedule.alpha_bar_at(t_prev);
      double sa = std::sqrt(ap), sb = std::sqrt(1.0 - ap);
      std::vector<double> zn(L);
      for (std::size_t j = 0; j < L; ++j)
        zn[j] = sa * z0h[j] + sb * eps.values()[j];
      zt = Tensor::from({L}, std::move(zn));
    }
    images.push_back(reshape(zt, {1, static_cast<std::size_t>(f.world.height),
                                  static_cast<std::size_t>(f.world.width)})
                         .detach());
  }
  return images;
}

std::string cmd_sample(const ExperimentConfig& cfg, const std::string& tag,
                       int context_id, int count) {
  if (count < 0) throw std::invalid_argument("cmd_sample: negative count");
  Fixture f = load_fixture(cfg);
  StoredCustomization sc = load_customization(cfg, tag);
  auto images = sample_images(f, sc.v_star_1, sc.v_star_2, context_id, count,
                              cfg.guidance_scale, cfg.ddim_steps, cfg.seed);
  fs::path dir = fs::path(cfg.out_dir) / "sample" / tag;
  fs::create_directories(dir);
  std::string index = "file,context_id,seed\n";
  for (int k = 0; k < count; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "sample_%03d.pgm", k);
    write_pgm((dir / name).string(), images[static_cast<std::size_t>(k)]);
    index += std::string(name) + "," + std::to_string(context_id) + "," +
             std::to_string(cfg.seed ^ static_cast<std::uint64_t>(k)) + "\n";
  }
  write_text(dir / "index.csv", index);
  return dir.string();
}

IdentityEval evaluate_identity(Fixture& f, const ExperimentConfig& cfg,
                               const TrainConfig& tc, int identity_id) {
  ToySample reference = reference_sample(f, cfg, identity_id);
  CustomizeOutput out =
      run_customization(f, reference, tc, cfg.encoder(), cfg.prior());

  // Metrics always use the fixture's identity extractor.
  IdentityHead metric_head = make_run_head(f, EncoderMode::IdentityExtractor, 0);

  std::vector<Tensor> gens;
  double align = 0.0;
  for (int c = 0; c < f.world.num_contexts; ++c) {
    auto imgs = sample_images(f, out.result.v_star_1, out.result.v_star_2, c, 1,
                              tc.guidance_scale, cfg.ddim_steps,
                              mix_seed(tc.seed, 0x5A00 + static_cast<std::uint64_t>(c)));
    align += prompt_alignment(imgs, c, f.probe);
    gens.insert(gens.end(), imgs.begin(), imgs.end());
  }
  align /= f.world.num_contexts;

  // Pseudo ground truths: same contexts sampled with real pretraining
  // identity tokens.
  Rng pg(mix_seed(tc.seed, 0x6147));
  std::vector<Tensor> pseudo;
  std::size_t d = static_cast<std::size_t>(f.world.embed_dim);
  for (int c = 0; c < f.world.num_contexts; ++c) {
    int rid = static_cast<int>(pg.uniform_int(0, f.world.train_identities));
    const auto& emb = f.dict.embeddings.values();
    auto row_vec = [&](int tok) {
      std::size_t o = static_cast<std::size_t>(tok) * d;
      return std::vector<double>(emb.begin() + o, emb.begin() + o + d);
    };
    auto imgs = sample_images(f, row_vec(f.dict.id_token_first(rid)),
                              row_vec(f.dict.id_token_last(rid)), c, 1,
                              tc.guidance_scale, cfg.ddim_steps, pg.next_u64());
    pseudo.insert(pseudo.end(), imgs.begin(), imgs.end());
  }

  auto feat_matrix = [&](const std::vector<Tensor>& set) {
    std::size_t k = metric_head.feature_dim;
    std::vector<double> rows;
    rows.reserve(set.size() * k);
    for (const auto& img : set) {
      auto v = image_features(img, metric_head);
      rows.insert(rows.end(), v.begin(), v.end());
    }
    return Tensor::from({set.size(), k}, std::move(rows));
  };

  IdentityEval ev;
  ev.v_star_1 = out.result.v_star_1;
  ev.v_star_2 = out.result.v_star_2;
  ev.report.sample_count = gens.size();
  ev.report.prompt_alignment = align;
  ev.report.identity_similarity = identity_similarity(gens, reference, metric_head);
  ev.report.diversity = pairwise_diversity(gens, [&](const Tensor& img) {
    return face_features(img, reference.mask_face, metric_head);
  });
  ev.report.trusted_diversity = trusted_diversity(gens, reference, metric_head);
  ev.report.frechet = frechet_distance(feat_matrix(gens), feat_matrix(pseudo));
  {
    auto ref_feat = image_features(reference.z0, metric_head);
    double acc = 0.0;
    for (const auto& g : gens)
      acc += cosine_similarity(image_features(g, metric_head), ref_feat);
    ev.report.clip_i_analog = acc / static_cast<double>(gens.size());
  }
  return ev;
}

namespace {

constexpr const char* kReportHeader =
    "clip_i_analog,prompt_alignment,identity_similarity,diversity,"
    "trusted_diversity,frechet";

std::string report_row(const EvalReport& r) {
  return fmt(r.clip_i_analog) + "," + fmt(r.prompt_alignment) + "," +
         fmt(r.identity_similarity) + "," + fmt(r.diversity) + "," +
         fmt(r.trusted_diversity) + "," + fmt(r.frechet);
}

struct SettingSummary {
  EvalReport mean;
  double frechet_to_prior = 0.0;
};

SettingSummary run_setting(Fixture& f, const ExperimentConfig& cfg,
                           const ExperimentConfig& setting_cfg) {
  SettingSummary s;
  auto priors = fixture_priors(f, setting_cfg.prior());
  std::size_t d = static_cast<std::size_t>(f.world.embed_dim);
  int n = 0;
  double f2p_acc = 0.0;
  for (int si = 0; si < cfg.eval_seeds; ++si) {
    std::vector<double> seed_rows;
    for (int ii = 0; ii < cfg.eval_identities; ++ii) {
      int id = cfg.identities + ii;
      TrainConfig tc = setting_cfg.train_config();
      tc.seed = mix_seed(cfg.seed, (static_cast<std::uint64_t>(si) << 16) |
                                       static_cast<std::uint64_t>(id));
      IdentityEval ev = evaluate_identity(f, setting_cfg, tc, id);
      s.mean.clip_i_analog += ev.report.clip_i_analog;
      s.mean.prompt_alignment += ev.report.prompt_alignment;
      s.mean.identity_similarity += ev.report.identity_similarity;
      s.mean.diversity += ev.report.diversity;
      s.mean.trusted_diversity += ev.report.trusted_diversity;
      s.mean.frechet += ev.report.frechet;
      seed_rows.insert(seed_rows.end(), ev.v_star_1.begin(), ev.v_star_1.end());
      seed_rows.insert(seed_rows.end(), ev.v_star_2.begin(), ev.v_star_2.end());
      ++n;
    }
    std::size_t nrows = seed_rows.size() / d;
    Tensor rows = Tensor::from({nrows, d}, std::move(seed_rows));
    f2p_acc += frechet_distance(rows, priors[0].C);
  }
  s.mean.clip_i_analog /= n;
  s.mean.prompt_alignment /= n;
  s.mean.identity_similarity /= n;
  s.mean.diversity /= n;
  s.mean.trusted_diversity /= n;
  s.mean.frechet /= n;
  s.mean.sample_count = static_cast<std::size_t>(n);
  s.frechet_to_prior = f2p_acc / cfg.eval_seeds;
  return s;
}

}  // namespace

std::string cmd_evaluate(const ExperimentConfig& cfg, EvalProtocol protocol) {
  Fixture f = load_fixture(cfg);
  fs::path dir = fs::path(cfg.out_dir) / "evaluate";
  fs::create_directories(dir);

  if (protocol == EvalProtocol::Standard) {
    std::string csv = std::string("identity,") + kReportHeader + "\n";
    EvalReport agg;
    int n = 0;
    for (int ii = 0; ii < cfg.eval_identities; ++ii) {
      int id = cfg.identities + ii;
      EvalReport mean;
      for (int si = 0; si < cfg.eval_seeds; ++si) {
        TrainConfig tc = cfg.train_config();
        tc.seed = mix_seed(cfg.seed, (static_cast<std::uint64_t>(si) << 16) |
                                         static_cast<std::uint64_t>(id));
        IdentityEval ev = evaluate_identity(f, cfg, tc, id);
        mean.clip_i_analog += ev.report.clip_i_analog / cfg.eval_seeds;
        mean.prompt_alignment += ev.report.prompt_alignment / cfg.eval_seeds;
        mean.identity_similarity +=
            ev.report.identity_similarity / cfg.eval_seeds;
        mean.diversity += ev.report.diversity / cfg.eval_seeds;
        mean.trusted_diversity += ev.report.trusted_diversity / cfg.eval_seeds;
        mean.frechet += ev.report.frechet / cfg.eval_seeds;
      }
      csv += std::to_string(id) + "," + report_row(mean) + "\n";
      agg.clip_i_analog += mean.clip_i_analog;
      agg.prompt_alignment += mean.prompt_alignment;
      agg.identity_similarity += mean.identity_similarity;
      agg.diversity += mean.diversity;
      agg.trusted_diversity += mean.trusted_diversity;
      agg.frechet += mean.frechet;
      ++n;
    }
    agg.clip_i_analog /= n;
    agg.prompt_alignment /= n;
    agg.identity_similarity /= n;
    agg.diversity /= n;
    agg.trusted_diversity /= n;
    agg.frechet /= n;
    csv += "aggregate," + report_row(agg) + "\n";
    std::string path = (dir / "report.csv").string();
    write_text(path, csv);
    return path;
  }

  if (protocol == EvalProtocol::Ablation) {
    struct Preset {
      const char* name;
      void (*apply)(ExperimentConfig&);
    };
    static const Preset presets[] = {
        {"default", [](ExperimentConfig&) {}},
        {"clip_enc",
         [](ExperimentConfig& c) { c.encoder_mode = "generic_features"; }},
        {"wo_adain", [](ExperimentConfig& c) { c.use_adain = false; }},
        {"wo_mask", [](ExperimentConfig& c) { c.use_mask = false; }},
        {"noise_only", [](ExperimentConfig& c) { c.loss_mode = "noise_only"; }},
        {"rec_only", [](ExperimentConfig& c) { c.loss_mode = "rec_only"; }},
    };
    std::string csv =
        std::string("setting,") + kReportHeader + ",frechet_to_prior\n";
    for (const auto& p : presets) {
      ExperimentConfig sc = cfg;
      p.apply(sc);
      SettingSummary s = run_setting(f, cfg, sc);
      csv += std::string(p.name) + "," + report_row(s.mean) + "," +
             fmt(s.frechet_to_prior) + "\n";
    }
    std::string path = (dir / "ablation.csv").string();
    write_text(path, csv);
    return path;
  }

  // Alpha sweep.
  std::string csv = std::string("alpha,recommended,") + kReportHeader +
                    ",frechet_to_prior\n";
  for (double a : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    ExperimentConfig sc = cfg;
    sc.alpha = a;
    SettingSummary s = run_setting(f, cfg, sc);
    bool rec = a >= 0.4 && a <= 0.6;
    csv += fmt(a) + "," + (rec ? "yes" : "no") + "," + report_row(s.mean) +
           "," + fmt(s.frechet_to_prior) + "\n";
  }
  std::string path = (dir / "alpha_sweep.csv").string();
  write_text(path, csv);
  return path;
}

std::string cmd_evaluate_tag(const ExperimentConfig& cfg,
                             const std::string& tag) {
  Fixture f = load_fixture(cfg);
  StoredCustomization sc = load_customization(cfg, tag);
  ToySample reference = reference_sample(f, cfg, sc.identity_id);
  IdentityHead metric_head = make_run_head(f, EncoderMode::IdentityExtractor, 0);

  std::vector<Tensor> gens;
  double align = 0.0;
  for (int c = 0; c < f.world.num_contexts; ++c) {
    auto imgs = sample_images(f, sc.v_star_1, sc.v_star_2, c, 1,
                              cfg.guidance_scale, cfg.ddim_steps,
                              mix_seed(cfg.seed, 0x5A00 + static_cast<std::uint64_t>(c)));
    align += prompt_alignment(imgs, c, f.probe);
    gens.insert(gens.end(), imgs.begin(), imgs.end());
  }
  align /= f.world.num_contexts;

  EvalReport r;
  r.sample_count = gens.size();
  r.prompt_alignment = align;
  r.identity_similarity = identity_similarity(gens, reference, metric_head);
  r.diversity = pairwise_diversity(gens, [&](const Tensor& img) {
    return face_features(img, reference.mask_face, metric_head);
  });
  r.trusted_diversity = trusted_diversity(gens, reference, metric_head);
  {
    auto ref_feat = image_features(reference.z0, metric_head);
    double acc = 0.0;
    for (const auto& g : gens)
      acc += cosine_similarity(image_features(g, metric_head), ref_feat);
    r.clip_i_analog = acc / static_cast<double>(gens.size());
  }

  fs::path dir = fs::path(cfg.out_dir) / "evaluate";
  fs::create_directories(dir);
  std::string csv = std::string("identity,") + kReportHeader + "\n" +
                    std::to_string(sc.identity_id) + "," + report_row(r) + "\n";
  std::string path = (dir / ("report_" + tag + ".csv")).string();
  write_text(path, csv);
  return path;
}

std::vector<std::vector<double>> read_embedding_csv(const std::string& path) {
  std::ifstream fin(path);
  if (!fin) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(fin, line)) {
    if (line.empty()) continue;
    if (first) {  // header
      first = false;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool label = true;
    while (std::getline(ss, cell, ',')) {
      if (label) {
        label = false;
        continue;
      }
      row.push_back(std::stod(cell));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string cmd_analyze(const ExperimentConfig& cfg,
                        const std::vector<std::string>& embedding_csvs) {
  Fixture f = load_fixture(cfg);
  auto priors = fixture_priors(f, cfg.prior());
  const PriorSpace& prior = priors[0];
  std::size_t d = static_cast<std::size_t>(f.world.embed_dim);

  fs::path dir = fs::path(cfg.out_dir) / "analyze";
  fs::create_directories(dir);

  struct Set {
    std::string name;
    Tensor rows;
    double elapsed = 0.0;
  };
  std::vector<Set> sets;
  sets.push_back({"prior", prior.C, 0.0});
  for (const auto& path : embedding_csvs) {
    auto rows = read_embedding_csv(path);
    if (rows.empty())
      throw std::runtime_error("analyze: empty embedding set " + path);
    std::vector<double> flat;
    for (const auto& r : rows) {
      if (r.size() != d)
        throw std::runtime_error("analyze: dimension mismatch in " + path);
      flat.insert(flat.end(), r.begin(), r.end());
    }
    Set s;
    s.name = fs::path(path).parent_path().filename().string();
    if (s.name.empty()) s.name = fs::path(path).stem().string();
    s.rows = Tensor::from({rows.size(), d}, std::move(flat));
    fs::path timing = fs::path(path).parent_path() / "timing.json";
    if (fs::exists(timing))
      s.elapsed = json::parse(read_text(timing)).at("training_time_s").get<double>();
    sets.push_back(std::move(s));
  }

  std::string stats =
      "set,count,max,min,frechet_to_prior,training_time_s\n";
  std::vector<double> pooled;
  std::vector<std::string> pooled_labels;
  for (const auto& s : sets) {
    EmbeddingStats st = embedding_stats(s.rows, prior, s.elapsed);
    stats += s.name + "," + std::to_string(s.rows.shape()[0]) + "," +
             fmt(st.max) + "," + fmt(st.min) + "," + fmt(st.frechet_to_prior) +
             "," + fmt(st.training_time_s) + "\n";
    for (std::size_t i = 0; i < s.rows.shape()[0]; ++i) {
      pooled.insert(pooled.end(), s.rows.values().begin() + i * d,
                    s.rows.values().begin() + (i + 1) * d);
      pooled_labels.push_back(s.name);
    }
  }
  write_text(dir / "stats.csv", stats);

  Tensor cloud = Tensor::from({pooled_labels.size(), d}, std::move(pooled));
  Tensor proj = project_2d(cloud);
  std::string pc = "label,x,y\n";
  for (std::size_t i = 0; i < pooled_labels.size(); ++i)
    pc += pooled_labels[i] + "," + fmt(proj.values()[i * 2]) + "," +
          fmt(proj.values()[i * 2 + 1]) + "\n";
  write_text(dir / "projection.csv", pc);
  return (dir / "stats.csv").string();
}

}  // namespace sidl

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldgen/adapter.hpp"
#include "ldgen/checkpoint.hpp"
#include "ldgen/diffusion.hpp"
#include "ldgen/losses.hpp"
#include "ldgen/refiner.hpp"
#include "ldgen/teacher.hpp"
#include "ldgen/toy_dit.hpp"

namespace ldgen {

enum class Stage { kAlign, kJoint };

struct OptimizerConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t steps = 1000;
  std::int64_t batch_size = 16;
  std::int64_t log_every = 50;
};

struct ScheduleConfig {
  std::int64_t timesteps = 100;
  double beta_start = 1e-4;
  double beta_end = 0.02;
};

struct JointConfig {
  bool freeze_adapter = true;
  // Control arm: rotate condition/latent pairing within each batch.
  bool shuffle_conditions = false;
  // Control arm: feed aligned features straight to the DiT.
  bool bypass_refiner = false;
  std::int64_t data_size = 512;
};

// Full run description. The defaults describe the desk-scale toy recipe;
// paper-scale widths (3584/4096) are plain config values.
struct RunConfig {
  Stage stage = Stage::kAlign;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  std::int64_t align_pairs = 2000;
  bool save_optimizer = true;

  AdapterConfig adapter;
  RefinerConfig refiner;
  AlignmentLossConfig loss;
  ScheduleConfig schedule;
  ToyDiTConfig dit;
  OptimizerConfig optimizer;
  TeacherConfig teacher;
  JointConfig joint;

  RunConfig();  // installs the toy-recipe defaults

  void validate() const;
  std::string canonical_json() const;
  std::uint64_t digest() const;

  static RunConfig from_json_text(const std::string &text);
  static RunConfig from_file(const std::string &path);
};

struct TrainMetrics {
  std::int64_t step = 0;
  double total = 0.0;
  double cosine_component = 0.0;
  double mse_component = 0.0;
  double eps_loss = 0.0;
  double mean_cosine = 0.0;
  double wall_ms = 0.0;  // console-only; excluded from metrics files
  Stage stage = Stage::kAlign;
};

// Deterministic serialization (wall_ms intentionally omitted so identical
// (config, seed) runs produce byte-identical metrics files).
std::string metrics_to_json(const TrainMetrics &m);
void write_metrics_file(const std::string &path,
                        const std::vector<TrainMetrics> &metrics);

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<TrainMetrics> metrics;
  double initial_loss = 0.0;  // first-batch loss before any update
  double final_loss = 0.0;
};

// Stage 1: calibrate the scale coefficient on the first batch, then train
// the adapter against the combined alignment loss on synthetic teacher
// pairs. Deterministic given (config, seed).
TrainResult train_adapter(const RunConfig &config);

// Stage 2: compose scale -> adapter -> refiner -> toy DiT and train refiner
// + DiT (adapter frozen unless configured otherwise) on the eps-prediction
// loss. `init` must carry adapter parameters and calibration.
TrainResult train_joint(const RunConfig &config, const Checkpoint &init);

// Mean first-batch eps-loss at init, without training. Honors
// config.joint.bypass_refiner; with zero refiner gates the bypassed and
// non-bypassed values agree exactly.
double initial_joint_loss(const RunConfig &config, const Checkpoint &init);

struct LanguageStats {
  std::int64_t pairs = 0;
  double mean_cosine = 0.0;
};

struct EvalReport {
  std::int64_t pairs = 0;
  double mean_cosine = 0.0;
  double p10_cosine = 0.0;
  double p50_cosine = 0.0;
  double p90_cosine = 0.0;
  double mean_mse = 0.0;
  std::map<std::string, LanguageStats> per_language;
};

std::string eval_report_to_json(const EvalReport &r);

// Evaluates a trained adapter checkpoint on an LDFS dataset laid out as
// consecutive (llm, t5) record pairs. `languages`, when given, tags each
// pair for the per-language breakdown.
EvalReport evaluate_alignment(const Checkpoint &ckpt, const RunConfig &config,
                              const std::vector<FeatureSequence> &dataset,
                              const std::vector<std::string> *languages =
                                  nullptr);

// Detached mean over valid rows of per-row cosine similarity.
double mean_masked_cosine(const FeatureSequence &pred,
                          const FeatureSequence &target);

// Pad (mask=false) or truncate a target sequence to `t_out` rows.
FeatureSequence fit_target_rows(const FeatureSequence &target,
                                std::int64_t t_out);

// Rebuilds model structs from a checkpoint.
AdapterParams adapter_from_checkpoint(const Checkpoint &ckpt,
                                      const AdapterConfig &config);
RefinerParams refiner_from_checkpoint(const Checkpoint &ckpt,
                                      const RefinerConfig &config);
ToyDiTParams dit_from_checkpoint(const Checkpoint &ckpt,
                                 const ToyDiTConfig &config);

}  // namespace ldgen

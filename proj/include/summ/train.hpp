#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "summ/model.hpp"

namespace summ::train {

using ad::Param;
using ad::ParamStore;

struct TrainConfig {
  double lr = 0.15;
  double adagrad_init_acc = 0.1;
  double clip_norm = 2.0;
  int batch_size = 4;  // reference setting 16; 4 keeps desk runs fast
  int max_steps = 1000;
  int coverage_phase_steps = 0;
  double lambda_cov = 1.0;
  unsigned long seed = 13;
  int checkpoint_every = 0;  // 0 disables periodic checkpoints
  std::string checkpoint_path;
  std::function<void(int step, double loss, double covloss)> on_step;
};

// Scales all gradients so the global L2 norm does not exceed max_norm.
inline void clip_global_norm(ParamStore& params, double max_norm) {
  if (!(max_norm > 0)) throw std::invalid_argument("clip_global_norm: max_norm must be > 0");
  double sq = 0.0;
  for (auto& [name, p] : params) {
    for (double g : p.grad) sq += g * g;
  }
  double norm = std::sqrt(sq);
  if (norm <= max_norm) return;
  double s = max_norm / norm;
  for (auto& [name, p] : params) {
    for (double& g : p.grad) g *= s;
  }
}

// acc += g^2; theta -= lr * g / sqrt(acc). Accumulators must be seeded
// with the initial value before the first step.
inline void adagrad_step(ParamStore& params, double lr) {
  for (auto& [name, p] : params) {
    for (size_t i = 0; i < p.value.size(); ++i) {
      double g = p.grad[i];
      if (!std::isfinite(g)) {
        throw std::runtime_error("non-finite gradient in parameter '" + name + "' at entry " +
                                 std::to_string(i));
      }
      p.acc[i] += g * g;
      p.value[i] -= lr * g / std::sqrt(p.acc[i]);
    }
  }
}

inline void init_accumulators(ParamStore& params, double init_acc) {
  for (auto& [name, p] : params) std::fill(p.acc.begin(), p.acc.end(), init_acc);
}

struct TraceRow {
  int step;
  double loss;
  double covloss;
};

inline void save_trace(const std::vector<TraceRow>& trace, std::ostream& out,
                       const std::string& config_line = "") {
  if (!config_line.empty()) out << "# " << config_line << "\n";
  out << "step,loss,covloss\n";
  for (const auto& row : trace) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", row.step, row.loss, row.covloss);
    out << buf;
  }
}

// Teacher-forced training: max_steps without coverage, then
// coverage_phase_steps of coverage fine-tuning.
inline std::vector<TraceRow> train(model::Model& m, const std::vector<EncodedExample>& corpus,
                                   const TrainConfig& cfg) {
  if (corpus.empty()) throw std::invalid_argument("train: empty corpus");
  m.cfg.lambda_cov = cfg.lambda_cov;
  init_accumulators(m.params, cfg.adagrad_init_acc);
  std::mt19937_64 rng(cfg.seed);
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  size_t cursor = 0;
  auto next_batch = [&] {
    std::vector<const EncodedExample*> batch;
    for (int i = 0; i < cfg.batch_size; ++i) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      batch.push_back(&corpus[order[cursor++]]);
    }
    return batch;
  };

  std::vector<TraceRow> trace;
  const int total = cfg.max_steps + cfg.coverage_phase_steps;
  for (int step = 1; step <= total; ++step) {
    const bool coverage_on = m.cfg.use_coverage && step > cfg.max_steps;
    auto batch = next_batch();
    m.params.zero_grad();
    double loss_sum = 0.0, cov_sum = 0.0;
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (const EncodedExample* ex : batch) {
      ad::Graph g;
      auto sl = m.sequence_loss(g, *ex, coverage_on);
      loss_sum += sl.total.value();
      cov_sum += sl.covloss;
      g.backward(ad::scale(sl.total, inv_b));
    }
    clip_global_norm(m.params, cfg.clip_norm);
    adagrad_step(m.params, cfg.lr);
    TraceRow row{step, loss_sum * inv_b, cov_sum * inv_b};
    trace.push_back(row);
    if (cfg.on_step) cfg.on_step(row.step, row.loss, row.covloss);
    if (cfg.checkpoint_every > 0 && !cfg.checkpoint_path.empty() &&
        step % cfg.checkpoint_every == 0) {
      m.save(cfg.checkpoint_path);
    }
  }
  return trace;
}

}  // namespace summ::train

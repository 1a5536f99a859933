#pragma once

// Synthetic crowd-rating generator with planted system qualities. Used to
// exercise the analysis pipeline end to end when no real annotation data is
// at hand.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "qgeval/error.hpp"
#include "qgeval/human_eval/hit.hpp"
#include "qgeval/human_eval/types.hpp"
#include "qgeval/random.hpp"

namespace qgeval::human_eval {

struct SimulatedSystem {
  std::string name;
  double quality = 0.0;  // offset on the 0..100 slider for an average rater
};

/// Eleven systems with planted qualities spread like a typical QG
/// leaderboard: a close top group, a middle pack and a weak tail.
inline std::vector<SimulatedSystem> reference_systems() {
  return {{"Human", 16.10},     {"BART-large", 15.40}, {"BART-base", 14.50}, {"T5-base", 11.30},
          {"RNN", 7.35},        {"H-Seq2seq", 6.00},   {"T5-small", 5.85},   {"Att-GGNN-plus", 3.80},
          {"H-Seq2seq*", 2.65}, {"Att-GGNN", -0.40},   {"GPT-2", -2.60}};
}

enum class WorkerProfile { diligent, random_clicker };

struct SimulationConfig {
  std::vector<SimulatedSystem> systems = reference_systems();
  std::vector<std::string> criteria = default_criteria();
  std::size_t hits = 300;
  std::size_t workers = 100;
  double random_worker_fraction = 0.2;
  double item_sd = 12.0;         // spread of question quality within a system
  double rater_noise_sd = 8.0;   // per-score rater noise
  double leniency_sd = 10.0;     // rater offset
  double scale_lo = 0.7;         // rater slider-usage scale range
  double scale_hi = 1.3;
  double badref_penalty = 35.0;  // quality lost by a bad reference
  std::string worker_prefix = "w";
  std::string hit_prefix = "h";
  std::string human_system = kHumanSystem;
};

struct SimulationRun {
  std::vector<Hit> hits;
  std::vector<RatingRecord> ratings;
  std::map<std::string, WorkerProfile> workers;
};

namespace detail {

inline double clamp_slider(double v) { return std::clamp(std::round(v), 0.0, 100.0); }

inline std::vector<std::string> synthetic_words(Rng& rng, std::size_t n) {
  std::vector<std::string> words(n);
  for (auto& w : words) w = "w" + std::to_string(rng.index(500));
  return words;
}

struct Rater {
  WorkerProfile profile = WorkerProfile::diligent;
  double leniency = 0.0;
  double scale = 1.0;
};

}  // namespace detail

inline SimulationRun simulate_run(const SimulationConfig& cfg, Rng rng) {
  if (cfg.systems.size() != kHitSystems)
    throw InvalidArgument("simulate_run: need exactly " + std::to_string(kHitSystems) + " systems");
  if (cfg.hits == 0 || cfg.workers == 0) throw InvalidArgument("simulate_run: empty simulation");

  SimulationRun run;
  Rng worker_rng = rng.split("workers");
  std::vector<std::string> worker_ids;
  std::map<std::string, detail::Rater> raters;
  for (std::size_t w = 0; w < cfg.workers; ++w) {
    const std::string id = cfg.worker_prefix + std::to_string(w);
    detail::Rater r;
    r.profile = worker_rng.uniform() < cfg.random_worker_fraction ? WorkerProfile::random_clicker
                                                                  : WorkerProfile::diligent;
    r.leniency = worker_rng.normal(0.0, cfg.leniency_sd);
    r.scale = worker_rng.uniform(cfg.scale_lo, cfg.scale_hi);
    raters[id] = r;
    run.workers[id] = r.profile;
    worker_ids.push_back(id);
  }

  Rng text_rng = rng.split("passages");
  std::vector<DonorPassage> passages(cfg.hits);
  for (std::size_t h = 0; h < cfg.hits; ++h)
    passages[h] = {cfg.hit_prefix + std::to_string(h), detail::synthetic_words(text_rng, 40)};

  std::map<std::string, double> quality;
  for (const auto& s : cfg.systems) quality[s.name] = s.quality;

  Rng hit_rng = rng.split("hits");
  Rng score_rng = rng.split("scores");
  for (std::size_t h = 0; h < cfg.hits; ++h) {
    std::map<std::string, std::string> questions;
    std::map<std::string, double> latent;
    for (const auto& s : cfg.systems) {
      questions[s.name] = join(detail::synthetic_words(text_rng, 6 + text_rng.index(10)));
      latent[s.name] = 50.0 + s.quality + score_rng.normal(0.0, cfg.item_sd);
    }
    Hit hit = build_hit(passages[h].id, passages[h].id, join(passages[h].words), "w0", questions,
                        passages, hit_rng, cfg.human_system);
    const std::string& worker = worker_ids[hit_rng.index(worker_ids.size())];
    const auto& rater = raters[worker];
    for (const auto& item : hit.items) {
      RatingRecord rec{worker, hit.hit_id, item.item_id, item.system, item.kind, item.pair_of, {}};
      double base = latent[item.system];
      if (item.kind == ItemKind::badref) base -= cfg.badref_penalty;
      for (const auto& c : cfg.criteria) {
        double v;
        if (rater.profile == WorkerProfile::random_clicker) {
          v = score_rng.uniform(0.0, 100.0);
        } else {
          v = 50.0 + rater.leniency + rater.scale * (base - 50.0) + score_rng.normal(0.0, cfg.rater_noise_sd);
        }
        rec.scores[c] = detail::clamp_slider(v);
      }
      run.ratings.push_back(std::move(rec));
    }
    run.hits.push_back(std::move(hit));
  }
  return run;
}

/// Ratings for a single worker over `n_hits` HITs that contain only
/// (ORD, BADREF) pairs, for quality-control experiments. Diligent workers
/// rate ORD around ord_mean and BADREF around badref_mean with the given sd.
struct QCWorkerConfig {
  WorkerProfile profile = WorkerProfile::diligent;
  std::size_t pairs_per_hit = 6;
  std::size_t n_hits = 1;
  double ord_mean = 80.0;
  double badref_mean = 20.0;
  double sd = 5.0;
  std::vector<std::string> criteria = default_criteria();
};

inline std::vector<RatingRecord> simulate_qc_worker(const std::string& worker_id, const QCWorkerConfig& cfg,
                                                    Rng& rng) {
  std::vector<RatingRecord> out;
  for (std::size_t h = 0; h < cfg.n_hits; ++h) {
    const std::string hit_id = worker_id + "-h" + std::to_string(h);
    for (std::size_t p = 0; p < cfg.pairs_per_hit; ++p) {
      const std::string sys = "S" + std::to_string(p);
      const std::string ord_id = hit_id + ":" + sys + ":ORD";
      RatingRecord ord{worker_id, hit_id, ord_id, sys, ItemKind::ord, std::nullopt, {}};
      RatingRecord bad{worker_id, hit_id, hit_id + ":" + sys + ":BADREF", sys, ItemKind::badref, ord_id, {}};
      for (const auto& c : cfg.criteria) {
        if (cfg.profile == WorkerProfile::random_clicker) {
          ord.scores[c] = detail::clamp_slider(rng.uniform(0.0, 100.0));
          bad.scores[c] = detail::clamp_slider(rng.uniform(0.0, 100.0));
        } else {
          ord.scores[c] = detail::clamp_slider(rng.normal(cfg.ord_mean, cfg.sd));
          bad.scores[c] = detail::clamp_slider(rng.normal(cfg.badref_mean, cfg.sd));
        }
      }
      out.push_back(std::move(ord));
      out.push_back(std::move(bad));
    }
  }
  return out;
}

}  // namespace qgeval::human_eval

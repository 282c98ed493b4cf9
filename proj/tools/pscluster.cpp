#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ps/error.hpp"
#include "ps/eval.hpp"
#include "ps/feature_store.hpp"
#include "ps/gallery.hpp"
#include "ps/hnm.hpp"
#include "ps/hpm.hpp"
#include "ps/parallel.hpp"
#include "ps/reid_loss.hpp"
#include "ps/synth.hpp"

namespace {

using nlohmann::json;

struct ClusterFlags {
  double delta = 0.6;
  double beta = 0.1;
  int hpm_max_iters = 3;
  bool no_hpm = false;
  bool no_hnm = false;
};

void add_cluster_flags(CLI::App* cmd, ClusterFlags& f) {
  cmd->add_option("--delta", f.delta, "Similarity threshold for candidate positives (default 0.6)")
      ->check(CLI::Range(-0.999999, 0.999999));
  cmd->add_option("--beta", f.beta, "Co-appearance weight for similarity updates (default 0.1)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--hpm-max-iters", f.hpm_max_iters, "Max co-appearance iterations (default 3)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--no-hpm", f.no_hpm, "Disable co-appearance mining (single matching pass)");
  cmd->add_flag("--no-hnm", f.no_hnm, "Disable WTA and cycle checks (threshold-only candidates)");
}

ps::HpmResult run_cluster(const ps::Gallery& g, const ps::FeatureStore& store, const ClusterFlags& f) {
  ps::HpmConfig cfg;
  cfg.delta = f.delta;
  cfg.beta = f.beta;
  cfg.max_iters = f.no_hpm ? 0 : f.hpm_max_iters;
  cfg.use_hnm = !f.no_hnm;
  return ps::run_hpm(g, store, cfg);
}

json trace_json(const ps::HpmResult& r, const ps::Gallery& g) {
  json trace = json::array();
  for (const ps::HpmIterationTrace& it : r.trace) {
    json pairs = json::array();
    for (const ps::HpmPairTrace& p : it.pairs) {
      pairs.push_back({{"k", g.image(p.k).image_id},
                       {"l", g.image(p.l).image_id},
                       {"coappearance", p.coappearance},
                       {"offset", p.offset}});
    }
    trace.push_back({{"t", it.t}, {"total_members", it.total_members}, {"pairs", std::move(pairs)}});
  }
  return trace;
}

int cmd_synth(const ps::SynthConfig& cfg, const std::string& out) {
  ps::Gallery g = ps::generate(cfg);
  ps::save_gallery(g, out);
  std::cerr << "wrote " << g.num_images() << " images, " << g.instance_count()
            << " instances (dim " << g.dim() << ") to " << out << "\n";
  return 0;
}

int cmd_cluster(const std::string& gallery_path, const ClusterFlags& f, const std::string& out,
                const std::string& trace_path) {
  ps::Gallery g = ps::load_gallery(gallery_path);
  ps::FeatureStore store = ps::FeatureStore::from_gallery(g);
  ps::HpmResult r = run_cluster(g, store, f);
  ps::save_positive_sets(g, r.sets, out);

  json report{{"iterations", r.iterations},
              {"terminated", r.cap_terminated ? "cap" : "fixpoint"},
              {"total_members", r.sets.total_members()},
              {"trace", trace_json(r, g)}};
  if (!trace_path.empty()) {
    std::ofstream tf(trace_path);
    if (!tf) throw std::runtime_error("cannot write trace file '" + trace_path + "'");
    tf << report["trace"].dump(2) << '\n';
  }
  std::cout << report.dump() << '\n';
  std::cerr << "clustered " << g.instance_count() << " instances: " << r.sets.total_members()
            << " memberships after " << r.iterations << " iteration(s) ("
            << (r.cap_terminated ? "cap" : "fixpoint") << ")\n";
  return 0;
}

int cmd_eval(const std::string& gallery_path, const std::string& protocol, const std::vector<int>& ks) {
  ps::Gallery g = ps::load_gallery(gallery_path);
  ps::FeatureStore store = ps::FeatureStore::from_gallery(g);
  const bool multi = protocol == "multi-view";

  std::vector<ps::Loc> queries;
  for (int k = 0; k < g.num_images(); ++k) {
    for (int i = 0; i < static_cast<int>(g.image(k).instances.size()); ++i) {
      if (g.instance(k, i).labeled()) queries.push_back({k, i});
    }
  }
  if (queries.empty()) throw ps::ConfigError("gallery has no labeled queries");

  std::vector<ps::RankedResult> results(queries.size());
  ps::parallel_for(queries.size(), ps::worker_count(), [&](std::size_t qi) {
    const ps::GalleryView view =
        multi ? ps::build_multiview_gallery(g, queries[qi]) : ps::build_regular_gallery(g, queries[qi]);
    results[qi] = ps::search(g, store, view);
  });

  ps::Metrics m = ps::evaluate(results, ks);
  json tk = json::object();
  for (const auto& [k, v] : m.top_k) tk[std::to_string(k)] = v;
  json report{{"protocol", protocol}, {"mAP", m.map}, {"top_k", std::move(tk)},
              {"num_queries", m.num_queries}, {"skipped", m.skipped}};
  std::cout << report.dump() << '\n';
  std::cerr << "mAP " << m.map << " over " << m.num_queries << " queries (" << m.skipped << " skipped)\n";
  return 0;
}

int cmd_stats(const std::string& gallery_path) {
  ps::Gallery g = ps::load_gallery(gallery_path);
  const auto bins = ps::coappearance_stats(g);
  json arr = json::array();
  for (const auto& [capacity, bin] : bins) {
    arr.push_back({{"capacity", capacity}, {"single", bin.single}, {"multiple", bin.multiple}});
  }
  std::cout << json{{"bins", std::move(arr)}}.dump() << '\n';
  std::cerr << "co-appearance histogram over " << bins.size() << " capacity bin(s)\n";
  return 0;
}

int cmd_loss_check(const std::string& gallery_path, const ClusterFlags& f, double tau, double ratio) {
  ps::Gallery g = ps::load_gallery(gallery_path);
  ps::FeatureStore store = ps::FeatureStore::from_gallery(g);
  ps::HpmResult r = run_cluster(g, store, f);

  std::vector<ps::Loc> anchors;
  for (int k = 0; k < g.num_images(); ++k) {
    for (int i = 0; i < static_cast<int>(g.image(k).instances.size()); ++i) anchors.push_back({k, i});
  }

  struct Row {
    bool has_loss = false;
    double value = 0.0;
    double grad_rel_err = 0.0;
  };
  std::vector<Row> rows(anchors.size());

  ps::parallel_for(anchors.size(), ps::worker_count(), [&](std::size_t ai) {
    const ps::Loc a = anchors[ai];
    const std::size_t slot = g.slot(a.image, a.index);
    std::vector<std::size_t> positives;
    for (const ps::Loc& m : r.sets.members(slot)) positives.push_back(g.slot(m.image, m.index));
    if (positives.empty()) return;

    const std::vector<std::size_t> negatives = ps::hard_negative_set(store, slot, positives, ratio);
    std::vector<double> gvec(store.get(slot).begin(), store.get(slot).end());
    const ps::LossResult lr = ps::reid_loss(gvec, positives, negatives, store, tau);

    // Central finite differences against the analytic gradient.
    const double h = 1e-5;
    double max_abs_diff = 0.0, max_abs_grad = 0.0;
    for (int d = 0; d < store.dim(); ++d) {
      std::vector<double> gp = gvec, gm = gvec;
      gp[static_cast<std::size_t>(d)] += h;
      gm[static_cast<std::size_t>(d)] -= h;
      const double fd = (ps::reid_loss(gp, positives, negatives, store, tau).value -
                         ps::reid_loss(gm, positives, negatives, store, tau).value) /
                        (2.0 * h);
      max_abs_diff = std::max(max_abs_diff, std::abs(fd - lr.gradient[static_cast<std::size_t>(d)]));
      max_abs_grad = std::max(max_abs_grad, std::abs(lr.gradient[static_cast<std::size_t>(d)]));
    }
    rows[ai] = {true, lr.value, max_abs_diff / std::max(max_abs_grad, 1e-12)};
  });

  json arr = json::array();
  double max_rel_err = 0.0;
  int skipped = 0;
  for (std::size_t ai = 0; ai < anchors.size(); ++ai) {
    if (!rows[ai].has_loss) {
      ++skipped;
      continue;
    }
    arr.push_back({{"anchor", json::array({g.image(anchors[ai].image).image_id, anchors[ai].index})},
                   {"loss", rows[ai].value},
                   {"grad_rel_err", rows[ai].grad_rel_err}});
    max_rel_err = std::max(max_rel_err, rows[ai].grad_rel_err);
  }
  json report{{"tau", tau}, {"hard_neg_ratio", ratio}, {"anchors", std::move(arr)},
              {"skipped", skipped}, {"max_grad_rel_err", max_rel_err}};
  std::cout << report.dump() << '\n';
  std::cerr << "loss over " << (anchors.size() - static_cast<std::size_t>(skipped)) << " anchors, "
            << skipped << " skipped; max gradient rel err " << max_rel_err << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-aware unsupervised clustering and retrieval evaluation for person search"};
  app.require_subcommand(1);

  // synth
  ps::SynthConfig scfg;
  std::string synth_out;
  std::pair<int, int> persons{2, 4};
  CLI::App* synth = app.add_subcommand("synth", "Generate a seeded synthetic gallery");
  synth->set_config("--config", "", "Key/value config file (TOML-style)");
  synth->add_option("--seed", scfg.seed, "RNG seed");
  synth->add_option("--n-identities", scfg.n_identities, "Number of identities");
  synth->add_option("--n-images", scfg.n_images, "Number of images");
  synth->add_option("--persons-per-image", [&persons](const std::vector<std::string>& v) {
        return sscanf(v[0].c_str(), "%d..%d", &persons.first, &persons.second) == 2;
      }, "Persons per image as MIN..MAX")->type_name("MIN..MAX");
  synth->add_option("--group-size", scfg.group_size, "Identities per co-appearance group");
  synth->add_option("--cohesion", scfg.p_group_cohesion, "Probability an image draws one group");
  synth->add_option("--noise-sigma", scfg.noise_sigma, "Isotropic Gaussian perturbation scale");
  synth->add_option("--dim", scfg.dim, "Embedding dimension (default 128)");
  synth->add_option("--n-cameras", scfg.n_cameras, "Number of cameras (round-robin)");
  synth->add_option("-o,--output", synth_out, "Output gallery JSONL")->required();

  // cluster
  ClusterFlags cf;
  std::string cluster_gallery, cluster_out, cluster_trace;
  CLI::App* cluster = app.add_subcommand("cluster", "Mine per-anchor positive sets");
  cluster->add_option("gallery", cluster_gallery, "Gallery JSONL")->required();
  add_cluster_flags(cluster, cf);
  cluster->add_option("-o,--output", cluster_out, "Positive-sets JSONL")->required();
  cluster->add_option("--trace", cluster_trace, "Write the iteration trace JSON to this file");

  // eval
  std::string eval_gallery, protocol = "regular";
  std::vector<int> ks{1, 5, 10};
  CLI::App* eval = app.add_subcommand("eval", "Retrieval metrics (mAP, Top-k)");
  eval->add_option("gallery", eval_gallery, "Gallery JSONL")->required();
  eval->add_option("--protocol", protocol, "Gallery protocol")
      ->check(CLI::IsMember({"regular", "multi-view"}));
  eval->add_option("--k", ks, "Top-k cutoffs");

  // stats
  std::string stats_gallery;
  CLI::App* stats = app.add_subcommand("stats", "Co-appearance histogram by matching capacity");
  stats->add_option("gallery", stats_gallery, "Gallery JSONL")->required();

  // loss-check
  ClusterFlags lf;
  std::string loss_gallery;
  double tau = 0.1, ratio = 0.01;
  CLI::App* loss = app.add_subcommand("loss-check", "Per-anchor loss values and gradient check");
  loss->add_option("gallery", loss_gallery, "Gallery JSONL")->required();
  add_cluster_flags(loss, lf);
  loss->add_option("--tau", tau, "Softmax temperature (default 0.1)")->check(CLI::PositiveNumber);
  loss->add_option("--hard-neg-ratio", ratio, "Hard-negative fraction (default 0.01)")
      ->check(CLI::Range(1e-9, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) {
      scfg.persons_min = persons.first;
      scfg.persons_max = persons.second;
      return cmd_synth(scfg, synth_out);
    }
    if (*cluster) return cmd_cluster(cluster_gallery, cf, cluster_out, cluster_trace);
    if (*eval) return cmd_eval(eval_gallery, protocol, ks);
    if (*stats) return cmd_stats(stats_gallery);
    if (*loss) return cmd_loss_check(loss_gallery, lf, tau, ratio);
  } catch (const ps::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

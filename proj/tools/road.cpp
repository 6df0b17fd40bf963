// road: pixel-removal evaluation pipelines for feature-attribution maps.
//
// Subcommands: toy (GP dataset generator), impute (single imputation run),
// evaluate (full curve/debias/ranking pipeline from a JSON config),
// mi-check (information-theory identity residuals), bench (imputation
// runtime table).
//
// Exit codes: 0 ok, 2 usage or config error, 3 numerical failure, 4 I/O.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "road/classifiers.hpp"
#include "road/errors.hpp"
#include "road/evaluation.hpp"
#include "road/imputation.hpp"
#include "road/infotheory.hpp"
#include "road/masking.hpp"
#include "road/rng.hpp"
#include "road/tensor_io.hpp"
#include "road/toyworld.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace road;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::uint64_t seed_fallback() {
  if (const char* env = std::getenv("ROAD_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InvalidConfig("ROAD_SEED is not an unsigned integer");
    }
  }
  return 0;
}

RemovalOrder order_from_name(const std::string& name) {
  if (name == "morf") return RemovalOrder::MoRF;
  if (name == "lerf") return RemovalOrder::LeRF;
  throw InvalidConfig("unknown order: " + name + " (expected morf or lerf)");
}

std::string fmt6(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// toy

struct ToyArgs {
  std::uint64_t seed = 0;
  bool seed_set = false;
  int n = 300;
  int height = 28, width = 28;
  double kernel_width = 0.2;
  double amplitude = GPDatasetConfig{}.mean_amplitude;
  double frequency = 2.5;
  std::string out;
};

int cmd_toy(const ToyArgs& a) {
  GPDatasetConfig cfg;
  cfg.height = a.height;
  cfg.width = a.width;
  cfg.kernel_width_fraction = a.kernel_width;
  cfg.n_samples = a.n;
  cfg.mean_amplitude = a.amplitude;
  cfg.mean_frequency = a.frequency;
  cfg.seed = a.seed_set ? a.seed : seed_fallback();
  cfg.validate();

  Dataset ds = sample_dataset(cfg);
  fs::create_directories(a.out);
  save_dataset(ds, a.out);
  for (OrderingKind kind : {OrderingKind::True, OrderingKind::Worst, OrderingKind::Rand,
                            OrderingKind::Semi, OrderingKind::Gauss}) {
    SaliencyMap s = handcrafted_ordering(kind, cfg, cfg.seed);
    write_tensor(s, fs::path(a.out) / ("saliency_" + std::string(ordering_name(kind)) + ".npy"));
  }

  json echo{{"seed", cfg.seed},
            {"n", cfg.n_samples},
            {"height", cfg.height},
            {"width", cfg.width},
            {"kernel_width_fraction", cfg.kernel_width_fraction},
            {"mean_amplitude", cfg.mean_amplitude},
            {"mean_frequency", cfg.mean_frequency},
            {"out", a.out}};
  std::cout << echo.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// impute

struct ImputeArgs {
  std::string data;
  std::string saliency;
  std::string order = "morf";
  double eta = 0.5;
  std::string strategy = "noisy-linear";
  std::vector<double> value;  // fixed fill; empty -> dataset mean
  double noise = 0.01;
  std::string noise_mode = "range-fraction";
  double tol = 1e-8;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
};

ImputationConfig make_imputation(const std::string& strategy, const std::vector<double>& value,
                                 double noise, const std::string& noise_mode, double tol,
                                 std::uint64_t seed) {
  ImputationConfig cfg;
  cfg.rng_seed = seed;
  if (strategy == "fixed") {
    cfg.strategy = FixedStrategy{value};
  } else if (strategy == "noisy-linear") {
    NoisyLinearStrategy lin;
    lin.noise_scale = noise;
    lin.solver_tol = tol;
    if (noise_mode == "range-fraction")
      lin.noise_scale_mode = NoiseScaleMode::RangeFraction;
    else if (noise_mode == "sigma")
      lin.noise_scale_mode = NoiseScaleMode::Sigma;
    else
      throw InvalidConfig("unknown noise mode: " + noise_mode);
    cfg.strategy = lin;
  } else {
    throw InvalidConfig("unknown strategy: " + strategy);
  }
  return cfg;
}

int cmd_impute(const ImputeArgs& a) {
  if (!fs::exists(a.saliency)) throw InvalidConfig("saliency file not found: " + a.saliency);
  Dataset ds = load_dataset(a.data);
  std::vector<SaliencyMap> maps = read_saliency_stack(a.saliency);
  if (maps.size() != 1 && maps.size() != ds.images.size())
    throw InvalidConfig("saliency stack must hold 1 or N maps");

  RemovalOrder order = order_from_name(a.order);
  Part part = order == RemovalOrder::MoRF ? Part::Low : Part::High;
  std::uint64_t seed = a.seed_set ? a.seed : seed_fallback();
  ImputationConfig cfg =
      make_imputation(a.strategy, a.value, a.noise, a.noise_mode, a.tol, seed);

  std::vector<std::vector<int>> perms;
  for (const auto& m : maps) perms.push_back(rank_pixels(m));

  Dataset out = ds;
  for (std::size_t i = 0; i < ds.images.size(); ++i) {
    const ImageTensor& img = ds.images[i];
    int k = k_from_fraction(a.eta, img.height, img.width);
    BinaryMask mask = topk_mask(perms[maps.size() == 1 ? 0 : i], img.height, img.width, k);
    if (const auto* fixed = std::get_if<FixedStrategy>(&cfg.strategy)) {
      const std::vector<double>& v = fixed->value.empty() ? ds.per_channel_mean : fixed->value;
      out.images[i] = impute_fixed(img, mask, part, v);
    } else {
      Rng rng = Rng::derive(seed, "impute", i);
      out.images[i] = impute_noisy_linear(img, mask, part,
                                          std::get<NoisyLinearStrategy>(cfg.strategy), rng,
                                          ds.per_channel_mean);
    }
  }
  fs::create_directories(a.out);
  save_dataset(out, a.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct SvgPlot {
  static void write(const fs::path& path, const std::map<std::string, EvaluationCurve>& curves);
};

void SvgPlot::write(const fs::path& path, const std::map<std::string, EvaluationCurve>& curves) {
  const int W = 640, H = 420, ml = 56, mr = 16, mt = 16, mb = 40;
  const double px = W - ml - mr, py = H - mt - mb;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<line x1='" << ml << "' y1='" << mt + py << "' x2='" << ml + px << "' y2='" << mt + py
      << "' stroke='black'/>\n"
      << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << mt + py
      << "' stroke='black'/>\n";
  for (int i = 0; i <= 5; ++i) {
    double f = i / 5.0;
    svg << "<text x='" << ml + f * px << "' y='" << H - 12
        << "' font-size='12' text-anchor='middle'>" << fmt6(f) << "</text>\n";
    svg << "<text x='" << ml - 8 << "' y='" << mt + (1 - f) * py + 4
        << "' font-size='12' text-anchor='end'>" << fmt6(f) << "</text>\n";
  }
  int ci = 0;
  int legend_y = mt + 14;
  for (const auto& [name, curve] : curves) {
    const char* color = colors[ci++ % 8];
    std::ostringstream pts;
    for (std::size_t i = 0; i < curve.eta.size(); ++i)
      pts << ml + curve.eta[i] * px << "," << mt + (1.0 - curve.acc_mean[i]) * py << " ";
    svg << "<polyline fill='none' stroke='" << color << "' stroke-width='2' points='"
        << pts.str() << "'/>\n";
    svg << "<text x='" << ml + 10 << "' y='" << legend_y << "' font-size='12' fill='" << color
        << "'>" << name << "</text>\n";
    legend_y += 16;
  }
  svg << "</svg>\n";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << svg.str();
}

TrainConfig train_from_json(const json& j) {
  TrainConfig t;
  t.learning_rate = j.value("learning_rate", t.learning_rate);
  t.l2 = j.value("l2", t.l2);
  t.epochs = j.value("epochs", t.epochs);
  t.seed = j.value("seed", t.seed);
  return t;
}

ImputationConfig imputation_from_json(const json& j, std::uint64_t seed) {
  std::string strategy = j.value("strategy", std::string("noisy-linear"));
  std::vector<double> value = j.value("value", std::vector<double>{});
  double noise = j.value("noise_scale", 0.01);
  std::string mode = j.value("noise_mode", std::string("range-fraction"));
  double tol = j.value("solver_tol", 1e-8);
  return make_imputation(strategy, value, noise, mode, tol, j.value("seed", seed));
}

struct EvaluateOutputs {
  std::vector<fs::path> written;

  void track(const fs::path& p) { written.push_back(p); }
  void remove_all() {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
  }
};

int cmd_evaluate(const std::string& config_path, bool want_svg_flag, int jobs) {
  std::ifstream in(config_path);
  if (!in) throw IoError("cannot read config: " + config_path);
  json cfg = json::parse(in);

  std::uint64_t seed = cfg.value("seed", seed_fallback());
  fs::path out_dir = cfg.value("output_dir", std::string("road_out"));
  bool want_svg = want_svg_flag || cfg.value("svg", false);

  // dataset: either a tensor_io directory or an inline toy config
  Dataset ds;
  GPDatasetConfig toy_cfg;
  toy_cfg.seed = seed;
  bool have_toy_cfg = false;
  if (cfg.contains("dataset") && cfg["dataset"].contains("path")) {
    ds = load_dataset(cfg["dataset"]["path"].get<std::string>());
  } else if (cfg.contains("dataset") && cfg["dataset"].contains("toy")) {
    const json& t = cfg["dataset"]["toy"];
    toy_cfg.height = t.value("height", toy_cfg.height);
    toy_cfg.width = t.value("width", toy_cfg.width);
    toy_cfg.kernel_width_fraction = t.value("kernel_width_fraction", toy_cfg.kernel_width_fraction);
    toy_cfg.n_samples = t.value("n", toy_cfg.n_samples);
    toy_cfg.mean_amplitude = t.value("mean_amplitude", toy_cfg.mean_amplitude);
    toy_cfg.mean_frequency = t.value("mean_frequency", toy_cfg.mean_frequency);
    toy_cfg.seed = t.value("seed", seed);
    have_toy_cfg = true;
    ds = sample_dataset(toy_cfg);
  } else {
    throw InvalidConfig("config needs dataset.path or dataset.toy");
  }
  if (!have_toy_cfg) {
    toy_cfg.height = ds.images.at(0).height;
    toy_cfg.width = ds.images.at(0).width;
  }

  // saliency sources: "ordering:<kind>" or "file:<path>" (or a bare path)
  std::map<std::string, SaliencySource> methods;
  if (!cfg.contains("saliency") || cfg["saliency"].empty())
    throw InvalidConfig("config needs at least one saliency source");
  for (const auto& [name, entry] : cfg["saliency"].items()) {
    std::string s = entry.get<std::string>();
    if (s.rfind("ordering:", 0) == 0) {
      OrderingKind kind = ordering_from_name(s.substr(9));
      methods[name] = {handcrafted_ordering(kind, toy_cfg, toy_cfg.seed)};
    } else {
      std::string path = s.rfind("file:", 0) == 0 ? s.substr(5) : s;
      methods[name] = read_saliency_stack(path);
    }
  }

  if (!cfg.contains("strategies") || cfg["strategies"].empty())
    throw InvalidConfig("config needs at least one strategy");

  fs::create_directories(out_dir);
  EvaluateOutputs outputs;
  try {
    json report;
    // rank rows per strategy (eta=0 rows excluded), for strategy-level Spearman
    std::map<std::string, std::vector<double>> concat_ranks;

    for (const json& sj : cfg["strategies"]) {
      StrategyConfig sc;
      sc.name = sj.value("name", std::string("strategy"));
      sc.order = order_from_name(sj.value("order", std::string("morf")));
      sc.retrain = sj.value("retrain", true);
      sc.imputation = imputation_from_json(sj.value("imputation", json::object()), seed);
      if (sj.contains("eta_grid")) sc.eta_grid = sj["eta_grid"].get<std::vector<double>>();
      sc.n_models = sj.value("n_models", sc.n_models);
      sc.train = train_from_json(sj.value("train", json::object()));
      if (sc.train.seed == 0) sc.train.seed = seed;
      sc.validate();

      // gamma estimation needs a well-conditioned empirical covariance
      const int d_pixels = ds.images.at(0).height * ds.images.at(0).width;
      const bool debias = cfg.value("debias", true) &&
                          ds.images.size() >= 2 * static_cast<std::size_t>(d_pixels);

      // fan the independent per-method curves out over `jobs` workers; each
      // task writes its own slot, so the merged result is order-independent
      std::vector<std::pair<std::string, const SaliencySource*>> tasks;
      for (const auto& [mname, source] : methods) tasks.emplace_back(mname, &source);
      std::vector<EvaluationCurve> task_curves(tasks.size());
      std::vector<BiasIndicatorSeries> task_gammas(tasks.size());
      {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
          for (std::size_t t = next.fetch_add(1); t < tasks.size();
               t = next.fetch_add(1)) {
            try {
              StrategyConfig named = sc;
              named.name = tasks[t].first;
              task_curves[t] = run_curve(ds, *tasks[t].second, named);
              if (debias) task_gammas[t] = estimate_gamma(ds, *tasks[t].second, named);
            } catch (...) {
              std::lock_guard<std::mutex> lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        };
        std::size_t n_workers = std::min<std::size_t>(std::max(jobs, 1), tasks.size());
        std::vector<std::thread> pool;
        for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
      }

      std::map<std::string, EvaluationCurve> curves;
      std::map<std::string, EvaluationCurve> debiased;
      std::vector<EvaluationCurve> gamma_as_curves;
      for (std::size_t t = 0; t < tasks.size(); ++t) {
        const std::string& mname = tasks[t].first;
        const EvaluationCurve& curve = task_curves[t];
        curves[mname] = curve;
        if (debias) {
          double baseline = sc.order == RemovalOrder::MoRF ? curve.acc_mean.front()
                                                           : curve.acc_mean.back();
          const BiasIndicatorSeries& gamma = task_gammas[t];
          debiased[mname] = debias_curve(curve, baseline, gamma, sc.order).curve;
          debiased[mname].name = mname;
          gamma_as_curves.push_back(
              {mname, gamma.eta, gamma.gamma,
               std::vector<double>(gamma.eta.size(), 0.0)});
        }
      }

      std::vector<EvaluationCurve> curve_list, debias_list;
      for (const auto& [mname, c] : curves) curve_list.push_back(c);
      for (const auto& [mname, c] : debiased) debias_list.push_back(c);

      fs::path curves_path = out_dir / ("curves_" + sc.name + ".csv");
      write_curve_csv(curve_list, curves_path);
      outputs.track(curves_path);
      if (debias) {
        fs::path gamma_path = out_dir / ("gamma_" + sc.name + ".csv");
        fs::path debias_path = out_dir / ("debiased_" + sc.name + ".csv");
        write_curve_csv(gamma_as_curves, gamma_path);
        outputs.track(gamma_path);
        write_curve_csv(debias_list, debias_path);
        outputs.track(debias_path);
      }
      if (want_svg) {
        fs::path svg_path = out_dir / ("curves_" + sc.name + ".svg");
        SvgPlot::write(svg_path, curves);
        outputs.track(svg_path);
      }

      json strategy_report;
      for (const auto& [mname, c] : curves) strategy_report["auc"][mname] = auc(c);
      if (curves.size() >= 2) {
        RankMatrix rm = strategy_ranking(curves, sc.order);
        json ranks = json::object();
        std::vector<double> concat;
        for (std::size_t i = 0; i < rm.eta.size(); ++i) {
          json row = json::object();
          for (std::size_t m = 0; m < rm.methods.size(); ++m)
            row[rm.methods[m]] = rm.ranks[i][m];
          ranks[fmt6(rm.eta[i])] = row;
          // MoRF grids count pixels removed, LeRF grids pixels kept, so for a
          // cross-order Spearman the comparable blocks are eta vs 1-eta: walk
          // LeRF grids in reverse before concatenating
          std::size_t e = sc.order == RemovalOrder::MoRF ? i : rm.eta.size() - 1 - i;
          if (rm.eta[e] != 0.0)
            concat.insert(concat.end(), rm.ranks[e].begin(), rm.ranks[e].end());
        }
        strategy_report["ranks"] = ranks;
        concat_ranks[sc.name] = concat;
      }
      report["strategies"][sc.name] = strategy_report;
    }

    if (concat_ranks.size() >= 2) {
      for (auto it = concat_ranks.begin(); it != concat_ranks.end(); ++it)
        for (auto jt = std::next(it); jt != concat_ranks.end(); ++jt)
          if (it->second.size() == jt->second.size())
            report["spearman"][it->first + "|" + jt->first] =
                spearman(it->second, jt->second);
    }

    fs::path report_path = out_dir / "rankings.json";
    {
      std::ofstream rout(report_path);
      if (!rout) throw IoError("cannot write " + report_path.string());
      rout << report.dump(2) << "\n";
    }
    outputs.track(report_path);

    for (const auto& p : outputs.written)
      if (!fs::exists(p)) throw IoError("declared output missing: " + p.string());
  } catch (...) {
    outputs.remove_all();
    throw;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// mi-check

int cmd_mi_check(int n_joints, std::uint64_t seed) {
  Rng rng = Rng::derive(seed, "mi-check");
  double max_identity = 0.0, max_consistency = 0.0, max_bound = 0.0, max_lemma = 0.0;
  for (int t = 0; t < n_joints; ++t) {
    int ca = 2 + static_cast<int>(rng.uniform() * 3);
    int cb = 2 + static_cast<int>(rng.uniform() * 3);
    int cc = 2 + static_cast<int>(rng.uniform() * 3);
    DiscreteJoint j = random_joint({ca, cb, cc}, {"C", "Xp", "M"}, rng);
    LeakageDecomposition d = leakage_decomposition(j);
    max_identity = std::max(max_identity,
                            std::abs(d.outcome - (d.feature + d.mask - d.mitigator)));
    double lhs = conditional_mutual_information(j, {0}, {1}, {2}) - mutual_information(j, {0}, {1});
    double rhs = conditional_mutual_information(j, {0}, {2}, {1}) - mutual_information(j, {0}, {2});
    max_consistency = std::max(max_consistency, std::abs(lhs - rhs));

    DiscreteJoint b = random_equal_prior_joint(2 + static_cast<int>(rng.uniform() * 6), rng);
    double mi = mutual_information(b, {0}, {1});
    double acc = bayes_accuracy(b);
    auto [lo, hi] = accuracy_bounds(mi);
    max_bound = std::max({max_bound, lo - acc, acc - hi});

    // I(C;X) = sum_x p(x) (1 - H2(acc(C|x))) for binary equal-prior C
    double lemma = 0.0;
    for (int x = 0; x < b.cardinalities[1]; ++x) {
      double p0 = b.probs[x], p1 = b.probs[b.cardinalities[1] + x];
      double p = p0 + p1;
      if (p > 0.0) lemma += p * (1.0 - binary_entropy(std::max(p0, p1) / p));
    }
    max_lemma = std::max(max_lemma, std::abs(mi - lemma));
  }
  std::cout << "joints: " << n_joints << "\n"
            << "max |outcome - (feature + mask - mitigator)|: " << max_identity << "\n"
            << "max multi-information inconsistency: " << max_consistency << "\n"
            << "max accuracy-bound violation: " << max_bound << "\n"
            << "max accuracy-lemma residual: " << max_lemma << "\n";
  bool ok = max_identity < 1e-9 && max_consistency < 1e-9 && max_bound < 1e-9 &&
            max_lemma < 1e-9;
  std::cout << (ok ? "OK" : "FAIL") << "\n";
  return ok ? kExitOk : kExitNumerical;
}

// ---------------------------------------------------------------------------
// bench

int cmd_bench(const std::vector<int>& sizes, const std::vector<double>& fractions,
              int reps, std::uint64_t seed) {
  NoisyLinearStrategy lin;
  auto rows = runtime_benchmark(lin, sizes, fractions, reps, seed);
  std::cout << "size,fraction,median_seconds\n";
  for (const auto& r : rows)
    std::cout << r.grid_size << "," << fmt6(r.fraction) << "," << fmt6(r.median_seconds)
              << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pixel-removal evaluation for feature-attribution maps"};
  app.require_subcommand(1);

  ToyArgs toy;
  CLI::App* toy_cmd = app.add_subcommand("toy", "Generate the GP toy dataset and fixed orderings");
  CLI::Option* toy_seed = toy_cmd->add_option("--seed", toy.seed, "RNG seed (ROAD_SEED fallback)");
  toy_cmd->add_option("--n", toy.n, "number of samples")->check(CLI::PositiveNumber);
  toy_cmd->add_option("--height", toy.height)->check(CLI::PositiveNumber);
  toy_cmd->add_option("--width", toy.width)->check(CLI::PositiveNumber);
  toy_cmd->add_option("--kernel-width", toy.kernel_width, "lengthscale / width");
  toy_cmd->add_option("--amplitude", toy.amplitude, "class-mean amplitude");
  toy_cmd->add_option("--frequency", toy.frequency, "class-mean frequency");
  toy_cmd->add_option("--out", toy.out, "output directory")->required();

  ImputeArgs imp;
  CLI::App* imp_cmd = app.add_subcommand("impute", "Impute one (saliency, order, eta, strategy) tuple");
  imp_cmd->add_option("--data", imp.data, "dataset directory")->required();
  imp_cmd->add_option("--saliency", imp.saliency, "saliency NPY (1 or N maps)")->required();
  imp_cmd->add_option("--order", imp.order, "morf | lerf");
  imp_cmd->add_option("--eta", imp.eta, "removal (morf) / keep (lerf) fraction")
      ->check(CLI::Range(0.0, 1.0));
  imp_cmd->add_option("--strategy", imp.strategy, "fixed | noisy-linear");
  imp_cmd->add_option("--value", imp.value, "fixed fill per channel (default dataset mean)");
  imp_cmd->add_option("--noise", imp.noise, "noise scale");
  imp_cmd->add_option("--noise-mode", imp.noise_mode, "range-fraction | sigma");
  imp_cmd->add_option("--tol", imp.tol, "solver tolerance");
  CLI::Option* imp_seed = imp_cmd->add_option("--seed", imp.seed, "RNG seed (ROAD_SEED fallback)");
  imp_cmd->add_option("--out", imp.out, "output directory")->required();

  std::string eval_config;
  bool eval_svg = false;
  int jobs = 1;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Run the full evaluation pipeline from JSON");
  eval_cmd->add_option("--config", eval_config, "RunConfig JSON path")->required();
  eval_cmd->add_flag("--svg", eval_svg, "also write SVG plots");
  eval_cmd->add_option("--jobs", jobs, "evaluation fan-out (results are order-independent)")
      ->check(CLI::PositiveNumber);

  int mi_joints = 1000;
  std::uint64_t mi_seed = 0;
  bool mi_seed_set = false;
  CLI::App* mi_cmd = app.add_subcommand("mi-check", "Verify information-theoretic identities");
  mi_cmd->add_option("--joints", mi_joints, "number of random joints")->check(CLI::PositiveNumber);
  CLI::Option* mi_seed_opt = mi_cmd->add_option("--seed", mi_seed, "RNG seed");

  std::vector<int> bench_sizes{28};
  std::vector<double> bench_fractions{0.1, 0.3, 0.5, 0.7, 0.9};
  int bench_reps = 5;
  std::uint64_t bench_seed = 0;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Time noisy-linear imputation");
  bench_cmd->add_option("--sizes", bench_sizes, "grid sizes");
  bench_cmd->add_option("--fractions", bench_fractions, "removal fractions");
  bench_cmd->add_option("--reps", bench_reps, "repetitions per cell")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench_seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    toy.seed_set = toy_seed->count() > 0;
    imp.seed_set = imp_seed->count() > 0;
    mi_seed_set = mi_seed_opt->count() > 0;
    if (toy_cmd->parsed()) return cmd_toy(toy);
    if (imp_cmd->parsed()) return cmd_impute(imp);
    if (eval_cmd->parsed()) return cmd_evaluate(eval_config, eval_svg, jobs);
    if (mi_cmd->parsed()) return cmd_mi_check(mi_joints, mi_seed_set ? mi_seed : seed_fallback());
    if (bench_cmd->parsed()) return cmd_bench(bench_sizes, bench_fractions, bench_reps, bench_seed);
  } catch (const InvalidConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

#include "gsdie/commands.hpp"

#include "gsdie/bench.hpp"
#include "gsdie/errors.hpp"
#include "gsdie/lowrank.hpp"
#include "gsdie/oracle.hpp"
#include "gsdie/rng.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace gsdie {

namespace {

namespace fs = std::filesystem;

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write to " + path.string());
  out.precision(17);
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir);
}

}  // namespace

PropagatorConfig RunConfig::propagator() const {
  PropagatorConfig p;
  p.scheme = exp_scheme_from_string(scheme);
  p.k = k;
  p.k_b = k_b;
  p.b_method = b_method_from_string(b_method);
  p.simpson_m = simpson_m;
  p.tau = tau;
  p.validate();
  return p;
}

SdieParams RunConfig::sdie_params() const {
  SdieParams s;
  s.eps = eps;
  s.tau = tau;
  s.delta = delta;
  s.max_iter = max_iter;
  s.validate();
  return s;
}

Normalization RunConfig::norm() const {
  if (normalization == "symmetric") return Normalization::symmetric;
  if (normalization == "random_walk") return Normalization::random_walk;
  throw InputError("normalization must be 'symmetric' or 'random_walk', got " +
                   normalization);
}

PixelScale RunConfig::scale() const {
  if (pixel_scale == "byte") return PixelScale::byte;
  if (pixel_scale == "unit") return PixelScale::unit;
  throw InputError("pixel-scale must be 'byte' or 'unit', got " + pixel_scale);
}

namespace {

// Flat key=value config reader; '#' starts a comment. CLI flags override the
// file because the file is applied before the command line is parsed.
void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto as_double = [&] { return std::stod(value); };
  const auto as_int = [&] { return std::stoi(value); };
  if (key == "eps") cfg.eps = as_double();
  else if (key == "tau") cfg.tau = as_double();
  else if (key == "delta") cfg.delta = as_double();
  else if (key == "max-iter") cfg.max_iter = as_int();
  else if (key == "scheme") cfg.scheme = value;
  else if (key == "k") cfg.k = as_int();
  else if (key == "k-b") cfg.k_b = as_int();
  else if (key == "b-method") cfg.b_method = value;
  else if (key == "simpson-m") cfg.simpson_m = as_int();
  else if (key == "mu-hat") cfg.mu_hat = as_double();
  else if (key == "sigma") cfg.sigma = as_double();
  else if (key == "rank") cfg.rank = as_int();
  else if (key == "normalization") cfg.normalization = value;
  else if (key == "pixel-scale") cfg.pixel_scale = value;
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "ref") cfg.ref_image = value;
  else if (key == "labels") cfg.ref_labels = value;
  else if (key == "target") cfg.target_image = value;
  else if (key == "ground-truth") cfg.ground_truth = value;
  else if (key == "out") cfg.out_dir = value;
  else throw InputError("config: unknown key '" + key + "'");
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
      line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start])))
      ++start;
    if (start >= line.size()) continue;
    const auto eq = line.find('=', start);
    if (eq == std::string::npos)
      throw InputError("config: expected key=value at " + path + ":" +
                       std::to_string(line_no));
    try {
      apply_config_line(cfg, line.substr(start, eq - start), line.substr(eq + 1));
    } catch (const InputError&) {
      throw;
    } catch (const std::exception&) {
      throw InputError("config: bad value at " + path + ":" + std::to_string(line_no));
    }
  }
}

}  // namespace

std::string RunConfig::to_key_values() const {
  std::ostringstream out;
  out.precision(17);
  out << "eps=" << eps << "\n"
      << "tau=" << tau << "\n"
      << "delta=" << delta << "\n"
      << "max-iter=" << max_iter << "\n"
      << "scheme=" << scheme << "\n"
      << "k=" << k << "\n"
      << "k-b=" << k_b << "\n"
      << "b-method=" << b_method << "\n"
      << "simpson-m=" << simpson_m << "\n"
      << "mu-hat=" << mu_hat << "\n"
      << "sigma=" << sigma << "\n"
      << "rank=" << rank << "\n"
      << "normalization=" << normalization << "\n"
      << "pixel-scale=" << pixel_scale << "\n"
      << "seed=" << seed << "\n"
      << "ref=" << ref_image << "\n"
      << "labels=" << ref_labels << "\n"
      << "target=" << target_image << "\n";
  if (!ground_truth.empty()) out << "ground-truth=" << ground_truth << "\n";
  out << "out=" << out_dir << "\n";
  return out.str();
}

SegmentResult run_segment(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const ImageTensor reference = load_image_spec(cfg.ref_image);
  const ImageTensor labels = load_labels_spec(cfg.ref_labels);
  const ImageTensor target = load_image_spec(cfg.target_image);

  Problem problem =
      assemble_problem(reference, labels, target, cfg.mu_hat, cfg.sigma, cfg.scale());
  const LowRankLaplacian lap = nystrom_qr(problem.weight, problem.n, problem.z_indices,
                                          cfg.rank, cfg.seed, cfg.norm());

  SdieOptions options;
  options.record_trace = cfg.trace;
  if (cfg.trace) {
    options.record_h = true;
    options.v_weights = cfg.norm() == Normalization::random_walk
                            ? lap.d_hat
                            : Vector::Ones(problem.n);
  }
  SegmentResult result;
  result.state = run_sdie(problem.u0, cfg.sdie_params(), cfg.propagator(), lap,
                          problem.fid, options);
  result.n_ref = problem.n_ref;
  result.n_target = problem.n_target;
  result.height = target.height;
  result.width = target.width;
  result.mask.resize(static_cast<std::size_t>(problem.n_target));
  for (Index i = 0; i < problem.n_target; ++i)
    result.mask[static_cast<std::size_t>(i)] =
        result.state.u(problem.n_ref + i) >= 0.5 ? 1 : 0;

  if (!cfg.ground_truth.empty()) {
    const ImageTensor truth = load_labels_spec(cfg.ground_truth);
    if (truth.pixels() != problem.n_target)
      throw InputError("ground truth dimensions do not match the target image");
    Index wrong = 0;
    for (Index i = 0; i < problem.n_target; ++i) {
      const double t = truth.data[static_cast<std::size_t>(i)];
      if (t != 0.0 && t != 1.0)
        throw InputError("ground truth mask must be binary");
      wrong += (result.mask[static_cast<std::size_t>(i)] != 0) != (t == 1.0) ? 1 : 0;
    }
    result.error = static_cast<double>(wrong) / static_cast<double>(problem.n_target);
  }
  result.seconds = seconds_since(t0);
  return result;
}

MonteCarloResult run_montecarlo(const RunConfig& cfg, int repeats) {
  if (repeats < 2) throw InputError("montecarlo needs at least 2 repeats");
  MonteCarloResult mc;
  for (int r = 0; r < repeats; ++r) {
    RunConfig run_cfg = cfg;
    run_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
    run_cfg.trace = false;
    mc.runs.push_back(run_segment(run_cfg));
  }
  const std::size_t n = mc.runs.front().mask.size();
  mc.height = mc.runs.front().height;
  mc.width = mc.runs.front().width;
  mc.mean.assign(n, 0.0);
  mc.std.assign(n, 0.0);
  for (const auto& run : mc.runs)
    for (std::size_t i = 0; i < n; ++i) mc.mean[i] += run.mask[i];
  for (double& m : mc.mean) m /= repeats;
  for (const auto& run : mc.runs)
    for (std::size_t i = 0; i < n; ++i) {
      const double d = run.mask[i] - mc.mean[i];
      mc.std[i] += d * d;
    }
  for (double& s : mc.std) s = std::sqrt(s / repeats);
  return mc;
}

namespace {

ImageTensor mask_to_image(const std::vector<double>& values, int height, int width,
                          double scale) {
  ImageTensor img = ImageTensor::create(height, width, 1);
  for (std::size_t i = 0; i < values.size(); ++i)
    img.data[i] = std::clamp(values[i] * scale, 0.0, 1.0);
  return img;
}

ImageTensor weighted_target(const ImageTensor& target, const std::vector<double>& w,
                            double scale) {
  ImageTensor img = target;
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      for (int ch = 0; ch < img.channels; ++ch)
        img.at(r, c, ch) *=
            std::clamp(w[static_cast<std::size_t>(r) * img.width + c] * scale, 0.0, 1.0);
  return img;
}

void write_metadata(const fs::path& path, const RunConfig& cfg,
                    const std::vector<std::string>& results) {
  std::ofstream out = open_out(path);
  out << "# reproducible run configuration; pass via --config\n";
  out << cfg.to_key_values();
  for (const auto& line : results) out << "# result: " << line << "\n";
}

void write_trace_csv(const fs::path& path, const LabelState& state) {
  std::ofstream out = open_out(path);
  out << "iter,H,step_norm,seconds\n";
  for (const auto& t : state.trace)
    out << t.iter << "," << t.h << "," << t.step_norm << "," << t.seconds << "\n";
}

void write_label_vector(const fs::path& path, const Vector& u) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write to " + path.string());
  out.write(reinterpret_cast<const char*>(u.data()),
            static_cast<std::streamsize>(sizeof(double)) * u.size());
}

}  // namespace

int cmd_segment(const RunConfig& cfg) {
  ensure_dir(cfg.out_dir);
  const SegmentResult result = run_segment(cfg);
  const fs::path dir(cfg.out_dir);

  std::vector<double> mask(result.mask.begin(), result.mask.end());
  write_png(mask_to_image(mask, result.height, result.width, 1.0),
            (dir / "label.png").string());
  const ImageTensor target = load_image_spec(cfg.target_image);
  write_png(weighted_target(target, mask, 1.0), (dir / "masked.png").string());
  write_label_vector(dir / "label_vector.f64",
                     result.state.u.tail(result.n_target));
  if (cfg.trace) write_trace_csv(dir / "trace.csv", result.state);

  std::vector<std::string> meta;
  meta.push_back("iterations=" + std::to_string(result.state.iterations));
  meta.push_back(std::string("converged=") + (result.state.converged ? "1" : "0"));
  meta.push_back("seconds=" + std::to_string(result.seconds));
  if (result.error)
    meta.push_back("relative_segmentation_error=" + std::to_string(*result.error));
  write_metadata(dir / "run.meta", cfg, meta);

  std::cout << "segment: " << result.state.iterations << " iterations in "
            << result.seconds << " s";
  if (result.error) std::cout << ", relative error " << *result.error * 100.0 << "%";
  std::cout << "\n";
  if (!result.state.converged)
    std::cerr << "warning: max-iter reached before the termination criterion\n";
  return 0;
}

int cmd_montecarlo(const RunConfig& cfg, int repeats) {
  ensure_dir(cfg.out_dir);
  const MonteCarloResult mc = run_montecarlo(cfg, repeats);
  const fs::path dir(cfg.out_dir);

  // Mean maps use the label range directly; std maps are stretched by 2x
  // (the pointwise std of a binary label is at most 1/2).
  write_png(mask_to_image(mc.mean, mc.height, mc.width, 1.0),
            (dir / "mean.png").string());
  write_png(mask_to_image(mc.std, mc.height, mc.width, 2.0),
            (dir / "std.png").string());
  const ImageTensor target = load_image_spec(cfg.target_image);
  write_png(weighted_target(target, mc.mean, 1.0), (dir / "mean_masked.png").string());
  write_png(weighted_target(target, mc.std, 2.0), (dir / "std_masked.png").string());

  std::ofstream csv = open_out(dir / "runs.csv");
  csv << "run,seed,error,iterations,seconds\n";
  for (std::size_t r = 0; r < mc.runs.size(); ++r) {
    csv << r << "," << derive_seed(cfg.seed, r) << ",";
    if (mc.runs[r].error)
      csv << *mc.runs[r].error;
    else
      csv << "nan";
    csv << "," << mc.runs[r].state.iterations << "," << mc.runs[r].seconds << "\n";
  }

  double max_std = 0.0;
  for (double s : mc.std) max_std = std::max(max_std, s);
  std::vector<std::string> meta;
  meta.push_back("repeats=" + std::to_string(repeats));
  meta.push_back("max_pointwise_std=" + std::to_string(max_std));
  write_metadata(dir / "run.meta", cfg, meta);
  std::cout << "montecarlo: " << repeats << " runs, max pointwise std " << max_std
            << "\n";
  return 0;
}

int cmd_bench_lowrank(const std::string& image_spec, const std::vector<Index>& ranks,
                      int repeats, double sigma, const std::string& pixel_scale,
                      std::uint64_t seed, const std::string& out_dir) {
  ensure_dir(out_dir);
  const ImageTensor img = load_image_spec(image_spec);
  if (img.pixels() > 8192)
    throw InputError(
        "bench-lowrank needs the dense Laplacian; images are capped at 8192 "
        "pixels (e.g. builtin:80)");
  const PixelScale scale =
      pixel_scale == "unit" ? PixelScale::unit : PixelScale::byte;
  const BenchGraph bg = bench_graph_from_image(img, sigma, scale);
  const Matrix delta_s = materialize_delta_s(bg.weight, bg.n);
  const double fro2 = delta_s.squaredNorm();
  const std::vector<double> svd_errors = truncated_svd_errors(delta_s, ranks);

  std::ofstream csv = open_out(fs::path(out_dir) / "bench_lowrank.csv");
  csv << "method,K,seed,rel_frobenius_error,wall_time_seconds\n";
  for (std::size_t ki = 0; ki < ranks.size(); ++ki) {
    csv << "truncated_svd," << ranks[ki] << ",0," << svd_errors[ki] << ",0\n";
    for (int r = 0; r < repeats; ++r) {
      const std::uint64_t run_seed = derive_seed(seed, ki * 1000003ULL + r);
      const PairedNystromError pair =
          bench_nystrom_pair(bg, delta_s, fro2, ranks[ki], run_seed);
      csv << "nystrom_qr," << ranks[ki] << "," << run_seed << "," << pair.qr_error
          << "," << pair.qr_seconds << "\n";
      csv << "nystrom_classic," << ranks[ki] << "," << run_seed << ","
          << pair.classic_error << "," << pair.classic_seconds << "\n";
    }
  }
  std::cout << "bench-lowrank: wrote " << out_dir << "/bench_lowrank.csv\n";
  return 0;
}

int cmd_bench_expm(Index n, double tau, const std::vector<int>& substeps,
                   const std::string& rank_mode, std::uint64_t seed,
                   const std::string& out_dir) {
  ensure_dir(out_dir);
  if (n > 512) throw InputError("bench-expm needs the dense oracle; n is capped at 512");
  const bool full_rank = rank_mode != "sqrt";
  const ExpmBenchResult result = bench_expm(n, tau, substeps, full_rank, seed);
  std::ofstream csv = open_out(fs::path(out_dir) / "bench_expm.csv");
  csv << "scheme,k,K,rel_l2_error,seconds\n";
  for (const auto& row : result.rows)
    csv << row.scheme << "," << row.k << "," << row.rank << "," << row.rel_l2_error
        << "," << row.seconds << "\n";
  std::cout << "bench-expm: fitted log-log slopes (excluding the precision floor): "
            << "euler " << result.slope_euler << ", strang " << result.slope_strang
            << ", yoshida " << result.slope_yoshida << "\n";
  return 0;
}

int cmd_bench_b(Index n, const std::vector<double>& taus,
                const std::vector<Index>& ranks, int k_b, int simpson_m,
                std::uint64_t seed, const std::string& out_dir) {
  ensure_dir(out_dir);
  if (n > 512) throw InputError("bench-b needs the dense oracle; n is capped at 512");
  const std::vector<BBenchRow> rows = bench_b(n, taus, ranks, k_b, simpson_m, seed);
  std::ofstream csv = open_out(fs::path(out_dir) / "bench_b.csv");
  csv << "b_method,param,K,tau,rel_l2_error\n";
  for (const auto& row : rows)
    csv << row.method << "," << row.param << "," << row.rank << "," << row.tau << ","
        << row.rel_l2_error << "\n";
  std::cout << "bench-b: wrote " << out_dir << "/bench_b.csv\n";
  return 0;
}

int cmd_verify(std::uint64_t seed, int trials, const std::string& out_dir) {
  VerifyConfig cfg;
  cfg.seed = seed;
  cfg.trials = trials;
  const PropertyReport report = verify_theorems(cfg);
  std::ostringstream table;
  table << "property,trials,worst_margin,pass\n";
  for (const auto& e : report.entries)
    table << e.property << "," << e.trials << "," << e.worst_margin << ","
          << (e.pass ? "1" : "0") << "\n";
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    std::ofstream csv = open_out(fs::path(out_dir) / "verify.csv");
    csv << table.str();
  }
  std::cout << table.str();
  std::cout << (report.all_pass() ? "verify: all properties passed\n"
                                  : "verify: FAILURES present\n");
  return report.all_pass() ? 0 : 3;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Graph classification by SDIE/MBO schemes with Nystrom-QR "
               "Laplacian compression"};
  app.require_subcommand(1);

  RunConfig cfg;
  int repeats = 100;
  std::string config_path;

  // The config file is applied before CLI11 parses the rest of the command
  // line, so explicit flags override it (bound variables are only written
  // when their option appears).
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    std::string path;
    if (arg == "--config" && i + 1 < argc)
      path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0)
      path = arg.substr(9);
    if (!path.empty()) {
      try {
        load_config_file(cfg, path);
      } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
      }
      break;
    }
  }

  const auto add_run_options = [&cfg, &config_path](CLI::App* cmd, bool with_paths) {
    cmd->add_option("--config", config_path,
                    "Flat key=value config file (explicit flags override it)");
    cmd->add_option("--eps", cfg.eps, "Interface parameter epsilon");
    cmd->add_option("--tau", cfg.tau, "Time step (tau = eps gives MBO)");
    cmd->add_option("--delta", cfg.delta, "Termination threshold");
    cmd->add_option("--max-iter", cfg.max_iter, "Iteration safety cap");
    cmd->add_option("--scheme", cfg.scheme, "Exponential scheme: strang|yoshida|euler");
    cmd->add_option("--k", cfg.k, "Substeps per diffusion application");
    cmd->add_option("--k-b", cfg.k_b, "Substeps for the one-off b computation");
    cmd->add_option("--b-method", cfg.b_method,
                    "b method: trapezium|midpoint|simpson|composite_simpson|"
                    "ode_euler|woodbury");
    cmd->add_option("--simpson-m", cfg.simpson_m, "Composite Simpson subdivisions");
    cmd->add_option("--mu-hat", cfg.mu_hat, "Fidelity strength on the reference");
    cmd->add_option("--sigma", cfg.sigma, "Gaussian similarity scale");
    cmd->add_option("--rank", cfg.rank, "Nystrom rank K");
    cmd->add_option("--normalization", cfg.normalization,
                    "Laplacian normalization: symmetric|random_walk");
    cmd->add_option("--pixel-scale", cfg.pixel_scale,
                    "Feature pixel scale: byte (0..255) or unit (0..1)");
    cmd->add_option("--seed", cfg.seed, "RNG seed for the interpolation sets");
    cmd->add_flag("--trace", cfg.trace, "Record per-iteration diagnostics CSV");
    cmd->add_option("--out", cfg.out_dir, "Output directory");
    if (with_paths) {
      // Required in effect, but satisfiable through --config; checked after
      // parsing.
      cmd->add_option("--ref", cfg.ref_image,
                      "Reference image (path or builtin:SIZE[:NOISE[:SEED]])");
      cmd->add_option("--labels", cfg.ref_labels, "Reference label mask");
      cmd->add_option("--target", cfg.target_image, "Image to segment");
      cmd->add_option("--ground-truth", cfg.ground_truth,
                      "Optional ground-truth mask for error reporting");
    }
  };

  CLI::App* segment = app.add_subcommand("segment", "Segment one image pair");
  add_run_options(segment, true);

  CLI::App* montecarlo = app.add_subcommand(
      "montecarlo", "Repeated segmentations; pointwise mean/std label maps");
  add_run_options(montecarlo, true);
  montecarlo->add_option("--repeats", repeats, "Number of independent runs")
      ->check(CLI::Range(2, 100000));

  // Benchmarks.
  std::string image_spec = "builtin:80";
  std::vector<Index> ranks{50, 100, 150, 200, 250, 300};
  int bench_repeats = 10;
  // Wider than the segmentation default: the benchmark wants the kernel
  // dense enough that the interpolation block stays well conditioned for
  // every random draw.
  double bench_sigma = 120.0;
  std::string bench_scale = "byte";
  std::uint64_t bench_seed = 0;
  std::string bench_out = "gsdie-bench";

  CLI::App* bl = app.add_subcommand(
      "bench-lowrank", "Nystrom-QR vs classic Nystrom vs truncated SVD");
  bl->add_option("--image", image_spec, "Image path or builtin:SIZE");
  bl->add_option("--ranks", ranks, "Ranks K to test");
  bl->add_option("--repeats", bench_repeats, "Seeds per rank");
  bl->add_option("--sigma", bench_sigma, "Gaussian similarity scale");
  bl->add_option("--pixel-scale", bench_scale, "byte|unit");
  bl->add_option("--seed", bench_seed, "Base RNG seed")->required();
  bl->add_option("--out", bench_out, "Output directory");

  Index bench_n = 40;
  double bench_tau = 0.5;
  std::vector<int> substeps{1, 2, 4, 8, 16, 32, 64, 128, 256};
  std::string rank_mode = "full";
  CLI::App* be = app.add_subcommand(
      "bench-expm", "Propagator error orders against the dense oracle");
  be->add_option("--n", bench_n, "Graph size (dense-oracle scale)");
  be->add_option("--tau", bench_tau, "Diffusion time");
  be->add_option("--k-list", substeps, "Substep counts");
  be->add_option("--rank-mode", rank_mode, "full|sqrt");
  be->add_option("--seed", bench_seed, "RNG seed")->required();
  be->add_option("--out", bench_out, "Output directory");

  std::vector<double> taus{0.5, 4.0};
  std::vector<Index> b_ranks{0, 6};  // 0 = full rank
  int b_kb = 1000, b_m = 500;
  CLI::App* bb = app.add_subcommand(
      "bench-b", "Accuracy of every b method against the dense integral oracle");
  bb->add_option("--n", bench_n, "Graph size");
  bb->add_option("--taus", taus, "Diffusion times");
  bb->add_option("--ranks", b_ranks, "Ranks (0 = full)");
  bb->add_option("--k-b", b_kb, "Substeps for the exponentials");
  bb->add_option("--simpson-m", b_m, "Composite Simpson subdivisions");
  bb->add_option("--seed", bench_seed, "RNG seed")->required();
  bb->add_option("--out", bench_out, "Output directory");

  std::uint64_t verify_seed = 1;
  int verify_trials = 50;
  std::string verify_out;
  CLI::App* vf = app.add_subcommand(
      "verify", "Run the numerical theorem battery; exit 0 iff all pass");
  vf->add_option("--seed", verify_seed, "RNG seed");
  vf->add_option("--trials", verify_trials, "Instances per property");
  vf->add_option("--out", verify_out, "Optional output directory for verify.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (segment->parsed() || montecarlo->parsed()) {
      if (cfg.ref_image.empty()) throw InputError("--ref is required");
      if (cfg.ref_labels.empty()) throw InputError("--labels is required");
      if (cfg.target_image.empty()) throw InputError("--target is required");
    }
    if (segment->parsed()) return cmd_segment(cfg);
    if (montecarlo->parsed()) return cmd_montecarlo(cfg, repeats);
    if (bl->parsed())
      return cmd_bench_lowrank(image_spec, ranks, bench_repeats, bench_sigma,
                               bench_scale, bench_seed, bench_out);
    if (be->parsed())
      return cmd_bench_expm(bench_n, bench_tau, substeps, rank_mode, bench_seed,
                            bench_out);
    if (bb->parsed())
      return cmd_bench_b(bench_n, taus, b_ranks, b_kb, b_m, bench_seed, bench_out);
    if (vf->parsed()) return cmd_verify(verify_seed, verify_trials, verify_out);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace gsdie

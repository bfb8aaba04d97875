#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kinvlap/convergence.hpp"
#include "kinvlap/errors.hpp"
#include "kinvlap/harmonic.hpp"
#include "kinvlap/io.hpp"
#include "kinvlap/oracle.hpp"
#include "kinvlap/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kinvlap;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIntegrity = 3;
constexpr int kExitValidation = 4;
constexpr int kExitNumerical = 5;

json parse_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

GroupModel default_group_for(const std::string& manifold) {
  if (manifold == "torus_r4" || manifold == "circle_r2")
    return make_so2_group(64, 8, {{0, 1}});
  if (manifold == "so3_embedded_r9")
    return make_so3_group(so3_default_quadrature(2), 2);
  throw ConfigError("unknown manifold name '" + manifold + "' in field manifold.name");
}

int cmd_generate(const fs::path& config_path, const fs::path& out_dir) {
  const json config = parse_config(config_path);
  if (!config.contains("manifold") || !config.at("manifold").contains("name"))
    throw ConfigError("generate config is missing field manifold.name");
  const auto& m = config.at("manifold");
  const std::string name = m.at("name").get<std::string>();
  const Index n = config.value("n_points", Index{128});
  const std::uint64_t seed = config.value("seed", std::uint64_t{1});

  std::vector<Real> params;
  if (name == "torus_r4")
    params = {m.value("r1", 1.0), m.value("r2", 1.0)};
  else if (name == "circle_r2")
    params = {m.value("radius", 1.0)};
  else if (name == "so3_embedded_r9")
    params = {};
  else
    throw ConfigError("unknown manifold name '" + name + "' in field manifold.name");

  Dataset ds = sample_manifold(name, params, n, seed, 64);
  if (config.contains("group"))
    ds = with_group(ds, group_from_json(config.at("group")));
  else
    ds = with_group(ds, default_group_for(name));

  write_dataset_bundle(out_dir, ds);
  std::cout << dataset_hash(ds) << "\n";
  return 0;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

int cmd_spectrum(const fs::path& dataset_dir, double epsilon, int lmax, bool auto_lmax,
                 double tail_tol, bool normalized, const fs::path& out_dir,
                 const fs::path& cache_dir) {
  Dataset ds = read_dataset_bundle(dataset_dir);
  std::string eps_source = "explicit";
  if (epsilon <= 0.0) {
    epsilon = median_squared_distance(ds);
    eps_source = "median_heuristic";
  }
  const AffinityParams params{epsilon};
  std::string band_source = "bundle";
  if (auto_lmax && ds.group.kind() != GroupKind::Cyclic) {
    lmax = suggest_band_limit(ds, params, tail_tol);
    band_source = "auto";
  } else if (lmax >= 0) {
    band_source = "flag";
  }
  if (lmax >= 0) ds.group = ds.group.with_band_limit(lmax);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::exists(out_dir))
    throw ConfigError("cannot create output directory '" + out_dir.string() + "'");

  std::vector<IrrepBlock> blocks;
  const std::string hash = dataset_hash(ds);
  if (!cache_dir.empty()) {
    // Cache keyed by (dataset hash, epsilon, irrep label). Stored blocks are
    // complex128 so a reload is bit-faithful.
    fs::create_directories(cache_dir, ec);
    bool all_cached = true;
    for (const Irrep& ir : ds.group.irreps()) {
      const fs::path p = cache_dir / ("block_" + hash + "_eps" + format_real(epsilon) +
                                      "_l" + std::to_string(ir.label) + ".cmat");
      if (!fs::exists(p)) {
        all_cached = false;
        break;
      }
    }
    if (all_cached) {
      for (const Irrep& ir : ds.group.irreps()) {
        const fs::path p = cache_dir / ("block_" + hash + "_eps" + format_real(epsilon) +
                                        "_l" + std::to_string(ir.label) + ".cmat");
        IrrepBlock b;
        b.label = ir.label;
        b.dim = ir.dim;
        json header;
        b.w_hat = read_complex_matrix(p, &header);
        const auto deg = header.at("degree").get<std::vector<Real>>();
        b.degree = Eigen::Map<const Vector>(deg.data(), static_cast<Index>(deg.size()));
        blocks.push_back(std::move(b));
      }
    }
  }
  if (blocks.empty()) {
    blocks = assemble_blocks(ds, params);
    if (!cache_dir.empty()) {
      for (const IrrepBlock& b : blocks) {
        const fs::path p = cache_dir / ("block_" + hash + "_eps" + format_real(epsilon) +
                                        "_l" + std::to_string(b.label) + ".cmat");
        json extra;
        extra["degree"] = std::vector<Real>(b.degree.data(), b.degree.data() + b.degree.size());
        write_complex_matrix(p, b.w_hat, "complex128", extra);
      }
    }
  }

  const SpectralBundle bundle = full_spectrum(blocks, normalized);
  write_spectrum_csv(out_dir / "spectrum.csv", bundle);

  // Eigenvectors grouped per irrep, columns ascending by eigenvalue.
  for (const IrrepBlock& b : blocks) {
    const Index size = static_cast<Index>(b.degree.size()) * b.dim;
    ComplexMatrix vecs(size, size);
    json lambdas = json::array();
    Index col = 0;
    for (const EigenPair& p : bundle.pairs)
      if (p.label == b.label) {
        vecs.col(col++) = p.vector;
        lambdas.push_back(p.value);
      }
    json extra{{"irrep_label", b.label}, {"irrep_dim", b.dim}, {"eigenvalues", lambdas}};
    write_complex_matrix(out_dir / ("eigenvectors_l" + std::to_string(b.label) + ".cmat"),
                         vecs, "complex128", extra);
  }

  const TailReport tail = reconstruction_report(blocks, ds, params);
  json manifest{{"dataset_dir", dataset_dir.string()},
                {"dataset_hash", hash},
                {"epsilon", epsilon},
                {"epsilon_source", eps_source},
                {"normalized", normalized},
                {"band_limit", tail.band_limit},
                {"band_limit_source", band_source},
                {"tail", {{"measured_max_residual", tail.measured_max_residual},
                          {"declared_bound", tail.declared_bound}}},
                {"timestamp", timestamp_utc()}};
  json herm = json::object();
  for (const IrrepBlock& b : blocks)
    herm[std::to_string(b.label)] = b.hermiticity_deviation;
  manifest["hermiticity_deviation"] = std::move(herm);
  std::ofstream mf(out_dir / "run_manifest.json", std::ios::binary);
  mf << manifest.dump(2) << '\n';

  std::cout << "epsilon=" << format_real(epsilon) << " (" << eps_source << ") pairs="
            << bundle.pairs.size() << " tail_residual="
            << format_real(tail.measured_max_residual) << "\n";
  return 0;
}

int cmd_validate(const fs::path& dataset_dir, double epsilon, int lmax,
                 const fs::path& out_path) {
  Dataset ds = read_dataset_bundle(dataset_dir);
  if (epsilon <= 0.0) epsilon = median_squared_distance(ds);
  const AffinityParams params{epsilon};
  if (lmax >= 0) ds.group = ds.group.with_band_limit(lmax);

  const auto blocks = assemble_blocks(ds, params);
  const SpectralBundle bundle = full_spectrum(blocks, /*normalized=*/false);
  const std::vector<Real> dense = dense_spectrum(ds, params);
  const SpectraReport report = compare_spectra(dense, bundle);

  Real tolerance = 1e-8;
  json extra;
  if (ds.group.kind() != GroupKind::Cyclic) {
    const TailReport tail = reconstruction_report(blocks, ds, params);
    // Truncating the band perturbs the operator by at most the reconstruction
    // sup error times the augmented vertex mass.
    tolerance = std::max(1e-8, tail.declared_bound * static_cast<Real>(ds.size()));
    extra = {{"measured_max_residual", tail.measured_max_residual},
             {"declared_bound", tail.declared_bound}};
  }

  json j = spectra_report_to_json(report);
  j["epsilon"] = epsilon;
  j["tolerance"] = tolerance;
  if (!extra.is_null()) j["tail"] = extra;
  const bool pass = report.unmatched == 0 && report.max_abs_dev < tolerance;
  j["pass"] = pass;
  const std::string text = j.dump(2) + "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write report to '" + out_path.string() + "'");
    out << text;
  }
  std::cout << text;
  return pass ? 0 : kExitValidation;
}

int cmd_converge(const fs::path& config_path, const fs::path& out_dir) {
  const ConvergenceConfig config = convergence_config_from_json(parse_config(config_path));
  const RateReport report = run_sweep(config);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::exists(out_dir))
    throw ConfigError("cannot create output directory '" + out_dir.string() + "'");
  {
    std::ofstream out(out_dir / "report.json", std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + (out_dir / "report.json").string() + "'");
    out << rate_report_to_json(report, config).dump(2) << '\n';
  }
  write_rate_report_csv(out_dir / "cells.csv", report);
  write_rate_plot_data(out_dir / "plots", report);

  for (const auto& [eps, fit] : report.slope_vs_n)
    if (fit.valid)
      std::cout << "slope vs N @ eps=" << format_real(eps) << ": " << format_real(fit.slope)
                << "\n";
  for (const auto& [n, fit] : report.slope_vs_eps)
    if (fit.valid)
      std::cout << "slope vs eps @ N=" << n << ": " << format_real(fit.slope) << "\n";
  if (report.bias_slope.valid)
    std::cout << "bias slope vs eps: " << format_real(report.bias_slope.slope) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-invariant graph Laplacian toolkit"};
  app.require_subcommand(1);

  std::string config_path, dataset_dir, out_path, cache_dir;
  double epsilon = -1.0;
  double tail_tol = 1e-6;
  int lmax = -1;
  bool normalized = false;
  bool auto_lmax = false;

  auto* gen = app.add_subcommand("generate", "sample a dataset bundle from a config");
  gen->add_option("config", config_path, "JSON config file")->required();
  gen->add_option("--out", out_path, "output bundle directory")->required();

  auto* spect = app.add_subcommand("spectrum", "compute the block spectrum of a bundle");
  spect->add_option("dataset", dataset_dir, "dataset bundle directory")->required();
  spect->add_option("--epsilon", epsilon, "kernel bandwidth (default: median heuristic)");
  spect->add_option("--lmax", lmax, "band limit override");
  spect->add_flag("--auto-lmax", auto_lmax,
                 "pick the band limit from the kernel's reconstruction tail");
  spect->add_option("--tail-tol", tail_tol, "target tail residual for --auto-lmax");
  spect->add_flag("--normalized", normalized, "use the degree-normalized Laplacian");
  spect->add_option("--out", out_path, "output directory")->required();
  spect->add_option("--cache-dir", cache_dir, "optional block cache directory");

  auto* val = app.add_subcommand("validate", "compare against the dense reference");
  val->add_option("dataset", dataset_dir, "dataset bundle directory")->required();
  val->add_option("--epsilon", epsilon, "kernel bandwidth (default: median heuristic)");
  val->add_option("--lmax", lmax, "band limit override");
  val->add_option("--out", out_path, "write the JSON report here too");

  auto* conv = app.add_subcommand("converge", "run a convergence-rate sweep");
  conv->add_option("config", config_path, "JSON config file")->required();
  conv->add_option("--out", out_path, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return cmd_generate(config_path, out_path);
    if (spect->parsed())
      return cmd_spectrum(dataset_dir, epsilon, lmax, auto_lmax, tail_tol, normalized,
                          out_path, cache_dir);
    if (val->parsed()) return cmd_validate(dataset_dir, epsilon, lmax, out_path);
    if (conv->parsed()) return cmd_converge(config_path, out_path);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalIntegrityError& e) {
    std::cerr << "numerical integrity failure: " << e.what() << "\n";
    return kExitIntegrity;
  } catch (const ValidationError& e) {
    std::cerr << "validation mismatch: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalRuntimeError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

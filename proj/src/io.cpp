#include "kinvlap/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "kinvlap/errors.hpp"

namespace kinvlap {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_real(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_file(const fs::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

Real parse_cell(const std::string& cell, Index row, Index col) {
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  Real value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw ConfigError("non-numeric cell in row " + std::to_string(row) + ", column " +
                      std::to_string(col));
  return value;
}

void require_field(const json& j, const char* field, const char* context) {
  if (!j.contains(field))
    throw ConfigError(std::string(context) + " is missing field '" + field + "'");
}

}  // namespace

Matrix read_points_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open points file '" + path.string() + "'");
  std::vector<std::vector<Real>> rows;
  std::string line;
  Index line_no = 0;
  Index width = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<Real> row;
    std::stringstream ss(line);
    std::string cell;
    Index col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      row.push_back(parse_cell(cell, line_no, col));
    }
    if (width < 0) width = static_cast<Index>(row.size());
    if (static_cast<Index>(row.size()) != width)
      throw ConfigError("row " + std::to_string(line_no) + " has " +
                        std::to_string(row.size()) + " columns, expected " +
                        std::to_string(width));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("no points in '" + path.string() + "'");
  Matrix pts(static_cast<Index>(rows.size()), width);
  for (Index i = 0; i < pts.rows(); ++i)
    for (Index j = 0; j < width; ++j) pts(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return pts;
}

void write_points_csv(const fs::path& path, const Matrix& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write points file '" + path.string() + "'");
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = 0; j < points.cols(); ++j) {
      if (j) out << ',';
      out << format_real(points(i, j));
    }
    out << '\n';
  }
}

GroupModel group_from_json(const json& j) {
  require_field(j, "kind", "group descriptor");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "cyclic") {
    require_field(j, "n", "cyclic group descriptor");
    require_field(j, "generator", "cyclic group descriptor");
    const auto& gen = j.at("generator");
    if (!gen.is_array() || gen.empty())
      throw ConfigError("cyclic generator must be a nested array");
    const Index d = static_cast<Index>(gen.size());
    Matrix m(d, d);
    for (Index r = 0; r < d; ++r) {
      const auto& row = gen.at(static_cast<std::size_t>(r));
      if (!row.is_array() || static_cast<Index>(row.size()) != d)
        throw ConfigError("cyclic generator must be square");
      for (Index c = 0; c < d; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<Real>();
    }
    return make_cyclic_group(j.at("n").get<int>(), m);
  }
  if (kind == "so2") {
    require_field(j, "quadrature_order", "so2 group descriptor");
    require_field(j, "m_max", "so2 group descriptor");
    require_field(j, "pairs", "so2 group descriptor");
    std::vector<std::pair<int, int>> pairs;
    for (const auto& p : j.at("pairs")) {
      if (!p.is_array() || p.size() != 2)
        throw ConfigError("so2 pairs must be two-element arrays");
      pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    }
    return make_so2_group(j.at("quadrature_order").get<int>(), j.at("m_max").get<int>(),
                          pairs);
  }
  if (kind == "so3") {
    require_field(j, "l_max", "so3 group descriptor");
    const int l_max = j.at("l_max").get<int>();
    So3Quadrature quad = so3_default_quadrature(l_max);
    if (j.contains("quadrature")) {
      const auto& q = j.at("quadrature");
      quad.n_alpha = q.value("alpha", quad.n_alpha);
      quad.n_beta = q.value("beta", quad.n_beta);
      quad.n_gamma = q.value("gamma", quad.n_gamma);
    }
    So3Embedding emb = So3Embedding::MatrixBlocks;
    const std::string name = j.value("embedding", "matrix_blocks");
    if (name == "matrix_blocks")
      emb = So3Embedding::MatrixBlocks;
    else if (name == "vector_blocks")
      emb = So3Embedding::VectorBlocks;
    else
      throw ConfigError("unknown so3 embedding '" + name + "'");
    return make_so3_group(quad, l_max, emb);
  }
  throw ConfigError("unknown group kind '" + kind + "'");
}

json group_to_json(const GroupModel& group) {
  json j;
  j["kind"] = group_kind_name(group.kind());
  switch (group.kind()) {
    case GroupKind::Cyclic: {
      j["n"] = group.cyclic_order();
      json gen = json::array();
      const Matrix& m = group.cyclic_generator();
      for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        gen.push_back(std::move(row));
      }
      j["generator"] = std::move(gen);
      break;
    }
    case GroupKind::SO2: {
      j["quadrature_order"] = group.so2_quadrature_order();
      j["m_max"] = group.so2_m_max();
      json pairs = json::array();
      for (const auto& [p, q] : group.so2_pairs()) pairs.push_back(json::array({p, q}));
      j["pairs"] = std::move(pairs);
      break;
    }
    case GroupKind::SO3: {
      j["quadrature"] = {{"alpha", group.so3_quadrature().n_alpha},
                         {"beta", group.so3_quadrature().n_beta},
                         {"gamma", group.so3_quadrature().n_gamma}};
      j["l_max"] = group.so3_l_max();
      j["embedding"] = group.so3_embedding() == So3Embedding::MatrixBlocks
                           ? "matrix_blocks"
                           : "vector_blocks";
      break;
    }
  }
  return j;
}

GroupModel read_group_json(const fs::path& path) {
  return group_from_json(parse_json_file(path));
}

void write_dataset_bundle(const fs::path& dir, const Dataset& dataset) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  write_points_csv(dir / "points.csv", dataset.points);
  {
    std::ofstream out(dir / "group.json", std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + (dir / "group.json").string() + "'");
    out << group_to_json(dataset.group).dump(2) << '\n';
  }
  json meta;
  meta["n_points"] = dataset.size();
  meta["ambient_dim"] = dataset.ambient_dim();
  meta["dataset_hash"] = dataset_hash(dataset);
  if (dataset.meta) {
    meta["manifold"] = {{"name", dataset.meta->name},
                        {"intrinsic_dim", dataset.meta->intrinsic_dim},
                        {"parameters", dataset.meta->parameters},
                        {"seed", dataset.meta->seed}};
  }
  std::ofstream out(dir / "meta.json", std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + (dir / "meta.json").string() + "'");
  out << meta.dump(2) << '\n';
}

Dataset read_dataset_bundle(const fs::path& dir) {
  Dataset ds = load_points(dir / "points.csv", dir / "group.json");
  const fs::path meta_path = dir / "meta.json";
  if (fs::exists(meta_path)) {
    const json meta = parse_json_file(meta_path);
    if (meta.contains("manifold")) {
      const auto& m = meta.at("manifold");
      ManifoldMeta mm;
      mm.name = m.value("name", "custom");
      mm.intrinsic_dim = m.value("intrinsic_dim", 0);
      if (m.contains("parameters"))
        mm.parameters = m.at("parameters").get<std::vector<Real>>();
      mm.seed = m.value("seed", std::uint64_t{0});
      ds.meta = std::move(mm);
    }
  }
  return ds;
}

Dataset load_points(const fs::path& points_csv, const fs::path& group_json) {
  Matrix pts = read_points_csv(points_csv);
  GroupModel group = read_group_json(group_json);
  group.validate_ambient_dim(pts.cols());
  return Dataset{std::move(pts), std::move(group), std::nullopt};
}

std::string dataset_hash(const Dataset& dataset) {
  std::ostringstream ss;
  for (Index i = 0; i < dataset.points.rows(); ++i) {
    for (Index j = 0; j < dataset.points.cols(); ++j) {
      if (j) ss << ',';
      ss << format_real(dataset.points(i, j));
    }
    ss << '\n';
  }
  const std::string bytes = ss.str();
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_complex_matrix(const fs::path& path, const ComplexMatrix& m,
                          const std::string& dtype, const json& extra_header) {
  if (dtype != "complex128" && dtype != "complex64")
    throw ConfigError("unsupported matrix dtype '" + dtype + "'");
  json header = extra_header.is_object() ? extra_header : json::object();
  header["format"] = "kinvlap-cmat";
  header["version"] = 1;
  header["dtype"] = dtype;
  header["rows"] = m.rows();
  header["cols"] = m.cols();
  header["order"] = "row_major";
  header["endianness"] = "little";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write matrix file '" + path.string() + "'");
  out << header.dump() << '\n';
  if (dtype == "complex128") {
    std::vector<double> buf(static_cast<std::size_t>(m.size()) * 2);
    std::size_t k = 0;
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < m.cols(); ++c) {
        buf[k++] = m(r, c).real();
        buf[k++] = m(r, c).imag();
      }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(double)));
  } else {
    std::vector<float> buf(static_cast<std::size_t>(m.size()) * 2);
    std::size_t k = 0;
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < m.cols(); ++c) {
        buf[k++] = static_cast<float>(m(r, c).real());
        buf[k++] = static_cast<float>(m(r, c).imag());
      }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
  if (!out) throw ConfigError("failed writing matrix file '" + path.string() + "'");
}

ComplexMatrix read_complex_matrix(const fs::path& path, json* header_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open matrix file '" + path.string() + "'");
  std::string header_line;
  if (!std::getline(in, header_line))
    throw ConfigError("matrix file '" + path.string() + "' has no header");
  json header;
  try {
    header = json::parse(header_line);
  } catch (const json::parse_error& e) {
    throw ConfigError("matrix file '" + path.string() + "' has an invalid header: " + e.what());
  }
  if (header.value("format", "") != "kinvlap-cmat")
    throw ConfigError("matrix file '" + path.string() + "' has an unknown format tag");
  const Index rows = header.at("rows").get<Index>();
  const Index cols = header.at("cols").get<Index>();
  const std::string dtype = header.at("dtype").get<std::string>();
  ComplexMatrix m(rows, cols);
  const std::size_t count = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * 2;
  if (dtype == "complex128") {
    std::vector<double> buf(count);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double))
      throw ConfigError("matrix file '" + path.string() + "' is truncated");
    std::size_t k = 0;
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) {
        m(r, c) = Complex(buf[k], buf[k + 1]);
        k += 2;
      }
  } else if (dtype == "complex64") {
    std::vector<float> buf(count);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float))
      throw ConfigError("matrix file '" + path.string() + "' is truncated");
    std::size_t k = 0;
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) {
        m(r, c) = Complex(buf[k], buf[k + 1]);
        k += 2;
      }
  } else {
    throw ConfigError("matrix file '" + path.string() + "' has unsupported dtype '" + dtype + "'");
  }
  if (header_out) *header_out = std::move(header);
  return m;
}

void write_spectrum_csv(const fs::path& path, const SpectralBundle& bundle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write spectrum file '" + path.string() + "'");
  out << "l,s,m,lambda,normalized\n";
  for (const EigenPair& p : bundle.pairs)
    for (int m = 1; m <= p.dim; ++m)
      out << p.label << ',' << p.s << ',' << m << ',' << format_real(p.value) << ','
          << (bundle.normalized ? 1 : 0) << '\n';
}

json spectra_report_to_json(const SpectraReport& report) {
  json per_irrep = json::object();
  for (const auto& [label, dev] : report.per_irrep_dev)
    per_irrep[std::to_string(label)] = dev;
  return json{{"max_abs_dev", report.max_abs_dev},
              {"matched", report.matched},
              {"unmatched", report.unmatched},
              {"per_irrep_dev", std::move(per_irrep)}};
}

namespace {

json slope_to_json(const SlopeFit& fit) {
  json j{{"valid", fit.valid}, {"points_used", fit.points_used}};
  if (fit.valid) {
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    if (std::isfinite(fit.ci_lo)) {
      j["ci_lo"] = fit.ci_lo;
      j["ci_hi"] = fit.ci_hi;
    }
  }
  return j;
}

}  // namespace

json rate_report_to_json(const RateReport& report, const ConvergenceConfig& config) {
  json cells = json::array();
  for (const CellStats& c : report.cells) {
    json jc{{"n", c.n_points},
            {"epsilon", c.epsilon},
            {"trials", c.trials},
            {"mean_abs_err", c.mean_abs_err},
            {"median_abs_err", c.median_abs_err},
            {"q25_abs_err", c.q25_abs_err},
            {"q75_abs_err", c.q75_abs_err},
            {"regime", c.regime}};
    if (std::isfinite(c.baseline_median_abs_err))
      jc["baseline_median_abs_err"] = c.baseline_median_abs_err;
    if (std::isfinite(c.bias_reference)) jc["bias_reference"] = c.bias_reference;
    cells.push_back(std::move(jc));
  }
  json slope_n = json::object(), slope_n_all = json::object(), slope_e = json::object();
  for (const auto& [eps, fit] : report.slope_vs_n) slope_n[format_real(eps)] = slope_to_json(fit);
  for (const auto& [eps, fit] : report.slope_vs_n_allcells)
    slope_n_all[format_real(eps)] = slope_to_json(fit);
  for (const auto& [n, fit] : report.slope_vs_eps)
    slope_e[std::to_string(n)] = slope_to_json(fit);
  json surrogate = json::array();
  for (const auto& [eps, err] : report.surrogate_errors)
    surrogate.push_back(json{{"epsilon", eps}, {"median_abs_err", err}});
  json j{{"config",
          {{"manifold", config.manifold},
           {"manifold_params", config.manifold_params},
           {"quadrature_order", config.quadrature_order},
           {"n_values", config.n_values},
           {"epsilons", config.epsilons},
           {"trials", config.trials},
           {"seed", config.seed},
           {"exclude_diagonal", config.exclude_diagonal},
           {"eval_points", config.eval_points},
           {"baseline", config.baseline},
           {"test_function", config.test_function}}},
         {"cells", std::move(cells)},
         {"slope_vs_n", std::move(slope_n)},
         {"slope_vs_n_allcells", std::move(slope_n_all)},
         {"slope_vs_eps", std::move(slope_e)},
         {"bias_slope", slope_to_json(report.bias_slope)},
         {"surrogate_errors", std::move(surrogate)}};
  if (std::isfinite(report.cell_win_fraction)) {
    j["cell_win_fraction"] = report.cell_win_fraction;
    j["trial_win_fraction"] = report.trial_win_fraction;
  }
  return j;
}

void write_rate_report_csv(const fs::path& path, const RateReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write report file '" + path.string() + "'");
  out << "n,epsilon,trial,median_abs_err,baseline_median_abs_err,regime\n";
  for (const CellStats& c : report.cells)
    for (std::size_t t = 0; t < c.trial_medians.size(); ++t) {
      out << c.n_points << ',' << format_real(c.epsilon) << ',' << t << ','
          << format_real(c.trial_medians[t]) << ',';
      if (t < c.baseline_trial_medians.size())
        out << format_real(c.baseline_trial_medians[t]);
      out << ',' << c.regime << '\n';
    }
}

void write_rate_plot_data(const fs::path& dir, const RateReport& report) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  // error against N, one file per epsilon
  std::map<Real, std::vector<const CellStats*>> by_eps;
  std::map<Index, std::vector<const CellStats*>> by_n;
  for (const CellStats& c : report.cells) {
    by_eps[c.epsilon].push_back(&c);
    by_n[c.n_points].push_back(&c);
  }
  int idx = 0;
  for (const auto& [eps, cells] : by_eps) {
    std::ofstream out(dir / ("err_vs_n_eps" + std::to_string(idx++) + ".dat"), std::ios::binary);
    out << "# epsilon = " << format_real(eps) << "\n# N median_abs_err\n";
    for (const CellStats* c : cells)
      out << c->n_points << ' ' << format_real(c->median_abs_err) << '\n';
  }
  idx = 0;
  for (const auto& [n, cells] : by_n) {
    std::ofstream out(dir / ("err_vs_eps_n" + std::to_string(idx++) + ".dat"), std::ios::binary);
    out << "# N = " << n << "\n# epsilon median_abs_err\n";
    for (const CellStats* c : cells)
      out << format_real(c->epsilon) << ' ' << format_real(c->median_abs_err) << '\n';
  }
  if (!report.surrogate_errors.empty()) {
    std::ofstream out(dir / "bias_vs_eps.dat", std::ios::binary);
    out << "# epsilon median_abs_err (dense-quadrature surrogate)\n";
    for (const auto& [eps, err] : report.surrogate_errors)
      out << format_real(eps) << ' ' << format_real(err) << '\n';
  }
}

ConvergenceConfig convergence_config_from_json(const json& j) {
  ConvergenceConfig config;
  require_field(j, "manifold", "convergence config");
  const auto& m = j.at("manifold");
  require_field(m, "name", "convergence config manifold");
  config.manifold = m.at("name").get<std::string>();
  if (config.manifold == "torus_r4") {
    config.manifold_params = {m.value("r1", 1.0), m.value("r2", 1.0)};
  } else if (config.manifold == "circle_r2") {
    config.manifold_params = {m.value("radius", 1.0)};
  } else if (config.manifold == "so3_embedded_r9") {
    config.manifold_params = {};
  } else {
    throw ConfigError("unknown manifold name '" + config.manifold + "' in field manifold.name");
  }
  require_field(j, "grid", "convergence config");
  const auto& grid = j.at("grid");
  require_field(grid, "n_values", "convergence grid");
  require_field(grid, "epsilons", "convergence grid");
  config.n_values = grid.at("n_values").get<std::vector<Index>>();
  config.epsilons = grid.at("epsilons").get<std::vector<Real>>();
  config.quadrature_order = j.value("quadrature_order", 64);
  config.trials = j.value("trials", 1);
  config.seed = j.value("seed", std::uint64_t{1});
  config.exclude_diagonal = j.value("exclude_diagonal", false);
  config.eval_points = j.value("eval_points", Index{32});
  config.baseline = j.value("baseline", true);
  config.test_function = j.value("test_function", std::string("x3"));
  if (j.contains("bias_surrogate")) {
    const auto& b = j.at("bias_surrogate");
    config.bias.enabled = b.value("enabled", true);
    config.bias.grid = b.value("grid", 128);
    if (b.contains("epsilons"))
      config.bias.epsilons = b.at("epsilons").get<std::vector<Real>>();
  } else {
    config.bias.enabled = false;
  }
  if (j.contains("density") && j.at("density").get<std::string>() != "uniform")
    throw ConfigError("only uniform sampling density is supported (field density)");
  config.validate();
  return config;
}

}  // namespace kinvlap

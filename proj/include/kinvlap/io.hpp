#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "kinvlap/convergence.hpp"
#include "kinvlap/dataset.hpp"
#include "kinvlap/oracle.hpp"
#include "kinvlap/spectral.hpp"
#include "kinvlap/types.hpp"

namespace kinvlap {

/// Point cloud CSV: one row per point, comma-separated coordinates printed
/// with 17 significant digits. Reading is strict: ragged rows and
/// non-numeric cells are reported with their (1-based) row index.
Matrix read_points_csv(const std::filesystem::path& path);
void write_points_csv(const std::filesystem::path& path, const Matrix& points);

/// Group descriptors, e.g.
///   {"kind": "so2", "quadrature_order": 64, "m_max": 16, "pairs": [[0,1]]}
///   {"kind": "cyclic", "n": 8, "generator": [[...], ...]}
///   {"kind": "so3", "quadrature": {"alpha": 12, "beta": 6, "gamma": 12},
///    "l_max": 2, "embedding": "matrix_blocks"}
GroupModel group_from_json(const nlohmann::json& j);
nlohmann::json group_to_json(const GroupModel& group);
GroupModel read_group_json(const std::filesystem::path& path);

/// Dataset bundle directory: points.csv + group.json + meta.json.
void write_dataset_bundle(const std::filesystem::path& dir, const Dataset& dataset);
Dataset read_dataset_bundle(const std::filesystem::path& dir);
Dataset load_points(const std::filesystem::path& points_csv,
                    const std::filesystem::path& group_json);

/// FNV-1a hash of the canonical CSV bytes, as fixed-width hex.
std::string dataset_hash(const Dataset& dataset);

/// Binary complex matrix: one JSON header line (dtype, rows, cols, row-major
/// order, little-endian) followed by raw interleaved re/im values. dtype is
/// "complex128" by default; "complex64" is accepted on read and available on
/// write for compact caches at reduced precision.
void write_complex_matrix(const std::filesystem::path& path, const ComplexMatrix& m,
                          const std::string& dtype = "complex128",
                          const nlohmann::json& extra_header = {});
ComplexMatrix read_complex_matrix(const std::filesystem::path& path,
                                  nlohmann::json* header_out = nullptr);

/// Spectrum CSV with columns l, s, m, lambda, normalized; rows ascending by
/// (lambda, l, s, m), floats at 17 significant digits. Byte-stable across
/// reruns.
void write_spectrum_csv(const std::filesystem::path& path, const SpectralBundle& bundle);

nlohmann::json spectra_report_to_json(const SpectraReport& report);
nlohmann::json rate_report_to_json(const RateReport& report, const ConvergenceConfig& config);
void write_rate_report_csv(const std::filesystem::path& path, const RateReport& report);
/// Two-column (x, y) files per sweep direction for plotting.
void write_rate_plot_data(const std::filesystem::path& dir, const RateReport& report);

ConvergenceConfig convergence_config_from_json(const nlohmann::json& j);

std::string format_real(Real v);  // %.17g

}  // namespace kinvlap

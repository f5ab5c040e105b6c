#pragma once

// File formats.
//
// FTRT binary tensor record (all integers and floats little-endian):
//   "FTRT" | u32 version = 1 | u32 order M | M x u64 dims | prod(dims) x f64
// values in row-major order. A dataset file is one record whose leading dim
// is the sample count. A factor file is M consecutive 1-mode records.
//
// Model file: JSON document, see write_model().
//
// Response/prediction CSV: header line, then one value per line.

#include "fastr/estimator.hpp"
#include "fastr/tensor.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fastr::io {

inline constexpr char kMagic[4] = {'F', 'T', 'R', 'T'};
inline constexpr std::uint32_t kTensorVersion = 1;
inline constexpr int kModelVersion = 1;

void write_tensor(std::ostream& out, const Tensor& t);
Tensor read_tensor(std::istream& in);

void write_tensor_file(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor_file(const std::filesystem::path& path);

/// Sample set as one record of order M + 1 with the sample count leading.
void write_samples_file(const std::filesystem::path& path, const SampleSet& x);
SampleSet read_samples_file(const std::filesystem::path& path);

void write_factors_file(const std::filesystem::path& path, const Factors& f);
Factors read_factors_file(const std::filesystem::path& path);

/// Writes `header` then one shortest-round-trip value per line.
void write_column_csv(const std::filesystem::path& path, const std::string& header,
                      const Vector<double>& values);
/// Reads one value per line; a non-numeric first line is taken as a header.
Vector<double> read_column_csv(const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

nlohmann::json model_to_json(const FitReport<double>& report, const FitConfig& cfg);
FitReport<double> model_from_json(const nlohmann::json& doc, FitConfig* cfg = nullptr);

void write_model(const std::filesystem::path& path, const FitReport<double>& report,
                 const FitConfig& cfg);
FitReport<double> read_model(const std::filesystem::path& path, FitConfig* cfg = nullptr);

}  // namespace fastr::io

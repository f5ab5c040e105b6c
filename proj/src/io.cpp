#include "fastr/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace fastr::io {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (!in) throw FormatError("unexpected end of tensor record");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

void write_record(std::ostream& out, const Shape& dims, const double* values, Index count) {
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kTensorVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dims.size()));
  for (Index d : dims) put_le<std::uint64_t>(out, static_cast<std::uint64_t>(d));
  for (Index i = 0; i < count; ++i) put_le<double>(out, values[i]);
  if (!out) throw FormatError("failed writing tensor record");
}

struct Record {
  Shape dims;
  Vector<double> values;
};

Record read_record(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad magic, not an FTRT record");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kTensorVersion)
    throw FormatError("unsupported FTRT version " + std::to_string(version));
  const auto order = get_le<std::uint32_t>(in);
  if (order == 0) throw FormatError("FTRT record has order 0");
  Record r;
  constexpr auto kMaxIndex = static_cast<std::uint64_t>(std::numeric_limits<Index>::max());
  std::uint64_t total = 1;
  for (std::uint32_t m = 0; m < order; ++m) {
    const auto d = get_le<std::uint64_t>(in);
    if (d == 0 || d > kMaxIndex || total > kMaxIndex / d)
      throw FormatError("FTRT record has an invalid dimension");
    total *= d;
    r.dims.push_back(static_cast<Index>(d));
  }
  r.values.resize(static_cast<Index>(total));
  for (Index i = 0; i < r.values.size(); ++i) r.values[i] = get_le<double>(in);
  return r;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

void expect_eof(std::istream& in, const std::filesystem::path& path) {
  if (in.peek() != std::char_traits<char>::eof())
    throw FormatError(path.string() + ": trailing bytes after tensor record");
}

Tensor record_to_tensor(Record r) {
  try {
    return Tensor(std::move(r.dims), std::move(r.values));
  } catch (const Error& e) {
    throw FormatError(e.what());
  }
}

}  // namespace

void write_tensor(std::ostream& out, const Tensor& t) {
  write_record(out, t.dims(), t.data().data(), t.size());
}

Tensor read_tensor(std::istream& in) { return record_to_tensor(read_record(in)); }

void write_tensor_file(const std::filesystem::path& path, const Tensor& t) {
  auto out = open_out(path, std::ios::binary);
  write_tensor(out, t);
}

Tensor read_tensor_file(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  Tensor t = read_tensor(in);
  expect_eof(in, path);
  return t;
}

void write_samples_file(const std::filesystem::path& path, const SampleSet& x) {
  Shape dims = x.dims();
  dims.insert(dims.begin(), x.count());
  auto out = open_out(path, std::ios::binary);
  write_record(out, dims, x.rows().data(), x.rows().size());
}

SampleSet read_samples_file(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  Record r = read_record(in);
  expect_eof(in, path);
  if (r.dims.size() < 2)
    throw FormatError(path.string() + ": dataset record needs a sample dimension and >= 1 mode");
  const Index n = r.dims.front();
  Shape dims(r.dims.begin() + 1, r.dims.end());
  RowMatrix<double> rows =
      Eigen::Map<const RowMatrix<double>>(r.values.data(), n, shape_size(dims));
  try {
    return SampleSet(std::move(dims), std::move(rows));
  } catch (const Error& e) {
    throw FormatError(e.what());
  }
}

void write_factors_file(const std::filesystem::path& path, const Factors& f) {
  auto out = open_out(path, std::ios::binary);
  for (const auto& w : f.factors()) write_record(out, {w.size()}, w.data(), w.size());
}

Factors read_factors_file(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  std::vector<Vector<double>> fs;
  while (in.peek() != std::char_traits<char>::eof()) {
    Record r = read_record(in);
    if (r.dims.size() != 1) throw FormatError(path.string() + ": factor records must be 1-mode");
    fs.push_back(std::move(r.values));
  }
  try {
    return Factors(std::move(fs));
  } catch (const Error& e) {
    throw FormatError(e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_column_csv(const std::filesystem::path& path, const std::string& header,
                      const Vector<double>& values) {
  auto out = open_out(path);
  out << header << '\n';
  for (Index i = 0; i < values.size(); ++i) out << format_double(values[i]) << '\n';
  if (!out) throw FormatError("failed writing " + path.string());
}

Vector<double> read_column_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<double> vals;
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v = 0.0;
    const char* begin = line.data();
    const char* end = begin + line.size();
    if (*begin == '+') ++begin;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) {
      if (first) {
        first = false;
        continue;
      }
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": not a number: " + line);
    }
    first = false;
    vals.push_back(v);
  }
  return Eigen::Map<const Vector<double>>(vals.data(), static_cast<Index>(vals.size()));
}

namespace {

nlohmann::json encode_real(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double decode_real(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw FormatError("model file: expected a number, got " + j.dump());
}

}  // namespace

// Schema (version 1):
// {
//   "format": "fastr-model", "version": 1,
//   "order": M, "dims": [p1, ..., pM],
//   "factors": [[...], ..., [...]],
//   "config": {"lambda", "epsilon", "max_iter", "tol", "seed", "balance"},
//   "iterations": T, "converged": bool,
//   "rel_change_trace": [c1, ..., cT]      // "inf" for an unbounded change
// }
nlohmann::json model_to_json(const FitReport<double>& report, const FitConfig& cfg) {
  nlohmann::json doc;
  doc["format"] = "fastr-model";
  doc["version"] = kModelVersion;
  doc["order"] = report.factors.order();
  doc["dims"] = report.factors.dims();
  auto& factors = doc["factors"] = nlohmann::json::array();
  for (const auto& w : report.factors.factors())
    factors.push_back(std::vector<double>(w.data(), w.data() + w.size()));
  doc["config"] = {{"lambda", cfg.lambda}, {"epsilon", cfg.epsilon}, {"max_iter", cfg.max_iter},
                   {"tol", cfg.tol},       {"seed", cfg.seed},       {"balance", cfg.balance}};
  doc["iterations"] = report.iterations;
  doc["converged"] = report.converged;
  auto& trace = doc["rel_change_trace"] = nlohmann::json::array();
  for (double c : report.rel_change_trace) trace.push_back(encode_real(c));
  return doc;
}

FitReport<double> model_from_json(const nlohmann::json& doc, FitConfig* cfg) {
  try {
    if (doc.at("format") != "fastr-model") throw FormatError("not a fastr model document");
    if (doc.at("version").get<int>() != kModelVersion)
      throw FormatError("unsupported model version " + doc.at("version").dump());
    const auto dims = doc.at("dims").get<Shape>();
    const auto order = doc.at("order").get<Index>();
    const auto& jf = doc.at("factors");
    if (order != static_cast<Index>(dims.size()) || jf.size() != dims.size())
      throw FormatError("model order, dims, and factor count disagree");

    std::vector<Vector<double>> fs;
    for (std::size_t m = 0; m < jf.size(); ++m) {
      const auto values = jf[m].get<std::vector<double>>();
      if (static_cast<Index>(values.size()) != dims[m])
        throw FormatError("model factor " + std::to_string(m) + " length disagrees with dims");
      fs.push_back(Eigen::Map<const Vector<double>>(values.data(), dims[m]));
    }

    FitReport<double> report;
    report.factors = Factors(std::move(fs));
    report.iterations = doc.at("iterations").get<int>();
    report.converged = doc.at("converged").get<bool>();
    for (const auto& c : doc.at("rel_change_trace")) report.rel_change_trace.push_back(decode_real(c));

    if (cfg) {
      const auto& jc = doc.at("config");
      cfg->lambda = jc.at("lambda").get<double>();
      cfg->epsilon = jc.at("epsilon").get<double>();
      cfg->max_iter = jc.at("max_iter").get<int>();
      cfg->tol = jc.at("tol").get<double>();
      cfg->seed = jc.at("seed").get<std::uint64_t>();
      cfg->balance = jc.at("balance").get<bool>();
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model file: ") + e.what());
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
}

void write_model(const std::filesystem::path& path, const FitReport<double>& report,
                 const FitConfig& cfg) {
  auto out = open_out(path);
  out << model_to_json(report, cfg).dump(2) << '\n';
  if (!out) throw FormatError("failed writing " + path.string());
}

FitReport<double> read_model(const std::filesystem::path& path, FitConfig* cfg) {
  auto in = open_in(path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return model_from_json(doc, cfg);
}

}  // namespace fastr::io

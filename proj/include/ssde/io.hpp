#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssde/error.hpp"
#include "ssde/matrix.hpp"
#include "ssde/version.hpp"

namespace ssde::io {

using json = nlohmann::json;

// ---- digests ----

inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 14695981039346656037ULL) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string digest_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("file_digest: cannot open " + path);
  std::uint64_t h = 14695981039346656037ULL;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    h = fnv1a(buf, static_cast<std::size_t>(in.gcount()), h);
    if (!in) break;
  }
  return digest_hex(h);
}

// ---- raw matrix dumps ----
//
// 16-byte header: magic "SSDE", u32 rows, u32 cols, u32 step; then row-major
// float64, little-endian (written natively; this toolkit targets
// little-endian hosts).

struct MatrixDump {
  Matrix matrix;
  std::uint32_t step = 0;
};

inline void write_matrix(const std::string& path, const Matrix& m, std::uint32_t step) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("write_matrix: cannot open " + path);
  const char magic[4] = {'S', 'S', 'D', 'E'};
  const std::uint32_t rows = static_cast<std::uint32_t>(m.rows());
  const std::uint32_t cols = static_cast<std::uint32_t>(m.cols());
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&cols), 4);
  out.write(reinterpret_cast<const char*>(&step), 4);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), 8);
    }
  }
  if (!out) throw DomainError("write_matrix: short write to " + path);
}

inline MatrixDump read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("read_matrix: cannot open " + path);
  char magic[4];
  std::uint32_t rows = 0, cols = 0, step = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  in.read(reinterpret_cast<char*>(&step), 4);
  if (!in || std::memcmp(magic, "SSDE", 4) != 0) {
    throw DomainError("read_matrix: bad header in " + path);
  }
  MatrixDump dump;
  dump.step = step;
  dump.matrix.resize(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) {
      double v;
      in.read(reinterpret_cast<char*>(&v), 8);
      dump.matrix(i, j) = v;
    }
  }
  if (!in) throw DomainError("read_matrix: truncated file " + path);
  return dump;
}

// ---- CSV ----

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header, int precision = 12)
      : out_(path), precision_(precision) {
    if (!out_) throw DomainError("CsvWriter: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
      out_ << (i ? "," : "") << header[i];
    }
    out_ << "\n";
  }

  void row(const std::vector<double>& values) {
    char buf[64];
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.*g", precision_, values[i]);
      out_ << (i ? "," : "") << buf;
    }
    out_ << "\n";
  }

  void row(long step, const std::vector<double>& values) {
    out_ << step;
    char buf[64];
    for (double v : values) {
      std::snprintf(buf, sizeof(buf), "%.*g", precision_, v);
      out_ << "," << buf;
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
  int precision_;
};

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

inline Csv read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("read_csv: cannot open " + path);
  Csv csv;
  std::string line;
  if (!std::getline(in, line)) throw DomainError("read_csv: empty file " + path);
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) csv.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != csv.header.size()) throw DomainError("read_csv: ragged row in " + path);
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

// Checks a header of the form <fixed...>,<series>1,...,<series>N. Returns the
// series length N (possibly 0); throws on any mismatch.
inline int validate_csv_schema(const Csv& csv, const std::vector<std::string>& fixed,
                               const std::string& series_prefix) {
  if (csv.header.size() < fixed.size()) throw DomainError("csv schema: missing fixed columns");
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (csv.header[i] != fixed[i]) {
      throw DomainError("csv schema: expected column '" + fixed[i] + "', got '" + csv.header[i] + "'");
    }
  }
  int series = 0;
  for (std::size_t i = fixed.size(); i < csv.header.size(); ++i) {
    const std::string expect = series_prefix + std::to_string(series + 1);
    if (csv.header[i] != expect) {
      throw DomainError("csv schema: expected column '" + expect + "', got '" + csv.header[i] + "'");
    }
    ++series;
  }
  return series;
}

// ---- run manifests ----
//
// Every successful CLI command writes exactly one manifest.json into its
// output directory: the full config echo, seed, tool version and a digest of
// every input/output file, so a run can be verified and reproduced.

inline void write_manifest(const std::string& dir, const std::string& subcommand,
                           const json& config_echo, std::uint64_t seed,
                           const std::vector<std::string>& inputs,
                           const std::vector<std::string>& outputs) {
  json m;
  m["subcommand"] = subcommand;
  m["version"] = kVersion;
  m["seed"] = seed;
  m["config"] = config_echo;
  json in = json::object(), out = json::object();
  for (const auto& p : inputs) in[p] = file_digest(p);
  for (const auto& p : outputs) {
    const std::filesystem::path rel = std::filesystem::relative(p, dir);
    out[rel.string()] = file_digest(p);
  }
  m["inputs"] = in;
  m["outputs"] = out;
  std::ofstream f(dir + "/manifest.json");
  if (!f) throw DomainError("write_manifest: cannot open " + dir + "/manifest.json");
  f << m.dump(2) << "\n";
}

inline json read_manifest(const std::string& dir) {
  std::ifstream f(dir + "/manifest.json");
  if (!f) throw DomainError("read_manifest: cannot open " + dir + "/manifest.json");
  json m;
  f >> m;
  return m;
}

// Recomputes the digest of every output file named by the manifest.
inline bool verify_manifest(const std::string& dir) {
  const json m = read_manifest(dir);
  for (auto it = m["outputs"].begin(); it != m["outputs"].end(); ++it) {
    const std::string path = dir + "/" + it.key();
    if (!std::filesystem::exists(path)) return false;
    if (file_digest(path) != it.value().get<std::string>()) return false;
  }
  return true;
}

}  // namespace ssde::io

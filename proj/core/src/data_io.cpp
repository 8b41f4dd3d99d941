#include "precmat/data_io.hpp"

#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "precmat/sampler.hpp"

namespace precmat {

namespace {

constexpr char kMagic[5] = {'P', 'M', 'A', 'T', '1'};

std::string location(std::size_t row, std::size_t col) {
  return " at row " + std::to_string(row + 1) + ", column " +
         std::to_string(col + 1);
}

// Parses one CSV line of doubles; row/line are 0-based, reported 1-based.
std::vector<double> parse_csv_line(const std::string& line, std::size_t row,
                                   const std::string& path) {
  std::vector<double> out;
  std::size_t begin = 0;
  std::size_t col = 0;
  while (true) {
    std::size_t end = line.find(',', begin);
    const std::size_t len =
        (end == std::string::npos ? line.size() : end) - begin;
    std::size_t a = begin;
    std::size_t b = begin + len;
    while (a < b && std::isspace(static_cast<unsigned char>(line[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(line[b - 1]))) --b;
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(line.data() + a, line.data() + b, value);
    if (ec != std::errc() || ptr != line.data() + b || a == b) {
      throw ParseError(path + ": malformed number" + location(row, col));
    }
    if (!std::isfinite(value)) {
      throw ParseError(path + ": non-finite value" + location(row, col));
    }
    out.push_back(value);
    ++col;
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  return out;
}

Eigen::MatrixXd read_csv(const std::string& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path + ": cannot open for reading");
  }
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 0 && skip_header) {
      ++lineno;
      continue;
    }
    if (line.empty()) {
      ++lineno;
      continue;
    }
    const std::size_t row = rows.size();
    rows.push_back(parse_csv_line(line, row, path));
    if (rows.size() > 1 && rows.back().size() != rows.front().size()) {
      throw ParseError(path + ": expected " +
                       std::to_string(rows.front().size()) + " fields, got " +
                       std::to_string(rows.back().size()) + " at row " +
                       std::to_string(row + 1));
    }
    ++lineno;
  }
  if (rows.empty()) {
    throw ParseError(path + ": no data rows");
  }
  Eigen::MatrixXd m(static_cast<Index>(rows.size()),
                    static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

void read_exact(std::ifstream& in, char* dst, std::streamsize n,
                const std::string& path) {
  if (!in.read(dst, n)) {
    throw ParseError(path + ": truncated binary file");
  }
}

Eigen::MatrixXd read_binary(const std::string& path, bool square) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(path + ": cannot open for reading");
  }
  char magic[5];
  read_exact(in, magic, 5, path);
  if (std::memcmp(magic, kMagic, 5) != 0) {
    throw ParseError(path + ": bad magic bytes (not a PMAT1 file)");
  }
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  if (square) {
    read_exact(in, reinterpret_cast<char*>(&rows), 8, path);
    cols = rows;
  } else {
    read_exact(in, reinterpret_cast<char*>(&rows), 8, path);
    read_exact(in, reinterpret_cast<char*>(&cols), 8, path);
  }
  if (rows == 0 || cols == 0 || rows > (1u << 24) || cols > (1u << 24)) {
    throw ParseError(path + ": implausible dimensions in header");
  }
  Eigen::MatrixXd m(static_cast<Index>(rows), static_cast<Index>(cols));
  std::vector<double> row(cols);
  for (std::uint64_t i = 0; i < rows; ++i) {
    read_exact(in, reinterpret_cast<char*>(row.data()),
               static_cast<std::streamsize>(8 * cols), path);
    for (std::uint64_t j = 0; j < cols; ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = row[j];
    }
  }
  if (!m.allFinite()) {
    throw ParseError(path + ": non-finite values in binary payload");
  }
  return m;
}

// Writes through a temp file in the same directory, then renames.
class AtomicWriter {
 public:
  AtomicWriter(const std::string& path, bool binary) : final_path_(path) {
    tmp_path_ = path + ".tmp";
    out_.open(tmp_path_, binary ? std::ios::binary | std::ios::trunc
                                : std::ios::trunc);
    if (!out_) {
      throw ParseError(path + ": cannot open for writing");
    }
  }

  std::ofstream& stream() { return out_; }

  void commit() {
    out_.close();
    if (!out_) {
      throw ParseError(final_path_ + ": write failed");
    }
    std::filesystem::rename(tmp_path_, final_path_);
    committed_ = true;
  }

  ~AtomicWriter() {
    if (!committed_) {
      std::error_code ec;
      std::filesystem::remove(tmp_path_, ec);
    }
  }

 private:
  std::string final_path_;
  std::string tmp_path_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_csv(const Eigen::MatrixXd& m, const std::string& path) {
  AtomicWriter w(path, false);
  char buf[40];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      if (j) w.stream() << ',';
      w.stream() << buf;
    }
    w.stream() << '\n';
  }
  w.commit();
}

void write_binary(const Eigen::MatrixXd& m, const std::string& path,
                  bool square) {
  AtomicWriter w(path, true);
  w.stream().write(kMagic, 5);
  const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
  w.stream().write(reinterpret_cast<const char*>(&rows), 8);
  if (!square) {
    w.stream().write(reinterpret_cast<const char*>(&cols), 8);
  }
  std::vector<double> row(static_cast<std::size_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      row[static_cast<std::size_t>(j)] = m(i, j);
    }
    w.stream().write(reinterpret_cast<const char*>(row.data()),
                     static_cast<std::streamsize>(8 * row.size()));
  }
  w.commit();
}

void append_number_or(std::string& line, double v, const char* absent) {
  if (!std::isfinite(v)) {
    line += absent;
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += buf;
}

}  // namespace

SymMatrix sample_covariance(const DatasetMatrix& x, bool center) {
  const Index n = x.n();
  const Index p = x.p();
  if (n < 1) {
    throw DimensionMismatch("sample_covariance: need at least one row");
  }
  Eigen::MatrixXd data = x.values;
  if (center) {
    data.rowwise() -= data.colwise().mean();
  }
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
  s.selfadjointView<Eigen::Lower>().rankUpdate(data.transpose(),
                                               1.0 / static_cast<double>(n));
  return SymMatrix::from_lower(s);
}

SyntheticProblem generate_synthetic(Index p, double density, double magnitude,
                                    double ell, std::uint64_t seed) {
  if (p < 2) {
    throw std::invalid_argument("generate_synthetic: need p >= 2");
  }
  if (!(density > 0.0 && density <= 1.0)) {
    throw std::invalid_argument("generate_synthetic: density must be in (0,1]");
  }
  if (!(ell > 0.0)) {
    throw std::invalid_argument("generate_synthetic: ell must be > 0");
  }

  SyntheticProblem out;
  out.seed = seed;
  out.density = density;
  out.magnitude = magnitude;
  out.ell = ell;

  // Sparse signal: each off-diagonal pair is nonzero with probability
  // `density`, standard normal plus a +-magnitude push matching its sign.
  NormalStream rng(derive_seed(seed, 0));
  SymMatrix b(p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = j + 1; i < p; ++i) {
      if (rng.uniform01() < density) {
        const double v = rng.next();
        b.set(i, j, v + std::copysign(magnitude, v));
      }
    }
  }
  const double b_min = extreme_eigenvalues(b).first;
  Eigen::MatrixXd shifted = b.mat();
  shifted.diagonal().array() += ell - b_min;
  out.theta_star = SymMatrix::from_lower(shifted);

  const Index n = (p + 1) / 2;
  GaussianSampler sampler(cholesky(out.theta_star), derive_seed(seed, 1));
  Eigen::MatrixXd x(n, p);
  for (Index i = 0; i < n; ++i) {
    x.row(i) = sampler.draw().transpose();
  }
  out.x = DatasetMatrix{std::move(x)};
  out.s = sample_covariance(out.x, false);
  return out;
}

MatrixFormat detect_format(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(path + ": cannot open for reading");
  }
  char magic[5] = {};
  in.read(magic, 5);
  return (in.gcount() == 5 && std::memcmp(magic, kMagic, 5) == 0)
             ? MatrixFormat::Binary
             : MatrixFormat::Csv;
}

SymMatrix read_sym_matrix(const std::string& path, MatrixFormat format,
                          bool skip_header) {
  Eigen::MatrixXd m = format == MatrixFormat::Csv ? read_csv(path, skip_header)
                                                  : read_binary(path, true);
  if (m.rows() != m.cols()) {
    throw DimensionMismatch(path + ": covariance must be square, got " +
                            std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  }
  return SymMatrix::from_dense(m);
}

DatasetMatrix read_dataset(const std::string& path, MatrixFormat format,
                           bool skip_header) {
  Eigen::MatrixXd m = format == MatrixFormat::Csv ? read_csv(path, skip_header)
                                                  : read_binary(path, false);
  return DatasetMatrix{std::move(m)};
}

void write_sym_matrix(const SymMatrix& a, const std::string& path,
                      MatrixFormat format) {
  if (format == MatrixFormat::Csv) {
    write_csv(a.mat(), path);
  } else {
    write_binary(a.mat(), path, true);
  }
}

void write_dataset(const DatasetMatrix& x, const std::string& path,
                   MatrixFormat format) {
  if (format == MatrixFormat::Csv) {
    write_csv(x.values, path);
  } else {
    write_binary(x.values, path, false);
  }
}

void write_trace(const SolveResult& result, const std::string& path,
                 TraceFormat format) {
  AtomicWriter w(path, false);
  if (format == TraceFormat::Csv) {
    w.stream() << "iter,elapsed_s,objective,step,batch_n,nnz,rel_change,"
                  "rel_error\n";
    for (const auto& r : result.trace) {
      std::string line = std::to_string(r.iter) + ',';
      append_number_or(line, r.elapsed_s, "");
      line += ',';
      append_number_or(line, r.objective, "");
      line += ',';
      append_number_or(line, r.step, "");
      line += ',' + std::to_string(r.batch_n) + ',' + std::to_string(r.nnz) +
              ',';
      append_number_or(line, r.rel_change, "");
      line += ',';
      append_number_or(line, r.rel_error, "");
      w.stream() << line << '\n';
    }
  } else {
    for (const auto& r : result.trace) {
      std::string line = "{\"iter\":" + std::to_string(r.iter);
      line += ",\"elapsed_s\":";
      append_number_or(line, r.elapsed_s, "null");
      line += ",\"objective\":";
      append_number_or(line, r.objective, "null");
      line += ",\"step\":";
      append_number_or(line, r.step, "null");
      line += ",\"batch_n\":" + std::to_string(r.batch_n);
      line += ",\"nnz\":" + std::to_string(r.nnz);
      line += ",\"rel_change\":";
      append_number_or(line, r.rel_change, "null");
      line += ",\"rel_error\":";
      append_number_or(line, r.rel_error, "null");
      line += "}";
      w.stream() << line << '\n';
    }
  }
  w.commit();
}

}  // namespace precmat

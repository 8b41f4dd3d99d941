#pragma once

#include <string>

#include "precmat/data_types.hpp"
#include "precmat/solver.hpp"
#include "precmat/sym_matrix.hpp"

namespace precmat {

/// S = X'X/n; when `center`, column means are subtracted first.
SymMatrix sample_covariance(const DatasetMatrix& x, bool center);

/// Builds a sparse symmetric signal matrix B (expected off-diagonal nonzero
/// proportion = density, standard normal values pushed away from zero by
/// +-magnitude), shifts it positive definite so lambda_min == ell, then
/// draws ceil(p/2) samples from N(0, theta_star^{-1}) and forms their
/// covariance. Bitwise deterministic in `seed`.
SyntheticProblem generate_synthetic(Index p, double density, double magnitude,
                                    double ell, std::uint64_t seed);

enum class MatrixFormat { Csv, Binary };

/// Infers Binary when the file starts with the magic bytes, Csv otherwise.
MatrixFormat detect_format(const std::string& path);

/// Covariance reader: requires a square matrix, symmetric within 1e-12
/// (scaled); the triangles are then averaged. Throws ParseError,
/// DimensionMismatch or NotSymmetric.
SymMatrix read_sym_matrix(const std::string& path, MatrixFormat format,
                          bool skip_header = false);

DatasetMatrix read_dataset(const std::string& path, MatrixFormat format,
                           bool skip_header = false);

/// Writers are atomic (temp file + rename). CSV carries 17 significant
/// digits so values round-trip exactly; the binary format is bit-exact
/// ("PMAT1" magic, little-endian u64 dims, row-major f64).
void write_sym_matrix(const SymMatrix& a, const std::string& path,
                      MatrixFormat format);
void write_dataset(const DatasetMatrix& x, const std::string& path,
                   MatrixFormat format);

enum class TraceFormat { Csv, JsonLines };

/// Columns: iter, elapsed_s, objective, step, batch_n, nnz, rel_change,
/// rel_error. NaN fields (rel_change at iter 0, rel_error without a
/// reference) are written empty in CSV and null in JSON lines.
void write_trace(const SolveResult& result, const std::string& path,
                 TraceFormat format);

}  // namespace precmat

#pragma once

#include "rcpd/manifold.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rcpd {

/// Text stream format:
///
///   # manifold=<spd|grassmann> p=<int> k=<int> T=<int>
///   <row-major matrix entries, space separated>   (one record per line)
///
/// Entries are written with 17 significant digits, so doubles round-trip
/// exactly. For SPD streams k equals p.
struct StreamHeader {
  ManifoldKind manifold = ManifoldKind::spd;
  Eigen::Index p = 0;
  Eigen::Index k = 0;
  std::int64_t length = 0;
};

struct MatrixStream {
  StreamHeader header;
  std::vector<Point> points;
};

void write_matrix_stream(std::ostream& os, const StreamHeader& header,
                         const std::vector<Point>& points);
void write_matrix_stream_file(const std::string& path, const StreamHeader& header,
                              const std::vector<Point>& points);

/// Parses and validates every record against its manifold. Throws DataError
/// naming the offending line.
MatrixStream read_matrix_stream(std::istream& is);
MatrixStream read_matrix_stream_file(const std::string& path);

/// Ground-truth sidecar: a single line `t_r=<int>`.
void write_truth_file(const std::string& path, std::int64_t change_at);
std::optional<std::int64_t> read_truth_file(const std::string& path);

/// Builds the manifold object described by a header.
ManifoldPtr make_manifold(const StreamHeader& header);

}  // namespace rcpd

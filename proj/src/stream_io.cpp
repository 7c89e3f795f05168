#include "rcpd/stream_io.hpp"

#include "rcpd/errors.hpp"
#include "rcpd/grassmann.hpp"
#include "rcpd/spd.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace rcpd {
namespace {

std::string header_line(const StreamHeader& h) {
  std::ostringstream os;
  os << "# manifold=" << to_string(h.manifold) << " p=" << h.p << " k=" << h.k
     << " T=" << h.length;
  return os.str();
}

StreamHeader parse_header(const std::string& line) {
  if (line.rfind("#", 0) != 0) throw DataError("line 1: missing '# manifold=...' header");
  std::istringstream is(line.substr(1));
  StreamHeader h;
  bool have_manifold = false, have_p = false, have_k = false, have_t = false;
  std::string token;
  while (is >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw DataError("line 1: malformed header field '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    try {
      if (key == "manifold") {
        if (value == "spd") {
          h.manifold = ManifoldKind::spd;
        } else if (value == "grassmann") {
          h.manifold = ManifoldKind::grassmann;
        } else {
          throw DataError("line 1: unknown manifold '" + value + "'");
        }
        have_manifold = true;
      } else if (key == "p") {
        h.p = std::stol(value);
        have_p = true;
      } else if (key == "k") {
        h.k = std::stol(value);
        have_k = true;
      } else if (key == "T") {
        h.length = std::stoll(value);
        have_t = true;
      }
    } catch (const std::logic_error&) {
      throw DataError("line 1: malformed header value in '" + token + "'");
    }
  }
  if (!(have_manifold && have_p && have_k && have_t)) {
    throw DataError("line 1: header must define manifold, p, k and T");
  }
  if (h.manifold == ManifoldKind::spd && h.k != h.p) {
    throw DataError("line 1: SPD streams require k = p");
  }
  if (h.p < 1 || h.k < 1 || h.length < 0) throw DataError("line 1: invalid dimensions");
  return h;
}

}  // namespace

ManifoldPtr make_manifold(const StreamHeader& header) {
  if (header.manifold == ManifoldKind::spd) return std::make_shared<Spd>(header.p);
  return std::make_shared<Grassmann>(header.p, header.k);
}

void write_matrix_stream(std::ostream& os, const StreamHeader& header,
                         const std::vector<Point>& points) {
  os << header_line(header) << '\n';
  char buf[32];
  for (const Point& x : points) {
    if (x.data.rows() != header.p || x.data.cols() != header.k) {
      throw ValidationError("point shape does not match the stream header");
    }
    for (Eigen::Index i = 0; i < x.data.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.data.cols(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", x.data(i, j));
        if (i != 0 || j != 0) os << ' ';
        os << buf;
      }
    }
    os << '\n';
  }
}

void write_matrix_stream_file(const std::string& path, const StreamHeader& header,
                              const std::vector<Point>& points) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  write_matrix_stream(os, header, points);
  if (!os) throw DataError("failed writing '" + path + "'");
}

MatrixStream read_matrix_stream(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("stream file is empty");
  MatrixStream out;
  out.header = parse_header(line);
  const ManifoldPtr ops = make_manifold(out.header);
  const Eigen::Index n = out.header.p * out.header.k;
  std::int64_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Matrix m(out.header.p, out.header.k);
    const char* ptr = line.data();
    const char* end = line.data() + line.size();
    Eigen::Index count = 0;
    while (true) {
      while (ptr < end && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
      if (ptr == end) break;
      double v = 0.0;
      auto [next, ec] = std::from_chars(ptr, end, v);
      if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t' && *next != '\r')) {
        throw DataError("line " + std::to_string(line_no) + ": malformed number");
      }
      if (count >= n) break;
      m(count / out.header.k, count % out.header.k) = v;
      ++count;
      ptr = next;
    }
    if (count != n || ptr != end) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(n) +
                      " entries");
    }
    Point x{std::move(m)};
    try {
      ops->validate(x);
    } catch (const ValidationError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
    out.points.push_back(std::move(x));
  }
  if (static_cast<std::int64_t>(out.points.size()) != out.header.length) {
    throw DataError("header announces T=" + std::to_string(out.header.length) + " but file has " +
                    std::to_string(out.points.size()) + " records");
  }
  return out;
}

MatrixStream read_matrix_stream_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open '" + path + "'");
  try {
    return read_matrix_stream(is);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_truth_file(const std::string& path, std::int64_t change_at) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  os << "t_r=" << change_at << '\n';
}

std::optional<std::int64_t> read_truth_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) return std::nullopt;
  std::string line;
  std::getline(is, line);
  if (line.rfind("t_r=", 0) != 0) throw DataError(path + ": expected 't_r=<int>'");
  try {
    return std::stoll(line.substr(4));
  } catch (const std::logic_error&) {
    throw DataError(path + ": malformed change point");
  }
}

}  // namespace rcpd

#include "jstego/plan_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

namespace jstego {

std::string format_double(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "cannot serialize non-finite value");
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "double formatting failed");
  return std::string(buf, end);
}

double parse_double(std::string_view token, std::size_t line) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ParseError(line, "invalid number '" + std::string(token) + "'");
  return v;
}

namespace {

std::uint64_t parse_count(std::string_view token, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError(line, "invalid integer '" + std::string(token) + "'");
  return v;
}

// Yields non-blank, non-comment lines split on whitespace.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  struct Line {
    std::size_t number = 0;
    std::vector<std::string> tokens;
  };

  std::optional<Line> next() {
    std::string text;
    while (std::getline(in_, text)) {
      ++number_;
      std::istringstream ss(text);
      Line line{number_, {}};
      for (std::string tok; ss >> tok;) line.tokens.push_back(tok);
      if (line.tokens.empty() || line.tokens.front().starts_with('#')) continue;
      return line;
    }
    return std::nullopt;
  }

  Line require(std::string_view what) {
    auto line = next();
    if (!line) throw ParseError(number_ + 1, "unexpected end of file, expected " + std::string(what));
    return *line;
  }

  std::size_t number() const { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

void read_magic(LineReader& reader, std::string_view magic) {
  const auto line = reader.require("magic line");
  if (line.tokens.size() != 2 || line.tokens[0] != magic)
    throw ParseError(line.number, "expected magic line '" + std::string(magic) + " " +
                                      std::to_string(kFormatVersion) + "'");
  if (line.tokens[1] != std::to_string(kFormatVersion))
    throw Error(ErrorCode::VersionMismatch, "line " + std::to_string(line.number) +
                                                ": unsupported " + std::string(magic) +
                                                " version " + line.tokens[1]);
}

std::uint64_t read_keyword(LineReader& reader, std::string_view keyword) {
  const auto line = reader.require(keyword);
  if (line.tokens.size() != 2 || line.tokens[0] != keyword)
    throw ParseError(line.number, "expected '" + std::string(keyword) + " <count>'");
  return parse_count(line.tokens[1], line.number);
}

void write_row(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << format_double(v[i]);
  }
  out << '\n';
}

Vector parse_row(const LineReader::Line& line, std::size_t offset, Eigen::Index expected) {
  const auto have = static_cast<Eigen::Index>(line.tokens.size() - offset);
  if (expected >= 0 && have != expected)
    throw ParseError(line.number, "expected " + std::to_string(expected) + " coordinates, found " +
                                      std::to_string(have));
  Vector v(have);
  for (Eigen::Index i = 0; i < have; ++i)
    v[i] = parse_double(line.tokens[offset + static_cast<std::size_t>(i)], line.number);
  return v;
}

void finish(LineReader& reader) {
  if (auto extra = reader.next()) throw ParseError(extra->number, "unexpected trailing content");
}

}  // namespace

// ---------------------------------------------------------------------------
// Plan

void write_plan(const StegoPlan& plan, std::ostream& out) {
  out << kPlanMagic << ' ' << kFormatVersion << '\n';
  out << "dim " << plan.dim << '\n';
  out << "polytopes " << plan.polytopes.size() << '\n';
  out << "threshold " << format_double(plan.carrier_threshold) << '\n';
  for (const Polytope& poly : plan.polytopes) {
    out << "polytope " << poly.vertices.size() << '\n';
    for (const Vector& v : poly.vertices) {
      if (v.size() != plan.dim)
        throw Error(ErrorCode::DimensionMismatch, "vertex dimension differs from plan dimension");
      write_row(out, v);
    }
  }
}

StegoPlan read_plan(std::istream& in) {
  LineReader reader(in);
  read_magic(reader, kPlanMagic);
  StegoPlan plan;
  plan.dim = static_cast<Eigen::Index>(read_keyword(reader, "dim"));
  if (plan.dim < 1) throw ParseError(reader.number(), "dimension must be positive");
  const std::uint64_t count = read_keyword(reader, "polytopes");
  {
    const auto line = reader.require("threshold");
    if (line.tokens.size() != 2 || line.tokens[0] != "threshold")
      throw ParseError(line.number, "expected 'threshold <tau>'");
    plan.carrier_threshold = parse_double(line.tokens[1], line.number);
  }
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::uint64_t m = read_keyword(reader, "polytope");
    Polytope poly;
    poly.vertices.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i)
      poly.vertices.push_back(parse_row(reader.require("vertex"), 0, plan.dim));
    plan.polytopes.push_back(std::move(poly));
  }
  finish(reader);
  return plan;
}

// ---------------------------------------------------------------------------
// Vectors and points

void write_vectors(const std::vector<PayloadMessage>& messages, std::ostream& out) {
  out << kVectorsMagic << ' ' << kFormatVersion << '\n';
  for (const PayloadMessage& msg : messages) {
    out << msg.index;
    for (Eigen::Index i = 0; i < msg.payload.size(); ++i) out << ' ' << format_double(msg.payload[i]);
    out << '\n';
  }
}

std::vector<PayloadMessage> read_vectors(std::istream& in) {
  LineReader reader(in);
  read_magic(reader, kVectorsMagic);
  std::vector<PayloadMessage> out;
  Eigen::Index width = -1;
  while (auto line = reader.next()) {
    if (line->tokens.size() < 2) throw ParseError(line->number, "expected '<index> <payload...>'");
    PayloadMessage msg;
    msg.index = parse_count(line->tokens[0], line->number);
    msg.payload = parse_row(*line, 1, width);
    width = msg.payload.size();
    out.push_back(std::move(msg));
  }
  return out;
}

void write_points(const PointSet& points, std::ostream& out) {
  out << kPointsMagic << ' ' << kFormatVersion << '\n';
  for (Eigen::Index j = 0; j < points.size(); ++j) write_row(out, points.point(j));
}

PointSet read_points(std::istream& in) {
  LineReader reader(in);
  read_magic(reader, kPointsMagic);
  std::vector<Vector> rows;
  Eigen::Index width = -1;
  while (auto line = reader.next()) {
    rows.push_back(parse_row(*line, 0, width));
    width = rows.back().size();
  }
  if (rows.empty()) throw ParseError(reader.number() + 1, "no points");
  return PointSet::from_points(rows);
}

// ---------------------------------------------------------------------------
// Files

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path.string() + "' for reading");
  return in;
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError(0, "cannot open '" + path.string() + "' for writing");
  fn(out);
  out.flush();
  if (!out) throw ParseError(0, "write to '" + path.string() + "' failed");
}

}  // namespace

void save_plan(const StegoPlan& plan, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_plan(plan, out); });
}

StegoPlan load_plan(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_plan(in);
}

void save_vectors(const std::vector<PayloadMessage>& messages, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_vectors(messages, out); });
}

std::vector<PayloadMessage> load_vectors(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_vectors(in);
}

PointSet load_points(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_points(in);
}

}  // namespace jstego

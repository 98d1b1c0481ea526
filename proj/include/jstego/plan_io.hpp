#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "jstego/error.hpp"
#include "jstego/mvee.hpp"
#include "jstego/stego.hpp"

// Line-oriented text formats. Every file opens with a magic line
// "<KIND> <version>"; reals use the shortest decimal form that reads back
// to the same double.
//
//   JSTEGO-PLAN 1            JSTEGO-VECTORS 1         JSTEGO-POINTS 1
//   dim <n>                  <index> <v_1> ... <v_k>  <x_1> ... <x_n>
//   polytopes <count>        ...                      ...
//   threshold <tau>
//   polytope <m>
//   <x_1> ... <x_n>          (m lines)
//   ...
//
// Blank lines and lines starting with '#' are ignored on input.
namespace jstego {

inline constexpr std::string_view kPlanMagic = "JSTEGO-PLAN";
inline constexpr std::string_view kVectorsMagic = "JSTEGO-VECTORS";
inline constexpr std::string_view kPointsMagic = "JSTEGO-POINTS";
inline constexpr int kFormatVersion = 1;

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& detail)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + detail),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Shortest round-trip decimal form of a finite double.
std::string format_double(double v);
/// Parses a whole token as a finite double; throws ParseError.
double parse_double(std::string_view token, std::size_t line);

void write_plan(const StegoPlan& plan, std::ostream& out);
StegoPlan read_plan(std::istream& in);

void write_vectors(const std::vector<PayloadMessage>& messages, std::ostream& out);
std::vector<PayloadMessage> read_vectors(std::istream& in);

void write_points(const PointSet& points, std::ostream& out);
PointSet read_points(std::istream& in);

// File wrappers; I/O failures surface as ParseError at line 0.
void save_plan(const StegoPlan& plan, const std::filesystem::path& path);
StegoPlan load_plan(const std::filesystem::path& path);
void save_vectors(const std::vector<PayloadMessage>& messages, const std::filesystem::path& path);
std::vector<PayloadMessage> load_vectors(const std::filesystem::path& path);
PointSet load_points(const std::filesystem::path& path);

}  // namespace jstego

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace concede {

/// Binary task label: argumentative concession vs any other use of the marker.
enum class Label { ArgC, Other };

/// The four polysemous target markers.
enum class Marker { But, Though, However, While };

enum class Split { Train, Dev, Test, Unlabeled };

std::string_view to_string(Label label);
std::string_view to_string(Marker marker);
std::string_view to_string(Split split);

std::optional<Label> parse_label(std::string_view s);
std::optional<Marker> parse_marker(std::string_view s);
std::optional<Split> parse_split(std::string_view s);

inline constexpr Marker kAllMarkers[] = {Marker::But, Marker::Though, Marker::However,
                                         Marker::While};

/// +1 for arg_c, -1 for other (the SVM sign convention).
inline int label_sign(Label label) { return label == Label::ArgC ? 1 : -1; }
/// Ties resolve to arg_c.
inline Label label_from_decision(double decision) {
  return decision >= 0.0 ? Label::ArgC : Label::Other;
}

/// Malformed or inconsistent input data. Carries the 1-based line number when known.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Feature vectors and models built against different vocabularies were mixed.
class VersionMismatchError : public std::runtime_error {
 public:
  VersionMismatchError(const std::string& expected, const std::string& actual)
      : std::runtime_error("vocabulary version mismatch: expected '" + expected + "', got '" +
                           actual + "'") {}
};

}  // namespace concede

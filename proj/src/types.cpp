#include "concede/types.hpp"

namespace concede {

std::string_view to_string(Label label) {
  return label == Label::ArgC ? "arg_c" : "other";
}

std::string_view to_string(Marker marker) {
  switch (marker) {
    case Marker::But: return "but";
    case Marker::Though: return "though";
    case Marker::However: return "however";
    case Marker::While: return "while";
  }
  return "but";
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
    case Split::Unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

std::optional<Label> parse_label(std::string_view s) {
  if (s == "arg_c") return Label::ArgC;
  if (s == "other") return Label::Other;
  return std::nullopt;
}

std::optional<Marker> parse_marker(std::string_view s) {
  for (Marker m : kAllMarkers)
    if (to_string(m) == s) return m;
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view s) {
  for (Split sp : {Split::Train, Split::Dev, Split::Test, Split::Unlabeled})
    if (to_string(sp) == s) return sp;
  return std::nullopt;
}

}  // namespace concede

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace concede::builtin {

inline constexpr std::string_view kStopwordsVersion = "stopwords-1";
inline constexpr std::string_view kHedgesVersion = "hedges-1";

const std::vector<std::string_view>& stopwords();
const std::vector<std::string_view>& hedges();

}  // namespace concede::builtin

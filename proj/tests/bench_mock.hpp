#pragma once

// A 20-item benchmark whose pass set is known by construction: items whose
// index is in kSolvable get exactly one well-formed, faithful translation at
// a digest-chosen sample index; every other sample is a parse error.

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "herald/digest.hpp"
#include "herald/mock_roles.hpp"
#include "herald/text.hpp"
#include "herald/validator.hpp"

namespace herald::testing {

inline constexpr std::array<int, 13> kSolvable{0, 1, 3, 4, 6, 7, 9, 10, 12, 14, 15, 17, 19};

inline std::vector<BenchmarkItem> pass_set_benchmark() {
  std::vector<BenchmarkItem> items;
  for (int i = 0; i < 20; ++i) {
    items.push_back({"item" + std::to_string(i),
                     std::to_string(i) + " + " + std::to_string(i + 1) + " = " + std::to_string(2 * i + 1),
                     std::nullopt});
  }
  return items;
}

/// Sample index (in [0, 128)) of the one good translation for `informal`.
inline int good_sample_index(std::string_view informal) {
  return static_cast<int>(std::stoul(digest(informal).substr(0, 8), nullptr, 16) % 128);
}

inline bool solvable(std::string_view informal) {
  for (int i : kSolvable) {
    if (pass_set_benchmark()[i].informal_text == informal) return true;
  }
  return false;
}

inline std::string pass_set_translate(std::string_view prompt, int index, std::string_view) {
  const auto informal = extract_tagged(prompt, "informal").value_or("");
  if (solvable(informal) && index == good_sample_index(informal)) {
    return "theorem item_" + std::to_string(index) + " : " + informal + " := by sorry";
  }
  return "theorem item_" + std::to_string(index) + " : := by";
}

struct PassSetRoles {
  Gateway gateway{GatewayConfig{.max_in_flight = 16}, [](std::chrono::milliseconds) {}};
  BoundRole translator{RoleBinding{}, std::make_unique<MockProvider>("translator", pass_set_translate)};
  BoundRole back{RoleBinding{}, std::make_unique<MockProvider>("back", mock_back_translate)};
  BoundRole judge{RoleBinding{}, std::make_unique<MockProvider>("judge", mock_nli_judge)};

  ValidationRoles roles() { return {gateway, translator, back, judge}; }
};

}  // namespace herald::testing

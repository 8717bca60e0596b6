#ifndef LIGHTLIKE_REPORT_HPP
#define LIGHTLIKE_REPORT_HPP

#include <json.hpp>
#include <string>

namespace lightlike::report {

using Json = nlohmann::ordered_json;

// Structured result tree, serialized as machine-readable JSON and rendered
// as human-readable text. Deterministic given scenario + seed.
struct Report {
  Json data;
  int exit_code = 0;

  std::string json_text() const { return data.dump(2); }
  std::string text() const;
};

}  // namespace lightlike::report

#endif

#include "lightlike/report.hpp"

#include <iomanip>
#include <sstream>

namespace lightlike::report {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << std::scientific << v;
  return os.str();
}

std::string yn(bool b) { return b ? "yes" : "no"; }

void render_checks(std::ostringstream& os, const Json& checks, const char* title) {
  if (!checks.is_array()) return;
  os << title << ":\n";
  for (const auto& c : checks)
    os << "  " << (c["pass"].get<bool>() ? "pass" : "FAIL") << "  "
       << c["name"].get<std::string>() << "  (residual " << num(c["residual"]) << ")\n";
}

}  // namespace

std::string Report::text() const {
  std::ostringstream os;
  const Json& d = data;
  os << "scenario: " << d.value("scenario", std::string("?")) << "\n";
  if (d.contains("ambient")) {
    const Json& a = d["ambient"];
    os << "ambient: " << a.value("name", std::string("?")) << "  dim "
       << a.value("dim", 0) << "  mu " << a.value("mu", 0.0) << "\n";
    render_checks(os, a.value("admission", Json::array()), "admission suite");
    render_checks(os, a.value("nearly_mu_sasakian", Json::array()),
                  "nearly-mu-Sasakian");
    render_checks(os, a.value("h_tensor", Json::array()), "H-tensor identities");
  }
  if (d.contains("radical_rank"))
    os << "radical rank: " << d["radical_rank"].get<int>() << "  ("
       << d.value("points_analyzed", 0) << " points)\n";
  if (d.contains("verdicts")) {
    os << "verdicts:\n";
    for (const auto& [k, v] : d["verdicts"].items())
      os << "  " << k << ": " << yn(v.get<bool>()) << "\n";
  }
  if (d.contains("sigma") && d["sigma"].is_array() && !d["sigma"].empty()) {
    os << "sigma certificates (first point):\n";
    for (const auto& s : d["sigma"])
      os << "  sigma_" << s["u"].get<int>() << " = " << s["value"].get<double>()
         << "  (collinearity " << num(s["residual"]) << ")\n";
  }
  if (d.contains("residuals")) {
    os << "max residuals:\n";
    for (const auto& [k, v] : d["residuals"].items())
      os << "  " << k << ": " << num(v.get<double>()) << "\n";
  }
  if (d.contains("expectations") && !d["expectations"].empty()) {
    os << "expectations:\n";
    std::size_t wname = 8;
    for (const auto& e : d["expectations"])
      wname = std::max(wname, e["name"].get<std::string>().size());
    os << "  " << std::left << std::setw(int(wname)) << "quantity"
       << "  expected      computed      |diff|        status\n";
    for (const auto& e : d["expectations"]) {
      os << "  " << std::left << std::setw(int(wname)) << e["name"].get<std::string>()
         << "  " << std::setw(12) << e["expected"].dump() << "  " << std::setw(12)
         << e["computed"].dump() << "  ";
      if (e.contains("diff") && e["diff"].is_number())
        os << std::setw(12) << num(e["diff"].get<double>());
      else
        os << std::setw(12) << "-";
      os << "  " << (e["pass"].get<bool>() ? "pass" : "FAIL") << "\n";
    }
  }
  os << "exit: " << exit_code << "\n";
  return os.str();
}

}  // namespace lightlike::report

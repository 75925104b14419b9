#include "doobkit/report.hpp"

#include <sstream>

namespace doobkit::report {

namespace {

Json nullable(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json classification(const Classification& c) {
  const Violation& v = c.worst_violation;
  return {{"kind", to_string(c.kind)},
          {"worst_violation", {{"time", v.time}, {"cell", v.cell}, {"extreme", v.extreme}, {"magnitude", v.magnitude}}},
          {"martingale_defect", c.martingale_defect}};
}

Json decomposition(const OptionalDecomposition* d, const VerificationReport* verification, const std::string& error) {
  Json out;
  const bool ok = d != nullptr && (verification == nullptr || verification->ok);
  out["status"] = ok ? "ok" : "fail";
  out["martingale"] = d ? Json(d->martingale.per_time()) : Json::array();
  out["compensator"] = d ? Json(d->compensator.per_time()) : Json::array();
  Json steps = Json::array();
  if (d)
    for (const Xi0Step& s : d->steps)
      steps.push_back({{"m", s.m}, {"method", to_string(s.method)}, {"alpha", nullable(s.alpha)}});
  out["steps"] = std::move(steps);
  Json checks = Json::array();
  if (verification)
    for (const Check& c : verification->checks) checks.push_back({{"name", c.name}, {"max_violation", c.max_violation}});
  out["checks"] = std::move(checks);
  if (!error.empty()) out["error"] = error;
  return out;
}

Json pricing(const PricingResult& r, const TradingStrategy* st) {
  Json out;
  out["mode"] = to_string(r.mode);
  out["fair_price"] = r.fair_price;
  out["gamma"] = r.gamma ? Json(*r.gamma) : Json(nullptr);
  out["dominator"] = r.dominator.values;
  out["lower_bound"] = r.lower_bound;
  out["duality_gap"] = r.certificate.duality_gap();
  if (st)
    out["strategy"] = {{"H0", st->cash}, {"H", st->risky}, {"capital", st->capital.per_time()}};
  else
    out["strategy"] = nullptr;
  return out;
}

Json emm(const EmmResult& r, const std::optional<EmmReport>& check) {
  Json out;
  if (r.measure) {
    const auto p = r.measure->probs();
    out["measure"] = std::vector<double>(p.begin(), p.end());
  } else {
    out["measure"] = nullptr;
  }
  out["min_slack"] = r.min_slack;
  out["max_residual"] = check ? Json(check->max_residual) : Json(nullptr);
  return out;
}

Json audit(const std::vector<AuditResult>& results) {
  Json out = Json::array();
  for (const AuditResult& r : results) {
    Json e;
    e["claim"] = to_string(r.claim);
    e["verdict"] = to_string(r.verdict);
    e["violation"] = r.violation;
    e["detail"] = r.detail;
    e["trials"] = r.trials;
    e["instance"] = r.instance ? instance_to_json(*r.instance) : Json(nullptr);
    out.push_back(std::move(e));
  }
  return out;
}

std::string capital_csv(const FilteredSpace& space, const TradingStrategy& st, const AdaptedProcess& s) {
  std::ostringstream os;
  os.precision(17);
  os << "time,cell,X,H0,H,S\n";
  for (int m = 0; m <= space.horizon(); ++m)
    for (std::size_t c = 0; c < space.cell_count(m); ++c) {
      const std::size_t node = m == 0 ? 0 : space.predecessor(m, c);
      const auto mi = static_cast<std::size_t>(m);
      os << m << ',' << c << ',' << st.capital.value(m, c) << ',' << st.cash[mi][node] << ',' << st.risky[mi][node]
         << ',' << s.value(m, c) << '\n';
    }
  return os.str();
}

}  // namespace doobkit::report

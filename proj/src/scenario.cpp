#include "doobkit/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "doobkit/error.hpp"

namespace doobkit {

namespace {

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorCode::Schema, what); }

const Json& member(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) schema(std::string("missing \"") + key + "\"");
  return obj.at(key);
}

std::vector<double> numbers(const Json& arr, const std::string& where) {
  if (!arr.is_array()) schema(where + " must be an array of numbers");
  std::vector<double> out;
  for (const Json& v : arr) {
    if (!v.is_number()) schema(where + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

int integer(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) schema(where + " must be an integer");
  return v.get<int>();
}

// Per time: canonical index of each file cell, from its first atom.
std::vector<std::vector<std::size_t>> file_to_canonical(const FilteredSpace& space,
                                                        const std::vector<Partition>& file_cells) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t m = 0; m < file_cells.size(); ++m) {
    std::vector<std::size_t> map;
    for (const Cell& c : file_cells[m]) map.push_back(space.cell_of(static_cast<int>(m), c.front()));
    out.push_back(std::move(map));
  }
  return out;
}

std::vector<double> reorder(const std::vector<double>& file_values, const std::vector<std::size_t>& map,
                            const std::string& where) {
  if (file_values.size() != map.size())
    schema(where + ": expected " + std::to_string(map.size()) + " values, got " + std::to_string(file_values.size()));
  std::vector<double> out(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) out[map[i]] = file_values[i];
  return out;
}

}  // namespace

const AdaptedProcess* Scenario::process(const std::string& name) const {
  for (const auto& [n, p] : processes)
    if (n == name) return &p;
  return nullptr;
}

const ScenarioClaim* Scenario::claim(const std::string& name) const {
  for (const auto& [n, c] : claims)
    if (n == name) return &c;
  return nullptr;
}

const MeasureFamily& Scenario::require_family() const {
  if (!family) schema("scenario lists no measures");
  return *family;
}

const AdaptedProcess& Scenario::require_process(const std::string& name) const {
  if (const auto* p = process(name)) return *p;
  schema("no process named \"" + name + "\"");
}

const ScenarioClaim& Scenario::require_claim(const std::string& name) const {
  if (const auto* c = claim(name)) return *c;
  schema("no claim named \"" + name + "\"");
}

Scenario parse_scenario(const Json& doc) {
  if (!doc.is_object()) schema("scenario must be a JSON object");
  static const std::set<std::string> known{"atoms", "horizon", "filtration", "measures", "processes", "claims",
                                           "description"};
  for (const auto& item : doc.items())
    if (!known.count(item.key())) schema("unknown key \"" + item.key() + "\"");

  const int atoms = integer(member(doc, "atoms"), "atoms");
  const int horizon = integer(member(doc, "horizon"), "horizon");
  if (atoms < 1) schema("atoms must be positive");
  if (horizon < 1) schema("horizon must be at least 1");
  const Json& filt = member(doc, "filtration");
  if (!filt.is_array() || filt.size() != static_cast<std::size_t>(horizon) + 1)
    schema("filtration must list horizon + 1 partitions");

  std::vector<Partition> parts;
  for (std::size_t m = 0; m < filt.size(); ++m) {
    const Json& p = filt[m];
    if (!p.is_array()) schema("filtration[" + std::to_string(m) + "] must be an array of cells");
    Partition part;
    for (const Json& cell : p) {
      if (!cell.is_array() || cell.empty()) schema("cells must be nonempty arrays of atom indices");
      Cell c;
      for (const Json& a : cell) {
        const int idx = integer(a, "atom index");
        if (idx < 1 || idx > atoms)
          throw Error(ErrorCode::BadCover, "atom " + std::to_string(idx) + " outside 1.." + std::to_string(atoms));
        c.push_back(static_cast<std::size_t>(idx - 1));
      }
      part.push_back(std::move(c));
    }
    parts.push_back(std::move(part));
  }

  Scenario sc{FilteredSpace::build(static_cast<std::size_t>(atoms), parts), {}, std::nullopt, {}, {}};
  const auto maps = file_to_canonical(sc.space, parts);

  if (doc.contains("measures")) {
    const Json& ms = doc.at("measures");
    if (!ms.is_object()) schema("measures must be an object");
    std::vector<Measure> extremes;
    for (const auto& item : ms.items()) {
      auto probs = numbers(item.value(), "measure " + item.key());
      if (probs.size() != static_cast<std::size_t>(atoms))
        schema("measure " + item.key() + " must have one entry per atom");
      sc.measure_names.push_back(item.key());
      extremes.emplace_back(std::move(probs));
    }
    if (!extremes.empty()) sc.family.emplace(std::move(extremes));
  }

  if (doc.contains("processes")) {
    const Json& ps = doc.at("processes");
    if (!ps.is_object()) schema("processes must be an object");
    for (const auto& item : ps.items()) {
      const Json& slices = item.value();
      if (!slices.is_array() || slices.size() != static_cast<std::size_t>(horizon) + 1)
        schema("process " + item.key() + " must have horizon + 1 slices");
      std::vector<std::vector<double>> values;
      for (std::size_t m = 0; m < slices.size(); ++m)
        values.push_back(reorder(numbers(slices[m], "process " + item.key()), maps[m],
                                 "process " + item.key() + " time " + std::to_string(m)));
      sc.processes.emplace_back(item.key(), AdaptedProcess(sc.space, std::move(values)));
    }
  }

  if (doc.contains("claims")) {
    const Json& cs = doc.at("claims");
    if (!cs.is_object()) schema("claims must be an object");
    for (const auto& item : cs.items()) {
      ScenarioClaim c;
      c.time = integer(member(item.value(), "time"), "claim time");
      if (c.time < 0 || c.time > horizon) schema("claim " + item.key() + " time out of range");
      c.values = reorder(numbers(member(item.value(), "values"), "claim " + item.key()),
                         maps[static_cast<std::size_t>(c.time)], "claim " + item.key());
      c.atoms = expand_cells(sc.space, c.time, c.values);
      sc.claims.emplace_back(item.key(), std::move(c));
    }
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Json doc;
  try {
    doc = Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    schema(std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

Json to_json(const Scenario& sc) {
  Json doc;
  const FilteredSpace& space = sc.space;
  doc["atoms"] = space.n_atoms();
  doc["horizon"] = space.horizon();
  Json filt = Json::array();
  for (int m = 0; m <= space.horizon(); ++m) {
    Json part = Json::array();
    for (const Cell& c : space.partition(m)) {
      Json cell = Json::array();
      for (std::size_t a : c) cell.push_back(a + 1);
      part.push_back(std::move(cell));
    }
    filt.push_back(std::move(part));
  }
  doc["filtration"] = std::move(filt);
  if (sc.family) {
    Json ms = Json::object();
    for (std::size_t i = 0; i < sc.family->size(); ++i) {
      const auto probs = (*sc.family)[i].probs();
      ms[sc.measure_names.at(i)] = std::vector<double>(probs.begin(), probs.end());
    }
    doc["measures"] = std::move(ms);
  }
  if (!sc.processes.empty()) {
    Json ps = Json::object();
    for (const auto& [name, p] : sc.processes) ps[name] = p.per_time();
    doc["processes"] = std::move(ps);
  }
  if (!sc.claims.empty()) {
    Json cs = Json::object();
    for (const auto& [name, c] : sc.claims) cs[name] = {{"time", c.time}, {"values", c.values}};
    doc["claims"] = std::move(cs);
  }
  return doc;
}

Json instance_to_json(const AuditInstance& in) {
  Scenario sc{in.space, {}, in.family, {}, {}};
  for (std::size_t i = 0; i < in.family.size(); ++i) sc.measure_names.push_back("P" + std::to_string(i + 1));
  ScenarioClaim xi;
  xi.time = in.space.horizon();
  xi.values = restrict_to_cells(in.space, in.xi, xi.time, 0.0);
  xi.atoms = in.xi;
  sc.claims.emplace_back("xi", std::move(xi));
  if (in.f) sc.processes.emplace_back("f", *in.f);
  return to_json(sc);
}

AuditInstance instance_from_scenario(const Scenario& sc, const std::string& xi_claim,
                                     const std::optional<std::string>& process) {
  std::optional<AdaptedProcess> f;
  if (process) f = sc.require_process(*process);
  return AuditInstance{sc.space, sc.require_family(), sc.require_claim(xi_claim).atoms, std::move(f)};
}

}  // namespace doobkit

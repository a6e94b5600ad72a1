#include "dtcausal/model_io.hpp"

#include <fstream>
#include <sstream>

#include "dtcausal/error.hpp"

namespace dtc {

namespace {

const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw ModelError(std::string("missing field '") + key + "'");
  return obj.at(key);
}

MultiRegimeModel parse_model(const Json& doc) {
  const std::string mode = field(doc, "mode").get<std::string>();
  if (mode != "itt" && mode != "raw") throw ModelError("mode must be \"itt\" or \"raw\"");

  Dag dag;
  for (const auto& v : field(doc, "variables")) {
    Node n;
    n.name = field(v, "name").get<std::string>();
    n.states = field(v, "states").get<std::vector<std::string>>();
    n.latent = v.value("latent", false);
    dag.add_node(std::move(n));
  }
  const Json regimes = doc.value("regimes", Json::array());
  for (const auto& r : regimes) {
    const std::string target = field(r, "target").get<std::string>();
    if (r.contains("itt")) {
      if (!dag.has_node(target)) throw ModelError("regime target '" + target + "' is not a variable");
      dag.node(target).deterministic = true;
    }
  }
  for (const auto& r : regimes) {
    const std::string name = field(r, "name").get<std::string>();
    const std::string target = field(r, "target").get<std::string>();
    dag.add_regime(name, target);
    dag.add_edge(name, target);
    if (r.contains("itt")) dag.add_edge(r.at("itt").get<std::string>(), target, true);
  }

  if (mode == "itt") {
    std::vector<Cpt> cpts;
    for (const auto& c : field(doc, "cpts")) {
      Cpt cpt;
      cpt.child = field(c, "child").get<std::string>();
      cpt.parents = field(c, "parents").get<std::vector<std::string>>();
      cpt.rows = field(c, "rows").get<std::vector<std::vector<double>>>();
      for (const auto& p : cpt.parents) dag.add_edge(p, cpt.child);
      cpts.push_back(std::move(cpt));
    }
    return MultiRegimeModel::itt(std::move(dag), std::move(cpts));
  }

  std::map<RegimeAssignment, std::vector<double>> tables;
  for (const auto& t : field(doc, "raw_regimes")) {
    RegimeAssignment a;
    for (const auto& [name, value] : field(t, "assignment").items())
      a[name] = RegimeValue::parse(value.get<std::string>());
    if (!tables.emplace(a, field(t, "probs").get<std::vector<double>>()).second)
      throw ModelError("duplicate raw regime assignment");
  }
  return MultiRegimeModel::raw(std::move(dag), std::move(tables));
}

}  // namespace

MultiRegimeModel model_from_json(const Json& doc) {
  try {
    return parse_model(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed model document: ") + e.what());
  } catch (const GraphError& e) {
    throw ModelError(e.what());
  }
}

Json model_to_json(const MultiRegimeModel& model) {
  Json doc;
  doc["mode"] = model.mode() == ModelMode::Itt ? "itt" : "raw";
  Json vars = Json::array();
  for (const auto& v : model.variables()) {
    const Node& n = model.dag().node(v);
    Json j;
    j["name"] = n.name;
    j["states"] = n.states;
    if (n.latent) j["latent"] = true;
    vars.push_back(std::move(j));
  }
  doc["variables"] = std::move(vars);
  Json regimes = Json::array();
  for (const auto& r : model.regimes()) {
    Json j;
    j["name"] = r;
    j["target"] = model.dag().node(r).target;
    if (auto i = model.itt_of(r); !i.empty()) j["itt"] = i;
    regimes.push_back(std::move(j));
  }
  doc["regimes"] = std::move(regimes);
  if (model.mode() == ModelMode::Itt) {
    Json cpts = Json::array();
    for (const auto& c : model.cpts()) {
      Json j;
      j["child"] = c.child;
      j["parents"] = c.parents;
      j["rows"] = c.rows;
      cpts.push_back(std::move(j));
    }
    doc["cpts"] = std::move(cpts);
  } else {
    Json tables = Json::array();
    for (const auto& [a, probs] : model.raw_tables()) {
      Json j;
      Json assignment = Json::object();
      for (const auto& [name, value] : a) assignment[name] = value.to_string();
      j["assignment"] = std::move(assignment);
      j["probs"] = probs;
      tables.push_back(std::move(j));
    }
    doc["raw_regimes"] = std::move(tables);
  }
  return doc;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MultiRegimeModel load_model(const std::string& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(path + ": " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace dtc

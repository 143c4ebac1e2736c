#include "reuse_assort/instance_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "reuse_assort/errors.hpp"

namespace reuse_assort {

using nlohmann::json;

namespace {

json durations_to_json(const DurationDist& d) {
  json out = json::array();
  for (const auto& e : d.entries()) {
    if (e.periods == kInfiniteDuration) {
      out.push_back(json::array({"inf", e.prob}));
    } else {
      out.push_back(json::array({e.periods, e.prob}));
    }
  }
  return out;
}

DurationDist durations_from_json(const json& j) {
  std::vector<DurationEntry> entries;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2) {
      throw ModelError("duration entries must be [d, p] pairs");
    }
    DurationEntry e{};
    if (pair[0].is_string()) {
      if (pair[0].get<std::string>() != "inf") {
        throw ModelError("duration string must be \"inf\"");
      }
      e.periods = kInfiniteDuration;
    } else {
      e.periods = pair[0].get<int>();
    }
    e.prob = pair[1].get<double>();
    entries.push_back(e);
  }
  return DurationDist(std::move(entries));
}

std::string with_line_context(const std::string& text, std::size_t byte, const std::string& msg) {
  std::size_t line = 1;
  std::size_t line_start = 0;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      line_start = k + 1;
    }
  }
  std::size_t line_end = text.find('\n', line_start);
  if (line_end == std::string::npos) line_end = text.size();
  std::ostringstream os;
  os << "line " << line << ": " << msg << "\n  " << text.substr(line_start, line_end - line_start);
  return os.str();
}

}  // namespace

std::string instance_to_json(const Instance& inst, int indent) {
  json j;
  j["n"] = inst.num_products();
  j["T"] = inst.horizon();
  j["c"] = inst.inventories();
  json types = json::array();
  for (const auto& ty : inst.types()) {
    json t;
    t["id"] = ty.id;
    if (const auto* mnl = ty.choice.as_mnl()) {
      t["alpha0"] = mnl->outside_weight;
      t["alpha"] = mnl->weights;
    } else {
      json table = json::array();
      for (const auto& [s, row] : *ty.choice.as_table()) {
        table.push_back({{"S", s.to_vector()}, {"probs", row}});
      }
      t["table"] = table;
    }
    t["fees"] = ty.fees;
    json durs = json::array();
    for (const auto& d : ty.durations) durs.push_back(durations_to_json(d));
    t["durations"] = durs;
    types.push_back(t);
  }
  j["types"] = types;
  j["arrival"] = inst.arrival();
  if (auto k = inst.family().cardinality_limit()) {
    j["family"] = {{"max_cardinality", *k}};
  } else {
    j["family"] = "all";
  }
  return j.dump(indent);
}

Instance instance_from_json(const std::string& text, bool validate) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(with_line_context(text, e.byte == 0 ? 0 : e.byte - 1, e.what()));
  }
  try {
    const int n = j.at("n").get<int>();
    const int T = j.at("T").get<int>();
    auto c = j.at("c").get<std::vector<int>>();
    if (static_cast<int>(c.size()) != n) throw ModelError("\"c\" must have n entries");
    std::vector<ConsumerType> types;
    for (const auto& t : j.at("types")) {
      ConsumerType ty{t.value("id", std::to_string(types.size())),
                      ChoiceModel::mnl(0.0, std::vector<double>(n, 0.0)),
                      t.at("fees").get<std::vector<double>>(),
                      {}};
      if (t.contains("table")) {
        ChoiceModel::Table table;
        for (const auto& row : t.at("table")) {
          table[ProductSet::from_vector(row.at("S").get<std::vector<int>>())] =
              row.at("probs").get<std::vector<double>>();
        }
        ty.choice = ChoiceModel::explicit_table(n, std::move(table));
      } else {
        ty.choice = ChoiceModel::mnl(t.at("alpha0").get<double>(),
                                     t.at("alpha").get<std::vector<double>>());
      }
      for (const auto& d : t.at("durations")) ty.durations.push_back(durations_from_json(d));
      types.push_back(std::move(ty));
    }
    auto arrival = j.at("arrival").get<std::vector<std::vector<double>>>();
    FeasibleFamily family = FeasibleFamily::all_subsets();
    if (j.contains("family")) {
      const auto& f = j.at("family");
      if (f.is_string()) {
        if (f.get<std::string>() != "all") throw ModelError("unknown family " + f.dump());
      } else {
        family = FeasibleFamily::max_cardinality(f.at("max_cardinality").get<int>());
      }
    }
    if (validate) {
      return Instance(std::move(c), T, std::move(types), std::move(arrival), family);
    }
    return Instance::unchecked(std::move(c), T, std::move(types), std::move(arrival), family);
  } catch (const json::exception& e) {
    throw ModelError(std::string("instance schema: ") + e.what());
  }
}

Instance load_instance(const std::string& path, bool validate) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str(), validate);
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write " + path);
  out << instance_to_json(inst) << "\n";
}

}  // namespace reuse_assort

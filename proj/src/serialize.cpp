#include "opqkd/serialize.hpp"

#include <json.hpp>

#include "opqkd/errors.hpp"
#include "opqkd/tolerance.hpp"

namespace opqkd {

namespace {

using nlohmann::json;

json complex_list(std::span<const Complex> v) {
  json out = json::array();
  for (const auto& z : v) out.push_back({z.real(), z.imag()});
  return out;
}

std::vector<Complex> parse_complex_list(const json& j) {
  std::vector<Complex> v;
  for (const auto& z : j) v.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  return v;
}

}  // namespace

std::string stateset_to_json(const StateSet& set) {
  json doc;
  doc["format"] = "opqkd-stateset";
  doc["version"] = 1;
  doc["n"] = set.n();
  doc["display_order"] = set.layout().display_order;
  json states = json::array();
  for (const auto& s : set.states()) {
    states.push_back({{"index", s.index},
                      {"ket_a", complex_list(s.ket_a.amplitudes())},
                      {"ket_b", complex_list(s.ket_b.amplitudes())}});
  }
  doc["states"] = std::move(states);
  json tiles = json::array();
  for (const Tile& t : set.layout().tiles) {
    json cells = json::array();
    for (const Cell& c : t.cells) cells.push_back({c.a, c.b});
    json amps = json::array();
    for (const auto& row : t.amplitudes) amps.push_back(complex_list(row));
    tiles.push_back({{"orientation", to_string(t.orientation)},
                     {"fixed_index", t.fixed_index},
                     {"cells", std::move(cells)},
                     {"hosted", t.hosted},
                     {"amplitudes", std::move(amps)}});
  }
  doc["tiles"] = std::move(tiles);
  return doc.dump(1) + "\n";
}

StateSet stateset_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidSet(std::string("stateset: malformed JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "opqkd-stateset" ||
        doc.at("version").get<int>() != 1) {
      throw InvalidSet("stateset: unsupported format or version");
    }
    DominoLayout layout;
    layout.n = doc.at("n").get<int>();
    layout.display_order = doc.at("display_order").get<std::vector<int>>();
    for (const auto& jt : doc.at("tiles")) {
      Tile t;
      t.orientation = orientation_from_string(jt.at("orientation").get<std::string>());
      t.fixed_index = jt.at("fixed_index").get<int>();
      for (const auto& c : jt.at("cells")) t.cells.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
      t.hosted = jt.at("hosted").get<std::vector<int>>();
      for (const auto& row : jt.at("amplitudes")) t.amplitudes.push_back(parse_complex_list(row));
      layout.tiles.push_back(std::move(t));
    }
    StateSet set = StateSet::from_layout(std::move(layout));

    const auto& records = doc.at("states");
    if (records.size() != set.size()) throw InvalidSet("stateset: state count disagrees with tiles");
    for (const auto& r : records) {
      const int idx = r.at("index").get<int>();
      if (idx < 0 || static_cast<std::size_t>(idx) >= set.size()) {
        throw InvalidSet("stateset: state index out of range");
      }
      const auto a = Ket::from_amplitudes(parse_complex_list(r.at("ket_a")));
      const auto b = Ket::from_amplitudes(parse_complex_list(r.at("ket_b")));
      const auto& s = set[static_cast<std::size_t>(idx)];
      if (a.dim() != s.ket_a.dim() || b.dim() != s.ket_b.dim() ||
          !states_equivalent(a, s.ket_a) || !states_equivalent(b, s.ket_b)) {
        throw InvalidSet("stateset: state record disagrees with its tile");
      }
    }
    return set;
  } catch (const json::exception& e) {
    throw InvalidSet(std::string("stateset: ") + e.what());
  }
}

}  // namespace opqkd

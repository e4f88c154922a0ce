#include "bmot/summary.hpp"

#include <cmath>
#include <sstream>

#include "bmot/wasserstein.hpp"
#include "json.hpp"

namespace bmot {

namespace {
using Json = nlohmann::ordered_json;
}

std::string summary_to_json_text(const RunConfig& config,
                                 const RunResult& result) {
  Json root;
  root["version"] = 1;
  Json echo = Json::parse(config_to_json_text(config));
  echo.erase("threads");  // execution detail; summaries are thread-invariant
  root["config"] = echo;

  Json levels = Json::array();
  for (const LevelStats& st : result.levels) {
    Json lv;
    lv["level"] = st.level;
    lv["width"] = st.width;
    lv["active_boxes"] = st.active_boxes;
    lv["edge_boxes"] = st.edge_boxes;
    lv["discarded_boxes"] = st.discarded_boxes;
    lv["boundary_boxes"] = st.boundary_boxes;
    lv["boundary_mass"] = st.boundary_mass;
    lv["interior_cost"] = st.interior_cost;
    lv["worst_case_error"] = st.worst_case_error;
    lv["auction_rounds"] = st.auction_rounds;
    lv["epsilon_final"] = st.epsilon_final;
    levels.push_back(lv);
  }
  root["levels"] = levels;

  Json boundary;
  boundary["boxes"] = static_cast<std::int64_t>(result.boundary.size());
  boundary["mass"] = result.wasserstein.boundary_mass;
  boundary["width"] = result.geometry.width(result.boundary.level);
  root["boundary"] = boundary;

  Json wass;
  wass["available"] = result.wasserstein.available;
  if (result.wasserstein.available) {
    wass["value"] = result.wasserstein.value;
    wass["error_bound"] = result.wasserstein.error_bound;
    wass["interior_cost"] = result.wasserstein.interior_cost;
    wass["boundary_cost"] = result.wasserstein.boundary_cost;
  }
  root["wasserstein"] = wass;

  Json shifts;
  shifts["anchor"] = result.shifts.anchor;
  shifts["values"] = result.shifts.value;
  shifts["error_bounds"] = result.shifts.error_bound;
  root["shifts"] = shifts;

  Json adjacency = Json::array();
  for (const AdjacencyEdge& e : result.adjacency) {
    Json edge;
    edge["i"] = e.i;
    edge["j"] = e.j;
    edge["estimate"] = e.estimate;
    edge["pair_cost"] = e.pair_cost;
    edge["error_bound"] = e.error_bound;
    adjacency.push_back(edge);
  }
  root["adjacency"] = adjacency;
  root["residual_weights"] = result.residual_weights;

  if (!config.reference.empty() && result.wasserstein.available) {
    auto exact = exact_reference_value(config.reference);
    if (exact) {
      Json ref;
      ref["name"] = config.reference;
      ref["exact"] = *exact;
      ref["absolute_error"] = std::abs(result.wasserstein.value - *exact);
      ref["within_bound"] =
          std::abs(result.wasserstein.value - *exact) <=
          result.wasserstein.error_bound;
      root["reference"] = ref;
    }
  }
  return root.dump(2) + "\n";
}

std::string levels_to_csv_text(const RunResult& result) {
  std::ostringstream out;
  out << "level,width,active_boxes,edge_boxes,discarded_boxes,boundary_boxes,"
         "boundary_mass,interior_cost,worst_case_error,auction_rounds,"
         "epsilon_final\n";
  for (const LevelStats& st : result.levels) {
    out << st.level << ',' << format_double(st.width) << ','
        << st.active_boxes << ',' << st.edge_boxes << ','
        << st.discarded_boxes << ',' << st.boundary_boxes << ','
        << format_double(st.boundary_mass) << ','
        << format_double(st.interior_cost) << ','
        << format_double(st.worst_case_error) << ',' << st.auction_rounds
        << ',' << format_double(st.epsilon_final) << '\n';
  }
  return out.str();
}

}  // namespace bmot

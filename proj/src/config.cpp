#include "bmot/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "bmot/grid.hpp"
#include "bmot/wasserstein.hpp"
#include "json.hpp"

namespace bmot {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void reject_unknown_keys(const Json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key()))
      fail(where + ": unknown key '" + it.key() + "'");
}

double number_field(const Json& obj, const std::string& key,
                    const std::string& where) {
  if (!obj.at(key).is_number())
    fail(where + ": '" + key + "' must be a number");
  return obj.at(key).get<double>();
}

int int_field(const Json& obj, const std::string& key,
              const std::string& where) {
  if (!obj.at(key).is_number_integer())
    fail(where + ": '" + key + "' must be an integer");
  return obj.at(key).get<int>();
}

std::vector<CostTerm> parse_cost(const Json& node) {
  if (node.is_string()) {
    const std::string s = node.get<std::string>();
    if (s == "l1") return {{1.0, 1.0, 1.0}};
    if (s == "l2") return {{1.0, 2.0, 1.0}};
    if (s == "l2sq") return {{1.0, 2.0, 2.0}};
    if (s == "linf")
      return {{1.0, std::numeric_limits<double>::infinity(), 1.0}};
    fail("cost: unknown shorthand '" + s +
         "' (expected l1, l2, l2sq, or linf)");
  }
  if (!node.is_array() || node.empty())
    fail("cost: expected a shorthand string or a non-empty term array");
  std::vector<CostTerm> terms;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const Json& t = node[i];
    std::ostringstream where;
    where << "cost term " << i;
    if (!t.is_object()) fail(where.str() + ": expected an object");
    reject_unknown_keys(t, {"k", "p", "q"}, where.str());
    CostTerm term;
    if (t.contains("k")) term.k = number_field(t, "k", where.str());
    if (t.contains("p")) {
      if (t.at("p").is_string()) {
        if (t.at("p").get<std::string>() != "inf")
          fail(where.str() + ": 'p' must be a number or \"inf\"");
        term.p = std::numeric_limits<double>::infinity();
      } else {
        term.p = number_field(t, "p", where.str());
      }
    }
    if (t.contains("q")) term.q = number_field(t, "q", where.str());
    terms.push_back(term);
  }
  return terms;
}

Json cost_to_json(const GroundCost& cost) {
  Json arr = Json::array();
  for (const CostTerm& t : cost.terms()) {
    Json term;
    term["k"] = t.k;
    if (std::isinf(t.p))
      term["p"] = "inf";
    else
      term["p"] = t.p;
    term["q"] = t.q;
    arr.push_back(term);
  }
  return arr;
}

Density parse_density(const Json& node, int dim, double side,
                      double initial_width) {
  reject_unknown_keys(node, {"pieces"}, "density");
  if (!node.contains("pieces") || !node.at("pieces").is_array() ||
      node.at("pieces").empty())
    fail("density: expected a non-empty 'pieces' array");
  std::vector<DensityPiece> pieces;
  for (std::size_t i = 0; i < node.at("pieces").size(); ++i) {
    const Json& p = node.at("pieces")[i];
    std::ostringstream wh;
    wh << "density piece " << i;
    const std::string where = wh.str();
    if (!p.is_object()) fail(where + ": expected an object");
    reject_unknown_keys(p, {"lo", "hi", "kind", "t", "axis", "coefficient"},
                        where);
    DensityPiece piece;
    piece.region.dim = dim;
    for (const char* side_key : {"lo", "hi"}) {
      if (!p.contains(side_key) || !p.at(side_key).is_array() ||
          p.at(side_key).size() != static_cast<std::size_t>(dim))
        fail(where + ": '" + side_key + "' must be an array of length dim");
      for (int a = 0; a < dim; ++a) {
        double v = p.at(side_key)[a].get<double>();
        if (side_key[0] == 'l')
          piece.region.lo[a] = v;
        else
          piece.region.hi[a] = v;
      }
    }
    // Piece boundaries must lie on level-1 grid lines so no box ever
    // straddles a density discontinuity.
    for (int a = 0; a < dim; ++a)
      for (double v : {piece.region.lo[a], piece.region.hi[a]}) {
        double cells = v / initial_width;
        if (std::abs(cells - std::round(cells)) > 1e-9)
          fail(where + ": boundaries must lie on the initial grid lines");
      }
    std::string kind = "uniform";
    if (p.contains("kind")) kind = p.at("kind").get<std::string>();
    if (kind == "uniform") {
      piece.kind = PieceKind::kUniform;
      if (p.contains("t") || p.contains("axis"))
        fail(where + ": uniform pieces take no 't' or 'axis'");
    } else if (kind == "monomial") {
      piece.kind = PieceKind::kMonomial;
      if (!p.contains("t")) fail(where + ": monomial pieces need 't'");
      piece.t = number_field(p, "t", where);
      if (p.contains("axis")) fail(where + ": monomial pieces take no 'axis'");
    } else if (kind == "exp") {
      piece.kind = PieceKind::kExp;
      if (!p.contains("t")) fail(where + ": exp pieces need 't'");
      piece.t = number_field(p, "t", where);
      if (p.contains("axis")) piece.axis = int_field(p, "axis", where);
    } else {
      fail(where + ": unknown kind '" + kind + "'");
    }
    if (p.contains("coefficient"))
      piece.coefficient = number_field(p, "coefficient", where);
    pieces.push_back(piece);
  }
  return Density::build(std::move(pieces), dim, side);
}

Json density_to_json(const Density& density) {
  Json node;
  Json pieces = Json::array();
  for (const DensityPiece& p : density.pieces()) {
    Json piece;
    Json lo = Json::array(), hi = Json::array();
    for (int a = 0; a < density.dim(); ++a) {
      lo.push_back(p.region.lo[a]);
      hi.push_back(p.region.hi[a]);
    }
    piece["lo"] = lo;
    piece["hi"] = hi;
    switch (p.kind) {
      case PieceKind::kUniform:
        piece["kind"] = "uniform";
        break;
      case PieceKind::kMonomial:
        piece["kind"] = "monomial";
        piece["t"] = p.t;
        break;
      case PieceKind::kExp:
        piece["kind"] = "exp";
        piece["t"] = p.t;
        piece["axis"] = p.axis;
        break;
    }
    piece["coefficient"] = p.coefficient;
    pieces.push_back(piece);
  }
  node["pieces"] = pieces;
  return node;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("config root must be an object");
  reject_unknown_keys(root,
                      {"version", "title", "dim", "side", "initial_exponent",
                       "target_exponent", "cost", "targets", "density",
                       "assignment_granularity", "threads", "reference",
                       "seed"},
                      "config");

  RunConfig cfg;
  if (!root.contains("version") || int_field(root, "version", "config") != 1)
    fail("config: 'version' must be 1");
  if (root.contains("title")) cfg.title = root.at("title").get<std::string>();

  if (!root.contains("dim")) fail("config: 'dim' is required");
  cfg.dim = int_field(root, "dim", "config");
  if (cfg.dim < 2 || cfg.dim > 3) fail("config: 'dim' must be 2 or 3");

  if (root.contains("side")) cfg.side = number_field(root, "side", "config");
  if (!(cfg.side > 0) || !std::isfinite(cfg.side))
    fail("config: 'side' must be positive and finite");

  if (root.contains("initial_exponent"))
    cfg.initial_exponent = int_field(root, "initial_exponent", "config");
  if (!root.contains("target_exponent"))
    fail("config: 'target_exponent' is required");
  cfg.target_exponent = int_field(root, "target_exponent", "config");
  if (cfg.initial_exponent < 0 || cfg.target_exponent < cfg.initial_exponent)
    fail("config: need 0 <= initial_exponent <= target_exponent");
  if (cfg.target_exponent - cfg.initial_exponent > 15)
    fail("config: more than 16 refinement levels requested");

  GridGeometry geom{cfg.dim, cfg.side, cfg.initial_exponent};
  geom.cells_per_axis(1);  // validates side against the initial width
  GridGeometry fine{cfg.dim, cfg.side, cfg.target_exponent};
  fine.cells_per_axis(1);  // validates the final level fits 16-bit indices

  cfg.cost = root.contains("cost") ? GroundCost(parse_cost(root.at("cost")))
                                   : GroundCost();

  if (!root.contains("targets") || !root.at("targets").is_array() ||
      root.at("targets").empty())
    fail("config: 'targets' must be a non-empty array");
  const Json& targets = root.at("targets");
  if (targets.size() > 4096) fail("config: at most 4096 targets");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const Json& t = targets[i];
    std::ostringstream wh;
    wh << "target " << i;
    const std::string where = wh.str();
    if (!t.is_object()) fail(where + ": expected an object");
    reject_unknown_keys(t, {"point", "weight"}, where);
    if (!t.contains("point") || !t.at("point").is_array() ||
        t.at("point").size() != static_cast<std::size_t>(cfg.dim))
      fail(where + ": 'point' must be an array of length dim");
    Point p{};
    for (int a = 0; a < cfg.dim; ++a) {
      p[a] = t.at("point")[a].get<double>();
      if (!std::isfinite(p[a]) || p[a] < 0 || p[a] > cfg.side)
        fail(where + ": point leaves the domain");
    }
    if (!t.contains("weight")) fail(where + ": 'weight' is required");
    double w = number_field(t, "weight", where);
    if (!(w > 0) || !std::isfinite(w))
      fail(where + ": weight must be positive");
    cfg.targets.push_back(p);
    cfg.weights.push_back(w);
  }
  for (std::size_t i = 0; i < cfg.targets.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.targets.size(); ++j)
      if (cfg.targets[i] == cfg.targets[j]) {
        std::ostringstream msg;
        msg << "config: targets " << i << " and " << j << " coincide";
        fail(msg.str());
      }
  double weight_sum = 0.0;
  for (double w : cfg.weights) weight_sum += w;
  if (std::abs(weight_sum - 1.0) > 1e-9)
    fail("config: target weights must sum to 1");
  for (double& w : cfg.weights) w /= weight_sum;

  cfg.density =
      root.contains("density")
          ? parse_density(root.at("density"), cfg.dim, cfg.side,
                          std::ldexp(1.0, -cfg.initial_exponent))
          : Density::uniform(cfg.dim, cfg.side);

  if (root.contains("assignment_granularity")) {
    cfg.assignment_granularity =
        number_field(root, "assignment_granularity", "config");
    if (cfg.assignment_granularity < 0 ||
        !std::isfinite(cfg.assignment_granularity) ||
        cfg.assignment_granularity > 1024)
      fail("config: 'assignment_granularity' must be in [0, 1024]");
  }
  if (root.contains("threads")) {
    cfg.threads = int_field(root, "threads", "config");
    if (cfg.threads < 0 || cfg.threads > 256)
      fail("config: 'threads' must be in [0, 256]");
  }
  if (root.contains("reference")) {
    cfg.reference = root.at("reference").get<std::string>();
    if (!cfg.reference.empty() && !exact_reference_value(cfg.reference))
      fail("config: unknown reference '" + cfg.reference + "'");
  }
  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned())
      fail("config: 'seed' must be a non-negative integer");
    cfg.seed = root.at("seed").get<std::uint64_t>();
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string config_to_json_text(const RunConfig& config) {
  Json root;
  root["version"] = config.version;
  if (!config.title.empty()) root["title"] = config.title;
  root["dim"] = config.dim;
  root["side"] = config.side;
  root["initial_exponent"] = config.initial_exponent;
  root["target_exponent"] = config.target_exponent;
  root["cost"] = cost_to_json(config.cost);
  Json targets = Json::array();
  for (std::size_t i = 0; i < config.targets.size(); ++i) {
    Json t;
    Json point = Json::array();
    for (int a = 0; a < config.dim; ++a) point.push_back(config.targets[i][a]);
    t["point"] = point;
    t["weight"] = config.weights[i];
    targets.push_back(t);
  }
  root["targets"] = targets;
  root["density"] = density_to_json(config.density);
  root["assignment_granularity"] = config.assignment_granularity;
  root["threads"] = config.threads;
  if (!config.reference.empty()) root["reference"] = config.reference;
  root["seed"] = config.seed;
  return root.dump(2) + "\n";
}

int resolve_threads(int configured) {
  if (configured > 0) return configured;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace bmot

#include "dae/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace dae::io {

namespace {

std::string trim(std::string_view s, std::size_t* lead = nullptr) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (lead) *lead = b;
  return std::string(s.substr(b, e - b));
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

FileError::FileError(const std::string& origin, int line_, int col_, const std::string& msg)
    : std::runtime_error(line_ > 0 ? origin + ":" + std::to_string(line_) + ":" +
                                         std::to_string(col_) + ": " + msg
                                   : origin + ": " + msg),
      line(line_),
      col(col_) {}

// ---------------------------------------------------------------------------
// System files

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
  int key_col = 0;    // 1-based column of the key
  int value_col = 0;  // 1-based column of the value
};

std::vector<double> parse_number_list(const RawEntry& e, const std::string& origin,
                                      const char* what) {
  std::vector<double> out;
  const std::string& s = e.value;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    char* end = nullptr;
    const double v = std::strtod(s.c_str() + i, &end);
    if (end == s.c_str() + i)
      throw FileError(origin, e.line, e.value_col + static_cast<int>(i),
                      std::string("expected a number in '") + what + "'");
    out.push_back(v);
    i = static_cast<std::size_t>(end - s.c_str());
  }
  if (out.empty())
    throw FileError(origin, e.line, e.value_col, std::string("empty value for '") + what + "'");
  return out;
}

double parse_one_number(const RawEntry& e, const std::string& origin, const char* what) {
  const auto v = parse_number_list(e, origin, what);
  if (v.size() != 1)
    throw FileError(origin, e.line, e.value_col,
                    std::string("'") + what + "' takes exactly one number");
  return v[0];
}

int parse_one_int(const RawEntry& e, const std::string& origin, const char* what) {
  const double v = parse_one_number(e, origin, what);
  const int n = static_cast<int>(v);
  if (static_cast<double>(n) != v)
    throw FileError(origin, e.line, e.value_col, std::string("'") + what + "' must be an integer");
  return n;
}

Expr parse_expr_entry(const RawEntry& e, const std::string& origin, const char* what) {
  try {
    return parse_expression(e.value);
  } catch (const ParseError& pe) {
    throw FileError(origin, e.line, e.value_col + static_cast<int>(pe.offset),
                    std::string("in expression for '") + what + "': " + pe.what() +
                        " (expected " + pe.expected + ")");
  }
}

}  // namespace

FileConfig parse_system_text(std::string_view text, const std::string& origin) {
  std::map<std::string, RawEntry> entries;
  {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t nl = text.find('\n', pos);
      std::string_view line =
          text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      ++line_no;
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

      const std::size_t hash = line.find('#');
      if (hash != std::string_view::npos) line = line.substr(0, hash);
      std::size_t lead = 0;
      const std::string stripped = trim(line, &lead);
      if (stripped.empty()) continue;

      const std::size_t eq = stripped.find('=');
      if (eq == std::string::npos)
        throw FileError(origin, line_no, static_cast<int>(lead) + 1,
                        "expected 'key = value' (no '=' found)");
      std::size_t klead = 0;
      const std::string key = trim(std::string_view(stripped).substr(0, eq), &klead);
      if (key.empty())
        throw FileError(origin, line_no, static_cast<int>(lead) + 1, "missing key before '='");
      std::size_t vlead = 0;
      const std::string value = trim(std::string_view(stripped).substr(eq + 1), &vlead);

      static const char* kKnown[] = {"dim",  "name", "f",       "f1",    "f2",   "g",
                                     "bbox", "alpha", "tol",    "grid",  "samples", "seeds"};
      if (std::find_if(std::begin(kKnown), std::end(kKnown),
                       [&](const char* k) { return key == k; }) == std::end(kKnown))
        throw FileError(origin, line_no, static_cast<int>(lead + klead) + 1,
                        "unknown key '" + key + "'");
      if (entries.count(key))
        throw FileError(origin, line_no, static_cast<int>(lead + klead) + 1,
                        "duplicate key '" + key + "' (first on line " +
                            std::to_string(entries[key].line) + ")");
      RawEntry e;
      e.value = value;
      e.line = line_no;
      e.key_col = static_cast<int>(lead + klead) + 1;
      e.value_col = static_cast<int>(lead + eq + 1 + vlead) + 1;
      entries.emplace(key, std::move(e));
    }
  }

  auto require = [&](const char* key) -> const RawEntry& {
    const auto it = entries.find(key);
    if (it == entries.end())
      throw FileError(origin, 0, 0, std::string("missing required key '") + key + "'");
    return it->second;
  };
  auto forbid = [&](const char* key, const char* why) {
    const auto it = entries.find(key);
    if (it != entries.end())
      throw FileError(origin, it->second.line, it->second.key_col,
                      std::string("key '") + key + "' " + why);
  };

  FileConfig cfg;
  cfg.origin = origin;

  const RawEntry& dim_e = require("dim");
  const int dim = parse_one_int(dim_e, origin, "dim");
  if (dim != 1 && dim != 2)
    throw FileError(origin, dim_e.line, dim_e.value_col, "dim must be 1 or 2");

  std::string name;
  if (const auto it = entries.find("name"); it != entries.end()) name = it->second.value;

  if (dim == 1) {
    forbid("f1", "is only valid for dim = 2");
    forbid("f2", "is only valid for dim = 2");
    const RawEntry& f_e = require("f");
    const RawEntry& g_e = require("g");
    const Expr f = parse_expr_entry(f_e, origin, "f");
    const Expr g = parse_expr_entry(g_e, origin, "g");
    if (f.depends_on(Var::Y))
      throw FileError(origin, f_e.line, f_e.value_col, "1D system: 'f' may not mention y");
    if (g.depends_on(Var::Y))
      throw FileError(origin, g_e.line, g_e.value_col, "1D system: 'g' may not mention y");
    cfg.def = make_system_1d(f, g, name);
  } else {
    forbid("f", "is only valid for dim = 1");
    const Expr f1 = parse_expr_entry(require("f1"), origin, "f1");
    const Expr f2 = parse_expr_entry(require("f2"), origin, "f2");
    const Expr g = parse_expr_entry(require("g"), origin, "g");
    cfg.def = make_system_2d(f1, f2, g, name);
  }

  if (const auto it = entries.find("alpha"); it != entries.end()) {
    const RawEntry& e = it->second;
    const std::size_t colon = e.value.find(':');
    if (colon == std::string::npos) {
      cfg.alpha = parse_one_number(e, origin, "alpha");
    } else {
      RawEntry lo_e = e, hi_e = e;
      lo_e.value = trim(std::string_view(e.value).substr(0, colon));
      hi_e.value = trim(std::string_view(e.value).substr(colon + 1));
      hi_e.value_col = e.value_col + static_cast<int>(colon) + 1;
      const double lo = parse_one_number(lo_e, origin, "alpha");
      const double hi = parse_one_number(hi_e, origin, "alpha");
      if (!(lo < hi))
        throw FileError(origin, e.line, e.value_col, "alpha range must satisfy lo < hi");
      cfg.alpha_range = Interval{lo, hi};
    }
  }

  if (const auto it = entries.find("bbox"); it != entries.end()) {
    const RawEntry& e = it->second;
    const auto v = parse_number_list(e, origin, "bbox");
    if (dim == 1) {
      if (v.size() != 2)
        throw FileError(origin, e.line, e.value_col, "1D bbox takes two numbers: x0 x1");
      if (!(v[0] < v[1]))
        throw FileError(origin, e.line, e.value_col, "bbox must satisfy x0 < x1");
      cfg.bbox = BBox{v[0], 0.0, v[1], 0.0};
    } else {
      if (v.size() != 4)
        throw FileError(origin, e.line, e.value_col, "2D bbox takes four numbers: x0 y0 x1 y1");
      if (!(v[0] < v[2]) || !(v[1] < v[3]))
        throw FileError(origin, e.line, e.value_col, "bbox must satisfy x0 < x1 and y0 < y1");
      cfg.bbox = BBox{v[0], v[1], v[2], v[3]};
    }
    cfg.bbox_given = true;
  } else if (dim == 1) {
    cfg.bbox = BBox{-2.0, 0.0, 2.0, 0.0};
  }

  if (const auto it = entries.find("tol"); it != entries.end()) {
    const double r = parse_one_number(it->second, origin, "tol");
    if (!(r > 0.0) || !std::isfinite(r))
      throw FileError(origin, it->second.line, it->second.value_col, "tol must be positive");
    cfg.tol_residual = r;
  }
  if (const auto it = entries.find("grid"); it != entries.end()) {
    const int n = parse_one_int(it->second, origin, "grid");
    if (n < 2)
      throw FileError(origin, it->second.line, it->second.value_col, "grid must be at least 2");
    cfg.grid = n;
  }
  if (const auto it = entries.find("samples"); it != entries.end()) {
    const int n = parse_one_int(it->second, origin, "samples");
    if (n < 2)
      throw FileError(origin, it->second.line, it->second.value_col, "samples must be at least 2");
    cfg.samples = n;
  }
  if (const auto it = entries.find("seeds"); it != entries.end()) {
    const RawEntry& e = it->second;
    const auto v = parse_number_list(e, origin, "seeds");
    if (dim == 1) {
      for (const double x : v) cfg.seeds.push_back({x, 0.0});
    } else {
      if (v.size() % 2 != 0)
        throw FileError(origin, e.line, e.value_col, "2D seeds come in x y pairs");
      for (std::size_t i = 0; i + 1 < v.size(); i += 2) cfg.seeds.push_back({v[i], v[i + 1]});
    }
  }
  return cfg;
}

FileConfig load_system_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path, 0, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system_text(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Canonical JSON

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void escape_into(std::string& out, const std::string& s) {
  out += '"';
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void dump_into(std::string& out, const Json& j, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
  const std::string pad1(2 * static_cast<std::size_t>(depth + 1), ' ');
  switch (j.type()) {
    case Json::value_t::null: out += "null"; break;
    case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      break;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      break;
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt17(v) : "null";
      break;
    }
    case Json::value_t::string: escape_into(out, j.get<std::string>()); break;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += pad1;
        dump_into(out, j[i], depth + 1);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      out += pad + "]";
      break;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad1;
        escape_into(out, it.key());
        out += ": ";
        dump_into(out, it.value(), depth + 1);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      out += pad + "}";
      break;
    }
    default: out += "null"; break;
  }
}

}  // namespace

std::string dump_canonical(const Json& j) {
  std::string out;
  dump_into(out, j, 0);
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Report assembly

Json tol_to_json(const Tol& tol) {
  return Json{{"residual", tol.residual},
              {"deriv", tol.deriv},
              {"newton", tol.newton},
              {"genericity", tol.genericity},
              {"genericity_warn", tol.genericity_warn}};
}

Json system_to_json(const SystemDef& def) {
  Json j{{"dim", def.dim}, {"name", def.name}, {"g", def.g.str()}};
  if (def.dim == 1) {
    j["f"] = def.f.str();
  } else {
    j["f1"] = def.f1.str();
    j["f2"] = def.f2.str();
  }
  return j;
}

namespace {

Json complex_to_json(std::complex<double> z) {
  return Json{{"re", z.real()}, {"im", z.imag()}};
}

const char* eq_kind_name(d2::EqKind k) {
  switch (k) {
    case d2::EqKind::Saddle: return "saddle";
    case d2::EqKind::Node: return "node";
    default: return "focus";
  }
}

const char* seq_kind_name(d2::SEqKind k) {
  switch (k) {
    case d2::SEqKind::FoldedSaddle: return "folded-saddle";
    case d2::SEqKind::FoldedNode: return "folded-node";
    default: return "folded-focus";
  }
}

const char* side_name(d2::Side s) { return s == d2::Side::SigmaPlus ? "sigma+" : "sigma-"; }

const char* arc_label_name(d2::ArcLabel l) {
  switch (l) {
    case d2::ArcLabel::Incoming: return "incoming";
    case d2::ArcLabel::Outgoing: return "outgoing";
    default: return "none";
  }
}

const char* ray_kind_name(d2::SectorRay::Kind k) {
  switch (k) {
    case d2::SectorRay::Kind::SigmaTangent: return "sigma-tangent";
    case d2::SectorRay::Kind::EigenLeading: return "eigen-leading";
    case d2::SectorRay::Kind::EigenNonLeading: return "eigen-non-leading";
    case d2::SectorRay::Kind::EigenStable: return "eigen-stable";
    default: return "eigen-unstable";
  }
}

}  // namespace

Json point_to_json(const d2::SpecialPoint2D& sp) {
  Json j{{"x", sp.p.x}, {"y", sp.p.y}, {"class", d2::class_name(sp.cls)}};
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, d2::Equilibrium>) {
          j["lambda1"] = complex_to_json(c.lambda1);
          j["lambda2"] = complex_to_json(c.lambda2);
          j["kind"] = eq_kind_name(c.kind);
          j["side"] = side_name(c.side);
          j["desing_stable"] = c.desing_stable;
          j["stable"] = c.stable;
        } else if constexpr (std::is_same_v<T, d2::SingularEquilibrium2D>) {
          j["lambda1"] = complex_to_json(c.lambda1);
          j["lambda2"] = complex_to_json(c.lambda2);
          j["kind"] = seq_kind_name(c.kind);
          j["simple"] = c.simple;
        } else if constexpr (std::is_same_v<T, d2::Fold>) {
          j["convexity"] = side_name(c.convexity);
          j["simple"] = c.simple;
        } else if constexpr (std::is_same_v<T, d2::DegeneratePoint>) {
          j["candidate"] = d2::code_name(c.candidate);
          j["reason"] = c.reason;
        }
      },
      sp.cls);
  return j;
}

Json point_to_json(const d1::SpecialPoint1D& sp) {
  Json j{{"x", sp.x}, {"class", d1::class_name(sp.cls)}};
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, d1::SimpleEquilibrium>) {
          j["lambda"] = c.lambda;
          j["stable"] = c.stable;
        } else if constexpr (std::is_same_v<T, d1::SimpleSingularity>) {
          j["lambda"] = c.lambda;
          j["outgoing"] = c.outgoing;
        } else if constexpr (std::is_same_v<T, d1::NonSimpleEquilibrium>) {
          j["m"] = c.m;
          j["s"] = c.s;
          j["capped"] = c.capped;
        } else if constexpr (std::is_same_v<T, d1::NonSimpleSingularity>) {
          j["n"] = c.n;
          j["s"] = c.s;
          j["capped"] = c.capped;
        } else if constexpr (std::is_same_v<T, d1::SingularEquilibrium>) {
          j["m"] = c.m;
          j["n"] = c.n;
          j["capped"] = c.capped;
        }
      },
      sp.cls);
  return j;
}

Json sigma_to_json(const d2::SigmaCurve& curve) {
  Json branches = Json::array();
  for (const auto& b : curve.branches) {
    Json pts = Json::array();
    for (const auto& v : b.pts)
      pts.push_back(Json{{"x", v.p.x}, {"y", v.p.y}, {"label", arc_label_name(v.label)}});
    Json marks = Json::array();
    for (const auto& m : b.marks)
      marks.push_back(Json{
          {"vertex", m.vertex},
          {"kind", m.kind == d2::SigmaMarkKind::Fold ? "fold" : "singular-equilibrium"}});
    branches.push_back(Json{{"closed", b.closed},
                            {"truncated", b.truncated},
                            {"points", std::move(pts)},
                            {"marks", std::move(marks)}});
  }
  return Json{{"branches", std::move(branches)}, {"warnings", curve.warnings}};
}

Json sectors_to_json(const d2::SectorDecomposition& sd) {
  Json sectors = Json::array();
  for (const auto& s : sd.sectors)
    sectors.push_back(Json{
        {"label", d2::sector_label_name(s.label)},
        {"from", Json{{"x", s.from.dir.x}, {"y", s.from.dir.y}, {"kind", ray_kind_name(s.from.kind)}}},
        {"to", Json{{"x", s.to.dir.x}, {"y", s.to.dir.y}, {"kind", ray_kind_name(s.to.kind)}}}});
  return Json{{"center", Json{{"x", sd.center.x}, {"y", sd.center.y}}},
              {"has_sectors", sd.has_sectors},
              {"lambda1", complex_to_json(sd.lambda1)},
              {"lambda2", complex_to_json(sd.lambda2)},
              {"sectors", std::move(sectors)},
              {"transversality_margin", sd.transversality_margin},
              {"note", sd.note}};
}

Json event_to_json(const scan::BifEvent& ev) {
  Json tv;
  for (const auto& [k, v] : ev.test_values) tv[k] = v;
  return Json{{"code", d2::code_name(ev.code)},
              {"alpha", ev.alpha},
              {"x", ev.p.x},
              {"y", ev.p.y},
              {"genericity", ev.genericity},
              {"genericity_warning", ev.genericity_warning},
              {"test_values", std::move(tv)},
              {"unfolding", ev.unfolding},
              {"notes", ev.notes}};
}

Json orbit_pieces_to_json(const std::vector<d2::DaeOrbitPiece>& pieces) {
  Json out = Json::array();
  for (const auto& piece : pieces) {
    Json pts = Json::array();
    for (const Vec2& p : piece.pts) pts.push_back(Json::array({p.x, p.y}));
    out.push_back(Json{{"side", piece.side > 0 ? "sigma+" : "sigma-"},
                       {"starts_on_sigma", piece.starts_on_sigma},
                       {"ends_on_sigma", piece.ends_on_sigma},
                       {"points", std::move(pts)}});
  }
  return out;
}

Json code_schema(d2::BifCode code) {
  const char* family = "local";
  const char* summary = "";
  Json fields = Json::array();
  switch (code) {
    case d2::BifCode::T1:
      family = "geometric";
      summary = "two branches of the singularity curve touch and reconnect across the "
                "other diagonal (saddle critical point of g)";
      fields = {"hess_g", "g_alpha"};
      break;
    case d2::BifCode::T2:
      family = "geometric";
      summary = "an oval of the singularity curve shrinks to a point and vanishes "
                "(extremum critical point of g)";
      fields = {"hess_g", "g_alpha"};
      break;
    case d2::BifCode::L1:
      summary = "saddle-node of equilibria: a zero eigenvalue of the equilibrium "
                "linearization";
      fields = {"det_eq", "det_ext"};
      break;
    case d2::BifCode::L2:
      summary = "saddle-node of singular equilibria: a zero eigenvalue of the one-sided "
                "linearization";
      fields = {"det_f1g", "det_ext"};
      break;
    case d2::BifCode::L3:
      summary = "an equilibrium crosses the singularity curve; an eigenvalue passes "
                "through infinity and a regular/singular equilibrium pair is exchanged";
      fields = {"delta1", "delta2", "delta4"};
      break;
    case d2::BifCode::L4:
      summary = "cubic tangency of the singularity curve: a pair of opposite-convexity "
                "folds is created or destroyed";
      fields = {"g_xxx", "delta3"};
      break;
    case d2::BifCode::L5:
      summary = "a singular equilibrium passes through a fold of the singularity curve";
      fields = {"delta3", "delta5"};
      break;
    case d2::BifCode::L6:
      summary = "folded node / folded focus transition: the one-sided eigenvalues collide";
      fields = {"disc_seq"};
      break;
    case d2::BifCode::L7:
      summary = "imaginary eigenvalue pair at an equilibrium; a small cycle is born on "
                "one side";
      fields = {"tr_eq", "det_eq"};
      break;
    case d2::BifCode::L8:
      summary = "imaginary eigenvalue pair at a singular equilibrium; a small cycle "
                "crossing the singularity curve is born";
      fields = {"tr_seq", "det_seq"};
      break;
    case d2::BifCode::L9:
      summary = "a periodic orbit reaches unit multiplier: a stable and an unstable "
                "cycle collide (fold of cycles)";
      fields = {"multiplier", "period", "sigma_crossings"};
      break;
    case d2::BifCode::G6FoldFold:
      family = "global";
      summary = "the companion orbit leaving one fold hits another fold: a "
                "fold-to-fold connection";
      fields = {"clearance", "miss_distance"};
      break;
    case d2::BifCode::A11:
      family = "one-dimensional";
      summary = "fold of equilibria on the line: a stable/unstable pair collides and "
                "disappears";
      fields = {"s", "dbeta_dalpha", "f_xx", "f_alpha"};
      break;
    case d2::BifCode::A21:
      family = "one-dimensional";
      summary = "fold of singular points on the line: an incoming/outgoing pair "
                "collides and disappears";
      fields = {"s", "dbeta_dalpha", "g_xx", "g_alpha"};
      break;
    case d2::BifCode::A300:
      family = "one-dimensional";
      summary = "an equilibrium and a singular point cross and exchange character "
                "(stability and incoming/outgoing flip)";
      fields = {"s", "A", "dbeta_dalpha"};
      break;
  }
  return Json{{"code", d2::code_name(code)},
              {"family", family},
              {"summary", summary},
              {"test_fields", std::move(fields)}};
}

Json all_code_schemas() {
  Json out;
  for (const d2::BifCode c : kAllBifCodes) out[d2::code_name(c)] = code_schema(c);
  return out;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// World-to-screen transform for a square canvas with margins.
struct Frame {
  BBox world;
  double m, size;
  double sx, sy;
  Frame(const BBox& w, double margin, double sz)
      : world(w),
        m(margin),
        size(sz),
        sx((sz - 2 * margin) / (w.x1 - w.x0)),
        sy((sz - 2 * margin) / (w.y1 - w.y0)) {}
  double X(double x) const { return m + (x - world.x0) * sx; }
  double Y(double y) const { return size - m - (y - world.y0) * sy; }
  std::string at(Vec2 p) const { return px(X(p.x)) + "," + px(Y(p.y)); }
};

const char* kColOutgoing = "#d62728";
const char* kColIncoming = "#1f77b4";
const char* kColNeutral = "#9a9a9a";
const char* kColOrbit = "#303030";
const char* kColFolded = "#7b3fa0";
const char* kColFold = "#e8871e";

std::string code_color(d2::BifCode code) {
  switch (code) {
    case d2::BifCode::T1:
    case d2::BifCode::T2: return "#2ca02c";
    case d2::BifCode::G6FoldFold: return "#17a2b8";
    case d2::BifCode::A11:
    case d2::BifCode::A21:
    case d2::BifCode::A300: return "#8e44ad";
    default: return "#e67e22";
  }
}

// Arrowhead along direction d at point s (screen coords).
std::string arrow_at(double x, double y, Vec2 d, const char* color) {
  const double n = std::hypot(d.x, d.y);
  if (n < 1e-12) return "";
  const Vec2 u{d.x / n, d.y / n};
  const Vec2 v{-u.y, u.x};
  const double L = 7.0, W = 3.4;
  std::string s = "<polygon fill=\"";
  s += color;
  s += "\" points=\"";
  s += px(x) + "," + px(y) + " ";
  s += px(x - L * u.x + W * v.x) + "," + px(y - L * u.y + W * v.y) + " ";
  s += px(x - L * u.x - W * v.x) + "," + px(y - L * u.y - W * v.y);
  s += "\"/>\n";
  return s;
}

std::string circle(double x, double y, double r, const std::string& fill,
                   const std::string& stroke, double sw = 1.4) {
  return "<circle cx=\"" + px(x) + "\" cy=\"" + px(y) + "\" r=\"" + px(r) + "\" fill=\"" + fill +
         "\" stroke=\"" + stroke + "\" stroke-width=\"" + px(sw) + "\"/>\n";
}

std::string diamond(double x, double y, double r, const std::string& fill,
                    const std::string& stroke) {
  return "<polygon points=\"" + px(x) + "," + px(y - r) + " " + px(x + r) + "," + px(y) + " " +
         px(x) + "," + px(y + r) + " " + px(x - r) + "," + px(y) + "\" fill=\"" + fill +
         "\" stroke=\"" + stroke + "\" stroke-width=\"1.4\"/>\n";
}

std::string triangle(double x, double y, double r, const std::string& fill,
                     const std::string& stroke) {
  return "<polygon points=\"" + px(x) + "," + px(y - r) + " " + px(x + 0.9 * r) + "," +
         px(y + 0.7 * r) + " " + px(x - 0.9 * r) + "," + px(y + 0.7 * r) + "\" fill=\"" + fill +
         "\" stroke=\"" + stroke + "\" stroke-width=\"1.4\"/>\n";
}

std::string cross_glyph(double x, double y, double r, const std::string& stroke) {
  return "<path d=\"M " + px(x - r) + " " + px(y - r) + " L " + px(x + r) + " " + px(y + r) +
         " M " + px(x - r) + " " + px(y + r) + " L " + px(x + r) + " " + px(y - r) +
         "\" stroke=\"" + stroke + "\" stroke-width=\"2\" fill=\"none\"/>\n";
}

std::string text_at(double x, double y, const std::string& s, int fs, const char* color,
                    const char* anchor = "start") {
  std::string esc;
  for (char c : s) {
    if (c == '<') esc += "&lt;";
    else if (c == '>') esc += "&gt;";
    else if (c == '&') esc += "&amp;";
    else esc += c;
  }
  return "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" font-family=\"monospace\" font-size=\"" +
         std::to_string(fs) + "\" fill=\"" + color + "\" text-anchor=\"" + anchor + "\">" + esc +
         "</text>\n";
}

std::string point_glyph_2d(const Frame& fr, const d2::SpecialPoint2D& sp) {
  const double x = fr.X(sp.p.x), y = fr.Y(sp.p.y);
  std::string s;
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, d2::Equilibrium>) {
          if (c.kind == d2::EqKind::Saddle) {
            s += cross_glyph(x, y, 5.5, "#000");
          } else {
            s += circle(x, y, 4.6, c.stable ? "#000" : "#fff", "#000");
            if (c.kind == d2::EqKind::Focus) s += circle(x, y, 7.6, "none", "#000", 0.9);
          }
        } else if constexpr (std::is_same_v<T, d2::SingularEquilibrium2D>) {
          switch (c.kind) {
            case d2::SEqKind::FoldedNode: s += triangle(x, y, 6.4, kColFolded, "#333"); break;
            case d2::SEqKind::FoldedSaddle:
              s += triangle(x, y, 6.4, "#fff", kColFolded);
              s += cross_glyph(x, y, 3.0, kColFolded);
              break;
            default:
              s += triangle(x, y, 6.4, "#fff", kColFolded);
              s += circle(x, y, 8.6, "none", kColFolded, 0.9);
          }
        } else if constexpr (std::is_same_v<T, d2::Fold>) {
          s += diamond(x, y, 5.2, kColFold, "#333");
        } else if constexpr (std::is_same_v<T, d2::DegeneratePoint>) {
          s += circle(x, y, 3.0, "#000", "#000");
          s += "<g transform=\"translate(" + px(x + 16) + "," + px(y - 12) + ")\">" +
               code_glyph(c.candidate) + "</g>\n";
        }
      },
      sp.cls);
  return s;
}

}  // namespace

std::string code_glyph(d2::BifCode code) {
  const std::string name = d2::code_name(code);
  const double w = 10.0 + 6.2 * static_cast<double>(name.size());
  std::string s = "<g>";
  s += "<rect x=\"" + px(-w / 2) + "\" y=\"-8\" width=\"" + px(w) +
       "\" height=\"16\" rx=\"3\" fill=\"" + code_color(code) +
       "\" stroke=\"#333\" stroke-width=\"0.8\"/>";
  s += "<text x=\"0\" y=\"3.5\" font-family=\"monospace\" font-size=\"9\" fill=\"#fff\" "
       "text-anchor=\"middle\">" +
       name + "</text>";
  s += "</g>";
  return s;
}

std::string render_portrait_2d(const System2D& sys, double alpha, const BBox& box,
                               const std::vector<Vec2>& seeds, const SvgOptions& opt,
                               const Tol& tol) {
  const double legend_h = opt.legend ? 132.0 : 0.0;
  const Frame fr(box, opt.margin, static_cast<double>(opt.size));
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.size) +
         "\" height=\"" + px(opt.size + legend_h) + "\" viewBox=\"0 0 " +
         std::to_string(opt.size) + " " + px(opt.size + legend_h) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  // Frame and corner coordinates.
  svg += "<rect x=\"" + px(fr.m) + "\" y=\"" + px(fr.m) + "\" width=\"" +
         px(fr.size - 2 * fr.m) + "\" height=\"" + px(fr.size - 2 * fr.m) +
         "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  svg += text_at(fr.m, fr.size - fr.m + 14, fmt6(box.x0), 10, "#444");
  svg += text_at(fr.size - fr.m, fr.size - fr.m + 14, fmt6(box.x1), 10, "#444", "end");
  svg += text_at(fr.m - 4, fr.size - fr.m, fmt6(box.y0), 10, "#444", "end");
  svg += text_at(fr.m - 4, fr.m + 4, fmt6(box.y1), 10, "#444", "end");

  // Singularity curve, colored by arc label.
  const d2::SigmaCurve curve = d2::trace_sigma(sys, alpha, box, 0.0, tol);
  for (const auto& b : curve.branches) {
    std::size_t i = 0;
    while (i + 1 < b.pts.size()) {
      auto seg_label = [&](std::size_t k) {
        return b.pts[k].label != d2::ArcLabel::None ? b.pts[k].label : b.pts[k + 1].label;
      };
      const d2::ArcLabel lab = seg_label(i);
      std::size_t j = i + 1;
      while (j + 1 < b.pts.size() && seg_label(j) == lab) ++j;
      const char* col = lab == d2::ArcLabel::Outgoing   ? kColOutgoing
                        : lab == d2::ArcLabel::Incoming ? kColIncoming
                                                        : kColNeutral;
      std::string pts;
      for (std::size_t k = i; k <= j; ++k) pts += fr.at(b.pts[k].p) + " ";
      svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"";
      svg += col;
      svg += "\" stroke-width=\"2.6\"/>\n";
      i = j;
    }
    for (const auto& m : b.marks)
      if (m.kind == d2::SigmaMarkKind::Fold) {
        const Vec2 p = b.pts[static_cast<std::size_t>(m.vertex)].p;
        svg += diamond(fr.X(p.x), fr.Y(p.y), 5.2, kColFold, "#333");
      }
  }

  // Orbits through the seed points (defaults when none are given).
  std::vector<Vec2> starts = seeds;
  if (starts.empty()) {
    const Vec2 c = box.center();
    const double rx = 0.55 * (box.x1 - box.x0) / 2, ry = 0.55 * (box.y1 - box.y0) / 2;
    for (int k = 0; k < 8; ++k) {
      const double th = 2.0 * 3.14159265358979323846 * k / 8.0;
      starts.push_back({c.x + rx * std::cos(th), c.y + ry * std::sin(th)});
    }
  }
  const d2::DesingField field = d2::build_desingularized(sys);
  for (const Vec2& s0 : starts) {
    for (const double tdir : {opt.t_span, -opt.t_span}) {
      const d2::DesingOrbit orb = d2::integrate_desing(field, alpha, s0, tdir, box);
      for (const auto& piece : d2::split_to_dae_orbits(field, alpha, orb)) {
        if (piece.pts.size() < 2) continue;
        const std::size_t stride = std::max<std::size_t>(1, piece.pts.size() / 400);
        std::vector<Vec2> pl;
        for (std::size_t k = 0; k < piece.pts.size(); k += stride) pl.push_back(piece.pts[k]);
        if (pl.back().x != piece.pts.back().x || pl.back().y != piece.pts.back().y)
          pl.push_back(piece.pts.back());
        std::string pts;
        for (const Vec2& p : pl) pts += fr.at(p) + " ";
        svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"";
        svg += kColOrbit;
        svg += "\" stroke-width=\"1.2\"/>\n";
        // Direction arrow at the middle (original-time flow).
        const std::size_t mid = pl.size() / 2;
        if (mid > 0) {
          const Vec2 a = pl[mid - 1], b = pl[mid];
          const Vec2 d{fr.X(b.x) - fr.X(a.x), fr.Y(b.y) - fr.Y(a.y)};
          svg += arrow_at(fr.X(b.x), fr.Y(b.y), d, kColOrbit);
        }
        // Finite-time arrival at the singular set: double arrowhead.
        if (piece.ends_on_sigma && pl.size() >= 2) {
          const Vec2 a = pl[pl.size() - 2], b = pl.back();
          const Vec2 d{fr.X(b.x) - fr.X(a.x), fr.Y(b.y) - fr.Y(a.y)};
          const double n = std::hypot(d.x, d.y);
          if (n > 1e-12) {
            const Vec2 u{d.x / n, d.y / n};
            svg += arrow_at(fr.X(b.x), fr.Y(b.y), d, kColOrbit);
            svg += arrow_at(fr.X(b.x) - 6.0 * u.x, fr.Y(b.y) - 6.0 * u.y, d, kColOrbit);
          }
        }
      }
    }
  }

  // Special points and sector rays.
  const d2::FindResult2D found = d2::find_points_2d(sys, alpha, box, 32, tol);
  if (opt.sectors) {
    for (const auto& sp : found.points) {
      const auto* se = std::get_if<d2::SingularEquilibrium2D>(&sp.cls);
      if (!se || !se->simple || se->kind == d2::SEqKind::FoldedFocus) continue;
      const d2::SectorDecomposition sd = d2::sector_decomposition(sys, sp.p, alpha, tol);
      if (!sd.has_sectors) continue;
      const double cx = fr.X(sd.center.x), cy = fr.Y(sd.center.y);
      for (const auto& sec : sd.sectors) {
        for (const d2::SectorRay& ray : {sec.from, sec.to}) {
          const Vec2 d{ray.dir.x * fr.sx, -ray.dir.y * fr.sy};
          const double n = std::hypot(d.x, d.y);
          if (n < 1e-12) continue;
          svg += "<line x1=\"" + px(cx) + "\" y1=\"" + px(cy) + "\" x2=\"" +
                 px(cx + 30.0 * d.x / n) + "\" y2=\"" + px(cy + 30.0 * d.y / n) +
                 "\" stroke=\"#666\" stroke-width=\"1\" stroke-dasharray=\"3,2\"/>\n";
        }
        // Sector label along the bisector.
        Vec2 bis{sec.from.dir.x + sec.to.dir.x, sec.from.dir.y + sec.to.dir.y};
        if (std::hypot(bis.x, bis.y) < 1e-9) bis = {-sec.from.dir.y, sec.from.dir.x};
        const Vec2 d{bis.x * fr.sx, -bis.y * fr.sy};
        const double n = std::hypot(d.x, d.y);
        if (n > 1e-12)
          svg += text_at(cx + 42.0 * d.x / n, cy + 42.0 * d.y / n + 3,
                         d2::sector_label_name(sec.label), 8, "#555", "middle");
      }
    }
  }
  for (const auto& sp : found.points) svg += point_glyph_2d(fr, sp);

  // Title and legend.
  std::string title = "alpha = " + fmt6(alpha);
  svg += text_at(fr.m, fr.m - 10, title, 12, "#000");
  if (opt.legend) {
    const double ly = fr.size + 16;
    svg += "<g>\n";
    auto entry = [&](double x, double y, const std::string& glyph, const std::string& label) {
      std::string s = glyph;
      s += text_at(x + 14, y + 4, label, 10, "#333");
      return s;
    };
    svg += "<line x1=\"" + px(fr.m) + "\" y1=\"" + px(ly) + "\" x2=\"" + px(fr.m + 26) +
           "\" y2=\"" + px(ly) + "\" stroke=\"" + kColOutgoing + "\" stroke-width=\"2.6\"/>\n" +
           text_at(fr.m + 32, ly + 4, "sigma arc: outgoing", 10, "#333");
    svg += "<line x1=\"" + px(fr.m) + "\" y1=\"" + px(ly + 18) + "\" x2=\"" + px(fr.m + 26) +
           "\" y2=\"" + px(ly + 18) + "\" stroke=\"" + kColIncoming +
           "\" stroke-width=\"2.6\"/>\n" +
           text_at(fr.m + 32, ly + 22, "sigma arc: incoming", 10, "#333");
    svg += "<line x1=\"" + px(fr.m) + "\" y1=\"" + px(ly + 36) + "\" x2=\"" + px(fr.m + 26) +
           "\" y2=\"" + px(ly + 36) + "\" stroke=\"" + kColNeutral +
           "\" stroke-width=\"2.6\"/>\n" +
           text_at(fr.m + 32, ly + 40, "sigma arc: neutral / marked", 10, "#333");
    svg += entry(fr.m + 6, ly + 54, circle(fr.m + 6, ly + 54, 4.6, "#000", "#000"),
                 "node / focus (filled = attracting)");
    svg += entry(fr.m + 6, ly + 72, cross_glyph(fr.m + 6, ly + 72, 5.0, "#000"), "saddle");
    svg += entry(fr.m + 6, ly + 90, triangle(fr.m + 6, ly + 90, 6.0, kColFolded, "#333"),
                 "folded node / saddle / focus (triangle variants)");
    svg += entry(fr.m + 6, ly + 108, diamond(fr.m + 6, ly + 108, 5.0, kColFold, "#333"),
                 "fold of the singularity curve");
    const double lx2 = fr.size / 2 + 40;
    svg += entry(lx2 + 6, ly + 54, arrow_at(lx2 + 12, ly + 54, Vec2{1, 0}, kColOrbit),
                 "orbit direction (original time)");
    svg += entry(lx2 + 6, ly + 72,
                 arrow_at(lx2 + 12, ly + 72, Vec2{1, 0}, kColOrbit) +
                     arrow_at(lx2 + 6, ly + 72, Vec2{1, 0}, kColOrbit),
                 "finite-time arrival at sigma");
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_portrait_1d(const System1D& sys, double alpha, Interval range,
                               const SvgOptions& opt, const Tol& tol) {
  const double H = 200.0 + (opt.legend ? 80.0 : 0.0);
  const double m = opt.margin;
  const double W = static_cast<double>(opt.size);
  const double axis_y = 110.0;
  auto X = [&](double x) { return m + (x - range.lo) / range.length() * (W - 2 * m); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.size) +
         "\" height=\"" + px(H) + "\" viewBox=\"0 0 " + std::to_string(opt.size) + " " + px(H) +
         "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg += text_at(m, 30, "alpha = " + fmt6(alpha), 12, "#000");
  svg += "<line x1=\"" + px(m) + "\" y1=\"" + px(axis_y) + "\" x2=\"" + px(W - m) + "\" y2=\"" +
         px(axis_y) + "\" stroke=\"#444\" stroke-width=\"1.4\"/>\n";
  svg += text_at(m, axis_y + 26, fmt6(range.lo), 10, "#444");
  svg += text_at(W - m, axis_y + 26, fmt6(range.hi), 10, "#444", "end");

  const d1::FindResult1D found = d1::find_special_points_1d(sys, alpha, range, 512, tol);

  // Flow arrows on the intervals between special points.
  std::vector<double> cuts{range.lo};
  for (const auto& sp : found.points) cuts.push_back(sp.x);
  cuts.push_back(range.hi);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    if (cuts[i + 1] - cuts[i] < 1e-9 * std::max(1.0, range.length())) continue;
    const double fv = sys.f.value(mid, 0.0, alpha);
    const double gv = sys.g.value(mid, 0.0, alpha);
    if (std::abs(gv) < 1e-300) continue;
    const double v = fv / gv;
    if (v == 0.0) continue;
    svg += arrow_at(X(mid) + (v > 0 ? 5.0 : -5.0), axis_y, Vec2{v > 0 ? 1.0 : -1.0, 0.0},
                    kColOrbit);
  }

  // Special-point glyphs with x labels.
  for (const auto& sp : found.points) {
    const double x = X(sp.x);
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, d1::SimpleEquilibrium>) {
            svg += circle(x, axis_y, 5.0, c.stable ? "#000" : "#fff", "#000");
          } else if constexpr (std::is_same_v<T, d1::SimpleSingularity>) {
            svg += diamond(x, axis_y, 5.6, c.outgoing ? kColOutgoing : kColIncoming, "#333");
            const double dx = c.outgoing ? 1.0 : -1.0;  // arrows away from / into the point
            svg += arrow_at(x + (c.outgoing ? 16.0 : -9.0), axis_y - 14, Vec2{dx, 0}, "#555");
            svg += arrow_at(x - (c.outgoing ? 16.0 : -9.0), axis_y - 14, Vec2{-dx, 0}, "#555");
          } else if constexpr (std::is_same_v<T, d1::NonSimpleEquilibrium>) {
            svg += circle(x, axis_y, 5.0, "#bbb", "#000");
            svg += "<g transform=\"translate(" + px(x) + "," + px(axis_y - 22) + ")\">" +
                   code_glyph(d2::BifCode::A11) + "</g>\n";
          } else if constexpr (std::is_same_v<T, d1::NonSimpleSingularity>) {
            svg += diamond(x, axis_y, 5.6, "#bbb", "#333");
            svg += "<g transform=\"translate(" + px(x) + "," + px(axis_y - 22) + ")\">" +
                   code_glyph(d2::BifCode::A21) + "</g>\n";
          } else if constexpr (std::is_same_v<T, d1::SingularEquilibrium>) {
            svg += triangle(x, axis_y, 6.2, kColFolded, "#333");
            svg += "<g transform=\"translate(" + px(x) + "," + px(axis_y - 22) + ")\">" +
                   code_glyph(d2::BifCode::A300) + "</g>\n";
          }
        },
        sp.cls);
    svg += text_at(x, axis_y + 40, fmt6(sp.x), 9, "#333", "middle");
  }

  if (opt.legend) {
    const double ly = 160.0;
    svg += circle(m + 6, ly, 5.0, "#000", "#000");
    svg += text_at(m + 18, ly + 4, "equilibrium (filled = stable)", 10, "#333");
    svg += diamond(m + 6, ly + 20, 5.6, kColOutgoing, "#333");
    svg += text_at(m + 18, ly + 24, "outgoing singular point", 10, "#333");
    svg += diamond(m + 6, ly + 40, 5.6, kColIncoming, "#333");
    svg += text_at(m + 18, ly + 44, "incoming singular point (finite-time arrival)", 10, "#333");
    const double lx2 = W / 2 + 20;
    svg += arrow_at(lx2 + 12, ly, Vec2{1, 0}, kColOrbit);
    svg += text_at(lx2 + 22, ly + 4, "flow direction dx/dt = f/g", 10, "#333");
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace dae::io

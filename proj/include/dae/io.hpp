// Plumbing around the analysis library: system-file parsing, canonical JSON
// report assembly, and SVG phase-portrait rendering.
//
// System files are line-oriented text.  Grammar (one `key = value` per line,
// '#' starts a comment, keys in any order, each key at most once):
//   dim     = 1 | 2                      (required)
//   f       = <expr>                     (dim 1)
//   f1      = <expr>   f2 = <expr>       (dim 2)
//   g       = <expr>                     (required)
//   name    = <free text>
//   alpha   = <real>  |  <real> : <real> (value or scan range)
//   bbox    = x0 x1                      (dim 1: x interval)
//   bbox    = x0 y0 x1 y1                (dim 2)
//   tol     = <real>                     (residual scale; derivative and
//                                         genericity thresholds follow)
//   grid    = <int>                      (Newton seed density override)
//   samples = <int>                      (sweep resolution override)
//   seeds   = x1 [y1] x2 [y2] ...        (orbit start points)
//
// Reports are JSON with sorted keys and floats printed to 17 significant
// digits, so identical inputs give byte-identical output.  Portraits are
// standalone SVG, equally deterministic.
#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dae/bif_scan.hpp"
#include "dae/classify1d.hpp"
#include "dae/classify2d.hpp"
#include "dae/desing.hpp"
#include "dae/system.hpp"

namespace dae::io {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// System files

struct FileError : std::runtime_error {
  int line = 0;  // 1-based; 0 for whole-file problems (missing key, io error)
  int col = 0;   // 1-based
  FileError(const std::string& origin, int line_, int col_, const std::string& msg);
};

struct FileConfig {
  SystemDef def;
  std::optional<double> alpha;
  std::optional<Interval> alpha_range;
  BBox bbox{-2.0, -2.0, 2.0, 2.0};  // dim 1 uses [x0, x1] only
  bool bbox_given = false;
  std::optional<double> tol_residual;
  std::optional<int> grid;
  std::optional<int> samples;
  std::vector<Vec2> seeds;  // dim 1: y = 0
  std::string origin;       // file path, for error messages
};

// Parses system-file text; `origin` names the source in errors.
FileConfig parse_system_text(std::string_view text, const std::string& origin);
FileConfig load_system_file(const std::string& path);

// ---------------------------------------------------------------------------
// Canonical JSON

// Serializes with sorted object keys (the Json object container is ordered),
// two-space indentation, and %.17g floats; non-finite numbers become null.
std::string dump_canonical(const Json& j);

std::string fmt17(double v);

// ---------------------------------------------------------------------------
// Report assembly

Json tol_to_json(const Tol& tol);
Json system_to_json(const SystemDef& def);

Json point_to_json(const d2::SpecialPoint2D& sp);
Json point_to_json(const d1::SpecialPoint1D& sp);
Json sigma_to_json(const d2::SigmaCurve& curve);
Json sectors_to_json(const d2::SectorDecomposition& sd);
Json event_to_json(const scan::BifEvent& ev);
Json orbit_pieces_to_json(const std::vector<d2::DaeOrbitPiece>& pieces);

// Every code has a schema entry (documentation payload in scan reports) and
// an SVG glyph; tests iterate kAllBifCodes to keep both exhaustive.
inline constexpr std::array<d2::BifCode, 15> kAllBifCodes = {
    d2::BifCode::T1, d2::BifCode::T2, d2::BifCode::L1,  d2::BifCode::L2,
    d2::BifCode::L3, d2::BifCode::L4, d2::BifCode::L5,  d2::BifCode::L6,
    d2::BifCode::L7, d2::BifCode::L8, d2::BifCode::L9,  d2::BifCode::G6FoldFold,
    d2::BifCode::A11, d2::BifCode::A21, d2::BifCode::A300,
};

Json code_schema(d2::BifCode code);
Json all_code_schemas();

// SVG <g> fragment drawing the badge for a code, centered at the origin of
// its local frame; the caller wraps it in a translate transform.
std::string code_glyph(d2::BifCode code);

// ---------------------------------------------------------------------------
// Portraits

struct SvgOptions {
  int size = 720;     // canvas is size x size plus the legend strip
  int margin = 52;
  double t_span = 12.0;   // companion-time span per orbit direction
  bool sectors = true;
  bool legend = true;
};

// Phase portrait: singularity curve with arc labels, special-point glyphs,
// sector rays at folded nodes/saddles, and orbit pieces through the seed
// points (defaults are used when `seeds` is empty).
std::string render_portrait_2d(const System2D& sys, double alpha, const BBox& box,
                               const std::vector<Vec2>& seeds, const SvgOptions& opt = {},
                               const Tol& tol = {});

// Line portrait: special points on the x axis with flow arrows between them.
std::string render_portrait_1d(const System1D& sys, double alpha, Interval range,
                               const SvgOptions& opt = {}, const Tol& tol = {});

}  // namespace dae::io

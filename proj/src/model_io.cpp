#include "blendfit/model_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

namespace blendfit {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

// Shortest decimal form that parses back to the same double; 17 significant
// digits always suffice.
void append_number(std::string& out, double v) {
  char buf[40];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  out += buf;
}

void append_vector(std::string& out, const std::vector<double>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    append_number(out, v[i]);
  }
  out += ']';
}

void append_pieces(std::string& out, const std::vector<CubicSegment>& pieces) {
  out += '[';
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    if (p) out += ',';
    out += "{\"breakpoints\":[";
    append_number(out, pieces[p].lo);
    out += ',';
    append_number(out, pieces[p].hi);
    out += "],\"control\":[";
    for (int c = 0; c < 4; ++c) {
      if (c) out += ',';
      append_vector(out, pieces[p].control[c]);
    }
    out += "]}";
  }
  out += ']';
}

double parse_strict_double(const std::string& field, const std::string& context) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw std::invalid_argument(context + ": bad numeric field '" + field + "'");
  }
  return v;
}

std::vector<double> number_array(const json& j, const std::string& context) {
  if (!j.is_array()) throw std::invalid_argument(context + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) throw std::invalid_argument(context + ": expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<CubicSegment> read_pieces(const json& j, int dim, const std::string& context) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument(context + ": expected a nonempty piece array");
  }
  std::vector<CubicSegment> pieces;
  pieces.reserve(j.size());
  for (const auto& pj : j) {
    CubicSegment seg;
    const std::vector<double> bp = number_array(pj.at("breakpoints"), context + ".breakpoints");
    if (bp.size() != 2 || !(bp[1] > bp[0])) {
      throw std::invalid_argument(context + ": breakpoints must be an increasing pair");
    }
    seg.lo = bp[0];
    seg.hi = bp[1];
    const json& ctrl = pj.at("control");
    if (!ctrl.is_array() || ctrl.size() != 4) {
      throw std::invalid_argument(context + ": control must hold four points");
    }
    for (int c = 0; c < 4; ++c) {
      seg.control[c] = number_array(ctrl[c], context + ".control");
      if (static_cast<int>(seg.control[c].size()) != dim) {
        throw std::invalid_argument(context + ": control point dimension mismatch");
      }
    }
    pieces.push_back(std::move(seg));
  }
  return pieces;
}

void check_piece_coverage(const std::vector<CubicSegment>& pieces, int i,
                          const std::string& context) {
  if (std::abs(pieces.front().lo - i) > 1e-9 || std::abs(pieces.back().hi - (i + 1)) > 1e-9) {
    throw std::invalid_argument(context + ": pieces do not span the interval");
  }
  for (std::size_t p = 1; p < pieces.size(); ++p) {
    if (std::abs(pieces[p].lo - pieces[p - 1].hi) > 1e-9) {
      throw std::invalid_argument(context + ": pieces are not contiguous");
    }
  }
}

}  // namespace

DataSet read_data_csv(const std::string& path, const Manifold& M) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file: " + path);
  const int dim = M.ambient_dim();

  std::string expected_header = "t";
  for (int k = 0; k < dim; ++k) expected_header += ",c" + std::to_string(k);

  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument(path + ": empty data file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) {
    throw std::invalid_argument(path + ": header must be '" + expected_header + "'");
  }

  DataSet data;
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    std::ostringstream ctx;
    ctx << path << " row " << row;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (static_cast<int>(fields.size()) != dim + 1) {
      throw std::invalid_argument(ctx.str() + ": expected " + std::to_string(dim + 1) + " fields");
    }
    const double t = parse_strict_double(fields[0], ctx.str());
    if (!data.times.times.empty() && !(t > data.times.times.back())) {
      throw std::invalid_argument(ctx.str() + ": times must be strictly increasing");
    }
    Point p;
    p.coords.resize(dim);
    for (int k = 0; k < dim; ++k) p.coords[k] = parse_strict_double(fields[k + 1], ctx.str());
    M.require_point(p, ctx.str());
    data.times.times.push_back(t);
    data.points.push_back(std::move(p));
  }
  if (data.points.size() < 2) throw std::invalid_argument(path + ": need at least two data rows");
  return data;
}

void write_data_csv(const std::string& path, const DataSet& data) {
  std::string out = "t";
  const int dim = data.points.empty() ? 0 : static_cast<int>(data.points.front().coords.size());
  for (int k = 0; k < dim; ++k) out += ",c" + std::to_string(k);
  out += '\n';
  for (std::size_t i = 0; i < data.points.size(); ++i) {
    append_number(out, data.times.times[i]);
    for (double c : data.points[i].coords) {
      out += ',';
      append_number(out, c);
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << out;
}

void save_model(const std::string& path, const BlendedSpline& s) {
  std::string out = "{\"format_version\":";
  out += std::to_string(kFormatVersion);
  out += ",\"manifold\":{\"kind\":\"" + to_string(s.manifold.kind) + "\",\"ambient_dim\":";
  out += std::to_string(s.manifold.ambient_dim);
  out += "},\"n\":" + std::to_string(s.intervals);
  out += ",\"lambda\":";
  if (std::isinf(s.lambda)) {
    out += "\"inf\"";
  } else {
    append_number(out, s.lambda);
  }
  out += ",\"times\":";
  append_vector(out, s.data_times.times);
  out += ",\"anchors\":{\"indices\":[";
  for (std::size_t i = 0; i < s.anchors.indices.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s.anchors.indices[i]);
  }
  out += "],\"points\":[";
  for (std::size_t i = 0; i < s.anchors.points.size(); ++i) {
    if (i) out += ',';
    append_vector(out, s.anchors.points[i].coords);
  }
  out += "]},\"intervals\":[";
  for (int i = 0; i < s.intervals; ++i) {
    if (i) out += ',';
    out += "{\"i\":" + std::to_string(i) + ",\"left_pieces\":";
    append_pieces(out, s.pieces[i].left_pieces);
    out += ",\"right_pieces\":";
    append_pieces(out, s.pieces[i].right_pieces);
    out += '}';
  }
  out += "]}\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << out;
}

BlendedSpline load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": not valid JSON (" + e.what() + ")");
  }
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) {
      throw std::invalid_argument("unsupported format_version");
    }
    BlendedSpline s;
    s.manifold.kind = manifold_kind_from_string(j.at("manifold").at("kind").get<std::string>());
    s.manifold.ambient_dim = j.at("manifold").at("ambient_dim").get<int>();
    check_descriptor(s.manifold);
    const int dim = s.manifold.ambient_dim;

    s.intervals = j.at("n").get<int>();
    if (s.intervals < 1) throw std::invalid_argument("n must be at least 1");

    const json& lj = j.at("lambda");
    if (lj.is_string()) {
      if (lj.get<std::string>() != "inf") throw std::invalid_argument("lambda string must be 'inf'");
      s.lambda = std::numeric_limits<double>::infinity();
    } else if (lj.is_number()) {
      s.lambda = lj.get<double>();
      if (!(s.lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    } else {
      throw std::invalid_argument("lambda must be a number or 'inf'");
    }

    s.data_times.times = number_array(j.at("times"), "times");
    check_knot_grid(s.data_times);
    const int m1 = static_cast<int>(s.data_times.times.size());

    const json& aj = j.at("anchors");
    const json& idx = aj.at("indices");
    if (!idx.is_array() || static_cast<int>(idx.size()) != s.intervals + 1) {
      throw std::invalid_argument("anchors.indices must hold n + 1 entries");
    }
    for (const auto& e : idx) {
      const int k = e.get<int>();
      if (k < 0 || k >= m1) throw std::invalid_argument("anchor index out of range");
      s.anchors.indices.push_back(k);
    }
    const json& pts = aj.at("points");
    if (!pts.is_array() || static_cast<int>(pts.size()) != s.intervals + 1) {
      throw std::invalid_argument("anchors.points must hold n + 1 entries");
    }
    for (const auto& e : pts) {
      Point p;
      p.coords = number_array(e, "anchors.points");
      if (static_cast<int>(p.coords.size()) != dim) {
        throw std::invalid_argument("anchor point dimension mismatch");
      }
      s.anchors.points.push_back(std::move(p));
    }

    const json& ij = j.at("intervals");
    if (!ij.is_array() || static_cast<int>(ij.size()) != s.intervals) {
      throw std::invalid_argument("intervals must hold n entries");
    }
    s.pieces.resize(s.intervals);
    for (int i = 0; i < s.intervals; ++i) {
      const json& one = ij[i];
      if (one.at("i").get<int>() != i) throw std::invalid_argument("interval indices must be 0..n-1 in order");
      std::ostringstream ctx;
      ctx << "interval " << i;
      s.pieces[i].left_pieces = read_pieces(one.at("left_pieces"), dim, ctx.str() + ".left_pieces");
      s.pieces[i].right_pieces =
          read_pieces(one.at("right_pieces"), dim, ctx.str() + ".right_pieces");
      check_piece_coverage(s.pieces[i].left_pieces, i, ctx.str() + ".left_pieces");
      check_piece_coverage(s.pieces[i].right_pieces, i, ctx.str() + ".right_pieces");
    }
    return s;
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": malformed model (" + e.what() + ")");
  }
}

void write_curve_csv(const std::string& path, const std::vector<double>& ts,
                     const std::vector<Point>& points) {
  std::string out = "t";
  const int dim = points.empty() ? 0 : static_cast<int>(points.front().coords.size());
  for (int k = 0; k < dim; ++k) out += ",c" + std::to_string(k);
  out += '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    append_number(out, ts[i]);
    for (double c : points[i].coords) {
      out += ',';
      append_number(out, c);
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << out;
}

void write_speed_csv(const std::string& path, const std::vector<double>& ts,
                     const std::vector<double>& speeds) {
  std::string out = "t,speed\n";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    append_number(out, ts[i]);
    out += ',';
    append_number(out, speeds[i]);
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << out;
}

}  // namespace blendfit

#pragma once

#include <string>
#include <vector>

#include "blendfit/blend.hpp"
#include "blendfit/manifold.hpp"

namespace blendfit {

// Timestamped points read from a data CSV.
struct DataSet {
  KnotGrid times;
  std::vector<Point> points;
};

// Reads `t,c0,...,c{k-1}` rows. Enforces the exact header, strictly
// increasing times, full numeric parses, and membership on M. Throws
// std::invalid_argument (std::runtime_error if the file cannot be opened).
DataSet read_data_csv(const std::string& path, const Manifold& M);

void write_data_csv(const std::string& path, const DataSet& data);

// Serializes a fitted model as JSON. Numbers are printed with 17 significant
// digits so a reload reproduces every coefficient bit for bit; the byte
// stream itself is deterministic. An infinite lambda is stored as "inf".
void save_model(const std::string& path, const BlendedSpline& s);

// Parses and structurally validates a model file (shapes, interval coverage,
// format version). Coordinate values are taken as stored; membership is the
// caller's concern so that corrupted models can be loaded and then diagnosed.
BlendedSpline load_model(const std::string& path);

// `t,c0,...` rows for sampled curve points.
void write_curve_csv(const std::string& path, const std::vector<double>& ts,
                     const std::vector<Point>& points);

// `t,speed` rows.
void write_speed_csv(const std::string& path, const std::vector<double>& ts,
                     const std::vector<double>& speeds);

}  // namespace blendfit

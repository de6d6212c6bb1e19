#include "rssidoa/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "csv_util.hpp"
#include "rssidoa/angles.hpp"
#include "rssidoa/error.hpp"

namespace rssidoa {

namespace {

// Neumaier summation over sorted values: the result depends only on the
// multiset of inputs.
double order_free_mean(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return (sum + comp) / static_cast<double>(values.size());
}

void check_sensor(const PowerPattern& pattern, std::size_t sensor) {
  if (sensor >= pattern.num_sensors()) {
    throw Error(ErrorKind::SensorOutOfRange, "sensor " + std::to_string(sensor) + " not in [0, " +
                                                 std::to_string(pattern.num_sensors()) + ")");
  }
}

}  // namespace

PowerPattern PowerPattern::from_normalized_gains(std::vector<double> knot_angles_deg,
                                                 std::size_t num_sensors,
                                                 std::vector<double> gains) {
  if (num_sensors == 0) throw Error(ErrorKind::BadSpec, "pattern needs at least one sensor");
  if (knot_angles_deg.size() < 4) {
    throw Error(ErrorKind::TooFewPoints, "pattern needs at least 4 knot angles");
  }
  if (gains.size() != knot_angles_deg.size() * num_sensors) {
    throw Error(ErrorKind::DimensionMismatch, "gains size does not match knots x sensors");
  }
  double max_gain = 0.0;
  for (double g : gains) {
    if (!(g >= 0.0 && g <= 1.0)) throw Error(ErrorKind::DomainError, "gain outside [0, 1]");
    max_gain = std::max(max_gain, g);
  }
  if (max_gain != 1.0) throw Error(ErrorKind::DomainError, "gains are not normalized to max 1");

  PowerPattern p;
  p.knots_ = std::move(knot_angles_deg);
  p.num_sensors_ = num_sensors;
  p.gains_ = std::move(gains);
  p.splines_.reserve(num_sensors);
  std::vector<double> column(p.knots_.size());
  for (std::size_t m = 0; m < num_sensors; ++m) {
    for (std::size_t i = 0; i < p.knots_.size(); ++i) column[i] = p.gains_[i * num_sensors + m];
    p.splines_.emplace_back(p.knots_, column);
  }
  return p;
}

double PowerPattern::raw_gain(std::size_t sensor, double angle_deg) const {
  return splines_[sensor].value(angle_deg);
}

void PowerPattern::gains_at(double angle_deg, std::span<double> out) const {
  for (std::size_t m = 0; m < num_sensors_; ++m) {
    out[m] = std::max(0.0, splines_[m].value(angle_deg));
  }
}

PowerPattern build_pattern(std::span<const CalibrationRecord> records) {
  if (records.empty()) throw Error(ErrorKind::EmptyCalibration, "no calibration records");

  std::set<double> angle_set;
  std::size_t num_sensors = 0;
  for (const auto& r : records) {
    if (!(r.angle_deg >= 0.0 && r.angle_deg < kFullTurnDeg)) {
      throw Error(ErrorKind::DomainError, "calibration angle outside [0, 360)");
    }
    if (!(r.rssi >= 0.0)) throw Error(ErrorKind::DomainError, "negative or NaN rssi");
    angle_set.insert(r.angle_deg);
    num_sensors = std::max(num_sensors, r.sensor_index + 1);
  }
  std::vector<double> knots(angle_set.begin(), angle_set.end());
  if (knots.size() < 4) {
    throw Error(ErrorKind::TooFewPoints, "need at least 4 distinct calibration angles");
  }

  std::map<double, std::size_t> angle_row;
  for (std::size_t i = 0; i < knots.size(); ++i) angle_row[knots[i]] = i;

  std::vector<std::vector<double>> cells(knots.size() * num_sensors);
  for (const auto& r : records) {
    cells[angle_row[r.angle_deg] * num_sensors + r.sensor_index].push_back(r.rssi);
  }

  std::vector<double> means(cells.size());
  double global_max = 0.0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].empty()) {
      std::ostringstream msg;
      msg << "no trials for angle " << knots[c / num_sensors] << " deg, sensor "
          << c % num_sensors;
      throw Error(ErrorKind::MissingCell, msg.str());
    }
    means[c] = order_free_mean(cells[c]);
    global_max = std::max(global_max, means[c]);
  }
  if (global_max <= 0.0) throw Error(ErrorKind::AllZero, "every averaged reading is zero");

  for (double& v : means) v /= global_max;
  return PowerPattern::from_normalized_gains(std::move(knots), num_sensors, std::move(means));
}

double gain_at(const PowerPattern& pattern, std::size_t sensor, double angle_deg) {
  check_sensor(pattern, sensor);
  return std::max(0.0, pattern.raw_gain(sensor, angle_deg));
}

double gain_derivative(const PowerPattern& pattern, std::size_t sensor, double angle_deg) {
  check_sensor(pattern, sensor);
  return pattern.spline(sensor).derivative(angle_deg);
}

std::vector<CalibrationRecord> read_calibration_csv(std::istream& in) {
  std::vector<CalibrationRecord> records;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank(line)) continue;
    const auto fields = detail::split_fields(line);
    if (!header_seen) {
      if (fields.size() != 4 || fields[0] != "angle_deg" || fields[1] != "sensor_index" ||
          fields[2] != "trial_index" || fields[3] != "rssi") {
        detail::parse_fail(line_no, "expected header angle_deg,sensor_index,trial_index,rssi");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 4) detail::parse_fail(line_no, "expected 4 fields");
    CalibrationRecord r;
    r.angle_deg = detail::parse_double(fields[0], line_no, "angle_deg");
    r.sensor_index = detail::parse_index(fields[1], line_no, "sensor_index");
    r.trial_index = detail::parse_index(fields[2], line_no, "trial_index");
    r.rssi = detail::parse_double(fields[3], line_no, "rssi");
    if (!(r.angle_deg >= 0.0 && r.angle_deg < kFullTurnDeg)) {
      detail::parse_fail(line_no, "angle_deg outside [0, 360)");
    }
    if (!(r.rssi >= 0.0)) detail::parse_fail(line_no, "rssi must be >= 0");
    records.push_back(r);
  }
  if (!header_seen) detail::parse_fail(line_no, "missing header");
  return records;
}

void write_calibration_csv(std::ostream& out, std::span<const CalibrationRecord> records) {
  out << "angle_deg,sensor_index,trial_index,rssi\n";
  const auto old_precision = out.precision(17);
  for (const auto& r : records) {
    out << r.angle_deg << ',' << r.sensor_index << ',' << r.trial_index << ',' << r.rssi << '\n';
  }
  out.precision(old_precision);
}

std::string pattern_to_json(const PowerPattern& pattern) {
  nlohmann::json doc;
  doc["knot_angles_deg"] = pattern.knot_angles_deg();
  doc["num_sensors"] = pattern.num_sensors();
  doc["gains"] = pattern.gains();
  return doc.dump(2) + "\n";
}

PowerPattern pattern_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    return PowerPattern::from_normalized_gains(doc.at("knot_angles_deg").get<std::vector<double>>(),
                                               doc.at("num_sensors").get<std::size_t>(),
                                               doc.at("gains").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("pattern document: ") + e.what());
  }
}

}  // namespace rssidoa

#include "pdcsim/object.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pdcsim/io.hpp"

namespace pdcsim::ghost {

namespace {

bool inside(double x, double lo, double hi) {
  const double tol = 1e-9 * std::max(std::abs(hi - lo), 1e-300);
  return x > lo + tol && x < hi - tol;
}

}  // namespace

SampledObject::SampledObject(std::vector<double> x, std::vector<Complex> t)
    : x_(std::move(x)), t_(std::move(t)), dx_(0.0) {
  if (x_.size() != t_.size()) throw std::invalid_argument("object grid and values differ in size");
  if (x_.size() < 2) throw std::invalid_argument("object needs at least two samples");
  dx_ = (x_.back() - x_.front()) / static_cast<double>(x_.size() - 1);
  if (!(dx_ > 0)) throw std::invalid_argument("object grid must be increasing");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const double expected = x_.front() + static_cast<double>(i) * dx_;
    if (std::abs(x_[i] - expected) > 1e-6 * dx_)
      throw std::invalid_argument("object grid must be uniform");
    if (std::abs(t_[i]) > 1.0 + 1e-12)
      throw std::invalid_argument("object transmission must satisfy |t| <= 1");
    if (t_[i] != Complex(0.0, 0.0)) support_.push_back(i);
  }
}

Complex SampledObject::at(double x) const {
  const double pos = (x - x_.front()) / dx_;
  const double idx = std::round(pos);
  if (idx < 0 || idx > static_cast<double>(x_.size() - 1)) return {0.0, 0.0};
  if (std::abs(pos - idx) > 0.5) return {0.0, 0.0};
  return t_[static_cast<std::size_t>(idx)];
}

Complex SampledObject::spectrum(double k) const {
  Complex sum{0.0, 0.0};
  for (std::size_t i : support_) sum += t_[i] * std::polar(1.0, -k * x_[i]);
  return sum * dx_;
}

std::vector<double> uniform_grid(int first, int count, double dx) {
  if (count < 2 || !(dx > 0)) throw std::invalid_argument("grid needs count >= 2 and dx > 0");
  std::vector<double> x(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) x[static_cast<std::size_t>(i)] = (first + i) * dx;
  return x;
}

SampledObject single_slit(const std::vector<double>& x, double width, double center) {
  if (!(width > 0)) throw std::invalid_argument("slit width must be > 0");
  std::vector<Complex> t(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    t[i] = inside(x[i], center - width / 2, center + width / 2) ? 1.0 : 0.0;
  return SampledObject(x, std::move(t));
}

SampledObject double_slit(const std::vector<double>& x, double width, double separation) {
  if (!(width > 0) || !(separation > width))
    throw std::invalid_argument("double slit needs 0 < width < separation");
  std::vector<Complex> t(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool open = inside(x[i], -separation / 2 - width / 2, -separation / 2 + width / 2) ||
                      inside(x[i], separation / 2 - width / 2, separation / 2 + width / 2);
    t[i] = open ? 1.0 : 0.0;
  }
  return SampledObject(x, std::move(t));
}

SampledObject grating(const std::vector<double>& x, double period, double duty_cycle, int slits) {
  if (!(period > 0) || !(duty_cycle > 0 && duty_cycle < 1) || slits < 1)
    throw std::invalid_argument("grating needs period > 0, duty in (0,1), slits >= 1");
  const double width = period * duty_cycle;
  std::vector<Complex> t(x.size());
  for (int s = 0; s < slits; ++s) {
    const double c = (s - 0.5 * (slits - 1)) * period;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (inside(x[i], c - width / 2, c + width / 2)) t[i] = 1.0;
  }
  return SampledObject(x, std::move(t));
}

SampledObject flat_object(const std::vector<double>& x, Complex value) {
  return SampledObject(x, std::vector<Complex>(x.size(), value));
}

SampledObject load_object_csv(const std::filesystem::path& path) {
  std::istringstream is(io::read_file(path));
  std::string line;
  std::vector<double> x;
  std::vector<Complex> t;
  bool header = true;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = io::split_csv_line(line);
    if (header) {
      header = false;
      bool numeric = true;
      try {
        std::size_t used = 0;
        std::stod(fields.at(0), &used);
      } catch (const std::exception&) {
        numeric = false;
      }
      if (!numeric) continue;
    }
    if (fields.size() < 2)
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                  ": expected x,re[,im]");
    try {
      const double xv = std::stod(fields[0]);
      const double re = std::stod(fields[1]);
      const double im = fields.size() > 2 && !fields[2].empty() ? std::stod(fields[2]) : 0.0;
      x.push_back(xv);
      t.emplace_back(re, im);
    } catch (const std::exception&) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                  ": malformed number");
    }
  }
  return SampledObject(std::move(x), std::move(t));
}

}  // namespace pdcsim::ghost

// Sampled 1-D transmission masks for the Test arm.
#pragma once

#include <complex>
#include <filesystem>
#include <vector>

namespace pdcsim::ghost {

using Complex = std::complex<double>;

/// Transmission t(x) on a uniform grid. Each sample stands for a cell of
/// width dx centred on it; t vanishes outside the outermost cells.
class SampledObject {
 public:
  SampledObject(std::vector<double> x, std::vector<Complex> t);

  const std::vector<double>& x() const { return x_; }
  const std::vector<Complex>& t() const { return t_; }
  double dx() const { return dx_; }

  /// Cell value at x, zero outside the sampled support.
  Complex at(double x) const;

  /// t̃(k) = dx Σ_j t_j e^{−i k x_j}.
  Complex spectrum(double k) const;

 private:
  std::vector<double> x_;
  std::vector<Complex> t_;
  double dx_;
  std::vector<std::size_t> support_;  // indices with t ≠ 0
};

/// x_j = j·dx for j = first .. first + count − 1.
std::vector<double> uniform_grid(int first, int count, double dx);

/// Cell-membership masks: t_j = 1 where the cell centre lies inside an
/// aperture, 0 elsewhere.
SampledObject single_slit(const std::vector<double>& x, double width, double center = 0.0);
SampledObject double_slit(const std::vector<double>& x, double width, double separation);
SampledObject grating(const std::vector<double>& x, double period, double duty_cycle, int slits);
SampledObject flat_object(const std::vector<double>& x, Complex value = 1.0);

/// CSV with header and columns x, re(t), im(t).
SampledObject load_object_csv(const std::filesystem::path& path);

}  // namespace pdcsim::ghost

#include "pdcsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "pdcsim/correlations.hpp"
#include "pdcsim/factorization.hpp"
#include "pdcsim/fock.hpp"
#include "pdcsim/io.hpp"
#include "pdcsim/parallel.hpp"

namespace pdcsim::scenario {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

const std::map<std::string, Kind>& kind_names() {
  static const std::map<std::string, Kind> names{
      {"separability-sweep", Kind::SeparabilitySweep},
      {"nrf-sweep", Kind::NrfSweep},
      {"oracle-validate", Kind::OracleValidate},
      {"ghost-image", Kind::GhostImage},
      {"ghost-diffraction", Kind::GhostDiffraction},
  };
  return names;
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

const json* find(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const json& value, const std::string& field) {
  if (!value.is_number()) throw ConfigError(field, "expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
  return v;
}

double required_number(const json& obj, const std::string& prefix, const std::string& key) {
  const json* v = find(obj, key);
  if (!v) throw ConfigError(join(prefix, key), "required");
  return number(*v, join(prefix, key));
}

double optional_number(const json& obj, const std::string& prefix, const std::string& key,
                       double fallback) {
  const json* v = find(obj, key);
  return v ? number(*v, join(prefix, key)) : fallback;
}

int integer(const json& value, const std::string& field) {
  if (!value.is_number_integer()) throw ConfigError(field, "expected an integer");
  return value.get<int>();
}

double positive(double v, const std::string& field) {
  if (!(v > 0)) throw ConfigError(field, "must be > 0");
  return v;
}

double non_negative(double v, const std::string& field) {
  if (!(v >= 0)) throw ConfigError(field, "must be >= 0");
  return v;
}

const json& object_field(const json& obj, const std::string& key) {
  const json* v = find(obj, key);
  if (!v) throw ConfigError(key, "required");
  if (!v->is_object()) throw ConfigError(key, "expected an object");
  return *v;
}

// A list of numbers, or {"linspace": [a, b, n]} / {"logspace": [a, b, n]}
// (geometric from a to b, a and b > 0).
std::vector<double> values(const json& v, const std::string& field) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(number(v, field));
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
  } else if (v.is_object() && v.size() == 1 && (v.contains("linspace") || v.contains("logspace"))) {
    const bool log = v.contains("logspace");
    const std::string key = log ? "logspace" : "linspace";
    const json& spec = v.at(key);
    const std::string sub = field + "." + key;
    if (!spec.is_array() || spec.size() != 3) throw ConfigError(sub, "expected [start, stop, count]");
    const double a = number(spec[0], sub + "[0]");
    const double b = number(spec[1], sub + "[1]");
    const int n = integer(spec[2], sub + "[2]");
    if (n < 1) throw ConfigError(sub + "[2]", "count must be >= 1");
    if (log && !(a > 0 && b > 0)) throw ConfigError(sub, "logspace endpoints must be > 0");
    for (int i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      out.push_back(log ? a * std::pow(b / a, f) : a + (b - a) * f);
    }
  } else {
    throw ConfigError(field, "expected a number, a list, or {linspace|logspace: [a, b, n]}");
  }
  if (out.empty()) throw ConfigError(field, "grid must be non-empty");
  return out;
}

ParameterGrid parse_grid(const json& doc) {
  const json& g = object_field(doc, "grid");
  ParameterGrid grid;
  for (auto [key, target] : {std::pair{"mu_t", &grid.mu_t}, std::pair{"mu_r", &grid.mu_r},
                             std::pair{"n_pdc", &grid.n_pdc}}) {
    const json* v = find(g, key);
    if (!v) throw ConfigError(join("grid", key), "required");
    *target = values(*v, join("grid", key));
    for (double x : *target) non_negative(x, join("grid", key));
  }
  if (const json* v = find(g, "tau")) {
    grid.tau = values(*v, "grid.tau");
    for (double t : grid.tau)
      if (!(t > 0 && t <= 1)) throw ConfigError("grid.tau", "transmission must lie in (0, 1]");
  }
  return grid;
}

ghost::GhostGeometry parse_geometry(const json& doc, Kind kind) {
  const json& g = object_field(doc, "geometry");
  ghost::GhostGeometry geom;
  geom.lambda = positive(required_number(g, "geometry", "lambda"), "geometry.lambda");
  geom.d1 = non_negative(required_number(g, "geometry", "d1"), "geometry.d1");
  geom.d2 = non_negative(required_number(g, "geometry", "d2"), "geometry.d2");
  geom.d3 = positive(required_number(g, "geometry", "d3"), "geometry.d3");
  geom.f_r = positive(required_number(g, "geometry", "f_r"), "geometry.f_r");
  geom.f_t = optional_number(g, "geometry", "f_t", 0.0);
  const std::string fallback = kind == Kind::GhostDiffraction ? "fourier-lens" : "object-plane";
  const std::string collection = g.value("collection", fallback);
  if (collection == "object-plane")
    geom.variant = ghost::Collection::ObjectPlane;
  else if (collection == "fourier-lens")
    geom.variant = ghost::Collection::FourierLens;
  else
    throw ConfigError("geometry.collection", "expected object-plane or fourier-lens");
  if (geom.variant == ghost::Collection::FourierLens)
    positive(geom.f_t, "geometry.f_t");
  try {
    geom.validate();
  } catch (const std::exception& e) {
    throw ConfigError("geometry", e.what());
  }
  ghost::ReferenceBranch branch{};
  try {
    branch = geom.reference_branch();
  } catch (const ghost::IllConditionedGeometry& e) {
    throw ConfigError("geometry.f_r", e.what());
  }
  if (kind == Kind::GhostImage && branch != ghost::ReferenceBranch::Imaging)
    throw ConfigError("geometry.f_r", "ghost-image needs f_r != d3 (imaging branch)");
  if (kind == Kind::GhostDiffraction) {
    if (branch != ghost::ReferenceBranch::Fourier)
      throw ConfigError("geometry.f_r", "ghost-diffraction needs f_r == d3");
    if (geom.variant != ghost::Collection::FourierLens)
      throw ConfigError("geometry.collection",
                        "ghost-diffraction needs fourier-lens collection; object-plane "
                        "collection carries no diffraction pattern");
  }
  return geom;
}

ProfileSpec parse_profile(const json& doc) {
  const json& p = object_field(doc, "profile");
  ProfileSpec spec;
  const std::string type = p.value("type", "constant");
  if (type == "constant")
    spec.type = ProfileSpec::Type::Constant;
  else if (type == "sinc")
    spec.type = ProfileSpec::Type::Sinc;
  else
    throw ConfigError("profile.type", "expected constant or sinc");
  spec.mu_t = non_negative(optional_number(p, "profile", "mu_t", 0.0), "profile.mu_t");
  spec.mu_r = non_negative(optional_number(p, "profile", "mu_r", 0.0), "profile.mu_r");
  const json* n = find(p, "n_pdc");
  const json* k = find(p, "kappa");
  if ((n != nullptr) == (k != nullptr))
    throw ConfigError("profile.n_pdc", "give exactly one of n_pdc or kappa");
  if (n) {
    const double npdc = non_negative(number(*n, "profile.n_pdc"), "profile.n_pdc");
    spec.kappa = std::asinh(std::sqrt(npdc));
  } else {
    spec.kappa = non_negative(number(*k, "profile.kappa"), "profile.kappa");
  }
  if (spec.type == ProfileSpec::Type::Sinc)
    spec.beta = positive(required_number(p, "profile", "beta"), "profile.beta");
  return spec;
}

ObjectSpec parse_object(const json& doc, const std::filesystem::path& base_dir) {
  const json& o = object_field(doc, "object");
  ObjectSpec spec;
  const std::string type = o.value("type", "");
  if (type == "single-slit") {
    spec.type = ObjectSpec::Type::SingleSlit;
    spec.width = positive(required_number(o, "object", "width"), "object.width");
    spec.center = optional_number(o, "object", "center", 0.0);
    spec.feature = spec.width;
  } else if (type == "double-slit") {
    spec.type = ObjectSpec::Type::DoubleSlit;
    spec.width = positive(required_number(o, "object", "width"), "object.width");
    spec.separation = required_number(o, "object", "separation");
    if (!(spec.separation > spec.width))
      throw ConfigError("object.separation", "must exceed object.width");
    spec.feature = spec.width;
  } else if (type == "grating") {
    spec.type = ObjectSpec::Type::Grating;
    spec.period = positive(required_number(o, "object", "period"), "object.period");
    spec.duty = optional_number(o, "object", "duty", 0.5);
    if (!(spec.duty > 0 && spec.duty < 1)) throw ConfigError("object.duty", "must lie in (0, 1)");
    if (const json* s = find(o, "slits")) spec.slits = integer(*s, "object.slits");
    if (spec.slits < 1) throw ConfigError("object.slits", "must be >= 1");
    spec.feature = spec.period * spec.duty;
  } else if (type == "csv") {
    spec.type = ObjectSpec::Type::Csv;
    const json* path = find(o, "path");
    if (!path || !path->is_string()) throw ConfigError("object.path", "required string");
    spec.csv = path->get<std::string>();
    if (spec.csv.is_relative() && !base_dir.empty()) spec.csv = base_dir / spec.csv;
    if (!std::filesystem::exists(spec.csv))
      throw ConfigError("object.path", "file not found: " + spec.csv.string());
    spec.feature = positive(required_number(o, "object", "feature"), "object.feature");
  } else {
    throw ConfigError("object.type", "expected single-slit, double-slit, grating or csv");
  }
  if (const json* f = find(o, "feature")) spec.feature = positive(number(*f, "object.feature"), "object.feature");
  if (const json* dx = find(o, "dx")) spec.dx = positive(number(*dx, "object.dx"), "object.dx");
  if (const json* nx = find(o, "nx")) spec.nx = integer(*nx, "object.nx");
  if (spec.nx < 2) throw ConfigError("object.nx", "must be >= 2");
  return spec;
}

ghost::QGrid make_qgrid(const ScenarioConfig& c) {
  if (c.dq) return ghost::QGrid{c.q_half, *c.dq};
  return ghost::default_qgrid(c.object.feature, c.q_half, c.q_window);
}

ghost::KernelProfile make_profile(const ProfileSpec& p) {
  if (p.type == ProfileSpec::Type::Sinc)
    return ghost::KernelProfile::sinc(p.mu_t, p.mu_r, p.kappa, p.beta);
  return ghost::KernelProfile::constant(p.mu_t, p.mu_r, p.kappa);
}

ghost::SampledObject make_object(const ObjectSpec& o, const std::vector<double>& x) {
  switch (o.type) {
    case ObjectSpec::Type::SingleSlit:
      return ghost::single_slit(x, o.width, o.center);
    case ObjectSpec::Type::DoubleSlit:
      return ghost::double_slit(x, o.width, o.separation);
    case ObjectSpec::Type::Grating:
      return ghost::grating(x, o.period, o.duty, o.slits);
    case ObjectSpec::Type::Csv:
      break;
  }
  return ghost::load_object_csv(o.csv);
}

// Writes artifacts serially and records their hashes.
class Writer {
 public:
  Writer(std::filesystem::path dir, Manifest& manifest) : dir_(std::move(dir)), manifest_(manifest) {}
  void put(const std::string& name, const std::string& bytes) {
    io::write_file(dir_ / name, bytes);
    manifest_.files.push_back({name, io::sha256_hex(bytes)});
  }

 private:
  std::filesystem::path dir_;
  Manifest& manifest_;
};

void add_check(Manifest& m, std::string name, double value, double threshold, bool passed) {
  m.checks.push_back({std::move(name), value, threshold, passed});
}

std::string reconstruction_csv(const ghost::Reconstruction& r) {
  std::ostringstream os;
  os << "x,value_raw,value_normalized\n";
  for (std::size_t i = 0; i < r.x.size(); ++i)
    os << io::format_double(r.x[i]) << ',' << io::format_double(r.raw[i]) << ','
       << io::format_double(r.normalized[i]) << '\n';
  return os.str();
}

struct GridPoint {
  double mu_t, mu_r, n_pdc, tau;
};

std::vector<GridPoint> expand(const ParameterGrid& g, bool with_tau) {
  std::vector<GridPoint> pts;
  const std::vector<double> taus = with_tau ? g.tau : std::vector<double>{1.0};
  for (double mt : g.mu_t)
    for (double mr : g.mu_r)
      for (double n : g.n_pdc)
        for (double t : taus) pts.push_back({mt, mr, n, t});
  return pts;
}

void run_separability(const ScenarioConfig& c, Writer& out, Manifest& m, unsigned workers) {
  const auto pts = expand(c.grid, true);
  std::vector<SeparabilityVerdict<double>> verdicts(pts.size());
  parallel_for(pts.size(), workers, [&](std::size_t i) {
    const auto p = ModeParams<double>::from_npdc(pts[i].mu_t, pts[i].mu_r, pts[i].n_pdc);
    verdicts[i] = pts[i].tau == 1.0 ? check_separability(p) : check_separability_lossy(p, pts[i].tau);
  });
  std::ostringstream os;
  os << "mu_t,mu_r,n_pdc,tau,margin,min_pt_symplectic,separable,boundary\n";
  int mismatches = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& v = verdicts[i];
    if (!v.routes_agree()) ++mismatches;
    os << io::format_double(pts[i].mu_t) << ',' << io::format_double(pts[i].mu_r) << ','
       << io::format_double(pts[i].n_pdc) << ',' << io::format_double(pts[i].tau) << ','
       << io::format_double(v.margin) << ',' << io::format_double(v.min_pt_symplectic_eigenvalue)
       << ',' << (v.separable ? "true" : "false") << ',' << (v.boundary ? "true" : "false")
       << '\n';
  }
  out.put("separability.csv", os.str());
  add_check(m, "spectral_route_mismatches", mismatches, 0, mismatches == 0);

  if (c.random_checks > 0) {
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> mean(0.0, 5.0);
    std::uniform_real_distribution<double> loss(0.0, 1.0);
    int disagreements = 0;
    for (int i = 0; i < c.random_checks; ++i) {
      const double mt = mean(rng), mr = mean(rng), n = mean(rng);
      const double tau = 1.0 - loss(rng);  // (0, 1]
      const auto p = ModeParams<double>::from_npdc(mt, mr, n);
      if (check_separability_lossy(p, tau).separable != check_separability(p).separable)
        ++disagreements;
    }
    add_check(m, "loss_invariance_disagreements", disagreements, 0, disagreements == 0);
  }
}

void run_nrf(const ScenarioConfig& c, Writer& out, Manifest& m, unsigned workers) {
  const corr::SweepGrid grid{c.grid.mu_t, c.grid.mu_r, c.grid.n_pdc};
  const auto rows = corr::sweep(grid, c.grid.tau, workers);
  std::ostringstream os;
  corr::write_csv(os, rows);
  out.put("correlations.csv", os.str());

  std::ostringstream th;
  th << "mu_t,mu_r,nrf_threshold,separability_threshold\n";
  for (double mt : c.grid.mu_t)
    for (double mr : c.grid.mu_r)
      th << io::format_double(mt) << ',' << io::format_double(mr) << ','
         << io::format_double(corr::nrf_threshold(mt, mr)) << ','
         << io::format_double(separability_threshold(mt, mr)) << '\n';
  out.put("thresholds.csv", th.str());

  int counterexamples = 0;
  for (const auto& r : rows)
    if (r.nrf && *r.nrf < 1.0 && r.separable) ++counterexamples;
  add_check(m, "sub_shot_noise_separable_points", counterexamples, 0, counterexamples == 0);
}

double relative_error(double value, double reference) {
  const double scale = std::abs(reference);
  return scale > 0 ? std::abs(value - reference) / scale : std::abs(value - reference);
}

void run_oracle(const ScenarioConfig& c, Writer& out, Manifest& m, unsigned workers) {
  const auto pts = expand(c.grid, false);
  struct Row {
    int cutoff{0};
    std::optional<double> deficit;
    MomentSet moments{};
    std::optional<double> error;
    std::optional<ghost::FactorizationReport> factorization;
  };
  std::vector<Row> rows(pts.size());
  parallel_for(pts.size(), workers, [&](std::size_t i) {
    const auto p = ModeParams<double>::from_npdc(pts[i].mu_t, pts[i].mu_r, pts[i].n_pdc);
    Row& row = rows[i];
    row.cutoff = c.cutoff > 0 ? c.cutoff : fock::default_cutoff(p.mu_t, p.mu_r);
    try {
      const auto state = fock::evolve_thermal_pair(
          p.mu_t, p.mu_r, fock::DisentangledCoefficients::from_coupling(p.kappa_abs), row.cutoff);
      row.deficit = state.trace_deficit();
      row.moments = fock::moments(state);
      const MomentSet a = analytic_moments(p.mu_t, p.mu_r, p.n_pdc());
      row.error = std::max({relative_error(row.moments.mean_t, a.mean_t),
                            relative_error(row.moments.mean_r, a.mean_r),
                            relative_error(row.moments.var_t, a.var_t),
                            relative_error(row.moments.var_r, a.var_r),
                            relative_error(row.moments.cross, a.cross)});
      if (c.factorization) row.factorization = ghost::validate_factorization(std::span(&p, 1), row.cutoff);
    } catch (const fock::TruncationError& e) {
      row.deficit = e.deficit();
    }
  });

  std::ostringstream os;
  os << "mu_t,mu_r,n_pdc,cutoff,trace_deficit,mean_t,mean_r,var_t,var_r,cross,max_relative_error\n";
  double worst = 0;
  bool all_defined = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Row& r = rows[i];
    os << io::format_double(pts[i].mu_t) << ',' << io::format_double(pts[i].mu_r) << ','
       << io::format_double(pts[i].n_pdc) << ',' << r.cutoff << ',' << io::format_optional(r.deficit);
    if (r.error) {
      for (double v : {r.moments.mean_t, r.moments.mean_r, r.moments.var_t, r.moments.var_r,
                       r.moments.cross})
        os << ',' << io::format_double(v);
      worst = std::max(worst, *r.error);
    } else {
      all_defined = false;
      for (int k = 0; k < 5; ++k) os << ",undefined";
    }
    os << ',' << io::format_optional(r.error) << '\n';
  }
  out.put("oracle.csv", os.str());
  add_check(m, "truncated_points", all_defined ? 0 : 1, 0, all_defined);
  add_check(m, "max_relative_moment_error", worst, c.tolerance, all_defined && worst < c.tolerance);

  if (!c.factorization) return;
  std::ostringstream fs;
  fs << "mu_t,mu_r,n_pdc,relative_error,pair_amplitude_error,trace_deficit,tolerance,passed\n";
  int failures = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& f = rows[i].factorization;
    fs << io::format_double(pts[i].mu_t) << ',' << io::format_double(pts[i].mu_r) << ','
       << io::format_double(pts[i].n_pdc) << ',';
    if (!f) {
      ++failures;
      fs << "undefined,undefined,undefined,undefined,false\n";
      continue;
    }
    if (!f->passed) ++failures;
    fs << io::format_double(f->max_relative_error) << ','
       << io::format_double(f->max_pair_amplitude_error) << ','
       << io::format_double(f->max_trace_deficit) << ',' << io::format_double(f->tolerance) << ','
       << (f->passed ? "true" : "false") << '\n';
  }
  out.put("factorization.csv", fs.str());
  add_check(m, "factorization_failures", failures, 0, failures == 0);
}

void run_ghost_image(const ScenarioConfig& c, Writer& out, Manifest& m) {
  const ghost::QGrid q = make_qgrid(c);
  const auto grids = ghost::commensurate_imaging_grids(c.geometry, q, c.object.nx);
  const auto object = make_object(c.object, grids.x_t);
  const auto profile = make_profile(c.profile);
  profile.check_symmetric(q);
  const auto result =
      ghost::ghost_image(c.geometry, object, profile, q, grids.x_r, grids.x_t, c.summation);
  out.put("g2_map.pgm", io::encode_pgm(result.map.values));
  out.put("image.csv", reconstruction_csv(result.image));
  if (c.min_ncc) {
    const double mag = c.geometry.magnification();
    std::vector<double> expected(grids.x_r.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
      expected[i] = std::norm(object.at(-grids.x_r[i] / mag));
    const double ncc = ghost::normalized_cross_correlation(result.image.normalized, expected);
    add_check(m, "ncc_vs_magnified_object", ncc, *c.min_ncc, ncc >= *c.min_ncc);
  }
}

void run_ghost_diffraction(const ScenarioConfig& c, Writer& out, Manifest& m) {
  const ghost::QGrid q = make_qgrid(c);
  const double dx = c.object.dx.value_or(c.object.feature / 17.0);
  const auto object = make_object(c.object, ghost::uniform_grid(-c.object.nx / 2, c.object.nx, dx));
  const auto profile = make_profile(c.profile);
  profile.check_symmetric(q);
  const auto x_r = ghost::fourier_plane_grid(c.geometry, q);
  const auto pattern = ghost::ghost_diffraction(c.geometry, object, profile, q, x_r);
  out.put("diffraction.csv", reconstruction_csv(pattern));
  if (c.min_ncc) {
    std::vector<double> expected(x_r.size());
    for (std::size_t i = 0; i < x_r.size(); ++i)
      expected[i] = std::norm(object.spectrum(2 * kPi * x_r[i] / (c.geometry.lambda * c.geometry.d3)));
    const double ncc = ghost::normalized_cross_correlation(pattern.normalized, expected);
    add_check(m, "ncc_vs_object_spectrum", ncc, *c.min_ncc, ncc >= *c.min_ncc);
  }
}

}  // namespace

std::string to_string(Kind kind) {
  for (const auto& [name, k] : kind_names())
    if (k == kind) return name;
  return "unknown";
}

ScenarioConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("(root)", "expected a JSON object");
  ScenarioConfig c;
  const json* kind = find(doc, "kind");
  if (!kind || !kind->is_string()) throw ConfigError("kind", "required string");
  const auto it = kind_names().find(kind->get<std::string>());
  if (it == kind_names().end()) throw ConfigError("kind", "unknown experiment kind");
  c.kind = it->second;

  if (const json* v = find(doc, "output_dir")) {
    if (!v->is_string() || v->get<std::string>().empty())
      throw ConfigError("output_dir", "expected a non-empty string");
    c.output_dir = v->get<std::string>();
  }
  if (const json* v = find(doc, "seed")) {
    if (!v->is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
    c.seed = v->get<std::uint64_t>();
  }
  if (const json* v = find(doc, "random_checks")) {
    c.random_checks = integer(*v, "random_checks");
    if (c.random_checks < 0) throw ConfigError("random_checks", "must be >= 0");
  }

  switch (c.kind) {
    case Kind::SeparabilitySweep:
    case Kind::NrfSweep:
      c.grid = parse_grid(doc);
      break;
    case Kind::OracleValidate:
      c.grid = parse_grid(doc);
      if (c.grid.tau != std::vector<double>{1.0})
        throw ConfigError("grid.tau", "oracle-validate is lossless");
      if (const json* v = find(doc, "cutoff")) {
        c.cutoff = integer(*v, "cutoff");
        if (c.cutoff < 1) throw ConfigError("cutoff", "must be >= 1");
      }
      c.tolerance = positive(optional_number(doc, "", "tolerance", c.tolerance), "tolerance");
      if (const json* v = find(doc, "factorization")) {
        if (!v->is_boolean()) throw ConfigError("factorization", "expected true or false");
        c.factorization = v->get<bool>();
      }
      break;
    case Kind::GhostImage:
    case Kind::GhostDiffraction: {
      c.geometry = parse_geometry(doc, c.kind);
      c.profile = parse_profile(doc);
      c.object = parse_object(doc, base_dir);
      if (const json* qg = find(doc, "qgrid")) {
        if (!qg->is_object()) throw ConfigError("qgrid", "expected an object");
        if (const json* v = find(*qg, "n_half")) c.q_half = integer(*v, "qgrid.n_half");
        if (c.q_half < 1) throw ConfigError("qgrid.n_half", "must be >= 1");
        c.q_window = positive(optional_number(*qg, "qgrid", "window", c.q_window), "qgrid.window");
        if (const json* v = find(*qg, "dq")) c.dq = positive(number(*v, "qgrid.dq"), "qgrid.dq");
      }
      if (c.kind == Kind::GhostImage && c.object.nx > 2 * c.q_half + 1)
        throw ConfigError("object.nx", "must not exceed 2*qgrid.n_half + 1");
      const std::string summation = doc.value("summation", "direct");
      if (summation == "fast") {
        if (c.kind != Kind::GhostImage || c.geometry.variant != ghost::Collection::ObjectPlane)
          throw ConfigError("summation", "fast summation needs ghost-image with object-plane collection");
        c.summation = ghost::Summation::Fast;
      } else if (summation != "direct") {
        throw ConfigError("summation", "expected direct or fast");
      }
      if (const json* checks = find(doc, "checks")) {
        if (!checks->is_object()) throw ConfigError("checks", "expected an object");
        if (const json* v = find(*checks, "min_ncc")) c.min_ncc = number(*v, "checks.min_ncc");
      }
      break;
    }
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("(file)", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc, path.parent_path());
}

bool Manifest::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

json Manifest::to_json() const {
  json doc;
  doc["kind"] = to_string(kind);
  doc["passed"] = passed();
  doc["files"] = json::array();
  for (const auto& f : files) doc["files"].push_back({{"path", f.path}, {"sha256", f.sha256}});
  doc["checks"] = json::array();
  for (const auto& c : checks)
    doc["checks"].push_back(
        {{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", c.passed}});
  return doc;
}

std::filesystem::path resolve_output_dir(const ScenarioConfig& config,
                                         const std::optional<std::filesystem::path>& cli_out) {
  if (cli_out) return *cli_out;
  if (const char* env = std::getenv("PDCSIM_OUT_DIR"); env && *env) return env;
  return config.output_dir;
}

Manifest run(const ScenarioConfig& config, const std::filesystem::path& out_dir, unsigned workers) {
  Manifest manifest;
  manifest.kind = config.kind;
  Writer out(out_dir, manifest);
  switch (config.kind) {
    case Kind::SeparabilitySweep:
      run_separability(config, out, manifest, workers);
      break;
    case Kind::NrfSweep:
      run_nrf(config, out, manifest, workers);
      break;
    case Kind::OracleValidate:
      run_oracle(config, out, manifest, workers);
      break;
    case Kind::GhostImage:
      run_ghost_image(config, out, manifest);
      break;
    case Kind::GhostDiffraction:
      run_ghost_diffraction(config, out, manifest);
      break;
  }
  io::write_file(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  return manifest;
}

}  // namespace pdcsim::scenario

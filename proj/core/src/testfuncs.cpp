#include "bht/testfuncs.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "bht/errors.hpp"
#include "bht/fft.hpp"
#include "bht/quadrature.hpp"

namespace bht {

namespace {

constexpr double kPi = std::numbers::pi;

// Tail of |atom|^2 beyond distance d from the center on one side, as a
// fraction of the atom's full L2 mass.
double gaussian_tail_fraction(double d, double sigma) {
  return 0.5 * std::erfc(std::sqrt(2.0 * kPi) * d / sigma);
}

struct Window {
  double lo, hi;
};

std::vector<Window> merged_windows(const std::vector<Atom>& atoms, double reach) {
  std::vector<Window> w;
  for (const auto& a : atoms) w.push_back({a.center - reach * a.sigma, a.center + reach * a.sigma});
  std::sort(w.begin(), w.end(), [](const Window& x, const Window& y) { return x.lo < y.lo; });
  std::vector<Window> out;
  for (const auto& x : w) {
    if (!out.empty() && x.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, x.hi);
    } else {
      out.push_back(x);
    }
  }
  return out;
}

}  // namespace

std::complex<double> Atom::operator()(double x) const {
  const double u = (x - center) / sigma;
  const double env = std::exp(-kPi * u * u);
  if (env == 0.0) return {};
  const double phase = 2.0 * kPi * modulation * x;
  return weight * env * std::complex<double>(std::cos(phase), std::sin(phase));
}

TestFunction::TestFunction(std::vector<Atom> atoms, std::string label)
    : atoms_(std::move(atoms)), label_(std::move(label)) {
  for (const auto& a : atoms_) {
    if (!(a.sigma > 0.0) || !std::isfinite(a.sigma)) throw PreconditionError("atom width must be positive");
  }
  std::erase_if(atoms_, [](const Atom& a) { return a.weight == std::complex<double>{}; });
}

TestFunction TestFunction::gaussian(double sigma, double center, double modulation,
                                    std::complex<double> weight) {
  return TestFunction({Atom{sigma, center, modulation, weight}});
}

std::complex<double> TestFunction::operator()(double x) const {
  std::complex<double> s{};
  for (const auto& a : atoms_) s += a(x);
  return s;
}

double TestFunction::frequency_bound() const {
  double nu = 0.0;
  for (const auto& a : atoms_) nu = std::max(nu, std::abs(a.modulation) + 2.0 / a.sigma);
  return nu;
}

bool TestFunction::negligible_on(double lo, double hi) const {
  for (const auto& a : atoms_) {
    const double r = kAtomReach * a.sigma;
    if (hi >= a.center - r && lo <= a.center + r) return false;
  }
  return true;
}

double TestFunction::peak_bound() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += std::abs(a.weight);
  return s;
}

TestFunction TestFunction::scaled(std::complex<double> alpha) const {
  auto atoms = atoms_;
  for (auto& a : atoms) a.weight *= alpha;
  return TestFunction(std::move(atoms), label_);
}

TestFunction operator+(const TestFunction& a, const TestFunction& b) {
  auto atoms = a.atoms_;
  atoms.insert(atoms.end(), b.atoms_.begin(), b.atoms_.end());
  return TestFunction(std::move(atoms));
}

TestFunction fourier_transform(const TestFunction& f) {
  std::vector<Atom> out;
  out.reserve(f.atoms().size());
  for (const auto& a : f.atoms()) {
    const double phase = 2.0 * kPi * a.center * a.modulation;
    const std::complex<double> w =
        a.weight * a.sigma * std::complex<double>(std::cos(phase), std::sin(phase));
    out.push_back(Atom{1.0 / a.sigma, a.modulation, -a.center, w});
  }
  return TestFunction(std::move(out), f.label().empty() ? "" : f.label() + "^");
}

double sup_norm(const TestFunction& f) {
  if (f.is_zero()) return 0.0;
  if (f.atoms().size() == 1) return std::abs(f.atoms()[0].weight);
  // Dense scan over the essential support, then golden-section polish.
  double best = 0.0;
  double best_x = 0.0;
  double step = std::numeric_limits<double>::infinity();
  for (const auto& a : f.atoms()) {
    step = std::min(step, std::min(a.sigma, 1.0 / (std::abs(a.modulation) + 1.0)) / 64.0);
  }
  for (const auto& w : merged_windows(f.atoms(), kAtomReach)) {
    const auto n = static_cast<std::size_t>(std::ceil((w.hi - w.lo) / step));
    for (std::size_t i = 0; i <= n; ++i) {
      const double x = w.lo + (w.hi - w.lo) * static_cast<double>(i) / static_cast<double>(n);
      const double v = std::abs(f(x));
      if (v > best) {
        best = v;
        best_x = x;
      }
    }
  }
  double lo = best_x - step;
  double hi = best_x + step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double a = hi - g * (hi - lo);
    const double b = lo + g * (hi - lo);
    if (std::abs(f(a)) > std::abs(f(b))) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return std::max(best, std::abs(f(0.5 * (lo + hi))));
}

double lp_norm(const TestFunction& f, double p) {
  if (!(p > 0.0)) throw PreconditionError("lp_norm needs p > 0");
  if (std::isinf(p)) return sup_norm(f);
  if (f.is_zero()) return 0.0;
  if (f.atoms().size() == 1) {
    const auto& a = f.atoms()[0];
    return std::abs(a.weight) * std::pow(a.sigma / std::sqrt(p), 1.0 / p);
  }
  const double reach = kAtomReach * std::max(1.0, 1.0 / std::sqrt(p));
  std::vector<quad::Panel> panels;
  double min_wavelength = std::numeric_limits<double>::infinity();
  for (const auto& a : f.atoms()) {
    min_wavelength = std::min(min_wavelength, 1.0 / (std::abs(a.modulation) + 1.0 / a.sigma));
  }
  for (const auto& w : merged_windows(f.atoms(), reach)) {
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((w.hi - w.lo) / (0.25 * min_wavelength))));
    for (std::size_t i = 0; i < n; ++i) {
      panels.push_back({w.lo + (w.hi - w.lo) * static_cast<double>(i) / static_cast<double>(n),
                        w.lo + (w.hi - w.lo) * static_cast<double>(i + 1) / static_cast<double>(n)});
    }
  }
  quad::Options opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = 1e-13;
  opt.panel_tol = std::numeric_limits<double>::infinity();
  auto integrand = [&](double x) { return std::pow(std::abs(f(x)), p); };
  const double integral = quad::integrate_panels<double>(integrand, panels, opt).value;
  return std::pow(integral, 1.0 / p);
}

double GridFunction::lp_norm(double p) const {
  if (!(p > 0.0)) throw PreconditionError("lp_norm needs p > 0");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : samples) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (const auto& v : samples) s += std::pow(std::abs(v), p);
  return std::pow(s * dx, 1.0 / p);
}

double mass_outside(const TestFunction& f, double x0, double x1) {
  if (f.is_zero()) return 0.0;
  // Minkowski: ||f 1_out||_2 <= sum_i ||atom_i 1_out||_2.
  double root = 0.0;
  for (const auto& a : f.atoms()) {
    const double total = std::norm(a.weight) * a.sigma / std::sqrt(2.0);
    const double frac = gaussian_tail_fraction(x1 - a.center, a.sigma) +
                        gaussian_tail_fraction(a.center - x0, a.sigma);
    root += std::sqrt(std::min(1.0, frac) * total);
  }
  const double norm2 = lp_norm(f, 2.0);
  return std::min(1.0, root * root / (norm2 * norm2));
}

double spectral_mass_beyond(const TestFunction& f, double nu) {
  return mass_outside(fourier_transform(f), -nu, nu);
}

GridFunction sample(const TestFunction& f, const GridSpec& grid) {
  if (!is_power_of_two(grid.n)) throw PreconditionError("grid size must be a power of two");
  if (!(grid.x1 > grid.x0)) throw PreconditionError("grid window must have x1 > x0");
  GridFunction out;
  out.x0 = grid.x0;
  out.dx = (grid.x1 - grid.x0) / static_cast<double>(grid.n);
  out.samples.resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) out.samples[i] = f(out.x(i));
  if (!f.is_zero()) {
    const double lost = mass_outside(f, grid.x0, grid.x1);
    if (lost > 1e-8) {
      out.warnings.push_back("window truncates " + std::to_string(lost) + " of the L2 mass");
    }
  }
  return out;
}

GridFunction lp_piece(const TestFunction& f, int k, const FrequencyCutoff& cutoff,
                      const GridSpec& grid) {
  if (!is_power_of_two(grid.n)) throw PreconditionError("grid size must be a power of two");
  const std::size_t n = grid.n;
  const double length = grid.x1 - grid.x0;
  const double dx = length / static_cast<double>(n);
  const double nyquist = 0.5 / dx;
  const double band_lo = std::ldexp(1.0, k - 1);
  const double band_hi = std::ldexp(1.0, k + 1);
  if (band_hi > nyquist && !f.is_zero()) {
    const double lost = spectral_mass_beyond(f, std::max(nyquist, band_lo));
    if (lost > 1e-12) {
      throw BandError("band 2^" + std::to_string(k - 1) + " < |xi| < 2^" + std::to_string(k + 1) +
                      " exceeds Nyquist " + std::to_string(nyquist) +
                      " with spectral mass fraction " + std::to_string(lost));
    }
  }
  const TestFunction fh = fourier_transform(f);
  std::vector<std::complex<double>> spec(n);
  const long half = static_cast<long>(n / 2);
  for (std::size_t q = 0; q < n; ++q) {
    const double xi = static_cast<double>(static_cast<long>(q) - half) / length;
    const double cut = cutoff.hat_scaled(k, xi);
    if (cut == 0.0) continue;
    const double ph = 2.0 * kPi * xi * grid.x0;
    spec[q] = fh(xi) * cut * std::complex<double>(std::cos(ph), std::sin(ph)) / length;
  }
  auto vals = dft(spec, FftDirection::Inverse);
  GridFunction out;
  out.x0 = grid.x0;
  out.dx = dx;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.samples[i] = (i % 2 == 0 ? 1.0 : -1.0) * vals[i];
  return out;
}

std::complex<double> lp_piece_at(const TestFunction& f, int k, const FrequencyCutoff& cutoff,
                                 double x) {
  if (f.is_zero()) return {};
  const TestFunction fh = fourier_transform(f);
  const double lo = std::ldexp(1.0, k - 1);
  const double hi = std::ldexp(1.0, k + 1);
  double nu = std::abs(x);
  for (const auto& a : fh.atoms()) nu = std::max(nu, std::abs(x + a.modulation) + 2.0 / a.sigma);
  nu += 4.0 / lo;  // cutoff variation across the band
  auto integrand = [&](double xi) {
    const double ph = 2.0 * kPi * xi * x;
    return fh(xi) * cutoff.hat_scaled(k, xi) * std::complex<double>(std::cos(ph), std::sin(ph));
  };
  auto negligible = [&](double a, double b) { return fh.negligible_on(a, b); };
  auto freq = [&](double, double) { return nu; };
  auto panels = quad::oscillation_panels(-hi, -lo, freq, negligible);
  auto right = quad::oscillation_panels(lo, hi, freq, negligible);
  panels.insert(panels.end(), right.begin(), right.end());
  quad::Options opt;
  opt.abs_tol = 1e-14 * fh.peak_bound() * hi;
  opt.panel_tol = std::numeric_limits<double>::infinity();
  return quad::integrate_panels<std::complex<double>>(integrand, panels, opt).value;
}

Catalog Catalog::builtin() {
  Catalog c;
  const double sigmas[] = {1.0, 0.25, 4.0};
  const double omegas[] = {0.0, 2.0, 8.0};
  int idx = 1;
  for (double s : sigmas) {
    for (double w : omegas) {
      const std::string name = "g" + std::to_string(idx++);
      c.add(name, TestFunction({Atom{s, 0.0, w, 1.0}}, name));
    }
  }
  c.add("g10", TestFunction({Atom{1.0, 1.0, 0.0, 1.0}}, "g10"));
  c.add("g11", TestFunction({Atom{0.25, 1.0, 2.0, 1.0}}, "g11"));
  c.add("g12", TestFunction({Atom{4.0, 1.0, 8.0, 1.0}}, "g12"));
  return c;
}

Catalog Catalog::from_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("catalog: ") + e.what());
  }
  if (!doc.is_array()) throw PreconditionError("catalog: expected a JSON array of atoms");
  Catalog c;
  std::map<std::string, std::vector<Atom>> groups;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    const std::string where = "catalog[" + std::to_string(i) + "]";
    if (!e.is_object() || !e.contains("sigma")) throw PreconditionError(where + ".sigma: missing");
    Atom a;
    a.sigma = e.at("sigma").get<double>();
    a.center = e.value("center", 0.0);
    a.modulation = e.value("modulation", 0.0);
    a.weight = {e.value("weight_re", 1.0), e.value("weight_im", 0.0)};
    if (!(a.sigma > 0.0)) throw PreconditionError(where + ".sigma: must be positive");
    const std::string name = e.value("name", "f" + std::to_string(i + 1));
    if (!groups.count(name)) order.push_back(name);
    groups[name].push_back(a);
  }
  for (const auto& name : order) c.add(name, TestFunction(groups[name], name));
  return c;
}

void Catalog::add(const std::string& name, TestFunction f) {
  f.set_label(name);
  if (!entries_.count(name)) order_.push_back(name);
  entries_[name] = std::move(f);
}

const TestFunction& Catalog::get(const std::string& ref) const {
  std::string name = ref;
  if (name.rfind("catalog:", 0) == 0) name = name.substr(8);
  auto it = entries_.find(name);
  if (it == entries_.end()) throw PreconditionError("unknown catalog entry '" + name + "'");
  return it->second;
}

std::vector<std::string> Catalog::names() const { return order_; }

std::vector<TestFunction> Catalog::all() const {
  std::vector<TestFunction> out;
  for (const auto& n : order_) out.push_back(entries_.at(n));
  return out;
}

void Catalog::write_json(std::ostream& out) const {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& n : order_) {
    for (const auto& a : entries_.at(n).atoms()) {
      doc.push_back({{"name", n},
                     {"sigma", a.sigma},
                     {"center", a.center},
                     {"modulation", a.modulation},
                     {"weight_re", a.weight.real()},
                     {"weight_im", a.weight.imag()}});
    }
  }
  out << doc.dump(2) << '\n';
}

}  // namespace bht

#include "barbf/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace barbf {

namespace {

using std::numbers::pi;

constexpr std::array<std::array<double, 5>, 3> kRonkkonenControl{{
    {0.0, 0.1, 0.2, 0.5, 1.0},
    {0.0, 0.5, 0.8, 0.9, 1.0},
    {0.0, 0.6, 0.7, 0.9, 1.0},
}};

constexpr std::array<double, 5> kBinom4{1.0, 4.0, 6.0, 4.0, 1.0};

constexpr std::array<double, 4> kHartAlpha{1.0, 1.2, 3.0, 3.2};
constexpr std::array<std::array<double, 4>, 4> kHartA{{
    {10.0, 3.0, 17.0, 3.5},
    {0.05, 10.0, 17.0, 0.1},
    {3.0, 3.5, 1.7, 10.0},
    {17.0, 8.0, 0.05, 10.0},
}};
constexpr std::array<std::array<double, 4>, 4> kHartP{{
    {0.1312, 0.1696, 0.5569, 0.0124},
    {0.2329, 0.4135, 0.8307, 0.3736},
    {0.2348, 0.1451, 0.3522, 0.2883},
    {0.4047, 0.8828, 0.8732, 0.5743},
}};

void require_unit_cube(const Point& x, Index dim, const char* name) {
  if (dim > 0 && x.size() != dim) {
    throw DomainError(std::string(name) + ": expected dimension " + std::to_string(dim) + ", got " +
                      std::to_string(x.size()));
  }
  if (x.size() == 0) throw DomainError(std::string(name) + ": empty point");
  for (Index j = 0; j < x.size(); ++j) {
    if (!(x[j] >= -kDomainTol && x[j] <= 1.0 + kDomainTol)) {
      throw DomainError(std::string(name) + ": point outside [0,1]^" + std::to_string(x.size()));
    }
  }
}

double bernstein4(double t, const std::array<double, 5>& c) {
  double w = 0.0;
  for (int j = 0; j <= 4; ++j) {
    w += kBinom4[j] * c[j] * std::pow(1.0 - t, 4 - j) * std::pow(t, j);
  }
  return w;
}

}  // namespace

double eval_branin(const Point& x) {
  require_unit_cube(x, 2, "branin");
  const double a = 15.0 * x[0] - 5.0;
  const double b = 15.0 * x[1];
  const double q = b - 5.1 * a * a / (4.0 * pi * pi) + 5.0 * a / pi - 6.0;
  return -1.0 / 51.95 * (q * q + (10.0 - 10.0 / (8.0 * pi)) * std::cos(a) - 44.81);
}

double eval_ronkkonen(const Point& x, std::span<const std::array<double, 5>> control, double scale) {
  require_unit_cube(x, static_cast<Index>(control.size()), "ronkkonen");
  double total = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double w = bernstein4(x[i], control[static_cast<std::size_t>(i)]);
    total += std::cos(4.0 * pi * w) + 0.8 * std::cos(8.0 * pi * w);
  }
  return -scale * total;
}

double eval_ronkkonen(const Point& x) {
  if (x.size() != 2 && x.size() != 3) {
    throw DomainError("ronkkonen: dimension must be 2 or 3, got " + std::to_string(x.size()));
  }
  // Output scale 2^-d: 1/4 in 2D, 1/8 in 3D. The 3D value reproduces the
  // published grid optimum 0.3584.
  const double scale = std::ldexp(1.0, -static_cast<int>(x.size()));
  return eval_ronkkonen(x, std::span(kRonkkonenControl).first(static_cast<std::size_t>(x.size())), scale);
}

double eval_hartmann4(const Point& x) {
  require_unit_cube(x, 4, "hartmann4");
  double outer = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      const double d = x[static_cast<Index>(j)] - kHartP[i][j];
      inner += kHartA[i][j] * d * d;
    }
    outer += kHartAlpha[i] * std::exp(-inner);
  }
  return -(1.0 / 0.839) * (1.1 - outer);
}

double eval_rastrigin(const Point& x) {
  require_unit_cube(x, 0, "rastrigin");
  const double d = static_cast<double>(x.size());
  double sum = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double u = x[i] - 0.5;
    sum += u - 10.0 * std::cos(2.0 * pi * u);
  }
  return -10.0 * d - sum;
}

CandidateGrid make_grid(const Box& region, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("make_grid: step must be positive");
  const int p = region.dim();
  CandidateGrid grid;
  grid.step = step;
  grid.region = region;
  grid.counts.resize(p);
  Index total = 1;
  for (int j = 0; j < p; ++j) {
    const double extent = (region.hi[j] - region.lo[j]) / step;
    const double k = std::floor(extent + 1e-9);
    grid.counts[j] = static_cast<int>(k) + 1;
    total *= grid.counts[j];
  }
  grid.points.resize(total, p);
  std::vector<int> idx(static_cast<std::size_t>(p), 0);
  for (Index r = 0; r < total; ++r) {
    for (int j = 0; j < p; ++j) {
      // Snap the final node onto hi so the upper bound is an exact grid member.
      const bool last = idx[static_cast<std::size_t>(j)] == grid.counts[j] - 1;
      const double v = region.lo[j] + idx[static_cast<std::size_t>(j)] * step;
      grid.points(r, j) = (last && std::abs(v - region.hi[j]) < 1e-9) ? region.hi[j] : v;
    }
    for (int j = p - 1; j >= 0; --j) {
      if (++idx[static_cast<std::size_t>(j)] < grid.counts[j]) break;
      idx[static_cast<std::size_t>(j)] = 0;
    }
  }
  return grid;
}

Index CandidateGrid::nearest(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Index flat = 0;
  for (Index j = 0; j < x.size(); ++j) {
    const double k = std::round((x[j] - region.lo[j]) / step);
    const Index kk = std::clamp<Index>(static_cast<Index>(k), 0, counts[j] - 1);
    flat = flat * counts[j] + kk;
  }
  return flat;
}

std::optional<Index> CandidateGrid::index_of(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != points.cols()) return std::nullopt;
  const Index flat = nearest(x);
  if ((points.row(flat).transpose() - x).cwiseAbs().maxCoeff() <= 1e-9) return flat;
  return std::nullopt;
}

TestProblem make_problem(std::string_view name) {
  TestProblem pb;
  pb.name = std::string(name);
  if (name == "branin") {
    pb.region = Box::unit(2);
    pb.objective = [](const Point& x) { return eval_branin(x); };
    pb.grid_step = 0.04;
  } else if (name == "ronkkonen2" || name == "ronkkonen3") {
    const int d = name.back() - '0';
    pb.region = Box::unit(d);
    pb.objective = [](const Point& x) { return eval_ronkkonen(x); };
    pb.grid_step = 0.04;
    if (d == 3) {
      pb.default_n_min = 50;
      pb.default_n_max = 100;
      pb.default_c_slab = 15.0;
    }
  } else if (name == "hartmann4") {
    pb.region = Box::unit(4);
    pb.objective = [](const Point& x) { return eval_hartmann4(x); };
    pb.grid_step = 0.05;
    pb.default_n_min = 50;
    pb.default_n_max = 100;
    pb.default_c_slab = 10.0;
  } else if (name.starts_with("rastrigin")) {
    int d = 8;
    if (name.size() > 9) {
      if (name[9] != ':') throw std::invalid_argument("unknown problem: " + std::string(name));
      try {
        d = std::stoi(std::string(name.substr(10)));
      } catch (const std::exception&) {
        throw std::invalid_argument("rastrigin: bad dimension in '" + std::string(name) + "'");
      }
    }
    if (d < 1) throw std::invalid_argument("rastrigin: dimension must be positive");
    pb.name = "rastrigin:" + std::to_string(d);
    pb.region = Box::unit(d);
    pb.objective = [](const Point& x) { return eval_rastrigin(x); };
    pb.known_optimum = 0.0;
    pb.default_n_min = 10 * d;
    pb.default_n_max = 10 * d + 60;
    pb.default_c_slab = d == 2 ? 25.0 : d == 3 ? 15.0 : 10.0;
  } else {
    throw std::invalid_argument("unknown problem: " + std::string(name));
  }
  return pb;
}

std::vector<std::string> problem_names() {
  return {"branin", "ronkkonen2", "ronkkonen3", "hartmann4", "rastrigin:8"};
}

GridScan scan_grid(const TestProblem& problem, const CandidateGrid& grid) {
  if (grid.size() == 0) throw std::invalid_argument("scan_grid: empty grid");
  GridScan out;
  std::vector<double> values(static_cast<std::size_t>(grid.size()));
  for (Index r = 0; r < grid.size(); ++r) {
    const Point x = grid.points.row(r).transpose();
    values[static_cast<std::size_t>(r)] = problem(x);
  }
  out.evaluated = grid.size();
  out.argmax = 0;
  for (Index r = 1; r < grid.size(); ++r) {
    if (values[static_cast<std::size_t>(r)] > values[static_cast<std::size_t>(out.argmax)]) out.argmax = r;
  }
  out.max_value = values[static_cast<std::size_t>(out.argmax)];
  const double rounded = std::round(out.max_value * 1e4);
  for (Index r = 0; r < grid.size(); ++r) {
    if (std::round(values[static_cast<std::size_t>(r)] * 1e4) == rounded) out.maximizers.push_back(r);
  }
  return out;
}

}  // namespace barbf

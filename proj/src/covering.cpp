#include "covlab/covering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "covlab/shapes.hpp"

namespace covlab {

namespace {

void append_boxes(std::vector<MortonCode>& out, const std::vector<Box>& boxes, const DisplacementFamily& disp,
                  const TorusPoint& x, int dim, int level) {
  for (const Box& b : boxes) {
    const Box img = disp.image(x, b);
    append_box_codes(out, dim, img[0], img[1], level, RasterMode::outer);
  }
}

double unit_ball_volume(int dim) {
  switch (dim) {
    case 1:
      return 2.0;
    case 2:
      return std::numbers::pi;
    default:
      return 4.0 / 3.0 * std::numbers::pi;
  }
}

// Product of Cantor intervals of side `len` centred on `base`, resolved to 2^-level.
std::vector<Box> cantor_boxes(const GeneratorSchedule& s, double len, int level) {
  const double min_gap = std::ldexp(1.0, -level) / len;
  const auto iv = fat_cantor_intervals(s.cantor_gaps, min_gap);
  std::vector<Box> boxes;
  std::array<std::size_t, kMaxDim> pos{};
  while (true) {
    Box b{};
    for (int i = 0; i < s.dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double off = s.base[k] - 0.5 * len;
      b[0][k] = off + len * iv[pos[k]].first;
      b[1][k] = off + len * iv[pos[k]].second;
    }
    boxes.push_back(b);
    int i = 0;
    for (; i < s.dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (++pos[k] < iv.size()) break;
      pos[k] = 0;
    }
    if (i == s.dim) break;
  }
  return boxes;
}

}  // namespace

GeneratorSchedule GeneratorSchedule::balls(int dim, double scale, double exponent, std::uint64_t n_max) {
  GeneratorSchedule s;
  s.family = Family::ball;
  s.dim = dim;
  s.scale = scale;
  s.exponent = exponent;
  s.n_max = n_max;
  return s;
}

double GeneratorSchedule::radius(std::uint64_t n) const {
  return std::min(max_radius, scale * std::pow(static_cast<double>(n), -exponent));
}

double GeneratorSchedule::side(std::uint64_t n, int axis) const {
  const auto k = static_cast<std::size_t>(axis);
  return side_scale[k] * std::pow(static_cast<double>(n), -side_exponent[k]);
}

double GeneratorSchedule::diameter(std::uint64_t n) const {
  switch (family) {
    case Family::ball:
      return 2.0 * radius(n);
    case Family::rectangle: {
      double s2 = 0.0;
      for (int i = 0; i < dim; ++i) s2 += side(n, i) * side(n, i);
      return std::sqrt(s2);
    }
    case Family::fat_cantor_copy:
      return radius(n) * std::sqrt(static_cast<double>(dim));
    case Family::custom: {
      const DyadicSet a = custom(n);
      if (a.empty()) return 0.0;
      // Bounding-box diagonal over the cells (chart coordinates, no wrap).
      std::array<double, kMaxDim> lo{1, 1, 1};
      std::array<double, kMaxDim> hi{};
      const double h = a.cell_side();
      for (const CellIndex& c : a.cells()) {
        for (int i = 0; i < dim; ++i) {
          const auto k = static_cast<std::size_t>(i);
          lo[k] = std::min(lo[k], c[k] * h);
          hi[k] = std::max(hi[k], (c[k] + 1) * h);
        }
      }
      double s2 = 0.0;
      for (int i = 0; i < dim; ++i) s2 += (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]) * (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]);
      return std::sqrt(s2);
    }
  }
  return 0.0;
}

double GeneratorSchedule::measure(std::uint64_t n) const {
  switch (family) {
    case Family::ball:
      return unit_ball_volume(dim) * std::pow(radius(n), dim);
    case Family::rectangle: {
      double v = 1.0;
      for (int i = 0; i < dim; ++i) v *= side(n, i);
      return v;
    }
    case Family::fat_cantor_copy: {
      double m = 1.0;
      for (double g : cantor_gaps) m *= 1.0 - g;
      return std::pow(radius(n) * m, dim);
    }
    case Family::custom:
      return covlab::measure(custom(n));
  }
  return 0.0;
}

std::string GeneratorSchedule::describe() const {
  std::ostringstream os;
  switch (family) {
    case Family::ball:
      os << "ball r_n=" << scale << "*n^-" << exponent;
      break;
    case Family::rectangle:
      os << "rectangle";
      for (int i = 0; i < dim; ++i) os << " side" << i << "=" << side_scale[static_cast<std::size_t>(i)] << "*n^-" << side_exponent[static_cast<std::size_t>(i)];
      break;
    case Family::fat_cantor_copy:
      os << "fat Cantor copy side=" << scale << "*n^-" << exponent << " stages=" << cantor_gaps.size();
      break;
    case Family::custom:
      os << "custom";
      break;
  }
  os << " d=" << dim << " n_max=" << n_max;
  return os.str();
}

void GeneratorSchedule::validate(const DisplacementFamily& disp) const {
  check_dim_level(dim, 0);
  if (disp.dim() != dim) throw std::invalid_argument("displacement dimension differs from the schedule's");
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  if (family == Family::custom && !custom) throw std::invalid_argument("custom schedule has no generator function");
  if (family == Family::fat_cantor_copy) {
    if (cantor_gaps.empty()) throw std::invalid_argument("fat Cantor copy needs at least one stage");
    for (double g : cantor_gaps) {
      if (!(g > 0.0 && g < 1.0)) throw std::invalid_argument("Cantor gap ratios must lie in (0,1)");
    }
  }
  if (family == Family::ball || family == Family::fat_cantor_copy) {
    if (!(scale > 0.0) || !(exponent >= 0.0) || !(max_radius > 0.0)) throw std::invalid_argument("size law needs scale > 0 and exponent >= 0");
  }
  if (family == Family::rectangle) {
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (!(side_scale[k] > 0.0) || !(side_exponent[k] >= 0.0)) throw std::invalid_argument("rectangle sides need scale > 0 and exponent >= 0");
    }
  }
  // Sizes decrease in n, so n = 1 is the widest generator.
  const double diam = diameter(1);
  const double limit = 0.5;
  if (disp.kind() == DisplacementFamily::Kind::nonlinear && !(diam * disp.bound() < limit)) {
    std::ostringstream os;
    os << "generator A_1 escapes the chart: diam " << diam << " * C_u " << disp.bound() << " >= " << limit
       << " under " << disp.describe();
    throw std::invalid_argument(os.str());
  }
}

void append_generator_image(std::vector<MortonCode>& out, const GeneratorSchedule& s, const DisplacementFamily& disp,
                            const TorusPoint& x, std::uint64_t n, int level) {
  const int dim = s.dim;
  switch (s.family) {
    case GeneratorSchedule::Family::ball: {
      const double r = s.radius(n);
      if (disp.kind() == DisplacementFamily::Kind::translation) {
        std::array<double, kMaxDim> c{};
        for (int i = 0; i < dim; ++i) c[static_cast<std::size_t>(i)] = x[i] + s.base[static_cast<std::size_t>(i)];
        append_ball_codes(out, TorusPoint(dim, std::span<const double>(c.data(), static_cast<std::size_t>(dim))), r,
                          level, RasterMode::outer);
        return;
      }
      if (dim == 1) {
        append_boxes(out, {Box{{{s.base[0] - r}, {s.base[0] + r}}}}, disp, x, dim, level);
        return;
      }
      // Cover the ball by finer cells and push each cell through f exactly.
      const int fine = std::min(max_level(dim), level + 1);
      const DyadicSet ball = rasterize_ball(
          TorusPoint(dim, std::span<const double>(s.base.data(), static_cast<std::size_t>(dim))), r, fine,
          RasterMode::outer);
      const double h = ball.cell_side();
      std::vector<Box> boxes;
      for (const CellIndex& c : ball.cells()) {
        Box b{};
        for (int i = 0; i < dim; ++i) {
          const auto k = static_cast<std::size_t>(i);
          // Cell coordinates are wrapped; unwrap next to base so f sees chart coordinates.
          double lo = c[k] * h;
          lo -= std::nearbyint(lo - s.base[k]);
          b[0][k] = lo;
          b[1][k] = lo + h;
        }
        boxes.push_back(b);
      }
      append_boxes(out, boxes, disp, x, dim, level);
      return;
    }
    case GeneratorSchedule::Family::rectangle: {
      Box b{};
      for (int i = 0; i < dim; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double a = s.side(n, i);
        b[0][k] = s.base[k] - 0.5 * a;
        b[1][k] = s.base[k] + 0.5 * a;
      }
      append_boxes(out, {b}, disp, x, dim, level);
      return;
    }
    case GeneratorSchedule::Family::fat_cantor_copy:
      append_boxes(out, cantor_boxes(s, s.radius(n), level), disp, x, dim, level);
      return;
    case GeneratorSchedule::Family::custom: {
      const DyadicSet a = s.custom(n);
      const double h = a.cell_side();
      std::vector<Box> boxes;
      for (const CellIndex& c : a.cells()) {
        Box b{};
        for (int i = 0; i < dim; ++i) {
          const auto k = static_cast<std::size_t>(i);
          b[0][k] = c[k] * h;
          b[1][k] = (c[k] + 1) * h;
        }
        boxes.push_back(b);
      }
      append_boxes(out, boxes, disp, x, dim, level);
      return;
    }
  }
}

DyadicSet stage_union(std::span<const TorusPoint> centers, const GeneratorSchedule& sched,
                      const DisplacementFamily& disp, std::uint64_t n1, std::uint64_t n2, int level) {
  check_dim_level(sched.dim, level);
  if (n1 > n2 || n2 > sched.n_max || n2 > centers.size()) throw std::invalid_argument("block outside [1, n_max] or beyond the sampled centers");
  std::vector<MortonCode> codes;
  for (std::uint64_t k = n1 + 1; k <= n2; ++k) {
    append_generator_image(codes, sched, disp, centers[k - 1], k, level);
    // Compact periodically so large blocks of overlapping generators stay small.
    if (codes.size() > (std::size_t{1} << 22)) {
      std::sort(codes.begin(), codes.end());
      codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    }
  }
  return DyadicSet::from_codes(sched.dim, level, std::move(codes));
}

BlockPlan make_block_plan(const GeneratorSchedule& sched, std::uint64_t first, double ratio, int level_cap,
                          BlockScale scale) {
  if (first < 1) throw std::invalid_argument("first block boundary must be >= 1");
  if (!(ratio > 1.0)) throw std::invalid_argument("block ratio must exceed 1");
  check_dim_level(sched.dim, level_cap);
  BlockPlan plan;
  plan.boundaries.push_back(0);
  double next = static_cast<double>(first);
  int prev_level = 0;
  while (true) {
    const auto nj = static_cast<std::uint64_t>(std::ceil(next - 1e-9));
    if (nj > sched.n_max) break;
    if (nj > plan.boundaries.back()) {
      const std::uint64_t lo = plan.boundaries.back() + 1;
      const double a = sched.diameter(lo);
      const double b = sched.diameter(nj);
      const double diam = scale == BlockScale::smallest ? std::min(a, b) : std::max(a, b);
      int level = diam > 0.0 ? static_cast<int>(std::ceil(std::log2(1.0 / diam))) : level_cap;
      level = std::max({level, 1, prev_level});
      const bool capped = level > level_cap;
      level = std::min(level, level_cap);
      plan.boundaries.push_back(nj);
      plan.levels.push_back(level);
      plan.capped.push_back(capped);
      prev_level = level;
    }
    next *= ratio;
  }
  return plan;
}

BlockPlan uncapped_prefix(const BlockPlan& plan) {
  BlockPlan out;
  out.boundaries.push_back(0);
  for (std::size_t j = 0; j < plan.blocks() && !plan.capped[j]; ++j) {
    out.boundaries.push_back(plan.boundaries[j + 1]);
    out.levels.push_back(plan.levels[j]);
    out.capped.push_back(false);
  }
  return out;
}

LimsupChain truncated_limsup(std::span<const TorusPoint> centers, const GeneratorSchedule& sched,
                             const DisplacementFamily& disp, const BlockPlan& plan) {
  if (plan.blocks() == 0) throw std::invalid_argument("block plan is empty");
  for (std::size_t j = 1; j < plan.blocks(); ++j) {
    if (plan.levels[j] < plan.levels[j - 1]) throw std::invalid_argument("level schedule must be nondecreasing");
    if (plan.boundaries[j + 1] <= plan.boundaries[j]) throw std::invalid_argument("block boundaries must increase");
  }
  LimsupChain out;
  for (std::size_t j = 0; j < plan.blocks(); ++j) {
    DyadicSet u = stage_union(centers, sched, disp, plan.boundaries[j], plan.boundaries[j + 1], plan.levels[j]);
    DyadicSet e = j == 0 ? u : set_intersection(out.chain.back().refined(plan.levels[j]), u);
    if (e.empty() && out.empty_at == 0) out.empty_at = static_cast<int>(j) + 1;
    out.survival.push_back(measure(e));
    out.stages.push_back(std::move(u));
    out.chain.push_back(std::move(e));
  }
  return out;
}

DimensionEstimate box_dimension_estimate(std::span<const DyadicSet> sets, std::span<const int> levels,
                                         std::span<const std::uint64_t> blocks, std::size_t fit_last) {
  if (sets.size() != levels.size()) throw std::invalid_argument("one level per set is required");
  DimensionEstimate est;
  est.blocks.assign(blocks.begin(), blocks.end());
  int dim = 1;
  for (std::size_t j = 0; j < sets.size(); ++j) {
    dim = sets[j].dim();
    const std::uint64_t n = count_positive_cells(sets[j], levels[j]);
    if (n == 0) continue;
    est.scale_points.emplace_back(levels[j] * std::numbers::ln2, std::log(static_cast<double>(n)));
  }
  const std::size_t m = est.scale_points.size();
  est.fitted = fit_last > 0 ? std::min(fit_last, m) : m;
  if (est.fitted < 3) throw std::invalid_argument("box dimension needs at least 3 nonempty scale points");
  const std::span<const std::pair<double, double>> fit(est.scale_points.data() + (m - est.fitted), est.fitted);
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : fit) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(est.fitted);
  my /= static_cast<double>(est.fitted);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [x, y] : fit) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("box dimension needs at least two distinct levels");
  est.raw_slope = sxy / sxx;
  est.value = std::clamp(est.raw_slope, 0.0, static_cast<double>(dim));
  // syy = 0 means a perfectly flat fit.
  est.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  for (std::size_t j = 1; j < m; ++j) {
    const double dx = est.scale_points[j].first - est.scale_points[j - 1].first;
    est.local_slopes.push_back(dx > 0.0 ? (est.scale_points[j].second - est.scale_points[j - 1].second) / dx : 0.0);
  }
  return est;
}

SaturationReport packing_saturation_check(std::span<const TorusPoint> centers, const GeneratorSchedule& sched,
                                          const DisplacementFamily& disp, const DyadicSet& f, int level,
                                          std::uint64_t n_start) {
  if (f.empty()) throw std::invalid_argument("packing saturation needs a set of positive measure");
  if (f.dim() != sched.dim) throw std::invalid_argument("set and schedule dimensions differ");
  check_dim_level(f.dim(), level);
  SaturationReport rep;
  const DyadicSet target = f.coarsened(level);
  rep.target = target.size();
  const int fine = std::max(level, f.level());
  const DyadicSet ff = f.refined(fine);
  const int shift = f.dim() * (fine - level);
  std::vector<char> hit(target.size(), 0);
  const std::uint64_t last = std::min<std::uint64_t>(sched.n_max, centers.size());
  std::vector<MortonCode> codes;
  for (std::uint64_t i = std::max<std::uint64_t>(n_start, 1); i <= last; ++i) {
    codes.clear();
    append_generator_image(codes, sched, disp, centers[i - 1], i, fine);
    for (MortonCode c : codes) {
      if (!ff.contains_code(c)) continue;
      const auto it = std::lower_bound(target.codes().begin(), target.codes().end(), c >> shift);
      char& h = hit[static_cast<std::size_t>(it - target.codes().begin())];
      if (!h) {
        h = 1;
        ++rep.reached;
      }
    }
    if (rep.reached == rep.target) {
      rep.first_index = i;
      break;
    }
  }
  rep.ratio = static_cast<double>(rep.reached) / static_cast<double>(rep.target);
  return rep;
}

DensityReport density_interaction_check(const DyadicSet& f, const DisplacementFamily& disp, const DyadicSet& e,
                                        const TorusPoint& y0, double eps, std::size_t samples,
                                        std::size_t inner_samples, std::uint64_t seed) {
  if (f.empty()) throw std::invalid_argument("density check needs a set of positive measure");
  if (f.dim() != disp.dim() || e.dim() != f.dim()) throw std::invalid_argument("dimension mismatch in density check");
  DensityReport rep;
  rep.samples = samples;
  const int dim = f.dim();
  const double he = e.cell_side();
  const auto e_cells = e.cells();
  // δ: farthest cell corner of E from y0.
  for (const CellIndex& c : e_cells) {
    for (std::uint32_t corner = 0; corner < (1U << dim); ++corner) {
      double r2 = 0.0;
      for (int i = 0; i < dim; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double t = (c[k] + ((corner >> i) & 1U)) * he;
        const double dd = circle_distance(t, y0[i]);
        r2 += dd * dd;
      }
      rep.delta = std::max(rep.delta, std::sqrt(r2));
    }
  }
  if (e.empty()) {
    rep.vacuous = true;
    return rep;
  }
  if (samples == 0 || inner_samples == 0) throw std::invalid_argument("density check needs positive sample counts");
  Rng rng(seed);
  const auto f_cells = f.cells();
  const double hf = f.cell_side();
  std::size_t good = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const CellIndex& fc = f_cells[static_cast<std::size_t>(rng.next() % f_cells.size())];
    std::array<double, kMaxDim> xs{};
    for (int i = 0; i < dim; ++i) xs[static_cast<std::size_t>(i)] = (fc[static_cast<std::size_t>(i)] + rng.uniform()) * hf;
    const TorusPoint x(dim, std::span<const double>(xs.data(), static_cast<std::size_t>(dim)));
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < inner_samples; ++t) {
      const CellIndex& ec = e_cells[static_cast<std::size_t>(rng.next() % e_cells.size())];
      std::array<double, kMaxDim> y{};
      for (int i = 0; i < dim; ++i) {
        const auto k = static_cast<std::size_t>(i);
        y[k] = (ec[k] + rng.uniform()) * he;
        y[k] -= std::nearbyint(y[k] - y0[i]);  // chart coordinates next to y0
      }
      const double jac = disp.jacobian(x, y);
      const TorusPoint z = disp.apply(x, y);
      CellIndex zc{};
      for (int i = 0; i < dim; ++i) {
        zc[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(
            std::min<double>(std::floor(z[i] / hf), static_cast<double>(f.cells_per_axis() - 1)));
      }
      den += jac;
      if (f.contains_code(encode_cell(dim, zc))) num += jac;
    }
    if (num >= (1.0 - eps) * den) ++good;
  }
  rep.fraction = static_cast<double>(good) / static_cast<double>(samples);
  rep.std_error = std::sqrt(std::max(rep.fraction * (1.0 - rep.fraction), 0.25 / static_cast<double>(samples)) /
                            static_cast<double>(samples));
  rep.meets = rep.fraction + 2.0 * rep.std_error >= 1.0 - eps;
  return rep;
}

std::vector<DensityReport> density_interaction_ladder(const DyadicSet& f, const DisplacementFamily& disp,
                                                      const TorusPoint& y0, std::span<const double> deltas,
                                                      double eps, std::size_t samples, std::size_t inner_samples,
                                                      std::uint64_t seed) {
  std::vector<DensityReport> out;
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    const double delta = deltas[j];
    if (!(delta > 0.0)) throw std::invalid_argument("ladder radii must be positive");
    const int want = static_cast<int>(std::ceil(std::log2(1.0 / delta))) + 4;
    const int level = std::min(max_level(f.dim()), std::max(f.level(), want));
    const DyadicSet e = rasterize_ball(y0, delta, level, RasterMode::inner);
    out.push_back(density_interaction_check(f, disp, e, y0, eps, samples, inner_samples, trial_seed(seed, j)));
  }
  return out;
}

}  // namespace covlab

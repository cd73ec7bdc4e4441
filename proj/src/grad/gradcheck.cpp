// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/grad/gradcheck.hpp"

#include "flowcodec/grad/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace flowcodec::grad {

namespace {

double evaluate(const GraphBuilder& build, const std::vector<Tensor>& leaves) {
  Tape tape(Tape::Mode::inference);
  std::vector<Var> vars;
  vars.reserve(leaves.size());
  for (const auto& t : leaves) vars.push_back(tape.constant(t));
  return build(tape, vars).value().item();
}

std::vector<Eigen::Index> probe_indices(Eigen::Index n, int max_coordinates, Rng& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  if (max_coordinates <= 0 || max_coordinates >= n) return idx;
  for (Eigen::Index i = 0; i < max_coordinates; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.next() % static_cast<std::uint64_t>(n - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(max_coordinates));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

std::string GradCheckReport::summary() const {
  std::ostringstream os;
  os << "checked=" << coordinates_checked << " max_rel_err=" << max_relative_error << " failures=" << failures.size();
  for (std::size_t i = 0; i < std::min<std::size_t>(failures.size(), 5); ++i) {
    const auto& f = failures[i];
    os << "\n  leaf " << f.leaf << " [" << f.index << "] analytic=" << f.analytic << " numeric=" << f.numeric
       << " rel=" << f.relative_error;
  }
  return os.str();
}

GradCheckReport check_gradients(const GraphBuilder& build, const std::vector<Tensor>& leaves,
                                const GradCheckOptions& options) {
  std::vector<Tensor> analytic;
  {
    Tape tape;
    std::vector<Var> vars;
    vars.reserve(leaves.size());
    for (const auto& t : leaves) vars.push_back(tape.leaf(t, true));
    Var loss = build(tape, vars);
    analytic = backward(loss, vars);
  }

  GradCheckReport report;
  Rng rng(options.seed);
  std::vector<Tensor> probe = leaves;
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    for (Eigen::Index i : probe_indices(leaves[l].size(), options.max_coordinates, rng)) {
      const double base = leaves[l][i];
      probe[l][i] = base + options.step;
      const double up = evaluate(build, probe);
      probe[l][i] = base - options.step;
      const double down = evaluate(build, probe);
      probe[l][i] = base;
      const double numeric = (up - down) / (2.0 * options.step);
      const double a = analytic[l][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.magnitude_floor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.coordinates_checked;
      report.max_relative_error = std::max(report.max_relative_error, rel);
      if (!(rel < options.tolerance)) report.failures.push_back({l, i, a, numeric, rel});
    }
  }
  return report;
}

}  // namespace flowcodec::grad

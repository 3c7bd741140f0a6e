#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "scf/classifier.hpp"
#include "scf/dataset.hpp"

namespace scf {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t parameters_checked = 0;
  std::string worst_segment;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;

  bool ok(double tolerance = 1e-4) const { return max_rel_error < tolerance; }
};

// Central finite differences on the mean batch loss against the analytic
// gradient. Parameters whose analytic gradient is below min_grad are
// skipped; everything is evaluated in deterministic inference mode.
inline GradCheckReport gradient_check(Classifier& c,
                                      const EmbeddingDataset& ds,
                                      const std::vector<std::size_t>& batch,
                                      double h = 1e-5,
                                      double min_grad = 1e-8) {
  if (batch.empty()) throw InputError("gradient check needs a nonempty batch");
  const std::vector<double> base = c.get_params();
  std::vector<double> analytic(base.size(), 0.0);
  for (std::size_t i : batch)
    (void)c.grad(ds.instances[i], analytic, nullptr);
  for (double& g : analytic) g /= static_cast<double>(batch.size());

  auto batch_loss = [&]() {
    double total = 0.0;
    for (std::size_t i : batch) total += c.loss(ds.instances[i]);
    return total / static_cast<double>(batch.size());
  };

  GradCheckReport report;
  std::vector<double> theta = base;
  for (std::size_t p = 0; p < base.size(); ++p) {
    if (std::abs(analytic[p]) <= min_grad) continue;
    theta[p] = base[p] + h;
    c.set_params(theta);
    double up = batch_loss();
    theta[p] = base[p] - h;
    c.set_params(theta);
    double down = batch_loss();
    theta[p] = base[p];
    double numeric = (up - down) / (2.0 * h);
    double rel = std::abs(numeric - analytic[p]) /
                 std::max(std::abs(numeric), std::abs(analytic[p]));
    ++report.parameters_checked;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_segment = c.segments().empty()
                                 ? std::string("?")
                                 : [&] {
                                     for (const ParamSegment& s : c.segments())
                                       if (p >= s.offset &&
                                           p < s.offset + s.size)
                                         return s.name;
                                     return std::string("?");
                                   }();
      report.worst_index = p;
      report.worst_analytic = analytic[p];
      report.worst_numeric = numeric;
    }
  }
  c.set_params(base);
  return report;
}

}  // namespace scf

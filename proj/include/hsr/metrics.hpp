#pragma once

#include <array>
#include <string>
#include <vector>

#include "hsr/spectral.hpp"

namespace hsr {

inline constexpr double kMetricEps = 1e-8;

// mean |pred - gt| / max(gt, eps) over all bands and pixels
double mrae(const SpectralCube& pred, const SpectralCube& gt, double eps = kMetricEps);

double rmse(const SpectralCube& pred, const SpectralCube& gt);

// MRAE in rendered RGB space: both cubes are projected through resp
// (unclamped) and compared channel-wise.
double bpmrae(const SpectralCube& pred, const SpectralCube& gt, const ResponseFunction& resp,
              double eps = kMetricEps);

// Unweighted per-value mean of the members.
SpectralCube ensemble_average(const std::vector<SpectralCube>& members);

struct ImageMetrics {
    std::string name;
    double mrae = 0.0, rmse = 0.0, bpmrae = 0.0;
};

struct MetricReport {
    double mrae = 0.0, rmse = 0.0, bpmrae = 0.0; // means of the per-image values
    std::vector<ImageMetrics> per_image;
};

// Predictions are clamped to [0,1] before scoring.
MetricReport evaluate(const std::vector<SpectralCube>& preds,
                      const std::vector<SpectralCube>& gts,
                      const std::vector<std::string>& names, const ResponseFunction& resp,
                      double eps = kMetricEps);

void write_metric_csv(const MetricReport& report, const std::string& path);

// Per-pixel affine RGB -> spectrum map fitted by least squares; the sanity
// floor a trained network must beat.
struct LinearBaseline {
    // band value = coef[b][0]*r + coef[b][1]*g + coef[b][2]*b + coef[b][3]
    std::array<std::array<double, 4>, kBands> coef{};

    SpectralCube predict(const RgbImage& rgb) const;
};

LinearBaseline linear_baseline_fit(const std::vector<const RgbImage*>& rgbs,
                                   const std::vector<const SpectralCube*>& cubes);

} // namespace hsr

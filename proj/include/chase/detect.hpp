#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "chase/geom.hpp"
#include "chase/render.hpp"

namespace chase {

// The selected pixel set of an image is empty, so a colour density over it is undefined.
class EmptyPixelSet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quantised RGB colour counts over one pixel set.
class RgbBin {
 public:
  // `bins_per_channel` must be >= 2 and divide 256.
  explicit RgbBin(int bins_per_channel);

  int bins_per_channel() const { return bins_; }
  std::size_t bin_index(ColorRGB c) const;
  void add(ColorRGB c, std::uint32_t n = 1);

  std::uint32_t count(ColorRGB c) const { return counts_[bin_index(c)]; }
  std::uint64_t total() const { return total_; }
  // |Q(c|U)| / |U|; 0 for an unoccupied bin. Requires total() > 0.
  double density(ColorRGB c) const;

  const std::vector<std::uint32_t>& counts() const { return counts_; }

 private:
  int bins_;
  int width_;  // 256 / bins_
  std::vector<std::uint32_t> counts_;
  std::uint64_t total_ = 0;
};

// Throws EmptyPixelSet when no pixel carries `which`.
RgbBin build_rgb_bin(const LabeledImage& image, PixelLabel which, int bins_per_channel);

// Log-likelihood ratio per pixel; defined on ACTOR and BACKGROUND pixels only.
struct LikelihoodImage {
  int width = 0;
  int height = 0;
  std::vector<std::optional<double>> values;
};

LikelihoodImage likelihood_image(const LabeledImage& image, const RgbBin& actor_bin, const RgbBin& background_bin,
                                 double eps = 1e-6);

// Normalised 1D histogram with `bin_count` equal bins over [h_min, h_max].
class Histogram1D {
 public:
  Histogram1D(int bin_count, double h_min, double h_max);

  int bin_count() const { return static_cast<int>(weights_.size()); }
  double h_min() const { return h_min_; }
  double h_max() const { return h_max_; }
  double center(int i) const;
  // Values outside the range clamp to the first/last bin.
  int bin_of(double h) const;

  void add(double h, double weight);
  // Scales the weights to sum 1. Throws EmptyPixelSet if the total weight is zero.
  void normalize();

  double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& weights() const { return weights_; }
  bool same_bins(const Histogram1D& other) const;

 private:
  double h_min_;
  double h_max_;
  std::vector<double> weights_;
};

double pixel_weight(const Pixel& pixel, const Eigen::Vector2d& actor_centroid, double d_c, double w_max);

// Arithmetic mean of the ACTOR pixel coordinates. Throws EmptyPixelSet if there are none.
Eigen::Vector2d actor_centroid(const LabeledImage& image);

struct HistogramPair {
  Histogram1D actor;
  Histogram1D background;
};

// Unweighted actor histogram and proximity-weighted background histogram over
// the fixed range [log eps, -log eps]. Passing w_max = 1 gives the unweighted
// background histogram.
HistogramPair build_histograms(const LikelihoodImage& lik, const LabeledImage& image, int bin_count, double d_c,
                               double w_max, double eps = 1e-6);

// Var(h; p) over bin centres.
double histogram_variance(const Histogram1D& p);

double variance_ratio(const Histogram1D& actor, const Histogram1D& background, double eps_den = 1e-9);

double detectability_cost(double variance_ratio, double eps_r = 1e-3);

struct DetectParams {
  int bins_per_channel = 8;
  int hist_bins = 32;
  double eps = 1e-6;
  double eps_den = 1e-9;
  double eps_r = 1e-3;
  double w_max = 5.0;
  // Pixels; unset means half the image diagonal.
  std::optional<double> d_c;

  double effective_d_c(int width, int height) const;
  void validate() const;
};

enum class DetectOutcome { kOk, kOccluded, kNoBackground };

struct DetectabilityReport {
  DetectOutcome outcome = DetectOutcome::kOk;
  double variance_ratio = 0.0;
  // +inf when occluded.
  double cost = 0.0;
  std::size_t actor_pixel_count = 0;
  std::size_t background_pixel_count = 0;

  bool occluded() const { return outcome == DetectOutcome::kOccluded; }
};

// Intermediate products of one evaluation, kept for image and CSV dumps.
struct DetectabilityDetail {
  DetectabilityReport report;
  std::optional<LikelihoodImage> likelihood;
  std::optional<HistogramPair> histograms;
};

// Scores an already rendered image.
DetectabilityDetail evaluate_image(const LabeledImage& image, const DetectParams& params);

struct SceneClouds {
  RgbPointCloud actor;  // actor model in its own body frame
  RgbPointCloud background;
};

struct ViewEvalParams {
  CameraIntrinsics intrinsics = CameraIntrinsics::from_fov(96, 72, 2.0943951023931957);  // 120 deg
  RenderOptions render;
  DetectParams detect;
};

// Renders the actor placed at `actor_pose` plus the background from a camera at
// `camera_center` looking at the actor origin, then scores the image.
DetectabilityDetail evaluate_viewpoint_detail(const Pose& actor_pose, const SceneClouds& clouds,
                                              const Vec3& camera_center, const ViewEvalParams& params,
                                              LabeledImage* rendered = nullptr);

DetectabilityReport evaluate_viewpoint(const Pose& actor_pose, const SceneClouds& clouds, const Vec3& camera_center,
                                       const ViewEvalParams& params);

const char* to_string(DetectOutcome outcome);

}  // namespace chase

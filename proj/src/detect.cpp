#include "chase/detect.hpp"

#include <cmath>
#include <limits>

namespace chase {

RgbBin::RgbBin(int bins_per_channel) : bins_(bins_per_channel) {
  if (bins_per_channel < 2 || bins_per_channel > 256 || 256 % bins_per_channel != 0) {
    throw std::invalid_argument("bins_per_channel must be >= 2 and divide 256");
  }
  width_ = 256 / bins_;
  counts_.assign(static_cast<std::size_t>(bins_) * bins_ * bins_, 0);
}

std::size_t RgbBin::bin_index(ColorRGB c) const {
  const std::size_t r = c.r / width_;
  const std::size_t g = c.g / width_;
  const std::size_t b = c.b / width_;
  return (r * bins_ + g) * bins_ + b;
}

void RgbBin::add(ColorRGB c, std::uint32_t n) {
  counts_[bin_index(c)] += n;
  total_ += n;
}

double RgbBin::density(ColorRGB c) const {
  if (total_ == 0) throw EmptyPixelSet("colour density of an empty pixel set");
  return static_cast<double>(count(c)) / static_cast<double>(total_);
}

RgbBin build_rgb_bin(const LabeledImage& image, PixelLabel which, int bins_per_channel) {
  RgbBin bin(bins_per_channel);
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    if (image.label(i) == which) bin.add(image.color(i));
  }
  if (bin.total() == 0) {
    throw EmptyPixelSet(which == PixelLabel::kActor ? "no actor pixels" : "no background pixels");
  }
  return bin;
}

LikelihoodImage likelihood_image(const LabeledImage& image, const RgbBin& actor_bin, const RgbBin& background_bin,
                                 double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  LikelihoodImage lik{image.width(), image.height(), std::vector<std::optional<double>>(image.pixel_count())};
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    if (image.label(i) == PixelLabel::kEmpty) continue;
    const ColorRGB c = image.color(i);
    lik.values[i] = std::log(std::max(actor_bin.density(c), eps) / std::max(background_bin.density(c), eps));
  }
  return lik;
}

Histogram1D::Histogram1D(int bin_count, double h_min, double h_max) : h_min_(h_min), h_max_(h_max) {
  if (bin_count < 1) throw std::invalid_argument("histogram needs at least one bin");
  if (!(h_max > h_min)) throw std::invalid_argument("histogram range is empty");
  weights_.assign(static_cast<std::size_t>(bin_count), 0.0);
}

double Histogram1D::center(int i) const {
  const double w = (h_max_ - h_min_) / bin_count();
  return h_min_ + (i + 0.5) * w;
}

int Histogram1D::bin_of(double h) const {
  const double t = (h - h_min_) / (h_max_ - h_min_) * bin_count();
  if (!(t > 0.0)) return 0;
  return std::min(static_cast<int>(t), bin_count() - 1);
}

void Histogram1D::add(double h, double weight) { weights_[static_cast<std::size_t>(bin_of(h))] += weight; }

void Histogram1D::normalize() {
  double sum = 0.0;
  for (double w : weights_) sum += w;
  if (!(sum > 0.0)) throw EmptyPixelSet("histogram has no mass");
  for (double& w : weights_) w /= sum;
}

bool Histogram1D::same_bins(const Histogram1D& other) const {
  return bin_count() == other.bin_count() && h_min_ == other.h_min_ && h_max_ == other.h_max_;
}

double pixel_weight(const Pixel& pixel, const Eigen::Vector2d& actor_centroid, double d_c, double w_max) {
  if (!(d_c > 0.0)) throw std::invalid_argument("d_c must be positive");
  if (!(w_max >= 1.0)) throw std::invalid_argument("w_max must be >= 1");
  const double d = (Eigen::Vector2d(pixel.u, pixel.v) - actor_centroid).norm();
  if (d > d_c) return 1.0;
  const double s = d / d_c;
  return w_max * (1.0 - s) + s;
}

Eigen::Vector2d actor_centroid(const LabeledImage& image) {
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  std::size_t n = 0;
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    if (image.label(i) != PixelLabel::kActor) continue;
    const Pixel p = image.pixel_at(i);
    sum += Eigen::Vector2d(p.u, p.v);
    ++n;
  }
  if (n == 0) throw EmptyPixelSet("no actor pixels");
  return sum / static_cast<double>(n);
}

HistogramPair build_histograms(const LikelihoodImage& lik, const LabeledImage& image, int bin_count, double d_c,
                               double w_max, double eps) {
  const double h_lo = std::log(eps);
  HistogramPair out{Histogram1D(bin_count, h_lo, -h_lo), Histogram1D(bin_count, h_lo, -h_lo)};
  const Eigen::Vector2d centroid = actor_centroid(image);
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    const auto& h = lik.values[i];
    if (!h) continue;
    switch (image.label(i)) {
      case PixelLabel::kActor:
        out.actor.add(*h, 1.0);
        break;
      case PixelLabel::kBackground:
        out.background.add(*h, pixel_weight(image.pixel_at(i), centroid, d_c, w_max));
        break;
      case PixelLabel::kEmpty:
        break;
    }
  }
  out.actor.normalize();
  out.background.normalize();
  return out;
}

namespace {

double mean_of(const Histogram1D& p) {
  double s = 0.0;
  double m = 0.0;
  for (int i = 0; i < p.bin_count(); ++i) {
    s += p.weight(i);
    m += p.weight(i) * p.center(i);
  }
  return m / s;
}

// Second central moment about `mean`, two-pass so a point mass gives exactly 0.
double spread_about(const Histogram1D& p, double mean) {
  double s = 0.0;
  double v = 0.0;
  for (int i = 0; i < p.bin_count(); ++i) {
    const double d = p.center(i) - mean;
    s += p.weight(i);
    v += p.weight(i) * d * d;
  }
  return v / s;
}

}  // namespace

double histogram_variance(const Histogram1D& p) { return spread_about(p, mean_of(p)); }

double variance_ratio(const Histogram1D& actor, const Histogram1D& background, double eps_den) {
  if (!actor.same_bins(background)) throw std::invalid_argument("histograms do not share bins");
  if (!(eps_den > 0.0)) throw std::invalid_argument("eps_den must be positive");
  const double mix_mean = 0.5 * (mean_of(actor) + mean_of(background));
  const double mix_var = 0.5 * (spread_about(actor, mix_mean) + spread_about(background, mix_mean));
  return mix_var / (histogram_variance(actor) + histogram_variance(background) + eps_den);
}

double detectability_cost(double variance_ratio, double eps_r) {
  if (!(variance_ratio >= 0.0)) throw std::invalid_argument("variance ratio must be non-negative");
  if (!(eps_r > 0.0)) throw std::invalid_argument("eps_R must be positive");
  return 1.0 / (variance_ratio + eps_r);
}

double DetectParams::effective_d_c(int width, int height) const {
  if (d_c) return *d_c;
  return 0.5 * std::hypot(static_cast<double>(width), static_cast<double>(height));
}

void DetectParams::validate() const {
  if (bins_per_channel < 2 || 256 % bins_per_channel != 0) {
    throw std::invalid_argument("bins_per_channel must be >= 2 and divide 256");
  }
  if (hist_bins < 1) throw std::invalid_argument("hist_bins must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (!(eps_den > 0.0)) throw std::invalid_argument("eps_den must be positive");
  if (!(eps_r > 0.0)) throw std::invalid_argument("eps_R must be positive");
  if (!(w_max >= 1.0)) throw std::invalid_argument("w_max must be >= 1");
  if (d_c && !(*d_c > 0.0)) throw std::invalid_argument("d_c must be positive");
}

DetectabilityDetail evaluate_image(const LabeledImage& image, const DetectParams& params) {
  params.validate();
  DetectabilityDetail detail;
  auto& rep = detail.report;
  rep.actor_pixel_count = image.count(PixelLabel::kActor);
  rep.background_pixel_count = image.count(PixelLabel::kBackground);

  if (rep.actor_pixel_count == 0) {
    rep.outcome = DetectOutcome::kOccluded;
    rep.variance_ratio = 0.0;
    rep.cost = std::numeric_limits<double>::infinity();
    return detail;
  }

  const RgbBin actor_bin = build_rgb_bin(image, PixelLabel::kActor, params.bins_per_channel);
  const double h_lo = std::log(params.eps);

  if (rep.background_pixel_count == 0) {
    // Background stands in as a single bin at the clear colour.
    rep.outcome = DetectOutcome::kNoBackground;
    RgbBin clear_bin(params.bins_per_channel);
    clear_bin.add(image.clear_color());
    detail.likelihood = likelihood_image(image, actor_bin, clear_bin, params.eps);
    HistogramPair hist{Histogram1D(params.hist_bins, h_lo, -h_lo), Histogram1D(params.hist_bins, h_lo, -h_lo)};
    for (const auto& h : detail.likelihood->values) {
      if (h) hist.actor.add(*h, 1.0);
    }
    hist.background.add(
        std::log(std::max(actor_bin.density(image.clear_color()), params.eps) / 1.0), 1.0);
    hist.actor.normalize();
    hist.background.normalize();
    detail.histograms = std::move(hist);
  } else {
    const RgbBin background_bin = build_rgb_bin(image, PixelLabel::kBackground, params.bins_per_channel);
    detail.likelihood = likelihood_image(image, actor_bin, background_bin, params.eps);
    detail.histograms = build_histograms(*detail.likelihood, image, params.hist_bins,
                                         params.effective_d_c(image.width(), image.height()), params.w_max,
                                         params.eps);
  }
  rep.variance_ratio = variance_ratio(detail.histograms->actor, detail.histograms->background, params.eps_den);
  rep.cost = detectability_cost(rep.variance_ratio, params.eps_r);
  return detail;
}

DetectabilityDetail evaluate_viewpoint_detail(const Pose& actor_pose, const SceneClouds& clouds,
                                              const Vec3& camera_center, const ViewEvalParams& params,
                                              LabeledImage* rendered) {
  const Pose camera = look_at_pose(camera_center, actor_pose.translation(), Vec3::UnitZ());
  const RgbPointCloud actor_world = transform_cloud(clouds.actor, actor_pose);
  LabeledImage image = synthesize_view(actor_world, clouds.background, camera, params.intrinsics, params.render);
  auto detail = evaluate_image(image, params.detect);
  if (rendered) *rendered = std::move(image);
  return detail;
}

DetectabilityReport evaluate_viewpoint(const Pose& actor_pose, const SceneClouds& clouds, const Vec3& camera_center,
                                       const ViewEvalParams& params) {
  return evaluate_viewpoint_detail(actor_pose, clouds, camera_center, params).report;
}

const char* to_string(DetectOutcome outcome) {
  switch (outcome) {
    case DetectOutcome::kOk: return "OK";
    case DetectOutcome::kOccluded: return "OCCLUDED";
    case DetectOutcome::kNoBackground: return "NO_BACKGROUND";
  }
  return "?";
}

}  // namespace chase

#pragma once

#include <algorithm>
#include <random>

#include "chase/render.hpp"

namespace fixture {

enum class Patch { kNone, kNear, kFar };

// 32x32 image: grey background, a white actor blob, and optionally a 3x3
// white background patch next to the actor or in the far corner.
inline chase::LabeledImage patch_scene(Patch patch) {
  using chase::PixelLabel;
  chase::LabeledImage img(32, 32);
  for (int v = 0; v < 32; ++v) {
    for (int u = 0; u < 32; ++u) {
      const auto i = img.index(u, v);
      const std::uint8_t g = static_cast<std::uint8_t>(110 + (u * 7 + v * 3) % 20);
      img.set(i, {g, g, g}, PixelLabel::kBackground, 10.0);
    }
  }
  for (int v = 10; v < 20; ++v) {
    for (int u = 8; u < 14; ++u) img.set(img.index(u, v), {250, 250, 250}, PixelLabel::kActor, 5.0);
  }
  if (patch != Patch::kNone) {
    const int u0 = patch == Patch::kNear ? 15 : 28;
    const int v0 = patch == Patch::kNear ? 14 : 28;
    for (int v = v0; v < v0 + 3; ++v) {
      for (int u = u0; u < u0 + 3; ++u) img.set(img.index(u, v), {248, 248, 248}, PixelLabel::kBackground, 10.0);
    }
  }
  return img;
}

// Random labelled image up to 32x32: actor rectangle plus scattered actor
// pixels, colours drawn from a small palette with jitter so bins collide.
inline chase::LabeledImage random_labeled_image(std::mt19937_64& rng) {
  using chase::PixelLabel;
  std::uniform_int_distribution<int> size(6, 32);
  const int w = size(rng);
  const int h = size(rng);
  chase::LabeledImage img(w, h);
  static const chase::ColorRGB palette[] = {{250, 250, 250}, {200, 40, 30}, {40, 40, 50},
                                            {120, 120, 120}, {90, 160, 220}, {230, 190, 150}};
  std::uniform_int_distribution<int> pick(0, 5);
  std::uniform_int_distribution<int> jitter(-20, 20);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto colour = [&](int base) {
    auto ch = [&](std::uint8_t c) { return static_cast<std::uint8_t>(std::clamp(c + jitter(rng), 0, 255)); };
    const auto& p = palette[base];
    return chase::ColorRGB{ch(p.r), ch(p.g), ch(p.b)};
  };
  std::uniform_int_distribution<int> ux(0, w - 1);
  std::uniform_int_distribution<int> vy(0, h - 1);
  const int au = ux(rng);
  const int av = vy(rng);
  const int aw = 1 + w / 4;
  const int ah = 1 + h / 4;
  const int actor_a = pick(rng);
  const int actor_b = pick(rng);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const auto i = img.index(u, v);
      const bool in_actor = u >= au && u < au + aw && v >= av && v < av + ah;
      const double r = unit(rng);
      if (in_actor || r < 0.03) {
        img.set(i, colour(unit(rng) < 0.7 ? actor_a : actor_b), PixelLabel::kActor, 3.0);
      } else if (r < 0.9) {
        img.set(i, colour(pick(rng)), PixelLabel::kBackground, 8.0);
      }
    }
  }
  // Guarantee both sets are non-empty.
  img.set(img.index(au, av), colour(actor_a), PixelLabel::kActor, 3.0);
  const int bu = (au + w / 2) % w;
  const int bv = (av + h / 2) % h;
  img.set(img.index(bu, bv), colour(pick(rng)), PixelLabel::kBackground, 8.0);
  return img;
}

}  // namespace fixture

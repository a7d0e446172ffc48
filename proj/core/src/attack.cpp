#include "leafattack/attack.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "leafattack/error.hpp"

namespace leafattack {

void AttackConfig::validate() const {
  if (patch_ratios.empty()) throw Error(ErrorKind::InvalidParameter, "at least one patch ratio is required");
  for (const double r : patch_ratios) {
    if (!(r > 0.0 && r <= 1.0)) {
      throw Error(ErrorKind::InvalidParameter, "patch ratio " + std::to_string(r) + " outside (0, 1]");
    }
  }
  if (angles_deg.empty()) throw Error(ErrorKind::InvalidParameter, "at least one angle is required");
  for (const double a : angles_deg) {
    if (!(a >= 0.0 && a < 360.0)) {
      throw Error(ErrorKind::InvalidParameter, "angle " + std::to_string(a) + " outside [0, 360)");
    }
  }
  if (grid_stride < 1) throw Error(ErrorKind::InvalidParameter, "grid stride must be >= 1");
  if (threads < 0) throw Error(ErrorKind::InvalidParameter, "thread count must be >= 0");
}

int patch_side(double ratio, const BinaryMask& sign_mask) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw Error(ErrorKind::InvalidParameter, "patch ratio " + std::to_string(ratio) + " outside (0, 1]");
  }
  const double side = std::round(std::sqrt(ratio * static_cast<double>(sign_mask.area())));
  return std::max(1, static_cast<int>(side));
}

RotatedPatch prepare_patch(const LeafAsset& leaf, int side, double angle_deg) {
  if (side < 1) throw Error(ErrorKind::Patch, "patch side must be >= 1");
  const int w = leaf.image.width();
  const int h = leaf.image.height();
  int nw = side, nh = side;
  if (w >= h) {
    nh = std::max(1, static_cast<int>(std::lround(static_cast<double>(h) * side / w)));
  } else {
    nw = std::max(1, static_cast<int>(std::lround(static_cast<double>(w) * side / h)));
  }
  RasterImage img = (nw == w && nh == h) ? leaf.image : scale(leaf.image, nw, nh, Resample::Bilinear);
  BinaryMask mask = (nw == w && nh == h) ? leaf.mask : scale_mask(leaf.mask, nw, nh);
  if (mask.area() == 0) {
    throw Error(ErrorKind::Patch, "leaf mask vanished when scaled to " + std::to_string(nw) + "x" +
                                      std::to_string(nh));
  }
  RotatedPatch patch = rotate(img, mask, angle_deg);
  if (patch.mask.area() == 0) {
    throw Error(ErrorKind::Patch, "leaf mask vanished after rotation");
  }
  return patch;
}

namespace {

// Set pixels of a patch mask as (dx, dy) offsets plus the tight bounding box.
struct PatchFootprint {
  std::vector<std::pair<int, int>> offsets;
  PixelBox box;
};

PatchFootprint footprint(const BinaryMask& mask) {
  PatchFootprint f;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.get(x, y)) f.offsets.emplace_back(x, y);
    }
  }
  f.box = mask.bounding_box().value_or(PixelBox{});
  return f;
}

class SignIntegral {
 public:
  explicit SignIntegral(const BinaryMask& m) : w_(m.width() + 1), sums_(static_cast<std::size_t>(w_) * (m.height() + 1), 0) {
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) {
        sums_[idx(x + 1, y + 1)] = m.get(x, y) + sums_[idx(x, y + 1)] + sums_[idx(x + 1, y)] - sums_[idx(x, y)];
      }
    }
  }
  long long count(int x, int y, int w, int h) const {
    return sums_[idx(x + w, y + h)] - sums_[idx(x, y + h)] - sums_[idx(x + w, y)] + sums_[idx(x, y)];
  }

 private:
  std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * static_cast<std::size_t>(w_) + static_cast<std::size_t>(x); }
  int w_;
  std::vector<long long> sums_;
};

bool fits_footprint(const BinaryMask& sign_mask, const SignIntegral& integral, const PatchFootprint& fp,
                    int x, int y, bool bbox_containment) {
  const PixelBox& b = fp.box;
  const long long box_area = static_cast<long long>(b.width) * b.height;
  const long long covered = integral.count(x + b.x, y + b.y, b.width, b.height);
  if (bbox_containment) return covered == box_area;
  if (covered < static_cast<long long>(fp.offsets.size())) return false;
  if (covered == box_area) return true;
  for (const auto& [dx, dy] : fp.offsets) {
    if (!sign_mask.get(x + dx, y + dy)) return false;
  }
  return true;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

struct PatchKey {
  double ratio;
  double angle;
  auto operator<=>(const PatchKey&) const = default;
};

using PatchCache = std::map<PatchKey, RotatedPatch>;

// Enumeration that also keeps the prepared patches for the evaluation pass.
std::vector<PlacementCandidate> enumerate_with_cache(const AttackConfig& cfg, const SignInstance& sign,
                                                     const LeafAsset& leaf, PatchCache& cache) {
  cfg.validate();
  validate(leaf);
  const BinaryMask& sign_mask = sign.sign_mask;
  const SignIntegral integral(sign_mask);
  std::vector<PlacementCandidate> out;
  for (const double ratio : sorted_unique(cfg.patch_ratios)) {
    const int side = patch_side(ratio, sign_mask);
    for (const double angle : sorted_unique(cfg.angles_deg)) {
      RotatedPatch patch;
      try {
        patch = prepare_patch(leaf, side, angle);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Patch) continue;
        throw;
      }
      const int pw = patch.mask.width();
      const int ph = patch.mask.height();
      if (pw > sign_mask.width() || ph > sign_mask.height()) continue;
      const PatchFootprint fp = footprint(patch.mask);
      for (int y = 0; y + ph <= sign_mask.height(); y += cfg.grid_stride) {
        for (int x = 0; x + pw <= sign_mask.width(); x += cfg.grid_stride) {
          if (!fits_footprint(sign_mask, integral, fp, x, y, cfg.bbox_containment)) continue;
          out.push_back({x, y, ratio, angle, side, pw, ph});
        }
      }
      cache.emplace(PatchKey{ratio, angle}, std::move(patch));
    }
  }
  return out;
}

}  // namespace

bool patch_fits(const BinaryMask& sign_mask, const BinaryMask& patch_mask, int x, int y, bool bbox_containment) {
  if (x < 0 || y < 0 || x + patch_mask.width() > sign_mask.width() ||
      y + patch_mask.height() > sign_mask.height()) {
    return false;
  }
  const auto box = patch_mask.bounding_box();
  if (!box) return true;
  for (int py = 0; py < patch_mask.height(); ++py) {
    for (int px = 0; px < patch_mask.width(); ++px) {
      const bool inside_box = px >= box->x && px < box->x + box->width && py >= box->y && py < box->y + box->height;
      const bool required = bbox_containment ? inside_box : patch_mask.get(px, py);
      if (required && !sign_mask.get(x + px, y + py)) return false;
    }
  }
  return true;
}

std::vector<PlacementCandidate> enumerate_candidates(const AttackConfig& cfg, const SignInstance& sign,
                                                     const LeafAsset& leaf) {
  PatchCache cache;
  return enumerate_with_cache(cfg, sign, leaf, cache);
}

RasterImage render_candidate(const SignInstance& sign, const LeafAsset& leaf, const PlacementCandidate& candidate) {
  const RotatedPatch patch = prepare_patch(leaf, candidate.patch_side, candidate.angle_deg);
  return composite(sign.image, patch.image, patch.mask, candidate.x, candidate.y);
}

AttackReport run_attack(const AttackConfig& cfg, const SignInstance& sign, const LeafAsset& leaf,
                        const Classifier& classifier, const EdgeParams& edge_params) {
  validate(sign, classifier.class_count());
  AttackReport report;
  report.sign_name = sign.name;
  report.leaf_species = leaf.species;
  report.true_label = sign.true_label;
  report.class_labels = classifier.labels();
  report.config = cfg;
  report.edge_params = edge_params;
  report.classifier_description = classifier.describe();

  PatchCache cache;
  const std::vector<PlacementCandidate> candidates = enumerate_with_cache(cfg, sign, leaf, cache);
  report.candidates_evaluated = candidates.size();
  if (candidates.empty()) return report;

  std::vector<AttackOutcome> outcomes(candidates.size());
  auto evaluate = [&](std::size_t i) {
    const PlacementCandidate& c = candidates[i];
    const RotatedPatch& patch = cache.at(PatchKey{c.patch_ratio, c.angle_deg});
    const RasterImage adv = composite(sign.image, patch.image, patch.mask, c.x, c.y);
    const Probabilities p = classifier.predict(adv, sign.sign_mask);
    AttackOutcome& o = outcomes[i];
    o.candidate = c;
    o.index = i;
    o.predicted_label = p.predicted;
    o.confidence_percent = p.confidence_percent;
    o.true_label_probability = p.of(sign.true_label);
    o.success = p.predicted != sign.true_label;
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(
      candidates.size(), cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads) : hw);
  if (workers <= 1) {
    for (std::size_t i = 0; i < candidates.size(); ++i) evaluate(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          try {
            for (std::size_t i = next++; i < candidates.size(); i = next++) evaluate(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = candidates.size();
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  // Sequential selection over the enumeration order makes the tie-break
  // independent of evaluation scheduling.
  const AttackOutcome* best_success = nullptr;
  const AttackOutcome* best_fallback = nullptr;
  for (const AttackOutcome& o : outcomes) {
    if (o.success) {
      ++report.successful_candidates;
      if (!best_success || o.confidence_percent > best_success->confidence_percent) best_success = &o;
    }
    if (!best_fallback || o.true_label_probability < best_fallback->true_label_probability) best_fallback = &o;
  }
  if (best_success) {
    report.best = *best_success;
  } else {
    report.best = *best_fallback;
    report.best_is_fallback = true;
  }
  if (cfg.keep_log) report.log = std::move(outcomes);
  return report;
}

}  // namespace leafattack

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "leafattack/classifier.hpp"
#include "leafattack/maskgen.hpp"
#include "leafattack/raster.hpp"

namespace leafattack {

struct AttackConfig {
  std::vector<double> patch_ratios{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<double> angles_deg{0, 45, 90, 135, 180, 225, 270, 315};
  int grid_stride = 4;
  /// Require the whole bounding box of the rotated leaf mask (not just its
  /// set pixels) to lie on the sign mask.
  bool bbox_containment = false;
  /// Recorded in reports only; the search itself is exhaustive.
  std::uint64_t seed = 0;
  /// 0 = hardware concurrency.
  int threads = 0;
  bool keep_log = false;

  void validate() const;
};

struct PlacementCandidate {
  int x = 0;
  int y = 0;
  double patch_ratio = 0.0;
  double angle_deg = 0.0;
  int patch_side = 0;
  int patch_width = 0;
  int patch_height = 0;

  bool operator==(const PlacementCandidate&) const = default;
};

struct AttackOutcome {
  PlacementCandidate candidate;
  /// Position in the deterministic enumeration.
  std::size_t index = 0;
  int predicted_label = 0;
  double confidence_percent = 0.0;
  double true_label_probability = 0.0;
  bool success = false;
};

struct AttackReport {
  std::string sign_name;
  LeafSpecies leaf_species = LeafSpecies::Maple;
  int true_label = 0;
  std::vector<std::string> class_labels;
  /// Absent only when no candidate fits.
  std::optional<AttackOutcome> best;
  /// True when no candidate misclassified and `best` is the candidate that
  /// minimizes the true-label probability instead.
  bool best_is_fallback = false;
  std::size_t candidates_evaluated = 0;
  std::size_t successful_candidates = 0;
  AttackConfig config;
  EdgeParams edge_params;
  std::string classifier_description;
  std::vector<AttackOutcome> log;

  bool success() const { return best && best->success; }
};

/// round(sqrt(ratio * sign area)), at least 1.
int patch_side(double ratio, const BinaryMask& sign_mask);

/// Scale the leaf so its longer side equals `side` (aspect preserved), then
/// rotate with canvas expansion.
RotatedPatch prepare_patch(const LeafAsset& leaf, int side, double angle_deg);

/// True when every set pixel of `patch_mask` at offset (x, y) lands on a set
/// pixel of `sign_mask` (or, with bbox_containment, every pixel of the mask's
/// tight bounding box does).
bool patch_fits(const BinaryMask& sign_mask, const BinaryMask& patch_mask, int x, int y,
                bool bbox_containment = false);

/// Candidates ordered by (ratio asc, angle asc, y asc, x asc). Ratios and
/// angles are sorted and de-duplicated; (ratio, angle) pairs whose scaled
/// leaf mask is empty contribute nothing.
std::vector<PlacementCandidate> enumerate_candidates(const AttackConfig& cfg, const SignInstance& sign,
                                                     const LeafAsset& leaf);

/// The adversarial image for one candidate.
RasterImage render_candidate(const SignInstance& sign, const LeafAsset& leaf,
                             const PlacementCandidate& candidate);

/// Exhaustive search: composite and classify every candidate. The best
/// successful outcome is the highest confidence, ties to the earlier
/// candidate; with no success the best is the lowest true-label probability.
AttackReport run_attack(const AttackConfig& cfg, const SignInstance& sign, const LeafAsset& leaf,
                        const Classifier& classifier, const EdgeParams& edge_params = {});

}  // namespace leafattack

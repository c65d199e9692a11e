#pragma once

#include <optional>

#include "glyomo/config.hpp"
#include "glyomo/motion_extraction.hpp"
#include "glyomo/types.hpp"

namespace glyomo {

/// Per-candidate matching record: visual similarity, displacement
/// similarity, and their weighted combination.
struct MatchScore {
  double c_c = 0.0;          // visual similarity in [0,1]
  double c_d = 0.0;          // displacement similarity in [0,1]
  double c_w = 0.0;          // k2*c_c + k3*c_d
  double dd_norm = 0.0;      // normalized distance difference
  double dtheta_norm = 0.0;  // normalized direction difference in [0,1]
  double best_scale = 1.0;
};

/// Track memory feeding the matcher: the last two track centers, the
/// appearance template from the last confirmed detection, and the last
/// displacement (distance + direction).
class TrackHistory {
 public:
  struct Center {
    Point2d pos;
    int frame;
  };

  /// Records a new track position. update_template controls whether the
  /// appearance patch is refreshed from the frame at the given box.
  void observe(int frame_index, const BBox& box, const Image& frame_gray, bool update_template);

  void clear();

  bool has_template() const { return !template_patch_.empty(); }
  bool has_displacement() const { return has_displacement_; }
  const Image& template_patch() const { return template_patch_; }
  const std::optional<Center>& last_center() const { return last_center_; }
  const std::optional<Center>& prev_center() const { return prev_center_; }
  const std::optional<BBox>& anchor_box() const { return anchor_box_; }
  double last_distance() const { return last_distance_; }
  double last_direction() const { return last_direction_; }

  /// Test/replay hook: installs displacement state directly.
  void set_displacement(double distance, double direction);

 private:
  std::optional<Center> last_center_;
  std::optional<Center> prev_center_;
  std::optional<BBox> anchor_box_;
  Image template_patch_;
  double last_distance_ = 0.0;
  double last_direction_ = 0.0;
  bool has_displacement_ = false;
};

/// Normalized cross-correlation of the template placed at (x, y) in the
/// image: zero-mean correlation over the template extent divided by the
/// product of the two root sums of squared deviations. Evaluation uses
/// integral images for the window statistics. nullopt when either side has
/// zero variance; callers treat that as similarity 0.
class NccMatcher {
 public:
  explicit NccMatcher(const Image& image);
  std::optional<double> score(const Image& tmpl, int x, int y) const;
  const Image& image() const { return image_; }

 private:
  Image image_;
  std::vector<std::uint64_t> integral_;     // (w+1)*(h+1) summed-area table
  std::vector<std::uint64_t> integral_sq_;
};

/// One-off convenience wrapper over NccMatcher.
std::optional<double> ncc(const Image& tmpl, const Image& image, int x, int y);

/// Maps a correlation in [-1,1] to [0,1].
inline double ncc_normalized(double v) { return (v + 1.0) / 2.0; }

/// Best normalized correlation between the track template and the
/// candidate region over the configured scale set and a +/- search_radius
/// pixel neighborhood of the candidate centroid. Returns {c_c, best_scale}.
std::pair<double, double> multi_scale_similarity(const TrackHistory& hist,
                                                 const MotionCandidate& cand, const Image& frame,
                                                 const std::vector<double>& scales,
                                                 int search_radius);

struct DisplacementScore {
  double c_d;
  double dd_norm;
  double dtheta_norm;
};

/// Displacement-consistency score between the candidate step and the
/// track's previous step, normalized by the searched image diagonal.
/// nullopt when the history lacks a previous displacement; callers use the
/// neutral value 0.5.
std::optional<DisplacementScore> displacement_similarity(const TrackHistory& hist,
                                                         const Point2d& cand_center,
                                                         double norm_width, double norm_height);

inline double weighted_cost(double c_c, double c_d, double k2, double k3) {
  return k2 * c_c + k3 * c_d;
}

struct MatchResult {
  MotionCandidate candidate;
  MatchScore score;
};

/// Scores every candidate and returns the one with the highest weighted
/// cost; ties fall back to higher visual similarity, then smaller distance
/// to the last track center, then scan order of the centroid. none when
/// the list is empty or the best cost is below cfg.min_match_cost.
std::optional<MatchResult> match_candidates(const TrackHistory& hist,
                                            const std::vector<MotionCandidate>& cands,
                                            const Image& frame, double norm_width,
                                            double norm_height, const PipelineConfig& cfg);

}  // namespace glyomo

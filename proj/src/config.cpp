#include "glyomo/config.hpp"

#include <stdexcept>

namespace glyomo {

void PipelineConfig::validate() const {
  if (n_g <= 0 || n_l <= 0) throw std::invalid_argument("config: n_g and n_l must be > 0");
  if (!(roi_base > 0.0)) throw std::invalid_argument("config: roi_base must be > 0");
  if (!(r_s > 0.0) || r_s > 1.0) throw std::invalid_argument("config: r_s must be in (0,1]");
  if (k2 < 0.0 || k3 < 0.0) throw std::invalid_argument("config: k2 and k3 must be >= 0");
  if (scales.empty()) throw std::invalid_argument("config: scales must be nonempty");
  for (double s : scales) {
    if (!(s > 0.0)) throw std::invalid_argument("config: scales must be > 0");
  }
  if (delta_p < 4) throw std::invalid_argument("config: delta_p too small");
  if (lk_win < 3 || lk_win % 2 == 0) throw std::invalid_argument("config: lk_win must be odd >= 3");
  if (erode_ksize < 1 || erode_ksize % 2 == 0 || dilate_ksize < 1 || dilate_ksize % 2 == 0 ||
      median_ksize < 1 || median_ksize % 2 == 0 ||
      blur_ksize < 1 || blur_ksize % 2 == 0) {
    throw std::invalid_argument("config: kernel sizes must be odd >= 1");
  }
}

}  // namespace glyomo

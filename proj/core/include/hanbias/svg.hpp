#pragma once

#include <string>

#include "hanbias/stats.hpp"

namespace hanbias {

struct SvgOptions {
  double threshold = 3.0;        // vertical marker on the human-score axis
  std::string x_label = "human score";
  std::string y_label = "bias score";
};

/// 800x600 scatter of (human score, bias score) with labeled axes and a
/// dashed threshold line.
std::string render_scatter_svg(const ScatterData& data,
                               const SvgOptions& options = {});

void save_scatter_svg(const ScatterData& data, const std::string& path,
                      const SvgOptions& options = {});

}  // namespace hanbias

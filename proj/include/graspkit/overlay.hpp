#pragma once

#include <string>

#include "graspkit/depth_image.hpp"
#include "graspkit/pipeline.hpp"

namespace graspkit {

/// Writes a binary PPM visualization: depth as grayscale, retained line
/// poses in red with green corner dots, the top-ranked rectangles outlined
/// in blue (rank ticks on the long edge), rank 1 in yellow, 2 px wide.
void emit_overlay(const DepthImage& img, const PipelineResult& result,
                  const std::string& path);

}  // namespace graspkit

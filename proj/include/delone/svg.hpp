#pragma once

#include <string>

#include "delone/netsynth.hpp"
#include "delone/tessellation.hpp"

namespace delone {

struct SvgOptions {
  bool circumcircles = false;
  double width = 800.0;
};

/// SVG text: sites, dual Voronoi edges, Delaunay edges, optional circumcircles,
/// failed simplices filled. Throws UnsupportedDim unless dim == 2.
std::string render_svg(const Net& net, const DelaunayComplex& c, const StabilityCertificate* cert = nullptr,
                       const SvgOptions& opt = {});

}  // namespace delone

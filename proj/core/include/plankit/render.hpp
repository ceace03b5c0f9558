#pragma once

#include <string>
#include <vector>

#include "plankit/behavior.hpp"
#include "plankit/scenario.hpp"

namespace plankit {

struct RenderOptions {
  double margin = 10.0;  // metres of padding around the scene bounds
  double scale = 6.0;    // pixels per metre
};

// Colour for a candidate by rank (0 = best): green fading to red.
std::string rank_color(int rank, int count);

// Standalone SVG of one scene: lane centerlines gray, crosswalks outlined,
// the AV red, other agents from a fixed palette, candidates coloured by
// score rank, and the recorded AV future dashed black.  `ranking` lists
// candidate indices best-first; pass empty vectors to draw the scene alone.
std::string render_svg(const Scenario& scenario,
                       const std::vector<TrajectoryProposal>& proposals,
                       const std::vector<int>& ranking,
                       const RenderOptions& opts = {});

}  // namespace plankit

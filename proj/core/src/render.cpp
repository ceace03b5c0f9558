#include "plankit/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace plankit {

namespace {

struct Bounds {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void add(double x, double y) {
    min_x = std::min(min_x, x);
    min_y = std::min(min_y, y);
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y);
  }
};

class Canvas {
 public:
  Canvas(const Bounds& b, const RenderOptions& opts)
      : min_x_(b.min_x - opts.margin),
        max_y_(b.max_y + opts.margin),
        scale_(opts.scale),
        width_((b.max_x - b.min_x + 2.0 * opts.margin) * opts.scale),
        height_((b.max_y - b.min_y + 2.0 * opts.margin) * opts.scale) {}

  double px(double x) const { return (x - min_x_) * scale_; }
  double py(double y) const { return (max_y_ - y) * scale_; }  // SVG y grows down
  double width() const { return width_; }
  double height() const { return height_; }

  std::string point(double x, double y) const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f", px(x), py(y));
    return buf;
  }

 private:
  double min_x_, max_y_, scale_, width_, height_;
};

template <typename PointAt>
std::string polyline_points(const Canvas& c, std::size_t n, PointAt at) {
  std::string pts;
  for (std::size_t i = 0; i < n; ++i) {
    auto [x, y] = at(i);
    if (!pts.empty()) pts += ' ';
    pts += c.point(x, y);
  }
  return pts;
}

std::string box_points(const Canvas& c, double x, double y, double heading,
                       double length, double width) {
  double ch = std::cos(heading), sh = std::sin(heading);
  double hl = length / 2.0, hw = width / 2.0;
  std::string pts;
  const double corners[4][2] = {{hl, hw}, {hl, -hw}, {-hl, -hw}, {-hl, hw}};
  for (const auto& corner : corners) {
    if (!pts.empty()) pts += ' ';
    pts += c.point(x + corner[0] * ch - corner[1] * sh,
                   y + corner[0] * sh + corner[1] * ch);
  }
  return pts;
}

const char* kAgentPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd",
                               "#8c564b", "#e377c2", "#17becf", "#bcbd22",
                               "#7f7f7f", "#aec7e8"};

}  // namespace

std::string rank_color(int rank, int count) {
  double t = count > 1 ? static_cast<double>(rank) / static_cast<double>(count - 1) : 0.0;
  auto lerp = [t](double a, double b) { return static_cast<int>(std::lround(a + t * (b - a))); };
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", lerp(26, 215), lerp(152, 48),
                lerp(80, 39));
  return buf;
}

std::string render_svg(const Scenario& scenario,
                       const std::vector<TrajectoryProposal>& proposals,
                       const std::vector<int>& ranking, const RenderOptions& opts) {
  Bounds b;
  for (const Lane& lane : scenario.map.lanes)
    for (const auto& p : lane.centerline) b.add(p.x(), p.y());
  for (const auto& crosswalk : scenario.map.crosswalks)
    for (const auto& p : crosswalk) b.add(p.x(), p.y());
  for (const AgentTrack& agent : scenario.agents) {
    const Pose& s = agent.current();
    if (std::isfinite(s.x) && std::isfinite(s.y)) b.add(s.x, s.y);
  }
  Canvas c(b, opts);

  std::ostringstream svg;
  svg.precision(2);
  svg << std::fixed;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << c.width()
      << "\" height=\"" << c.height() << "\" viewBox=\"0 0 " << c.width() << ' '
      << c.height() << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  for (const Lane& lane : scenario.map.lanes)
    svg << "<polyline fill=\"none\" stroke=\"#9e9e9e\" stroke-width=\"2\" points=\""
        << polyline_points(c, lane.centerline.size(),
                           [&](std::size_t i) {
                             return std::pair<double, double>(lane.centerline[i].x(),
                                                              lane.centerline[i].y());
                           })
        << "\"/>\n";
  for (const auto& crosswalk : scenario.map.crosswalks)
    svg << "<polygon fill=\"none\" stroke=\"#b0bec5\" stroke-width=\"1.5\" points=\""
        << polyline_points(c, crosswalk.size(),
                           [&](std::size_t i) {
                             return std::pair<double, double>(crosswalk[i].x(),
                                                              crosswalk[i].y());
                           })
        << "\"/>\n";

  // Candidates, worst rank first so better ones end up on top.
  int count = static_cast<int>(ranking.size());
  for (int r = count - 1; r >= 0; --r) {
    const TrajectoryProposal& p = proposals[static_cast<std::size_t>(ranking[static_cast<std::size_t>(r)])];
    svg << "<polyline fill=\"none\" stroke=\"" << rank_color(r, count)
        << "\" stroke-width=\"1.5\" opacity=\"0.8\" points=\""
        << polyline_points(c, p.states.size(),
                           [&](std::size_t i) {
                             return std::pair<double, double>(p.states[i].x,
                                                              p.states[i].y);
                           })
        << "\"/>\n";
  }

  // Recorded AV future, dashed black on top of the candidates.
  std::vector<Pose> truth = future_of(scenario.av());
  svg << "<polyline fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\" "
         "stroke-dasharray=\"6 4\" points=\""
      << polyline_points(c, truth.size(),
                         [&](std::size_t i) {
                           return std::pair<double, double>(truth[i].x, truth[i].y);
                         })
      << "\"/>\n";

  int palette_i = 0;
  for (std::size_t a = 0; a < scenario.agents.size(); ++a) {
    const AgentTrack& agent = scenario.agents[a];
    const Pose& s = agent.current();
    if (!std::isfinite(s.x) || !std::isfinite(s.y)) continue;
    bool is_av = static_cast<int>(a) == scenario.av_index;
    const char* color =
        is_av ? "#d32f2f"
              : kAgentPalette[palette_i++ % (sizeof(kAgentPalette) / sizeof(char*))];
    svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.85\" stroke=\"#212121\" "
           "stroke-width=\"0.8\" points=\""
        << box_points(c, s.x, s.y, s.heading, agent.length, agent.width) << "\"/>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace plankit

#pragma once

// Minimal SVG line charts: axes, ticks, polylines and a legend.

#include <string>
#include <vector>

namespace egdlab::exp {

struct Curve {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
    int color = 0;  // palette index
};

struct PlotSpec {
    std::string title;
    std::string x_label = "epoch";
    std::string y_label = "accuracy";
    bool log_x = true;  // plots x + 1 so that epoch 0 is shown
    double y_min = 0.0;
    double y_max = 1.0;
    int width = 720;
    int height = 440;
};

std::string render_svg(const PlotSpec& spec, const std::vector<Curve>& curves);

}  // namespace egdlab::exp

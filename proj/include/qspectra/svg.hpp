#pragma once

#include <string>
#include <vector>

namespace qspectra::svg {

struct Series
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
};

struct Panel
{
    std::string y_label;
    std::vector<Series> series;
};

struct Figure
{
    std::string title;
    std::string x_label;
    std::vector<Panel> panels; // stacked top to bottom, shared x axis
    std::vector<std::string> comments; // emitted as XML comments
};

// Linear-axis line chart as a standalone SVG document.
std::string render(const Figure& fig);

// A fixed colour cycle for multi-curve plots.
const std::string& palette(std::size_t i);

} // namespace qspectra::svg

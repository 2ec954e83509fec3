#include "wamg/svg.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace wamg {

namespace {

// deterministic palette: golden-angle hue walk keyed by aggregate id
std::string color_of(index_t agg_id) {
    const double hue = std::fmod(0.618033988749895 * static_cast<double>(agg_id + 1), 1.0);
    const double s = 0.62, v = 0.92;
    const double h6 = hue * 6.0;
    const int i = static_cast<int>(h6) % 6;
    const double f = h6 - std::floor(h6);
    const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
    double r = 0, g = 0, b = 0;
    switch (i) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        default: r = v; g = p; b = q; break;
    }
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(r * 255),
                  static_cast<int>(g * 255), static_cast<int>(b * 255));
    return buf;
}

} // namespace

void emit_aggregate_svg_grid(const AggregateSet& agg, index_t grid_n, const std::string& path) {
    if (agg.n != grid_n * grid_n)
        throw std::invalid_argument("emit_aggregate_svg_grid: aggregate map size != n^2");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_aggregate_svg_grid: cannot open " + path);
    const int cell = 12;
    const index_t size = grid_n * cell;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
        << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
    for (index_t iy = 0; iy < grid_n; ++iy) {
        for (index_t ix = 0; ix < grid_n; ++ix) {
            const index_t i = iy * grid_n + ix;
            out << "  <rect x=\"" << ix * cell << "\" y=\"" << (grid_n - 1 - iy) * cell
                << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
                << color_of(agg.agg_of[i]) << "\" stroke=\"#333\" stroke-width=\"0.5\"/>\n";
        }
    }
    out << "</svg>\n";
}

void emit_aggregate_svg_mesh(const AggregateSet& agg, const TriMesh& mesh,
                             const std::vector<index_t>& dof, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_aggregate_svg_mesh: cannot open " + path);
    const double scale = 600.0;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" "
           "viewBox=\"0 0 600 600\">\n";
    char buf[256];
    for (const auto& t : mesh.triangles) {
        // triangle takes the aggregate color of its first interior vertex
        std::string fill = "#dddddd";
        for (index_t v : t) {
            if (dof[v] >= 0) {
                fill = color_of(agg.agg_of[dof[v]]);
                break;
            }
        }
        std::snprintf(buf, sizeof(buf),
                      "  <polygon points=\"%.2f,%.2f %.2f,%.2f %.2f,%.2f\" fill=\"%s\" "
                      "stroke=\"#333\" stroke-width=\"0.4\"/>\n",
                      mesh.vx[t[0]] * scale, (1.0 - mesh.vy[t[0]]) * scale,
                      mesh.vx[t[1]] * scale, (1.0 - mesh.vy[t[1]]) * scale,
                      mesh.vx[t[2]] * scale, (1.0 - mesh.vy[t[2]]) * scale, fill.c_str());
        out << buf;
    }
    out << "</svg>\n";
}

} // namespace wamg

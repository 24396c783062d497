#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "helmdd/types.hpp"

namespace helmdd {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Bounds {
    double xmin = 0.0;
    double xmax = 1.0;
    double ymin = 0.0;
    double ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
};

/// Edge `local_edge` of triangle `element` joins local vertices k and (k+1)%3.
struct BoundaryEdge {
    int element = 0;
    int local_edge = 0;
};

using Triangle = std::array<int, 3>;

/// Structured triangulation of a rectangle. Each cell (i, j) is split along
/// its main diagonal into triangles 2c (lower-right) and 2c+1 (upper-left),
/// c = j * nx + i, both counter-clockwise.
class Mesh {
public:
    Mesh(int nx, int ny, Bounds bounds);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    const Bounds& bounds() const { return bounds_; }

    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_elements() const { return static_cast<int>(elements_.size()); }

    const std::vector<Point>& nodes() const { return nodes_; }
    const std::vector<Triangle>& elements() const { return elements_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

    int node_index(int i, int j) const { return j * (nx_ + 1) + i; }
    int node_i(int node) const { return node % (nx_ + 1); }
    int node_j(int node) const { return node / (nx_ + 1); }

    /// Elements touching each node, ascending.
    const std::vector<std::vector<int>>& node_elements() const { return node_elements_; }

    double area(int element) const;
    Point barycenter(int element) const;
    std::array<int, 2> edge_nodes(int element, int local_edge) const;
    double edge_length(int element, int local_edge) const;
    /// Unit normal of a boundary edge pointing out of the domain.
    Point outward_normal(const BoundaryEdge& edge) const;

    /// True when both endpoints lie on the same side of the rectangle.
    bool on_boundary(int a, int b) const;
    bool on_boundary(int node) const;

private:
    int nx_;
    int ny_;
    Bounds bounds_;
    std::vector<Point> nodes_;
    std::vector<Triangle> elements_;
    std::vector<BoundaryEdge> boundary_edges_;
    std::vector<std::vector<int>> node_elements_;
};

Mesh build_grid(int nx, int ny, const Bounds& bounds);

/// Regularized point source f(x) = amplitude * exp(-|x - center|^2 / (2 width^2)).
struct GaussianSource {
    Point center{0.5, 0.5};
    double width = 0.05;
    Complex amplitude{0.0, 0.0};

    Complex operator()(const Point& p) const;
};

/// Piecewise-constant coefficients per element plus the source data.
struct MediumField {
    std::vector<double> mu;
    std::vector<double> nu;
    GaussianSource source;
    /// Robin datum per boundary edge, same order as Mesh::boundary_edges().
    std::vector<Complex> g;

    /// Throws ConfigError if sizes mismatch the mesh or a coefficient is not positive.
    void validate(const Mesh& mesh) const;
};

/// Uniform velocity c, so nu = 1 / c^2 and mu = 1.
MediumField constant_medium(const Mesh& mesh, double velocity = 1.0);

/// Parameters for the synthetic media.
struct BuiltinParams {
    int bands = 3;
    double contrast = 2.0;
};

/// "constant": c = 1.
/// "layers": `bands` horizontal bands, c rising linearly from 1 at the top
///           to `contrast` at the bottom.
/// "wedge":  c = 1 above the diagonal from (xmin, ymin) to (xmax, ymax),
///           c = contrast below it.
MediumField builtin_medium(const std::string& name, const Mesh& mesh,
                           const BuiltinParams& params = {});

/// Velocity raster in the MEDIUM text format.
struct VelocityRaster {
    int nx = 0;
    int ny = 0;
    Bounds bounds;
    std::vector<double> velocity; // row-major, y outer

    double sample(const Point& p) const;
};

VelocityRaster read_raster(std::istream& in);
VelocityRaster read_raster(const std::filesystem::path& path);
void write_raster(std::ostream& out, const VelocityRaster& raster);

/// nu = c^-2 sampled at barycenters (nearest cell), mu = 1.
MediumField medium_from_raster(const VelocityRaster& raster, const Mesh& mesh);
MediumField load_medium(const std::filesystem::path& path, const Mesh& mesh);

} // namespace helmdd

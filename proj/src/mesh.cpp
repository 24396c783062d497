#include "helmdd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace helmdd {

Mesh::Mesh(int nx, int ny, Bounds bounds) : nx_(nx), ny_(ny), bounds_(bounds) {
    if (nx < 1 || ny < 1) {
        throw ConfigError("mesh needs at least one element per axis");
    }
    if (!(bounds.xmax > bounds.xmin) || !(bounds.ymax > bounds.ymin)) {
        throw ConfigError("degenerate mesh bounds");
    }

    const double hx = bounds.width() / nx;
    const double hy = bounds.height() / ny;
    nodes_.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            // Pin the last row/column to the exact bounds.
            const double x = (i == nx) ? bounds.xmax : bounds.xmin + i * hx;
            const double y = (j == ny) ? bounds.ymax : bounds.ymin + j * hy;
            nodes_.push_back({x, y});
        }
    }

    elements_.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int p00 = node_index(i, j);
            const int p10 = node_index(i + 1, j);
            const int p11 = node_index(i + 1, j + 1);
            const int p01 = node_index(i, j + 1);
            elements_.push_back({p00, p10, p11});
            elements_.push_back({p00, p11, p01});
        }
    }

    // bottom, right, top, left
    for (int i = 0; i < nx; ++i) {
        boundary_edges_.push_back({2 * (0 * nx + i), 0});
    }
    for (int j = 0; j < ny; ++j) {
        boundary_edges_.push_back({2 * (j * nx + nx - 1), 1});
    }
    for (int i = nx - 1; i >= 0; --i) {
        boundary_edges_.push_back({2 * ((ny - 1) * nx + i) + 1, 1});
    }
    for (int j = ny - 1; j >= 0; --j) {
        boundary_edges_.push_back({2 * (j * nx) + 1, 2});
    }

    node_elements_.resize(nodes_.size());
    for (int e = 0; e < num_elements(); ++e) {
        for (int v : elements_[static_cast<std::size_t>(e)]) {
            node_elements_[static_cast<std::size_t>(v)].push_back(e);
        }
    }
}

double Mesh::area(int element) const {
    const auto& t = elements_[static_cast<std::size_t>(element)];
    const Point& a = nodes_[static_cast<std::size_t>(t[0])];
    const Point& b = nodes_[static_cast<std::size_t>(t[1])];
    const Point& c = nodes_[static_cast<std::size_t>(t[2])];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Point Mesh::barycenter(int element) const {
    const auto& t = elements_[static_cast<std::size_t>(element)];
    Point p;
    for (int v : t) {
        p.x += nodes_[static_cast<std::size_t>(v)].x / 3.0;
        p.y += nodes_[static_cast<std::size_t>(v)].y / 3.0;
    }
    return p;
}

std::array<int, 2> Mesh::edge_nodes(int element, int local_edge) const {
    const auto& t = elements_[static_cast<std::size_t>(element)];
    return {t[static_cast<std::size_t>(local_edge)],
            t[static_cast<std::size_t>((local_edge + 1) % 3)]};
}

double Mesh::edge_length(int element, int local_edge) const {
    const auto [a, b] = edge_nodes(element, local_edge);
    const Point& pa = nodes_[static_cast<std::size_t>(a)];
    const Point& pb = nodes_[static_cast<std::size_t>(b)];
    return std::hypot(pb.x - pa.x, pb.y - pa.y);
}

Point Mesh::outward_normal(const BoundaryEdge& edge) const {
    // Counter-clockwise triangles: the outward normal of edge (a -> b) is (dy, -dx).
    const auto [a, b] = edge_nodes(edge.element, edge.local_edge);
    const Point& pa = nodes_[static_cast<std::size_t>(a)];
    const Point& pb = nodes_[static_cast<std::size_t>(b)];
    const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
    return {(pb.y - pa.y) / len, -(pb.x - pa.x) / len};
}

bool Mesh::on_boundary(int node) const {
    const int i = node_i(node);
    const int j = node_j(node);
    return i == 0 || i == nx_ || j == 0 || j == ny_;
}

bool Mesh::on_boundary(int a, int b) const {
    const int ia = node_i(a), ja = node_j(a);
    const int ib = node_i(b), jb = node_j(b);
    return (ia == 0 && ib == 0) || (ia == nx_ && ib == nx_) || (ja == 0 && jb == 0) ||
           (ja == ny_ && jb == ny_);
}

Mesh build_grid(int nx, int ny, const Bounds& bounds) { return Mesh(nx, ny, bounds); }

Complex GaussianSource::operator()(const Point& p) const {
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    return amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
}

void MediumField::validate(const Mesh& mesh) const {
    const auto ne = static_cast<std::size_t>(mesh.num_elements());
    if (mu.size() != ne || nu.size() != ne) {
        throw ConfigError("medium coefficient count does not match the mesh");
    }
    if (g.size() != mesh.boundary_edges().size()) {
        throw ConfigError("boundary datum count does not match the mesh");
    }
    for (std::size_t e = 0; e < ne; ++e) {
        if (!(mu[e] > 0.0) || !(nu[e] > 0.0)) {
            throw ConfigError("medium coefficients must be positive (element " +
                              std::to_string(e) + ")");
        }
    }
    if (!(source.width > 0.0)) {
        throw ConfigError("source width must be positive");
    }
}

namespace {

MediumField blank_medium(const Mesh& mesh) {
    MediumField m;
    const auto ne = static_cast<std::size_t>(mesh.num_elements());
    m.mu.assign(ne, 1.0);
    m.nu.assign(ne, 1.0);
    m.g.assign(mesh.boundary_edges().size(), Complex{0.0, 0.0});
    const Bounds& b = mesh.bounds();
    m.source.center = {0.5 * (b.xmin + b.xmax), 0.5 * (b.ymin + b.ymax)};
    return m;
}

} // namespace

MediumField constant_medium(const Mesh& mesh, double velocity) {
    if (!(velocity > 0.0)) {
        throw ConfigError("velocity must be positive");
    }
    MediumField m = blank_medium(mesh);
    std::fill(m.nu.begin(), m.nu.end(), 1.0 / (velocity * velocity));
    return m;
}

MediumField builtin_medium(const std::string& name, const Mesh& mesh,
                           const BuiltinParams& params) {
    if (name == "constant") {
        return constant_medium(mesh);
    }
    if (!(params.contrast > 0.0)) {
        throw ConfigError("medium contrast must be positive");
    }
    MediumField m = blank_medium(mesh);
    const Bounds& b = mesh.bounds();
    if (name == "layers") {
        if (params.bands < 1) {
            throw ConfigError("layers medium needs at least one band");
        }
        for (int e = 0; e < mesh.num_elements(); ++e) {
            const double depth = (b.ymax - mesh.barycenter(e).y) / b.height();
            const int band = std::clamp(static_cast<int>(depth * params.bands), 0, params.bands - 1);
            const double c = params.bands == 1
                                 ? 1.0
                                 : 1.0 + (params.contrast - 1.0) * band / (params.bands - 1);
            m.nu[static_cast<std::size_t>(e)] = 1.0 / (c * c);
        }
        return m;
    }
    if (name == "wedge") {
        for (int e = 0; e < mesh.num_elements(); ++e) {
            const Point p = mesh.barycenter(e);
            const bool above = (p.y - b.ymin) / b.height() > (p.x - b.xmin) / b.width();
            const double c = above ? 1.0 : params.contrast;
            m.nu[static_cast<std::size_t>(e)] = 1.0 / (c * c);
        }
        return m;
    }
    throw ConfigError("unknown builtin medium '" + name + "'");
}

double VelocityRaster::sample(const Point& p) const {
    const double dx = bounds.width() / nx;
    const double dy = bounds.height() / ny;
    const int i = std::clamp(static_cast<int>(std::floor((p.x - bounds.xmin) / dx)), 0, nx - 1);
    const int j = std::clamp(static_cast<int>(std::floor((p.y - bounds.ymin) / dy)), 0, ny - 1);
    return velocity[static_cast<std::size_t>(j * nx + i)];
}

namespace {

/// Whitespace tokenizer that remembers which line each token came from.
class LineTokenizer {
public:
    explicit LineTokenizer(std::istream& in) : in_(in) {}

    bool next(std::string& token) {
        while (!(line_stream_ >> token)) {
            std::string line;
            if (!std::getline(in_, line)) {
                return false;
            }
            ++line_no_;
            line_stream_.clear();
            line_stream_.str(line);
        }
        return true;
    }

    std::string next_line() {
        std::string line;
        if (!std::getline(in_, line)) {
            throw IngestError("unexpected end of file", line_no_ + 1);
        }
        ++line_no_;
        return line;
    }

    int line() const { return line_no_; }

private:
    std::istream& in_;
    std::istringstream line_stream_;
    int line_no_ = 0;
};

double parse_real(const std::string& token, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) {
            throw IngestError("malformed number '" + token + "'", line);
        }
        return v;
    } catch (const std::logic_error&) {
        throw IngestError("malformed number '" + token + "'", line);
    }
}

} // namespace

VelocityRaster read_raster(std::istream& in) {
    LineTokenizer tok(in);
    {
        std::istringstream magic(tok.next_line());
        std::string word;
        int version = 0;
        std::string extra;
        if (!(magic >> word >> version) || word != "MEDIUM" || version != 1 || (magic >> extra)) {
            throw IngestError("expected header 'MEDIUM 1'", tok.line());
        }
    }
    VelocityRaster r;
    {
        std::istringstream dims(tok.next_line());
        std::string extra;
        if (!(dims >> r.nx >> r.ny >> r.bounds.xmin >> r.bounds.xmax >> r.bounds.ymin >>
              r.bounds.ymax) ||
            (dims >> extra)) {
            throw IngestError("expected 'nx ny xmin xmax ymin ymax'", tok.line());
        }
        if (r.nx < 1 || r.ny < 1 || !(r.bounds.xmax > r.bounds.xmin) ||
            !(r.bounds.ymax > r.bounds.ymin)) {
            throw IngestError("degenerate raster dimensions", tok.line());
        }
    }
    const auto expected = static_cast<std::size_t>(r.nx) * static_cast<std::size_t>(r.ny);
    r.velocity.reserve(expected);
    std::string token;
    while (tok.next(token)) {
        const double c = parse_real(token, tok.line());
        if (!(c > 0.0) || !std::isfinite(c)) {
            throw IngestError("velocity must be positive, got '" + token + "'", tok.line());
        }
        if (r.velocity.size() == expected) {
            throw IngestError("more than nx*ny = " + std::to_string(expected) + " values",
                              tok.line());
        }
        r.velocity.push_back(c);
    }
    if (r.velocity.size() != expected) {
        throw IngestError("expected " + std::to_string(expected) + " values, found " +
                              std::to_string(r.velocity.size()),
                          tok.line());
    }
    return r;
}

VelocityRaster read_raster(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IngestError("cannot open medium file '" + path.string() + "'", 0);
    }
    return read_raster(in);
}

void write_raster(std::ostream& out, const VelocityRaster& raster) {
    out << "MEDIUM 1\n"
        << raster.nx << ' ' << raster.ny << ' ' << std::setprecision(17) << raster.bounds.xmin
        << ' ' << raster.bounds.xmax << ' ' << raster.bounds.ymin << ' ' << raster.bounds.ymax
        << '\n';
    for (int j = 0; j < raster.ny; ++j) {
        for (int i = 0; i < raster.nx; ++i) {
            out << (i ? " " : "") << raster.velocity[static_cast<std::size_t>(j * raster.nx + i)];
        }
        out << '\n';
    }
}

MediumField medium_from_raster(const VelocityRaster& raster, const Mesh& mesh) {
    const Bounds& mb = mesh.bounds();
    const double tol = 1e-12 * std::max(mb.width(), mb.height());
    if (raster.bounds.xmin > mb.xmin + tol || raster.bounds.xmax < mb.xmax - tol ||
        raster.bounds.ymin > mb.ymin + tol || raster.bounds.ymax < mb.ymax - tol) {
        throw IngestError("raster does not cover the mesh bounds", 2);
    }
    MediumField m = blank_medium(mesh);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const double c = raster.sample(mesh.barycenter(e));
        m.nu[static_cast<std::size_t>(e)] = 1.0 / (c * c);
    }
    return m;
}

MediumField load_medium(const std::filesystem::path& path, const Mesh& mesh) {
    return medium_from_raster(read_raster(path), mesh);
}

} // namespace helmdd

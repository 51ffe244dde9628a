#include "qrpf/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace qrpf {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void expect_keyword(std::istream& in, const std::string& keyword, const std::string& path) {
    std::string word;
    if (!(in >> word) || word != keyword)
        throw IoError("mesh file " + path + ": expected '" + keyword + "', got '" + word + "'");
}

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("checkpoint " + path + ": truncated");
    return v;
}

}  // namespace

Mesh read_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mesh file " + path);
    Mesh mesh;
    expect_keyword(in, "nodes", path);
    std::size_t n = 0;
    in >> n;
    mesh.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) in >> mesh.nodes[i].x() >> mesh.nodes[i].y();
    expect_keyword(in, "triangles", path);
    std::size_t m = 0;
    in >> m;
    mesh.triangles.resize(m);
    for (std::size_t e = 0; e < m; ++e)
        in >> mesh.triangles[e][0] >> mesh.triangles[e][1] >> mesh.triangles[e][2];
    expect_keyword(in, "boundary", path);
    std::size_t b = 0;
    in >> b;
    for (std::size_t k = 0; k < b; ++k) {
        int i = 0, j = 0;
        std::string tag;
        in >> i >> j >> tag;
        mesh.boundary_tags[{std::min(i, j), std::max(i, j)}] = tag;
    }
    if (!in) throw IoError("mesh file " + path + ": parse error");
    mesh.validate();
    return mesh;
}

void write_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write mesh file " + path);
    out << "nodes " << mesh.nodes.size() << "\n";
    for (const auto& p : mesh.nodes) out << fmt(p.x()) << " " << fmt(p.y()) << "\n";
    out << "triangles " << mesh.triangles.size() << "\n";
    for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "boundary " << mesh.boundary_tags.size() << "\n";
    for (const auto& [edge, tag] : mesh.boundary_tags)
        out << edge.first << " " << edge.second << " " << tag << "\n";
}

void write_vtk(const FieldBundle& fields, const std::string& path) {
    if (!fields.mesh || fields.mesh->nodes.empty() || fields.mesh->triangles.empty())
        throw EmptyMesh("vtk output requires a non-empty mesh");
    const Mesh& mesh = *fields.mesh;
    const int n = mesh.node_count();
    if (fields.displacement.size() != 2 * n || fields.damage.size() != 2 * n ||
        fields.energy_density.size() != n)
        throw IoError("vtk field sizes do not match the mesh");

    std::ofstream out(path);
    if (!out) throw IoError("cannot write vtk file " + path);
    out << "# vtk DataFile Version 2.0\n";
    out << "qrpf fields\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << n << " double\n";
    for (int i = 0; i < n; ++i)
        out << fmt(mesh.nodes[i].x()) << " " << fmt(mesh.nodes[i].y()) << " 0\n";
    out << "CELLS " << mesh.triangle_count() << " " << 4 * mesh.triangle_count() << "\n";
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "CELL_TYPES " << mesh.triangle_count() << "\n";
    for (int e = 0; e < mesh.triangle_count(); ++e) out << "5\n";
    out << "POINT_DATA " << n << "\n";
    out << "VECTORS displacement double\n";
    for (int i = 0; i < n; ++i)
        out << fmt(fields.displacement[2 * i]) << " " << fmt(fields.displacement[2 * i + 1])
            << " 0\n";
    out << "SCALARS damage_magnitude double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (int i = 0; i < n; ++i)
        out << fmt(std::hypot(fields.damage[2 * i], fields.damage[2 * i + 1])) << "\n";
    out << "VECTORS damage double\n";
    for (int i = 0; i < n; ++i)
        out << fmt(fields.damage[2 * i]) << " " << fmt(fields.damage[2 * i + 1]) << " 0\n";
    out << "SCALARS energy_density double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (int i = 0; i < n; ++i) out << fmt(fields.energy_density[i]) << "\n";
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header) {
    auto* f = new std::ofstream(path, std::ios::binary);
    if (!*f) {
        delete f;
        throw IoError("cannot write csv file " + path);
    }
    file_ = f;
    write_line(header);
}

CsvWriter::~CsvWriter() { delete static_cast<std::ofstream*>(file_); }

void CsvWriter::row(const std::vector<std::string>& cells) { write_line(cells); }

std::string CsvWriter::num(double v) { return fmt(v); }

void CsvWriter::write_line(const std::vector<std::string>& cells) {
    auto& out = *static_cast<std::ofstream*>(file_);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string& cell = cells[i];
        bool quote = cell.find_first_of(",\"\r\n") != std::string::npos;
        if (quote) {
            out << '"';
            for (char c : cell) {
                if (c == '"') out << '"';
                out << c;
            }
            out << '"';
        } else {
            out << cell;
        }
        if (i + 1 < cells.size()) out << ',';
    }
    out << "\r\n";
}

namespace {
constexpr char kMagic[4] = {'Q', 'R', 'P', 'F'};
constexpr std::uint8_t kVersion = 1;
}  // namespace

void save_checkpoint(const SimulationState& state, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint " + path);
    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, static_cast<std::uint32_t>(state.mesh.nodes.size()));
    put(out, static_cast<std::uint32_t>(state.mesh.triangles.size()));
    put(out, static_cast<std::uint32_t>(state.mesh.boundary_tags.size()));
    for (const auto& p : state.mesh.nodes) {
        put(out, p.x());
        put(out, p.y());
    }
    for (const auto& t : state.mesh.triangles)
        for (int k = 0; k < 3; ++k) put(out, static_cast<std::uint32_t>(t[k]));
    for (const auto& [edge, tag] : state.mesh.boundary_tags) {
        put(out, static_cast<std::uint32_t>(edge.first));
        put(out, static_cast<std::uint32_t>(edge.second));
        put(out, static_cast<std::uint16_t>(tag.size()));
        out.write(tag.data(), static_cast<std::streamsize>(tag.size()));
    }
    for (int i = 0; i < state.y.size(); ++i) put(out, state.y[i]);
    for (int i = 0; i < state.d.size(); ++i) put(out, state.d[i]);
    for (const auto& fr : state.frozen) {
        put(out, static_cast<std::uint8_t>(fr.has_value()));
        put(out, fr ? fr->x() : 0.0);
        put(out, fr ? fr->y() : 0.0);
    }
    put(out, static_cast<std::int32_t>(state.step));
}

SimulationState load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("checkpoint " + path + ": bad magic");
    auto version = get<std::uint8_t>(in, path);
    if (version != kVersion)
        throw IoError("checkpoint " + path + ": unsupported version " + std::to_string(version));

    SimulationState state;
    auto n = get<std::uint32_t>(in, path);
    auto m = get<std::uint32_t>(in, path);
    auto b = get<std::uint32_t>(in, path);
    state.mesh.nodes.resize(n);
    for (auto& p : state.mesh.nodes) {
        p.x() = get<double>(in, path);
        p.y() = get<double>(in, path);
    }
    state.mesh.triangles.resize(m);
    for (auto& t : state.mesh.triangles)
        for (int k = 0; k < 3; ++k) t[k] = static_cast<int>(get<std::uint32_t>(in, path));
    for (std::uint32_t k = 0; k < b; ++k) {
        int i = static_cast<int>(get<std::uint32_t>(in, path));
        int j = static_cast<int>(get<std::uint32_t>(in, path));
        auto len = get<std::uint16_t>(in, path);
        std::string tag(len, '\0');
        in.read(tag.data(), len);
        if (!in) throw IoError("checkpoint " + path + ": truncated tag");
        state.mesh.boundary_tags[{i, j}] = tag;
    }
    state.y.resize(2 * n);
    for (int i = 0; i < state.y.size(); ++i) state.y[i] = get<double>(in, path);
    state.d.resize(2 * n);
    for (int i = 0; i < state.d.size(); ++i) state.d[i] = get<double>(in, path);
    state.frozen.resize(n);
    for (auto& fr : state.frozen) {
        bool has = get<std::uint8_t>(in, path) != 0;
        double x = get<double>(in, path);
        double y = get<double>(in, path);
        fr = has ? std::optional<Vec2>(Vec2(x, y)) : std::nullopt;
    }
    state.step = get<std::int32_t>(in, path);
    return state;
}

}  // namespace qrpf

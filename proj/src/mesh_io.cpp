#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "meshvf/mesh.hpp"

namespace meshvf {

static_assert(std::endian::native == std::endian::little, "binary STL I/O assumes a little-endian host");

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// Splits into whitespace-separated tokens.
std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line_no) {
  double value = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
  return value;
}

long long parse_int(std::string_view s, std::size_t line_no) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + std::string(s) + "'");
  return value;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (!fn(line, line_no)) return;
    pos = end + 1;
  }
}

void fan_triangulate(const std::vector<VertexId>& poly, std::vector<Triangle>& out) {
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) out.push_back({poly[0], poly[k], poly[k + 1]});
}

void append_f32(std::string& out, double v) {
  const float f = static_cast<float>(v);
  char buf[4];
  std::memcpy(buf, &f, 4);
  out.append(buf, 4);
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

MeshFormat format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".stl") return MeshFormat::BinaryStl;
  if (ext == ".obj") return MeshFormat::AsciiObj;
  if (ext == ".ply") return MeshFormat::AsciiPly;
  throw ParseError("unknown mesh extension '" + ext + "'");
}

TriangleMesh parse_binary_stl(std::string_view bytes) {
  if (bytes.size() < 84) throw ParseError("binary STL shorter than its 84-byte header");
  std::uint32_t count = 0;
  std::memcpy(&count, bytes.data() + 80, 4);
  const std::size_t expected = 84 + 50 * static_cast<std::size_t>(count);
  if (bytes.size() < expected) {
    if (bytes.substr(0, 5) == "solid") throw ParseError("ASCII STL is not supported; expected binary STL");
    throw ParseError("binary STL truncated: " + std::to_string(count) + " facets declared, " +
                     std::to_string(bytes.size()) + " bytes present");
  }
  std::vector<Vector3d> corners;
  corners.reserve(3 * count);
  for (std::uint32_t f = 0; f < count; ++f) {
    const char* rec = bytes.data() + 84 + 50 * static_cast<std::size_t>(f);
    float xyz[12];
    std::memcpy(xyz, rec, sizeof(xyz));  // normal (ignored) + 3 corners
    for (int c = 0; c < 3; ++c) corners.emplace_back(xyz[3 + 3 * c], xyz[4 + 3 * c], xyz[5 + 3 * c]);
  }
  return TriangleMesh::from_soup(corners);
}

TriangleMesh parse_obj(std::string_view text) {
  std::vector<Vector3d> vertices;
  std::vector<Triangle> triangles;
  for_each_line(text, [&](std::string_view line, std::size_t no) {
    const auto tok = tokenize(line);
    if (tok.empty()) return true;
    if (tok[0] == "v") {
      if (tok.size() < 4) throw ParseError("line " + std::to_string(no) + ": vertex needs 3 coordinates");
      vertices.emplace_back(parse_double(tok[1], no), parse_double(tok[2], no), parse_double(tok[3], no));
    } else if (tok[0] == "f") {
      if (tok.size() < 4) throw ParseError("line " + std::to_string(no) + ": face needs at least 3 vertices");
      std::vector<VertexId> poly;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        std::string_view ref = tok[k].substr(0, tok[k].find('/'));
        long long idx = parse_int(ref, no);
        if (idx < 0) idx += static_cast<long long>(vertices.size()) + 1;
        if (idx < 1 || idx > static_cast<long long>(vertices.size()))
          throw ParseError("line " + std::to_string(no) + ": face index out of range");
        poly.push_back(static_cast<VertexId>(idx - 1));
      }
      fan_triangulate(poly, triangles);
    }
    return true;
  });
  if (triangles.empty()) throw ParseError("OBJ contains no faces");
  return TriangleMesh::from_indexed(std::move(vertices), std::move(triangles));
}

TriangleMesh parse_ply(std::string_view text) {
  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> properties;
    bool has_list = false;
  };
  std::vector<Element> elements;
  bool header_done = false;
  bool first = true;
  for_each_line(text, [&](std::string_view line, std::size_t no) {
    const auto tok = tokenize(line);
    if (first) {
      if (tok.empty() || tok[0] != "ply") throw ParseError("missing 'ply' magic");
      first = false;
      return true;
    }
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") return true;
    if (tok[0] == "format") {
      if (tok.size() < 2 || tok[1] != "ascii") throw ParseError("only ascii PLY is supported");
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw ParseError("line " + std::to_string(no) + ": malformed element");
      elements.push_back({std::string(tok[1]), static_cast<std::size_t>(parse_int(tok[2], no)), {}, false});
    } else if (tok[0] == "property") {
      if (elements.empty()) throw ParseError("property before element");
      if (tok.size() >= 2 && tok[1] == "list") {
        elements.back().has_list = true;
        elements.back().properties.emplace_back(tok.back());
      } else if (tok.size() == 3) {
        elements.back().properties.emplace_back(tok[2]);
      } else {
        throw ParseError("line " + std::to_string(no) + ": malformed property");
      }
    } else if (tok[0] == "end_header") {
      header_done = true;
      return false;
    }
    return true;
  });
  if (!header_done) throw ParseError("PLY header not terminated");

  const std::size_t header_end = text.find("end_header");
  std::size_t body = text.find('\n', header_end);
  body = body == std::string_view::npos ? text.size() : body + 1;

  std::vector<std::string_view> lines;
  for_each_line(text.substr(body), [&](std::string_view line, std::size_t) {
    if (!tokenize(line).empty()) lines.push_back(line);
    return true;
  });

  std::vector<Vector3d> vertices;
  std::vector<Triangle> triangles;
  std::size_t cursor = 0;
  for (const Element& el : elements) {
    if (cursor + el.count > lines.size()) throw ParseError("PLY body shorter than declared element counts");
    if (el.name == "vertex") {
      const auto find = [&](const char* name) {
        auto it = std::find(el.properties.begin(), el.properties.end(), name);
        if (it == el.properties.end()) throw ParseError(std::string("vertex element lacks property ") + name);
        return static_cast<std::size_t>(it - el.properties.begin());
      };
      const std::size_t ix = find("x"), iy = find("y"), iz = find("z");
      for (std::size_t k = 0; k < el.count; ++k) {
        const auto tok = tokenize(lines[cursor + k]);
        if (tok.size() < el.properties.size()) throw ParseError("PLY vertex line has too few values");
        vertices.emplace_back(parse_double(tok[ix], 0), parse_double(tok[iy], 0), parse_double(tok[iz], 0));
      }
    } else if (el.name == "face") {
      for (std::size_t k = 0; k < el.count; ++k) {
        const auto tok = tokenize(lines[cursor + k]);
        if (tok.empty()) throw ParseError("empty PLY face line");
        const long long n = parse_int(tok[0], 0);
        if (n < 3 || static_cast<std::size_t>(n) + 1 > tok.size()) throw ParseError("PLY face needs at least 3 indices");
        std::vector<VertexId> poly;
        for (long long i = 1; i <= n; ++i) {
          const long long idx = parse_int(tok[i], 0);
          if (idx < 0 || idx >= static_cast<long long>(vertices.size()))
            throw ParseError("PLY face index out of range");
          poly.push_back(static_cast<VertexId>(idx));
        }
        fan_triangulate(poly, triangles);
      }
    }
    cursor += el.count;
  }
  if (triangles.empty()) throw ParseError("PLY contains no faces");
  return TriangleMesh::from_indexed(std::move(vertices), std::move(triangles));
}

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  const std::string bytes = read_file(path);
  switch (format) {
    case MeshFormat::BinaryStl:
      return parse_binary_stl(bytes);
    case MeshFormat::AsciiObj:
      return parse_obj(bytes);
    case MeshFormat::AsciiPly:
      return parse_ply(bytes);
  }
  throw ParseError("unknown format");
}

TriangleMesh load_mesh(const std::filesystem::path& path) { return load_mesh(path, format_from_extension(path)); }

std::string to_binary_stl(const TriangleMesh& mesh) {
  std::string out(80, '\0');
  const char tag[] = "meshvf binary STL";
  std::memcpy(out.data(), tag, sizeof(tag) - 1);
  const auto count = static_cast<std::uint32_t>(mesh.triangle_count());
  char buf[4];
  std::memcpy(buf, &count, 4);
  out.append(buf, 4);
  out.reserve(84 + 50 * mesh.triangle_count());
  for (TriangleId t = 0; t < mesh.triangle_count(); ++t) {
    for (int k = 0; k < 3; ++k) append_f32(out, mesh.face_normal(t)[k]);
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < 3; ++k) append_f32(out, mesh.corner(t, c)[k]);
    out.append(2, '\0');
  }
  return out;
}

std::string to_obj(const TriangleMesh& mesh) {
  std::string out;
  for (const Vector3d& v : mesh.vertices())
    out += "v " + format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z()) + "\n";
  for (const Triangle& t : mesh.triangles())
    out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " + std::to_string(t[2] + 1) + "\n";
  return out;
}

std::string to_ply(const TriangleMesh& mesh) {
  std::string out = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(mesh.vertex_count()) +
                    "\nproperty double x\nproperty double y\nproperty double z\nelement face " +
                    std::to_string(mesh.triangle_count()) + "\nproperty list uchar int vertex_indices\nend_header\n";
  for (const Vector3d& v : mesh.vertices())
    out += format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z()) + "\n";
  for (const Triangle& t : mesh.triangles())
    out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
  return out;
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
  switch (format) {
    case MeshFormat::BinaryStl:
      write_file(path, to_binary_stl(mesh));
      return;
    case MeshFormat::AsciiObj:
      write_file(path, to_obj(mesh));
      return;
    case MeshFormat::AsciiPly:
      write_file(path, to_ply(mesh));
      return;
  }
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  save_mesh(mesh, path, format_from_extension(path));
}

}  // namespace meshvf

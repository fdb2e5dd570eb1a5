#pragma once

#include <pushkit/geometry.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace pushkit
{

/// Shape fixture file: {"name": ..., "vertices": [[x, y], ...], "arc_step": ...} in meters.
struct ShapeFixture
{
    std::string name;
    std::vector<Vec2> vertices;
    double arc_step = 0.005;

    [[nodiscard]] ShapeContour contour () const { return make_polygon_contour (vertices, arc_step); }
};

ShapeFixture parse_shape_fixture (const std::string &json_text);
ShapeFixture load_shape_fixture (const std::filesystem::path &path);
std::string to_json (const ShapeFixture &fixture);

/// Directory bundled with the sources; overridden by the PUSHKIT_SHAPES environment variable.
std::filesystem::path default_shapes_dir ();

class ShapeLibrary
{
  public:
    ShapeLibrary () = default;

    /// Loads every *.json fixture in `dir`.
    static ShapeLibrary load_directory (const std::filesystem::path &dir);
    static const ShapeLibrary &builtin ();

    void add (const ShapeFixture &fixture);
    [[nodiscard]] bool contains (const std::string &name) const { return contours_.count (name) != 0; }
    /// Throws std::out_of_range for unknown names.
    [[nodiscard]] const ShapeContour &get (const std::string &name) const;
    [[nodiscard]] std::vector<std::string> names () const;

  private:
    std::map<std::string, ShapeContour> contours_;
};

} // namespace pushkit

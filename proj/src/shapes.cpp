#include <pushkit/shapes.hpp>

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pushkit
{

using nlohmann::json;

ShapeFixture parse_shape_fixture (const std::string &json_text)
{
    const json j = json::parse (json_text);
    ShapeFixture f;
    f.name = j.at ("name").get<std::string> ();
    for (const auto &v : j.at ("vertices"))
    {
        if (!v.is_array () || v.size () != 2)
            throw std::invalid_argument ("shape vertex must be [x, y]");
        f.vertices.emplace_back (v[0].get<double> (), v[1].get<double> ());
    }
    f.arc_step = j.value ("arc_step", 0.005);
    return f;
}

ShapeFixture load_shape_fixture (const std::filesystem::path &path)
{
    std::ifstream in (path);
    if (!in)
        throw std::runtime_error ("cannot open shape fixture " + path.string ());
    std::stringstream ss;
    ss << in.rdbuf ();
    return parse_shape_fixture (ss.str ());
}

std::string to_json (const ShapeFixture &fixture)
{
    json j;
    j["name"] = fixture.name;
    j["arc_step"] = fixture.arc_step;
    j["vertices"] = json::array ();
    for (const auto &v : fixture.vertices)
        j["vertices"].push_back ({v.x (), v.y ()});
    return j.dump (2);
}

std::filesystem::path default_shapes_dir ()
{
    if (const char *env = std::getenv ("PUSHKIT_SHAPES"))
        return env;
#ifdef PUSHKIT_SHAPES_DIR
    return PUSHKIT_SHAPES_DIR;
#else
    return "data/shapes";
#endif
}

ShapeLibrary ShapeLibrary::load_directory (const std::filesystem::path &dir)
{
    if (!std::filesystem::is_directory (dir))
        throw std::runtime_error ("shape directory not found: " + dir.string ());
    ShapeLibrary lib;
    for (const auto &entry : std::filesystem::directory_iterator (dir))
        if (entry.path ().extension () == ".json")
            lib.add (load_shape_fixture (entry.path ()));
    return lib;
}

const ShapeLibrary &ShapeLibrary::builtin ()
{
    static const ShapeLibrary lib = load_directory (default_shapes_dir ());
    return lib;
}

void ShapeLibrary::add (const ShapeFixture &fixture) { contours_.insert_or_assign (fixture.name, fixture.contour ()); }

const ShapeContour &ShapeLibrary::get (const std::string &name) const
{
    auto it = contours_.find (name);
    if (it == contours_.end ())
        throw std::out_of_range ("unknown object: " + name);
    return it->second;
}

std::vector<std::string> ShapeLibrary::names () const
{
    std::vector<std::string> out;
    for (const auto &[name, _] : contours_)
        out.push_back (name);
    return out;
}

} // namespace pushkit

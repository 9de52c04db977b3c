#include "pzshell/run_config.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pzshell/errors.hpp"

namespace pzshell {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where.empty() ? what : where + ": " + what);
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items())
    if (!ok.count(item.key()))
      throw ConfigError("unknown configuration key: " +
                        (where.empty() ? item.key() : where + "." + item.key()));
}

double get_double(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

bool get_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

Vec2 get_vec2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where, "expected [x, y]");
  return {get_double(j[0], where), get_double(j[1], where)};
}

Eigen::MatrixXd get_matrix(const json& j, int rows, int cols,
                           const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    fail(where, "expected " + std::to_string(rows) + " rows");
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
      fail(where, "expected " + std::to_string(cols) + " columns");
    for (int c = 0; c < cols; ++c) m(i, c) = get_double(j[i][c], where);
  }
  return m;
}

Tensor4 get_tensor4(const json& j, const std::string& where) {
  check_keys(j, where, {"lambda", "mu", "voigt"});
  if (j.contains("voigt")) {
    if (j.contains("lambda") || j.contains("mu"))
      fail(where, "give either lambda/mu or voigt, not both");
    return Tensor4::from_voigt(get_matrix(j["voigt"], 3, 3, where + ".voigt"));
  }
  if (!j.contains("lambda") || !j.contains("mu"))
    fail(where, "needs lambda and mu (or a voigt matrix)");
  return Tensor4::isotropic(get_double(j["lambda"], where + ".lambda"),
                            get_double(j["mu"], where + ".mu"));
}

HoleSpec get_hole(const json& j, const std::string& where) {
  check_keys(j, where,
             {"shape", "center", "radius", "semi_axes", "half_widths"});
  const std::string shape =
      j.contains("shape") ? get_string(j["shape"], where + ".shape") : "none";
  const Vec2 center = j.contains("center")
                          ? get_vec2(j["center"], where + ".center")
                          : Vec2(0.5, 0.5);
  const auto only = [&](const char* key) {
    for (const char* other : {"radius", "semi_axes", "half_widths"})
      if (std::string(other) != key && j.contains(other))
        fail(where, std::string("shape \"") + shape + "\" does not take " +
                        other);
    if (!j.contains(key))
      fail(where, std::string("shape \"") + shape + "\" needs " + key);
  };
  if (shape == "none") {
    if (j.contains("radius") || j.contains("semi_axes") ||
        j.contains("half_widths"))
      fail(where, "shape \"none\" takes no parameters");
    return HoleSpec::none();
  }
  if (shape == "disk") {
    only("radius");
    return HoleSpec::disk(center, get_double(j["radius"], where + ".radius"));
  }
  if (shape == "ellipse") {
    only("semi_axes");
    const Vec2 ax = get_vec2(j["semi_axes"], where + ".semi_axes");
    return HoleSpec::ellipse(center, ax.x(), ax.y());
  }
  if (shape == "rectangle") {
    only("half_widths");
    const Vec2 hw = get_vec2(j["half_widths"], where + ".half_widths");
    return HoleSpec::rectangle(center, hw.x(), hw.y());
  }
  fail(where + ".shape", "unknown hole shape \"" + shape + "\"");
}

struct MaterialRegion {
  enum class Where { all, layer, disk };
  Where where = Where::all;
  int axis = 0;
  double from = 0.0, to = 1.0;
  Vec2 center{0.5, 0.5};
  double radius = 0.0;

  Tensor4 c;
  Tensor3 e;
  Mat2 d = Mat2::Identity();
  Tensor4 bending;
  double sqrt_a = 1.0;

  bool contains(const Vec2& y) const {
    switch (where) {
      case Where::all:
        return true;
      case Where::layer:
        return y[axis] >= from && y[axis] < to;
      case Where::disk:
        return (y - center).norm() < radius;
    }
    return false;
  }
};

MaterialRegion get_region(const json& j, const std::string& where) {
  check_keys(j, where, {"where", "c", "e", "d", "bending", "sqrt_a"});
  MaterialRegion r;
  if (j.contains("where") && !(j["where"].is_string())) {
    const json& w = j["where"];
    check_keys(w, where + ".where", {"layer", "disk"});
    if (w.contains("layer") == w.contains("disk"))
      fail(where + ".where", "give exactly one of layer or disk");
    if (w.contains("layer")) {
      const json& l = w["layer"];
      check_keys(l, where + ".where.layer", {"axis", "from", "to"});
      r.where = MaterialRegion::Where::layer;
      const int axis = get_int(l.contains("axis") ? l["axis"] : json(1),
                               where + ".where.layer.axis");
      if (axis != 1 && axis != 2)
        fail(where + ".where.layer.axis", "axis must be 1 or 2");
      r.axis = axis - 1;
      r.from = l.contains("from")
                   ? get_double(l["from"], where + ".where.layer.from")
                   : 0.0;
      r.to = l.contains("to") ? get_double(l["to"], where + ".where.layer.to")
                              : 1.0;
    } else {
      const json& d = w["disk"];
      check_keys(d, where + ".where.disk", {"center", "radius"});
      r.where = MaterialRegion::Where::disk;
      if (d.contains("center"))
        r.center = get_vec2(d["center"], where + ".where.disk.center");
      if (!d.contains("radius"))
        fail(where + ".where.disk", "needs radius");
      r.radius = get_double(d["radius"], where + ".where.disk.radius");
    }
  } else if (j.contains("where")) {
    if (get_string(j["where"], where + ".where") != "all")
      fail(where + ".where", "expected \"all\" or a layer/disk object");
  }
  if (!j.contains("c")) fail(where, "needs an elasticity block c");
  r.c = get_tensor4(j["c"], where + ".c");
  if (j.contains("e"))
    r.e = Tensor3::from_voigt(get_matrix(j["e"], 2, 3, where + ".e"));
  if (j.contains("d")) r.d = get_matrix(j["d"], 2, 2, where + ".d");
  r.bending = j.contains("bending")
                  ? get_tensor4(j["bending"], where + ".bending")
                  : r.c;
  if (j.contains("sqrt_a")) {
    r.sqrt_a = get_double(j["sqrt_a"], where + ".sqrt_a");
    if (!(r.sqrt_a > 0)) fail(where + ".sqrt_a", "must be positive");
  }
  return r;
}

MaterialField build_material(const json& j, const std::string& where) {
  check_keys(j, where, {"regions"});
  if (!j.contains("regions")) fail(where, "needs a regions list");
  const json& list = j["regions"];
  if (!list.is_array() || list.empty())
    fail(where + ".regions", "expected a non-empty list");
  auto regions = std::make_shared<std::vector<MaterialRegion>>();
  for (std::size_t i = 0; i < list.size(); ++i)
    regions->push_back(get_region(
        list[i], where + ".regions[" + std::to_string(i) + "]"));
  if (regions->back().where != MaterialRegion::Where::all)
    fail(where + ".regions",
         "the last region must cover the whole cell (where: \"all\")");

  const auto pick = [regions](const Vec2& y) -> const MaterialRegion& {
    for (const auto& r : *regions)
      if (r.contains(y)) return r;
    return regions->back();
  };
  MaterialField m;
  m.c = [pick](const Vec2& y) { return pick(y).c; };
  m.e = [pick](const Vec2& y) { return pick(y).e; };
  m.d = [pick](const Vec2& y) { return pick(y).d; };
  m.bending = [pick](const Vec2& y) { return pick(y).bending; };
  m.sqrt_a = [pick](const Vec2& y) { return pick(y).sqrt_a; };
  return m;
}

MaterialField default_material() {
  return MaterialField::constant(Tensor4::isotropic(1.0, 1.0), Tensor3(),
                                 Mat2::Identity(),
                                 Tensor4::isotropic(1.0, 1.0));
}

std::function<bool(const Vec2&)> make_marker(const std::string& name,
                                             double lx, double ly,
                                             const std::string& where) {
  constexpr double tol = 1e-12;
  if (name == "none") return nullptr;
  if (name == "boundary")
    return [lx, ly](const Vec2& p) {
      return p.x() < tol || p.y() < tol || p.x() > lx - tol ||
             p.y() > ly - tol;
    };
  if (name == "left") return [](const Vec2& p) { return p.x() < tol; };
  if (name == "right")
    return [lx](const Vec2& p) { return p.x() > lx - tol; };
  if (name == "bottom") return [](const Vec2& p) { return p.y() < tol; };
  if (name == "top") return [ly](const Vec2& p) { return p.y() > ly - tol; };
  fail(where, "unknown boundary marker \"" + name + "\"");
}

SurfaceChart get_chart(const json& j, const std::string& where) {
  check_keys(j, where, {"kind", "radius"});
  const std::string kind =
      j.contains("kind") ? get_string(j["kind"], where + ".kind") : "plane";
  const double radius = j.contains("radius")
                            ? get_double(j["radius"], where + ".radius")
                            : 1.0;
  if (kind != "plane" && !(radius > 0)) fail(where + ".radius", "must be positive");
  if (kind == "plane") {
    if (j.contains("radius")) fail(where, "plane takes no radius");
    return SurfaceChart::plane();
  }
  if (kind == "cylinder") return SurfaceChart::cylinder(radius);
  if (kind == "sphere_patch") return SurfaceChart::sphere_patch(radius);
  fail(where + ".kind", "unknown chart kind \"" + kind + "\"");
}

void get_loads(const json& j, const std::string& where, Loads& loads) {
  check_keys(j, where, {"f", "q"});
  const auto fill = [&](const char* key, bool body) {
    if (!j.contains(key)) return;
    const json& arr = j[key];
    if (!arr.is_array() || arr.size() != 3)
      fail(where + "." + key, "expected three components");
    for (int c = 0; c < 3; ++c) {
      const double v = get_double(arr[c], where + "." + key);
      if (v == 0.0) continue;
      if (body)
        loads.f[c] = [v](const Vec2&, double) { return v; };
      else
        loads.q[c] = [v](const Vec2&) { return v; };
    }
  };
  fill("f", true);
  fill("q", false);
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "",
             {"output_dir", "chart", "cell", "material", "loads", "macro",
              "validate", "solver"});

  RunConfig cfg;
  cfg.material = default_material();
  if (j.contains("output_dir"))
    cfg.output_dir = get_string(j["output_dir"], "output_dir");
  if (j.contains("chart")) cfg.chart = get_chart(j["chart"], "chart");
  if (j.contains("cell")) {
    const json& c = j["cell"];
    check_keys(c, "cell", {"n", "hole"});
    if (c.contains("n")) {
      cfg.cell_n = get_int(c["n"], "cell.n");
      if (cfg.cell_n < 2) fail("cell.n", "must be at least 2");
    }
    if (c.contains("hole")) cfg.hole = get_hole(c["hole"], "cell.hole");
  }
  if (j.contains("material"))
    cfg.material = build_material(j["material"], "material");
  if (j.contains("loads")) get_loads(j["loads"], "loads", cfg.loads);

  std::string clamp_name = "boundary", ground_name = "boundary";
  if (j.contains("macro")) {
    const json& m = j["macro"];
    check_keys(m, "macro", {"nx", "ny", "lx", "ly", "clamp", "ground"});
    if (m.contains("nx")) cfg.macro_nx = get_int(m["nx"], "macro.nx");
    if (m.contains("ny")) cfg.macro_ny = get_int(m["ny"], "macro.ny");
    if (cfg.macro_nx < 1 || cfg.macro_ny < 1)
      fail("macro", "mesh resolution must be positive");
    if (m.contains("lx")) cfg.macro_lx = get_double(m["lx"], "macro.lx");
    if (m.contains("ly")) cfg.macro_ly = get_double(m["ly"], "macro.ly");
    if (!(cfg.macro_lx > 0) || !(cfg.macro_ly > 0))
      fail("macro", "side lengths must be positive");
    if (m.contains("clamp")) clamp_name = get_string(m["clamp"], "macro.clamp");
    if (m.contains("ground"))
      ground_name = get_string(m["ground"], "macro.ground");
  }
  cfg.clamp = make_marker(clamp_name, cfg.macro_lx, cfg.macro_ly, "macro.clamp");
  cfg.ground =
      make_marker(ground_name, cfg.macro_lx, cfg.macro_ly, "macro.ground");

  if (j.contains("validate")) {
    const json& v = j["validate"];
    check_keys(v, "validate", {"eps", "macro_n", "membrane", "bending"});
    if (v.contains("eps")) {
      if (!v["eps"].is_array() || v["eps"].empty())
        fail("validate.eps", "expected a non-empty list");
      cfg.eps_list.clear();
      for (const auto& e : v["eps"])
        cfg.eps_list.push_back(get_double(e, "validate.eps"));
      for (double e : cfg.eps_list) {
        if (!(e > 0)) fail("validate.eps", "entries must be positive");
        const double m = 1.0 / e;
        if (std::abs(m - std::lround(m)) > 1e-12 * m)
          fail("validate.eps",
               "entries must be reciprocals of positive integers");
      }
    }
    if (v.contains("macro_n")) {
      cfg.validate_macro_n = get_int(v["macro_n"], "validate.macro_n");
      if (cfg.validate_macro_n < 1) fail("validate.macro_n", "must be positive");
    }
    if (v.contains("membrane"))
      cfg.validate_membrane = get_bool(v["membrane"], "validate.membrane");
    if (v.contains("bending"))
      cfg.validate_bending = get_bool(v["bending"], "validate.bending");
  }

  if (j.contains("solver")) {
    const json& s = j["solver"];
    check_keys(s, "solver", {"tol", "sigma"});
    if (s.contains("tol")) {
      cfg.tol = get_double(s["tol"], "solver.tol");
      if (!(cfg.tol > 0)) fail("solver.tol", "must be positive");
    }
    if (s.contains("sigma")) {
      cfg.sigma = get_double(s["sigma"], "solver.sigma");
      if (!(cfg.sigma > 0)) fail("solver.sigma", "must be positive");
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace pzshell

#include "sttneg/tube_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "sttneg/errors.hpp"

namespace sttneg {

json to_json(const HyperRect& r) {
  json a = json::array();
  for (const auto& iv : r.dims()) a.push_back({iv.lo, iv.hi});
  return a;
}

HyperRect rect_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("box must be a non-empty array of [lo, hi]");
  std::vector<Interval> dims;
  for (const auto& iv : j) {
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
      throw ParseError("box interval must be [lo, hi]: " + iv.dump());
    }
    Interval v{iv[0].get<double>(), iv[1].get<double>()};
    if (!v.valid()) throw ParseError("box interval has lo > hi: " + iv.dump());
    dims.push_back(v);
  }
  return HyperRect(std::move(dims));
}

json to_json(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Constant:
      return {{"kind", "constant"}, {"value", t.a}};
    case Term::Kind::Linear:
      return {{"kind", "linear"}, {"t0", t.t0}, {"value", t.a}, {"slope", t.b}};
    case Term::Kind::Smoothstep:
      return {{"kind", "smoothstep"}, {"t0", t.t0}, {"t1", t.t1}, {"from", t.a}, {"to", t.b}};
    case Term::Kind::Bump:
      return {{"kind", "bump"},     {"rise", {t.t0, t.t1}}, {"fall", {t.t2, t.t3}},
              {"amplitude", t.a}};
  }
  throw Error("unknown term kind");
}

Term term_from_json(const json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "constant") return Term::constant(j.at("value").get<double>());
    if (kind == "linear") {
      return Term::linear(j.at("t0").get<double>(), j.at("value").get<double>(),
                          j.at("slope").get<double>());
    }
    if (kind == "smoothstep") {
      return Term::smooth(j.at("t0").get<double>(), j.at("t1").get<double>(),
                          j.at("from").get<double>(), j.at("to").get<double>());
    }
    if (kind == "bump") {
      const auto& r = j.at("rise");
      const auto& f = j.at("fall");
      return Term::bump(r.at(0).get<double>(), r.at(1).get<double>(), f.at(0).get<double>(),
                        f.at(1).get<double>(), j.at("amplitude").get<double>());
    }
    throw ParseError("unknown term kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed term: ") + e.what());
  }
}

namespace {

json curve_to_json(const Curve& c) {
  json a = json::array();
  for (const auto& t : c.terms) a.push_back(to_json(t));
  return a;
}

Curve curve_from_json(const json& j) {
  Curve c;
  for (const auto& t : j) c.terms.push_back(term_from_json(t));
  return c;
}

}  // namespace

json to_json(const BoundaryProfile& p) {
  json segs = json::array();
  for (const auto& s : p.segments()) {
    json js = {{"t0", s.t0},
               {"t1", s.t1},
               {"lower", curve_to_json(s.lower)},
               {"upper", curve_to_json(s.upper)}};
    if (s.fade_from) {
      js["fade"] = {{"t0", s.fade_t0}, {"t1", s.fade_t1}, {"from", to_json(*s.fade_from)}};
    }
    segs.push_back(std::move(js));
  }
  return {{"segments", std::move(segs)}};
}

BoundaryProfile profile_from_json(const json& j) {
  try {
    std::vector<Segment> segs;
    for (const auto& js : j.at("segments")) {
      Segment s;
      s.t0 = js.at("t0").get<double>();
      s.t1 = js.at("t1").get<double>();
      s.lower = curve_from_json(js.at("lower"));
      s.upper = curve_from_json(js.at("upper"));
      if (js.contains("fade")) {
        const auto& f = js.at("fade");
        s.fade_t0 = f.at("t0").get<double>();
        s.fade_t1 = f.at("t1").get<double>();
        s.fade_from = std::make_shared<const BoundaryProfile>(profile_from_json(f.at("from")));
      }
      segs.push_back(std::move(s));
    }
    return BoundaryProfile(std::move(segs));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed boundary profile: ") + e.what());
  }
}

json to_json(const Tube& t) {
  json dims = json::array();
  for (const auto& d : t.dims()) dims.push_back(to_json(d));
  return {{"agent", t.agent()}, {"t_start", t.t_start()}, {"horizon", t.horizon()},
          {"dims", std::move(dims)}};
}

Tube tube_from_json(const json& j) {
  try {
    std::vector<BoundaryProfile> dims;
    for (const auto& d : j.at("dims")) dims.push_back(profile_from_json(d));
    return Tube(j.at("agent").get<int>(), j.at("t_start").get<double>(),
                j.at("horizon").get<double>(), std::move(dims));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed tube: ") + e.what());
  }
}

std::string save_tube(const Tube& t) { return to_json(t).dump(); }

Tube load_tube(const std::string& text) {
  try {
    return tube_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("tube document is not valid JSON: ") + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + tmp.string() + " for writing");
    os << contents;
    if (!os) throw Error("failed writing " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace sttneg

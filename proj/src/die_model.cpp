#include "forgecam/die_model.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "forgecam/error.hpp"

namespace forgecam {

using nlohmann::json;

namespace {

Vec3 parse_vec3(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number())
        throw Error(ErrorCode::schema, what + " must be a [x,y,z] number triple");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Polyline3 parse_polyline(const json& j, const std::string& what, std::size_t min_points = 2) {
    if (!j.is_array() || j.size() < min_points)
        throw Error(ErrorCode::schema, what + " must list at least " + std::to_string(min_points) +
                                           " points");
    Polyline3 poly;
    poly.points.reserve(j.size());
    for (const json& p : j) poly.points.push_back(parse_vec3(p, what + " point"));
    for (std::size_t i = 1; i < poly.points.size(); ++i) {
        if (distance(poly.points[i - 1], poly.points[i]) <= 1e-9)
            throw Error(ErrorCode::schema, what + " has consecutive duplicate points");
    }
    return poly;
}

double require_number(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key) || !j[key].is_number())
        throw Error(ErrorCode::schema, ctx + ": missing or non-numeric field '" + key + "'");
    return j[key].get<double>();
}

std::string require_string(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key) || !j[key].is_string())
        throw Error(ErrorCode::schema, ctx + ": missing or non-string field '" + key + "'");
    return j[key].get<std::string>();
}

Surface parse_surface(const json& j) {
    Surface s;
    s.id = require_string(j, "id", "surface");
    const std::string ctx = "surface '" + s.id + "'";
    const std::string kind = require_string(j, "kind", ctx);
    if (kind == "plane") {
        s.kind = SurfaceKind::plane;
        PlaneDef def;
        def.origin = parse_vec3(j.value("origin", json::array({0, 0, 0})), ctx + " origin");
        if (!j.contains("normal")) throw Error(ErrorCode::schema, ctx + ": plane needs 'normal'");
        def.normal = parse_vec3(j["normal"], ctx + " normal");
        if (!is_unit(def.normal, 1e-6))
            throw Error(ErrorCode::validation, ctx + ": plane normal must be unit length");
        if (!j.contains("boundary")) throw Error(ErrorCode::schema, ctx + ": plane needs 'boundary'");
        def.boundary = parse_polyline(j["boundary"], ctx + " boundary", 3);
        if (j.contains("holes")) {
            for (const json& h : j["holes"])
                def.holes.push_back(parse_polyline(h, ctx + " hole", 3));
        }
        // boundary points must lie in the plane
        for (const Vec3& p : def.boundary.points) {
            if (std::abs(dot(p - def.origin, def.normal)) > 1e-6)
                throw Error(ErrorCode::validation, ctx + ": boundary point off the plane");
        }
        s.def = std::move(def);
    } else if (kind == "extruded") {
        s.kind = SurfaceKind::extruded;
        ExtrudedDef def;
        if (!j.contains("generatrix"))
            throw Error(ErrorCode::schema, ctx + ": extruded needs 'generatrix'");
        def.generatrix = parse_polyline(j["generatrix"], ctx + " generatrix");
        def.direction = parse_vec3(j.value("direction", json::array({0, 1, 0})), ctx + " direction");
        if (def.direction.norm() < 1e-9)
            throw Error(ErrorCode::validation, ctx + ": zero extrusion direction");
        def.extent = require_number(j, "extent", ctx);
        if (def.extent <= 0.0) throw Error(ErrorCode::validation, ctx + ": extent must be > 0");
        s.def = std::move(def);
    } else if (kind == "ruled") {
        s.kind = SurfaceKind::ruled;
        RuledDef def;
        if (!j.contains("rail0") || !j.contains("rail1"))
            throw Error(ErrorCode::schema, ctx + ": ruled needs 'rail0' and 'rail1'");
        def.rail0 = parse_polyline(j["rail0"], ctx + " rail0");
        def.rail1 = parse_polyline(j["rail1"], ctx + " rail1");
        if (def.rail0.size() != def.rail1.size())
            throw Error(ErrorCode::validation, ctx + ": ruled rails must have equal point counts");
        s.def = std::move(def);
    } else if (kind == "revolved") {
        s.kind = SurfaceKind::revolved;
        RevolvedDef def;
        def.axis_point = parse_vec3(j.value("axis_point", json::array({0, 0, 0})), ctx);
        if (!j.contains("axis_dir")) throw Error(ErrorCode::schema, ctx + ": revolved needs 'axis_dir'");
        def.axis_dir = parse_vec3(j["axis_dir"], ctx + " axis_dir");
        if (def.axis_dir.norm() < 1e-9)
            throw Error(ErrorCode::validation, ctx + ": zero revolve axis");
        if (!j.contains("profile")) throw Error(ErrorCode::schema, ctx + ": revolved needs 'profile'");
        def.profile = parse_polyline(j["profile"], ctx + " profile");
        def.angle_start_deg = j.value("angle_start_deg", 0.0);
        def.angle_end_deg = j.value("angle_end_deg", 360.0);
        const double span = def.angle_end_deg - def.angle_start_deg;
        if (span <= 0.0 || span > 360.0 + 1e-9)
            throw Error(ErrorCode::validation, ctx + ": revolve angle range must be in (0, 360]");
        s.def = std::move(def);
    } else if (kind == "blend") {
        s.kind = SurfaceKind::blend;
        BlendDef def;
        if (!j.contains("spine")) throw Error(ErrorCode::schema, ctx + ": blend needs 'spine'");
        def.spine = parse_polyline(j["spine"], ctx + " spine");
        def.radius = require_number(j, "radius", ctx);
        if (def.radius <= 0.0) throw Error(ErrorCode::validation, ctx + ": blend radius must be > 0");
        if (!j.contains("adjacent") || !j["adjacent"].is_array() || j["adjacent"].size() != 2)
            throw Error(ErrorCode::schema, ctx + ": blend needs 'adjacent' with two surface ids");
        def.adjacent[0] = j["adjacent"][0].get<std::string>();
        def.adjacent[1] = j["adjacent"][1].get<std::string>();
        def.convex = j.value("convex", false);
        s.def = std::move(def);
    } else {
        throw Error(ErrorCode::schema, ctx + ": unknown kind '" + kind + "'");
    }
    return s;
}

json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json polyline_json(const Polyline3& p) {
    json out = json::array();
    for (const Vec3& v : p.points) out.push_back(vec3_json(v));
    return out;
}

}  // namespace

DieModel parse_die_model(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::schema, std::string("die model is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("surfaces") || !doc["surfaces"].is_array())
        throw Error(ErrorCode::schema, "die model needs a 'surfaces' array");
    if (doc["surfaces"].empty())
        throw Error(ErrorCode::schema, "die model has an empty surface list");

    DieModel model;
    std::set<std::string> ids;
    for (const json& js : doc["surfaces"]) {
        Surface s = parse_surface(js);
        if (!ids.insert(s.id).second)
            throw Error(ErrorCode::validation, "duplicate surface id '" + s.id + "'");
        model.surfaces.push_back(std::move(s));
    }
    std::sort(model.surfaces.begin(), model.surfaces.end(),
              [](const Surface& a, const Surface& b) { return a.id < b.id; });

    if (!doc.contains("technology") || !doc["technology"].is_object())
        throw Error(ErrorCode::schema, "die model needs a 'technology' object");
    const json& tech = doc["technology"];
    Technology& t = model.technology;
    t.extraction_direction = parse_vec3(tech.value("extraction_direction", json::array({0, 0, 1})),
                                        "extraction_direction");
    if (!is_unit(t.extraction_direction, 1e-6))
        throw Error(ErrorCode::validation, "extraction_direction must be unit length");
    if (distance(t.extraction_direction, Vec3{0, 0, 1}) > 1e-9)
        throw Error(ErrorCode::validation,
                    "extraction_direction must equal the +Z tool axis (3-axis machining)");
    t.slope_angle_deg = require_number(tech, "slope_angle_deg", "technology");
    if (t.slope_angle_deg <= 0.0 || t.slope_angle_deg >= 90.0)
        throw Error(ErrorCode::validation, "slope_angle_deg must be in (0, 90)");
    t.target_scallop_mm = require_number(tech, "target_scallop_mm", "technology");
    if (t.target_scallop_mm <= 0.0)
        throw Error(ErrorCode::validation, "target_scallop_mm must be > 0");
    t.programmed_feed_mm_min = require_number(tech, "programmed_feed_mm_min", "technology");
    if (t.programmed_feed_mm_min <= 0.0)
        throw Error(ErrorCode::validation, "programmed_feed_mm_min must be > 0");
    t.clearance_z_mm = require_number(tech, "clearance_z_mm", "technology");
    if (tech.contains("thresholds")) {
        const json& th = tech["thresholds"];
        t.thresholds.flat_tol_deg = th.value("flat_tol_deg", t.thresholds.flat_tol_deg);
        t.thresholds.steep_band_deg = th.value("steep_band_deg", t.thresholds.steep_band_deg);
        t.thresholds.ruling_tilt_deg = th.value("ruling_tilt_deg", t.thresholds.ruling_tilt_deg);
        t.thresholds.coincidence_eps_mm =
            th.value("coincidence_eps_mm", t.thresholds.coincidence_eps_mm);
    }

    if (doc.contains("adjacency")) {
        for (const json& pair : doc["adjacency"]) {
            if (!pair.is_array() || pair.size() != 2)
                throw Error(ErrorCode::schema, "adjacency entries must be [idA, idB] pairs");
            model.explicit_adjacency.emplace_back(pair[0].get<std::string>(),
                                                  pair[1].get<std::string>());
        }
    }

    // referential integrity
    for (const Surface& s : model.surfaces) {
        if (s.kind != SurfaceKind::blend) continue;
        for (const std::string& ref : s.blend().adjacent) {
            if (!ids.count(ref))
                throw Error(ErrorCode::dangling_reference,
                            "blend '" + s.id + "' references missing surface '" + ref + "'");
        }
    }
    for (const auto& [a, b] : model.explicit_adjacency) {
        if (!ids.count(a) || !ids.count(b))
            throw Error(ErrorCode::dangling_reference, "adjacency references missing surface");
    }
    return model;
}

std::string serialize_die_model(const DieModel& model) {
    json doc;
    doc["surfaces"] = json::array();
    for (const Surface& s : model.surfaces) {
        json js;
        js["id"] = s.id;
        js["kind"] = to_string(s.kind);
        switch (s.kind) {
            case SurfaceKind::plane: {
                const PlaneDef& d = s.plane();
                js["origin"] = vec3_json(d.origin);
                js["normal"] = vec3_json(d.normal);
                js["boundary"] = polyline_json(d.boundary);
                if (!d.holes.empty()) {
                    js["holes"] = json::array();
                    for (const Polyline3& h : d.holes) js["holes"].push_back(polyline_json(h));
                }
                break;
            }
            case SurfaceKind::extruded: {
                const ExtrudedDef& d = s.extruded();
                js["generatrix"] = polyline_json(d.generatrix);
                js["direction"] = vec3_json(d.direction);
                js["extent"] = d.extent;
                break;
            }
            case SurfaceKind::ruled: {
                const RuledDef& d = s.ruled();
                js["rail0"] = polyline_json(d.rail0);
                js["rail1"] = polyline_json(d.rail1);
                break;
            }
            case SurfaceKind::revolved: {
                const RevolvedDef& d = s.revolved();
                js["axis_point"] = vec3_json(d.axis_point);
                js["axis_dir"] = vec3_json(d.axis_dir);
                js["profile"] = polyline_json(d.profile);
                js["angle_start_deg"] = d.angle_start_deg;
                js["angle_end_deg"] = d.angle_end_deg;
                break;
            }
            case SurfaceKind::blend: {
                const BlendDef& d = s.blend();
                js["spine"] = polyline_json(d.spine);
                js["radius"] = d.radius;
                js["adjacent"] = json::array({d.adjacent[0], d.adjacent[1]});
                js["convex"] = d.convex;
                break;
            }
        }
        doc["surfaces"].push_back(std::move(js));
    }
    const Technology& t = model.technology;
    doc["technology"] = {
        {"extraction_direction", vec3_json(t.extraction_direction)},
        {"slope_angle_deg", t.slope_angle_deg},
        {"target_scallop_mm", t.target_scallop_mm},
        {"programmed_feed_mm_min", t.programmed_feed_mm_min},
        {"clearance_z_mm", t.clearance_z_mm},
        {"thresholds",
         {{"flat_tol_deg", t.thresholds.flat_tol_deg},
          {"steep_band_deg", t.thresholds.steep_band_deg},
          {"ruling_tilt_deg", t.thresholds.ruling_tilt_deg},
          {"coincidence_eps_mm", t.thresholds.coincidence_eps_mm}}}};
    if (!model.explicit_adjacency.empty()) {
        doc["adjacency"] = json::array();
        for (const auto& [a, b] : model.explicit_adjacency)
            doc["adjacency"].push_back(json::array({a, b}));
    }
    return doc.dump(2) + "\n";
}

std::vector<Tool> parse_tools(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::schema, std::string("tools file is not valid JSON: ") + e.what());
    }
    if (!doc.contains("tools") || !doc["tools"].is_array())
        throw Error(ErrorCode::schema, "tools file needs a 'tools' array");
    std::vector<Tool> tools;
    std::set<std::string> ids;
    for (const json& jt : doc["tools"]) {
        Tool t;
        t.id = require_string(jt, "id", "tool");
        if (!ids.insert(t.id).second)
            throw Error(ErrorCode::validation, "duplicate tool id '" + t.id + "'");
        const std::string shape = require_string(jt, "shape", "tool " + t.id);
        if (shape == "ball_end")
            t.shape = ToolShape::ball_end;
        else if (shape == "flat_end")
            t.shape = ToolShape::flat_end;
        else
            throw Error(ErrorCode::schema, "tool " + t.id + ": unknown shape '" + shape + "'");
        t.cutting_radius_mm = require_number(jt, "cutting_radius_mm", "tool " + t.id);
        t.body_radius_mm = jt.value("body_radius_mm", t.cutting_radius_mm);
        t.overall_length_mm = jt.value("overall_length_mm", 60.0);
        if (t.cutting_radius_mm <= 0.0)
            throw Error(ErrorCode::validation, "tool " + t.id + ": cutting radius must be > 0");
        if (t.body_radius_mm < t.cutting_radius_mm)
            throw Error(ErrorCode::validation, "tool " + t.id + ": body radius < cutting radius");
        if (t.overall_length_mm <= 0.0)
            throw Error(ErrorCode::validation, "tool " + t.id + ": overall length must be > 0");
        tools.push_back(std::move(t));
    }
    return tools;
}

CompiledDie::CompiledDie(DieModel model) : model_(std::move(model)) {
    std::sort(model_.surfaces.begin(), model_.surfaces.end(),
              [](const Surface& a, const Surface& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < model_.surfaces.size(); ++i) index_[model_.surfaces[i].id] = i;

    patches_.resize(model_.surfaces.size());
    // non-blends first; blends need their neighbours' normals
    for (std::size_t i = 0; i < model_.surfaces.size(); ++i) {
        if (model_.surfaces[i].kind != SurfaceKind::blend)
            patches_[i] = make_patch(model_.surfaces[i]);
    }
    for (std::size_t i = 0; i < model_.surfaces.size(); ++i) {
        const Surface& s = model_.surfaces[i];
        if (s.kind != SurfaceKind::blend) continue;
        const BlendDef& def = s.blend();
        std::array<const Patch*, 2> neighbours{};
        for (int k = 0; k < 2; ++k) {
            const std::size_t ni = index_of(def.adjacent[k]);
            if (model_.surfaces[ni].kind == SurfaceKind::blend)
                throw Error(ErrorCode::validation,
                            "blend '" + s.id + "' may not neighbour another blend");
            neighbours[k] = patches_[ni].get();
        }
        // nearest-sample normals of the two neighbours along the spine
        std::array<SampleGrid, 2> grids{sample_patch(*neighbours[0], 65),
                                        sample_patch(*neighbours[1], 65)};
        const CompiledDie* self = this;
        (void)self;
        const int stations = std::max<int>(33, static_cast<int>(def.spine.size()));
        std::vector<BlendFrame> frames;
        frames.reserve(stations);
        const double total = def.spine.length();
        for (int st = 0; st < stations; ++st) {
            const double sarc = total * static_cast<double>(st) / (stations - 1);
            BlendFrame f;
            f.centre = def.spine.point_at(sarc);
            std::array<Vec3, 2> dirs;
            for (int k = 0; k < 2; ++k) {
                double bd = 1e300;
                Vec3 n{0, 0, 1};
                for (const GridSample& gs : grids[k].samples) {
                    const double d = (gs.point - f.centre).norm2();
                    if (d < bd) {
                        bd = d;
                        n = gs.normal;
                    }
                }
                dirs[k] = def.convex ? n : -n;
            }
            f.dir_a = dirs[0];
            f.dir_b = dirs[1];
            if (std::abs(dot(f.dir_a, f.dir_b)) > 1.0 - 1e-9)
                throw Error(ErrorCode::invalid_geometry,
                            "blend '" + s.id + "': degenerate fillet arc (parallel tangencies)");
            frames.push_back(f);
        }
        patches_[i] = make_blend_patch(def, std::move(frames));
    }
}

std::size_t CompiledDie::index_of(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end())
        throw Error(ErrorCode::dangling_reference, "unknown surface id '" + id + "'");
    return it->second;
}

MachinabilityReport check_machinability(const CompiledDie& die, int resolution) {
    MachinabilityReport report;
    report.machining_direction = die.technology().extraction_direction;
    for (std::size_t i = 0; i < die.surface_count(); ++i) {
        const SampleGrid grid = sample_patch(die.patch(i), resolution);
        for (const GridSample& s : grid.samples) {
            if (s.normal.z < -1e-6)
                report.undercuts.push_back({die.surface(i).id, s.point, s.normal});
        }
    }
    report.machinable = report.undercuts.empty();
    return report;
}

}  // namespace forgecam

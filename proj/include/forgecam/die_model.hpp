#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "forgecam/geometry.hpp"
#include "forgecam/surface.hpp"

namespace forgecam {

/// Classification thresholds; overridable in the technology block.
struct Thresholds {
    double flat_tol_deg = 1.0;       // max slope of a horizontal plane
    double steep_band_deg = 5.0;     // band around (90 - slope_angle)
    double ruling_tilt_deg = 15.0;   // FC/FF discrimination
    double coincidence_eps_mm = 0.01;
};

struct Technology {
    Vec3 extraction_direction{0.0, 0.0, 1.0};
    double slope_angle_deg = 3.0;
    double target_scallop_mm = 0.01;
    double programmed_feed_mm_min = 6000.0;
    double clearance_z_mm = 50.0;
    Thresholds thresholds;
};

enum class ToolShape { ball_end, flat_end };

struct Tool {
    std::string id;
    ToolShape shape = ToolShape::ball_end;
    double cutting_radius_mm = 0.0;
    double body_radius_mm = 0.0;
    double overall_length_mm = 0.0;
};

struct DieModel {
    std::vector<Surface> surfaces;  // sorted by id after parsing
    Technology technology;
    std::vector<std::pair<std::string, std::string>> explicit_adjacency;
};

/// Parses and validates the die-model JSON document (see docs/file_formats.md).
/// Throws Error{schema | dangling_reference | invalid_geometry | validation}.
DieModel parse_die_model(const std::string& json_text);

std::string serialize_die_model(const DieModel& model);

std::vector<Tool> parse_tools(const std::string& json_text);

/// Die model with evaluators built for every surface (blend fillet frames
/// derived from the adjacent surfaces' outward normals).
class CompiledDie {
public:
    explicit CompiledDie(DieModel model);

    const DieModel& model() const { return model_; }
    const Technology& technology() const { return model_.technology; }
    std::size_t surface_count() const { return model_.surfaces.size(); }

    const Surface& surface(std::size_t i) const { return model_.surfaces[i]; }
    const Patch& patch(std::size_t i) const { return *patches_[i]; }
    std::size_t index_of(const std::string& id) const;
    bool has_surface(const std::string& id) const { return index_.count(id) > 0; }

private:
    DieModel model_;
    std::vector<std::unique_ptr<Patch>> patches_;
    std::map<std::string, std::size_t> index_;
};

struct UndercutSample {
    std::string surface_id;
    Vec3 point;
    Vec3 normal;
};

struct MachinabilityReport {
    bool machinable = false;
    Vec3 machining_direction{0.0, 0.0, 1.0};
    std::vector<UndercutSample> undercuts;
};

/// Samples every surface and reports points whose outward normal dips below
/// the horizon (normal.z < -1e-6): unreachable with the +Z tool axis.
MachinabilityReport check_machinability(const CompiledDie& die, int resolution);

inline constexpr int kDefaultResolution = 33;

}  // namespace forgecam

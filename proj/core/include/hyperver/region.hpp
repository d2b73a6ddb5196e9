#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hyperver {

struct Interval {
    double lower;
    double upper;

    double width() const noexcept { return upper - lower; }
    bool contains(double x) const noexcept { return lower <= x && x <= upper; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned closed box inside the unit cube [0,1]^n. Faces that sit on
/// 0 or 1 are part of the cube boundary; the remaining ("interior") faces
/// separate the box from its complement.
class BoxRegion {
public:
    /// Throws std::invalid_argument unless 0 <= lower <= upper <= 1 for
    /// every interval and at least one interval is given.
    explicit BoxRegion(std::vector<Interval> intervals);

    static BoxRegion unit_cube(std::size_t dimension);

    std::size_t dimension() const noexcept { return intervals_.size(); }
    std::span<const Interval> intervals() const noexcept { return intervals_; }
    const Interval& operator[](std::size_t i) const { return intervals_.at(i); }

    bool contains(std::span<const double> point) const;
    bool is_subset_of(const BoxRegion& other) const;
    bool is_unit_cube() const;
    /// Number of faces of interval i that lie strictly inside (0,1).
    int interior_faces(std::size_t i) const;

    /// L-infinity distance from `point` to the topological boundary of the
    /// box relative to the unit cube. Zero when the point is on an interior
    /// face; +inf for the full cube.
    double distance_to_boundary(std::span<const double> point) const;

    std::string to_string() const;

    friend bool operator==(const BoxRegion&, const BoxRegion&) = default;

private:
    std::vector<Interval> intervals_;
};

/// D^+_eps: every interval grows by eps, clipped to [0,1].
BoxRegion region_expand(const BoxRegion& region, double eps);

/// D^-_eps: every interior face moves inward by eps; faces on 0 or 1 stay.
/// Empty when an interval inverts.
std::optional<BoxRegion> region_reduce(const BoxRegion& region, double eps);

}  // namespace hyperver

#include "hyperver/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hyperver {

BoxRegion::BoxRegion(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    if (intervals_.empty()) throw std::invalid_argument("region needs at least one interval");
    for (const auto& iv : intervals_) {
        if (!(0.0 <= iv.lower && iv.lower <= iv.upper && iv.upper <= 1.0)) {
            std::ostringstream msg;
            msg << "interval [" << iv.lower << "," << iv.upper << "] is not a subinterval of [0,1]";
            throw std::invalid_argument(msg.str());
        }
    }
}

BoxRegion BoxRegion::unit_cube(std::size_t dimension) {
    return BoxRegion(std::vector<Interval>(dimension, Interval{0.0, 1.0}));
}

bool BoxRegion::contains(std::span<const double> point) const {
    if (point.size() != intervals_.size()) throw std::invalid_argument("point dimension does not match region");
    for (std::size_t i = 0; i < point.size(); ++i)
        if (!intervals_[i].contains(point[i])) return false;
    return true;
}

bool BoxRegion::is_subset_of(const BoxRegion& other) const {
    if (other.dimension() != dimension()) return false;
    for (std::size_t i = 0; i < intervals_.size(); ++i)
        if (intervals_[i].lower < other.intervals_[i].lower || intervals_[i].upper > other.intervals_[i].upper)
            return false;
    return true;
}

bool BoxRegion::is_unit_cube() const {
    return std::all_of(intervals_.begin(), intervals_.end(),
                       [](const Interval& iv) { return iv.lower == 0.0 && iv.upper == 1.0; });
}

int BoxRegion::interior_faces(std::size_t i) const {
    const auto& iv = intervals_.at(i);
    return (iv.lower > 0.0 ? 1 : 0) + (iv.upper < 1.0 ? 1 : 0);
}

double BoxRegion::distance_to_boundary(std::span<const double> point) const {
    if (point.size() != intervals_.size()) throw std::invalid_argument("point dimension does not match region");
    if (contains(point)) {
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < point.size(); ++i) {
            if (intervals_[i].lower > 0.0) d = std::min(d, point[i] - intervals_[i].lower);
            if (intervals_[i].upper < 1.0) d = std::min(d, intervals_[i].upper - point[i]);
        }
        return d;
    }
    double d = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (point[i] < intervals_[i].lower) d = std::max(d, intervals_[i].lower - point[i]);
        if (point[i] > intervals_[i].upper) d = std::max(d, point[i] - intervals_[i].upper);
    }
    return d;
}

std::string BoxRegion::to_string() const {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < intervals_.size(); ++i)
        out << (i ? "," : "") << '[' << intervals_[i].lower << ',' << intervals_[i].upper << ']';
    return out.str();
}

BoxRegion region_expand(const BoxRegion& region, double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("expansion radius must be non-negative");
    std::vector<Interval> out;
    out.reserve(region.dimension());
    for (const auto& iv : region.intervals())
        out.push_back({std::max(0.0, iv.lower - eps), std::min(1.0, iv.upper + eps)});
    return BoxRegion(std::move(out));
}

std::optional<BoxRegion> region_reduce(const BoxRegion& region, double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("reduction radius must be non-negative");
    std::vector<Interval> out;
    out.reserve(region.dimension());
    for (const auto& iv : region.intervals()) {
        const double lo = iv.lower > 0.0 ? iv.lower + eps : 0.0;
        const double hi = iv.upper < 1.0 ? iv.upper - eps : 1.0;
        if (lo > hi) return std::nullopt;
        out.push_back({lo, hi});
    }
    return BoxRegion(std::move(out));
}

}  // namespace hyperver

#include "geosel/geodesy.hpp"

#include <algorithm>
#include <cmath>

#include "geosel/error.hpp"

namespace geosel {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

double normalize_lon(double lon_deg) {
    if (!std::isfinite(lon_deg)) {
        throw Error(ErrorClass::InputFormat, "non-finite longitude");
    }
    double r = std::fmod(lon_deg + 180.0, 360.0);
    if (r < 0.0) r += 360.0;
    return r - 180.0;
}

GeoPoint::GeoPoint(double lat_deg, double lon_deg) {
    if (!std::isfinite(lat_deg) || lat_deg < -90.0 || lat_deg > 90.0) {
        throw Error(ErrorClass::InputFormat, "latitude out of range [-90, 90]");
    }
    lat = lat_deg;
    // All longitudes collapse to one point at the poles.
    lon = (lat == 90.0 || lat == -90.0) ? 0.0 : normalize_lon(lon_deg);
}

DistanceKm gcd(const GeoPoint& a, const GeoPoint& b) {
    // fabs keeps the floating-point path identical under argument swap.
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi = std::fabs(b.lat - a.lat) * kDegToRad;
    const double dlam = std::fabs(b.lon - a.lon) * kDegToRad;

    const double sp = std::sin(dphi * 0.5);
    const double sl = std::sin(dlam * 0.5);
    double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
    h = std::clamp(h, 0.0, 1.0);
    return DistanceKm{2.0 * kEarthRadiusKm * std::asin(std::sqrt(h))};
}

}  // namespace geosel
